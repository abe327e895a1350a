//! Closed-form post-echo moments of the coherent one-axis-twisting chain.

use rayon::prelude::*;

use crate::lindblad::SpinChainModel;
use crate::real::Real;
use crate::spin::SpinMoments;

/// Pairwise echo phases `φ_ij = V_ij τ/2`.
#[derive(Clone, Debug)]
pub struct PhaseTable<T> {
    pub n: usize,
    /// Row-major, symmetric, zero diagonal.
    pub phi: Vec<T>,
}

impl<T: Real> PhaseTable<T> {
    pub fn new(model: &SpinChainModel<T>, tau: T) -> Self {
        let half_tau = tau * T::lit(0.5);
        Self { n: model.n_sites, phi: model.couplings.iter().map(|&v| v * half_tau).collect() }
    }

    /// From an explicit symmetric coupling matrix.
    pub fn from_couplings(n: usize, couplings: &[T], tau: T) -> Self {
        let half_tau = tau * T::lit(0.5);
        Self { n, phi: couplings.iter().map(|&v| v * half_tau).collect() }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.phi[i * self.n + j]
    }

    pub fn phi_plus(&self, i: usize, j: usize, k: usize) -> T {
        self.get(i, k) + self.get(j, k)
    }

    pub fn phi_minus(&self, i: usize, j: usize, k: usize) -> T {
        self.get(i, k) - self.get(j, k)
    }
}

/// `Π_{k∉skip} row[k]` for every `skip` in `0..n`, without division.
fn leave_one_out<T: Real>(row: &[T], out: &mut [T]) {
    let n = row.len();
    let mut acc = T::one();
    for k in 0..n {
        out[k] = acc;
        acc *= row[k];
    }
    acc = T::one();
    for k in (0..n).rev() {
        out[k] *= acc;
        acc *= row[k];
    }
}

/// Moments after `π/2 – τ/2 – π – τ/2 – π/2` for an initially all-down chain.
///
/// The cross term uses the form symmetrized over `i ↔ j`, which reduces to a
/// sum over `i < j` only for reflection-symmetric coupling matrices.
pub fn analytic_moments<T: Real>(phases: &PhaseTable<T>, n_sites: usize) -> SpinMoments<T> {
    let n = n_sites;
    assert_eq!(phases.n, n, "phase table size mismatch");
    let quarter_n = T::lit(0.25) * T::of_usize(n);
    if n == 0 {
        return SpinMoments::default();
    }
    let mut cos = vec![T::zero(); n * n];
    let mut sin = vec![T::zero(); n * n];
    for (idx, &p) in phases.phi.iter().enumerate() {
        let (s, c) = p.sin_cos();
        cos[idx] = c;
        sin[idx] = s;
    }
    // Diagonal phases are zero, so cos = 1 there and products over k ≠ i
    // can include k = i harmlessly.

    // Per row i: jz contribution and cross-term contribution.
    let rows: Vec<(T, T, T)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let ci = &cos[i * n..(i + 1) * n];
            let si = &sin[i * n..(i + 1) * n];
            let mut loo = vec![T::zero(); n];
            leave_one_out(ci, &mut loo);
            let jz_i = loo[i];
            let mut cross = T::zero();
            for j in 0..n {
                if j != i {
                    cross += si[j] * loo[j];
                }
            }
            // Σ_{j>i} [Π_k cos(φ_ik − φ_jk) − Π_k cos(φ_ik + φ_jk)], k ∉ {i, j}
            let mut jx2_i = T::zero();
            for j in (i + 1)..n {
                let cj = &cos[j * n..(j + 1) * n];
                let sj = &sin[j * n..(j + 1) * n];
                let mut pm = T::one();
                let mut pp = T::one();
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let cc = ci[k] * cj[k];
                    let ss = si[k] * sj[k];
                    pm *= cc + ss;
                    pp *= cc - ss;
                }
                jx2_i += pm - pp;
            }
            (jz_i, cross, jx2_i)
        })
        .collect();

    let mut jz = T::zero();
    let mut cross = T::zero();
    let mut jx2 = T::zero();
    for (a, b, c) in rows {
        jz += a;
        cross += b;
        jx2 += c;
    }
    SpinMoments {
        jx: T::zero(),
        jy: T::zero(),
        jz: -T::lit(0.5) * jz,
        jx2: quarter_n + T::lit(0.25) * jx2,
        jy2: quarter_n,
        jxy: -T::lit(0.5) * cross,
    }
}

/// Multiplies every first and second moment by `e^{−Γ̄τ}`.
pub fn apply_dissipative_scaling<T: Real>(moments: &SpinMoments<T>, gamma_bar: T, tau: T) -> SpinMoments<T> {
    moments.scaled((-gamma_bar * tau).exp())
}
