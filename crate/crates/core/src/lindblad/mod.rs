//! Exact open-system dynamics of the dressed spin chain and of dressed atom pairs.
//!
//! The chain evolves under
//! `H_s = Σ_k [g J_x^(k) + δ_k J_z^(k)] + Σ_{k<l} V_kl J_z^(k) J_z^(l)`
//! with dephasing jumps `√γ¹ |1_k⟩⟨1_k|` and `√γ²_kl |1_k 1_l⟩⟨1_k 1_l|`.
//! All jump operators are diagonal in the computational basis, so the
//! dissipator only damps coherences and the generator is applied elementwise
//! plus a bit-flip term for the transverse drive.

mod dense;
pub mod integrator;
mod pair;

use num_complex::Complex;
use rayon::prelude::*;

use crate::dressing::PairInteraction;
use crate::error::{Error, Result};
use crate::linalg::is_positive_with_shift;
use crate::real::Real;
use crate::spin::{jz_value, site_rotation, Axis, SpinMoments};

pub use dense::DenseLindblad;
pub use integrator::{DormandPrince, Rhs, Tolerances};
pub use pair::{effective_pair_generator, evolve_effective_pair, evolve_three_level_pair, three_level_generator, PairPopulations};

/// Largest chain the dense density-matrix solver accepts by default.
pub const DEFAULT_DENSE_CAP: usize = 8;

const TRACE_TOL: f64 = 1e-9;
const HERMITICITY_TOL: f64 = 1e-9;
const POSITIVITY_TOL: f64 = 1e-8;

/// Finite open chain of dressed two-level atoms.
#[derive(Clone, Debug)]
pub struct SpinChainModel<T> {
    pub n_sites: usize,
    pub spacing: T,
    /// Row-major `n × n`, symmetric, zero diagonal.
    pub couplings: Vec<T>,
    pub gamma1: T,
    /// Row-major `n × n`, symmetric, zero diagonal, non-negative.
    pub gamma2_matrix: Vec<T>,
    pub g: T,
    pub site_detunings: Vec<T>,
}

impl<T: Real> SpinChainModel<T> {
    pub fn new(
        n_sites: usize,
        spacing: T,
        couplings: Vec<T>,
        gamma1: T,
        gamma2_matrix: Vec<T>,
        g: T,
        site_detunings: Vec<T>,
    ) -> Result<Self> {
        let m = Self { n_sites, spacing, couplings, gamma1, gamma2_matrix, g, site_detunings };
        m.check()?;
        Ok(m)
    }

    /// Samples `V(|j−k|·a)` and `γ²(|j−k|·a)` from a pair interaction.
    pub fn from_interaction<I: PairInteraction<T> + ?Sized>(n_sites: usize, spacing: T, interaction: &I, g: T) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::domain("spin chain needs at least one site"));
        }
        let n = n_sites;
        let mut by_distance = Vec::with_capacity(n);
        by_distance.push((T::zero(), T::zero()));
        for d in 1..n {
            let r = spacing * T::of_usize(d);
            by_distance.push((interaction.coupling(r)?, interaction.two_body_rate(r)?));
        }
        let mut couplings = vec![T::zero(); n * n];
        let mut gamma2 = vec![T::zero(); n * n];
        for j in 0..n {
            for k in 0..n {
                let (v, g2) = by_distance[j.abs_diff(k)];
                couplings[j * n + k] = v;
                gamma2[j * n + k] = g2;
            }
        }
        Self::new(n, spacing, couplings, interaction.single_body_rate()?, gamma2, g, vec![T::zero(); n])
    }

    pub fn check(&self) -> Result<()> {
        let n = self.n_sites;
        if n == 0 {
            return Err(Error::domain("spin chain needs at least one site"));
        }
        if self.couplings.len() != n * n || self.gamma2_matrix.len() != n * n || self.site_detunings.len() != n {
            return Err(Error::domain("coupling, rate and detuning arrays must match the chain length"));
        }
        if !(self.gamma1 >= T::zero()) {
            return Err(Error::domain("single-body rate must be non-negative"));
        }
        for j in 0..n {
            if self.couplings[j * n + j] != T::zero() || self.gamma2_matrix[j * n + j] != T::zero() {
                return Err(Error::domain("couplings and rates must vanish on the diagonal"));
            }
            for k in 0..n {
                let (v, vt) = (self.couplings[j * n + k], self.couplings[k * n + j]);
                let (g, gt) = (self.gamma2_matrix[j * n + k], self.gamma2_matrix[k * n + j]);
                if v != vt || g != gt {
                    return Err(Error::domain("couplings and rates must be symmetric"));
                }
                if !(g >= T::zero()) || !v.is_finite() || !g.is_finite() {
                    return Err(Error::domain("two-body rates must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    pub fn coupling(&self, j: usize, k: usize) -> T {
        self.couplings[j * self.n_sites + k]
    }

    pub fn gamma2(&self, j: usize, k: usize) -> T {
        self.gamma2_matrix[j * self.n_sites + k]
    }

    pub fn dim(&self) -> usize {
        1 << self.n_sites
    }

    /// Same couplings with both dephasing channels switched off.
    pub fn coherent(&self) -> Self {
        let mut m = self.clone();
        m.gamma1 = T::zero();
        m.gamma2_matrix.iter_mut().for_each(|x| *x = T::zero());
        m
    }

    /// Same model without the two-body channel.
    pub fn without_two_body(&self) -> Self {
        let mut m = self.clone();
        m.gamma2_matrix.iter_mut().for_each(|x| *x = T::zero());
        m
    }

    pub fn with_drive(&self, g: T) -> Self {
        let mut m = self.clone();
        m.g = g;
        m
    }

    /// Diagonal energy `⟨m|H_s|m⟩` without the transverse drive.
    pub fn diagonal_energy(&self, m: usize) -> T {
        let n = self.n_sites;
        let half = T::lit(0.5);
        let s = |k: usize| if m >> k & 1 == 1 { half } else { -half };
        let mut e = T::zero();
        for k in 0..n {
            e += self.site_detunings[k] * s(k);
            for l in (k + 1)..n {
                e += self.coupling(k, l) * s(k) * s(l);
            }
        }
        e
    }

    /// Decay rate of the coherence `ρ_mn` from the diagonal jump operators.
    pub fn coherence_decay(&self, m: usize, n_idx: usize) -> T {
        let n = self.n_sites;
        let half = T::lit(0.5);
        let diff = m ^ n_idx;
        let mut rate = self.gamma1 * half * T::of_usize(diff.count_ones() as usize);
        for k in 0..n {
            for l in (k + 1)..n {
                let pair = (1usize << k) | (1 << l);
                let a = m & pair == pair;
                let b = n_idx & pair == pair;
                if a != b {
                    rate += self.gamma2(k, l) * half;
                }
            }
        }
        rate
    }
}

/// Dense density matrix over a finite Hilbert space, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState<T> {
    pub dim: usize,
    pub matrix: Vec<Complex<T>>,
}

/// Consistency measures of a density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateCheck<T> {
    pub trace_error: T,
    pub hermiticity_error: T,
    pub positive: bool,
}

impl<T: Real> StateCheck<T> {
    pub fn ok(&self) -> bool {
        self.trace_error <= T::lit(TRACE_TOL) && self.hermiticity_error <= T::lit(HERMITICITY_TOL) && self.positive
    }
}

impl<T: Real> DensityState<T> {
    pub fn from_pure(psi: &[Complex<T>]) -> Self {
        let dim = psi.len();
        let norm: T = psi.iter().map(|a| a.norm_sqr()).sum();
        let mut matrix = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                matrix[i * dim + j] = psi[i] * psi[j].conj() / norm;
            }
        }
        Self { dim, matrix }
    }

    /// Projector onto basis state `index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut matrix = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        matrix[index * dim + index] = Complex::new(T::one(), T::zero());
        Self { dim, matrix }
    }

    /// Product of single-site pure states `a_k|0⟩ + b_k|1⟩`.
    pub fn product(sites: &[[Complex<T>; 2]]) -> Self {
        let mut psi = vec![Complex::new(T::one(), T::zero())];
        for (k, amp) in sites.iter().enumerate() {
            let mut next = vec![Complex::new(T::zero(), T::zero()); psi.len() * 2];
            for (m, a) in psi.iter().enumerate() {
                next[m] = *a * amp[0];
                next[m | (1 << k)] = *a * amp[1];
            }
            psi = next;
        }
        Self::from_pure(&psi)
    }

    pub fn all_down(n: usize) -> Self {
        Self::basis(1 << n, 0)
    }

    /// `⊗_k (|0⟩ + |1⟩)/√2`.
    pub fn equator(n: usize) -> Self {
        let h = Complex::new(T::lit(0.5).sqrt(), T::zero());
        Self::product(&vec![[h, h]; n])
    }

    pub fn at(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[i * self.dim + j]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| acc + self.at(i, i))
    }

    pub fn check(&self) -> StateCheck<T> {
        let mut c = self.check_cheap();
        c.positive = is_positive_with_shift(&self.matrix, self.dim, T::lit(POSITIVITY_TOL));
        c
    }

    /// `⟨v|ρ|v⟩` for a (not necessarily normalized) vector.
    pub fn population(&self, v: &[Complex<T>]) -> T {
        let d = self.dim;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..d {
            if v[i] == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for j in 0..d {
                acc += v[i].conj() * self.matrix[i * d + j] * v[j];
            }
        }
        acc.re
    }
}

/// Time series of collective observables with per-time state diagnostics.
#[derive(Clone, Debug, Default)]
pub struct ObservableSeries<T> {
    pub times: Vec<T>,
    pub jx: Vec<T>,
    pub jy: Vec<T>,
    pub jz: Vec<T>,
    pub jz_var: Vec<T>,
    /// `(label, values)` in a stable order.
    pub populations: Vec<(String, Vec<T>)>,
    pub checks: Vec<StateCheck<T>>,
}

impl<T: Real> ObservableSeries<T> {
    pub fn population(&self, label: &str) -> Option<&[T]> {
        self.populations.iter().find(|(l, _)| l == label).map(|(_, v)| v.as_slice())
    }

    pub fn all_checks_ok(&self) -> bool {
        self.checks.iter().all(StateCheck::ok)
    }
}

/// Labelled state whose population is recorded.
#[derive(Clone, Debug)]
pub struct Projector<T> {
    pub label: String,
    pub vector: Vec<Complex<T>>,
}

impl<T: Real> Projector<T> {
    pub fn basis(label: &str, dim: usize, index: usize) -> Self {
        let mut vector = vec![Complex::new(T::zero(), T::zero()); dim];
        vector[index] = Complex::new(T::one(), T::zero());
        Self { label: label.to_string(), vector }
    }

    /// `(|a⟩ + |b⟩)/√2`.
    pub fn symmetric(label: &str, dim: usize, a: usize, b: usize) -> Self {
        let h = Complex::new(T::lit(0.5).sqrt(), T::zero());
        let mut vector = vec![Complex::new(T::zero(), T::zero()); dim];
        vector[a] = h;
        vector[b] = h;
        Self { label: label.to_string(), vector }
    }
}

/// Pair-state projectors `|00⟩`, `(|01⟩+|10⟩)/√2`, `|11⟩` for a two-site chain.
pub fn pair_projectors<T: Real>() -> Vec<Projector<T>> {
    vec![Projector::basis("00", 4, 0), Projector::symmetric("01s", 4, 1, 2), Projector::basis("11", 4, 3)]
}

#[derive(Clone, Debug)]
pub struct MeOptions<T> {
    pub cap: usize,
    pub tol: Tolerances,
    pub projectors: Vec<Projector<T>>,
    /// Skip the Cholesky positivity test (the costliest diagnostic).
    pub skip_positivity: bool,
}

impl<T: Real> Default for MeOptions<T> {
    fn default() -> Self {
        Self { cap: DEFAULT_DENSE_CAP, tol: Tolerances::default(), projectors: Vec::new(), skip_positivity: false }
    }
}

/// Lindblad generator of a [`SpinChainModel`] acting on the vectorized `ρ`.
pub struct ChainGenerator<T> {
    n: usize,
    dim: usize,
    g: T,
    /// `−i(E_m − E_n) − Γ_mn` per element.
    diag: Vec<Complex<T>>,
}

impl<T: Real> ChainGenerator<T> {
    pub fn new(model: &SpinChainModel<T>) -> Self {
        let dim = model.dim();
        let energies: Vec<T> = (0..dim).map(|m| model.diagonal_energy(m)).collect();
        let mut diag = vec![Complex::new(T::zero(), T::zero()); dim * dim];
        diag.par_chunks_mut(dim).enumerate().for_each(|(m, row)| {
            for (n, c) in row.iter_mut().enumerate() {
                *c = Complex::new(-model.coherence_decay(m, n), energies[n] - energies[m]);
            }
        });
        Self { n: model.n_sites, dim, g: model.g, diag }
    }

    /// Elementwise rate `ρ̇_mn = c_mn ρ_mn` of the undriven generator.
    pub fn diagonal_rate(&self, m: usize, n: usize) -> Complex<T> {
        self.diag[m * self.dim + n]
    }
}

impl<T: Real> Rhs<T> for ChainGenerator<T> {
    fn eval(&self, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let dim = self.dim;
        let n_sites = self.n;
        let drive = self.g * T::lit(0.5);
        let driven = self.g != T::zero();
        dy.par_chunks_mut(dim).enumerate().for_each(|(m, row)| {
            let base = m * dim;
            for (n, out) in row.iter_mut().enumerate() {
                let mut acc = self.diag[base + n] * y[base + n];
                if driven {
                    // −i g/2 Σ_k (ρ_{m⊕k,n} − ρ_{m,n⊕k})
                    let mut s = Complex::new(T::zero(), T::zero());
                    for k in 0..n_sites {
                        let b = 1usize << k;
                        s += y[(m ^ b) * dim + n] - y[base + (n ^ b)];
                    }
                    acc += Complex::new(s.im, -s.re) * drive;
                }
                *out = acc;
            }
        });
    }
}

fn check_cap<T: Real>(model: &SpinChainModel<T>, cap: usize) -> Result<()> {
    if model.n_sites > cap {
        return Err(Error::CapExceeded { what: "n_sites", value: model.n_sites, cap });
    }
    Ok(())
}

/// Evolves `ρ` in place for `duration` under the chain generator.
pub fn propagate_density<T: Real>(model: &SpinChainModel<T>, rho: &mut DensityState<T>, duration: T, opts: &MeOptions<T>) -> Result<()> {
    check_cap(model, opts.cap)?;
    if rho.dim != model.dim() {
        return Err(Error::domain("density matrix dimension does not match the chain"));
    }
    let gen = ChainGenerator::new(model);
    let mut dp = DormandPrince::new(rho.matrix.len(), opts.tol);
    dp.advance(&gen, &mut rho.matrix, T::zero(), duration)
}

/// Integrates the chain master equation and samples observables at `times`.
pub fn evolve_master_equation<T: Real>(
    model: &SpinChainModel<T>,
    initial: &DensityState<T>,
    times: &[T],
) -> Result<ObservableSeries<T>> {
    evolve_master_equation_with(model, initial, times, &MeOptions::default())
}

pub fn evolve_master_equation_with<T: Real>(
    model: &SpinChainModel<T>,
    initial: &DensityState<T>,
    times: &[T],
    opts: &MeOptions<T>,
) -> Result<ObservableSeries<T>> {
    check_cap(model, opts.cap)?;
    model.check()?;
    if initial.dim != model.dim() {
        return Err(Error::domain("initial state dimension does not match the chain"));
    }
    let gen = ChainGenerator::new(model);
    let n = model.n_sites;
    run_series(&gen, initial, times, opts, |rho| chain_observables(rho, n))
}

/// Shared driver: integrates `gen` through `times` recording observables.
pub(crate) fn run_series<T: Real, R: Rhs<T> + ?Sized>(
    gen: &R,
    initial: &DensityState<T>,
    times: &[T],
    opts: &MeOptions<T>,
    observe: impl Fn(&DensityState<T>) -> (T, T, T, T),
) -> Result<ObservableSeries<T>> {
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Integrator("output times must be non-decreasing".into()));
    }
    if times.first().is_some_and(|&t| t < T::zero()) {
        return Err(Error::Integrator("output times must be non-negative".into()));
    }
    let mut series = ObservableSeries {
        populations: opts.projectors.iter().map(|p| (p.label.clone(), Vec::with_capacity(times.len()))).collect(),
        ..Default::default()
    };
    let mut rho = initial.clone();
    let mut dp = DormandPrince::new(rho.matrix.len(), opts.tol);
    let mut t = T::zero();
    for &t_out in times {
        dp.advance(gen, &mut rho.matrix, t, t_out)?;
        t = t_out;
        let (jx, jy, jz, var) = observe(&rho);
        series.times.push(t_out);
        series.jx.push(jx);
        series.jy.push(jy);
        series.jz.push(jz);
        series.jz_var.push(var);
        for (p, (_, vals)) in opts.projectors.iter().zip(series.populations.iter_mut()) {
            vals.push(rho.population(&p.vector));
        }
        let mut check = rho.check_cheap();
        if !opts.skip_positivity {
            check.positive = is_positive_with_shift(&rho.matrix, rho.dim, T::lit(POSITIVITY_TOL));
        }
        series.checks.push(check);
    }
    Ok(series)
}

impl<T: Real> DensityState<T> {
    fn check_cheap(&self) -> StateCheck<T> {
        let d = self.dim;
        let mut herm = T::zero();
        for i in 0..d {
            for j in i..d {
                herm = herm.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        StateCheck {
            trace_error: (self.trace() - Complex::new(T::one(), T::zero())).norm(),
            hermiticity_error: herm,
            positive: true,
        }
    }
}

/// `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩, Var Jz)` of a chain density matrix.
fn chain_observables<T: Real>(rho: &DensityState<T>, n: usize) -> (T, T, T, T) {
    let m = density_moments(rho, n);
    let dim = rho.dim;
    let mut jz2 = T::zero();
    for i in 0..dim {
        let z: T = jz_value(i, n);
        jz2 += rho.at(i, i).re * z * z;
    }
    (m.jx, m.jy, m.jz, jz2 - m.jz * m.jz)
}

/// Applies `U ρ U†` with `U = ⊗_k e^{−iθ J_axis^(k)}`.
pub fn rotate_density<T: Real>(rho: &mut DensityState<T>, n: usize, axis: Axis, angle: T) {
    let dim = rho.dim;
    debug_assert_eq!(dim, 1 << n);
    let u = site_rotation(axis, angle);
    let uc = [[u[0][0].conj(), u[0][1].conj()], [u[1][0].conj(), u[1][1].conj()]];
    for k in 0..n {
        let bit = 1usize << k;
        // rows: ρ → U ρ
        for i0 in (0..dim).filter(|i| i & bit == 0) {
            let i1 = i0 | bit;
            for j in 0..dim {
                let (a, b) = (rho.matrix[i0 * dim + j], rho.matrix[i1 * dim + j]);
                rho.matrix[i0 * dim + j] = u[0][0] * a + u[0][1] * b;
                rho.matrix[i1 * dim + j] = u[1][0] * a + u[1][1] * b;
            }
        }
        // columns: ρ → ρ U†
        rho.matrix.par_chunks_mut(dim).for_each(|row| {
            for j0 in (0..dim).filter(|j| j & bit == 0) {
                let j1 = j0 | bit;
                let (a, b) = (row[j0], row[j1]);
                row[j0] = a * uc[0][0] + b * uc[0][1];
                row[j1] = a * uc[1][0] + b * uc[1][1];
            }
        });
    }
}

/// Collective-spin moments `Tr(A ρ)` of a chain density matrix.
pub fn density_moments<T: Real>(rho: &DensityState<T>, n: usize) -> SpinMoments<T> {
    let dim = rho.dim;
    let half = T::lit(0.5);
    let zero = Complex::new(T::zero(), T::zero());
    // X = Jx ρ and Y = Jy ρ, row by row.
    let mut x = vec![zero; dim * dim];
    let mut y = vec![zero; dim * dim];
    x.par_chunks_mut(dim).zip(y.par_chunks_mut(dim)).enumerate().for_each(|(m, (xr, yr))| {
        for k in 0..n {
            let src = (m ^ (1 << k)) * dim;
            let up = m >> k & 1 == 1;
            for j in 0..dim {
                let s = rho.matrix[src + j];
                xr[j] += s * half;
                // σ_y|0⟩ = −i|1⟩, σ_y|1⟩ = i|0⟩
                yr[j] += if up { Complex::new(s.im, -s.re) } else { Complex::new(-s.im, s.re) } * half;
            }
        }
    });
    let tr_x = |a: &[Complex<T>]| -> Complex<T> {
        // Tr(Jx A) = ½ Σ_k Σ_m A_{m⊕k, m}
        let mut acc = zero;
        for m in 0..dim {
            for k in 0..n {
                acc += a[(m ^ (1 << k)) * dim + m];
            }
        }
        acc * half
    };
    let tr_y = |a: &[Complex<T>]| -> Complex<T> {
        // (Jy)_{m, m⊕k} = −i/2 if bit k of m is set, +i/2 otherwise
        let mut acc = zero;
        for m in 0..dim {
            for k in 0..n {
                let v = a[(m ^ (1 << k)) * dim + m];
                acc += if m >> k & 1 == 1 { Complex::new(v.im, -v.re) } else { Complex::new(-v.im, v.re) };
            }
        }
        acc * half
    };
    let mut jz = T::zero();
    let mut jx = zero;
    let mut jy = zero;
    for m in 0..dim {
        jz += rho.at(m, m).re * jz_value::<T>(m, n);
        jx += x[m * dim + m];
        jy += y[m * dim + m];
    }
    SpinMoments {
        jx: jx.re,
        jy: jy.re,
        jz,
        jx2: tr_x(&x).re,
        jy2: tr_y(&y).re,
        jxy: (tr_x(&y) + tr_y(&x)).re,
    }
}
