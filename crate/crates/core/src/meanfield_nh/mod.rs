//! Conditional (no-jump) dynamics with mean-field two-body dephasing.
//!
//! The two-body jumps are replaced by the constants `Γ0`, `Γ̄` and `Γ_z`,
//! leaving a Hamiltonian that is diagonal in the computational basis:
//! `H_c = ½ Σ_j (Σ_{k≠j} V_jk − iΓ_z) J_z^(j) + Σ_{j<k} V_jk J_z^(j) J_z^(k) − iΓ̄/2`.

mod analytic;

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::SpinChainModel;
use crate::real::Real;
use crate::spin::{rotate_state, Axis};

pub use analytic::{analytic_moments, apply_dissipative_scaling, PhaseTable};

/// Largest chain [`evolve_conditional`] accepts by default (`2^20` amplitudes).
pub const DEFAULT_STATE_CAP: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MeanFieldRates<T> {
    pub gamma0: T,
    pub gamma_bar: T,
    pub gamma_z: T,
    pub jz_bar: T,
    /// Uniform-state global rate `Nγ¹/2 + ½ Σ_{i<j} γ²_ij/2` before the mean-field step.
    pub gamma_g: T,
}

/// `Γ0 = 2 Σ_{d=1}^{N−1} γ²(d·a)`, read from the first row of the rate matrix.
pub fn bulk_two_body_rate<T: Real>(model: &SpinChainModel<T>) -> T {
    let n = model.n_sites;
    T::lit(2.0) * (1..n).map(|d| model.gamma2(0, d)).sum::<T>()
}

pub fn mean_field_rates<T: Real>(model: &SpinChainModel<T>, jz_bar: T) -> Result<MeanFieldRates<T>> {
    let half = T::lit(0.5);
    if !(jz_bar.abs() <= half) {
        return Err(Error::domain(format!("time-averaged ⟨Jz⟩ per atom must lie in [−½, ½], got {jz_bar}")));
    }
    let n = model.n_sites;
    let nf = T::of_usize(n);
    let gamma0 = bulk_two_body_rate(model);
    let gamma1 = model.gamma1;
    let mut pair_sum = T::zero();
    for i in 0..n {
        for j in (i + 1)..n {
            pair_sum += model.gamma2(i, j);
        }
    }
    Ok(MeanFieldRates {
        gamma0,
        gamma_bar: nf * half * (gamma1 + gamma0 * (T::lit(0.25) - jz_bar * jz_bar)),
        gamma_z: gamma1 + gamma0 * (half + jz_bar),
        jz_bar,
        gamma_g: nf * gamma1 * half + half * pair_sum * half,
    })
}

/// Coherent `⟨J_z(t)⟩` after an echo of total dressing time `t`.
pub fn coherent_jz<T: Real>(model: &SpinChainModel<T>, t: T) -> T {
    let n = model.n_sites;
    let half_t = t * T::lit(0.5);
    let mut total = T::zero();
    for i in 0..n {
        let mut p = T::one();
        for j in 0..n {
            if j != i {
                p *= (model.coupling(i, j) * half_t).cos();
            }
        }
        total += p;
    }
    -T::lit(0.5) * total
}

/// `(1/Nτ) ∫₀^τ ⟨J_z(t)⟩ dt` by adaptive Simpson quadrature.
pub fn jz_time_average<T: Real>(model: &SpinChainModel<T>, tau: T) -> Result<T> {
    if !(tau > T::zero()) {
        return Err(Error::domain(format!("averaging window must be positive, got {tau}")));
    }
    let n = T::of_usize(model.n_sites);
    let f = |t: T| coherent_jz(model, t) / n;
    let integral = adaptive_simpson(&f, T::zero(), tau, T::lit(1e-7) * tau, 40);
    Ok((integral / tau).max(-T::lit(0.5)).min(T::lit(0.5)))
}

pub(crate) fn adaptive_simpson<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, tol: T, depth: usize) -> T {
    let m = (a + b) * T::lit(0.5);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / T::lit(6.0) * (fa + T::lit(4.0) * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<T: Real>(f: &impl Fn(T) -> T, a: T, b: T, fa: T, fm: T, fb: T, whole: T, tol: T, depth: usize) -> T {
    let m = (a + b) * T::lit(0.5);
    let lm = (a + m) * T::lit(0.5);
    let rm = (m + b) * T::lit(0.5);
    let (flm, frm) = (f(lm), f(rm));
    let six = T::lit(6.0);
    let left = (m - a) / six * (fa + T::lit(4.0) * flm + fm);
    let right = (b - m) / six * (fm + T::lit(4.0) * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= T::lit(15.0) * tol {
        return left + right + delta / T::lit(15.0);
    }
    let half_tol = tol * T::lit(0.5);
    simpson_step(f, a, m, fa, flm, fm, left, half_tol, depth - 1) + simpson_step(f, m, b, fm, frm, fb, right, half_tol, depth - 1)
}

fn state_size(n: usize, len: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::CapExceeded { what: "n_sites", value: n, cap });
    }
    if len != 1usize << n {
        return Err(Error::domain(format!("state vector length {len} does not match 2^{n}")));
    }
    Ok(())
}

/// Complex eigenvalue of `H_c` (plus site detunings) on basis state `m`.
fn conditional_energy<T: Real>(model: &SpinChainModel<T>, rates: &MeanFieldRates<T>, row_sums: &[T], m: usize) -> Complex<T> {
    let n = model.n_sites;
    let half = T::lit(0.5);
    let s = |k: usize| if m >> k & 1 == 1 { half } else { -half };
    let mut re = T::zero();
    let mut mz = T::zero();
    for j in 0..n {
        let sj = s(j);
        mz += sj;
        re += (half * row_sums[j] + model.site_detunings[j]) * sj;
        for k in (j + 1)..n {
            re += model.coupling(j, k) * sj * s(k);
        }
    }
    Complex::new(re, -half * (rates.gamma_z * mz + rates.gamma_bar))
}

/// `e^{−iH_c τ}|ψ⟩` (unnormalized).
pub fn evolve_conditional<T: Real>(
    model: &SpinChainModel<T>,
    psi: &[Complex<T>],
    tau: T,
    rates: &MeanFieldRates<T>,
) -> Result<Vec<Complex<T>>> {
    evolve_conditional_capped(model, psi, tau, rates, DEFAULT_STATE_CAP)
}

pub fn evolve_conditional_capped<T: Real>(
    model: &SpinChainModel<T>,
    psi: &[Complex<T>],
    tau: T,
    rates: &MeanFieldRates<T>,
    cap: usize,
) -> Result<Vec<Complex<T>>> {
    let n = model.n_sites;
    state_size(n, psi.len(), cap)?;
    if !(tau >= T::zero()) {
        return Err(Error::domain("evolution time must be non-negative"));
    }
    let row_sums: Vec<T> = (0..n).map(|j| (0..n).map(|k| model.coupling(j, k)).sum()).collect();
    let mut out = psi.to_vec();
    out.par_iter_mut().enumerate().for_each(|(m, a)| {
        let e = conditional_energy(model, rates, &row_sums, m);
        // e^{−i e τ}
        let phase = Complex::new(e.im * tau, -e.re * tau).exp();
        *a *= phase;
    });
    Ok(out)
}

/// Applies `⊗_k e^{−iθ J_axis^(k)}`; the norm is preserved.
pub fn collective_rotation<T: Real>(psi: &[Complex<T>], n: usize, axis: Axis, angle: T) -> Result<Vec<Complex<T>>> {
    if !angle.is_finite() {
        return Err(Error::domain("rotation angle must be finite"));
    }
    if psi.len() != 1usize << n {
        return Err(Error::domain(format!("state vector length {} does not match 2^{n}", psi.len())));
    }
    let mut out = psi.to_vec();
    rotate_state(&mut out, n, axis, angle);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{all_down, state_moments};

    type C = Complex<f64>;

    fn chain(n: usize, v: &[f64], g1: f64, g2: &[f64]) -> SpinChainModel<f64> {
        let mut c = vec![0.0; n * n];
        let mut r = vec![0.0; n * n];
        for j in 0..n {
            for k in 0..n {
                if j != k {
                    let d = j.abs_diff(k);
                    c[j * n + k] = v.get(d - 1).copied().unwrap_or(0.0);
                    r[j * n + k] = g2.get(d - 1).copied().unwrap_or(0.0);
                }
            }
        }
        SpinChainModel::new(n, 1.0, c, g1, r, 0.0, vec![0.0; n]).unwrap()
    }

    #[test]
    fn nearest_neighbour_bulk_rate() {
        let m = chain(6, &[1.0], 0.01, &[0.3]);
        let r = mean_field_rates(&m, 0.1).unwrap();
        assert!((r.gamma0 - 0.6).abs() < 1e-15);
    }

    #[test]
    fn all_down_rates() {
        let m = chain(5, &[1.0, 0.5], 0.02, &[0.3, 0.1]);
        let r = mean_field_rates(&m, -0.5).unwrap();
        assert!((r.gamma_bar - 5.0 * 0.02 / 2.0).abs() < 1e-15);
        assert!((r.gamma_z - 0.02).abs() < 1e-15);
    }

    #[test]
    fn rates_without_two_body_ignore_jz() {
        let m = chain(5, &[1.0], 0.02, &[]);
        let a = mean_field_rates(&m, 0.3).unwrap();
        let b = mean_field_rates(&m, -0.1).unwrap();
        assert_eq!(a.gamma_bar, b.gamma_bar);
        assert!(mean_field_rates(&m, 0.6).is_err());
    }

    #[test]
    fn time_average_cases() {
        let free = chain(4, &[], 0.0, &[]);
        assert!((jz_time_average(&free, 3.0).unwrap() + 0.5).abs() < 1e-12);
        let v = 0.8;
        let pair = chain(2, &[v], 0.0, &[]);
        for tau in [0.1, 1.0, 7.3] {
            let exact = -(v * tau / 2.0f64).sin() / (v * tau);
            assert!((jz_time_average(&pair, tau).unwrap() - exact).abs() < 1e-6);
        }
        assert!((jz_time_average(&pair, 1e-9).unwrap() + 0.5).abs() < 1e-6);
        assert!(jz_time_average(&pair, 0.0).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let m = chain(3, &[0.4], 0.1, &[0.2]);
        let r = mean_field_rates(&m, -0.2).unwrap();
        let psi: Vec<C> = (0..8).map(|i| C::new(i as f64, -0.5)).collect();
        assert_eq!(evolve_conditional(&m, &psi, 0.0, &r).unwrap(), psi);
    }

    #[test]
    fn cap_is_enforced() {
        let m = chain(3, &[0.4], 0.0, &[]);
        let r = mean_field_rates(&m, 0.0).unwrap();
        let psi = all_down::<f64>(3);
        assert!(matches!(evolve_conditional_capped(&m, &psi, 1.0, &r, 2), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn rotation_examples() {
        let n = 3;
        let psi = all_down::<f64>(n);
        let half = collective_rotation(&psi, n, Axis::X, std::f64::consts::FRAC_PI_2).unwrap();
        let m = state_moments(&half, n);
        assert!(m.jz.abs() < 1e-15);
        let norm: f64 = half.iter().map(|a| a.norm_sqr()).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        let pi = std::f64::consts::PI;
        let twice = collective_rotation(&collective_rotation(&half, n, Axis::X, pi).unwrap(), n, Axis::X, pi).unwrap();
        let m2 = state_moments(&twice, n);
        assert!(m.max_abs_diff(&m2) < 1e-14);
        assert!(collective_rotation(&psi, n, Axis::X, f64::NAN).is_err());
    }
}
