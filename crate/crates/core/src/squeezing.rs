//! Spin-echo squeezing: protocol execution, Wineland parameter and τ optimization.

use num_complex::Complex;
use rayon::prelude::*;

use crate::dressing::{v0, DressingParams, PairInteraction, RmdInteraction, SrdInteraction};
use crate::error::{Error, Result};
use crate::lindblad::{density_moments, propagate_density, rotate_density, DensityState, MeOptions, SpinChainModel};
use crate::meanfield_nh::{
    analytic_moments, apply_dissipative_scaling, collective_rotation, evolve_conditional, jz_time_average, mean_field_rates,
    MeanFieldRates, PhaseTable,
};
use crate::pair_potential::MolecularPotential;
use crate::real::Real;
use crate::spin::{all_down, state_moments_raw, Axis, SpinMoments};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scheme {
    Rmd,
    Srd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    ExactMe,
    ConditionalNh,
    Analytic,
}

/// Which dephasing channels are kept during the dressing windows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dissipation {
    Full,
    NoTwoBody,
    Coherent,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EchoProtocol<T> {
    pub tau: T,
    pub scheme: Scheme,
    pub method: Method,
    pub dissipation: Dissipation,
    /// `Rc / a`.
    pub lattice_ratio: T,
}

impl<T: Real> EchoProtocol<T> {
    pub fn new(tau: T, scheme: Scheme, method: Method, lattice_ratio: T) -> Self {
        Self { tau, scheme, method, dissipation: Dissipation::Full, lattice_ratio }
    }

    pub fn with_dissipation(mut self, d: Dissipation) -> Self {
        self.dissipation = d;
        self
    }

    pub fn with_tau(mut self, tau: T) -> Self {
        self.tau = tau;
        self
    }

    /// Duration of a π/2 pulse for Raman coupling `g` (reported, not simulated).
    pub fn half_pi_duration(g: T) -> T {
        T::FRAC_PI_2() / g
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SqueezingResult<T> {
    pub xi2: T,
    pub theta_star: T,
    pub moments: SpinMoments<T>,
    pub gamma_bar: T,
    pub tau: T,
}

/// Minimal transverse variance over `n⊥ = cos θ x̂ + sin θ ŷ`: `(θ*, Var)`.
pub fn min_variance<T: Real>(m: &SpinMoments<T>) -> (T, T) {
    let half = T::lit(0.5);
    let a = m.jx2 - m.jx * m.jx;
    let b = m.jy2 - m.jy * m.jy;
    let c = half * m.jxy - m.jx * m.jy;
    let d = (a - b) * half;
    let r = (d * d + c * c).sqrt();
    let var = (a + b) * half - r;
    if r == T::zero() {
        return (T::zero(), var);
    }
    // V(θ) = (A+B)/2 + d cos 2θ + c sin 2θ is minimal where (cos 2θ, sin 2θ) ∥ −(d, c).
    let y = if c == T::zero() { T::zero() } else { -c };
    let x = if d == T::zero() { T::zero() } else { -d };
    (y.atan2(x) * half, var)
}

/// `ξ² = N·Var_min/|⟨J⟩|²`.
pub fn xi_squared<T: Real>(m: &SpinMoments<T>, n_sites: usize) -> Result<T> {
    let len2 = m.jx * m.jx + m.jy * m.jy + m.jz * m.jz;
    if !(len2 > T::min_positive_value()) {
        return Err(Error::ContrastLoss);
    }
    let (_, var) = min_variance(m);
    Ok(T::of_usize(n_sites) * var.max(T::zero()) / len2)
}

fn result_from<T: Real>(m: SpinMoments<T>, n: usize, gamma_bar: T, tau: T) -> Result<SqueezingResult<T>> {
    let (theta, _) = min_variance(&m);
    Ok(SqueezingResult { xi2: xi_squared(&m, n)?, theta_star: theta, moments: m, gamma_bar, tau })
}

fn dressing_model<T: Real>(model: &SpinChainModel<T>, d: Dissipation) -> SpinChainModel<T> {
    let m = model.with_drive(T::zero());
    match d {
        Dissipation::Full => m,
        Dissipation::NoTwoBody => m.without_two_body(),
        Dissipation::Coherent => m.coherent(),
    }
}

/// Mean-field constants for an echo of total dressing time `tau`.
pub fn echo_rates<T: Real>(model: &SpinChainModel<T>, tau: T) -> Result<MeanFieldRates<T>> {
    let jz_bar = if tau > T::zero() { jz_time_average(model, tau)? } else { -T::lit(0.5) };
    mean_field_rates(model, jz_bar)
}

/// State-vector echo under the conditional Hamiltonian; returns raw
/// (unnormalized) moments, which carry the no-jump probability.
pub fn conditional_echo_moments<T: Real>(model: &SpinChainModel<T>, tau: T, rates: &MeanFieldRates<T>) -> Result<SpinMoments<T>> {
    let n = model.n_sites;
    let half_tau = tau * T::lit(0.5);
    let mut psi: Vec<Complex<T>> = all_down(n);
    psi = collective_rotation(&psi, n, Axis::X, T::FRAC_PI_2())?;
    psi = evolve_conditional(model, &psi, half_tau, rates)?;
    psi = collective_rotation(&psi, n, Axis::X, T::PI())?;
    psi = evolve_conditional(model, &psi, half_tau, rates)?;
    psi = collective_rotation(&psi, n, Axis::X, T::FRAC_PI_2())?;
    Ok(state_moments_raw(&psi, n).0)
}

/// Density-matrix echo with instantaneous pulses.
pub fn master_equation_echo_moments<T: Real>(model: &SpinChainModel<T>, tau: T, opts: &MeOptions<T>) -> Result<SpinMoments<T>> {
    let n = model.n_sites;
    if n > opts.cap {
        return Err(Error::CapExceeded { what: "n_sites", value: n, cap: opts.cap });
    }
    let half_tau = tau * T::lit(0.5);
    let mut rho = DensityState::all_down(n);
    rotate_density(&mut rho, n, Axis::X, T::FRAC_PI_2());
    propagate_density(model, &mut rho, half_tau, opts)?;
    rotate_density(&mut rho, n, Axis::X, T::PI());
    propagate_density(model, &mut rho, half_tau, opts)?;
    rotate_density(&mut rho, n, Axis::X, T::FRAC_PI_2());
    Ok(density_moments(&rho, n))
}

/// Runs the five-stage echo and evaluates the squeezing parameter.
pub fn run_echo<T: Real>(protocol: &EchoProtocol<T>, model: &SpinChainModel<T>) -> Result<SqueezingResult<T>> {
    run_echo_with(protocol, model, &MeOptions::default())
}

pub fn run_echo_with<T: Real>(protocol: &EchoProtocol<T>, model: &SpinChainModel<T>, opts: &MeOptions<T>) -> Result<SqueezingResult<T>> {
    let tau = protocol.tau;
    if !(tau >= T::zero()) {
        return Err(Error::domain("dressing time must be non-negative"));
    }
    let n = model.n_sites;
    let dressed = dressing_model(model, protocol.dissipation);
    match protocol.method {
        Method::ExactMe => {
            let m = master_equation_echo_moments(&dressed, tau, opts)?;
            result_from(m, n, T::zero(), tau)
        }
        Method::ConditionalNh => {
            let rates = echo_rates(&dressed, tau)?;
            let m = conditional_echo_moments(&dressed, tau, &rates)?;
            result_from(m, n, rates.gamma_bar, tau)
        }
        Method::Analytic => {
            let rates = echo_rates(&dressed, tau)?;
            let coherent = analytic_moments(&PhaseTable::new(&dressed, tau), n);
            let m = apply_dissipative_scaling(&coherent, rates.gamma_bar, tau);
            result_from(m, n, rates.gamma_bar, tau)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TauOptimum<T> {
    pub tau_min: T,
    pub xi2_min: T,
    pub theta_star: T,
}

impl<T: Real> TauOptimum<T> {
    /// True for the "no squeezing anywhere" report.
    pub fn is_sentinel(&self) -> bool {
        self.tau_min == T::zero()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TauSearch {
    pub coarse_points: usize,
    pub rel_tol: f64,
    /// Evaluate the coarse grid in parallel.
    pub parallel: bool,
}

impl Default for TauSearch {
    fn default() -> Self {
        Self { coarse_points: 400, rel_tol: 1e-3, parallel: true }
    }
}

/// `n` log-spaced values in `[lo, hi]`.
pub fn log_space<T: Real>(lo: T, hi: T, n: usize) -> Vec<T> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * T::of_usize(i) / T::of_usize(n - 1)).exp()).collect()
}

/// Global minimum of `ξ²(τ)` over `tau_range` by coarse scan plus golden section.
pub fn optimize_tau<T: Real>(protocol: &EchoProtocol<T>, model: &SpinChainModel<T>, tau_range: (T, T)) -> Result<TauOptimum<T>> {
    optimize_tau_with(protocol, model, tau_range, &TauSearch::default(), &MeOptions::default())
}

pub fn optimize_tau_with<T: Real>(
    protocol: &EchoProtocol<T>,
    model: &SpinChainModel<T>,
    tau_range: (T, T),
    search: &TauSearch,
    opts: &MeOptions<T>,
) -> Result<TauOptimum<T>> {
    let (lo, hi) = tau_range;
    if !(lo > T::zero() && hi > lo && hi.is_finite()) || search.coarse_points < 3 {
        return Err(Error::domain("τ range must satisfy 0 < lo < hi < ∞ with at least three samples"));
    }
    let eval = |tau: T| -> Result<(T, T)> {
        match run_echo_with(&protocol.with_tau(tau), model, opts) {
            Ok(r) => Ok((r.xi2, r.theta_star)),
            Err(Error::ContrastLoss) => Ok((T::infinity(), T::zero())),
            Err(e) => Err(e),
        }
    };
    let grid = log_space(lo, hi, search.coarse_points);
    let values: Vec<(T, T)> = if search.parallel {
        grid.par_iter().map(|&t| eval(t)).collect::<Result<_>>()?
    } else {
        grid.iter().map(|&t| eval(t)).collect::<Result<_>>()?
    };
    let mut best = 0;
    for i in 1..values.len() {
        if values[i].0 < values[best].0 {
            best = i;
        }
    }
    if !(values[best].0 <= T::one()) {
        return Ok(TauOptimum { tau_min: T::zero(), xi2_min: T::one(), theta_star: T::zero() });
    }
    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(grid.len() - 1)];
    let (mut best_tau, mut best_val) = (grid[best], values[best]);
    let ratio = T::lit(0.5 * (5f64.sqrt() - 1.0));
    let mut x1 = b - ratio * (b - a);
    let mut x2 = a + ratio * (b - a);
    let mut f1 = eval(x1)?;
    let mut f2 = eval(x2)?;
    let tol = T::lit(search.rel_tol);
    while (b - a) > tol * best_tau {
        if f1.0 < f2.0 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - ratio * (b - a);
            f1 = eval(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + ratio * (b - a);
            f2 = eval(x2)?;
        }
        for (x, f) in [(x1, f1), (x2, f2)] {
            if f.0 < best_val.0 {
                best_tau = x;
                best_val = f;
            }
        }
    }
    Ok(TauOptimum { tau_min: best_tau, xi2_min: best_val.0, theta_star: best_val.1 })
}

/// Interaction sources for building chains of either scheme.
#[derive(Clone, Debug)]
pub struct SchemeSetup<T> {
    pub params: DressingParams<T>,
    /// Calibrated molecular well; its minimum defines `Rc` for both schemes.
    pub potential: MolecularPotential<T>,
}

impl<T: Real> SchemeSetup<T> {
    pub fn rc(&self) -> T {
        self.potential.r_min
    }

    /// Chain with `a = Rc / lattice_ratio` for the given scheme and decay rate.
    pub fn chain(&self, scheme: Scheme, n_sites: usize, lattice_ratio: T, gamma: T) -> Result<SpinChainModel<T>> {
        if !(lattice_ratio > T::zero()) {
            return Err(Error::domain("lattice ratio Rc/a must be positive"));
        }
        let params = self.params.with_gamma(gamma);
        let a = self.rc() / lattice_ratio;
        match scheme {
            Scheme::Rmd => {
                let inter = RmdInteraction::new(self.potential.clone(), params);
                SpinChainModel::from_interaction(n_sites, a, &inter, params.g)
            }
            Scheme::Srd => {
                let inter = SrdInteraction { r_c: self.rc(), params };
                SpinChainModel::from_interaction(n_sites, a, &inter as &dyn PairInteraction<T>, params.g)
            }
        }
    }

    pub fn v0(&self) -> Result<T> {
        v0(&self.params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanRow<T> {
    pub scheme: Scheme,
    pub lattice_ratio: T,
    pub n_sites: usize,
    pub gamma: T,
    pub xi2_min: T,
    pub v0_tau_min: T,
}

/// Fig.-4 style scan with the analytic method; `v0_tau_range` is in units of `1/|V0|`.
pub fn scan_scaling<T: Real>(
    setup: &SchemeSetup<T>,
    schemes: &[Scheme],
    lattice_ratios: &[T],
    n_list: &[usize],
    gamma_list: &[T],
    v0_tau_range: (T, T),
    search: &TauSearch,
) -> Result<Vec<ScanRow<T>>> {
    let v0 = setup.v0()?.abs();
    let mut jobs = Vec::new();
    for &scheme in schemes {
        for &ratio in lattice_ratios {
            for &gamma in gamma_list {
                for &n in n_list {
                    jobs.push((scheme, ratio, gamma, n));
                }
            }
        }
    }
    let inner = TauSearch { parallel: false, ..*search };
    let opts = MeOptions::default();
    jobs.par_iter()
        .map(|&(scheme, ratio, gamma, n)| {
            let model = setup.chain(scheme, n, ratio, gamma)?;
            let protocol = EchoProtocol::new(T::zero(), scheme, Method::Analytic, ratio);
            let range = (v0_tau_range.0 / v0, v0_tau_range.1 / v0);
            let opt = optimize_tau_with(&protocol, &model, range, &inner, &opts)?;
            Ok(ScanRow { scheme, lattice_ratio: ratio, n_sites: n, gamma, xi2_min: opt.xi2_min, v0_tau_min: opt.tau_min * v0 })
        })
        .collect()
}
