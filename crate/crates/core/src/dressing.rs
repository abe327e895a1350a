//! Rydberg-molecule dressed interaction, dephasing rates and coherence strength.
//!
//! All rates are angular frequencies in whatever unit system the caller uses;
//! the presets work in units of the dressing Rabi frequency.

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::pair_potential::MolecularPotential;
use crate::real::Real;

/// Laser and decay parameters of the dressing scheme.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressingParams<T> {
    /// Dressing Rabi frequency Ω.
    pub omega: T,
    /// Single-photon detuning Δ (signed).
    pub delta: T,
    /// Rydberg decay rate γ.
    pub gamma: T,
    /// Ground-state Raman coupling.
    pub g: T,
    /// Hyperfine detuning used for light-shift compensation.
    pub delta0: T,
}

impl<T: Real> DressingParams<T> {
    pub fn new(omega: T, delta: T, gamma: T, g: T, delta0: T) -> Result<Self> {
        let p = Self { omega, delta, gamma, g, delta0 };
        p.check()?;
        Ok(p)
    }

    /// Dressing-only parameters with `g = Δ0 = 0`.
    pub fn dressing(omega: T, delta: T, gamma: T) -> Result<Self> {
        Self::new(omega, delta, gamma, T::zero(), T::zero())
    }

    pub fn check(&self) -> Result<()> {
        let all_finite = [self.omega, self.delta, self.gamma, self.g, self.delta0].iter().all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::domain("dressing parameters must be finite"));
        }
        if !(self.omega > T::zero()) {
            return Err(Error::domain(format!("dressing Rabi frequency must be positive, got {}", self.omega)));
        }
        if !(self.gamma >= T::zero()) {
            return Err(Error::domain(format!("decay rate must be non-negative, got {}", self.gamma)));
        }
        Ok(())
    }

    /// Diagnostic flag for `|Δ| ≥ 3Ω`.
    pub fn weak_dressing(&self) -> bool {
        self.delta.abs() >= T::lit(3.0) * self.omega
    }

    pub fn with_gamma(mut self, gamma: T) -> Self {
        self.gamma = gamma;
        self
    }

    fn nonzero_delta(&self) -> Result<T> {
        if self.delta == T::zero() {
            Err(Error::domain("single-photon detuning must be nonzero"))
        } else {
            Ok(self.delta)
        }
    }
}

/// Saturated soft-core strength `Ω⁴/(8Δ³)`.
pub fn v0<T: Real>(p: &DressingParams<T>) -> Result<T> {
    let d = p.nonzero_delta()?;
    Ok(p.omega.powi(4) / (T::lit(8.0) * d.powi(3)))
}

/// Two-photon detuning of the pair transition, `U + 2Δ`.
pub fn delta2<T: Real>(u: T, p: &DressingParams<T>) -> T {
    u + T::lit(2.0) * p.delta
}

/// Perturbative dressed pair interaction.
pub fn dressed_potential<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    let d2 = delta2(u, p);
    let denom = d2 * d2 + p.gamma * p.gamma;
    if denom == T::zero() {
        return Err(Error::Singularity(format!("two-photon resonance at U = {u} with zero linewidth")));
    }
    Ok(v0(p)? * d2 * u / denom)
}

/// Single-body dephasing rate `Ω²γ/(4Δ²)`.
pub fn gamma1<T: Real>(p: &DressingParams<T>) -> Result<T> {
    let d = p.nonzero_delta()?;
    Ok(p.omega * p.omega * p.gamma / (T::lit(4.0) * d * d))
}

/// Two-body dephasing rate `Ω⁴γ/(2Δ²(Δ2² + γ²))`.
pub fn gamma2<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    let d = p.nonzero_delta()?;
    if p.gamma == T::zero() {
        return Ok(T::zero());
    }
    let d2 = delta2(u, p);
    Ok(p.omega.powi(4) * p.gamma / (T::lit(2.0) * d * d * (d2 * d2 + p.gamma * p.gamma)))
}

/// Coherence strength `V/(2γ¹ + γ²)`.
pub fn coherence<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    if !(p.gamma > T::zero()) {
        return Err(Error::domain("coherence strength needs a positive decay rate"));
    }
    let total = T::lit(2.0) * gamma1(p)? + gamma2(u, p)?;
    Ok(dressed_potential(u, p)? / total)
}

/// Small-γ approximation `(Ω²/4Δγ)·Δ2·U/(Ω² + Δ2²)` of [`coherence`].
pub fn coherence_approx<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    let d = p.nonzero_delta()?;
    if !(p.gamma > T::zero()) {
        return Err(Error::domain("coherence strength needs a positive decay rate"));
    }
    let d2 = delta2(u, p);
    let o2 = p.omega * p.omega;
    Ok(o2 / (T::lit(4.0) * d * p.gamma) * d2 * u / (o2 + d2 * d2))
}

/// Single-body-limited coherence `Ω²/(4|Δ|γ)`.
pub fn coherence_soft_core<T: Real>(p: &DressingParams<T>) -> Result<T> {
    let d = p.nonzero_delta()?;
    if !(p.gamma > T::zero()) {
        return Err(Error::domain("coherence strength needs a positive decay rate"));
    }
    Ok(p.omega * p.omega / (T::lit(4.0) * d.abs() * p.gamma))
}

/// Effective ground-state Rabi frequency `Ω²/Δ`.
pub fn two_photon_rabi<T: Real>(p: &DressingParams<T>) -> Result<T> {
    Ok(p.omega * p.omega / p.nonzero_delta()?)
}

/// Soft-core comparison potential `V0/(1 + (r/r_c)⁶)`.
pub fn srd_potential<T: Real>(r: T, r_c: T, p: &DressingParams<T>) -> Result<T> {
    if !(r_c > T::zero()) {
        return Err(Error::domain(format!("soft-core radius must be positive, got {r_c}")));
    }
    Ok(v0(p)? / (T::one() + (r / r_c).powi(6)))
}

/// Relative detuning below which the two-atom ladder counts as resonant.
const RESONANCE_TOLERANCE: f64 = 1e-9;

/// Non-perturbative dressed interaction from the two-atom ladder
/// `{|11⟩, |1r⟩_s, |rr⟩}`.
pub fn full_dressed_potential<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    let d2 = delta2(u, p);
    let scale = p.delta.abs().max(p.omega);
    if d2.abs() < T::lit(RESONANCE_TOLERANCE) * scale {
        return Err(Error::Singularity(format!(
            "antiblockade crossing: |rr⟩ resonant with |11⟩ (Δ2 = {d2}) at U = {u}"
        )));
    }
    Ok(ground_branch_energy(u, p)? - ground_branch_energy(T::zero(), p)?)
}

fn ground_branch_energy<T: Real>(u: T, p: &DressingParams<T>) -> Result<T> {
    let t = p.omega / T::lit(2.0).sqrt();
    let z = T::zero();
    let two = T::lit(2.0);
    let m = [z, t, z, t, p.delta, t, z, t, two * p.delta + u];
    let eig = symmetric_eigen(&m, 3, 60).ok_or(Error::Integrator("dressing ladder eigen-solver failed".into()))?;
    let mut best = 0;
    for j in 1..3 {
        if eig.vectors[j][0].abs() > eig.vectors[best][0].abs() {
            best = j;
        }
    }
    Ok(eig.values[best])
}

/// Two-body interaction and dephasing as functions of distance.
pub trait PairInteraction<T: Real>: Sync {
    fn coupling(&self, r: T) -> Result<T>;
    fn two_body_rate(&self, r: T) -> Result<T>;
    fn single_body_rate(&self) -> Result<T>;
}

/// Dressing to the molecular potential of the microwave-coupled pair.
#[derive(Clone, Debug)]
pub struct RmdInteraction<T> {
    pub potential: MolecularPotential<T>,
    pub params: DressingParams<T>,
    /// Rescales distances before evaluating `U`; 1 for the bare potential.
    pub r_scale: T,
}

impl<T: Real> RmdInteraction<T> {
    pub fn new(potential: MolecularPotential<T>, params: DressingParams<T>) -> Self {
        Self { potential, params, r_scale: T::one() }
    }

    pub fn rc(&self) -> T {
        self.potential.r_min
    }

    pub fn u_at(&self, r: T) -> Result<T> {
        self.potential.at(r * self.r_scale)
    }
}

impl<T: Real> PairInteraction<T> for RmdInteraction<T> {
    fn coupling(&self, r: T) -> Result<T> {
        dressed_potential(self.u_at(r)?, &self.params)
    }

    fn two_body_rate(&self, r: T) -> Result<T> {
        gamma2(self.u_at(r)?, &self.params)
    }

    fn single_body_rate(&self) -> Result<T> {
        gamma1(&self.params)
    }
}

/// Conventional soft-core dressing; two-body dephasing is excluded.
#[derive(Clone, Copy, Debug)]
pub struct SrdInteraction<T> {
    pub r_c: T,
    pub params: DressingParams<T>,
}

impl<T: Real> PairInteraction<T> for SrdInteraction<T> {
    fn coupling(&self, r: T) -> Result<T> {
        srd_potential(r, self.r_c, &self.params)
    }

    fn two_body_rate(&self, _r: T) -> Result<T> {
        Ok(T::zero())
    }

    fn single_body_rate(&self) -> Result<T> {
        gamma1(&self.params)
    }
}

/// Dressed quantities sampled on a distance grid.
#[derive(Clone, Debug)]
pub struct DressedProfile<T> {
    pub r_grid: Vec<T>,
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub gamma2: Vec<T>,
    pub coherence: Vec<T>,
    pub delta2: Vec<T>,
    /// Full ladder result where defined (`None` at the antiblockade crossing).
    pub v_full: Vec<Option<T>>,
}

impl<T: Real> DressedProfile<T> {
    pub fn from_potential(potential: &MolecularPotential<T>, p: &DressingParams<T>) -> Result<Self> {
        let n = potential.r_grid.len();
        let mut out = Self {
            r_grid: potential.r_grid.clone(),
            u: potential.curve.clone(),
            v: Vec::with_capacity(n),
            gamma2: Vec::with_capacity(n),
            coherence: Vec::with_capacity(n),
            delta2: Vec::with_capacity(n),
            v_full: Vec::with_capacity(n),
        };
        for &u in &potential.curve {
            out.v.push(dressed_potential(u, p)?);
            out.gamma2.push(gamma2(u, p)?);
            out.coherence.push(if p.gamma > T::zero() { coherence(u, p)? } else { T::nan() });
            out.delta2.push(delta2(u, p));
            out.v_full.push(full_dressed_potential(u, p).ok());
        }
        Ok(out)
    }
}

/// Rescales the well so that the two-photon detuning at its bottom equals `target`.
pub fn calibrate_well<T: Real>(potential: &MolecularPotential<T>, p: &DressingParams<T>, target: T) -> Result<MolecularPotential<T>> {
    let depth = target - T::lit(2.0) * p.delta;
    if !(depth < T::zero()) {
        return Err(Error::domain(format!(
            "Δ2(Rc) = {target} needs an attractive well for Δ = {}; got U(Rc) = {depth}",
            p.delta
        )));
    }
    potential.with_depth(depth)
}
