//! Two dressed atoms: the full three-level model and its effective two-level reduction.
//!
//! Per-atom levels are `|0⟩`, `|1⟩` (hyperfine ground states) and `|r⟩`; the
//! pair index is `3a + b` for the three-level model and `2a + b` for the
//! effective model, with atom `a` the most significant digit.

use num_complex::Complex;

use super::dense::DenseLindblad;
use super::{run_series, DensityState, MeOptions, ObservableSeries, Projector};
use crate::dressing::{dressed_potential, gamma1, gamma2, DressingParams};
use crate::error::{Error, Result};
use crate::real::Real;

/// Labels of the recorded pair populations.
pub struct PairPopulations;

impl PairPopulations {
    pub const GROUND: &'static str = "00";
    pub const SYMMETRIC: &'static str = "01s";
    pub const DOUBLE: &'static str = "11";
}

fn kron<T: Real>(a: &[Complex<T>], b: &[Complex<T>], da: usize, db: usize) -> Vec<Complex<T>> {
    let d = da * db;
    let mut out = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..da {
        for j in 0..da {
            let x = a[i * da + j];
            if x == Complex::new(T::zero(), T::zero()) {
                continue;
            }
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + j * db + l] = x * b[k * db + l];
                }
            }
        }
    }
    out
}

fn unit<T: Real>(d: usize, i: usize, j: usize) -> Vec<Complex<T>> {
    let mut m = vec![Complex::new(T::zero(), T::zero()); d * d];
    m[i * d + j] = Complex::new(T::one(), T::zero());
    m
}

fn identity<T: Real>(d: usize) -> Vec<Complex<T>> {
    let mut m = vec![Complex::new(T::zero(), T::zero()); d * d];
    for i in 0..d {
        m[i * d + i] = Complex::new(T::one(), T::zero());
    }
    m
}

fn add_scaled<T: Real>(acc: &mut [Complex<T>], m: &[Complex<T>], s: T) {
    for (a, x) in acc.iter_mut().zip(m) {
        *a += *x * s;
    }
}

/// Single-atom Hamiltonian terms summed over both atoms.
fn two_atom_sum<T: Real>(single: &[Complex<T>], d: usize) -> Vec<Complex<T>> {
    let id = identity(d);
    let mut h = kron(single, &id, d, d);
    add_scaled(&mut h, &kron(&id, single, d, d), T::one());
    h
}

/// Three-level pair generator with Rydberg–Rydberg shift `u12`.
pub fn three_level_generator<T: Real>(p: &DressingParams<T>, u12: T) -> DenseLindblad<T> {
    let (g0, g1, r) = (0, 1, 2);
    let half = T::lit(0.5);
    let mut ha = vec![Complex::new(T::zero(), T::zero()); 9];
    add_scaled(&mut ha, &unit(3, r, r), p.delta);
    add_scaled(&mut ha, &unit(3, g0, g0), p.delta0);
    add_scaled(&mut ha, &unit(3, g0, g1), p.g * half);
    add_scaled(&mut ha, &unit(3, g1, g0), p.g * half);
    add_scaled(&mut ha, &unit(3, g1, r), p.omega * half);
    add_scaled(&mut ha, &unit(3, r, g1), p.omega * half);
    let mut h = two_atom_sum(&ha, 3);
    add_scaled(&mut h, &kron(&unit(3, r, r), &unit(3, r, r), 3, 3), u12);

    let decay: Vec<Complex<T>> = unit::<T>(3, g1, r).iter().map(|x| *x * p.gamma.sqrt()).collect();
    let id = identity(3);
    let jumps = vec![kron(&decay, &id, 3, 3), kron(&id, &decay, 3, 3)];
    DenseLindblad::new(9, &h, &jumps)
}

/// Effective two-level pair generator: single-atom light shift, dressed
/// interaction and both dephasing channels evaluated at `u12`.
pub fn effective_pair_generator<T: Real>(p: &DressingParams<T>, u12: T) -> Result<DenseLindblad<T>> {
    let half = T::lit(0.5);
    let light_shift = -p.omega * p.omega / (T::lit(4.0) * p.delta);
    let v12 = dressed_potential(u12, p)?;
    let g12 = gamma2(u12, p)?;
    let g1 = gamma1(p)?;

    let mut ha = vec![Complex::new(T::zero(), T::zero()); 4];
    add_scaled(&mut ha, &unit(2, 0, 0), p.delta0);
    add_scaled(&mut ha, &unit(2, 1, 1), light_shift);
    add_scaled(&mut ha, &unit(2, 0, 1), p.g * half);
    add_scaled(&mut ha, &unit(2, 1, 0), p.g * half);
    let mut h = two_atom_sum(&ha, 2);
    let both = kron(&unit(2, 1, 1), &unit(2, 1, 1), 2, 2);
    add_scaled(&mut h, &both, v12);

    let id = identity(2);
    let single: Vec<Complex<T>> = unit::<T>(2, 1, 1).iter().map(|x| *x * g1.sqrt()).collect();
    let jumps = vec![
        kron(&single, &id, 2, 2),
        kron(&id, &single, 2, 2),
        both.iter().map(|x| *x * g12.sqrt()).collect(),
    ];
    Ok(DenseLindblad::new(4, &h, &jumps))
}

fn pair_projectors<T: Real>(levels: usize) -> Vec<Projector<T>> {
    let d = levels * levels;
    let idx = |a: usize, b: usize| a * levels + b;
    vec![
        Projector::basis(PairPopulations::GROUND, d, idx(0, 0)),
        Projector::symmetric(PairPopulations::SYMMETRIC, d, idx(0, 1), idx(1, 0)),
        Projector::basis(PairPopulations::DOUBLE, d, idx(1, 1)),
    ]
}

/// Ground-manifold pseudo-spin observables of a pair state.
fn pair_observables<T: Real>(rho: &DensityState<T>, levels: usize) -> (T, T, T, T) {
    let idx = |a: usize, b: usize| a * levels + b;
    let half = T::lit(0.5);
    let mut jx = T::zero();
    let mut jy = T::zero();
    let mut jz = T::zero();
    let mut jz2 = T::zero();
    for a in 0..levels {
        for b in 0..levels {
            let m = idx(a, b);
            let z = |l: usize| match l {
                0 => -half,
                1 => half,
                _ => T::zero(),
            };
            let zt = z(a) + z(b);
            let p = rho.at(m, m).re;
            jz += p * zt;
            jz2 += p * zt * zt;
        }
    }
    // ⟨σ_x/2⟩ and ⟨σ_y/2⟩ of each atom on its {|0⟩,|1⟩} block
    for other in 0..levels {
        for (i0, i1) in [(idx(0, other), idx(1, other)), (idx(other, 0), idx(other, 1))] {
            let c = rho.at(i1, i0);
            jx += c.re;
            jy -= c.im;
        }
    }
    (jx, jy, jz, jz2 - jz * jz)
}

/// Evolves the three-level pair master equation from `initial` (dim 9).
pub fn evolve_three_level_pair<T: Real>(
    params: &DressingParams<T>,
    u12: T,
    initial: &DensityState<T>,
    times: &[T],
) -> Result<ObservableSeries<T>> {
    // Ω = 0 is a legitimate (undressed) configuration here.
    let all_finite = [params.omega, params.delta, params.gamma, params.g, params.delta0, u12].iter().all(|x| x.is_finite());
    if !all_finite || params.omega < T::zero() || params.gamma < T::zero() {
        return Err(Error::domain("three-level pair needs finite parameters with Ω, γ ≥ 0"));
    }
    let gen = three_level_generator(params, u12);
    let opts = MeOptions { projectors: pair_projectors(3), ..Default::default() };
    run_series(&gen, initial, times, &opts, |rho| pair_observables(rho, 3))
}

/// Evolves the effective two-level pair master equation from `initial` (dim 4).
pub fn evolve_effective_pair<T: Real>(
    params: &DressingParams<T>,
    u12: T,
    initial: &DensityState<T>,
    times: &[T],
) -> Result<ObservableSeries<T>> {
    params.check()?;
    let gen = effective_pair_generator(params, u12)?;
    let opts = MeOptions { projectors: pair_projectors(2), ..Default::default() };
    run_series(&gen, initial, times, &opts, |rho| pair_observables(rho, 2))
}
