//! Collective spin-½ operators on computational-basis state vectors.
//!
//! Basis index `m` stores site `k` in bit `k`; a set bit is `|1⟩` with
//! `J_z = +½`, a cleared bit is `|0⟩` with `J_z = −½`.

use num_complex::Complex;
use rayon::prelude::*;

use crate::real::Real;

/// First and second collective-spin moments.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpinMoments<T> {
    pub jx: T,
    pub jy: T,
    pub jz: T,
    pub jx2: T,
    pub jy2: T,
    /// `⟨J_x J_y + J_y J_x⟩`.
    pub jxy: T,
}

impl<T: Real> SpinMoments<T> {
    pub fn scaled(&self, f: T) -> Self {
        Self {
            jx: self.jx * f,
            jy: self.jy * f,
            jz: self.jz * f,
            jx2: self.jx2 * f,
            jy2: self.jy2 * f,
            jxy: self.jxy * f,
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        [
            self.jx - other.jx,
            self.jy - other.jy,
            self.jz - other.jz,
            self.jx2 - other.jx2,
            self.jy2 - other.jy2,
            self.jxy - other.jxy,
        ]
        .iter()
        .fold(T::zero(), |m, d| m.max(d.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// `J_z` eigenvalue of basis state `m` for `n` sites.
#[inline]
pub fn jz_value<T: Real>(m: usize, n: usize) -> T {
    T::of_usize(m.count_ones() as usize) - T::lit(0.5) * T::of_usize(n)
}

/// Single-site `e^{−iθ J_axis}` in the `(|0⟩, |1⟩)` ordering.
pub fn site_rotation<T: Real>(axis: Axis, angle: T) -> [[Complex<T>; 2]; 2] {
    let half = angle * T::lit(0.5);
    let (s, c) = half.sin_cos();
    let z = T::zero();
    match axis {
        Axis::X => [[Complex::new(c, z), Complex::new(z, -s)], [Complex::new(z, -s), Complex::new(c, z)]],
        Axis::Y => [[Complex::new(c, z), Complex::new(s, z)], [Complex::new(-s, z), Complex::new(c, z)]],
        Axis::Z => [[Complex::new(c, s), Complex::new(z, z)], [Complex::new(z, z), Complex::new(c, -s)]],
    }
}

/// Applies `⊗_k e^{−iθ J_axis^(k)}` to a state vector over `n` sites.
pub fn rotate_state<T: Real>(psi: &mut [Complex<T>], n: usize, axis: Axis, angle: T) {
    debug_assert_eq!(psi.len(), 1usize << n);
    let u = site_rotation(axis, angle);
    for k in 0..n {
        let bit = 1usize << k;
        let block = bit << 1;
        psi.par_chunks_mut(block.max(1 << 12).min(psi.len())).for_each(|chunk| {
            for base in (0..chunk.len()).step_by(block) {
                for off in 0..bit {
                    let i0 = base + off;
                    let i1 = i0 + bit;
                    let (a, b) = (chunk[i0], chunk[i1]);
                    chunk[i0] = u[0][0] * a + u[0][1] * b;
                    chunk[i1] = u[1][0] * a + u[1][1] * b;
                }
            }
        });
    }
}

/// `(J_x ψ, J_y ψ)` for a state over `n` sites.
fn apply_transverse<T: Real>(psi: &[Complex<T>], n: usize) -> (Vec<Complex<T>>, Vec<Complex<T>>) {
    let half = T::lit(0.5);
    let dim = psi.len();
    let mut x = vec![Complex::new(T::zero(), T::zero()); dim];
    let mut y = x.clone();
    x.par_iter_mut().zip(y.par_iter_mut()).enumerate().for_each(|(m, (xm, ym))| {
        let mut sx = Complex::new(T::zero(), T::zero());
        let mut sy = sx;
        for k in 0..n {
            let src = psi[m ^ (1 << k)];
            sx += src;
            // σ_y|0⟩ = −i|1⟩, σ_y|1⟩ = i|0⟩
            if m >> k & 1 == 1 {
                sy += Complex::new(src.im, -src.re);
            } else {
                sy += Complex::new(-src.im, src.re);
            }
        }
        *xm = sx * half;
        *ym = sy * half;
    });
    (x, y)
}

fn inner<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    a.iter().zip(b).fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y)
}

/// Raw expectation values `⟨ψ|A|ψ⟩` (no normalization) and `⟨ψ|ψ⟩`.
pub fn state_moments_raw<T: Real>(psi: &[Complex<T>], n: usize) -> (SpinMoments<T>, T) {
    let (x, y) = apply_transverse(psi, n);
    let norm = inner(psi, psi).re;
    let jz = psi
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (m, a)| acc + a.norm_sqr() * jz_value::<T>(m, n));
    let moments = SpinMoments {
        jx: inner(psi, &x).re,
        jy: inner(psi, &y).re,
        jz,
        jx2: inner(&x, &x).re,
        jy2: inner(&y, &y).re,
        jxy: T::lit(2.0) * inner(&x, &y).re,
    };
    (moments, norm)
}

/// Normalized expectation values.
pub fn state_moments<T: Real>(psi: &[Complex<T>], n: usize) -> SpinMoments<T> {
    let (m, norm) = state_moments_raw(psi, n);
    m.scaled(T::one() / norm)
}

/// `|0…0⟩` over `n` sites.
pub fn all_down<T: Real>(n: usize) -> Vec<Complex<T>> {
    let mut psi = vec![Complex::new(T::zero(), T::zero()); 1 << n];
    psi[0] = Complex::new(T::one(), T::zero());
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    type C = Complex<f64>;

    #[test]
    fn rotations_are_right_handed() {
        // Right-handed rotations: about x, −z goes to +y; about y, −z goes to −x.
        let n = 1;
        let mut psi = all_down::<f64>(n);
        rotate_state(&mut psi, n, Axis::X, std::f64::consts::FRAC_PI_2);
        let m = state_moments(&psi, n);
        assert!(m.jz.abs() < 1e-15);
        assert!((m.jy - 0.5).abs() < 1e-15, "x rotation of down should point along +y, got {m:?}");
        let mut psi = all_down::<f64>(n);
        rotate_state(&mut psi, n, Axis::Y, std::f64::consts::FRAC_PI_2);
        let m = state_moments(&psi, n);
        assert!((m.jx + 0.5).abs() < 1e-15, "y rotation of down should point along -x, got {m:?}");
    }

    #[test]
    fn four_pi_rotation_is_identity() {
        let n = 3;
        let mut psi: Vec<C> = (0..8).map(|i| C::new(i as f64, 1.0 - i as f64 * 0.3)).collect();
        let orig = psi.clone();
        rotate_state(&mut psi, n, Axis::X, 4.0 * std::f64::consts::PI);
        for (a, b) in psi.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn equator_state_moments() {
        let n = 5;
        let mut psi = all_down::<f64>(n);
        rotate_state(&mut psi, n, Axis::Y, -std::f64::consts::FRAC_PI_2);
        let m = state_moments(&psi, n);
        assert!((m.jx - 2.5).abs() < 1e-12);
        assert!(m.jz.abs() < 1e-12);
        assert!((m.jy2 - 1.25).abs() < 1e-12);
        assert!((m.jx2 - 6.25).abs() < 1e-12);
    }

    #[test]
    fn jz_values() {
        assert_eq!(jz_value::<f64>(0, 4), -2.0);
        assert_eq!(jz_value::<f64>(0b1011, 4), 1.0);
    }
}
