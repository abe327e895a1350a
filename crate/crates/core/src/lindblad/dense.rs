use num_complex::Complex;

use super::integrator::Rhs;
use crate::linalg::{adjoint, complex_matmul};
use crate::real::Real;

/// Lindblad generator with dense Hamiltonian and jump operators.
///
/// Stores `H_eff = H − (i/2) Σ L†L` so that
/// `ρ̇ = −i(H_eff ρ − ρ H_eff†) + Σ L ρ L†`.
pub struct DenseLindblad<T> {
    pub dim: usize,
    heff: Vec<Complex<T>>,
    heff_adj: Vec<Complex<T>>,
    jumps: Vec<(Vec<Complex<T>>, Vec<Complex<T>>)>,
}

impl<T: Real> DenseLindblad<T> {
    pub fn new(dim: usize, hamiltonian: &[Complex<T>], jumps: &[Vec<Complex<T>>]) -> Self {
        let zero = Complex::new(T::zero(), T::zero());
        let mut heff = hamiltonian.to_vec();
        let mut ldl = vec![zero; dim * dim];
        let mut stored = Vec::with_capacity(jumps.len());
        for l in jumps {
            let la = adjoint(l, dim);
            complex_matmul(&la, l, dim, &mut ldl);
            for (h, x) in heff.iter_mut().zip(&ldl) {
                *h -= Complex::new(-x.im, x.re) * T::lit(0.5);
            }
            stored.push((l.clone(), la));
        }
        let heff_adj = adjoint(&heff, dim);
        Self { dim, heff, heff_adj, jumps: stored }
    }
}

impl<T: Real> Rhs<T> for DenseLindblad<T> {
    fn eval(&self, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        let d = self.dim;
        let zero = Complex::new(T::zero(), T::zero());
        let mut a = vec![zero; d * d];
        let mut b = vec![zero; d * d];
        complex_matmul(&self.heff, y, d, &mut a);
        complex_matmul(y, &self.heff_adj, d, &mut b);
        for i in 0..d * d {
            let c = a[i] - b[i];
            dy[i] = Complex::new(c.im, -c.re);
        }
        for (l, la) in &self.jumps {
            complex_matmul(l, y, d, &mut a);
            complex_matmul(&a, la, d, &mut b);
            for i in 0..d * d {
                dy[i] += b[i];
            }
        }
    }
}
