//! Adaptive Dormand–Prince 5(4) stepping for complex linear ODEs.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// Hard limit on accepted plus rejected steps per call.
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 50_000_000 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Differences between the fifth- and fourth-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Autonomous right-hand side `dy/dt = f(y)`.
pub trait Rhs<T: Real> {
    fn eval(&self, y: &[Complex<T>], dy: &mut [Complex<T>]);
}

impl<T: Real, F: Fn(&[Complex<T>], &mut [Complex<T>])> Rhs<T> for F {
    fn eval(&self, y: &[Complex<T>], dy: &mut [Complex<T>]) {
        self(y, dy)
    }
}

/// Integrator state reused across output intervals so that the step size
/// and FSAL derivative carry over.
pub struct DormandPrince<T: Real> {
    tol: Tolerances,
    h: Option<T>,
    k: [Vec<Complex<T>>; 7],
    tmp: Vec<Complex<T>>,
    y_new: Vec<Complex<T>>,
    fsal_valid: bool,
    pub accepted: usize,
    pub rejected: usize,
}

impl<T: Real> DormandPrince<T> {
    pub fn new(dim: usize, tol: Tolerances) -> Self {
        let z = || vec![Complex::new(T::zero(), T::zero()); dim];
        Self {
            tol,
            h: None,
            k: [z(), z(), z(), z(), z(), z(), z()],
            tmp: z(),
            y_new: z(),
            fsal_valid: false,
            accepted: 0,
            rejected: 0,
        }
    }

    /// Advances `y` from `t0` to `t1` in place.
    pub fn advance<R: Rhs<T> + ?Sized>(&mut self, rhs: &R, y: &mut [Complex<T>], t0: T, t1: T) -> Result<()> {
        let span = t1 - t0;
        if span < T::zero() {
            return Err(Error::Integrator("output times must be increasing".into()));
        }
        if span == T::zero() {
            return Ok(());
        }
        let rtol = T::lit(self.tol.rtol);
        let atol = T::lit(self.tol.atol);
        let mut t = t0;
        if !self.fsal_valid {
            rhs.eval(y, &mut self.k[0]);
            self.fsal_valid = true;
        }
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(y, span, rtol, atol),
        };
        let min_h = span * T::epsilon() * T::lit(16.0);
        let mut steps = 0usize;
        let eps_t = T::epsilon() * T::lit(4.0) * t1.abs().max(T::one());
        while t1 - t > eps_t {
            steps += 1;
            if steps > self.tol.max_steps {
                return Err(Error::Integrator(format!("exceeded {} steps before reaching t = {t1}", self.tol.max_steps)));
            }
            let last = h >= t1 - t;
            let step = if last { t1 - t } else { h };
            let err = self.trial_step(rhs, y, step, rtol, atol);
            if !err.is_finite() {
                return Err(Error::Integrator(format!("non-finite state at t = {t}")));
            }
            if err <= T::one() {
                t = if last { t1 } else { t + step };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                self.accepted += 1;
                let fac = if err == T::zero() { T::lit(5.0) } else { (T::lit(0.9) * err.powf(T::lit(-0.2))).min(T::lit(5.0)) };
                // Keep the uncapped proposal when the final step was clipped.
                h = if last { h.max(step * fac) } else { step * fac.max(T::lit(0.2)) };
            } else {
                self.rejected += 1;
                h = step * (T::lit(0.9) * err.powf(T::lit(-0.2))).max(T::lit(0.2));
                if h < min_h {
                    return Err(Error::Integrator(format!("step size underflow at t = {t}")));
                }
            }
        }
        self.h = Some(h);
        Ok(())
    }

    /// Forgets the cached derivative; call after modifying the state externally.
    pub fn reset(&mut self) {
        self.fsal_valid = false;
    }

    fn initial_step(&self, y: &[Complex<T>], span: T, rtol: T, atol: T) -> T {
        let n = T::of_usize(y.len().max(1));
        let mut d0 = T::zero();
        let mut d1 = T::zero();
        for (yi, fi) in y.iter().zip(&self.k[0]) {
            let sc = atol + rtol * yi.norm();
            d0 += (yi.norm() / sc).powi(2);
            d1 += (fi.norm() / sc).powi(2);
        }
        let (d0, d1) = ((d0 / n).sqrt(), (d1 / n).sqrt());
        let h = if d0 < T::lit(1e-5) || d1 < T::lit(1e-5) { T::lit(1e-6) } else { T::lit(0.01) * d0 / d1 };
        h.min(span)
    }

    fn trial_step<R: Rhs<T> + ?Sized>(&mut self, rhs: &R, y: &[Complex<T>], h: T, rtol: T, atol: T) -> T {
        let n = y.len();
        let c = |x: f64| T::lit(x) * h;
        let (a21, a31, a32) = (c(A21), c(A31), c(A32));
        let (a41, a42, a43) = (c(A41), c(A42), c(A43));
        let (a51, a52, a53, a54) = (c(A51), c(A52), c(A53), c(A54));
        let (a61, a62, a63, a64, a65) = (c(A61), c(A62), c(A63), c(A64), c(A65));
        let (b1, b3, b4, b5, b6) = (c(B1), c(B3), c(B4), c(B5), c(B6));

        for i in 0..n {
            self.tmp[i] = y[i] + self.k[0][i] * a21;
        }
        rhs.eval(&self.tmp, &mut self.k[1]);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k[0][i] * a31 + self.k[1][i] * a32;
        }
        rhs.eval(&self.tmp, &mut self.k[2]);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k[0][i] * a41 + self.k[1][i] * a42 + self.k[2][i] * a43;
        }
        rhs.eval(&self.tmp, &mut self.k[3]);
        for i in 0..n {
            self.tmp[i] = y[i] + self.k[0][i] * a51 + self.k[1][i] * a52 + self.k[2][i] * a53 + self.k[3][i] * a54;
        }
        rhs.eval(&self.tmp, &mut self.k[4]);
        for i in 0..n {
            self.tmp[i] = y[i]
                + self.k[0][i] * a61
                + self.k[1][i] * a62
                + self.k[2][i] * a63
                + self.k[3][i] * a64
                + self.k[4][i] * a65;
        }
        rhs.eval(&self.tmp, &mut self.k[5]);
        for i in 0..n {
            self.y_new[i] = y[i]
                + self.k[0][i] * b1
                + self.k[2][i] * b3
                + self.k[3][i] * b4
                + self.k[4][i] * b5
                + self.k[5][i] * b6;
        }
        rhs.eval(&self.y_new, &mut self.k[6]);

        let (e1, e3, e4, e5, e6, e7) = (c(E1), c(E3), c(E4), c(E5), c(E6), c(E7));
        let mut acc = T::zero();
        for i in 0..n {
            let e = self.k[0][i] * e1
                + self.k[2][i] * e3
                + self.k[3][i] * e4
                + self.k[4][i] * e5
                + self.k[5][i] * e6
                + self.k[6][i] * e7;
            let sc = atol + rtol * y[i].norm().max(self.y_new[i].norm());
            acc += e.norm_sqr() / (sc * sc);
        }
        (acc / T::of_usize(n.max(1))).sqrt()
    }
}
