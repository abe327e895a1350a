//! Independent brute-force helpers shared by the integration suites.
#![allow(dead_code)]

use num_complex::Complex64 as C;

pub const ZERO: C = C::new(0.0, 0.0);
pub const ONE: C = C::new(1.0, 0.0);
pub const I: C = C::new(0.0, 1.0);

/// Single-site operators in the (|0⟩, |1⟩) basis, |1⟩ being spin up.
pub fn pauli_x() -> [[C; 2]; 2] {
    [[ZERO, ONE], [ONE, ZERO]]
}

pub fn pauli_y() -> [[C; 2]; 2] {
    [[ZERO, I], [-I, ZERO]]
}

pub fn pauli_z() -> [[C; 2]; 2] {
    [[-ONE, ZERO], [ZERO, ONE]]
}

/// `exp(−iθσx/2)`.
pub fn rot_x(theta: f64) -> [[C; 2]; 2] {
    let c = C::new((theta / 2.0).cos(), 0.0);
    let s = C::new(0.0, -(theta / 2.0).sin());
    [[c, s], [s, c]]
}

pub fn apply_site(psi: &[C], k: usize, op: &[[C; 2]; 2]) -> Vec<C> {
    let mut out = vec![ZERO; psi.len()];
    for (m, &a) in psi.iter().enumerate() {
        if a == ZERO {
            continue;
        }
        let b = (m >> k) & 1;
        let m0 = m & !(1 << k);
        out[m0] += op[0][b] * a;
        out[m0 | (1 << k)] += op[1][b] * a;
    }
    out
}

/// `Σ_k op_k ψ / 2`.
pub fn collective(psi: &[C], n: usize, op: &[[C; 2]; 2]) -> Vec<C> {
    let mut out = vec![ZERO; psi.len()];
    for k in 0..n {
        for (o, x) in out.iter_mut().zip(apply_site(psi, k, op)) {
            *o += x * 0.5;
        }
    }
    out
}

pub fn rotate_all(psi: &[C], n: usize, op: &[[C; 2]; 2]) -> Vec<C> {
    let mut v = psi.to_vec();
    for k in 0..n {
        v = apply_site(&v, k, op);
    }
    v
}

pub fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn spin(m: usize, k: usize) -> f64 {
    if (m >> k) & 1 == 1 {
        0.5
    } else {
        -0.5
    }
}

/// Echo with `H = Σ_{j<k} V_jk s_j s_k + Σ_j δ_j s_j` during both windows.
pub fn echo_state(n: usize, v: &[f64], delta: &[f64], tau: f64) -> Vec<C> {
    let dim = 1 << n;
    let energy = |m: usize| {
        let mut e = 0.0;
        for j in 0..n {
            e += delta[j] * spin(m, j);
            for k in (j + 1)..n {
                e += v[j * n + k] * spin(m, j) * spin(m, k);
            }
        }
        e
    };
    let phases: Vec<C> = (0..dim).map(|m| C::new(0.0, -energy(m) * tau / 2.0).exp()).collect();
    let mut psi = vec![ZERO; dim];
    psi[0] = ONE;
    psi = rotate_all(&psi, n, &rot_x(std::f64::consts::FRAC_PI_2));
    psi.iter_mut().zip(&phases).for_each(|(a, p)| *a *= p);
    psi = rotate_all(&psi, n, &rot_x(std::f64::consts::PI));
    psi.iter_mut().zip(&phases).for_each(|(a, p)| *a *= p);
    rotate_all(&psi, n, &rot_x(std::f64::consts::FRAC_PI_2))
}

/// `(⟨Jx⟩, ⟨Jy⟩, ⟨Jz⟩, ⟨Jx²⟩, ⟨Jy²⟩, ⟨JxJy + JyJx⟩)` without normalization.
pub fn moments(psi: &[C], n: usize) -> [f64; 6] {
    let jx = collective(psi, n, &pauli_x());
    let jy = collective(psi, n, &pauli_y());
    let jz = collective(psi, n, &pauli_z());
    let jyjx = collective(&jx, n, &pauli_y());
    let jxjy = collective(&jy, n, &pauli_x());
    [
        dot(psi, &jx).re,
        dot(psi, &jy).re,
        dot(psi, &jz).re,
        dot(&jx, &jx).re,
        dot(&jy, &jy).re,
        (dot(psi, &jxjy) + dot(psi, &jyjx)).re,
    ]
}

pub fn as_array(m: &rmd_core::SpinMoments) -> [f64; 6] {
    [m.jx, m.jy, m.jz, m.jx2, m.jy2, m.jxy]
}

pub fn max_diff(a: &[f64; 6], b: &[f64; 6]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Symmetric matrix with zero diagonal and entries in `[-scale, scale)`.
pub fn random_symmetric(rng: &mut impl rand::Rng, n: usize, scale: f64) -> Vec<f64> {
    let mut v = vec![0.0; n * n];
    for j in 0..n {
        for k in (j + 1)..n {
            let x = rng.gen_range(-scale..scale);
            v[j * n + k] = x;
            v[k * n + j] = x;
        }
    }
    v
}
