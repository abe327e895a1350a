//! Microwave-coupled Rydberg pair states.
//!
//! Two atoms in the `n's`/`np` manifold are described in the symmetric basis
//! `{|ss⟩, (|sp⟩+|ps⟩)/√2, |pp⟩}`. The microwave field couples neighbouring
//! basis states with `Ω_mw/√2`; van der Waals shifts act on `|ss⟩` and `|pp⟩`
//! and the resonant dipole exchange on the mixed channel. This module samples
//! the three adiabatic branches over a distance grid and extracts the
//! molecular well of a selected branch.

use crate::error::{Error, Result};
use crate::linalg::symmetric_eigen;
use crate::real::Real;

/// Index of the `|n's,n's⟩` state in the pair basis.
pub const SS_STATE: usize = 0;
/// Index of the symmetric `s–p` state in the pair basis.
pub const SP_STATE: usize = 1;
/// Index of the `|np,np⟩` state in the pair basis.
pub const PP_STATE: usize = 2;

const JACOBI_SWEEPS: usize = 60;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MwCoupling<T> {
    /// Microwave Rabi frequency.
    pub omega_mw: T,
    /// Microwave detuning.
    pub delta_mw: T,
}

impl<T: Real> MwCoupling<T> {
    pub fn new(omega_mw: T, delta_mw: T) -> Result<Self> {
        if !(omega_mw >= T::zero()) || !omega_mw.is_finite() || !delta_mw.is_finite() {
            return Err(Error::domain(format!(
                "microwave coupling needs finite omega_mw >= 0 and finite delta_mw, got ({omega_mw}, {delta_mw})"
            )));
        }
        Ok(Self { omega_mw, delta_mw })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DispersionCoeffs<T> {
    /// van der Waals coefficient of `|n's,n's⟩` (energy·length⁶).
    pub c6_ss: T,
    /// van der Waals coefficient of `|np,np⟩` (energy·length⁶).
    pub c6_pp: T,
    /// Dipolar exchange coefficient of the `s–p` channel (energy·length³).
    pub c3_sp: T,
}

impl<T: Real> DispersionCoeffs<T> {
    pub fn new(c6_ss: T, c6_pp: T, c3_sp: T) -> Result<Self> {
        if !(c6_ss.is_finite() && c6_pp.is_finite() && c3_sp.is_finite()) {
            return Err(Error::domain("dispersion coefficients must be finite"));
        }
        Ok(Self { c6_ss, c6_pp, c3_sp })
    }

    /// True when the two van der Waals coefficients carry opposite signs.
    pub fn has_opposite_c6_signs(&self) -> bool {
        self.c6_ss * self.c6_pp < T::zero()
    }
}

/// 3×3 real symmetric pair Hamiltonian, row-major nested arrays.
pub type PairMatrix<T> = [[T; 3]; 3];

/// Pair Hamiltonian at separation `r`.
pub fn build_pair_hamiltonian<T: Real>(r: T, mw: &MwCoupling<T>, coeffs: &DispersionCoeffs<T>) -> Result<PairMatrix<T>> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(Error::domain(format!("pair separation must be positive and finite, got {r}")));
    }
    let r3 = r.powi(3);
    let r6 = r3 * r3;
    let diag = [
        -coeffs.c6_ss / r6,
        mw.delta_mw + coeffs.c3_sp / r3,
        T::lit(2.0) * mw.delta_mw - coeffs.c6_pp / r6,
    ];
    Ok(ladder(diag, mw.omega_mw))
}

/// The `r → ∞` limit of [`build_pair_hamiltonian`].
pub fn asymptotic_pair_hamiltonian<T: Real>(mw: &MwCoupling<T>) -> PairMatrix<T> {
    ladder([T::zero(), mw.delta_mw, T::lit(2.0) * mw.delta_mw], mw.omega_mw)
}

fn ladder<T: Real>(diag: [T; 3], omega_mw: T) -> PairMatrix<T> {
    let t = omega_mw / T::lit(2.0).sqrt();
    let z = T::zero();
    [[diag[0], t, z], [t, diag[1], t], [z, t, diag[2]]]
}

/// Eigenvalues (ascending) and matching unit eigenvectors of a pair matrix.
pub fn diagonalize<T: Real>(h: &PairMatrix<T>) -> Option<([T; 3], [[T; 3]; 3])> {
    let flat: Vec<T> = h.iter().flatten().copied().collect();
    let eig = symmetric_eigen(&flat, 3, JACOBI_SWEEPS)?;
    let mut values = [T::zero(); 3];
    let mut vectors = [[T::zero(); 3]; 3];
    for j in 0..3 {
        values[j] = eig.values[j];
        for k in 0..3 {
            vectors[j][k] = eig.vectors[j][k];
        }
    }
    Some((values, vectors))
}

/// Mixing angle of the single-atom microwave-dressed states.
pub fn mixing_angle<T: Real>(mw: &MwCoupling<T>) -> Result<T> {
    if mw.omega_mw == T::zero() && mw.delta_mw == T::zero() {
        return Err(Error::domain("mixing angle undefined for zero microwave coupling and detuning"));
    }
    Ok((T::lit(2.0) * mw.omega_mw).atan2(mw.delta_mw))
}

/// How the branch of interest is chosen, evaluated at the widest grid point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSelector {
    Lowest,
    Middle,
    Highest,
    /// Adiabatic label `0..3`, ascending energy at the tail.
    Index(usize),
    /// Branch whose tail eigenvector has the largest weight on the given basis state.
    LargestOverlap(usize),
}

impl Default for BranchSelector {
    fn default() -> Self {
        BranchSelector::LargestOverlap(SS_STATE)
    }
}

/// Adiabatically tracked eigenenergy branches on a distance grid.
#[derive(Clone, Debug)]
pub struct PairCurveSet<T> {
    pub r_grid: Vec<T>,
    /// `branches[b][i]` is the energy of adiabatic branch `b` at `r_grid[i]`.
    pub branches: [Vec<T>; 3],
    /// Eigenvalues of the `r → ∞` matrix, ascending.
    pub asymptotes: [T; 3],
    pub branch_of_interest: usize,
    /// Smallest eigenvector overlap between neighbouring grid points along any branch.
    pub min_neighbor_overlap: T,
}

impl<T: Real> PairCurveSet<T> {
    pub fn branch(&self, b: usize) -> &[T] {
        &self.branches[b]
    }

    pub fn len(&self) -> usize {
        self.r_grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r_grid.is_empty()
    }
}

/// `n` logarithmically spaced distances between `r_min` and `r_max`.
pub fn log_grid<T: Real>(r_min: T, r_max: T, n: usize) -> Result<Vec<T>> {
    if !(r_min > T::zero() && r_max > r_min) || n < 2 {
        return Err(Error::domain("log grid needs 0 < r_min < r_max and at least two points"));
    }
    let (a, b) = (r_min.ln(), r_max.ln());
    let last = T::of_usize(n - 1);
    Ok((0..n)
        .map(|i| {
            if i == n - 1 {
                r_max
            } else {
                (a + (b - a) * T::of_usize(i) / last).exp()
            }
        })
        .collect())
}

/// Default grid: 2000 log-spaced points from 0.3 μm to 20 μm.
pub fn default_grid<T: Real>() -> Vec<T> {
    log_grid(T::lit(0.3), T::lit(20.0), 2000).expect("valid default grid")
}

/// Eigencurves with the default branch selection (largest `|ss⟩` weight at the tail).
pub fn eigencurves<T: Real>(r_grid: &[T], mw: &MwCoupling<T>, coeffs: &DispersionCoeffs<T>) -> Result<PairCurveSet<T>> {
    eigencurves_with(r_grid, mw, coeffs, BranchSelector::default())
}

/// Diagonalizes the pair Hamiltonian on `r_grid` and labels branches by
/// eigenvector continuation from the largest distance inwards.
pub fn eigencurves_with<T: Real>(
    r_grid: &[T],
    mw: &MwCoupling<T>,
    coeffs: &DispersionCoeffs<T>,
    selector: BranchSelector,
) -> Result<PairCurveSet<T>> {
    if r_grid.is_empty() {
        return Err(Error::domain("distance grid is empty"));
    }
    if r_grid.iter().any(|&r| !(r > T::zero())) || r_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("distance grid must be positive and strictly increasing"));
    }
    let n = r_grid.len();
    let mut branches: [Vec<T>; 3] = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];

    let last = n - 1;
    let (values, vectors) =
        diagonalize(&build_pair_hamiltonian(r_grid[last], mw, coeffs)?).ok_or(Error::EigenNonConvergence { index: last })?;
    for b in 0..3 {
        branches[b][last] = values[b];
    }
    let tail_vectors = vectors;
    let mut prev_vectors = vectors;
    let mut prev_values = values;
    let mut min_overlap = T::one();

    for i in (0..last).rev() {
        let (values, vectors) =
            diagonalize(&build_pair_hamiltonian(r_grid[i], mw, coeffs)?).ok_or(Error::EigenNonConvergence { index: i })?;
        let perm = best_assignment(&prev_vectors, &prev_values, &vectors, &values);
        let mut next_vectors = prev_vectors;
        for b in 0..3 {
            let j = perm[b];
            branches[b][i] = values[j];
            min_overlap = min_overlap.min(dot(&prev_vectors[b], &vectors[j]).abs());
            next_vectors[b] = vectors[j];
            prev_values[b] = values[j];
        }
        prev_vectors = next_vectors;
    }

    let (asymptotes, _) = diagonalize(&asymptotic_pair_hamiltonian(mw)).ok_or(Error::EigenNonConvergence { index: n })?;

    let branch_of_interest = match selector {
        BranchSelector::Lowest => 0,
        BranchSelector::Middle => 1,
        BranchSelector::Highest => 2,
        BranchSelector::Index(b) if b < 3 => b,
        BranchSelector::Index(b) => return Err(Error::domain(format!("branch index {b} out of range 0..3"))),
        BranchSelector::LargestOverlap(state) if state < 3 => {
            let mut best = 0;
            for b in 1..3 {
                if tail_vectors[b][state].abs() > tail_vectors[best][state].abs() {
                    best = b;
                }
            }
            best
        }
        BranchSelector::LargestOverlap(state) => {
            return Err(Error::domain(format!("basis state {state} out of range 0..3")))
        }
    };

    Ok(PairCurveSet { r_grid: r_grid.to_vec(), branches, asymptotes, branch_of_interest, min_neighbor_overlap: min_overlap })
}

fn dot<T: Real>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// Permutation `perm[b] = j` maximizing total eigenvector overlap; ties go to
/// the assignment with the smallest total energy jump.
fn best_assignment<T: Real>(prev_vecs: &[[T; 3]; 3], prev_vals: &[T; 3], vecs: &[[T; 3]; 3], vals: &[T; 3]) -> [usize; 3] {
    let tie = T::lit(1e-9);
    let mut best = PERMUTATIONS[0];
    let mut best_overlap = T::neg_infinity();
    let mut best_jump = T::infinity();
    for perm in PERMUTATIONS {
        let overlap: T = (0..3).map(|b| dot(&prev_vecs[b], &vecs[perm[b]]).abs()).sum();
        let jump: T = (0..3).map(|b| (prev_vals[b] - vals[perm[b]]).abs()).sum();
        if overlap > best_overlap + tie || ((overlap - best_overlap).abs() <= tie && jump < best_jump) {
            best = perm;
            best_overlap = overlap;
            best_jump = jump;
        }
    }
    best
}

/// Molecular potential of the selected branch, referenced to its tail energy.
#[derive(Clone, Debug)]
pub struct MolecularPotential<T> {
    pub r_grid: Vec<T>,
    /// `U(R)` samples.
    pub curve: Vec<T>,
    /// Location of the potential minimum.
    pub r_min: T,
    /// `U(r_min)`.
    pub u_min: T,
    /// False when the minimum sits on the grid edge (no interior well).
    pub interior_minimum: bool,
}

/// Relative tail slope above which the grid is considered too short.
pub const TAIL_TOLERANCE: f64 = 1e-4;

pub fn molecular_potential<T: Real>(curves: &PairCurveSet<T>) -> Result<MolecularPotential<T>> {
    let b = curves.branch_of_interest;
    if b >= 3 {
        return Err(Error::Precondition(format!("branch_of_interest {b} is not a valid branch")));
    }
    let energies = curves.branch(b);
    let n = energies.len();
    if n < 3 {
        return Err(Error::Precondition("need at least three grid points to locate a minimum".into()));
    }
    let tail = energies[n - 1];
    let curve: Vec<T> = energies.iter().map(|&e| e - tail).collect();
    let span = curve.iter().fold(T::zero(), |m, u| m.max(u.abs()));
    let tail_step = (curve[n - 2] - curve[n - 1]).abs();
    if tail_step > T::lit(TAIL_TOLERANCE) * span {
        return Err(Error::Precondition(format!(
            "potential tail not converged at R_max = {} (relative step {}); increase R_max",
            curves.r_grid[n - 1],
            tail_step / span
        )));
    }
    MolecularPotential::from_samples(curves.r_grid.clone(), curve)
}

impl<T: Real> MolecularPotential<T> {
    /// Builds a potential from samples already referenced to zero at the tail.
    pub fn from_samples(r_grid: Vec<T>, curve: Vec<T>) -> Result<Self> {
        if r_grid.len() != curve.len() || r_grid.len() < 3 {
            return Err(Error::domain("potential needs matching grids of at least three points"));
        }
        let n = curve.len();
        let mut imin = 0;
        for i in 1..n {
            if curve[i] < curve[imin] {
                imin = i;
            }
        }
        let interior = imin > 0 && imin < n - 1;
        let (r_min, u_min) = if interior {
            parabolic_vertex(
                (r_grid[imin - 1], curve[imin - 1]),
                (r_grid[imin], curve[imin]),
                (r_grid[imin + 1], curve[imin + 1]),
            )
        } else {
            (r_grid[imin], curve[imin])
        };
        Ok(Self { r_grid, curve, r_min, u_min, interior_minimum: interior })
    }

    /// Potential with every energy multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            r_grid: self.r_grid.clone(),
            curve: self.curve.iter().map(|&u| u * factor).collect(),
            r_min: self.r_min,
            u_min: self.u_min * factor,
            interior_minimum: self.interior_minimum,
        }
    }

    /// Rescales the energies so that the well bottom sits at `target`.
    pub fn with_depth(&self, target: T) -> Result<Self> {
        if !self.interior_minimum || !(self.u_min < T::zero()) {
            return Err(Error::Precondition("depth calibration needs an interior attractive well".into()));
        }
        Ok(self.scaled(target / self.u_min))
    }

    pub fn r_max(&self) -> T {
        self.r_grid[self.r_grid.len() - 1]
    }

    /// `U(r)` by piecewise-cubic Hermite interpolation; zero beyond the grid.
    pub fn at(&self, r: T) -> Result<T> {
        let n = self.r_grid.len();
        if !(r >= self.r_grid[0]) {
            return Err(Error::domain(format!(
                "distance {r} lies inside the sampled range start {}; extend the grid inwards",
                self.r_grid[0]
            )));
        }
        if r >= self.r_grid[n - 1] {
            return Ok(T::zero());
        }
        let i = match self.r_grid.binary_search_by(|x| x.partial_cmp(&r).expect("finite grid")) {
            Ok(i) => return Ok(self.curve[i]),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.r_grid[i], self.r_grid[i + 1]);
        let (y0, y1) = (self.curve[i], self.curve[i + 1]);
        let h = x1 - x0;
        let m0 = self.slope(i);
        let m1 = self.slope(i + 1);
        let t = (r - x0) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = -two * t3 + three * t2;
        let h11 = t3 - t2;
        Ok(h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1)
    }

    fn slope(&self, i: usize) -> T {
        let x = &self.r_grid;
        let y = &self.curve;
        let n = x.len();
        if i == 0 {
            return (y[1] - y[0]) / (x[1] - x[0]);
        }
        if i == n - 1 {
            return (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2]);
        }
        let hl = x[i] - x[i - 1];
        let hr = x[i + 1] - x[i];
        let dl = (y[i] - y[i - 1]) / hl;
        let dr = (y[i + 1] - y[i]) / hr;
        (dl * hr + dr * hl) / (hl + hr)
    }
}

/// Vertex of the parabola through three points.
fn parabolic_vertex<T: Real>(p0: (T, T), p1: (T, T), p2: (T, T)) -> (T, T) {
    let (x0, y0) = p0;
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let a = (x1 - x0) * (y1 - y2);
    let b = (x1 - x2) * (y1 - y0);
    let denom = a - b;
    if denom == T::zero() {
        return p1;
    }
    let xv = x1 - T::lit(0.5) * ((x1 - x0) * a - (x1 - x2) * b) / denom;
    // Lagrange form evaluated at the vertex.
    let l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
    let l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
    let l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
    (xv, y0 * l0 + y1 * l1 + y2 * l2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mw(o: f64, d: f64) -> MwCoupling<f64> {
        MwCoupling::new(o, d).unwrap()
    }

    fn coeffs(ss: f64, pp: f64, sp: f64) -> DispersionCoeffs<f64> {
        DispersionCoeffs::new(ss, pp, sp).unwrap()
    }

    #[test]
    fn hamiltonian_entries_match_pair_model() {
        let h = build_pair_hamiltonian(2.0, &mw(3.0, 0.5), &coeffs(64.0, -128.0, 8.0)).unwrap();
        let t = 3.0 / 2f64.sqrt();
        assert_eq!(h[0][0], -1.0);
        assert_eq!(h[1][1], 0.5 + 1.0);
        assert_eq!(h[2][2], 1.0 + 2.0);
        assert_eq!(h[0][1], t);
        assert_eq!(h[1][2], t);
        assert_eq!(h[0][2], 0.0);
        assert_eq!(h[1][0], h[0][1]);
    }

    #[test]
    fn nonpositive_distance_is_rejected() {
        assert!(matches!(build_pair_hamiltonian(0.0, &mw(1.0, 0.0), &coeffs(1.0, -1.0, 0.0)), Err(Error::Domain(_))));
        assert!(build_pair_hamiltonian(-1.0, &mw(1.0, 0.0), &coeffs(1.0, -1.0, 0.0)).is_err());
    }

    #[test]
    fn negative_rabi_frequency_is_rejected() {
        assert!(MwCoupling::new(-1.0, 0.0).is_err());
    }

    #[test]
    fn large_distance_limit_is_equal_spaced_ladder() {
        let h = build_pair_hamiltonian(1e6, &mw(2.5, 0.0), &coeffs(100.0, -100.0, 10.0)).unwrap();
        let (vals, _) = diagonalize(&h).unwrap();
        for (v, want) in vals.iter().zip([-2.5, 0.0, 2.5]) {
            assert!((v - want).abs() < 1e-10);
        }
    }

    #[test]
    fn uncoupled_eigenvalues_are_diagonal() {
        let h = build_pair_hamiltonian(1.5, &mw(0.0, 0.3), &coeffs(10.0, -5.0, 2.0)).unwrap();
        let (vals, _) = diagonalize(&h).unwrap();
        let mut diag = [h[0][0], h[1][1], h[2][2]];
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, d) in vals.iter().zip(diag) {
            assert!((v - d).abs() < 1e-12);
        }
    }

    #[test]
    fn mixing_angle_cases() {
        let half_pi = std::f64::consts::FRAC_PI_2;
        assert!((mixing_angle(&mw(1.0, 0.0)).unwrap() - half_pi).abs() < 1e-15);
        assert_eq!(mixing_angle(&mw(0.0, 2.0)).unwrap(), 0.0);
        assert!((mixing_angle(&mw(1.0, 2.0)).unwrap() - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert!(mixing_angle(&mw(0.0, 0.0)).is_err());
    }

    #[test]
    fn single_point_grid_gives_sorted_eigenvalues() {
        let m = mw(134.0, 0.0);
        let c = coeffs(-1147.12, 16068.07, 0.0);
        let set = eigencurves(&[2.0], &m, &c).unwrap();
        let (vals, _) = diagonalize(&build_pair_hamiltonian(2.0, &m, &c).unwrap()).unwrap();
        for b in 0..3 {
            assert_eq!(set.branches[b][0], vals[b]);
        }
    }

    #[test]
    fn grid_must_increase() {
        let m = mw(1.0, 0.0);
        let c = coeffs(1.0, -1.0, 0.0);
        assert!(eigencurves(&[1.0, 1.0], &m, &c).is_err());
        assert!(eigencurves(&[2.0, 1.0], &m, &c).is_err());
        assert!(eigencurves(&[0.0, 1.0], &m, &c).is_err());
        assert!(eigencurves::<f64>(&[], &m, &c).is_err());
    }

    #[test]
    fn uncoupled_crossing_is_tracked_diabatically() {
        // With Ω_mw = 0 the channels do not mix; -c6_ss/r^6 and the flat s-p line
        // cross exactly, so sorted eigenvalues would kink while tracked ones stay smooth.
        let m = mw(0.0, 1.0);
        let c = coeffs(-1.0, 0.0, 0.0);
        let grid = log_grid(0.5, 5.0, 400).unwrap();
        let set = eigencurves_with(&grid, &m, &c, BranchSelector::LargestOverlap(SS_STATE)).unwrap();
        let b = set.branch_of_interest;
        for (r, e) in grid.iter().zip(set.branch(b)) {
            assert!((e - 1.0 / r.powi(6)).abs() < 1e-12);
        }
        assert!(set.min_neighbor_overlap > 0.999);
    }

    #[test]
    fn asymptotes_for_resonant_coupling() {
        let set = eigencurves(&default_grid(), &mw(134.0, 0.0), &coeffs(-1147.12, 16068.07, 0.0)).unwrap();
        for (a, want) in set.asymptotes.iter().zip([-134.0, 0.0, 134.0]) {
            assert!((a - want).abs() < 1e-9);
        }
    }

    #[test]
    fn pure_van_der_waals_potential_has_edge_minimum() {
        let grid = log_grid(0.5, 30.0, 500).unwrap();
        let set = eigencurves(&grid, &mw(0.0, 0.0), &coeffs(3.0, 0.0, 0.0)).unwrap();
        assert_eq!(set.branch_of_interest, {
            // |ss⟩ is the lowest diagonal entry everywhere here
            let first = set.branches.iter().position(|br| (br[0] + 3.0 / 0.5f64.powi(6)).abs() < 1e-9);
            first.unwrap()
        });
        let pot = molecular_potential(&set).unwrap();
        assert!(!pot.interior_minimum);
        assert_eq!(pot.r_min, 0.5);
        for (r, u) in grid.iter().zip(&pot.curve) {
            let exact = -3.0 / r.powi(6) + 3.0 / 30f64.powi(6);
            assert!((u - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn short_grid_fails_tail_check() {
        let grid = log_grid(0.5, 1.0, 50).unwrap();
        let set = eigencurves(&grid, &mw(0.0, 0.0), &coeffs(3.0, 0.0, 0.0)).unwrap();
        assert!(matches!(molecular_potential(&set), Err(Error::Precondition(_))));
    }

    #[test]
    fn parabolic_refinement_is_exact_for_parabola() {
        let (x, y) = parabolic_vertex::<f64>((1.0, 3.0 + 2.0 * 0.49), (1.5, 3.0 + 2.0 * 0.04), (2.5, 3.0 + 2.0 * 0.64));
        assert!((x - 1.7).abs() < 1e-12);
        assert!((y - 3.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_nodes_and_vanishes_beyond_grid() {
        let grid: Vec<f64> = log_grid(1.0, 10.0, 200).unwrap();
        let curve: Vec<f64> = grid.iter().map(|r| -1.0 / r.powi(3) + 1e-3).collect();
        let pot = MolecularPotential::from_samples(grid.clone(), curve.clone()).unwrap();
        assert_eq!(pot.at(grid[17]).unwrap(), curve[17]);
        let mid = 0.5 * (grid[40] + grid[41]);
        assert!((pot.at(mid).unwrap() - (-1.0 / mid.powi(3) + 1e-3)).abs() < 1e-7);
        assert_eq!(pot.at(11.0).unwrap(), 0.0);
        assert!(pot.at(0.9).is_err());
    }

    fn random_case() -> impl Strategy<Value = (f64, f64, f64, f64, f64, f64)> {
        (0.3f64..20.0, 0.0f64..300.0, -50.0f64..50.0, -5e4f64..5e4, -5e4f64..5e4, -1e3f64..1e3)
    }

    proptest! {
        #[test]
        fn eigenpairs_have_small_residual((r, o, d, ss, pp, sp) in random_case()) {
            let h = build_pair_hamiltonian(r, &mw(o, d), &coeffs(ss, pp, sp)).unwrap();
            let (vals, vecs) = diagonalize(&h).unwrap();
            let norm = h.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
            for j in 0..3 {
                let mut res = 0.0;
                for i in 0..3 {
                    let hv: f64 = (0..3).map(|k| h[i][k] * vecs[j][k]).sum();
                    res += (hv - vals[j] * vecs[j][i]).powi(2);
                }
                prop_assert!(res.sqrt() <= 1e-10 * norm);
            }
        }

        #[test]
        fn branch_energies_sum_to_trace((o, d, ss, pp, sp) in (0.0f64..300.0, -50.0f64..50.0, -5e4f64..5e4, -5e4f64..5e4, -1e3f64..1e3)) {
            let grid = log_grid(0.5, 20.0, 60).unwrap();
            let m = mw(o, d);
            let c = coeffs(ss, pp, sp);
            let set = eigencurves(&grid, &m, &c).unwrap();
            for (i, &r) in grid.iter().enumerate() {
                let h = build_pair_hamiltonian(r, &m, &c).unwrap();
                let trace = h[0][0] + h[1][1] + h[2][2];
                let sum = set.branches[0][i] + set.branches[1][i] + set.branches[2][i];
                let scale = h.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
                prop_assert!((sum - trace).abs() <= 1e-10 * scale.max(1e-300));
            }
        }
    }

    #[test]
    fn branch_steps_shrink_linearly_with_spacing() {
        let m = mw(134.0, 0.0);
        let c = coeffs(-1147.12, 16068.07, 0.0);
        let max_step = |n: usize| {
            let grid = log_grid(1.0, 20.0, n).unwrap();
            let set = eigencurves(&grid, &m, &c).unwrap();
            set.branches
                .iter()
                .map(|br| br.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0f64, f64::max))
                .fold(0.0f64, f64::max)
        };
        let coarse = max_step(400);
        let fine = max_step(799);
        let ratio = coarse / fine;
        assert!((ratio - 2.0).abs() < 0.1, "ratio {ratio}");
    }
}
