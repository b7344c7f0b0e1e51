//! States, density matrices, partial traces, Pauli expansions and sampling.
//!
//! Site 0 is the most significant bit of a computational-basis index, so the
//! amplitude of `|i j k⟩` on three sites sits at index `4i + 2j + k`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex;

use nalgebra::{ComplexField, DMatrix, DVector, Matrix2, SymmetricEigen, Vector4};
use rand_core::RngCore;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::rng;
use crate::tol;
use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Largest supported register; dimensions stay at or below 2^8.
pub const MAX_SITES: usize = 8;

const SL2C_MAX_ATTEMPTS: usize = 1000;

fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `σ_0 = I`, `σ_1 = X`, `σ_2 = Y`, `σ_3 = Z`.
///
/// # Panics
///
/// If `index > 3`.
pub fn pauli(index: usize) -> Matrix2<C64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match index {
        0 => Matrix2::new(o, z, z, o),
        1 => Matrix2::new(z, o, o, z),
        2 => Matrix2::new(z, -i, i, z),
        3 => Matrix2::new(o, z, z, -o),
        _ => panic!("Pauli index {index} out of range"),
    }
}

fn sites_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension {
            what: "dimension must be a power of two of at least 2",
            found: dim,
        });
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_SITES {
        return Err(Error::Dimension {
            what: "too many sites (maximum 8)",
            found: n,
        });
    }
    Ok(n)
}

fn check_site_count(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(Error::Dimension {
            what: "site count must be in 1..=8",
            found: n_sites,
        });
    }
    Ok(())
}

/// Normalized state vector on `n_sites` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n_sites: usize,
    amplitudes: DVector<C64>,
}

impl PureState {
    /// Validates length (power of two) and unit norm within [`tol::STRUCTURE`].
    pub fn new(amplitudes: DVector<C64>) -> Result<Self> {
        let n_sites = sites_for_dim(amplitudes.len())?;
        let deviation = amplitudes.norm() - 1.0;
        if !(deviation.abs() <= tol::STRUCTURE) {
            return Err(Error::Norm(deviation));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    /// Rescales a non-zero vector to unit norm.
    pub fn normalized(amplitudes: DVector<C64>) -> Result<Self> {
        let n_sites = sites_for_dim(amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Norm(norm - 1.0));
        }
        Ok(Self {
            n_sites,
            amplitudes: amplitudes.unscale(norm),
        })
    }

    /// Computational-basis state `|index⟩`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        let dim = 1 << n_sites;
        if index >= dim {
            return Err(Error::Dimension {
                what: "basis index out of range",
                found: index,
            });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = c(1.0, 0.0);
        Ok(Self { n_sites, amplitudes })
    }

    /// `(|0…0⟩ + |1…1⟩)/√2`.
    pub fn ghz(n_sites: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        if n_sites < 2 {
            return Err(Error::Dimension {
                what: "GHZ state needs at least 2 sites",
                found: n_sites,
            });
        }
        let dim = 1 << n_sites;
        let mut amplitudes = DVector::zeros(dim);
        let a = core::f64::consts::FRAC_1_SQRT_2;
        amplitudes[0] = c(a, 0.0);
        amplitudes[dim - 1] = c(a, 0.0);
        Ok(Self { n_sites, amplitudes })
    }

    /// Equal superposition of all single-excitation basis states.
    pub fn w(n_sites: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        if n_sites < 2 {
            return Err(Error::Dimension {
                what: "W state needs at least 2 sites",
                found: n_sites,
            });
        }
        let mut amplitudes = DVector::zeros(1 << n_sites);
        let a = 1.0 / libm::sqrt(n_sites as f64);
        for site in 0..n_sites {
            amplitudes[1 << site] = c(a, 0.0);
        }
        Ok(Self { n_sites, amplitudes })
    }

    /// Haar-distributed state: normalized i.i.d. complex Gaussians.
    pub fn haar<R: RngCore + ?Sized>(n_sites: usize, rng: &mut R) -> Result<Self> {
        check_site_count(n_sites)?;
        let amplitudes = DVector::from_fn(1 << n_sites, |_, _| gaussian_complex(rng));
        Self::normalized(amplitudes)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n_sites: self.n_sites,
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace matrix on `n_sites` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates shape, Hermiticity, trace and positivity within [`tol::STRUCTURE`].
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Dimension {
                what: "density matrix must be square",
                found: matrix.nrows(),
            });
        }
        let n_sites = sites_for_dim(matrix.nrows())?;
        let herm = hermiticity_defect(&matrix);
        if !(herm <= tol::STRUCTURE) {
            return Err(Error::Hermiticity(herm));
        }
        let trace = matrix.trace();
        let deviation = (trace - c(1.0, 0.0)).norm();
        if !(deviation <= tol::STRUCTURE) {
            return Err(Error::Trace(deviation));
        }
        let min_eig = hermitian_eigenvalues(&matrix)
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -tol::STRUCTURE {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { n_sites, matrix })
    }

    /// For matrices valid by construction.
    pub(crate) fn from_valid(n_sites: usize, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_sites);
        Self { n_sites, matrix }
    }

    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        check_site_count(n_sites)?;
        let dim = 1 << n_sites;
        Ok(Self {
            n_sites,
            matrix: DMatrix::identity(dim, dim).unscale(dim as f64),
        })
    }

    /// Mixture of `rank` Haar pure states with flat Dirichlet weights.
    pub fn random<R: RngCore + ?Sized>(n_sites: usize, rank: usize, rng: &mut R) -> Result<Self> {
        check_site_count(n_sites)?;
        let dim = 1 << n_sites;
        if rank == 0 || rank > dim {
            return Err(Error::Rank { rank, max: dim });
        }
        let weights: Vec<f64> = (0..rank).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = weights.iter().sum();
        let mut matrix = DMatrix::zeros(dim, dim);
        for w in weights {
            let psi = PureState::haar(n_sites, rng)?;
            matrix += (&psi.amplitudes * psi.amplitudes.adjoint()).scale(w / total);
        }
        Ok(Self { n_sites, matrix })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        // tr ρ² = Σ |ρ_ij|² for Hermitian ρ.
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig = hermitian_eigenvalues(&self.matrix);
        eig.sort_by(f64::total_cmp);
        eig
    }
}

fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect()
}

/// Same as [`PureState::density`].
pub fn density_from_pure(psi: &PureState) -> DensityMatrix {
    psi.density()
}

fn check_sites(sites: &[usize], n_sites: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::EmptySelection);
    }
    for (i, &s) in sites.iter().enumerate() {
        if s >= n_sites {
            return Err(Error::SiteOutOfRange { site: s, n_sites });
        }
        if sites[..i].contains(&s) {
            return Err(Error::DuplicateSite(s));
        }
    }
    Ok(())
}

/// Basis-index offsets contributed by every bit pattern of `sites`, with
/// `sites[0]` the most significant bit of the pattern.
fn site_offsets(sites: &[usize], n_sites: usize) -> Vec<usize> {
    let k = sites.len();
    (0..1usize << k)
        .map(|pattern| {
            sites
                .iter()
                .enumerate()
                .filter(|(p, _)| (pattern >> (k - 1 - p)) & 1 == 1)
                .fold(0, |idx, (_, &s)| idx | 1 << (n_sites - 1 - s))
        })
        .collect()
}

/// Partial trace of an arbitrary (not necessarily normalized) square matrix
/// on `n_sites` qubits, keeping `keep` in the given order.
pub fn partial_trace_matrix(m: &DMatrix<C64>, n_sites: usize, keep: &[usize]) -> Result<DMatrix<C64>> {
    if m.nrows() != 1 << n_sites || !m.is_square() {
        return Err(Error::Dimension {
            what: "matrix size does not match the site count",
            found: m.nrows(),
        });
    }
    check_sites(keep, n_sites)?;
    let traced: Vec<usize> = (0..n_sites).filter(|s| !keep.contains(s)).collect();
    let kept = site_offsets(keep, n_sites);
    let summed = if traced.is_empty() {
        vec![0]
    } else {
        site_offsets(&traced, n_sites)
    };
    let d = kept.len();
    Ok(DMatrix::from_fn(d, d, |r, col| {
        summed
            .iter()
            .map(|&t| m[(kept[r] | t, kept[col] | t)])
            .sum()
    }))
}

/// Reduced density matrix on `keep`, tensor factors ordered as in `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let matrix = partial_trace_matrix(&rho.matrix, rho.n_sites, keep)?;
    Ok(DensityMatrix::from_valid(keep.len(), matrix))
}

/// Which group a local operation is claimed to belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupClass {
    Su2,
    Sl2c,
}

impl fmt::Display for GroupClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupClass::Su2 => "SU2",
            GroupClass::Sl2c => "SL2C",
        })
    }
}

/// A 2×2 operation on one site, validated against its group class.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperation {
    site: usize,
    matrix: Matrix2<C64>,
    class: GroupClass,
}

impl LocalOperation {
    /// Unit determinant for both classes; `SU2` additionally requires `U†U = I`.
    pub fn new(site: usize, matrix: Matrix2<C64>, class: GroupClass) -> Result<Self> {
        let det_defect = (matrix.determinant() - c(1.0, 0.0)).norm();
        let residual = match class {
            GroupClass::Sl2c => det_defect,
            GroupClass::Su2 => {
                let unitary_defect = (matrix.adjoint() * matrix - Matrix2::identity())
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                det_defect.max(unitary_defect)
            }
        };
        if !(residual <= tol::STRUCTURE) {
            return Err(Error::Class { class, residual });
        }
        Ok(Self { site, matrix, class })
    }

    pub fn identity(site: usize) -> Self {
        Self {
            site,
            matrix: Matrix2::identity(),
            class: GroupClass::Su2,
        }
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.matrix
    }

    pub fn class(&self) -> GroupClass {
        self.class
    }

    /// Same operation on another site.
    pub fn on_site(mut self, site: usize) -> Self {
        self.site = site;
        self
    }
}

fn gaussian_complex<R: RngCore + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    c(re, im)
}

/// Haar element of SU(2) from a normalized quaternion of four Gaussians.
pub fn sample_su2<R: RngCore + ?Sized>(site: usize, rng: &mut R) -> LocalOperation {
    loop {
        let q: [f64; 4] = core::array::from_fn(|_| StandardNormal.sample(rng));
        let norm = libm::sqrt(q.iter().map(|x| x * x).sum::<f64>());
        if norm < 1e-12 {
            continue;
        }
        let [a, b, cc, d] = q.map(|x| x / norm);
        let matrix = Matrix2::new(c(a, b), c(cc, d), c(-cc, d), c(a, -b));
        return LocalOperation {
            site,
            matrix,
            class: GroupClass::Su2,
        };
    }
}

/// Ratio of the singular values of a non-singular 2×2 matrix.
pub fn sl2c_condition(m: &Matrix2<C64>) -> f64 {
    // σ1·σ2 = |det m| and σ1² + σ2² = ‖m‖_F².
    let frob = m.iter().map(|z| z.norm_sqr()).sum::<f64>();
    let det = m.determinant().norm();
    let disc = (frob * frob - 4.0 * det * det).max(0.0);
    let s1_sq = 0.5 * (frob + libm::sqrt(disc));
    s1_sq / det
}

/// Ginibre matrix rescaled to unit determinant, resampled until its
/// singular-value ratio is at most `max_condition`.
pub fn sample_sl2c<R: RngCore + ?Sized>(
    site: usize,
    rng: &mut R,
    max_condition: f64,
) -> Result<LocalOperation> {
    if !(max_condition > 1.0) {
        return Err(Error::Parameter("max_condition must exceed 1"));
    }
    for _ in 0..SL2C_MAX_ATTEMPTS {
        let g = Matrix2::from_fn(|_, _| gaussian_complex(rng));
        let det = g.determinant();
        if det.norm() < 1e-12 {
            continue;
        }
        let root = ComplexField::sqrt(det);
        let matrix = g.map(|z| z / root);
        if sl2c_condition(&matrix) <= max_condition {
            return Ok(LocalOperation {
                site,
                matrix,
                class: GroupClass::Sl2c,
            });
        }
    }
    Err(Error::Sampling(SL2C_MAX_ATTEMPTS))
}

pub fn haar_random_pure(n_sites: usize, seed: u64) -> Result<PureState> {
    PureState::haar(n_sites, &mut rng::seeded(seed))
}

pub fn random_density(n_sites: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    DensityMatrix::random(n_sites, rank, &mut rng::seeded(seed))
}

pub fn random_su2(site: usize, seed: u64) -> LocalOperation {
    sample_su2(site, &mut rng::seeded(seed))
}

/// Default singular-value ratio cap for [`random_sl2c`].
pub const DEFAULT_MAX_CONDITION: f64 = 10.0;

pub fn random_sl2c(site: usize, seed: u64, max_condition: f64) -> Result<LocalOperation> {
    sample_sl2c(site, &mut rng::seeded(seed), max_condition)
}

/// Output of [`apply_local`]: the (re)normalized state together with the
/// trace of the unnormalized transformed state (`‖(⊗𝒰)ψ‖²` for pure states).
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed<T> {
    pub state: T,
    pub trace_factor: f64,
}

/// States that local operations act on.
pub trait LocalAction: Sized {
    fn apply_local(&self, ops: &[LocalOperation]) -> Result<Transformed<Self>>;
}

fn check_op_sites(ops: &[LocalOperation], n_sites: usize) -> Result<()> {
    for (i, op) in ops.iter().enumerate() {
        if op.site >= n_sites {
            return Err(Error::SiteOutOfRange {
                site: op.site,
                n_sites,
            });
        }
        if ops[..i].iter().any(|o| o.site == op.site) {
            return Err(Error::DuplicateSite(op.site));
        }
    }
    Ok(())
}

/// Applies `m` to `site` of every column of `x`.
pub(crate) fn apply_site_to_columns(x: &mut DMatrix<C64>, n_sites: usize, site: usize, m: &Matrix2<C64>) {
    let bit = 1 << (n_sites - 1 - site);
    for mut col in x.column_iter_mut() {
        for i in (0..col.len()).filter(|i| i & bit == 0) {
            let (lo, hi) = (col[i], col[i | bit]);
            col[i] = m[(0, 0)] * lo + m[(0, 1)] * hi;
            col[i | bit] = m[(1, 0)] * lo + m[(1, 1)] * hi;
        }
    }
}

fn any_sl2c(ops: &[LocalOperation]) -> bool {
    ops.iter().any(|op| op.class == GroupClass::Sl2c)
}

impl LocalAction for PureState {
    fn apply_local(&self, ops: &[LocalOperation]) -> Result<Transformed<Self>> {
        check_op_sites(ops, self.n_sites)?;
        let mut v = DMatrix::from_column_slice(self.dim(), 1, self.amplitudes.as_slice());
        for op in ops {
            apply_site_to_columns(&mut v, self.n_sites, op.site, &op.matrix);
        }
        let mut amplitudes = DVector::from_column_slice(v.as_slice());
        let mut trace_factor = 1.0;
        if any_sl2c(ops) {
            trace_factor = amplitudes.norm_squared();
            amplitudes.unscale_mut(libm::sqrt(trace_factor));
        }
        Ok(Transformed {
            state: Self {
                n_sites: self.n_sites,
                amplitudes,
            },
            trace_factor,
        })
    }
}

/// `(⊗𝒰) m (⊗𝒰)†` for a raw matrix; sites must already be checked.
pub(crate) fn conjugate_by_locals(m: &DMatrix<C64>, n_sites: usize, ops: &[(usize, Matrix2<C64>)]) -> DMatrix<C64> {
    let mut x = m.clone();
    for (site, u) in ops {
        apply_site_to_columns(&mut x, n_sites, *site, u);
    }
    let mut y = x.adjoint();
    for (site, u) in ops {
        apply_site_to_columns(&mut y, n_sites, *site, u);
    }
    y.adjoint()
}

impl LocalAction for DensityMatrix {
    fn apply_local(&self, ops: &[LocalOperation]) -> Result<Transformed<Self>> {
        check_op_sites(ops, self.n_sites)?;
        let pairs: Vec<(usize, Matrix2<C64>)> = ops.iter().map(|op| (op.site, op.matrix)).collect();
        let mut matrix = conjugate_by_locals(&self.matrix, self.n_sites, &pairs);
        let mut trace_factor = 1.0;
        if any_sl2c(ops) {
            trace_factor = matrix.trace().re;
            matrix.unscale_mut(trace_factor);
        }
        Ok(Transformed {
            state: Self {
                n_sites: self.n_sites,
                matrix,
            },
            trace_factor,
        })
    }
}

/// Applies at most one operation per site. `SL2C` actions are followed by
/// renormalization; the discarded trace is kept in [`Transformed::trace_factor`].
pub fn apply_local<S: LocalAction>(state: &S, ops: &[LocalOperation]) -> Result<Transformed<S>> {
    state.apply_local(ops)
}

/// Real coefficients `m_i` of a Hermitian operator `M = Σ m_i σ_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PauliVector(pub Vector4<f64>);

impl PauliVector {
    pub fn new(m0: f64, m1: f64, m2: f64, m3: f64) -> Self {
        Self(Vector4::new(m0, m1, m2, m3))
    }

    pub fn as_vector(&self) -> &Vector4<f64> {
        &self.0
    }

    /// `k² = Σ m_i²`; `tr(M†M) = 2k²`.
    pub fn size_squared(&self) -> f64 {
        self.0.norm_squared()
    }
}

impl From<[f64; 4]> for PauliVector {
    fn from(m: [f64; 4]) -> Self {
        Self(Vector4::from(m))
    }
}

/// `m_i = ½ tr(σ_i M)`.
pub fn pauli_coefficients(m: &Matrix2<C64>) -> Result<PauliVector> {
    let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(herm <= tol::STRUCTURE) {
        return Err(Error::Hermiticity(herm));
    }
    Ok(PauliVector(Vector4::from_fn(|i, _| {
        0.5 * (pauli(i) * m).trace().re
    })))
}

/// `Σ m_i σ_i`.
pub fn pauli_reconstruct(m: &PauliVector) -> Matrix2<C64> {
    (0..4).fold(Matrix2::zeros(), |acc, i| acc + pauli(i).scale(m.0[i]))
}
