//! Named invariants: loop traces, the three-qubit catalogue, flipped-pair and
//! link-determinant invariants, and tangle reconstruction.
//!
//! For a pure state of three qubits `a, b, c` (sites 0, 1, 2):
//!
//! | quantity | loop form | closed form |
//! |---|---|---|
//! | `I(ab)` | `tr S(a,b)S(b,a)` | `tr ρ_ab² = tr ρ_c²` |
//! | `I(abc)` | `tr S(a,c)S(c,b)S(b,a)` | Kempe invariant |
//! | `I(abab)` | `tr [S(a,b)S(b,a)]²` | symmetric in all three qubits |
//! | `I(~a~b)` | `tr S(a,b)ηS(b,a)η` | `tr ρ_ab ρ̃_ab = τ_ab + τ_abc/2` |
//! | `det S(a,b)` | | `-τ_ab(τ_ab + τ_abc)/16` |
//! | `I(~a~b~c)` | | identically zero |

use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::linkspace::{self, LoopSpec};
use crate::qstate::{self, DensityMatrix, GroupClass, PureState, C64};
use crate::tol;
use crate::{Error, Result};

/// Value of one loop invariant with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantReport {
    /// Canonical loop label, e.g. `I(012)` or `I(~0~1)`.
    pub label: String,
    pub value: f64,
    /// Polynomial degree in amplitudes and conjugates: two per link.
    pub degree: usize,
    pub invariance_class: GroupClass,
}

/// Pairwise tangles and the three-tangle of a pure three-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangleSet {
    pub tau_ab: f64,
    pub tau_bc: f64,
    pub tau_ca: f64,
    pub tau_abc: f64,
}

fn require_three(psi: &PureState) -> Result<()> {
    if psi.n_sites() != 3 {
        return Err(Error::Dimension {
            what: "operation needs a three-qubit state",
            found: psi.n_sites(),
        });
    }
    Ok(())
}

fn check_pair(pair: (usize, usize), n_sites: usize) -> Result<()> {
    let (x, y) = pair;
    for s in [x, y] {
        if s >= n_sites {
            return Err(Error::SiteOutOfRange { site: s, n_sites });
        }
    }
    if x == y {
        return Err(Error::DuplicateSite(x));
    }
    Ok(())
}

/// Trace of the loop product.
pub fn loop_invariant(state: &DensityMatrix, lp: &LoopSpec) -> Result<InvariantReport> {
    let value = linkspace::loop_transform(state, lp)?.trace();
    Ok(InvariantReport {
        label: lp.label(),
        value,
        degree: lp.degree(),
        invariance_class: if lp.is_all_flipped() {
            GroupClass::Sl2c
        } else {
            GroupClass::Su2
        },
    })
}

fn loop_value(state: &DensityMatrix, sites: &[usize], flipped: bool) -> Result<f64> {
    let lp = if flipped {
        LoopSpec::all_flipped(sites)?
    } else {
        LoopSpec::unflipped(sites)?
    };
    Ok(linkspace::loop_transform(state, &lp)?.trace())
}

fn trace_real(m: &DMatrix<C64>) -> f64 {
    m.trace().re
}

fn marginal(rho: &DensityMatrix, keep: &[usize]) -> Result<DMatrix<C64>> {
    Ok(qstate::partial_trace(rho, keep)?.into_matrix())
}

/// `(I2, I3, I4) = (tr ρ_c², tr ρ_b², tr ρ_a²)`.
pub fn purity_invariants(psi: &PureState) -> Result<(f64, f64, f64)> {
    require_three(psi)?;
    let rho = psi.density();
    let p = |s: usize| -> Result<f64> { Ok(qstate::partial_trace(&rho, &[s])?.purity()) };
    Ok((p(2)?, p(1)?, p(0)?))
}

/// Kempe invariant by explicit contraction
/// `(ρ_ab)_{ij',i'j} (ρ_bc)_{jk',j'k} (ρ_ca)_{ki',k'i}`.
pub fn kempe_index_form(psi: &PureState) -> Result<f64> {
    require_three(psi)?;
    let rho = psi.density();
    let ab = marginal(&rho, &[0, 1])?;
    let bc = marginal(&rho, &[1, 2])?;
    let ca = marginal(&rho, &[2, 0])?;
    let mut acc = C64::new(0.0, 0.0);
    for idx in 0..64usize {
        let bit = |p: usize| (idx >> p) & 1;
        let (i, j, k, ip, jp, kp) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        acc += ab[(2 * i + jp, 2 * ip + j)] * bc[(2 * j + kp, 2 * jp + k)] * ca[(2 * k + ip, 2 * kp + i)];
    }
    if !(acc.im.abs() <= tol::IMAGINARY_RESIDUE) {
        return Err(Error::Reality(acc.im));
    }
    Ok(acc.re)
}

/// `tr[(ρ_x ⊗ ρ_y) ρ_xy]`.
fn product_overlap(rho: &DensityMatrix, x: usize, y: usize) -> Result<f64> {
    let rx = marginal(rho, &[x])?;
    let ry = marginal(rho, &[y])?;
    let rxy = marginal(rho, &[x, y])?;
    Ok(trace_real(&(rx.kronecker(&ry) * rxy)))
}

fn trace_cube(m: &DMatrix<C64>) -> f64 {
    trace_real(&(m * m * m))
}

/// Kempe invariant as `3 tr[(ρ_x ⊗ ρ_y) ρ_xy] − tr ρ_x³ − tr ρ_y³`; the value
/// does not depend on the pair.
pub fn kempe_alternative(psi: &PureState, pair: (usize, usize)) -> Result<f64> {
    require_three(psi)?;
    check_pair(pair, 3)?;
    let (x, y) = pair;
    let rho = psi.density();
    let overlap = product_overlap(&rho, x, y)?;
    Ok(3.0 * overlap - trace_cube(&marginal(&rho, &[x])?) - trace_cube(&marginal(&rho, &[y])?))
}

fn epsilon(i: usize, j: usize) -> f64 {
    match (i, j) {
        (0, 1) => 1.0,
        (1, 0) => -1.0,
        _ => 0.0,
    }
}

/// `I6 = |ε_{i1i2} ε_{i3i4} ε_{j1j2} ε_{j3j4} ε_{k1k3} ε_{k2k4} a_{i1j1k1} a_{i2j2k2} a_{i3j3k3} a_{i4j4k4}|²`,
/// equal to `τ_abc²/4`.
pub fn three_tangle_i6(psi: &PureState) -> Result<f64> {
    require_three(psi)?;
    let a = psi.amplitudes();
    let amp = |i: usize, j: usize, k: usize| a[4 * i + 2 * j + k];
    let mut acc = C64::new(0.0, 0.0);
    // Only ε with distinct indices survive, so the partner index is fixed.
    for idx in 0..64usize {
        let bit = |p: usize| (idx >> p) & 1;
        let (i1, i3, j1, j3, k1, k2) = (bit(0), bit(1), bit(2), bit(3), bit(4), bit(5));
        let (i2, i4, j2, j4, k3, k4) = (1 - i1, 1 - i3, 1 - j1, 1 - j3, 1 - k1, 1 - k2);
        let sign = epsilon(i1, i2) * epsilon(i3, i4) * epsilon(j1, j2) * epsilon(j3, j4) * epsilon(k1, k3) * epsilon(k2, k4);
        acc += amp(i1, j1, k1) * amp(i2, j2, k2) * amp(i3, j3, k3) * amp(i4, j4, k4) * sign;
    }
    Ok(acc.norm_sqr())
}

/// `I(~x~y)`, the fully flipped two-site loop.
pub fn flipped_pair_invariant(state: &DensityMatrix, pair: (usize, usize)) -> Result<f64> {
    check_pair(pair, state.n_sites())?;
    loop_value(state, &[pair.0, pair.1], true)
}

/// `tr(ρ_xy ρ̃_xy)`, the closed form of [`flipped_pair_invariant`].
pub fn flipped_pair_overlap(state: &DensityMatrix, pair: (usize, usize)) -> Result<f64> {
    check_pair(pair, state.n_sites())?;
    let rxy = marginal(state, &[pair.0, pair.1])?;
    let flipped = linkspace::spin_flip_pair(&rxy)?;
    Ok(trace_real(&(rxy * flipped)))
}

/// `det S(x, y)`.
pub fn det_link_invariant(state: &DensityMatrix, pair: (usize, usize)) -> Result<f64> {
    check_pair(pair, state.n_sites())?;
    Ok(linkspace::link_between(state, pair.0, pair.1)?.determinant())
}

const TANGLE_GUARD: f64 = 1e-8;

fn clamp_tangle(t: f64) -> Result<f64> {
    if t < -TANGLE_GUARD {
        return Err(Error::NegativeTangle(t));
    }
    Ok(t.clamp(0.0, 1.0))
}

/// Three-tangle from pair `(x, y)`: `2 √(16 det S(x,y) + I(~x~y)²)`.
pub fn three_tangle_from_pair(psi: &PureState, pair: (usize, usize)) -> Result<f64> {
    require_three(psi)?;
    let rho = psi.density();
    let flipped = flipped_pair_invariant(&rho, pair)?;
    let det = det_link_invariant(&rho, pair)?;
    let radicand = 16.0 * det + flipped * flipped;
    if radicand < -TANGLE_GUARD {
        return Err(Error::NegativeRadicand(radicand));
    }
    Ok(2.0 * libm::sqrt(radicand.max(0.0)))
}

/// Tangles from flipped-pair and link-determinant invariants:
/// `τ_abc` from pair `(a, b)` and `τ_xy = I(~x~y) − τ_abc/2`.
pub fn reconstruct_tangles(psi: &PureState) -> Result<TangleSet> {
    let tau_abc = three_tangle_from_pair(psi, (0, 1))?;
    let rho = psi.density();
    let pair = |x, y| -> Result<f64> { clamp_tangle(flipped_pair_invariant(&rho, (x, y))? - 0.5 * tau_abc) };
    Ok(TangleSet {
        tau_ab: pair(0, 1)?,
        tau_bc: pair(1, 2)?,
        tau_ca: pair(2, 0)?,
        tau_abc: clamp_tangle(tau_abc)?,
    })
}

/// Wootters tangle (squared concurrence) of a two-qubit state, used as an
/// independent check on [`reconstruct_tangles`].
///
/// The `λ_i` are taken as square roots of the eigenvalues of the Hermitian
/// matrix `√ρ ρ̃ √ρ`, which shares its spectrum with `ρ ρ̃`. Eigenvalues below
/// `1e-14·λ_max²` are rounding noise of exactly zero values (rank-deficient
/// states) and are set to zero before the square root.
pub fn wootters_tangle_oracle(rho_xy: &DensityMatrix) -> Result<f64> {
    if rho_xy.n_sites() != 2 {
        return Err(Error::Dimension {
            what: "concurrence needs a two-site state",
            found: rho_xy.n_sites(),
        });
    }
    let m = rho_xy.matrix();
    let eig = SymmetricEigen::new(m.clone());
    let sqrt_diag = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(libm::sqrt(l.max(0.0)), 0.0)));
    let root = &eig.eigenvectors * sqrt_diag * eig.eigenvectors.adjoint();
    let flipped = linkspace::spin_flip_pair(m)?;
    let h = &root * flipped * &root;
    let h = (&h + h.adjoint()).unscale(2.0);
    let mut mu: Vec<f64> = qstate::hermitian_eigenvalues(&h);
    let top = mu.iter().copied().fold(0.0, f64::max);
    let floor = 1e-14 * top;
    for v in mu.iter_mut() {
        *v = if *v <= floor { 0.0 } else { libm::sqrt(*v) };
    }
    mu.sort_by(|a, b| b.total_cmp(a));
    let concurrence = (mu[0] - mu[1] - mu[2] - mu[3]).max(0.0);
    Ok(concurrence * concurrence)
}

/// `(I(~a~b~c), 1 − Σ tr ρ_x² + ⅔ Σ tr ρ_x³)`; both vanish for pure states.
pub fn flipped_kempe_identity(psi: &PureState) -> Result<(f64, f64)> {
    require_three(psi)?;
    let rho = psi.density();
    let lhs = loop_value(&rho, &[0, 1, 2], true)?;
    let mut rhs = 1.0;
    for s in 0..3 {
        let r = marginal(&rho, &[s])?;
        rhs += -trace_real(&(&r * &r)) + 2.0 / 3.0 * trace_cube(&r);
    }
    Ok((lhs, rhs))
}

/// `1 − Σ tr ρ_x² + Σ tr[(ρ_x ⊗ ρ_y) ρ_xy] − I5`, the direct expansion of
/// `I(~a~b~c)` before the Kempe rewriting.
pub fn flipped_kempe_expansion(psi: &PureState) -> Result<f64> {
    require_three(psi)?;
    let rho = psi.density();
    let mut value = 1.0;
    for s in 0..3 {
        value -= qstate::partial_trace(&rho, &[s])?.purity();
    }
    for (x, y) in [(0, 1), (1, 2), (0, 2)] {
        value += product_overlap(&rho, x, y)?;
    }
    Ok(value - kempe_index_form(psi)?)
}

/// Every named quantity for a pure three-qubit state.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeQubitCatalogue {
    /// `Σ |a_ijk|²`.
    pub norm: f64,
    pub i2: f64,
    pub i3: f64,
    pub i4: f64,
    pub kempe_loop: f64,
    pub kempe_index: f64,
    /// Pairs (a,b), (b,c), (a,c).
    pub kempe_alternatives: [f64; 3],
    /// `I(abab)`, `I(bcbc)`, `I(caca)`.
    pub double_loops: [f64; 3],
    pub i6: f64,
    /// `I(~a~b)`, `I(~b~c)`, `I(~c~a)`.
    pub flipped_pairs: [f64; 3],
    /// `I(~a~b~a~b)`; reported only.
    pub flipped_double_loop: f64,
    /// `det S(a,b)`, `det S(b,c)`, `det S(c,a)`.
    pub link_determinants: [f64; 3],
    pub tangles: TangleSet,
    /// `I(~a~b~c)` and its trace-power expansion.
    pub flipped_kempe: (f64, f64),
}

pub fn three_qubit_catalogue(psi: &PureState) -> Result<ThreeQubitCatalogue> {
    require_three(psi)?;
    let rho = psi.density();
    let (i2, i3, i4) = purity_invariants(psi)?;
    let pairs = [(0, 1), (1, 2), (2, 0)];
    let mut double_loops = [0.0; 3];
    let mut flipped_pairs = [0.0; 3];
    let mut link_determinants = [0.0; 3];
    for (n, &(x, y)) in pairs.iter().enumerate() {
        double_loops[n] = loop_value(&rho, &[x, y, x, y], false)?;
        flipped_pairs[n] = flipped_pair_invariant(&rho, (x, y))?;
        link_determinants[n] = det_link_invariant(&rho, (x, y))?;
    }
    Ok(ThreeQubitCatalogue {
        norm: psi.amplitudes().norm_squared(),
        i2,
        i3,
        i4,
        kempe_loop: loop_value(&rho, &[0, 1, 2], false)?,
        kempe_index: kempe_index_form(psi)?,
        kempe_alternatives: [
            kempe_alternative(psi, (0, 1))?,
            kempe_alternative(psi, (1, 2))?,
            kempe_alternative(psi, (0, 2))?,
        ],
        double_loops,
        i6: three_tangle_i6(psi)?,
        flipped_pairs,
        flipped_double_loop: loop_value(&rho, &[0, 1, 0, 1], true)?,
        link_determinants,
        tangles: reconstruct_tangles(psi)?,
        flipped_kempe: flipped_kempe_identity(psi)?,
    })
}
