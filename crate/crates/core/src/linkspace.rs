//! Link matrices, adjoint representations and loop products.
//!
//! For a two-site state `ρ_ab` the link matrix from `a` to `b` is
//! `S(b,a)_{ji} = ½ tr[(σ_i ⊗ σ_j) ρ_ab]`. It sends the Pauli vector of an
//! operator `M_a` to that of `tr_a[(M_a ⊗ I) ρ_ab]`. A local operation `𝒰` on a
//! site acts on link matrices through its adjoint image
//! `U_{jk} = ½ tr(𝒰† σ_j 𝒰 σ_k)`: `S(b,a) → U(b) S(b,a) U(a)ᵀ`.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4, Vector4};

use crate::qstate::{self, pauli, DensityMatrix, GroupClass, LocalOperation, C64};
use crate::tol;
use crate::{Error, Result};

/// `η = diag(1, -1, -1, -1)`, the Pauli-vector image of the spin flip
/// `M ↦ σ_2 Mᵀ σ_2`.
pub fn minkowski_eta() -> Matrix4<f64> {
    Matrix4::from_diagonal(&Vector4::new(1.0, -1.0, -1.0, -1.0))
}

/// `½ tr[(σ_i ⊗ σ_j) m]` for a 4×4 matrix whose first tensor factor carries `σ_i`.
fn pauli_pair_expectation(m: &DMatrix<C64>, i: usize, j: usize) -> C64 {
    let (si, sj) = (pauli(i), pauli(j));
    let mut acc = C64::new(0.0, 0.0);
    for r in 0..4 {
        for c in 0..4 {
            let op = si[(r >> 1, c >> 1)] * sj[(r & 1, c & 1)];
            if op.re != 0.0 || op.im != 0.0 {
                acc += op * m[(c, r)];
            }
        }
    }
    acc * 0.5
}

/// Correlation matrix `s[j][i] = ½ tr[(σ_i ⊗ σ_j) m]` of any Hermitian 4×4
/// matrix, normalized or not. Tensor factors are ordered (from, to).
pub fn correlation_matrix(m: &DMatrix<C64>) -> Result<Matrix4<f64>> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::Dimension {
            what: "link matrix needs a two-site (4x4) state",
            found: m.nrows(),
        });
    }
    let mut s = Matrix4::zeros();
    let mut residue = 0.0f64;
    for j in 0..4 {
        for i in 0..4 {
            let v = pauli_pair_expectation(m, i, j);
            residue = residue.max(v.im.abs());
            s[(j, i)] = v.re;
        }
    }
    if !(residue <= tol::IMAGINARY_RESIDUE) {
        return Err(Error::Reality(residue));
    }
    Ok(s)
}

/// Real 4×4 link matrix `S(to, from)` with its endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkMatrix {
    s: Matrix4<f64>,
    from_site: usize,
    to_site: usize,
}

impl LinkMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.s
    }

    pub fn from_site(&self) -> usize {
        self.from_site
    }

    pub fn to_site(&self) -> usize {
        self.to_site
    }

    /// The link in the opposite direction, `S(from, to) = S(to, from)ᵀ`.
    pub fn reversed(&self) -> Self {
        Self {
            s: self.s.transpose(),
            from_site: self.to_site,
            to_site: self.from_site,
        }
    }

    pub fn determinant(&self) -> f64 {
        self.s.determinant()
    }

    /// Pauli vector of `tr_from[(M ⊗ I) ρ]`.
    pub fn transport(&self, m: &qstate::PauliVector) -> qstate::PauliVector {
        qstate::PauliVector(self.s * m.0)
    }
}

/// Link matrix of a two-site state whose tensor factors are ordered
/// (`from_site`, `to_site`). The site labels are recorded, not interpreted.
pub fn link_matrix(rho_ab: &DensityMatrix, from_site: usize, to_site: usize) -> Result<LinkMatrix> {
    if rho_ab.n_sites() != 2 {
        return Err(Error::Dimension {
            what: "link matrix needs a two-site state",
            found: rho_ab.n_sites(),
        });
    }
    Ok(LinkMatrix {
        s: correlation_matrix(rho_ab.matrix())?,
        from_site,
        to_site,
    })
}

/// `S(to, from)` of a multi-site state, via the reduced state on (from, to).
pub fn link_between(state: &DensityMatrix, from_site: usize, to_site: usize) -> Result<LinkMatrix> {
    let pair = qstate::partial_trace(state, &[from_site, to_site])?;
    link_matrix(&pair, from_site, to_site)
}

/// Adjoint image of a local operation acting on Pauli vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointMatrix {
    u: Matrix4<f64>,
    class: GroupClass,
}

impl AdjointMatrix {
    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.u
    }

    pub fn class(&self) -> GroupClass {
        self.class
    }

    /// Spatial 3×3 block; a rotation for `SU2` operations.
    pub fn rotation_block(&self) -> Matrix3<f64> {
        self.u.fixed_view::<3, 3>(1, 1).into_owned()
    }
}

/// `U_{jk} = ½ tr(𝒰† σ_j 𝒰 σ_k)` of a raw 2×2 matrix.
pub fn adjoint_of(m: &Matrix2<C64>) -> Matrix4<f64> {
    let conj: [Matrix2<C64>; 4] = core::array::from_fn(|j| m.adjoint() * pauli(j) * m);
    Matrix4::from_fn(|j, k| 0.5 * (conj[j] * pauli(k)).trace().re)
}

fn max_abs(m: impl IntoIterator<Item = f64>) -> f64 {
    m.into_iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Residual of the class constraint on an adjoint matrix: block form with an
/// `SO(3)` block for `SU2`, `UηUᵀ = η` with `u00 ≥ 1` for `SL2C`.
fn class_residual(u: &Matrix4<f64>, class: GroupClass) -> f64 {
    match class {
        GroupClass::Su2 => {
            let border = max_abs([
                u[(0, 0)] - 1.0,
                u[(0, 1)],
                u[(0, 2)],
                u[(0, 3)],
                u[(1, 0)],
                u[(2, 0)],
                u[(3, 0)],
            ]);
            let r: Matrix3<f64> = u.fixed_view::<3, 3>(1, 1).into_owned();
            let orth = max_abs((r.transpose() * r - Matrix3::identity()).iter().copied());
            border.max(orth).max((r.determinant() - 1.0).abs())
        }
        GroupClass::Sl2c => {
            let eta = minkowski_eta();
            let lorentz = max_abs((u * eta * u.transpose() - eta).iter().copied());
            lorentz.max(1.0 - u[(0, 0)])
        }
    }
}

/// Adjoint representation of `op`, checked against its class.
pub fn adjoint_representation(op: &LocalOperation) -> Result<AdjointMatrix> {
    let u = adjoint_of(op.matrix());
    let class = op.class();
    let bound = match class {
        GroupClass::Su2 => tol::IDENTITY,
        GroupClass::Sl2c => tol::STRUCTURE,
    };
    let residual = class_residual(&u, class);
    if !(residual <= bound) {
        return Err(Error::Class { class, residual });
    }
    Ok(AdjointMatrix { u, class })
}

/// One site of a closed path; `flipped` inserts `η` when leaving the site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoopStep {
    pub site: usize,
    pub flipped: bool,
}

impl LoopStep {
    pub fn new(site: usize, flipped: bool) -> Self {
        Self { site, flipped }
    }
}

/// Closed path over sites. The closing link from the last site back to the
/// first is implicit, so `[a, b, c]` denotes `a → b → c → a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LoopSpec {
    steps: Vec<LoopStep>,
}

impl LoopSpec {
    pub fn new(steps: Vec<LoopStep>) -> Result<Self> {
        if steps.len() < 2 {
            return Err(Error::Loop("a loop needs at least two steps"));
        }
        let n = steps.len();
        if (0..n).any(|k| steps[k].site == steps[(k + 1) % n].site) {
            return Err(Error::Loop("consecutive sites must differ (including last to first)"));
        }
        Ok(Self { steps })
    }

    pub fn unflipped(sites: &[usize]) -> Result<Self> {
        Self::new(sites.iter().map(|&s| LoopStep::new(s, false)).collect())
    }

    pub fn all_flipped(sites: &[usize]) -> Result<Self> {
        Self::new(sites.iter().map(|&s| LoopStep::new(s, true)).collect())
    }

    pub fn steps(&self) -> &[LoopStep] {
        &self.steps
    }

    /// Number of links, equal to the number of steps.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.steps.iter().map(|s| s.site)
    }

    pub fn max_site(&self) -> usize {
        self.sites().max().unwrap_or(0)
    }

    pub fn is_all_flipped(&self) -> bool {
        self.steps.iter().all(|s| s.flipped)
    }

    /// Polynomial degree of the loop trace in amplitudes and conjugates.
    pub fn degree(&self) -> usize {
        2 * self.len()
    }

    /// Rotation starting at the lexicographically smallest step sequence.
    /// Rotations of a loop share the same trace.
    pub fn canonical(&self) -> LoopSpec {
        let n = self.steps.len();
        let rotation = |r: usize| -> Vec<LoopStep> { (0..n).map(|k| self.steps[(r + k) % n]).collect() };
        let best = (0..n).map(rotation).min().unwrap_or_default();
        LoopSpec { steps: best }
    }

    /// Canonical label with numeric sites, e.g. `I(0~12)`. Sites are
    /// comma-separated once any index exceeds one digit.
    pub fn label(&self) -> String {
        let canon = self.canonical();
        let sep = if canon.max_site() > 9 { "," } else { "" };
        let body: Vec<String> = canon
            .steps
            .iter()
            .map(|s| format!("{}{}", if s.flipped { "~" } else { "" }, s.site))
            .collect();
        format!("I({})", body.join(sep))
    }

    /// Canonical label with letter sites, e.g. `I(~a~b~c)`; falls back to
    /// [`LoopSpec::label`] beyond 26 sites.
    pub fn letter_label(&self) -> String {
        let canon = self.canonical();
        if canon.max_site() >= 26 {
            return self.label();
        }
        let body: String = canon
            .steps
            .iter()
            .map(|s| format!("{}{}", if s.flipped { "~" } else { "" }, (b'a' + s.site as u8) as char))
            .collect();
        format!("I({body})")
    }
}

impl fmt::Display for LoopSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Loop product for a raw (possibly unnormalized) matrix on `n_sites` qubits.
pub fn loop_transform_matrix(m: &DMatrix<C64>, n_sites: usize, lp: &LoopSpec) -> Result<Matrix4<f64>> {
    if let Some(bad) = lp.sites().find(|&s| s >= n_sites) {
        return Err(Error::SiteOutOfRange { site: bad, n_sites });
    }
    let eta = minkowski_eta();
    let n = lp.steps.len();
    let mut cache: Vec<((usize, usize), Matrix4<f64>)> = Vec::with_capacity(n);
    let mut total = Matrix4::identity();
    for k in 0..n {
        let from = lp.steps[k];
        let to = lp.steps[(k + 1) % n].site;
        let link = match cache.iter().find(|(key, _)| *key == (from.site, to)) {
            Some((_, s)) => *s,
            None => {
                let pair = qstate::partial_trace_matrix(m, n_sites, &[from.site, to])?;
                let s = correlation_matrix(&pair)?;
                cache.push(((from.site, to), s));
                s
            }
        };
        total = if from.flipped {
            link * eta * total
        } else {
            link * total
        };
    }
    Ok(total)
}

/// `S(s0, s_{n-1}) ⋯ S(s2, s1) S(s1, s0)` with `η` inserted to the right of the
/// link leaving every flipped site.
pub fn loop_transform(state: &DensityMatrix, lp: &LoopSpec) -> Result<Matrix4<f64>> {
    loop_transform_matrix(state.matrix(), state.n_sites(), lp)
}

/// `(σ_2 ⊗ σ_2) m* (σ_2 ⊗ σ_2)` for a 4×4 matrix.
pub fn spin_flip_pair(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    if m.nrows() != 4 || m.ncols() != 4 {
        return Err(Error::Dimension {
            what: "spin flip needs a two-site (4x4) state",
            found: m.nrows(),
        });
    }
    let y = pauli(2).kronecker(&pauli(2));
    let y = DMatrix::from_column_slice(4, 4, y.as_slice());
    Ok(&y * m.conjugate() * &y)
}

/// Spin-flipped two-site state `ρ̃ = (σ_2 ⊗ σ_2) ρᵀ (σ_2 ⊗ σ_2)`.
pub fn flip_two_qubit(rho_ab: &DensityMatrix) -> Result<DensityMatrix> {
    if rho_ab.n_sites() != 2 {
        return Err(Error::Dimension {
            what: "spin flip needs a two-site state",
            found: rho_ab.n_sites(),
        });
    }
    Ok(DensityMatrix::from_valid(2, spin_flip_pair(rho_ab.matrix())?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{sample_sl2c, sample_su2, PureState};
    use crate::rng;
    use alloc::vec;
    use num_complex::Complex;

    fn c(re: f64, im: f64) -> C64 {
        Complex::new(re, im)
    }

    fn max_diff4(a: &Matrix4<f64>, b: &Matrix4<f64>) -> f64 {
        (a - b).iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn with_entries(entries: &[((usize, usize), f64)]) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        for &((r, col), v) in entries {
            m[(r, col)] = v;
        }
        m
    }

    #[test]
    fn link_of_product_projector() {
        let rho = PureState::basis(2, 0).unwrap().density();
        let s = link_matrix(&rho, 0, 1).unwrap();
        let expected = with_entries(&[((0, 0), 0.5), ((0, 3), 0.5), ((3, 0), 0.5), ((3, 3), 0.5)]);
        assert!(max_diff4(s.matrix(), &expected) < 1e-15);
        assert_eq!((s.from_site(), s.to_site()), (0, 1));
    }

    #[test]
    fn link_of_ghz_pair_and_maximally_mixed() {
        let ghz = PureState::ghz(3).unwrap().density();
        let s = link_between(&ghz, 0, 1).unwrap();
        let expected = with_entries(&[((0, 0), 0.5), ((3, 3), 0.5)]);
        assert!(max_diff4(s.matrix(), &expected) < 1e-15);

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let s = link_matrix(&mixed, 0, 1).unwrap();
        assert!(max_diff4(s.matrix(), &with_entries(&[((0, 0), 0.5)])) < 1e-15);
    }

    #[test]
    fn link_requires_two_sites() {
        let rho = PureState::ghz(3).unwrap().density();
        assert!(matches!(link_matrix(&rho, 0, 1), Err(Error::Dimension { .. })));
    }

    #[test]
    fn non_hermitian_input_fails_reality_check() {
        let mut m = DMatrix::<C64>::zeros(4, 4);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(correlation_matrix(&m), Err(Error::Reality(_))));
    }

    #[test]
    fn adjoint_examples() {
        let id = adjoint_representation(&LocalOperation::identity(0)).unwrap();
        assert_eq!(*id.matrix(), Matrix4::identity());

        // exp(-iπσ1/2) = -iσ1: rotation by π about x.
        let z = c(0.0, 0.0);
        let rx = LocalOperation::new(0, Matrix2::new(z, c(0.0, -1.0), c(0.0, -1.0), z), GroupClass::Su2).unwrap();
        let u = adjoint_representation(&rx).unwrap();
        let expected = Matrix4::from_diagonal(&Vector4::new(1.0, 1.0, -1.0, -1.0));
        assert!(max_diff4(u.matrix(), &expected) < 1e-15);

        let t: f64 = 1.7;
        let boost = LocalOperation::new(0, Matrix2::new(c(t, 0.0), z, z, c(1.0 / t, 0.0)), GroupClass::Sl2c).unwrap();
        let u = adjoint_representation(&boost).unwrap();
        assert!((u.matrix()[(0, 0)] - (t * t + 1.0 / (t * t)) / 2.0).abs() < 1e-14);
        assert!(u.matrix()[(0, 0)] > 1.0);
        let eta = minkowski_eta();
        assert!(max_diff4(&(u.matrix() * eta * u.matrix().transpose()), &eta) < 1e-10);
    }

    #[test]
    fn sampled_operations_satisfy_class_constraints() {
        let mut r = rng::seeded(4);
        for _ in 0..200 {
            let u = adjoint_representation(&sample_su2(0, &mut r)).unwrap();
            let rot = u.rotation_block();
            assert!((rot.determinant() - 1.0).abs() < 1e-10);
            let v = sample_sl2c(0, &mut r, 10.0).unwrap();
            let a = adjoint_representation(&v).unwrap();
            let eta = minkowski_eta();
            assert!(max_diff4(&(a.matrix() * eta * a.matrix().transpose()), &eta) < 1e-9);
        }
    }

    #[test]
    fn eta_examples() {
        let eta = minkowski_eta();
        assert_eq!(eta * eta, Matrix4::identity());
        assert_eq!(eta.trace(), -2.0);
        assert_eq!(eta * Vector4::new(1.0, 0.2, -0.3, 0.5), Vector4::new(1.0, -0.2, 0.3, -0.5));
    }

    #[test]
    fn loop_spec_validation() {
        assert!(LoopSpec::unflipped(&[0]).is_err());
        assert!(LoopSpec::unflipped(&[0, 0, 1]).is_err());
        assert!(LoopSpec::unflipped(&[0, 1, 0]).is_err());
        assert!(LoopSpec::unflipped(&[0, 1, 0, 1]).is_ok());
    }

    #[test]
    fn labels_are_canonical_rotations() {
        let a = LoopSpec::unflipped(&[1, 2, 0]).unwrap();
        assert_eq!(a.label(), "I(012)");
        assert_eq!(a.letter_label(), "I(abc)");
        let b = LoopSpec::new(vec![LoopStep::new(2, false), LoopStep::new(0, true), LoopStep::new(1, false)]).unwrap();
        assert_eq!(b.label(), "I(~012)");
        assert_eq!(LoopSpec::all_flipped(&[0, 1]).unwrap().letter_label(), "I(~a~b)");
        assert_eq!(LoopSpec::unflipped(&[3, 12]).unwrap().label(), "I(3,12)");
        assert_eq!(LoopSpec::unflipped(&[1, 0, 1, 0]).unwrap().label(), "I(0101)");
    }

    #[test]
    fn loop_traces_on_reference_states() {
        let ab = LoopSpec::unflipped(&[0, 1]).unwrap();
        let prod = PureState::basis(3, 0).unwrap().density();
        assert!((loop_transform(&prod, &ab).unwrap().trace() - 1.0).abs() < 1e-14);
        let ghz = PureState::ghz(3).unwrap().density();
        assert!((loop_transform(&ghz, &ab).unwrap().trace() - 0.5).abs() < 1e-14);

        let flipped = LoopSpec::all_flipped(&[0, 1, 2]).unwrap();
        let mut r = rng::seeded(8);
        for _ in 0..50 {
            let psi = PureState::haar(3, &mut r).unwrap().density();
            assert!(loop_transform(&psi, &flipped).unwrap().trace().abs() < 1e-10);
        }
    }

    #[test]
    fn flip_placement_matches_printed_forms() {
        let mut r = rng::seeded(9);
        let rho = PureState::haar(3, &mut r).unwrap().density();
        let s = |to, from| *link_between(&rho, from, to).unwrap().matrix();
        let eta = minkowski_eta();
        // I(a~bc) = tr{S(a,c) S(c,b) η S(b,a)}
        let lp = LoopSpec::new(vec![LoopStep::new(0, false), LoopStep::new(1, true), LoopStep::new(2, false)]).unwrap();
        let expected = s(0, 2) * s(2, 1) * eta * s(1, 0);
        assert!(max_diff4(&loop_transform(&rho, &lp).unwrap(), &expected) < 1e-14);
        // S(~a,~a) = S(a,c) η S(c,b) η S(b,a) η
        let lp = LoopSpec::all_flipped(&[0, 1, 2]).unwrap();
        let expected = s(0, 2) * eta * s(2, 1) * eta * s(1, 0) * eta;
        assert!(max_diff4(&loop_transform(&rho, &lp).unwrap(), &expected) < 1e-14);
    }

    #[test]
    fn loop_rejects_out_of_range_sites() {
        let rho = PureState::ghz(3).unwrap().density();
        let lp = LoopSpec::unflipped(&[0, 3]).unwrap();
        assert_eq!(
            loop_transform(&rho, &lp).unwrap_err(),
            Error::SiteOutOfRange { site: 3, n_sites: 3 }
        );
    }

    #[test]
    fn spin_flip_examples() {
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let f = flip_two_qubit(&mixed).unwrap();
        assert!((f.matrix() - mixed.matrix()).iter().all(|z| z.norm() < 1e-15));

        let a = core::f64::consts::FRAC_1_SQRT_2;
        let singlet = PureState::from_slice(&[c(0.0, 0.0), c(a, 0.0), c(-a, 0.0), c(0.0, 0.0)]).unwrap().density();
        let f = flip_two_qubit(&singlet).unwrap();
        assert!((f.matrix() - singlet.matrix()).iter().all(|z| z.norm() < 1e-15));

        let zero = PureState::basis(2, 0).unwrap().density();
        let f = flip_two_qubit(&zero).unwrap();
        let one = PureState::basis(2, 3).unwrap().density();
        assert!((f.matrix() - one.matrix()).iter().all(|z| z.norm() < 1e-15));

        let three = PureState::ghz(3).unwrap().density();
        assert!(flip_two_qubit(&three).is_err());
    }
}
