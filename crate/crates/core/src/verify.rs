//! Numerical certification: invariance suites, closed-form identities,
//! finite-difference independence and the Monte Carlo average-fidelity
//! estimator.
//!
//! Every trial `t` of a suite draws from its own stream
//! [`rng::trial_stream`]`(seed, t)`, so reports are reproducible bit for bit
//! and independent of evaluation order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2, Matrix4, Vector4};
use num_complex::Complex;
use rand_core::RngCore;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::invariants;
use crate::linkspace::{self, LoopSpec};
use crate::qstate::{self, apply_local, DensityMatrix, LocalOperation, PureState, C64};
use crate::rng;
use crate::tol;
use crate::{Error, Result};

/// Family of states a suite draws from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ensemble {
    HaarPure { n_sites: usize },
    Mixed { n_sites: usize, rank: usize },
}

impl Ensemble {
    pub fn n_sites(&self) -> usize {
        match *self {
            Ensemble::HaarPure { n_sites } | Ensemble::Mixed { n_sites, .. } => n_sites,
        }
    }

    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<DensityMatrix> {
        match *self {
            Ensemble::HaarPure { n_sites } => Ok(PureState::haar(n_sites, rng)?.density()),
            Ensemble::Mixed { n_sites, rank } => DensityMatrix::random(n_sites, rank, rng),
        }
    }
}

/// Number of states, operation draws per state, seed and pass threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub n_states: usize,
    pub n_ops: usize,
    pub seed: u64,
    pub tolerance: f64,
}

/// Worst residual of one quantity over a suite.
#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceResult {
    pub label: String,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl InvarianceResult {
    pub fn new(label: String, trials: usize, max_residual: f64, tolerance: f64) -> Self {
        Self {
            label,
            trials,
            max_residual,
            tolerance,
            passed: max_residual <= tolerance,
        }
    }
}

/// NaN-propagating running maximum.
fn worst(acc: f64, x: f64) -> f64 {
    if x.is_nan() || acc.is_nan() {
        f64::NAN
    } else {
        acc.max(x)
    }
}

/// `|I(ρ) − I((⊗𝒰)ρ(⊗𝒰)†)|` for one set of operations.
pub fn su2_residual(state: &DensityMatrix, lp: &LoopSpec, ops: &[LocalOperation]) -> Result<f64> {
    let before = linkspace::loop_transform(state, lp)?.trace();
    let after = apply_local(state, ops)?.state;
    Ok((before - linkspace::loop_transform(&after, lp)?.trace()).abs())
}

/// Local unitary invariance of each loop: every site of every sampled state
/// receives an independent Haar SU(2) element, `n_ops` times per state.
pub fn check_su2_invariance(loops: &[LoopSpec], ensemble: Ensemble, plan: TrialPlan) -> Result<Vec<InvarianceResult>> {
    let n = ensemble.n_sites();
    if let Some(lp) = loops.iter().find(|lp| lp.max_site() >= n) {
        return Err(Error::SiteOutOfRange {
            site: lp.max_site(),
            n_sites: n,
        });
    }
    let mut maxima = alloc::vec![0.0f64; loops.len()];
    for t in 0..plan.n_states {
        let mut r = rng::trial_stream(plan.seed, t as u64);
        let state = ensemble.sample(&mut r)?;
        let before: Vec<f64> = loops
            .iter()
            .map(|lp| Ok(linkspace::loop_transform(&state, lp)?.trace()))
            .collect::<Result<_>>()?;
        for _ in 0..plan.n_ops {
            let ops: Vec<LocalOperation> = (0..n).map(|s| qstate::sample_su2(s, &mut r)).collect();
            let after = apply_local(&state, &ops)?.state;
            for (k, lp) in loops.iter().enumerate() {
                let v = linkspace::loop_transform(&after, lp)?.trace();
                maxima[k] = worst(maxima[k], (before[k] - v).abs());
            }
        }
    }
    Ok(loops
        .iter()
        .zip(maxima)
        .map(|(lp, m)| InvarianceResult::new(lp.label(), plan.n_states * plan.n_ops, m, plan.tolerance))
        .collect())
}

/// Quantities expected to be invariant under local `SL(2,C)` on their sites.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SlQuantity {
    Loop(LoopSpec),
    /// `det S(x, y)`.
    LinkDeterminant(usize, usize),
}

impl SlQuantity {
    pub fn label(&self) -> String {
        match self {
            SlQuantity::Loop(lp) => lp.label(),
            SlQuantity::LinkDeterminant(x, y) => format!("det S({x},{y})"),
        }
    }

    /// Polynomial degree in amplitudes and conjugates.
    pub fn degree(&self) -> usize {
        match self {
            SlQuantity::Loop(lp) => lp.degree(),
            SlQuantity::LinkDeterminant(..) => 8,
        }
    }

    fn sites(&self) -> Vec<usize> {
        let mut s: Vec<usize> = match self {
            SlQuantity::Loop(lp) => lp.sites().collect(),
            SlQuantity::LinkDeterminant(x, y) => alloc::vec![*x, *y],
        };
        s.sort_unstable();
        s.dedup();
        s
    }

    fn max_site(&self) -> usize {
        self.sites().into_iter().max().unwrap_or(0)
    }

    pub fn evaluate(&self, state: &DensityMatrix) -> Result<f64> {
        match self {
            SlQuantity::Loop(lp) => Ok(linkspace::loop_transform(state, lp)?.trace()),
            SlQuantity::LinkDeterminant(x, y) => invariants::det_link_invariant(state, (*x, *y)),
        }
    }

    fn is_sl2c_invariant(&self) -> bool {
        match self {
            SlQuantity::Loop(lp) => lp.is_all_flipped(),
            SlQuantity::LinkDeterminant(..) => true,
        }
    }
}

/// `|Q(ρ) − f^{d/2} Q(ρ')|` where `ρ'` is the renormalized transformed state,
/// `f` the discarded trace and `d` the degree of `Q`.
fn compensated_residual(q: &SlQuantity, before: f64, after: &DensityMatrix, trace_factor: f64) -> Result<f64> {
    let scale = libm::pow(trace_factor, (q.degree() / 2) as f64);
    Ok((before - scale * q.evaluate(after)?).abs())
}

/// Residual of `q` under `ops`, with the renormalization compensated.
pub fn sl2c_residual(state: &DensityMatrix, q: &SlQuantity, ops: &[LocalOperation]) -> Result<f64> {
    let before = q.evaluate(state)?;
    let out = apply_local(state, ops)?;
    compensated_residual(q, before, &out.state, out.trace_factor)
}

/// Condition-capped `SL(2,C)` on the quantity's sites, Haar SU(2) elsewhere.
fn sl2c_ops<R: RngCore + ?Sized>(q: &SlQuantity, n_sites: usize, rng: &mut R) -> Result<Vec<LocalOperation>> {
    let sites = q.sites();
    (0..n_sites)
        .map(|s| {
            if sites.contains(&s) {
                qstate::sample_sl2c(s, rng, qstate::DEFAULT_MAX_CONDITION)
            } else {
                Ok(qstate::sample_su2(s, rng))
            }
        })
        .collect()
}

fn check_sites_fit(quantities: &[SlQuantity], n_sites: usize) -> Result<()> {
    match quantities.iter().find(|q| q.max_site() >= n_sites) {
        Some(q) => Err(Error::SiteOutOfRange {
            site: q.max_site(),
            n_sites,
        }),
        None => Ok(()),
    }
}

/// Local `SL(2,C)` invariance of all-flipped loops and link determinants.
///
/// Each quantity is tested with `SL(2,C)` elements (unit determinant,
/// singular-value ratio at most 10) on the sites it involves and Haar SU(2)
/// on the remaining sites.
pub fn check_sl2c_invariance(quantities: &[SlQuantity], ensemble: Ensemble, plan: TrialPlan) -> Result<Vec<InvarianceResult>> {
    if let Some(q) = quantities.iter().find(|q| !q.is_sl2c_invariant()) {
        return Err(Error::NotSl2cQuantity(q.label()));
    }
    let n = ensemble.n_sites();
    check_sites_fit(quantities, n)?;
    let mut maxima = alloc::vec![0.0f64; quantities.len()];
    for t in 0..plan.n_states {
        let mut r = rng::trial_stream(plan.seed, t as u64);
        let state = ensemble.sample(&mut r)?;
        for _ in 0..plan.n_ops {
            for (k, q) in quantities.iter().enumerate() {
                let ops = sl2c_ops(q, n, &mut r)?;
                maxima[k] = worst(maxima[k], sl2c_residual(&state, q, &ops)?);
            }
        }
    }
    Ok(quantities
        .iter()
        .zip(maxima)
        .map(|(q, m)| InvarianceResult::new(q.label(), plan.n_states * plan.n_ops, m, plan.tolerance))
        .collect())
}

/// Residual threshold a negative control must exceed.
pub const NEGATIVE_CONTROL_THRESHOLD: f64 = 1e-3;
/// Fraction of trials that must exceed [`NEGATIVE_CONTROL_THRESHOLD`].
pub const NEGATIVE_CONTROL_FRACTION: f64 = 0.95;

/// Outcome of a check that is supposed to fail.
#[derive(Debug, Clone, PartialEq)]
pub struct NegativeControl {
    pub label: String,
    pub trials: usize,
    pub threshold: f64,
    pub fraction_above: f64,
    pub required_fraction: f64,
    pub passed: bool,
}

impl NegativeControl {
    fn from_residuals(label: String, residuals: &[f64]) -> Self {
        let above = residuals.iter().filter(|&&r| r > NEGATIVE_CONTROL_THRESHOLD).count();
        let fraction_above = above as f64 / residuals.len().max(1) as f64;
        Self {
            label,
            trials: residuals.len(),
            threshold: NEGATIVE_CONTROL_THRESHOLD,
            fraction_above,
            required_fraction: NEGATIVE_CONTROL_FRACTION,
            passed: fraction_above >= NEGATIVE_CONTROL_FRACTION,
        }
    }
}

/// Applies the same `SL(2,C)` protocol as [`check_sl2c_invariance`] to any
/// quantity, including unflipped loops that are only unitarily invariant.
pub fn sl2c_negative_control(q: &SlQuantity, ensemble: Ensemble, n_trials: usize, seed: u64) -> Result<NegativeControl> {
    let n = ensemble.n_sites();
    check_sites_fit(core::slice::from_ref(q), n)?;
    let residuals = (0..n_trials)
        .map(|t| {
            let mut r = rng::trial_stream(seed, t as u64);
            let state = ensemble.sample(&mut r)?;
            let ops = sl2c_ops(q, n, &mut r)?;
            sl2c_residual(&state, q, &ops)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NegativeControl::from_residuals(format!("{} under SL2C", q.label()), &residuals))
}

/// Operations with determinant different from one: every `SL(2,C)` element
/// is multiplied by a scalar of modulus in `[1.5, 2.5]` before acting. The
/// compensation uses the renormalization factor only, so invariants are
/// expected to drift.
pub fn scaling_negative_control(q: &SlQuantity, ensemble: Ensemble, n_trials: usize, seed: u64) -> Result<NegativeControl> {
    let n = ensemble.n_sites();
    check_sites_fit(core::slice::from_ref(q), n)?;
    let moduli = Uniform::new(1.5, 2.5).map_err(|_| Error::Parameter("scaling range"))?;
    let residuals = (0..n_trials)
        .map(|t| {
            let mut r = rng::trial_stream(seed, t as u64);
            let state = ensemble.sample(&mut r)?;
            let before = q.evaluate(&state)?;
            let ops: Vec<(usize, Matrix2<C64>)> = sl2c_ops(q, n, &mut r)?
                .into_iter()
                .map(|op| {
                    let scale = if q.sites().contains(&op.site()) {
                        moduli.sample(&mut r)
                    } else {
                        1.0
                    };
                    (op.site(), op.matrix().scale(scale))
                })
                .collect();
            let mut m = qstate::conjugate_by_locals(state.matrix(), n, &ops);
            let trace_factor = m.trace().re;
            m.unscale_mut(trace_factor);
            let after = DensityMatrix::from_valid(n, m);
            compensated_residual(q, before, &after, trace_factor)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(NegativeControl::from_residuals(
        format!("{} under non-unit-determinant scaling", q.label()),
        &residuals,
    ))
}

/// `max |S(b,a) − S(a,b)ᵀ|` over every ordered pair of sites of Haar random
/// three-qubit states, each link built from its own reduced state.
pub fn check_transpose_property(n_states: usize, seed: u64) -> Result<InvarianceResult> {
    let mut max = 0.0f64;
    for t in 0..n_states {
        let state = PureState::haar(3, &mut rng::trial_stream(seed, t as u64))?.density();
        max = worst(max, transpose_defect(&state)?);
    }
    Ok(InvarianceResult::new(
        String::from("S(b,a) = S(a,b)^T"),
        n_states,
        max,
        tol::TRANSPOSE,
    ))
}

/// Largest entrywise `|S(b,a) − S(a,b)ᵀ|` over all ordered site pairs.
pub fn transpose_defect(state: &DensityMatrix) -> Result<f64> {
    let n = state.n_sites();
    let mut max = 0.0f64;
    for a in 0..n {
        for b in (0..n).filter(|&b| b != a) {
            let forward = linkspace::link_between(state, a, b)?;
            let backward = linkspace::link_between(state, b, a)?;
            let d = (forward.matrix() - backward.matrix().transpose()).amax();
            max = worst(max, d);
        }
    }
    Ok(max)
}

pub const DEFAULT_FD_STEP: f64 = 1e-5;
pub const DEFAULT_RANK_THRESHOLD: f64 = 1e-8;

/// Finite-difference Jacobian of the six three-qubit invariants and its rank.
#[derive(Debug, Clone, PartialEq)]
pub struct IndependenceResult {
    /// 6×16: rows `Σ|a|²`, `I(ab)`, `I(bc)`, `I(ca)`, `I(abc)`, `I(abab)`;
    /// columns alternate real and imaginary parts of the eight amplitudes.
    pub jacobian: DMatrix<f64>,
    /// Decreasing.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub threshold: f64,
}

/// The six polynomial invariants evaluated on an unnormalized amplitude
/// vector of three qubits.
pub fn polynomial_invariants(amplitudes: &DVector<C64>) -> Result<[f64; 6]> {
    if amplitudes.len() != 8 {
        return Err(Error::Dimension {
            what: "independence test needs eight amplitudes",
            found: amplitudes.len(),
        });
    }
    let m = amplitudes * amplitudes.adjoint();
    let trace = |sites: &[usize]| -> Result<f64> {
        Ok(linkspace::loop_transform_matrix(&m, 3, &LoopSpec::unflipped(sites)?)?.trace())
    };
    Ok([
        amplitudes.norm_squared(),
        trace(&[0, 1])?,
        trace(&[1, 2])?,
        trace(&[2, 0])?,
        trace(&[0, 1, 2])?,
        trace(&[0, 1, 0, 1])?,
    ])
}

/// Central-difference Jacobian of [`polynomial_invariants`] at `psi` and
/// its numerical rank (singular values above `threshold·σ_max`).
pub fn jacobian_independence(psi: &PureState, h: f64, threshold: f64) -> Result<IndependenceResult> {
    if !(1e-8..=1e-2).contains(&h) {
        return Err(Error::Step(h));
    }
    if !(threshold > 0.0) {
        return Err(Error::Parameter("rank threshold must be positive"));
    }
    if psi.n_sites() != 3 {
        return Err(Error::Dimension {
            what: "independence test needs a three-qubit state",
            found: psi.n_sites(),
        });
    }
    let base = psi.amplitudes();
    let mut jacobian = DMatrix::zeros(6, 16);
    for p in 0..16 {
        let delta = if p % 2 == 0 {
            Complex::new(h, 0.0)
        } else {
            Complex::new(0.0, h)
        };
        let mut plus = base.clone();
        plus[p / 2] += delta;
        let mut minus = base.clone();
        minus[p / 2] -= delta;
        let (fp, fm) = (polynomial_invariants(&plus)?, polynomial_invariants(&minus)?);
        for row in 0..6 {
            jacobian[(row, p)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    let mut singular_values: Vec<f64> = jacobian.clone().svd(false, false).singular_values.iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let cutoff = threshold * singular_values.first().copied().unwrap_or(0.0);
    let rank = singular_values.iter().filter(|&&s| s > cutoff).count();
    Ok(IndependenceResult {
        jacobian,
        singular_values,
        rank,
        threshold,
    })
}

/// How the observable on the starting site is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObservableMode {
    /// Real Pauli vector uniform on the 3-sphere of radius `k`.
    #[default]
    Hermitian,
    /// Haar SU(2) element `m_0 σ_0 + i(m_1 σ_1 + m_2 σ_2 + m_3 σ_3)`, scaled by `k`.
    Su2Valued,
}

/// Minimum number of Monte Carlo samples.
pub const MIN_FIDELITY_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityConfig {
    /// Observable size: `tr(M†M) = 2k²`.
    pub k: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: ObservableMode,
}

impl FidelityConfig {
    pub fn new(k: f64, samples: usize, seed: u64) -> Result<Self> {
        let cfg = Self {
            k,
            samples,
            seed,
            mode: ObservableMode::Hermitian,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_mode(mut self, mode: ObservableMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::Parameter("observable size k must be positive"));
        }
        if self.samples < MIN_FIDELITY_SAMPLES {
            return Err(Error::Parameter("at least 1000 samples are required"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// `(k²/2)·I(𝒞)`.
    pub reference: f64,
}

impl FidelityEstimate {
    /// `|estimate − reference| / std_error`.
    pub fn deviation_in_std_errors(&self) -> f64 {
        (self.estimate - self.reference).abs() / self.std_error
    }

    pub fn agrees_within(&self, std_errors: f64) -> bool {
        (self.estimate - self.reference).abs() <= std_errors * self.std_error
    }
}

/// Welford accumulator.
#[derive(Default)]
struct Moments {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn std_error(&self) -> f64 {
        if self.n < 2 {
            return f64::INFINITY;
        }
        libm::sqrt(self.m2 / (self.n - 1) as f64 / self.n as f64)
    }
}

/// Uniform point on the unit 3-sphere.
fn unit_sphere_point<R: RngCore + ?Sized>(rng: &mut R) -> Vector4<f64> {
    loop {
        let g = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
        let norm = g.norm();
        if norm > 1e-12 {
            return g.unscale(norm);
        }
    }
}

/// Average of `tr(M†M′)` over observables `M` of size `k`, where `M′` is the
/// image of `M` around the loop. The reference value is `(k²/2)·I(𝒞)`.
pub fn mc_fidelity(state: &DensityMatrix, lp: &LoopSpec, cfg: &FidelityConfig) -> Result<FidelityEstimate> {
    cfg.validate()?;
    let s = linkspace::loop_transform(state, lp)?;
    let mut r = rng::seeded(cfg.seed);
    let mut acc = Moments::default();
    for _ in 0..cfg.samples {
        let u = unit_sphere_point(&mut r).scale(cfg.k);
        let fidelity = match cfg.mode {
            ObservableMode::Hermitian => 2.0 * u.dot(&(s * u)),
            ObservableMode::Su2Valued => {
                let m: Vector4<C64> = Vector4::new(
                    Complex::new(u[0], 0.0),
                    Complex::new(0.0, u[1]),
                    Complex::new(0.0, u[2]),
                    Complex::new(0.0, u[3]),
                );
                let image = s.map(|x| Complex::new(x, 0.0)) * m;
                2.0 * m.dotc(&image).re
            }
        };
        acc.push(fidelity);
    }
    Ok(FidelityEstimate {
        estimate: acc.mean,
        std_error: acc.std_error(),
        reference: 0.5 * cfg.k * cfg.k * s.trace(),
    })
}

/// Sample mean and standard error of `m_i m_j` for `m` uniform on the
/// 3-sphere of radius `k`; the exact mean is `(k²/4)·δ_ij`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    pub mean: Matrix4<f64>,
    pub std_error: Matrix4<f64>,
}

pub fn sphere_second_moments(k: f64, samples: usize, seed: u64) -> Result<SecondMoments> {
    FidelityConfig::new(k, samples, seed)?;
    let mut r = rng::seeded(seed);
    let mut acc: [Moments; 16] = Default::default();
    for _ in 0..samples {
        let m = unit_sphere_point(&mut r).scale(k);
        for i in 0..4 {
            for j in 0..4 {
                acc[4 * i + j].push(m[i] * m[j]);
            }
        }
    }
    Ok(SecondMoments {
        mean: Matrix4::from_fn(|i, j| acc[4 * i + j].mean),
        std_error: Matrix4::from_fn(|i, j| acc[4 * i + j].std_error()),
    })
}

/// One closed-form cross-check of the identity suite.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport {
    pub seed: u64,
    pub n_states: usize,
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const CHECK_PAIR_PURITY: &str = "I(ab) = tr rho_ab^2";
pub const CHECK_COMPLEMENT_PURITY: &str = "I(ab) = tr rho_c^2";
pub const CHECK_KEMPE_INDEX: &str = "I(abc) = Kempe index contraction";
pub const CHECK_KEMPE_ALTERNATIVES: &str = "I(abc) = 3tr[(rho_x(x)rho_y)rho_xy] - tr rho_x^3 - tr rho_y^3";
pub const CHECK_KEMPE_RANGE: &str = "2/9 <= I(abc) <= 1";
pub const CHECK_DOUBLE_LOOP_SYMMETRY: &str = "I(abab) = I(bcbc) = I(caca)";
pub const CHECK_TRANSPOSE: &str = "S(b,a) = S(a,b)^T";
pub const CHECK_FLIPPED_KEMPE_ZERO: &str = "I(~a~b~c) = 0";
pub const CHECK_FLIPPED_KEMPE_POWERS: &str = "I(~a~b~c) = 1 - sum tr rho^2 + 2/3 sum tr rho^3";
pub const CHECK_FLIPPED_KEMPE_EXPANSION: &str = "I(~a~b~c) = 1 - sum tr rho^2 + sum tr[(rho_x(x)rho_y)rho_xy] - I5";
pub const CHECK_FLIPPED_PAIR_OVERLAP: &str = "I(~a~b) = tr(rho_ab rho~_ab)";
pub const CHECK_TANGLES_WOOTTERS: &str = "tau_xy reconstruction = Wootters tangle";
pub const CHECK_I6_THREE_TANGLE: &str = "4 I6 = tau_abc^2";
pub const CHECK_MONOGAMY: &str = "tau_ab + tau_ca + tau_abc = 4 det rho_a";

struct Tracker {
    entries: Vec<(&'static str, f64, f64)>,
}

impl Tracker {
    fn record(&mut self, name: &'static str, tolerance: f64, residual: f64) {
        match self.entries.iter_mut().find(|(n, _, _)| *n == name) {
            Some(entry) => entry.2 = worst(entry.2, residual),
            None => self.entries.push((name, tolerance, residual)),
        }
    }
}

/// Runs every closed-form cross-check over `n_states` Haar random pure
/// three-qubit states.
pub fn identity_suite(seed: u64, n_states: usize) -> Result<IdentityReport> {
    let mut t = Tracker { entries: Vec::new() };
    let pairs = [(0usize, 1usize, 2usize), (1, 2, 0), (2, 0, 1)];
    for trial in 0..n_states {
        let psi = PureState::haar(3, &mut rng::trial_stream(seed, trial as u64))?;
        let rho = psi.density();
        let loop_trace = |sites: &[usize]| -> Result<f64> {
            Ok(linkspace::loop_transform(&rho, &LoopSpec::unflipped(sites)?)?.trace())
        };

        for &(x, y, z) in &pairs {
            let pair = loop_trace(&[x, y])?;
            let pair_purity = qstate::partial_trace(&rho, &[x, y])?.purity();
            let complement = qstate::partial_trace(&rho, &[z])?.purity();
            t.record(CHECK_PAIR_PURITY, tol::IDENTITY, (pair - pair_purity).abs());
            t.record(CHECK_COMPLEMENT_PURITY, tol::IDENTITY, (pair - complement).abs());
            let overlap = invariants::flipped_pair_overlap(&rho, (x, y))?;
            let flipped = invariants::flipped_pair_invariant(&rho, (x, y))?;
            t.record(CHECK_FLIPPED_PAIR_OVERLAP, tol::IDENTITY, (flipped - overlap).abs());
        }

        let kempe = loop_trace(&[0, 1, 2])?;
        t.record(CHECK_KEMPE_INDEX, tol::IDENTITY, (kempe - invariants::kempe_index_form(&psi)?).abs());
        for pair in [(0, 1), (1, 2), (0, 2)] {
            let alt = invariants::kempe_alternative(&psi, pair)?;
            t.record(CHECK_KEMPE_ALTERNATIVES, tol::IDENTITY, (kempe - alt).abs());
        }
        let range_violation = (2.0 / 9.0 - kempe).max(kempe - 1.0).max(0.0);
        t.record(CHECK_KEMPE_RANGE, tol::STRUCTURE, range_violation);

        let doubles = [loop_trace(&[0, 1, 0, 1])?, loop_trace(&[1, 2, 1, 2])?, loop_trace(&[2, 0, 2, 0])?];
        let spread = doubles.iter().fold(0.0f64, |m, &v| m.max((v - doubles[0]).abs()));
        t.record(CHECK_DOUBLE_LOOP_SYMMETRY, tol::IDENTITY, spread);

        t.record(CHECK_TRANSPOSE, tol::TRANSPOSE, transpose_defect(&rho)?);

        let (lhs, rhs) = invariants::flipped_kempe_identity(&psi)?;
        t.record(CHECK_FLIPPED_KEMPE_ZERO, tol::IDENTITY, lhs.abs());
        t.record(CHECK_FLIPPED_KEMPE_POWERS, tol::IDENTITY, (lhs - rhs).abs());
        let expansion = invariants::flipped_kempe_expansion(&psi)?;
        t.record(CHECK_FLIPPED_KEMPE_EXPANSION, tol::IDENTITY, (lhs - expansion).abs());

        let tangles = invariants::reconstruct_tangles(&psi)?;
        for (x, y, tau) in [(0, 1, tangles.tau_ab), (1, 2, tangles.tau_bc), (2, 0, tangles.tau_ca)] {
            let oracle = invariants::wootters_tangle_oracle(&qstate::partial_trace(&rho, &[x, y])?)?;
            t.record(CHECK_TANGLES_WOOTTERS, tol::TANGLE, (tau - oracle).abs());
        }
        let i6 = invariants::three_tangle_i6(&psi)?;
        t.record(CHECK_I6_THREE_TANGLE, tol::TANGLE, (4.0 * i6 - tangles.tau_abc * tangles.tau_abc).abs());
        let det_a = 2.0 * (1.0 - qstate::partial_trace(&rho, &[0])?.purity());
        let monogamy = tangles.tau_ab + tangles.tau_ca + tangles.tau_abc;
        t.record(CHECK_MONOGAMY, tol::TANGLE, (monogamy - det_a).abs());
    }
    Ok(IdentityReport {
        seed,
        n_states,
        checks: t
            .entries
            .into_iter()
            .map(|(name, tolerance, max_residual)| IdentityCheck {
                name,
                max_residual,
                tolerance,
                passed: max_residual <= tolerance,
            })
            .collect(),
    })
}
