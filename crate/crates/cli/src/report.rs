//! JSON reports for `compute` and `verify`. Objects are `serde_json::Map`,
//! which keeps keys sorted, so output is byte-stable for a fixed seed.

use linkloop::invariants::{self, InvariantReport, ThreeQubitCatalogue};
use linkloop::linkspace::LoopSpec;
use linkloop::qstate::PureState;
use linkloop::rng;
use linkloop::tol;
use linkloop::verify::{
    self, Ensemble, FidelityConfig, IdentityReport, InvarianceResult, NegativeControl, ObservableMode, SlQuantity,
    TrialPlan,
};
use serde_json::{json, Map, Value};

use crate::state_file::{Kind, State};
use crate::CliError;

fn invariant_json(path: &str, lp: &LoopSpec, r: &InvariantReport) -> Value {
    json!({
        "path": path,
        "label": r.label,
        "letters": lp.letter_label(),
        "value": r.value,
        "degree": r.degree,
        "invariance_class": r.invariance_class.to_string(),
    })
}

fn catalogue_json(c: &ThreeQubitCatalogue) -> Value {
    let [ab, bc, ca] = c.double_loops;
    let [fab, fbc, fca] = c.flipped_pairs;
    let [dab, dbc, dca] = c.link_determinants;
    let [kab, kbc, kac] = c.kempe_alternatives;
    let (flipped, powers) = c.flipped_kempe;
    json!({
        "norm": c.norm,
        "I2 = I(ab) = tr rho_c^2": c.i2,
        "I3 = I(ca) = tr rho_b^2": c.i3,
        "I4 = I(bc) = tr rho_a^2": c.i4,
        "I5 = I(abc)": c.kempe_loop,
        "I5 index form": c.kempe_index,
        "I5 via pair ab": kab,
        "I5 via pair bc": kbc,
        "I5 via pair ac": kac,
        "I6": c.i6,
        "I(abab)": ab,
        "I(bcbc)": bc,
        "I(caca)": ca,
        "I(~a~b)": fab,
        "I(~b~c)": fbc,
        "I(~c~a)": fca,
        "I(~a~b~a~b)": c.flipped_double_loop,
        "det S(a,b)": dab,
        "det S(b,c)": dbc,
        "det S(c,a)": dca,
        "tangles": {
            "tau_ab": c.tangles.tau_ab,
            "tau_bc": c.tangles.tau_bc,
            "tau_ca": c.tangles.tau_ca,
            "tau_abc": c.tangles.tau_abc,
        },
        "flipped_kempe_check": {
            "I(~a~b~c)": flipped,
            "trace_power_form": powers,
            "tolerance": tol::IDENTITY,
            "passed": flipped.abs() <= tol::IDENTITY && (flipped - powers).abs() <= tol::IDENTITY,
        },
    })
}

pub fn compute(file: &str, state: &State, paths: &[(String, LoopSpec)]) -> Result<Value, CliError> {
    let rho = state.density();
    let mut values = Map::new();
    let mut reports = Vec::new();
    for (text, lp) in paths {
        let r = invariants::loop_invariant(&rho, lp).map_err(CliError::from_core)?;
        values.insert(r.label.clone(), json!(r.value));
        reports.push(invariant_json(text, lp, &r));
    }
    let mut out = Map::new();
    out.insert(
        "state".into(),
        json!({
            "file": file,
            "n_sites": state.n_sites(),
            "kind": if state.kind() == Kind::Pure { "pure" } else { "mixed" },
        }),
    );
    out.insert("invariants".into(), Value::Object(values));
    out.insert("reports".into(), Value::Array(reports));
    if let State::Pure(psi) = state {
        if psi.n_sites() == 3 {
            let c = invariants::three_qubit_catalogue(psi).map_err(CliError::from_core)?;
            out.insert("catalogue".into(), catalogue_json(&c));
        }
    }
    Ok(Value::Object(out))
}

/// Common verification flags after validation.
#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub seed: u64,
    pub trials: usize,
    pub tol: Option<f64>,
    pub samples: usize,
    pub k: f64,
    pub mode: ObservableMode,
}

fn result_json(r: &InvarianceResult) -> Value {
    json!({
        "label": r.label,
        "trials": r.trials,
        "max_residual": r.max_residual,
        "tolerance": r.tolerance,
        "passed": r.passed,
    })
}

fn control_json(c: &NegativeControl) -> Value {
    json!({
        "label": c.label,
        "trials": c.trials,
        "threshold": c.threshold,
        "fraction_above": c.fraction_above,
        "required_fraction": c.required_fraction,
        "passed": c.passed,
    })
}

fn suite(name: &str, o: &VerifyOptions, passed: bool, mut body: Map<String, Value>) -> Value {
    body.insert("suite".into(), json!(name));
    body.insert("seed".into(), json!(o.seed));
    body.insert("trials".into(), json!(o.trials));
    body.insert("passed".into(), json!(passed));
    Value::Object(body)
}

/// Operations drawn per state in the invariance suites.
const OPS_PER_STATE: usize = 10;

fn loops(paths: &[&[usize]], flipped: bool) -> Vec<LoopSpec> {
    paths
        .iter()
        .map(|p| {
            if flipped {
                LoopSpec::all_flipped(p)
            } else {
                LoopSpec::unflipped(p)
            }
            .expect("fixed loops are valid")
        })
        .collect()
}

pub fn verify_su2(o: &VerifyOptions) -> Result<(Value, bool), CliError> {
    let tolerance = o.tol.unwrap_or(tol::SU2_INVARIANCE);
    let plan = TrialPlan {
        n_states: o.trials,
        n_ops: OPS_PER_STATE,
        seed: o.seed,
        tolerance,
    };
    let three = loops(&[&[0, 1], &[1, 2], &[2, 0], &[0, 1, 2], &[0, 1, 0, 1]], false);
    let mut results =
        verify::check_su2_invariance(&three, Ensemble::HaarPure { n_sites: 3 }, plan).map_err(CliError::from_core)?;
    let four = loops(&[&[0, 1, 2, 3]], false);
    let mixed = Ensemble::Mixed { n_sites: 4, rank: 4 };
    let mut r4 = verify::check_su2_invariance(&four, mixed, plan).map_err(CliError::from_core)?;
    r4[0].label = format!("{} on rank-4 mixed 4-qubit states", r4[0].label);
    results.append(&mut r4);
    let passed = results.iter().all(|r| r.passed);
    let mut body = Map::new();
    body.insert("operations_per_state".into(), json!(OPS_PER_STATE));
    body.insert("checks".into(), results.iter().map(result_json).collect());
    Ok((suite("su2", o, passed, body), passed))
}

pub fn verify_sl2c(o: &VerifyOptions) -> Result<(Value, bool), CliError> {
    let tolerance = o.tol.unwrap_or(tol::SL2C_INVARIANCE);
    let plan = TrialPlan {
        n_states: o.trials,
        n_ops: 1,
        seed: o.seed,
        tolerance,
    };
    let mut quantities: Vec<SlQuantity> = loops(&[&[0, 1], &[1, 2], &[2, 0]], true)
        .into_iter()
        .map(SlQuantity::Loop)
        .collect();
    quantities.extend([(0, 1), (1, 2), (2, 0)].map(|(x, y)| SlQuantity::LinkDeterminant(x, y)));
    let ensemble = Ensemble::HaarPure { n_sites: 3 };
    let results = verify::check_sl2c_invariance(&quantities, ensemble, plan).map_err(CliError::from_core)?;
    let unflipped = SlQuantity::Loop(loops(&[&[0, 1]], false).remove(0));
    let controls = [
        verify::sl2c_negative_control(&unflipped, ensemble, o.trials, o.seed),
        verify::scaling_negative_control(&quantities[0], ensemble, o.trials, o.seed),
    ]
    .into_iter()
    .collect::<Result<Vec<_>, _>>()
    .map_err(CliError::from_core)?;
    let passed = results.iter().all(|r| r.passed) && controls.iter().all(|c| c.passed);
    let mut body = Map::new();
    body.insert("max_condition".into(), json!(linkloop::qstate::DEFAULT_MAX_CONDITION));
    body.insert("checks".into(), results.iter().map(result_json).collect());
    body.insert("negative_controls".into(), controls.iter().map(control_json).collect());
    Ok((suite("sl2c", o, passed, body), passed))
}

pub fn verify_identities(o: &VerifyOptions) -> Result<(Value, bool), CliError> {
    let IdentityReport { checks, .. } = verify::identity_suite(o.seed, o.trials).map_err(CliError::from_core)?;
    let mut passed = true;
    let checks: Vec<Value> = checks
        .iter()
        .map(|c| {
            let tolerance = o.tol.unwrap_or(c.tolerance);
            let ok = c.max_residual <= tolerance;
            passed &= ok;
            json!({
                "label": c.name,
                "trials": o.trials,
                "max_residual": c.max_residual,
                "tolerance": tolerance,
                "passed": ok,
            })
        })
        .collect();
    let mut body = Map::new();
    body.insert("checks".into(), Value::Array(checks));
    Ok((suite("identities", o, passed, body), passed))
}

pub fn verify_independence(o: &VerifyOptions) -> Result<(Value, bool), CliError> {
    let threshold = o.tol.unwrap_or(verify::DEFAULT_RANK_THRESHOLD);
    let rank_of = |psi: &PureState| {
        verify::jacobian_independence(psi, verify::DEFAULT_FD_STEP, threshold).map_err(CliError::from_core)
    };
    let mut histogram = Map::new();
    let mut smallest_ratio = f64::INFINITY;
    let mut full = 0;
    for t in 0..o.trials {
        let psi = PureState::haar(3, &mut rng::trial_stream(o.seed, t as u64)).map_err(CliError::from_core)?;
        let r = rank_of(&psi)?;
        full += usize::from(r.rank == 6);
        smallest_ratio = smallest_ratio.min(r.singular_values[5] / r.singular_values[0]);
        let slot = histogram.entry(r.rank.to_string()).or_insert(json!(0));
        *slot = json!(slot.as_u64().unwrap_or(0) + 1);
    }
    // Degenerate points lie on lower-dimensional orbits; their rank is informative only.
    let mut degenerate = Map::new();
    for (name, psi) in [
        ("|000>", PureState::basis(3, 0)),
        ("GHZ", PureState::ghz(3)),
        ("W", PureState::w(3)),
    ] {
        let psi = psi.map_err(CliError::from_core)?;
        degenerate.insert(name.into(), json!(rank_of(&psi)?.rank));
    }
    let passed = full == o.trials;
    let mut body = Map::new();
    body.insert("step".into(), json!(verify::DEFAULT_FD_STEP));
    body.insert("relative_threshold".into(), json!(threshold));
    body.insert("expected_rank".into(), json!(6));
    body.insert("rank_histogram".into(), Value::Object(histogram));
    body.insert("min_sixth_singular_ratio".into(), json!(smallest_ratio));
    body.insert("reference_state_ranks".into(), Value::Object(degenerate));
    Ok((suite("independence", o, passed, body), passed))
}

pub fn verify_fidelity(o: &VerifyOptions) -> Result<(Value, bool), CliError> {
    let n_se = o.tol.unwrap_or(tol::MC_STANDARD_ERRORS);
    let kempe = LoopSpec::unflipped(&[0, 1, 2]).expect("fixed loop");
    let pair = LoopSpec::unflipped(&[0, 1]).expect("fixed loop");
    let cases = [
        ("|000>", PureState::basis(3, 0), &kempe),
        ("GHZ", PureState::ghz(3), &pair),
        ("W", PureState::w(3), &kempe),
    ];
    let mut passed = true;
    let mut checks = Vec::new();
    for (i, (name, psi, lp)) in cases.into_iter().enumerate() {
        let psi = psi.map_err(CliError::from_core)?;
        let cfg = FidelityConfig::new(o.k, o.samples, o.seed.wrapping_add(i as u64))
            .map_err(|e| CliError::Args(e.to_string()))?
            .with_mode(o.mode);
        let est = verify::mc_fidelity(&psi.density(), lp, &cfg).map_err(CliError::from_core)?;
        let ok = est.agrees_within(n_se);
        passed &= ok;
        checks.push(json!({
            "state": name,
            "label": lp.label(),
            "estimate": est.estimate,
            "reference": est.reference,
            "std_error": est.std_error,
            "deviation_in_std_errors": est.deviation_in_std_errors(),
            "tolerance_std_errors": n_se,
            "passed": ok,
        }));
    }
    let mut body = Map::new();
    body.insert("k".into(), json!(o.k));
    body.insert("samples".into(), json!(o.samples));
    body.insert(
        "observable".into(),
        json!(if o.mode == ObservableMode::Hermitian { "hermitian" } else { "su2" }),
    );
    body.insert("checks".into(), Value::Array(checks));
    Ok((suite("fidelity", o, passed, body), passed))
}
