//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use linkloop::linkspace::{self, LoopSpec};
use linkloop::qstate::PureState;
use linkloop::rng;
use linkloop::tol;
use linkloop::verify::{self, Ensemble, FidelityConfig, ObservableMode, SlQuantity, TrialPlan};

struct Outcome {
    passed: bool,
    detail: String,
}

type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn extremal_kempe() -> Outcome {
    let kempe = LoopSpec::unflipped(&[0, 1, 2]).unwrap();
    let product = PureState::basis(3, 0).unwrap().density();
    let w = PureState::w(3).unwrap().density();
    let p = linkspace::loop_transform(&product, &kempe).unwrap().trace();
    let v = linkspace::loop_transform(&w, &kempe).unwrap().trace();
    let (dp, dw) = ((p - 1.0).abs(), (v - 2.0 / 9.0).abs());
    outcome(
        dp <= 1e-12 && dw <= 1e-12,
        format!("I(abc)|000> = {p:.15}, I(abc)|W> = {v:.15} (|diff to 2/9| = {dw:.2e})"),
    )
}

fn flipped_kempe_zero() -> Outcome {
    let lp = LoopSpec::all_flipped(&[0, 1, 2]).unwrap();
    let seed = 2;
    let mut max = 0.0f64;
    for t in 0..10_000u64 {
        let rho = PureState::haar(3, &mut rng::trial_stream(seed, t)).unwrap().density();
        max = max.max(linkspace::loop_transform(&rho, &lp).unwrap().trace().abs());
    }
    outcome(max < 1e-10, format!("max |I(~a~b~c)| = {max:.3e} over 10000 Haar states"))
}

fn su2_invariance() -> Outcome {
    let loops: Vec<LoopSpec> = [&[0, 1][..], &[1, 2], &[2, 0], &[0, 1, 2], &[0, 1, 0, 1]]
        .iter()
        .map(|s| LoopSpec::unflipped(s).unwrap())
        .collect();
    let plan = TrialPlan {
        n_states: 1000,
        n_ops: 10,
        seed: 3,
        tolerance: tol::SU2_INVARIANCE,
    };
    let res = verify::check_su2_invariance(&loops, Ensemble::HaarPure { n_sites: 3 }, plan).unwrap();
    let detail = res
        .iter()
        .map(|r| format!("{} {:.2e}", r.label, r.max_residual))
        .collect::<Vec<_>>()
        .join(", ");
    outcome(res.iter().all(|r| r.max_residual < 1e-9), format!("{detail} (10000 trials each)"))
}

fn sl2c_invariance() -> Outcome {
    let quantities = vec![
        SlQuantity::Loop(LoopSpec::all_flipped(&[0, 1]).unwrap()),
        SlQuantity::Loop(LoopSpec::all_flipped(&[1, 2]).unwrap()),
        SlQuantity::Loop(LoopSpec::all_flipped(&[2, 0]).unwrap()),
        SlQuantity::LinkDeterminant(0, 1),
    ];
    let ensemble = Ensemble::HaarPure { n_sites: 3 };
    let plan = TrialPlan {
        n_states: 1000,
        n_ops: 1,
        seed: 4,
        tolerance: tol::SL2C_INVARIANCE,
    };
    let res = verify::check_sl2c_invariance(&quantities, ensemble, plan).unwrap();
    let unflipped = SlQuantity::Loop(LoopSpec::unflipped(&[0, 1]).unwrap());
    let control = verify::sl2c_negative_control(&unflipped, ensemble, 1000, 4).unwrap();
    let scaled = verify::scaling_negative_control(&quantities[0], ensemble, 1000, 4).unwrap();
    let mut detail = res
        .iter()
        .map(|r| format!("{} {:.2e}", r.label, r.max_residual))
        .collect::<Vec<_>>()
        .join(", ");
    detail += &format!(
        "; control I(ab): {:.1}% above 1e-3; scaled-op control I(~a~b): {:.1}% above 1e-3",
        100.0 * control.fraction_above,
        100.0 * scaled.fraction_above
    );
    let ok = res.iter().all(|r| r.max_residual < 1e-8) && control.passed && scaled.passed;
    outcome(ok, detail)
}

fn identity_block(report: &verify::IdentityReport, names: &[&str], tolerance: f64) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for name in names {
        let c = report.check(name).expect("identity check present");
        ok &= c.max_residual <= tolerance;
        parts.push(format!("[{}] {:.2e}", c.name, c.max_residual));
    }
    outcome(ok, parts.join(", "))
}

fn monte_carlo() -> Outcome {
    let kempe = LoopSpec::unflipped(&[0, 1, 2]).unwrap();
    let pair = LoopSpec::unflipped(&[0, 1]).unwrap();
    let cases = [
        ("|000>", PureState::basis(3, 0).unwrap(), &kempe),
        ("GHZ", PureState::ghz(3).unwrap(), &pair),
        ("W", PureState::w(3).unwrap(), &kempe),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    let mut seed = 80;
    for (name, psi, lp) in &cases {
        for k in [1.0, 2.0] {
            for mode in [ObservableMode::Hermitian, ObservableMode::Su2Valued] {
                seed += 1;
                let cfg = FidelityConfig::new(k, 1_000_000, seed).unwrap().with_mode(mode);
                let est = verify::mc_fidelity(&psi.density(), lp, &cfg).unwrap();
                let dev = est.deviation_in_std_errors();
                ok &= dev < tol::MC_STANDARD_ERRORS;
                let tag = if mode == ObservableMode::Hermitian { "" } else { " su2" };
                parts.push(format!("{name} {lp} k={k}{tag}: {dev:.2} SE"));
            }
        }
    }
    outcome(ok, parts.join(", "))
}

fn independence() -> Outcome {
    let mut ranks = Vec::new();
    for t in 0..100u64 {
        let psi = PureState::haar(3, &mut rng::trial_stream(7, t)).unwrap();
        let r = verify::jacobian_independence(&psi, verify::DEFAULT_FD_STEP, verify::DEFAULT_RANK_THRESHOLD).unwrap();
        ranks.push(r.rank);
    }
    let full = ranks.iter().filter(|&&r| r == 6).count();
    let lo = ranks.iter().min().unwrap();
    let hi = ranks.iter().max().unwrap();
    outcome(full == 100, format!("rank 6 for {full}/100 states (min {lo}, max {hi})"))
}

fn mixed_four_qubit() -> Outcome {
    let loops = [LoopSpec::unflipped(&[0, 1, 2, 3]).unwrap()];
    let plan = TrialPlan {
        n_states: 100,
        n_ops: 10,
        seed: 9,
        tolerance: tol::SU2_INVARIANCE,
    };
    let res = verify::check_su2_invariance(&loops, Ensemble::Mixed { n_sites: 4, rank: 4 }, plan).unwrap();
    outcome(
        res[0].max_residual < 1e-9,
        format!("{} max residual {:.2e} over 100 rank-4 states x 10 ops", res[0].label, res[0].max_residual),
    )
}

fn main() -> ExitCode {
    let identities = verify::identity_suite(5, 1000).unwrap();
    let criteria: Vec<Criterion> = vec![
        ("extremal Kempe values", Box::new(extremal_kempe)),
        ("flipped Kempe zero", Box::new(flipped_kempe_zero)),
        ("SU(2) invariance", Box::new(su2_invariance)),
        ("SL(2,C) invariance", Box::new(sl2c_invariance)),
        (
            "identity suite",
            Box::new(|| {
                identity_block(
                    &identities,
                    &[
                        verify::CHECK_PAIR_PURITY,
                        verify::CHECK_COMPLEMENT_PURITY,
                        verify::CHECK_KEMPE_INDEX,
                        verify::CHECK_KEMPE_ALTERNATIVES,
                        verify::CHECK_DOUBLE_LOOP_SYMMETRY,
                        verify::CHECK_TRANSPOSE,
                        verify::CHECK_FLIPPED_KEMPE_POWERS,
                        verify::CHECK_FLIPPED_KEMPE_EXPANSION,
                    ],
                    tol::IDENTITY,
                )
            }),
        ),
        (
            "tangle reconstruction",
            Box::new(|| {
                identity_block(
                    &identities,
                    &[verify::CHECK_TANGLES_WOOTTERS, verify::CHECK_I6_THREE_TANGLE],
                    tol::TANGLE,
                )
            }),
        ),
        ("algebraic independence", Box::new(independence)),
        ("Monte Carlo fidelity", Box::new(monte_carlo)),
        ("mixed four-qubit loop", Box::new(mixed_four_qubit)),
    ];

    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let verdict = if o.passed { "PASS" } else { "FAIL" };
        failed += usize::from(!o.passed);
        println!(
            "criterion {}: {verdict} {name} ({:.1}s): {}",
            i + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criterion(s) failed");
        ExitCode::FAILURE
    }
}
