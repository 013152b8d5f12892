//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned below and not configurable.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qszasz::cli::{run_moments, Outcome};
use qszasz::config::ExperimentConfig;
use qszasz::functions::TestFunction;
use qszasz::operator::classical_favard_szasz;
use qszasz::qcore::{q_exp_big, q_exp_small, QValue};
use qszasz::smoothness::{
    verify_lipschitz_bound, verify_local_estimate, verify_modulus_bound, GridSpec, Sweep, VerifyOptions,
};
use qszasz::statconv::{
    is_perfect_square, korovkin_experiment, prefix_density, st_limit_profile, KorovkinSetup, QSequence,
};
use qszasz::{Operator, OperatorParams, PowerSeries, Result};

const NORMALIZATION_TOL: f64 = 1e-10;
const FIRST_MOMENT_TOL: f64 = 1e-8;
const REDUCTION_TOL: f64 = 1e-9;
const EXP_IDENTITY_TOL: f64 = 1e-10;
const CENTRAL_CLOSED_TOL: f64 = 1e-9;
const SLACK_TOL: f64 = 1e-9;
const AUXILIARY_TOL: f64 = 1e-9;
const KOROVKIN_E0_TOL: f64 = 1e-10;
const INV_E_TOL: f64 = 1e-3;
const CLASSICAL_TOL: f64 = 1e-2;
const SERIES_TOL: f64 = 1e-13;

const Q_GRID: [f64; 4] = [0.3, 0.6, 0.9, 0.99];
const N_GRID: [u32; 4] = [2, 5, 10, 20];
const T_GRID: [f64; 3] = [0.0, 0.25, 0.5];
const STANCU: [(f64, f64); 2] = [(0.0, 0.0), (1.0, 2.0)];

fn generators() -> Vec<PowerSeries> {
    [vec![1.0], vec![1.0, 1.0], vec![2.0, 1.0, 0.5]].into_iter().map(|c| PowerSeries::new(c).unwrap()).collect()
}

/// Every operator of the fixed-q grid.
fn grid_operators() -> Result<Vec<Operator>> {
    let mut ops = Vec::new();
    for &q in &Q_GRID {
        for &n in &N_GRID {
            for &t in &T_GRID {
                for &(alpha, beta) in &STANCU {
                    for a in generators() {
                        let p = OperatorParams::new(n, t, alpha, beta, QValue::new(q)?, a)?;
                        ops.push(Operator::new(p, SERIES_TOL)?);
                    }
                }
            }
        }
    }
    Ok(ops)
}

fn x_grid() -> GridSpec {
    GridSpec::new(0.0, 0.5, 0.05).unwrap()
}

fn opts() -> VerifyOptions {
    VerifyOptions { series_tol: SERIES_TOL, report_tol: SLACK_TOL }
}

type Check = Result<(bool, String)>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Check + 'a>);

fn normalization(ops: &[Operator]) -> Check {
    let mut worst = 0.0f64;
    for op in ops {
        for x in x_grid().points() {
            worst = worst.max((op.apply(|_| 1.0, x) - 1.0).abs());
        }
    }
    Ok((
        worst <= NORMALIZATION_TOL,
        format!("{} operators, max |T(1) - 1| = {worst:.2e} (tol {NORMALIZATION_TOL:.0e})", ops.len()),
    ))
}

fn first_moment(ops: &[Operator]) -> Check {
    let mut worst = 0.0f64;
    let mut worst_reduction = 0.0f64;
    for op in ops {
        let p = op.params();
        let reduction = p.alpha() == 0.0 && p.beta() == 0.0 && p.a().coeffs() == [1.0];
        for x in x_grid().points() {
            let r = op.moment_report(1, x)?;
            worst = worst.max(r.abs_diff);
            if reduction {
                worst_reduction = worst_reduction.max((r.oracle - (x + p.t())).abs());
            }
        }
    }
    let ok = worst <= FIRST_MOMENT_TOL && worst_reduction <= REDUCTION_TOL;
    Ok((
        ok,
        format!(
            "max |closed_form - oracle| = {worst:.2e} (tol {FIRST_MOMENT_TOL:.0e}); A=(1), alpha=beta=0: max |T(s) - (x+t)| = {worst_reduction:.2e} (tol {REDUCTION_TOL:.0e})"
        ),
    ))
}

fn exp_identity() -> Check {
    let mut worst = 0.0f64;
    for &q in &Q_GRID {
        let qv = QValue::new(q)?;
        let xmax = 0.9 / (1.0 - q);
        for i in 0..20 {
            let x = xmax * i as f64 / 19.0;
            let a = q_exp_small(x, qv, 1e-16)?.value * q_exp_big(-x, qv, 1e-16)?.value;
            let b = q_exp_big(x, qv, 1e-16)?.value * q_exp_small(-x, qv, 1e-16)?.value;
            worst = worst.max((a - 1.0).abs()).max((b - 1.0).abs());
        }
    }
    Ok((
        worst <= EXP_IDENTITY_TOL,
        format!("both products, 20 points per q: max |prod - 1| = {worst:.2e} (tol {EXP_IDENTITY_TOL:.0e})"),
    ))
}

fn second_moment(ops: &[Operator]) -> Check {
    let cfg = ExperimentConfig::default();
    let out: Outcome = run_moments(&cfg)?;
    let table = out.table("moments").expect("moments table");
    let columns_present =
        ["central_lead_square", "central_lead_beta", "central_oracle"].iter().all(|c| table.column(c).is_some());

    let mut worst = 0.0f64;
    for op in ops {
        let p = op.params();
        if p.alpha() == 0.0 && p.beta() == 0.0 && p.a().coeffs() == [1.0] {
            let closed = p.t() * op.r_factor() / p.n_q();
            worst = worst.max((op.central_moment2() - closed).abs());
        }
    }

    let mut decreasing = true;
    for &q in &Q_GRID {
        for &t in &[0.25, 0.5] {
            for &(alpha, beta) in &STANCU {
                for a in generators() {
                    let mut prev = f64::INFINITY;
                    for n in [5u32, 10, 20, 40] {
                        let p = OperatorParams::new(n, t, alpha, beta, QValue::new(q)?, a.clone())?;
                        let d = Operator::new(p, SERIES_TOL)?.central_moment2();
                        decreasing &= d < prev;
                        prev = d;
                    }
                }
            }
        }
    }
    let ok = out.pass && columns_present && worst <= CENTRAL_CLOSED_TOL && decreasing;
    Ok((
        ok,
        format!(
            "run_moments pass={} with comparison columns={columns_present}; |central - tR/[n]| = {worst:.2e} (tol {CENTRAL_CLOSED_TOL:.0e}); strictly decreasing over n=5..40: {decreasing}",
            out.pass
        ),
    ))
}

fn modulus_bound(ops: &[Operator]) -> Check {
    let mut min_slack = f64::INFINITY;
    let mut rows = 0;
    for f in [TestFunction::Sin, TestFunction::Square, TestFunction::AbsDev(0.5)] {
        for op in ops {
            let r = verify_modulus_bound(op.params(), f.as_fn(), &x_grid(), &opts())?;
            min_slack = min_slack.min(r.min_slack);
            rows += r.rows.len();
        }
    }
    Ok((
        min_slack >= -SLACK_TOL,
        format!("sin, square, absdev(0.5): {rows} points, min slack {min_slack:.2e} (>= -{SLACK_TOL:.0e})"),
    ))
}

fn lipschitz_bound(ops: &[Operator]) -> Check {
    let mut min_slack = f64::INFINITY;
    let mut rows = 0;
    for (f, m, a) in [(TestFunction::AbsDev(0.5), 1.0, 1.0), (TestFunction::Sqrt, 1.0, 0.5)] {
        for op in ops {
            let r = verify_lipschitz_bound(op.params(), f.as_fn(), m, a, &x_grid(), &opts())?;
            min_slack = min_slack.min(r.min_slack);
            rows += r.rows.len();
        }
    }
    Ok((
        min_slack >= -SLACK_TOL,
        format!("absdev(0.5) in Lip_1(1), sqrt in Lip_1(1/2): {rows} points, min slack {min_slack:.2e} (>= -{SLACK_TOL:.0e})"),
    ))
}

fn auxiliary(ops: &[Operator]) -> Check {
    let mut worst = 0.0f64;
    for op in ops {
        let t = op.params().t();
        for x in x_grid().points() {
            worst = worst.max(op.auxiliary_apply(|s| s - (x + t), x).abs());
        }
    }
    Ok((worst <= AUXILIARY_TOL, format!("max |aux(s - (x+t))| = {worst:.2e} (tol {AUXILIARY_TOL:.0e})")))
}

fn ratio_sweep(ns: &[u32], t_points: usize) -> Result<(Sweep, GridSpec)> {
    let seq = QSequence::Ratio;
    let qs = ns.iter().map(|&n| seq.q(n)).collect::<Result<Vec<_>>>()?;
    let square = GridSpec::with_intervals(0.0, 0.5, t_points - 1)?;
    let sweep = Sweep::new(ns.to_vec(), qs, 1.0, 2.0, PowerSeries::new(vec![1.0, 1.0])?, square.points())?;
    Ok((sweep, square))
}

fn local_constant() -> Check {
    let (sweep, square) = ratio_sweep(&[5, 10, 20, 40, 80], 6)?;
    let mut ok = true;
    let mut parts = Vec::new();
    for f in [TestFunction::Sin, TestFunction::Square, TestFunction::AbsDev(0.5)] {
        let r = verify_local_estimate(&sweep, f.as_fn(), &square, &opts())?;
        ok &= r.bounded;
        let cs: Vec<String> = r.c_by_n.iter().map(|(_, c)| format!("{c:.3}")).collect();
        parts.push(format!("{f} C=[{}] bounded={}", cs.join(" "), r.bounded));
    }
    // affine f: residual lhs - omega(|shift|) vanishes
    let r = verify_local_estimate(&sweep, TestFunction::Identity.as_fn(), &square, &opts())?;
    let affine = r.report.rows.iter().map(|row| row.lhs - row.omega.unwrap_or(0.0)).fold(0.0, f64::max);
    ok &= affine <= SLACK_TOL;
    parts.push(format!("identity residual {affine:.1e}"));
    Ok((ok, parts.join("; ")))
}

fn korovkin() -> Check {
    let setup = KorovkinSetup {
        qseq: QSequence::Ratio,
        a: 0.5,
        alpha: 1.0,
        beta: 2.0,
        generator: PowerSeries::new(vec![1.0, 1.0])?,
        n_list: vec![5, 10, 20, 40, 80, 160],
        grid_points: 11,
        eps: 0.01,
        series_tol: SERIES_TOL,
    };
    let t = korovkin_experiment(&setup)?;
    let ok = t.passes(KOROVKIN_E0_TOL);
    let e1: Vec<String> = t.rows.iter().map(|r| format!("{:.3e}", r.errors[1])).collect();
    Ok((
        ok,
        format!(
            "q_n = n/(n+1), a = 0.5: max E0 {:.2e} (tol {KOROVKIN_E0_TOL:.0e}); E1 = [{}]; E1,E2 strictly decreasing {} {}; within K/V thresholds {}",
            t.max_e0(),
            e1.join(" "),
            t.strictly_decreasing(1),
            t.strictly_decreasing(2),
            t.bounds_hold()
        ),
    ))
}

fn witnesses() -> Check {
    let horizon = 10_000usize;
    let mut ok = true;
    let mut parts = Vec::new();
    for seq in [QSequence::Ratio, QSequence::OneMinusInv] {
        let q = seq.q(horizon as u32)?.get();
        let b = q.powi(horizon as i32);
        let near = (b - (-1.0f64).exp()).abs() <= INV_E_TOL;
        let qs: Vec<f64> = (1..=horizon as u32).map(|n| seq.q(n).map(QValue::get)).collect::<Result<_>>()?;
        let prof = st_limit_profile(|k| qs[k - 1], 1.0, 0.01, horizon)?;
        // exceedance indicator is off for every n > 99, so |K_N| = 99 for N >= 99
        let frozen = prof.counts[98..].iter().all(|&c| c == 99);
        let off_beyond = (100..=horizon).all(|n| (qs[n - 1] - 1.0).abs() < 0.01);
        ok &= near && frozen && off_beyond;
        parts.push(format!(
            "{}: q_N^N = {b:.6} (|.-1/e| <= {INV_E_TOL:.0e}: {near}), |K_N| = 99 for N >= 99: {frozen}",
            seq.tag()
        ));
    }
    let sq = prefix_density(is_perfect_square, horizon)?;
    let exact = (1..=horizon).all(|n| sq.prefix_densities[n - 1] == ((n as f64).sqrt().floor()) / n as f64);
    ok &= exact;
    parts.push(format!("square density = floor(sqrt N)/N exactly for N <= {horizon}: {exact}"));
    Ok((ok, parts.join("; ")))
}

fn classical() -> Check {
    let q = QValue::new(0.999)?;
    let pts = GridSpec::new(0.0, 0.5, 0.05)?.points();
    let mut worst = 0.0f64;
    for &t in &pts {
        let op = Operator::new(OperatorParams::new(10, t, 0.0, 0.0, q, PowerSeries::new(vec![1.0])?)?, SERIES_TOL)?;
        for f in [TestFunction::Identity, TestFunction::Square] {
            for &x in &pts {
                worst = worst.max((op.apply(f.as_fn(), x) - classical_favard_szasz(10, t, f.as_fn(), x)).abs());
            }
        }
    }
    Ok((
        worst <= CLASSICAL_TOL,
        format!("q = 0.999, n = 10, identity and square on [0,0.5]^2: max diff {worst:.2e} (tol {CLASSICAL_TOL:.0e})"),
    ))
}

fn read_tree(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

fn determinism() -> Check {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.conf");
    let tmp = tempfile::tempdir().map_err(qszasz::Error::from)?;
    let mut trees = Vec::new();
    let mut stdouts = Vec::new();
    for (i, threads) in ["1", "2"].iter().enumerate() {
        let out = tmp.path().join(format!("run{i}"));
        let st = Command::new(env!("CARGO_BIN_EXE_qszasz"))
            .args(["verify-all", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .env("QSZASZ_THREADS", threads)
            .output()
            .map_err(qszasz::Error::from)?;
        if st.status.code() != Some(0) {
            return Ok((
                false,
                format!("verify-all exited {:?}: {}", st.status.code(), String::from_utf8_lossy(&st.stderr)),
            ));
        }
        trees.push(read_tree(&out));
        let so = Command::new(env!("CARGO_BIN_EXE_qszasz"))
            .args(["moments", "--config"])
            .arg(&config)
            .output()
            .map_err(qszasz::Error::from)?;
        stdouts.push(so.stdout);
    }
    let bytes: usize = trees[0].iter().map(|(_, b)| b.len()).sum();
    let same = trees[0] == trees[1] && stdouts[0] == stdouts[1];
    Ok((
        same,
        format!("two verify-all runs (1 and 2 threads): {} tables, {bytes} bytes, identical: {same}", trees[0].len()),
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let ops = match grid_operators() {
        Ok(ops) => ops,
        Err(e) => {
            println!("FAIL grid construction: {e}");
            return ExitCode::FAILURE;
        }
    };
    let criteria: Vec<Criterion> = vec![
        ("normalization", Box::new(|| normalization(&ops))),
        ("first moment", Box::new(|| first_moment(&ops))),
        ("q-exponential identity", Box::new(exp_identity)),
        ("second moment", Box::new(|| second_moment(&ops))),
        ("modulus bound", Box::new(|| modulus_bound(&ops))),
        ("Lipschitz bound", Box::new(|| lipschitz_bound(&ops))),
        ("auxiliary operator", Box::new(|| auxiliary(&ops))),
        ("local estimate constant", Box::new(local_constant)),
        ("statistical Korovkin", Box::new(korovkin)),
        ("q-sequence witnesses", Box::new(witnesses)),
        ("classical limit", Box::new(classical)),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let (ok, detail) = check().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!ok);
        println!(
            "{} [{:02}] {name}: {detail} ({:.1}s)",
            if ok { "PASS" } else { "FAIL" },
            i + 1,
            t0.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
