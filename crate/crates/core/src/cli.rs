//! Experiment runner behind the `qszasz` binary.
//!
//! Each `run_*` returns named tables plus a pass flag; the binary maps the
//! flag to the exit status. Floats are written as `{:.16e}` (17 significant
//! digits) and rows come out in config order, so output is byte-stable.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::{Command, ExperimentConfig};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::operator::{classical_favard_szasz, Operator, OperatorParams};
use crate::qcore::QValue;
use crate::series::PowerSeries;
use crate::smoothness::{
    verify_lipschitz_bound, verify_local_estimate, verify_modulus_bound, verify_uniform_bound, Bound, BoundReport,
    GridSpec, Sweep, VerifyOptions,
};
use crate::statconv::{is_perfect_square, korovkin_experiment, prefix_density, st_limit_profile, KorovkinSetup};

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.to_string(), header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for row in &self.rows {
            s.push_str(&row.join(","));
            s.push('\n');
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: Command,
    pub tables: Vec<Table>,
    pub pass: bool,
    /// Human-readable summary, one line per check.
    pub summary: Vec<String>,
}

impl Outcome {
    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    /// All tables, each preceded by `# table: <name>`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.tables {
            let _ = writeln!(s, "# table: {}", t.name);
            s.push_str(&t.to_csv());
        }
        s
    }

    /// Writes `<dir>/<table>.csv` for every table.
    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        for t in &self.tables {
            fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?;
        }
        Ok(())
    }
}

pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_real).unwrap_or_default()
}

fn fmt_coeffs(c: &[f64]) -> String {
    c.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

fn check_line(name: &str, ok: bool, detail: String) -> String {
    format!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" })
}

/// One entry of the fixed-q parameter grid.
struct GridCase {
    q: f64,
    n: u32,
    t: f64,
    alpha: f64,
    beta: f64,
    a: Vec<f64>,
}

fn grid_cases(cfg: &ExperimentConfig) -> Vec<GridCase> {
    let mut cases = Vec::new();
    for &q in &cfg.q_list {
        for &n in &cfg.n_list {
            for &t in &cfg.t_list {
                for &(alpha, beta) in &cfg.stancu {
                    for a in &cfg.a_coeffs {
                        cases.push(GridCase { q, n, t, alpha, beta, a: a.clone() });
                    }
                }
            }
        }
    }
    cases
}

fn case_params(cfg: &ExperimentConfig, c: &GridCase) -> Result<OperatorParams> {
    let q = QValue::new(c.q)?;
    let a = PowerSeries::new(c.a.clone())?;
    if cfg.relax_stancu {
        OperatorParams::new_relaxed(c.n, c.t, c.alpha, c.beta, q, a)
    } else {
        OperatorParams::new(c.n, c.t, c.alpha, c.beta, q, a)
    }
}

fn case_cells(c: &GridCase) -> Vec<String> {
    vec![fmt_real(c.q), c.n.to_string(), fmt_real(c.t), fmt_real(c.alpha), fmt_real(c.beta), fmt_coeffs(&c.a)]
}

const CASE_HEADER: [&str; 6] = ["q", "n", "t", "alpha", "beta", "a_coeffs"];

pub fn run_moments(cfg: &ExperimentConfig) -> Result<Outcome> {
    let mut header: Vec<&str> = CASE_HEADER.to_vec();
    header.extend([
        "x",
        "v",
        "oracle",
        "closed_form",
        "abs_diff",
        "derived",
        "checked",
        "central_oracle",
        "central_derived",
        "central_lead_square",
        "central_lead_beta",
        "lead_square_matches",
        "lead_beta_matches",
    ]);
    let mut table = Table::new("moments", &header);
    let xs = cfg.x_grid().points();
    let (mut worst0, mut worst1) = (0.0f64, 0.0f64);
    for case in grid_cases(cfg) {
        let op = Operator::new(case_params(cfg, &case)?, cfg.series_tol)?;
        let cmp = op.delta_comparison()?;
        let p = op.params();
        let den = p.denom();
        let sums = crate::series::kernel_sums(p.a(), p.q(), p.y())?;
        let m2_offset = (p.alpha() * p.alpha() + 2.0 * p.alpha() * sums.first + sums.second_derived) / (den * den);
        for &x in &xs {
            for v in 0..3u32 {
                let rep = op.moment_report(v, x)?;
                let derived = match v {
                    0 => 1.0,
                    1 => x + op.mean_offset(),
                    _ => x * x + 2.0 * x * op.mean_offset() + m2_offset,
                };
                match v {
                    0 => worst0 = worst0.max(rep.abs_diff),
                    1 => worst1 = worst1.max(rep.abs_diff),
                    _ => {}
                }
                let mut row = case_cells(&case);
                row.extend([
                    fmt_real(x),
                    v.to_string(),
                    fmt_real(rep.oracle),
                    fmt_real(rep.closed_form),
                    fmt_real(rep.abs_diff),
                    fmt_real(derived),
                    (v < 2).to_string(),
                    fmt_real(cmp.oracle),
                    fmt_real(cmp.derived),
                    fmt_real(cmp.lead_square),
                    fmt_real(cmp.lead_beta),
                    cmp.lead_square_matches.to_string(),
                    cmp.lead_beta_matches.to_string(),
                ]);
                table.push(row);
            }
        }
    }
    let ok0 = worst0 <= cfg.e0_tol;
    let ok1 = worst1 <= cfg.moment_tol;
    let summary = vec![
        check_line("moments v=0", ok0, format!("max |oracle - 1| = {worst0:.3e} (tol {:.1e})", cfg.e0_tol)),
        check_line(
            "moments v=1",
            ok1,
            format!("max |oracle - closed_form| = {worst1:.3e} (tol {:.1e})", cfg.moment_tol),
        ),
    ];
    Ok(Outcome { command: Command::Moments, tables: vec![table], pass: ok0 && ok1, summary })
}

const BOUND_HEADER: [&str; 21] = [
    "bound",
    "function",
    "m",
    "holder_alpha",
    "q",
    "n",
    "t",
    "alpha",
    "beta",
    "a_coeffs",
    "x",
    "lhs",
    "rhs",
    "slack",
    "pass",
    "delta_oracle",
    "delta_closed_form",
    "omega",
    "omega2",
    "omega2_at_delta",
    "flag",
];

struct BoundContext<'a> {
    function: TestFunction,
    holder: Option<(f64, f64)>,
    alpha: f64,
    beta: f64,
    a: &'a [f64],
}

fn push_bound_rows(table: &mut Table, report: &BoundReport, ctx: &BoundContext) {
    for r in &report.rows {
        let (m, ha) = match ctx.holder {
            Some((m, ha)) => (fmt_real(m), fmt_real(ha)),
            None => (String::new(), String::new()),
        };
        table.push(vec![
            report.bound.tag().to_string(),
            ctx.function.to_string(),
            m,
            ha,
            fmt_real(r.q),
            r.n.to_string(),
            fmt_real(r.t),
            fmt_real(ctx.alpha),
            fmt_real(ctx.beta),
            fmt_coeffs(ctx.a),
            fmt_real(r.x),
            fmt_real(r.lhs),
            fmt_real(r.rhs),
            fmt_real(r.slack),
            (r.slack >= -report.tolerance).to_string(),
            fmt_real(r.delta_oracle),
            fmt_opt(r.delta_closed_form),
            fmt_opt(r.omega),
            fmt_opt(r.omega2),
            fmt_opt(r.omega2_at_delta),
            r.flag.to_string(),
        ]);
    }
}

/// Running per-(bound, function) aggregate for the summary table.
struct Aggregate {
    bound: Bound,
    function: TestFunction,
    reports: usize,
    rows: usize,
    all_pass: bool,
    min_slack: f64,
    empirical_c: Option<f64>,
    bounded: Option<bool>,
    note: String,
}

impl Aggregate {
    fn new(bound: Bound, function: TestFunction) -> Self {
        Aggregate {
            bound,
            function,
            reports: 0,
            rows: 0,
            all_pass: true,
            min_slack: f64::INFINITY,
            empirical_c: None,
            bounded: None,
            note: String::new(),
        }
    }

    fn add(&mut self, report: &BoundReport) {
        self.reports += 1;
        self.rows += report.rows.len();
        self.all_pass &= report.all_pass;
        self.min_slack = self.min_slack.min(report.min_slack);
        self.note = report.note.clone();
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.bound.tag().to_string(),
            self.function.to_string(),
            self.reports.to_string(),
            self.rows.to_string(),
            self.all_pass.to_string(),
            fmt_real(self.min_slack),
            fmt_opt(self.empirical_c),
            self.bounded.map(|b| b.to_string()).unwrap_or_default(),
            self.note.replace(',', ";"),
        ]
    }
}

fn options(cfg: &ExperimentConfig) -> VerifyOptions {
    VerifyOptions { series_tol: cfg.series_tol, report_tol: cfg.report_tol }
}

/// The `n`-indexed sweep along the configured q-sequence on `[0, a]^2`.
fn config_sweep(cfg: &ExperimentConfig) -> Result<(Sweep, GridSpec)> {
    let qs = cfg.sweep_n_list.iter().map(|&n| cfg.q_sequence.q(n)).collect::<Result<Vec<_>>>()?;
    let square = GridSpec::with_intervals(0.0, cfg.interval, cfg.grid_points - 1)?;
    let sweep = Sweep::new(
        cfg.sweep_n_list.clone(),
        qs,
        cfg.sweep_alpha,
        cfg.sweep_beta,
        cfg.sweep_generator(),
        square.points(),
    )?;
    Ok((sweep, square))
}

pub fn run_bounds(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = options(cfg);
    let x_grid = cfg.x_grid();
    let mut table = Table::new("bounds", &BOUND_HEADER);
    let mut summary_table = Table::new(
        "bounds_summary",
        &["bound", "function", "reports", "rows", "all_pass", "min_slack", "empirical_c", "bounded", "note"],
    );
    let mut constants = Table::new("local_constants", &["function", "n", "q", "c"]);
    let mut aggregates: Vec<Aggregate> = Vec::new();
    let cases = grid_cases(cfg);

    for &bound in &cfg.checks {
        match bound {
            Bound::Modulus => {
                for &f in &cfg.functions {
                    let mut agg = Aggregate::new(bound, f);
                    for case in &cases {
                        let report = verify_modulus_bound(&case_params(cfg, case)?, f.as_fn(), &x_grid, &opts)?;
                        let ctx =
                            BoundContext { function: f, holder: None, alpha: case.alpha, beta: case.beta, a: &case.a };
                        push_bound_rows(&mut table, &report, &ctx);
                        agg.add(&report);
                    }
                    aggregates.push(agg);
                }
            }
            Bound::Lipschitz => {
                for spec in &cfg.lipschitz {
                    let mut agg = Aggregate::new(bound, spec.function);
                    for case in &cases {
                        let report = verify_lipschitz_bound(
                            &case_params(cfg, case)?,
                            spec.function.as_fn(),
                            spec.m,
                            spec.alpha,
                            &x_grid,
                            &opts,
                        )?;
                        let ctx = BoundContext {
                            function: spec.function,
                            holder: Some((spec.m, spec.alpha)),
                            alpha: case.alpha,
                            beta: case.beta,
                            a: &case.a,
                        };
                        push_bound_rows(&mut table, &report, &ctx);
                        agg.add(&report);
                    }
                    aggregates.push(agg);
                }
            }
            Bound::Uniform | Bound::Local => {
                let (sweep, square) = config_sweep(cfg)?;
                for &f in &cfg.functions {
                    let mut agg = Aggregate::new(bound, f);
                    let report = if bound == Bound::Uniform {
                        verify_uniform_bound(&sweep, f.as_fn(), &square, &opts)?
                    } else {
                        let r51 = verify_local_estimate(&sweep, f.as_fn(), &square, &opts)?;
                        for &(n, c) in &r51.c_by_n {
                            let q = cfg.q_sequence.q(n)?.get();
                            constants.push(vec![f.to_string(), n.to_string(), fmt_real(q), fmt_real(c)]);
                        }
                        agg.empirical_c = Some(r51.empirical_c);
                        agg.bounded = Some(r51.bounded);
                        r51.report
                    };
                    let ctx = BoundContext {
                        function: f,
                        holder: None,
                        alpha: cfg.sweep_alpha,
                        beta: cfg.sweep_beta,
                        a: &cfg.sweep_a_coeffs,
                    };
                    push_bound_rows(&mut table, &report, &ctx);
                    agg.add(&report);
                    aggregates.push(agg);
                }
            }
        }
    }

    let mut pass = true;
    let mut summary = Vec::new();
    for agg in &aggregates {
        summary_table.push(agg.cells());
        let guaranteed = matches!(agg.bound, Bound::Modulus | Bound::Lipschitz);
        if guaranteed {
            pass &= agg.all_pass;
        }
        let mut detail = format!("min slack {:.3e} over {} rows", agg.min_slack, agg.rows);
        if let Some(c) = agg.empirical_c {
            let _ = write!(detail, ", empirical C {c:.3e}");
        }
        if !guaranteed {
            detail.push_str(" (informational)");
        }
        summary.push(check_line(&format!("{} {}", agg.bound.tag(), agg.function), agg.all_pass, detail));
    }
    let mut tables = vec![table, summary_table];
    if !constants.rows.is_empty() {
        tables.push(constants);
    }
    Ok(Outcome { command: Command::Bounds, tables, pass, summary })
}

pub fn run_statconv(cfg: &ExperimentConfig) -> Result<Outcome> {
    let setup = KorovkinSetup {
        qseq: cfg.q_sequence.clone(),
        a: cfg.interval,
        alpha: cfg.sweep_alpha,
        beta: cfg.sweep_beta,
        generator: cfg.sweep_generator(),
        n_list: cfg.sweep_n_list.clone(),
        grid_points: cfg.grid_points,
        eps: cfg.eps,
        series_tol: cfg.series_tol,
    };
    let kt = korovkin_experiment(&setup)?;
    let mut korovkin = Table::new(
        "korovkin",
        &[
            "n",
            "q",
            "e0",
            "e1",
            "e2",
            "r_max",
            "k1",
            "k2",
            "e1_bound",
            "v1",
            "v2",
            "v3",
            "v4",
            "e2_bound",
            "e2_display_bound",
            "inv_den",
            "nq_den2",
            "qnq_den2",
            "e1_within",
            "e2_within",
        ],
    );
    for r in &kt.rows {
        let mut row = vec![r.n.to_string(), fmt_real(r.q)];
        row.extend(r.errors.iter().map(|&e| fmt_real(e)));
        row.push(fmt_real(r.r_max));
        row.extend(r.k_terms.iter().map(|&e| fmt_real(e)));
        row.push(fmt_real(r.e1_bound()));
        row.extend(r.v_terms.iter().map(|&e| fmt_real(e)));
        row.push(fmt_real(r.e2_bound()));
        row.push(fmt_real(r.e2_display_bound));
        row.extend(r.vanishing.iter().map(|&e| fmt_real(e)));
        row.push((r.errors[1] <= r.e1_bound()).to_string());
        row.push((r.errors[2] <= r.e2_bound()).to_string());
        korovkin.push(row);
    }

    let mut profiles = Table::new("korovkin_density", &["v", "position", "n", "count", "density"]);
    for (v, prof) in kt.profiles.iter().enumerate() {
        for (i, (&count, &d)) in prof.counts.iter().zip(&prof.prefix_densities).enumerate() {
            profiles.push(vec![
                v.to_string(),
                (i + 1).to_string(),
                kt.rows[i].n.to_string(),
                count.to_string(),
                fmt_real(d),
            ]);
        }
    }

    // Monotone and non-monotone test functions side by side; only reported.
    let mut functions = Table::new("korovkin_functions", &["function", "monotone", "n", "q", "sup_error"]);
    let square = GridSpec::with_intervals(0.0, cfg.interval, cfg.grid_points - 1)?.points();
    for &f in &cfg.functions {
        let probe = GridSpec::with_intervals(0.0, 3.0 * cfg.interval, 600)?.points();
        let monotone = probe.windows(2).all(|w| f.eval(w[1]) >= f.eval(w[0]));
        for &n in &cfg.sweep_n_list {
            let q = cfg.q_sequence.q(n)?;
            let mut sup = 0.0f64;
            for &t in &square {
                let p = OperatorParams::new_relaxed(n, t, cfg.sweep_alpha, cfg.sweep_beta, q, cfg.sweep_generator())?;
                let op = Operator::new(p, cfg.series_tol)?;
                for &x in &square {
                    sup = sup.max((op.apply(f.as_fn(), x) - f.eval(x + t)).abs());
                }
            }
            functions.push(vec![f.to_string(), monotone.to_string(), n.to_string(), fmt_real(q.get()), fmt_real(sup)]);
        }
    }

    let adm = cfg.q_sequence.admissibility(cfg.horizon, cfg.eps)?;
    let mut admissibility =
        Table::new("admissibility", &["kind", "horizon", "eps", "b", "q_to_one", "power_limit", "admissible"]);
    admissibility.push(vec![
        cfg.q_sequence.tag().to_string(),
        cfg.horizon.to_string(),
        fmt_real(cfg.eps),
        fmt_real(adm.b),
        adm.q_to_one.to_string(),
        adm.power_limit.to_string(),
        adm.admissible.to_string(),
    ]);

    let h = cfg.horizon;
    let squares = prefix_density(is_perfect_square, h)?;
    let harmonic = st_limit_profile(|k| 1.0 / k as f64, 0.0, cfg.eps, h)?;
    let q_exceed = match &cfg.q_sequence {
        crate::statconv::QSequence::Custom(_) => None,
        kind => {
            let qs = (1..=h as u32).map(|n| kind.q(n).map(QValue::get)).collect::<Result<Vec<_>>>()?;
            Some(st_limit_profile(|k| qs[k - 1], 1.0, cfg.eps, h)?)
        }
    };
    let mut density = Table::new(
        "density",
        &[
            "n",
            "squares_count",
            "squares_density",
            "floor_sqrt_over_n",
            "q_exceed_count",
            "q_exceed_density",
            "harmonic_count",
            "harmonic_density",
        ],
    );
    let mut squares_exact = true;
    for i in 0..h {
        let n = i + 1;
        let floor_sqrt = (n as f64).sqrt().floor() as usize;
        let expected = floor_sqrt as f64 / n as f64;
        squares_exact &= squares.counts[i] == floor_sqrt && squares.prefix_densities[i] == expected;
        density.push(vec![
            n.to_string(),
            squares.counts[i].to_string(),
            fmt_real(squares.prefix_densities[i]),
            fmt_real(expected),
            q_exceed.as_ref().map(|p| p.counts[i].to_string()).unwrap_or_default(),
            fmt_opt(q_exceed.as_ref().map(|p| p.prefix_densities[i])),
            harmonic.counts[i].to_string(),
            fmt_real(harmonic.prefix_densities[i]),
        ]);
    }

    let kor_ok = kt.passes(cfg.e0_tol);
    let summary = vec![
        check_line(
            "korovkin",
            kor_ok,
            format!(
                "max E0 {:.3e}, E1 decreasing {}, E2 decreasing {}, thresholds hold {}",
                kt.max_e0(),
                kt.strictly_decreasing(1),
                kt.strictly_decreasing(2),
                kt.bounds_hold()
            ),
        ),
        check_line(
            "q-sequence admissibility",
            adm.admissible,
            format!("{} with b = q_N^N = {:.6} at N = {}", cfg.q_sequence.tag(), adm.b, cfg.horizon),
        ),
        check_line("square-indicator density", squares_exact, format!("floor(sqrt n)/n for n <= {h}")),
    ];
    Ok(Outcome {
        command: Command::Statconv,
        tables: vec![korovkin, profiles, functions, admissibility, density],
        pass: kor_ok && adm.admissible && squares_exact,
        summary,
    })
}

pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Outcome> {
    let opts = options(cfg);
    let (sweep, square) = config_sweep(cfg)?;
    let mut table = Table::new(
        "sweep",
        &[
            "function",
            "n",
            "q",
            "sup_error",
            "at_x",
            "at_t",
            "delta_max",
            "delta_closed_form_max",
            "rhs",
            "pass",
            "observed_order",
        ],
    );
    let mut sweep_ok = true;
    let mut summary = Vec::new();
    for &f in &cfg.functions {
        let report = verify_uniform_bound(&sweep, f.as_fn(), &square, &opts)?;
        sweep_ok &= report.all_pass;
        let mut prev: Option<(u32, f64)> = None;
        for r in &report.rows {
            let order = prev
                .filter(|&(_, e)| e > 0.0 && r.lhs > 0.0)
                .map(|(n0, e0)| (e0 / r.lhs).ln() / (r.n as f64 / n0 as f64).ln());
            prev = Some((r.n, r.lhs));
            table.push(vec![
                f.to_string(),
                r.n.to_string(),
                fmt_real(r.q),
                fmt_real(r.lhs),
                fmt_real(r.x),
                fmt_real(r.t),
                fmt_real(r.delta_oracle),
                fmt_opt(r.delta_closed_form),
                fmt_real(r.rhs),
                (r.slack >= -report.tolerance).to_string(),
                fmt_opt(order),
            ]);
        }
        summary.push(check_line(
            &format!("sweep {f}"),
            report.all_pass,
            format!("sup error within 2 omega(sqrt delta), min slack {:.3e}", report.min_slack),
        ));
    }

    let mut classical = Table::new("classical", &["function", "x", "t", "q_value", "classical", "abs_diff"]);
    let q = QValue::new(cfg.classical_q)?;
    let mut worst = 0.0f64;
    for f in [TestFunction::Identity, TestFunction::Square] {
        for &t in &square.points() {
            let p = OperatorParams::new(cfg.classical_n, t, 0.0, 0.0, q, PowerSeries::new(vec![1.0])?)?;
            let op = Operator::new(p, cfg.series_tol)?;
            for &x in &square.points() {
                let qv = op.apply(f.as_fn(), x);
                let cv = classical_favard_szasz(cfg.classical_n, t, f.as_fn(), x);
                let d = (qv - cv).abs();
                worst = worst.max(d);
                classical.push(vec![f.to_string(), fmt_real(x), fmt_real(t), fmt_real(qv), fmt_real(cv), fmt_real(d)]);
            }
        }
    }
    let classical_ok = worst <= cfg.classical_tol;
    summary.push(check_line(
        "classical limit",
        classical_ok,
        format!(
            "max |q-value - classical| = {worst:.3e} at q = {}, n = {} (tol {:.1e})",
            cfg.classical_q, cfg.classical_n, cfg.classical_tol
        ),
    ));
    Ok(Outcome { command: Command::Sweep, tables: vec![table, classical], pass: sweep_ok && classical_ok, summary })
}

pub fn run_verify_all(cfg: &ExperimentConfig) -> Result<Outcome> {
    let parts = [run_moments(cfg)?, run_bounds(cfg)?, run_statconv(cfg)?, run_sweep(cfg)?];
    let pass = parts.iter().all(|o| o.pass);
    let mut tables = Vec::new();
    let mut summary = Vec::new();
    for o in parts {
        tables.extend(o.tables);
        summary.extend(o.summary);
    }
    Ok(Outcome { command: Command::VerifyAll, tables, pass, summary })
}

pub fn run(command: Command, cfg: &ExperimentConfig) -> Result<Outcome> {
    match command {
        Command::Moments => run_moments(cfg),
        Command::Bounds => run_bounds(cfg),
        Command::Statconv => run_statconv(cfg),
        Command::Sweep => run_sweep(cfg),
        Command::VerifyAll => run_verify_all(cfg),
    }
}

/// Exit status for a finished run: 0 pass, 1 verification failure.
pub fn exit_code(outcome: &Outcome) -> i32 {
    if outcome.pass {
        0
    } else {
        1
    }
}

/// Exit status for an error: 2 for config and I/O problems, 1 otherwise.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::Config { .. } | Error::Io(_) | Error::InvalidParameter(_) | Error::Precondition(_) => 2,
        _ => 1,
    }
}
