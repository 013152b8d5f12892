//! Flat `key = value` experiment configs.
//!
//! ```text
//! # fixed-q grid
//! q_list = 0.3, 0.6, 0.9, 0.99
//! n_list = 2, 5, 10, 20
//! stancu = 0:0, 1:2            # alpha:beta pairs
//! a_coeffs = 1; 1, 1; 2, 1, 0.5  # one generator A per `;`
//! ```
//!
//! Every key is optional; omitted keys take the values of
//! [`ExperimentConfig::default`]. Violations of operator invariants are
//! reported with the line of the offending key.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::qcore::QValue;
use crate::series::PowerSeries;
use crate::smoothness::{Bound, GridSpec};
use crate::statconv::QSequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Moments,
    Bounds,
    Statconv,
    Sweep,
    VerifyAll,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Moments => "moments",
            Command::Bounds => "bounds",
            Command::Statconv => "statconv",
            Command::Sweep => "sweep",
            Command::VerifyAll => "verify-all",
        }
    }
}

impl FromStr for Command {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "moments" => Command::Moments,
            "bounds" => Command::Bounds,
            "statconv" => Command::Statconv,
            "sweep" => Command::Sweep,
            "verify-all" => Command::VerifyAll,
            other => return Err(Error::InvalidParameter(format!("unknown command `{other}`"))),
        })
    }
}

/// A test function with its Hölder constants, `f:M:alpha`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzSpec {
    pub function: TestFunction,
    pub m: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Option<Command>,
    // fixed-q grid
    pub q_list: Vec<f64>,
    pub n_list: Vec<u32>,
    pub t_list: Vec<f64>,
    pub stancu: Vec<(f64, f64)>,
    pub relax_stancu: bool,
    pub a_coeffs: Vec<Vec<f64>>,
    pub x_lo: f64,
    pub x_hi: f64,
    pub x_step: f64,
    // n sweeps along a q-sequence on [0, a]^2
    pub q_sequence: QSequence,
    pub sweep_n_list: Vec<u32>,
    pub sweep_alpha: f64,
    pub sweep_beta: f64,
    pub sweep_a_coeffs: Vec<f64>,
    pub interval: f64,
    pub grid_points: usize,
    // verifiers
    pub functions: Vec<TestFunction>,
    pub lipschitz: Vec<LipschitzSpec>,
    pub checks: Vec<Bound>,
    // tolerances
    pub series_tol: f64,
    pub report_tol: f64,
    pub moment_tol: f64,
    pub e0_tol: f64,
    // densities
    pub eps: f64,
    pub horizon: usize,
    // classical comparison
    pub classical_q: f64,
    pub classical_n: u32,
    pub classical_tol: f64,
    pub out: Option<String>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            command: None,
            q_list: vec![0.3, 0.6, 0.9, 0.99],
            n_list: vec![2, 5, 10, 20],
            t_list: vec![0.0, 0.25, 0.5],
            stancu: vec![(0.0, 0.0), (1.0, 2.0)],
            relax_stancu: false,
            a_coeffs: vec![vec![1.0], vec![1.0, 1.0], vec![2.0, 1.0, 0.5]],
            x_lo: 0.0,
            x_hi: 0.5,
            x_step: 0.05,
            q_sequence: QSequence::Ratio,
            sweep_n_list: vec![5, 10, 20, 40, 80, 160],
            sweep_alpha: 1.0,
            sweep_beta: 2.0,
            sweep_a_coeffs: vec![1.0, 1.0],
            interval: 0.5,
            grid_points: 11,
            functions: vec![TestFunction::Sin, TestFunction::Square, TestFunction::AbsDev(0.5)],
            lipschitz: vec![
                LipschitzSpec { function: TestFunction::AbsDev(0.5), m: 1.0, alpha: 1.0 },
                LipschitzSpec { function: TestFunction::Sqrt, m: 1.0, alpha: 0.5 },
            ],
            checks: vec![Bound::Modulus, Bound::Uniform, Bound::Lipschitz, Bound::Local],
            series_tol: 1e-13,
            report_tol: 1e-9,
            moment_tol: 1e-8,
            e0_tol: 1e-10,
            eps: 0.01,
            horizon: 10_000,
            classical_q: 0.999,
            classical_n: 10,
            classical_tol: 1e-2,
            out: None,
        }
    }
}

fn cfg_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config { line, message: message.into() }
}

fn list<T, F: Fn(&str) -> std::result::Result<T, String>>(
    raw: &str,
    sep: char,
    item: F,
) -> std::result::Result<Vec<T>, String> {
    raw.split(sep).map(str::trim).filter(|s| !s.is_empty()).map(item).collect()
}

fn real(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a real number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn integer<T: FromStr>(s: &str) -> std::result::Result<T, String> {
    s.trim().parse().map_err(|_| format!("`{s}` is not a nonnegative integer"))
}

fn boolean(s: &str) -> std::result::Result<bool, String> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(format!("`{other}` is not true/false")),
    }
}

fn function(s: &str) -> std::result::Result<TestFunction, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn pair(s: &str) -> std::result::Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("`{s}` is not an alpha:beta pair"))?;
    Ok((real(a)?, real(b)?))
}

fn lipschitz_item(s: &str) -> std::result::Result<LipschitzSpec, String> {
    let parts: Vec<&str> = s.rsplitn(3, ':').collect();
    if parts.len() != 3 {
        return Err(format!("`{s}` is not function:M:alpha"));
    }
    Ok(LipschitzSpec { function: function(parts[2])?, m: real(parts[1])?, alpha: real(parts[0])? })
}

fn join<T, F: Fn(&T) -> String>(items: &[T], sep: &str, f: F) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(sep)
}

const KEYS: &[&str] = &[
    "command",
    "q_list",
    "n_list",
    "t_list",
    "stancu",
    "relax_stancu",
    "a_coeffs",
    "x_lo",
    "x_hi",
    "x_step",
    "q_sequence",
    "q_values",
    "sweep_n_list",
    "sweep_alpha",
    "sweep_beta",
    "sweep_a_coeffs",
    "interval",
    "grid_points",
    "functions",
    "lipschitz",
    "checks",
    "series_tol",
    "report_tol",
    "moment_tol",
    "e0_tol",
    "eps",
    "horizon",
    "classical_q",
    "classical_n",
    "classical_tol",
    "out",
];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| cfg_err(line, format!("expected `key = value`, got `{content}`")))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(cfg_err(line, format!("unknown key `{key}`")));
            }
            if let Some((prev, _)) = entries.get(key) {
                return Err(cfg_err(line, format!("duplicate key `{key}` (first set on line {prev})")));
            }
            entries.insert(key.to_string(), (line, value.trim().to_string()));
        }

        let mut cfg = ExperimentConfig::default();
        let line_of = |k: &str| entries.get(k).map(|(l, _)| *l).unwrap_or(0);
        macro_rules! field {
            ($key:literal, $parse:expr, $target:expr) => {
                if let Some((line, raw)) = entries.get($key) {
                    $target = $parse(raw.as_str()).map_err(|m: String| cfg_err(*line, format!("{}: {m}", $key)))?;
                }
            };
        }
        field!("command", |s: &str| s.parse::<Command>().map(Some).map_err(|e| e.to_string()), cfg.command);
        field!("q_list", |s| list(s, ',', real), cfg.q_list);
        field!("n_list", |s| list(s, ',', integer::<u32>), cfg.n_list);
        field!("t_list", |s| list(s, ',', real), cfg.t_list);
        field!("stancu", |s| list(s, ',', pair), cfg.stancu);
        field!("relax_stancu", boolean, cfg.relax_stancu);
        field!("a_coeffs", |s| list(s, ';', |g| list(g, ',', real)), cfg.a_coeffs);
        field!("x_lo", real, cfg.x_lo);
        field!("x_hi", real, cfg.x_hi);
        field!("x_step", real, cfg.x_step);
        field!("sweep_n_list", |s| list(s, ',', integer::<u32>), cfg.sweep_n_list);
        field!("sweep_alpha", real, cfg.sweep_alpha);
        field!("sweep_beta", real, cfg.sweep_beta);
        field!("sweep_a_coeffs", |s| list(s, ',', real), cfg.sweep_a_coeffs);
        field!("interval", real, cfg.interval);
        field!("grid_points", integer::<usize>, cfg.grid_points);
        field!("functions", |s| list(s, ',', function), cfg.functions);
        field!("lipschitz", |s| list(s, ',', lipschitz_item), cfg.lipschitz);
        field!(
            "checks",
            |s| list(s, ',', |t| Bound::from_tag(t).ok_or_else(|| format!("unknown check `{t}`"))),
            cfg.checks
        );
        field!("series_tol", real, cfg.series_tol);
        field!("report_tol", real, cfg.report_tol);
        field!("moment_tol", real, cfg.moment_tol);
        field!("e0_tol", real, cfg.e0_tol);
        field!("eps", real, cfg.eps);
        field!("horizon", integer::<usize>, cfg.horizon);
        field!("classical_q", real, cfg.classical_q);
        field!("classical_n", integer::<u32>, cfg.classical_n);
        field!("classical_tol", real, cfg.classical_tol);
        field!("out", |s: &str| Ok::<_, String>(Some(s.to_string())), cfg.out);

        let seq_line = line_of("q_sequence");
        let kind = entries.get("q_sequence").map(|(_, v)| v.as_str()).unwrap_or("ratio");
        cfg.q_sequence = match kind {
            "ratio" => QSequence::Ratio,
            "one_minus_inv" => QSequence::OneMinusInv,
            "custom" => {
                let (line, raw) =
                    entries.get("q_values").ok_or_else(|| cfg_err(seq_line, "q_sequence = custom needs q_values"))?;
                let values = list(raw, ',', real).map_err(|m| cfg_err(*line, format!("q_values: {m}")))?;
                if values.len() != cfg.sweep_n_list.len() {
                    return Err(cfg_err(
                        *line,
                        format!(
                            "q_values has {} entries but sweep_n_list has {}",
                            values.len(),
                            cfg.sweep_n_list.len()
                        ),
                    ));
                }
                QSequence::Custom(cfg.sweep_n_list.iter().copied().zip(values).collect())
            }
            other => return Err(cfg_err(seq_line, format!("unknown q_sequence `{other}`"))),
        };
        if !matches!(cfg.q_sequence, QSequence::Custom(_)) && entries.contains_key("q_values") {
            return Err(cfg_err(line_of("q_values"), "q_values is only used with q_sequence = custom"));
        }

        cfg.validate(&line_of)?;
        Ok(cfg)
    }

    /// Checks every operator invariant the commands rely on.
    fn validate(&self, line_of: &dyn Fn(&str) -> usize) -> Result<()> {
        let nonempty = |key: &str, len: usize| {
            if len == 0 {
                Err(cfg_err(line_of(key), format!("{key} must not be empty")))
            } else {
                Ok(())
            }
        };
        nonempty("q_list", self.q_list.len())?;
        nonempty("n_list", self.n_list.len())?;
        nonempty("t_list", self.t_list.len())?;
        nonempty("stancu", self.stancu.len())?;
        nonempty("a_coeffs", self.a_coeffs.len())?;
        nonempty("sweep_n_list", self.sweep_n_list.len())?;
        nonempty("functions", self.functions.len())?;

        for &q in &self.q_list {
            QValue::new(q).map_err(|e| cfg_err(line_of("q_list"), e.to_string()))?;
        }
        QValue::new(self.classical_q).map_err(|e| cfg_err(line_of("classical_q"), e.to_string()))?;
        for (key, ns) in [("n_list", &self.n_list), ("sweep_n_list", &self.sweep_n_list)] {
            if ns.contains(&0) {
                return Err(cfg_err(line_of(key), format!("{key}: n must be >= 1")));
            }
            if ns.windows(2).any(|w| w[1] <= w[0]) {
                return Err(cfg_err(line_of(key), format!("{key} must be strictly increasing")));
            }
        }
        if self.classical_n == 0 {
            return Err(cfg_err(line_of("classical_n"), "classical_n must be >= 1"));
        }
        if let Some(&t) = self.t_list.iter().find(|&&t| t < 0.0) {
            return Err(cfg_err(line_of("t_list"), format!("t must be >= 0, got {t}")));
        }
        for &(alpha, beta) in &self.stancu {
            check_stancu(alpha, beta, self.relax_stancu).map_err(|m| cfg_err(line_of("stancu"), m))?;
        }
        check_stancu(self.sweep_alpha, self.sweep_beta, self.relax_stancu)
            .map_err(|m| cfg_err(line_of("sweep_alpha").max(line_of("sweep_beta")), m))?;
        for coeffs in &self.a_coeffs {
            check_generator(coeffs).map_err(|m| cfg_err(line_of("a_coeffs"), m))?;
        }
        check_generator(&self.sweep_a_coeffs).map_err(|m| cfg_err(line_of("sweep_a_coeffs"), m))?;

        if self.x_lo < 0.0 {
            return Err(cfg_err(line_of("x_lo"), "x_lo must be >= 0"));
        }
        GridSpec::new(self.x_lo, self.x_hi, self.x_step)
            .map_err(|e| cfg_err(line_of("x_step").max(line_of("x_hi")), e.to_string()))?;
        if self.interval.is_nan() || self.interval <= 0.0 {
            return Err(cfg_err(line_of("interval"), "interval must be > 0"));
        }
        if self.grid_points < 2 {
            return Err(cfg_err(line_of("grid_points"), "grid_points must be >= 2"));
        }

        for &q in &self.q_list {
            for &n in &self.n_list {
                for &t in &self.t_list {
                    let reach = t * (1.0 - q.powi(n as i32));
                    if reach >= 1.0 {
                        return Err(cfg_err(
                            line_of("t_list"),
                            format!("t(1 - q^n) = {reach} >= 1 at q = {q}, n = {n}, t = {t}"),
                        ));
                    }
                }
            }
        }
        for &n in &self.sweep_n_list {
            let q = self
                .q_sequence
                .q(n)
                .map_err(|e| cfg_err(line_of("q_values").max(line_of("q_sequence")), e.to_string()))?
                .get();
            let reach = self.interval * (1.0 - q.powi(n as i32));
            if reach >= 1.0 {
                return Err(cfg_err(
                    line_of("interval").max(line_of("q_values")),
                    format!("a(1 - q_n^n) = {reach} >= 1 at n = {n}, q_n = {q}; e_q diverges on [0, a]"),
                ));
            }
        }

        for spec in &self.lipschitz {
            if !(spec.m > 0.0 && spec.alpha > 0.0 && spec.alpha <= 1.0) {
                return Err(cfg_err(line_of("lipschitz"), format!("{}: need M > 0 and 0 < alpha <= 1", spec.function)));
            }
        }
        if self.checks.contains(&Bound::Lipschitz) && self.lipschitz.is_empty() {
            return Err(cfg_err(
                line_of("checks").max(line_of("lipschitz")),
                "lipschitz check requested but no Lipschitz constants given (lipschitz = f:M:alpha, ...)",
            ));
        }
        for (key, v) in [
            ("series_tol", self.series_tol),
            ("report_tol", self.report_tol),
            ("moment_tol", self.moment_tol),
            ("e0_tol", self.e0_tol),
            ("eps", self.eps),
            ("classical_tol", self.classical_tol),
        ] {
            if v.is_nan() || v <= 0.0 {
                return Err(cfg_err(line_of(key), format!("{key} must be > 0")));
            }
        }
        if self.horizon == 0 {
            return Err(cfg_err(line_of("horizon"), "horizon must be >= 1"));
        }
        Ok(())
    }

    pub fn x_grid(&self) -> GridSpec {
        GridSpec::new(self.x_lo, self.x_hi, self.x_step).expect("validated at parse time")
    }

    pub fn generators(&self) -> Vec<PowerSeries> {
        self.a_coeffs.iter().map(|c| PowerSeries::new(c.clone()).expect("validated at parse time")).collect()
    }

    pub fn sweep_generator(&self) -> PowerSeries {
        PowerSeries::new(self.sweep_a_coeffs.clone()).expect("validated at parse time")
    }

    /// Canonical text form; [`ExperimentConfig::parse`] inverts it.
    pub fn serialize(&self) -> String {
        let reals = |v: &[f64]| join(v, ", ", |x| x.to_string());
        let mut s = String::new();
        if let Some(c) = self.command {
            let _ = writeln!(s, "command = {}", c.name());
        }
        let _ = writeln!(s, "q_list = {}", reals(&self.q_list));
        let _ = writeln!(s, "n_list = {}", join(&self.n_list, ", ", |n| n.to_string()));
        let _ = writeln!(s, "t_list = {}", reals(&self.t_list));
        let _ = writeln!(s, "stancu = {}", join(&self.stancu, ", ", |(a, b)| format!("{a}:{b}")));
        let _ = writeln!(s, "relax_stancu = {}", self.relax_stancu);
        let _ = writeln!(s, "a_coeffs = {}", join(&self.a_coeffs, "; ", |c| reals(c)));
        let _ = writeln!(s, "x_lo = {}", self.x_lo);
        let _ = writeln!(s, "x_hi = {}", self.x_hi);
        let _ = writeln!(s, "x_step = {}", self.x_step);
        let _ = writeln!(s, "sweep_n_list = {}", join(&self.sweep_n_list, ", ", |n| n.to_string()));
        let _ = writeln!(s, "q_sequence = {}", self.q_sequence.tag());
        if let QSequence::Custom(pairs) = &self.q_sequence {
            let _ = writeln!(s, "q_values = {}", join(pairs, ", ", |(_, q)| q.to_string()));
        }
        let _ = writeln!(s, "sweep_alpha = {}", self.sweep_alpha);
        let _ = writeln!(s, "sweep_beta = {}", self.sweep_beta);
        let _ = writeln!(s, "sweep_a_coeffs = {}", reals(&self.sweep_a_coeffs));
        let _ = writeln!(s, "interval = {}", self.interval);
        let _ = writeln!(s, "grid_points = {}", self.grid_points);
        let _ = writeln!(s, "functions = {}", join(&self.functions, ", ", |f| f.to_string()));
        let _ = writeln!(
            s,
            "lipschitz = {}",
            join(&self.lipschitz, ", ", |l| format!("{}:{}:{}", l.function, l.m, l.alpha))
        );
        let _ = writeln!(s, "checks = {}", join(&self.checks, ", ", |t| t.tag().to_string()));
        let _ = writeln!(s, "series_tol = {}", self.series_tol);
        let _ = writeln!(s, "report_tol = {}", self.report_tol);
        let _ = writeln!(s, "moment_tol = {}", self.moment_tol);
        let _ = writeln!(s, "e0_tol = {}", self.e0_tol);
        let _ = writeln!(s, "eps = {}", self.eps);
        let _ = writeln!(s, "horizon = {}", self.horizon);
        let _ = writeln!(s, "classical_q = {}", self.classical_q);
        let _ = writeln!(s, "classical_n = {}", self.classical_n);
        let _ = writeln!(s, "classical_tol = {}", self.classical_tol);
        if let Some(out) = &self.out {
            let _ = writeln!(s, "out = {out}");
        }
        s
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

fn check_stancu(alpha: f64, beta: f64, relaxed: bool) -> std::result::Result<(), String> {
    if alpha < 0.0 || beta < 0.0 {
        return Err(format!("alpha and beta must be >= 0, got {alpha}:{beta}"));
    }
    if !relaxed && alpha > beta {
        return Err(format!(
            "Stancu constraint alpha <= beta violated by {alpha}:{beta} (set relax_stancu = true to allow)"
        ));
    }
    Ok(())
}

fn check_generator(coeffs: &[f64]) -> std::result::Result<(), String> {
    if coeffs.is_empty() {
        return Err("A needs at least one coefficient".into());
    }
    if let Some(c) = coeffs.iter().find(|&&c| c < 0.0) {
        return Err(format!("A coefficient {c} < 0; the operator would not be positive"));
    }
    if coeffs.iter().sum::<f64>() == 0.0 {
        return Err(format!("A(1) = 0 for A = {coeffs:?}"));
    }
    Ok(())
}
