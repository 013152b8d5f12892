//! Moduli of continuity and smoothness on grids, Lipschitz checks, and the
//! verifiers that test each error bound against the oracle central moment.
//!
//! Suprema over continua are replaced by grid maxima. Each grid estimate is a
//! lower bound of the true supremum; the grid is halved until two successive
//! refinements move the value by less than [`REFINE_TOL`] (relative to
//! `max(1, value)`), or the work cap is hit.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{DeltaVariant, Operator, OperatorParams};
use crate::qcore::QValue;
use crate::series::PowerSeries;

pub const REFINE_TOL: f64 = 1e-6;
/// Cap on the step sizes `h` sampled per `omega_2` estimate, besides `h = delta`.
const MAX_H_SAMPLES: usize = 256;
const MIN_INTERVALS: usize = 64;
const MAX_INTERVALS: usize = 1 << 20;
const MAX_SECOND_DIFF_WORK: usize = 10_000_000;
/// Grid resolution for the moduli used inside the verifiers.
const VERIFIER_INTERVALS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!("grid needs lo < hi, got [{lo}, {hi}]")));
        }
        if !(step > 0.0 && step <= hi - lo) {
            return Err(Error::InvalidParameter(format!("grid step must lie in (0, {}], got {step}", hi - lo)));
        }
        Ok(GridSpec { lo, hi, step })
    }

    /// Grid with `intervals` equal pieces.
    pub fn with_intervals(lo: f64, hi: f64, intervals: usize) -> Result<Self> {
        Self::new(lo, hi, (hi - lo) / intervals.max(1) as f64)
    }

    /// Number of equal intervals; the effective step `(hi - lo) / intervals`
    /// never exceeds the requested one.
    pub fn intervals(&self) -> usize {
        (((self.hi - self.lo) / self.step) * (1.0 - 1e-12)).ceil().max(1.0) as usize
    }

    pub fn points(&self) -> Vec<f64> {
        let m = self.intervals();
        let h = (self.hi - self.lo) / m as f64;
        (0..=m).map(|i| if i == m { self.hi } else { self.lo + i as f64 * h }).collect()
    }
}

fn refine<E: FnMut(usize) -> Option<f64>>(start: usize, mut estimate: E) -> f64 {
    let mut m = start.max(MIN_INTERVALS);
    let mut history = vec![estimate(m).unwrap_or(0.0)];
    while m < MAX_INTERVALS {
        m *= 2;
        let Some(v) = estimate(m) else { break };
        history.push(v);
        let k = history.len();
        if k >= 3 {
            let scale = v.abs();
            let d1 = (history[k - 1] - history[k - 2]).abs();
            let d2 = (history[k - 2] - history[k - 3]).abs();
            if d1 <= REFINE_TOL * scale && d2 <= REFINE_TOL * scale {
                break;
            }
        }
    }
    history.iter().copied().fold(0.0, f64::max)
}

/// Grid estimate of `sup {|f(x) - f(y)| : |x - y| <= delta, x, y in [lo, hi]}`.
pub fn modulus1<F: Fn(f64) -> f64>(f: F, delta: f64, grid: &GridSpec) -> f64 {
    if delta.is_nan() || delta <= 0.0 {
        return 0.0;
    }
    refine(grid.intervals(), |m| Some(modulus1_at(&f, delta, grid.lo, grid.hi, m)))
}

fn modulus1_at<F: Fn(f64) -> f64>(f: &F, delta: f64, lo: f64, hi: f64, m: usize) -> f64 {
    let h = (hi - lo) / m as f64;
    let xs: Vec<f64> = (0..=m).map(|i| lo + i as f64 * h).collect();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let w = ((delta / h) * (1.0 + 1e-12)).floor() as usize;

    // sliding max / min over the index window [i, i + w]
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut right = 0usize;
    let mut best = 0.0f64;
    for i in 0..=m {
        let end = (i + w).min(m);
        while right <= end {
            while maxq.back().is_some_and(|&j| vals[j] <= vals[right]) {
                maxq.pop_back();
            }
            maxq.push_back(right);
            while minq.back().is_some_and(|&j| vals[j] >= vals[right]) {
                minq.pop_back();
            }
            minq.push_back(right);
            right += 1;
        }
        while maxq.front().is_some_and(|&j| j < i) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&j| j < i) {
            minq.pop_front();
        }
        let fi = vals[i];
        best = best.max(vals[maxq[0]] - fi).max(fi - vals[minq[0]]);
        let y = xs[i] + delta;
        if y <= hi {
            best = best.max((f(y) - fi).abs());
        }
    }
    best
}

/// Grid estimate of `sup_{0 < h <= delta} sup_x |f(x+2h) - 2f(x+h) + f(x)|`
/// with `x` in `[lo, hi]`; `f` is sampled up to `hi + 2 delta`.
pub fn modulus2<F: Fn(f64) -> f64>(f: F, delta: f64, grid: &GridSpec) -> f64 {
    if delta.is_nan() || delta <= 0.0 {
        return 0.0;
    }
    refine(grid.intervals(), |m| modulus2_at(&f, delta, grid.lo, grid.hi, m))
}

fn modulus2_at<F: Fn(f64) -> f64>(f: &F, delta: f64, lo: f64, hi: f64, m: usize) -> Option<f64> {
    let h = (hi - lo) / m as f64;
    let steps = ((delta / h) * (1.0 + 1e-12)).floor() as usize;
    // at most MAX_H_SAMPLES multiples of the grid step, evenly spread over (0, delta]
    let stride = steps.div_ceil(MAX_H_SAMPLES).max(1);
    if (m + 1).saturating_mul(steps / stride + 1) > MAX_SECOND_DIFF_WORK {
        return None;
    }
    let ext = m + 2 * steps;
    let vals: Vec<f64> = (0..=ext).map(|i| f(lo + i as f64 * h)).collect();
    let mut best = 0.0f64;
    for i in 0..=m {
        for j in (stride..=steps).step_by(stride) {
            best = best.max((vals[i + 2 * j] - 2.0 * vals[i + j] + vals[i]).abs());
        }
        let x = lo + i as f64 * h;
        best = best.max((f(x + 2.0 * delta) - 2.0 * f(x + delta) + vals[i]).abs());
    }
    Some(best)
}

/// `|f(x) - f(y)| <= M |x - y|^alpha` at every pair of grid points (slack `-1e-12`).
pub fn lipschitz_check<F: Fn(f64) -> f64>(f: F, m: f64, alpha: f64, grid: &GridSpec) -> Result<bool> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidParameter(format!("Lipschitz constant must be > 0, got {m}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("Hölder exponent must lie in (0, 1], got {alpha}")));
    }
    let xs = grid.points();
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if (vals[i] - vals[j]).abs() > m * (xs[j] - xs[i]).powf(alpha) + 1e-12 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    /// pointwise `2 omega(f, sqrt(delta_{n,t}))`
    Modulus,
    /// uniform `2 omega(f, sqrt(delta_n))` over `[0, a]^2`
    Uniform,
    /// Lipschitz class `M delta^alpha`
    Lipschitz,
    /// local `C omega_2 + omega(f, shift)`
    Local,
}

impl Bound {
    pub fn tag(self) -> &'static str {
        match self {
            Bound::Modulus => "modulus",
            Bound::Uniform => "uniform",
            Bound::Lipschitz => "lipschitz",
            Bound::Local => "local",
        }
    }

    pub fn from_tag(s: &str) -> Option<Self> {
        match s.trim() {
            "modulus" => Some(Bound::Modulus),
            "uniform" => Some(Bound::Uniform),
            "lipschitz" => Some(Bound::Lipschitz),
            "local" => Some(Bound::Local),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundRow {
    pub n: u32,
    pub q: f64,
    pub x: f64,
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Oracle central moment `T((s - (x+t))^2)`.
    pub delta_oracle: f64,
    /// Closed-form `delta_n` where the bound uses one.
    pub delta_closed_form: Option<f64>,
    pub omega: Option<f64>,
    pub omega2: Option<f64>,
    /// `omega_2` at the argument `delta_n` instead of `sqrt(delta_n)`.
    pub omega2_at_delta: Option<f64>,
    /// Set when the local shift argument is negative.
    pub flag: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub bound: Bound,
    pub rows: Vec<BoundRow>,
    pub all_pass: bool,
    pub min_slack: f64,
    pub tolerance: f64,
    pub note: String,
}

impl BoundReport {
    fn from_rows(bound: Bound, mut rows: Vec<BoundRow>, tolerance: f64, note: &str) -> Self {
        for r in &mut rows {
            r.slack = r.rhs - r.lhs;
        }
        let min_slack = rows.iter().map(|r| r.slack).fold(f64::INFINITY, f64::min);
        BoundReport {
            bound,
            all_pass: rows.iter().all(|r| r.slack >= -tolerance),
            rows,
            min_slack,
            tolerance,
            note: note.to_string(),
        }
    }
}

/// Knobs shared by the verifiers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    /// Series truncation tolerance for the operator weights.
    pub series_tol: f64,
    /// Allowed negative slack before a grid point counts as a failure.
    pub report_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { series_tol: 1e-13, report_tol: 1e-9 }
    }
}

const TARGET_NOTE: &str = "lhs = |T(f;q;x) - f(x+t)|, compared at the shifted point x+t";

/// Interval holding every point the operator samples for x in `[x_lo, x_hi]`.
fn evaluation_domain(op: &Operator, x_lo: f64, x_hi: f64) -> Result<GridSpec> {
    let reach = op.max_node().max(op.params().t()).max(1e-3);
    GridSpec::with_intervals(x_lo, x_hi + reach, VERIFIER_INTERVALS)
}

pub fn verify_modulus_bound<F: Fn(f64) -> f64 + Sync>(
    params: &OperatorParams,
    f: F,
    x_grid: &GridSpec,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    let op = Operator::new(params.clone(), opts.series_tol)?;
    let rows = modulus_rows(&op, &f, x_grid)?;
    Ok(BoundReport::from_rows(Bound::Modulus, rows, opts.report_tol, TARGET_NOTE))
}

fn modulus_rows<F: Fn(f64) -> f64 + Sync>(op: &Operator, f: &F, x_grid: &GridSpec) -> Result<Vec<BoundRow>> {
    let p = op.params();
    let delta = op.central_moment2();
    let domain = evaluation_domain(op, x_grid.lo, x_grid.hi)?;
    let omega = modulus1(f, delta.sqrt(), &domain);
    Ok(x_grid
        .points()
        .into_iter()
        .map(|x| BoundRow {
            n: p.n(),
            q: p.q().get(),
            x,
            t: p.t(),
            lhs: (op.apply(f, x) - f(x + p.t())).abs(),
            rhs: 2.0 * omega,
            delta_oracle: delta,
            omega: Some(omega),
            ..Default::default()
        })
        .collect())
}

/// A family of operators indexed by `n`, with `q = q_n` and a `t` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub n_list: Vec<u32>,
    pub q_list: Vec<QValue>,
    pub alpha: f64,
    pub beta: f64,
    pub a: PowerSeries,
    pub t_grid: Vec<f64>,
}

impl Sweep {
    pub fn new(
        n_list: Vec<u32>,
        q_list: Vec<QValue>,
        alpha: f64,
        beta: f64,
        a: PowerSeries,
        t_grid: Vec<f64>,
    ) -> Result<Self> {
        if n_list.is_empty() || n_list.len() != q_list.len() {
            return Err(Error::InvalidParameter("sweep needs one q per n and at least one n".into()));
        }
        if t_grid.is_empty() {
            return Err(Error::InvalidParameter("sweep needs at least one t".into()));
        }
        Ok(Sweep { n_list, q_list, alpha, beta, a, t_grid })
    }

    pub fn params(&self, idx: usize, t: f64) -> Result<OperatorParams> {
        OperatorParams::new_relaxed(self.n_list[idx], t, self.alpha, self.beta, self.q_list[idx], self.a.clone())
    }

    /// Every `(n index, t)` pair as an operator, in row-major order.
    fn operators(&self, tol: f64) -> Result<Vec<(usize, Operator)>> {
        let pairs: Vec<(usize, f64)> =
            (0..self.n_list.len()).flat_map(|i| self.t_grid.iter().map(move |&t| (i, t))).collect();
        pairs.into_par_iter().map(|(i, t)| Ok((i, Operator::new(self.params(i, t)?, tol)?))).collect()
    }
}

/// Uniform estimate on `[0, a]^2`: one row per `n`.
///
/// `lhs` is the sup of `|T f - f(x+t)|` over the `(x, t)` grid; `rhs` uses the
/// oracle central moment maximized over `t`. The closed-form `delta_n` (also
/// maximized over `t`) is carried along for comparison.
pub fn verify_uniform_bound<F: Fn(f64) -> f64 + Sync>(
    sweep: &Sweep,
    f: F,
    x_grid: &GridSpec,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    let ops = sweep.operators(opts.series_tol)?;
    let xs = x_grid.points();
    let rows: Vec<BoundRow> = (0..sweep.n_list.len())
        .into_par_iter()
        .map(|i| {
            let group: Vec<&Operator> = ops.iter().filter(|(j, _)| *j == i).map(|(_, o)| o).collect();
            let mut row =
                BoundRow { n: sweep.n_list[i], q: sweep.q_list[i].get(), lhs: f64::NEG_INFINITY, ..Default::default() };
            let mut reach = 1e-3f64;
            let mut closed = 0.0f64;
            for op in &group {
                let t = op.params().t();
                row.delta_oracle = row.delta_oracle.max(op.central_moment2());
                closed = closed.max(op.delta_closed_form(DeltaVariant::LeadBeta));
                reach = reach.max(op.max_node()).max(t);
                for &x in &xs {
                    let err = (op.apply(&f, x) - f(x + t)).abs();
                    if err > row.lhs {
                        row.lhs = err;
                        row.x = x;
                        row.t = t;
                    }
                }
            }
            let domain = GridSpec::with_intervals(x_grid.lo, x_grid.hi + reach, VERIFIER_INTERVALS)?;
            let omega = modulus1(&f, row.delta_oracle.sqrt(), &domain);
            row.rhs = 2.0 * omega;
            row.omega = Some(omega);
            row.delta_closed_form = Some(closed);
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(BoundReport::from_rows(Bound::Uniform, rows, opts.report_tol, TARGET_NOTE))
}

/// Lipschitz-class estimate `|T f - f(x+t)| <= M delta^(alpha/2)`.
pub fn verify_lipschitz_bound<F: Fn(f64) -> f64 + Sync>(
    params: &OperatorParams,
    f: F,
    m: f64,
    alpha_exp: f64,
    x_grid: &GridSpec,
    opts: &VerifyOptions,
) -> Result<BoundReport> {
    let op = Operator::new(params.clone(), opts.series_tol)?;
    let domain = evaluation_domain(&op, x_grid.lo, x_grid.hi)?;
    let check_grid = GridSpec::with_intervals(domain.lo, domain.hi, 400)?;
    if !lipschitz_check(&f, m, alpha_exp, &check_grid)? {
        return Err(Error::Precondition(format!("f is not in Lip_{m}({alpha_exp}) on [{}, {}]", domain.lo, domain.hi)));
    }
    let rows = lipschitz_rows(&op, &f, m, alpha_exp, x_grid);
    Ok(BoundReport::from_rows(Bound::Lipschitz, rows, opts.report_tol, TARGET_NOTE))
}

fn lipschitz_rows<F: Fn(f64) -> f64>(op: &Operator, f: &F, m: f64, alpha_exp: f64, x_grid: &GridSpec) -> Vec<BoundRow> {
    let p = op.params();
    let delta = op.central_moment2();
    let rhs = m * delta.powf(alpha_exp / 2.0);
    x_grid
        .points()
        .into_iter()
        .map(|x| BoundRow {
            n: p.n(),
            q: p.q().get(),
            x,
            t: p.t(),
            lhs: (op.apply(f, x) - f(x + p.t())).abs(),
            rhs,
            delta_oracle: delta,
            ..Default::default()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalReport {
    pub report: BoundReport,
    /// `(n, max residual / omega_2)` per sweep entry.
    pub c_by_n: Vec<(u32, f64)>,
    pub empirical_c: f64,
    /// Finite and without growth: last value at most twice the median.
    pub bounded: bool,
}

/// Ratio cutoff below which `omega_2` is treated as zero.
const OMEGA2_FLOOR: f64 = 1e-12;

/// Local estimate. The residual `lhs - omega(f, |shift|)` is divided by
/// `omega_2(f, sqrt(delta))` to estimate the absolute constant.
pub fn verify_local_estimate<F: Fn(f64) -> f64 + Sync>(
    sweep: &Sweep,
    f: F,
    x_grid: &GridSpec,
    opts: &VerifyOptions,
) -> Result<LocalReport> {
    let ops = sweep.operators(opts.series_tol)?;
    let xs = x_grid.points();
    let per_op: Vec<(usize, Vec<BoundRow>, f64)> = ops
        .par_iter()
        .map(|(i, op)| {
            let p = op.params();
            let delta = op.central_moment2();
            let shift = op.shift();
            let domain = evaluation_domain(op, x_grid.lo, x_grid.hi)?;
            let omega = modulus1(&f, shift.abs(), &domain);
            let omega2 = modulus2(&f, delta.sqrt(), &domain);
            let omega2_at_delta = modulus2(&f, delta, &domain);
            let mut c = 0.0f64;
            let rows = xs
                .iter()
                .map(|&x| {
                    let lhs = (op.apply(&f, x) - f(x + p.t())).abs();
                    if omega2 > OMEGA2_FLOOR {
                        c = c.max((lhs - omega) / omega2);
                    }
                    BoundRow {
                        n: p.n(),
                        q: p.q().get(),
                        x,
                        t: p.t(),
                        lhs,
                        rhs: omega,
                        delta_oracle: delta,
                        omega: Some(omega),
                        omega2: Some(omega2),
                        omega2_at_delta: Some(omega2_at_delta),
                        flag: shift < 0.0,
                        ..Default::default()
                    }
                })
                .collect();
            Ok((*i, rows, c))
        })
        .collect::<Result<_>>()?;

    let mut c_by_n: Vec<(u32, f64)> = sweep.n_list.iter().map(|&n| (n, 0.0)).collect();
    for (i, _, c) in &per_op {
        c_by_n[*i].1 = c_by_n[*i].1.max(*c);
    }
    let empirical_c = c_by_n.iter().map(|&(_, c)| c).fold(0.0, f64::max);
    let mut rows: Vec<BoundRow> = per_op.into_iter().flat_map(|(_, r, _)| r).collect();
    for r in &mut rows {
        r.rhs += empirical_c * r.omega2.unwrap_or(0.0);
    }
    let cs: Vec<f64> = c_by_n.iter().map(|&(_, c)| c).collect();
    let bounded = cs.iter().all(|c| c.is_finite()) && cs.last().is_some_and(|&last| last <= 2.0 * median(&cs) + 1e-12);
    let mut report = BoundReport::from_rows(
        Bound::Local,
        rows,
        opts.report_tol,
        "rhs = omega(f,|shift|) + C_emp omega2(f, sqrt(delta)); flag marks a negative shift",
    );
    report.all_pass = report.all_pass && bounded;
    Ok(LocalReport { report, c_by_n, empirical_c, bounded })
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}
