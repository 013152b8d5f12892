//! Natural density at a finite horizon, admissible q-sequences, and the
//! statistical Korovkin experiment on the test functions `e_0, e_1, e_2`.
//!
//! A statistical limit cannot be observed at finite horizon. It is evidenced
//! here by a prefix-density profile whose last quartile averages below both
//! its first quartile and [`TREND_CEILING`].

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{Operator, OperatorParams};
use crate::qcore::{q_integer, QValue};
use crate::series::PowerSeries;
use crate::smoothness::GridSpec;

pub const TREND_CEILING: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub horizon: usize,
    /// `|K_n|` for `n = 1..=horizon`.
    pub counts: Vec<usize>,
    /// `d_n = |K_n| / n`.
    pub prefix_densities: Vec<f64>,
}

impl DensityProfile {
    fn from_members<I: Iterator<Item = bool>>(members: I) -> Self {
        let mut counts = Vec::new();
        let mut acc = 0usize;
        for m in members {
            acc += m as usize;
            counts.push(acc);
        }
        let prefix_densities = counts.iter().enumerate().map(|(i, &c)| c as f64 / (i + 1) as f64).collect();
        DensityProfile { horizon: counts.len(), counts, prefix_densities }
    }

    /// `d_n` for 1-based `n`.
    pub fn density(&self, n: usize) -> f64 {
        self.prefix_densities[n - 1]
    }

    pub fn last(&self) -> f64 {
        self.prefix_densities.last().copied().unwrap_or(0.0)
    }

    /// Finite-horizon evidence of density zero. An identically empty set
    /// counts as trending to zero.
    pub fn trends_to_zero(&self) -> bool {
        let quarter = (self.horizon / 4).max(1);
        let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        let first = mean(&self.prefix_densities[..quarter]);
        let last = mean(&self.prefix_densities[self.horizon - quarter..]);
        (last < first || last == 0.0) && last < TREND_CEILING
    }
}

/// Prefix densities of `{k <= n : indicator(k)}` for `n = 1..=horizon`.
pub fn prefix_density<I: Fn(usize) -> bool>(indicator: I, horizon: usize) -> Result<DensityProfile> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("density horizon must be >= 1".into()));
    }
    Ok(DensityProfile::from_members((1..=horizon).map(indicator)))
}

/// Prefix densities of the exceedance set `{k : |x_k - ell| >= eps}`; `seq` is 1-based.
pub fn st_limit_profile<S: Fn(usize) -> f64>(seq: S, ell: f64, eps: f64, horizon: usize) -> Result<DensityProfile> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be > 0, got {eps}")));
    }
    prefix_density(|k| (seq(k) - ell).abs() >= eps, horizon)
}

pub fn is_perfect_square(k: usize) -> bool {
    let r = (k as f64).sqrt() as usize;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == k)
}

#[derive(Debug, Clone, PartialEq)]
pub enum QSequence {
    /// `q_n = 1 - 1/(n+1)`
    OneMinusInv,
    /// `q_n = n/(n+1)`
    Ratio,
    /// Explicit `(n, q_n)` pairs.
    Custom(Vec<(u32, f64)>),
}

impl QSequence {
    pub fn tag(&self) -> &'static str {
        match self {
            QSequence::OneMinusInv => "one_minus_inv",
            QSequence::Ratio => "ratio",
            QSequence::Custom(_) => "custom",
        }
    }

    pub fn q(&self, n: u32) -> Result<QValue> {
        if n == 0 {
            return Err(Error::InvalidParameter("q-sequences are indexed from n = 1".into()));
        }
        let v = match self {
            QSequence::OneMinusInv => 1.0 - 1.0 / (n as f64 + 1.0),
            QSequence::Ratio => n as f64 / (n as f64 + 1.0),
            QSequence::Custom(pairs) => pairs
                .iter()
                .find(|&&(m, _)| m == n)
                .map(|&(_, q)| q)
                .ok_or_else(|| Error::InvalidParameter(format!("custom q-sequence has no value for n = {n}")))?,
        };
        QValue::new(v)
    }

    /// Condition check `q_n -> 1`, `q_n^n -> b < 1` at finite horizon.
    pub fn admissibility(&self, horizon: usize, eps: f64) -> Result<Admissibility> {
        let ns: Vec<u32> = match self {
            QSequence::Custom(pairs) => pairs.iter().map(|&(n, _)| n).collect(),
            _ => (1..=horizon as u32).collect(),
        };
        if ns.is_empty() {
            return Err(Error::InvalidParameter("empty q-sequence".into()));
        }
        let qs: Vec<f64> = ns.iter().map(|&n| self.q(n).map(QValue::get)).collect::<Result<_>>()?;
        let powers: Vec<f64> = ns.iter().zip(&qs).map(|(&n, &q)| q.powi(n as i32)).collect();
        let b = *powers.last().unwrap();
        let to_one = st_limit_profile(|k| qs[k - 1], 1.0, eps, qs.len())?;
        let to_b = st_limit_profile(|k| powers[k - 1], b, eps, powers.len())?;
        let q_to_one = to_one.trends_to_zero();
        let power_limit = to_b.trends_to_zero();
        Ok(Admissibility { b, q_to_one, power_limit, admissible: q_to_one && power_limit && b < 1.0 })
    }
}

pub fn q_sequence(kind: &QSequence, n: u32) -> Result<f64> {
    kind.q(n).map(QValue::get)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Admissibility {
    /// `q_N^N` at the horizon.
    pub b: f64,
    pub q_to_one: bool,
    pub power_limit: bool,
    pub admissible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KorovkinSetup {
    pub qseq: QSequence,
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
    pub generator: PowerSeries,
    pub n_list: Vec<u32>,
    /// Grid used for both `x` and `t` on `[0, a]`.
    pub grid_points: usize,
    pub eps: f64,
    pub series_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KorovkinRow {
    pub n: u32,
    pub q: f64,
    /// `E_v(n) = max_{x,t} |T(e_v) - (x+t)^v|`
    pub errors: [f64; 3],
    /// `sup_t R`
    pub r_max: f64,
    /// `beta a / N` and `(alpha + R D_qA(1)) / N`
    pub k_terms: [f64; 2],
    pub v_terms: [f64; 4],
    /// Displayed sup bound for `e_2`, including its `beta^2 a^2 [n]/N` lead term.
    pub e2_display_bound: f64,
    /// `1/N`, `[n]/N^2`, `q[n]/N^2` with `N = [n]_q + beta`.
    pub vanishing: [f64; 3],
}

impl KorovkinRow {
    pub fn e1_bound(&self) -> f64 {
        self.k_terms.iter().sum()
    }

    pub fn e2_bound(&self) -> f64 {
        self.v_terms.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KorovkinTable {
    pub rows: Vec<KorovkinRow>,
    /// Exceedance profiles of each `E_v` over the sweep positions, `ell = 0`.
    pub profiles: Vec<DensityProfile>,
}

impl KorovkinTable {
    pub fn max_e0(&self) -> f64 {
        self.rows.iter().map(|r| r.errors[0]).fold(0.0, f64::max)
    }

    pub fn strictly_decreasing(&self, v: usize) -> bool {
        self.rows.windows(2).all(|w| w[1].errors[v] < w[0].errors[v])
    }

    pub fn bounds_hold(&self) -> bool {
        self.rows.iter().all(|r| r.errors[1] <= r.e1_bound() && r.errors[2] <= r.e2_bound())
    }

    pub fn passes(&self, e0_tol: f64) -> bool {
        self.max_e0() <= e0_tol && self.strictly_decreasing(1) && self.strictly_decreasing(2) && self.bounds_hold()
    }
}

pub fn korovkin_experiment(setup: &KorovkinSetup) -> Result<KorovkinTable> {
    if setup.n_list.is_empty() {
        return Err(Error::InvalidParameter("n_list is empty".into()));
    }
    if setup.a.is_nan() || setup.a <= 0.0 {
        return Err(Error::InvalidParameter(format!("interval end a must be > 0, got {}", setup.a)));
    }
    let grid = GridSpec::with_intervals(0.0, setup.a, setup.grid_points.max(2) - 1)?.points();
    let rows: Vec<KorovkinRow> =
        setup.n_list.par_iter().map(|&n| korovkin_row(setup, n, &grid)).collect::<Result<_>>()?;
    let profiles = (0..3)
        .map(|v| st_limit_profile(|k| rows[k - 1].errors[v], 0.0, setup.eps, rows.len()))
        .collect::<Result<_>>()?;
    Ok(KorovkinTable { rows, profiles })
}

fn korovkin_row(setup: &KorovkinSetup, n: u32, grid: &[f64]) -> Result<KorovkinRow> {
    let q = setup.qseq.q(n)?;
    let mut errors = [0.0f64; 3];
    let mut r_max = 0.0f64;
    let mut scalars = None;
    for &t in grid {
        let p = OperatorParams::new_relaxed(n, t, setup.alpha, setup.beta, q, setup.generator.clone())?;
        let op = Operator::new(p, setup.series_tol)?;
        r_max = r_max.max(op.r_factor());
        scalars.get_or_insert(*op.scalars());
        for &x in grid {
            for (v, e) in errors.iter_mut().enumerate() {
                let target = (x + t).powi(v as i32);
                *e = e.max((op.moment_oracle(v as u32, x)? - target).abs());
            }
        }
    }
    let s = scalars.expect("grid is nonempty");
    let (al, be, a, r) = (setup.alpha, setup.beta, setup.a, r_max);
    let (d1, d2) = (s.d1_at_one, s.d2_at_one);
    let nq = q_integer(n, q);
    let den = nq + be;
    let den2 = den * den;
    let k_terms = [be * a / den, (al + r * d1) / den];
    let v_terms = [
        2.0 * a * (al + r * d1) / den,
        (al * al + 2.0 * r * al * d1 + d2 + be * be * a * a) / den2,
        a * nq * (2.0 * al + d1) / den2,
        a * q.get() * nq / den2,
    ];
    let e2_display_bound = be * be * a * a * nq / den
        + 2.0 * a * (al + r * d1) / den
        + (al * al + 2.0 * r * al * d1 + d2) / den2
        + nq * a * (2.0 * al + d1) / den2
        + q.get() * nq * a / den2;
    Ok(KorovkinRow {
        n,
        q: q.get(),
        errors,
        r_max,
        k_terms,
        v_terms,
        e2_display_bound,
        vanishing: [1.0 / den, nq / den2, q.get() * nq / den2],
    })
}
