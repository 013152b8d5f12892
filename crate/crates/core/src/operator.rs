//! The Stancu-type q-Favard-Szász operator
//!
//! `T(f; q; x) = sum_k w_k f(x + ([k]_q + alpha) / ([n]_q + beta))`
//!
//! with the Appell weights `w_k` of [`crate::series::appell_weights`].
//! Direct summation over the weights is the ground truth; the closed forms
//! are exposed next to it for comparison.

use crate::error::{Error, Result};
use crate::qcore::{q_exp_big, q_exp_small, q_integer, QValue};
use crate::series::{appell_weights, kernel_sums, AppellWeights, PowerSeries, SeriesScalars};

const EXP_TOL: f64 = 1e-17;

#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams {
    n: u32,
    t: f64,
    alpha: f64,
    beta: f64,
    q: QValue,
    a: PowerSeries,
}

impl OperatorParams {
    /// Validated parameters with the Stancu constraint `0 <= alpha <= beta`.
    pub fn new(n: u32, t: f64, alpha: f64, beta: f64, q: QValue, a: PowerSeries) -> Result<Self> {
        if alpha > beta {
            return Err(Error::InvalidParameter(format!(
                "Stancu constraint needs alpha <= beta, got alpha = {alpha}, beta = {beta}"
            )));
        }
        Self::new_relaxed(n, t, alpha, beta, q, a)
    }

    /// Same as [`OperatorParams::new`] without the `alpha <= beta` constraint.
    pub fn new_relaxed(n: u32, t: f64, alpha: f64, beta: f64, q: QValue, a: PowerSeries) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::InvalidParameter(format!("t must be finite and >= 0, got {t}")));
        }
        for (name, v) in [("alpha", alpha), ("beta", beta)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be >= 0, got {v}")));
            }
        }
        let reach = t * (1.0 - q.get().powi(n as i32));
        if reach >= 1.0 {
            return Err(Error::Domain(format!(
                "t(1 - q^n) = {reach} >= 1: e_q^([n]_q t) diverges (n = {n}, t = {t}, q = {q})"
            )));
        }
        Ok(OperatorParams { n, t, alpha, beta, q, a })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn t(&self) -> f64 {
        self.t
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn q(&self) -> QValue {
        self.q
    }
    pub fn a(&self) -> &PowerSeries {
        &self.a
    }

    /// `[n]_q`
    pub fn n_q(&self) -> f64 {
        q_integer(self.n, self.q)
    }

    /// `y = [n]_q t`
    pub fn y(&self) -> f64 {
        self.n_q() * self.t
    }

    /// `[n]_q + beta`
    pub fn denom(&self) -> f64 {
        self.n_q() + self.beta
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        Self::new_relaxed(self.n, t, self.alpha, self.beta, self.q, self.a.clone())
    }
}

/// `R = e_q^{qy} E_q^{-y} / A(1)` with `y = [n]_q t`.
pub fn r_factor(params: &OperatorParams) -> Result<f64> {
    let q = params.q();
    let y = params.y();
    let e_qy = q_exp_small(q.get() * y, q, EXP_TOL)?.value;
    let e_neg = q_exp_big(-y, q, EXP_TOL)?.value;
    Ok(e_qy * e_neg / params.a().at_one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaVariant {
    /// Lead term `t^2 [n]_q^2 / ([n]_q + beta)^2`.
    LeadSquare,
    /// Lead term `beta^2 t^2 [n]_q / ([n]_q + beta)^2`.
    LeadBeta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentReport {
    pub v: u32,
    pub x: f64,
    pub oracle: f64,
    pub closed_form: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaComparison {
    pub oracle: f64,
    pub derived: f64,
    pub lead_square: f64,
    pub lead_beta: f64,
    pub lead_square_matches: bool,
    pub lead_beta_matches: bool,
}

/// One operator instance with its kernel evaluated once.
#[derive(Debug, Clone)]
pub struct Operator {
    params: OperatorParams,
    weights: AppellWeights,
    nodes: Vec<f64>,
    scalars: SeriesScalars,
    r: f64,
}

impl Operator {
    pub fn new(params: OperatorParams, tol: f64) -> Result<Self> {
        let q = params.q();
        let weights = appell_weights(params.a(), q, params.y(), tol)?;
        let denom = params.denom();
        let nodes = (0..weights.len()).map(|k| (q_integer(k as u32, q) + params.alpha()) / denom).collect();
        let scalars = SeriesScalars::new(params.a(), q);
        let r = r_factor(&params)?;
        Ok(Operator { params, weights, nodes, scalars, r })
    }

    pub fn params(&self) -> &OperatorParams {
        &self.params
    }

    pub fn weights(&self) -> &AppellWeights {
        &self.weights
    }

    /// Offsets `([k]_q + alpha) / ([n]_q + beta)` of the retained nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    pub fn scalars(&self) -> &SeriesScalars {
        &self.scalars
    }

    pub fn r_factor(&self) -> f64 {
        self.r
    }

    pub fn apply<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        self.weights.weights.iter().zip(&self.nodes).map(|(&w, &d)| w * f(x + d)).sum()
    }

    /// `T((x + s)^v)` by direct summation.
    pub fn moment_oracle(&self, v: u32, x: f64) -> Result<f64> {
        check_order(v)?;
        Ok(self.apply(|s| s.powi(v as i32), x))
    }

    /// Closed forms for `v = 0, 1, 2`.
    pub fn moment_closed_form(&self, v: u32, x: f64) -> Result<f64> {
        check_order(v)?;
        let p = &self.params;
        let nq = p.n_q();
        let den = p.denom();
        let (al, t, r) = (p.alpha(), p.t(), self.r);
        let d1 = self.scalars.d1_at_one;
        let d2 = self.scalars.d2_at_one;
        Ok(match v {
            0 => 1.0,
            1 => x + nq * t / den + al / den + r * d1 / den,
            _ => {
                let lead = x + nq * t / den;
                lead * lead
                    + 2.0 * x * (al + r * d1) / den
                    + (al * al + 2.0 * r * al * d1 + d2) / (den * den)
                    + nq * t * (2.0 * al + d1) / (den * den)
                    + p.q().get() * nq * t / (den * den)
            }
        })
    }

    pub fn moment_report(&self, v: u32, x: f64) -> Result<MomentReport> {
        let oracle = self.moment_oracle(v, x)?;
        let closed_form = self.moment_closed_form(v, x)?;
        Ok(MomentReport { v, x, oracle, closed_form, abs_diff: (oracle - closed_form).abs() })
    }

    /// `T((s - (x + t))^2)` by direct summation; independent of `x`.
    pub fn central_moment2(&self) -> f64 {
        let t = self.params.t();
        self.weights.weights.iter().zip(&self.nodes).map(|(&w, &d)| w * (d - t) * (d - t)).sum()
    }

    /// Closed form of the central moment from the derived kernel sums.
    pub fn central_moment2_derived(&self) -> Result<f64> {
        let p = &self.params;
        let sums = kernel_sums(p.a(), p.q(), p.y())?;
        let (al, t, den) = (p.alpha(), p.t(), p.denom());
        let m1 = (al + sums.first) / den;
        let m2 = (al * al + 2.0 * al * sums.first + sums.second_derived) / (den * den);
        Ok(m2 - 2.0 * t * m1 + t * t)
    }

    /// The closed-form central-moment expressions, evaluated literally.
    pub fn delta_closed_form(&self, variant: DeltaVariant) -> f64 {
        let p = &self.params;
        let nq = p.n_q();
        let den2 = p.denom() * p.denom();
        let (al, be, t, r) = (p.alpha(), p.beta(), p.t(), self.r);
        let d1 = self.scalars.d1_at_one;
        let d2 = self.scalars.d2_at_one;
        let lead = match variant {
            DeltaVariant::LeadSquare => t * t * nq * nq / den2,
            DeltaVariant::LeadBeta => be * be * t * t * nq / den2,
        };
        lead + (al * al + 2.0 * r * al * d1 + d2) / den2 + nq * t * (2.0 * al + d1) / den2 + p.q().get() * nq * t / den2
    }

    pub fn delta_comparison(&self) -> Result<DeltaComparison> {
        let oracle = self.central_moment2();
        let derived = self.central_moment2_derived()?;
        let lead_square = self.delta_closed_form(DeltaVariant::LeadSquare);
        let lead_beta = self.delta_closed_form(DeltaVariant::LeadBeta);
        let close = |v: f64| (v - oracle).abs() <= 1e-8 * oracle.abs().max(1.0);
        Ok(DeltaComparison {
            oracle,
            derived,
            lead_square,
            lead_beta,
            lead_square_matches: close(lead_square),
            lead_beta_matches: close(lead_beta),
        })
    }

    /// `([n]_q t + alpha + D_qA(1) R) / ([n]_q + beta)`, the exact first-moment offset.
    pub fn mean_offset(&self) -> f64 {
        let p = &self.params;
        (p.y() + p.alpha() + self.scalars.d1_at_one * self.r) / p.denom()
    }

    /// `(alpha + D_qA(1) R - beta t) / ([n]_q + beta)`; may be negative.
    pub fn shift(&self) -> f64 {
        let p = &self.params;
        (p.alpha() + self.scalars.d1_at_one * self.r - p.beta() * p.t()) / p.denom()
    }

    /// `T(f) - f(x + mean_offset) + f(x + t)`; annihilates `s - (x + t)`.
    pub fn auxiliary_apply<F: Fn(f64) -> f64>(&self, f: F, x: f64) -> f64 {
        self.apply(&f, x) - f(x + self.mean_offset()) + f(x + self.params.t())
    }
}

fn check_order(v: u32) -> Result<()> {
    if v > 2 {
        Err(Error::InvalidParameter(format!("moment order must be 0, 1 or 2, got {v}")))
    } else {
        Ok(())
    }
}

pub fn apply<F: Fn(f64) -> f64>(params: &OperatorParams, f: F, x: f64, tol: f64) -> Result<f64> {
    Ok(Operator::new(params.clone(), tol)?.apply(f, x))
}

/// Classical Favard-Szász value `e^{-nt} sum (nt)^k / k! f(x + k/n)`.
pub fn classical_favard_szasz<F: Fn(f64) -> f64>(n: u32, t: f64, f: F, x: f64) -> f64 {
    let lambda = n as f64 * t;
    let mut w = (-lambda).exp();
    let mut total = 0.0;
    let mut mass = 0.0;
    for k in 0.. {
        total += w * f(x + k as f64 / n as f64);
        mass += w;
        if k as f64 > lambda && 1.0 - mass < 1e-16 {
            break;
        }
        w *= lambda / (k + 1) as f64;
        if k > 10_000 {
            break;
        }
    }
    total
}
