//! Catalog of normalized symmetric operator monotone functions.
//!
//! Every member f satisfies f(1) = 1, x·f(1/x) = f(x) and the pointwise
//! bounds 2x/(1+x) ≤ f(x) ≤ (1+x)/2 on (0, ∞). The zero limit
//! f(0) = lim_{x→0} f(x) splits the catalog into regular (f(0) > 0) and
//! non-regular members; only regular members admit the tilde transform
//!
//!   f̃(x) = ½[(x + 1) − (x − 1)² f(0)/f(x)],
//!
//! which governs the gap between covariance and the QFI term. The catalog is
//! closed: user-defined functions are rejected because operator monotonicity
//! cannot be validated numerically.

use crate::{Error, Result};
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;

/// Number of points in the default order-classification grid.
pub const ORDER_GRID_POINTS: usize = 1000;
/// Range of the default order-classification grid.
pub const ORDER_GRID_RANGE: (f64, f64) = (1e-6, 1e6);
/// Pointwise gap below which two tilde transforms are declared equal.
pub const ORDER_EQUAL_TOL: f64 = 1e-12;

/// A member of the operator monotone catalog.
///
/// `Wyd { beta }` requires β ∈ (0, 1/2); the Wigner-Yanase function is the
/// β = 1/2 endpoint and is kept as its own variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MonotoneFunction {
    /// (1 + x)/2, the largest member (arithmetic mean).
    Sld,
    /// 2x/(x + 1), the smallest member (harmonic mean); non-regular.
    Rld,
    /// ((1 + √x)/2)², the Wigner-Yanase function.
    Wy,
    /// β(1−β)(x−1)² / ((x^β − 1)(x^{1−β} − 1)), Wigner-Yanase-Dyson.
    Wyd { beta: f64 },
}

impl MonotoneFunction {
    /// Validated constructor for the Wigner-Yanase-Dyson family.
    pub fn wyd(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 0.0 || beta >= 0.5 {
            return Err(Error::Parameter(format!(
                "wyd beta must lie in the open interval (0, 0.5), got {beta}"
            )));
        }
        Ok(MonotoneFunction::Wyd { beta })
    }

    /// The full catalog with the default β = 1/4.
    pub fn catalog() -> Vec<Self> {
        vec![
            MonotoneFunction::Sld,
            MonotoneFunction::Rld,
            MonotoneFunction::Wy,
            MonotoneFunction::Wyd { beta: 0.25 },
        ]
    }

    /// The regular members of [`Self::catalog`].
    pub fn regular_catalog() -> Vec<Self> {
        vec![
            MonotoneFunction::Sld,
            MonotoneFunction::Wy,
            MonotoneFunction::Wyd { beta: 0.25 },
        ]
    }

    /// Serialization token: `sld`, `rld`, `wy`, `wyd:0.25`.
    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Evaluate f at x > 0.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain(format!(
                "monotone function argument must be a positive real, got {x}"
            )));
        }
        Ok(match *self {
            MonotoneFunction::Sld => 0.5 * (1.0 + x),
            MonotoneFunction::Rld => 2.0 * x / (x + 1.0),
            MonotoneFunction::Wy => {
                let s = 0.5 * (1.0 + x.sqrt());
                s * s
            }
            MonotoneFunction::Wyd { beta } => wyd_eval(beta, x),
        })
    }

    /// The analytic limit f(0); zero exactly for the non-regular members.
    pub fn at_zero(&self) -> f64 {
        match *self {
            MonotoneFunction::Sld => 0.5,
            MonotoneFunction::Rld => 0.0,
            MonotoneFunction::Wy => 0.25,
            MonotoneFunction::Wyd { beta } => beta * (1.0 - beta),
        }
    }

    /// Whether f(0) > 0.
    pub fn is_regular(&self) -> bool {
        self.at_zero() > 0.0
    }

    /// Evaluate the tilde transform f̃ at x > 0.
    ///
    /// Each catalog member is evaluated through the algebraic simplification
    /// of ½[(x+1) − (x−1)² f(0)/f(x)], which is free of the cancellation the
    /// raw transform suffers for large x:
    /// f̃_SLD = 2x/(x+1), f̃_WY = √x, f̃_WYD = (x^β + x^{1−β})/2.
    pub fn eval_tilde(&self, x: f64) -> Result<f64> {
        if !self.is_regular() {
            return Err(Error::RequiresRegular(self.label()));
        }
        if !x.is_finite() || x <= 0.0 {
            return Err(Error::Domain(format!(
                "tilde transform argument must be a positive real, got {x}"
            )));
        }
        Ok(match *self {
            MonotoneFunction::Sld => 2.0 * x / (x + 1.0),
            MonotoneFunction::Wy => x.sqrt(),
            MonotoneFunction::Wyd { beta } => 0.5 * (x.powf(beta) + x.powf(1.0 - beta)),
            MonotoneFunction::Rld => unreachable!("rld is non-regular"),
        })
    }
}

fn wyd_eval(beta: f64, x: f64) -> f64 {
    let t = x - 1.0;
    if t == 0.0 {
        return 1.0;
    }
    // expm1 keeps both denominator factors fully accurate through the
    // removable singularity at x = 1, so no series branch is needed: t and
    // ln(x) are each exact to rounding, and their ratio stays conditioned.
    let lx = x.ln();
    let da = (beta * lx).exp_m1();
    let db = ((1.0 - beta) * lx).exp_m1();
    beta * (1.0 - beta) * t * t / (da * db)
}

/// Pointwise order of two tilde transforms on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TildeOrder {
    /// f̃ ≤ g̃ on the whole grid.
    FLeG,
    /// g̃ ≤ f̃ on the whole grid.
    GLeF,
    /// The grid contains points ordered both ways.
    Incomparable,
    /// Max pointwise gap below [`ORDER_EQUAL_TOL`].
    Equal,
}

/// Classify the pointwise order of f̃ vs g̃ on `grid`.
///
/// Uses the equivalent ratio criterion: f̃ ≤ g̃ ⇔ f(0)/f(t) ≥ g(0)/g(t)
/// for all t > 0. Grid-based by design; the order of arbitrary pairs is only
/// checkable numerically.
pub fn tilde_dominates(
    f: &MonotoneFunction,
    g: &MonotoneFunction,
    grid: &[f64],
) -> Result<TildeOrder> {
    if !f.is_regular() {
        return Err(Error::RequiresRegular(f.label()));
    }
    if !g.is_regular() {
        return Err(Error::RequiresRegular(g.label()));
    }
    if grid.is_empty() {
        return Err(Error::Parameter("order grid must be non-empty".into()));
    }
    let f0 = f.at_zero();
    let g0 = g.at_zero();
    let mut max_gap: f64 = 0.0;
    let mut f_below = true;
    let mut g_below = true;
    for &t in grid {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::Parameter(format!(
                "order grid points must be positive reals, got {t}"
            )));
        }
        let rf = f0 / f.eval(t)?;
        let rg = g0 / g.eval(t)?;
        max_gap = max_gap.max((f.eval_tilde(t)? - g.eval_tilde(t)?).abs());
        let noise = 1e-14 * rf.max(rg);
        if rf < rg - noise {
            f_below = false;
        }
        if rg < rf - noise {
            g_below = false;
        }
    }
    Ok(if max_gap < ORDER_EQUAL_TOL {
        TildeOrder::Equal
    } else if f_below && !g_below {
        TildeOrder::FLeG
    } else if g_below && !f_below {
        TildeOrder::GLeF
    } else if f_below && g_below {
        TildeOrder::Equal
    } else {
        TildeOrder::Incomparable
    })
}

/// The default log-spaced order-classification grid.
pub fn default_order_grid() -> Vec<f64> {
    let (lo, hi) = ORDER_GRID_RANGE;
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..ORDER_GRID_POINTS)
        .map(|i| (llo + (lhi - llo) * i as f64 / (ORDER_GRID_POINTS - 1) as f64).exp())
        .collect()
}

impl fmt::Display for MonotoneFunction {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MonotoneFunction::Sld => write!(out, "sld"),
            MonotoneFunction::Rld => write!(out, "rld"),
            MonotoneFunction::Wy => write!(out, "wy"),
            MonotoneFunction::Wyd { beta } => write!(out, "wyd:{beta}"),
        }
    }
}

impl FromStr for MonotoneFunction {
    type Err = Error;

    fn from_str(token: &str) -> Result<Self> {
        match token.trim() {
            "sld" => Ok(MonotoneFunction::Sld),
            "rld" => Ok(MonotoneFunction::Rld),
            "wy" => Ok(MonotoneFunction::Wy),
            other => match other.strip_prefix("wyd:") {
                Some(beta) => beta
                    .parse::<f64>()
                    .map_err(|_| Error::UnknownToken(token.to_string()))
                    .and_then(MonotoneFunction::wyd),
                None => Err(Error::UnknownToken(token.to_string())),
            },
        }
    }
}

impl Serialize for MonotoneFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl<'de> serde::Deserialize<'de> for MonotoneFunction {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let token = String::deserialize(deserializer)?;
        token.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a comma-separated catalog list such as "sld,wy,wyd:0.25".
pub fn parse_catalog_list(list: &str) -> Result<Vec<MonotoneFunction>> {
    let parsed: Result<Vec<MonotoneFunction>> = list
        .split(',')
        .filter(|t| !t.trim().is_empty())
        .map(str::parse)
        .collect();
    let parsed = parsed?;
    if parsed.is_empty() {
        return Err(Error::UnknownToken(list.to_string()));
    }
    Ok(parsed)
}
