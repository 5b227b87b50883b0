//! Attachment functions.
//!
//! An attachment function `f` maps the current indegree of an old vertex to
//! its connection propensity: a newcomer at step `m` links to vertex `k` with
//! probability `f(deg(k)) / (m - 1)`. Admissibility requires `0 < f(k) <= k + 1`
//! so that this ratio is a probability, and the CLT rates are stated in terms
//! of a slope `gamma` with `f(k) <= gamma * k + 1`.
//!
//! The textual form (`linear:0.5,0.5`, `power:0.3,0.2,0.4`, `const:0.7`,
//! `table:0.4,0.9,1.2`) is what every command-line `--f` flag accepts.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Horizon used by [`AttachmentFunction::parse_spec`].
pub const DEFAULT_HORIZON: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AttachmentError {
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("admissibility violated at k={k}: f(k)={value} exceeds bound {bound}")]
    Violation { k: u64, value: f64, bound: f64 },
    #[error("f(k)={value} at k={k} is not positive")]
    NonPositive { k: u64, value: f64 },
    #[error("no slope gamma in (0,1) with f(k) <= gamma*k + 1 (supremum {sup})")]
    Slope { sup: f64 },
}

/// Shape of the attachment rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Kind {
    /// `f(k) = gamma * k + eta`
    Linear { gamma: f64, eta: f64 },
    /// `f(k) = a * k^b + c`
    Power { a: f64, b: f64, c: f64 },
    /// `f(k) = c`
    Constant { c: f64 },
    /// Explicit `f(0..K)`, constant tail equal to the last entry.
    Table { values: Vec<f64> },
}

/// A validated attachment function together with its slope bound `gamma`.
impl Kind {
    #[inline]
    pub fn evaluate(&self, k: u64) -> f64 {
        match self {
            Kind::Linear { gamma, eta } => gamma * k as f64 + eta,
            Kind::Power { a, b, c } => {
                if k == 0 && *b > 0.0 {
                    *c
                } else {
                    a * (k as f64).powf(*b) + c
                }
            }
            Kind::Constant { c } => *c,
            Kind::Table { values } => {
                let idx = (k as usize).min(values.len() - 1);
                values[idx]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttachmentFunction {
    kind: Kind,
    gamma: f64,
}

impl AttachmentFunction {
    pub fn linear(gamma: f64, eta: f64) -> Result<Self, AttachmentError> {
        Self::new(Kind::Linear { gamma, eta })
    }

    pub fn power(a: f64, b: f64, c: f64) -> Result<Self, AttachmentError> {
        Self::new(Kind::Power { a, b, c })
    }

    pub fn constant(c: f64) -> Result<Self, AttachmentError> {
        Self::new(Kind::Constant { c })
    }

    pub fn table(values: Vec<f64>) -> Result<Self, AttachmentError> {
        Self::new(Kind::Table { values })
    }

    /// Builds and validates over [`DEFAULT_HORIZON`].
    pub fn new(kind: Kind) -> Result<Self, AttachmentError> {
        check_parameters(&kind)?;
        let f0 = kind.evaluate(0);
        if f0 > 1.0 {
            return Err(AttachmentError::Violation {
                k: 0,
                value: f0,
                bound: 1.0,
            });
        }
        let gamma = derive_gamma(&kind)?;
        let f = AttachmentFunction { kind, gamma };
        f.validate(DEFAULT_HORIZON)?;
        Ok(f)
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Slope bound with `f(k) <= gamma * k + 1`; for linear rules the slope itself.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, Kind::Linear { .. })
    }

    /// `f(0)`
    pub fn eta(&self) -> f64 {
        self.evaluate(0)
    }

    #[inline]
    pub fn evaluate(&self, k: u64) -> f64 {
        self.kind.evaluate(k)
    }

    /// `f(0..len)` as a vector.
    pub fn tabulate(&self, len: usize) -> Vec<f64> {
        (0..len as u64).map(|k| self.evaluate(k)).collect()
    }

    /// True if `f` is nondecreasing on `0..=upto`.
    pub fn is_nondecreasing(&self, upto: u64) -> bool {
        match &self.kind {
            Kind::Linear { .. } | Kind::Constant { .. } => true,
            Kind::Power { a, b, .. } => *a >= 0.0 && *b >= 0.0,
            Kind::Table { values } => {
                let stop = (upto as usize + 1).min(values.len());
                values[..stop].windows(2).all(|w| w[0] <= w[1])
            }
        }
    }

    /// Checks `0 < f(k) <= k + 1` and `f(k) <= gamma*k + 1` on `[0, horizon]`.
    ///
    /// Linear, power and constant rules are checked in closed form, which
    /// covers every `k` regardless of the horizon. Tables are checked entry by
    /// entry up to the horizon plus the first tail point, past which the
    /// constant tail only moves further below both bounds.
    pub fn validate(&self, horizon: u64) -> Result<(), AttachmentError> {
        let check = |k: u64| -> Result<(), AttachmentError> {
            let v = self.evaluate(k);
            if !v.is_finite() || v <= 0.0 {
                return Err(AttachmentError::NonPositive { k, value: v });
            }
            let bound = k as f64 + 1.0;
            if v > bound {
                return Err(AttachmentError::Violation { k, value: v, bound });
            }
            let slope_bound = self.gamma * k as f64 + 1.0;
            if v > slope_bound * (1.0 + 1e-12) {
                return Err(AttachmentError::Violation {
                    k,
                    value: v,
                    bound: slope_bound,
                });
            }
            Ok(())
        };
        match &self.kind {
            Kind::Linear { .. } | Kind::Constant { .. } => check(0),
            Kind::Power { a, b, .. } => {
                // k^b is concave for b <= 1, so f(k) <= f(1) + a*b*(k - 1)
                // for k >= 1; f(0) <= 1, f(1) <= 2 and a*b <= 1 settle k+1.
                check(0)?;
                if horizon >= 1 {
                    check(1)?;
                }
                if a * b > 1.0 {
                    // Not provable by the tangent argument; scan the horizon.
                    for k in 2..=horizon {
                        check(k)?;
                    }
                }
                Ok(())
            }
            Kind::Table { values } => {
                let last = (values.len() as u64).min(horizon);
                for k in 0..=last {
                    check(k)?;
                }
                Ok(())
            }
        }
    }

    /// Parses the command-line grammar and validates over [`DEFAULT_HORIZON`].
    pub fn parse_spec(text: &str) -> Result<Self, AttachmentError> {
        let text_trim = text.trim_end();
        let colon = text_trim.find(':').ok_or_else(|| AttachmentError::Syntax {
            pos: text_trim.len(),
            msg: "expected '<kind>:<params>'".into(),
        })?;
        let name = &text_trim[..colon];
        let params = parse_numbers(&text_trim[colon + 1..], colon + 1)?;
        let arity = |want: usize| -> Result<(), AttachmentError> {
            if params.len() == want {
                Ok(())
            } else {
                Err(AttachmentError::Syntax {
                    pos: colon + 1,
                    msg: format!("{name} takes {want} parameters, got {}", params.len()),
                })
            }
        };
        let kind = match name {
            "linear" => {
                arity(2)?;
                Kind::Linear {
                    gamma: params[0],
                    eta: params[1],
                }
            }
            "power" => {
                arity(3)?;
                Kind::Power {
                    a: params[0],
                    b: params[1],
                    c: params[2],
                }
            }
            "const" => {
                arity(1)?;
                Kind::Constant { c: params[0] }
            }
            "table" => {
                if params.is_empty() {
                    return Err(AttachmentError::Syntax {
                        pos: colon + 1,
                        msg: "table needs at least one value".into(),
                    });
                }
                Kind::Table { values: params }
            }
            other => {
                return Err(AttachmentError::Syntax {
                    pos: 0,
                    msg: format!("unknown kind '{other}'"),
                })
            }
        };
        Self::new(kind)
    }
}

fn parse_numbers(s: &str, offset: usize) -> Result<Vec<f64>, AttachmentError> {
    let mut out = Vec::new();
    let mut pos = offset;
    for piece in s.split(',') {
        let v: f64 = piece.trim().parse().map_err(|_| AttachmentError::Syntax {
            pos,
            msg: format!("expected a number, found '{piece}'"),
        })?;
        if !v.is_finite() {
            return Err(AttachmentError::Syntax {
                pos,
                msg: format!("non-finite value '{piece}'"),
            });
        }
        out.push(v);
        pos += piece.len() + 1;
    }
    Ok(out)
}

fn check_parameters(kind: &Kind) -> Result<(), AttachmentError> {
    let open_unit = |x: f64| x > 0.0 && x < 1.0;
    match kind {
        Kind::Linear { gamma, eta } => {
            if !open_unit(*gamma) || !open_unit(*eta) {
                return Err(AttachmentError::Parameter(format!(
                    "linear rule needs gamma, eta in (0,1), got {gamma}, {eta}"
                )));
            }
        }
        Kind::Power { a, b, c } => {
            if *a < 0.0 || !(0.0..=1.0).contains(b) {
                return Err(AttachmentError::Parameter(format!(
                    "power rule needs a >= 0 and b in [0,1], got a={a}, b={b}"
                )));
            }
            if *c + if *b == 0.0 { *a } else { 0.0 } <= 0.0 {
                return Err(AttachmentError::NonPositive { k: 0, value: *c });
            }
        }
        Kind::Constant { .. } => {}
        Kind::Table { values } => {
            if values.is_empty() {
                return Err(AttachmentError::Parameter("empty table".into()));
            }
        }
    }
    Ok(())
}

/// Supremum over `k >= 1` of `(f(k) - 1) / k`, then clamped into (0,1).
fn derive_gamma(kind: &Kind) -> Result<f64, AttachmentError> {
    const FLOOR: f64 = 1e-9;
    let sup = match kind {
        Kind::Linear { gamma, .. } => return Ok(*gamma),
        Kind::Constant { c } => c - 1.0,
        Kind::Power { a, b, c } => {
            let g = |k: f64| (a * k.powf(*b) + c - 1.0) / k;
            let mut best = g(1.0);
            if *b >= 1.0 {
                best = best.max(*a);
            } else if *c < 1.0 && *a > 0.0 {
                // Interior critical point of a*k^(b-1) + (c-1)/k.
                let kstar = ((1.0 - c) / (a * (1.0 - b))).powf(1.0 / b);
                if kstar.is_finite() && kstar > 1.0 {
                    best = best.max(g(kstar.floor())).max(g(kstar.ceil()));
                }
            }
            // Remaining behaviour for c >= 1 is decreasing towards 0.
            best
        }
        Kind::Table { values } => {
            let mut best = f64::NEG_INFINITY;
            for (k, v) in values.iter().enumerate().skip(1) {
                best = best.max((v - 1.0) / k as f64);
            }
            let tail = *values.last().unwrap();
            let first_tail = values.len().max(1) as f64;
            best.max(if tail > 1.0 { (tail - 1.0) / first_tail } else { 0.0 })
        }
    };
    if sup >= 1.0 {
        return Err(AttachmentError::Slope { sup });
    }
    Ok(sup.max(FLOOR))
}

impl fmt::Display for AttachmentFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Linear { gamma, eta } => write!(f, "linear:{gamma},{eta}"),
            Kind::Power { a, b, c } => write!(f, "power:{a},{b},{c}"),
            Kind::Constant { c } => write!(f, "const:{c}"),
            Kind::Table { values } => {
                write!(f, "table:")?;
                for (i, v) in values.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for AttachmentFunction {
    type Err = AttachmentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse_spec(s)
    }
}
