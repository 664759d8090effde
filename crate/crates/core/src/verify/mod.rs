//! Measured, pass/fail numerical experiments for the analytic estimates the
//! solver relies on.
//!
//! Every check draws its random inputs from a [`ChaCha8Rng`] stream keyed by
//! the seed and the check, so reports are reproducible. Operator norms are
//! lower-bounded by sampling; checks test scaling laws and resolution
//! stability rather than exact constants.
//!
//! [`ChaCha8Rng`]: rand_chacha::ChaCha8Rng

mod bony;
mod embedding;
mod heat;
mod oseen;
mod params;
mod paraproduct;
pub(crate) mod random;
mod smoothing;
mod step3;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monitor::format_number;

pub use bony::verify_bony_identity;
pub use embedding::{embedding_ratio, verify_embedding};
pub use heat::{single_mode_heat_sup, verify_heat_ln_linf};
pub use oseen::verify_oseen_kernel;
pub use params::{
    BonyParams, EmbeddingParams, HeatParams, OseenParams, ParaproductParams, SmoothingParams,
    Step3Params, VerifyParams,
};
pub use paraproduct::{paraproduct_ratios, verify_paraproduct, ParaproductRatios};
pub use smoothing::{verify_smoothing, SmoothingData};
pub use step3::{step3_terms, verify_step3_bound, Step3Profile, Step3Terms};

/// Serde for `f64` that keeps non-finite values as the strings `inf`,
/// `-inf` and `nan`, which JSON numbers cannot carry.
mod lenient_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("not a number: {t}"))),
            },
        }
    }
}

/// A named measured quantity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub name: String,
    #[serde(with = "lenient_f64")]
    pub value: f64,
}

impl Measured {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

/// A fitted exponent with a ±2 standard-error band and its acceptance window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FittedExponent {
    pub name: String,
    #[serde(with = "lenient_f64")]
    pub value: f64,
    pub band: [f64; 2],
    pub expected: f64,
    pub tolerance: f64,
}

impl FittedExponent {
    pub fn within_tolerance(&self) -> bool {
        (self.value - self.expected).abs() <= self.tolerance
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub trials: usize,
    /// The first entry is the headline constant.
    pub constants: Vec<Measured>,
    pub exponents: Vec<FittedExponent>,
    pub pass: bool,
    pub parameters: serde_json::Value,
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.value)
    }

    pub fn exponent(&self, name: &str) -> Option<&FittedExponent> {
        self.exponents.iter().find(|e| e.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Builder that stamps the elapsed time on completion.
pub(crate) struct ReportBuilder {
    check: String,
    trials: usize,
    constants: Vec<Measured>,
    exponents: Vec<FittedExponent>,
    parameters: serde_json::Value,
    start: Instant,
    extra_seconds: f64,
}

impl ReportBuilder {
    pub fn new(check: impl Into<String>, parameters: serde_json::Value) -> Self {
        Self {
            check: check.into(),
            trials: 0,
            constants: Vec::new(),
            exponents: Vec::new(),
            parameters,
            start: Instant::now(),
            extra_seconds: 0.0,
        }
    }

    pub fn trials(&mut self, n: usize) -> &mut Self {
        self.trials = n;
        self
    }

    /// Count work done before the builder existed.
    pub fn add_elapsed(&mut self, seconds: f64) -> &mut Self {
        self.extra_seconds += seconds;
        self
    }

    pub fn constant(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.constants.push(Measured::new(name, value));
        self
    }

    pub fn exponent(&mut self, e: FittedExponent) -> &mut Self {
        self.exponents.push(e);
        self
    }

    pub fn finish(&mut self, pass: bool) -> VerificationReport {
        VerificationReport {
            check: std::mem::take(&mut self.check),
            trials: self.trials,
            constants: std::mem::take(&mut self.constants),
            exponents: std::mem::take(&mut self.exponents),
            pass,
            parameters: self.parameters.take(),
            elapsed_seconds: self.start.elapsed().as_secs_f64() + self.extra_seconds,
        }
    }
}

/// Fit `log y = a·log x + b` and package the slope.
pub(crate) fn fit_exponent(
    name: &str,
    xs: &[f64],
    ys: &[f64],
    expected: f64,
    tolerance: f64,
) -> Result<FittedExponent> {
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::FitUndefined(format!("{name}: non-positive sample")));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let fit = crate::stats::linear_fit(&lx, &ly)
        .ok_or_else(|| Error::FitUndefined(format!("{name}: fewer than two distinct abscissae")))?;
    Ok(FittedExponent {
        name: name.to_string(),
        value: fit.slope,
        band: [
            fit.slope - 2.0 * fit.slope_stderr,
            fit.slope + 2.0 * fit.slope_stderr,
        ],
        expected,
        tolerance,
    })
}

/// `max / min` over positive values (`inf` if the minimum is zero).
pub(crate) fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// The checks of the suite; [`CheckKind::Smoothing`] yields one report per
/// `(r, α)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Smoothing,
    Paraproduct,
    BonyIdentity,
    HeatLnLinf,
    OseenKernel,
    Embedding,
    Step3Bound,
}

impl CheckKind {
    pub const ALL: [CheckKind; 7] = [
        CheckKind::Smoothing,
        CheckKind::Paraproduct,
        CheckKind::BonyIdentity,
        CheckKind::HeatLnLinf,
        CheckKind::OseenKernel,
        CheckKind::Embedding,
        CheckKind::Step3Bound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CheckKind::Smoothing => "smoothing",
            CheckKind::Paraproduct => "paraproduct",
            CheckKind::BonyIdentity => "bony_identity",
            CheckKind::HeatLnLinf => "heat_ln_linf",
            CheckKind::OseenKernel => "oseen_kernel",
            CheckKind::Embedding => "embedding",
            CheckKind::Step3Bound => "step3_bound",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == name)
            .ok_or_else(|| Error::Config(format!("unknown check {name:?}")))
    }
}

/// The selected checks, in the order of [`CheckKind::ALL`].
pub fn verify_selected(
    params: &VerifyParams,
    checks: &[CheckKind],
) -> Result<Vec<VerificationReport>> {
    params.validate()?;
    let seed = params.seed;
    let mut out = Vec::new();
    for kind in CheckKind::ALL.into_iter().filter(|k| checks.contains(k)) {
        match kind {
            CheckKind::Smoothing => {
                let data = SmoothingData::measure(&params.smoothing, seed)?;
                for &r in &params.smoothing.r_list {
                    for &alpha in &params.smoothing.alphas {
                        out.push(data.report(r, alpha)?);
                    }
                }
            }
            CheckKind::Paraproduct => {
                for &s in &params.paraproduct.s_list {
                    out.push(verify_paraproduct(s, &params.paraproduct, seed)?);
                }
            }
            CheckKind::BonyIdentity => out.push(verify_bony_identity(&params.bony, seed)?),
            CheckKind::HeatLnLinf => out.push(verify_heat_ln_linf(&params.heat, seed)?),
            CheckKind::OseenKernel => out.push(verify_oseen_kernel(&params.oseen, seed)?),
            CheckKind::Embedding => out.push(verify_embedding(&params.embedding, seed)?),
            CheckKind::Step3Bound => out.push(verify_step3_bound(&params.step3, seed)?),
        }
    }
    Ok(out)
}

/// Every check with the configured parameters.
pub fn verify_all(params: &VerifyParams) -> Result<Vec<VerificationReport>> {
    verify_selected(params, &CheckKind::ALL)
}

/// `check,constant,exponent,pass` with one row per report.
pub fn summary_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("check,constant,exponent,pass\n");
    for r in reports {
        let constant = r
            .constants
            .first()
            .map(|c| format_number(c.value))
            .unwrap_or_default();
        let exponent = r
            .exponents
            .first()
            .map(|e| format_number(e.value))
            .unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.check, constant, exponent, r.pass
        ));
    }
    out
}
