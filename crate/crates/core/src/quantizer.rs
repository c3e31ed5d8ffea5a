//! Low-resolution ADC model.
//!
//! Each rail (real and imaginary part) of a received vector is normalized by
//! its own RMS value, passed through a Lloyd-Max quantizer designed for a
//! unit-variance Gaussian source, and scaled back. The decision pattern is
//! therefore invariant to positive scaling of the input.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array1, ArrayView1};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::{cx, Cx, Real};

/// 1-bit reconstruction level, `sqrt(2/π)`.
pub const ONE_BIT_LEVEL: f64 = 0.797_884_560_802_865_4;
/// 2-bit decision threshold between the inner and outer levels.
pub const TWO_BIT_THRESHOLD: f64 = 0.9816;
pub const TWO_BIT_INNER: f64 = 0.4528;
pub const TWO_BIT_OUTER: f64 = 1.5104;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Resolution {
    OneBit,
    TwoBit,
    /// Infinite-resolution sentinel: samples pass through untouched.
    Unquantized,
}

impl Resolution {
    pub fn bits(self) -> Option<u32> {
        match self {
            Resolution::OneBit => Some(1),
            Resolution::TwoBit => Some(2),
            Resolution::Unquantized => None,
        }
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bits() {
            Some(b) => write!(f, "{b}"),
            None => f.write_str("inf"),
        }
    }
}

impl FromStr for Resolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "1" => Ok(Resolution::OneBit),
            "2" => Ok(Resolution::TwoBit),
            "inf" | "infinity" | "none" | "unquantized" => Ok(Resolution::Unquantized),
            other => Err(Error::Config(format!(
                "unsupported quantizer resolution {other:?} (expected 1, 2 or inf)"
            ))),
        }
    }
}

/// Gain-normalization rule applied ahead of the quantizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Agc {
    /// Divide each rail by its RMS over the whole vector.
    #[default]
    RmsPerRail,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantizerSpec {
    pub resolution: Resolution,
    pub agc: Agc,
}

impl QuantizerSpec {
    pub fn new(resolution: Resolution) -> Self {
        QuantizerSpec {
            resolution,
            agc: Agc::RmsPerRail,
        }
    }

    pub fn one_bit() -> Self {
        Self::new(Resolution::OneBit)
    }

    pub fn two_bit() -> Self {
        Self::new(Resolution::TwoBit)
    }

    pub fn unquantized() -> Self {
        Self::new(Resolution::Unquantized)
    }
}

/// Per-call diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct QuantizeReport {
    /// Rails whose RMS was zero; those rails are output as zeros.
    pub zero_rails: usize,
}

/// Level index of a unit-variance sample: 1-bit gives `{-1, +1}`, 2-bit gives
/// `{-2, -1, +1, +2}` (outer levels at ±2). Zero maps to the positive side.
pub fn decision(x: f64, resolution: Resolution) -> i8 {
    let s: i8 = if x < 0.0 { -1 } else { 1 };
    match resolution {
        Resolution::OneBit => s,
        Resolution::TwoBit => {
            if x.abs() < TWO_BIT_THRESHOLD {
                s
            } else {
                2 * s
            }
        }
        Resolution::Unquantized => 0,
    }
}

fn level(index: i8, resolution: Resolution) -> f64 {
    let mag = match (resolution, index.unsigned_abs()) {
        (Resolution::OneBit, _) => ONE_BIT_LEVEL,
        (_, 1) => TWO_BIT_INNER,
        _ => TWO_BIT_OUTER,
    };
    f64::from(index.signum()) * mag
}

/// Quantizes a single unit-variance sample.
pub fn quantize_scalar(x: f64, resolution: Resolution) -> f64 {
    match resolution {
        Resolution::Unquantized => x,
        r => level(decision(x, r), r),
    }
}

fn rail_rms<T: Real>(v: ArrayView1<'_, Cx<T>>, rail: impl Fn(&Cx<T>) -> T) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let ss: f64 = v.iter().map(|z| rail(z).as_f64().powi(2)).sum();
    (ss / v.len() as f64).sqrt()
}

/// Applies the ADC model to `v`.
pub fn quantize<T: Real>(v: ArrayView1<'_, Cx<T>>, spec: QuantizerSpec) -> Array1<Cx<T>> {
    quantize_with_report(v, spec).0
}

pub fn quantize_with_report<T: Real>(v: ArrayView1<'_, Cx<T>>, spec: QuantizerSpec) -> (Array1<Cx<T>>, QuantizeReport) {
    let res = spec.resolution;
    if res == Resolution::Unquantized {
        return (v.to_owned(), QuantizeReport::default());
    }
    let Agc::RmsPerRail = spec.agc;
    let s_re = rail_rms(v, |z| z.re);
    let s_im = rail_rms(v, |z| z.im);
    let report = QuantizeReport {
        zero_rails: usize::from(s_re == 0.0) + usize::from(s_im == 0.0),
    };
    let q = |x: T, s: f64| {
        if s == 0.0 {
            T::zero()
        } else {
            T::of(s * quantize_scalar(x.as_f64() / s, res))
        }
    };
    (v.mapv(|z| cx(q(z.re, s_re), q(z.im, s_im))), report)
}

/// Per-entry `[real, imag]` level indices that [`quantize`] would select.
/// Zero rails report index 0.
pub fn decisions<T: Real>(v: ArrayView1<'_, Cx<T>>, resolution: Resolution) -> Vec<[i8; 2]> {
    let s_re = rail_rms(v, |z| z.re);
    let s_im = rail_rms(v, |z| z.im);
    let d = |x: T, s: f64| {
        if s == 0.0 {
            0
        } else {
            decision(x.as_f64() / s, resolution)
        }
    };
    v.iter().map(|z| [d(z.re, s_re), d(z.im, s_im)]).collect()
}
