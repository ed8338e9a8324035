//! Transform specifications and the chain string grammar.
//!
//! Grammar version 1. Each chain entry is one string, `name[:arg[:arg]]`:
//!
//! | entry                         | meaning                                         |
//! |-------------------------------|-------------------------------------------------|
//! | `identity`                    | no-op                                           |
//! | `flip`                        | horizontal flip with probability 0.5            |
//! | `dsa[:policy]`                | DSA policy, ops joined by `_`                   |
//! | `zca[:epsilon]`               | ZCA whitening fitted on the training split      |
//! | `resized_crop[:min:max]`      | random resized crop, area fraction in `[min, max]` |
//! | `cutmix[:beta]`               | CutMix with `λ ~ Beta(beta, beta)`              |
//! | `patch_shuffle[:grid]`        | permute `grid × grid` tiles                     |
//!
//! DSA policy ops are `color`, `crop`, `cutout`, `flip`, `scale`, `rotate`;
//! `crop`, `cutout`, `scale` and `rotate` accept `op=value` to override
//! their strength, e.g. `dsa:crop=0.125_rotate=10`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const CHAIN_GRAMMAR_VERSION: u32 = 1;

pub const DEFAULT_DSA_POLICY: &str = "color_crop_cutout_flip_scale_rotate";
pub const DEFAULT_ZCA_EPSILON: f64 = 0.1;
pub const DEFAULT_CUTMIX_BETA: f64 = 1.0;
pub const DEFAULT_PATCH_GRID: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DsaOp {
    Color,
    /// Translation with zero fill, as a fraction of the side.
    Crop(f64),
    /// Square erasure with side as a fraction of the image side.
    Cutout(f64),
    Flip,
    /// Per-axis scale drawn from `[1/ratio, ratio]`.
    Scale(f64),
    /// Rotation drawn from `[-deg, deg]`.
    Rotate(f64),
}

impl DsaOp {
    fn parse(tok: &str) -> Result<Self> {
        let (name, arg) = match tok.split_once('=') {
            Some((n, a)) => {
                let v: f64 = a
                    .parse()
                    .map_err(|_| Error::Validation(format!("dsa op `{tok}`: bad number `{a}`")))?;
                if !(v.is_finite() && v > 0.0) {
                    return Err(Error::Validation(format!(
                        "dsa op `{tok}` needs a positive value"
                    )));
                }
                (n, Some(v))
            }
            None => (tok, None),
        };
        let op = match name {
            "color" if arg.is_none() => DsaOp::Color,
            "flip" if arg.is_none() => DsaOp::Flip,
            "crop" => DsaOp::Crop(arg.unwrap_or(0.125)),
            "cutout" => DsaOp::Cutout(arg.unwrap_or(0.5)),
            "scale" => DsaOp::Scale(arg.unwrap_or(1.2)),
            "rotate" => DsaOp::Rotate(arg.unwrap_or(15.0)),
            _ => return Err(Error::Validation(format!("unknown dsa op `{tok}`"))),
        };
        if let DsaOp::Scale(r) = op {
            if r < 1.0 {
                return Err(Error::Validation(format!(
                    "dsa scale ratio {r} must be >= 1"
                )));
            }
        }
        Ok(op)
    }
}

impl fmt::Display for DsaOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DsaOp::Color => f.write_str("color"),
            DsaOp::Flip => f.write_str("flip"),
            DsaOp::Crop(v) => write!(f, "crop={v}"),
            DsaOp::Cutout(v) => write!(f, "cutout={v}"),
            DsaOp::Scale(v) => write!(f, "scale={v}"),
            DsaOp::Rotate(v) => write!(f, "rotate={v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DsaPolicy {
    pub ops: Vec<DsaOp>,
}

impl FromStr for DsaPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .split('_')
            .filter(|t| !t.is_empty())
            .map(DsaOp::parse)
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::Validation("empty dsa policy".into()));
        }
        Ok(Self { ops })
    }
}

impl fmt::Display for DsaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, op) in self.ops.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            write!(f, "{op}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TransformSpec {
    Dsa(DsaPolicy),
    Zca { epsilon: f64 },
    ResizedCrop { min_area: f64, max_area: f64 },
    CutMix { beta: f64 },
    PatchShuffle { grid: usize },
    Flip,
    Identity,
}

impl TransformSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            TransformSpec::Zca { epsilon } if !(epsilon.is_finite() && epsilon > 0.0) => Err(
                Error::Validation(format!("zca epsilon must be > 0, got {epsilon}")),
            ),
            TransformSpec::ResizedCrop { min_area, max_area }
                if !(min_area > 0.0 && min_area <= max_area && max_area <= 1.0) =>
            {
                Err(Error::Validation(format!(
                    "resized_crop needs 0 < min <= max <= 1, got {min_area}:{max_area}"
                )))
            }
            TransformSpec::CutMix { beta } if !(beta.is_finite() && beta > 0.0) => Err(
                Error::Validation(format!("cutmix beta must be > 0, got {beta}")),
            ),
            TransformSpec::PatchShuffle { grid: 0 } => {
                Err(Error::Validation("patch_shuffle grid must be >= 1".into()))
            }
            _ => Ok(()),
        }
    }
}

fn num<T: FromStr>(entry: &str, tok: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| Error::Validation(format!("transform `{entry}`: bad argument `{tok}`")))
}

impl FromStr for TransformSpec {
    type Err = Error;

    fn from_str(entry: &str) -> Result<Self> {
        let mut parts = entry.trim().split(':');
        let name = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let arity = |max: usize| -> Result<()> {
            if args.len() > max {
                Err(Error::Validation(format!(
                    "transform `{entry}` takes at most {max} argument(s)"
                )))
            } else {
                Ok(())
            }
        };
        let spec = match name {
            "identity" => {
                arity(0)?;
                TransformSpec::Identity
            }
            "flip" => {
                arity(0)?;
                TransformSpec::Flip
            }
            "dsa" => {
                arity(1)?;
                TransformSpec::Dsa(
                    args.first()
                        .copied()
                        .unwrap_or(DEFAULT_DSA_POLICY)
                        .parse()?,
                )
            }
            "zca" => {
                arity(1)?;
                TransformSpec::Zca {
                    epsilon: args
                        .first()
                        .map_or(Ok(DEFAULT_ZCA_EPSILON), |a| num(entry, a))?,
                }
            }
            "resized_crop" => {
                let (min_area, max_area) = match args.as_slice() {
                    [] => (0.08, 1.0),
                    [lo, hi] => (num(entry, lo)?, num(entry, hi)?),
                    _ => {
                        return Err(Error::Validation(format!(
                            "transform `{entry}` takes zero or two arguments"
                        )))
                    }
                };
                TransformSpec::ResizedCrop { min_area, max_area }
            }
            "cutmix" => {
                arity(1)?;
                TransformSpec::CutMix {
                    beta: args
                        .first()
                        .map_or(Ok(DEFAULT_CUTMIX_BETA), |a| num(entry, a))?,
                }
            }
            "patch_shuffle" => {
                arity(1)?;
                TransformSpec::PatchShuffle {
                    grid: args
                        .first()
                        .map_or(Ok(DEFAULT_PATCH_GRID), |a| num(entry, a))?,
                }
            }
            _ => return Err(Error::Validation(format!("unknown transform `{entry}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransformSpec::Dsa(p) => write!(f, "dsa:{p}"),
            TransformSpec::Zca { epsilon } => write!(f, "zca:{epsilon}"),
            TransformSpec::ResizedCrop { min_area, max_area } => {
                write!(f, "resized_crop:{min_area}:{max_area}")
            }
            TransformSpec::CutMix { beta } => write!(f, "cutmix:{beta}"),
            TransformSpec::PatchShuffle { grid } => write!(f, "patch_shuffle:{grid}"),
            TransformSpec::Flip => f.write_str("flip"),
            TransformSpec::Identity => f.write_str("identity"),
        }
    }
}

impl TryFrom<String> for TransformSpec {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TransformSpec> for String {
    fn from(t: TransformSpec) -> String {
        t.to_string()
    }
}

/// Ordered list of transforms. An empty chain is the identity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AugChain {
    pub transforms: Vec<TransformSpec>,
}

impl AugChain {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn new(transforms: Vec<TransformSpec>) -> Self {
        Self { transforms }
    }

    pub fn parse<S: AsRef<str>>(entries: &[S]) -> Result<Self> {
        entries
            .iter()
            .map(|e| e.as_ref().parse())
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    pub fn is_identity(&self) -> bool {
        self.transforms
            .iter()
            .all(|t| matches!(t, TransformSpec::Identity))
    }

    pub fn zca_epsilon(&self) -> Option<f64> {
        self.transforms.iter().find_map(|t| match t {
            TransformSpec::Zca { epsilon } => Some(*epsilon),
            _ => None,
        })
    }

    pub fn has_cutmix(&self) -> bool {
        self.transforms
            .iter()
            .any(|t| matches!(t, TransformSpec::CutMix { .. }))
    }

    pub fn validate(&self) -> Result<()> {
        self.transforms.iter().try_for_each(TransformSpec::validate)
    }

    pub fn entries(&self) -> Vec<String> {
        self.transforms.iter().map(ToString::to_string).collect()
    }
}
