//! Experiment configuration: a TOML file with a grid, named bodies and
//! max-affine functions, and the cases each suite runs on.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use toml::Spanned;

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::geodesics::default_samples;
use crate::grid::{DualGridSpec, GridFn, GridSpec};
use crate::rooftop::Verdict;

use super::Suite;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: RawGrid,
    dual: Option<RawDual>,
    t_samples: Option<Spanned<Vec<f64>>>,
    suites: Option<Vec<Spanned<String>>>,
    output: Option<String>,
    #[serde(default)]
    bodies: BTreeMap<String, Spanned<Vec<Vec<f64>>>>,
    #[serde(default)]
    functions: BTreeMap<String, Spanned<RawFunction>>,
    weights: Option<Spanned<RawWeights>>,
    #[serde(default)]
    body_pairs: Vec<RawBodyPair>,
    #[serde(default)]
    function_pairs: Vec<RawFunctionPair>,
    #[serde(default)]
    rooftop_pairs: Vec<RawRooftopPair>,
    #[serde(default)]
    shift_checks: Vec<RawShiftCheck>,
    #[serde(default)]
    residual_cases: Vec<RawResidualCase>,
    #[serde(default)]
    connectivity: Vec<RawConnectivity>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Spanned<usize>,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "N")]
    samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDual {
    #[serde(rename = "A")]
    cap: f64,
    #[serde(rename = "M")]
    samples: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunction {
    #[serde(default = "yes")]
    toric: bool,
    pieces: Vec<Spanned<RawPiece>>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    coef: Vec<f64>,
    constant: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPathPiece {
    coef: Vec<f64>,
    constant: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWeights {
    c0: f64,
    c1: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBodyPair {
    l0: Spanned<String>,
    l1: Spanned<String>,
    #[serde(default)]
    volume_equality: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFunctionPair {
    u0: Spanned<String>,
    u1: Spanned<String>,
    expected: Option<Spanned<Vec<RawPathPiece>>>,
    gap0: Option<[f64; 2]>,
    energy: Option<[f64; 2]>,
    #[serde(default = "yes")]
    affine_energy: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRooftopPair {
    phi: Spanned<String>,
    psi: Spanned<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawShiftCheck {
    u: Spanned<String>,
    v: Spanned<String>,
    expected: Spanned<String>,
    shifts: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawResidualCase {
    phi: Spanned<String>,
    expected: Option<Spanned<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConnectivity {
    u0: Spanned<String>,
    u1: Spanned<String>,
    expected: Spanned<String>,
    #[serde(default)]
    refine: bool,
}

/// `max_k (<coef_k, s> + constant_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineMax {
    pub pieces: Vec<(Vec<f64>, f64)>,
    pub toric: bool,
}

impl AffineMax {
    pub fn eval(&self, s: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|(c, b)| c.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() + b)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn to_grid(&self, spec: &GridSpec) -> Result<GridFn> {
        GridFn::build(*spec, |s| self.eval(s))
    }
}

/// Max-affine family whose constants move linearly in `t`:
/// `max_k (<coef_k, s> + a_k + b_k t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinePath {
    pub pieces: Vec<(Vec<f64>, [f64; 2])>,
}

impl AffinePath {
    pub fn at(&self, t: f64) -> AffineMax {
        AffineMax {
            pieces: self.pieces.iter().map(|(c, [a, b])| (c.clone(), a + b * t)).collect(),
            toric: true,
        }
    }
}

/// A function name, or `residual(name)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FunctionRef {
    Named(String),
    Residual(String),
}

impl FunctionRef {
    pub fn base(&self) -> &str {
        match self {
            FunctionRef::Named(s) | FunctionRef::Residual(s) => s,
        }
    }
}

impl std::str::FromStr for FunctionRef {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let name = s.trim();
        Ok(match name.strip_prefix("residual(").and_then(|x| x.strip_suffix(')')) {
            Some(inner) => FunctionRef::Residual(inner.trim().to_string()),
            None => FunctionRef::Named(name.to_string()),
        })
    }
}

impl std::fmt::Display for FunctionRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FunctionRef::Named(s) => f.write_str(s),
            FunctionRef::Residual(s) => write!(f, "residual({s})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub c0: f64,
    /// `None` means calibrated: `c0^(n+1) Cap(K0) = c1^(n+1) Cap(K1)`.
    pub c1: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodyPair {
    pub l0: String,
    pub l1: String,
    pub volume_equality: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionPair {
    pub u0: String,
    pub u1: String,
    pub expected: Option<AffinePath>,
    pub gap0: Option<[f64; 2]>,
    pub energy: Option<[f64; 2]>,
    /// Whether the pair enters the energy-affinity suite.
    pub affine_energy: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RooftopPair {
    pub phi: String,
    pub psi: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCheck {
    pub u: String,
    pub v: String,
    pub expected: String,
    pub shifts: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualCase {
    pub phi: String,
    pub expected: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityCase {
    pub u0: FunctionRef,
    pub u1: FunctionRef,
    pub expected: Verdict,
    pub refine: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub dual: DualGridSpec,
    pub t_samples: Vec<f64>,
    pub suites: Vec<Suite>,
    pub output: Option<PathBuf>,
    pub bodies: BTreeMap<String, ConvexBody>,
    pub functions: BTreeMap<String, AffineMax>,
    pub weights: Option<Weights>,
    pub body_pairs: Vec<BodyPair>,
    pub function_pairs: Vec<FunctionPair>,
    pub rooftop_pairs: Vec<RooftopPair>,
    pub shift_checks: Vec<ShiftCheck>,
    pub residual_cases: Vec<ResidualCase>,
    pub connectivity: Vec<ConnectivityCase>,
}

fn line_of(text: &str, offset: usize) -> usize {
    text.as_bytes()[..offset.min(text.len())].iter().filter(|&&b| b == b'\n').count() + 1
}

struct Ctx<'a> {
    text: &'a str,
}

impl Ctx<'_> {
    fn err<T>(&self, span: std::ops::Range<usize>, message: impl Into<String>) -> Result<T> {
        Err(Error::Config { line: line_of(self.text, span.start), message: message.into() })
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config {
        line: e.span().map_or(0, |s| line_of(text, s.start)),
        message: e.message().to_string(),
    })?;
    let cx = Ctx { text };

    let n = *raw.grid.n.get_ref();
    let grid = GridSpec::new(n, raw.grid.radius, raw.grid.samples)
        .or_else(|e| cx.err(raw.grid.n.span(), e.to_string()))?;
    let dual = match &raw.dual {
        Some(d) => DualGridSpec::new(n, d.cap, d.samples)
            .or_else(|e| cx.err(raw.grid.n.span(), e.to_string()))?,
        None => DualGridSpec::default_for(&grid),
    };

    let t_samples = match &raw.t_samples {
        Some(ts) => {
            let v = ts.get_ref().clone();
            if v.is_empty()
                || v.iter().any(|t| !(*t > 0.0 && *t < 1.0))
                || v.windows(2).any(|w| w[0] >= w[1])
            {
                return cx.err(ts.span(), "t_samples must increase strictly inside (0, 1)");
            }
            v
        }
        None => default_samples(),
    };

    let mut suites = Vec::new();
    for s in raw.suites.iter().flatten() {
        match s.get_ref().parse::<Suite>() {
            Ok(suite) => suites.push(suite),
            Err(e) => return cx.err(s.span(), e.to_string()),
        }
    }

    let mut bodies = BTreeMap::new();
    for (name, gens) in &raw.bodies {
        let body = ConvexBody::new(n, gens.get_ref().clone())
            .or_else(|e| cx.err(gens.span(), format!("body `{name}`: {e}")))?;
        bodies.insert(name.clone(), body);
    }

    let mut functions = BTreeMap::new();
    for (name, f) in &raw.functions {
        let rf = f.get_ref();
        if rf.pieces.is_empty() {
            return cx.err(f.span(), format!("function `{name}` has no pieces"));
        }
        let mut pieces = Vec::new();
        for p in &rf.pieces {
            let piece = p.get_ref();
            if piece.coef.len() != n {
                return cx.err(p.span(), format!("function `{name}`: coefficient vector is not in R^{n}"));
            }
            if rf.toric && piece.coef.iter().any(|&c| c < 0.0) {
                return cx.err(
                    p.span(),
                    format!("function `{name}`: negative slope in a toric function"),
                );
            }
            pieces.push((piece.coef.clone(), piece.constant));
        }
        functions.insert(name.clone(), AffineMax { pieces, toric: rf.toric });
    }

    let body = |s: &Spanned<String>| -> Result<String> {
        if bodies.contains_key(s.get_ref()) {
            Ok(s.get_ref().clone())
        } else {
            cx.err(s.span(), format!("undefined body `{}`", s.get_ref()))
        }
    };
    let func = |s: &Spanned<String>| -> Result<String> {
        if functions.contains_key(s.get_ref()) {
            Ok(s.get_ref().clone())
        } else {
            cx.err(s.span(), format!("undefined function `{}`", s.get_ref()))
        }
    };
    let func_ref = |s: &Spanned<String>| -> Result<FunctionRef> {
        let Ok(r) = s.get_ref().parse::<FunctionRef>();
        if functions.contains_key(r.base()) {
            Ok(r)
        } else {
            cx.err(s.span(), format!("undefined function `{}`", r.base()))
        }
    };

    let weights = match &raw.weights {
        Some(w) => {
            let rw = w.get_ref();
            let positive = |x: f64| x > 0.0 && x.is_finite();
            if !positive(rw.c0) || rw.c1.is_some_and(|c| !positive(c)) {
                return cx.err(w.span(), "weights must be positive");
            }
            Some(Weights { c0: rw.c0, c1: rw.c1 })
        }
        None => None,
    };

    let body_pairs = raw
        .body_pairs
        .iter()
        .map(|p| Ok(BodyPair { l0: body(&p.l0)?, l1: body(&p.l1)?, volume_equality: p.volume_equality }))
        .collect::<Result<Vec<_>>>()?;

    let mut function_pairs = Vec::new();
    for p in &raw.function_pairs {
        let expected = match &p.expected {
            Some(e) => {
                let mut pieces = Vec::new();
                for piece in e.get_ref() {
                    if piece.coef.len() != n {
                        return cx.err(e.span(), "expected slice: coefficient vector has the wrong dimension");
                    }
                    pieces.push((piece.coef.clone(), piece.constant));
                }
                Some(AffinePath { pieces })
            }
            None => None,
        };
        function_pairs.push(FunctionPair {
            u0: func(&p.u0)?,
            u1: func(&p.u1)?,
            expected,
            gap0: p.gap0,
            energy: p.energy,
            affine_energy: p.affine_energy,
        });
    }

    let rooftop_pairs = raw
        .rooftop_pairs
        .iter()
        .map(|p| Ok(RooftopPair { phi: func(&p.phi)?, psi: func(&p.psi)? }))
        .collect::<Result<Vec<_>>>()?;

    let shift_checks = raw
        .shift_checks
        .iter()
        .map(|p| {
            Ok(ShiftCheck {
                u: func(&p.u)?,
                v: func(&p.v)?,
                expected: func(&p.expected)?,
                shifts: p.shifts.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let residual_cases = raw
        .residual_cases
        .iter()
        .map(|p| {
            Ok(ResidualCase {
                phi: func(&p.phi)?,
                expected: p.expected.as_ref().map(&func).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut connectivity = Vec::new();
    for c in &raw.connectivity {
        let expected = c
            .expected
            .get_ref()
            .parse::<Verdict>()
            .or_else(|e| cx.err(c.expected.span(), e.to_string()))?;
        connectivity.push(ConnectivityCase {
            u0: func_ref(&c.u0)?,
            u1: func_ref(&c.u1)?,
            expected,
            refine: c.refine,
        });
    }

    Ok(ExperimentConfig {
        grid,
        dual,
        t_samples,
        suites,
        output: raw.output.map(PathBuf::from),
        bodies,
        functions,
        weights,
        body_pairs,
        function_pairs,
        rooftop_pairs,
        shift_checks,
        residual_cases,
        connectivity,
    })
}
