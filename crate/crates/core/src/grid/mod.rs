//! Sampled convex functions on truncated orthant grids and their Legendre calculus.
//!
//! A [`GridFn`] holds samples of a function on the lattice
//! `{-R + k h : 0 <= k <= N}^n`, which covers the truncated negative orthant
//! `[-R, 0]^n`. Slope-space functions live on a [`DualGridSpec`] lattice
//! `{k A / M : 0 <= k <= M}^n` and use [`TOP`] for `+inf`.
//!
//! Every grid function also carries a [`Tail`]: its 1-homogeneous recession
//! function sampled on a fixed set of directions. The tail is what the box
//! samples cannot see, and it decides which slopes have a finite conjugate
//! on the whole orthant (see [`legendre_orthant`]).

mod conjugate;
mod ops;
mod tail;

pub use conjugate::{
    biconjugate, biconjugate_orthant, legendre, legendre_dual, legendre_orthant,
};
pub use ops::{combine, sup_distance, Combine};
pub use tail::Tail;

use crate::error::{Error, Result};

/// Sentinel for `+inf` in slope space. Absorbing in sums, ignored in sups.
pub const TOP: f64 = f64::INFINITY;

/// Largest supported dimension.
pub const MAX_DIM: usize = 3;

/// Primal lattice over `[-R, 0]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    radius: f64,
    samples: usize,
}

impl GridSpec {
    pub fn new(n: usize, radius: f64, samples: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..={MAX_DIM}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!("radius {radius} must be positive")));
        }
        if samples < 16 {
            return Err(Error::InvalidGrid(format!("{samples} samples per axis, need >= 16")));
        }
        Ok(Self { n, radius, samples })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Number of intervals per axis (`N`); each axis has `N + 1` points.
    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Grid spacing `h = R / N`.
    pub fn spacing(&self) -> f64 {
        self.radius / self.samples as f64
    }

    pub fn axis_len(&self) -> usize {
        self.samples + 1
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, k: usize) -> f64 {
        -self.radius + k as f64 * self.spacing()
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.axis_len()).map(|k| self.coord(k)).collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.axis_len(); self.n]
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let m = self.axis_len();
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = index % m;
            index /= m;
        }
        out
    }

    pub fn index_of(&self, k: &[usize]) -> usize {
        let m = self.axis_len();
        k.iter().fold(0, |acc, &ki| acc * m + ki)
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.multi_index(index).into_iter().map(|k| self.coord(k)).collect()
    }

    /// Lattice index nearest to `s` along one axis, clamped to the grid.
    pub fn nearest_axis_index(&self, s: f64) -> usize {
        let k = ((s + self.radius) / self.spacing()).round();
        k.clamp(0.0, self.samples as f64) as usize
    }

    pub fn nearest_index(&self, s: &[f64]) -> usize {
        let k: Vec<usize> = s.iter().map(|&x| self.nearest_axis_index(x)).collect();
        self.index_of(&k)
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

/// Slope lattice over `[0, A]^n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualGridSpec {
    n: usize,
    cap: f64,
    samples: usize,
}

impl DualGridSpec {
    pub fn new(n: usize, cap: f64, samples: usize) -> Result<Self> {
        if n == 0 || n > MAX_DIM {
            return Err(Error::InvalidGrid(format!("dimension {n} not in 1..={MAX_DIM}")));
        }
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::InvalidGrid(format!("slope cap {cap} must be positive")));
        }
        if samples < 1 {
            return Err(Error::InvalidGrid("dual grid needs at least one interval".into()));
        }
        Ok(Self { n, cap, samples })
    }

    /// Default pairing: cap 4 with the same sample count as the primal grid.
    pub fn default_for(spec: &GridSpec) -> Self {
        Self { n: spec.n, cap: 4.0, samples: spec.samples }
    }

    /// Smallest power-of-two cap (at least 4) covering `slope`, keeping the
    /// default slope spacing `4 / N`.
    pub fn covering(spec: &GridSpec, slope: f64) -> Self {
        let mut cap = 4.0;
        let mut samples = spec.samples;
        while cap < slope {
            cap *= 2.0;
            samples *= 2;
        }
        Self { n: spec.n, cap, samples }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> f64 {
        self.cap
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.cap / self.samples as f64
    }

    pub fn axis_len(&self) -> usize {
        self.samples + 1
    }

    pub fn len(&self) -> usize {
        self.axis_len().pow(self.n as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coord(&self, k: usize) -> f64 {
        k as f64 * self.cap / self.samples as f64
    }

    pub fn axis_coords(&self) -> Vec<f64> {
        (0..self.axis_len()).map(|k| self.coord(k)).collect()
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.axis_len(); self.n]
    }

    pub fn multi_index(&self, mut index: usize) -> Vec<usize> {
        let m = self.axis_len();
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = index % m;
            index /= m;
        }
        out
    }

    pub fn index_of(&self, k: &[usize]) -> usize {
        let m = self.axis_len();
        k.iter().fold(0, |acc, &ki| acc * m + ki)
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        self.multi_index(index).into_iter().map(|k| self.coord(k)).collect()
    }
}

/// A sampled function on a primal grid, usually the convex image of a toric
/// psh function.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFn {
    spec: GridSpec,
    values: Vec<f64>,
    tail: Tail,
    monotone: bool,
    convex: bool,
}

/// Scale used to read the recession slope off a pointwise formula.
const FAR_SCALE: f64 = 1.0e6;

impl GridFn {
    /// Samples `formula` on the grid. The tail is read off the formula far
    /// outside the box; tags are computed by scan and biconjugate comparison.
    pub fn build(spec: GridSpec, formula: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(spec.len());
        for i in 0..spec.len() {
            let p = spec.point(i);
            let v = formula(&p);
            if !v.is_finite() {
                return Err(Error::NonFiniteSample { point: p, value: v });
            }
            values.push(v);
        }
        let tail = Tail::from_fn(spec.n(), |d| {
            let far: Vec<f64> = d.iter().map(|x| 2.0 * FAR_SCALE * x).collect();
            let near: Vec<f64> = d.iter().map(|x| FAR_SCALE * x).collect();
            let slope = (formula(&far) - formula(&near)) / FAR_SCALE;
            if slope.is_finite() {
                slope.min(0.0)
            } else {
                log::warn!("formula is not finite far from the box; assuming a bounded tail");
                0.0
            }
        });
        Ok(Self::tagged(spec, values, tail))
    }

    /// Wraps raw samples. Without further information the function is taken
    /// to be bounded beyond the box.
    pub fn from_values(spec: GridSpec, values: Vec<f64>) -> Result<Self> {
        Self::from_values_with_tail(spec, values, Tail::bounded(spec.n()))
    }

    pub fn from_values_with_tail(spec: GridSpec, values: Vec<f64>, tail: Tail) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { point: spec.point(i), value: values[i] });
        }
        if tail.n() != spec.n() {
            return Err(Error::SpecMismatch("tail dimension differs from grid".into()));
        }
        Ok(Self::tagged(spec, values, tail))
    }

    fn tagged(spec: GridSpec, values: Vec<f64>, tail: Tail) -> Self {
        let mut f = Self { spec, values, tail, monotone: false, convex: false };
        f.monotone = f.scan_monotone();
        f.convex = f.convexity_gap() <= f.eps_conv() + 1e-9;
        f
    }

    pub(crate) fn from_parts(
        spec: GridSpec,
        values: Vec<f64>,
        tail: Tail,
        monotone: bool,
        convex: bool,
    ) -> Self {
        Self { spec, values, tail, monotone, convex }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    pub fn is_convex(&self) -> bool {
        self.convex
    }

    pub fn value(&self, k: &[usize]) -> f64 {
        self.values[self.spec.index_of(k)]
    }

    /// Value at the grid point nearest to `s`.
    pub fn value_near(&self, s: &[f64]) -> f64 {
        self.values[self.spec.nearest_index(s)]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_nonpositive(&self) -> bool {
        self.max_value() <= 1e-12
    }

    /// Largest absolute finite-difference slope along any axis.
    pub fn lipschitz(&self) -> f64 {
        let h = self.spec.spacing();
        let m = self.spec.axis_len();
        let n = self.spec.n();
        let mut lip: f64 = 0.0;
        let mut stride = 1;
        for _axis in (0..n).rev() {
            for i in 0..self.values.len() {
                if (i / stride) % m + 1 < m {
                    lip = lip.max((self.values[i + stride] - self.values[i]).abs() / h);
                }
            }
            stride *= m;
        }
        lip
    }

    /// Conjugation round-trip tolerance `4 h Lip(f)`.
    pub fn eps_conv(&self) -> f64 {
        4.0 * self.spec.spacing() * self.lipschitz()
    }

    fn scan_monotone(&self) -> bool {
        let m = self.spec.axis_len();
        let mut stride = 1;
        for _ in 0..self.spec.n() {
            for i in 0..self.values.len() {
                if (i / stride) % m + 1 < m && self.values[i + stride] < self.values[i] - 1e-12 {
                    return false;
                }
            }
            stride *= m;
        }
        true
    }

    /// Sup distance between the samples and their (truncated) biconjugate.
    pub fn convexity_gap(&self) -> f64 {
        match biconjugate(self) {
            Ok(b) => self
                .values
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn scaled(&self, c: f64) -> GridFn {
        let values = self.values.iter().map(|v| c * v).collect();
        let convex = self.convex && c >= 0.0;
        let monotone = self.monotone && c >= 0.0;
        Self::from_parts(self.spec, values, self.tail.scale(c.max(0.0)), monotone, convex)
    }

    pub fn shifted(&self, c: f64) -> GridFn {
        let values = self.values.iter().map(|v| v + c).collect();
        Self::from_parts(self.spec, values, self.tail.clone(), self.monotone, self.convex)
    }

    pub(crate) fn with_tail(mut self, tail: Tail) -> GridFn {
        self.tail = tail;
        self
    }
}

/// A sampled function on a slope grid; entries may be [`TOP`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualGridFn {
    spec: DualGridSpec,
    values: Vec<f64>,
}

impl DualGridFn {
    pub fn new(spec: DualGridSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} values for a dual grid of {} points",
                values.len(),
                spec.len()
            )));
        }
        if values.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
            return Err(Error::InvalidGrid("dual values must be finite or TOP".into()));
        }
        Ok(Self { spec, values })
    }

    pub fn build(spec: DualGridSpec, formula: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let values = (0..spec.len()).map(|i| formula(&spec.point(i))).collect();
        Self::new(spec, values)
    }

    pub fn spec(&self) -> &DualGridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: &[usize]) -> f64 {
        self.values[self.spec.index_of(k)]
    }

    pub fn is_top(&self, index: usize) -> bool {
        self.values[index] == TOP
    }

    pub fn finite_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }

    /// Pointwise `(1 - t) self + t other`, with TOP absorbing.
    pub fn affine(&self, other: &DualGridFn, t: f64) -> Result<DualGridFn> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("dual grids differ".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&x, &y)| {
                if x == TOP || y == TOP {
                    TOP
                } else if t == 0.0 {
                    x
                } else if t == 1.0 {
                    y
                } else {
                    (1.0 - t) * x + t * y
                }
            })
            .collect();
        Ok(DualGridFn { spec: self.spec, values })
    }

    /// Pointwise max, with TOP absorbing.
    pub fn max(&self, other: &DualGridFn) -> Result<DualGridFn> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch("dual grids differ".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| x.max(y)).collect();
        Ok(DualGridFn { spec: self.spec, values })
    }
}
