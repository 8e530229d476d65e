//! Discrete Monge-Ampere measures of PL convex grid functions, capacities
//! and energies.
//!
//! The toric normalization is `kappa_n = n!`, so the closed disk of radius
//! `e^-1` and the bidisk of radii `e^-1` both have capacity one.

mod triangulation;

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::extremal::extremal_fn;
use crate::grid::{DualGridSpec, GridFn, GridSpec};
use triangulation::Triangulation;

/// Masses below this are clamped to zero and counted.
pub const CLAMP_FLOOR: f64 = -1e-12;

/// An atomic measure on grid vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct MAMeasure {
    spec: GridSpec,
    masses: Vec<f64>,
    total: f64,
    clamped: usize,
}

impl MAMeasure {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Mass per grid vertex, in row-major grid order.
    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn mass(&self, index: usize) -> f64 {
        self.masses[index]
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Number of negative masses (beyond round-off) set to zero.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// Vertices with positive mass.
    pub fn atoms(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.masses.iter().copied().enumerate().filter(|(_, m)| *m > 0.0)
    }

    /// Total mass on the given vertex indices.
    pub fn restricted_total(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.masses[i]).sum()
    }
}

/// `n!` for the supported dimensions.
pub fn kappa(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

pub fn ma_measure(f: &GridFn) -> Result<MAMeasure> {
    let spec = *f.spec();
    if !f.is_convex() {
        return Err(Error::NotConvex { gap: f.convexity_gap(), tolerance: f.eps_conv() });
    }
    let raw = match spec.n() {
        1 => masses_1d(f),
        2 => masses_2d(f),
        n => return Err(Error::UnsupportedDimension(n)),
    };
    let mut clamped = 0;
    let masses: Vec<f64> = raw
        .into_iter()
        .map(|m| {
            if m < CLAMP_FLOOR {
                clamped += 1;
                0.0
            } else {
                m.max(0.0)
            }
        })
        .collect();
    if clamped > 0 {
        log::warn!("{clamped} negative Monge-Ampere masses clamped to zero");
    }
    let total = masses.iter().sum();
    Ok(MAMeasure { spec, masses, total, clamped })
}

fn masses_1d(f: &GridFn) -> Vec<f64> {
    let v = f.values();
    let h = f.spec().spacing();
    let mut out = vec![0.0; v.len()];
    for k in 1..v.len() - 1 {
        out[k] = (v[k + 1] - v[k]) / h - (v[k] - v[k - 1]) / h;
    }
    out
}

fn masses_2d(f: &GridFn) -> Vec<f64> {
    let m = f.spec().axis_len();
    let h = f.spec().spacing();
    let z = f.values();
    let tr = Triangulation::build(m, z);
    if tr.stuck > 0 {
        log::debug!("{} edges could not be flipped", tr.stuck);
    }
    let grads: Vec<[f64; 2]> = (0..tr.triangles.len())
        .map(|t| {
            let g = tr.gradient(t, m, z);
            [g[0] / h, g[1] / h]
        })
        .collect();
    let boundary = |v: u32| {
        let (i, j) = (v as usize / m, v as usize % m);
        i == 0 || j == 0 || i + 1 == m || j + 1 == m
    };
    let mut out = vec![0.0; z.len()];
    // Shoelace over the gradient polygon of each vertex, one edge at a time:
    // crossing a -> b counterclockwise goes from the right to the left triangle.
    for (a, list) in tr.edges.iter().enumerate() {
        if boundary(a as u32) {
            continue;
        }
        let mut sorted = list.clone();
        sorted.sort_unstable();
        for (b, left) in sorted {
            let Some(right) = tr.get(b, a as u32) else { continue };
            let (gr, gl) = (grads[right], grads[left]);
            out[a] += 0.5 * (gr[0] * gl[1] - gr[1] * gl[0]);
        }
    }
    out
}

/// `kappa_n` times the total mass of the measure of `extremal_fn(L)`.
pub fn capacity(body: &ConvexBody, spec: &GridSpec, dual: &DualGridSpec) -> Result<f64> {
    let f = extremal_fn(body, spec, dual)?;
    Ok(kappa(spec.n()) * ma_measure(&f)?.total())
}

/// `kappa_n * sum f(v) mass(v)`.
pub fn energy(f: &GridFn) -> Result<f64> {
    if !f.is_nonpositive() {
        return Err(Error::OutOfRange("energy needs a nonpositive function".into()));
    }
    let mu = ma_measure(f)?;
    Ok(energy_with(f, &mu))
}

pub(crate) fn energy_with(f: &GridFn, mu: &MAMeasure) -> f64 {
    let sum: f64 = f.values().iter().zip(mu.masses()).map(|(v, m)| v * m).sum();
    kappa(f.spec().n()) * sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn affine_has_no_mass() {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let f = GridFn::build(spec, |s| 0.3 * s[0] + 0.7 * s[1]).unwrap();
        assert!(ma_measure(&f).unwrap().total().abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_kinks() {
        let spec = GridSpec::new(1, 8.0, 256).unwrap();
        let f = GridFn::build(spec, |s| s[0].max(-1.0)).unwrap();
        let mu = ma_measure(&f).unwrap();
        let atoms: Vec<_> = mu.atoms().filter(|(_, m)| *m > 1e-12).collect();
        assert_eq!(atoms.len(), 1);
        close(spec.point(atoms[0].0)[0], -1.0, 1e-12);
        close(atoms[0].1, 1.0, 1e-12);
        close(energy(&f).unwrap(), -1.0, 1e-12);
        let g = GridFn::build(spec, |s| (s[0] / 2.0).max(-1.0)).unwrap();
        close(energy(&g).unwrap(), -0.5, 1e-12);
    }

    #[test]
    fn simplex_kink_has_half_area() {
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let f = GridFn::build(spec, |s| s[0].max(s[1]).max(-1.0)).unwrap();
        let mu = ma_measure(&f).unwrap();
        close(mu.total(), 0.5, 1e-9);
        close(energy(&f).unwrap(), -1.0, 1e-9);
    }

    #[test]
    fn flips_recover_off_diagonal_kinks() {
        // kink lines not aligned with the fixed diagonal
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let f = GridFn::build(spec, |s| {
            let (x, y) = (s[0] + 4.0, s[1] + 4.0);
            (2.0 * x).max(y).max(-1.0).max(x + 2.0 * y)
        })
        .unwrap();
        let mu = ma_measure(&f).unwrap();
        // gradients (0,0), (2,0), (0,1), (1,2): hull area
        let pts = [[0.0, 0.0], [2.0, 0.0], [1.0, 2.0], [0.0, 1.0]];
        let mut area = 0.0;
        for k in 0..4 {
            let (p, q) = (pts[k], pts[(k + 1) % 4]);
            area += 0.5 * (p[0] * q[1] - p[1] * q[0]);
        }
        close(mu.total(), area, 1e-9);
        assert_eq!(mu.clamped(), 0);
    }

    #[test]
    fn capacity_examples() {
        let spec = GridSpec::new(1, 8.0, 256).unwrap();
        let dual = DualGridSpec::default_for(&spec);
        let b = |x: f64| ConvexBody::new(1, vec![vec![x]]).unwrap();
        close(capacity(&b(-1.0), &spec, &dual).unwrap(), 1.0, 1e-12);
        close(capacity(&b(-2.0), &spec, &dual).unwrap(), 0.5, 1e-12);
        let spec = GridSpec::new(2, 8.0, 64).unwrap();
        let dual = DualGridSpec::default_for(&spec);
        let l = ConvexBody::new(2, vec![vec![-1.0, -1.0]]).unwrap();
        close(capacity(&l, &spec, &dual).unwrap(), 1.0, 1e-9);
    }

    #[test]
    fn three_dimensions_are_unsupported() {
        let spec = GridSpec::new(3, 2.0, 16).unwrap();
        let f = GridFn::build(spec, |_| 0.0).unwrap();
        assert!(matches!(ma_measure(&f), Err(Error::UnsupportedDimension(3))));
    }
}
