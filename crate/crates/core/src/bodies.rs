//! Log-images of complete logarithmically convex Reinhardt bodies.
//!
//! A body is stored by generators: `L = conv(generators) + R^n_-`. Support
//! functions and Minkowski combinations are then finite maxima and pairwise
//! sums, which is all the geodesic machinery needs.

use std::collections::HashMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::GridSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexBody {
    n: usize,
    generators: Vec<Vec<f64>>,
}

/// Reinhardt volume with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeEstimate {
    pub value: f64,
    /// Absolute bound on the quadrature error from cells cut by the boundary.
    pub quadrature_tol: f64,
    /// Relative bound on the mass lost outside `[-R, 0]^n`.
    pub truncation_rel: f64,
}

impl VolumeEstimate {
    pub fn tolerance(&self) -> f64 {
        self.quadrature_tol + self.truncation_rel * self.value
    }
}

const MEMBER_TOL: f64 = 1e-12;
const VOLUME_SUBDIVISION: usize = 16;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ConvexBody {
    pub fn new(n: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidBody("no generators".into()));
        }
        for g in &generators {
            if g.len() != n {
                return Err(Error::InvalidBody(format!("generator {g:?} is not in R^{n}")));
            }
            if g.iter().any(|x| !x.is_finite() || *x >= 0.0) {
                return Err(Error::InvalidBody(format!(
                    "generator {g:?} must have strictly negative coordinates"
                )));
            }
        }
        Ok(Self { n, generators })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    /// `h_L(a) = max <a, g>` over generators; the recession cone adds nothing
    /// for `a >= 0`.
    pub fn support(&self, a: &[f64]) -> Result<f64> {
        if a.len() != self.n {
            return Err(Error::InvalidBody(format!("direction {a:?} is not in R^{}", self.n)));
        }
        if a.iter().any(|&x| x < 0.0) {
            return Err(Error::OutOfRange(format!(
                "support direction {a:?} has a negative component (value is +inf)"
            )));
        }
        Ok(self.support_unchecked(a))
    }

    pub(crate) fn support_unchecked(&self, a: &[f64]) -> f64 {
        self.generators.iter().map(|g| dot(a, g)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest per-axis distance of the body to the face `s_i = 0`.
    pub fn depth(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.generators.iter().map(|g| -g[i]).fold(f64::INFINITY, f64::min))
            .collect()
    }

    /// Largest absolute generator coordinate.
    pub fn extent(&self) -> f64 {
        self.generators.iter().flatten().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Same body with dominated (and, for n <= 2, non-extreme) generators removed.
    pub fn reduced(&self) -> ConvexBody {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let dominated = self.generators.iter().enumerate().any(|(j, o)| {
                j != i
                    && o.iter().zip(g).all(|(x, y)| x >= y)
                    && (o.iter().zip(g).any(|(x, y)| x > y) || j < i)
            });
            if !dominated {
                pts.push(g.clone());
            }
        }
        if self.n == 2 {
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
            let mut hull: Vec<Vec<f64>> = Vec::new();
            for p in pts {
                while hull.len() >= 2 {
                    let a = &hull[hull.len() - 2];
                    let b = &hull[hull.len() - 1];
                    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                    if cross >= 0.0 {
                        hull.pop();
                    } else {
                        break;
                    }
                }
                hull.push(p);
            }
            pts = hull;
        }
        ConvexBody { n: self.n, generators: pts }
    }

    /// Nonnegative normals whose support inequalities cut out the body.
    pub fn facet_normals(&self) -> Vec<Vec<f64>> {
        let body = self.reduced();
        let mut normals: Vec<Vec<f64>> = (0..self.n)
            .map(|i| (0..self.n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        let g = &body.generators;
        match self.n {
            1 => {}
            2 => {
                for w in g.windows(2) {
                    let (dx, dy) = (w[1][0] - w[0][0], w[1][1] - w[0][1]);
                    let nrm = [-dy, dx];
                    if nrm[0] >= 0.0 && nrm[1] >= 0.0 && (nrm[0] > 0.0 || nrm[1] > 0.0) {
                        normals.push(nrm.to_vec());
                    }
                }
            }
            _ => {
                let mut vecs: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
                for i in 0..g.len() {
                    for j in i + 1..g.len() {
                        vecs.push([g[j][0] - g[i][0], g[j][1] - g[i][1], g[j][2] - g[i][2]]);
                    }
                }
                for i in 0..vecs.len() {
                    for j in i + 1..vecs.len() {
                        let (u, v) = (vecs[i], vecs[j]);
                        let c = [
                            u[1] * v[2] - u[2] * v[1],
                            u[2] * v[0] - u[0] * v[2],
                            u[0] * v[1] - u[1] * v[0],
                        ];
                        let scale = c.iter().map(|x| x.abs()).fold(0.0, f64::max);
                        if scale < 1e-14 {
                            continue;
                        }
                        let sign = if c.iter().all(|&x| x >= -1e-14 * scale) {
                            1.0
                        } else if c.iter().all(|&x| x <= 1e-14 * scale) {
                            -1.0
                        } else {
                            continue;
                        };
                        normals.push(c.iter().map(|x| (sign * x / scale).max(0.0)).collect());
                    }
                }
            }
        }
        normals
    }

    /// Membership through support inequalities at the facet normals.
    pub fn contains(&self, s: &[f64]) -> bool {
        self.contains_with(&self.facet_normals(), s)
    }

    fn contains_with(&self, normals: &[Vec<f64>], s: &[f64]) -> bool {
        normals.iter().all(|a| dot(a, s) <= self.support_unchecked(a) + MEMBER_TOL)
    }

    /// Euclidean distance from `s` to the body.
    pub fn distance(&self, s: &[f64]) -> f64 {
        let body = self.reduced();
        let g = &body.generators;
        let excess = |p: &[f64]| -> f64 {
            s.iter().zip(p).map(|(x, y)| (x - y).max(0.0).powi(2)).sum::<f64>()
        };
        let mut best = g.iter().map(|p| excess(p)).fold(f64::INFINITY, f64::min);
        if best == 0.0 {
            return 0.0;
        }
        if self.n == 3 && g.len() >= 3 {
            best = best.min(simplex_min_excess(s, g));
        } else {
            for i in 0..g.len() {
                for j in i + 1..g.len() {
                    best = best.min(segment_min_excess(s, &g[i], &g[j]));
                }
            }
        }
        best.sqrt()
    }

    /// Reinhardt volume `(2 pi)^n * integral of exp(2 sum s)` over `L`,
    /// integrated cellwise on the primal grid of `spec`.
    pub fn volume(&self, spec: &GridSpec) -> Result<VolumeEstimate> {
        if spec.n() != self.n {
            return Err(Error::SpecMismatch("body and grid dimensions differ".into()));
        }
        let required = 2.0 * self.extent();
        if spec.radius() < required {
            return Err(Error::RadiusTooSmall { radius: spec.radius(), required });
        }
        let normals = self.facet_normals();
        let n = self.n;
        let h = spec.spacing();
        let cells = spec.samples();
        let cell_count = cells.pow(n as u32);
        let weight = |lo: &[f64], width: f64| -> f64 {
            lo.iter()
                .map(|&l| ((2.0 * (l + width)).exp() - (2.0 * l).exp()) / 2.0)
                .product::<f64>()
        };
        let mut value = 0.0;
        let mut tol = 0.0;
        for c in 0..cell_count {
            let mut idx = c;
            let mut lo = vec![0.0; n];
            for slot in lo.iter_mut().rev() {
                *slot = spec.coord(idx % cells);
                idx /= cells;
            }
            let hi: Vec<f64> = lo.iter().map(|x| x + h).collect();
            if self.contains_with(&normals, &hi) {
                value += weight(&lo, h);
                continue;
            }
            if !self.contains_with(&normals, &lo) {
                continue;
            }
            let sub = VOLUME_SUBDIVISION;
            let hs = h / sub as f64;
            for sc in 0..sub.pow(n as u32) {
                let mut k = sc;
                let mut slo = vec![0.0; n];
                for (d, slot) in slo.iter_mut().enumerate().rev() {
                    *slot = lo[d] + (k % sub) as f64 * hs;
                    k /= sub;
                }
                let shi: Vec<f64> = slo.iter().map(|x| x + hs).collect();
                let w = weight(&slo, hs);
                if self.contains_with(&normals, &shi) {
                    value += w;
                } else if self.contains_with(&normals, &slo) {
                    let mid: Vec<f64> = slo.iter().map(|x| x + hs / 2.0).collect();
                    if self.contains_with(&normals, &mid) {
                        value += w;
                    }
                    tol += w;
                }
            }
        }
        let scale = (2.0 * PI).powi(n as i32);
        Ok(VolumeEstimate {
            value: scale * value,
            quadrature_tol: scale * tol,
            truncation_rel: (-2.0 * (spec.radius() - self.extent())).exp(),
        })
    }
}

/// Minkowski combination `(1 - t) L0 + t L1`.
pub fn interpolate_body(l0: &ConvexBody, l1: &ConvexBody, t: f64) -> Result<ConvexBody> {
    if l0.n != l1.n {
        return Err(Error::InvalidBody("bodies of different dimension".into()));
    }
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::OutOfRange(format!("interpolation parameter {t} not in [0, 1]")));
    }
    let mut gens = Vec::with_capacity(l0.generators.len() * l1.generators.len());
    for v in &l0.generators {
        for w in &l1.generators {
            gens.push(v.iter().zip(w).map(|(x, y)| (1.0 - t) * x + t * y).collect());
        }
    }
    ConvexBody::new(l0.n, gens)
}

/// Symmetric discrete Hausdorff distance between `L` (sampled at the grid
/// points of `spec` inside it) and the finite set `points`.
pub fn hausdorff_gap(body: &ConvexBody, points: &[Vec<f64>], spec: &GridSpec) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Empty("point set for Hausdorff gap".into()));
    }
    if spec.n() != body.n {
        return Err(Error::SpecMismatch("body and grid dimensions differ".into()));
    }
    let to_body = points.iter().map(|p| body.distance(p)).fold(0.0, f64::max);

    let mut buckets: HashMap<Vec<usize>, Vec<usize>> = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        let key: Vec<usize> = p.iter().map(|&x| spec.nearest_axis_index(x)).collect();
        buckets.entry(key).or_default().push(i);
    }
    let normals = body.facet_normals();
    let h = spec.spacing();
    let m = spec.axis_len() as isize;
    let mut to_set: f64 = 0.0;
    for idx in 0..spec.len() {
        let p = spec.point(idx);
        if !body.contains_with(&normals, &p) {
            continue;
        }
        let center: Vec<isize> = spec.multi_index(idx).into_iter().map(|k| k as isize).collect();
        let mut best = f64::INFINITY;
        let mut r: isize = 0;
        while r < m && (best.is_infinite() || (r as f64 - 1.0) * h < best) {
            for_each_ring(&center, r, m, &mut |key| {
                if let Some(ids) = buckets.get(key) {
                    for &i in ids {
                        let d = points[i].iter().zip(&p).map(|(x, y)| (x - y).powi(2)).sum::<f64>();
                        best = best.min(d.sqrt());
                    }
                }
            });
            r += 1;
        }
        to_set = to_set.max(best);
    }
    Ok(to_body + to_set)
}

/// Visits lattice keys at Chebyshev distance exactly `r` from `center`.
fn for_each_ring(center: &[isize], r: isize, m: isize, visit: &mut dyn FnMut(&Vec<usize>)) {
    let n = center.len();
    let side = 2 * r + 1;
    let total = side.pow(n as u32);
    let mut key = vec![0usize; n];
    for c in 0..total {
        let mut rem = c;
        let mut on_ring = false;
        let mut inside = true;
        for d in (0..n).rev() {
            let off = rem % side - r;
            rem /= side;
            if off.abs() == r {
                on_ring = true;
            }
            let k = center[d] + off;
            if k < 0 || k >= m {
                inside = false;
            }
            key[d] = k.max(0) as usize;
        }
        if on_ring && inside {
            visit(&key);
        }
    }
}

/// `min |(s - p)_+|^2` over the segment from `a` to `b`; exact, since the
/// objective is quadratic between the points where a component changes sign.
fn segment_min_excess(s: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let delta: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let mut cuts = vec![0.0, 1.0];
    for k in 0..s.len() {
        if delta[k] != 0.0 {
            let t = (s[k] - a[k]) / delta[k];
            if t > 0.0 && t < 1.0 {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let eval = |t: f64| -> f64 {
        (0..s.len()).map(|k| (s[k] - a[k] - t * delta[k]).max(0.0).powi(2)).sum()
    };
    let mut best = f64::INFINITY;
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let (mut num, mut den) = (0.0, 0.0);
        for k in 0..s.len() {
            if s[k] - a[k] - mid * delta[k] > 0.0 {
                num += (s[k] - a[k]) * delta[k];
                den += delta[k] * delta[k];
            }
        }
        let t = if den > 0.0 { (num / den).clamp(lo, hi) } else { lo };
        best = best.min(eval(t)).min(eval(lo)).min(eval(hi));
    }
    best
}

/// Projected-gradient minimization of `|(s - sum l_i g_i)_+|^2` over the simplex.
fn simplex_min_excess(s: &[f64], g: &[Vec<f64>]) -> f64 {
    let m = g.len();
    let eval = |lam: &[f64]| -> (f64, Vec<f64>) {
        let p: Vec<f64> = (0..s.len()).map(|k| (0..m).map(|i| lam[i] * g[i][k]).sum()).collect();
        let r: Vec<f64> = s.iter().zip(&p).map(|(x, y)| (x - y).max(0.0)).collect();
        let grad = (0..m).map(|i| -2.0 * dot(&r, &g[i])).collect();
        (dot(&r, &r), grad)
    };
    let lip = 2.0 * g.iter().map(|v| dot(v, v)).sum::<f64>();
    let mut lam = vec![1.0 / m as f64; m];
    let mut best = f64::INFINITY;
    for _ in 0..4000 {
        let (val, grad) = eval(&lam);
        best = best.min(val);
        let y: Vec<f64> = lam.iter().zip(&grad).map(|(l, d)| l - d / lip).collect();
        lam = project_simplex(&y);
    }
    best.min(eval(&lam).0)
}

fn project_simplex(y: &[f64]) -> Vec<f64> {
    let mut u = y.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut theta = 0.0;
    for (i, &ui) in u.iter().enumerate() {
        cum += ui;
        let t = (cum - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    y.iter().map(|x| (x - theta).max(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn body(n: usize, g: &[&[f64]]) -> ConvexBody {
        ConvexBody::new(n, g.iter().map(|v| v.to_vec()).collect()).unwrap()
    }

    #[test]
    fn support_examples() {
        assert_eq!(body(1, &[&[-1.0]]).support(&[2.0]).unwrap(), -2.0);
        assert_eq!(body(2, &[&[-1.0, -1.0]]).support(&[1.0, 1.0]).unwrap(), -2.0);
        let l = body(2, &[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert_eq!(l.support(&[1.0, 0.0]).unwrap(), -1.0);
        assert!(l.support(&[-1.0, 0.0]).is_err());
    }

    #[test]
    fn rejects_generators_on_the_boundary() {
        assert!(ConvexBody::new(1, vec![vec![0.0]]).is_err());
        assert!(ConvexBody::new(2, vec![]).is_err());
        assert!(ConvexBody::new(2, vec![vec![-1.0]]).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let l = interpolate_body(&body(1, &[&[-1.0]]), &body(1, &[&[-2.0]]), 0.5).unwrap();
        assert_eq!(l.generators(), &[vec![-1.5]]);
        let l = interpolate_body(&body(2, &[&[-1.0, -1.0]]), &body(2, &[&[-3.0, -1.0]]), 1.0 / 3.0)
            .unwrap();
        assert!((l.generators()[0][0] + 5.0 / 3.0).abs() < 1e-15);
        assert!((l.generators()[0][1] + 1.0).abs() < 1e-15);
        assert!(interpolate_body(&l, &l, 1.5).is_err());
    }

    #[test]
    fn reduction_keeps_support_function() {
        let l = body(2, &[&[-1.0, -3.0], &[-2.0, -2.5], &[-3.0, -1.0], &[-2.0, -2.0], &[-4.0, -4.0]]);
        let r = l.reduced();
        assert!(r.generators().len() < l.generators().len());
        for a in [[1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [0.3, 2.0], [5.0, 0.1]] {
            assert!((l.support(&a).unwrap() - r.support(&a).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn membership_and_distance() {
        let l = body(2, &[&[-1.0, -2.0], &[-2.0, -1.0]]);
        assert!(l.contains(&[-1.5, -1.5]));
        assert!(l.contains(&[-5.0, -1.0]));
        assert!(!l.contains(&[-1.2, -1.2]));
        let sq = body(2, &[&[-1.0, -1.0]]);
        assert!((sq.distance(&[0.0, 0.0]) - 2f64.sqrt()).abs() < 1e-12);
        assert!((sq.distance(&[0.0, -3.0]) - 1.0).abs() < 1e-12);
        assert_eq!(sq.distance(&[-2.0, -2.0]), 0.0);
        // distance to the edge between the two generators
        let d = l.distance(&[-1.0, -1.0]);
        assert!((d - 1.0 / 2f64.sqrt()).abs() < 1e-12, "{d}");
    }

    #[test]
    fn three_dimensional_membership_and_distance() {
        let l = body(3, &[&[-1.0, -1.0, -2.0], &[-2.0, -1.0, -1.0], &[-1.0, -2.0, -1.0]]);
        assert!(l.contains(&[-4.0 / 3.0, -4.0 / 3.0, -4.0 / 3.0]));
        assert!(!l.contains(&[-1.2, -1.2, -1.2]));
        let d = l.distance(&[-1.0, -1.0, -1.0]);
        assert!((d - 1.0 / 3f64.sqrt()).abs() < 1e-6, "{d}");
    }

    #[test]
    fn disk_volume() {
        let spec = GridSpec::new(1, 8.0, 512).unwrap();
        let r: f64 = (-1.0f64).exp();
        let v = body(1, &[&[-1.0]]).volume(&spec).unwrap();
        let exact = PI * r * r;
        assert!((v.value - exact).abs() <= v.tolerance() + 1e-12, "{v:?} vs {exact}");
        let off = body(1, &[&[-1.01]]).volume(&spec).unwrap();
        assert!((off.value - PI * (-2.02f64).exp()).abs() <= off.tolerance() + 1e-12);
        assert!(body(1, &[&[-5.0]]).volume(&spec).is_err());
    }

    #[test]
    fn hausdorff_examples() {
        let spec = GridSpec::new(1, 8.0, 512).unwrap();
        let h = spec.spacing();
        let l = body(1, &[&[-1.5]]);
        let mut s: Vec<Vec<f64>> = (0..=512)
            .map(|k| vec![spec.coord(k)])
            .filter(|p| p[0] <= -1.5)
            .collect();
        s.push(vec![-1.5 + h]);
        assert!(hausdorff_gap(&l, &s, &spec).unwrap() <= h + 1e-12);
        assert!(hausdorff_gap(&l, &[], &spec).is_err());
    }
}
