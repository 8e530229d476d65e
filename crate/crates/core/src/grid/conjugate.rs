//! Discrete Legendre transforms, one axis at a time.
//!
//! `L[f](y) = max_x <x, y> - f(x)` is separable: a pass along axis 0 computes
//! `max_{x0} x0 y0 - f(x0, x1, ..)`, the next pass maximizes `x1 y1` plus that
//! partial result over `x1`, and so on. Each pass runs a linear-time 1D
//! conjugate (lower hull + monotone sweep) on every grid line.
//!
//! Value conventions inside a pass: `+inf` marks an absent sample (ignored),
//! `-inf` marks an unbounded one (forces `+inf` output).

use rayon::prelude::*;

use super::{DualGridFn, DualGridSpec, GridFn, GridSpec, Tail, TOP};
use crate::error::{Error, Result};

/// `out[j] = max_k xs[k] * ys[j] - vals[k]`, with `xs` and `ys` increasing.
pub(crate) fn conjugate_line(xs: &[f64], vals: &[f64], ys: &[f64], out: &mut [f64]) {
    debug_assert_eq!(xs.len(), vals.len());
    debug_assert_eq!(ys.len(), out.len());
    if vals.contains(&f64::NEG_INFINITY) {
        out.fill(f64::INFINITY);
        return;
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(xs.len());
    for (&x, &v) in xs.iter().zip(vals) {
        if v == f64::INFINITY {
            continue;
        }
        while hull.len() >= 2 {
            let (x0, v0) = hull[hull.len() - 2];
            let (x1, v1) = hull[hull.len() - 1];
            // drop the middle point unless (x0,v0),(x1,v1),(x,v) turn left
            if (x1 - x0) * (v - v0) - (v1 - v0) * (x - x0) <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, v));
    }
    if hull.is_empty() {
        out.fill(f64::NEG_INFINITY);
        return;
    }
    let mut k = 0;
    for (o, &y) in out.iter_mut().zip(ys) {
        while k + 1 < hull.len() && hull[k + 1].0 * y - hull[k + 1].1 >= hull[k].0 * y - hull[k].1 {
            k += 1;
        }
        *o = hull[k].0 * y - hull[k].1;
    }
}

/// One separable pass along `axis`, replacing that axis' coordinates.
fn pass(data: &[f64], shape: &[usize], axis: usize, xs: &[f64], ys: &[f64], negate: bool) -> Vec<f64> {
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let len_in = shape[axis];
    let len_out = ys.len();
    let lines: Vec<Vec<f64>> = (0..outer * inner)
        .into_par_iter()
        .map(|line| {
            let (o, r) = (line / inner, line % inner);
            let base = o * len_in * inner + r;
            let vals: Vec<f64> = (0..len_in)
                .map(|k| {
                    let v = data[base + k * inner];
                    if negate {
                        -v
                    } else {
                        v
                    }
                })
                .collect();
            let mut out = vec![0.0; len_out];
            conjugate_line(xs, &vals, ys, &mut out);
            out
        })
        .collect();
    let mut result = vec![0.0; outer * len_out * inner];
    for (line, out) in lines.into_iter().enumerate() {
        let (o, r) = (line / inner, line % inner);
        let base = o * len_out * inner + r;
        for (j, v) in out.into_iter().enumerate() {
            result[base + j * inner] = v;
        }
    }
    result
}

/// Full separable transform from a product grid with axis coordinates `xs`
/// to one with axis coordinates `ys`.
fn separable(values: &[f64], n: usize, xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let mut shape = vec![xs.len(); n];
    let mut data = values.to_vec();
    for axis in 0..n {
        data = pass(&data, &shape, axis, xs, ys, axis > 0);
        shape[axis] = ys.len();
    }
    data
}

fn check_cap(f: &GridFn, dual: &DualGridSpec) -> Result<()> {
    f.spec().ensure_dim(dual.n())?;
    let required = f.lipschitz();
    if required > dual.cap() * (1.0 + 1e-12) {
        return Err(Error::SlopeCapExceeded { cap: dual.cap(), required });
    }
    Ok(())
}

/// Conjugate over the truncated box: `L[f](a) = max_s <a, s> - f(s)` over
/// grid points `s`. Slopes below the function's recession slopes pick up
/// finite truncation rays that grow with `R`.
pub fn legendre(f: &GridFn, dual: &DualGridSpec) -> Result<DualGridFn> {
    check_cap(f, dual)?;
    let values = separable(f.values(), dual.n(), &f.spec().axis_coords(), &dual.axis_coords());
    DualGridFn::new(*dual, values)
}

/// Conjugate of `f` extended to the whole orthant by its tail: slopes the
/// tail does not admit are `TOP`, the rest keep their box value.
pub fn legendre_orthant(f: &GridFn, dual: &DualGridSpec) -> Result<DualGridFn> {
    let boxed = legendre(f, dual)?;
    let tail = f.tail();
    let values = boxed
        .values()
        .par_iter()
        .enumerate()
        .map(|(i, &v)| if tail.admits(&dual.point(i)) { v } else { TOP })
        .collect();
    DualGridFn::new(*dual, values)
}

/// Inverse transform: `L[g](s) = max_a <s, a> - g(a)` over finite dual
/// entries. The result is convex and nondecreasing in every axis.
pub fn legendre_dual(g: &DualGridFn, primal: &GridSpec) -> Result<GridFn> {
    let dual = g.spec();
    primal.ensure_dim(dual.n())?;
    if g.finite_count() == 0 {
        return Err(Error::AllTop);
    }
    let values = separable(g.values(), dual.n(), &dual.axis_coords(), &primal.axis_coords());
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::AllTop);
    }
    let finite: Vec<Vec<f64>> = (0..dual.len())
        .filter(|&i| !g.is_top(i))
        .map(|i| dual.point(i))
        .collect();
    let tail = Tail::from_slopes(dual.n(), finite.iter().map(|a| a.as_slice()));
    Ok(GridFn::from_parts(*primal, values, tail, true, true))
}

/// Truncated-box biconjugate: the largest convex minorant of the samples,
/// up to slope discretization. The slope grid spans exactly `[0, Lip(f)]`
/// with `N` steps, so its spacing shrinks with the function's own slope.
pub fn biconjugate(f: &GridFn) -> Result<GridFn> {
    let lip = f.lipschitz();
    let cap = if lip > 0.0 { lip } else { 1.0 };
    let dual = DualGridSpec::new(f.spec().n(), cap, f.spec().samples())?;
    let g = legendre(f, &dual)?;
    Ok(legendre_dual(&g, f.spec())?.with_tail(f.tail().clone()))
}

/// Biconjugate on the orthant: the largest convex minorant of `f` extended
/// by its tail.
pub fn biconjugate_orthant(f: &GridFn, dual: &DualGridSpec) -> Result<GridFn> {
    let g = legendre_orthant(f, dual)?;
    legendre_dual(&g, f.spec())
}

impl GridSpec {
    pub(crate) fn ensure_dim(&self, n: usize) -> Result<()> {
        if self.n() == n {
            Ok(())
        } else {
            Err(Error::SpecMismatch(format!("dimension {} vs {}", self.n(), n)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(xs: &[f64], vals: &[f64], y: f64) -> f64 {
        xs.iter().zip(vals).map(|(x, v)| x * y - v).fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn line_matches_brute_force_on_nonconvex_data() {
        let xs: Vec<f64> = (0..40).map(|k| -4.0 + 0.1 * k as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|x| (3.0 * x).sin() + 0.2 * x * x).collect();
        let ys: Vec<f64> = (0..30).map(|k| -2.0 + 0.15 * k as f64).collect();
        let mut out = vec![0.0; ys.len()];
        conjugate_line(&xs, &vals, &ys, &mut out);
        for (y, o) in ys.iter().zip(&out) {
            assert!((o - brute(&xs, &vals, *y)).abs() < 1e-12);
        }
    }

    #[test]
    fn absent_and_unbounded_entries() {
        let xs = [0.0, 1.0, 2.0];
        let ys = [0.0, 1.0];
        let mut out = [0.0; 2];
        conjugate_line(&xs, &[f64::INFINITY, 0.0, f64::INFINITY], &ys, &mut out);
        assert_eq!(out, [0.0, 1.0]);
        conjugate_line(&xs, &[0.0, f64::NEG_INFINITY, 0.0], &ys, &mut out);
        assert_eq!(out, [f64::INFINITY; 2]);
        conjugate_line(&xs, &[f64::INFINITY; 3], &ys, &mut out);
        assert_eq!(out, [f64::NEG_INFINITY; 2]);
    }
}
