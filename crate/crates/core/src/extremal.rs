//! Relative extremal functions of Reinhardt bodies.
//!
//! The convex image of `omega_K` is the conjugate of `a -> max(h_L(a) + 1, 0)`.

use crate::bodies::ConvexBody;
use crate::error::{Error, Result};
use crate::grid::{legendre_dual, DualGridFn, DualGridSpec, GridFn, GridSpec};

/// Slope cap needed to resolve the extremal function of `body`.
pub fn required_cap(body: &ConvexBody) -> f64 {
    body.depth().into_iter().map(|d| 1.0 / d).fold(0.0, f64::max)
}

/// Moves generators onto the primal lattice.
pub fn snap_to_grid(body: &ConvexBody, spec: &GridSpec) -> Result<ConvexBody> {
    let mut moved = false;
    let gens = body
        .generators()
        .iter()
        .map(|g| {
            g.iter()
                .map(|&x| {
                    let y = spec.coord(spec.nearest_axis_index(x));
                    if (y - x).abs() > 1e-12 * (1.0 + x.abs()) {
                        moved = true;
                        y
                    } else {
                        x
                    }
                })
                .collect()
        })
        .collect();
    if moved {
        log::warn!("body generators snapped to the grid (spacing {})", spec.spacing());
    }
    ConvexBody::new(body.n(), gens)
}

/// `a -> max(h_L(a) + 1, 0)` on the dual grid.
pub fn extremal_dual(body: &ConvexBody, dual: &DualGridSpec) -> Result<DualGridFn> {
    if dual.n() != body.n() {
        return Err(Error::SpecMismatch("body and dual grid dimensions differ".into()));
    }
    let required = required_cap(body);
    if dual.cap() < required * (1.0 - 1e-12) {
        return Err(Error::SlopeCapExceeded { cap: dual.cap(), required });
    }
    DualGridFn::build(*dual, |a| (body.support_unchecked(a) + 1.0).max(0.0))
}

/// Convex image of the relative extremal function of the body `L`.
pub fn extremal_fn(body: &ConvexBody, spec: &GridSpec, dual: &DualGridSpec) -> Result<GridFn> {
    if spec.n() != body.n() {
        return Err(Error::SpecMismatch("body and grid dimensions differ".into()));
    }
    let body = snap_to_grid(body, spec)?;
    let g = extremal_dual(&body, dual)?;
    legendre_dual(&g, spec)
}

/// `c * extremal_fn(L)`.
pub fn weighted_extremal(
    body: &ConvexBody,
    c: f64,
    spec: &GridSpec,
    dual: &DualGridSpec,
) -> Result<GridFn> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::OutOfRange(format!("weight {c} must be positive")));
    }
    Ok(extremal_fn(body, spec, dual)?.scaled(c))
}
