use super::GridFn;
use crate::error::{Error, Result};

/// Pointwise combination of two grid functions on the same grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Combine {
    Min,
    Max,
    /// `(1 - theta) f + theta g`.
    Affine(f64),
}

pub fn combine(f: &GridFn, g: &GridFn, kind: Combine) -> Result<GridFn> {
    f.spec().ensure_same(g.spec())?;
    let (values, tail, convex): (Vec<f64>, _, _) = match kind {
        Combine::Min => (
            f.values().iter().zip(g.values()).map(|(&x, &y)| x.min(y)).collect(),
            f.tail().min(g.tail()),
            false,
        ),
        Combine::Max => (
            f.values().iter().zip(g.values()).map(|(&x, &y)| x.max(y)).collect(),
            f.tail().max(g.tail()),
            f.is_convex() && g.is_convex(),
        ),
        Combine::Affine(theta) => {
            if !(0.0..=1.0).contains(&theta) {
                return Err(Error::OutOfRange(format!("affine weight {theta} not in [0, 1]")));
            }
            let values = if theta == 0.0 {
                f.values().to_vec()
            } else if theta == 1.0 {
                g.values().to_vec()
            } else {
                f.values()
                    .iter()
                    .zip(g.values())
                    .map(|(&x, &y)| (1.0 - theta) * x + theta * y)
                    .collect()
            };
            (values, f.tail().affine(g.tail(), theta), f.is_convex() && g.is_convex())
        }
    };
    let monotone = f.is_monotone() && g.is_monotone();
    Ok(GridFn::from_parts(*f.spec(), values, tail, monotone, convex))
}

/// `max |f - g|` over the grid.
pub fn sup_distance(f: &GridFn, g: &GridFn) -> Result<f64> {
    f.spec().ensure_same(g.spec())?;
    Ok(f.values().iter().zip(g.values()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}
