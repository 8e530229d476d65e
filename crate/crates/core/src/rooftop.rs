//! Rooftop envelopes, asymptotic rooftops, residual functions and
//! connectivity verdicts.

use crate::error::{Error, Result};
use crate::geodesics::{default_dual, endpoint_gap, geodesic};
use crate::grid::{
    biconjugate_orthant, combine, legendre, legendre_dual, legendre_orthant, sup_distance,
    Combine, DualGridFn, DualGridSpec, GridFn, GridSpec, TOP,
};

/// Default shift schedule for asymptotic rooftops.
pub const C_LIST: [f64; 6] = [1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

fn covering_dual(fs: &[&GridFn]) -> DualGridSpec {
    let lip = fs.iter().map(|f| f.lipschitz()).fold(0.0, f64::max);
    DualGridSpec::covering(fs[0].spec(), lip)
}

fn zero_like(f: &GridFn) -> GridFn {
    GridFn::build(*f.spec(), |_| 0.0).expect("zero function is finite")
}

/// `P(u, v)`: the convex envelope of `min(u, v)` on the negative orthant.
pub fn rooftop(u: &GridFn, v: &GridFn) -> Result<GridFn> {
    u.spec().ensure_same(v.spec())?;
    let m = combine(u, v, Combine::Min)?;
    biconjugate_orthant(&m, &covering_dual(&[u, v]))
}

/// Sup distance between the envelope of `min(u, v)` and the conjugate of
/// `max(L[u], L[v])`; both compute `P(u, v)` for convex inputs.
pub fn rooftop_cross_check(u: &GridFn, v: &GridFn) -> Result<f64> {
    let direct = rooftop(u, v)?;
    let dual = covering_dual(&[u, v]);
    let g = legendre_orthant(u, &dual)?.max(&legendre_orthant(v, &dual)?)?;
    sup_distance(&direct, &legendre_dual(&g, u.spec())?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticRooftop {
    pub value: GridFn,
    pub stabilized: bool,
    /// Sup-norm increment of the running sup at each shift.
    pub increments: Vec<f64>,
}

/// `P[v](u) = sup_C P(u, v + C)`, approximated over `c_list` by a running
/// pointwise sup; stabilized when the last increment is at most `tau`.
pub fn asymptotic_rooftop(u: &GridFn, v: &GridFn, c_list: &[f64], tau: f64) -> Result<AsymptoticRooftop> {
    if c_list.is_empty() {
        return Err(Error::Empty("shift list".into()));
    }
    if c_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::OutOfRange("shift list must be increasing".into()));
    }
    let mut acc: Option<GridFn> = None;
    let mut increments = Vec::with_capacity(c_list.len());
    for &c in c_list {
        let p = rooftop(u, &v.shifted(c))?;
        acc = Some(match acc {
            None => {
                increments.push(f64::INFINITY);
                p
            }
            Some(prev) => {
                let next = combine(&prev, &p, Combine::Max)?;
                increments.push(sup_distance(&prev, &next)?);
                next
            }
        });
    }
    let stabilized = increments.last().is_some_and(|&d| d <= tau);
    Ok(AsymptoticRooftop { value: acc.expect("nonempty"), stabilized, increments })
}

/// `g_phi = P[phi](0)` with the stabilization threshold `h`.
pub fn residual(phi: &GridFn, c_list: &[f64]) -> Result<AsymptoticRooftop> {
    if !phi.is_nonpositive() {
        return Err(Error::OutOfRange("residual needs a nonpositive function".into()));
    }
    asymptotic_rooftop(&zero_like(phi), phi, c_list, phi.spec().spacing())
}

/// Multilinear interpolation of the samples at an arbitrary point of the box.
pub fn interpolate(f: &GridFn, s: &[f64]) -> f64 {
    let spec = f.spec();
    let h = spec.spacing();
    let m = spec.axis_len();
    let n = spec.n();
    let mut base = vec![0usize; n];
    let mut frac = vec![0.0; n];
    for d in 0..n {
        let x = ((s[d] + spec.radius()) / h).clamp(0.0, (m - 1) as f64);
        let k = (x.floor() as usize).min(m - 2);
        base[d] = k;
        frac[d] = x - k as f64;
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << n) {
        let mut w = 1.0;
        let mut k = base.clone();
        for d in 0..n {
            if corner >> d & 1 == 1 {
                k[d] += 1;
                w *= frac[d];
            } else {
                w *= 1.0 - frac[d];
            }
        }
        if w != 0.0 {
            acc += w * f.value(&k);
        }
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct Indicator {
    /// Support function of the finite-slope domain.
    pub value: GridFn,
    /// Radial slope estimate.
    pub radial: GridFn,
    pub disagreement: f64,
    pub reliable: bool,
}

/// Recession (indicator) function of `phi`, estimated two ways.
pub fn indicator(phi: &GridFn) -> Result<Indicator> {
    if !phi.is_nonpositive() {
        return Err(Error::OutOfRange("indicator needs a nonpositive function".into()));
    }
    if !phi.is_convex() {
        return Err(Error::NotConvex { gap: phi.convexity_gap(), tolerance: phi.eps_conv() });
    }
    let spec = *phi.spec();
    let h = spec.spacing();
    let r = spec.radius();

    let radial_values: Vec<f64> = (0..spec.len())
        .map(|i| {
            let s = spec.point(i);
            let norm = s.iter().map(|x| x.abs()).fold(0.0, f64::max);
            if norm == 0.0 {
                return 0.0;
            }
            let lam = r / norm;
            let far: Vec<f64> = s.iter().map(|x| lam * x).collect();
            let mid: Vec<f64> = far.iter().map(|x| x / 2.0).collect();
            (interpolate(phi, &far) - interpolate(phi, &mid)) / (lam / 2.0)
        })
        .collect();
    let radial = GridFn::from_values(spec, radial_values)?;

    if !spec.samples().is_multiple_of(2) {
        return Err(Error::InvalidGrid("indicator needs an even number of samples".into()));
    }
    let half = GridSpec::new(spec.n(), r / 2.0, spec.samples() / 2)?;
    let offset = spec.samples() / 2;
    let half_values: Vec<f64> = (0..half.len())
        .map(|i| {
            let k: Vec<usize> = half.multi_index(i).into_iter().map(|x| x + offset).collect();
            phi.value(&k)
        })
        .collect();
    let phi_half = GridFn::from_values(half, half_values)?;
    let dual = covering_dual(&[phi]);
    let full = legendre(phi, &dual)?;
    let part = legendre(&phi_half, &dual)?;
    let domain: Vec<f64> = full
        .values()
        .iter()
        .zip(part.values())
        .map(|(a, b)| if a - b <= h / 2.0 { 0.0 } else { TOP })
        .collect();
    let value = legendre_dual(&DualGridFn::new(dual, domain)?, &spec)?;
    let disagreement = sup_distance(&value, &radial)?;
    Ok(Indicator { value, radial, disagreement, reliable: disagreement <= 4.0 * h })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RooftopEquality {
    /// `P[phi](psi)`.
    pub lhs: GridFn,
    /// `P(g_phi, psi)`.
    pub rhs: GridFn,
    pub gap: f64,
    /// `max (lhs - rhs)_+`, which must vanish up to tolerance.
    pub one_sided: f64,
    pub stabilized: bool,
}

pub fn rooftop_equality_gap(phi: &GridFn, psi: &GridFn, c_list: &[f64]) -> Result<RooftopEquality> {
    let h = phi.spec().spacing();
    let lhs = asymptotic_rooftop(psi, phi, c_list, h)?;
    let g = residual(phi, c_list)?;
    let rhs = rooftop(&g.value, psi)?;
    let gap = sup_distance(&lhs.value, &rhs)?;
    let one_sided = lhs
        .value
        .values()
        .iter()
        .zip(rhs.values())
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max);
    Ok(RooftopEquality {
        lhs: lhs.value,
        rhs,
        gap,
        one_sided,
        stabilized: lhs.stabilized && g.stabilized,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Connectable,
    NotConnectable,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Connectable => "connectable",
            Verdict::NotConnectable => "not-connectable",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Verdict {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "connectable" => Ok(Verdict::Connectable),
            "not-connectable" => Ok(Verdict::NotConnectable),
            "inconclusive" => Ok(Verdict::Inconclusive),
            other => Err(Error::OutOfRange(format!("unknown verdict {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectivityReport {
    pub residual0: GridFn,
    pub residual1: GridFn,
    pub residual_gap: f64,
    /// `max(0, sup(u0 - g_{u1}))`.
    pub defect0: f64,
    /// `max(0, sup(u1 - g_{u0}))`.
    pub defect1: f64,
    /// Geodesic gap to `u0` at `t = 1/16` and to `u1` at `t = 15/16`.
    pub endpoint_gaps: (f64, f64),
    pub stabilized: bool,
    pub tau_res: f64,
    pub verdict: Verdict,
}

pub fn connectivity(u0: &GridFn, u1: &GridFn) -> Result<ConnectivityReport> {
    u0.spec().ensure_same(u1.spec())?;
    let g0 = residual(u0, &C_LIST)?;
    let g1 = residual(u1, &C_LIST)?;
    let residual_gap = sup_distance(&g0.value, &g1.value)?;
    let excess = |a: &GridFn, b: &GridFn| {
        a.values().iter().zip(b.values()).map(|(x, y)| x - y).fold(0.0, f64::max)
    };
    let defect0 = excess(u0, &g1.value);
    let defect1 = excess(u1, &g0.value);
    let fam = geodesic(u0, u1, &[1.0 / 16.0, 15.0 / 16.0], &default_dual(u0, u1))?;
    let gap0 = endpoint_gap(&fam, 0)?[0].1;
    let gap1 = endpoint_gap(&fam, 1)?[1].1;
    let tau_res = 4.0 * u0.spec().spacing();
    let stabilized = g0.stabilized && g1.stabilized;
    let verdict = if !stabilized {
        Verdict::Inconclusive
    } else if residual_gap <= tau_res {
        Verdict::Connectable
    } else if residual_gap > 3.0 * tau_res {
        Verdict::NotConnectable
    } else {
        Verdict::Inconclusive
    };
    Ok(ConnectivityReport {
        residual0: g0.value,
        residual1: g1.value,
        residual_gap,
        defect0,
        defect1,
        endpoint_gaps: (gap0, gap1),
        stabilized,
        tau_res,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec1() -> GridSpec {
        GridSpec::new(1, 8.0, 256).unwrap()
    }

    fn spec2() -> GridSpec {
        GridSpec::new(2, 8.0, 64).unwrap()
    }

    #[test]
    fn rooftop_examples() {
        let f = GridFn::build(spec1(), |s| s[0].max(-1.0)).unwrap();
        let zero = zero_like(&f);
        assert!(sup_distance(&rooftop(&f, &f).unwrap(), &f).unwrap() <= f.eps_conv());
        assert!(sup_distance(&rooftop(&zero, &f).unwrap(), &f).unwrap() <= f.eps_conv());
        assert!(rooftop_cross_check(&zero, &f).unwrap() <= f.eps_conv());
    }

    #[test]
    fn shifted_max_is_absorbed() {
        let v0 = GridFn::build(spec2(), |s| s[0].max(s[1])).unwrap();
        let zero = zero_like(&v0);
        for c in [0.0, 1.0, 2.0, 4.0, 32.0] {
            let p = rooftop(&zero, &v0.shifted(c)).unwrap();
            assert!(sup_distance(&p, &v0).unwrap() <= v0.eps_conv(), "C = {c}");
        }
    }

    #[test]
    fn residual_examples() {
        let bounded = GridFn::build(spec1(), |s| s[0].max(-1.0)).unwrap();
        let g = residual(&bounded, &C_LIST).unwrap();
        assert!(g.stabilized);
        assert!(sup_distance(&g.value, &zero_like(&bounded)).unwrap() <= bounded.eps_conv());
        let lin = GridFn::build(spec1(), |s| s[0]).unwrap();
        let g = residual(&lin, &C_LIST).unwrap();
        assert!(sup_distance(&g.value, &lin).unwrap() <= lin.eps_conv());
        let v = GridFn::build(spec2(), |s| s[0].max(s[1])).unwrap();
        let g = residual(&v, &C_LIST).unwrap();
        assert!(sup_distance(&g.value, &v).unwrap() <= v.eps_conv());
    }

    #[test]
    fn indicator_examples() {
        let h = spec1().spacing();
        let bounded = GridFn::build(spec1(), |s| s[0].max(-1.0)).unwrap();
        let ind = indicator(&bounded).unwrap();
        assert!(ind.reliable && ind.value.max_value().abs() <= 4.0 * h && ind.value.min_value().abs() <= 4.0 * h);
        let lin = GridFn::build(spec1(), |s| s[0]).unwrap();
        let ind = indicator(&lin).unwrap();
        assert!(sup_distance(&ind.value, &lin).unwrap() <= 4.0 * h);
        let v = GridFn::build(spec2(), |s| s[0].max(s[1])).unwrap();
        let ind = indicator(&v).unwrap();
        assert!(ind.reliable);
        assert!(sup_distance(&ind.value, &v).unwrap() <= 4.0 * spec2().spacing());
    }

    #[test]
    fn rooftop_equality_examples() {
        let lin = GridFn::build(spec1(), |s| s[0]).unwrap();
        let psi = GridFn::build(spec1(), |s| s[0].max(-1.0)).unwrap();
        let r = rooftop_equality_gap(&lin, &psi, &C_LIST).unwrap();
        assert!(r.gap <= psi.eps_conv());
        assert!(sup_distance(&r.lhs, &lin).unwrap() <= psi.eps_conv());
    }

    #[test]
    fn connectivity_examples() {
        let zero = GridFn::build(spec1(), |_| 0.0).unwrap();
        let bounded = GridFn::build(spec1(), |s| s[0].max(-1.0)).unwrap();
        let lin = GridFn::build(spec1(), |s| s[0]).unwrap();
        let lin2 = GridFn::build(spec1(), |s| 2.0 * s[0]).unwrap();
        assert_eq!(connectivity(&zero, &bounded).unwrap().verdict, Verdict::Connectable);
        let r = connectivity(&zero, &lin).unwrap();
        assert_eq!(r.verdict, Verdict::NotConnectable);
        assert!((r.endpoint_gaps.0 - 8.0).abs() < 1e-12);
        assert_eq!(connectivity(&lin, &lin2).unwrap().verdict, Verdict::NotConnectable);
    }
}
