//! Toric geodesics through the double Legendre formula
//! `u_t = L[(1 - t) L[u_0] + t L[u_1]]`, with subgeodesic bounds, contact
//! sets and profiles along `t`.

use rayon::prelude::*;

use crate::bodies::{hausdorff_gap, interpolate_body, ConvexBody};
use crate::error::{Error, Result};
use crate::extremal::required_cap;
use crate::grid::{
    combine, legendre_dual, legendre_orthant, sup_distance, Combine, DualGridFn, DualGridSpec,
    GridFn, GridSpec,
};
use crate::monge_ampere::{capacity, energy, energy_with, kappa, ma_measure};

/// `{k / 16 : 1 <= k <= 15}`.
pub fn default_samples() -> Vec<f64> {
    (1..16).map(|k| k as f64 / 16.0).collect()
}

/// Dual grid wide enough for the slopes of both endpoints.
pub fn default_dual(u0: &GridFn, u1: &GridFn) -> DualGridSpec {
    DualGridSpec::covering(u0.spec(), u0.lipschitz().max(u1.lipschitz()))
}

#[derive(Debug, Clone)]
pub struct GeodesicFamily {
    u0: GridFn,
    u1: GridFn,
    dual: DualGridSpec,
    conj0: DualGridFn,
    conj1: DualGridFn,
    samples: Vec<f64>,
    slices: Vec<GridFn>,
}

fn check_endpoint(u: &GridFn, which: &str) -> Result<()> {
    if !u.is_convex() {
        return Err(Error::NotConvex { gap: u.convexity_gap(), tolerance: u.eps_conv() });
    }
    if !u.is_nonpositive() {
        return Err(Error::OutOfRange(format!("endpoint {which} takes positive values")));
    }
    Ok(())
}

pub fn geodesic(
    u0: &GridFn,
    u1: &GridFn,
    samples: &[f64],
    dual: &DualGridSpec,
) -> Result<GeodesicFamily> {
    u0.spec().ensure_same(u1.spec())?;
    check_endpoint(u0, "u0")?;
    check_endpoint(u1, "u1")?;
    if samples.is_empty() {
        return Err(Error::Empty("t samples".into()));
    }
    if samples.iter().any(|t| !(*t > 0.0 && *t < 1.0)) || samples.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::OutOfRange("t samples must increase strictly inside (0, 1)".into()));
    }
    let conj0 = legendre_orthant(u0, dual)?;
    let conj1 = legendre_orthant(u1, dual)?;
    let slices = samples
        .par_iter()
        .map(|&t| legendre_dual(&conj0.affine(&conj1, t)?, u0.spec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(GeodesicFamily {
        u0: u0.clone(),
        u1: u1.clone(),
        dual: *dual,
        conj0,
        conj1,
        samples: samples.to_vec(),
        slices,
    })
}

impl GeodesicFamily {
    pub fn u0(&self) -> &GridFn {
        &self.u0
    }

    pub fn u1(&self) -> &GridFn {
        &self.u1
    }

    pub fn spec(&self) -> &GridSpec {
        self.u0.spec()
    }

    pub fn dual(&self) -> &DualGridSpec {
        &self.dual
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn slices(&self) -> &[GridFn] {
        &self.slices
    }

    /// The slice at a sampled `t`.
    pub fn slice(&self, t: f64) -> Result<&GridFn> {
        self.position(t).map(|k| &self.slices[k])
    }

    /// The geodesic at an arbitrary `t` in `[0, 1]`, computed on demand.
    pub fn slice_at(&self, t: f64) -> Result<GridFn> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfRange(format!("t = {t} not in [0, 1]")));
        }
        legendre_dual(&self.conj0.affine(&self.conj1, t)?, self.spec())
    }

    fn position(&self, t: f64) -> Result<usize> {
        self.samples
            .iter()
            .position(|s| (s - t).abs() <= 1e-12)
            .ok_or_else(|| Error::OutOfRange(format!("t = {t} is not a sample")))
    }

    /// Largest `eps_conv` among endpoints and slices.
    pub fn eps_conv(&self) -> f64 {
        self.slices
            .iter()
            .map(GridFn::eps_conv)
            .fold(self.u0.eps_conv().max(self.u1.eps_conv()), f64::max)
    }

    /// `(t, slice)` including the endpoints.
    fn with_endpoints(&self) -> Vec<(f64, &GridFn)> {
        let mut out = vec![(0.0, &self.u0)];
        out.extend(self.samples.iter().copied().zip(&self.slices));
        out.push((1.0, &self.u1));
        out
    }

    /// Largest `u_{t2} - (u_{t1} + u_{t3}) / 2` over sample triples with
    /// `t2` the midpoint of `t1` and `t3`.
    pub fn t_convexity_violation(&self) -> f64 {
        let all = self.with_endpoints();
        let mut worst: f64 = 0.0;
        for i in 0..all.len() {
            for k in i + 2..all.len() {
                let mid = 0.5 * (all[i].0 + all[k].0);
                if let Some(j) = (i + 1..k).find(|&j| (all[j].0 - mid).abs() <= 1e-12) {
                    let (a, b, c) = (all[i].1.values(), all[j].1.values(), all[k].1.values());
                    for p in 0..b.len() {
                        worst = worst.max(b[p] - 0.5 * (a[p] + c[p]));
                    }
                }
            }
        }
        worst
    }
}

/// `V_t = max(u0 - M t, u1 - M (1 - t))` with `M = sup |u0 - u1|`.
pub fn subgeodesic_vt(u0: &GridFn, u1: &GridFn, t: f64) -> Result<GridFn> {
    let m = sup_distance(u0, u1)?;
    combine(&u0.shifted(-m * t), &u1.shifted(-m * (1.0 - t)), Combine::Max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SandwichRow {
    pub t: f64,
    /// `max (V_t - u_t)_+`.
    pub lower_violation: f64,
    /// `max (u_t - (1 - t) u0 - t u1)_+`.
    pub upper_violation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SandwichReport {
    pub rows: Vec<SandwichRow>,
    pub tolerance: f64,
}

impl SandwichReport {
    pub fn max_violation(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.lower_violation.max(r.upper_violation))
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_violation() <= self.tolerance
    }
}

pub fn sandwich_check(g: &GeodesicFamily) -> Result<SandwichReport> {
    let mut rows = Vec::with_capacity(g.samples.len());
    for (&t, slice) in g.samples.iter().zip(&g.slices) {
        let lower = subgeodesic_vt(&g.u0, &g.u1, t)?;
        let chord = combine(&g.u0, &g.u1, Combine::Affine(t))?;
        let over = |a: &GridFn, b: &GridFn| {
            a.values().iter().zip(b.values()).map(|(x, y)| x - y).fold(0.0, f64::max)
        };
        rows.push(SandwichRow {
            t,
            lower_violation: over(&lower, slice),
            upper_violation: over(slice, &chord),
        });
    }
    Ok(SandwichReport { rows, tolerance: g.eps_conv() })
}

/// `(t, sup |u_t - u_j|)` for every sample.
pub fn endpoint_gap(g: &GeodesicFamily, j: usize) -> Result<Vec<(f64, f64)>> {
    let end = match j {
        0 => &g.u0,
        1 => &g.u1,
        _ => return Err(Error::OutOfRange(format!("endpoint index {j}"))),
    };
    g.samples
        .iter()
        .zip(&g.slices)
        .map(|(&t, s)| Ok((t, sup_distance(s, end)?)))
        .collect()
}

/// Grid points where a slice is within `tau` of its minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ContactSet {
    pub t: f64,
    pub m_t: f64,
    pub tau: f64,
    /// Grid indices, increasing.
    pub points: Vec<usize>,
}

/// Contact threshold above the minimum: round-off level.
pub fn contact_tolerance(m_t: f64) -> f64 {
    1e-9 * (1.0 + m_t.abs())
}

pub fn contact_of(f: &GridFn, t: f64) -> ContactSet {
    let m_t = f.min_value();
    let tau = contact_tolerance(m_t);
    let points = f
        .values()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v <= m_t + tau)
        .map(|(i, _)| i)
        .collect();
    ContactSet { t, m_t, tau, points }
}

pub fn contact_set(g: &GeodesicFamily, t: f64) -> Result<ContactSet> {
    Ok(contact_of(g.slice(t)?, t))
}

impl ContactSet {
    pub fn coordinates(&self, spec: &GridSpec) -> Vec<Vec<f64>> {
        self.points.iter().map(|&i| spec.point(i)).collect()
    }

    /// The complete body spanned by the contact points.
    pub fn body(&self, spec: &GridSpec) -> Result<ConvexBody> {
        let n = spec.n();
        let m = spec.axis_len();
        // keep the top point of every axis-(n-1) column before pruning
        let mut top: std::collections::BTreeMap<Vec<usize>, usize> = Default::default();
        for &i in &self.points {
            let k = spec.multi_index(i);
            let e = top.entry(k[..n - 1].to_vec()).or_insert(k[n - 1]);
            *e = (*e).max(k[n - 1]);
        }
        let gens: Vec<Vec<f64>> = top
            .into_iter()
            .map(|(mut k, last)| {
                k.push(last);
                k.iter().map(|&x| spec.coord(x.min(m - 1))).collect()
            })
            .collect();
        Ok(ConvexBody::new(n, gens)?.reduced())
    }
}

/// Capacity of the body spanned by a contact set.
pub fn contact_capacity(c: &ContactSet, spec: &GridSpec) -> Result<f64> {
    let body = c.body(spec)?;
    let dual = DualGridSpec::covering(spec, required_cap(&body));
    capacity(&body, spec, &dual)
}

/// `kappa_n` times the mass of the slice's measure on its contact points.
pub fn contact_mass(f: &GridFn, c: &ContactSet) -> Result<f64> {
    Ok(kappa(f.spec().n()) * ma_measure(f)?.restricted_total(&c.points))
}

/// Hausdorff gap between the contact set at `t` and `(1 - t) L0 + t L1`.
pub fn geometric_mean_gap(
    g: &GeodesicFamily,
    l0: &ConvexBody,
    l1: &ConvexBody,
    t: f64,
) -> Result<f64> {
    let c = contact_set(g, t)?;
    let body = interpolate_body(l0, l1, t)?;
    hausdorff_gap(&body, &c.coordinates(g.spec()), g.spec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    /// `(t, E(u_t))` per sample.
    pub rows: Vec<(f64, f64)>,
    pub e0: f64,
    pub e1: f64,
}

impl EnergyProfile {
    pub fn chord(&self, t: f64) -> f64 {
        (1.0 - t) * self.e0 + t * self.e1
    }

    /// Largest deviation from the chord through the endpoint energies.
    pub fn affinity_residual(&self) -> f64 {
        self.rows.iter().map(|&(t, e)| (e - self.chord(t)).abs()).fold(0.0, f64::max)
    }
}

pub fn energy_profile(g: &GeodesicFamily) -> Result<EnergyProfile> {
    let rows = g
        .samples
        .par_iter()
        .zip(&g.slices)
        .map(|(&t, s)| {
            let mu = ma_measure(s)?;
            Ok((t, energy_with(s, &mu)))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnergyProfile { rows, e0: energy(&g.u0)?, e1: energy(&g.u1)? })
}
