//! The verification suites.

use rayon::prelude::*;

use crate::bodies::{interpolate_body, ConvexBody};
use crate::error::{Error, Result};
use crate::extremal::{extremal_fn, required_cap, weighted_extremal};
use crate::geodesics::{
    contact_capacity, contact_set, endpoint_gap, energy_profile, geodesic, geometric_mean_gap,
    sandwich_check, GeodesicFamily,
};
use crate::grid::{sup_distance, DualGridSpec, GridFn, GridSpec};
use crate::monge_ampere::capacity;
use crate::rooftop::{
    connectivity, indicator, residual, rooftop, rooftop_cross_check,
    rooftop_equality_gap, C_LIST,
};

use super::{Check, ExperimentConfig, FunctionRef, Profile, ProfileRow, Suite, SuiteReport};

/// Tolerance for energies and capacities, `20 h`.
fn tol_e(spec: &GridSpec) -> f64 {
    20.0 * spec.spacing()
}

fn dual_for(cfg: &ExperimentConfig, spec: &GridSpec, slope: f64) -> DualGridSpec {
    if spec == &cfg.grid && cfg.dual.cap() >= slope {
        cfg.dual
    } else {
        DualGridSpec::covering(spec, slope)
    }
}

fn body<'a>(cfg: &'a ExperimentConfig, name: &str) -> Result<&'a ConvexBody> {
    cfg.bodies.get(name).ok_or_else(|| Error::InvalidBody(format!("undefined body `{name}`")))
}

fn extremal(cfg: &ExperimentConfig, l: &ConvexBody) -> Result<GridFn> {
    extremal_fn(l, &cfg.grid, &dual_for(cfg, &cfg.grid, required_cap(l)))
}

fn body_capacity(cfg: &ExperimentConfig, l: &ConvexBody) -> Result<f64> {
    capacity(l, &cfg.grid, &dual_for(cfg, &cfg.grid, required_cap(l)))
}

/// Samples a named function (or the residual of one) on `spec`.
pub fn resolve_function(cfg: &ExperimentConfig, r: &FunctionRef, spec: &GridSpec) -> Result<GridFn> {
    let f = cfg
        .functions
        .get(r.base())
        .ok_or_else(|| Error::OutOfRange(format!("undefined function `{}`", r.base())))?
        .to_grid(spec)?;
    match r {
        FunctionRef::Named(_) => Ok(f),
        FunctionRef::Residual(_) => Ok(residual(&f, &C_LIST)?.value),
    }
}

fn function(cfg: &ExperimentConfig, name: &str) -> Result<GridFn> {
    resolve_function(cfg, &FunctionRef::Named(name.to_string()), &cfg.grid)
}

fn family(cfg: &ExperimentConfig, u0: &GridFn, u1: &GridFn) -> Result<GeodesicFamily> {
    let slope = u0.lipschitz().max(u1.lipschitz());
    geodesic(u0, u1, &cfg.t_samples, &dual_for(cfg, u0.spec(), slope))
}

/// Per-`t` profile of a family; body columns are filled when the endpoints
/// are extremal functions of `bodies`.
pub fn build_profile(
    label: &str,
    g: &GeodesicFamily,
    bodies: Option<(&ConvexBody, &ConvexBody, f64, f64)>,
) -> Result<Profile> {
    let spec = *g.spec();
    let energies = if spec.n() <= 2 { Some(energy_profile(g)?) } else { None };
    let sandwich = sandwich_check(g)?;
    let gaps0 = endpoint_gap(g, 0)?;
    let gaps1 = endpoint_gap(g, 1)?;
    let volumes = match bodies {
        Some((l0, l1, _, _)) if spec.radius() >= 2.0 * l0.extent().max(l1.extent()) => {
            Some((l0.volume(&spec)?.value, l1.volume(&spec)?.value))
        }
        _ => None,
    };
    let rows = g
        .samples()
        .par_iter()
        .enumerate()
        .map(|(k, &t)| -> Result<ProfileRow> {
            let c = contact_set(g, t)?;
            let (capacity, capacity_bound) = match bodies {
                Some((_, _, c0, c1)) if spec.n() <= 2 => {
                    (contact_capacity(&c, &spec)?, (1.0 - t) * c0 + t * c1)
                }
                _ => (f64::NAN, f64::NAN),
            };
            let (volume, volume_bound) = match (bodies, volumes) {
                (Some((l0, l1, _, _)), Some((v0, v1))) => (
                    interpolate_body(l0, l1, t)?.volume(&spec)?.value,
                    v0.powf(1.0 - t) * v1.powf(t),
                ),
                _ => (f64::NAN, f64::NAN),
            };
            let (energy, energy_chord) = match &energies {
                Some(e) => (e.rows[k].1, e.chord(t)),
                None => (f64::NAN, f64::NAN),
            };
            Ok(ProfileRow {
                t,
                m_t: c.m_t,
                capacity,
                capacity_bound,
                energy,
                energy_chord,
                volume,
                volume_bound,
                sandwich_lower: sandwich.rows[k].lower_violation,
                sandwich_upper: sandwich.rows[k].upper_violation,
                gap0: gaps0[k].1,
                gap1: gaps1[k].1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Profile { label: label.to_string(), rows })
}

/// Geodesic between two named endpoints; body names stand for their
/// extremal functions.
pub fn run_geodesic(cfg: &ExperimentConfig, u0: &str, u1: &str) -> Result<(GeodesicFamily, Profile)> {
    let label = format!("{u0}-{u1}");
    match (cfg.bodies.get(u0), cfg.bodies.get(u1)) {
        (Some(l0), Some(l1)) => {
            let g = family(cfg, &extremal(cfg, l0)?, &extremal(cfg, l1)?)?;
            let (c0, c1) = if cfg.grid.n() <= 2 {
                (body_capacity(cfg, l0)?, body_capacity(cfg, l1)?)
            } else {
                (f64::NAN, f64::NAN)
            };
            let p = build_profile(&label, &g, Some((l0, l1, c0, c1)))?;
            Ok((g, p))
        }
        _ => {
            let f0 = function(cfg, u0)?;
            let f1 = function(cfg, u1)?;
            let g = family(cfg, &f0, &f1)?;
            let p = build_profile(&label, &g, None)?;
            Ok((g, p))
        }
    }
}

pub fn run_suite(cfg: &ExperimentConfig, suite: Suite) -> Result<SuiteReport> {
    let mut report = SuiteReport { suite, checks: Vec::new(), profiles: Vec::new() };
    match suite {
        Suite::GeodesicExamples => geodesic_examples(cfg, &mut report)?,
        Suite::CapacityConvexity => capacity_convexity(cfg, &mut report)?,
        Suite::EnergyAffinity => energy_affinity(cfg, &mut report)?,
        Suite::GeometricMean => geometric_mean(cfg, &mut report)?,
        Suite::WeightedCapacity => weighted_capacity(cfg, &mut report)?,
        Suite::BrunnMinkowski => brunn_minkowski(cfg, &mut report)?,
        Suite::RooftopEquality => rooftop_equality(cfg, &mut report)?,
        Suite::ResidualIdempotency => residual_idempotency(cfg, &mut report)?,
        Suite::Connectivity => connectivity_suite(cfg, &mut report)?,
    }
    if report.checks.is_empty() {
        log::warn!("suite {suite} has no cases in this config");
    }
    Ok(report)
}

fn geodesic_examples(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    for p in &cfg.function_pairs {
        let label = format!("{}-{}", p.u0, p.u1);
        let u0 = function(cfg, &p.u0)?;
        let u1 = function(cfg, &p.u1)?;
        let g = family(cfg, &u0, &u1)?;
        let eps = g.eps_conv();
        if let Some(path) = &p.expected {
            let mut worst: f64 = 0.0;
            for (&t, s) in g.samples().iter().zip(g.slices()) {
                worst = worst.max(sup_distance(s, &path.at(t).to_grid(g.spec())?)?);
            }
            report.checks.push(Check::at_most(format!("{label}: slice vs closed form"), worst, eps));
        }
        if let Some([a, b]) = p.gap0 {
            let worst = endpoint_gap(&g, 0)?
                .into_iter()
                .map(|(t, gap)| (gap - (a + b * t)).abs())
                .fold(0.0, f64::max);
            report.checks.push(Check::at_most(format!("{label}: endpoint gap to u0"), worst, eps));
        }
        let sw = sandwich_check(&g)?;
        report.checks.push(Check::at_most(
            format!("{label}: V_t <= u_t <= chord"),
            sw.max_violation(),
            sw.tolerance,
        ));
        report.checks.push(Check::at_most(
            format!("{label}: convexity in t"),
            g.t_convexity_violation(),
            eps,
        ));
        let mirrored: Vec<f64> = g.samples().iter().rev().map(|t| 1.0 - t).collect();
        let back = geodesic(&u1, &u0, &mirrored, g.dual())?;
        let mut sym: f64 = 0.0;
        for (k, s) in g.slices().iter().enumerate() {
            sym = sym.max(sup_distance(s, &back.slices()[g.slices().len() - 1 - k])?);
        }
        report.checks.push(Check::at_most(format!("{label}: symmetry t <-> 1-t"), sym, eps));
        report.profiles.push(build_profile(&label, &g, None)?);
    }
    Ok(())
}

fn capacity_convexity(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let tol = tol_e(&cfg.grid);
    for p in &cfg.body_pairs {
        let label = format!("{}-{}", p.l0, p.l1);
        let (l0, l1) = (body(cfg, &p.l0)?, body(cfg, &p.l1)?);
        let (c0, c1) = (body_capacity(cfg, l0)?, body_capacity(cfg, l1)?);
        let g = family(cfg, &extremal(cfg, l0)?, &extremal(cfg, l1)?)?;
        let profile = build_profile(&label, &g, Some((l0, l1, c0, c1)))?;
        let excess = profile
            .rows
            .iter()
            .map(|r| r.capacity - r.capacity_bound)
            .fold(f64::NEG_INFINITY, f64::max);
        report.checks.push(
            Check::at_most(format!("{label}: Cap(K_t) - chord"), excess, tol)
                .with_note(format!("Cap(K0) = {c0:.6e}, Cap(K1) = {c1:.6e}")),
        );
        let worst = profile
            .rows
            .par_iter()
            .map(|r| Ok((r.capacity - body_capacity(cfg, &interpolate_body(l0, l1, r.t)?)?).abs()))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(
            format!("{label}: Cap(K_t) vs capacity of the geometric mean"),
            worst,
            tol,
        ));
        report.profiles.push(profile);
    }
    Ok(())
}

fn energy_affinity(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let tol = tol_e(&cfg.grid);
    let mut cases: Vec<(String, GridFn, GridFn, Option<[f64; 2]>)> = Vec::new();
    for p in &cfg.body_pairs {
        let (l0, l1) = (body(cfg, &p.l0)?, body(cfg, &p.l1)?);
        cases.push((format!("{}-{}", p.l0, p.l1), extremal(cfg, l0)?, extremal(cfg, l1)?, None));
    }
    for p in cfg.function_pairs.iter().filter(|p| p.affine_energy) {
        cases.push((format!("{}-{}", p.u0, p.u1), function(cfg, &p.u0)?, function(cfg, &p.u1)?, p.energy));
    }
    for (label, u0, u1, expected) in cases {
        let g = family(cfg, &u0, &u1)?;
        let e = energy_profile(&g)?;
        report.checks.push(Check::at_most(
            format!("{label}: energy affinity residual"),
            e.affinity_residual(),
            tol,
        ));
        if let Some([a, b]) = expected {
            let worst = e.rows.iter().map(|&(t, v)| (v - (a + b * t)).abs()).fold(0.0, f64::max);
            report.checks.push(Check::at_most(format!("{label}: energy vs closed form"), worst, tol));
        }
    }
    Ok(())
}

fn geometric_mean(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let h = cfg.grid.spacing();
    for p in &cfg.body_pairs {
        let label = format!("{}-{}", p.l0, p.l1);
        let (l0, l1) = (body(cfg, &p.l0)?, body(cfg, &p.l1)?);
        let g = family(cfg, &extremal(cfg, l0)?, &extremal(cfg, l1)?)?;
        let worst = g
            .samples()
            .par_iter()
            .map(|&t| geometric_mean_gap(&g, l0, l1, t))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        report.checks.push(Check::at_most(format!("{label}: Hausdorff(contact, L_t)"), worst, 2.0 * h));
        if l0.reduced() != l1.reduced() {
            let mid = extremal(cfg, &interpolate_body(l0, l1, 0.5)?)?;
            let d = sup_distance(&g.slice_at(0.5)?, &mid)?;
            report.checks.push(Check::above(
                format!("{label}: sup|u_1/2 - extremal(L_1/2)|"),
                d,
                2.0 * g.eps_conv(),
            ));
        }
    }
    Ok(())
}

fn weighted_capacity(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let tol = tol_e(&cfg.grid);
    let n = cfg.grid.n();
    let expo = -1.0 / (n as f64 + 1.0);
    for p in &cfg.body_pairs {
        let label = format!("{}-{}", p.l0, p.l1);
        let (l0, l1) = (body(cfg, &p.l0)?, body(cfg, &p.l1)?);
        let (cap0, cap1) = (body_capacity(cfg, l0)?, body_capacity(cfg, l1)?);
        let c0 = cfg.weights.map_or(1.0, |w| w.c0);
        let c1 = cfg
            .weights
            .and_then(|w| w.c1)
            .unwrap_or(c0 * (cap0 / cap1).powf(1.0 / (n as f64 + 1.0)));
        let dual0 = dual_for(cfg, &cfg.grid, required_cap(l0));
        let dual1 = dual_for(cfg, &cfg.grid, required_cap(l1));
        let u0 = weighted_extremal(l0, c0, &cfg.grid, &dual0)?;
        let u1 = weighted_extremal(l1, c1, &cfg.grid, &dual1)?;
        let g = family(cfg, &u0, &u1)?;

        let per_t = g
            .samples()
            .par_iter()
            .map(|&t| {
                let c = contact_set(&g, t)?;
                let c_t = (1.0 - t) * c0 + t * c1;
                Ok(((c.m_t.abs() - c_t).abs(), c.tau, (t, contact_capacity(&c, &cfg.grid)?.powf(expo))))
            })
            .collect::<Result<Vec<_>>>()?;
        let m_gap = per_t.iter().map(|x| x.0).fold(0.0, f64::max);
        let m_tol = per_t.iter().map(|x| x.1).fold(0.0, f64::max);
        let mut w = vec![(0.0, cap0.powf(expo))];
        w.extend(per_t.iter().map(|x| x.2));
        w.push((1.0, cap1.powf(expo)));
        report.checks.push(
            Check::at_most(format!("{label}: |m_t| - c_t"), m_gap, m_tol)
                .with_note(format!("c0 = {c0:.6e}, c1 = {c1:.6e}")),
        );
        let mut concavity = f64::NEG_INFINITY;
        for k in 1..w.len() - 1 {
            let (a, b, c) = (w[k - 1], w[k], w[k + 1]);
            if ((b.0 - a.0) - (c.0 - b.0)).abs() <= 1e-12 {
                concavity = concavity.max(a.1 + c.1 - 2.0 * b.1);
            }
        }
        report.checks.push(Check::at_most(
            format!("{label}: second difference of Cap^(-1/(n+1))"),
            concavity,
            tol,
        ));

        let plain = family(cfg, &extremal(cfg, l0)?, &extremal(cfg, l1)?)?;
        let excess = plain
            .samples()
            .par_iter()
            .map(|&t| {
                let cap = contact_capacity(&contact_set(&plain, t)?, &cfg.grid)?;
                Ok(cap - cap0.powf(1.0 - t) * cap1.powf(t))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max);
        report.checks.push(Check::at_most(
            format!("{label}: Cap(K_t) - Cap0^(1-t) Cap1^t"),
            excess,
            tol,
        ));
    }
    Ok(())
}

fn brunn_minkowski(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let spec = cfg.grid;
    for p in &cfg.body_pairs {
        let label = format!("{}-{}", p.l0, p.l1);
        let (l0, l1) = (body(cfg, &p.l0)?, body(cfg, &p.l1)?);
        let (v0, v1) = (l0.volume(&spec)?, l1.volume(&spec)?);
        let mut worst = f64::NEG_INFINITY;
        let mut worst_eq = f64::NEG_INFINITY;
        let mut raw: f64 = 0.0;
        for &t in &cfg.t_samples {
            let v = interpolate_body(l0, l1, t)?.volume(&spec)?;
            let bound = v0.value.powf(1.0 - t) * v1.value.powf(t);
            let tol = v.tolerance()
                + bound * ((1.0 - t) * v0.tolerance() / v0.value + t * v1.tolerance() / v1.value);
            worst = worst.max(bound - v.value - tol);
            worst_eq = worst_eq.max((bound - v.value).abs() - tol);
            raw = raw.max((bound - v.value).abs());
        }
        report.checks.push(
            Check::at_most(format!("{label}: Vol0^(1-t) Vol1^t - Vol(t) beyond tolerance"), worst, 0.0)
                .with_note(format!("Vol0 = {:.6e}, Vol1 = {:.6e}", v0.value, v1.value)),
        );
        if p.volume_equality {
            report.checks.push(
                Check::at_most(format!("{label}: equality case beyond tolerance"), worst_eq, 0.0)
                    .with_note(format!("max |difference| = {raw:.3e}")),
            );
        }
    }
    Ok(())
}

fn rooftop_equality(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    for s in &cfg.shift_checks {
        let u = function(cfg, &s.u)?;
        let v = function(cfg, &s.v)?;
        let want = function(cfg, &s.expected)?;
        let eps = v.eps_conv().max(want.eps_conv());
        let mut worst: f64 = 0.0;
        for &c in &s.shifts {
            worst = worst.max(sup_distance(&rooftop(&u, &v.shifted(c))?, &want)?);
        }
        report.checks.push(Check::at_most(
            format!("P({}, {} + C) = {} for C in {:?}", s.u, s.v, s.expected, s.shifts),
            worst,
            eps,
        ));
    }
    for p in &cfg.rooftop_pairs {
        let phi = function(cfg, &p.phi)?;
        let psi = function(cfg, &p.psi)?;
        let eps = phi.eps_conv().max(psi.eps_conv());
        let r = rooftop_equality_gap(&phi, &psi, &C_LIST)?;
        let note = format!("stabilized = {}", r.stabilized);
        report.checks.push(
            Check::at_most(format!("{}/{}: rooftop equality gap", p.phi, p.psi), r.gap, eps)
                .with_note(note.clone()),
        );
        report.checks.push(
            Check::at_most(format!("{}/{}: P[phi](psi) - P(g_phi, psi)", p.phi, p.psi), r.one_sided, eps)
                .with_note(note),
        );
        report.checks.push(Check::at_most(
            format!("{}/{}: rooftop via envelope vs via conjugates", p.phi, p.psi),
            rooftop_cross_check(&phi, &psi)?,
            eps,
        ));
    }
    Ok(())
}

fn residual_idempotency(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    let h = cfg.grid.spacing();
    for case in &cfg.residual_cases {
        let name = &case.phi;
        let phi = function(cfg, name)?;
        let eps = phi.eps_conv();
        let g = residual(&phi, &C_LIST)?;
        let note = format!("stabilized = {}", g.stabilized);
        if let Some(e) = &case.expected {
            let want = function(cfg, e)?;
            report.checks.push(
                Check::at_most(
                    format!("g[{name}] = {e}"),
                    sup_distance(&g.value, &want)?,
                    eps.max(want.eps_conv()),
                )
                .with_note(note.clone()),
            );
        }
        let below = phi.values().iter().zip(g.value.values()).map(|(a, b)| a - b).fold(0.0, f64::max);
        let bound = below.max(g.value.max_value());
        report.checks.push(Check::at_most(format!("{name} <= g[{name}] <= 0"), bound, eps));
        let gg = residual(&g.value, &C_LIST)?;
        report.checks.push(Check::at_most(
            format!("g[g[{name}]] = g[{name}]"),
            sup_distance(&gg.value, &g.value)?,
            2.0 * eps,
        ));
        for c in [2.0, 0.5] {
            let scaled = phi.scaled(c);
            let gc = residual(&scaled, &C_LIST)?;
            report.checks.push(Check::at_most(
                format!("g[{c} {name}] = {c} g[{name}]"),
                sup_distance(&gc.value, &g.value.scaled(c))?,
                scaled.eps_conv().max(eps),
            ));
        }
        let (i0, i1) = (indicator(&phi)?, indicator(&g.value)?);
        report.checks.push(
            Check::at_most(
                format!("indicator of g[{name}] = indicator of {name}"),
                sup_distance(&i0.value, &i1.value)?,
                4.0 * h,
            )
            .with_note(format!("estimators agree: {} / {}", i0.reliable, i1.reliable)),
        );
    }
    Ok(())
}

fn connectivity_suite(cfg: &ExperimentConfig, report: &mut SuiteReport) -> Result<()> {
    for case in &cfg.connectivity {
        let label = format!("({}, {})", case.u0, case.u1);
        let mut specs = vec![cfg.grid];
        if case.refine {
            specs.push(GridSpec::new(cfg.grid.n(), cfg.grid.radius(), 2 * cfg.grid.samples())?);
        }
        for spec in specs {
            let u0 = resolve_function(cfg, &case.u0, &spec)?;
            let u1 = resolve_function(cfg, &case.u1, &spec)?;
            let r = connectivity(&u0, &u1)?;
            let name = format!("{label} at N = {}: verdict {}", spec.samples(), case.expected);
            let check = match case.expected {
                crate::rooftop::Verdict::Connectable => Check::at_most(name, r.residual_gap, r.tau_res),
                crate::rooftop::Verdict::NotConnectable => {
                    Check::above(name, r.residual_gap, 3.0 * r.tau_res)
                }
                crate::rooftop::Verdict::Inconclusive => {
                    Check::at_most(name, r.residual_gap, 3.0 * r.tau_res)
                }
            };
            report.checks.push(check.require(r.verdict == case.expected).with_note(format!(
                "got {}, defects {:.3e}/{:.3e}, endpoint gaps {:.3e}/{:.3e}, stabilized {}",
                r.verdict, r.defect0, r.defect1, r.endpoint_gaps.0, r.endpoint_gaps.1, r.stabilized
            )));
        }
    }
    Ok(())
}
