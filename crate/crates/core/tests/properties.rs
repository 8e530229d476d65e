use pshgeo::bodies::interpolate_body;
use pshgeo::grid::{biconjugate, combine, legendre, sup_distance, Combine};
use pshgeo::monge_ampere::{energy, ma_measure};
use pshgeo::rooftop::{residual, rooftop, C_LIST};
use pshgeo::{ConvexBody, DualGridSpec, GridFn, GridSpec};
use proptest::prelude::*;

type Pieces = Vec<(Vec<f64>, f64)>;

/// Max of affine pieces with nonnegative slopes and nonpositive constants.
/// Slopes sit on the 1/8 lattice, which every slope grid used here contains.
fn pieces(n: usize) -> impl Strategy<Value = Pieces> {
    let slope = (0u32..=16).prop_map(|k| k as f64 / 8.0);
    prop::collection::vec((prop::collection::vec(slope, n), -3.0..0.0f64), 1..5)
}

fn eval(p: &Pieces, s: &[f64]) -> f64 {
    p.iter()
        .map(|(a, b)| a.iter().zip(s).map(|(x, y)| x * y).sum::<f64>() + b)
        .fold(f64::NEG_INFINITY, f64::max)
}

fn grid_fn(spec: GridSpec, p: &Pieces) -> GridFn {
    GridFn::build(spec, |s| eval(p, s)).unwrap()
}

fn generators(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-3.0..-0.1f64, n), 1..4)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn legendre_reverses_order(p in pieces(1), q in pieces(1), n in 1usize..3) {
        let spec = GridSpec::new(n, 4.0, 32).unwrap();
        let p = p.into_iter().map(|(a, b)| (vec![a[0]; n], b)).collect::<Pieces>();
        let q = q.into_iter().map(|(a, b)| (vec![a[0]; n], b)).collect::<Pieces>();
        let f = grid_fn(spec, &p);
        let g = combine(&f, &grid_fn(spec, &q), Combine::Max).unwrap();
        let dual = DualGridSpec::default_for(&spec);
        let lf = legendre(&f, &dual).unwrap();
        let lg = legendre(&g, &dual).unwrap();
        // Exact up to rounding: the hull merges points collinear to within an ulp.
        for (x, y) in lf.values().iter().zip(lg.values()) {
            prop_assert!(*x >= y - 4.0 * f64::EPSILON * y.abs().max(1.0), "{} < {}", x, y);
        }
    }

    #[test]
    fn biconjugate_is_involutive(p in pieces(2)) {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let f = grid_fn(spec, &p);
        prop_assert!(f.is_convex());
        let bi = biconjugate(&f).unwrap();
        prop_assert!(sup_distance(&bi, &f).unwrap() <= f.eps_conv());
    }

    #[test]
    fn support_is_affine_in_t(l0 in generators(2), l1 in generators(2), t in 0.0..=1.0f64,
                              a in prop::collection::vec(0.0..3.0f64, 2)) {
        let b0 = ConvexBody::new(2, l0).unwrap();
        let b1 = ConvexBody::new(2, l1).unwrap();
        let bt = interpolate_body(&b0, &b1, t).unwrap();
        let want = (1.0 - t) * b0.support(&a).unwrap() + t * b1.support(&a).unwrap();
        prop_assert!((bt.support(&a).unwrap() - want).abs() <= 1e-9);
    }

    #[test]
    fn rooftop_is_symmetric_minorant(p in pieces(1), q in pieces(1)) {
        let spec = GridSpec::new(1, 8.0, 128).unwrap();
        let (u, v) = (grid_fn(spec, &p), grid_fn(spec, &q));
        let puv = rooftop(&u, &v).unwrap();
        let pvu = rooftop(&v, &u).unwrap();
        prop_assert!(sup_distance(&puv, &pvu).unwrap() <= 1e-12);
        for k in 0..spec.len() {
            prop_assert!(puv.values()[k] <= u.values()[k].min(v.values()[k]) + 1e-12);
        }
        let puu = rooftop(&u, &u).unwrap();
        prop_assert!(sup_distance(&puu, &u).unwrap() <= u.eps_conv());
    }

    #[test]
    fn rooftop_is_monotone(p in pieces(1), q in pieces(1), w in pieces(1)) {
        let spec = GridSpec::new(1, 8.0, 128).unwrap();
        let (u, v) = (grid_fn(spec, &p), grid_fn(spec, &q));
        let bigger = combine(&v, &grid_fn(spec, &w), Combine::Max).unwrap();
        let lo = rooftop(&u, &v).unwrap();
        let hi = rooftop(&u, &bigger).unwrap();
        for k in 0..spec.len() {
            prop_assert!(lo.values()[k] <= hi.values()[k] + 1e-12);
        }
    }

    #[test]
    fn residual_is_homogeneous(p in pieces(1), c in prop::sample::select(vec![0.5, 2.0])) {
        let spec = GridSpec::new(1, 8.0, 128).unwrap();
        let phi = grid_fn(spec, &p);
        let g = residual(&phi, &C_LIST).unwrap().value;
        let gc = residual(&phi.scaled(c), &C_LIST).unwrap().value;
        let tol = (phi.eps_conv() * c).max(phi.eps_conv());
        prop_assert!(sup_distance(&gc, &g.scaled(c)).unwrap() <= tol);
    }

    #[test]
    fn energy_is_monotone(p in pieces(2), q in pieces(2)) {
        let spec = GridSpec::new(2, 4.0, 32).unwrap();
        let v = grid_fn(spec, &p);
        let u = GridFn::build(spec, |s| eval(&p, s) + eval(&q, s)).unwrap();
        prop_assert!(u.values().iter().zip(v.values()).all(|(a, b)| a <= b));
        let h = spec.spacing();
        prop_assert!(energy(&u).unwrap() <= energy(&v).unwrap() + 10.0 * h);
    }

    // 1D: total mass equals the slope range when every kink is interior.
    #[test]
    fn mass_equals_slope_range(slopes in prop::collection::vec(0.0..2.0f64, 2..6),
                               knots in prop::collection::vec(2usize..62, 5)) {
        let spec = GridSpec::new(1, 8.0, 64).unwrap();
        let mut a = slopes;
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut x: Vec<f64> = knots[..a.len() - 1].iter().map(|&k| spec.coord(k)).collect();
        x.sort_by(|p, q| p.partial_cmp(q).unwrap());
        let f = GridFn::build(spec, |s| {
            let mut v = a[0] * s[0];
            for i in 1..a.len() {
                v += (a[i] - a[i - 1]) * (s[0] - x[i - 1]).max(0.0);
            }
            v
        }).unwrap();
        let mu = ma_measure(&f).unwrap();
        prop_assert!((mu.total() - (a[a.len() - 1] - a[0])).abs() <= 1e-9);
    }
}

/// Off-lattice recession slopes cost up to one slope step times `R`.
#[test]
fn off_lattice_slope_error_is_bounded() {
    let spec = GridSpec::new(1, 8.0, 128).unwrap();
    let u = GridFn::build(spec, |s| 0.42 * s[0]).unwrap();
    let p = rooftop(&u, &u).unwrap();
    let step = DualGridSpec::covering(&spec, u.lipschitz()).spacing();
    let err = sup_distance(&p, &u).unwrap();
    assert!(err <= step * 8.0 + 1e-12);
    assert!(err > u.eps_conv());
}
