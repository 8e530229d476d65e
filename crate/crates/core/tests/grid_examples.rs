use pshgeo::grid::{biconjugate, combine, legendre, legendre_dual, sup_distance, Combine};
use pshgeo::{DualGridFn, DualGridSpec, Error, GridFn, GridSpec, TOP};

fn line(n: usize, r: f64, samples: usize) -> GridSpec {
    GridSpec::new(n, r, samples).unwrap()
}

#[test]
fn build_tags_and_rejection() {
    let spec = line(1, 8.0, 64);
    let zero = GridFn::build(spec, |_| 0.0).unwrap();
    assert!(zero.is_monotone() && zero.is_convex());

    let kink = GridFn::build(spec, |s| s[0].max(-1.0)).unwrap();
    assert!(kink.is_monotone() && kink.is_convex());

    let spec2 = line(2, 4.0, 16);
    let vee = GridFn::build(spec2, |s| s[0].max(s[1]).max(-1.0)).unwrap();
    assert!(vee.is_monotone() && vee.is_convex());
    let bi = biconjugate(&vee).unwrap();
    assert!(sup_distance(&bi, &vee).unwrap() <= vee.eps_conv());

    let concave = GridFn::build(spec, |s| -(s[0] * s[0])).unwrap();
    assert!(!concave.is_convex());

    match GridFn::build(spec, |s| if s[0] == -4.0 { f64::NAN } else { 0.0 }) {
        Err(Error::NonFiniteSample { point, .. }) => assert_eq!(point, vec![-4.0]),
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn legendre_closed_forms() {
    let spec = line(1, 8.0, 256);
    let dual = DualGridSpec::default_for(&spec);
    let a = dual.axis_coords();

    let zero = legendre(&GridFn::build(spec, |_| 0.0).unwrap(), &dual).unwrap();
    assert!(zero.values().iter().all(|&v| v.abs() < 1e-12));

    let kink = legendre(&GridFn::build(spec, |s| s[0].max(-1.0)).unwrap(), &dual).unwrap();
    for (k, &ak) in a.iter().enumerate() {
        assert!((kink.values()[k] - (1.0 - ak).max(0.0)).abs() < 1e-12, "a={ak}");
    }

    // Truncated ray: the sup over [-R, 0] sits at s=-R when a < 1.
    let ray = legendre(&GridFn::build(spec, |s| s[0]).unwrap(), &dual).unwrap();
    for (k, &ak) in a.iter().enumerate() {
        let want = if ak < 1.0 { (1.0 - ak) * 8.0 } else { 0.0 };
        assert!((ray.values()[k] - want).abs() < 1e-12, "a={ak}");
    }
}

#[test]
fn legendre_dual_closed_forms() {
    let spec = line(1, 8.0, 256);
    let dual = DualGridSpec::default_for(&spec);

    let g0 = DualGridFn::build(dual, |_| 0.0).unwrap();
    let f0 = legendre_dual(&g0, &spec).unwrap();
    assert!(f0.values().iter().all(|&v| v.abs() < 1e-12));

    let g1 = DualGridFn::build(dual, |a| (1.0 - a[0]).max(0.0)).unwrap();
    let f1 = legendre_dual(&g1, &spec).unwrap();
    for (k, s) in spec.axis_coords().into_iter().enumerate() {
        assert!((f1.values()[k] - s.max(-1.0)).abs() < 1e-12);
    }

    // Support function of the simplex.
    let spec2 = line(2, 4.0, 16);
    let dual2 = DualGridSpec::new(2, 4.0, 16).unwrap();
    let simplex = DualGridFn::build(dual2, |a| {
        if (a[0] + a[1] - 1.0).abs() < 1e-12 {
            0.0
        } else {
            TOP
        }
    })
    .unwrap();
    let f2 = legendre_dual(&simplex, &spec2).unwrap();
    for i in 0..spec2.len() {
        let p = spec2.point(i);
        assert!((f2.values()[i] - p[0].max(p[1])).abs() < 1e-12);
    }

    let all_top = DualGridFn::build(dual, |_| TOP).unwrap();
    assert!(matches!(legendre_dual(&all_top, &spec), Err(Error::AllTop)));
}

#[test]
fn biconjugate_examples() {
    let spec = line(1, 2.0, 64);
    let f = GridFn::build(spec, |s| (s[0] + 0.5).min(0.0)).unwrap();
    let env = biconjugate(&f).unwrap();
    for (k, s) in spec.axis_coords().into_iter().enumerate() {
        assert!((env.values()[k] - 0.75 * s).abs() < 1e-12, "s={s}");
    }

    let spec = line(1, 8.0, 128);
    let a = GridFn::build(spec, |s| s[0].max(-1.0)).unwrap();
    let b = GridFn::build(spec, |s| s[0].max(-2.0) + 0.5).unwrap();
    let m = combine(&a, &b, Combine::Min).unwrap();
    let env = biconjugate(&m).unwrap();
    for k in 0..spec.len() {
        assert!(env.values()[k] <= a.values()[k] + 1e-12);
        assert!(env.values()[k] <= b.values()[k] + 1e-12);
    }
    let again = biconjugate(&env).unwrap();
    assert!(sup_distance(&again, &env).unwrap() <= env.eps_conv());
}

#[test]
fn combine_and_distance_examples() {
    let spec = line(1, 8.0, 128);
    let a = GridFn::build(spec, |s| s[0].max(-1.0)).unwrap();
    let b = GridFn::build(spec, |s| s[0].max(-2.0)).unwrap();

    let aff0 = combine(&a, &b, Combine::Affine(0.0)).unwrap();
    assert_eq!(aff0.values(), a.values());
    let mx = combine(&a, &b, Combine::Max).unwrap();
    assert_eq!(mx.values(), a.values());
    assert!(mx.is_convex());

    let c = GridFn::build(spec, |s| (s[0] + 1.0).min(0.0)).unwrap();
    let zero = GridFn::build(spec, |_| 0.0).unwrap();
    let c_shift = GridFn::build(spec, |s| s[0] + 1.0).unwrap();
    let direct = combine(&zero, &c_shift, Combine::Min).unwrap();
    assert_eq!(direct.values(), c.values());

    assert_eq!(sup_distance(&a, &a).unwrap(), 0.0);
    assert!((sup_distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    let s = GridFn::build(spec, |s| s[0]).unwrap();
    assert!((sup_distance(&zero, &s).unwrap() - 8.0).abs() < 1e-12);

    let other = GridFn::build(line(1, 8.0, 64), |_| 0.0).unwrap();
    assert!(matches!(sup_distance(&zero, &other), Err(Error::SpecMismatch(_))));
}
