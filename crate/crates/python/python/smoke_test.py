"""Smoke test for the pshgeo extension module.

Build and install the wheel first (see the README), then run
`python python/smoke_test.py`.
"""

import math

import pshgeo


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    spec = pshgeo.GridSpec(1, 8.0, 512)
    h = spec.spacing

    k0 = pshgeo.ConvexBody([[-1.0]])
    k1 = pshgeo.ConvexBody([[-2.0]])
    close(pshgeo.capacity(k0, spec), 1.0, 1e-9)
    close(pshgeo.capacity(k1, spec), 0.5, 1e-9)

    u0 = pshgeo.extremal_fn(k0, spec)
    u1 = pshgeo.extremal_fn(k1, spec)
    assert u0.is_convex and u0.is_monotone

    g = pshgeo.geodesic(u0, u1)
    for t in g.samples:
        want = pshgeo.GridFn.from_pieces(spec, [([1.0], 0.0), ([0.5], (t - 1) / 2), ([0.0], -1.0)])
        assert pshgeo.sup_distance(g.slice(t), want) <= g.eps_conv()
    for t, e in g.energy_profile():
        close(e, -1.0 + t / 2, 20 * h)
    close(g.contact_capacity(0.5), 1 / 1.5, 4.0 / 512)
    assert g.sandwich_violation() <= g.eps_conv()

    mid = pshgeo.interpolate_body(k0, k1, 0.5)
    close(mid.generators()[0][0], -1.5, 1e-12)
    vol, tol = k0.volume(spec)
    close(vol, math.pi * math.exp(-2.0), tol)

    log = pshgeo.GridFn.from_pieces(spec, [([1.0], 0.0)])
    zero = pshgeo.GridFn.from_pieces(spec, [([0.0], 0.0)])
    assert pshgeo.sup_distance(pshgeo.residual(log), log) <= log.eps_conv()
    assert pshgeo.sup_distance(pshgeo.rooftop(log, zero), log) <= log.eps_conv()
    assert pshgeo.connectivity(zero, u0)["verdict"] == "connectable"
    assert pshgeo.connectivity(zero, log)["verdict"] == "not-connectable"

    try:
        pshgeo.ConvexBody([[1.0]])
    except ValueError:
        pass
    else:
        raise AssertionError("positive generator accepted")

    print("smoke test passed")


if __name__ == "__main__":
    main()
