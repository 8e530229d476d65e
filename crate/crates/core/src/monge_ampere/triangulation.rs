//! Regular triangulation of a convex PL function on a planar grid.
//!
//! Starts from the fixed-diagonal triangulation and applies Lawson flips
//! until every interior edge is locally convex, so each triangle lies on one
//! affine piece of the lower convex hull.

pub(crate) struct Triangulation {
    pub triangles: Vec<[u32; 3]>,
    /// `edges[a]` lists `(b, t)`: triangle `t` has the directed edge `a -> b`
    /// on its counterclockwise boundary.
    pub edges: Vec<Vec<(u32, usize)>>,
    /// Edges left non-convex because their quadrilateral was not convex.
    pub stuck: usize,
}

fn orient(p: [i64; 2], q: [i64; 2], r: [i64; 2]) -> i64 {
    (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
}

impl Triangulation {
    /// `m` points per axis, index `i * m + j` at lattice position `(i, j)`.
    pub fn build(m: usize, z: &[f64]) -> Self {
        let pos = |v: u32| -> [i64; 2] { [(v as usize / m) as i64, (v as usize % m) as i64] };
        let id = |i: usize, j: usize| (i * m + j) as u32;
        let mut triangles = Vec::with_capacity(2 * (m - 1) * (m - 1));
        for i in 0..m - 1 {
            for j in 0..m - 1 {
                triangles.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                triangles.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mut tr = Triangulation { triangles, edges: vec![Vec::with_capacity(6); m * m], stuck: 0 };
        for t in 0..tr.triangles.len() {
            let tri = tr.triangles[t];
            for k in 0..3 {
                tr.insert(tri[k], tri[(k + 1) % 3], t);
            }
        }

        let mut stack: Vec<(u32, u32)> = Vec::new();
        for tri in &tr.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                if a < b && tr.get(b, a).is_some() {
                    stack.push((a, b));
                }
            }
        }
        stack.reverse();
        let budget = 64 * tr.triangles.len().max(1);
        let mut flips = 0usize;
        while let Some((a, b)) = stack.pop() {
            let (Some(t1), Some(t2)) = (tr.get(a, b), tr.get(b, a)) else {
                continue;
            };
            let c = third(&tr.triangles[t1], a, b);
            let d = third(&tr.triangles[t2], b, a);
            let (pa, pb, pc, pd) = (pos(a), pos(b), pos(c), pos(d));
            if below_plane(pa, pb, pc, pd, [z[a as usize], z[b as usize], z[c as usize], z[d as usize]])
            {
                if orient(pd, pb, pc) <= 0 || orient(pc, pa, pd) <= 0 {
                    tr.stuck += 1;
                    continue;
                }
                if flips >= budget {
                    log::warn!("flip budget exhausted; triangulation may be irregular");
                    break;
                }
                flips += 1;
                for k in 0..3 {
                    let old1 = tr.triangles[t1];
                    let old2 = tr.triangles[t2];
                    tr.remove(old1[k], old1[(k + 1) % 3]);
                    tr.remove(old2[k], old2[(k + 1) % 3]);
                }
                tr.triangles[t1] = [c, a, d];
                tr.triangles[t2] = [d, b, c];
                for (t, tri) in [(t1, [c, a, d]), (t2, [d, b, c])] {
                    for k in 0..3 {
                        tr.insert(tri[k], tri[(k + 1) % 3], t);
                    }
                }
                for (p, q) in [(a, d), (d, b), (b, c), (c, a)] {
                    stack.push((p.min(q), p.max(q)));
                }
            }
        }
        tr
    }

    pub fn get(&self, a: u32, b: u32) -> Option<usize> {
        self.edges[a as usize].iter().find(|e| e.0 == b).map(|e| e.1)
    }

    fn insert(&mut self, a: u32, b: u32, t: usize) {
        let list = &mut self.edges[a as usize];
        match list.iter_mut().find(|e| e.0 == b) {
            Some(e) => e.1 = t,
            None => list.push((b, t)),
        }
    }

    fn remove(&mut self, a: u32, b: u32) {
        let list = &mut self.edges[a as usize];
        if let Some(k) = list.iter().position(|e| e.0 == b) {
            list.swap_remove(k);
        }
    }

    /// Gradient of the affine interpolant on triangle `t`, in lattice units.
    pub fn gradient(&self, t: usize, m: usize, z: &[f64]) -> [f64; 2] {
        let [a, b, c] = self.triangles[t];
        let pos = |v: u32| -> [f64; 2] { [(v as usize / m) as f64, (v as usize % m) as f64] };
        let (pa, pb, pc) = (pos(a), pos(b), pos(c));
        let (u, v) = ([pb[0] - pa[0], pb[1] - pa[1]], [pc[0] - pa[0], pc[1] - pa[1]]);
        let (du, dv) = (z[b as usize] - z[a as usize], z[c as usize] - z[a as usize]);
        let det = u[0] * v[1] - u[1] * v[0];
        [(du * v[1] - dv * u[1]) / det, (u[0] * dv - v[0] * du) / det]
    }
}

fn third(tri: &[u32; 3], a: u32, b: u32) -> u32 {
    *tri.iter().find(|&&v| v != a && v != b).expect("degenerate triangle")
}

/// Whether `d` lies strictly below the plane through the lifted `a, b, c`.
fn below_plane(pa: [i64; 2], pb: [i64; 2], pc: [i64; 2], pd: [i64; 2], z: [f64; 4]) -> bool {
    let m3 = orient(pa, pb, pc) as f64;
    let (xb, yb) = ((pb[0] - pa[0]) as f64, (pb[1] - pa[1]) as f64);
    let (xc, yc) = ((pc[0] - pa[0]) as f64, (pc[1] - pa[1]) as f64);
    let (xd, yd) = ((pd[0] - pa[0]) as f64, (pd[1] - pa[1]) as f64);
    let (zb, zc, zd) = (z[1] - z[0], z[2] - z[0], z[3] - z[0]);
    let m1 = xc * yd - yc * xd;
    let m2 = xb * yd - yb * xd;
    let det = zb * m1 - zc * m2 + zd * m3;
    let deficit = det / m3;
    let scale = 1.0 + z.iter().map(|v| v.abs()).fold(0.0, f64::max);
    deficit < -1e-11 * scale
}
