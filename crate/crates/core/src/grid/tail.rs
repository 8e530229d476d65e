use std::sync::OnceLock;

/// Recession function `Psi(d) = lim f(lambda d) / lambda` of a grid function,
/// sampled on a fixed set of directions `d` in the negative unit simplex.
///
/// A slope `a >= 0` has a finite conjugate on the whole orthant exactly when
/// `<a, d> <= Psi(d)` for every direction, so the tail fixes the finite
/// region of the conjugate independently of the truncation radius.
#[derive(Debug, Clone, PartialEq)]
pub struct Tail {
    n: usize,
    values: Vec<f64>,
}

const ADMIT_TOL: f64 = 1e-9;

/// Direction lattice resolution on the simplex for n = 2 and n = 3.
const SIMPLEX_STEPS: [usize; 4] = [0, 1, 64, 16];

fn simplex_directions(n: usize) -> Vec<Vec<f64>> {
    let steps = SIMPLEX_STEPS[n];
    let mut out = Vec::new();
    match n {
        1 => out.push(vec![-1.0]),
        2 => {
            for j in 0..=steps {
                let x = j as f64 / steps as f64;
                out.push(vec![-x, -(1.0 - x)]);
            }
        }
        3 => {
            for i in 0..=steps {
                for j in 0..=(steps - i) {
                    let k = steps - i - j;
                    let s = steps as f64;
                    out.push(vec![-(i as f64) / s, -(j as f64) / s, -(k as f64) / s]);
                }
            }
        }
        _ => unreachable!("dimension checked by GridSpec"),
    }
    out
}

impl Tail {
    pub fn directions(n: usize) -> &'static [Vec<f64>] {
        static DIRS: [OnceLock<Vec<Vec<f64>>>; 4] =
            [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
        DIRS[n].get_or_init(|| simplex_directions(n))
    }

    /// Tail of a function bounded below on the orthant.
    pub fn bounded(n: usize) -> Self {
        Self { n, values: vec![0.0; Self::directions(n).len()] }
    }

    pub fn from_fn(n: usize, psi: impl Fn(&[f64]) -> f64) -> Self {
        let values = Self::directions(n).iter().map(|d| psi(d)).collect();
        Self { n, values }
    }

    /// Tail of `max_a <a, s> - c_a` over finitely many slopes.
    pub fn from_slopes<'a>(n: usize, slopes: impl IntoIterator<Item = &'a [f64]> + Clone) -> Self {
        Self::from_fn(n, |d| {
            slopes
                .clone()
                .into_iter()
                .map(|a| a.iter().zip(d).map(|(x, y)| x * y).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value of the 1-homogeneous extension at an arbitrary `d <= 0`,
    /// interpolated from the sampled directions (exact for n = 1).
    pub fn eval(&self, d: &[f64]) -> f64 {
        let l1: f64 = d.iter().map(|x| -x).sum();
        if l1 <= 0.0 {
            return 0.0;
        }
        match self.n {
            1 => l1 * self.values[0],
            2 => {
                let steps = SIMPLEX_STEPS[2] as f64;
                let x = (-d[0] / l1) * steps;
                let j = (x.floor() as usize).min(SIMPLEX_STEPS[2] - 1);
                let w = x - j as f64;
                l1 * ((1.0 - w) * self.values[j] + w * self.values[j + 1])
            }
            _ => {
                // nearest sampled direction
                let dirs = Self::directions(self.n);
                let unit: Vec<f64> = d.iter().map(|x| x / l1).collect();
                let (j, _) = dirs
                    .iter()
                    .enumerate()
                    .map(|(j, e)| (j, e.iter().zip(&unit).map(|(a, b)| (a - b).powi(2)).sum::<f64>()))
                    .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
                l1 * self.values[j]
            }
        }
    }

    /// Whether slope `a` has a finite conjugate on the orthant.
    pub fn admits(&self, a: &[f64]) -> bool {
        Self::directions(self.n).iter().zip(&self.values).all(|(d, &psi)| {
            let ad: f64 = a.iter().zip(d).map(|(x, y)| x * y).sum();
            ad <= psi + ADMIT_TOL
        })
    }

    pub fn min(&self, other: &Tail) -> Tail {
        self.zip(other, f64::min)
    }

    pub fn max(&self, other: &Tail) -> Tail {
        self.zip(other, f64::max)
    }

    pub fn affine(&self, other: &Tail, t: f64) -> Tail {
        self.zip(other, |x, y| (1.0 - t) * x + t * y)
    }

    pub fn scale(&self, c: f64) -> Tail {
        Tail { n: self.n, values: self.values.iter().map(|v| c * v).collect() }
    }

    /// Sup distance between two tails on the sampled directions.
    pub fn distance(&self, other: &Tail) -> f64 {
        self.values.iter().zip(&other.values).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn zip(&self, other: &Tail, op: impl Fn(f64, f64) -> f64) -> Tail {
        assert_eq!(self.n, other.n, "tail dimensions differ");
        let values = self.values.iter().zip(&other.values).map(|(&x, &y)| op(x, y)).collect();
        Tail { n: self.n, values }
    }
}
