//! Maximizing `‖(1/N) Σ λ^n u_n‖²` over the unit circle.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{cis_turns, frac_product, Complex, ZERO};
use crate::sequences::{SampledSequence, VectorSequence};

/// Coarse candidates refined by golden-section search.
pub const REFINE_TOP: usize = 8;

/// Width (in turns) below which refinement stops.
pub const REFINE_WIDTH: f64 = 1e-6;

/// Torus grid size used for truncation `n_max`: `max(64, 8·n_max)`.
pub fn grid_points(n_max: u64) -> usize {
    (8 * n_max as usize).max(64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub points: usize,
    pub refine: bool,
}

impl GridSpec {
    pub fn for_length(n: u64) -> Self {
        GridSpec {
            points: grid_points(n),
            refine: true,
        }
    }
}

/// Best value found and its phase `λ = exp(2πi·turns)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusPoint {
    pub value: f64,
    pub turns: f64,
}

impl TorusPoint {
    pub fn lambda(&self) -> Complex {
        cis_turns(self.turns)
    }
}

/// `sup_λ ‖(1/N) Σ_{n ≤ N} λ^n u_n‖²` for a single `N`.
pub fn wiener_wintner_sup(u: &VectorSequence, n: u64, grid: GridSpec) -> Result<TorusPoint> {
    if n == 0 {
        return Err(Error::InvalidWindow("N must be positive".into()));
    }
    if grid.points < grid_points(n) {
        return Err(Error::InvalidWindow(format!(
            "torus grid needs at least {} points for N = {n}, got {}",
            grid_points(n),
            grid.points
        )));
    }
    let s = u.sample(n);
    Ok(sweep(&s, &[n], grid)[0])
}

/// The supremum at every `N` of an increasing window grid.
pub(crate) fn window_sweep(s: &SampledSequence, grid: &[u64]) -> Vec<TorusPoint> {
    let n_max = *grid.last().expect("nonempty grid");
    sweep(s, grid, GridSpec::for_length(n_max))
}

fn twisted_norm_sq(s: &SampledSequence, n: u64, turns: f64) -> f64 {
    let d = s.dim();
    let mut acc = vec![ZERO; d];
    for k in 1..=n {
        let z = cis_turns(frac_product(turns, k as f64));
        for (a, &v) in acc.iter_mut().zip(s.at(k)) {
            *a += z * v;
        }
    }
    acc.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n) as f64
}

fn golden_section(s: &SampledSequence, n: u64, lo: f64, hi: f64) -> TorusPoint {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| twisted_norm_sq(s, n, t);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > REFINE_WIDTH {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(a, f(a)), (c, fc), (d, fd), (b, f(b))];
    let (turns, value) =
        candidates.into_iter().fold(
            (a, f64::NEG_INFINITY),
            |best, x| if x.1 > best.1 { x } else { best },
        );
    TorusPoint {
        value,
        turns: turns.rem_euclid(1.0),
    }
}

fn sweep(s: &SampledSequence, grid: &[u64], spec: GridSpec) -> Vec<TorusPoint> {
    let g_points = spec.points;
    let n_max = *grid.last().expect("nonempty grid");
    let d = s.dim();
    let roots: Vec<Complex> = (0..g_points)
        .map(|k| cis_turns(k as f64 / g_points as f64))
        .collect();

    let empty = || {
        (
            vec![f64::NEG_INFINITY; grid.len()],
            vec![0usize; grid.len()],
        )
    };
    let (best, arg) = (0..g_points)
        .into_par_iter()
        .fold(empty, |(mut best, mut arg), g| {
            let mut acc = vec![ZERO; d];
            let mut idx = 0usize;
            let mut pos = 0usize;
            for n in 1..=n_max {
                idx = (idx + g) % g_points;
                let z = roots[idx];
                for (a, &v) in acc.iter_mut().zip(s.at(n)) {
                    *a += z * v;
                }
                if grid[pos] == n {
                    let value = acc.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n) as f64;
                    if value > best[pos] || (value == best[pos] && g < arg[pos]) {
                        best[pos] = value;
                        arg[pos] = g;
                    }
                    pos += 1;
                    if pos == grid.len() {
                        break;
                    }
                }
            }
            (best, arg)
        })
        .reduce(empty, |(mut b1, mut a1), (b2, a2)| {
            for k in 0..b1.len() {
                if b2[k] > b1[k] || (b2[k] == b1[k] && a2[k] < a1[k]) {
                    b1[k] = b2[k];
                    a1[k] = a2[k];
                }
            }
            (b1, a1)
        });

    let mut out: Vec<TorusPoint> = best
        .iter()
        .zip(&arg)
        .map(|(&value, &g)| TorusPoint {
            value,
            turns: g as f64 / g_points as f64,
        })
        .collect();
    if spec.refine {
        let mut order: Vec<usize> = (0..out.len()).collect();
        order.sort_by(|&a, &b| out[b].value.total_cmp(&out[a].value).then(a.cmp(&b)));
        let step = 1.0 / g_points as f64;
        let refined: Vec<(usize, TorusPoint)> = order
            .into_iter()
            .take(REFINE_TOP)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|k| {
                let t = out[k].turns;
                (k, golden_section(s, grid[k], t - step, t + step))
            })
            .collect();
        for (k, p) in refined {
            if p.value > out[k].value {
                out[k] = p;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;
    use crate::sequences::IidDistribution;
    use nalgebra::DVector;

    #[test]
    fn finds_planted_frequency() {
        let theta = 0.3;
        let u = VectorSequence::geometric_turns(-theta, DVector::from_vec(vec![c(1.0, 0.0)]));
        let p = wiener_wintner_sup(&u, 200, GridSpec::for_length(200)).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9);
        assert!((p.turns - theta).abs() < 1e-6);
    }

    #[test]
    fn off_grid_frequency_is_refined() {
        let theta = 0.123_456_789;
        let u = VectorSequence::geometric_turns(-theta, DVector::from_vec(vec![c(1.0, 0.0)]));
        let coarse = wiener_wintner_sup(
            &u,
            50,
            GridSpec {
                points: 400,
                refine: false,
            },
        )
        .unwrap();
        let fine = wiener_wintner_sup(&u, 50, GridSpec::for_length(50)).unwrap();
        assert!(fine.value >= coarse.value);
        assert!(fine.value > 1.0 - 1e-9);
    }

    #[test]
    fn brute_force_oracle_on_small_grid() {
        let u = VectorSequence::iid_random(5, IidDistribution::UnitCircle, 2);
        let n = 20;
        let points = grid_points(n);
        let coarse = wiener_wintner_sup(
            &u,
            n,
            GridSpec {
                points,
                refine: false,
            },
        )
        .unwrap();
        let brute = (0..points)
            .map(|g| {
                let lam = cis_turns(g as f64 / points as f64);
                let mut acc = DVector::from_vec(vec![c(0.0, 0.0); 2]);
                let mut z = c(1.0, 0.0);
                for k in 1..=n {
                    z *= lam;
                    acc += u.get(k) * z;
                }
                acc.norm_squared() / (n * n) as f64
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((coarse.value - brute).abs() < 1e-12);
    }

    #[test]
    fn rejects_coarse_grids() {
        let u = VectorSequence::weyl(0.5f64.sqrt(), 1);
        assert!(wiener_wintner_sup(
            &u,
            100,
            GridSpec {
                points: 100,
                refine: true
            }
        )
        .is_err());
    }
}
