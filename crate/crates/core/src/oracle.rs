//! Independent check of λ: exhaustive grid over hyperspherical coordinates of
//! every local pure state, followed by Nelder–Mead polishing of the best grid
//! cells. Works from the member vectors directly, with no projector and no
//! eigensolver, so it shares no code path with the see-saw.

use std::collections::BinaryHeap;

use ordered_float::OrderedFloat;
use serde::Serialize;

use crate::upb::UpbSet;

/// Grid-search settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOracleConfig {
    /// Upper bound on the number of joint grid points.
    pub target_points: usize,
    /// Number of best grid points that get polished.
    pub refine_top: usize,
}

impl Default for GridOracleConfig {
    fn default() -> Self {
        Self { target_points: 2_000_000, refine_top: 24 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridOracleResult {
    /// Best value after polishing.
    pub value: f64,
    /// Best raw grid value before polishing.
    pub grid_value: f64,
    pub points_per_axis: usize,
    pub grid_points: usize,
    /// Polished local parameters (angles, then phases, per party).
    pub params: Vec<f64>,
}

/// Unit vector in C^d from d−1 polar angles and d−1 relative phases.
/// Magnitudes are (cos θ₁, sin θ₁ cos θ₂, …, sin θ₁⋯sin θ_{d−1}); the first
/// component is real.
fn local_state(d: usize, params: &[f64]) -> Vec<(f64, f64)> {
    let (angles, phases) = params.split_at(d - 1);
    let mut out = Vec::with_capacity(d);
    let mut running = 1.0;
    for k in 0..d {
        let magnitude = if k < d - 1 { running * angles[k].cos() } else { running };
        if k < d - 1 {
            running *= angles[k].sin();
        }
        let phase = if k == 0 { 0.0 } else { phases[k - 1] };
        out.push((magnitude * phase.cos(), magnitude * phase.sin()));
    }
    out
}

/// |⟨a|b⟩|² for plain (re, im) vectors.
fn overlap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let (mut re, mut im) = (0.0, 0.0);
    for (&(ar, ai), &(br, bi)) in a.iter().zip(b) {
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    re * re + im * im
}

struct Problem {
    dims: Vec<usize>,
    /// members[i][k] = local vector of member i on party k.
    members: Vec<Vec<Vec<(f64, f64)>>>,
}

impl Problem {
    fn from_upb(upb: &UpbSet<f64>) -> Self {
        Self {
            dims: upb.structure().local_dims().to_vec(),
            members: upb
                .members()
                .iter()
                .map(|m| m.locals().iter().map(|v| v.iter().map(|z| (z.re, z.im)).collect()).collect())
                .collect(),
        }
    }

    fn param_count(&self) -> usize {
        self.dims.iter().map(|d| 2 * (d - 1)).sum()
    }

    fn states(&self, params: &[f64]) -> Vec<Vec<(f64, f64)>> {
        let mut offset = 0;
        self.dims
            .iter()
            .map(|&d| {
                let s = local_state(d, &params[offset..offset + 2 * (d - 1)]);
                offset += 2 * (d - 1);
                s
            })
            .collect()
    }

    /// Σ_i Π_k |⟨φ_k|v_i^k⟩|².
    fn objective(&self, params: &[f64]) -> f64 {
        let states = self.states(params);
        self.members.iter().map(|m| m.iter().zip(&states).map(|(v, s)| overlap(s, v)).product::<f64>()).sum()
    }
}

/// Grid over one party's parameters: angles in [0, π/2], phases in [0, 2π).
fn local_grid(d: usize, m: usize) -> Vec<Vec<f64>> {
    let axes = 2 * (d - 1);
    let total = m.pow(axes as u32);
    (0..total)
        .map(|mut idx| {
            (0..axes)
                .map(|a| {
                    let k = idx % m;
                    idx /= m;
                    if a < d - 1 {
                        std::f64::consts::FRAC_PI_2 * k as f64 / (m - 1) as f64
                    } else {
                        2.0 * std::f64::consts::PI * k as f64 / m as f64
                    }
                })
                .collect()
        })
        .collect()
}

/// Grid-plus-polish estimate of λ.
pub fn grid_lambda(upb: &UpbSet<f64>, cfg: &GridOracleConfig) -> GridOracleResult {
    let problem = Problem::from_upb(upb);
    let params = problem.param_count();
    let mut m = 2usize;
    while (m + 1).pow(params as u32) <= cfg.target_points {
        m += 1;
    }

    let grids: Vec<Vec<Vec<f64>>> = problem.dims.iter().map(|&d| local_grid(d, m)).collect();
    // table[k][g][i] = overlap of grid state g on party k with member i.
    let tables: Vec<Vec<Vec<f64>>> = grids
        .iter()
        .enumerate()
        .map(|(k, grid)| {
            grid.iter()
                .map(|p| {
                    let s = local_state(problem.dims[k], p);
                    problem.members.iter().map(|mem| overlap(&s, &mem[k])).collect()
                })
                .collect()
        })
        .collect();

    let parties = problem.dims.len();
    let n = problem.members.len();
    let mut heap: BinaryHeap<(OrderedFloat<f64>, Vec<usize>)> = BinaryHeap::new();
    let mut odometer = vec![0usize; parties];
    let mut partial = vec![1.0f64; n];
    let mut grid_points = 0usize;
    'outer: loop {
        partial.iter_mut().for_each(|x| *x = 1.0);
        for (k, &g) in odometer.iter().enumerate() {
            for (x, t) in partial.iter_mut().zip(&tables[k][g]) {
                *x *= t;
            }
        }
        let value: f64 = partial.iter().sum();
        grid_points += 1;
        if heap.len() < cfg.refine_top {
            heap.push((OrderedFloat(value), odometer.clone()));
        } else if value < heap.peek().expect("non-empty").0 .0 {
            heap.pop();
            heap.push((OrderedFloat(value), odometer.clone()));
        }
        for k in (0..parties).rev() {
            odometer[k] += 1;
            if odometer[k] < grids[k].len() {
                continue 'outer;
            }
            odometer[k] = 0;
        }
        break;
    }

    let mut seeds = heap.into_sorted_vec();
    let grid_value = seeds.first().map(|s| s.0 .0).unwrap_or(f64::INFINITY);
    let mut best = (f64::INFINITY, Vec::new());
    for (_, cell) in seeds.drain(..) {
        let start: Vec<f64> = cell.iter().enumerate().flat_map(|(k, &g)| grids[k][g].clone()).collect();
        let (x, fx) = polish(&|p: &[f64]| problem.objective(p), start);
        if fx < best.0 {
            best = (fx, x);
        }
    }

    GridOracleResult { value: best.0, grid_value, points_per_axis: m, grid_points, params: best.1 }
}

/// Nelder–Mead with restarts around the incumbent until a restart stops improving.
fn polish(f: &dyn Fn(&[f64]) -> f64, start: Vec<f64>) -> (Vec<f64>, f64) {
    let mut x = start;
    let mut fx = f(&x);
    let mut step = 0.1;
    for _ in 0..30 {
        let (nx, nfx) = nelder_mead(f, &x, step, 20_000);
        let improved = fx - nfx;
        if nfx < fx {
            x = nx;
            fx = nfx;
        }
        if improved < 1e-15 {
            break;
        }
        step = (step * 0.5).max(1e-4);
    }
    (x, fx)
}

fn nelder_mead(f: &dyn Fn(&[f64]) -> f64, start: &[f64], step: f64, max_evals: usize) -> (Vec<f64>, f64) {
    let n = start.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((start.to_vec(), f(start)));
    for i in 0..n {
        let mut p = start.to_vec();
        p[i] += step;
        let fp = f(&p);
        simplex.push((p, fp));
    }
    let mut evals = n + 1;
    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let spread = simplex[n].1 - simplex[0].1;
        let size = simplex[1..]
            .iter()
            .map(|(p, _)| p.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if spread < 1e-16 && size < 1e-9 {
            break;
        }
        let centroid: Vec<f64> =
            (0..n).map(|j| simplex[..n].iter().map(|(p, _)| p[j]).sum::<f64>() / n as f64).collect();
        let along = |t: f64| -> Vec<f64> { centroid.iter().zip(&simplex[n].0).map(|(c, w)| c + t * (c - w)).collect() };
        let reflected = along(1.0);
        let fr = f(&reflected);
        evals += 1;
        if fr < simplex[0].1 {
            let expanded = along(2.0);
            let fe = f(&expanded);
            evals += 1;
            simplex[n] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (reflected, fr);
        } else {
            let contracted = if fr < simplex[n].1 { along(0.5) } else { along(-0.5) };
            let fc = f(&contracted);
            evals += 1;
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
            } else {
                let best = simplex[0].0.clone();
                for (p, fp) in simplex[1..].iter_mut() {
                    for (x, b) in p.iter_mut().zip(&best) {
                        *x = b + 0.5 * (*x - b);
                    }
                    *fp = f(p);
                    evals += 1;
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    simplex.swap_remove(0)
}
