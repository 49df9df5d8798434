//! Box-constrained Nelder–Mead.
//!
//! Candidate points are projected onto the box before evaluation, and the
//! reflection/expansion/contraction coefficients follow the
//! dimension-adaptive schedule of Gao and Han.

/// Settings of a single local search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMead {
    pub max_iters: usize,
    /// Stop when the spread of simplex values and the simplex diameter are
    /// both below this.
    pub tol: f64,
    /// Number of times the search restarts from its own best point with a
    /// fresh simplex after converging.
    pub polish_restarts: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            max_iters: 2000,
            tol: 1e-8,
            polish_restarts: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn unit(n: usize) -> Self {
        Self {
            lower: vec![0.0; n],
            upper: vec![1.0; n],
        }
    }

    pub fn uniform(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            lower: vec![lo; n],
            upper: vec![hi; n],
        }
    }

    pub fn concat(mut self, other: Bounds) -> Self {
        self.lower.extend(other.lower);
        self.upper.extend(other.upper);
        self
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    fn project(&self, x: &mut [f64]) {
        for ((v, &lo), &hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(lo, hi);
        }
    }
}

fn eval<F: FnMut(&[f64]) -> f64>(f: &mut F, x: &[f64]) -> f64 {
    let v = f(x);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Minimise `f` over `bounds` starting from `x0`; `step[i]` is the initial
/// simplex edge along coordinate `i`.
pub fn minimize<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: &[f64],
    bounds: &Bounds,
    cfg: &NelderMead,
) -> Minimum {
    let mut best = run(&mut f, x0, step, bounds, cfg);
    for _ in 0..cfg.polish_restarts {
        let shrunk: Vec<f64> = step.iter().map(|s| s * 0.1).collect();
        let next = run(&mut f, &best.x, &shrunk, bounds, cfg);
        let improved = best.value - next.value;
        let evaluations = best.evaluations + next.evaluations;
        if next.value < best.value {
            best = Minimum {
                evaluations,
                ..next
            };
        } else {
            best.evaluations = evaluations;
        }
        if improved <= cfg.tol {
            break;
        }
    }
    best
}

fn run<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x0: &[f64],
    step: &[f64],
    bounds: &Bounds,
    cfg: &NelderMead,
) -> Minimum {
    let n = x0.len();
    assert_eq!(step.len(), n);
    assert_eq!(bounds.dim(), n);
    let nf = n as f64;
    let (alpha, beta, gamma, delta) = if n >= 2 {
        (1.0, 1.0 + 2.0 / nf, 0.75 - 1.0 / (2.0 * nf), 1.0 - 1.0 / nf)
    } else {
        (1.0, 2.0, 0.5, 0.5)
    };

    let mut start = x0.to_vec();
    bounds.project(&mut start);
    let mut simplex = vec![start.clone()];
    for i in 0..n {
        let mut v = start.clone();
        // step away from the nearer wall so the vertex stays distinct
        let room_up = bounds.upper[i] - v[i];
        let room_down = v[i] - bounds.lower[i];
        v[i] += if room_up >= step[i] || room_up >= room_down {
            step[i].min(room_up)
        } else {
            -step[i].min(room_down)
        };
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(f, x)).collect();
    let mut evaluations = n + 1;
    let mut converged = false;

    let mut order: Vec<usize> = (0..=n).collect();
    for _ in 0..cfg.max_iters {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (ib, iw, isw) = (order[0], order[n], order[n.saturating_sub(1)]);

        let f_spread = values[iw] - values[ib];
        let diameter = simplex
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[ib])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if f_spread <= cfg.tol && diameter <= cfg.tol.sqrt() {
            converged = true;
            break;
        }

        let mut centroid = vec![0.0; n];
        for &k in &order[..n] {
            for (c, v) in centroid.iter_mut().zip(&simplex[k]) {
                *c += v / nf;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            let mut p: Vec<f64> = centroid
                .iter()
                .zip(&simplex[iw])
                .map(|(c, w)| c + t * (c - w))
                .collect();
            bounds.project(&mut p);
            p
        };

        let xr = along(alpha);
        let fr = eval(f, &xr);
        evaluations += 1;
        if fr < values[ib] {
            let xe = along(alpha * beta);
            let fe = eval(f, &xe);
            evaluations += 1;
            if fe < fr {
                simplex[iw] = xe;
                values[iw] = fe;
            } else {
                simplex[iw] = xr;
                values[iw] = fr;
            }
            continue;
        }
        if fr < values[isw] {
            simplex[iw] = xr;
            values[iw] = fr;
            continue;
        }
        let (xc, fc) = if fr < values[iw] {
            let x = along(alpha * gamma);
            let v = eval(f, &x);
            (x, v)
        } else {
            let x = along(-gamma);
            let v = eval(f, &x);
            (x, v)
        };
        evaluations += 1;
        if fc < values[iw].min(fr) {
            simplex[iw] = xc;
            values[iw] = fc;
            continue;
        }
        // shrink towards the best vertex
        let best = simplex[ib].clone();
        for k in 0..=n {
            if k == ib {
                continue;
            }
            for (v, b) in simplex[k].iter_mut().zip(&best) {
                *v = b + delta * (*v - b);
            }
            values[k] = eval(f, &simplex[k]);
            evaluations += 1;
        }
    }
    let ib = (0..=n)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    Minimum {
        x: simplex[ib].clone(),
        value: values[ib],
        evaluations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_in_a_box() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = minimize(
            f,
            &[-1.0, 1.5],
            &[0.2, 0.2],
            &Bounds::uniform(2, -2.0, 2.0),
            &NelderMead::default(),
        );
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn active_bound_is_respected() {
        let f = |x: &[f64]| x.iter().map(|v| (v + 1.0).powi(2)).sum::<f64>();
        let m = minimize(
            f,
            &[0.5; 4],
            &[0.1; 4],
            &Bounds::unit(4),
            &NelderMead::default(),
        );
        assert!(m.x.iter().all(|&v| v.abs() < 1e-6), "{:?}", m.x);
        assert!((m.value - 4.0).abs() < 1e-6);
    }

    #[test]
    fn nan_is_treated_as_infinite() {
        let f = |x: &[f64]| {
            if x[0] > 0.8 {
                f64::NAN
            } else {
                (x[0] - 0.3).powi(2)
            }
        };
        let m = minimize(f, &[0.7], &[0.2], &Bounds::unit(1), &NelderMead::default());
        assert!((m.x[0] - 0.3).abs() < 1e-4);
    }

    #[test]
    fn one_dimensional_quadratic() {
        let m = minimize(
            |x: &[f64]| (x[0] - 0.25).powi(2),
            &[0.9],
            &[0.1],
            &Bounds::unit(1),
            &NelderMead::default(),
        );
        assert!((m.x[0] - 0.25).abs() < 1e-4);
    }
}
