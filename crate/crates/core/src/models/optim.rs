//! Deterministic batch optimizers shared by the linear models.

use std::collections::VecDeque;

pub(crate) const TOLERANCE: f64 = 1e-6;
pub(crate) const MAX_ITERATIONS: usize = 1000;

#[derive(Debug, Clone, Copy)]
pub(crate) struct Outcome {
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Limited-memory BFGS with Armijo backtracking. `f` returns the objective
/// and writes the gradient into its second argument.
pub(crate) fn lbfgs(
    x: &mut [f64],
    mut f: impl FnMut(&[f64], &mut [f64]) -> f64,
    tolerance: f64,
    max_iterations: usize,
) -> Outcome {
    const MEMORY: usize = 10;
    let n = x.len();
    let mut g = vec![0.0; n];
    let mut fx = f(x, &mut g);
    let mut history: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(MEMORY);
    let mut direction = vec![0.0; n];
    let mut x_new = vec![0.0; n];
    let mut g_new = vec![0.0; n];

    for iteration in 0..max_iterations {
        if norm(&g) <= tolerance {
            return Outcome { iterations: iteration, converged: true };
        }

        // two-loop recursion
        direction.copy_from_slice(&g);
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * dot(s, &direction);
            for (d, yi) in direction.iter_mut().zip(y) {
                *d -= a * yi;
            }
            alphas.push(a);
        }
        let gamma = match history.back() {
            Some((s, y, _)) => dot(s, y) / dot(y, y),
            None => 1.0 / norm(&g).max(1.0),
        };
        for d in direction.iter_mut() {
            *d *= gamma;
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &direction);
            for (d, si) in direction.iter_mut().zip(s) {
                *d += (a - b) * si;
            }
        }
        for d in direction.iter_mut() {
            *d = -*d;
        }

        let mut slope = dot(&g, &direction);
        if slope >= 0.0 {
            // lost descent; restart from steepest descent
            history.clear();
            let scale = 1.0 / norm(&g).max(1.0);
            for (d, gi) in direction.iter_mut().zip(&g) {
                *d = -gi * scale;
            }
            slope = dot(&g, &direction);
        }

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            for i in 0..n {
                x_new[i] = x[i] + step * direction[i];
            }
            let f_new = f(&x_new, &mut g_new);
            if f_new.is_finite() && f_new <= fx + 1e-4 * step * slope {
                let s: Vec<f64> = x_new.iter().zip(x.iter()).map(|(a, b)| a - b).collect();
                let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > 1e-12 * norm(&s) * norm(&y) {
                    if history.len() == MEMORY {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
                x.copy_from_slice(&x_new);
                g.copy_from_slice(&g_new);
                let improvement = fx - f_new;
                fx = f_new;
                accepted = true;
                if improvement.abs() <= f64::EPSILON * fx.abs().max(1.0) && norm(&g) <= tolerance.sqrt() {
                    return Outcome { iterations: iteration + 1, converged: true };
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no decrease representable at this precision
            return Outcome { iterations: iteration, converged: norm(&g) <= tolerance.sqrt() };
        }
    }
    Outcome { iterations: max_iterations, converged: norm(&g) <= tolerance }
}

/// Accelerated proximal gradient (FISTA) for `smooth(x) + l1 * ||x[..n_penalized]||_1`.
/// Coordinates past `n_penalized` (the bias) are not shrunk.
pub(crate) fn fista(
    x: &mut [f64],
    mut smooth: impl FnMut(&[f64], &mut [f64]) -> f64,
    l1: f64,
    n_penalized: usize,
    tolerance: f64,
    max_iterations: usize,
) -> Outcome {
    let n = x.len();
    let prox = |v: &mut [f64], step: f64| {
        let t = step * l1;
        for vi in v[..n_penalized].iter_mut() {
            *vi = vi.signum() * (vi.abs() - t).max(0.0);
        }
    };
    let mut y = x.to_vec();
    let mut g = vec![0.0; n];
    let mut candidate = vec![0.0; n];
    let mut scratch = vec![0.0; n];
    let mut step = 1.0;
    let mut t: f64 = 1.0;

    for iteration in 0..max_iterations {
        let fy = smooth(&y, &mut g);
        loop {
            for i in 0..n {
                candidate[i] = y[i] - step * g[i];
            }
            prox(&mut candidate, step);
            let fc = smooth(&candidate, &mut scratch);
            let mut quad = fy;
            for i in 0..n {
                let d = candidate[i] - y[i];
                quad += g[i] * d + d * d / (2.0 * step);
            }
            if fc <= quad + 1e-12 * fy.abs().max(1.0) || step < 1e-20 {
                break;
            }
            step *= 0.5;
        }

        // gradient-mapping norm at y
        let mapping = candidate
            .iter()
            .zip(&y)
            .map(|(c, yi)| ((yi - c) / step).powi(2))
            .sum::<f64>()
            .sqrt();

        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let momentum = (t - 1.0) / t_next;
        for i in 0..n {
            let next = candidate[i];
            y[i] = next + momentum * (next - x[i]);
            x[i] = next;
        }
        t = t_next;
        if mapping <= tolerance {
            return Outcome { iterations: iteration + 1, converged: true };
        }
    }
    Outcome { iterations: max_iterations, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lbfgs_solves_a_quadratic() {
        let target = [3.0, -1.0, 0.5];
        let mut x = vec![0.0; 3];
        let out = lbfgs(
            &mut x,
            |x, g| {
                let mut f = 0.0;
                for i in 0..3 {
                    let d = x[i] - target[i];
                    f += (i as f64 + 1.0) * d * d;
                    g[i] = 2.0 * (i as f64 + 1.0) * d;
                }
                f
            },
            1e-10,
            100,
        );
        assert!(out.converged);
        for i in 0..3 {
            assert!((x[i] - target[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn fista_soft_thresholds() {
        // argmin 0.5 (x - 2)^2 + 0.5 (y - 0.3)^2 + |x| + |y| = (1, 0)
        let mut x = vec![0.0, 0.0];
        let out = fista(
            &mut x,
            |x, g| {
                g[0] = x[0] - 2.0;
                g[1] = x[1] - 0.3;
                0.5 * (x[0] - 2.0).powi(2) + 0.5 * (x[1] - 0.3).powi(2)
            },
            1.0,
            2,
            1e-10,
            1000,
        );
        assert!(out.converged);
        assert!((x[0] - 1.0).abs() < 1e-8);
        assert_eq!(x[1], 0.0);
    }
}
