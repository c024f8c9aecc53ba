//! Heat equation benchmark: `u_t = alpha * Laplacian(u)` on the unit
//! square over `t in [0, 1]` with zero Dirichlet boundary.
//!
//! The initial condition is `a1 sin(pi s1) sin(pi s2) + a2 sin(2 pi s1)
//! sin(pi s2)`. A level with resolution `n` discretizes the interior on
//! an `n x n` grid with spacing `h = 1/(n+1)` (the boundary ring is
//! identically zero and not stored) and integrates with backward Euler
//! in `4n` steps, so time stepping refines together with the mesh and
//! stays unconditionally stable. Output is `u(t=1)` flattened row-major,
//! row index along `s2`.

use super::grid::{cg_solve, neg_laplacian_zero_dirichlet};
use std::f64::consts::PI;

const CG_REL_TOL: f64 = 1e-13;

pub(crate) fn initial_field(a1: f64, a2: f64, n: usize) -> Vec<f64> {
    let h = 1.0 / (n as f64 + 1.0);
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        let s2 = (i + 1) as f64 * h;
        for j in 0..n {
            let s1 = (j + 1) as f64 * h;
            u[i * n + j] = a1 * (PI * s1).sin() * (PI * s2).sin()
                + a2 * (2.0 * PI * s1).sin() * (PI * s2).sin();
        }
    }
    u
}

/// Solves to `t = 1` on the interior grid of the given resolution.
/// Parameter validity is the caller's contract; see `TaskSpec::scenario`.
pub(crate) fn solve(alpha: f64, a1: f64, a2: f64, n: usize) -> Vec<f64> {
    let h = 1.0 / (n as f64 + 1.0);
    let steps = 4 * n;
    let dt = 1.0 / steps as f64;
    let mut u = initial_field(a1, a2, n);
    if u.iter().all(|&x| x == 0.0) {
        return u;
    }
    let apply = |v: &[f64], out: &mut [f64]| {
        neg_laplacian_zero_dirichlet(n, h, v, out);
        for k in 0..v.len() {
            out[k] = v[k] + dt * alpha * out[k];
        }
    };
    for _ in 0..steps {
        let b = u.clone();
        u = cg_solve(&apply, &b, u, CG_REL_TOL, 20 * n * n);
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    fn discrete_eigenvalue(p: usize, q: usize, n: usize) -> f64 {
        let h = 1.0 / (n as f64 + 1.0);
        4.0 / (h * h)
            * ((p as f64 * PI * h / 2.0).sin().powi(2)
                + (q as f64 * PI * h / 2.0).sin().powi(2))
    }

    /// Oracle: each initial mode is an exact eigenvector of the discrete
    /// operator, so backward Euler must reproduce
    /// `u0 / (1 + dt*alpha*lambda)^steps` to solver tolerance.
    #[test]
    fn single_modes_decay_by_the_exact_backward_euler_factor() {
        let n = 16;
        let steps = 4 * n;
        let dt = 1.0 / steps as f64;
        for (alpha, a1, a2, p) in [(0.03, 1.0, 0.0, 1), (0.08, 0.0, -0.7, 2)] {
            let lambda = discrete_eigenvalue(p, 1, n);
            let factor = (1.0 + dt * alpha * lambda).powi(-(steps as i32));
            let got = solve(alpha, a1, a2, n);
            let want: Vec<f64> = initial_field(a1, a2, n)
                .into_iter()
                .map(|v| v * factor)
                .collect();
            for k in 0..n * n {
                assert!(
                    (got[k] - want[k]).abs() < 1e-9,
                    "mode {p}, node {k}: {} vs {}",
                    got[k],
                    want[k]
                );
            }
        }
    }

    /// The continuum solution for a pure first mode is
    /// `a1 exp(-2 alpha pi^2) sin(pi s1) sin(pi s2)` at t=1; the value
    /// near the center of a 64-grid must match within 2%.
    #[test]
    fn first_mode_matches_the_analytic_center_decay() {
        let n = 64;
        let alpha = 0.05;
        let got = solve(alpha, 1.0, 0.0, n);
        let h = 1.0 / (n as f64 + 1.0);
        let (i, j) = (n / 2 - 1, n / 2 - 1); // node nearest the center
        let (s1, s2) = ((j + 1) as f64 * h, (i + 1) as f64 * h);
        let want = (-2.0 * alpha * PI * PI).exp() * (PI * s1).sin() * (PI * s2).sin();
        let rel = (got[i * n + j] - want).abs() / want.abs();
        assert!(rel < 0.02, "relative error {rel}: {} vs {want}", got[i * n + j]);
    }

    #[test]
    fn zero_initial_condition_stays_zero() {
        for n in [16, 32] {
            assert!(solve(0.07, 0.0, 0.0, n).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn solution_is_linear_in_the_initial_amplitudes() {
        let n = 16;
        let alpha = 0.04;
        let (a1, a2) = (0.6, -0.9);
        let combined = solve(alpha, a1, a2, n);
        let m1 = solve(alpha, 1.0, 0.0, n);
        let m2 = solve(alpha, 0.0, 1.0, n);
        for k in 0..n * n {
            let lin = a1 * m1[k] + a2 * m2[k];
            assert!((combined[k] - lin).abs() < 1e-8, "node {k}");
        }
    }

    #[test]
    fn diffusion_strictly_damps_the_field() {
        let u0 = initial_field(1.0, 0.5, 16);
        let u1 = solve(0.02, 1.0, 0.5, 16);
        let n0: f64 = u0.iter().map(|v| v * v).sum::<f64>().sqrt();
        let n1: f64 = u1.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(n1 < n0);
        assert!(n1 > 0.0);
    }
}
