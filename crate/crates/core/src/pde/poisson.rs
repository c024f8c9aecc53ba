//! Poisson benchmark: `-Laplacian(u) = f` on the unit square with
//! constant Dirichlet values on each of the four edges.
//!
//! A level with resolution `n` uses the full `n x n` grid including the
//! boundary ring, spacing `h = 1/(n-1)`, flattened row-major with the
//! row index along `s2`. Edge values are ordered `(bottom, right, top,
//! left)` walking counterclockwise from `s2 = 0`; corners take the mean
//! of their two edges (corners never enter the interior stencil, only
//! the output field). The source is the centered Gaussian bump
//! `f(s1,s2) = s * exp(-25 [(s1-1/2)^2 + (s2-1/2)^2])`.

use super::grid::{cg_solve, neg_laplacian_zero_dirichlet};

const CG_REL_TOL: f64 = 1e-13;

/// Solves `-Laplacian(u) = source` with arbitrary Dirichlet data given
/// as a full-grid template (only its border is read).
pub(crate) fn solve_dirichlet(
    n: usize,
    boundary: impl Fn(f64, f64) -> f64,
    source: impl Fn(f64, f64) -> f64,
) -> Vec<f64> {
    assert!(n >= 3, "full grid needs at least one interior node");
    let h = 1.0 / (n as f64 - 1.0);
    let coord = |idx: usize| idx as f64 * h;

    let mut u = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == 0 || j == 0 || i == n - 1 || j == n - 1 {
                u[i * n + j] = boundary(coord(j), coord(i));
            }
        }
    }

    // Interior system on the (n-2)^2 unknowns; boundary neighbors move
    // to the right-hand side.
    let m = n - 2;
    let inv_h2 = 1.0 / (h * h);
    let mut b = vec![0.0; m * m];
    for ii in 0..m {
        for jj in 0..m {
            let (i, j) = (ii + 1, jj + 1);
            let mut rhs = source(coord(j), coord(i));
            if i == 1 {
                rhs += u[(i - 1) * n + j] * inv_h2;
            }
            if i == n - 2 {
                rhs += u[(i + 1) * n + j] * inv_h2;
            }
            if j == 1 {
                rhs += u[i * n + j - 1] * inv_h2;
            }
            if j == n - 2 {
                rhs += u[i * n + j + 1] * inv_h2;
            }
            b[ii * m + jj] = rhs;
        }
    }

    // Constant initial guess at the boundary average; for constant
    // harmonic data the residual is already below tolerance.
    let border_sum: f64 = (0..n * n)
        .filter(|k| {
            let (i, j) = (k / n, k % n);
            i == 0 || j == 0 || i == n - 1 || j == n - 1
        })
        .map(|k| u[k])
        .sum();
    let guess = border_sum / (4 * (n - 1)) as f64;

    let apply = |v: &[f64], out: &mut [f64]| neg_laplacian_zero_dirichlet(m, h, v, out);
    let interior = cg_solve(apply, &b, vec![guess; m * m], CG_REL_TOL, 20 * m * m);

    for ii in 0..m {
        for jj in 0..m {
            u[(ii + 1) * n + (jj + 1)] = interior[ii * m + jj];
        }
    }
    u
}

/// Solves the benchmark instance `x = (b1, b2, b3, b4, s)` at
/// resolution `n`. Parameter validity is the caller's contract.
pub(crate) fn solve(b: [f64; 4], s: f64, n: usize) -> Vec<f64> {
    let [bottom, right, top, left] = b;
    let boundary = move |s1: f64, s2: f64| {
        let mut vals = Vec::with_capacity(2);
        if s2 == 0.0 {
            vals.push(bottom);
        }
        if s2 == 1.0 {
            vals.push(top);
        }
        if s1 == 0.0 {
            vals.push(left);
        }
        if s1 == 1.0 {
            vals.push(right);
        }
        debug_assert!(!vals.is_empty());
        vals.iter().sum::<f64>() / vals.len() as f64
    };
    let source = move |s1: f64, s2: f64| {
        s * (-25.0 * ((s1 - 0.5).powi(2) + (s2 - 0.5).powi(2))).exp()
    };
    solve_dirichlet(n, boundary, source)
}
