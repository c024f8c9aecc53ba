//! Shared finite-difference machinery: the 5-point Laplacian, a
//! matrix-free conjugate-gradient solver, and grid prolongation.

/// `out = (-Laplacian) u` on an `n x n` grid of interior nodes with
/// spacing `h` and zero Dirichlet boundary, row-major.
pub(crate) fn neg_laplacian_zero_dirichlet(n: usize, h: f64, u: &[f64], out: &mut [f64]) {
    debug_assert_eq!(u.len(), n * n);
    debug_assert_eq!(out.len(), n * n);
    let inv_h2 = 1.0 / (h * h);
    for i in 0..n {
        for j in 0..n {
            let c = u[i * n + j];
            let up = if i > 0 { u[(i - 1) * n + j] } else { 0.0 };
            let down = if i + 1 < n { u[(i + 1) * n + j] } else { 0.0 };
            let left = if j > 0 { u[i * n + j - 1] } else { 0.0 };
            let right = if j + 1 < n { u[i * n + j + 1] } else { 0.0 };
            out[i * n + j] = (4.0 * c - up - down - left - right) * inv_h2;
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients for a symmetric positive definite operator.
///
/// Iterates from `x0` until the residual drops below `rel_tol * ||b||`
/// or `max_iter` steps, whichever is first. Deterministic: the result is
/// a pure function of the arguments.
pub(crate) fn cg_solve(
    apply: impl Fn(&[f64], &mut [f64]),
    b: &[f64],
    x0: Vec<f64>,
    rel_tol: f64,
    max_iter: usize,
) -> Vec<f64> {
    let m = b.len();
    debug_assert_eq!(x0.len(), m);
    let b_norm2 = dot(b, b);
    if b_norm2 == 0.0 {
        return vec![0.0; m];
    }
    let threshold2 = rel_tol * rel_tol * b_norm2;

    let mut x = x0;
    let mut ax = vec![0.0; m];
    apply(&x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut rr = dot(&r, &r);
    if rr <= threshold2 {
        return x;
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; m];
    for _ in 0..max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            break; // loss of positive definiteness in floating point
        }
        let alpha = rr / pap;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_next = dot(&r, &r);
        if rr_next <= threshold2 {
            break;
        }
        let beta = rr_next / rr;
        for i in 0..m {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    x
}

/// Bilinear prolongation between interior grids that share a zero
/// Dirichlet boundary: `coarse` is `nc x nc` with nodes at
/// `(i+1)/(nc+1)`, the result is `nf x nf` with nodes at `(i+1)/(nf+1)`.
pub fn bilinear_upsample_interior(coarse: &[f64], nc: usize, nf: usize) -> Vec<f64> {
    assert_eq!(coarse.len(), nc * nc, "coarse field length");
    // Padded index space: node p sits at p/(nc+1), p = 0..=nc+1, with
    // zeros on the border.
    let value = |pi: usize, pj: usize| -> f64 {
        if pi == 0 || pj == 0 || pi == nc + 1 || pj == nc + 1 {
            0.0
        } else {
            coarse[(pi - 1) * nc + (pj - 1)]
        }
    };
    let scale = (nc + 1) as f64 / (nf + 1) as f64;
    let mut fine = vec![0.0; nf * nf];
    for i in 0..nf {
        let pi = (i + 1) as f64 * scale;
        let i0 = (pi.floor() as usize).min(nc);
        let ti = pi - i0 as f64;
        for j in 0..nf {
            let pj = (j + 1) as f64 * scale;
            let j0 = (pj.floor() as usize).min(nc);
            let tj = pj - j0 as f64;
            fine[i * nf + j] = (1.0 - ti) * (1.0 - tj) * value(i0, j0)
                + (1.0 - ti) * tj * value(i0, j0 + 1)
                + ti * (1.0 - tj) * value(i0 + 1, j0)
                + ti * tj * value(i0 + 1, j0 + 1);
        }
    }
    fine
}
