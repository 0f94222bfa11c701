//! Second-order test at the Tsirelson realization for the slice
//! expressions: the largest slice radius for which the qubit-family Hessian
//! stays negative semidefinite along the whole joint-rotation orbit.

use std::f64::consts::{FRAC_PI_4, TAU};

use crate::linalg::{eig_sym, Matrix};
use crate::scenario::{hessian_qubit_fd, QubitParams};
use crate::slice::expr_from_slice;

/// Feasibility slack on `λ_max` for the closed-form Hessian.
pub const CLOSED_FORM_SLACK: f64 = 1e-10;

/// Feasibility slack on `λ_max` for the finite-difference Hessian, sized to
/// its `O(ε/h²)` rounding noise at the zero mode of joint rotations.
pub const FD_SLACK: f64 = 1e-6;

/// Golden-section iterations used to refine the worst `α` between grid points.
const ALPHA_REFINE_ITERS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HessianSource {
    /// The closed-form matrix of [`hessian_closed_form`].
    ClosedForm,
    /// Central differences of the qubit-family value.
    FiniteDifference,
}

impl HessianSource {
    fn slack(self) -> f64 {
        match self {
            HessianSource::ClosedForm => CLOSED_FORM_SLACK,
            HessianSource::FiniteDifference => FD_SLACK,
        }
    }
}

/// Closed-form Hessian over `(θ, a0, a1, b0, b1)` at the rotated Tsirelson
/// parameters, as a function of polar slice coordinates `(r, γ)` and the
/// rotation angle `α`.
///
/// This matrix coincides with the Hessian of `expr_from_slice(r·sin γ,
/// r·cos γ)`, i.e. with the two slice coordinates exchanged relative to the
/// polar convention `(r0, r1) = (r·cos γ, r·sin γ)`.
pub fn hessian_closed_form(r: f64, gamma: f64, alpha: f64) -> Matrix {
    let (sa, ca) = alpha.sin_cos();
    let (sg, cg) = gamma.sin_cos();
    let col0 = [
        -2.0,
        2.0 * r * sa * (gamma + FRAC_PI_4).sin(),
        -2.0 * r * ca * (-gamma + FRAC_PI_4).sin(),
        -2.0 * r * sg * (alpha + FRAC_PI_4).sin(),
        2.0 * r * cg * (-alpha + FRAC_PI_4).sin(),
    ];
    let lower = [
        [col0[0], 0.0, 0.0, 0.0, 0.0],
        [col0[1], -0.5, 0.0, 0.0, 0.0],
        [col0[2], 0.0, -0.5, 0.0, 0.0],
        [col0[3], 0.25, 0.25, -0.5, 0.0],
        [col0[4], 0.25, 0.25, 0.0, -0.5],
    ];
    Matrix::from_fn(5, 5, |i, j| if i >= j { lower[i][j] } else { lower[j][i] })
}

/// Finite-difference Hessian of `expr_from_slice(r0, r1)` along the rotation
/// orbit of the Tsirelson parameters.
pub fn hessian_fd(r0: f64, r1: f64, alpha: f64) -> Matrix {
    hessian_qubit_fd(&expr_from_slice(r0, r1), &QubitParams::rotated_tsirelson(alpha))
}

fn hessian(source: HessianSource, r: f64, gamma: f64, alpha: f64) -> Matrix {
    match source {
        HessianSource::ClosedForm => hessian_closed_form(r, gamma, alpha),
        HessianSource::FiniteDifference => hessian_fd(r * gamma.cos(), r * gamma.sin(), alpha),
    }
}

fn lambda_max(m: &Matrix) -> f64 {
    eig_sym(m).map(|e| e.max()).unwrap_or(f64::INFINITY)
}

/// `max_α λ_max(H(r, γ, α))` over a uniform grid of `alpha_grid` points in
/// `[0, 2π)`, refined by golden-section search around the worst grid point.
pub fn max_lambda_over_alpha(source: HessianSource, r: f64, gamma: f64, alpha_grid: usize) -> f64 {
    let step = TAU / alpha_grid as f64;
    let f = |a: f64| lambda_max(&hessian(source, r, gamma, a));
    let (best_k, best) = (0..alpha_grid)
        .map(|k| (k, f(k as f64 * step)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let center = best_k as f64 * step;
    let (mut lo, mut hi) = (center - step, center + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..ALPHA_REFINE_ITERS {
        if f1 > f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    best.max(f1).max(f2)
}

/// Largest `r ∈ [0, 1]` with `H(r, γ, α) ⪯ 0` for every `α`, by bisection to
/// width `tol`. Returns the feasible end of the final bracket.
pub fn hessian_rmax(gamma: f64, alpha_grid: usize, tol: f64, source: HessianSource) -> f64 {
    let alpha_grid = alpha_grid.max(64);
    let feasible = |r: f64| max_lambda_over_alpha(source, r, gamma, alpha_grid) <= source.slack();
    let (mut lo, mut hi) = (0.0, 1.0);
    if feasible(hi) {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigvals_sym;
    use std::f64::consts::PI;

    #[test]
    fn origin_spectrum() {
        let v = eigvals_sym(&hessian_closed_form(0.0, 0.3, 1.1)).unwrap();
        for (a, b) in v.iter().zip([-2.0, -1.0, -0.5, -0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn closed_form_matches_fd_with_exchanged_coordinates() {
        for &(r, g, a) in &[(0.2, 0.0, 0.0), (0.37, 0.4, 1.3), (0.5, PI / 8.0, 4.0), (0.11, 2.0, -0.7)] {
            let h = hessian_closed_form(r, g, a);
            let fd = hessian_fd(r * g.sin(), r * g.cos(), a);
            assert!((&h - &fd).max_abs() < 1e-5, "r={r} γ={g} α={a}: {:?}", (&h - &fd).max_abs());
        }
    }

    #[test]
    fn rmax_half_from_both_sources() {
        for source in [HessianSource::ClosedForm, HessianSource::FiniteDifference] {
            let r = hessian_rmax(PI / 8.0, 64, 1e-4, source);
            assert!((r - 0.5).abs() < 1e-3, "{source:?}: {r}");
        }
    }
}
