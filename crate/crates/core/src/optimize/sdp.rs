//! Primal-dual interior point solver for small dense SDPs
//!
//! ```text
//! maximize  bᵀy   subject to   F0 + Σ yᵢ Fᵢ ⪰ 0.
//! ```
//!
//! Internally the problem is `min cᵀx  s.t.  Gx + S = h, S ⪰ 0` with
//! `c = -b`, `G x = -Σ xᵢ Fᵢ`, `h = F0`. It is solved through the homogeneous
//! self-dual embedding with Nesterov–Todd scaling and a Mehrotra
//! predictor-corrector, so infeasibility and unboundedness are detected from
//! certificates instead of by iteration exhaustion.

use crate::error::{Error, Result};
use crate::linalg::{eig_sym, solve_spd, svd_jacobi, Matrix};

/// Iteration cap of [`solve_sdp`].
pub const SDP_MAX_ITERS: usize = 100;

/// Rounds of iterative refinement per Newton solve.
const REFINEMENT_STEPS: usize = 2;

/// Fraction of the maximal step taken towards the cone boundary.
const STEP_FRACTION: f64 = 0.99;

#[derive(Clone, Debug)]
pub struct SdpProblem {
    /// Constant matrix `F0`.
    pub f0: Matrix,
    /// Coefficient matrices `F1..Fm`; all symmetric and the size of `F0`.
    pub fs: Vec<Matrix>,
    /// Objective `b`, one entry per `Fᵢ`.
    pub b: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    /// Primal objective `bᵀy`.
    pub value: f64,
    /// Dual objective `tr(F0 Z)`; an upper bound on `value` at optimality.
    pub dual_value: f64,
    pub y: Vec<f64>,
    /// `F0 + Σ yᵢ Fᵢ`.
    pub slack: Matrix,
    /// Dual matrix with `tr(Fᵢ Z) = -bᵢ`.
    pub dual: Matrix,
    pub iterations: usize,
}

impl SdpProblem {
    pub fn new(f0: Matrix, fs: Vec<Matrix>, b: Vec<f64>) -> Result<Self> {
        let n = f0.rows();
        if f0.cols() != n {
            return Err(Error::Dimension("F0 must be square".into()));
        }
        if fs.len() != b.len() {
            return Err(Error::Dimension(format!(
                "{} coefficient matrices but {} objective entries",
                fs.len(),
                b.len()
            )));
        }
        for f in std::iter::once(&f0).chain(&fs) {
            if f.rows() != n || f.cols() != n {
                return Err(Error::Dimension("coefficient matrix size mismatch".into()));
            }
            if f.max_asymmetry() > 1e-12 * f.max_abs().max(1.0) {
                return Err(Error::NotSymmetric);
            }
        }
        Ok(SdpProblem { f0, fs, b })
    }

    pub fn dim(&self) -> usize {
        self.f0.rows()
    }

    /// `F0 + Σ yᵢ Fᵢ`.
    pub fn affine(&self, y: &[f64]) -> Matrix {
        let mut m = self.f0.clone();
        for (f, yi) in self.fs.iter().zip(y) {
            m.axpy(*yi, f);
        }
        m
    }

    /// `G x = -Σ xᵢ Fᵢ`.
    fn g(&self, x: &[f64]) -> Matrix {
        let mut m = Matrix::zeros(self.dim(), self.dim());
        for (f, xi) in self.fs.iter().zip(x) {
            m.axpy(-xi, f);
        }
        m
    }

    /// `Gᵀ Z = (-tr(Fᵢ Z))ᵢ`.
    fn gt(&self, z: &Matrix) -> Vec<f64> {
        self.fs.iter().map(|f| -f.dot(z)).collect()
    }
}

/// Nesterov–Todd scaling `R` with `R⁻¹ S R⁻ᵀ = Rᵀ Z R = diag(λ)`.
struct Scaling {
    r: Matrix,
    rinv: Matrix,
    lambda: Vec<f64>,
}

impl Scaling {
    fn new(s: &Matrix, z: &Matrix) -> Result<Self> {
        let ls = s.cholesky().ok_or_else(|| breakdown("slack lost definiteness"))?;
        let lz = z.cholesky().ok_or_else(|| breakdown("dual lost definiteness"))?;
        let svd = svd_jacobi(&(&lz.transpose() * &ls))?;
        let lambda = svd.sigma;
        if lambda.iter().any(|l| !(*l > 0.0)) {
            return Err(breakdown("degenerate scaling"));
        }
        let n = lambda.len();
        let r = &(&ls * &svd.v) * &Matrix::diag(&lambda.iter().map(|l| l.powf(-0.5)).collect::<Vec<_>>());
        let rinv = &(&Matrix::diag(&lambda.iter().map(|l| l.sqrt()).collect::<Vec<_>>())
            * &svd.v.transpose())
            * &ls.lower_inverse();
        debug_assert_eq!(r.rows(), n);
        Ok(Scaling { r, rinv, lambda })
    }

    /// `R⁻¹ M R⁻ᵀ`.
    fn scale_s(&self, m: &Matrix) -> Matrix {
        (&(&self.rinv * m) * &self.rinv.transpose()).symmetrize()
    }

    /// `Rᵀ M R`.
    fn scale_z(&self, m: &Matrix) -> Matrix {
        (&(&self.r.transpose() * m) * &self.r).symmetrize()
    }

    /// `R M Rᵀ`.
    fn unscale_s(&self, m: &Matrix) -> Matrix {
        (&(&self.r * m) * &self.r.transpose()).symmetrize()
    }

    /// `R⁻ᵀ M R⁻¹`.
    fn unscale_z(&self, m: &Matrix) -> Matrix {
        (&(&self.rinv.transpose() * m) * &self.rinv).symmetrize()
    }

    /// Solves `Λ ∘ U = D` for the symmetrized product `∘`.
    fn lyap(&self, d: &Matrix) -> Matrix {
        let l = &self.lambda;
        Matrix::from_fn(l.len(), l.len(), |i, j| 2.0 * d[(i, j)] / (l[i] + l[j]))
    }
}

fn breakdown(msg: &str) -> Error {
    Error::SolverBreakdown(msg.into())
}

fn jordan(a: &Matrix, b: &Matrix) -> Matrix {
    (&(a * b) + &(b * a)).scale(0.5)
}

/// Largest `α ≤ 1` keeping `diag(λ) + α·D ⪰ 0` (unbounded steps return `f64::INFINITY`).
fn max_step_cone(lambda: &[f64], d: &Matrix) -> Result<f64> {
    let n = lambda.len();
    let m = Matrix::from_fn(n, n, |i, j| d[(i, j)] / (lambda[i] * lambda[j]).sqrt());
    let lo = eig_sym(&m.symmetrize())?.min();
    Ok(if lo < 0.0 { -1.0 / lo } else { f64::INFINITY })
}

fn max_step_scalar(v: f64, dv: f64) -> f64 {
    if dv < 0.0 {
        -v / dv
    } else {
        f64::INFINITY
    }
}

fn vnorm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn vdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl Direction {
    fn add(&mut self, o: &Direction) {
        for (a, b) in self.x.iter_mut().zip(&o.x) {
            *a += b;
        }
        self.s.axpy(1.0, &o.s);
        self.z.axpy(1.0, &o.z);
        self.s_tilde.axpy(1.0, &o.s_tilde);
        self.z_tilde.axpy(1.0, &o.z_tilde);
        self.tau += o.tau;
        self.kappa += o.kappa;
    }
}

struct Direction {
    x: Vec<f64>,
    s: Matrix,
    z: Matrix,
    tau: f64,
    kappa: f64,
    /// Scaled `Δs̃` and `Δz̃`, reused by the corrector and the step length.
    s_tilde: Matrix,
    z_tilde: Matrix,
}

/// Reduced KKT operator `H_ij = ⟨G̃ᵢ, G̃ⱼ⟩` with `G̃ᵢ = R⁻¹ Gᵢ R⁻ᵀ`.
struct Kkt<'a> {
    p: &'a SdpProblem,
    w: &'a Scaling,
    h: Matrix,
}

impl<'a> Kkt<'a> {
    fn new(p: &'a SdpProblem, w: &'a Scaling) -> Self {
        let gt: Vec<Matrix> = p.fs.iter().map(|f| w.scale_s(&f.scale(-1.0))).collect();
        let m = gt.len();
        let mut h = Matrix::from_fn(m, m, |i, j| if i <= j { gt[i].dot(&gt[j]) } else { 0.0 });
        for i in 0..m {
            for j in 0..i {
                h[(i, j)] = h[(j, i)];
            }
        }
        let ridge = 1e-14 * (0..m).map(|i| h[(i, i)]).fold(0.0, f64::max) + 1e-300;
        for i in 0..m {
            h[(i, i)] += ridge;
        }
        Kkt { p, w, h }
    }

    /// Solves the linearized embedding for the right-hand sides
    /// `d_x, d_z, d_tau` (residual rows) and `d_s, d_k` (complementarity
    /// rows), with iterative refinement against the unreduced system.
    fn solve(&self, cur: (f64, f64), c: &[f64], rhs: (&[f64], &Matrix, f64, &Matrix, f64)) -> Result<Direction> {
        let (tau, kappa) = cur;
        let (dx, dz, dtau, ds, dk) = rhs;
        let (p, w) = (self.p, self.w);
        let lam = Matrix::diag(&w.lambda);
        let mut d = self.solve_once(cur, c, rhs)?;
        for _ in 0..REFINEMENT_STEPS {
            let ex: Vec<f64> = p
                .gt(&d.z)
                .iter()
                .zip(c)
                .zip(dx)
                .map(|((gz, ci), r)| r - (gz + ci * d.tau))
                .collect();
            let mut ez = dz - &(&p.g(&d.x) + &d.s);
            ez.axpy(d.tau, &p.f0);
            let et = dtau - (vdot(c, &d.x) + p.f0.dot(&d.z) + d.kappa);
            let es = ds - &jordan(&lam, &(&d.s_tilde + &d.z_tilde));
            let ek = dk - (tau * d.kappa + kappa * d.tau);
            let corr = self.solve_once(cur, c, (&ex, &ez, et, &es, ek))?;
            d.add(&corr);
        }
        Ok(d)
    }

    fn solve_once(&self, cur: (f64, f64), c: &[f64], rhs: (&[f64], &Matrix, f64, &Matrix, f64)) -> Result<Direction> {
        let (tau, kappa) = cur;
        let (dx, dz, dtau, ds, dk) = rhs;
        let (p, w) = (self.p, self.w);
        let u = w.lyap(ds);
        let ru = w.unscale_s(&u);
        let dz_hat = dz - &ru;
        let pinv = |m: &Matrix| w.unscale_z(&w.scale_s(m));
        let z1_src = pinv(&dz_hat);
        let rhs1: Vec<f64> = dx.iter().zip(p.gt(&z1_src)).map(|(a, b)| a + b).collect();
        let hz = pinv(&p.f0);
        let rhs2: Vec<f64> = p.gt(&hz).iter().zip(c).map(|(a, b)| a - b).collect();
        let x1 = solve_spd(&self.h, &rhs1).ok_or_else(|| breakdown("singular reduced KKT system"))?;
        let x2 = solve_spd(&self.h, &rhs2).ok_or_else(|| breakdown("singular reduced KKT system"))?;
        let z1 = pinv(&(&p.g(&x1) - &dz_hat));
        let z2 = pinv(&(&p.g(&x2) - &p.f0));
        let num = dtau - dk / tau - vdot(c, &x1) - p.f0.dot(&z1);
        let den = vdot(c, &x2) + p.f0.dot(&z2) - kappa / tau;
        if den == 0.0 || !den.is_finite() {
            return Err(breakdown("degenerate homogenizing row"));
        }
        let d_tau = num / den;
        let x: Vec<f64> = x1.iter().zip(&x2).map(|(a, b)| a + d_tau * b).collect();
        let mut z = z1;
        z.axpy(d_tau, &z2);
        let z_tilde = w.scale_z(&z);
        let s_tilde = &u - &z_tilde;
        let s = w.unscale_s(&s_tilde);
        let d_kappa = (dk - kappa * d_tau) / tau;
        Ok(Direction { x, s, z, tau: d_tau, kappa: d_kappa, s_tilde, z_tilde })
    }
}

fn initial_point(p: &SdpProblem) -> (Vec<f64>, Matrix, Matrix) {
    let n = p.dim();
    let m = p.fs.len();
    let id = Matrix::identity(n);
    // Least-squares starts with unit scaling, shifted into the cone.
    let gram = {
        let mut g = Matrix::from_fn(m, m, |i, j| p.fs[i].dot(&p.fs[j]));
        let ridge = 1e-12 * (0..m).map(|i| g[(i, i)]).fold(0.0, f64::max) + 1e-300;
        for i in 0..m {
            g[(i, i)] += ridge;
        }
        g
    };
    let c: Vec<f64> = p.b.iter().map(|v| -v).collect();
    let x = solve_spd(&gram, &p.gt(&p.f0)).unwrap_or_else(|| vec![0.0; m]);
    let mut s = &p.f0 - &p.g(&x);
    let zc = solve_spd(&gram, &c).unwrap_or_else(|| vec![0.0; m]);
    let mut z = p.g(&zc).scale(-1.0);
    for v in [&mut s, &mut z] {
        *v = v.symmetrize();
        let lo = eig_sym(v).map(|e| e.min()).unwrap_or(0.0);
        if lo <= 1e-8 * v.frobenius_norm().max(1.0) {
            v.axpy(1.0 - lo, &id);
        }
    }
    (x, s, z)
}

/// Solves `maximize bᵀy s.t. F0 + Σ yᵢFᵢ ⪰ 0` to absolute and relative
/// tolerance `tol`.
pub fn solve_sdp(p: &SdpProblem, tol: f64) -> Result<SdpSolution> {
    let n = p.dim();
    let m = p.fs.len();
    let c: Vec<f64> = p.b.iter().map(|v| -v).collect();
    let h = &p.f0;
    let resx0 = vnorm(&c).max(1.0);
    let resz0 = h.frobenius_norm().max(1.0);
    let id = Matrix::identity(n);

    let (mut x, mut s, mut z) = initial_point(p);
    let (mut tau, mut kappa) = (1.0_f64, 1.0_f64);

    let finish = |status, x: &[f64], z: &Matrix, tau: f64, iters| {
        let scale = if status == SdpStatus::Optimal || status == SdpStatus::MaxIter { tau } else { 1.0 };
        let y: Vec<f64> = x.iter().map(|v| v / scale).collect();
        SdpSolution {
            status,
            value: vdot(&p.b, &y),
            dual_value: h.dot(z) / scale,
            slack: p.affine(&y),
            dual: z.scale(1.0 / scale),
            y,
            iterations: iters,
        }
    };

    for iter in 0..=SDP_MAX_ITERS {
        let gap = s.dot(&z);
        let mu = (gap + tau * kappa) / (n as f64 + 1.0);
        let cx = vdot(&c, &x);
        let hz = h.dot(&z);
        let gtz = p.gt(&z);
        // Residuals of the embedding.
        let rx: Vec<f64> = gtz.iter().zip(&c).map(|(a, b)| a + b * tau).collect();
        let mut rz = &p.g(&x) + &s;
        rz.axpy(-tau, h);
        let rt = kappa + cx + hz;

        let pcost = cx / tau;
        let dcost = -hz / tau;
        let abs_gap = gap / (tau * tau);
        let rel_gap = if pcost < 0.0 {
            Some(abs_gap / -pcost)
        } else if dcost > 0.0 {
            Some(abs_gap / dcost)
        } else {
            None
        };
        let pres = rz.frobenius_norm() / tau / resz0;
        let dres = vnorm(&rx) / tau / resx0;
        let pinfres = if hz < 0.0 { Some(vnorm(&gtz) / resx0 / -hz) } else { None };
        let dinfres = if cx < 0.0 {
            let mut gs = p.g(&x);
            gs.axpy(1.0, &s);
            Some(gs.frobenius_norm() / resz0 / -cx)
        } else {
            None
        };

        if pres <= tol && dres <= tol && (abs_gap <= tol || rel_gap.is_some_and(|g| g <= tol)) {
            return Ok(finish(SdpStatus::Optimal, &x, &z, tau, iter));
        }
        if pinfres.is_some_and(|r| r <= tol) {
            let zz = z.scale(1.0 / -hz);
            return Ok(finish(SdpStatus::Infeasible, &vec![0.0; m], &zz, tau, iter));
        }
        if dinfres.is_some_and(|r| r <= tol) {
            let xx: Vec<f64> = x.iter().map(|v| v / -cx).collect();
            return Ok(finish(SdpStatus::Unbounded, &xx, &z, tau, iter));
        }
        if iter == SDP_MAX_ITERS {
            break;
        }

        let w = Scaling::new(&s, &z)?;
        let kkt = Kkt::new(p, &w);
        let lam = Matrix::diag(&w.lambda);
        let lam_sq = jordan(&lam, &lam);
        let neg_rx: Vec<f64> = rx.iter().map(|v| -v).collect();
        let neg_rz = rz.scale(-1.0);

        // Predictor.
        let ds_aff = lam_sq.scale(-1.0);
        let dk_aff = -tau * kappa;
        let aff = kkt.solve((tau, kappa), &c, (&neg_rx, &neg_rz, -rt, &ds_aff, dk_aff))?;
        let step_aff = max_step_cone(&w.lambda, &aff.s_tilde)?
            .min(max_step_cone(&w.lambda, &aff.z_tilde)?)
            .min(max_step_scalar(tau, aff.tau))
            .min(max_step_scalar(kappa, aff.kappa))
            .min(1.0);
        let sigma = (1.0 - step_aff).powi(3);

        // Corrector.
        let eta = 1.0 - sigma;
        let rx_c: Vec<f64> = neg_rx.iter().map(|v| eta * v).collect();
        let rz_c = neg_rz.scale(eta);
        let mut ds = lam_sq.scale(-1.0);
        ds.axpy(sigma * mu, &id);
        ds.axpy(-1.0, &jordan(&aff.s_tilde, &aff.z_tilde));
        let dk = -tau * kappa + sigma * mu - aff.tau * aff.kappa;
        let dir = kkt.solve((tau, kappa), &c, (&rx_c, &rz_c, -eta * rt, &ds, dk))?;
        let step = (STEP_FRACTION
            * max_step_cone(&w.lambda, &dir.s_tilde)?
                .min(max_step_cone(&w.lambda, &dir.z_tilde)?)
                .min(max_step_scalar(tau, dir.tau))
                .min(max_step_scalar(kappa, dir.kappa)))
        .min(1.0);

        for (xi, dxi) in x.iter_mut().zip(&dir.x) {
            *xi += step * dxi;
        }
        s.axpy(step, &dir.s);
        z.axpy(step, &dir.z);
        s = s.symmetrize();
        z = z.symmetrize();
        tau += step * dir.tau;
        kappa += step * dir.kappa;
        if !(tau > 0.0) || !(kappa > 0.0) {
            return Err(breakdown("lost positivity of tau or kappa"));
        }
    }
    Ok(finish(SdpStatus::MaxIter, &x, &z, tau, SDP_MAX_ITERS))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn two_by_two_off_diagonal() {
        // maximize t  s.t. [[1, t], [t, 1]] ⪰ 0.
        let p = SdpProblem::new(
            Matrix::identity(2),
            vec![m(&[&[0.0, 1.0], &[1.0, 0.0]])],
            vec![1.0],
        )
        .unwrap();
        let sol = solve_sdp(&p, 1e-9).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-8, "{}", sol.value);
        assert!((sol.dual_value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn negative_constant_is_infeasible() {
        let p = SdpProblem::new(m(&[&[-1.0]]), vec![m(&[&[0.0]])], vec![1.0]).unwrap();
        assert_eq!(solve_sdp(&p, 1e-9).unwrap().status, SdpStatus::Infeasible);
    }

    #[test]
    fn unbounded_direction_detected() {
        // maximize t  s.t. 1 + t ≥ 0.
        let p = SdpProblem::new(m(&[&[1.0]]), vec![m(&[&[1.0]])], vec![1.0]).unwrap();
        assert_eq!(solve_sdp(&p, 1e-9).unwrap().status, SdpStatus::Unbounded);
    }

    #[test]
    fn minimum_eigenvalue_as_sdp() {
        // maximize s  s.t. A - sI ⪰ 0 gives λ_min(A).
        let a = m(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]]);
        let p = SdpProblem::new(a, vec![Matrix::identity(3).scale(-1.0)], vec![1.0]).unwrap();
        let sol = solve_sdp(&p, 1e-10).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.value - (2.0 - 2f64.sqrt())).abs() < 1e-9);
    }
}
