//! Numeric search for Gram certificates `1 − β = N† W N`, `W ⪰ 0`.
//!
//! The linear Gram constraints are solved once for an affine parametrization
//! `W(t) = W_p + Σ t_j V_j`; the SDP then maximizes `λ_min(W(t))`.

use std::collections::BTreeMap;

use crate::certificates::{nullifier_basis, to_float_poly, verify_certificate, Gram, Level, SosCertificate};
use crate::error::{Error, Result};
use crate::exact::{Monomial, NCPolynomial};
use crate::linalg::Matrix;
use crate::scenario::{coordinate_monomials, tsirelson_point, AnyExpression};

use super::sdp::{solve_sdp, SdpProblem, SdpStatus};

/// Pivot threshold of the Gram-constraint elimination, relative to the
/// largest constraint coefficient.
const PIVOT_TOL: f64 = 1e-10;

/// Which polynomials index the Gram matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SosBasisKind {
    /// Nullifiers of the Tsirelson realization; valid only when `β(P_T) = 1`.
    Nullifier,
    /// The level monomials.
    Monomial,
}

#[derive(Clone, Debug)]
pub struct SosSearchReport {
    pub level: Level,
    pub basis_kind: SosBasisKind,
    /// `false` when no Gram matrix of any sign matches `1 − β`.
    pub linear_feasible: bool,
    /// Optimal `λ_min(W)`; `None` when the linear constraints are inconsistent.
    pub min_eigenvalue: Option<f64>,
    /// Present when the optimum clears `−tol` and the float verification passes.
    pub certificate: Option<SosCertificate>,
}

/// Searches for a certificate of `β ≤ 1` over the basis chosen for `level`.
pub fn sos_search(beta: &AnyExpression, level: Level, tol: f64) -> Result<Option<SosCertificate>> {
    sos_search_report(beta, level, tol).map(|r| r.certificate)
}

pub fn sos_search_report(beta: &AnyExpression, level: Level, tol: f64) -> Result<SosSearchReport> {
    let beta_f = beta.to_float();
    let at_pt = beta_f.pair(&tsirelson_point());
    let (basis_kind, labels, basis) = if (at_pt - 1.0).abs() <= 1e-9 {
        let nb = nullifier_basis(level);
        let labels = (0..nb.dim()).map(|k| format!("n{k}")).collect();
        (SosBasisKind::Nullifier, labels, nb.polys)
    } else {
        let ms = level.monomials();
        let labels = ms.iter().map(Monomial::to_string).collect();
        (SosBasisKind::Monomial, labels, ms.into_iter().map(NCPolynomial::monomial).collect())
    };
    let mut report = SosSearchReport {
        level,
        basis_kind,
        linear_feasible: false,
        min_eigenvalue: None,
        certificate: None,
    };

    let mut target: BTreeMap<Monomial, f64> = BTreeMap::new();
    target.insert(Monomial::unit(), 1.0);
    for (m, c) in coordinate_monomials().into_iter().zip(beta_f.to_vec8()) {
        *target.entry(m).or_insert(0.0) -= c;
    }
    let Some(param) = GramParametrization::new(&basis, &target) else {
        return Ok(report);
    };
    report.linear_feasible = true;

    // Variables (t_1..t_p, s): maximize s s.t. diag(W(t) − sI, 1 − s) ⪰ 0.
    // The extra block keeps s bounded when W(t) can grow without limit.
    let n = basis.len();
    let embed = |m: &Matrix, corner: f64| {
        Matrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => m[(i, j)],
            _ if i == n && j == n => corner,
            _ => 0.0,
        })
    };
    let mut fs: Vec<Matrix> = param.directions.iter().map(|v| embed(v, 0.0)).collect();
    fs.push(embed(&Matrix::identity(n).scale(-1.0), -1.0));
    let mut b = vec![0.0; fs.len()];
    b[fs.len() - 1] = 1.0;
    let problem = SdpProblem::new(embed(&param.particular, 1.0), fs, b)?;
    let sol = solve_sdp(&problem, tol)?;
    match sol.status {
        SdpStatus::Optimal => {}
        SdpStatus::MaxIter => return Err(Error::NoConvergence(sol.iterations)),
        // s ≤ 1 bounds the objective and s → −∞ is always feasible.
        SdpStatus::Infeasible | SdpStatus::Unbounded => {
            return Err(Error::SolverBreakdown(format!("certificate SDP reported {:?}", sol.status)))
        }
    }
    let s = sol.value;
    report.min_eigenvalue = Some(s);
    if s < -tol {
        return Ok(report);
    }
    let p = param.directions.len();
    let mut w = param.particular.clone();
    for (v, t) in param.directions.iter().zip(&sol.y[..p]) {
        w.axpy(*t, v);
    }
    let cert = SosCertificate {
        labels,
        basis,
        gram: Gram::Float(w.symmetrize()),
        target: beta.clone(),
    };
    if verify_certificate(&cert, tol)?.passed() {
        report.certificate = Some(cert);
    }
    Ok(report)
}

/// Affine solution set `{W_p + Σ t_j V_j}` of the Gram constraints.
struct GramParametrization {
    particular: Matrix,
    directions: Vec<Matrix>,
}

impl GramParametrization {
    /// `None` when the constraints are inconsistent.
    fn new(basis: &[NCPolynomial], target: &BTreeMap<Monomial, f64>) -> Option<Self> {
        let n = basis.len();
        let adj: Vec<NCPolynomial> = basis.iter().map(NCPolynomial::adjoint).collect();
        // One unknown per upper-triangular entry of W.
        let mut pairs = Vec::new();
        let mut columns: Vec<BTreeMap<Monomial, f64>> = Vec::new();
        for k in 0..n {
            for l in k..n {
                let mut p = &adj[k] * &basis[l];
                if k != l {
                    p = &p + &(&adj[l] * &basis[k]);
                }
                pairs.push((k, l));
                columns.push(to_float_poly(&p));
            }
        }
        let mut rows: Vec<Monomial> = columns.iter().flat_map(|c| c.keys().cloned()).collect();
        rows.extend(target.keys().cloned());
        rows.sort();
        rows.dedup();
        let cols = pairs.len();
        let mut a: Vec<Vec<f64>> = rows
            .iter()
            .map(|m| {
                let mut r: Vec<f64> = columns.iter().map(|c| c.get(m).copied().unwrap_or(0.0)).collect();
                r.push(target.get(m).copied().unwrap_or(0.0));
                r
            })
            .collect();
        let pivots = rref(&mut a, cols);
        let scale = a.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
        if a[pivots.len()..].iter().any(|r| r[cols].abs() > 1e-9 * scale) {
            return None;
        }
        let to_matrix = |x: &[f64]| {
            let mut m = Matrix::zeros(n, n);
            for (&(k, l), v) in pairs.iter().zip(x) {
                m[(k, l)] = *v;
                m[(l, k)] = *v;
            }
            m
        };
        let mut xp = vec![0.0; cols];
        for (r, &c) in pivots.iter().enumerate() {
            xp[c] = a[r][cols];
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let directions = free
            .iter()
            .map(|&f| {
                let mut x = vec![0.0; cols];
                x[f] = 1.0;
                for (r, &c) in pivots.iter().enumerate() {
                    x[c] = -a[r][f];
                }
                to_matrix(&x)
            })
            .collect();
        Some(GramParametrization { particular: to_matrix(&xp), directions })
    }
}

/// Gauss–Jordan elimination with partial pivoting on the first `cols`
/// columns; returns pivot columns, one per leading row.
fn rref(a: &mut [Vec<f64>], cols: usize) -> Vec<usize> {
    let scale = a.iter().flat_map(|r| r[..cols].iter()).fold(0.0f64, |m, v| m.max(v.abs()));
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        if row == a.len() {
            break;
        }
        let (best, val) = (row..a.len())
            .map(|i| (i, a[i][c].abs()))
            .fold((row, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if val <= PIVOT_TOL * scale {
            for r in a[row..].iter_mut() {
                r[c] = 0.0;
            }
            continue;
        }
        a.swap(row, best);
        let p = a[row][c];
        for v in a[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = a[row].clone();
        for (i, r) in a.iter_mut().enumerate() {
            if i != row && r[c] != 0.0 {
                let f = r[c];
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[c] = 0.0;
            }
        }
        pivots.push(c);
        row += 1;
    }
    pivots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::QSqrt2;
    use crate::slice::{beta_t, expr_from_slice, normalized_chsh};

    #[test]
    fn normalized_chsh_certified_at_first_level() {
        let beta = AnyExpression::Exact(normalized_chsh::<QSqrt2>());
        let r = sos_search_report(&beta, Level::L1, 1e-8).unwrap();
        assert_eq!(r.basis_kind, SosBasisKind::Nullifier);
        let cert = r.certificate.expect("feasible");
        assert!(verify_certificate(&cert, 1e-7).unwrap().passed());
    }

    #[test]
    fn beta_t_not_certified_below_third_level() {
        let beta = AnyExpression::Exact(beta_t::<QSqrt2>());
        assert!(sos_search(&beta, Level::L1AB, 1e-8).unwrap().is_none());
    }

    #[test]
    fn outside_expression_has_no_certificate() {
        let beta = AnyExpression::Float(expr_from_slice(0.3, 0.0));
        let r = sos_search_report(&beta, Level::L1AB_ABB, 1e-8).unwrap();
        assert!(r.certificate.is_none());
        assert!(r.min_eigenvalue.map_or(true, |s| s < -1e-4));
    }
}
