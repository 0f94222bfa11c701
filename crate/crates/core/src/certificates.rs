//! Relaxation levels, nullifiers of the maximally entangled state under the
//! Tsirelson realization, Gram expansions, and certificate verification.
//!
//! A certificate for `β ≤ 1` is a PSD matrix `W` over a list of polynomials
//! `N` with `1 − β = Σ_kl W_kl N_k† N_l` as an identity in the algebra.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Letter, Monomial, NCPolynomial, PsdVerdict, QSqrt2};
use crate::linalg::{eig_sym, Matrix};
use crate::scenario::{AnyExpression, BellExpression, QubitParams};
use crate::slice::beta_t;

/// Monomial sets of increasing size used both as SOS bases and as NPA
/// moment-matrix index sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[allow(non_camel_case_types)]
pub enum Level {
    /// `1, A_x, B_y`.
    L1,
    /// Adds `A_x B_y`.
    L1AB,
    /// Adds `A_x B_y B_y'` with `y ≠ y'`.
    L1AB_ABB,
    /// Adds `A_x A_x' B_y` with `x ≠ x'`.
    L1AB_ABB_AAB,
}

impl Level {
    pub const ALL: [Level; 4] = [Level::L1, Level::L1AB, Level::L1AB_ABB, Level::L1AB_ABB_AAB];

    pub fn name(self) -> &'static str {
        match self {
            Level::L1 => "L1",
            Level::L1AB => "L1AB",
            Level::L1AB_ABB => "L1AB_ABB",
            Level::L1AB_ABB_AAB => "L1AB_ABB_AAB",
        }
    }

    pub fn monomials(self) -> Vec<Monomial> {
        use Letter::*;
        let mut out = vec![Monomial::unit()];
        out.extend(Letter::ALL.iter().map(|&l| Monomial::letter(l)));
        if self >= Level::L1AB {
            for a in [A0, A1] {
                for b in [B0, B1] {
                    out.push(Monomial::from_letters([a, b]));
                }
            }
        }
        if self >= Level::L1AB_ABB {
            for a in [A0, A1] {
                out.push(Monomial::from_letters([a, B0, B1]));
                out.push(Monomial::from_letters([a, B1, B0]));
            }
        }
        if self >= Level::L1AB_ABB_AAB {
            for b in [B0, B1] {
                out.push(Monomial::from_letters([A0, A1, b]));
                out.push(Monomial::from_letters([A1, A0, b]));
            }
        }
        out
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Level {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Level::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown level `{s}`")))
    }
}

type Mat2<T> = [[T; 2]; 2];

fn mat2_mul(a: &Mat2<QSqrt2>, b: &Mat2<QSqrt2>) -> Mat2<QSqrt2> {
    std::array::from_fn(|i| std::array::from_fn(|j| &a[i][0] * &b[0][j] + &a[i][1] * &b[1][j]))
}

fn letter_matrix_exact(l: Letter) -> Mat2<QSqrt2> {
    let h = QSqrt2::frac_1_sqrt2();
    let z = QSqrt2::zero;
    let o = QSqrt2::one;
    match l {
        Letter::A0 => [[h.clone(), h.clone()], [h.clone(), -h]],
        Letter::A1 => [[h.clone(), -h.clone()], [-h.clone(), -h]],
        Letter::B0 => [[o(), z()], [z(), -o()]],
        Letter::B1 => [[z(), o()], [o(), z()]],
    }
}

fn word_matrix<T: Clone>(
    word: &[Letter],
    unit: Mat2<T>,
    letter: impl Fn(Letter) -> Mat2<T>,
    mul: impl Fn(&Mat2<T>, &Mat2<T>) -> Mat2<T>,
) -> Mat2<T> {
    word.iter().fold(unit, |acc, &l| mul(&acc, &letter(l)))
}

/// `f|φ⁺⟩` under `A_x = (Z + (−1)^x X)/√2`, `B0 = Z`, `B1 = X`, as
/// components on `|00⟩, |01⟩, |10⟩, |11⟩`.
pub fn state_action_exact(f: &NCPolynomial) -> [QSqrt2; 4] {
    let unit = [[QSqrt2::one(), QSqrt2::zero()], [QSqrt2::zero(), QSqrt2::one()]];
    let h = QSqrt2::frac_1_sqrt2();
    let mut out: [QSqrt2; 4] = Default::default();
    for (m, c) in f.terms() {
        let ma = word_matrix(m.alice_word(), unit.clone(), letter_matrix_exact, mat2_mul);
        let mb = word_matrix(m.bob_word(), unit.clone(), letter_matrix_exact, mat2_mul);
        for j in 0..2 {
            for k in 0..2 {
                let v = (0..2)
                    .map(|i| &ma[j][i] * &mb[k][i])
                    .sum::<QSqrt2>();
                out[2 * j + k] += &(&(c * &h) * &v);
            }
        }
    }
    out
}

fn observable(phi: f64) -> Mat2<f64> {
    let (s, c) = phi.sin_cos();
    [[c, s], [s, -c]]
}

fn mat2_mul_f64(a: &Mat2<f64>, b: &Mat2<f64>) -> Mat2<f64> {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

/// `f|φ_θ⟩` for `|φ_θ⟩ = cos θ|00⟩ + sin θ|11⟩` and the angle observables.
pub fn state_action_float(f: &NCPolynomial, params: &QubitParams) -> [f64; 4] {
    let unit = [[1.0, 0.0], [0.0, 1.0]];
    let psi = [params.theta.cos(), params.theta.sin()];
    let letter = |l: Letter| match l {
        Letter::A0 => observable(params.a[0]),
        Letter::A1 => observable(params.a[1]),
        Letter::B0 => observable(params.b[0]),
        Letter::B1 => observable(params.b[1]),
    };
    let mut out = [0.0; 4];
    for (m, c) in f.terms() {
        let ma = word_matrix(m.alice_word(), unit, letter, mat2_mul_f64);
        let mb = word_matrix(m.bob_word(), unit, letter, mat2_mul_f64);
        let c = c.to_f64();
        for j in 0..2 {
            for k in 0..2 {
                out[2 * j + k] += c * (0..2).map(|i| psi[i] * ma[j][i] * mb[k][i]).sum::<f64>();
            }
        }
    }
    out
}

/// `⟨φ_θ| f |φ_θ⟩`.
pub fn expectation_float(f: &NCPolynomial, params: &QubitParams) -> f64 {
    let v = state_action_float(f, params);
    let (c, s) = (params.theta.cos(), params.theta.sin());
    c * v[0] + s * v[3]
}

/// Polynomials of a level that annihilate `|φ⁺⟩` under the Tsirelson
/// realization.
#[derive(Clone, Debug)]
pub struct NullifierBasis {
    pub level: Level,
    pub monomials: Vec<Monomial>,
    /// Column `j` is the action of `monomials[j]` on `|φ⁺⟩`.
    pub action: ExactMatrix,
    /// Coefficient vectors over `monomials`, one per basis polynomial.
    pub vectors: Vec<Vec<QSqrt2>>,
    pub polys: Vec<NCPolynomial>,
}

impl NullifierBasis {
    pub fn dim(&self) -> usize {
        self.polys.len()
    }
}

pub fn action_matrix(monomials: &[Monomial]) -> ExactMatrix {
    let cols: Vec<[QSqrt2; 4]> = monomials
        .iter()
        .map(|m| state_action_exact(&NCPolynomial::monomial(m.clone())))
        .collect();
    let rows = (0..4)
        .map(|r| cols.iter().map(|c| c[r].clone()).collect())
        .collect();
    ExactMatrix::from_rows(rows).expect("rectangular by construction")
}

fn combine(monomials: &[Monomial], coeffs: &[QSqrt2]) -> NCPolynomial {
    let mut p = NCPolynomial::zero();
    for (m, c) in monomials.iter().zip(coeffs) {
        p.add_term(m.clone(), c);
    }
    p
}

/// Kernel of the action matrix, in reduced-echelon form over the level's
/// monomial order.
pub fn nullifier_basis(level: Level) -> NullifierBasis {
    let monomials = level.monomials();
    let action = action_matrix(&monomials);
    let vectors = action.kernel();
    let polys = vectors.iter().map(|v| combine(&monomials, v)).collect();
    NullifierBasis {
        level,
        monomials,
        action,
        vectors,
        polys,
    }
}

/// Expresses a polynomial supported on `monomials` as a coefficient vector.
pub fn coefficients_over(p: &NCPolynomial, monomials: &[Monomial]) -> Option<Vec<QSqrt2>> {
    let mut v = vec![QSqrt2::zero(); monomials.len()];
    for (m, c) in p.terms() {
        let i = monomials.iter().position(|x| x == m)?;
        v[i] = c.clone();
    }
    Some(v)
}

/// The nine nullifiers `N0..N8` spanning the third level.
pub fn generating_sequence() -> Vec<NCPolynomial> {
    use Letter::*;
    let h = QSqrt2::frac_1_sqrt2();
    let l = NCPolynomial::letter;
    let one = NCPolynomial::one();
    let u = (l(A0) + l(A1)).scale(&h);
    let v = (l(A0) - l(A1)).scale(&h);
    let ub0 = &u * &l(B0);
    let vb1 = &v * &l(B1);
    vec![
        &u - &l(B0),
        &v - &l(B1),
        &one - &ub0,
        &one - &vb1,
        &u * &l(B1) + &v * &l(B0),
        &l(B1) * &(&one - &ub0),
        &l(B0) * &(&one - &vb1),
        &(&one + &ub0) * &l(B1),
        &(&one + &vb1) * &l(B0),
    ]
}

/// `Σ_kl W_kl N_k† N_l`.
pub fn gram_expand(polys: &[NCPolynomial], w: &ExactMatrix) -> Result<NCPolynomial> {
    let n = polys.len();
    if w.rows() != n || w.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} Gram matrix for {} polynomials",
            w.rows(),
            w.cols(),
            n
        )));
    }
    let adj: Vec<NCPolynomial> = polys.iter().map(NCPolynomial::adjoint).collect();
    let mut out = NCPolynomial::zero();
    for k in 0..n {
        for l in 0..n {
            let c = &w[(k, l)];
            if c.is_zero() {
                continue;
            }
            out = out + (&adj[k] * &polys[l]).scale(c);
        }
    }
    Ok(out)
}

/// Float polynomial: monomial coefficients as doubles.
pub type FloatPoly = BTreeMap<Monomial, f64>;

pub fn to_float_poly(p: &NCPolynomial) -> FloatPoly {
    p.terms().map(|(m, c)| (m.clone(), c.to_f64())).collect()
}

/// `Σ_kl W_kl N_k† N_l` with a float Gram matrix.
pub fn gram_expand_float(polys: &[NCPolynomial], w: &Matrix) -> Result<FloatPoly> {
    let n = polys.len();
    if w.rows() != n || w.cols() != n {
        return Err(Error::Dimension(format!(
            "{}x{} Gram matrix for {} polynomials",
            w.rows(),
            w.cols(),
            n
        )));
    }
    let mut out = FloatPoly::new();
    for k in 0..n {
        let adj = polys[k].adjoint();
        for l in 0..n {
            let c = w[(k, l)];
            if c == 0.0 {
                continue;
            }
            for (m, v) in to_float_poly(&(&adj * &polys[l])) {
                *out.entry(m).or_insert(0.0) += c * v;
            }
        }
    }
    Ok(out)
}

/// `1 − β` as a polynomial.
pub fn one_minus(beta: &BellExpression<QSqrt2>) -> NCPolynomial {
    &NCPolynomial::one() - &beta.to_polynomial()
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gram {
    Exact(ExactMatrix),
    Float(Matrix),
}

impl Gram {
    pub fn dim(&self) -> usize {
        match self {
            Gram::Exact(m) => m.rows(),
            Gram::Float(m) => m.rows(),
        }
    }

    pub fn to_f64(&self) -> Matrix {
        match self {
            Gram::Exact(m) => m.to_f64(),
            Gram::Float(m) => m.clone(),
        }
    }
}

/// Gram certificate `1 − target = N† W N` over a labelled polynomial basis.
#[derive(Clone, Debug, PartialEq)]
pub struct SosCertificate {
    pub labels: Vec<String>,
    pub basis: Vec<NCPolynomial>,
    pub gram: Gram,
    pub target: AnyExpression,
}

/// The degree-3 certificate of β_T over `N0, N2, N6, N1, N5, N4`.
pub fn w3_certificate() -> SosCertificate {
    let seq = generating_sequence();
    let order = [0usize, 2, 6, 1, 5, 4];
    let s = QSqrt2::from_parts(2, 1, -1, 1);
    let r2 = QSqrt2::sqrt2();
    let z = QSqrt2::zero;
    let two = QSqrt2::from_int(2);
    let upper = vec![
        // row N0
        r2.clone(),
        -(&two * &s),
        -s.clone(),
        z(),
        z(),
        z(),
        // row N2
        &two * &s,
        z(),
        z(),
        z(),
        z(),
        // row N6
        r2.clone(),
        z(),
        z(),
        z(),
        // row N1
        two,
        z(),
        s.clone(),
        // row N5
        &r2 * &s,
        s.clone(),
        // row N4
        s,
    ];
    let w = ExactMatrix::symmetric_from_upper(6, &upper)
        .expect("21 entries")
        .scale(&QSqrt2::from_ratio(1, 16));
    SosCertificate {
        labels: order.iter().map(|i| format!("N{i}")).collect(),
        basis: order.iter().map(|&i| seq[i].clone()).collect(),
        gram: Gram::Exact(w),
        target: AnyExpression::Exact(beta_t()),
    }
}

/// Closed-form nonzero eigenvalues of the β_T Gram matrix, ascending.
pub fn w3_expected_eigenvalues() -> [f64; 4] {
    let r = std::f64::consts::SQRT_2;
    let t = (10.0 - 7.0 * r).sqrt();
    let mut v = [(1.0 - t) / 8.0, (1.0 + t) / 8.0, (2.0 - r) / 8.0, (1.5 * r - 1.0) / 8.0];
    v.sort_by(f64::total_cmp);
    v
}

/// Result of checking a certificate.
#[derive(Clone, Debug)]
pub struct CertificateReport {
    pub exact: bool,
    /// `N†WN − (1 − β)`; exact certificates keep the polynomial.
    pub residual: Option<NCPolynomial>,
    pub max_residual: f64,
    pub identity_holds: bool,
    /// Exact verdict for exact Gram matrices.
    pub psd_verdict: Option<PsdVerdict>,
    pub psd: bool,
    pub eigenvalues: Vec<f64>,
    pub rank: usize,
}

impl CertificateReport {
    pub fn passed(&self) -> bool {
        self.identity_holds && self.psd
    }
}

/// Default tolerance for float certificates.
pub const FLOAT_CERT_TOL: f64 = 1e-8;

/// Checks the polynomial identity and positivity. Exact certificates with an
/// exact target are decided exactly; anything else uses `tol` on both the
/// coefficient residual and the smallest eigenvalue.
pub fn verify_certificate(cert: &SosCertificate, tol: f64) -> Result<CertificateReport> {
    let n = cert.basis.len();
    if cert.gram.dim() != n || cert.labels.len() != n {
        return Err(Error::Dimension(format!(
            "basis of {} polynomials, {} labels, Gram dimension {}",
            n,
            cert.labels.len(),
            cert.gram.dim()
        )));
    }
    let eig = eig_sym(&cert.gram.to_f64())?;
    let scale = eig.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    match (&cert.gram, &cert.target) {
        (Gram::Exact(w), AnyExpression::Exact(beta)) => {
            let residual = &gram_expand(&cert.basis, w)? - &one_minus(beta);
            let max_residual = residual.terms().fold(0.0f64, |m, (_, c)| m.max(c.to_f64().abs()));
            let verdict = w.psd_check()?;
            let rank = w.rank();
            Ok(CertificateReport {
                exact: true,
                identity_holds: residual.is_zero(),
                psd: verdict.is_psd(),
                residual: Some(residual),
                max_residual,
                psd_verdict: Some(verdict),
                eigenvalues: eig.values,
                rank,
            })
        }
        _ => {
            let w = cert.gram.to_f64();
            let mut diff = gram_expand_float(&cert.basis, &w)?;
            let beta = cert.target.to_float();
            *diff.entry(Monomial::unit()).or_insert(0.0) -= 1.0;
            for (m, c) in crate::scenario::coordinate_monomials().into_iter().zip(beta.to_vec8()) {
                *diff.entry(m).or_insert(0.0) += c;
            }
            let max_residual = diff.values().fold(0.0f64, |m, v| m.max(v.abs()));
            let rank = eig.values.iter().filter(|v| v.abs() > tol.max(1e-9) * scale).count();
            Ok(CertificateReport {
                exact: false,
                residual: None,
                max_residual,
                identity_holds: max_residual <= tol,
                psd_verdict: None,
                psd: eig.min() >= -tol,
                eigenvalues: eig.values,
                rank,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NCPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn level_sizes() {
        let sizes: Vec<usize> = Level::ALL.iter().map(|l| l.monomials().len()).collect();
        assert_eq!(sizes, vec![5, 9, 13, 17]);
    }

    #[test]
    fn state_actions() {
        let h = QSqrt2::from_ratio(1, 2);
        assert_eq!(
            state_action_exact(&p("A0")),
            [h.clone(), h.clone(), h.clone(), -h]
        );
        let r = QSqrt2::frac_1_sqrt2();
        let z = QSqrt2::zero();
        assert_eq!(state_action_exact(&NCPolynomial::one()), [r.clone(), z.clone(), z, r]);
        for n in generating_sequence() {
            assert!(state_action_exact(&n).iter().all(QSqrt2::is_zero), "{n}");
        }
    }

    #[test]
    fn float_action_matches_exact_at_tsirelson() {
        let params = QubitParams::tsirelson();
        for m in Level::L1AB_ABB_AAB.monomials() {
            let f = NCPolynomial::monomial(m);
            let e = state_action_exact(&f);
            let x = state_action_float(&f, &params);
            for (a, b) in e.iter().zip(x) {
                assert!((a.to_f64() - b).abs() < 1e-14, "{f}");
            }
        }
    }

    #[test]
    fn nullifier_dimensions() {
        let dims: Vec<usize> = Level::ALL.iter().map(|&l| nullifier_basis(l).dim()).collect();
        assert_eq!(dims[..3], [2, 5, 9]);
        assert!(dims[3] >= 9);
        assert_eq!(nullifier_basis(Level::L1).action.rank(), 3);
    }

    #[test]
    fn gram_expansion_of_first_nullifier() {
        let n0 = generating_sequence()[0].clone();
        let g = gram_expand(&[n0], &ExactMatrix::identity(1)).unwrap();
        let expected = p("2/1 + 1/2*A0A1 + 1/2*A1A0 - 1/1*s2*A0B0 - 1/1*s2*A1B0");
        assert_eq!(g, expected);
    }

    #[test]
    fn w3_certifies_beta_t() {
        let report = verify_certificate(&w3_certificate(), 0.0).unwrap();
        assert!(report.passed(), "{:?}", report.residual);
        assert_eq!(report.rank, 4);
        match report.psd_verdict.unwrap() {
            PsdVerdict::Psd { pivots } => assert_eq!(pivots.len(), 4),
            v => panic!("{v:?}"),
        }
        let nonzero: Vec<f64> = report.eigenvalues.iter().copied().filter(|v| v.abs() > 1e-12).collect();
        for (a, b) in nonzero.iter().zip(w3_expected_eigenvalues()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
