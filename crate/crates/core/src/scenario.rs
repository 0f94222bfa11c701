//! Behaviors and Bell expressions of the two-party, two-setting, two-outcome
//! scenario, with the qubit realization family, local vertices, and the
//! discrete symmetry that rotates the Tsirelson face.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{Letter, LetterMap, Monomial, NCPolynomial, QSqrt2};
use crate::scalar::Scalar;

/// Monomials indexing the 8 correlator coordinates, in storage order
/// `A0, A1, B0, B1, A0B0, A0B1, A1B0, A1B1`.
pub fn coordinate_monomials() -> [Monomial; 8] {
    use Letter::*;
    [
        Monomial::letter(A0),
        Monomial::letter(A1),
        Monomial::letter(B0),
        Monomial::letter(B1),
        Monomial::from_letters([A0, B0]),
        Monomial::from_letters([A0, B1]),
        Monomial::from_letters([A1, B0]),
        Monomial::from_letters([A1, B1]),
    ]
}

fn coordinate_index(m: &Monomial) -> Option<usize> {
    coordinate_monomials().iter().position(|c| c == m)
}

/// Correlator table `⟨A_x⟩`, `⟨B_y⟩`, `⟨A_x B_y⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior<T> {
    pub m_a: [T; 2],
    pub m_b: [T; 2],
    /// `k[x][y] = ⟨A_x B_y⟩`.
    pub k: [[T; 2]; 2],
}

/// Bell expression `Σ a_x A_x + Σ b_y B_y + Σ c_xy A_x B_y`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellExpression<T> {
    pub a: [T; 2],
    pub b: [T; 2],
    pub c: [[T; 2]; 2],
}

fn to_vec8<T: Clone>(u: &[T; 2], v: &[T; 2], w: &[[T; 2]; 2]) -> [T; 8] {
    [
        u[0].clone(),
        u[1].clone(),
        v[0].clone(),
        v[1].clone(),
        w[0][0].clone(),
        w[0][1].clone(),
        w[1][0].clone(),
        w[1][1].clone(),
    ]
}

type Parts<T> = ([T; 2], [T; 2], [[T; 2]; 2]);

fn from_vec8<T: Clone>(x: &[T; 8]) -> Parts<T> {
    (
        [x[0].clone(), x[1].clone()],
        [x[2].clone(), x[3].clone()],
        [[x[4].clone(), x[5].clone()], [x[6].clone(), x[7].clone()]],
    )
}

fn signed_permute<T: Scalar>(map: &LetterMap, x: &[T; 8]) -> [T; 8] {
    let monos = coordinate_monomials();
    let mut out: [T; 8] = std::array::from_fn(|_| T::zero());
    for (i, m) in monos.iter().enumerate() {
        let (neg, img) = map.apply_monomial(m);
        let j = coordinate_index(&img).expect("letter maps preserve the coordinate set");
        out[j] = if neg { -x[i].clone() } else { x[i].clone() };
    }
    out
}

impl<T: Scalar> Behavior<T> {
    pub fn new(m_a: [T; 2], m_b: [T; 2], k: [[T; 2]; 2]) -> Self {
        Behavior { m_a, m_b, k }
    }

    pub fn to_vec8(&self) -> [T; 8] {
        to_vec8(&self.m_a, &self.m_b, &self.k)
    }

    pub fn from_vec8(x: &[T; 8]) -> Self {
        let (m_a, m_b, k) = from_vec8(x);
        Behavior { m_a, m_b, k }
    }

    pub fn to_float(&self) -> Behavior<f64> {
        Behavior::from_vec8(&self.to_vec8().map(|v| v.to_f64()))
    }

    /// Every entry lies in `[−1, 1]` (exactly, or within `1e-12` for floats).
    pub fn is_bounded(&self) -> bool {
        let one = T::one();
        let tol = T::from_ratio(1, 1_000_000_000_000);
        let lim = if T::EXACT { one } else { one + tol };
        self.to_vec8().iter().all(|v| {
            v.compare(&lim) != Ordering::Greater && (-v.clone()).compare(&lim) != Ordering::Greater
        })
    }

    /// Image under the signed coordinate permutation induced by `map`.
    pub fn apply_letter_map(&self, map: &LetterMap) -> Self {
        Self::from_vec8(&signed_permute(map, &self.to_vec8()))
    }
}

impl<T: Scalar> BellExpression<T> {
    pub fn new(a: [T; 2], b: [T; 2], c: [[T; 2]; 2]) -> Self {
        BellExpression { a, b, c }
    }

    pub fn zero() -> Self {
        Self::from_vec8(&std::array::from_fn(|_| T::zero()))
    }

    /// `(a0, a1, b0, b1, c00, c01, c10, c11)`.
    pub fn to_vec8(&self) -> [T; 8] {
        to_vec8(&self.a, &self.b, &self.c)
    }

    pub fn from_vec8(x: &[T; 8]) -> Self {
        let (a, b, c) = from_vec8(x);
        BellExpression { a, b, c }
    }

    pub fn to_float(&self) -> BellExpression<f64> {
        BellExpression::from_vec8(&self.to_vec8().map(|v| v.to_f64()))
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::from_vec8(&self.to_vec8().map(|v| v * s.clone()))
    }

    pub fn add(&self, other: &Self) -> Self {
        let x = self.to_vec8();
        let y = other.to_vec8();
        Self::from_vec8(&std::array::from_fn(|i| x[i].clone() + y[i].clone()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    /// `β·P`.
    pub fn pair(&self, p: &Behavior<T>) -> T {
        self.to_vec8()
            .into_iter()
            .zip(p.to_vec8())
            .fold(T::zero(), |acc, (u, v)| acc + u * v)
    }

    /// Maximum over the 16 deterministic vertices with every maximizer.
    /// Float ties are resolved with absolute tolerance `1e-9`.
    pub fn local_bound(&self) -> (T, Vec<LocalVertex>) {
        let values: Vec<(LocalVertex, T)> = LocalVertex::all()
            .into_iter()
            .map(|v| (v, self.pair(&v.behavior::<T>())))
            .collect();
        let best = values
            .iter()
            .map(|(_, x)| x.clone())
            .reduce(|a, b| if b.compare(&a) == Ordering::Greater { b } else { a })
            .expect("16 vertices");
        let argmax = values
            .into_iter()
            .filter(|(_, x)| x.close_to(&best, 1e-9))
            .map(|(v, _)| v)
            .collect();
        (best, argmax)
    }

    /// Applies the letter substitution and re-reads the coefficients.
    pub fn apply_letter_map(&self, map: &LetterMap) -> Self {
        Self::from_vec8(&signed_permute(map, &self.to_vec8()))
    }

    /// The symmetry `A0 → −B1, A1 → −B0, B0 → −A0, B1 → A1`.
    pub fn symmetry(&self) -> Self {
        self.apply_letter_map(&LetterMap::tsirelson_symmetry())
    }

    /// `S^k` for any integer `k`; `S` has order 8.
    pub fn symmetry_pow(&self, k: i64) -> Self {
        let mut out = self.clone();
        for _ in 0..k.rem_euclid(8) {
            out = out.symmetry();
        }
        out
    }
}

impl<T: Scalar> Behavior<T> {
    pub fn symmetry(&self) -> Self {
        self.apply_letter_map(&LetterMap::tsirelson_symmetry())
    }

    pub fn symmetry_pow(&self, k: i64) -> Self {
        let mut out = self.clone();
        for _ in 0..k.rem_euclid(8) {
            out = out.symmetry();
        }
        out
    }
}

impl BellExpression<QSqrt2> {
    pub fn to_polynomial(&self) -> NCPolynomial {
        let mut p = NCPolynomial::zero();
        for (m, c) in coordinate_monomials().into_iter().zip(self.to_vec8()) {
            p.add_term(m, &c);
        }
        p
    }

    /// Reads the 8 coefficients of a polynomial that has no other terms.
    pub fn from_polynomial(p: &NCPolynomial) -> Result<Self> {
        let mut x: [QSqrt2; 8] = Default::default();
        for (m, c) in p.terms() {
            let i = coordinate_index(m).ok_or_else(|| {
                Error::NotAnExpression(format!("unexpected term {c}*{m}"))
            })?;
            x[i] = c.clone();
        }
        Ok(Self::from_vec8(&x))
    }

    /// Symmetry image computed through polynomial substitution.
    pub fn substitute(&self, map: &LetterMap) -> Result<Self> {
        Self::from_polynomial(&self.to_polynomial().substitute(map))
    }
}

/// A Bell expression whose scalar kind is chosen at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyExpression {
    Exact(BellExpression<QSqrt2>),
    Float(BellExpression<f64>),
}

/// A behavior whose scalar kind is chosen at run time.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyBehavior {
    Exact(Behavior<QSqrt2>),
    Float(Behavior<f64>),
}

/// A scalar produced from run-time kinds; exact only when both inputs are.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyScalar {
    Exact(QSqrt2),
    Float(f64),
}

impl AnyScalar {
    pub fn to_f64(&self) -> f64 {
        match self {
            AnyScalar::Exact(x) => x.to_f64(),
            AnyScalar::Float(x) => *x,
        }
    }
}

impl fmt::Display for AnyScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyScalar::Exact(x) => write!(f, "{x}"),
            AnyScalar::Float(x) => write!(f, "{x}"),
        }
    }
}

impl AnyExpression {
    pub fn is_exact(&self) -> bool {
        matches!(self, AnyExpression::Exact(_))
    }

    pub fn to_float(&self) -> BellExpression<f64> {
        match self {
            AnyExpression::Exact(e) => e.to_float(),
            AnyExpression::Float(e) => e.clone(),
        }
    }

    /// Pairing; mixed kinds are promoted to float.
    pub fn pair(&self, p: &AnyBehavior) -> AnyScalar {
        match (self, p) {
            (AnyExpression::Exact(e), AnyBehavior::Exact(b)) => AnyScalar::Exact(e.pair(b)),
            _ => AnyScalar::Float(self.to_float().pair(&p.to_float())),
        }
    }
}

impl AnyBehavior {
    pub fn to_float(&self) -> Behavior<f64> {
        match self {
            AnyBehavior::Exact(b) => b.to_float(),
            AnyBehavior::Float(b) => b.clone(),
        }
    }
}

/// `β_CHSH = A0B0 + A0B1 + A1B0 − A1B1`.
pub fn chsh<T: Scalar>() -> BellExpression<T> {
    let o = T::one;
    BellExpression::new([T::zero(), T::zero()], [T::zero(), T::zero()], [[o(), o()], [o(), -o()]])
}

/// Zero marginals and `K = [[1,1],[1,−1]]/√2`.
pub fn tsirelson_point<T: Scalar>() -> Behavior<T> {
    let h = T::frac_1_sqrt2;
    Behavior::new(
        [T::zero(), T::zero()],
        [T::zero(), T::zero()],
        [[h(), h()], [h(), -h()]],
    )
}

/// Deterministic vertex `L_ijkl` with `⟨B_0⟩ = i`, `⟨B_1⟩ = j`, `⟨A_0⟩ = k`,
/// `⟨A_1⟩ = l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalVertex {
    pub i: i8,
    pub j: i8,
    pub k: i8,
    pub l: i8,
}

impl LocalVertex {
    pub fn new(i: i8, j: i8, k: i8, l: i8) -> Result<Self> {
        if [i, j, k, l].iter().any(|v| v.abs() != 1) {
            return Err(Error::InvalidArgument("vertex indices must be ±1".into()));
        }
        Ok(LocalVertex { i, j, k, l })
    }

    /// All 16 vertices, lexicographic in `(i, j, k, l)` with −1 before +1.
    pub fn all() -> Vec<LocalVertex> {
        let s = [-1i8, 1];
        let mut out = Vec::with_capacity(16);
        for &i in &s {
            for &j in &s {
                for &k in &s {
                    for &l in &s {
                        out.push(LocalVertex { i, j, k, l });
                    }
                }
            }
        }
        out
    }

    pub fn behavior<T: Scalar>(&self) -> Behavior<T> {
        let f = |v: i8| T::from_ratio(v as i64, 1);
        let m_a = [self.k, self.l];
        let m_b = [self.i, self.j];
        Behavior::new(
            m_a.map(f),
            m_b.map(f),
            std::array::from_fn(|x| std::array::from_fn(|y| f(m_a[x] * m_b[y]))),
        )
    }

    /// Qubit parameters producing this vertex: product state and angles 0 or π.
    pub fn qubit_params(&self) -> QubitParams {
        let ang = |v: i8| if v == 1 { 0.0 } else { std::f64::consts::PI };
        QubitParams::new(0.0, [ang(self.k), ang(self.l)], [ang(self.i), ang(self.j)])
    }
}

impl fmt::Display for LocalVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{},{},{})", self.i, self.j, self.k, self.l)
    }
}

/// Parameters `(θ, a0, a1, b0, b1)` of the state `cos θ|00⟩ + sin θ|11⟩`
/// measured with `cos φ·Z + sin φ·X`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QubitParams {
    pub theta: f64,
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl QubitParams {
    pub fn new(theta: f64, a: [f64; 2], b: [f64; 2]) -> Self {
        QubitParams { theta, a, b }
    }

    pub fn to_array(&self) -> [f64; 5] {
        [self.theta, self.a[0], self.a[1], self.b[0], self.b[1]]
    }

    pub fn from_array(x: [f64; 5]) -> Self {
        QubitParams::new(x[0], [x[1], x[2]], [x[3], x[4]])
    }

    /// `(π/4, π/4, −π/4, 0, π/2)`, realizing the Tsirelson point.
    pub fn tsirelson() -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        QubitParams::new(FRAC_PI_4, [FRAC_PI_4, -FRAC_PI_4], [0.0, FRAC_PI_2])
    }

    /// The joint rotation `(π/4, α, π/2+α, π/4+α, −π/4+α)`; every member
    /// realizes the Tsirelson point.
    pub fn rotated_tsirelson(alpha: f64) -> Self {
        use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
        QubitParams::new(
            FRAC_PI_4,
            [alpha, FRAC_PI_2 + alpha],
            [FRAC_PI_4 + alpha, -FRAC_PI_4 + alpha],
        )
    }

    pub fn behavior(&self) -> Behavior<f64> {
        let c2 = (2.0 * self.theta).cos();
        let s2 = (2.0 * self.theta).sin();
        let (sa, ca) = (self.a.map(f64::sin), self.a.map(f64::cos));
        let (sb, cb) = (self.b.map(f64::sin), self.b.map(f64::cos));
        Behavior::new(
            [c2 * ca[0], c2 * ca[1]],
            [c2 * cb[0], c2 * cb[1]],
            std::array::from_fn(|x| std::array::from_fn(|y| ca[x] * cb[y] + s2 * sa[x] * sb[y])),
        )
    }
}

/// Statistics of the qubit realization.
pub fn behavior_from_qubit(params: &QubitParams) -> Behavior<f64> {
    params.behavior()
}

/// `f(params) = β·P(params)`.
pub fn qubit_value(beta: &BellExpression<f64>, params: &QubitParams) -> f64 {
    beta.pair(&params.behavior())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GradientMode {
    Analytic,
    FiniteDifference,
}

/// Step of the central-difference gradient.
pub const GRADIENT_FD_STEP: f64 = 1e-5;
/// Step of the central-difference Hessian.
pub const HESSIAN_FD_STEP: f64 = 1e-4;

/// Gradient of `β·P(θ, a0, a1, b0, b1)` in parameter order.
pub fn grad_qubit(beta: &BellExpression<f64>, params: &QubitParams, mode: GradientMode) -> [f64; 5] {
    match mode {
        GradientMode::Analytic => grad_analytic(beta, params),
        GradientMode::FiniteDifference => {
            let x = params.to_array();
            let h = GRADIENT_FD_STEP;
            std::array::from_fn(|i| {
                let mut xp = x;
                let mut xm = x;
                xp[i] += h;
                xm[i] -= h;
                (qubit_value(beta, &QubitParams::from_array(xp))
                    - qubit_value(beta, &QubitParams::from_array(xm)))
                    / (2.0 * h)
            })
        }
    }
}

fn grad_analytic(beta: &BellExpression<f64>, p: &QubitParams) -> [f64; 5] {
    let (c2, s2) = ((2.0 * p.theta).cos(), (2.0 * p.theta).sin());
    let (sa, ca) = (p.a.map(f64::sin), p.a.map(f64::cos));
    let (sb, cb) = (p.b.map(f64::sin), p.b.map(f64::cos));
    let (a, b, c) = (&beta.a, &beta.b, &beta.c);
    let marg = a[0] * ca[0] + a[1] * ca[1] + b[0] * cb[0] + b[1] * cb[1];
    let mut corr_ss = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            corr_ss += c[x][y] * sa[x] * sb[y];
        }
    }
    let dtheta = -2.0 * s2 * marg + 2.0 * c2 * corr_ss;
    let da: [f64; 2] = std::array::from_fn(|x| {
        -a[x] * c2 * sa[x]
            + (0..2)
                .map(|y| c[x][y] * (-sa[x] * cb[y] + s2 * ca[x] * sb[y]))
                .sum::<f64>()
    });
    let db: [f64; 2] = std::array::from_fn(|y| {
        -b[y] * c2 * sb[y]
            + (0..2)
                .map(|x| c[x][y] * (-ca[x] * sb[y] + s2 * sa[x] * cb[y]))
                .sum::<f64>()
    });
    [dtheta, da[0], da[1], db[0], db[1]]
}

/// Symmetrized central-difference Hessian of `β·P(θ, a0, a1, b0, b1)`.
pub fn hessian_qubit_fd(beta: &BellExpression<f64>, params: &QubitParams) -> crate::linalg::Matrix {
    hessian_fd_of(|x| qubit_value(beta, &QubitParams::from_array(x)), params.to_array(), HESSIAN_FD_STEP)
}

pub(crate) fn hessian_fd_of(f: impl Fn([f64; 5]) -> f64, x: [f64; 5], h: f64) -> crate::linalg::Matrix {
    let eval = |di: usize, si: f64, dj: usize, sj: f64| {
        let mut y = x;
        y[di] += si * h;
        y[dj] += sj * h;
        f(y)
    };
    let mut m = crate::linalg::Matrix::zeros(5, 5);
    for i in 0..5 {
        for j in 0..5 {
            m[(i, j)] = if i == j {
                let mut yp = x;
                let mut ym = x;
                yp[i] += h;
                ym[i] -= h;
                (f(yp) - 2.0 * f(x) + f(ym)) / (h * h)
            } else {
                (eval(i, 1.0, j, 1.0) - eval(i, 1.0, j, -1.0) - eval(i, -1.0, j, 1.0)
                    + eval(i, -1.0, j, -1.0))
                    / (4.0 * h * h)
            };
        }
    }
    m.symmetrize()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsirelson_params_give_tsirelson_point() {
        let p = QubitParams::tsirelson().behavior();
        let t = tsirelson_point::<f64>();
        for (u, v) in p.to_vec8().iter().zip(t.to_vec8()) {
            assert!((u - v).abs() < 1e-15);
        }
        for alpha in [0.0, 0.3, 2.0] {
            let p = QubitParams::rotated_tsirelson(alpha).behavior();
            for (u, v) in p.to_vec8().iter().zip(t.to_vec8()) {
                assert!((u - v).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn product_state_is_all_ones() {
        let p = QubitParams::new(0.0, [0.0; 2], [0.0; 2]).behavior();
        assert!(p.to_vec8().iter().all(|&v| v == 1.0));
        assert_eq!(p, LocalVertex::new(1, 1, 1, 1).unwrap().behavior());
    }

    #[test]
    fn vertex_tables() {
        let q = |n| QSqrt2::from_int(n);
        let v = LocalVertex::new(-1, -1, -1, 1).unwrap().behavior::<QSqrt2>();
        assert_eq!(v.m_b, [q(-1), q(-1)]);
        assert_eq!(v.m_a, [q(-1), q(1)]);
        assert_eq!(v.k, [[q(1), q(1)], [q(-1), q(-1)]]);
        for lv in LocalVertex::all() {
            let from_params = lv.qubit_params().behavior();
            for (u, w) in from_params.to_vec8().iter().zip(lv.behavior::<f64>().to_vec8()) {
                assert!((u - w).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn chsh_values() {
        let beta = chsh::<QSqrt2>();
        assert_eq!(beta.pair(&tsirelson_point()), QSqrt2::from_parts(0, 1, 2, 1));
        let (v, argmax) = beta.local_bound();
        assert_eq!(v, QSqrt2::from_int(2));
        assert_eq!(argmax.len(), 8);
        assert_eq!(beta.symmetry(), beta);
        assert_eq!(tsirelson_point::<QSqrt2>().symmetry(), tsirelson_point());
    }

    #[test]
    fn single_correlator_bound() {
        let mut beta = BellExpression::<QSqrt2>::zero();
        beta.c[0][0] = QSqrt2::one();
        let (v, argmax) = beta.local_bound();
        assert_eq!(v, QSqrt2::one());
        assert_eq!(argmax.len(), 8);
        assert!(argmax.iter().all(|lv| lv.i * lv.k == 1));
    }

    #[test]
    fn letter_map_agrees_with_polynomial_substitution() {
        let beta = BellExpression::<QSqrt2>::from_vec8(&std::array::from_fn(|i| {
            QSqrt2::from_parts(i as i64 + 1, 3, 1 - i as i64, 5)
        }));
        let map = LetterMap::tsirelson_symmetry();
        assert_eq!(beta.apply_letter_map(&map), beta.substitute(&map).unwrap());
        assert_eq!(beta.symmetry_pow(8), beta);
        assert_ne!(beta.symmetry_pow(4), beta);
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let beta = BellExpression::from_vec8(&[0.3, -0.7, 0.2, 0.9, 1.1, -0.4, 0.5, -1.3]);
        let p = QubitParams::new(0.37, [1.2, -2.1], [0.4, 2.9]);
        let ga = grad_qubit(&beta, &p, GradientMode::Analytic);
        let gf = grad_qubit(&beta, &p, GradientMode::FiniteDifference);
        for (x, y) in ga.iter().zip(gf) {
            assert!((x - y).abs() < 1e-8);
        }
    }

    #[test]
    fn hessian_of_zero_expression_vanishes() {
        let h = hessian_qubit_fd(&BellExpression::zero(), &QubitParams::tsirelson());
        assert_eq!(h.max_abs(), 0.0);
    }
}
