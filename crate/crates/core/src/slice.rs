//! The affine family of Bell expressions saturated by the Tsirelson point,
//! its local-bound octagon, and the exact checks built on it.
//!
//! With `u = (A0+A1)/√2` and `v = (A0−A1)/√2` the extended family is
//!
//! ```text
//! β = r0(u − B0) + r1(v − B1) + r2(u B1 + v B0) + λ u B0 + (1−λ) v B1
//! ```
//!
//! and the two-parameter slice fixes `r2 = 0`, `λ = 1/2`, which turns the last
//! two terms into `β_CHSH / (2√2)`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::exact::{ExactMatrix, Letter, NCPolynomial, QSqrt2};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::scenario::{chsh, tsirelson_point, BellExpression, Behavior, LocalVertex};

#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedSliceParams<T> {
    pub r0: T,
    pub r1: T,
    pub r2: T,
    pub lambda: T,
}

/// Coefficients of the Bell operator on two qubits in the order
/// `Z_A, X_A, Z_B, X_B, Z_AZ_B, X_AX_B, Z_AX_B, X_AZ_B`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliCoeffs<T>(pub [T; 8]);

pub fn expr_from_extended<T: Scalar>(p: &ExtendedSliceParams<T>) -> BellExpression<T> {
    let h = T::frac_1_sqrt2();
    let r0 = p.r0.clone() * h.clone();
    let r1 = p.r1.clone() * h.clone();
    let r2 = p.r2.clone() * h.clone();
    let l = p.lambda.clone() * h.clone();
    let ml = (T::one() - p.lambda.clone()) * h;
    BellExpression::new(
        [r0.clone() + r1.clone(), r0 - r1],
        [-p.r0.clone(), -p.r1.clone()],
        [
            [r2.clone() + l.clone(), r2.clone() + ml.clone()],
            [l - r2.clone(), r2 - ml],
        ],
    )
}

/// Same family, assembled as a formal polynomial in the observables.
pub fn extended_polynomial(p: &ExtendedSliceParams<QSqrt2>) -> NCPolynomial {
    use Letter::*;
    let h = QSqrt2::frac_1_sqrt2();
    let l = |x| NCPolynomial::letter(x);
    let u = (l(A0) + l(A1)).scale(&h);
    let v = (l(A0) - l(A1)).scale(&h);
    let one = QSqrt2::one();
    (&u - &l(B0)).scale(&p.r0)
        + (&v - &l(B1)).scale(&p.r1)
        + (&u * &l(B1) + &v * &l(B0)).scale(&p.r2)
        + (&u * &l(B0)).scale(&p.lambda)
        + (&v * &l(B1)).scale(&(one - &p.lambda))
}

/// `β_{r0,r1}`: the extended family at `r2 = 0`, `λ = 1/2`.
pub fn expr_from_slice<T: Scalar>(r0: T, r1: T) -> BellExpression<T> {
    expr_from_extended(&ExtendedSliceParams {
        r0,
        r1,
        r2: T::zero(),
        lambda: T::from_ratio(1, 2),
    })
}

/// `1 − 1/√2`, the circumradius of the octagon.
pub fn octagon_radius<T: Scalar>() -> T {
    T::one() - T::frac_1_sqrt2()
}

/// The extremal expression `β_{1−1/√2, 0}`.
pub fn beta_t<T: Scalar>() -> BellExpression<T> {
    expr_from_slice(octagon_radius(), T::zero())
}

/// `β_CHSH / (2√2)`, the centre of the slice.
pub fn normalized_chsh<T: Scalar>() -> BellExpression<T> {
    chsh::<T>().scale(&(T::frac_1_sqrt2() * T::from_ratio(1, 2)))
}

pub fn pauli_coeffs<T: Scalar>(beta: &BellExpression<T>) -> PauliCoeffs<T> {
    let h = T::frac_1_sqrt2();
    let (a, b, c) = (&beta.a, &beta.b, &beta.c);
    let sum = |x: &T, y: &T| (x.clone() + y.clone()) * h.clone();
    let diff = |x: &T, y: &T| (x.clone() - y.clone()) * h.clone();
    PauliCoeffs([
        sum(&a[0], &a[1]),
        diff(&a[0], &a[1]),
        b[0].clone(),
        b[1].clone(),
        sum(&c[0][0], &c[1][0]),
        diff(&c[0][1], &c[1][1]),
        sum(&c[0][1], &c[1][1]),
        diff(&c[0][0], &c[1][0]),
    ])
}

/// `(p1+p3, p2+p4, p5+p6−1, p7−p8)`; all zero iff `Ŝ|φ⁺⟩ = |φ⁺⟩`.
pub fn eigenstate_residuals<T: Scalar>(p: &PauliCoeffs<T>) -> [T; 4] {
    let p = &p.0;
    [
        p[0].clone() + p[2].clone(),
        p[1].clone() + p[3].clone(),
        p[4].clone() + p[5].clone() - T::one(),
        p[6].clone() - p[7].clone(),
    ]
}

fn kron2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> Matrix {
    Matrix::from_fn(4, 4, |i, j| a[i / 2][j / 2] * b[i % 2][j % 2])
}

/// Bell operator in the basis `|00⟩, |01⟩, |10⟩, |11⟩` (Alice first).
pub fn bell_operator_matrix(p: &PauliCoeffs<f64>) -> Matrix {
    let i2 = [[1.0, 0.0], [0.0, 1.0]];
    let z = [[1.0, 0.0], [0.0, -1.0]];
    let x = [[0.0, 1.0], [1.0, 0.0]];
    let terms = [
        kron2(&z, &i2),
        kron2(&x, &i2),
        kron2(&i2, &z),
        kron2(&i2, &x),
        kron2(&z, &z),
        kron2(&x, &x),
        kron2(&z, &x),
        kron2(&x, &z),
    ];
    let mut m = Matrix::zeros(4, 4);
    for (c, t) in p.0.iter().zip(&terms) {
        m.axpy(*c, t);
    }
    m
}

/// Rows `∂P/∂θ, ∂P/∂a0, ∂P/∂a1, ∂P/∂b0, ∂P/∂b1` of the qubit family in
/// correlator coordinates, from the cosines and sines of `2θ`, `a_x`, `b_y`.
pub fn qubit_jacobian<T: Scalar>(
    (c2, s2): (T, T),
    ca: [T; 2],
    sa: [T; 2],
    cb: [T; 2],
    sb: [T; 2],
) -> [[T; 8]; 5] {
    let z = T::zero;
    let two = T::from_ratio(2, 1);
    let mut rows: [[T; 8]; 5] = std::array::from_fn(|_| std::array::from_fn(|_| z()));
    // θ
    let mt = -(two.clone() * s2.clone());
    rows[0][0] = mt.clone() * ca[0].clone();
    rows[0][1] = mt.clone() * ca[1].clone();
    rows[0][2] = mt.clone() * cb[0].clone();
    rows[0][3] = mt * cb[1].clone();
    for x in 0..2 {
        for y in 0..2 {
            rows[0][4 + 2 * x + y] = two.clone() * c2.clone() * sa[x].clone() * sb[y].clone();
        }
    }
    for x in 0..2 {
        let r = &mut rows[1 + x];
        r[x] = -(c2.clone() * sa[x].clone());
        for y in 0..2 {
            r[4 + 2 * x + y] =
                -(sa[x].clone() * cb[y].clone()) + s2.clone() * ca[x].clone() * sb[y].clone();
        }
    }
    for y in 0..2 {
        let r = &mut rows[3 + y];
        r[2 + y] = -(c2.clone() * sb[y].clone());
        for x in 0..2 {
            r[4 + 2 * x + y] =
                -(ca[x].clone() * sb[y].clone()) + s2.clone() * sa[x].clone() * cb[y].clone();
        }
    }
    rows
}

/// Exact Jacobian at angles `θ = kθ·π/4`, `a_x = ka_x·π/4`, `b_y = kb_y·π/4`.
pub fn qubit_jacobian_exact(k_theta: i64, ka: [i64; 2], kb: [i64; 2]) -> [[QSqrt2; 8]; 5] {
    let cs = QSqrt2::cos_sin_quarter_pi;
    let (ca0, sa0) = cs(ka[0]);
    let (ca1, sa1) = cs(ka[1]);
    let (cb0, sb0) = cs(kb[0]);
    let (cb1, sb1) = cs(kb[1]);
    qubit_jacobian(cs(2 * k_theta), [ca0, ca1], [sa0, sa1], [cb0, cb1], [sb0, sb1])
}

/// Outcome of the first-order stationarity analysis at the Tsirelson point.
#[derive(Clone, Debug, PartialEq)]
pub struct StationarityReport {
    /// Rows `[r0, r1, r2, λ | rhs]`, one per parameter derivative.
    pub equations: Vec<Vec<QSqrt2>>,
    pub lambda: QSqrt2,
    pub r2: QSqrt2,
    /// Rank of the coefficient block in `(r2, λ)`.
    pub rank: usize,
    /// `r0` and `r1` drop out of every equation.
    pub r0_r1_free: bool,
}

/// Solves `β·∂P/∂param = 0` at the Tsirelson parameters for the extended
/// family. The system is affine in `(r0, r1, r2, λ)`.
pub fn stationarity_reduce() -> Result<StationarityReport> {
    let jac = qubit_jacobian_exact(1, [1, -1], [0, 2]);
    let e = |r0, r1, r2, l| {
        expr_from_extended(&ExtendedSliceParams {
            r0: QSqrt2::from_int(r0),
            r1: QSqrt2::from_int(r1),
            r2: QSqrt2::from_int(r2),
            lambda: QSqrt2::from_int(l),
        })
        .to_vec8()
    };
    let base = e(0, 0, 0, 0);
    let sub = |v: [QSqrt2; 8]| -> [QSqrt2; 8] { std::array::from_fn(|i| &v[i] - &base[i]) };
    let dirs = [sub(e(1, 0, 0, 0)), sub(e(0, 1, 0, 0)), sub(e(0, 0, 1, 0)), sub(e(0, 0, 0, 1))];
    let dot = |u: &[QSqrt2; 8], v: &[QSqrt2; 8]| -> QSqrt2 { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    let equations: Vec<Vec<QSqrt2>> = jac
        .iter()
        .map(|row| {
            let mut eq: Vec<QSqrt2> = dirs.iter().map(|d| dot(d, row)).collect();
            eq.push(-dot(&base, row));
            eq
        })
        .collect();
    let r0_r1_free = equations.iter().all(|eq| eq[0].is_zero() && eq[1].is_zero());
    let block: Vec<Vec<QSqrt2>> = equations.iter().map(|eq| eq[2..4].to_vec()).collect();
    let rank = ExactMatrix::from_rows(block)?.rank();
    let augmented: Vec<Vec<QSqrt2>> = equations.iter().map(|eq| eq[2..].to_vec()).collect();
    let rref = ExactMatrix::from_rows(augmented)?.rref();
    if rref.pivots.contains(&2) {
        return Err(Error::InvalidArgument("stationarity system is inconsistent".into()));
    }
    if rref.pivots != [0, 1] {
        return Err(Error::InvalidArgument("stationarity system is underdetermined".into()));
    }
    Ok(StationarityReport {
        r2: rref.matrix[(0, 2)].clone(),
        lambda: rref.matrix[(1, 2)].clone(),
        equations,
        rank,
        r0_r1_free,
    })
}

/// Half-plane `g·(r0, r1) ≤ d`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfPlane<T> {
    pub g: [T; 2],
    pub d: T,
    /// Vertices inducing this constraint.
    pub sources: Vec<LocalVertex>,
}

/// Constraint `β_{r0,r1}·L ≤ 1` for every local vertex, merging coincident
/// half-planes and dropping those with `g = 0` (which hold identically).
pub fn local_halfplanes<T: Scalar>() -> Vec<HalfPlane<T>> {
    let centre = normalized_chsh::<T>();
    let e0 = expr_from_slice(T::one(), T::zero()).sub(&centre);
    let e1 = expr_from_slice(T::zero(), T::one()).sub(&centre);
    let mut out: Vec<HalfPlane<T>> = Vec::new();
    for lv in LocalVertex::all() {
        let l = lv.behavior::<T>();
        let g = [e0.pair(&l), e1.pair(&l)];
        let d = T::one() - centre.pair(&l);
        if g.iter().all(|x| x.is_zero_within(1e-12)) {
            assert!(d.compare(&T::zero()) != Ordering::Less, "slice has an empty local region");
            continue;
        }
        match out.iter_mut().find(|h| same_halfplane(h, &g, &d)) {
            Some(h) => h.sources.push(lv),
            None => out.push(HalfPlane { g, d, sources: vec![lv] }),
        }
    }
    out
}

fn same_halfplane<T: Scalar>(h: &HalfPlane<T>, g: &[T; 2], d: &T) -> bool {
    let tol = 1e-12;
    let cross = h.g[0].clone() * g[1].clone() - h.g[1].clone() * g[0].clone();
    let same_dir = (h.g[0].clone() * g[0].clone() + h.g[1].clone() * g[1].clone())
        .compare(&T::zero())
        == Ordering::Greater;
    // g = f·h.g with f > 0; then d must equal f·h.d.
    let scaled = |x: &T, hx: &T| x.clone() * h.d.clone() - hx.clone() * d.clone();
    cross.is_zero_within(tol)
        && same_dir
        && scaled(&g[0], &h.g[0]).is_zero_within(tol)
        && scaled(&g[1], &h.g[1]).is_zero_within(tol)
}

/// Position of a point relative to a convex region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Interior,
    Boundary,
    Outside,
}

pub fn in_octagon<T: Scalar>(r0: &T, r1: &T) -> Region {
    classify(&local_halfplanes::<T>(), r0, r1)
}

fn slack<T: Scalar>(h: &HalfPlane<T>, r0: &T, r1: &T) -> T {
    h.d.clone() - h.g[0].clone() * r0.clone() - h.g[1].clone() * r1.clone()
}

fn classify<T: Scalar>(planes: &[HalfPlane<T>], r0: &T, r1: &T) -> Region {
    let tol = 1e-9;
    let mut on_boundary = false;
    for h in planes {
        let s = slack(h, r0, r1);
        if s.is_zero_within(tol) {
            on_boundary = true;
        } else if s.compare(&T::zero()) == Ordering::Less {
            return Region::Outside;
        }
    }
    if on_boundary {
        Region::Boundary
    } else {
        Region::Interior
    }
}

/// Vertex of the local-bound polygon with the indices of the half-planes it
/// saturates.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonVertex<T> {
    pub r0: T,
    pub r1: T,
    pub active: Vec<usize>,
}

/// Vertices of `{(r0, r1) : β_{r0,r1}·L ≤ 1 ∀L}` by pairwise intersection and
/// feasibility filtering, sorted by angle from the positive `r0` axis.
pub fn octagon_vertices() -> Vec<PolygonVertex<QSqrt2>> {
    let planes = local_halfplanes::<QSqrt2>();
    let mut pts: Vec<(QSqrt2, QSqrt2)> = Vec::new();
    for i in 0..planes.len() {
        for j in i + 1..planes.len() {
            let (a, b) = (&planes[i], &planes[j]);
            let det = &a.g[0] * &b.g[1] - &a.g[1] * &b.g[0];
            let Ok(inv) = det.inv() else { continue };
            let x = (&a.d * &b.g[1] - &a.g[1] * &b.d) * &inv;
            let y = (&a.g[0] * &b.d - &a.d * &b.g[0]) * &inv;
            let feasible = planes.iter().all(|h| !slack(h, &x, &y).is_negative());
            if feasible && !pts.contains(&(x.clone(), y.clone())) {
                pts.push((x, y));
            }
        }
    }
    pts.sort_by(|p, q| angle_cmp(p, q));
    pts.into_iter()
        .map(|(r0, r1)| {
            let active = planes
                .iter()
                .enumerate()
                .filter(|(_, h)| slack(h, &r0, &r1).is_zero())
                .map(|(k, _)| k)
                .collect();
            PolygonVertex { r0, r1, active }
        })
        .collect()
}

/// Exact comparison of polar angles in `[0, 2π)`.
fn angle_cmp(p: &(QSqrt2, QSqrt2), q: &(QSqrt2, QSqrt2)) -> Ordering {
    let half = |(x, y): &(QSqrt2, QSqrt2)| {
        if y.is_positive() || (y.is_zero() && x.is_positive()) {
            0
        } else {
            1
        }
    };
    half(p).cmp(&half(q)).then_with(|| {
        let cross = &p.0 * &q.1 - &p.1 * &q.0;
        0.cmp(&cross.signum())
    })
}

/// `R_{π/4}(r0, r1)`.
pub fn rotate_quarter_pi<T: Scalar>(r0: &T, r1: &T) -> (T, T) {
    let h = T::frac_1_sqrt2();
    (
        (r0.clone() - r1.clone()) * h.clone(),
        (r0.clone() + r1.clone()) * h,
    )
}

/// `(r0, r1)` such that `β = β_{r0,r1}` if β lies in the slice (exactly, or
/// within `1e-10` for floats).
pub fn slice_coords_of<T: Scalar>(beta: &BellExpression<T>) -> Option<(T, T)> {
    let r0 = -beta.b[0].clone();
    let r1 = -beta.b[1].clone();
    let back = expr_from_slice(r0.clone(), r1.clone());
    let ok = beta
        .to_vec8()
        .iter()
        .zip(back.to_vec8())
        .all(|(u, v)| u.close_to(&v, 1e-10));
    ok.then_some((r0, r1))
}

/// Checks of the decomposition of the centre into two opposite summits.
#[derive(Clone, Debug, PartialEq)]
pub struct DecompositionReport {
    /// `(β_T + S⁴β_T)/2 = β_CHSH/(2√2)`.
    pub normalized_identity: bool,
    /// `(β_T + S⁴β_T)/2 = β_CHSH`, the unnormalized reading.
    pub unnormalized_identity: bool,
    /// `β_CHSH` divided by the midpoint, when they are proportional.
    pub scale_factor: Option<QSqrt2>,
    /// `S⁴β_T = β_{−(1−1/√2), 0}`.
    pub s4_negates_coords: bool,
    pub midpoint_coords: Option<(QSqrt2, QSqrt2)>,
}

impl DecompositionReport {
    pub fn passed(&self) -> bool {
        self.normalized_identity
            && self.s4_negates_coords
            && self.midpoint_coords == Some((QSqrt2::zero(), QSqrt2::zero()))
    }
}

pub fn chsh_decompose_check() -> DecompositionReport {
    let bt = beta_t::<QSqrt2>();
    let s4 = bt.symmetry_pow(4);
    let mid = bt.add(&s4).scale(&QSqrt2::from_ratio(1, 2));
    let full = chsh::<QSqrt2>();
    let scale_factor = {
        let f = full.c[0][0].checked_div(&mid.c[0][0]).ok();
        f.filter(|f| mid.scale(f) == full)
    };
    DecompositionReport {
        normalized_identity: mid == normalized_chsh(),
        unnormalized_identity: mid == full,
        scale_factor,
        s4_negates_coords: s4 == expr_from_slice(-octagon_radius::<QSqrt2>(), QSqrt2::zero()),
        midpoint_coords: slice_coords_of(&mid),
    }
}

/// Checks that β_T is exposed by a point of the quantum set and is the only
/// slice member reaching 1 on both of its local maximizers.
#[derive(Clone, Debug, PartialEq)]
pub struct ExposureReport {
    pub p_star: Behavior<QSqrt2>,
    pub pair_beta_t_p_star: QSqrt2,
    /// Solution of `β_{r0,r1}·L = 1` for both local maximizers of β_T.
    pub unique_solution: Option<(QSqrt2, QSqrt2)>,
    pub solution_on_boundary: bool,
    /// Affine dimension of the octagon in the `(r0, r1)` plane.
    pub octagon_dimension: usize,
}

impl ExposureReport {
    pub fn passed(&self) -> bool {
        self.pair_beta_t_p_star == QSqrt2::one()
            && self.unique_solution == Some((octagon_radius(), QSqrt2::zero()))
            && self.solution_on_boundary
            && self.octagon_dimension == 2
    }
}

/// The two local vertices attaining 1 on β_T.
pub fn beta_t_local_maximizers() -> [LocalVertex; 2] {
    [
        LocalVertex { i: -1, j: -1, k: -1, l: 1 },
        LocalVertex { i: -1, j: 1, k: 1, l: -1 },
    ]
}

pub fn expose_check() -> Result<ExposureReport> {
    let [l1, l2] = beta_t_local_maximizers().map(|v| v.behavior::<QSqrt2>());
    let third = QSqrt2::from_ratio(1, 3);
    let pt = tsirelson_point::<QSqrt2>();
    let p_star = Behavior::from_vec8(&std::array::from_fn(|i| {
        (&pt.to_vec8()[i] + &l1.to_vec8()[i] + &l2.to_vec8()[i]) * &third
    }));
    let pair_beta_t_p_star = beta_t::<QSqrt2>().pair(&p_star);

    let centre = normalized_chsh::<QSqrt2>();
    let e0 = expr_from_slice(QSqrt2::one(), QSqrt2::zero()).sub(&centre);
    let e1 = expr_from_slice(QSqrt2::zero(), QSqrt2::one()).sub(&centre);
    let rows: Vec<Vec<QSqrt2>> = [&l1, &l2]
        .iter()
        .map(|l| vec![e0.pair(l), e1.pair(l), QSqrt2::one() - centre.pair(l)])
        .collect();
    let rref = ExactMatrix::from_rows(rows)?.rref();
    let unique_solution = (rref.pivots == [0, 1])
        .then(|| (rref.matrix[(0, 2)].clone(), rref.matrix[(1, 2)].clone()));
    let solution_on_boundary = unique_solution
        .as_ref()
        .is_some_and(|(x, y)| in_octagon(x, y) == Region::Boundary);

    let verts = octagon_vertices();
    let diffs: Vec<Vec<QSqrt2>> = verts
        .iter()
        .skip(1)
        .map(|v| vec![&v.r0 - &verts[0].r0, &v.r1 - &verts[0].r1])
        .collect();
    let octagon_dimension = ExactMatrix::from_rows(diffs)?.rank();
    Ok(ExposureReport {
        p_star,
        pair_beta_t_p_star,
        unique_solution,
        solution_on_boundary,
        octagon_dimension,
    })
}

/// `S^k β` for `k = 0..8` with their slice coordinates.
pub fn orbit<T: Scalar>(beta: &BellExpression<T>) -> Vec<(BellExpression<T>, Option<(T, T)>)> {
    let mut out = Vec::with_capacity(8);
    let mut cur = beta.clone();
    for _ in 0..8 {
        let coords = slice_coords_of(&cur);
        let next = cur.symmetry();
        out.push((cur, coords));
        cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(s: &str) -> QSqrt2 {
        s.parse().unwrap()
    }

    #[test]
    fn polynomial_and_closed_form_agree() {
        let p = ExtendedSliceParams {
            r0: q("1/3+1/5*s2"),
            r1: q("-2/7"),
            r2: q("3/4*s2"),
            lambda: q("5/9-1/2*s2"),
        };
        let poly = extended_polynomial(&p);
        assert_eq!(BellExpression::from_polynomial(&poly).unwrap(), expr_from_extended(&p));
    }

    #[test]
    fn beta_t_coefficients() {
        let bt = beta_t::<QSqrt2>();
        assert_eq!(bt.a, [q("-1/2+1/2*s2"), q("-1/2+1/2*s2")]);
        assert_eq!(bt.b, [q("-1/1+1/2*s2"), q("0/1")]);
        let s = q("1/4*s2");
        assert_eq!(bt.c, [[s.clone(), s.clone()], [s.clone(), -s]]);
    }

    #[test]
    fn chsh_is_centre() {
        assert_eq!(expr_from_slice(QSqrt2::zero(), QSqrt2::zero()), normalized_chsh());
        let p = pauli_coeffs(&chsh::<QSqrt2>());
        let s2 = QSqrt2::sqrt2();
        let z = QSqrt2::zero();
        assert_eq!(
            p.0,
            [z.clone(), z.clone(), z.clone(), z.clone(), s2.clone(), s2.clone(), z.clone(), z.clone()]
        );
        let r = eigenstate_residuals(&p);
        assert_eq!(r[2], q("-1/1+2/1*s2"));
        assert!(slice_coords_of(&chsh::<QSqrt2>()).is_none());
    }

    #[test]
    fn octagon_shape() {
        let v = octagon_vertices();
        assert_eq!(v.len(), 8);
        assert_eq!((v[0].r0.clone(), v[0].r1.clone()), (q("1/1-1/2*s2"), q("0/1")));
        assert_eq!(v[1].r0, q("-1/2+1/2*s2"));
        assert_eq!(v[1].r1, q("-1/2+1/2*s2"));
        assert!(v.iter().all(|p| p.active.len() == 2));
    }

    #[test]
    fn region_classification() {
        let z = QSqrt2::zero();
        assert_eq!(in_octagon(&z, &z), Region::Interior);
        assert_eq!(in_octagon(&q("1/1-1/2*s2"), &z), Region::Boundary);
        assert_eq!(in_octagon(&q("3/10"), &z), Region::Outside);
        assert_eq!(in_octagon(&0.3, &0.0), Region::Outside);
    }

    #[test]
    fn stationarity_solution() {
        let r = stationarity_reduce().unwrap();
        assert_eq!(r.lambda, QSqrt2::from_ratio(1, 2));
        assert_eq!(r.r2, QSqrt2::zero());
        assert_eq!(r.rank, 2);
        assert!(r.r0_r1_free);
    }

    #[test]
    fn decomposition_and_exposure() {
        let d = chsh_decompose_check();
        assert!(d.passed());
        assert!(!d.unnormalized_identity);
        assert_eq!(d.scale_factor, Some(q("0/1+2/1*s2")));
        assert!(expose_check().unwrap().passed());
    }

    #[test]
    fn bell_operator_centre() {
        let m = bell_operator_matrix(&pauli_coeffs(&normalized_chsh::<f64>()));
        let e = crate::linalg::eig_sym(&m).unwrap();
        assert!((e.max() - 1.0).abs() < 1e-12);
        let phi = [std::f64::consts::FRAC_1_SQRT_2, 0.0, 0.0, std::f64::consts::FRAC_1_SQRT_2];
        let mphi = m.mul_vec(&phi);
        assert!(crate::linalg::dist(&mphi, &phi) < 1e-14);
    }
}
