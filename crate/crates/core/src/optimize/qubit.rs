//! Maximization of Bell expressions over the two-qubit family
//! `cos θ|00⟩ + sin θ|11⟩` with real `Z–X` plane measurements.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certificates::{generating_sequence, state_action_float};
use crate::linalg::dist;
use crate::scenario::{grad_qubit, qubit_value, tsirelson_point, Behavior, BellExpression, GradientMode, LocalVertex, QubitParams};
use crate::slice::beta_t;

/// Behavior distance under which two maximizers are the same point.
pub const DEDUP_DISTANCE: f64 = 1e-6;
/// Behavior distance used to cluster maximizers in a face scan.
pub const CLUSTER_DISTANCE: f64 = 1e-5;

/// Gradient norm at which an ascent stops.
const GRAD_TOL: f64 = 1e-11;
const MAX_ASCENT_ITERS: usize = 20_000;
/// Sufficient-increase constant of the backtracking line search.
const ARMIJO: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct Maximizer {
    pub params: QubitParams,
    pub behavior: Behavior<f64>,
    pub value: f64,
}

#[derive(Clone, Debug)]
pub struct QubitMaxResult {
    pub value: f64,
    /// Distinct local maximizers within `tol` of `value`, best first.
    pub maximizers: Vec<Maximizer>,
    pub starts: usize,
}

/// Multi-start gradient ascent with seed 0.
pub fn qubit_max(beta: &BellExpression<f64>, restarts: usize, tol: f64) -> QubitMaxResult {
    qubit_max_seeded(beta, restarts, tol, 0)
}

/// Multi-start gradient ascent from `max(restarts, 50)` shifted Halton points
/// plus a fixed grid. The shift is drawn from ChaCha8 seeded with `seed`.
pub fn qubit_max_seeded(beta: &BellExpression<f64>, restarts: usize, tol: f64, seed: u64) -> QubitMaxResult {
    let starts = start_points(restarts.max(50), seed);
    let mut found: Vec<Maximizer> = starts.iter().map(|x| ascend(beta, *x)).collect();
    found.sort_by(|a, b| b.value.total_cmp(&a.value));
    let best = found.first().map_or(f64::NEG_INFINITY, |m| m.value);
    let mut maximizers: Vec<Maximizer> = Vec::new();
    for m in found.into_iter().take_while(|m| m.value >= best - tol) {
        if maximizers.iter().all(|k| dist(&k.behavior.to_vec8(), &m.behavior.to_vec8()) > DEDUP_DISTANCE) {
            maximizers.push(m);
        }
    }
    QubitMaxResult { value: best, maximizers, starts: starts.len() }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut out = 0.0;
    let mut f = inv;
    while i > 0 {
        out += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    out
}

fn start_points(halton: usize, seed: u64) -> Vec<[f64; 5]> {
    const BASES: [u64; 5] = [2, 3, 5, 7, 11];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: [f64; 5] = std::array::from_fn(|_| rng.random::<f64>());
    let mut out: Vec<[f64; 5]> = (1..=halton as u64)
        .map(|i| {
            let u: [f64; 5] = std::array::from_fn(|d| (radical_inverse(i, BASES[d]) + shift[d]).fract());
            [u[0] * PI / 2.0, u[1] * TAU, u[2] * TAU, u[3] * TAU, u[4] * TAU]
        })
        .collect();
    // Grid offset from the multiples of π/4 where many stationary points sit.
    let angles = [0.1, 0.1 + PI / 2.0, 0.1 + PI, 0.1 + 1.5 * PI];
    for theta in [0.3, 1.1] {
        for a0 in angles {
            for a1 in angles {
                for b0 in angles {
                    for b1 in angles {
                        out.push([theta, a0, a1, b0, b1]);
                    }
                }
            }
        }
    }
    out
}

fn canonical(x: [f64; 5]) -> QubitParams {
    let theta = x[0].rem_euclid(PI);
    QubitParams::from_array([theta, x[1].rem_euclid(TAU), x[2].rem_euclid(TAU), x[3].rem_euclid(TAU), x[4].rem_euclid(TAU)])
}

/// Gradient ascent from `x0` with Barzilai–Borwein trial steps and
/// backtracking to a sufficient increase.
fn ascend(beta: &BellExpression<f64>, x0: [f64; 5]) -> Maximizer {
    let value = |x: [f64; 5]| qubit_value(beta, &QubitParams::from_array(x));
    let grad = |x: [f64; 5]| grad_qubit(beta, &QubitParams::from_array(x), GradientMode::Analytic);
    let mut x = x0;
    let mut f = value(x);
    let mut g = grad(x);
    let mut trial: f64 = 1.0;
    for _ in 0..MAX_ASCENT_ITERS {
        let g2: f64 = g.iter().map(|v| v * v).sum();
        if g2.sqrt() < GRAD_TOL {
            break;
        }
        let mut t = trial;
        let accepted = loop {
            let y: [f64; 5] = std::array::from_fn(|i| x[i] + t * g[i]);
            let fy = value(y);
            if fy >= f + ARMIJO * t * g2 {
                break Some((y, fy));
            }
            t *= 0.5;
            if t < 1e-18 {
                break None;
            }
        };
        let Some((y, fy)) = accepted else { break };
        let gy = grad(y);
        // Ascent on f is descent on −f: the BB step is s·s / (−s·Δg).
        let (mut ss, mut sy) = (0.0, 0.0);
        for i in 0..5 {
            let s = y[i] - x[i];
            ss += s * s;
            sy -= s * (gy[i] - g[i]);
        }
        trial = if sy > 0.0 { (ss / sy).clamp(1e-6, 1e6) } else { (2.0 * t).min(16.0) };
        x = y;
        f = fy;
        g = gy;
    }
    let params = canonical(x);
    Maximizer { behavior: params.behavior(), value: value(x), params }
}

/// What a face-scan cluster center coincides with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum PointKind {
    TsirelsonPoint,
    LocalVertex(LocalVertex),
    Other,
}

impl std::fmt::Display for PointKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PointKind::TsirelsonPoint => write!(f, "P_T"),
            PointKind::LocalVertex(v) => write!(f, "{v}"),
            PointKind::Other => write!(f, "other"),
        }
    }
}

pub fn classify(p: &Behavior<f64>, radius: f64) -> PointKind {
    let x = p.to_vec8();
    if dist(&x, &tsirelson_point::<f64>().to_vec8()) <= radius {
        return PointKind::TsirelsonPoint;
    }
    LocalVertex::all()
        .into_iter()
        .find(|v| dist(&x, &v.behavior::<f64>().to_vec8()) <= radius)
        .map_or(PointKind::Other, PointKind::LocalVertex)
}

#[derive(Clone, Debug)]
pub struct Cluster {
    pub center: Maximizer,
    pub members: usize,
    pub kind: PointKind,
}

#[derive(Clone, Debug)]
pub struct FaceScanReport {
    pub value: f64,
    /// Sorted by kind (`P_T`, local vertices, others) then by behavior.
    pub clusters: Vec<Cluster>,
}

pub fn face_scan(beta: &BellExpression<f64>, restarts: usize, tol: f64, seed: u64) -> FaceScanReport {
    let res = qubit_max_seeded(beta, restarts, tol, seed);
    let mut clusters: Vec<Cluster> = Vec::new();
    for m in res.maximizers {
        match clusters
            .iter_mut()
            .find(|c| dist(&c.center.behavior.to_vec8(), &m.behavior.to_vec8()) <= CLUSTER_DISTANCE)
        {
            Some(c) => c.members += 1,
            None => clusters.push(Cluster { kind: classify(&m.behavior, CLUSTER_DISTANCE), center: m, members: 1 }),
        }
    }
    clusters.sort_by(|a, b| {
        a.kind.cmp(&b.kind).then_with(|| {
            let (x, y) = (a.center.behavior.to_vec8(), b.center.behavior.to_vec8());
            x.iter().zip(&y).map(|(p, q)| p.total_cmp(q)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    FaceScanReport { value: res.value, clusters }
}

/// Residuals of the nullifier projection argument for the face of β_T.
#[derive(Clone, Debug)]
pub struct NullifierProjectionReport {
    /// `(N0 − N2)|φ_θ⟩` on `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub action: [f64; 4],
    /// Closed forms of the four projections as `lhs − rhs`, in the order of
    /// the `|00⟩`, `|11⟩`, `|01⟩`, `|10⟩` components.
    pub projections: [f64; 4],
    /// Largest difference between `action` and the matching projection.
    pub projection_mismatch: f64,
    /// `cos θ·(|01⟩ projection) − sin θ·(|10⟩ projection)`.
    pub combination: f64,
    /// `c_2θ s_b0 + (1/√2) Σ_x (−c_ax s_b0 + s_2θ s_ax c_b0)`.
    pub reduced: f64,
    /// `|combination + reduced|`; the combination equals `−reduced`.
    pub combination_mismatch: f64,
    /// `∂(β_T·P)/∂b0` from the analytic gradient.
    pub d_b0: f64,
    /// `(1 − 1/√2) c_2θ s_b0 + (1/(2√2)) Σ_x (−c_ax s_b0 + s_2θ s_ax c_b0)`.
    pub d_b0_closed_form: f64,
    /// The same with the opposite sign on the marginal term.
    pub d_b0_opposite_sign: f64,
    pub c2theta_sb0: f64,
}

impl NullifierProjectionReport {
    pub fn max_identity_residual(&self) -> f64 {
        self.projection_mismatch
            .max(self.combination_mismatch)
            .max((self.d_b0 - self.d_b0_closed_form).abs())
    }
}

pub fn nullifier_projection_check(params: &QubitParams) -> NullifierProjectionReport {
    let seq = generating_sequence();
    let action = state_action_float(&(&seq[0] - &seq[2]), params);
    let (st, ct) = params.theta.sin_cos();
    let (s2t, c2t) = (2.0 * params.theta).sin_cos();
    let (sa, ca) = (params.a.map(f64::sin), params.a.map(f64::cos));
    let (sb, cb) = params.b[0].sin_cos();
    let r = FRAC_1_SQRT_2;
    let sum = |f: &dyn Fn(usize) -> f64| f(0) + f(1);
    let eq1 = ct * (ca[0] + ca[1]) * r - ct * cb - (ct - r * sum(&|x| ct * ca[x] * cb + st * sa[x] * sb));
    let eq2 = -st * (ca[0] + ca[1]) * r + st * cb - (st - r * sum(&|x| st * ca[x] * cb + ct * sa[x] * sb));
    let eq3 = st * (sa[0] + sa[1]) * r - ct * sb + r * sum(&|x| ct * ca[x] * sb - st * sa[x] * cb);
    let eq4 = ct * (sa[0] + sa[1]) * r - st * sb + r * sum(&|x| -st * ca[x] * sb + ct * sa[x] * cb);
    let projections = [eq1, eq2, eq3, eq4];
    let matched = [eq1, eq3, eq4, eq2];
    let projection_mismatch = action.iter().zip(&matched).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let combination = ct * eq3 - st * eq4;
    let inner = sum(&|x| -ca[x] * sb + s2t * sa[x] * cb);
    let reduced = c2t * sb + r * inner;
    let marginal = (1.0 - r) * c2t * sb;
    let d_b0 = grad_qubit(&beta_t(), params, GradientMode::Analytic)[3];
    NullifierProjectionReport {
        action,
        projections,
        projection_mismatch,
        combination,
        reduced,
        combination_mismatch: (combination + reduced).abs(),
        d_b0,
        d_b0_closed_form: marginal + 0.5 * r * inner,
        d_b0_opposite_sign: -marginal + 0.5 * r * inner,
        c2theta_sb0: c2t * sb,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::chsh;

    #[test]
    fn halton_is_van_der_corput_in_base_two() {
        let v: Vec<f64> = (1..=4).map(|i| radical_inverse(i, 2)).collect();
        assert_eq!(v, vec![0.5, 0.25, 0.75, 0.125]);
    }

    #[test]
    fn chsh_maximum_is_tsirelson_point() {
        let r = qubit_max(&chsh(), 50, 1e-7);
        assert!((r.value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-7);
        assert_eq!(r.maximizers.len(), 1);
        assert_eq!(classify(&r.maximizers[0].behavior, 1e-5), PointKind::TsirelsonPoint);
    }

    #[test]
    fn single_correlator() {
        let e = BellExpression::new([0.0; 2], [0.0; 2], [[1.0, 0.0], [0.0, 0.0]]);
        assert!((qubit_max(&e, 50, 1e-9).value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn projections_match_state_action() {
        for p in [
            QubitParams::new(0.3, [0.7, -1.2], [2.1, 0.4]),
            QubitParams::new(1.1, [0.2, 2.5], [-0.9, 1.7]),
        ] {
            let rep = nullifier_projection_check(&p);
            assert!(rep.max_identity_residual() < 1e-12, "{rep:?}");
        }
        let rep = nullifier_projection_check(&QubitParams::tsirelson());
        assert!(rep.action.iter().all(|v| v.abs() < 1e-12));
        assert!(rep.projections.iter().all(|v| v.abs() < 1e-12));
    }
}
