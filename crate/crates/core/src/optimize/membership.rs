//! Classification of a Bell expression against the dual set
//! `{β : β·P ≤ 1 for every quantum P}`.

use crate::certificates::{Level, SosCertificate};
use crate::error::Result;
use crate::exact::QSqrt2;
use crate::scenario::{tsirelson_point, AnyBehavior, AnyExpression, AnyScalar, LocalVertex, QubitParams};

use super::qubit::qubit_max_seeded;
use super::sos::sos_search;

/// Restarts of the qubit search used for outside witnesses.
pub const MEMBERSHIP_RESTARTS: usize = 50;

#[derive(Clone, Debug)]
pub enum WitnessSource {
    TsirelsonPoint,
    LocalVertex(LocalVertex),
    Qubit(QubitParams),
}

/// A quantum behavior on which the expression exceeds 1.
#[derive(Clone, Debug)]
pub struct Witness {
    pub source: WitnessSource,
    pub behavior: AnyBehavior,
    pub value: AnyScalar,
}

#[derive(Clone, Debug)]
pub enum Membership {
    Inside { level: Level, certificate: Box<SosCertificate> },
    Outside(Witness),
    Unknown,
}

/// Cheap witnesses first (`P_T`, then the local vertices, then the qubit
/// family), then certificate search over `levels` in the given order.
pub fn dual_membership(beta: &AnyExpression, levels: &[Level], tol: f64, seed: u64) -> Result<Membership> {
    let exceeds = |v: &AnyScalar| match v {
        AnyScalar::Exact(x) => *x > QSqrt2::one(),
        AnyScalar::Float(x) => *x > 1.0 + tol,
    };
    let pt = match beta {
        AnyExpression::Exact(_) => AnyBehavior::Exact(tsirelson_point()),
        AnyExpression::Float(_) => AnyBehavior::Float(tsirelson_point()),
    };
    let v = beta.pair(&pt);
    if exceeds(&v) {
        return Ok(Membership::Outside(Witness { source: WitnessSource::TsirelsonPoint, behavior: pt, value: v }));
    }
    let local = match beta {
        AnyExpression::Exact(e) => {
            let (v, vs) = e.local_bound();
            (AnyScalar::Exact(v), vs[0])
        }
        AnyExpression::Float(e) => {
            let (v, vs) = e.local_bound();
            (AnyScalar::Float(v), vs[0])
        }
    };
    if exceeds(&local.0) {
        let behavior = match beta {
            AnyExpression::Exact(_) => AnyBehavior::Exact(local.1.behavior()),
            AnyExpression::Float(_) => AnyBehavior::Float(local.1.behavior()),
        };
        return Ok(Membership::Outside(Witness {
            source: WitnessSource::LocalVertex(local.1),
            behavior,
            value: local.0,
        }));
    }
    let q = qubit_max_seeded(&beta.to_float(), MEMBERSHIP_RESTARTS, tol, seed);
    if q.value > 1.0 + tol {
        let m = &q.maximizers[0];
        return Ok(Membership::Outside(Witness {
            source: WitnessSource::Qubit(m.params),
            behavior: AnyBehavior::Float(m.behavior.clone()),
            value: AnyScalar::Float(m.value),
        }));
    }
    for &level in levels {
        if let Some(cert) = sos_search(beta, level, tol)? {
            return Ok(Membership::Inside { level, certificate: Box::new(cert) });
        }
    }
    Ok(Membership::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slice::{beta_t, expr_from_slice};

    #[test]
    fn classifications() {
        let levels = Level::ALL;
        let bt = AnyExpression::Exact(beta_t::<QSqrt2>());
        assert!(matches!(dual_membership(&bt, &levels, 1e-8, 0).unwrap(), Membership::Inside { .. }));
        let out = AnyExpression::Float(expr_from_slice(0.3, 0.0));
        assert!(matches!(
            dual_membership(&out, &levels, 1e-8, 0).unwrap(),
            Membership::Outside(Witness { source: WitnessSource::LocalVertex(_), .. })
        ));
        let twice = AnyExpression::Exact(beta_t::<QSqrt2>().scale(&QSqrt2::from_int(2)));
        match dual_membership(&twice, &levels, 1e-8, 0).unwrap() {
            Membership::Outside(w) => {
                assert!(matches!(w.source, WitnessSource::TsirelsonPoint));
                assert_eq!(w.value, AnyScalar::Exact(QSqrt2::from_int(2)));
            }
            other => panic!("{other:?}"),
        }
    }
}
