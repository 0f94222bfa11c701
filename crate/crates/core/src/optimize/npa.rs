//! NPA moment-matrix relaxations of the quantum set.

use crate::certificates::Level;
use crate::error::{Error, Result};
use crate::exact::Monomial;
use crate::linalg::Matrix;
use crate::scenario::{coordinate_monomials, Behavior, BellExpression};

use super::sdp::{solve_sdp, SdpProblem, SdpSolution, SdpStatus};

/// Moment matrix indexed by the level monomials. Cell `(k, l)` holds the
/// moment of `m_k† m_l`; monomials related by the adjoint share a label since
/// the relaxation is taken over real moment matrices.
#[derive(Clone, Debug)]
pub struct MomentStructure {
    pub level: Level,
    pub monomials: Vec<Monomial>,
    /// Canonical monomial of each cell.
    pub cell_label: Vec<Vec<Monomial>>,
    /// Distinct non-unit labels, sorted.
    pub free_labels: Vec<Monomial>,
    /// `cell_index[k][l]` is `None` for the constant cells, else the index
    /// into `free_labels`.
    pub cell_index: Vec<Vec<Option<usize>>>,
    /// Index into `free_labels` of each behavior coordinate, in the order
    /// `A0, A1, B0, B1, A0B0, A0B1, A1B0, A1B1`.
    pub coordinates: [usize; 8],
}

impl MomentStructure {
    pub fn size(&self) -> usize {
        self.monomials.len()
    }

    /// Constant matrix and one indicator matrix per free label.
    fn affine_pieces(&self) -> (Matrix, Vec<Matrix>) {
        let n = self.size();
        let f0 = Matrix::from_fn(n, n, |k, l| if self.cell_index[k][l].is_none() { 1.0 } else { 0.0 });
        let fs = (0..self.free_labels.len())
            .map(|j| Matrix::from_fn(n, n, |k, l| if self.cell_index[k][l] == Some(j) { 1.0 } else { 0.0 }))
            .collect();
        (f0, fs)
    }
}

pub fn moment_structure(level: Level) -> MomentStructure {
    let monomials = level.monomials();
    let n = monomials.len();
    let cell_label: Vec<Vec<Monomial>> = (0..n)
        .map(|k| {
            let adj = monomials[k].adjoint();
            (0..n).map(|l| adj.mul(&monomials[l]).hermitian_class()).collect()
        })
        .collect();
    let mut free_labels: Vec<Monomial> =
        cell_label.iter().flatten().filter(|m| !m.is_unit()).cloned().collect();
    free_labels.sort();
    free_labels.dedup();
    let index_of = |m: &Monomial| free_labels.binary_search(m).ok();
    let cell_index = cell_label
        .iter()
        .map(|row| row.iter().map(|m| if m.is_unit() { None } else { index_of(m) }).collect())
        .collect();
    let coords = coordinate_monomials();
    let coordinates = std::array::from_fn(|i| {
        index_of(&coords[i].hermitian_class()).expect("level monomials contain the letters")
    });
    MomentStructure { level, monomials, cell_label, free_labels, cell_index, coordinates }
}

/// Optimum of an NPA relaxation together with the behavior part of the
/// optimal moments.
#[derive(Clone, Debug)]
pub struct NpaResult {
    pub value: f64,
    pub behavior: Behavior<f64>,
    pub solution: SdpSolution,
}

/// Maximizes `pair(β, moments)` over PSD moment matrices at `level`.
pub fn npa_solve(beta: &BellExpression<f64>, level: Level, tol: f64) -> Result<NpaResult> {
    let ms = moment_structure(level);
    let (f0, fs) = ms.affine_pieces();
    let mut b = vec![0.0; fs.len()];
    for (coef, &j) in beta.to_vec8().iter().zip(&ms.coordinates) {
        b[j] += coef;
    }
    let problem = SdpProblem::new(f0, fs, b)?;
    let solution = solve_sdp(&problem, tol)?;
    match solution.status {
        SdpStatus::Optimal => {}
        SdpStatus::MaxIter => return Err(Error::NoConvergence(solution.iterations)),
        // The unit-diagonal moment matrix is always feasible and bounded.
        SdpStatus::Infeasible | SdpStatus::Unbounded => {
            return Err(Error::SolverBreakdown(format!("NPA relaxation reported {:?}", solution.status)))
        }
    }
    let x = std::array::from_fn(|i| solution.y[ms.coordinates[i]]);
    Ok(NpaResult { value: solution.value, behavior: Behavior::from_vec8(&x), solution })
}

/// Upper bound on the quantum value of `β` from the relaxation at `level`.
pub fn npa_bound(beta: &BellExpression<f64>, level: Level, tol: f64) -> Result<f64> {
    npa_solve(beta, level, tol).map(|r| r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::chsh;

    #[test]
    fn label_counts() {
        let counts: Vec<usize> = Level::ALL.iter().map(|&l| moment_structure(l).free_labels.len()).collect();
        assert_eq!(counts, vec![10, 16, 27, 42]);
    }

    #[test]
    fn structure_examples() {
        let l1 = moment_structure(Level::L1);
        assert_eq!(l1.size(), 5);
        let a0 = l1.monomials.iter().position(|m| m.to_string() == "A0").unwrap();
        let b0 = l1.monomials.iter().position(|m| m.to_string() == "B0").unwrap();
        assert_eq!(l1.cell_label[a0][b0].to_string(), "A0B0");
        for level in Level::ALL {
            let ms = moment_structure(level);
            for k in 0..ms.size() {
                assert!(ms.cell_label[k][k].is_unit());
                for l in 0..ms.size() {
                    assert_eq!(ms.cell_label[k][l], ms.cell_label[l][k]);
                }
            }
        }
    }

    #[test]
    fn chsh_reaches_tsirelson_bound() {
        let r = npa_solve(&chsh(), Level::L1, 1e-9).unwrap();
        assert!((r.value - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-7, "{}", r.value);
    }
}
