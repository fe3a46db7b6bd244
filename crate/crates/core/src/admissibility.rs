//! Admissibility of graph matrices over GF(p).
//!
//! A graph matrix E admits (nontrivial) consensus iff it is row-stochastic,
//! its characteristic polynomial is `(lambda - 1) lambda^{N-1}`, and the left
//! eigenvector at eigenvalue 1 satisfies `p^T 1 != 0`. The admissibility test
//! is spectral throughout; no topological reasoning is involved.

use crate::error::{Error, Result};
use crate::field::{FieldSpec, Residue};
use crate::matrix::{normalize_leading_one, CharPoly, FMatrix};

/// An adjacency matrix together with the graph it induces: edge (i, j)
/// exists iff `e_ij != 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    e: FMatrix,
}

impl GraphSpec {
    pub fn new(e: FMatrix) -> Result<Self> {
        if !e.is_square() {
            return Err(Error::Shape(format!(
                "graph matrix must be square, got {}x{}",
                e.rows(),
                e.cols()
            )));
        }
        Ok(GraphSpec { e })
    }

    pub fn matrix(&self) -> &FMatrix {
        &self.e
    }

    pub fn n(&self) -> usize {
        self.e.rows()
    }

    /// Directed edges (i, j) with nonzero weight.
    pub fn edges(&self) -> Vec<(usize, usize, Residue)> {
        let mut out = Vec::new();
        for i in 0..self.n() {
            for j in 0..self.n() {
                let w = self.e[(i, j)];
                if w != 0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }
}

/// Outcome of the spectral admissibility test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibilityReport {
    pub row_stochastic: bool,
    /// char poly equals `(lambda - 1) lambda^{N-1}`
    pub charpoly_ok: bool,
    /// Left eigenvector at eigenvalue 1, scaled so its first nonzero entry
    /// is 1; present iff the eigenspace is one-dimensional.
    pub left_eigvec: Option<Vec<Residue>>,
    /// `p^T 1`, or 0 when no eigenvector is reported.
    pub p_dot_one: Residue,
    pub admissible: bool,
    /// E itself is nilpotent (trivial consensus to zero; not admissible).
    pub nilpotent: bool,
    pub char_poly: CharPoly,
    pub laplacian: FMatrix,
    /// Set when the matrix fails only the `p^T 1 != 0` condition: consensus
    /// then requires `p^T x(0) = 0` and the limit is not determined by it.
    pub warning: Option<String>,
}

impl AdmissibilityReport {
    /// Flat key=value block for CLI output.
    pub fn to_kv_block(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("admissible={}\n", self.admissible));
        out.push_str(&format!("row_stochastic={}\n", self.row_stochastic));
        out.push_str(&format!("charpoly_ok={}\n", self.charpoly_ok));
        out.push_str(&format!("nilpotent={}\n", self.nilpotent));
        let coeffs: Vec<String> = self
            .char_poly
            .coeffs()
            .iter()
            .map(|c| c.to_string())
            .collect();
        out.push_str(&format!("charpoly_coeffs={}\n", coeffs.join(" ")));
        out.push_str(&format!("charpoly={}\n", self.char_poly));
        match &self.left_eigvec {
            Some(v) => {
                let v: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                out.push_str(&format!("left_eigvec={}\n", v.join(" ")));
            }
            None => out.push_str("left_eigvec=none\n"),
        }
        out.push_str(&format!("p_dot_one={}\n", self.p_dot_one));
        let lap_rows: Vec<String> = (0..self.laplacian.rows())
            .map(|i| {
                self.laplacian
                    .row(i)
                    .iter()
                    .map(|e| e.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&format!("laplacian={}\n", lap_rows.join("; ")));
        if let Some(w) = &self.warning {
            out.push_str(&format!("warning={w}\n"));
        }
        out
    }
}

/// Finite-field graph Laplacian `L = I - E`.
pub fn laplacian(e: &FMatrix) -> Result<FMatrix> {
    let n = if e.is_square() {
        e.rows()
    } else {
        return Err(Error::Shape(format!(
            "graph matrix must be square, got {}x{}",
            e.rows(),
            e.cols()
        )));
    };
    FMatrix::identity(n, e.field()).sub(e)
}

/// Runs the full spectral admissibility test on E.
pub fn check_admissible(e: &FMatrix) -> Result<AdmissibilityReport> {
    let lap = laplacian(e)?;
    let n = e.rows();
    let field = e.field();

    let row_stochastic = e.is_row_stochastic();
    let cp = e.char_poly()?;
    let charpoly_ok = cp == CharPoly::consensus_spectrum(n, field);
    let nilpotent = e.is_nilpotent()?;

    // Left eigenvector at eigenvalue 1 = left null space of E - I; the
    // Laplacian is I - E so the same space with sign flipped.
    let eig_basis = lap.left_nullspace()?;
    let left_eigvec = if eig_basis.len() == 1 {
        let mut v = eig_basis.into_iter().next().unwrap();
        normalize_leading_one(&mut v, field);
        Some(v)
    } else {
        None
    };
    let p_dot_one = left_eigvec
        .as_ref()
        .map(|v| v.iter().fold(0, |acc, &x| field.add(acc, x)))
        .unwrap_or(0);

    let admissible = row_stochastic && charpoly_ok && p_dot_one != 0;
    let warning = if row_stochastic && left_eigvec.is_some() && p_dot_one == 0 {
        Some(
            "left eigenvector sums to zero: only initial states with p.x(0) = 0 \
             can reach agreement, and the conserved quantity p.x cannot single \
             out an agreement value"
                .to_string(),
        )
    } else {
        None
    };

    Ok(AdmissibilityReport {
        row_stochastic,
        charpoly_ok,
        left_eigvec,
        p_dot_one,
        admissible,
        nilpotent,
        char_poly: cp,
        laplacian: lap,
        warning,
    })
}

/// Consensus value `alpha = (p^T x0) / (p^T 1)` for an admissible E.
pub fn consensus_alpha(e: &FMatrix, x0: &[Residue]) -> Result<Residue> {
    let report = check_admissible(e)?;
    if !report.admissible {
        return Err(Error::NotAdmissible(
            "consensus value requires an admissible graph matrix".into(),
        ));
    }
    if x0.len() != e.rows() {
        return Err(Error::Shape(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            e.rows()
        )));
    }
    let field = e.field();
    let p_vec = report.left_eigvec.expect("admissible implies eigenvector");
    let num = p_vec
        .iter()
        .zip(x0)
        .fold(0, |acc, (&pi, &xi)| field.add(acc, field.mul(pi, xi)));
    let den_inv = field.inv(report.p_dot_one)?;
    Ok(field.mul(num, den_inv))
}

/// Similarity transform `T^{-1} E T`. With T row-stochastic and invertible
/// this preserves admissibility.
pub fn similar_transform(e: &FMatrix, t: &FMatrix) -> Result<FMatrix> {
    let t_inv = t.inverse()?;
    t_inv.matmul(e)?.matmul(t)
}

/// Builds an admissible E from the Jordan seed `J = diag(0, ..., 0, 1)`
/// conjugated by `Q = [I_{N-1} 1; 0 1]`, so that `E = Q J Q^{-1}`.
pub fn seed_admissible(n: usize, field: FieldSpec) -> Result<FMatrix> {
    if n < 2 {
        return Err(Error::Shape(format!("seed needs N >= 2, got {n}")));
    }
    let mut j = FMatrix::zeros(n, n, field);
    j[(n - 1, n - 1)] = 1 % field.p();
    let q = stabilizer_basis_change(n, field);
    // Q^{-1} = [I -1; 0 1], written down directly.
    let mut q_inv = FMatrix::identity(n, field);
    for i in 0..n - 1 {
        q_inv[(i, n - 1)] = field.neg(1 % field.p());
    }
    q.matmul(&j)?.matmul(&q_inv)
}

/// `Q = [I_{N-1} 1; 0 1]`, mapping `e_N` to `1_N`.
pub fn stabilizer_basis_change(n: usize, field: FieldSpec) -> FMatrix {
    let mut q = FMatrix::identity(n, field);
    for i in 0..n - 1 {
        q[(i, n - 1)] = 1 % field.p();
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64) -> FieldSpec {
        FieldSpec::new(p).unwrap()
    }

    fn m(p: u64, rows: &[&[u64]]) -> FMatrix {
        let data: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
        FMatrix::from_rows(&data, f(p)).unwrap()
    }

    #[test]
    fn seed_graph_is_admissible() {
        let e = m(3, &[&[0, 1], &[0, 1]]);
        let report = check_admissible(&e).unwrap();
        assert!(report.admissible);
        assert_eq!(report.left_eigvec, Some(vec![0, 1]));
        assert_eq!(report.p_dot_one, 1);
        assert!(!report.nilpotent);
        assert!(report.warning.is_none());
    }

    #[test]
    fn identity_not_admissible() {
        // char poly (lambda - 1)^2, not (lambda - 1) lambda
        let e = FMatrix::identity(2, f(3));
        let report = check_admissible(&e).unwrap();
        assert!(report.row_stochastic);
        assert!(!report.charpoly_ok);
        assert!(!report.admissible);
        // eigenspace of 1 is two-dimensional, no unique eigenvector
        assert!(report.left_eigvec.is_none());
    }

    #[test]
    fn all_twos_admissible() {
        let e = m(3, &[&[2, 2], &[2, 2]]);
        let report = check_admissible(&e).unwrap();
        assert!(report.admissible);
        assert_eq!(report.left_eigvec, Some(vec![1, 1]));
        assert_eq!(report.p_dot_one, 2);
    }

    #[test]
    fn laplacian_examples() {
        let e = m(3, &[&[0, 1], &[0, 1]]);
        assert_eq!(laplacian(&e).unwrap(), m(3, &[&[1, 2], &[0, 0]]));
        let id = FMatrix::identity(3, f(5));
        assert!(laplacian(&id).unwrap().is_zero());
        let e = m(3, &[&[2, 2], &[2, 2]]);
        assert_eq!(laplacian(&e).unwrap(), m(3, &[&[2, 1], &[1, 2]]));
    }

    #[test]
    fn laplacian_annihilates_ones_and_eigvec() {
        let e = m(3, &[&[2, 2], &[2, 2]]);
        let report = check_admissible(&e).unwrap();
        let lap = &report.laplacian;
        assert_eq!(lap.mat_vec(&[1, 1]).unwrap(), vec![0, 0]);
        let p_vec = report.left_eigvec.unwrap();
        assert_eq!(lap.vec_mat(&p_vec).unwrap(), vec![0, 0]);
    }

    #[test]
    fn consensus_alpha_examples() {
        let e = m(3, &[&[0, 1], &[0, 1]]);
        assert_eq!(consensus_alpha(&e, &[2, 1]).unwrap(), 1);
        assert_eq!(consensus_alpha(&e, &[0, 0]).unwrap(), 0);
        // (1 + 2) * inv(2) = 3 * 2 = 0 mod 3
        let e = m(3, &[&[2, 2], &[2, 2]]);
        assert_eq!(consensus_alpha(&e, &[1, 2]).unwrap(), 0);
    }

    #[test]
    fn consensus_alpha_requires_admissible() {
        let e = FMatrix::identity(2, f(3));
        assert!(matches!(
            consensus_alpha(&e, &[1, 2]),
            Err(Error::NotAdmissible(_))
        ));
    }

    #[test]
    fn similar_transform_examples() {
        let e = m(3, &[&[0, 1], &[0, 1]]);
        let id = FMatrix::identity(2, f(3));
        assert_eq!(similar_transform(&e, &id).unwrap(), e);

        let t = m(3, &[&[0, 1], &[2, 2]]);
        assert_eq!(similar_transform(&e, &t).unwrap(), m(3, &[&[2, 2], &[2, 2]]));

        let swap = m(3, &[&[0, 1], &[1, 0]]);
        assert_eq!(
            similar_transform(&e, &swap).unwrap(),
            m(3, &[&[1, 0], &[1, 0]])
        );
    }

    #[test]
    fn similar_transform_rejects_singular() {
        let e = m(3, &[&[0, 1], &[0, 1]]);
        let t = m(3, &[&[1, 1], &[1, 1]]);
        assert!(matches!(
            similar_transform(&e, &t),
            Err(Error::SingularMatrix(3))
        ));
    }

    #[test]
    fn seed_construction() {
        assert_eq!(seed_admissible(2, f(3)).unwrap(), m(3, &[&[0, 1], &[0, 1]]));
        assert_eq!(seed_admissible(2, f(2)).unwrap(), m(2, &[&[0, 1], &[0, 1]]));
        let e3 = seed_admissible(3, f(3)).unwrap();
        let report = check_admissible(&e3).unwrap();
        assert!(report.admissible);
        assert!(e3.is_row_stochastic());
        assert!(matches!(seed_admissible(1, f(3)), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_p_dot_one_warns() {
        // E = [2 2; 1 0] over GF(3) is row-stochastic with char poly
        // (lambda - 1)^2: eigenvalue 1 is defective, the unique left
        // eigenvector is [1, 2], and p.1 = 0.
        let e = m(3, &[&[2, 2], &[1, 0]]);
        let report = check_admissible(&e).unwrap();
        assert!(report.row_stochastic);
        assert!(!report.charpoly_ok);
        assert_eq!(report.left_eigvec, Some(vec![1, 2]));
        assert_eq!(report.p_dot_one, 0);
        assert!(!report.admissible);
        assert!(report.warning.is_some());
    }

    #[test]
    fn graph_spec_edges() {
        let g = GraphSpec::new(m(3, &[&[0, 1], &[0, 1]])).unwrap();
        assert_eq!(g.edges(), vec![(0, 1, 1), (1, 1, 1)]);
        assert!(GraphSpec::new(FMatrix::new(1, 2, vec![0, 1], f(3)).unwrap()).is_err());
    }
}
