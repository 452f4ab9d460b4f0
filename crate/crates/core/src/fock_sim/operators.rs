use crate::model::Truncation;
use crate::C64;

use super::sparse::SparseMatrix;

/// Ladder and number operators on the joint space `|n_phot⟩ ⊗ |m_phon⟩`
/// (phonon index fastest). Truncation is a hard cutoff: the creation
/// operator simply has no row above the top level.
#[derive(Debug, Clone)]
pub struct LadderOps {
    pub truncation: Truncation,
    /// Photon annihilation `a`.
    pub a: SparseMatrix,
    /// Phonon annihilation `b`.
    pub b: SparseMatrix,
    /// `a†a`.
    pub n_phot: SparseMatrix,
    /// `b†b`.
    pub n_phon: SparseMatrix,
}

/// Single-mode annihilation operator on `0..=n_max` with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(n_max: usize) -> SparseMatrix {
    let dim = n_max + 1;
    SparseMatrix::from_triplets(
        dim,
        dim,
        (1..dim)
            .map(|n| (n - 1, n, C64::new((n as f64).sqrt(), 0.0)))
            .collect(),
    )
}

pub fn number_ops(t: &Truncation) -> LadderOps {
    let id_phot = SparseMatrix::identity(t.dim_phot());
    let id_phon = SparseMatrix::identity(t.dim_phon());
    let a1 = annihilation(t.n_phot_max);
    let b1 = annihilation(t.n_phon_max);
    let a = a1.kron(&id_phon);
    let b = id_phot.kron(&b1);
    let n_phot = a.adjoint().matmul(&a);
    let n_phon = b.adjoint().matmul(&b);
    LadderOps {
        truncation: *t,
        a,
        b,
        n_phot,
        n_phon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_photon_truncation() {
        let a = annihilation(1);
        assert_eq!(a.nnz(), 1);
        assert_eq!(a.get(0, 1), C64::new(1.0, 0.0));
    }

    #[test]
    fn commutator_is_identity_below_top_level() {
        let t = Truncation::new(4, 3).unwrap();
        let ops = number_ops(&t);
        for (op, is_a) in [(&ops.a, true), (&ops.b, false)] {
            let ad = op.adjoint();
            let comm = op.matmul(&ad).sub(&ad.matmul(op));
            for n in 0..t.dim_phot() {
                for m in 0..t.dim_phon() {
                    let i = n * t.dim_phon() + m;
                    let d = comm.get(i, i);
                    if (is_a && n == 4) || (!is_a && m == 3) {
                        assert!(d.re < 0.0);
                    } else {
                        assert!((d - C64::new(1.0, 0.0)).norm() < 1e-14);
                    }
                }
            }
            assert_eq!(comm.nnz(), t.dim());
        }
    }

    #[test]
    fn number_operator_diagonal() {
        let t = Truncation::new(5, 2).unwrap();
        let ops = number_ops(&t);
        for n in 0..t.dim_phot() {
            for m in 0..t.dim_phon() {
                let i = n * t.dim_phon() + m;
                assert!((ops.n_phot.get(i, i).re - n as f64).abs() < 1e-14);
                assert!((ops.n_phon.get(i, i).re - m as f64).abs() < 1e-14);
            }
        }
    }
}
