use crate::model::{SystemParams, Truncation};
use crate::C64;

use super::operators::{number_ops, LadderOps};
use super::sparse::SparseMatrix;

/// Superoperator for `ρ ↦ A ρ B` acting on row-major `vec(ρ)`.
pub fn sandwich(a: &SparseMatrix, b: &SparseMatrix) -> SparseMatrix {
    a.kron(&b.transpose())
}

/// `D[c]ρ = cρc† − ½{c†c, ρ}` scaled by `rate`.
pub fn dissipator(c: &SparseMatrix, rate: f64) -> SparseMatrix {
    let id = SparseMatrix::identity(c.nrows());
    let cd = c.adjoint();
    let cdc = cd.matmul(c);
    let half = C64::new(-0.5 * rate, 0.0);
    sandwich(c, &cd)
        .scale(C64::new(rate, 0.0))
        .add(&sandwich(&cdc, &id).scale(half))
        .add(&sandwich(&id, &cdc).scale(half))
}

/// `−i[H, ·]`.
pub fn commutator(h: &SparseMatrix) -> SparseMatrix {
    let id = SparseMatrix::identity(h.nrows());
    sandwich(h, &id)
        .sub(&sandwich(&id, h))
        .scale(C64::new(0.0, -1.0))
}

/// `H = ω_m b†b − g₀ a†a (b + b†)` in the frame rotating at the cavity frequency.
pub fn hamiltonian(p: &SystemParams, ops: &LadderOps) -> SparseMatrix {
    let x = ops.b.add(&ops.b.adjoint());
    ops.n_phon
        .scale(C64::new(p.omega_m, 0.0))
        .sub(&ops.n_phot.matmul(&x).scale(C64::new(p.g0, 0.0)))
}

/// Rate of the optical dephasing channel `D[a†a]` induced by the thermal
/// mechanical bath; zero at `n̄ = 0`, its continuous limit.
pub fn dephasing_rate(p: &SystemParams) -> f64 {
    if p.gamma == 0.0 || p.nbar_bath == 0.0 {
        return 0.0;
    }
    4.0 * p.gamma * p.g0 * p.g0 / (p.omega_m * p.omega_m * (1.0 + 1.0 / p.nbar_bath).ln())
}

/// Time-independent part of the generator: coherent evolution, cavity loss
/// and (for `γ > 0`) the displaced-frame mechanical bath plus dephasing.
pub fn liouvillian_static(p: &SystemParams, t: &Truncation) -> SparseMatrix {
    let ops = number_ops(t);
    liouvillian_from_ops(p, &ops)
}

pub(crate) fn liouvillian_from_ops(p: &SystemParams, ops: &LadderOps) -> SparseMatrix {
    let mut l = commutator(&hamiltonian(p, ops));
    if p.kappa > 0.0 {
        l = l.add(&dissipator(&ops.a, p.kappa));
    }
    if p.gamma > 0.0 {
        let shift = ops.n_phot.scale(C64::new(p.lambda(), 0.0));
        let down = ops.b.sub(&shift);
        let up = ops.b.adjoint().sub(&shift);
        l = l.add(&dissipator(&down, p.gamma * (p.nbar_bath + 1.0)));
        if p.nbar_bath > 0.0 {
            l = l.add(&dissipator(&up, p.gamma * p.nbar_bath));
        }
        let deph = dephasing_rate(p);
        if deph > 0.0 {
            l = l.add(&dissipator(&ops.n_phot, deph));
        }
    }
    l
}

/// `(−i[a, ·], −i[a†, ·])`; the drive contributes `ζ*` times the first plus
/// `ζ` times the second.
pub fn drive_superoperators(t: &Truncation) -> (SparseMatrix, SparseMatrix) {
    let ops = number_ops(t);
    (commutator(&ops.a), commutator(&ops.a.adjoint()))
}
