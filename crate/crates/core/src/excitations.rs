//! The unitary map between the N-particle sector and the truncated
//! excitation Fock space orthogonal to a condensate mode.
//!
//! Internally the mode basis is rotated (Householder completion) so the
//! condensate occupies the first mode. In that frame the map is pure
//! occupation bookkeeping: the component of an N-particle state with
//! occupations (n0, rest) goes to the excitation state (0, rest) in the
//! sector with |rest| particles. All operator identities are then checked
//! through the explicit matrix of the map.

use crate::fock::{FockOperator, FockSpace, FockVector};
use crate::linalg;
use crate::sparse::CsrMatrix;
use crate::{C64, Error, Result};
use nalgebra::DMatrix;

/// Unitary M x M matrix whose first column is phi (Householder completion).
pub fn householder_completion(phi: &[C64]) -> Result<DMatrix<C64>> {
    let m = phi.len();
    let norm: f64 = phi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Domain(format!(
            "condensate mode must be normalized (norm {norm:.15})"
        )));
    }
    // Reflection mapping e0 to phi: R = I - 2 vv*/|v|^2 with v = e0 - conj-phase trick.
    // Use the phase of phi[0] to keep the reflection well conditioned.
    let alpha = if phi[0].norm() > 1e-14 { phi[0] / phi[0].norm() } else { C64::new(1.0, 0.0) };
    let mut v: Vec<C64> = phi.iter().map(|&z| z / alpha).collect();
    v[0] -= C64::new(1.0, 0.0);
    let vn: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let mut r = DMatrix::<C64>::identity(m, m);
    if vn > 1e-28 {
        for i in 0..m {
            for j in 0..m {
                r[(i, j)] -= v[i] * v[j].conj() * C64::new(2.0 / vn, 0.0);
            }
        }
    }
    // R e0 = phi / alpha; absorb the phase into the first column.
    for i in 0..m {
        r[(i, 0)] *= alpha;
    }
    // First column now equals phi exactly up to roundoff.
    Ok(r)
}

/// Second-quantized basis change Gamma(R) on the truncated Fock space:
/// a*_i -> sum_j R_{ji} a*_j applied to every occupation state. Unitary on
/// each particle sector.
pub fn fock_basis_rotation(space: &FockSpace, r: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let m = space.modes();
    if r.nrows() != m || r.ncols() != m {
        return Err(Error::domain("fock_basis_rotation: rotation has wrong size"));
    }
    let dim = space.dim();
    // Rotated creation operators.
    let rotated: Vec<CsrMatrix> = (0..m)
        .map(|i| {
            let mut acc = CsrMatrix::zeros(dim, dim);
            for j in 0..m {
                let v = r[(j, i)];
                if v != C64::default() {
                    acc = acc.add(&space.adag_mode(j).scale(v));
                }
            }
            acc
        })
        .collect();
    let mut gamma = DMatrix::<C64>::zeros(dim, dim);
    for col in 0..dim {
        let occ = space.basis().state(col).to_vec();
        // |n> = prod_i (a*_i)^{n_i} / sqrt(n_i!) |vac>
        let mut vec = vec![C64::default(); dim];
        vec[0] = C64::new(1.0, 0.0);
        for (i, &ni) in occ.iter().enumerate() {
            for _ in 0..ni {
                vec = rotated[i].matvec(&vec);
            }
            let fact: f64 = (1..=ni as usize).map(|k| k as f64).product::<f64>().max(1.0);
            let s = C64::new(1.0 / fact.sqrt(), 0.0);
            for z in &mut vec {
                *z *= s;
            }
        }
        for row in 0..dim {
            gamma[(row, col)] = vec[row];
        }
    }
    Ok(gamma)
}

/// The excitation map for a fixed condensate mode phi over an M-mode
/// truncated Fock space with N = n_max.
pub struct ExcitationMap {
    /// Rotation bringing phi to the first mode.
    pub rotation: DMatrix<C64>,
    /// Gamma(rotation) on the full Fock space.
    gamma: DMatrix<C64>,
    /// The map N-sector -> excitation subspace, as a full-dimension matrix
    /// (zero outside the N-sector columns).
    u_full: DMatrix<C64>,
    /// Indices (in the unrotated basis ordering) spanning the image: states
    /// with zero occupation of the rotated first mode, in the rotated frame.
    perp_indices: Vec<usize>,
    dim: usize,
}

impl ExcitationMap {
    pub fn new(space: &FockSpace, phi: &[C64]) -> Result<Self> {
        if phi.len() != space.modes() {
            return Err(Error::domain("ExcitationMap: phi has wrong mode count"));
        }
        let rotation = householder_completion(phi)?;
        let gamma = fock_basis_rotation(space, &rotation)?;
        let dim = space.dim();
        let n_max = space.n_max();
        let basis = space.basis();

        // In the rotated frame: |n0, rest> in the N-sector maps to |0, rest>.
        let mut relabel = DMatrix::<C64>::zeros(dim, dim);
        let mut perp_indices = Vec::new();
        for idx in 0..dim {
            let occ = basis.state(idx);
            if occ[0] == 0 {
                perp_indices.push(idx);
            }
            let total: u32 = occ.iter().sum();
            if total as usize == n_max {
                let mut target = occ.to_vec();
                target[0] = 0;
                let t = basis.index_of(&target).expect("dropping the condensate count stays in basis");
                relabel[(t, idx)] = C64::new(1.0, 0.0);
            }
        }
        // U = Gamma . relabel . Gamma^* : full-space matrix whose restriction
        // to the N-sector is the excitation map.
        let u_full = &gamma * relabel * gamma.adjoint();
        Ok(ExcitationMap { rotation, gamma, u_full, perp_indices, dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The map as a full-space matrix (zero outside the N-sector).
    pub fn u_matrix(&self) -> &DMatrix<C64> {
        &self.u_full
    }

    /// Isometry S from the abstract excitation space (spanned by rotated
    /// states with zero condensate occupation) into the full space. Columns
    /// are orthonormal.
    pub fn perp_isometry(&self) -> DMatrix<C64> {
        let k = self.perp_indices.len();
        let mut s = DMatrix::<C64>::zeros(self.dim, k);
        for (col, &idx) in self.perp_indices.iter().enumerate() {
            s.set_column(col, &self.gamma.column(idx));
        }
        s
    }

    /// Orthogonal projector onto the excitation subspace of the full space.
    pub fn perp_projector(&self) -> DMatrix<C64> {
        let s = self.perp_isometry();
        &s * s.adjoint()
    }

    /// Apply U to a vector supported on the N-sector.
    pub fn map(&self, psi: &FockVector) -> FockVector {
        let v = nalgebra::DVector::from_column_slice(&psi.coeffs);
        let out = &self.u_full * v;
        FockVector { coeffs: out.iter().cloned().collect() }
    }

    /// Apply U^* to a vector in the excitation subspace.
    pub fn map_inverse(&self, xi: &FockVector) -> FockVector {
        let v = nalgebra::DVector::from_column_slice(&xi.coeffs);
        let out = self.u_full.adjoint() * v;
        FockVector { coeffs: out.iter().cloned().collect() }
    }
}

/// Residuals of the four conjugation rules checked through the explicit
/// matrix of the map, restricted to the excitation subspace:
///   U a*(phi) a(phi) U* = N - Num
///   U a*(f) a(phi) U*  = sqrt(N) b*(f)
///   U a*(phi) a(g) U*  = sqrt(N) b(g)
///   U a*(f) a(g) U*    = a*(f) a(g)
#[derive(Debug, Clone)]
pub struct ConjugationReport {
    pub rule_condensate_count: f64,
    pub rule_raise: f64,
    pub rule_lower: f64,
    pub rule_preserved: f64,
    pub unitarity: f64,
}

impl ConjugationReport {
    pub fn max_residual(&self) -> f64 {
        self.rule_condensate_count
            .max(self.rule_raise)
            .max(self.rule_lower)
            .max(self.rule_preserved)
            .max(self.unitarity)
    }
}

pub fn check_conjugation_rules(
    space: &FockSpace,
    phi: &[C64],
    f_perp: &[C64],
    g_perp: &[C64],
) -> Result<ConjugationReport> {
    let map = ExcitationMap::new(space, phi)?;
    let n_max = space.n_max();
    let u = map.u_matrix();
    let s = map.perp_isometry();

    // Project onto the N-sector on the right: conjugations are identities
    // between maps on the N-sector and the excitation space.
    let nsec = space.sector_projector_leq(n_max).sub(&space.sector_projector_leq(n_max - 1));
    let nsec = nsec.to_dense();
    let conj = |op: &DMatrix<C64>| -> DMatrix<C64> {
        let inner = u * &nsec * op * &nsec * u.adjoint();
        s.adjoint() * inner * &s
    };
    let restrict = |op: &DMatrix<C64>| -> DMatrix<C64> { s.adjoint() * op * &s };

    let a_phi = space.annihilation(phi).mat.to_dense();
    let adag_phi = space.creation(phi).mat.to_dense();
    let a_g = space.annihilation(g_perp).mat.to_dense();
    let adag_f = space.creation(f_perp).mat.to_dense();
    let sqrt_n = C64::new((n_max as f64).sqrt(), 0.0);

    // Rule 1: condensate number.
    let lhs1 = conj(&(&adag_phi * &a_phi));
    let num = space.number_operator().mat.to_dense();
    let id = DMatrix::<C64>::identity(map.dim(), map.dim());
    let rhs1 = restrict(&(id * C64::new(n_max as f64, 0.0) - &num));
    let r1 = linalg::op_norm(&(lhs1 - rhs1));

    // Rule 2: excitation raising.
    let lhs2 = conj(&(&adag_f * &a_phi));
    let bdag_f = space.b_dagger_field(f_perp, n_max)?.mat.to_dense();
    let rhs2 = restrict(&(bdag_f * sqrt_n));
    let r2 = linalg::op_norm(&(lhs2 - rhs2));

    // Rule 3: excitation lowering.
    let lhs3 = conj(&(&adag_phi * &a_g));
    let b_g = space.b_field(g_perp, n_max)?.mat.to_dense();
    let rhs3 = restrict(&(b_g * sqrt_n));
    let r3 = linalg::op_norm(&(lhs3 - rhs3));

    // Rule 4: orthogonal bilinears pass through.
    let lhs4 = conj(&(&adag_f * &a_g));
    let rhs4 = restrict(&(&adag_f * &a_g));
    let r4 = linalg::op_norm(&(lhs4 - rhs4));

    // Unitarity on the N-sector: U* U = P_N.
    let uu = u.adjoint() * u;
    let r5 = linalg::op_norm(&(uu - &nsec));

    Ok(ConjugationReport {
        rule_condensate_count: r1,
        rule_raise: r2,
        rule_lower: r3,
        rule_preserved: r4,
        unitarity: r5,
    })
}

/// Operator wrapper: U A U^* restricted to the excitation space, given any
/// full-space operator A supported on the N-sector.
pub fn conjugate_to_excitations(map: &ExcitationMap, op: &CsrMatrix) -> FockOperator {
    let u = map.u_matrix();
    let dense = u * op.to_dense() * u.adjoint();
    FockOperator::untagged(CsrMatrix::from_dense(&dense, 1e-15))
}
