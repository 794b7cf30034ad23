//! Elementary field operators on the truncated Fock space.

use super::basis::FockBasis;
use crate::sparse::CsrMatrix;
use crate::{C64, Error, Result};
use nalgebra::DMatrix;
use std::sync::Arc;

/// Declared symmetry of an operator, verified on construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    Hermitian,
    AntiHermitian,
    Unitary,
    None,
}

const SYMMETRY_TOL: f64 = 1e-12;

/// Sparse operator on a fixed Fock basis.
#[derive(Debug, Clone)]
pub struct FockOperator {
    pub mat: CsrMatrix,
    pub symmetry: Symmetry,
}

impl FockOperator {
    pub fn new(mat: CsrMatrix, symmetry: Symmetry) -> Result<Self> {
        let scale = mat.fro_norm().max(1.0);
        match symmetry {
            Symmetry::Hermitian => {
                let defect = mat.hermiticity_defect();
                if defect > SYMMETRY_TOL * scale {
                    return Err(Error::Domain(format!(
                        "operator declared hermitian but defect is {defect:.3e}"
                    )));
                }
            }
            Symmetry::AntiHermitian => {
                let defect = mat
                    .add(&mat.adjoint())
                    .fro_norm();
                if defect > SYMMETRY_TOL * scale {
                    return Err(Error::Domain(format!(
                        "operator declared antihermitian but defect is {defect:.3e}"
                    )));
                }
            }
            Symmetry::Unitary => {
                let prod = mat.adjoint().matmul(&mat);
                let defect = prod.sub(&CsrMatrix::identity(mat.nrows())).fro_norm();
                if defect > 1e-10 * scale {
                    return Err(Error::Domain(format!(
                        "operator declared unitary but defect is {defect:.3e}"
                    )));
                }
            }
            Symmetry::None => {}
        }
        Ok(FockOperator { mat, symmetry })
    }

    pub fn untagged(mat: CsrMatrix) -> Self {
        FockOperator { mat, symmetry: Symmetry::None }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        self.mat.to_dense()
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        FockVector { coeffs: self.mat.matvec(&v.coeffs) }
    }
}

/// State vector over a Fock basis.
#[derive(Debug, Clone)]
pub struct FockVector {
    pub coeffs: Vec<C64>,
}

impl FockVector {
    pub fn zero(dim: usize) -> Self {
        FockVector { coeffs: vec![C64::default(); dim] }
    }

    pub fn basis_state(dim: usize, idx: usize) -> Self {
        let mut v = Self::zero(dim);
        v.coeffs[idx] = C64::new(1.0, 0.0);
        v
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &FockVector) -> C64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for z in &mut self.coeffs {
                *z /= n;
            }
        }
    }

    pub fn scaled(&self, s: C64) -> FockVector {
        FockVector { coeffs: self.coeffs.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        FockVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        FockVector {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A Fock basis together with cached elementary mode operators.
#[derive(Debug, Clone)]
pub struct FockSpace {
    basis: Arc<FockBasis>,
    annihilators: Vec<CsrMatrix>,
    creators: Vec<CsrMatrix>,
}

impl FockSpace {
    pub fn new(basis: FockBasis) -> Self {
        let basis = Arc::new(basis);
        let dim = basis.dim();
        let modes = basis.modes();
        let mut annihilators = Vec::with_capacity(modes);
        let mut creators = Vec::with_capacity(modes);
        for mode in 0..modes {
            let mut tr_a = Vec::new();
            let mut tr_c = Vec::new();
            for idx in 0..dim {
                let occ = basis.state(idx);
                let n_i = occ[mode];
                if n_i > 0 {
                    // a_i |..n_i..> = sqrt(n_i) |..n_i - 1..>
                    let mut lower = occ.to_vec();
                    lower[mode] -= 1;
                    let j = basis.index_of(&lower).expect("lowering stays in basis");
                    tr_a.push((j, idx, C64::new((n_i as f64).sqrt(), 0.0)));
                }
                // a*_i |..n_i..> = sqrt(n_i + 1) |..n_i + 1..>, dropped if the
                // total occupation would exceed the truncation.
                let mut raise = occ.to_vec();
                raise[mode] += 1;
                if let Some(j) = basis.index_of(&raise) {
                    tr_c.push((j, idx, C64::new(((n_i + 1) as f64).sqrt(), 0.0)));
                }
            }
            annihilators.push(CsrMatrix::from_triplets(dim, dim, tr_a));
            creators.push(CsrMatrix::from_triplets(dim, dim, tr_c));
        }
        FockSpace { basis, annihilators, creators }
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn basis_arc(&self) -> Arc<FockBasis> {
        Arc::clone(&self.basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }

    pub fn n_max(&self) -> usize {
        self.basis.n_max()
    }

    pub fn vacuum(&self) -> FockVector {
        FockVector::basis_state(self.dim(), 0)
    }

    pub fn a_mode(&self, i: usize) -> &CsrMatrix {
        &self.annihilators[i]
    }

    pub fn adag_mode(&self, i: usize) -> &CsrMatrix {
        &self.creators[i]
    }

    /// a(f) = sum_i conj(f_i) a_i (antilinear in f).
    pub fn annihilation(&self, f: &[C64]) -> FockOperator {
        let mut acc = CsrMatrix::zeros(self.dim(), self.dim());
        for (i, &fi) in f.iter().enumerate() {
            if fi != C64::default() {
                acc = acc.add(&self.annihilators[i].scale(fi.conj()));
            }
        }
        FockOperator::untagged(acc)
    }

    /// a*(f) = sum_i f_i a*_i (linear in f).
    pub fn creation(&self, f: &[C64]) -> FockOperator {
        let mut acc = CsrMatrix::zeros(self.dim(), self.dim());
        for (i, &fi) in f.iter().enumerate() {
            if fi != C64::default() {
                acc = acc.add(&self.creators[i].scale(fi));
            }
        }
        FockOperator::untagged(acc)
    }

    /// Diagonal of an arbitrary function of the number operator.
    pub fn number_function(&self, f: impl Fn(usize) -> f64) -> CsrMatrix {
        let diag: Vec<C64> = (0..self.dim())
            .map(|i| C64::new(f(self.basis.total_occupation(i)), 0.0))
            .collect();
        CsrMatrix::from_diagonal(&diag)
    }

    pub fn number_operator(&self) -> FockOperator {
        FockOperator {
            mat: self.number_function(|n| n as f64),
            symmetry: Symmetry::Hermitian,
        }
    }

    /// dGamma(B) = sum_{ij} B(i;j) a*_i a_j for an M x M one-body matrix.
    pub fn d_gamma(&self, b: &DMatrix<C64>) -> Result<FockOperator> {
        let m = self.modes();
        if b.nrows() != m || b.ncols() != m {
            return Err(Error::domain("d_gamma: one-body matrix has wrong size"));
        }
        let mut acc = CsrMatrix::zeros(self.dim(), self.dim());
        for i in 0..m {
            for j in 0..m {
                let v = b[(i, j)];
                if v != C64::default() {
                    acc = acc.add(&self.creators[i].matmul(&self.annihilators[j]).scale(v));
                }
            }
        }
        Ok(FockOperator::untagged(acc))
    }

    /// Diagonal weight sqrt((N - Num + shift)/N) used by the b-fields.
    pub fn b_weight(&self, shift: i64) -> CsrMatrix {
        let n = self.n_max() as f64;
        self.number_function(|occ| {
            let val = (n - occ as f64 + shift as f64) / n;
            if val > 0.0 {
                val.sqrt()
            } else {
                0.0
            }
        })
    }

    /// Modified annihilator b(f) = sqrt((N - Num)/N) a(f); exactly closed on
    /// the truncated space. `n` must equal the basis truncation.
    pub fn b_field(&self, f: &[C64], n: usize) -> Result<FockOperator> {
        self.check_b_n(n)?;
        let a = self.annihilation(f);
        Ok(FockOperator::untagged(self.b_weight(0).matmul(&a.mat)))
    }

    /// Modified creator b*(f) = a*(f) sqrt((N - Num)/N). The weight kills
    /// the top sector before the raising operator acts, so nothing is
    /// truncated away.
    pub fn b_dagger_field(&self, f: &[C64], n: usize) -> Result<FockOperator> {
        self.check_b_n(n)?;
        let c = self.creation(f);
        Ok(FockOperator::untagged(c.mat.matmul(&self.b_weight(0))))
    }

    pub fn b_mode(&self, i: usize) -> CsrMatrix {
        self.b_weight(0).matmul(&self.annihilators[i])
    }

    pub fn b_dagger_mode(&self, i: usize) -> CsrMatrix {
        self.creators[i].matmul(&self.b_weight(0))
    }

    fn check_b_n(&self, n: usize) -> Result<()> {
        if n != self.n_max() {
            return Err(Error::Domain(format!(
                "b-fields are defined with N equal to the truncation ({}), got {n}",
                self.n_max()
            )));
        }
        Ok(())
    }

    /// Projector onto total occupation <= n_keep.
    pub fn sector_projector_leq(&self, n_keep: usize) -> CsrMatrix {
        self.number_function(|n| if n <= n_keep { 1.0 } else { 0.0 })
    }
}

#[cfg(test)]
mod tests {
    use super::super::basis::enumerate_basis;
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn space(m: usize, n: usize) -> FockSpace {
        FockSpace::new(enumerate_basis(m, n).unwrap())
    }

    #[test]
    fn annihilator_kills_vacuum() {
        let sp = space(3, 3);
        let f = vec![c(0.3), c(0.5), c(-0.2)];
        let a = sp.annihilation(&f);
        let out = a.apply(&sp.vacuum());
        assert!(out.norm() < 1e-15);
    }

    #[test]
    fn adjoint_pairs_exact() {
        let sp = space(3, 4);
        let f = vec![C64::new(0.3, 0.1), C64::new(-0.2, 0.7), C64::new(0.5, 0.0)];
        let a = sp.annihilation(&f);
        let adag = sp.creation(&f);
        assert!(a.mat.adjoint().sub(&adag.mat).fro_norm() < 1e-13);
        let b = sp.b_field(&f, 4).unwrap();
        let bdag = sp.b_dagger_field(&f, 4).unwrap();
        assert!(b.mat.adjoint().sub(&bdag.mat).fro_norm() < 1e-13);
    }

    #[test]
    fn ccr_on_interior_sectors() {
        let sp = space(2, 5);
        let g = vec![C64::new(0.6, 0.2), C64::new(-0.1, 0.4)];
        let h = vec![C64::new(0.3, -0.5), C64::new(0.8, 0.1)];
        let a_g = sp.annihilation(&g);
        let adag_h = sp.creation(&h);
        let comm = a_g.mat.commutator(&adag_h.mat);
        let ip: C64 = g.iter().zip(&h).map(|(x, y)| x.conj() * y).sum();
        let proj = sp.sector_projector_leq(4);
        let expected = proj.scale(ip);
        let diff = proj.matmul(&comm.matmul(&proj)).sub(&expected).fro_norm();
        assert!(diff < 1e-13, "CCR interior defect {diff}");
    }

    #[test]
    fn number_operator_via_dgamma_identity() {
        let sp = space(3, 3);
        let id = DMatrix::<C64>::identity(3, 3);
        let dg = sp.d_gamma(&id).unwrap();
        let n = sp.number_operator();
        assert!(dg.mat.sub(&n.mat).fro_norm() < 1e-13);
    }

    #[test]
    fn b_commutator_identity_whole_space() {
        // [b_i, b*_j] = (1 - Num/N) delta_ij - a*_j a_i / N, exactly.
        let sp = space(3, 4);
        let n = 4.0;
        for i in 0..3 {
            for j in 0..3 {
                let lhs = sp.b_mode(i).commutator(&sp.b_dagger_mode(j));
                let mut rhs = sp.adag_mode(j).matmul(sp.a_mode(i)).scale(c(-1.0 / n));
                if i == j {
                    rhs = rhs.add(&sp.number_function(|occ| 1.0 - occ as f64 / n));
                }
                assert!(lhs.sub(&rhs).fro_norm() < 1e-13, "defect at ({i},{j})");
            }
        }
    }

    #[test]
    fn pull_through() {
        let sp = space(2, 3);
        let f = vec![c(1.0), c(0.5)];
        let bdag = sp.b_dagger_field(&f, 3).unwrap();
        let num = sp.number_operator();
        let lhs = num.mat.matmul(&bdag.mat);
        let shifted = sp.number_function(|n| n as f64 + 1.0);
        let rhs = bdag.mat.matmul(&shifted);
        assert!(lhs.sub(&rhs).fro_norm() < 1e-13);
    }

    #[test]
    fn symmetry_tag_verified() {
        let sp = space(2, 2);
        let bad = sp.a_mode(0).clone();
        assert!(FockOperator::new(bad, Symmetry::Hermitian).is_err());
        let ok = sp.number_function(|n| n as f64);
        assert!(FockOperator::new(ok, Symmetry::Hermitian).is_ok());
    }
}
