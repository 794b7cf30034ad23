//! Quadratic field expressions and the Pi-monomial families.
//!
//! Conventions follow the standard second-quantized notation: for a kernel
//! j, the quadratic A_{s1,s2}(j) = sum_x a^{s1}(j_x) a^{s2}_x smears the
//! first field with the row j_x(y) = j(x;y) (so the kernel enters
//! conjugated exactly when the first field is an annihilator, which is
//! antilinear). Pi-monomials contract a chain of kernels against an ordered
//! product of b / a^+ a pairs; the kernels enter raw there.

use super::fields::{FockOperator, FockSpace};
use crate::sparse::CsrMatrix;
use crate::{C64, Error, Result};
use nalgebra::DMatrix;

/// Creation (*) or annihilation (.) slot in a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Create,
    Annihilate,
}

impl FieldKind {
    pub fn flipped(self) -> Self {
        match self {
            FieldKind::Create => FieldKind::Annihilate,
            FieldKind::Annihilate => FieldKind::Create,
        }
    }
}

fn a_slot(space: &FockSpace, kind: FieldKind, mode: usize) -> CsrMatrix {
    match kind {
        FieldKind::Create => space.adag_mode(mode).clone(),
        FieldKind::Annihilate => space.a_mode(mode).clone(),
    }
}

fn b_slot(space: &FockSpace, kind: FieldKind, mode: usize) -> CsrMatrix {
    match kind {
        FieldKind::Create => space.b_dagger_mode(mode),
        FieldKind::Annihilate => space.b_mode(mode),
    }
}

/// Smeared field a^{kind}(f): linear for creators, antilinear for
/// annihilators.
fn a_smeared(space: &FockSpace, kind: FieldKind, f: &[C64]) -> CsrMatrix {
    match kind {
        FieldKind::Create => space.creation(f).mat,
        FieldKind::Annihilate => space.annihilation(f).mat,
    }
}

/// Pairwise contraction sum_{x,y} j(x;y) P^{left}_x Q^{right}_y for slot
/// matrices provided per mode.
fn kernel_pair(
    j: &DMatrix<C64>,
    left: impl Fn(usize) -> CsrMatrix,
    right: impl Fn(usize) -> CsrMatrix,
    dim: usize,
) -> CsrMatrix {
    let m = j.nrows();
    let mut acc = CsrMatrix::zeros(dim, dim);
    for x in 0..m {
        // Group the y-sum first to keep the number of matmuls at M.
        let mut row = CsrMatrix::zeros(dim, dim);
        let mut nonzero = false;
        for y in 0..m {
            let v = j[(x, y)];
            if v != C64::default() {
                row = row.add(&right(y).scale(v));
                nonzero = true;
            }
        }
        if nonzero {
            acc = acc.add(&left(x).matmul(&row));
        }
    }
    acc
}

fn check_kernel(space: &FockSpace, j: &DMatrix<C64>) -> Result<()> {
    let m = space.modes();
    if j.nrows() != m || j.ncols() != m {
        return Err(Error::domain("kernel size does not match the mode count"));
    }
    Ok(())
}

/// A_{s1,s2}(j) = sum_x a^{s1}(j_x) a^{s2}_x.
pub fn quad_a(
    space: &FockSpace,
    s1: FieldKind,
    s2: FieldKind,
    j: &DMatrix<C64>,
) -> Result<FockOperator> {
    check_kernel(space, j)?;
    let dim = space.dim();
    let m = space.modes();
    let mut acc = CsrMatrix::zeros(dim, dim);
    for x in 0..m {
        let row: Vec<C64> = (0..m).map(|y| j[(x, y)]).collect();
        let first = a_smeared(space, s1, &row);
        acc = acc.add(&first.matmul(&a_slot(space, s2, x)));
    }
    Ok(FockOperator::untagged(acc))
}

/// B_{s1,s2}(j) = sum_x b^{s1}(j_x) b^{s2}_x.
pub fn quad_b(
    space: &FockSpace,
    s1: FieldKind,
    s2: FieldKind,
    j: &DMatrix<C64>,
) -> Result<FockOperator> {
    check_kernel(space, j)?;
    // b-fields are the weighted a-fields; smear the same way.
    let dim = space.dim();
    let m = space.modes();
    let w = space.b_weight(0);
    let mut acc = CsrMatrix::zeros(dim, dim);
    for x in 0..m {
        let row: Vec<C64> = (0..m).map(|y| j[(x, y)]).collect();
        let first = match s1 {
            FieldKind::Create => space.creation(&row).mat.matmul(&w),
            FieldKind::Annihilate => w.matmul(&space.annihilation(&row).mat),
        };
        acc = acc.add(&first.matmul(&b_slot(space, s2, x)));
    }
    Ok(FockOperator::untagged(acc))
}

fn pair_ok(s: FieldKind, f: FieldKind) -> bool {
    s != f
}

/// Pairs (sharp_l, flat_l) that must preserve particle number. `pairs`
/// yields the (sharp index, flat index) pairs to check.
fn check_pairs(
    sharps: &[FieldKind],
    flats: &[FieldKind],
    pairs: impl Iterator<Item = (usize, usize)>,
) -> Result<()> {
    for (si, fi) in pairs {
        if !pair_ok(sharps[si], flats[fi]) {
            return Err(Error::Domain(format!(
                "illegal pattern: pair (sharp {si}, flat {fi}) must be (., *) or (*, .)"
            )));
        }
    }
    Ok(())
}

/// Pi2 of order n:
/// sum b^{f0}_{x1} a^{s1}_{y1} a^{f1}_{x2} ... a^{f_{n-1}}_{xn} b^{sn}_{yn}
/// contracted with kernels j_l(x_l; y_l).
///
/// `flats` = (f0..f_{n-1}), `sharps` = (s1..sn).
pub fn pi2(
    space: &FockSpace,
    flats: &[FieldKind],
    sharps: &[FieldKind],
    kernels: &[DMatrix<C64>],
) -> Result<FockOperator> {
    let n = kernels.len();
    if n == 0 {
        return Err(Error::domain("pi2: order must be >= 1"));
    }
    if flats.len() != n || sharps.len() != n {
        return Err(Error::domain("pi2: order/kernel/pattern mismatch"));
    }
    // Interior pairs a^{s_l}_{y_l} a^{f_l}_{x_{l+1}} preserve particle number.
    check_pairs(sharps, flats, (0..n.saturating_sub(1)).map(|k| (k, k + 1)))?;
    for j in kernels {
        check_kernel(space, j)?;
    }
    let dim = space.dim();
    let mut acc: Option<CsrMatrix> = None;
    for (l, j) in kernels.iter().enumerate() {
        let left: Box<dyn Fn(usize) -> CsrMatrix> = if l == 0 {
            Box::new(|x| b_slot(space, flats[0], x))
        } else {
            Box::new(move |x| a_slot(space, flats[l], x))
        };
        let right: Box<dyn Fn(usize) -> CsrMatrix> = if l == n - 1 {
            Box::new(|y| b_slot(space, sharps[n - 1], y))
        } else {
            Box::new(move |y| a_slot(space, sharps[l], y))
        };
        let link = kernel_pair(j, |x| left(x), |y| right(y), dim);
        acc = Some(match acc {
            None => link,
            Some(prev) => prev.matmul(&link),
        });
    }
    Ok(FockOperator::untagged(acc.unwrap()))
}

/// Pi1 of order n:
/// sum b^{f0}_{x1} a^{s1}_{y1} ... a^{f_{n-1}}_{xn} a^{sn}_{yn} a^{fn}(g).
///
/// `flats` = (f0..fn) has n+1 entries, `sharps` = (s1..sn) has n.
pub fn pi1(
    space: &FockSpace,
    flats: &[FieldKind],
    sharps: &[FieldKind],
    kernels: &[DMatrix<C64>],
    g: &[C64],
) -> Result<FockOperator> {
    let n = kernels.len();
    if n == 0 {
        return Err(Error::domain("pi1: order must be >= 1 (order zero is b(f) itself)"));
    }
    if flats.len() != n + 1 || sharps.len() != n {
        return Err(Error::domain("pi1: order/kernel/pattern mismatch"));
    }
    check_pairs(sharps, flats, (0..n).map(|k| (k, k + 1)))?;
    for j in kernels {
        check_kernel(space, j)?;
    }
    let dim = space.dim();
    let mut acc: Option<CsrMatrix> = None;
    for (l, j) in kernels.iter().enumerate() {
        let left: Box<dyn Fn(usize) -> CsrMatrix> = if l == 0 {
            Box::new(|x| b_slot(space, flats[0], x))
        } else {
            Box::new(move |x| a_slot(space, flats[l], x))
        };
        let right: Box<dyn Fn(usize) -> CsrMatrix> =
            Box::new(move |y| a_slot(space, sharps[l], y));
        let link = kernel_pair(j, |x| left(x), |y| right(y), dim);
        acc = Some(match acc {
            None => link,
            Some(prev) => prev.matmul(&link),
        });
    }
    let tail = a_smeared(space, flats[n], g);
    Ok(FockOperator::untagged(acc.unwrap().matmul(&tail)))
}

/// Mirror-ordered Pi1:
/// sum a^{f0}(g) a^{s0}_{x1} a^{f1}_{y1} ... a^{s_{n-1}}_{xn} b^{fn}_{yn}.
///
/// `flats` = (f0..fn) has n+1 entries, `sharps` = (s0..s_{n-1}) has n.
pub fn pi1_tilde(
    space: &FockSpace,
    flats: &[FieldKind],
    sharps: &[FieldKind],
    kernels: &[DMatrix<C64>],
    g: &[C64],
) -> Result<FockOperator> {
    let n = kernels.len();
    if n == 0 {
        return Err(Error::domain("pi1_tilde: order must be >= 1"));
    }
    if flats.len() != n + 1 || sharps.len() != n {
        return Err(Error::domain("pi1_tilde: order/kernel/pattern mismatch"));
    }
    check_pairs(sharps, flats, (0..n).map(|k| (k, k)))?;
    for j in kernels {
        check_kernel(space, j)?;
    }
    let dim = space.dim();
    let mut acc = a_smeared(space, flats[0], g);
    for (l, j) in kernels.iter().enumerate() {
        let left: Box<dyn Fn(usize) -> CsrMatrix> = Box::new(move |x| a_slot(space, sharps[l], x));
        let right: Box<dyn Fn(usize) -> CsrMatrix> = if l == n - 1 {
            Box::new(|y| b_slot(space, flats[n], y))
        } else {
            Box::new(move |y| a_slot(space, flats[l + 1], y))
        };
        let link = kernel_pair(j, |x| left(x), |y| right(y), dim);
        acc = acc.matmul(&link);
    }
    Ok(FockOperator::untagged(acc))
}

/// K-factor of a kernel for the monomial norm bounds: the HS norm, plus the
/// diagonal l1 mass when the associated pair is not normally ordered
/// (annihilator on the left of a creator).
pub fn k_factor(left: FieldKind, right: FieldKind, j: &DMatrix<C64>) -> f64 {
    let hs = j.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if left == FieldKind::Annihilate && right == FieldKind::Create {
        let diag: f64 = (0..j.nrows()).map(|i| j[(i, i)].norm()).sum();
        hs + diag
    } else {
        hs
    }
}
