//! Strict Bruhat normal form `A = T * U * P_pi * V` of homogeneous
//! invertible matrices.

use crate::algebra::{AlgebraElement, HomogeneousUnit};
use crate::error::{GdaError, Result};
use crate::gmatrix::{
    invert_perm, GradedMatrix, Homogeneity, MonomialMatrix, ShiftedMatrixAlgebra,
};

/// `e_ij(x)` as a certificate entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryFactor {
    pub i: usize,
    pub j: usize,
    pub x: AlgebraElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruhatForm {
    pub t: GradedMatrix,
    /// Elementary factors whose product, in order, is `T`.
    pub certificate: Vec<ElementaryFactor>,
    pub u: Vec<HomogeneousUnit>,
    /// `pi`, as `i -> pi[i]`.
    pub perm: Vec<usize>,
    pub v: GradedMatrix,
    pub strict: bool,
}

impl BruhatForm {
    pub fn monomial(&self) -> MonomialMatrix {
        MonomialMatrix {
            diag: self.u.clone(),
            perm: self.perm.clone(),
        }
    }

    /// `rho = pi^{-1}`: row `i` pivots in column `rho[i]`.
    pub fn rho(&self) -> Vec<usize> {
        invert_perm(&self.perm)
    }
}

impl ElementaryFactor {
    pub fn to_matrix(&self, s: &ShiftedMatrixAlgebra) -> Result<GradedMatrix> {
        s.elementary(self.i, self.j, &self.x)
    }
}

pub fn bruhat_decompose(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<BruhatForm> {
    match s.homogeneity(a) {
        Homogeneity::Degree(_) => {}
        Homogeneity::Zero => return Err(GdaError::Singular { row: 0 }),
        Homogeneity::NotHomogeneous => return Err(GdaError::NotHomogeneous),
    }
    let n = s.n();
    let alg = s.algebra();
    let mut w = a.clone();
    let mut rho = vec![0usize; n];
    let mut pivots: Vec<HomogeneousUnit> = Vec::with_capacity(n);
    let mut certificate = Vec::new();
    let mut t = s.identity();

    for j in 0..n {
        let c = (0..n)
            .find(|&c| !w.get(j, c).is_zero())
            .ok_or(GdaError::Singular { row: j })?;
        rho[j] = c;
        let pivot = w
            .get(j, c)
            .as_homogeneous()
            .ok_or(GdaError::NotHomogeneous)?;
        let pivot_inv = alg.invert_homogeneous(&pivot)?;
        for i in (j + 1)..n {
            let Some(x) = w.get(i, c).as_homogeneous() else {
                continue;
            };
            let m: AlgebraElement = alg.multiply_units(&x, &pivot_inv)?.into();
            // row_i -= m * row_j
            for col in 0..n {
                if w.get(j, col).is_zero() {
                    continue;
                }
                let p = alg.multiply(&m, w.get(j, col))?;
                let updated = alg.sub(w.get(i, col), &p);
                w.set(i, col, updated);
            }
            debug_assert!(w.get(i, c).is_zero());
            t.set(i, j, m.clone());
            certificate.push(ElementaryFactor { i, j, x: m });
        }
        pivots.push(pivot);
    }

    // V = P_rho U^{-1} W: row rho(j) of V is u_j^{-1} times row j of W
    let mut v = GradedMatrix::zero(n);
    for j in 0..n {
        let inv: AlgebraElement = alg.invert_homogeneous(&pivots[j])?.into();
        for col in 0..n {
            if !w.get(j, col).is_zero() {
                v.set(rho[j], col, alg.multiply(&inv, w.get(j, col))?);
            }
        }
    }
    let mut form = BruhatForm {
        t,
        certificate,
        u: pivots,
        perm: invert_perm(&rho),
        v,
        strict: false,
    };
    form.strict = is_strict(s, &form);
    Ok(form)
}

fn is_unipotent(m: &GradedMatrix, one: &AlgebraElement, upper: bool) -> bool {
    let n = m.size();
    (0..n).all(|i| {
        (0..n).all(|j| {
            let x = m.get(i, j);
            if i == j {
                x == one
            } else if (j > i) == upper {
                true
            } else {
                x.is_zero()
            }
        })
    })
}

/// True iff `P_pi V P_pi^{-1}` is unipotent upper triangular.
pub fn is_strict(s: &ShiftedMatrixAlgebra, form: &BruhatForm) -> bool {
    let n = s.n();
    let one = s.algebra().one();
    // (P_pi V P_pi^{-1})_{pi(i), pi(k)} = V_{i, k}
    let mut conj = GradedMatrix::zero(n);
    for i in 0..n {
        for k in 0..n {
            conj.set(form.perm[i], form.perm[k], form.v.get(i, k).clone());
        }
    }
    is_unipotent(&form.v, &one, true) && is_unipotent(&conj, &one, true)
}

/// `T * U * P_pi * V`.
pub fn reconstruct(s: &ShiftedMatrixAlgebra, form: &BruhatForm) -> Result<GradedMatrix> {
    let m = s.monomial_matrix(&form.monomial())?;
    s.product(&[form.t.clone(), m, form.v.clone()])
}

/// Product of the certificate factors.
pub fn certificate_product(
    s: &ShiftedMatrixAlgebra,
    certificate: &[ElementaryFactor],
) -> Result<GradedMatrix> {
    let factors = certificate
        .iter()
        .map(|e| e.to_matrix(s))
        .collect::<Result<Vec<_>>>()?;
    s.product(&factors)
}
