//! Homogeneous Dieudonne determinant `det_E: S_h^* -> E_h^*/[E_h^*, E_h^*]`.

use crate::algebra::{AbelianizedUnit, AlgebraElement};
use crate::bruhat::{bruhat_decompose, ElementaryFactor};
use crate::error::{GdaError, Result};
use crate::gmatrix::{sign_of, GradedMatrix, Homogeneity, MonomialMatrix, ShiftedMatrixAlgebra};
use crate::scalars::{determinant, CoefficientField, FieldElement};

pub type DetValue = AbelianizedUnit;

/// `A = B * D` with `B` a product of homogeneous elementary matrices and
/// `D` block diagonal `(D_{r_1}(c_1), ..., D_{r_l}(c_l))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelWitness {
    pub elementaries: Vec<ElementaryFactor>,
    /// `c_l` for each block, in epsilon-form order.
    pub block_scalars: Vec<FieldElement>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelVerdict {
    pub in_kernel: bool,
    pub witness: Option<KernelWitness>,
}

/// Class of `sgn(pi) u_1 ... u_n`.
pub fn delta_monomial(s: &ShiftedMatrixAlgebra, m: &MonomialMatrix) -> Result<DetValue> {
    let alg = s.algebra();
    if !matches!(
        s.homogeneity(&s.monomial_matrix(m)?),
        Homogeneity::Degree(_)
    ) {
        return Err(GdaError::NotHomogeneous);
    }
    let f = alg.field();
    let sign = f.from_i64(sign_of(&m.perm));
    let mut acc = alg.unit(sign, vec![0; alg.ambient_rank()]);
    for u in &m.diag {
        acc = alg.multiply_units(&acc, u)?;
    }
    alg.abelianize(&acc)
}

pub fn det_e(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<DetValue> {
    let form = bruhat_decompose(s, a)?;
    delta_monomial(s, &form.monomial())
}

/// Product of the block determinants of a degree-0 matrix.
pub fn det0(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<FieldElement> {
    let f = s.algebra().field();
    let mut acc = f.one();
    for (idx, block) in s.block_decompose(a)?.iter().enumerate() {
        let d = determinant(f, block);
        if f.is_zero(&d) {
            return Err(GdaError::Singular { row: idx });
        }
        acc = f.mul(&acc, &d);
    }
    Ok(acc)
}

/// Image of `det0(A)` in `E_h^*/[E_h^*, E_h^*]`.
pub fn det0_class(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<DetValue> {
    let alg = s.algebra();
    let d = det0(s, a)?;
    alg.abelianize(&alg.unit(d, vec![0; alg.ambient_rank()]))
}

/// Checks `det_E(A) = image of det0(A)` for every sample.
pub fn check_diagram(s: &ShiftedMatrixAlgebra, samples: &[GradedMatrix]) -> Result<bool> {
    for a in samples {
        if det0_class(s, a)? != det_e(s, a)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `row_a += x * row_b`, as `(a, b, x)`.
pub type RowOp = (usize, usize, FieldElement);

/// Row operations `row_a += x * row_b` that reduce an invertible block to
/// `diag(1, ..., 1, c)`; returns the operations and `c`.
pub fn reduce_block(
    f: &CoefficientField,
    block: &[Vec<FieldElement>],
) -> Result<(Vec<RowOp>, FieldElement)> {
    let r = block.len();
    let mut b = block.to_vec();
    let mut ops = Vec::new();
    let mut apply = |b: &mut Vec<Vec<FieldElement>>, a: usize, src: usize, x: FieldElement| {
        if f.is_zero(&x) {
            return;
        }
        for c in 0..r {
            let t = f.mul(&x, &b[src][c]);
            b[a][c] = f.add(&b[a][c], &t);
        }
        ops.push((a, src, x));
    };
    for k in 0..r.saturating_sub(1) {
        if f.is_zero(&b[k][k]) {
            let i = ((k + 1)..r)
                .find(|&i| !f.is_zero(&b[i][k]))
                .ok_or(GdaError::Singular { row: k })?;
            apply(&mut b, k, i, f.one());
        }
        // make the pivot 1 through row k+1: first force b[k+1][k] = 1 - p
        let p = b[k][k].clone();
        if !f.is_one(&p) {
            let i = k + 1;
            let target = f.sub(&f.one(), &p);
            let t = f.div(&f.sub(&target, &b[i][k]), &p)?;
            apply(&mut b, i, k, t);
            apply(&mut b, k, i, f.one());
        }
        for i in 0..r {
            if i != k && !f.is_zero(&b[i][k]) {
                let x = f.neg(&b[i][k]);
                apply(&mut b, i, k, x);
            }
        }
    }
    let last = r - 1;
    let c = b[last][last].clone();
    if f.is_zero(&c) {
        return Err(GdaError::Singular { row: last });
    }
    for i in 0..last {
        if !f.is_zero(&b[i][last]) {
            let x = f.neg(&f.div(&b[i][last], &c)?);
            apply(&mut b, i, last, x);
        }
    }
    debug_assert!((0..r).all(|i| (0..r).all(|j| {
        let want = if i != j {
            f.zero()
        } else if i == last {
            c.clone()
        } else {
            f.one()
        };
        b[i][j] == want
    })));
    Ok((ops, c))
}

/// Factorization `A = B * D` of a degree-0 invertible matrix.
pub fn factor_degree_zero(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<KernelWitness> {
    let alg = s.algebra();
    let f = alg.field();
    let eps = s.epsilon_form();
    let blocks = s.block_decompose(a)?;
    let zero = vec![0; alg.ambient_rank()];
    let mut elementaries = Vec::new();
    let mut block_scalars = Vec::new();
    for (block, range) in blocks.iter().zip(eps.block_ranges()) {
        let (ops, c) = reduce_block(f, block)?;
        // ops_m ... ops_1 B = D, so B = ops_1^{-1} ... ops_m^{-1} D
        for (p, q, x) in ops {
            let (i, j) = (eps.order[range.start + p], eps.order[range.start + q]);
            // lift through the graded isomorphism: x -> e_{alpha_i} x e_{alpha_j}^{-1}
            let ai = alg.monomial(&eps.translations[i])?;
            let aj_inv = alg.invert_homogeneous(&alg.monomial(&eps.translations[j])?)?;
            let scalar = alg.unit(f.neg(&x), zero.clone());
            let lifted = alg.multiply_units(&alg.multiply_units(&ai, &scalar)?, &aj_inv)?;
            elementaries.push(ElementaryFactor {
                i,
                j,
                x: lifted.into(),
            });
        }
        block_scalars.push(c);
    }
    Ok(KernelWitness {
        elementaries,
        block_scalars,
    })
}

/// The block-diagonal matrix `(D_{r_1}(c_1), ..., D_{r_l}(c_l))` in `S`.
pub fn block_scalar_matrix(
    s: &ShiftedMatrixAlgebra,
    scalars: &[FieldElement],
) -> Result<GradedMatrix> {
    let f = s.algebra().field();
    let blocks: Vec<Vec<Vec<FieldElement>>> = s
        .epsilon_form()
        .multiplicities
        .iter()
        .zip(scalars)
        .map(|(&r, c)| {
            (0..r)
                .map(|i| {
                    (0..r)
                        .map(|j| match (i == j, i == r - 1) {
                            (false, _) => f.zero(),
                            (true, true) => c.clone(),
                            (true, false) => f.one(),
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    s.block_assemble(&blocks)
}

impl KernelWitness {
    /// `B * D`.
    pub fn evaluate(&self, s: &ShiftedMatrixAlgebra) -> Result<GradedMatrix> {
        let mut factors = self
            .elementaries
            .iter()
            .map(|e| e.to_matrix(s))
            .collect::<Result<Vec<_>>>()?;
        factors.push(block_scalar_matrix(s, &self.block_scalars)?);
        s.product(&factors)
    }
}

pub fn in_kernel(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<KernelVerdict> {
    let alg = s.algebra();
    let det = det_e(s, a)?;
    if det != alg.identity_class() {
        return Ok(KernelVerdict {
            in_kernel: false,
            witness: None,
        });
    }
    // n * deg(A) = 0 forces deg(A) = 0 in the torsion-free ambient group
    let witness = factor_degree_zero(s, a)?;
    let f = alg.field();
    let prod = witness
        .block_scalars
        .iter()
        .fold(f.one(), |acc, c| f.mul(&acc, c));
    debug_assert!(alg.mu_e().contains(f, &prod));
    Ok(KernelVerdict {
        in_kernel: true,
        witness: Some(witness),
    })
}

/// Leibniz expansion of the determinant over a commutative `E`.
pub fn leibniz_determinant(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<AlgebraElement> {
    let alg = s.algebra();
    if !alg.is_graded_field() {
        return Err(GdaError::UnsupportedAlgebra);
    }
    let n = s.n();
    let mut total = AlgebraElement::zero();
    let mut perm: Vec<usize> = (0..n).collect();
    loop {
        let mut term = alg.scale(&alg.field().from_i64(sign_of(&perm)), &alg.one());
        for (i, &p) in perm.iter().enumerate() {
            term = alg.multiply(&term, a.get(i, p))?;
            if term.is_zero() {
                break;
            }
        }
        total = alg.add(&total, &term);
        if !next_permutation(&mut perm) {
            break;
        }
    }
    Ok(total)
}

pub(crate) fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
