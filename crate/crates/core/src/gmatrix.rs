//! Shifted matrix algebras `S = M_n(E)(delta)`.
//!
//! Entry `(i, j)` of a matrix of degree `lambda` lies in
//! `E_{lambda + delta_j - delta_i}`. Permutation matrices follow the
//! convention that `P_sigma` has a 1 at `(sigma(i), i)`, so `U * P_pi` has
//! `u_i` at `(i, pi^{-1}(i))`.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::algebra::{AlgebraElement, GradedDivisionAlgebra, HomogeneousUnit};
use crate::error::{GdaError, Result};
use crate::grading::{Degree, Lattice};
use crate::scalars::{FieldElement, FieldKind};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GradedMatrix {
    entries: Vec<Vec<AlgebraElement>>,
}

/// Result of [`ShiftedMatrixAlgebra::homogeneity`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Homogeneity {
    Degree(Degree),
    NotHomogeneous,
    Zero,
}

/// `U * P_pi` with `U = diag(u_1..u_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub diag: Vec<HomogeneousUnit>,
    /// `pi` as a map `i -> pi[i]`.
    pub perm: Vec<usize>,
}

/// Shift data after sorting indices by coset of `Gamma_E`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonForm {
    /// Coset representatives `epsilon_1..epsilon_l` (first appearance order).
    pub eps: Vec<Degree>,
    pub multiplicities: Vec<usize>,
    /// New position `p` holds old index `order[p]`.
    pub order: Vec<usize>,
    /// Class of each old index.
    pub class_of: Vec<usize>,
    /// `alpha_i = epsilon_{class(i)} - delta_i`, lying in `Gamma_E`.
    pub translations: Vec<Degree>,
}

impl EpsilonForm {
    /// Block ranges in the sorted order.
    pub fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.multiplicities
            .iter()
            .map(|&r| {
                let range = start..start + r;
                start += r;
                range
            })
            .collect()
    }

    /// The epsilon-form shift vector.
    pub fn shifts(&self) -> Vec<Degree> {
        self.order
            .iter()
            .map(|&i| self.eps[self.class_of[i]].clone())
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ShiftedMatrixAlgebra {
    algebra: Arc<GradedDivisionAlgebra>,
    n: usize,
    shifts: Vec<Degree>,
    eps: EpsilonForm,
    warnings: Vec<String>,
}

/// The epsilon-form algebra together with the data used to get there.
#[derive(Clone, Debug)]
pub struct NormalizedShift {
    pub algebra: ShiftedMatrixAlgebra,
    pub order: Vec<usize>,
    pub translations: Vec<Degree>,
}

pub const F2_WARNING: &str = "M_n(E_0) = M_2(F_2): the SK formulas exclude this configuration";

fn add(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn sub(a: &[i64], b: &[i64]) -> Degree {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `(-1)^{inversions}` as an integer sign.
pub fn sign_of(perm: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..perm.len() {
        for j in (i + 1)..perm.len() {
            if perm[i] > perm[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

pub fn invert_perm(perm: &[usize]) -> Vec<usize> {
    let mut out = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        out[p] = i;
    }
    out
}

impl GradedMatrix {
    pub fn from_entries(entries: Vec<Vec<AlgebraElement>>) -> Result<Self> {
        let n = entries.len();
        if entries.iter().any(|r| r.len() != n) {
            return Err(GdaError::WrongSize { expected: n });
        }
        Ok(Self { entries })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            entries: vec![vec![AlgebraElement::zero(); n]; n],
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<AlgebraElement>] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> &AlgebraElement {
        &self.entries[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: AlgebraElement) {
        self.entries[i][j] = x;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(|x| x.is_zero())
    }

    fn permuted(&self, order: &[usize]) -> Self {
        Self {
            entries: order
                .iter()
                .map(|&i| order.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        }
    }
}

impl MonomialMatrix {
    pub fn rho(&self) -> Vec<usize> {
        invert_perm(&self.perm)
    }
}

impl ShiftedMatrixAlgebra {
    pub fn new(algebra: Arc<GradedDivisionAlgebra>, n: usize, shifts: Vec<Degree>) -> Result<Self> {
        if n == 0 || shifts.len() != n {
            return Err(GdaError::DimensionMismatch {
                expected: n,
                found: shifts.len(),
            });
        }
        let k = algebra.ambient_rank();
        for d in &shifts {
            if d.len() != k {
                return Err(GdaError::DimensionMismatch {
                    expected: k,
                    found: d.len(),
                });
            }
        }
        let eps = epsilon_form(algebra.gamma_e(), &shifts);
        let mut warnings = Vec::new();
        if n == 2 && algebra.field().kind() == (FieldKind::Prime { p: 2 }) {
            warnings.push(F2_WARNING.to_string());
        }
        Ok(Self {
            algebra,
            n,
            shifts,
            eps,
            warnings,
        })
    }

    pub fn unshifted(algebra: Arc<GradedDivisionAlgebra>, n: usize) -> Result<Self> {
        let k = algebra.ambient_rank();
        Self::new(algebra, n, vec![vec![0; k]; n])
    }

    pub fn algebra(&self) -> &GradedDivisionAlgebra {
        &self.algebra
    }

    pub fn algebra_arc(&self) -> &Arc<GradedDivisionAlgebra> {
        &self.algebra
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shifts(&self) -> &[Degree] {
        &self.shifts
    }

    pub fn epsilon_form(&self) -> &EpsilonForm {
        &self.eps
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_exceptional_f2(&self) -> bool {
        self.warnings.iter().any(|w| w == F2_WARNING)
    }

    /// Already sorted by coset with each shift equal to its representative.
    pub fn is_epsilon_form(&self) -> bool {
        self.eps.shifts() == self.shifts
    }

    fn zero_degree(&self) -> Degree {
        vec![0; self.algebra.ambient_rank()]
    }

    /// The degree an entry `(i, j)` must have in a matrix of degree `lambda`.
    pub fn entry_degree(&self, lambda: &[i64], i: usize, j: usize) -> Degree {
        add(lambda, &sub(&self.shifts[j], &self.shifts[i]))
    }

    fn check_size(&self, a: &GradedMatrix) -> Result<()> {
        if a.size() != self.n {
            return Err(GdaError::WrongSize { expected: self.n });
        }
        Ok(())
    }

    pub fn normalize_shift(&self) -> NormalizedShift {
        let algebra = ShiftedMatrixAlgebra::new(self.algebra.clone(), self.n, self.eps.shifts())
            .expect("epsilon form has valid dimensions");
        NormalizedShift {
            algebra,
            order: self.eps.order.clone(),
            translations: self.eps.translations.clone(),
        }
    }

    /// Graded isomorphism onto the epsilon-form algebra:
    /// `A -> P (U^{-1} A U) P^{-1}` with `U = diag(e_{alpha_i})`.
    pub fn to_epsilon(&self, a: &GradedMatrix) -> Result<GradedMatrix> {
        self.check_size(a)?;
        let alg = &self.algebra;
        let units: Vec<HomogeneousUnit> = self
            .eps
            .translations
            .iter()
            .map(|t| alg.monomial(t))
            .collect::<Result<_>>()?;
        let inv: Vec<HomogeneousUnit> = units
            .iter()
            .map(|u| alg.invert_homogeneous(u))
            .collect::<Result<_>>()?;
        let mut b = GradedMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let x = &a.entries[i][j];
                if x.is_zero() {
                    continue;
                }
                let l = alg.multiply(&inv[i].clone().into(), x)?;
                b.entries[i][j] = alg.multiply(&l, &units[j].clone().into())?;
            }
        }
        Ok(b.permuted(&self.eps.order))
    }

    /// Inverse of [`Self::to_epsilon`].
    pub fn from_epsilon(&self, b: &GradedMatrix) -> Result<GradedMatrix> {
        self.check_size(b)?;
        let alg = &self.algebra;
        let inv_order = invert_perm(&self.eps.order);
        let b = b.permuted(&inv_order);
        let units: Vec<HomogeneousUnit> = self
            .eps
            .translations
            .iter()
            .map(|t| alg.monomial(t))
            .collect::<Result<_>>()?;
        let inv: Vec<HomogeneousUnit> = units
            .iter()
            .map(|u| alg.invert_homogeneous(u))
            .collect::<Result<_>>()?;
        let mut a = GradedMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let x = &b.entries[i][j];
                if x.is_zero() {
                    continue;
                }
                let l = alg.multiply(&units[i].clone().into(), x)?;
                a.entries[i][j] = alg.multiply(&l, &inv[j].clone().into())?;
            }
        }
        Ok(a)
    }

    pub fn homogeneity(&self, a: &GradedMatrix) -> Homogeneity {
        if a.size() != self.n {
            return Homogeneity::NotHomogeneous;
        }
        let mut lambda: Option<Degree> = None;
        for i in 0..self.n {
            for j in 0..self.n {
                let x = &a.entries[i][j];
                if x.is_zero() {
                    continue;
                }
                let Some(d) = x.degree() else {
                    return Homogeneity::NotHomogeneous;
                };
                let l = sub(d, &sub(&self.shifts[j], &self.shifts[i]));
                match &lambda {
                    None => lambda = Some(l),
                    Some(prev) if *prev != l => return Homogeneity::NotHomogeneous,
                    _ => {}
                }
            }
        }
        lambda.map_or(Homogeneity::Zero, Homogeneity::Degree)
    }

    /// The degree of a nonzero homogeneous matrix.
    pub fn degree(&self, a: &GradedMatrix) -> Result<Degree> {
        match self.homogeneity(a) {
            Homogeneity::Degree(d) => Ok(d),
            Homogeneity::Zero => Err(GdaError::Singular { row: 0 }),
            Homogeneity::NotHomogeneous => Err(GdaError::NotHomogeneous),
        }
    }

    /// Canonical representatives of the cosets `(delta_j - delta_i) + Gamma_E`.
    pub fn grade_set(&self) -> Vec<Degree> {
        let g = self.algebra.gamma_e();
        let mut set = BTreeSet::new();
        for i in 0..self.n {
            for j in 0..self.n {
                set.insert(g.reduce(&sub(&self.shifts[j], &self.shifts[i])));
            }
        }
        set.into_iter().collect()
    }

    /// Degree cosets `lambda + Gamma_E` admitting a homogeneous unit, each
    /// with a realizing permutation `sigma` (unit entries at `(i, sigma(i))`).
    pub fn unit_degree_cosets(&self) -> Vec<(Degree, Vec<usize>)> {
        let g = self.algebra.gamma_e();
        let eps = &self.eps;
        let l = eps.eps.len();
        let mut out = Vec::new();
        // lambda = delta_i - delta_sigma(i): class a must go to the class b
        // with eps_b = eps_a - lambda, bijectively and preserving sizes
        for b0 in 0..l {
            let lambda = sub(&eps.eps[0], &eps.eps[b0]);
            let mut target = vec![usize::MAX; l];
            let mut ok = true;
            for a in 0..l {
                let want = sub(&eps.eps[a], &lambda);
                match (0..l).find(|&b| g.same_coset(&eps.eps[b], &want)) {
                    Some(b) if eps.multiplicities[a] == eps.multiplicities[b] => target[a] = b,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // pair up indices of class a with those of class target[a]
            let members: Vec<Vec<usize>> = (0..l)
                .map(|c| (0..self.n).filter(|&i| eps.class_of[i] == c).collect())
                .collect();
            let mut sigma = vec![0; self.n];
            for a in 0..l {
                for (src, dst) in members[a].iter().zip(&members[target[a]]) {
                    sigma[*src] = *dst;
                }
            }
            out.push((g.reduce(&lambda), sigma));
        }
        out
    }

    /// `Gamma_S^*`, the degrees of homogeneous units.
    pub fn gamma_s_star(&self) -> Lattice {
        let extra: Vec<Degree> = self
            .unit_degree_cosets()
            .into_iter()
            .map(|(d, _)| d)
            .collect();
        self.algebra
            .gamma_e()
            .extend(&extra)
            .expect("degrees have the ambient rank")
    }

    /// Monomial unit of degree `lambda` with entries `e_{lambda + delta_sigma(i) - delta_i}`.
    pub fn monomial_of_degree(&self, lambda: &[i64]) -> Result<MonomialMatrix> {
        let g = self.algebra.gamma_e();
        let (_, sigma) = self
            .unit_degree_cosets()
            .into_iter()
            .find(|(d, _)| g.same_coset(d, lambda))
            .ok_or_else(|| GdaError::DegreeOutsideGammaE(lambda.to_vec()))?;
        let diag = (0..self.n)
            .map(|i| {
                self.algebra
                    .monomial(&self.entry_degree(lambda, i, sigma[i]))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MonomialMatrix {
            diag,
            perm: invert_perm(&sigma),
        })
    }

    /// Diagonal blocks of a degree-0 matrix in the epsilon-form identification.
    pub fn block_decompose(&self, a: &GradedMatrix) -> Result<Vec<Vec<Vec<FieldElement>>>> {
        self.check_size(a)?;
        match self.homogeneity(a) {
            Homogeneity::Degree(d) if d.iter().all(|&x| x == 0) => {}
            Homogeneity::Zero => {}
            _ => return Err(GdaError::NotDegreeZero),
        }
        let b = self.to_epsilon(a)?;
        let f = self.algebra.field();
        let zero = self.zero_degree();
        let scalar = |x: &AlgebraElement| -> FieldElement {
            x.terms().get(&zero).cloned().unwrap_or_else(|| f.zero())
        };
        Ok(self
            .eps
            .block_ranges()
            .into_iter()
            .map(|r| {
                r.clone()
                    .map(|i| r.clone().map(|j| scalar(&b.entries[i][j])).collect())
                    .collect()
            })
            .collect())
    }

    /// Inverse of [`Self::block_decompose`].
    pub fn block_assemble(&self, blocks: &[Vec<Vec<FieldElement>>]) -> Result<GradedMatrix> {
        let ranges = self.eps.block_ranges();
        if blocks.len() != ranges.len() {
            return Err(GdaError::WrongSize { expected: self.n });
        }
        let zero = self.zero_degree();
        let mut b = GradedMatrix::zero(self.n);
        for (blk, r) in blocks.iter().zip(ranges) {
            if blk.len() != r.len() || blk.iter().any(|row| row.len() != r.len()) {
                return Err(GdaError::WrongSize { expected: r.len() });
            }
            for (bi, i) in r.clone().enumerate() {
                for (bj, j) in r.clone().enumerate() {
                    b.entries[i][j] = self
                        .algebra
                        .element([(zero.clone(), blk[bi][bj].clone())])?;
                }
            }
        }
        self.from_epsilon(&b)
    }

    pub fn identity(&self) -> GradedMatrix {
        let mut a = GradedMatrix::zero(self.n);
        for i in 0..self.n {
            a.entries[i][i] = self.algebra.one();
        }
        a
    }

    /// `e_ij(x) = I + E_ij(x)`.
    pub fn elementary(&self, i: usize, j: usize, x: &AlgebraElement) -> Result<GradedMatrix> {
        if i == j {
            return Err(GdaError::SamePosition);
        }
        if i >= self.n || j >= self.n {
            return Err(GdaError::WrongSize { expected: self.n });
        }
        let mut a = self.identity();
        if x.is_zero() {
            return Ok(a);
        }
        let expected = sub(&self.shifts[j], &self.shifts[i]);
        if x.degree() != Some(&expected) {
            return Err(GdaError::WrongDegree { i, j, expected });
        }
        a.entries[i][j] = x.clone();
        Ok(a)
    }

    pub fn diagonal(&self, units: &[HomogeneousUnit]) -> Result<GradedMatrix> {
        if units.len() != self.n {
            return Err(GdaError::WrongSize { expected: self.n });
        }
        let mut a = GradedMatrix::zero(self.n);
        for (i, u) in units.iter().enumerate() {
            self.algebra.check_degree(&u.degree)?;
            a.entries[i][i] = u.clone().into();
        }
        Ok(a)
    }

    pub fn monomial_matrix(&self, m: &MonomialMatrix) -> Result<GradedMatrix> {
        if m.diag.len() != self.n || m.perm.len() != self.n {
            return Err(GdaError::WrongSize { expected: self.n });
        }
        let rho = m.rho();
        let mut a = GradedMatrix::zero(self.n);
        for i in 0..self.n {
            a.entries[i][rho[i]] = m.diag[i].clone().into();
        }
        Ok(a)
    }

    /// `P_sigma`, with a 1 at `(sigma(i), i)`.
    pub fn permutation_matrix(&self, sigma: &[usize]) -> GradedMatrix {
        let mut a = GradedMatrix::zero(self.n);
        for (i, &s) in sigma.iter().enumerate() {
            a.entries[s][i] = self.algebra.one();
        }
        a
    }

    pub fn mat_add(&self, a: &GradedMatrix, b: &GradedMatrix) -> Result<GradedMatrix> {
        self.check_size(a)?;
        self.check_size(b)?;
        let mut c = a.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                c.entries[i][j] = self.algebra.add(&a.entries[i][j], &b.entries[i][j]);
            }
        }
        Ok(c)
    }

    pub fn mat_multiply(&self, a: &GradedMatrix, b: &GradedMatrix) -> Result<GradedMatrix> {
        self.check_size(a)?;
        self.check_size(b)?;
        let alg = &self.algebra;
        let mut c = GradedMatrix::zero(self.n);
        for i in 0..self.n {
            for k in 0..self.n {
                let x = &a.entries[i][k];
                if x.is_zero() {
                    continue;
                }
                for j in 0..self.n {
                    let y = &b.entries[k][j];
                    if y.is_zero() {
                        continue;
                    }
                    let p = alg.multiply(x, y)?;
                    c.entries[i][j] = alg.add(&c.entries[i][j], &p);
                }
            }
        }
        Ok(c)
    }

    pub fn product(&self, factors: &[GradedMatrix]) -> Result<GradedMatrix> {
        let mut acc = self.identity();
        for f in factors {
            acc = self.mat_multiply(&acc, f)?;
        }
        Ok(acc)
    }

    /// Inverse of a unipotent triangular matrix by substitution.
    pub fn unipotent_inverse(&self, a: &GradedMatrix, upper: bool) -> Result<GradedMatrix> {
        self.check_size(a)?;
        let alg = &self.algebra;
        let n = self.n;
        let mut w = self.identity();
        // upper: W_ij = -sum_{i<k<=j} A_ik W_kj; lower mirrors it
        let rows: Vec<usize> = if upper {
            (0..n).rev().collect()
        } else {
            (0..n).collect()
        };
        for &i in &rows {
            for j in 0..n {
                let in_range = if upper { j > i } else { j < i };
                if !in_range {
                    continue;
                }
                let mut acc = AlgebraElement::zero();
                let ks: Vec<usize> = if upper {
                    (i + 1..=j).collect()
                } else {
                    (j..i).collect()
                };
                for k in ks {
                    if a.entries[i][k].is_zero() || w.entries[k][j].is_zero() {
                        continue;
                    }
                    acc = alg.add(&acc, &alg.multiply(&a.entries[i][k], &w.entries[k][j])?);
                }
                w.entries[i][j] = alg.neg(&acc);
            }
        }
        Ok(w)
    }

    pub fn monomial_inverse(&self, m: &MonomialMatrix) -> Result<MonomialMatrix> {
        // (U P_pi)^{-1} = P_pi^{-1} U^{-1} = U' P_{pi^{-1}}, u'_i = u_{pi(i)}^{-1}
        let diag = (0..self.n)
            .map(|i| self.algebra.invert_homogeneous(&m.diag[m.perm[i]]))
            .collect::<Result<Vec<_>>>()?;
        Ok(MonomialMatrix {
            diag,
            perm: invert_perm(&m.perm),
        })
    }

    pub fn mat_invert(&self, a: &GradedMatrix) -> Result<GradedMatrix> {
        let form = crate::bruhat::bruhat_decompose(self, a)?;
        let t_inv = self.unipotent_inverse(&form.t, false)?;
        let v_inv = self.unipotent_inverse(&form.v, true)?;
        let m_inv = self.monomial_matrix(&self.monomial_inverse(&form.monomial())?)?;
        self.product(&[v_inv, m_inv, t_inv])
    }

    /// Scalar matrix `u * I`.
    pub fn scalar(&self, u: &HomogeneousUnit) -> Result<GradedMatrix> {
        self.diagonal(&vec![u.clone(); self.n])
    }

    /// All positions `(i, j)` admitting a homogeneous elementary matrix.
    pub fn elementary_positions(&self) -> Vec<(usize, usize)> {
        let g = self.algebra.gamma_e();
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j && g.contains(&sub(&self.shifts[j], &self.shifts[i])) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn random_elementary<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Option<GradedMatrix>> {
        let pos = self.elementary_positions();
        let Some(&(i, j)) = pos.choose(rng) else {
            return Ok(None);
        };
        let d = sub(&self.shifts[j], &self.shifts[i]);
        let x = self
            .algebra
            .element([(d, self.algebra.field().random_nonzero(rng))])?;
        self.elementary(i, j, &x).map(Some)
    }

    /// Random invertible degree-0 diagonal matrix.
    pub fn random_degree_zero_diagonal<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> Result<GradedMatrix> {
        let f = self.algebra.field();
        let units: Vec<HomogeneousUnit> = (0..self.n)
            .map(|_| self.algebra.unit(f.random_nonzero(rng), self.zero_degree()))
            .collect();
        self.diagonal(&units)
    }

    /// Random invertible degree-0 matrix: a product of elementaries and a diagonal.
    pub fn random_degree_zero<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        length: usize,
    ) -> Result<GradedMatrix> {
        let mut acc = self.random_degree_zero_diagonal(rng)?;
        for _ in 0..length {
            if let Some(e) = self.random_elementary(rng)? {
                acc = if rng.gen_bool(0.5) {
                    self.mat_multiply(&acc, &e)?
                } else {
                    self.mat_multiply(&e, &acc)?
                };
            }
        }
        Ok(acc)
    }

    /// Random monomial unit whose degree is a random element of `Gamma_S^*`.
    pub fn random_monomial<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        bound: i64,
    ) -> Result<MonomialMatrix> {
        let cosets = self.unit_degree_cosets();
        let (base, _) = cosets
            .choose(rng)
            .expect("zero degree is always realizable");
        let lambda = add(base, &self.algebra.random_degree(rng, bound));
        let mut m = self.monomial_of_degree(&lambda)?;
        let f = self.algebra.field();
        for u in &mut m.diag {
            u.coeff = f.random_nonzero(rng);
        }
        Ok(m)
    }

    /// Random homogeneous invertible matrix `X * M * Y` with `X, Y` of degree 0.
    pub fn random_unit<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        length: usize,
        bound: i64,
    ) -> Result<GradedMatrix> {
        let x = self.random_degree_zero(rng, length)?;
        let m = self.monomial_matrix(&self.random_monomial(rng, bound)?)?;
        let y = self.random_degree_zero(rng, length)?;
        self.product(&[x, m, y])
    }
}

fn epsilon_form(gamma_e: &Lattice, shifts: &[Degree]) -> EpsilonForm {
    let mut eps: Vec<Degree> = Vec::new();
    let mut class_of = Vec::with_capacity(shifts.len());
    for d in shifts {
        match eps.iter().position(|e| gamma_e.same_coset(e, d)) {
            Some(c) => class_of.push(c),
            None => {
                class_of.push(eps.len());
                eps.push(d.clone());
            }
        }
    }
    let mut order: Vec<usize> = (0..shifts.len()).collect();
    order.sort_by_key(|&i| class_of[i]);
    let mut multiplicities = vec![0; eps.len()];
    for &c in &class_of {
        multiplicities[c] += 1;
    }
    let translations = shifts
        .iter()
        .zip(&class_of)
        .map(|(d, &c)| sub(&eps[c], d))
        .collect();
    EpsilonForm {
        eps,
        multiplicities,
        order,
        class_of,
        translations,
    }
}
