//! Graded division algebras realized as twisted group algebras `T_0[Gamma_E]`
//! with one-dimensional homogeneous components and central coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::grading::{
    exterior_square, hnf_with_transform, quotient, Degree, FiniteAbelianGroup, GeneratorBasis,
    Lattice, Order,
};
use crate::scalars::{CoefficientField, FieldElement, FieldKind, RootsOfUnity};

/// User-facing description of an algebra (the TOML schema).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub field: FieldKind,
    pub ambient_rank: usize,
    pub gamma_e: Vec<Vec<i64>>,
    /// `c_ij = beta(g_i, g_j)` as field literals; may be omitted for a
    /// graded field.
    #[serde(default)]
    pub commutation: Vec<Vec<String>>,
}

#[derive(Clone, Debug)]
pub struct GradedDivisionAlgebra {
    field: CoefficientField,
    basis: GeneratorBasis,
    commutation: Vec<Vec<FieldElement>>,
    // c_ij = zeta^{k_ij}, zeta of order n_roots
    n_roots: u64,
    exps: Vec<Vec<u64>>,
    zeta_powers: Vec<FieldElement>,
    gamma_t: Lattice,
    gamma_t_coords: Lattice,
    quotient: FiniteAbelianGroup,
    lambda: FiniteAbelianGroup,
    s: u64,
    e: u64,
    mu_e: RootsOfUnity,
    mu_s: RootsOfUnity,
}

impl PartialEq for GradedDivisionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field
            && self.basis.generators() == other.basis.generators()
            && self.commutation == other.commutation
    }
}

/// Finite `T_0`-linear combination of basis monomials `e_gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct AlgebraElement {
    terms: BTreeMap<Degree, FieldElement>,
}

/// A nonzero homogeneous element `coeff * e_degree`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomogeneousUnit {
    pub coeff: FieldElement,
    pub degree: Degree,
}

/// A class in `E_h^* / [E_h^*, E_h^*]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AbelianizedUnit {
    pub degree: Degree,
    pub coeff_class: FieldElement,
}

impl AlgebraElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn terms(&self) -> &BTreeMap<Degree, FieldElement> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_homogeneous(&self) -> Option<HomogeneousUnit> {
        if self.terms.len() != 1 {
            return None;
        }
        let (d, c) = self.terms.iter().next().unwrap();
        Some(HomogeneousUnit {
            coeff: c.clone(),
            degree: d.clone(),
        })
    }

    /// The degree if the element is homogeneous and nonzero.
    pub fn degree(&self) -> Option<&Degree> {
        (self.terms.len() == 1).then(|| self.terms.keys().next().unwrap())
    }
}

impl From<HomogeneousUnit> for AlgebraElement {
    fn from(u: HomogeneousUnit) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(u.degree, u.coeff);
        Self { terms }
    }
}

impl GradedDivisionAlgebra {
    /// Builds and validates an algebra from explicit data.
    pub fn new(
        field: CoefficientField,
        ambient_rank: usize,
        gamma_e: Vec<Vec<i64>>,
        commutation: Vec<Vec<FieldElement>>,
    ) -> Result<Self> {
        let basis = GeneratorBasis::new(ambient_rank, gamma_e)?;
        let r = basis.len();
        let commutation = if commutation.is_empty() {
            vec![vec![field.one(); r]; r]
        } else {
            commutation
        };
        if commutation.len() != r || commutation.iter().any(|row| row.len() != r) {
            return Err(GdaError::InvalidCommutation {
                i: 0,
                j: 0,
                reason: format!("matrix must be {r}x{r}"),
            });
        }

        let mut orders = vec![vec![1u64; r]; r];
        for i in 0..r {
            for j in 0..r {
                let c = &commutation[i][j];
                if field.is_zero(c) {
                    return Err(GdaError::NotRootOfUnity { i, j });
                }
                match field.order_of_unit(c)? {
                    Order::Finite(o) => orders[i][j] = o,
                    Order::Infinite => return Err(GdaError::NotRootOfUnity { i, j }),
                }
            }
            if !field.is_one(&commutation[i][i]) {
                return Err(GdaError::InvalidCommutation {
                    i,
                    j: i,
                    reason: "diagonal entry must be 1".into(),
                });
            }
        }
        for i in 0..r {
            for j in 0..i {
                if !field.is_one(&field.mul(&commutation[i][j], &commutation[j][i])) {
                    return Err(GdaError::InvalidCommutation {
                        i,
                        j,
                        reason: "c_ji must equal c_ij^-1".into(),
                    });
                }
            }
        }

        let n_roots = orders.iter().flatten().fold(1u64, |acc, &o| acc.lcm(&o));
        let zeta = field.mu(n_roots).generator;
        let zeta_powers: Vec<FieldElement> = {
            let mut v = Vec::with_capacity(n_roots as usize);
            let mut x = field.one();
            for _ in 0..n_roots {
                v.push(x.clone());
                x = field.mul(&x, &zeta);
            }
            v
        };
        let mu_n = RootsOfUnity {
            order: n_roots,
            generator: zeta.clone(),
        };
        let exps: Vec<Vec<u64>> = commutation
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| mu_n.log(&field, c).expect("c_ij lies in mu_N"))
                    .collect()
            })
            .collect();

        let gamma_t_coords = radical(&exps, n_roots)?;
        let q = quotient(&Lattice::full(r), &gamma_t_coords)?;
        if !q.is_finite() {
            return Err(GdaError::InfiniteIndexRadical);
        }
        let quotient_group = q.torsion;
        let index = quotient_group.order();
        let s = (index as f64).sqrt().round() as u64;
        if s * s != index {
            return Err(GdaError::NonSquareIndex(index));
        }
        let lambda = exterior_square(&quotient_group);
        let e = lambda.exponent();
        let gamma_t = Lattice::image_of(basis.generators(), ambient_rank, gamma_t_coords.basis())?;
        let mu_e = field.mu(e);
        let mu_s = field.mu(s);
        Ok(Self {
            field,
            basis,
            commutation,
            n_roots,
            exps,
            zeta_powers,
            gamma_t,
            gamma_t_coords,
            quotient: quotient_group,
            lambda,
            s,
            e,
            mu_e,
            mu_s,
        })
    }

    /// A graded field: trivial commutation on the given grade group.
    pub fn graded_field(
        field: CoefficientField,
        ambient_rank: usize,
        gamma_e: Vec<Vec<i64>>,
    ) -> Result<Self> {
        Self::new(field, ambient_rank, gamma_e, vec![])
    }

    pub fn field(&self) -> &CoefficientField {
        &self.field
    }

    pub fn ambient_rank(&self) -> usize {
        self.basis.lattice().ambient_rank()
    }

    pub fn gamma_e(&self) -> &Lattice {
        self.basis.lattice()
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        self.basis.generators()
    }

    pub fn gamma_t(&self) -> &Lattice {
        &self.gamma_t
    }

    pub fn commutation(&self) -> &[Vec<FieldElement>] {
        &self.commutation
    }

    /// `Gamma_E / Gamma_T`.
    pub fn quotient_group(&self) -> &FiniteAbelianGroup {
        &self.quotient
    }

    /// `Lambda = Gamma_E/Gamma_T ^ Gamma_E/Gamma_T`.
    pub fn lambda(&self) -> &FiniteAbelianGroup {
        &self.lambda
    }

    /// Index `s = ind(E)`.
    pub fn s(&self) -> u64 {
        self.s
    }

    /// Exponent of `Lambda`.
    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn mu_e(&self) -> &RootsOfUnity {
        &self.mu_e
    }

    pub fn mu_s(&self) -> &RootsOfUnity {
        &self.mu_s
    }

    pub fn is_graded_field(&self) -> bool {
        self.s == 1
    }

    pub fn check_degree(&self, d: &[i64]) -> Result<()> {
        if d.len() != self.ambient_rank() {
            return Err(GdaError::DimensionMismatch {
                expected: self.ambient_rank(),
                found: d.len(),
            });
        }
        if !self.gamma_e().contains(d) {
            return Err(GdaError::DegreeOutsideGammaE(d.to_vec()));
        }
        Ok(())
    }

    fn coords(&self, d: &[i64]) -> Result<Vec<i64>> {
        self.basis
            .coordinates(d)
            .ok_or_else(|| GdaError::DegreeOutsideGammaE(d.to_vec()))
    }

    fn zeta_pow(&self, k: i128) -> FieldElement {
        self.zeta_powers[k.rem_euclid(self.n_roots as i128) as usize].clone()
    }

    /// The cocycle `sigma(gamma, delta) = prod_{i>j} c_ij^{a_i b_j}`.
    pub fn sigma(&self, gamma: &[i64], delta: &[i64]) -> Result<FieldElement> {
        let a = self.coords(gamma)?;
        let b = self.coords(delta)?;
        let mut k: i128 = 0;
        for i in 0..a.len() {
            for j in 0..i {
                k += self.exps[i][j] as i128 * a[i] as i128 * b[j] as i128;
            }
        }
        Ok(self.zeta_pow(k))
    }

    /// The bicharacter `beta(gamma, delta)`.
    pub fn beta(&self, gamma: &[i64], delta: &[i64]) -> Result<FieldElement> {
        let a = self.coords(gamma)?;
        let b = self.coords(delta)?;
        let mut k: i128 = 0;
        for i in 0..a.len() {
            for j in 0..a.len() {
                k += self.exps[i][j] as i128 * a[i] as i128 * b[j] as i128;
            }
        }
        Ok(self.zeta_pow(k))
    }

    pub fn one(&self) -> AlgebraElement {
        self.unit(self.field.one(), vec![0; self.ambient_rank()])
            .into()
    }

    pub fn unit(&self, coeff: FieldElement, degree: Degree) -> HomogeneousUnit {
        HomogeneousUnit { coeff, degree }
    }

    /// The basis monomial `e_gamma`.
    pub fn monomial(&self, degree: &[i64]) -> Result<HomogeneousUnit> {
        self.check_degree(degree)?;
        Ok(self.unit(self.field.one(), degree.to_vec()))
    }

    pub fn element(
        &self,
        terms: impl IntoIterator<Item = (Degree, FieldElement)>,
    ) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero();
        for (d, c) in terms {
            self.check_degree(&d)?;
            self.add_term(&mut out, d, c);
        }
        Ok(out)
    }

    fn add_term(&self, x: &mut AlgebraElement, d: Degree, c: FieldElement) {
        if self.field.is_zero(&c) {
            return;
        }
        match x.terms.entry(d) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.field.add(o.get(), &c);
                if self.field.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut out = x.clone();
        for (d, c) in &y.terms {
            self.add_term(&mut out, d.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self, x: &AlgebraElement) -> AlgebraElement {
        AlgebraElement {
            terms: x
                .terms
                .iter()
                .map(|(d, c)| (d.clone(), self.field.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, c: &FieldElement, x: &AlgebraElement) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for (d, v) in &x.terms {
            self.add_term(&mut out, d.clone(), self.field.mul(c, v));
        }
        out
    }

    pub fn multiply(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        let mut out = AlgebraElement::zero();
        for (dx, cx) in &x.terms {
            for (dy, cy) in &y.terms {
                let sig = self.sigma(dx, dy)?;
                let c = self.field.mul(&self.field.mul(cx, cy), &sig);
                let d = dx.iter().zip(dy).map(|(a, b)| a + b).collect();
                self.add_term(&mut out, d, c);
            }
        }
        Ok(out)
    }

    pub fn multiply_units(
        &self,
        u: &HomogeneousUnit,
        v: &HomogeneousUnit,
    ) -> Result<HomogeneousUnit> {
        let sig = self.sigma(&u.degree, &v.degree)?;
        Ok(HomogeneousUnit {
            coeff: self.field.mul(&self.field.mul(&u.coeff, &v.coeff), &sig),
            degree: u.degree.iter().zip(&v.degree).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn invert_homogeneous(&self, u: &HomogeneousUnit) -> Result<HomogeneousUnit> {
        if self.field.is_zero(&u.coeff) {
            return Err(GdaError::ZeroCoefficient);
        }
        let neg: Degree = u.degree.iter().map(|x| -x).collect();
        let sig = self.sigma(&u.degree, &neg)?;
        let coeff = self.field.inv(&self.field.mul(&sig, &u.coeff))?;
        Ok(HomogeneousUnit { coeff, degree: neg })
    }

    /// `u v u^{-1} v^{-1}`, a scalar in `T_0^*`.
    pub fn commutator(&self, u: &HomogeneousUnit, v: &HomogeneousUnit) -> Result<FieldElement> {
        let uv = self.multiply_units(u, v)?;
        let vu = self.multiply_units(v, u)?;
        let q = self.multiply_units(&uv, &self.invert_homogeneous(&vu)?)?;
        debug_assert!(q.degree.iter().all(|&x| x == 0));
        Ok(q.coeff)
    }

    /// Canonical representative of `x * mu_e(T_0)`.
    pub fn coefficient_class(&self, x: &FieldElement) -> FieldElement {
        let f = &self.field;
        let m = &self.mu_e;
        if m.order == 1 {
            return x.clone();
        }
        if let Some(group) = f.unit_group_order() {
            // cosets of mu_e are residues of the log modulo (p-1)/|mu_e|
            let k = f.discrete_log(x).expect("nonzero element");
            let step = group / m.order;
            return f.pow(&f.gen(), (k % step) as i64);
        }
        m.elements(f)
            .iter()
            .map(|w| f.mul(x, w))
            .min()
            .expect("mu_e is nonempty")
    }

    pub fn abelianize(&self, u: &HomogeneousUnit) -> Result<AbelianizedUnit> {
        if self.field.is_zero(&u.coeff) {
            return Err(GdaError::ZeroCoefficient);
        }
        self.check_degree(&u.degree)?;
        Ok(AbelianizedUnit {
            degree: u.degree.clone(),
            coeff_class: self.coefficient_class(&u.coeff),
        })
    }

    /// Product of classes, computed through representatives.
    pub fn class_mul(&self, a: &AbelianizedUnit, b: &AbelianizedUnit) -> Result<AbelianizedUnit> {
        let u = self.multiply_units(&a.representative(), &b.representative())?;
        self.abelianize(&u)
    }

    pub fn class_inv(&self, a: &AbelianizedUnit) -> Result<AbelianizedUnit> {
        self.abelianize(&self.invert_homogeneous(&a.representative())?)
    }

    pub fn class_pow(&self, a: &AbelianizedUnit, k: i64) -> Result<AbelianizedUnit> {
        let base = if k < 0 { self.class_inv(a)? } else { a.clone() };
        let mut acc = self.identity_class();
        for _ in 0..k.unsigned_abs() {
            acc = self.class_mul(&acc, &base)?;
        }
        Ok(acc)
    }

    pub fn identity_class(&self) -> AbelianizedUnit {
        AbelianizedUnit {
            degree: vec![0; self.ambient_rank()],
            coeff_class: self.coefficient_class(&self.field.one()),
        }
    }

    /// `psi((gamma + Gamma_T) ^ (delta + Gamma_T)) = [e_gamma, e_delta]`.
    pub fn psi(&self, gamma: &[i64], delta: &[i64]) -> Result<FieldElement> {
        self.commutator(&self.monomial(gamma)?, &self.monomial(delta)?)
    }

    /// A random degree in `Gamma_E` with generator coordinates in `[-b, b]`.
    pub fn random_degree<R: Rng + ?Sized>(&self, rng: &mut R, b: i64) -> Degree {
        let coords: Vec<i64> = (0..self.basis.len())
            .map(|_| rng.gen_range(-b..=b))
            .collect();
        self.basis.combine(&coords)
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R, b: i64) -> HomogeneousUnit {
        HomogeneousUnit {
            coeff: self.field.random_nonzero(rng),
            degree: self.random_degree(rng, b),
        }
    }

    pub fn random_element<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        terms: usize,
        b: i64,
    ) -> AlgebraElement {
        let mut out = AlgebraElement::zero();
        for _ in 0..terms {
            let d = self.random_degree(rng, b);
            let c = self.field.random(rng);
            self.add_term(&mut out, d, c);
        }
        out
    }

    /// Coordinates of `Gamma_T` in the user generators.
    pub fn gamma_t_coordinates(&self) -> &Lattice {
        &self.gamma_t_coords
    }

    pub fn format_unit(&self, u: &HomogeneousUnit) -> String {
        format!("({})*e{:?}", self.field.format(&u.coeff), u.degree)
    }
}

impl AbelianizedUnit {
    pub fn representative(&self) -> HomogeneousUnit {
        HomogeneousUnit {
            coeff: self.coeff_class.clone(),
            degree: self.degree.clone(),
        }
    }
}

/// `{a in Z^r : a K = 0 mod n}`, computed as the left kernel of `[K; n I]`.
fn radical(exps: &[Vec<u64>], n: u64) -> Result<Lattice> {
    let r = exps.len();
    if r == 0 {
        return Ok(Lattice::zero(0));
    }
    let mut stacked: Vec<Vec<BigInt>> = exps
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    for i in 0..r {
        let mut row = vec![BigInt::zero(); r];
        row[i] = BigInt::from(n);
        stacked.push(row);
    }
    let (h, w) = hnf_with_transform(&stacked, r);
    let gens: Vec<Vec<i64>> = h
        .iter()
        .zip(&w)
        .filter(|(hr, _)| hr.iter().all(|x| x.is_zero()))
        .map(|(_, wr)| {
            wr[..r]
                .iter()
                .map(|x| x.to_i64().expect("kernel entry overflow"))
                .collect()
        })
        .collect();
    Lattice::from_generators(r, &gens)
}

/// Parses and validates an [`AlgebraSpec`].
pub fn make_algebra(spec: &AlgebraSpec) -> Result<GradedDivisionAlgebra> {
    let field = CoefficientField::new(spec.field)?;
    let commutation = spec
        .commutation
        .iter()
        .map(|row| {
            row.iter()
                .map(|s| field.parse(s))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GradedDivisionAlgebra::new(field, spec.ambient_rank, spec.gamma_e.clone(), commutation)
}

impl fmt::Display for GradedDivisionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "E over {} with Gamma_E/Gamma_T = {}, s = {}, e = {}",
            self.field.kind(),
            self.quotient,
            self.s,
            self.e
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn gf(p: u64) -> CoefficientField {
        CoefficientField::prime(p).unwrap()
    }

    pub(crate) fn quaternion(p: u64) -> GradedDivisionAlgebra {
        let f = gf(p);
        let m = f.from_i64(-1);
        GradedDivisionAlgebra::new(
            f.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![f.one(), m.clone()], vec![m, f.one()]],
        )
        .unwrap()
    }

    fn two_symbols(p: u64) -> GradedDivisionAlgebra {
        let spec = AlgebraSpec {
            field: FieldKind::Prime { p },
            ambient_rank: 4,
            gamma_e: (0..4)
                .map(|i| (0..4).map(|j| (i == j) as i64).collect())
                .collect(),
            commutation: vec![
                vec!["1".into(), "-1".into(), "1".into(), "1".into()],
                vec!["-1".into(), "1".into(), "1".into(), "1".into()],
                vec!["1".into(), "1".into(), "1".into(), "-1".into()],
                vec!["1".into(), "1".into(), "-1".into(), "1".into()],
            ],
        };
        make_algebra(&spec).unwrap()
    }

    // Oracle: scan representatives of Gamma_E / N Gamma_E and keep those
    // pairing trivially with every generator.
    fn brute_radical_index(a: &GradedDivisionAlgebra, n: i64) -> u64 {
        let r = a.generators().len();
        let mut count = 0u64;
        let mut coords = vec![0i64; r];
        loop {
            let g = a.basis.combine(&coords);
            if a.generators()
                .iter()
                .all(|h| a.field().is_one(&a.beta(&g, h).unwrap()))
            {
                count += 1;
            }
            let mut i = 0;
            while i < r {
                coords[i] += 1;
                if coords[i] < n {
                    break;
                }
                coords[i] = 0;
                i += 1;
            }
            if i == r {
                break;
            }
        }
        // |Gamma_E / Gamma_T| = n^r / |Gamma_T / n Gamma_E|
        (n as u64).pow(r as u32) / count
    }

    #[test]
    fn quaternion_invariants() {
        let a = quaternion(13);
        assert_eq!(a.quotient_group().invariant_factors(), &[2, 2]);
        assert_eq!((a.s(), a.e()), (2, 2));
        assert_eq!(
            a.gamma_t(),
            &Lattice::from_generators(2, &[vec![2, 0], vec![0, 2]]).unwrap()
        );
        assert_eq!(brute_radical_index(&a, 4), 4);
    }

    #[test]
    fn two_symbol_invariants() {
        let a = two_symbols(13);
        assert_eq!(a.quotient_group().invariant_factors(), &[2, 2, 2, 2]);
        assert_eq!((a.s(), a.e()), (4, 2));
        assert_eq!(brute_radical_index(&a, 2), 16);
    }

    #[test]
    fn graded_field_invariants() {
        let a =
            GradedDivisionAlgebra::graded_field(gf(13), 2, vec![vec![1, 0], vec![0, 1]]).unwrap();
        assert_eq!(a.gamma_t(), a.gamma_e());
        assert_eq!((a.s(), a.e()), (1, 1));
    }

    #[test]
    fn order_three_symbol() {
        // c_12 = 3, of order 3 in GF(13)
        let f = gf(13);
        let c = f.from_i64(3);
        let ci = f.inv(&c).unwrap();
        let a = GradedDivisionAlgebra::new(
            f.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![f.one(), c], vec![ci, f.one()]],
        )
        .unwrap();
        assert_eq!((a.s(), a.e()), (3, 3));
        assert_eq!(brute_radical_index(&a, 3), 9);
    }

    #[test]
    fn cyclotomic_symbol() {
        let f = CoefficientField::cyclotomic(8).unwrap();
        let z = f.gen();
        let zi = f.inv(&z).unwrap();
        let a = GradedDivisionAlgebra::new(
            f.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![f.one(), z], vec![zi, f.one()]],
        )
        .unwrap();
        assert_eq!((a.s(), a.e()), (8, 8));
        assert_eq!(brute_radical_index(&a, 8), 64);
    }

    #[test]
    fn validation_errors() {
        let f = gf(13);
        let two = f.from_i64(2);
        let bad = GradedDivisionAlgebra::new(
            f.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![
                vec![f.one(), two.clone()],
                vec![f.inv(&two).unwrap(), f.one()],
            ],
        );
        // 2 has order 12 in GF(13): valid roots of unity but a 12x12 quotient
        assert!(bad.is_ok());
        let q = CoefficientField::cyclotomic(8).unwrap();
        let two = q.from_i64(2);
        let bad = GradedDivisionAlgebra::new(
            q.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![
                vec![q.one(), two.clone()],
                vec![q.inv(&two).unwrap(), q.one()],
            ],
        );
        assert_eq!(bad.unwrap_err(), GdaError::NotRootOfUnity { i: 0, j: 1 });
        let m = f.from_i64(-1);
        let asym = GradedDivisionAlgebra::new(
            f.clone(),
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![f.one(), m], vec![f.from_i64(5), f.one()]],
        );
        assert!(matches!(asym, Err(GdaError::InvalidCommutation { .. })));
        let dep = GradedDivisionAlgebra::graded_field(f, 2, vec![vec![1, 0], vec![2, 0]]);
        assert_eq!(dep.unwrap_err(), GdaError::DependentGenerators);
    }

    #[test]
    fn defining_relations() {
        let a = quaternion(13);
        let f = a.field();
        let g1: AlgebraElement = a.monomial(&[1, 0]).unwrap().into();
        let g2: AlgebraElement = a.monomial(&[0, 1]).unwrap().into();
        let p = a.multiply(&g1, &g2).unwrap();
        let q = a.multiply(&g2, &g1).unwrap();
        assert_eq!(p, a.scale(&f.from_i64(-1), &q));
        let sq = a.multiply(&g1, &g1).unwrap();
        assert_eq!(sq, a.monomial(&[2, 0]).unwrap().into());
        assert_eq!(a.multiply(&a.one(), &p).unwrap(), p);
        let u = a.monomial(&[1, 0]).unwrap();
        let v = a.monomial(&[0, 1]).unwrap();
        assert_eq!(a.commutator(&u, &v).unwrap(), f.from_i64(-1));
        assert_eq!(a.commutator(&u, &u).unwrap(), f.one());
        assert_eq!(a.psi(&[1, 0], &[0, 1]).unwrap(), f.from_i64(-1));
    }

    #[test]
    fn degree_outside_gamma_e() {
        let f = gf(13);
        let a = GradedDivisionAlgebra::graded_field(f.clone(), 2, vec![vec![2, 0], vec![0, 1]])
            .unwrap();
        let x = AlgebraElement::from(HomogeneousUnit {
            coeff: f.one(),
            degree: vec![1, 0],
        });
        assert_eq!(
            a.multiply(&x, &x).unwrap_err(),
            GdaError::DegreeOutsideGammaE(vec![1, 0])
        );
    }

    #[test]
    fn inverse_and_abelianize() {
        let a = quaternion(13);
        let f = a.field().clone();
        let u = a.monomial(&[1, 0]).unwrap();
        let v = a.invert_homogeneous(&u).unwrap();
        let one = a.one();
        assert_eq!(
            a.multiply(&u.clone().into(), &v.clone().into()).unwrap(),
            one
        );
        assert_eq!(a.multiply(&v.into(), &u.into()).unwrap(), one);
        let zero = HomogeneousUnit {
            coeff: f.zero(),
            degree: vec![0, 0],
        };
        assert_eq!(
            a.invert_homogeneous(&zero).unwrap_err(),
            GdaError::ZeroCoefficient
        );

        let c = |x: i64| a.abelianize(&a.unit(f.from_i64(x), vec![0, 0])).unwrap();
        assert_eq!(c(-1), a.identity_class());
        assert_eq!(c(5), c(8));
        assert_ne!(c(5), c(2));
        // coset listing: 5 * mu_2 = {5, 8}
        let coset: Vec<FieldElement> = a
            .mu_e()
            .elements(&f)
            .iter()
            .map(|w| f.mul(&f.from_i64(5), w))
            .collect();
        assert!(
            coset.contains(&f.from_i64(8)) && coset.contains(&f.from_i64(5)) && coset.len() == 2
        );
    }

    #[test]
    fn psi_image_generates_mu_e() {
        for a in [quaternion(13), two_symbols(13)] {
            let f = a.field().clone();
            let mut seen = std::collections::BTreeSet::new();
            seen.insert(f.one());
            let gens = a.generators().to_vec();
            let mut frontier: Vec<FieldElement> = vec![];
            for g in &gens {
                for h in &gens {
                    frontier.push(a.psi(g, h).unwrap());
                }
            }
            loop {
                let mut grew = false;
                let current: Vec<FieldElement> = seen.iter().cloned().collect();
                for x in &current {
                    for y in &frontier {
                        grew |= seen.insert(f.mul(x, y));
                    }
                }
                if !grew {
                    break;
                }
            }
            let mu: std::collections::BTreeSet<_> = a.mu_e().elements(&f).into_iter().collect();
            assert_eq!(seen, mu);
        }
    }

    fn algebras() -> Vec<GradedDivisionAlgebra> {
        let f = CoefficientField::cyclotomic(12).unwrap();
        let z = f.pow(&f.gen(), 4);
        let zi = f.inv(&z).unwrap();
        let cyc = GradedDivisionAlgebra::new(
            f.clone(),
            3,
            vec![vec![1, 0, 0], vec![1, 2, 0], vec![0, 0, 1]],
            vec![
                vec![f.one(), z.clone(), f.one()],
                vec![zi.clone(), f.one(), f.one()],
                vec![f.one(), f.one(), f.one()],
            ],
        )
        .unwrap();
        vec![quaternion(13), two_symbols(5), cyc]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn multiply_is_associative(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for a in algebras() {
                let x = a.random_element(&mut rng, 3, 3);
                let y = a.random_element(&mut rng, 3, 3);
                let z = a.random_element(&mut rng, 3, 3);
                let l = a.multiply(&a.multiply(&x, &y).unwrap(), &z).unwrap();
                let r = a.multiply(&x, &a.multiply(&y, &z).unwrap()).unwrap();
                prop_assert_eq!(l, r);
            }
        }

        #[test]
        fn homogeneous_units(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for a in algebras() {
                let u = a.random_unit(&mut rng, 4);
                let v = a.random_unit(&mut rng, 4);
                let uv = a.multiply(&u.clone().into(), &v.clone().into()).unwrap();
                let sum: Degree = u.degree.iter().zip(&v.degree).map(|(x, y)| x + y).collect();
                prop_assert_eq!(uv.degree(), Some(&sum));
                let ui = a.invert_homogeneous(&u).unwrap();
                prop_assert_eq!(a.multiply(&u.clone().into(), &ui.into()).unwrap(), a.one());
            }
        }

        #[test]
        fn commutator_is_symplectic(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for a in algebras() {
                let f = a.field().clone();
                let u = a.random_unit(&mut rng, 3);
                let v = a.random_unit(&mut rng, 3);
                let w = a.random_unit(&mut rng, 3);
                let c = a.commutator(&u, &v).unwrap();
                // independent of coefficients and of Gamma_T translates
                prop_assert_eq!(&c, &a.beta(&u.degree, &v.degree).unwrap());
                let t = a.gamma_t().basis().first().cloned().unwrap_or(vec![0; a.ambient_rank()]);
                let shifted: Degree = u.degree.iter().zip(&t).map(|(x, y)| x + y).collect();
                prop_assert_eq!(&c, &a.beta(&shifted, &v.degree).unwrap());
                // bimultiplicative and alternating
                let vw = a.multiply_units(&v, &w).unwrap();
                prop_assert_eq!(a.commutator(&u, &vw).unwrap(), f.mul(&c, &a.commutator(&u, &w).unwrap()));
                prop_assert_eq!(a.commutator(&u, &u).unwrap(), f.one());
                prop_assert_eq!(f.mul(&c, &a.commutator(&v, &u).unwrap()), f.one());
            }
        }

        #[test]
        fn abelianize_is_a_homomorphism(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for a in algebras() {
                let u = a.random_unit(&mut rng, 3);
                let v = a.random_unit(&mut rng, 3);
                let lhs = a.abelianize(&a.multiply_units(&u, &v).unwrap()).unwrap();
                let rhs = a.class_mul(&a.abelianize(&u).unwrap(), &a.abelianize(&v).unwrap()).unwrap();
                prop_assert_eq!(lhs, rhs);
                // commutators are trivial classes
                let c = a.commutator(&u, &v).unwrap();
                prop_assert_eq!(a.abelianize(&a.unit(c, vec![0; a.ambient_rank()])).unwrap(), a.identity_class());
            }
        }
    }
}
