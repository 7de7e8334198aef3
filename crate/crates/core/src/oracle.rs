//! Brute-force finite group computations over prime coefficient fields.
//!
//! Degree-0 matrices are handled in the epsilon-form block coordinates of
//! `S_0 = prod M_{r_l}(T_0)`, packed block by block into flat residue vectors.
//! Conjugation by a homogeneous unit of nonzero degree is a `T_0`-linear
//! automorphism of `S_0`, so it is precomputed once as a matrix.

use std::collections::HashSet;

use num_integer::Integer;

use crate::error::{GdaError, Result};
use crate::gmatrix::{GradedMatrix, ShiftedMatrixAlgebra};
use crate::grading::{quotient, FiniteAbelianGroup, Lattice};
use crate::scalars::{factorize, mod_inverse, CoefficientField, FieldElement};
use crate::sk::GroupDescription;

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest `|S_0^*|` that [`Route::Auto`] enumerates; GL_3(GF(5)) and
/// beyond go through the block-determinant reduction.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

type Key = Box<[u32]>;

/// Closure budget: `GDA_BUDGET` if set, otherwise [`DEFAULT_BUDGET`].
pub fn default_budget() -> u64 {
    std::env::var("GDA_BUDGET")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Auto,
    Enumerate,
    Reduce,
}

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    pub budget: u64,
    pub route: Route,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            budget: default_budget(),
            route: Route::Auto,
        }
    }
}

#[derive(Clone, Debug)]
struct Packed {
    p: u64,
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl Packed {
    fn new(s: &ShiftedMatrixAlgebra) -> Result<Self> {
        let f = s.algebra().field();
        if !f.is_finite() {
            return Err(GdaError::InfiniteCoefficientField);
        }
        let sizes = s.epsilon_form().multiplicities.clone();
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut dim = 0;
        for r in &sizes {
            offsets.push(dim);
            dim += r * r;
        }
        Ok(Self {
            p: f.characteristic(),
            sizes,
            offsets,
            dim,
        })
    }

    fn identity(&self) -> Key {
        let mut v = vec![0u32; self.dim];
        for (r, o) in self.sizes.iter().zip(&self.offsets) {
            for i in 0..*r {
                v[o + i * r + i] = 1;
            }
        }
        v.into()
    }

    fn mul(&self, a: &[u32], b: &[u32]) -> Key {
        let p = self.p;
        let mut c = vec![0u32; self.dim];
        for (&r, &o) in self.sizes.iter().zip(&self.offsets) {
            for i in 0..r {
                for j in 0..r {
                    let mut acc = 0u64;
                    for k in 0..r {
                        acc = (acc + a[o + i * r + k] as u64 * b[o + k * r + j] as u64) % p;
                    }
                    c[o + i * r + j] = acc as u32;
                }
            }
        }
        c.into()
    }

    fn pow(&self, a: &[u32], mut k: u64) -> Key {
        let mut base: Key = a.into();
        let mut acc = self.identity();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    fn block(&self, a: &[u32], l: usize) -> Vec<Vec<u64>> {
        let (r, o) = (self.sizes[l], self.offsets[l]);
        (0..r)
            .map(|i| (0..r).map(|j| a[o + i * r + j] as u64).collect())
            .collect()
    }

    fn block_det(&self, a: &[u32], l: usize) -> u64 {
        let p = self.p;
        let mut m = self.block(a, l);
        let r = m.len();
        let mut det = 1u64;
        for c in 0..r {
            let Some(piv) = (c..r).find(|&i| m[i][c] != 0) else {
                return 0;
            };
            if piv != c {
                m.swap(piv, c);
                det = (p - det) % p;
            }
            det = det * m[c][c] % p;
            let inv = mod_inverse(m[c][c], p).expect("nonzero residue");
            for i in c + 1..r {
                let t = m[i][c] * inv % p;
                for j in c..r {
                    m[i][j] = (m[i][j] + p - t * m[c][j] % p) % p;
                }
            }
        }
        det
    }

    fn block_dets(&self, a: &[u32]) -> Vec<u64> {
        (0..self.sizes.len())
            .map(|l| self.block_det(a, l))
            .collect()
    }

    fn det(&self, a: &[u32]) -> u64 {
        self.block_dets(a)
            .into_iter()
            .fold(1, |x, y| x * y % self.p)
    }

    fn inv(&self, a: &[u32]) -> Result<Key> {
        let p = self.p;
        let mut out = vec![0u32; self.dim];
        for l in 0..self.sizes.len() {
            let (r, o) = (self.sizes[l], self.offsets[l]);
            let mut m = self.block(a, l);
            let mut e: Vec<Vec<u64>> = (0..r)
                .map(|i| (0..r).map(|j| (i == j) as u64).collect())
                .collect();
            for c in 0..r {
                let piv = (c..r)
                    .find(|&i| m[i][c] != 0)
                    .ok_or(GdaError::Singular { row: c })?;
                m.swap(piv, c);
                e.swap(piv, c);
                let inv = mod_inverse(m[c][c], p).expect("nonzero residue");
                for j in 0..r {
                    m[c][j] = m[c][j] * inv % p;
                    e[c][j] = e[c][j] * inv % p;
                }
                for i in 0..r {
                    if i != c && m[i][c] != 0 {
                        let t = m[i][c];
                        for j in 0..r {
                            m[i][j] = (m[i][j] + p - t * m[c][j] % p) % p;
                            e[i][j] = (e[i][j] + p - t * e[c][j] % p) % p;
                        }
                    }
                }
            }
            for i in 0..r {
                for j in 0..r {
                    out[o + i * r + j] = e[i][j] as u32;
                }
            }
        }
        Ok(out.into())
    }

    fn commutator(&self, a: &[u32], b: &[u32]) -> Result<Key> {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        Ok(self.mul(&ab, &self.inv(&ba)?))
    }

    /// The unit with `x` at block-local position `(i, j)` of block `l` and
    /// identity elsewhere (or `x` on the diagonal when `i == j`).
    fn unit_at(&self, l: usize, i: usize, j: usize, x: u64) -> Key {
        let mut v = self.identity().into_vec();
        let (r, o) = (self.sizes[l], self.offsets[l]);
        v[o + i * r + j] = x as u32;
        v.into()
    }

    fn pack(&self, s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<Key> {
        let f = s.algebra().field();
        let blocks = s.block_decompose(a)?;
        let mut v = Vec::with_capacity(self.dim);
        for b in blocks {
            for row in b {
                for x in row {
                    v.push(f.residue(&x).ok_or(GdaError::InfiniteCoefficientField)? as u32);
                }
            }
        }
        Ok(v.into())
    }

    fn to_graded(&self, s: &ShiftedMatrixAlgebra, a: &[u32]) -> Result<GradedMatrix> {
        let f = s.algebra().field();
        let blocks: Vec<Vec<Vec<FieldElement>>> = (0..self.sizes.len())
            .map(|l| {
                self.block(a, l)
                    .into_iter()
                    .map(|row| row.into_iter().map(|x| f.from_i64(x as i64)).collect())
                    .collect()
            })
            .collect();
        s.block_assemble(&blocks)
    }

    fn apply(&self, m: &LinearMap, a: &[u32]) -> Key {
        let p = self.p;
        let mut out = vec![0u64; self.dim];
        for (k, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (o, &c) in out.iter_mut().zip(&m.columns[k]) {
                *o = (*o + c as u64 * x as u64) % p;
            }
        }
        out.into_iter().map(|x| x as u32).collect()
    }

    fn projected_order(&self) -> u128 {
        let p = self.p as u128;
        self.sizes
            .iter()
            .map(|&r| {
                (0..r as u32)
                    .map(|i| p.pow(r as u32) - p.pow(i))
                    .product::<u128>()
            })
            .product()
    }
}

/// Conjugation `X -> y X y^{-1}` on `S_0`, column `k` the image of the
/// `k`-th packed matrix unit.
#[derive(Clone, Debug)]
struct LinearMap {
    columns: Vec<Key>,
}

/// A finite subgroup of `S_0^*`, enumerated.
#[derive(Clone, Debug)]
pub struct FiniteMatrixGroup {
    packed: Packed,
    elements: HashSet<Key>,
}

impl FiniteMatrixGroup {
    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<bool> {
        Ok(self.elements.contains(&self.packed.pack(s, a)?))
    }

    pub fn is_subgroup_of(&self, other: &FiniteMatrixGroup) -> bool {
        self.elements.iter().all(|k| other.elements.contains(k))
    }

    pub fn same_elements(&self, other: &FiniteMatrixGroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// All elements as graded matrices, in a canonical order.
    pub fn matrices(&self, s: &ShiftedMatrixAlgebra) -> Result<Vec<GradedMatrix>> {
        let mut keys: Vec<&Key> = self.elements.iter().collect();
        keys.sort();
        keys.into_iter()
            .map(|k| self.packed.to_graded(s, k))
            .collect()
    }

    /// Products `g d` with `g` in this group and `d` in `others`.
    pub fn product_set(
        &self,
        s: &ShiftedMatrixAlgebra,
        others: &[GradedMatrix],
    ) -> Result<HashSet<Vec<u32>>> {
        let ds = others
            .iter()
            .map(|d| self.packed.pack(s, d))
            .collect::<Result<Vec<_>>>()?;
        let mut out = HashSet::new();
        for g in &self.elements {
            for d in &ds {
                out.insert(self.packed.mul(g, d).into_vec());
            }
        }
        Ok(out)
    }

    /// Canonical keys of the elements.
    pub fn keys(&self) -> HashSet<Vec<u32>> {
        self.elements.iter().map(|k| k.to_vec()).collect()
    }

    /// The canonical key of a degree-0 matrix.
    pub fn key_of(&self, s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<Vec<u32>> {
        Ok(self.packed.pack(s, a)?.into_vec())
    }
}

fn budget_error(projected: impl ToString, budget: u64) -> GdaError {
    GdaError::SizeBudgetExceeded {
        projected: projected.to_string(),
        budget,
    }
}

fn close(packed: &Packed, gens: &[Key], budget: u64) -> Result<HashSet<Key>> {
    let id = packed.identity();
    let mut set = HashSet::new();
    set.insert(id.clone());
    let mut frontier = vec![id];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for g in gens {
                let y = packed.mul(x, g);
                if !set.contains(&y) {
                    if set.len() as u64 >= budget {
                        return Err(budget_error(format!("more than {budget}"), budget));
                    }
                    set.insert(y.clone());
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(set)
}

/// Subgroup of `S_0^*` generated by degree-0 invertible matrices.
pub fn closure(
    s: &ShiftedMatrixAlgebra,
    gens: &[GradedMatrix],
    budget: u64,
) -> Result<FiniteMatrixGroup> {
    let packed = Packed::new(s)?;
    let keys = gens
        .iter()
        .map(|g| {
            let k = packed.pack(s, g)?;
            packed.inv(&k)?;
            Ok(k)
        })
        .collect::<Result<Vec<_>>>()?;
    let elements = close(&packed, &keys, budget)?;
    Ok(FiniteMatrixGroup { packed, elements })
}

/// Generators of `S_h^*`: degree-0 generators of `S_0^*` and one unit in
/// each generating degree, with the commutators among all of them.
struct Generators {
    packed: Packed,
    x: Vec<Key>,
    x_inv: Vec<Key>,
    y: Vec<LinearMap>,
    relators: Vec<Key>,
}

impl Generators {
    fn new(s: &ShiftedMatrixAlgebra) -> Result<Self> {
        let packed = Packed::new(s)?;
        let alg = s.algebra();
        let f = alg.field();
        let g = f.residue(&f.gen()).expect("prime field");
        let mut x = Vec::new();
        for (l, &r) in packed.sizes.iter().enumerate() {
            for i in 0..r {
                x.push(packed.unit_at(l, i, i, g));
                for j in 0..r {
                    if i != j {
                        x.push(packed.unit_at(l, i, j, 1));
                    }
                }
            }
        }
        let x_inv = x
            .iter()
            .map(|k| packed.inv(k))
            .collect::<Result<Vec<_>>>()?;

        let mut ys: Vec<GradedMatrix> = Vec::new();
        for gt in alg.generators() {
            ys.push(s.scalar(&alg.monomial(gt)?)?);
        }
        for (deg, _) in s.unit_degree_cosets() {
            if !alg.gamma_e().contains(&deg) {
                ys.push(s.monomial_matrix(&s.monomial_of_degree(&deg)?)?);
            }
        }
        let y_inv = ys
            .iter()
            .map(|y| s.mat_invert(y))
            .collect::<Result<Vec<_>>>()?;
        let mut y = Vec::with_capacity(ys.len());
        for (yy, yi) in ys.iter().zip(&y_inv) {
            let mut columns = Vec::with_capacity(packed.dim);
            for k in 0..packed.dim {
                let mut unit = vec![0u32; packed.dim];
                unit[k] = 1;
                let m = packed.to_graded(s, &unit)?;
                let c = s.product(&[yy.clone(), m, yi.clone()])?;
                columns.push(packed.pack(s, &c)?);
            }
            y.push(LinearMap { columns });
        }

        let mut relators = Vec::new();
        for a in 0..x.len() {
            for b in a + 1..x.len() {
                relators.push(packed.commutator(&x[a], &x[b])?);
            }
            for m in &y {
                // [x, y] = x (y x^{-1} y^{-1})
                relators.push(packed.mul(&x[a], &packed.apply(m, &x_inv[a])));
            }
        }
        for a in 0..ys.len() {
            for b in a + 1..ys.len() {
                let c = s.product(&[
                    ys[a].clone(),
                    ys[b].clone(),
                    y_inv[a].clone(),
                    y_inv[b].clone(),
                ])?;
                relators.push(packed.pack(s, &c)?);
            }
        }
        let id = packed.identity();
        let mut seen = HashSet::new();
        relators.retain(|r| *r != id && seen.insert(r.clone()));
        Ok(Self {
            packed,
            x,
            x_inv,
            y,
            relators,
        })
    }

    fn conjugates(&self, r: &[u32]) -> Vec<Key> {
        let p = &self.packed;
        let mut out: Vec<Key> = self
            .x
            .iter()
            .zip(&self.x_inv)
            .map(|(a, ai)| p.mul(&p.mul(a, r), ai))
            .collect();
        out.extend(self.y.iter().map(|m| p.apply(m, r)));
        out
    }
}

/// `[S_h^*, S_h^*]`, the normal closure of the commutators of a generating
/// set of `S_h^*`; it lies in `S_0^*`.
pub fn commutator_subgroup_sh(s: &ShiftedMatrixAlgebra, budget: u64) -> Result<FiniteMatrixGroup> {
    let gens = Generators::new(s)?;
    let elements = normal_closure(&gens, budget)?;
    Ok(FiniteMatrixGroup {
        packed: gens.packed,
        elements,
    })
}

fn normal_closure(gens: &Generators, budget: u64) -> Result<HashSet<Key>> {
    let mut current = gens.relators.clone();
    loop {
        let set = close(&gens.packed, &current, budget)?;
        let mut added = Vec::new();
        for r in &current {
            for c in gens.conjugates(r) {
                if !set.contains(&c) && !added.contains(&c) {
                    added.push(c);
                }
            }
        }
        if added.is_empty() {
            return Ok(set);
        }
        current.extend(added);
    }
}

/// `S_0^*` enumerated from its generators.
pub fn degree_zero_units(s: &ShiftedMatrixAlgebra, budget: u64) -> Result<FiniteMatrixGroup> {
    let packed = Packed::new(s)?;
    let projected = packed.projected_order();
    if projected > budget as u128 {
        return Err(budget_error(projected, budget));
    }
    let gens = Generators::new(s)?;
    let elements = close(&packed, &gens.x, budget)?;
    Ok(FiniteMatrixGroup { packed, elements })
}

/// The subgroup generated by the homogeneous elementary matrices with
/// coefficient 1 on each admissible position; these lie in `S_0^*`.
pub fn elementary_subgroup(s: &ShiftedMatrixAlgebra, budget: u64) -> Result<FiniteMatrixGroup> {
    let alg = s.algebra();
    let zero = vec![0; alg.ambient_rank()];
    let gens = s
        .elementary_positions()
        .into_iter()
        .map(|(i, j)| {
            let x = alg.monomial(&s.entry_degree(&zero, i, j))?;
            s.elementary(i, j, &x.into())
        })
        .collect::<Result<Vec<_>>>()?;
    closure(s, &gens, budget)
}

/// Invariant factors of a finite abelian group from the sizes of its
/// `q^j`-torsion subgroups.
fn factors_from_torsion_counts(order: u64, count: impl Fn(u64) -> u64) -> FiniteAbelianGroup {
    let mut cyclic = Vec::new();
    for (q, a) in factorize(order) {
        let mut prev = 0u32;
        let mut j = 1u32;
        let mut levels = Vec::new();
        while prev < a {
            let c = count(q.pow(j));
            let e = (c as f64).log(q as f64).round() as u32;
            levels.push(e - prev);
            prev = e;
            j += 1;
        }
        // levels[j-1] = number of cyclic q-factors of order >= q^j
        for (idx, &cnt) in levels.iter().enumerate() {
            let next = levels.get(idx + 1).copied().unwrap_or(0);
            for _ in 0..cnt - next {
                cyclic.push(q.pow(idx as u32 + 1));
            }
        }
    }
    FiniteAbelianGroup::from_orders(&cyclic)
}

/// `SK^h = S_h^{(1)} / [S_h^*, S_h^*]`, computed from the definitions.
pub fn sk_oracle(s: &ShiftedMatrixAlgebra, cfg: OracleConfig) -> Result<GroupDescription> {
    let packed = Packed::new(s)?;
    let projected = packed.projected_order();
    let route = match cfg.route {
        Route::Auto if projected <= cfg.budget.min(ENUMERATION_LIMIT) as u128 => Route::Enumerate,
        Route::Auto => Route::Reduce,
        r => r,
    };
    match route {
        Route::Enumerate => sk_enumerate(s, cfg.budget),
        _ => sk_reduce(s),
    }
}

fn sk_enumerate(s: &ShiftedMatrixAlgebra, budget: u64) -> Result<GroupDescription> {
    let alg = s.algebra();
    let gens = Generators::new(s)?;
    let p = &gens.packed;
    let projected = p.projected_order();
    if projected > budget as u128 {
        return Err(budget_error(projected, budget));
    }
    let s0 = close(p, &gens.x, budget)?;
    if s0.len() as u128 != projected {
        return Err(GdaError::Input(format!(
            "enumerated |S_0^*| = {} differs from {projected}",
            s0.len()
        )));
    }
    let exp = alg.s();
    let sh1: Vec<&Key> = s0
        .iter()
        .filter(|a| crate::scalars::pow_mod(p.det(a), exp, p.p) == 1)
        .collect();
    let comm = normal_closure(&gens, budget)?;
    if let Some(bad) = comm
        .iter()
        .find(|c| crate::scalars::pow_mod(p.det(c), exp, p.p) != 1)
    {
        return Err(GdaError::Input(format!(
            "commutator {bad:?} has reduced norm != 1"
        )));
    }
    let (n1, nc) = (sh1.len() as u64, comm.len() as u64);
    if n1 % nc != 0 {
        return Err(GdaError::Input(
            "commutator subgroup order does not divide |S_h^(1)|".into(),
        ));
    }
    let order = n1 / nc;
    let group = factors_from_torsion_counts(order, |k| {
        sh1.iter().filter(|a| comm.contains(&p.pow(a, k))).count() as u64 / nc
    });
    Ok(
        GroupDescription::finite(group, "brute-force enumeration", "S_h^(1) / [S_h^*, S_h^*]")
            .with("route", "enumerate")
            .with("|S_0^*|", s0.len())
            .with("|S_h^(1)|", n1)
            .with("|[S_h^*,S_h^*]|", nc),
    )
}

/// A commutator witness in `[S_0^*, S_0^*]` for the transvection with 1 at
/// block-local position `(i, j)`.
fn transvection_witness(p: &Packed, l: usize, i: usize, j: usize) -> Result<Option<(Key, Key)>> {
    let r = p.sizes[l];
    let target = p.unit_at(l, i, j, 1);
    let mut candidates = Vec::new();
    if p.p > 2 {
        // [diag(t), e_ij(y)] = e_ij((t - 1) y)
        let t = 2u64;
        let y = mod_inverse(t - 1, p.p).expect("p > 2");
        candidates.push((p.unit_at(l, i, i, t), p.unit_at(l, i, j, y)));
    }
    if let Some(k) = (0..r).find(|&k| k != i && k != j) {
        // [e_ik(1), e_kj(1)] = e_ij(1)
        candidates.push((p.unit_at(l, i, k, 1), p.unit_at(l, k, j, 1)));
    }
    for (a, b) in candidates {
        if p.commutator(&a, &b)? == target {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

fn dlog_vector(f: &CoefficientField, dets: &[u64]) -> Result<Vec<i64>> {
    dets.iter()
        .map(|&d| {
            f.discrete_log(&f.from_i64(d as i64))
                .map(|x| x as i64)
                .ok_or(GdaError::Singular { row: 0 })
        })
        .collect()
}

/// `S_0^* / prod SL_{r_l}` is `(T_0^*)^l` through the block determinants;
/// after certifying `prod SL_{r_l}` lies in the commutator subgroup, the
/// quotient is computed on discrete-log lattices in `Z^l`.
fn sk_reduce(s: &ShiftedMatrixAlgebra) -> Result<GroupDescription> {
    let alg = s.algebra();
    let f = alg.field();
    let gens = Generators::new(s)?;
    let p = &gens.packed;
    let q = (p.p - 1) as i64;
    let blocks = p.sizes.len();
    let mut witnesses = 0usize;
    for (l, &r) in p.sizes.iter().enumerate() {
        for i in 0..r {
            for j in 0..r {
                if i == j {
                    continue;
                }
                if transvection_witness(p, l, i, j)?.is_none() {
                    return Err(budget_error(p.projected_order(), default_budget()));
                }
                witnesses += 1;
            }
        }
    }

    let mut gens_c: Vec<Vec<i64>> = (0..blocks)
        .map(|l| (0..blocks).map(|m| if l == m { q } else { 0 }).collect())
        .collect();
    for r in &gens.relators {
        gens_c.push(dlog_vector(f, &p.block_dets(r))?);
    }
    let g = f.residue(&f.gen()).expect("prime field");
    let actions: Vec<Vec<Vec<i64>>> = gens
        .y
        .iter()
        .map(|m| {
            (0..blocks)
                .map(|b| dlog_vector(f, &p.block_dets(&p.apply(m, &p.unit_at(b, 0, 0, g)))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut lc = Lattice::from_generators(blocks, &gens_c)?;
    loop {
        let mut added = Vec::new();
        for cols in &actions {
            for v in lc.basis() {
                let w: Vec<i64> = (0..blocks)
                    .map(|i| (0..blocks).map(|b| cols[b][i] * v[b]).sum())
                    .collect();
                if !lc.contains(&w) {
                    added.push(w);
                }
            }
        }
        if added.is_empty() {
            break;
        }
        lc = lc.extend(&added)?;
    }

    // S_h^(1): s * sum(v) = 0 mod q
    let t = q / (alg.s() as i64).gcd(&q);
    let mut gens_1: Vec<Vec<i64>> = (1..blocks)
        .map(|b| {
            (0..blocks)
                .map(|i| (i == 0) as i64 - (i == b) as i64)
                .collect()
        })
        .collect();
    gens_1.push((0..blocks).map(|i| if i == 0 { t } else { 0 }).collect());
    let l1 = Lattice::from_generators(blocks, &gens_1)?;
    if !lc.is_subgroup_of(&l1) {
        return Err(GdaError::Input("a commutator has reduced norm != 1".into()));
    }
    let group = quotient(&l1, &lc)?.torsion;
    Ok(GroupDescription::finite(
        group,
        "block-determinant reduction",
        "S_h^(1) / [S_h^*, S_h^*]",
    )
    .with("route", "reduce")
    .with("|S_0^*|", p.projected_order())
    .with("transvection witnesses", witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::GradedDivisionAlgebra;
    use crate::sk::{arithmetic_shifts, sk_e};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::sync::Arc;

    fn graded_field(p: u64) -> Arc<GradedDivisionAlgebra> {
        Arc::new(
            GradedDivisionAlgebra::graded_field(
                CoefficientField::prime(p).unwrap(),
                1,
                vec![vec![1]],
            )
            .unwrap(),
        )
    }

    fn symbol(p: u64, c: i64, gamma: Vec<Vec<i64>>) -> Arc<GradedDivisionAlgebra> {
        let f = CoefficientField::prime(p).unwrap();
        let c = f.from_i64(c);
        let ci = f.inv(&c).unwrap();
        Arc::new(
            GradedDivisionAlgebra::new(
                f.clone(),
                2,
                gamma,
                vec![vec![f.one(), c], vec![ci, f.one()]],
            )
            .unwrap(),
        )
    }

    fn two_symbols(p: u64) -> Arc<GradedDivisionAlgebra> {
        let f = CoefficientField::prime(p).unwrap();
        let (o, m) = (f.one(), f.from_i64(-1));
        let c = vec![
            vec![o.clone(), m.clone(), o.clone(), o.clone()],
            vec![m.clone(), o.clone(), o.clone(), o.clone()],
            vec![o.clone(), o.clone(), o.clone(), m.clone()],
            vec![o.clone(), o.clone(), m, o],
        ];
        let g = (0..4)
            .map(|i| (0..4).map(|j| (i == j) as i64).collect())
            .collect();
        Arc::new(GradedDivisionAlgebra::new(f, 4, g, c).unwrap())
    }

    fn enumerate() -> OracleConfig {
        OracleConfig {
            budget: DEFAULT_BUDGET,
            route: Route::Enumerate,
        }
    }

    fn reduce() -> OracleConfig {
        OracleConfig {
            budget: DEFAULT_BUDGET,
            route: Route::Reduce,
        }
    }

    #[test]
    fn closure_examples() {
        let s = ShiftedMatrixAlgebra::unshifted(graded_field(3), 2).unwrap();
        assert_eq!(closure(&s, &[s.identity()], 100).unwrap().order(), 1);
        let el = elementary_subgroup(&s, 1000).unwrap();
        assert_eq!(el.order(), 24);
        let s5 = ShiftedMatrixAlgebra::unshifted(graded_field(5), 2).unwrap();
        let a = s5.algebra();
        let f = a.field();
        let d = s5
            .diagonal(&[a.unit(f.gen(), vec![0]), a.unit(f.one(), vec![0])])
            .unwrap();
        assert_eq!(closure(&s5, &[d], 100).unwrap().order(), 4);
        assert!(matches!(
            degree_zero_units(&s5, 100),
            Err(GdaError::SizeBudgetExceeded { .. })
        ));
        assert_eq!(degree_zero_units(&s5, 1000).unwrap().order(), 480);
    }

    #[test]
    fn closure_is_closed() {
        let s = ShiftedMatrixAlgebra::unshifted(graded_field(3), 2).unwrap();
        let g = degree_zero_units(&s, 1000).unwrap();
        let p = &g.packed;
        let keys: Vec<&Key> = g.elements.iter().collect();
        for a in keys.iter().step_by(5) {
            assert!(g.elements.contains(&p.inv(a).unwrap()));
            for b in keys.iter().step_by(7) {
                assert!(g.elements.contains(&p.mul(a, b)));
            }
        }
    }

    #[test]
    fn commutator_subgroup_examples() {
        let t = two_symbols(13);
        let s = ShiftedMatrixAlgebra::unshifted(t, 2).unwrap();
        let c = commutator_subgroup_sh(&s, DEFAULT_BUDGET).unwrap();
        assert_eq!(c.order(), 2184);
        let el = elementary_subgroup(&s, DEFAULT_BUDGET).unwrap();
        assert!(c.same_elements(&el));

        let g3 = ShiftedMatrixAlgebra::unshifted(graded_field(3), 2).unwrap();
        assert_eq!(commutator_subgroup_sh(&g3, 1000).unwrap().order(), 24);

        let q = symbol(5, -1, vec![vec![7, 0], vec![0, 1]]);
        let sh = ShiftedMatrixAlgebra::new(q.clone(), 2, arithmetic_shifts(&[1, 0], 2)).unwrap();
        let c = commutator_subgroup_sh(&sh, 1000).unwrap();
        assert_eq!(c.order(), 2);
        let f = q.field();
        let minus = s_scalar(&sh, f.from_i64(-1));
        assert!(c.contains(&sh, &minus).unwrap());
    }

    fn s_scalar(s: &ShiftedMatrixAlgebra, c: FieldElement) -> GradedMatrix {
        let a = s.algebra();
        s.scalar(&a.unit(c, vec![0; a.ambient_rank()])).unwrap()
    }

    #[test]
    fn torsion_count_factors() {
        for orders in [
            vec![2u64, 4],
            vec![8],
            vec![3, 3, 9],
            vec![2, 6, 12],
            vec![],
        ] {
            let g = FiniteAbelianGroup::from_orders(&orders);
            let got = factors_from_torsion_counts(g.order(), |k| {
                g.invariant_factors().iter().map(|&d| k.gcd(&d)).product()
            });
            assert_eq!(got, g);
        }
    }

    #[test]
    fn sk_oracle_matches_sk_e_at_n1() {
        for a in [
            symbol(13, -1, vec![vec![1, 0], vec![0, 1]]),
            two_symbols(13),
            symbol(7, 2, vec![vec![1, 0], vec![0, 1]]),
        ] {
            let s = ShiftedMatrixAlgebra::unshifted(a.clone(), 1).unwrap();
            let o = sk_oracle(&s, enumerate()).unwrap();
            assert_eq!(
                o.invariant_factors().unwrap(),
                sk_e(&a).invariant_factors().unwrap()
            );
        }
    }

    #[test]
    fn routes_agree() {
        let t = two_symbols(13);
        let q = symbol(5, -1, vec![vec![7, 0], vec![0, 1]]);
        let q3 = symbol(7, 2, vec![vec![7, 0], vec![0, 1]]);
        let cases = vec![
            ShiftedMatrixAlgebra::unshifted(t.clone(), 1).unwrap(),
            ShiftedMatrixAlgebra::unshifted(t, 2).unwrap(),
            ShiftedMatrixAlgebra::unshifted(graded_field(5), 2).unwrap(),
            ShiftedMatrixAlgebra::new(q.clone(), 2, arithmetic_shifts(&[1, 0], 2)).unwrap(),
            ShiftedMatrixAlgebra::new(q3.clone(), 2, arithmetic_shifts(&[1, 0], 2)).unwrap(),
            ShiftedMatrixAlgebra::new(q, 3, vec![vec![0, 0], vec![0, 1], vec![1, 0]]).unwrap(),
        ];
        for s in cases {
            let e = sk_oracle(&s, enumerate()).unwrap();
            let r = sk_oracle(&s, reduce()).unwrap();
            assert_eq!(
                e.invariant_factors().unwrap(),
                r.invariant_factors().unwrap()
            );
        }
    }

    #[test]
    fn oracle_matches_closed_forms() {
        let t = two_symbols(13);
        for (n, order) in [(2, 4), (3, 2)] {
            let s = ShiftedMatrixAlgebra::unshifted(t.clone(), n).unwrap();
            let o = sk_oracle(&s, OracleConfig::default()).unwrap();
            assert_eq!(o.order().unwrap(), order);
            assert_eq!(
                o.invariant_factors().unwrap(),
                crate::sk::sk_h_unshifted(&t, n)
                    .unwrap()
                    .invariant_factors()
                    .unwrap()
            );
        }
        // order-3 symbol: the image of mu_e I_n is {(w, w^n)}
        let q3 = symbol(7, 2, vec![vec![7, 0], vec![0, 1]]);
        let q3_10 = symbol(7, 2, vec![vec![10, 0], vec![0, 1]]);
        let q5_10 = symbol(5, -1, vec![vec![10, 0], vec![0, 1]]);
        for (a, n) in [(q3, 2), (q3_10, 3), (q5_10, 3)] {
            let s = ShiftedMatrixAlgebra::new(a.clone(), n, arithmetic_shifts(&[1, 0], n)).unwrap();
            assert_eq!(
                sk_oracle(&s, enumerate())
                    .unwrap()
                    .invariant_factors()
                    .unwrap(),
                crate::sk::sk_h_shifted(&a, n, &[1, 0])
                    .unwrap()
                    .invariant_factors()
                    .unwrap()
            );
        }
    }

    #[test]
    fn infinite_field_rejected() {
        let f = CoefficientField::cyclotomic(4).unwrap();
        let g = Arc::new(GradedDivisionAlgebra::graded_field(f, 1, vec![vec![1]]).unwrap());
        let s = ShiftedMatrixAlgebra::unshifted(g, 2).unwrap();
        assert_eq!(
            sk_oracle(&s, OracleConfig::default()).unwrap_err(),
            GdaError::InfiniteCoefficientField
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn packing_round_trip_and_homomorphism(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = two_symbols(5);
            let q = symbol(13, -1, vec![vec![1, 0], vec![0, 1]]);
            for s in [
                ShiftedMatrixAlgebra::unshifted(t.clone(), 2).unwrap(),
                ShiftedMatrixAlgebra::new(q.clone(), 3, vec![vec![0, 0], vec![1, 0], vec![1, 2]]).unwrap(),
            ] {
                let p = Packed::new(&s).unwrap();
                let a = s.random_degree_zero(&mut rng, 4).unwrap();
                let b = s.random_degree_zero(&mut rng, 4).unwrap();
                let (ka, kb) = (p.pack(&s, &a).unwrap(), p.pack(&s, &b).unwrap());
                prop_assert_eq!(&p.to_graded(&s, &ka).unwrap(), &a);
                let ab = s.mat_multiply(&a, &b).unwrap();
                prop_assert_eq!(p.pack(&s, &ab).unwrap(), p.mul(&ka, &kb));
                let f = s.algebra().field();
                prop_assert_eq!(f.from_i64(p.det(&ka) as i64), crate::dieudonne::det0(&s, &a).unwrap());
                let ai = s.mat_invert(&a).unwrap();
                prop_assert_eq!(p.pack(&s, &ai).unwrap(), p.inv(&ka).unwrap());
            }
        }
    }
}
