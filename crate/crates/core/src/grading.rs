//! Integer lattices in `Z^k`, their finite quotients and the exterior square
//! of a finite abelian group.
//!
//! All reductions run on [`BigInt`]; vectors cross the API as `i64`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};

/// A degree vector in the ambient grade group `Z^k`.
pub type Degree = Vec<i64>;

pub type IntMatrix = Vec<Vec<BigInt>>;

fn to_big(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn to_i64(x: &BigInt) -> i64 {
    x.to_i64().expect("lattice entry exceeds i64 range")
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for k in 0..inner {
                        acc += &row[k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Row-style Hermite normal form with transform: returns `(H, W)` with
/// `W * m = H`, `W` unimodular, nonzero rows of `H` first, pivots positive and
/// strictly increasing in column, entries above each pivot reduced into
/// `[0, pivot)`.
pub fn hnf_with_transform(m: &IntMatrix, cols: usize) -> (IntMatrix, IntMatrix) {
    let rows = m.len();
    let mut h = m.clone();
    let mut w = identity(rows);
    let mut pivot_row = 0;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        // gcd-combine everything below pivot_row into pivot_row
        for r in (pivot_row + 1)..rows {
            if h[r][col].is_zero() {
                continue;
            }
            let a = h[pivot_row][col].clone();
            let b = h[r][col].clone();
            let eg = a.extended_gcd(&b);
            let (g, x, y) = (eg.gcd, eg.x, eg.y);
            let (a_g, b_g) = (&a / &g, &b / &g);
            // [x y; -b/g a/g] has determinant 1
            for mat in [&mut h, &mut w] {
                let width = mat[0].len();
                for c in 0..width {
                    let p = mat[pivot_row][c].clone();
                    let q = mat[r][c].clone();
                    mat[pivot_row][c] = &x * &p + &y * &q;
                    mat[r][c] = -&b_g * &p + &a_g * &q;
                }
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            for mat in [&mut h, &mut w] {
                for v in mat[pivot_row].iter_mut() {
                    *v = -&*v;
                }
            }
        }
        let piv = h[pivot_row][col].clone();
        for r in 0..pivot_row {
            let q = h[r][col].div_floor(&piv);
            if q.is_zero() {
                continue;
            }
            for mat in [&mut h, &mut w] {
                let width = mat[0].len();
                for c in 0..width {
                    let t = &q * &mat[pivot_row][c];
                    mat[r][c] -= t;
                }
            }
        }
        pivot_row += 1;
    }
    (h, w)
}

/// Result of [`smith_normal_form`]: `u * m * v = d`.
#[derive(Clone, Debug, PartialEq)]
pub struct Snf {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl Snf {
    /// Diagonal entries of `d` (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<BigInt> {
        let n = self.d.len().min(self.d.first().map_or(0, |r| r.len()));
        (0..n).map(|i| self.d[i][i].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

/// Smith normal form over the integers with unimodular transforms.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut d = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let swap_rows = |a: &mut IntMatrix, i: usize, j: usize| a.swap(i, j);
    let swap_cols = |a: &mut IntMatrix, i: usize, j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
    };

    let mut t = 0;
    while t < rows.min(cols) {
        // smallest nonzero entry in the trailing block as pivot
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if d[i][j].is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if d[bi][bj].abs() <= d[i][j].abs() => {}
                    _ => best = Some((i, j)),
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        swap_rows(&mut d, t, pi);
        swap_rows(&mut u, t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);

        loop {
            let mut clean = true;
            // column t below the pivot
            for i in (t + 1)..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                for c in 0..cols {
                    let x = &q * &d[t][c];
                    d[i][c] -= x;
                }
                for c in 0..rows {
                    let x = &q * &u[t][c];
                    u[i][c] -= x;
                }
                if !d[i][t].is_zero() {
                    clean = false;
                    swap_rows(&mut d, t, i);
                    swap_rows(&mut u, t, i);
                }
            }
            // row t right of the pivot
            for j in (t + 1)..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                for r in 0..rows {
                    let x = &q * &d[r][t];
                    d[r][j] -= x;
                }
                for r in 0..cols {
                    let x = &q * &v[r][t];
                    v[r][j] -= x;
                }
                if !d[t][j].is_zero() {
                    clean = false;
                    swap_cols(&mut d, t, j);
                    swap_cols(&mut v, t, j);
                }
            }
            if !clean {
                continue;
            }
            // divisibility: pivot must divide the whole trailing block
            let mut fix = None;
            'scan: for i in (t + 1)..rows {
                for j in (t + 1)..cols {
                    if !(&d[i][j] % &d[t][t]).is_zero() {
                        fix = Some(i);
                        break 'scan;
                    }
                }
            }
            match fix {
                Some(i) => {
                    // add row i to row t, then re-clean
                    for c in 0..cols {
                        let x = d[i][c].clone();
                        d[t][c] += x;
                    }
                    for c in 0..rows {
                        let x = u[i][c].clone();
                        u[t][c] += x;
                    }
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for c in 0..cols {
                d[t][c] = -&d[t][c];
            }
            for c in 0..rows {
                u[t][c] = -&u[t][c];
            }
        }
        t += 1;
    }
    Snf { u, d, v }
}

/// A subgroup of `Z^k`, stored by its Hermite-reduced basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    ambient_rank: usize,
    basis: Vec<Vec<i64>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice(k={}, {:?})", self.ambient_rank, self.basis)
    }
}

impl Lattice {
    /// The lattice spanned by arbitrary (possibly dependent) generators.
    pub fn from_generators(ambient_rank: usize, gens: &[Vec<i64>]) -> Result<Self> {
        for g in gens {
            if g.len() != ambient_rank {
                return Err(GdaError::DimensionMismatch {
                    expected: ambient_rank,
                    found: g.len(),
                });
            }
        }
        if gens.is_empty() {
            return Ok(Self::zero(ambient_rank));
        }
        let (h, _) = hnf_with_transform(&to_big(gens), ambient_rank);
        let basis = h
            .iter()
            .filter(|r| r.iter().any(|x| !x.is_zero()))
            .map(|r| r.iter().map(to_i64).collect())
            .collect();
        Ok(Self {
            ambient_rank,
            basis,
        })
    }

    pub fn full(ambient_rank: usize) -> Self {
        let basis = (0..ambient_rank)
            .map(|i| (0..ambient_rank).map(|j| i64::from(i == j)).collect())
            .collect();
        Self {
            ambient_rank,
            basis,
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Self {
            ambient_rank,
            basis: Vec::new(),
        }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn pivot(row: &[i64]) -> usize {
        row.iter().position(|&x| x != 0).expect("zero basis row")
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// coefficients used. The remainder is a canonical coset representative
    /// of `v + L`.
    fn reduce_with_coords(&self, v: &[i64]) -> (Vec<i64>, Vec<i64>) {
        let mut rem: Vec<i128> = v.iter().map(|&x| x as i128).collect();
        let mut coords = vec![0i64; self.basis.len()];
        for (idx, row) in self.basis.iter().enumerate() {
            let p = Self::pivot(row);
            let piv = row[p] as i128;
            let q = rem[p].div_euclid(piv);
            if q != 0 {
                for (r, &b) in rem.iter_mut().zip(row) {
                    *r -= q * b as i128;
                }
            }
            coords[idx] = q as i64;
        }
        (
            rem.into_iter()
                .map(|x| i64::try_from(x).expect("coset reduction overflow"))
                .collect(),
            coords,
        )
    }

    /// Canonical representative of the coset `v + L`.
    pub fn reduce(&self, v: &[i64]) -> Degree {
        self.reduce_with_coords(v).0
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.ambient_rank && self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Coordinates of `v` in the stored basis, or `None` if `v` is outside.
    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        let (rem, coords) = self.reduce_with_coords(v);
        rem.iter().all(|&x| x == 0).then_some(coords)
    }

    pub fn same_coset(&self, a: &[i64], b: &[i64]) -> bool {
        let diff: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.contains(&diff)
    }

    pub fn is_subgroup_of(&self, sup: &Lattice) -> bool {
        self.basis.iter().all(|b| sup.contains(b))
    }

    /// `self + other`.
    pub fn join(&self, other: &Lattice) -> Result<Lattice> {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        Lattice::from_generators(self.ambient_rank, &gens)
    }

    /// `self + Z v_1 + ... + Z v_m`.
    pub fn extend(&self, vs: &[Vec<i64>]) -> Result<Lattice> {
        let mut gens = self.basis.clone();
        gens.extend(vs.iter().cloned());
        Lattice::from_generators(self.ambient_rank, &gens)
    }

    /// The image of `gens` (vectors in `Z^r`) under the map sending
    /// `e_i` to the i-th row of `rows` (a `r x k` matrix).
    pub fn image_of(rows: &[Vec<i64>], ambient_rank: usize, gens: &[Vec<i64>]) -> Result<Lattice> {
        let mapped: Vec<Vec<i64>> = gens
            .iter()
            .map(|g| {
                (0..ambient_rank)
                    .map(|c| g.iter().zip(rows).map(|(a, r)| a * r[c]).sum())
                    .collect()
            })
            .collect();
        Lattice::from_generators(ambient_rank, &mapped)
    }
}

/// Fixed generators `g_1..g_r` of a lattice together with a solver for
/// coordinates with respect to them (not the Hermite basis).
#[derive(Clone, Debug)]
pub struct GeneratorBasis {
    generators: Vec<Vec<i64>>,
    lattice: Lattice,
    // row i: the i-th Hermite basis vector expressed in the generators
    to_generators: Vec<Vec<i64>>,
}

impl GeneratorBasis {
    /// Fails with `DependentGenerators` if the rows are not independent.
    pub fn new(ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        let lattice = Lattice::from_generators(ambient_rank, &generators)?;
        if lattice.rank() != generators.len() {
            return Err(GdaError::DependentGenerators);
        }
        let (h, w) = hnf_with_transform(&to_big(&generators), ambient_rank);
        debug_assert!(h.iter().all(|r| r.iter().any(|x| !x.is_zero())));
        let to_generators = w.iter().map(|r| r.iter().map(to_i64).collect()).collect();
        Ok(Self {
            generators,
            lattice,
            to_generators,
        })
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn coordinates(&self, v: &[i64]) -> Option<Vec<i64>> {
        let h = self.lattice.coordinates(v)?;
        let r = self.generators.len();
        Some(
            (0..r)
                .map(|j| {
                    h.iter()
                        .zip(&self.to_generators)
                        .map(|(c, row)| c * row[j])
                        .sum()
                })
                .collect(),
        )
    }

    /// `sum a_i g_i`.
    pub fn combine(&self, coords: &[i64]) -> Degree {
        let k = self.lattice.ambient_rank();
        (0..k)
            .map(|c| {
                coords
                    .iter()
                    .zip(&self.generators)
                    .map(|(a, g)| a * g[c])
                    .sum()
            })
            .collect()
    }
}

/// `Z/d_1 + ... + Z/d_r` with `d_1 | d_2 | ... | d_r`, each `d_i >= 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    invariant_factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn trivial() -> Self {
        Self {
            invariant_factors: Vec::new(),
        }
    }

    pub fn cyclic(order: u64) -> Self {
        Self::from_orders(&[order])
    }

    /// Normalizes an arbitrary direct sum `Z/a_1 + ... + Z/a_m` (zeros are
    /// not allowed; ones are dropped) into invariant-factor form.
    pub fn from_orders(orders: &[u64]) -> Self {
        assert!(orders.iter().all(|&a| a > 0), "cyclic factor of order 0");
        // split into prime powers, then regroup
        let mut primes: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for &a in orders {
            for (p, e) in crate::scalars::factorize(a) {
                primes.entry(p).or_default().push(e);
            }
        }
        let len = primes.values().map(|v| v.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, mut exps) in primes {
            exps.sort_unstable_by(|a, b| b.cmp(a));
            for (i, e) in exps.into_iter().enumerate() {
                factors[len - 1 - i] *= p.pow(e);
            }
        }
        factors.retain(|&d| d > 1);
        Self {
            invariant_factors: factors,
        }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.invariant_factors
    }

    pub fn order(&self) -> u64 {
        self.invariant_factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.invariant_factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.invariant_factors.len() <= 1
    }

    /// `G / nG`.
    pub fn mod_multiples(&self, n: u64) -> Self {
        let orders: Vec<u64> = self
            .invariant_factors
            .iter()
            .map(|&d| num_integer::gcd(d, n))
            .collect();
        Self::from_orders(&orders)
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.invariant_factors.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .invariant_factors
            .iter()
            .map(|d| format!("Z/{d}"))
            .collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// A quotient `sup / sub`: torsion part plus free rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Quotient {
    pub torsion: FiniteAbelianGroup,
    pub free_rank: usize,
}

impl Quotient {
    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }
}

fn invariants_from_diagonal(diag: &[BigInt]) -> Vec<u64> {
    diag.iter()
        .filter(|x| !x.is_zero() && !x.is_one())
        .map(|x| x.to_u64().expect("invariant factor exceeds u64"))
        .collect()
}

pub fn quotient(sup: &Lattice, sub: &Lattice) -> Result<Quotient> {
    if sup.ambient_rank() != sub.ambient_rank() {
        return Err(GdaError::DimensionMismatch {
            expected: sup.ambient_rank(),
            found: sub.ambient_rank(),
        });
    }
    let mut coords = Vec::with_capacity(sub.rank());
    for b in sub.basis() {
        match sup.coordinates(b) {
            Some(c) => coords.push(c),
            None => return Err(GdaError::NotASubgroup),
        }
    }
    if coords.is_empty() {
        return Ok(Quotient {
            torsion: FiniteAbelianGroup::trivial(),
            free_rank: sup.rank(),
        });
    }
    let snf = smith_normal_form(&to_big(&coords));
    let rank = snf.rank();
    Ok(Quotient {
        torsion: FiniteAbelianGroup {
            invariant_factors: invariants_from_diagonal(&snf.diagonal()),
        },
        free_rank: sup.rank() - rank,
    })
}

/// `Q ^ Q` for a finite abelian group given by invariant factors:
/// `sum_{i<j} Z/d_i`.
pub fn exterior_square(q: &FiniteAbelianGroup) -> FiniteAbelianGroup {
    let d = q.invariant_factors();
    let mut orders = Vec::new();
    for i in 0..d.len() {
        for _ in (i + 1)..d.len() {
            orders.push(d[i]);
        }
    }
    FiniteAbelianGroup::from_orders(&orders)
}

/// A group-element order that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Order {
    Finite(u64),
    Infinite,
}

pub fn coset_order(v: &[i64], lattice: &Lattice) -> Order {
    if lattice.contains(v) {
        return Order::Finite(1);
    }
    if lattice.rank() == 0 {
        return Order::Infinite;
    }
    let snf = smith_normal_form(&to_big(lattice.basis()));
    let w: Vec<BigInt> = {
        let row = to_big(&[v.to_vec()]);
        mat_mul(&row, &snf.v).remove(0)
    };
    let diag = snf.diagonal();
    let mut order = BigInt::one();
    for (i, wi) in w.iter().enumerate() {
        match diag.get(i).filter(|d| !d.is_zero()) {
            Some(d) => {
                let part = d / d.gcd(wi);
                order = order.lcm(&part);
            }
            None if !wi.is_zero() => return Order::Infinite,
            None => {}
        }
    }
    Order::Finite(order.to_u64().expect("coset order exceeds u64"))
}
