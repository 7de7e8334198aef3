//! Reduced norms on `S_0`, the maps `eta`/`xi`, and closed forms for
//! `SK(E)` and `SK^h(M_n(E)(delta))`.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::Serialize;

use crate::algebra::GradedDivisionAlgebra;
use crate::dieudonne::det0;
use crate::error::{GdaError, Result};
use crate::gmatrix::{GradedMatrix, Homogeneity, ShiftedMatrixAlgebra};
use crate::grading::{coset_order, quotient, Degree, FiniteAbelianGroup, Lattice, Order};
use crate::scalars::FieldElement;

/// A computed abelian group with the formula that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupDescription {
    #[serde(skip)]
    group: Option<FiniteAbelianGroup>,
    pub provenance: String,
    pub formula: String,
    pub components: BTreeMap<String, String>,
}

impl GroupDescription {
    pub fn finite(group: FiniteAbelianGroup, provenance: &str, formula: &str) -> Self {
        Self {
            group: Some(group),
            provenance: provenance.to_string(),
            formula: formula.to_string(),
            components: BTreeMap::new(),
        }
    }

    pub fn structural(provenance: &str, formula: &str) -> Self {
        Self {
            group: None,
            provenance: provenance.to_string(),
            formula: formula.to_string(),
            components: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.components.insert(key.to_string(), value.to_string());
        self
    }

    pub fn invariant_factors(&self) -> Result<&FiniteAbelianGroup> {
        self.group.as_ref().ok_or_else(|| GdaError::InfiniteT0Star {
            formula: self.formula.clone(),
        })
    }

    pub fn order(&self) -> Result<u64> {
        Ok(self.invariant_factors()?.order())
    }

    pub fn is_structural(&self) -> bool {
        self.group.is_none()
    }
}

fn zero_degree(s: &ShiftedMatrixAlgebra) -> Degree {
    vec![0; s.algebra().ambient_rank()]
}

/// `Nrd_{S_0}`: product of the block determinants.
pub fn nrd_s0(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<FieldElement> {
    det0(s, a)
}

/// `Nrd_S = Nrd_{S_0}^s` on `S_0^*`.
pub fn nrd_s(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<FieldElement> {
    let d = nrd_s0(s, a)?;
    Ok(s.algebra().field().pow(&d, s.algebra().s() as i64))
}

/// Membership in `S_h^{(1)}`, which lies inside `S_0^*`.
pub fn in_sh1(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<bool> {
    match s.homogeneity(a) {
        Homogeneity::Degree(d) if d == zero_degree(s) => {}
        Homogeneity::Degree(_) => return Ok(false),
        Homogeneity::Zero => return Err(GdaError::Singular { row: 0 }),
        Homogeneity::NotHomogeneous => return Err(GdaError::NotHomogeneous),
    }
    Ok(s.algebra().field().is_one(&nrd_s(s, a)?))
}

fn check_not_exceptional(s: &ShiftedMatrixAlgebra) -> Result<()> {
    if s.is_exceptional_f2() {
        return Err(GdaError::ExceptionalF2Config);
    }
    Ok(())
}

/// `eta(c) = diag(c, 1, ..., 1)` for `c` with `c^s = 1`.
pub fn eta(s: &ShiftedMatrixAlgebra, c: &FieldElement) -> Result<GradedMatrix> {
    check_not_exceptional(s)?;
    let alg = s.algebra();
    let f = alg.field();
    if f.is_zero(c) || !f.is_one(&f.pow(c, alg.s() as i64)) {
        return Err(GdaError::Input(format!(
            "{} does not have reduced norm 1",
            f.format(c)
        )));
    }
    let zero = zero_degree(s);
    let mut units = vec![alg.unit(f.one(), zero.clone()); s.n()];
    units[0] = alg.unit(c.clone(), zero);
    s.diagonal(&units)
}

/// `xi(A)`: the class of `det_{S_0}(A)`; `[E_0^*, E^*]` is trivial here.
pub fn xi(s: &ShiftedMatrixAlgebra, a: &GradedMatrix) -> Result<FieldElement> {
    check_not_exceptional(s)?;
    if !in_sh1(s, a)? {
        return Err(GdaError::Input("matrix is not in S_h^(1)".into()));
    }
    det0(s, a)
}

/// `SK(E) = mu_s(T_0)/mu_e(T_0)` (trivial for a graded field).
pub fn sk_e(e: &GradedDivisionAlgebra) -> GroupDescription {
    let ms = e.mu_s().order;
    let me = e.mu_e().order;
    let (prov, formula) = if e.is_graded_field() {
        ("graded field", "SK(E) = 1")
    } else {
        (
            "totally ramified closed form",
            "SK(E) = mu_s(T_0)/mu_e(T_0)",
        )
    };
    GroupDescription::finite(FiniteAbelianGroup::cyclic(ms / me), prov, formula)
        .with("|mu_s(T_0)|", ms)
        .with("|mu_e(T_0)|", me)
        .with("s", e.s())
        .with("e", e.e())
}

/// `[E^*,E^*]/([E^*,E^*]^n [E^*,E_0^*]) = mu_e/mu_e^n = Z/gcd(n, |mu_e|)`,
/// reported alongside `Lambda/n Lambda`.
pub fn kernel_group(e: &GradedDivisionAlgebra, n: u64) -> GroupDescription {
    let me = e.mu_e().order;
    let g = n.gcd(&me);
    let lam = e.lambda().mod_multiples(n);
    GroupDescription::finite(
        FiniteAbelianGroup::cyclic(g),
        "commutator kernel",
        "mu_e(T_0)/mu_e(T_0)^n",
    )
    .with("gcd(n,e)", g)
    .with("Lambda/nLambda", &lam)
    .with("|Lambda/nLambda|", lam.order())
}

/// `SK^h(M_n(E))` for the unshifted grading: `mu_s(T_0)/mu_e(T_0)^n` via the
/// determinant, an extension of `SK(E)` by `Z/gcd(n,e)`.
pub fn sk_h_unshifted(e: &GradedDivisionAlgebra, n: usize) -> Result<GroupDescription> {
    if n == 0 {
        return Err(GdaError::Input("n must be positive".into()));
    }
    if n == 2 && e.field().characteristic() == 2 {
        return Err(GdaError::ExceptionalF2Config);
    }
    let ms = e.mu_s().order;
    let me = e.mu_e().order;
    let kernel = kernel_group(e, n as u64);
    let sk = sk_e(e);
    // |mu_e^n| = |mu_e| / gcd(n, |mu_e|)
    let image = me / (n as u64).gcd(&me);
    let order = ms / image;
    debug_assert_eq!(order, kernel.order().unwrap() * sk.order().unwrap());
    Ok(GroupDescription::finite(
        FiniteAbelianGroup::cyclic(order),
        "exact sequence 0 -> Z/gcd(n,e) -> SK^h -> SK(E) -> 0",
        "SK^h(M_n(E)) = mu_s(T_0)/mu_e(T_0)^n",
    )
    .with("n", n)
    .with("kernel", kernel.invariant_factors()?)
    .with("|kernel|", kernel.order()?)
    .with("SK(E)", sk.invariant_factors()?)
    .with("|SK(E)|", sk.order()?))
}

/// The shift vector `(0, delta, 2 delta, ..., (n-1) delta)`.
pub fn arithmetic_shifts(delta: &[i64], n: usize) -> Vec<Degree> {
    (0..n as i64)
        .map(|i| delta.iter().map(|x| i * x).collect())
        .collect()
}

/// `SK^h(M_n(E)(0, delta, ..., (n-1)delta))` when the coset order of `delta`
/// exceeds `3n`: `(T_0^{*(n-1)} x mu_s(T_0)) / H`, `H` the image of
/// `mu_e I_n`, i.e. `{(w, ..., w, w^n)}`.
pub fn sk_h_shifted(
    e: &GradedDivisionAlgebra,
    n: usize,
    delta: &[i64],
) -> Result<GroupDescription> {
    if n < 2 {
        return Err(GdaError::UnsupportedShift);
    }
    if delta.len() != e.ambient_rank() {
        return Err(GdaError::DimensionMismatch {
            expected: e.ambient_rank(),
            found: delta.len(),
        });
    }
    let m = coset_order(delta, e.gamma_e());
    if let Order::Finite(m) = m {
        if m <= 3 * n as u64 {
            return Err(GdaError::OrderTooSmall {
                m: m.to_string(),
                n,
            });
        }
    }
    let m_str = match m {
        Order::Finite(m) => m.to_string(),
        Order::Infinite => "infinite".to_string(),
    };
    let ms = e.mu_s().order;
    let me = e.mu_e().order;
    let formula = "SK^h = (prod_{i<n} T_0^* x mu_s(T_0)) / {(w,...,w,w^n) : w in mu_e(T_0)}";
    let prov = "shifted diagonal formula";
    let Some(q) = e.field().unit_group_order() else {
        return Ok(GroupDescription::structural(prov, formula)
            .with("n", n)
            .with("coset order", m_str)
            .with("|T_0^*|", "infinite")
            .with("|mu_s(T_0)|", ms)
            .with("|mu_e(T_0)|", me));
    };
    // additive coordinates: T_0^* = Z/q via the primitive root, mu_s = Z/ms
    let qi = q as i64;
    let mut rels: Vec<Vec<i64>> = Vec::new();
    for i in 0..n - 1 {
        let mut r = vec![0; n];
        r[i] = qi;
        rels.push(r);
    }
    let mut r = vec![0; n];
    r[n - 1] = ms as i64;
    rels.push(r);
    let mut h = vec![(q / me) as i64; n];
    h[n - 1] = (n as u64 * ms / me) as i64;
    rels.push(h);
    let sub = Lattice::from_generators(n, &rels)?;
    let group = quotient(&Lattice::full(n), &sub)?.torsion;
    Ok(GroupDescription::finite(group, prov, formula)
        .with("n", n)
        .with("coset order", m_str)
        .with("|T_0^*|", q)
        .with("|mu_s(T_0)|", ms)
        .with("|mu_e(T_0)|", me))
}
