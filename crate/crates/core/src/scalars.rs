//! Exact coefficient fields: `GF(p)` and `Q(zeta_N)`.
//!
//! A [`CoefficientField`] is a ring object; [`FieldElement`]s are plain
//! values and every operation goes through the field. Cyclotomic elements
//! are reduced modulo `Phi_N`, so equality is structural.

use std::collections::HashMap;
use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GdaError, Result};
use crate::grading::Order;

pub const MAX_PRIME: u64 = 1_000_000;
pub const MAX_CYCLOTOMIC: u64 = 120;

/// Trial-division factorization, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).len() == 1 && factorize(n)[0].1 == 1
}

pub fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FieldKind {
    #[serde(rename = "gf")]
    Prime {
        p: u64,
    },
    Cyclotomic {
        n: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FieldElement {
    Mod(u64),
    /// Coefficients of `1, z, ..., z^{phi(N)-1}`.
    Poly(Vec<BigRational>),
}

#[derive(Clone, Debug)]
struct PrimeData {
    p: u64,
    primitive_root: u64,
    baby_steps: OnceLock<(u64, HashMap<u64, u64>)>,
}

#[derive(Clone, Debug)]
struct CycloData {
    n: u64,
    // monic Phi_N, ascending, length deg + 1
    phi: Vec<BigInt>,
    deg: usize,
    // order of the full root-of-unity group (N or 2N)
    roots_order: u64,
}

#[derive(Clone, Debug)]
enum Repr {
    Prime(PrimeData),
    Cyclo(CycloData),
}

#[derive(Clone, Debug)]
pub struct CoefficientField {
    kind: FieldKind,
    repr: Repr,
}

impl PartialEq for CoefficientField {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}

impl Eq for CoefficientField {}

/// The cyclic group `mu_d(F)` with an explicit generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootsOfUnity {
    pub order: u64,
    pub generator: FieldElement,
}

impl RootsOfUnity {
    /// `g^0, g^1, ..., g^{order-1}`.
    pub fn elements(&self, field: &CoefficientField) -> Vec<FieldElement> {
        let mut out = Vec::with_capacity(self.order as usize);
        let mut x = field.one();
        for _ in 0..self.order {
            out.push(x.clone());
            x = field.mul(&x, &self.generator);
        }
        out
    }

    pub fn contains(&self, field: &CoefficientField, x: &FieldElement) -> bool {
        !field.is_zero(x) && field.pow(x, self.order as i64) == field.one()
    }

    /// Exponent `k` with `g^k = x`, if `x` lies in the group.
    pub fn log(&self, field: &CoefficientField, x: &FieldElement) -> Option<u64> {
        if !self.contains(field, x) {
            return None;
        }
        if let Repr::Prime(_) = field.repr {
            // x = g^k and g = r^{(p-1)/order} for the primitive root r
            let l = field.discrete_log(x)?;
            let step = field.unit_group_order().expect("finite") / self.order;
            let k = l / step;
            let g_log = field.discrete_log(&self.generator)? / step;
            // g_log is a unit mod order
            let inv = mod_inverse(g_log % self.order, self.order)?;
            return Some(k * inv % self.order);
        }
        self.elements(field)
            .iter()
            .position(|y| y == x)
            .map(|k| k as u64)
    }
}

pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let eg = (a as i128).extended_gcd(&(m as i128));
    (eg.gcd == 1).then(|| eg.x.rem_euclid(m as i128) as u64)
}

fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // x^n - 1 divided by Phi_d for every proper divisor d
    let mut num: Vec<BigInt> = vec![BigInt::zero(); n as usize + 1];
    num[0] = BigInt::from(-1);
    num[n as usize] = BigInt::one();
    for d in 1..n {
        if n.is_multiple_of(d) {
            let den = cyclotomic_polynomial(d);
            num = int_poly_div_exact(&num, &den);
        }
    }
    num
}

fn int_poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut q = vec![BigInt::zero(); qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd].clone(); // den is monic
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        q[i] = c;
    }
    debug_assert!(rem.iter().all(|x| x.is_zero()));
    q
}

fn common_denominator(x: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = x
        .iter()
        .filter(|v| !v.denom().is_one())
        .fold(BigInt::one(), |d, v| {
            if (&d % v.denom()).is_zero() {
                d
            } else {
                d.lcm(v.denom())
            }
        });
    if den.is_one() {
        return (x.iter().map(|v| v.numer().clone()).collect(), den);
    }
    let nums = x.iter().map(|v| v.numer() * (&den / v.denom())).collect();
    (nums, den)
}

impl CoefficientField {
    pub fn new(kind: FieldKind) -> Result<Self> {
        match kind {
            FieldKind::Prime { p } => Self::prime(p),
            FieldKind::Cyclotomic { n } => Self::cyclotomic(n),
        }
    }

    pub fn prime(p: u64) -> Result<Self> {
        if p > MAX_PRIME {
            return Err(GdaError::FieldOutOfRange(p));
        }
        if !is_prime(p) {
            return Err(GdaError::NotPrime(p));
        }
        let qs: Vec<u64> = factorize(p - 1).into_iter().map(|(q, _)| q).collect();
        let primitive_root = (1..p)
            .find(|&g| qs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
            .expect("GF(p)^* is cyclic");
        Ok(Self {
            kind: FieldKind::Prime { p },
            repr: Repr::Prime(PrimeData {
                p,
                primitive_root,
                baby_steps: OnceLock::new(),
            }),
        })
    }

    pub fn cyclotomic(n: u64) -> Result<Self> {
        if n == 0 || n > MAX_CYCLOTOMIC {
            return Err(GdaError::FieldOutOfRange(n));
        }
        let phi = cyclotomic_polynomial(n);
        let deg = phi.len() - 1;
        debug_assert_eq!(deg as u64, euler_phi(n));
        Ok(Self {
            kind: FieldKind::Cyclotomic { n },
            repr: Repr::Cyclo(CycloData {
                n,
                phi,
                deg,
                roots_order: if n.is_multiple_of(2) { n } else { 2 * n },
            }),
        })
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn characteristic(&self) -> u64 {
        match &self.repr {
            Repr::Prime(d) => d.p,
            Repr::Cyclo(_) => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.repr, Repr::Prime(_))
    }

    /// `|F^*|` for finite fields.
    pub fn unit_group_order(&self) -> Option<u64> {
        match &self.repr {
            Repr::Prime(d) => Some(d.p - 1),
            Repr::Cyclo(_) => None,
        }
    }

    /// Order of the group of all roots of unity in the field.
    pub fn roots_of_unity_order(&self) -> u64 {
        match &self.repr {
            Repr::Prime(d) => d.p - 1,
            Repr::Cyclo(c) => c.roots_order,
        }
    }

    pub fn zero(&self) -> FieldElement {
        match &self.repr {
            Repr::Prime(_) => FieldElement::Mod(0),
            Repr::Cyclo(c) => FieldElement::Poly(vec![BigRational::zero(); c.deg]),
        }
    }

    pub fn one(&self) -> FieldElement {
        self.from_i64(1)
    }

    pub fn from_i64(&self, x: i64) -> FieldElement {
        match &self.repr {
            Repr::Prime(d) => FieldElement::Mod(x.rem_euclid(d.p as i64) as u64),
            Repr::Cyclo(c) => {
                let mut v = vec![BigRational::zero(); c.deg];
                v[0] = BigRational::from_integer(BigInt::from(x));
                FieldElement::Poly(v)
            }
        }
    }

    pub fn from_rational(&self, q: &BigRational) -> Result<FieldElement> {
        match &self.repr {
            Repr::Prime(d) => {
                let p = BigInt::from(d.p);
                let num = q.numer().mod_floor(&p);
                let den = q.denom().mod_floor(&p);
                if den.is_zero() {
                    return Err(GdaError::Input(format!("denominator divisible by {}", d.p)));
                }
                let n = u64::try_from(num).unwrap();
                let dn = u64::try_from(den).unwrap();
                Ok(FieldElement::Mod(n * pow_mod(dn, d.p - 2, d.p) % d.p))
            }
            Repr::Cyclo(c) => {
                let mut v = vec![BigRational::zero(); c.deg];
                v[0] = q.clone();
                Ok(FieldElement::Poly(v))
            }
        }
    }

    /// The generator `z` of `Q(zeta_N)`; for prime fields the primitive root.
    pub fn gen(&self) -> FieldElement {
        match &self.repr {
            Repr::Prime(d) => FieldElement::Mod(d.primitive_root),
            Repr::Cyclo(c) => {
                let mut coeffs = vec![BigRational::zero(); c.deg + 1];
                coeffs[1] = BigRational::one();
                self.reduce_poly(coeffs)
            }
        }
    }

    fn reduce_poly(&self, mut coeffs: Vec<BigRational>) -> FieldElement {
        let Repr::Cyclo(c) = &self.repr else {
            unreachable!()
        };
        let d = c.deg;
        for i in (d..coeffs.len()).rev() {
            let top = std::mem::take(&mut coeffs[i]);
            if top.is_zero() {
                continue;
            }
            for (j, pj) in c.phi.iter().enumerate().take(d) {
                coeffs[i - d + j] -= &top * BigRational::from_integer(pj.clone());
            }
        }
        coeffs.truncate(d);
        coeffs.resize(d, BigRational::zero());
        FieldElement::Poly(coeffs)
    }

    fn reduce_int_poly(&self, mut coeffs: Vec<BigInt>, den: &BigInt) -> FieldElement {
        let Repr::Cyclo(c) = &self.repr else {
            unreachable!()
        };
        let d = c.deg;
        for i in (d..coeffs.len()).rev() {
            let top = std::mem::take(&mut coeffs[i]);
            if top.is_zero() {
                continue;
            }
            for (j, pj) in c.phi.iter().enumerate().take(d) {
                coeffs[i - d + j] -= &top * pj;
            }
        }
        coeffs.resize(d, BigInt::zero());
        FieldElement::Poly(
            coeffs
                .into_iter()
                .map(|v| {
                    if den.is_one() || v.is_zero() {
                        BigRational::from_integer(v)
                    } else {
                        BigRational::new(v, den.clone())
                    }
                })
                .collect(),
        )
    }

    /// Image of `x` under `z -> z^k`.
    fn conjugate(&self, x: &FieldElement, k: u64) -> FieldElement {
        let (Repr::Cyclo(c), FieldElement::Poly(v)) = (&self.repr, x) else {
            unreachable!()
        };
        let mut out = vec![BigRational::zero(); c.n as usize];
        for (i, a) in v.iter().enumerate() {
            out[(i as u64 * k % c.n) as usize] += a;
        }
        self.reduce_poly(out)
    }

    fn p(&self) -> u64 {
        match &self.repr {
            Repr::Prime(d) => d.p,
            Repr::Cyclo(_) => unreachable!("prime-field operation on cyclotomic field"),
        }
    }

    pub fn is_zero(&self, x: &FieldElement) -> bool {
        match x {
            FieldElement::Mod(v) => *v == 0,
            FieldElement::Poly(v) => v.iter().all(|c| c.is_zero()),
        }
    }

    pub fn is_one(&self, x: &FieldElement) -> bool {
        *x == self.one()
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Mod(x), FieldElement::Mod(y)) => FieldElement::Mod((x + y) % self.p()),
            (FieldElement::Poly(x), FieldElement::Poly(y)) => {
                FieldElement::Poly(x.iter().zip(y).map(|(u, v)| u + v).collect())
            }
            _ => panic!("mixed field elements"),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        match a {
            FieldElement::Mod(x) => FieldElement::Mod((self.p() - x) % self.p()),
            FieldElement::Poly(x) => FieldElement::Poly(x.iter().map(|u| -u).collect()),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        match (a, b) {
            (FieldElement::Mod(x), FieldElement::Mod(y)) => FieldElement::Mod(x * y % self.p()),
            (FieldElement::Poly(x), FieldElement::Poly(y)) => {
                // integer product over a common denominator, normalised once
                let (nx, dx) = common_denominator(x);
                let (ny, dy) = common_denominator(y);
                let mut prod = vec![BigInt::zero(); nx.len() + ny.len()];
                for (i, u) in nx.iter().enumerate() {
                    if u.is_zero() {
                        continue;
                    }
                    for (j, v) in ny.iter().enumerate() {
                        if !v.is_zero() {
                            prod[i + j] += u * v;
                        }
                    }
                }
                let den = dx * dy;
                self.reduce_int_poly(prod, &den)
            }
            _ => panic!("mixed field elements"),
        }
    }

    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if self.is_zero(a) {
            return Err(GdaError::ZeroElement);
        }
        match (&self.repr, a) {
            (Repr::Prime(d), FieldElement::Mod(x)) => {
                Ok(FieldElement::Mod(pow_mod(*x, d.p - 2, d.p)))
            }
            (Repr::Cyclo(c), FieldElement::Poly(_)) => {
                // a^{-1} = (product of the other conjugates) / norm
                let mut others = self.one();
                for k in 2..c.n {
                    if k.gcd(&c.n) == 1 {
                        others = self.mul(&others, &self.conjugate(a, k));
                    }
                }
                let FieldElement::Poly(norm) = self.mul(a, &others) else {
                    unreachable!()
                };
                debug_assert!(norm[1..].iter().all(|v| v.is_zero()));
                let FieldElement::Poly(o) = others else {
                    unreachable!()
                };
                Ok(FieldElement::Poly(o.iter().map(|v| v / &norm[0]).collect()))
            }
            _ => panic!("element does not belong to this field"),
        }
    }

    pub fn div(&self, a: &FieldElement, b: &FieldElement) -> Result<FieldElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// `a^e`; negative exponents invert (panics on zero base with e < 0).
    pub fn pow(&self, a: &FieldElement, e: i64) -> FieldElement {
        if let FieldElement::Mod(x) = a {
            let p = self.p();
            let base = if e < 0 { pow_mod(*x, p - 2, p) } else { *x };
            return FieldElement::Mod(pow_mod(base, e.unsigned_abs(), p));
        }
        let mut base = if e < 0 {
            self.inv(a).expect("inverse of zero")
        } else {
            a.clone()
        };
        let mut k = e.unsigned_abs();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Discrete logarithm to the primitive root, by baby-step giant-step.
    pub fn discrete_log(&self, x: &FieldElement) -> Option<u64> {
        let Repr::Prime(d) = &self.repr else {
            return None;
        };
        let FieldElement::Mod(x) = *x else {
            return None;
        };
        if x == 0 {
            return None;
        }
        let order = d.p - 1;
        let (m, table) = d.baby_steps.get_or_init(|| {
            let m = (order as f64).sqrt().ceil() as u64;
            let mut t = HashMap::with_capacity(m as usize);
            let mut cur = 1u64;
            for j in 0..m {
                t.entry(cur).or_insert(j);
                cur = cur * d.primitive_root % d.p;
            }
            (m, t)
        });
        // factor = g^{-m}
        let factor = pow_mod(pow_mod(d.primitive_root, d.p - 2, d.p), *m, d.p);
        let mut gamma = x;
        for i in 0..=*m {
            if let Some(j) = table.get(&gamma) {
                return Some((i * m + j) % order);
            }
            gamma = gamma * factor % d.p;
        }
        None
    }

    /// Multiplicative order of a nonzero element.
    pub fn order_of_unit(&self, x: &FieldElement) -> Result<Order> {
        if self.is_zero(x) {
            return Err(GdaError::ZeroElement);
        }
        let group = self.roots_of_unity_order();
        if self.pow(x, group as i64) != self.one() {
            return Ok(Order::Infinite);
        }
        let mut t = group;
        for (q, _) in factorize(group) {
            while t.is_multiple_of(q) && self.pow(x, (t / q) as i64) == self.one() {
                t /= q;
            }
        }
        Ok(Order::Finite(t))
    }

    /// `mu_d(F)`, the d-th roots of unity lying in `F`.
    pub fn mu(&self, d: u64) -> RootsOfUnity {
        assert!(d >= 1, "mu_d needs d >= 1");
        let full = self.roots_of_unity_order();
        let order = d.gcd(&full);
        let full_gen = match &self.repr {
            Repr::Prime(p) => FieldElement::Mod(p.primitive_root),
            Repr::Cyclo(c) if c.n % 2 == 0 => self.gen(),
            // -zeta_N has order 2N for odd N
            Repr::Cyclo(_) => self.neg(&self.gen()),
        };
        RootsOfUnity {
            order,
            generator: self.pow(&full_gen, (full / order) as i64),
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        match &self.repr {
            Repr::Prime(d) => FieldElement::Mod(rng.gen_range(0..d.p)),
            Repr::Cyclo(c) => FieldElement::Poly(
                (0..c.deg)
                    .map(|_| BigRational::from_integer(BigInt::from(rng.gen_range(-2i64..=2))))
                    .collect(),
            ),
        }
    }

    pub fn random_nonzero<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        loop {
            let x = self.random(rng);
            if !self.is_zero(&x) {
                return x;
            }
        }
    }

    /// Every element of a finite field, in increasing residue order.
    pub fn elements(&self) -> Option<Vec<FieldElement>> {
        match &self.repr {
            Repr::Prime(d) => Some((0..d.p).map(FieldElement::Mod).collect()),
            Repr::Cyclo(_) => None,
        }
    }

    /// Residue of a prime-field element.
    pub fn residue(&self, x: &FieldElement) -> Option<u64> {
        match x {
            FieldElement::Mod(v) => Some(*v),
            FieldElement::Poly(_) => None,
        }
    }

    pub fn format(&self, x: &FieldElement) -> String {
        match x {
            FieldElement::Mod(v) => v.to_string(),
            FieldElement::Poly(coeffs) => format_poly(coeffs),
        }
    }

    /// Parses a field literal: an integer for prime fields, a polynomial in
    /// `z` with rational coefficients for cyclotomic fields.
    pub fn parse(&self, s: &str) -> Result<FieldElement> {
        let terms = parse_poly_literal(s)?;
        match &self.repr {
            Repr::Prime(_) => {
                let mut acc = self.zero();
                for (coef, deg, pos) in terms {
                    if deg != 0 {
                        return Err(GdaError::Parse {
                            message: "prime-field literals cannot mention z".into(),
                            position: pos,
                        });
                    }
                    acc = self.add(
                        &acc,
                        &self.from_rational(&coef).map_err(|_| GdaError::Parse {
                            message: "denominator vanishes in this field".into(),
                            position: pos,
                        })?,
                    );
                }
                Ok(acc)
            }
            Repr::Cyclo(c) => {
                let top = terms.iter().map(|t| t.1).max().unwrap_or(0);
                let mut coeffs = vec![BigRational::zero(); (top as usize + 1).max(c.deg)];
                for (coef, deg, _) in terms {
                    coeffs[deg as usize] += coef;
                }
                Ok(self.reduce_poly(coeffs))
            }
        }
    }
}

fn format_rational(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn format_poly(coeffs: &[BigRational]) -> String {
    let mut out = String::new();
    for (deg, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let var = match deg {
            0 => String::new(),
            1 => "z".to_string(),
            k => format!("z^{k}"),
        };
        if deg == 0 {
            out.push_str(&format_rational(&mag));
        } else if mag.is_one() {
            out.push_str(&var);
        } else {
            out.push_str(&format!("{}*{}", format_rational(&mag), var));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Terms `(coefficient, degree, byte offset)` of a literal like
/// `"1/2*z^3 - z + 2"`.
fn parse_poly_literal(s: &str) -> Result<Vec<(BigRational, u32, usize)>> {
    let bytes = s.as_bytes();
    let mut i = 0;
    let err = |message: &str, position: usize| GdaError::Parse {
        message: message.to_string(),
        position,
    };
    let skip_ws = |i: &mut usize| {
        while *i < bytes.len() && bytes[*i].is_ascii_whitespace() {
            *i += 1;
        }
    };
    let read_int = |i: &mut usize| -> Option<BigInt> {
        let start = *i;
        while *i < bytes.len() && bytes[*i].is_ascii_digit() {
            *i += 1;
        }
        (start < *i).then(|| s[start..*i].parse().unwrap())
    };

    let mut terms = Vec::new();
    skip_ws(&mut i);
    if i == bytes.len() {
        return Err(err("empty literal", 0));
    }
    let mut first = true;
    while i < bytes.len() {
        skip_ws(&mut i);
        let term_start = i;
        let mut sign = BigInt::one();
        if i < bytes.len() && (bytes[i] == b'+' || bytes[i] == b'-') {
            if bytes[i] == b'-' {
                sign = -sign;
            }
            i += 1;
            skip_ws(&mut i);
        } else if !first {
            return Err(err("expected '+' or '-'", i));
        }
        first = false;
        let mut coef = BigRational::from_integer(sign);
        let mut saw_number = false;
        if let Some(num) = read_int(&mut i) {
            saw_number = true;
            let mut q = BigRational::from_integer(num);
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'/' {
                i += 1;
                skip_ws(&mut i);
                let den = read_int(&mut i).ok_or_else(|| err("expected denominator", i))?;
                if den.is_zero() {
                    return Err(err("zero denominator", i));
                }
                q /= BigRational::from_integer(den);
            }
            coef *= q;
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'*' {
                i += 1;
                skip_ws(&mut i);
                if i >= bytes.len() || bytes[i] != b'z' {
                    return Err(err("expected 'z' after '*'", i));
                }
            }
        }
        let mut deg = 0u32;
        if i < bytes.len() && bytes[i] == b'z' {
            i += 1;
            deg = 1;
            skip_ws(&mut i);
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                skip_ws(&mut i);
                let e = read_int(&mut i).ok_or_else(|| err("expected exponent", i))?;
                deg = u32::try_from(e).map_err(|_| err("exponent too large", i))?;
                if deg > 4096 {
                    return Err(err("exponent too large", i));
                }
            }
        } else if !saw_number {
            return Err(err("expected a number or 'z'", i));
        }
        terms.push((coef, deg, term_start));
        skip_ws(&mut i);
    }
    Ok(terms)
}

/// Determinant over a field by Gaussian elimination.
pub fn determinant(field: &CoefficientField, m: &[Vec<FieldElement>]) -> FieldElement {
    let n = m.len();
    let mut a: Vec<Vec<FieldElement>> = m.to_vec();
    let mut det = field.one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !field.is_zero(&a[r][col])) else {
            return field.zero();
        };
        if piv != col {
            a.swap(piv, col);
            det = field.neg(&det);
        }
        det = field.mul(&det, &a[col][col]);
        let inv = field.inv(&a[col][col]).expect("nonzero pivot");
        for r in (col + 1)..n {
            if field.is_zero(&a[r][col]) {
                continue;
            }
            let f = field.mul(&a[r][col], &inv);
            for c in col..n {
                let t = field.mul(&f, &a[col][c]);
                a[r][c] = field.sub(&a[r][c], &t);
            }
        }
    }
    det
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Prime { p } => write!(f, "GF({p})"),
            FieldKind::Cyclotomic { n } => write!(f, "Q(zeta_{n})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;

    fn gf(p: u64) -> CoefficientField {
        CoefficientField::prime(p).unwrap()
    }

    #[test]
    fn mu_examples() {
        let f = gf(13);
        assert_eq!(f.mu(4).order, 4);
        let m2 = f.mu(2);
        assert_eq!(m2.order, 2);
        assert_eq!(m2.generator, f.from_i64(-1));
        let m1 = f.mu(1);
        assert_eq!((m1.order, m1.generator.clone()), (1, f.one()));
        let q8 = CoefficientField::cyclotomic(8).unwrap();
        assert_eq!(q8.mu(1).generator, q8.one());
        assert_eq!(q8.mu(4).order, 4);
        assert_eq!(q8.mu(16).order, 8);
        // odd N contributes -1
        let q3 = CoefficientField::cyclotomic(3).unwrap();
        assert_eq!(q3.mu(6).order, 6);
        assert_eq!(q3.mu(2).generator, q3.from_i64(-1));
    }

    #[test]
    fn order_of_unit_examples() {
        let f = gf(13);
        // 5^2 = 25 = -1, 5^4 = 1
        assert_eq!(f.mul(&f.from_i64(5), &f.from_i64(5)), f.from_i64(-1));
        assert_eq!(f.order_of_unit(&f.from_i64(5)).unwrap(), Order::Finite(4));
        assert_eq!(f.order_of_unit(&f.one()).unwrap(), Order::Finite(1));
        assert_eq!(f.order_of_unit(&f.zero()), Err(GdaError::ZeroElement));
        let q8 = CoefficientField::cyclotomic(8).unwrap();
        assert_eq!(q8.order_of_unit(&q8.from_i64(2)).unwrap(), Order::Infinite);
        assert_eq!(q8.order_of_unit(&q8.gen()).unwrap(), Order::Finite(8));
        assert_eq!(
            q8.order_of_unit(&q8.from_i64(-1)).unwrap(),
            Order::Finite(2)
        );
    }

    #[test]
    fn validation() {
        assert_eq!(CoefficientField::prime(12), Err(GdaError::NotPrime(12)));
        assert!(matches!(
            CoefficientField::prime(1_000_003),
            Err(GdaError::FieldOutOfRange(_))
        ));
        assert!(CoefficientField::cyclotomic(121).is_err());
        assert!(CoefficientField::cyclotomic(0).is_err());
    }

    #[test]
    fn cyclotomic_polynomials() {
        let coeffs = |n| {
            cyclotomic_polynomial(n)
                .iter()
                .map(|c| i64::try_from(c).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(coeffs(1), vec![-1, 1]);
        assert_eq!(coeffs(8), vec![1, 0, 0, 0, 1]);
        assert_eq!(coeffs(12), vec![1, 0, -1, 0, 1]);
        assert_eq!(coeffs(15).len(), 9);
    }

    #[test]
    fn literal_round_trips() {
        let q8 = CoefficientField::cyclotomic(8).unwrap();
        let x = q8.parse("1/2*z^3 - z + 2").unwrap();
        assert_eq!(q8.format(&x), "1/2*z^3 - z + 2");
        // z^4 = -1 in Q(zeta_8)
        assert_eq!(q8.parse("z^4").unwrap(), q8.from_i64(-1));
        assert_eq!(q8.parse("-3").unwrap(), q8.from_i64(-3));
        let f = gf(13);
        assert_eq!(f.parse("-1").unwrap(), FieldElement::Mod(12));
        assert_eq!(f.parse("1/2").unwrap(), FieldElement::Mod(7));
    }

    #[test]
    fn literal_errors_carry_position() {
        let q8 = CoefficientField::cyclotomic(8).unwrap();
        match q8.parse("2*z^ + 1") {
            Err(GdaError::Parse { position, .. }) => assert_eq!(position, 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            q8.parse("1 2"),
            Err(GdaError::Parse { position: 2, .. })
        ));
        assert!(matches!(q8.parse(""), Err(GdaError::Parse { .. })));
        assert!(matches!(gf(13).parse("z"), Err(GdaError::Parse { .. })));
    }

    #[test]
    fn discrete_log_matches_powering() {
        let f = gf(1009);
        let g = f.gen();
        for k in [0u64, 1, 2, 500, 1007] {
            let x = f.pow(&g, k as i64);
            assert_eq!(f.discrete_log(&x), Some(k));
        }
    }

    #[test]
    fn roots_of_unity_log() {
        let f = gf(13);
        let m = f.mu(4);
        for (k, x) in m.elements(&f).iter().enumerate() {
            assert_eq!(m.log(&f, x), Some(k as u64));
        }
        assert_eq!(m.log(&f, &f.from_i64(2)), None);
        let q8 = CoefficientField::cyclotomic(8).unwrap();
        let m = q8.mu(8);
        assert_eq!(m.log(&q8, &q8.gen()), Some(1));
    }

    #[test]
    fn determinant_small() {
        let f = gf(13);
        let m = vec![
            vec![f.from_i64(2), f.from_i64(0)],
            vec![f.from_i64(0), f.from_i64(3)],
        ];
        assert_eq!(determinant(&f, &m), f.from_i64(6));
        let m = vec![
            vec![f.from_i64(0), f.from_i64(1)],
            vec![f.from_i64(1), f.from_i64(0)],
        ];
        assert_eq!(determinant(&f, &m), f.from_i64(-1));
    }

    fn fields() -> Vec<CoefficientField> {
        vec![
            gf(2),
            gf(13),
            gf(1009),
            CoefficientField::cyclotomic(8).unwrap(),
            CoefficientField::cyclotomic(12).unwrap(),
            CoefficientField::cyclotomic(5).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn field_axioms(seed in any::<u64>()) {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for f in fields() {
                let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
                prop_assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                prop_assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                prop_assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                if !f.is_zero(&a) {
                    prop_assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), f.one());
                }
                prop_assert_eq!(f.parse(&f.format(&a)).unwrap(), a);
            }
        }

        #[test]
        fn mu_generator_has_exact_order(d in 1u64..60) {
            for f in fields() {
                let m = f.mu(d);
                prop_assert_eq!(f.pow(&m.generator, m.order as i64), f.one());
                for (q, _) in factorize(m.order) {
                    prop_assert_ne!(f.pow(&m.generator, (m.order / q) as i64), f.one());
                }
            }
        }

        #[test]
        fn mu_containment(a in 1u64..20, k in 1u64..6) {
            // mu_a is contained in mu_{ak}
            let b = a * k;
            for f in fields() {
                let small = f.mu(a);
                let big = f.mu(b);
                for x in small.elements(&f) {
                    prop_assert!(big.contains(&f, &x));
                }
            }
        }
    }
}
