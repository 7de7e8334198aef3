#![allow(dead_code)]

use std::sync::Arc;

use gda_core::algebra::{AlgebraElement, GradedDivisionAlgebra};
use gda_core::cli::{fixture, load_spec};
use gda_core::gmatrix::{GradedMatrix, MonomialMatrix, ShiftedMatrixAlgebra};
use rand::Rng;

pub fn algebra(name: &str) -> Arc<GradedDivisionAlgebra> {
    load_spec(fixture(name).expect("bundled fixture"))
        .expect("valid fixture")
        .algebra
}

pub fn fixture_context(name: &str) -> ShiftedMatrixAlgebra {
    let sp = load_spec(fixture(name).unwrap()).unwrap();
    sp.matrix_algebra(None, None).unwrap()
}

/// Unshifted and shifted matrix algebras over the sample division algebras.
pub fn contexts(names: &[&str], sizes: &[usize]) -> Vec<(String, ShiftedMatrixAlgebra)> {
    let mut out = Vec::new();
    for name in names {
        let a = algebra(name);
        for &n in sizes {
            out.push((
                format!("{name} n={n}"),
                ShiftedMatrixAlgebra::unshifted(a.clone(), n).unwrap(),
            ));
            // spread the shifts over two or three Gamma_E cosets
            let k = a.ambient_rank();
            let shifts: Vec<Vec<i64>> = (0..n)
                .map(|i| {
                    let mut d = vec![0; k];
                    d[0] = (i % 2) as i64;
                    d[k - 1] += (i / 2) as i64;
                    d
                })
                .collect();
            if let Ok(s) = ShiftedMatrixAlgebra::new(a.clone(), n, shifts) {
                out.push((format!("{name} n={n} shifted"), s));
            }
        }
    }
    out
}

pub fn allowed(s: &ShiftedMatrixAlgebra, i: usize, j: usize) -> bool {
    let d: Vec<i64> = s.shifts()[j]
        .iter()
        .zip(&s.shifts()[i])
        .map(|(a, b)| a - b)
        .collect();
    s.algebra().gamma_e().contains(&d)
}

pub fn entry<R: Rng>(s: &ShiftedMatrixAlgebra, rng: &mut R, i: usize, j: usize) -> AlgebraElement {
    let d: Vec<i64> = s.shifts()[j]
        .iter()
        .zip(&s.shifts()[i])
        .map(|(a, b)| a - b)
        .collect();
    let f = s.algebra().field();
    s.algebra().element([(d, f.random(rng))]).unwrap()
}

/// Random strict tuple `(T, U P_pi, V)`: `T` unipotent lower triangular of
/// degree 0, `V` unipotent upper with `P_pi V P_pi^{-1}` also upper.
pub fn strict_tuple<R: Rng>(
    s: &ShiftedMatrixAlgebra,
    rng: &mut R,
) -> (GradedMatrix, MonomialMatrix, GradedMatrix) {
    let n = s.n();
    let m = s.random_monomial(rng, 2).unwrap();
    let rho = m.rho();
    let mut t = s.identity();
    for i in 0..n {
        for j in 0..i {
            if allowed(s, i, j) {
                t.set(i, j, entry(s, rng, i, j));
            }
        }
    }
    let mut v = s.identity();
    for j in 0..n {
        for b in (j + 1)..n {
            let (r, c) = (rho[j], rho[b]);
            if r < c && allowed(s, r, c) {
                v.set(r, c, entry(s, rng, r, c));
            }
        }
    }
    (t, m, v)
}

pub fn is_zero_degree(d: &[i64]) -> bool {
    d.iter().all(|&x| x == 0)
}
