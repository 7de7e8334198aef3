//! File formats, reports and the `gda` command surface.

use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use toml::Spanned;

use crate::algebra::{AlgebraElement, GradedDivisionAlgebra, HomogeneousUnit};
use crate::bruhat::{bruhat_decompose, is_strict, reconstruct, BruhatForm};
use crate::dieudonne::{block_scalar_matrix, det0, det_e, in_kernel, DetValue};
use crate::error::{GdaError, Result};
use crate::gmatrix::{GradedMatrix, Homogeneity, ShiftedMatrixAlgebra};
use crate::grading::Degree;
use crate::oracle::{default_budget, sk_oracle, OracleConfig, Route};
use crate::scalars::{CoefficientField, FieldKind};
use crate::sk::{self, GroupDescription};

// ---------------------------------------------------------------- specs

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecFile {
    field: Spanned<FieldKind>,
    ambient_rank: Spanned<usize>,
    gamma_e: Spanned<Vec<Vec<i64>>>,
    #[serde(default)]
    commutation: Option<Spanned<Vec<Vec<Spanned<String>>>>>,
    #[serde(default)]
    matrix: Option<MatrixSection>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixSection {
    n: Spanned<usize>,
    #[serde(default)]
    shifts: Option<Spanned<Vec<Vec<i64>>>>,
}

/// A parsed algebra spec: the algebra and, optionally, a matrix algebra.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub algebra: Arc<GradedDivisionAlgebra>,
    pub n: Option<usize>,
    pub shifts: Option<Vec<Degree>>,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before
        .rfind('\n')
        .map_or(before.len(), |i| before.len() - i - 1)
        + 1;
    (line, column)
}

fn at(text: &str, span: std::ops::Range<usize>, message: impl ToString) -> GdaError {
    let (line, column) = line_col(text, span.start);
    GdaError::Validation {
        message: message.to_string(),
        line,
        column,
    }
}

/// Parses a TOML algebra spec; every error carries a line and column.
pub fn load_spec(text: &str) -> Result<LoadedSpec> {
    let file: SpecFile = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        GdaError::Validation {
            message: e.message().to_string(),
            line,
            column,
        }
    })?;
    let field =
        CoefficientField::new(*file.field.get_ref()).map_err(|e| at(text, file.field.span(), e))?;
    let mut commutation = Vec::new();
    if let Some(rows) = &file.commutation {
        for row in rows.get_ref() {
            let mut parsed = Vec::new();
            for entry in row {
                let x = field.parse(entry.get_ref()).map_err(|e| {
                    let mut span = entry.span();
                    if let GdaError::Parse { position, .. } = &e {
                        // skip the opening quote
                        span.start += 1 + position;
                    }
                    at(text, span, e)
                })?;
                parsed.push(x);
            }
            commutation.push(parsed);
        }
    }
    let algebra = GradedDivisionAlgebra::new(
        field,
        *file.ambient_rank.get_ref(),
        file.gamma_e.get_ref().clone(),
        commutation,
    )
    .map_err(|e| {
        let span = match (&e, &file.commutation) {
            (
                GdaError::NotRootOfUnity { i, j } | GdaError::InvalidCommutation { i, j, .. },
                Some(rows),
            ) => rows
                .get_ref()
                .get(*i)
                .and_then(|r| r.get(*j))
                .map_or(rows.span(), |x| x.span()),
            (GdaError::NonSquareIndex(_) | GdaError::InfiniteIndexRadical, Some(rows)) => {
                rows.span()
            }
            (GdaError::DimensionMismatch { .. }, _)
                if file
                    .gamma_e
                    .get_ref()
                    .iter()
                    .all(|g| g.len() == *file.ambient_rank.get_ref()) =>
            {
                file.commutation
                    .as_ref()
                    .map_or(file.gamma_e.span(), |r| r.span())
            }
            _ => file.gamma_e.span(),
        };
        at(text, span, e)
    })?;
    let (n, shifts) = match &file.matrix {
        None => (None, None),
        Some(m) => {
            let n = *m.n.get_ref();
            if n == 0 {
                return Err(at(text, m.n.span(), "n must be positive"));
            }
            let shifts = match &m.shifts {
                None => None,
                Some(sh) => {
                    let v = sh.get_ref().clone();
                    if v.len() != n || v.iter().any(|d| d.len() != algebra.ambient_rank()) {
                        return Err(at(
                            text,
                            sh.span(),
                            format!("expected {n} shifts of length {}", algebra.ambient_rank()),
                        ));
                    }
                    Some(v)
                }
            };
            (Some(n), shifts)
        }
    };
    Ok(LoadedSpec {
        algebra: Arc::new(algebra),
        n,
        shifts,
    })
}

impl LoadedSpec {
    /// The matrix algebra, with command-line overrides taking precedence.
    pub fn matrix_algebra(
        &self,
        n: Option<usize>,
        shifts: Option<Vec<Degree>>,
    ) -> Result<ShiftedMatrixAlgebra> {
        let n = n
            .or(self.n)
            .or_else(|| shifts.as_ref().map(|s| s.len()))
            .ok_or_else(|| {
                GdaError::Input("matrix size not given: use --n or a [matrix] section".into())
            })?;
        let shifts = shifts.or_else(|| self.shifts.clone().filter(|s| s.len() == n));
        match shifts {
            Some(s) => ShiftedMatrixAlgebra::new(self.algebra.clone(), n, s),
            None => ShiftedMatrixAlgebra::unshifted(self.algebra.clone(), n),
        }
    }
}

/// Parses `--shifts 0,0;1,0` into one degree per row.
pub fn parse_shifts(text: &str) -> Result<Vec<Degree>> {
    text.split(';')
        .map(|row| {
            row.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<i64>()
                        .map_err(|e| GdaError::Input(format!("bad shift component {x:?}: {e}")))
                })
                .collect()
        })
        .collect()
}

// ---------------------------------------------------------------- JSON

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub degree: Vec<i64>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub entries: Vec<Vec<Vec<TermJson>>>,
}

pub fn element_to_json(a: &GradedDivisionAlgebra, x: &AlgebraElement) -> Vec<TermJson> {
    x.terms()
        .iter()
        .map(|(d, c)| TermJson {
            degree: d.clone(),
            coeff: a.field().format(c),
        })
        .collect()
}

pub fn element_from_json(a: &GradedDivisionAlgebra, terms: &[TermJson]) -> Result<AlgebraElement> {
    let parsed = terms
        .iter()
        .map(|t| Ok((t.degree.clone(), a.field().parse(&t.coeff)?)))
        .collect::<Result<Vec<_>>>()?;
    a.element(parsed)
}

pub fn matrix_to_json(a: &GradedDivisionAlgebra, m: &GradedMatrix) -> MatrixJson {
    MatrixJson {
        entries: m
            .entries()
            .iter()
            .map(|row| row.iter().map(|x| element_to_json(a, x)).collect())
            .collect(),
    }
}

pub fn matrix_from_json(a: &GradedDivisionAlgebra, m: &MatrixJson) -> Result<GradedMatrix> {
    let entries = m
        .entries
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| element_from_json(a, x))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    GradedMatrix::from_entries(entries)
}

/// Parses a matrix file; syntax errors carry a line and column.
pub fn load_matrix(a: &GradedDivisionAlgebra, text: &str) -> Result<GradedMatrix> {
    let m: MatrixJson = serde_json::from_str(text).map_err(|e| GdaError::Validation {
        message: e.to_string(),
        line: e.line(),
        column: e.column(),
    })?;
    matrix_from_json(a, &m)
}

pub fn unit_to_json(a: &GradedDivisionAlgebra, u: &HomogeneousUnit) -> TermJson {
    TermJson {
        degree: u.degree.clone(),
        coeff: a.field().format(&u.coeff),
    }
}

fn det_json(a: &GradedDivisionAlgebra, d: &DetValue) -> Value {
    json!({
        "degree": d.degree,
        "coeff_class": a.field().format(&d.coeff_class),
        "mu_e_order": a.mu_e().order,
    })
}

fn bruhat_json(a: &GradedDivisionAlgebra, f: &BruhatForm) -> Value {
    json!({
        "t": matrix_to_json(a, &f.t),
        "certificate": f.certificate.iter().map(|e| json!({
            "i": e.i, "j": e.j, "x": element_to_json(a, &e.x),
        })).collect::<Vec<_>>(),
        "u": f.u.iter().map(|u| unit_to_json(a, u)).collect::<Vec<_>>(),
        "perm": f.perm,
        "v": matrix_to_json(a, &f.v),
        "strict": f.strict,
    })
}

fn group_json(g: &GroupDescription) -> Value {
    let mut v = serde_json::to_value(g).expect("serializable");
    if let Ok(f) = g.invariant_factors() {
        v["order"] = json!(f.order());
        v["invariant_factors"] = json!(f.invariant_factors());
    }
    v
}

// ---------------------------------------------------------------- reports

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs_digest: String,
    pub outputs: Value,
    pub timings: Value,
    pub warnings: Vec<String>,
}

impl RunReport {
    fn new(
        command: &str,
        inputs: &[&str],
        outputs: Value,
        warnings: Vec<String>,
        started: Instant,
    ) -> Self {
        let mut h = Sha256::new();
        for i in inputs {
            h.update((i.len() as u64).to_le_bytes());
            h.update(i.as_bytes());
        }
        let digest = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
        Self {
            command: command.to_string(),
            inputs_digest: digest,
            outputs,
            timings: json!({ "total_ms": started.elapsed().as_secs_f64() * 1e3 }),
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

/// Inputs shared by the matrix commands.
pub struct MatrixInput<'a> {
    pub spec: &'a str,
    pub matrix: &'a str,
    pub n: Option<usize>,
    pub shifts: Option<Vec<Degree>>,
}

fn matrix_context(input: &MatrixInput) -> Result<(ShiftedMatrixAlgebra, GradedMatrix)> {
    let spec = load_spec(input.spec)?;
    let a = spec.algebra.clone();
    let m = load_matrix(&a, input.matrix)?;
    let s = spec.matrix_algebra(input.n.or(Some(m.size())), input.shifts.clone())?;
    if m.size() != s.n() {
        return Err(GdaError::WrongSize { expected: s.n() });
    }
    Ok((s, m))
}

fn digest_inputs<'a>(input: &'a MatrixInput, extra: &'a str) -> [&'a str; 3] {
    [input.spec, input.matrix, extra]
}

fn flags_string(n: Option<usize>, shifts: &Option<Vec<Degree>>) -> String {
    format!("n={n:?};shifts={shifts:?}")
}

pub fn cmd_bruhat(input: &MatrixInput) -> Result<RunReport> {
    let started = Instant::now();
    let (s, m) = matrix_context(input)?;
    let f = bruhat_decompose(&s, &m)?;
    let out = bruhat_json(s.algebra(), &f);
    let flags = flags_string(input.n, &input.shifts);
    Ok(RunReport::new(
        "bruhat",
        &digest_inputs(input, &flags),
        out,
        s.warnings().to_vec(),
        started,
    ))
}

pub fn cmd_det(input: &MatrixInput) -> Result<RunReport> {
    let started = Instant::now();
    let (s, m) = matrix_context(input)?;
    let a = s.algebra();
    let d = det_e(&s, &m)?;
    let mut out = det_json(a, &d);
    out["in_kernel"] = json!(in_kernel(&s, &m)?.in_kernel);
    let flags = flags_string(input.n, &input.shifts);
    Ok(RunReport::new(
        "det",
        &digest_inputs(input, &flags),
        out,
        s.warnings().to_vec(),
        started,
    ))
}

pub fn cmd_nrd(input: &MatrixInput) -> Result<RunReport> {
    let started = Instant::now();
    let (s, m) = matrix_context(input)?;
    let a = s.algebra();
    let f = a.field();
    let out = match s.homogeneity(&m) {
        Homogeneity::Degree(d) if d.iter().all(|&x| x == 0) => json!({
            "degree": d,
            "nrd_s0": f.format(&sk::nrd_s0(&s, &m)?),
            "nrd_s": f.format(&sk::nrd_s(&s, &m)?),
            "in_sh1": sk::in_sh1(&s, &m)?,
        }),
        Homogeneity::Degree(d) => {
            json!({ "degree": d, "nrd_s0": null, "nrd_s": null, "in_sh1": false })
        }
        Homogeneity::Zero => return Err(GdaError::Singular { row: 0 }),
        Homogeneity::NotHomogeneous => return Err(GdaError::NotHomogeneous),
    };
    let flags = flags_string(input.n, &input.shifts);
    Ok(RunReport::new(
        "nrd",
        &digest_inputs(input, &flags),
        out,
        s.warnings().to_vec(),
        started,
    ))
}

/// The common difference `delta` when `shifts = (0, delta, ..., (n-1) delta)`.
fn arithmetic_delta(shifts: &[Degree]) -> Option<Degree> {
    let zero = shifts.first()?;
    if zero.iter().any(|&x| x != 0) || shifts.len() < 2 {
        return None;
    }
    let delta = shifts[1].clone();
    (sk::arithmetic_shifts(&delta, shifts.len()) == shifts).then_some(delta)
}

pub struct SkInput<'a> {
    pub spec: &'a str,
    pub n: Option<usize>,
    pub shifts: Option<Vec<Degree>>,
    pub budget: u64,
    pub oracle: bool,
}

pub fn cmd_sk(input: &SkInput) -> Result<RunReport> {
    let started = Instant::now();
    let spec = load_spec(input.spec)?;
    let s = spec.matrix_algebra(input.n.or(spec.n).or(Some(1)), input.shifts.clone())?;
    let a = s.algebra();
    let n = s.n();
    let sk_e = sk::sk_e(a);
    let kernel = sk::kernel_group(a, n as u64);
    let unshifted = s
        .shifts()
        .iter()
        .all(|d| a.gamma_e().same_coset(d, &s.shifts()[0]));
    let formula = if unshifted {
        Some(sk::sk_h_unshifted(a, n)?)
    } else if let Some(delta) = arithmetic_delta(s.shifts()) {
        Some(sk::sk_h_shifted(a, n, &delta)?)
    } else {
        None
    };
    let mut warnings = s.warnings().to_vec();
    let oracle = if input.oracle && a.field().is_finite() {
        let cfg = OracleConfig {
            budget: input.budget,
            route: Route::Auto,
        };
        match sk_oracle(&s, cfg) {
            Ok(g) => Some(g),
            Err(e @ GdaError::SizeBudgetExceeded { .. }) => {
                warnings.push(format!("oracle skipped: {e}"));
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    let agrees = match (&formula, &oracle) {
        (Some(f), Some(o)) => Some(f.invariant_factors().ok() == o.invariant_factors().ok()),
        _ => None,
    };
    if formula.is_none() {
        warnings.push("no closed form for this shift pattern; oracle only".into());
    }
    let out = json!({
        "n": n,
        "shifts": s.shifts(),
        "sk_e": group_json(&sk_e),
        "kernel": group_json(&kernel),
        "sk_h": formula.as_ref().map(group_json),
        "oracle": oracle.as_ref().map(group_json),
        "agrees": agrees,
    });
    let flags = format!(
        "{};oracle={}",
        flags_string(input.n, &input.shifts),
        input.oracle
    );
    Ok(RunReport::new(
        "sk",
        &[input.spec, &flags],
        out,
        warnings,
        started,
    ))
}

// ---------------------------------------------------------------- verify

pub const FIXTURES: &[(&str, &str)] = &[
    (
        "quaternion13",
        include_str!("../fixtures/quaternion13.toml"),
    ),
    ("twosym13", include_str!("../fixtures/twosym13.toml")),
    ("gf3", include_str!("../fixtures/gf3.toml")),
    ("gf5", include_str!("../fixtures/gf5.toml")),
    ("cubic7", include_str!("../fixtures/cubic7.toml")),
    ("cyclo8", include_str!("../fixtures/cyclo8.toml")),
    ("shifted_m7", include_str!("../fixtures/shifted_m7.toml")),
    ("shifted_m10", include_str!("../fixtures/shifted_m10.toml")),
];

pub fn fixture(name: &str) -> Option<&'static str> {
    FIXTURES.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Bruhat,
    Det,
    Kernel,
    Nrd,
    Sk,
    Exactseq,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Bruhat => "bruhat",
            Suite::Det => "det",
            Suite::Kernel => "kernel",
            Suite::Nrd => "nrd",
            Suite::Sk => "sk",
            Suite::Exactseq => "exactseq",
            Suite::All => "all",
        }
    }
}

#[derive(Default, Serialize)]
struct Tally {
    checks: u64,
    failed: u64,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failed += 1;
            if self.failures.len() < 20 {
                self.failures.push(what());
            }
        }
    }

    fn run(&mut self, label: &str, r: Result<bool>) {
        match r {
            Ok(ok) => self.check(ok, || label.to_string()),
            Err(e) => self.check(false, || format!("{label}: {e}")),
        }
    }
}

fn sample_contexts(specs: &[LoadedSpec]) -> Result<Vec<ShiftedMatrixAlgebra>> {
    let mut out = Vec::new();
    for sp in specs {
        match (sp.n, &sp.shifts) {
            (Some(n), Some(sh)) => out.push(ShiftedMatrixAlgebra::new(
                sp.algebra.clone(),
                n,
                sh.clone(),
            )?),
            _ => {
                for n in [2, 3] {
                    out.push(ShiftedMatrixAlgebra::unshifted(sp.algebra.clone(), n)?);
                }
            }
        }
    }
    Ok(out)
}

fn suite_bruhat(ctx: &[ShiftedMatrixAlgebra], rng: &mut ChaCha8Rng, t: &mut Tally) {
    for s in ctx {
        for _ in 0..10 {
            let r = (|| {
                let a = s.random_unit(rng, 4, 2)?;
                let f = bruhat_decompose(s, &a)?;
                Ok(reconstruct(s, &f)? == a && is_strict(s, &f) && f.strict)
            })();
            t.run("bruhat round trip", r);
        }
    }
}

fn suite_det(ctx: &[ShiftedMatrixAlgebra], rng: &mut ChaCha8Rng, t: &mut Tally) {
    for s in ctx {
        let a = s.algebra();
        for _ in 0..10 {
            let r = (|| {
                let x = s.random_unit(rng, 3, 2)?;
                let y = s.random_unit(rng, 3, 2)?;
                let xy = s.mat_multiply(&x, &y)?;
                Ok(det_e(s, &xy)? == a.class_mul(&det_e(s, &x)?, &det_e(s, &y)?)?)
            })();
            t.run("det_E multiplicative", r);
            let r = (|| match s.random_elementary(rng)? {
                Some(e) => Ok(det_e(s, &e)? == a.identity_class()),
                None => Ok(true),
            })();
            t.run("det_E of elementary", r);
        }
    }
}

fn suite_kernel(ctx: &[ShiftedMatrixAlgebra], rng: &mut ChaCha8Rng, t: &mut Tally) {
    for s in ctx {
        let a = s.algebra();
        let f = a.field();
        let blocks = s.epsilon_form().multiplicities.len();
        for _ in 0..6 {
            let r = (|| {
                let mut fs = Vec::new();
                for _ in 0..4 {
                    if let Some(e) = s.random_elementary(rng)? {
                        fs.push(e);
                    }
                }
                let mu = a.mu_e().elements(f);
                let w = mu[rng.gen_range(0..mu.len())].clone();
                let mut cs = vec![f.one(); blocks];
                cs[0] = w;
                fs.push(block_scalar_matrix(s, &cs)?);
                let m = s.product(&fs)?;
                let v = in_kernel(s, &m)?;
                let rebuilt = match &v.witness {
                    Some(wit) => wit.evaluate(s)? == m,
                    None => false,
                };
                Ok(v.in_kernel && rebuilt)
            })();
            t.run("kernel witness", r);
            let r = (|| {
                let c = f.random_nonzero(rng);
                let mut cs = vec![f.one(); blocks];
                cs[0] = c.clone();
                let d = block_scalar_matrix(s, &cs)?;
                Ok(in_kernel(s, &d)?.in_kernel == a.mu_e().contains(f, &c))
            })();
            t.run("kernel block scalars", r);
        }
    }
}

fn suite_nrd(ctx: &[ShiftedMatrixAlgebra], rng: &mut ChaCha8Rng, t: &mut Tally) {
    for s in ctx {
        let a = s.algebra();
        let f = a.field();
        for _ in 0..10 {
            let r = (|| {
                let x = s.random_degree_zero(rng, 4)?;
                let y = s.random_degree_zero(rng, 4)?;
                let xy = s.mat_multiply(&x, &y)?;
                let mult = sk::nrd_s(s, &xy)? == f.mul(&sk::nrd_s(s, &x)?, &sk::nrd_s(s, &y)?);
                let power = sk::nrd_s(s, &x)? == f.pow(&det0(s, &x)?, a.s() as i64);
                Ok(mult && power)
            })();
            t.run("nrd laws", r);
            let r = (|| {
                let x = s.random_unit(rng, 3, 2)?;
                let d = s.degree(&x)?;
                Ok(d.iter().all(|&v| v == 0) || !sk::in_sh1(s, &x)?)
            })();
            t.run("degree confinement", r);
        }
        if !s.is_exceptional_f2() {
            for w in a.mu_s().elements(f) {
                let r = (|| Ok(sk::xi(s, &sk::eta(s, &w)?)? == w))();
                t.run("xi after eta", r);
            }
        }
    }
}

fn oracle_cfg(budget: u64) -> OracleConfig {
    OracleConfig {
        budget,
        route: Route::Auto,
    }
}

/// Golden values for the bundled fixtures.
fn suite_sk(budget: u64, t: &mut Tally) -> Result<()> {
    let load = |name: &str| load_spec(fixture(name).expect("bundled fixture"));
    let q = load("quaternion13")?.algebra;
    let two = load("twosym13")?.algebra;
    t.check(sk::sk_e(&q).order()? == 1, || "SK(quaternion13) = 1".into());
    t.check(sk::sk_e(&two).order()? == 2, || "SK(twosym13) = Z/2".into());
    for (alg, n, order) in [
        (&q, 1, 1),
        (&two, 1, 2),
        (&two, 2, 4),
        (&two, 3, 2),
        (&q, 2, 2),
        (&q, 3, 1),
    ] {
        let s = ShiftedMatrixAlgebra::unshifted(alg.clone(), n)?;
        let o = sk_oracle(&s, oracle_cfg(budget))?;
        t.check(o.order()? == order, || {
            format!("oracle order {order} at n = {n}")
        });
        if n >= 2 {
            let formula = sk::sk_h_unshifted(alg, n)?;
            t.check(
                formula.invariant_factors()? == o.invariant_factors()?,
                || format!("formula vs oracle at n = {n}"),
            );
        } else {
            t.check(
                sk::sk_e(alg).invariant_factors()? == o.invariant_factors()?,
                || "SK(E) vs oracle".into(),
            );
        }
    }
    for (name, order) in [("shifted_m7", 4), ("shifted_m10", 16)] {
        let sp = load(name)?;
        let s = sp.matrix_algebra(None, None)?;
        let delta = arithmetic_delta(s.shifts()).expect("arithmetic fixture");
        let formula = sk::sk_h_shifted(&sp.algebra, s.n(), &delta)?;
        let o = sk_oracle(&s, oracle_cfg(budget))?;
        t.check(formula.order()? == order, || {
            format!("{name} formula order {order}")
        });
        t.check(
            o.invariant_factors()? == formula.invariant_factors()?,
            || format!("{name} oracle"),
        );
        t.check(s.gamma_s_star() == *sp.algebra.gamma_e(), || {
            format!("{name} Gamma_S^* = Gamma_E")
        });
    }
    let cyc = load("cyclo8")?.algebra;
    let gamma = Arc::new(GradedDivisionAlgebra::new(
        cyc.field().clone(),
        2,
        vec![vec![7, 0], vec![0, 1]],
        cyc.commutation().to_vec(),
    )?);
    let structural = sk::sk_h_shifted(&gamma, 2, &[1, 0])?;
    t.check(
        matches!(structural.order(), Err(GdaError::InfiniteT0Star { .. })),
        || "structural output".into(),
    );
    Ok(())
}

fn suite_exactseq(specs: &[LoadedSpec], budget: u64, t: &mut Tally) -> Result<()> {
    for sp in specs {
        let a = &sp.algebra;
        let e = a.e();
        for n in 1..=6u64 {
            let k = sk::kernel_group(a, n);
            t.check(
                k.invariant_factors()? == sk::kernel_group(a, n + e).invariant_factors()?,
                || format!("kernel periodicity n = {n}"),
            );
            if a.field().is_finite() && !(a.field().characteristic() == 2 && n == 2) {
                let h = sk::sk_h_unshifted(a, n as usize)?;
                t.check(h.order()? == k.order()? * sk::sk_e(a).order()?, || {
                    format!("exact sequence orders n = {n}")
                });
            }
        }
        if !a.field().is_finite() {
            continue;
        }
        for n in 1..=3usize {
            if (n as u64).gcd(&e) != 1 {
                continue;
            }
            let s = ShiftedMatrixAlgebra::unshifted(a.clone(), n)?;
            match sk_oracle(&s, oracle_cfg(budget)) {
                Ok(o) => t.check(o.order()? == sk::sk_e(a).order()?, || {
                    format!("coprime n = {n}: SK^h = SK(E)")
                }),
                Err(GdaError::SizeBudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(())
}

pub struct VerifyInput<'a> {
    pub spec: Option<&'a str>,
    pub suite: Suite,
    pub seed: u64,
    pub budget: u64,
}

/// Runs property suites and golden cross-checks; `Ok` with failures
/// recorded in the report, which the caller turns into exit status 1.
pub fn cmd_verify(input: &VerifyInput) -> Result<(RunReport, bool)> {
    let started = Instant::now();
    let specs: Vec<LoadedSpec> = match input.spec {
        Some(text) => vec![load_spec(text)?],
        None => FIXTURES
            .iter()
            .map(|(_, t)| load_spec(t))
            .collect::<Result<_>>()?,
    };
    let ctx = sample_contexts(&specs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    let suites: Vec<Suite> = match input.suite {
        Suite::All => vec![
            Suite::Bruhat,
            Suite::Det,
            Suite::Kernel,
            Suite::Nrd,
            Suite::Sk,
            Suite::Exactseq,
        ],
        s => vec![s],
    };
    let mut results = serde_json::Map::new();
    let mut all_ok = true;
    for suite in suites {
        let mut t = Tally::default();
        match suite {
            Suite::Bruhat => suite_bruhat(&ctx, &mut rng, &mut t),
            Suite::Det => suite_det(&ctx, &mut rng, &mut t),
            Suite::Kernel => suite_kernel(&ctx, &mut rng, &mut t),
            Suite::Nrd => suite_nrd(&ctx, &mut rng, &mut t),
            Suite::Sk => {
                let r = suite_sk(input.budget, &mut t);
                t.run("sk golden values", r.map(|_| true));
            }
            Suite::Exactseq => {
                let r = suite_exactseq(&specs, input.budget, &mut t);
                t.run("exact sequence", r.map(|_| true));
            }
            Suite::All => unreachable!(),
        }
        all_ok &= t.failed == 0;
        results.insert(
            suite.name().to_string(),
            json!({ "checks": t.checks, "passed": t.checks - t.failed, "failed": t.failed, "failures": t.failures }),
        );
    }
    let out = json!({ "seed": input.seed, "suites": results, "ok": all_ok });
    let flags = format!("suite={};seed={}", input.suite.name(), input.seed);
    let report = RunReport::new(
        "verify",
        &[input.spec.unwrap_or(""), &flags],
        out,
        vec![],
        started,
    );
    Ok((report, all_ok))
}

// ---------------------------------------------------------------- entry

#[derive(Parser, Debug)]
#[command(
    name = "gda",
    version,
    about = "Exact computations over graded division algebras"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(clap::Args, Debug)]
pub struct MatrixArgs {
    /// Algebra spec (TOML).
    #[arg(long)]
    algebra: String,
    /// Matrix (JSON).
    #[arg(long)]
    matrix: String,
    #[arg(long)]
    n: Option<usize>,
    /// Shift vector, rows separated by `;`, e.g. `0,0;1,0`.
    #[arg(long)]
    shifts: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Strict Bruhat normal form `A = T U P V`.
    Bruhat(MatrixArgs),
    /// Homogeneous Dieudonne determinant.
    Det(MatrixArgs),
    /// Reduced norms of a degree-0 matrix.
    Nrd(MatrixArgs),
    /// Reduced Whitehead groups with oracle cross-check.
    Sk {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        shifts: Option<String>,
        #[arg(long)]
        budget: Option<u64>,
        /// Skip the brute-force oracle.
        #[arg(long)]
        no_oracle: bool,
    },
    /// Property suites and golden checks on the bundled fixtures.
    Verify {
        #[arg(long)]
        algebra: Option<String>,
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        budget: Option<u64>,
    },
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| GdaError::Input(format!("{path}: {e}")))
}

fn execute(cli: Cli) -> Result<(RunReport, bool)> {
    let matrix = |args: &MatrixArgs,
                  f: fn(&MatrixInput) -> Result<RunReport>|
     -> Result<(RunReport, bool)> {
        let spec = read(&args.algebra)?;
        let m = read(&args.matrix)?;
        let shifts = args.shifts.as_deref().map(parse_shifts).transpose()?;
        let input = MatrixInput {
            spec: &spec,
            matrix: &m,
            n: args.n,
            shifts,
        };
        Ok((f(&input)?, true))
    };
    match cli.command {
        Command::Bruhat(a) => matrix(&a, cmd_bruhat),
        Command::Det(a) => matrix(&a, cmd_det),
        Command::Nrd(a) => matrix(&a, cmd_nrd),
        Command::Sk {
            algebra,
            n,
            shifts,
            budget,
            no_oracle,
        } => {
            let spec = read(&algebra)?;
            let shifts = shifts.as_deref().map(parse_shifts).transpose()?;
            let input = SkInput {
                spec: &spec,
                n,
                shifts,
                budget: budget.unwrap_or_else(default_budget),
                oracle: !no_oracle,
            };
            Ok((cmd_sk(&input)?, true))
        }
        Command::Verify {
            algebra,
            suite,
            seed,
            budget,
        } => {
            let spec = algebra.as_deref().map(read).transpose()?;
            cmd_verify(&VerifyInput {
                spec: spec.as_deref(),
                suite,
                seed,
                budget: budget.unwrap_or_else(default_budget),
            })
        }
    }
}

/// Runs the CLI; returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok((report, ok)) => {
            use std::io::Write;
            let _ = writeln!(std::io::stdout(), "{}", report.to_json());
            if ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("{}", json!({ "error": e.code(), "message": e.to_string() }));
            e.exit_code()
        }
    }
}
