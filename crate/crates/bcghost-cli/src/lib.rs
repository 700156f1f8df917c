//! File formats, verification suites and command runners behind the `bcghost` binary.
//!
//! Every runner returns its JSON output as a string; identical inputs
//! (seed included) give byte-identical output.

pub mod json;
pub mod suites;

use std::rc::Rc;

use bcghost::coordchange::preferred_element;
use bcghost::curve::family_form_lift;
use bcghost::curve::family_function_lift;
use bcghost::fock::Functional;
use bcghost::sewing::{b_term, family_gauge_residual, fuchsian_check, setup, sew, SEWING_SIGN};
use bcghost::vacua::vacuum;
use num_traits::Zero;
use serde::Serialize;

use json::{rat, CurveJson, ExpansionDataJson, FunctionalJson};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] bcghost::Error),
    #[error("{what}: invalid JSON at line {line}, column {column}: {msg}")]
    Parse { what: String, line: usize, column: usize, msg: String },
    #[error("{0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

/// Output of a command: the JSON text and whether every check passed.
pub struct Output {
    pub json: String,
    pub pass: bool,
}

pub fn run_verify(suite: suites::Suite, max_degree: Option<i64>, seed: u64) -> Result<Output, CliError> {
    let report = suites::run(suite, max_degree, seed)?;
    Ok(Output { pass: report.pass, json: json::to_string(&report) })
}

/// Runs every suite in order.
pub fn run_verify_all(max_degree: Option<i64>, seed: u64) -> Result<Output, CliError> {
    let reports = suites::Suite::ALL.iter().map(|s| suites::run(*s, max_degree, seed)).collect::<Result<Vec<_>, _>>()?;
    Ok(Output { pass: reports.iter().all(|r| r.pass), json: json::to_string(&reports) })
}

#[derive(Serialize)]
struct VacuumOut {
    #[serde(flatten)]
    functional: FunctionalJson,
    charge_total: i64,
    /// `(pole bound, kernel dimension)` per escalation step.
    kernel_dims: Vec<(u32, usize)>,
}

pub fn run_vacuum(curve_text: &str, cutoff: i64) -> Result<Output, CliError> {
    if cutoff < 0 {
        return Err(CliError::Input(format!("cutoff must be non-negative, got {cutoff}")));
    }
    let curve = json::from_str::<CurveJson>("curve", curve_text)?.to_curve()?;
    let (v, report) = vacuum(&curve, cutoff)?;
    let out = VacuumOut { functional: FunctionalJson::from_functional(&v.functional), charge_total: v.charge_total, kernel_dims: report.dims };
    Ok(Output { json: json::to_string(&out), pass: true })
}

#[derive(Serialize)]
struct GaugeOut {
    form: Vec<String>,
    function: Vec<String>,
}

#[derive(Serialize)]
struct FuchsianOut {
    b: String,
    residual: Vec<String>,
    divisible_by_q: bool,
}

#[derive(Serialize)]
struct SewOut {
    q_order: usize,
    window: i64,
    /// The recorded global sign: the `q^0` coefficient is this multiple of the nodal vacuum.
    sign: i64,
    coeffs: Vec<FunctionalJson>,
    gauge_residuals: GaugeOut,
    fuchsian: FuchsianOut,
    pass: bool,
}

/// Options of the `sew` command beyond the curve and the `q` order.
pub struct SewOptions {
    /// Test window for the coefficients and residuals.
    pub window: i64,
    /// Window on which the base vacuum of the normalization is solved.
    pub base_cutoff: i64,
    /// Seed for the random node data of the gauge check.
    pub seed: u64,
}

pub fn run_sew(curve_text: &str, q_order: usize, opts: &SewOptions) -> Result<Output, CliError> {
    let curve = json::from_str::<CurveJson>("curve", curve_text)?.to_curve()?;
    if curve.glue.len() != 1 {
        return Err(CliError::Input("sewing needs a curve with exactly one node".into()));
    }
    let hint = |e: bcghost::Error| match e {
        bcghost::Error::Cutoff { cutoff, weight } => CliError::Input(format!(
            "base vacuum known up to weight {cutoff} but weight {weight} is needed; rerun with --base-cutoff {}",
            weight.max(cutoff + 2)
        )),
        e => e.into(),
    };
    let (bv, _) = vacuum(&curve.normalization(), opts.base_cutoff)?;
    let s = setup(&curve, Rc::new(bv.functional), 24)?;
    let charge = curve.charge_total();
    let series = sew(s.phi.clone(), q_order)?;
    let coeffs = series.materialize(opts.window, Some(charge)).map_err(hint)?;
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(opts.seed);
    let k = q_order as i64;
    let a = suites::random_node_data(&mut rng, k);
    let taus = family_form_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k, k + 2)?;
    let fs = family_function_lift(&s.curve, s.plus, s.minus, &s.outer, &a, k, k + 2)?;
    let form = family_gauge_residual(&series, &s.curve, &s.outer, &taus, opts.window, charge).map_err(hint)?;
    let function = family_gauge_residual(&series, &s.curve, &s.outer, &fs, opts.window, charge).map_err(hint)?;
    let b = b_term(&s.curve, &s.field, &s.outer)?;
    let fu = fuchsian_check(&series, &s.curve, &s.outer, &s.field, &b, opts.window, charge).map_err(hint)?;
    let pass = form.iter().chain(&function).chain(&fu.residual).all(Zero::is_zero) && (q_order == 0 || fu.divisible_by_q);
    let out = SewOut {
        q_order,
        window: opts.window,
        sign: SEWING_SIGN,
        coeffs: coeffs.coeffs.iter().map(FunctionalJson::from_functional).collect(),
        gauge_residuals: GaugeOut { form: form.iter().map(rat).collect(), function: function.iter().map(rat).collect() },
        fuchsian: FuchsianOut { b: rat(&b), residual: fu.residual.iter().map(rat).collect(), divisible_by_q: fu.divisible_by_q },
        pass,
    };
    Ok(Output { json: json::to_string(&out), pass })
}

#[derive(Serialize)]
struct PreferredOut {
    genus: usize,
    #[serde(flatten)]
    functional: FunctionalJson,
}

pub fn run_preferred(data_text: &str, cutoff: i64) -> Result<Output, CliError> {
    if cutoff < 0 {
        return Err(CliError::Input(format!("cutoff must be non-negative, got {cutoff}")));
    }
    let data = json::from_str::<ExpansionDataJson>("expansion data", data_text)?.to_data()?;
    let p = preferred_element(&data, cutoff)?;
    debug_assert_eq!(p.functional.arity(), 1);
    let out = PreferredOut { genus: p.genus, functional: FunctionalJson::from_functional(&p.functional) };
    Ok(Output { json: json::to_string(&out), pass: true })
}
