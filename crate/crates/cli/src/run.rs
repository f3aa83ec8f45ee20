use std::fmt;

use clap::ValueEnum;
use rayon::prelude::*;
use serde_json::{json, Value};

use wps_core::beilinson::{build_r, closed_form_differential, ResolutionBundle};
use wps_core::ktheory::{verify_fano_identity, verify_monodromy_identity, HypersurfaceModel, KTheoryReport, SerreCheck};
use wps_core::sheaf_cohomology::{verify_blk_cohomology, verify_diagonal_resolution_of, verify_mres};
use wps_core::{Error, FieldConfig, VerificationReport, WeightVector};

/// Exit 2 for bad input, exit 1 for a verification that could not complete.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Verify(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Verify(m) => write!(f, "verification error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidWeights(_)
            | Error::InvalidField(_)
            | Error::Range(_)
            | Error::WrongVariant(_)
            | Error::Model(_)
            | Error::Parse(_)
            | Error::BadPrime(_)
            | Error::UnsupportedTwistRange { .. } => CliError::Config(e.to_string()),
            _ => CliError::Verify(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Resolve,
    #[value(name = "d2")]
    D2,
    Diagonal,
    Blk,
    Mres,
    Ktheory,
    Fano,
}

impl Check {
    pub fn name(self) -> &'static str {
        match self {
            Check::Resolve => "resolve",
            Check::D2 => "d2",
            Check::Diagonal => "diagonal",
            Check::Blk => "blk",
            Check::Mres => "mres",
            Check::Ktheory => "ktheory",
            Check::Fano => "fano",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub weights: WeightVector,
    pub field: FieldConfig,
    pub degree_bound: i64,
    pub k: Option<i64>,
    pub m: Option<i64>,
    pub degree: Option<i64>,
    pub mutate_sign: bool,
}

impl RunConfig {
    pub fn new(weights: WeightVector, field: FieldConfig, degree_bound: Option<i64>) -> CliResult<Self> {
        let field = field.validated(weights.total())?;
        let degree_bound = degree_bound.unwrap_or(3 * weights.total());
        if degree_bound < 0 {
            return Err(CliError::Config(format!("degree bound must be nonnegative, got {degree_bound}")));
        }
        Ok(RunConfig { weights, field, degree_bound, k: None, m: None, degree: None, mutate_sign: false })
    }

    fn k_range(&self) -> CliResult<Vec<i64>> {
        let w = self.weights.total();
        match self.k {
            Some(k) if k <= -w || k > 0 => Err(CliError::Config(format!("--k must satisfy {} < k <= 0", -w))),
            Some(k) => Ok(vec![k]),
            None => Ok((1 - w..=0).collect()),
        }
    }

    fn m_range(&self) -> CliResult<Vec<i64>> {
        let w = self.weights.total();
        match self.m {
            Some(m) if m < 1 || m >= w => Err(CliError::Config(format!("--m must satisfy 0 < m < {w}"))),
            Some(m) => Ok(vec![m]),
            None => Ok((1..w).collect()),
        }
    }
}

pub fn parse_weights(s: &str) -> CliResult<WeightVector> {
    let parsed: Result<Vec<u32>, _> = s.split(',').map(|p| p.trim().parse::<u32>()).collect();
    let v = parsed.map_err(|_| CliError::Config(format!("cannot parse weights `{s}`")))?;
    Ok(WeightVector::new(v)?)
}

/// Result of one command: the reports plus their pass flag.
pub struct Outcome {
    pub pass: bool,
    pub reports: Vec<Value>,
    pub text: String,
    pub period: Option<u32>,
}

impl Outcome {
    fn from_report(r: VerificationReport) -> CliResult<Self> {
        Ok(Outcome {
            pass: r.pass,
            text: r.to_string(),
            reports: vec![to_value(&r)?],
            period: None,
        })
    }

    fn from_ktheory(reports: Vec<KTheoryReport>) -> CliResult<Self> {
        let period = if reports.len() == 1 { reports[0].minimal_period } else { None };
        Ok(Outcome {
            pass: reports.iter().all(|r| r.pass),
            text: reports.iter().map(ktheory_text).collect(),
            reports: reports.iter().map(to_value).collect::<CliResult<_>>()?,
            period,
        })
    }
}

fn to_value<T: serde::Serialize>(t: &T) -> CliResult<Value> {
    serde_json::to_value(t).map_err(|e| CliError::Verify(e.to_string()))
}

fn ktheory_text(r: &KTheoryReport) -> String {
    let weights: Vec<String> = r.weights.iter().map(u32::to_string).collect();
    let mut s = format!(
        "{} {} w=({}) d={}\n",
        if r.pass { "PASS" } else { "FAIL" },
        r.identity,
        weights.join(","),
        r.degree
    );
    s += &format!("  lattice rank: {}\n", r.sublattice_rank);
    match r.minimal_period {
        Some(p) => s += &format!("  minimal period: {p}\n"),
        None => s += "  minimal period: none within the tested exponent\n",
    }
    match &r.serre_check {
        Some(SerreCheck::Direct { pass }) => s += &format!("  serre check: {pass}\n"),
        Some(SerreCheck::Quotient { pass, radical_rank }) => {
            s += &format!("  serre check on the quotient by a rank-{radical_rank} radical: {pass}\n")
        }
        Some(SerreCheck::SerreSkipped { reason }) => s += &format!("  serre check skipped: {reason}\n"),
        None => {}
    }
    for row in &r.matrix_g {
        let cells: Vec<String> = row.iter().map(i128::to_string).collect();
        s += &format!("  G | {}\n", cells.join(" "));
    }
    s += &format!("  note: {}\n", r.note);
    s
}

pub fn execute(check: Check, cfg: &RunConfig) -> CliResult<Outcome> {
    match check {
        Check::Resolve => resolve(cfg),
        Check::D2 => verify_d2(cfg),
        Check::Diagonal => verify_diagonal(cfg),
        Check::Blk => Outcome::from_report(verify_blk_cohomology(&cfg.weights, cfg.field)?),
        Check::Mres => verify_mres_all(cfg),
        Check::Ktheory => ktheory(cfg),
        Check::Fano => fano(cfg),
    }
}

fn resolve(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    let k = cfg.k.unwrap_or(1 - w.total());
    let r = build_r(w, k)?;
    let d2 = r.check_d_squared()?;
    let mut text = format!("R_{k} for w={w}\n");
    for j in r.degrees() {
        let twists: Vec<String> = r.terms(j).iter().map(|t| format!("O({})", t.twist)).collect();
        text += &format!("  degree {j}: rank {} [{}]\n", r.rank(j), twists.join(" "));
    }
    text += &d2.to_string();
    Ok(Outcome {
        pass: d2.pass,
        reports: vec![json!({ "k": k, "complex": r.to_json() }), to_value(&d2)?],
        text,
        period: None,
    })
}

fn verify_d2(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    let ks = cfg.k_range()?;
    let bundle = ResolutionBundle::full(w)?;
    let mut report = VerificationReport::new("construction", w).param("mutate_sign", cfg.mutate_sign);
    for k in ks {
        let mut r = bundle.r(k)?.clone();
        if cfg.mutate_sign {
            if let Some(&(j, row, col)) = r.entry_positions().first() {
                r.flip_entry_sign(j, row, col)?;
                report.detail(&format!("mutated_k{k}"), json!([j, row, col]));
            }
        }
        let mut d2 = r.check_d_squared()?.param("k", k);
        if r != closed_form_differential(w, k)? {
            d2.fail(format!("R_{k} differs from the closed-form differential"));
        }
        report.push_part(d2);
        if k < 0 {
            report.push_part(bundle.mu(k)?.is_chain_map()?.param("k", k));
        }
    }
    Outcome::from_report(report)
}

fn verify_diagonal(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    let ks = cfg.k_range()?;
    let r = build_r(w, 1 - w.total())?;
    let parts: Vec<VerificationReport> = ks
        .into_par_iter()
        .map(|k| verify_diagonal_resolution_of(&r, k, cfg.degree_bound, cfg.field))
        .collect::<Result<_, _>>()?;
    let mut report = VerificationReport::new("diagonal", w)
        .param("degree_bound", cfg.degree_bound)
        .param("field", cfg.field.to_string());
    for p in parts {
        report.push_part(p);
    }
    Outcome::from_report(report)
}

fn verify_mres_all(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    let parts: Vec<VerificationReport> = cfg
        .m_range()?
        .into_par_iter()
        .map(|m| verify_mres(w, m, cfg.degree_bound, cfg.field))
        .collect::<Result<_, _>>()?;
    let mut report = VerificationReport::new("mres", w)
        .param("degree_bound", cfg.degree_bound)
        .param("field", cfg.field.to_string());
    for p in parts {
        report.push_part(p);
    }
    Outcome::from_report(report)
}

fn ktheory(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    if let Some(d) = cfg.degree.filter(|&d| d != w.total()) {
        return Err(CliError::Config(format!(
            "ktheory checks the degree {} hypersurface; use `fano --degree {d}`",
            w.total()
        )));
    }
    // two weights give a zero-dimensional hypersurface; the lattice identity still makes sense
    let model = if w.n() < 2 {
        HypersurfaceModel::new_allowing_points(w, w.total())?
    } else {
        HypersurfaceModel::calabi_yau(w)?
    };
    Outcome::from_ktheory(vec![verify_monodromy_identity(&model)?])
}

fn fano(cfg: &RunConfig) -> CliResult<Outcome> {
    let w = &cfg.weights;
    let degrees: Vec<i64> = match cfg.degree {
        Some(d) => vec![d],
        None => (1..=w.total()).collect(),
    };
    let reports = degrees
        .into_iter()
        .map(|d| verify_fano_identity(&HypersurfaceModel::new(w, d)?))
        .collect::<Result<Vec<_>, _>>()?;
    Outcome::from_ktheory(reports)
}
