//! Problem files, subcommands and the JSON report envelope behind the
//! `padic-orbits` binary.
//!
//! Every command returns a [`Report`]; [`Report::render`] produces the exact
//! bytes written to the output, with object keys sorted.

use padic_orbits::dml::{banach_density_gap, return_rate_witness, return_set, DmlConfig, DmlSolver, TargetSpec};
use padic_orbits::heights::{count_height_le, gap_ratio_series, limsup_liminf_summary};
use padic_orbits::padic::check_prime;
use padic_orbits::poly::parse_rational;
use padic_orbits::{residue_period, Error, ErrorKind, Observable, PolyMap, Polynomial, RationalPoint};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const TOOL_VERSION: &str = concat!("padic-orbits ", env!("CARGO_PKG_VERSION"));

fn default_precision() -> u32 {
    padic_orbits::dml::DEFAULT_PRECISION
}

fn default_horizon() -> u64 {
    padic_orbits::dml::DEFAULT_HORIZON
}

fn default_mahler() -> usize {
    padic_orbits::arclemma::DEFAULT_MAHLER_COEFFICIENTS
}

fn default_holdout() -> usize {
    padic_orbits::arclemma::DEFAULT_HOLDOUT
}

/// The JSON problem file. Polynomials and rationals are kept as strings so
/// the grammar lives in one place.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub prime: u64,
    #[serde(default = "default_precision")]
    pub precision: u32,
    pub variables: Vec<String>,
    pub map: Vec<String>,
    pub point: Vec<String>,
    /// One string for an `A^1`-valued observable, two for `[num : den]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub observable: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<TargetBlock>,
    #[serde(default = "default_horizon")]
    pub horizon: u64,
    #[serde(default = "default_mahler")]
    pub mahler_coefficients: usize,
    #[serde(default = "default_holdout")]
    pub holdout_count: usize,
}

/// A target as written in a problem file. An empty `observable` falls back to
/// the problem-level observable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetBlock {
    Value {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        observable: Vec<String>,
        value: Vec<String>,
    },
    Projective {
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        observable: Vec<String>,
        value: [String; 2],
    },
    Subvariety { equations: Vec<String> },
}

/// Command-line overrides of problem-file fields.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub prime: Option<u64>,
    pub precision: Option<u32>,
    pub horizon: Option<u64>,
}

/// A validated problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub file: ProblemFile,
    pub map: PolyMap,
    pub point: RationalPoint,
    pub observable: Option<Observable>,
    pub targets: Vec<TargetSpec>,
    pub digest: String,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Json(serde_json::Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Precision => 3,
                ErrorKind::Resource => 4,
                ErrorKind::Other => 1,
            },
            CliError::Json(_) => 2,
            CliError::Io(_) => 1,
        }
    }

    /// The machine-readable error payload written to stderr.
    pub fn to_json(&self) -> Value {
        let body = match self {
            CliError::Core(Error::Syntax { position, message }) => {
                json!({"kind": "syntax", "message": message, "position": position})
            }
            CliError::Core(e) => json!({"kind": e.name(), "message": e.to_string()}),
            CliError::Json(e) => json!({
                "kind": "malformed_problem_file",
                "message": e.to_string(),
                "line": e.line(),
                "column": e.column(),
            }),
            CliError::Io(m) => json!({"kind": "io", "message": m}),
        };
        json!({ "error": body, "exit_code": self.exit_code(), "tool_version": TOOL_VERSION })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
            CliError::Io(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn parse_polys(texts: &[String], vars: &[String]) -> CliResult<Vec<Polynomial>> {
    texts.iter().map(|t| Polynomial::parse(t, vars).map_err(CliError::from)).collect()
}

fn observable_from(texts: &[String], vars: &[String]) -> CliResult<Observable> {
    let polys = parse_polys(texts, vars)?;
    match <[Polynomial; 2]>::try_from(polys) {
        Ok([n, d]) => Ok(Observable::projective(n, d)?),
        Err(polys) if polys.len() == 1 => Ok(Observable::affine(polys.into_iter().next().expect("one"))),
        Err(polys) => Err(Error::DimensionMismatch(format!("observable needs 1 or 2 polynomials, got {}", polys.len())).into()),
    }
}

impl ProblemFile {
    pub fn from_json(text: &str) -> CliResult<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("problem files serialize")
    }

    pub fn apply(&mut self, o: Overrides) {
        if let Some(p) = o.prime {
            self.prime = p;
        }
        if let Some(n) = o.precision {
            self.precision = n;
        }
        if let Some(h) = o.horizon {
            self.horizon = h;
        }
    }

    /// Parses every string field and checks dimensions.
    pub fn compile(self, digest: String) -> CliResult<Problem> {
        check_prime(self.prime)?;
        if self.precision == 0 {
            return Err(Error::InvalidPrecision.into());
        }
        let vars = &self.variables;
        if self.map.len() != vars.len() {
            return Err(Error::DimensionMismatch(format!("{} variables but {} map components", vars.len(), self.map.len())).into());
        }
        if self.point.len() != vars.len() {
            return Err(Error::DimensionMismatch(format!("{} variables but a point of dimension {}", vars.len(), self.point.len())).into());
        }
        let map = PolyMap::parse(vars, &self.map)?;
        let point = RationalPoint::parse(&self.point)?;
        let observable = match self.observable.len() {
            0 => None,
            _ => Some(observable_from(&self.observable, vars)?),
        };
        let mut targets = Vec::with_capacity(self.targets.len());
        for block in &self.targets {
            targets.push(self.compile_target(block, observable.as_ref())?);
        }
        Ok(Problem { file: self, map, point, observable, targets, digest })
    }

    fn compile_target(&self, block: &TargetBlock, fallback: Option<&Observable>) -> CliResult<TargetSpec> {
        let vars = &self.variables;
        let missing = || CliError::from(Error::InvalidInput("target has no observable and the problem defines none".into()));
        match block {
            TargetBlock::Value { observable, value } => {
                let observable = if observable.is_empty() {
                    match fallback {
                        Some(f) if f.is_affine() => vec![f.numerator.clone()],
                        Some(_) => return Err(Error::InvalidInput("value target needs an affine observable".into()).into()),
                        None => return Err(missing()),
                    }
                } else {
                    parse_polys(observable, vars)?
                };
                if observable.len() != value.len() {
                    return Err(Error::DimensionMismatch(format!("{} observables but {} values", observable.len(), value.len())).into());
                }
                let value = value.iter().map(|v| parse_rational(v)).collect::<Result<Vec<_>, _>>()?;
                Ok(TargetSpec::Value { observable, value })
            }
            TargetBlock::Projective { observable, value } => {
                let observable = if observable.is_empty() {
                    fallback.cloned().ok_or_else(missing)?
                } else {
                    observable_from(observable, vars)?
                };
                let value = (parse_rational(&value[0])?, parse_rational(&value[1])?);
                Ok(TargetSpec::Projective { observable, value })
            }
            TargetBlock::Subvariety { equations } => Ok(TargetSpec::Subvariety { equations: parse_polys(equations, vars)? }),
        }
    }
}

impl Problem {
    /// Reads a problem file, applies overrides and validates it. The digest
    /// covers the file bytes as read.
    pub fn load(text: &str, overrides: Overrides) -> CliResult<Self> {
        let mut file = ProblemFile::from_json(text)?;
        file.apply(overrides);
        file.compile(digest(text.as_bytes()))
    }

    fn config(&self) -> DmlConfig {
        DmlConfig {
            precision: self.file.precision,
            horizon: self.file.horizon,
            mahler_coefficients: self.file.mahler_coefficients,
            holdout: self.file.holdout_count,
            ..DmlConfig::new(self.file.prime)
        }
    }

    fn parameters(&self) -> Value {
        json!({
            "prime": self.file.prime,
            "precision": self.file.precision,
            "horizon": self.file.horizon,
            "mahler_coefficients": self.file.mahler_coefficients,
            "holdout_count": self.file.holdout_count,
        })
    }

    fn observable(&self) -> CliResult<&Observable> {
        self.observable
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("this command needs an observable".into()).into())
    }
}

/// One command's output before rendering.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: &'static str,
    pub input_digest: Option<String>,
    pub parameters: Value,
    pub payload: Value,
    pub warnings: Vec<String>,
}

impl Report {
    fn new(command: &'static str, problem: &Problem, payload: Value) -> Self {
        Report {
            command,
            input_digest: Some(problem.digest.clone()),
            parameters: problem.parameters(),
            payload,
            warnings: Vec::new(),
        }
    }

    pub fn envelope(&self) -> Value {
        // serde_json maps are ordered by key, so every level comes out sorted.
        json!({
            "command": self.command,
            "input_digest": self.input_digest,
            "parameters": self.parameters,
            "payload": self.payload,
            "tool_version": TOOL_VERSION,
            "warnings": self.warnings,
        })
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.envelope()).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn push_unique(warnings: &mut Vec<String>, w: String) {
    if !warnings.contains(&w) {
        warnings.push(w);
    }
}

/// `Φ^n(x)` for `0 ≤ n ≤ n_max`.
pub fn cmd_orbit(problem: &Problem, n_max: u64) -> CliResult<Report> {
    let orbit = problem.map.orbit(&problem.point, n_max)?;
    let mut r = Report::new("orbit", problem, json!({ "n_max": n_max, "points": to_value(&orbit) }));
    r.parameters["n_max"] = json!(n_max);
    Ok(r)
}

pub fn cmd_period(problem: &Problem) -> CliResult<Report> {
    let period = residue_period(&problem.map, &problem.point, problem.file.prime)?;
    let good = padic_orbits::good_reduction_check(&problem.map, &problem.point, problem.file.prime);
    let payload = json!({
        "preperiod": period.preperiod,
        "period": period.period,
        "good_reduction": good,
    });
    Ok(Report::new("period", problem, payload))
}

/// Mahler fits and certificates for every residue class of the orbit.
pub fn cmd_mahler_fit(problem: &Problem) -> CliResult<Report> {
    let solver = DmlSolver::new(&problem.map, &problem.point, problem.config())?;
    let period = solver.period();
    let classes: Vec<Value> = solver
        .classes()
        .iter()
        .enumerate()
        .map(|(r, c)| json!({ "residue": r, "base_index": period.preperiod + r as u64, "interpolation": to_value(c) }))
        .collect();
    let mut report = Report::new(
        "mahler-fit",
        problem,
        json!({ "preperiod": period.preperiod, "period": period.period, "classes": classes }),
    );
    for (r, c) in solver.classes().iter().enumerate() {
        if !c.certificate().is_certified() {
            report.warnings.push(format!("residue class {r}: interpolation not certified"));
        }
    }
    Ok(report)
}

fn series_diag(s: &padic_orbits::PadicSeries) -> Value {
    let err = |e: Error| json!({ "error": e.name(), "message": e.to_string() });
    let mut out = json!({ "precision": s.precision(), "tail_floor": s.tail_floor() });
    out["gauss_valuation"] = s.gauss_valuation().map(|g| json!(g)).unwrap_or_else(err);
    out["strassman_degree"] = s.strassman_degree().map(|d| json!(d)).unwrap_or_else(err);
    out["weierstrass"] = s
        .weierstrass_prep()
        .map(|w| {
            json!({
                "degree": w.poly_part.len().saturating_sub(1),
                "gauss_valuation": w.gauss_valuation,
                "output_precision": w.output_precision,
                "poly_part": to_value(&w.poly_part),
            })
        })
        .unwrap_or_else(err);
    out
}

/// Strassman and Weierstrass data of each class series and, when the problem
/// has an affine observable, of the observable along each class.
pub fn cmd_series_diag(problem: &Problem) -> CliResult<Report> {
    let solver = DmlSolver::new(&problem.map, &problem.point, problem.config())?;
    let period = solver.period();
    let affine = problem.observable.as_ref().filter(|f| f.is_affine());
    let mut report = Report::new("series-diag", problem, Value::Null);
    let mut classes = Vec::new();
    for (r, c) in solver.classes().iter().enumerate() {
        let mut entry = json!({ "residue": r, "verdict": to_value(&c.certificate().verdict) });
        match c.certified_series() {
            Some(series) => {
                entry["coordinates"] = Value::Array(series.iter().map(series_diag).collect());
                if let Some(f) = affine {
                    entry["observable"] = match padic_orbits::dml::compose_observable(series, &f.numerator) {
                        Ok(h) => series_diag(&h),
                        Err(e) => json!({ "error": e.name(), "message": e.to_string() }),
                    };
                }
            }
            None => {
                report.warnings.push(format!("residue class {r}: interpolation not certified"));
            }
        }
        classes.push(entry);
    }
    report.payload = json!({ "preperiod": period.preperiod, "period": period.period, "classes": classes });
    Ok(report)
}

pub fn cmd_dml_solve(problem: &Problem) -> CliResult<Report> {
    if problem.targets.is_empty() {
        return Err(Error::InvalidInput("problem file has no targets".into()).into());
    }
    let solver = DmlSolver::new(&problem.map, &problem.point, problem.config())?;
    let solutions = solver.solve_targets(&problem.targets)?;
    let mut report = Report::new("dml-solve", problem, json!({ "solutions": to_value(&solutions) }));
    for s in &solutions {
        for w in &s.warnings {
            push_unique(&mut report.warnings, w.clone());
        }
    }
    Ok(report)
}

/// Chart return sets, complement densities and a return-rate witness.
pub fn cmd_return_set(problem: &Problem, kappa: u64) -> CliResult<Report> {
    let f = problem.observable()?;
    let h = problem.file.horizon;
    let rep = return_set(&problem.map, &problem.point, f, problem.file.prime, h)?;
    let window = (h / 10).max(1);
    let densities: Vec<Value> = rep
        .charts
        .iter()
        .map(|s| json!({ "chart": s.chart, "window": window, "complement_density": banach_density_gap(s, window).to_string() }))
        .collect();
    let mut report = Report::new("return-set", problem, Value::Null);
    let witness = match return_rate_witness(&rep.charts, kappa) {
        Ok(w) => to_value(&w),
        Err(Error::HorizonTooSmall) => {
            report.warnings.push(format!("no return-rate witness with kappa = {kappa} below the horizon"));
            Value::Null
        }
        Err(e) => return Err(e.into()),
    };
    report.parameters["kappa"] = json!(kappa);
    report.payload = json!({ "report": to_value(&rep), "densities": densities, "witness": witness });
    Ok(report)
}

/// `h(f(Φ^n(x))) / log n` up to the horizon.
pub fn cmd_gap_ratio(problem: &Problem) -> CliResult<Report> {
    let f = problem.observable()?;
    let gap = gap_ratio_series(&problem.map, &problem.point, f, problem.file.horizon)?;
    let mut report = Report::new("gap-ratio", problem, Value::Null);
    let summary = match limsup_liminf_summary(&gap, 0.5) {
        Ok(s) => to_value(&s),
        Err(e) => {
            report.warnings.push(e.to_string());
            Value::Null
        }
    };
    report.payload = json!({ "report": to_value(&gap), "tail_summary": summary });
    Ok(report)
}

/// `#{t ∈ Q : H(t) ≤ N}`. There is no input file, so the digest covers `N`.
pub fn cmd_count_heights(n: u64) -> CliResult<Report> {
    let count = count_height_le(n)?;
    Ok(Report {
        command: "count-heights",
        input_digest: Some(digest(n.to_string().as_bytes())),
        parameters: json!({ "n": n }),
        payload: json!({ "n": n, "count": count }),
        warnings: Vec::new(),
    })
}
