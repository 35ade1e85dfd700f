//! Problem files and the batch commands behind the binary.
//!
//! A problem file is JSON:
//!
//! ```json
//! {"variables": ["x", "y"], "poisson": {"1,2": "x*y"}, "volume": "1",
//!  "module": {"rank": 1, "bracket": {"x": [["-x"]], "y": [["y"]]}},
//!  "twist": "modular"}
//! ```
//!
//! Keys of `poisson` are 1-based increasing index pairs. `module` and
//! `twist` are optional; `twist` is `"modular"` or `{"components": [...]}`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::calculus::{MultiVector, VectorField, MAX_VARS};
use crate::complexes::grading_shift;
use crate::homology::{betti_table, verify_duality_with_field, BettiKind, BettiTable, DualityConfig, DualityReport};
use crate::pmodule::{FlatnessWitness, PoissonModule, PolyMatrix};
use crate::poisson::{bivector, check_jacobi, FieldWitness, JacobiWitness, PoissonStructure, VolumeForm};
use crate::poly::{Poly, PolyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_MODE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("cannot parse `{field}`: {source}")]
    Parse {
        field: String,
        #[source]
        source: PolyError,
    },
}

/// The file format as written, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    pub variables: Vec<String>,
    pub poisson: BTreeMap<String, String>,
    pub volume: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub module: Option<RawModule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<RawTwist>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModule {
    pub rank: usize,
    pub bracket: BTreeMap<String, Vec<Vec<String>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawTwist {
    Named(String),
    Components(RawComponents),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawComponents {
    pub components: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleSpec {
    pub rank: usize,
    pub brackets: Vec<PolyMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TwistSpec {
    Modular,
    Field(VectorField),
}

/// A validated problem file. The bivector is not yet checked for Jacobi.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    pub variables: Vec<String>,
    pub pi: MultiVector,
    pub volume: VolumeForm,
    pub module: Option<ModuleSpec>,
    pub twist: Option<TwistSpec>,
    /// SHA-256 of the canonical JSON form of the file.
    pub digest: String,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_poly(field: String, text: &str, names: &[String]) -> Result<Poly, CliError> {
    Poly::parse(text, names).map_err(|source| CliError::Parse { field, source })
}

fn valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn parse_pair(key: &str, n: usize) -> Result<(usize, usize), CliError> {
    let path = format!("poisson.{key}");
    let parts: Vec<&str> = key.split(',').map(str::trim).collect();
    let [i, j] = parts.as_slice() else {
        return Err(schema(path, "expected a key of the form \"i,j\""));
    };
    let (Ok(i), Ok(j)) = (i.parse::<usize>(), j.parse::<usize>()) else {
        return Err(schema(path, "indices must be positive integers"));
    };
    if i == 0 || j == 0 || i > n || j > n {
        return Err(schema(path, format!("indices must lie in 1..={n}")));
    }
    if i >= j {
        return Err(schema(path, "indices not increasing"));
    }
    Ok((i - 1, j - 1))
}

impl ProblemSpec {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawSpec = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            schema(path, e.into_inner().to_string())
        })?;
        Self::from_raw(raw)
    }

    pub fn from_raw(raw: RawSpec) -> Result<Self, CliError> {
        let names = raw.variables.clone();
        let n = names.len();
        if n == 0 || n > MAX_VARS {
            return Err(schema("variables", format!("expected between 1 and {MAX_VARS} names")));
        }
        for (i, name) in names.iter().enumerate() {
            if !valid_name(name) {
                return Err(schema(format!("variables[{i}]"), format!("`{name}` is not a valid name")));
            }
            if names[..i].contains(name) {
                return Err(schema(format!("variables[{i}]"), format!("duplicate name `{name}`")));
            }
        }

        let mut entries = Vec::new();
        for (key, text) in &raw.poisson {
            let (i, j) = parse_pair(key, n)?;
            entries.push((i, j, parse_poly(format!("poisson.{key}"), text, &names)?));
        }
        let pi = bivector(n, entries);

        let volume = parse_poly("volume".into(), &raw.volume, &names)?
            .as_constant()
            .and_then(|u| VolumeForm::new(u).ok())
            .ok_or_else(|| schema("volume", "volume must be a nonzero rational constant"))?;

        let module = match &raw.module {
            None => None,
            Some(m) => {
                if m.rank == 0 {
                    return Err(schema("module.rank", "rank must be positive"));
                }
                let mut brackets: Vec<PolyMatrix> = vec![vec![vec![Poly::zero(n); m.rank]; m.rank]; n];
                for (var, rows) in &m.bracket {
                    let path = format!("module.bracket.{var}");
                    let i = names
                        .iter()
                        .position(|v| v == var)
                        .ok_or_else(|| schema(path.clone(), "not a declared variable"))?;
                    if rows.len() != m.rank || rows.iter().any(|r| r.len() != m.rank) {
                        return Err(schema(path, format!("expected a {0}x{0} matrix", m.rank)));
                    }
                    for (a, row) in rows.iter().enumerate() {
                        for (b, text) in row.iter().enumerate() {
                            brackets[i][a][b] = parse_poly(format!("{path}[{a}][{b}]"), text, &names)?;
                        }
                    }
                }
                Some(ModuleSpec { rank: m.rank, brackets })
            }
        };

        let twist = match &raw.twist {
            None => None,
            Some(RawTwist::Named(name)) if name == "modular" => Some(TwistSpec::Modular),
            Some(RawTwist::Named(name)) => {
                return Err(schema("twist", format!("unknown twist `{name}`, expected \"modular\"")))
            }
            Some(RawTwist::Components(c)) => {
                if c.components.len() != n {
                    return Err(schema("twist.components", format!("expected {n} components")));
                }
                let comps = c
                    .components
                    .iter()
                    .enumerate()
                    .map(|(i, t)| parse_poly(format!("twist.components[{i}]"), t, &names))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(TwistSpec::Field(VectorField::from_components(comps)))
            }
        };

        let canonical = serde_json::to_string(&raw).expect("raw spec serializes");
        Ok(ProblemSpec {
            variables: names,
            pi,
            volume,
            module,
            twist,
            digest: hex::encode(Sha256::digest(canonical.as_bytes())),
        })
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }
}

pub fn load(path: impl AsRef<Path>) -> Result<ProblemSpec, CliError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    ProblemSpec::from_json(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Check,
    Modular,
    Cohomology,
    Homology,
    Duality,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Check => "check",
            Command::Modular => "modular",
            Command::Cohomology => "cohomology",
            Command::Homology => "homology",
            Command::Duality => "duality",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Flags {
    pub degree: Option<usize>,
    pub weight: Option<i64>,
    pub max_weight: Option<i64>,
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

pub const DEFAULT_TABLE_WEIGHT: i64 = 6;
pub const DEFAULT_DUALITY_WEIGHT: i64 = 4;
pub const DEFAULT_TRIALS: usize = 20;

/// Machine-readable evidence attached to a failed check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Jacobi { triple: [String; 3], jacobiator: String },
    Flatness { section: usize, pair: [String; 2], discrepancy: Vec<String> },
    PoissonField { pair: [String; 2], lhs: String, rhs: String },
    Diagram { source: String, degree: usize, input: String, lhs: String, rhs: String },
    Betti { cochain_degree: usize, cochain_weight: i64, cohomology: usize, homology: usize },
    Mode { message: String },
    Input { message: String },
}

impl Witness {
    fn jacobi(w: &JacobiWitness, names: &[String]) -> Self {
        Witness::Jacobi {
            triple: w.triple.map(|i| names[i].clone()),
            jacobiator: w.jacobiator.display(names).to_string(),
        }
    }

    fn flatness(w: &FlatnessWitness, names: &[String]) -> Self {
        Witness::Flatness {
            section: w.section + 1,
            pair: w.pair.map(|i| names[i].clone()),
            discrepancy: w.discrepancy.iter().map(|p| p.display(names).to_string()).collect(),
        }
    }

    fn field(w: &FieldWitness, names: &[String]) -> Self {
        Witness::PoissonField {
            pair: w.pair.map(|i| names[i].clone()),
            lhs: w.lhs.display(names).to_string(),
            rhs: w.rhs.display(names).to_string(),
        }
    }
}

/// Report body; identical inputs give identical bodies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub spec_digest: Option<String>,
    pub results: Value,
    pub witnesses: Vec<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit_code: i32,
    pub report: Report,
    /// Human-readable rendering.
    pub text: String,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.report).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Table => {
                let mut s = self.text.clone();
                for w in &self.report.witnesses {
                    let _ = writeln!(s, "witness: {}", serde_json::to_string(w).expect("witness serializes"));
                }
                s
            }
        }
    }

    /// Outcome for a file that failed to load.
    pub fn input_error(command: Command, err: &CliError) -> Self {
        let message = err.to_string();
        Outcome {
            exit_code: EXIT_INPUT,
            report: Report {
                command: command.name().into(),
                spec_digest: None,
                results: Value::Null,
                witnesses: vec![Witness::Input { message: message.clone() }],
            },
            text: format!("input error: {message}\n"),
        }
    }
}

struct Run<'a> {
    command: Command,
    spec: &'a ProblemSpec,
    witnesses: Vec<Witness>,
    text: String,
}

/// Early exit carrying an exit code and the reason.
struct Stop(i32, String);

impl<'a> Run<'a> {
    fn names(&self) -> &'a [String] {
        &self.spec.variables
    }

    fn finish(self, exit_code: i32, results: Value) -> Outcome {
        Outcome {
            exit_code,
            report: Report {
                command: self.command.name().into(),
                spec_digest: Some(self.spec.digest.clone()),
                results,
                witnesses: self.witnesses,
            },
            text: self.text,
        }
    }

    fn stop(&mut self, code: i32, message: String, witness: Witness) -> Stop {
        self.witnesses.push(witness);
        Stop(code, message)
    }

    fn mode(&mut self, message: String) -> Stop {
        self.stop(EXIT_MODE, message.clone(), Witness::Mode { message })
    }

    fn structure(&mut self) -> Result<PoissonStructure, Stop> {
        if let Some(w) = check_jacobi(&self.spec.pi) {
            let witness = Witness::jacobi(&w, self.names());
            return Err(self.stop(EXIT_MODE, "bivector fails the Jacobi identity".into(), witness));
        }
        Ok(PoissonStructure::unverified(self.spec.pi.clone()).assume_verified())
    }

    fn declared_module(&mut self, p: &PoissonStructure) -> Result<PoissonModule, Stop> {
        let Some(m) = &self.spec.module else {
            return Ok(PoissonModule::trivial(1, p.nvars()));
        };
        let w = PoissonModule::unverified(m.rank, p.nvars(), m.brackets.clone()).map_err(|e| Stop(EXIT_INPUT, e.to_string()))?;
        match w.check_flat(p) {
            Ok(None) => Ok(w.assume_flat()),
            Ok(Some(fw)) => {
                let witness = Witness::flatness(&fw, self.names());
                Err(self.stop(EXIT_MODE, "module is not flat".into(), witness))
            }
            Err(e) => Err(Stop(EXIT_MODE, e.to_string())),
        }
    }

    /// The twisting field, if the file names one, validated as a Poisson field.
    fn twist_field(&mut self, p: &PoissonStructure) -> Result<Option<VectorField>, Stop> {
        match &self.spec.twist {
            None => Ok(None),
            Some(TwistSpec::Modular) => Ok(Some(
                p.modular_vector_field(&self.spec.volume).map_err(|e| Stop(EXIT_MODE, e.to_string()))?,
            )),
            Some(TwistSpec::Field(phi)) => match p.poisson_field_defect(phi) {
                Ok(None) => Ok(Some(phi.clone())),
                Ok(Some(fw)) => {
                    let witness = Witness::field(&fw, self.names());
                    Err(self.stop(EXIT_MODE, "twist is not a Poisson vector field".into(), witness))
                }
                Err(e) => Err(Stop(EXIT_INPUT, e.to_string())),
            },
        }
    }

    fn render_field(&self, v: &VectorField) -> Vec<String> {
        v.components().iter().map(|c| c.display(self.names()).to_string()).collect()
    }

    fn check(&mut self) -> Result<(i32, Value), Stop> {
        let names = self.names();
        let mut failed = false;
        let jacobi = check_jacobi(&self.spec.pi);
        if let Some(w) = &jacobi {
            self.witnesses.push(Witness::jacobi(w, names));
            let _ = writeln!(self.text, "jacobi: FAIL on ({})", w.triple.map(|i| names[i].as_str()).join(", "));
            return Ok((EXIT_CHECK_FAILED, json!({"jacobi": false, "flat": null, "twist_poisson": null})));
        }
        let _ = writeln!(self.text, "jacobi: ok");
        let p = PoissonStructure::unverified(self.spec.pi.clone()).assume_verified();

        let flat = match &self.spec.module {
            None => Value::Null,
            Some(m) => {
                let w = PoissonModule::unverified(m.rank, p.nvars(), m.brackets.clone())
                    .map_err(|e| Stop(EXIT_INPUT, e.to_string()))?;
                match w.check_flat(&p).map_err(|e| Stop(EXIT_MODE, e.to_string()))? {
                    None => {
                        let _ = writeln!(self.text, "flatness: ok");
                        Value::Bool(true)
                    }
                    Some(fw) => {
                        failed = true;
                        self.witnesses.push(Witness::flatness(&fw, names));
                        let _ = writeln!(self.text, "flatness: FAIL");
                        Value::Bool(false)
                    }
                }
            }
        };
        let twist = match &self.spec.twist {
            Some(TwistSpec::Field(phi)) => match p.poisson_field_defect(phi).map_err(|e| Stop(EXIT_INPUT, e.to_string()))? {
                None => {
                    let _ = writeln!(self.text, "twist: Poisson vector field");
                    Value::Bool(true)
                }
                Some(fw) => {
                    failed = true;
                    self.witnesses.push(Witness::field(&fw, names));
                    let _ = writeln!(self.text, "twist: FAIL, not a Poisson vector field");
                    Value::Bool(false)
                }
            },
            _ => Value::Null,
        };
        let code = if failed { EXIT_CHECK_FAILED } else { EXIT_OK };
        Ok((code, json!({"jacobi": true, "flat": flat, "twist_poisson": twist})))
    }

    fn modular(&mut self) -> Result<(i32, Value), Stop> {
        let p = self.structure()?;
        let phi = p
            .modular_vector_field(&self.spec.volume)
            .map_err(|e| Stop(EXIT_MODE, e.to_string()))?;
        let components = self.render_field(&phi);
        for (name, c) in self.names().iter().zip(&components) {
            let _ = writeln!(self.text, "phi({name}) = {c}");
        }
        Ok((EXIT_OK, json!({"components": components, "unimodular": phi.is_zero()})))
    }

    fn betti(&mut self, kind: BettiKind, flags: &Flags) -> Result<(i32, Value), Stop> {
        let p = self.structure()?;
        let mut w = self.declared_module(&p)?;
        let twist = self.twist_field(&p)?;
        if let Some(phi) = &twist {
            w = w.twist(&p, phi).map_err(|e| Stop(EXIT_MODE, e.to_string()))?;
        }
        if let Err(e) = grading_shift(&p, &w) {
            return Err(self.mode(e.to_string()));
        }
        let n = p.nvars();
        if flags.degree.is_some_and(|k| k > n) {
            return Err(Stop(EXIT_INPUT, format!("degree must be at most {n}")));
        }
        let max_weight = flags
            .max_weight
            .unwrap_or(DEFAULT_TABLE_WEIGHT)
            .max(flags.weight.unwrap_or(i64::MIN));
        let mut table = betti_table(&p, &w, kind, max_weight).map_err(|e| Stop(EXIT_MODE, e.to_string()))?;
        table
            .entries
            .retain(|e| flags.degree.map_or(true, |k| e.degree == k) && flags.weight.map_or(true, |wt| e.weight == wt));
        let twisting_field = twist.as_ref().map(|phi| self.render_field(phi));
        if let Some(c) = &twisting_field {
            let _ = writeln!(self.text, "module twisted by ({})", c.join(", "));
        }
        self.text.push_str(&render_table(&table));
        let mut results = serde_json::to_value(&table).expect("table serializes");
        results["twisting_field"] = json!(twisting_field);
        Ok((EXIT_OK, results))
    }

    fn duality(&mut self, flags: &Flags) -> Result<(i32, Value), Stop> {
        let p = self.structure()?;
        let w = self.declared_module(&p)?;
        let phi = match self.twist_field(&p)? {
            Some(phi) => phi,
            None => p
                .modular_vector_field(&self.spec.volume)
                .map_err(|e| Stop(EXIT_MODE, e.to_string()))?,
        };
        let config = DualityConfig {
            max_weight: flags.max_weight.unwrap_or(DEFAULT_DUALITY_WEIGHT),
            trials: flags.trials.unwrap_or(DEFAULT_TRIALS),
            seed: flags.seed.unwrap_or(0),
            variable_names: Some(self.spec.variables.clone()),
        };
        let report = verify_duality_with_field(&p, &w, &self.spec.volume, &phi, &config)
            .map_err(|e| Stop(EXIT_MODE, e.to_string()))?;
        self.collect_duality_witnesses(&report);
        self.text.push_str(&render_duality(&report));
        let code = if report.passed { EXIT_OK } else { EXIT_CHECK_FAILED };
        Ok((code, serde_json::to_value(&report).expect("report serializes")))
    }

    fn collect_duality_witnesses(&mut self, report: &DualityReport) {
        for f in &report.diagram.failures {
            self.witnesses.push(Witness::Diagram {
                source: f.source.clone(),
                degree: f.degree,
                input: f.input.clone(),
                lhs: f.lhs.clone(),
                rhs: f.rhs.clone(),
            });
        }
        let checks = report.betti.iter().chain(report.elw.iter().filter_map(|e| e.betti.as_ref()));
        for check in checks {
            for c in check.comparisons.iter().filter(|c| !c.equal) {
                self.witnesses.push(Witness::Betti {
                    cochain_degree: c.cochain_degree,
                    cochain_weight: c.cochain_weight,
                    cohomology: c.cohomology,
                    homology: c.homology,
                });
            }
        }
    }
}

fn render_table(table: &BettiTable) -> String {
    let mut s = String::new();
    let label = match table.kind {
        BettiKind::Homology => "HP_",
        BettiKind::Cohomology => "HP^",
    };
    let _ = writeln!(
        s,
        "{} table, rank {}, weight shift {}, weights up to {}",
        match table.kind {
            BettiKind::Homology => "homology",
            BettiKind::Cohomology => "cohomology",
        },
        table.metadata.rank,
        table.metadata.weight_shift,
        table.metadata.max_weight
    );
    let mut by_degree: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for e in &table.entries {
        by_degree
            .entry(e.degree)
            .or_default()
            .push(format!("w{}:{}", e.weight, e.dimension));
    }
    for (k, cells) in by_degree {
        let _ = writeln!(s, "{label}{k}  {}", cells.join(" "));
    }
    s
}

fn render_duality(report: &DualityReport) -> String {
    let mut s = String::new();
    let verdict = |b: bool| if b { "ok" } else { "FAIL" };
    let _ = writeln!(s, "modular field: ({})", report.modular_field.join(", "));
    let _ = writeln!(s, "twisting field: ({})", report.twisting_field.join(", "));
    let _ = writeln!(
        s,
        "diagram: {} ({} basis elements up to weight {}, {} random, {} failures)",
        verdict(report.diagram.passed),
        report.diagram.basis_elements,
        report.max_weight,
        report.diagram.random_elements,
        report.diagram.failure_count
    );
    match (&report.betti, &report.betti_skipped) {
        (Some(b), _) => {
            let _ = writeln!(s, "betti: {} ({} slice comparisons)", verdict(b.passed), b.comparisons.len());
        }
        (None, Some(reason)) => {
            let _ = writeln!(s, "betti: skipped ({reason})");
        }
        (None, None) => {}
    }
    if let Some(e) = &report.elw {
        let _ = writeln!(s, "elw connection equals modular twist: {}", verdict(e.matches_twist));
        if let Some(b) = &e.betti {
            let _ = writeln!(s, "elw against untwisted homology: {}", verdict(b.passed));
        }
    }
    let _ = writeln!(s, "overall: {}", verdict(report.passed));
    s
}

/// Runs one command; the report body depends only on the inputs.
pub fn run(command: Command, spec: &ProblemSpec, flags: &Flags) -> Outcome {
    let mut run = Run {
        command,
        spec,
        witnesses: Vec::new(),
        text: String::new(),
    };
    let result = match command {
        Command::Check => run.check(),
        Command::Modular => run.modular(),
        Command::Cohomology => run.betti(BettiKind::Cohomology, flags),
        Command::Homology => run.betti(BettiKind::Homology, flags),
        Command::Duality => run.duality(flags),
    };
    match result {
        Ok((code, results)) => run.finish(code, results),
        Err(Stop(code, message)) => {
            let _ = writeln!(run.text, "error: {message}");
            if code == EXIT_INPUT {
                run.witnesses.push(Witness::Input { message: message.clone() });
            }
            run.finish(code, json!({"error": message}))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(text: &str) -> ProblemSpec {
        ProblemSpec::from_json(text).unwrap()
    }

    #[test]
    fn load_examples() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"1"},"volume":"1"}"#);
        assert_eq!(s.nvars(), 2);
        assert_eq!(s.pi, MultiVector::basis(2, &[0, 1]));
        assert!(s.module.is_none() && s.twist.is_none());
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y"},"volume":"1","twist":"modular"}"#);
        assert_eq!(s.twist, Some(TwistSpec::Modular));
        let err = ProblemSpec::from_json(r#"{"variables":["x","y"],"poisson":{"2,1":"x"},"volume":"1"}"#).unwrap_err();
        assert_eq!(
            err,
            CliError::Schema {
                path: "poisson.2,1".into(),
                message: "indices not increasing".into()
            }
        );
    }

    #[test]
    fn schema_errors_carry_paths() {
        let err = ProblemSpec::from_json(r#"{"variables":["x"],"poisson":{},"volume":3}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema { ref path, .. } if path == "volume"), "{err:?}");
        let err = ProblemSpec::from_json(
            r#"{"variables":["x","y"],"poisson":{},"volume":"1","module":{"rank":1,"bracket":{"x":[["1","2"]]}}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, CliError::Schema { ref path, .. } if path == "module.bracket.x"));
        let err = ProblemSpec::from_json(r#"{"variables":["x","y"],"poisson":{"1,2":"x*z"},"volume":"1"}"#).unwrap_err();
        assert!(matches!(
            err,
            CliError::Parse { ref field, source: PolyError::UnknownVariable { .. } } if field == "poisson.1,2"
        ));
        let err = ProblemSpec::from_json(r#"{"variables":["x","y"],"poisson":{},"volume":"x"}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema { ref path, .. } if path == "volume"));
        let err = ProblemSpec::from_json(r#"{"variables":["x","y"],"poisson":{},"volume":"1","extra":1}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema { .. }));
    }

    #[test]
    fn modular_command() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"1"},"volume":"1"}"#);
        let out = run(Command::Modular, &s, &Flags::default());
        assert_eq!(out.exit_code, EXIT_OK);
        assert_eq!(out.report.results["components"], json!(["0", "0"]));
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y"},"volume":"1"}"#);
        let out = run(Command::Modular, &s, &Flags::default());
        assert_eq!(out.report.results["components"], json!(["-x", "y"]));
    }

    #[test]
    fn check_reports_jacobi_witness() {
        let s = spec(r#"{"variables":["x","y","z"],"poisson":{"1,2":"y","2,3":"1"},"volume":"1"}"#);
        let out = run(Command::Check, &s, &Flags::default());
        assert_eq!(out.exit_code, EXIT_CHECK_FAILED);
        assert_eq!(
            out.report.witnesses,
            vec![Witness::Jacobi {
                triple: ["x".into(), "y".into(), "z".into()],
                jacobiator: "1".into()
            }]
        );
        let out = run(Command::Cohomology, &s, &Flags::default());
        assert_eq!(out.exit_code, EXIT_MODE);
    }

    #[test]
    fn check_reports_flatness_witness() {
        let s = spec(
            r#"{"variables":["x","y"],"poisson":{"1,2":"1"},"volume":"1","module":{"rank":1,"bracket":{"x":[["x"]]}}}"#,
        );
        let out = run(Command::Check, &s, &Flags::default());
        assert_eq!(out.exit_code, EXIT_CHECK_FAILED);
        assert!(matches!(&out.report.witnesses[0], Witness::Flatness { discrepancy, .. } if discrepancy == &vec!["-1".to_string()]));
    }

    #[test]
    fn graded_mode_enforced() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y + 1"},"volume":"1"}"#);
        let out = run(Command::Cohomology, &s, &Flags::default());
        assert_eq!(out.exit_code, EXIT_MODE);
        assert!(matches!(out.report.witnesses[0], Witness::Mode { .. }));
    }

    #[test]
    fn cohomology_table_filters() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"1"},"volume":"1"}"#);
        let flags = Flags {
            degree: Some(0),
            max_weight: Some(4),
            ..Flags::default()
        };
        let out = run(Command::Cohomology, &s, &flags);
        assert_eq!(out.exit_code, EXIT_OK);
        let entries = out.report.results["entries"].as_array().unwrap();
        assert_eq!(entries.len(), 5);
        assert_eq!(entries[0]["dimension"], json!(1));
        assert!(out.text.contains("HP^0  w0:1 w1:0"));
    }

    #[test]
    fn duality_is_deterministic() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y"},"volume":"1","twist":"modular"}"#);
        let flags = Flags {
            max_weight: Some(3),
            trials: Some(5),
            seed: Some(7),
            ..Flags::default()
        };
        let a = run(Command::Duality, &s, &flags);
        let b = run(Command::Duality, &s, &flags);
        assert_eq!(a.exit_code, EXIT_OK);
        assert_eq!(a.render(Format::Json), b.render(Format::Json));
    }

    #[test]
    fn wrong_explicit_twist_fails_duality() {
        let s = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y"},"volume":"1","twist":{"components":["0","0"]}}"#);
        let flags = Flags {
            max_weight: Some(2),
            trials: Some(0),
            ..Flags::default()
        };
        let out = run(Command::Duality, &s, &flags);
        assert_eq!(out.exit_code, EXIT_CHECK_FAILED);
        assert!(out.report.witnesses.iter().any(|w| matches!(w, Witness::Diagram { .. })));
        let bad = spec(r#"{"variables":["x","y"],"poisson":{"1,2":"x*y"},"volume":"1","twist":{"components":["x","x"]}}"#);
        assert_eq!(run(Command::Duality, &bad, &flags).exit_code, EXIT_MODE);
        assert_eq!(run(Command::Check, &bad, &flags).exit_code, EXIT_CHECK_FAILED);
    }
}
