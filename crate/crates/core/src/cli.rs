//! Batch command-line surface.
//!
//! `run` takes a parsed [`RunConfig`], writes data to the output stream and
//! diagnostics to the error stream, and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | usage error |
//! | 2 | input could not be read or parsed |
//! | 3 | numeric failure (no contraction, non-convergence) |

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::ball_domain::{iterate_fixed_point, norm, BallError, FixedPointReport, Norm, Vector};
use crate::context::{parse_cxt, parse_mv_csv, serialize_cxt, threshold, FormalContext, ManyValuedContext};
use crate::galois::{attribute_names, object_names};
use crate::graded::{embed_cells, graded_lattice, GradedError, GradedLattice};
use crate::lattice::{build_lattice, closed_itemsets, enumerate_concepts, ConceptLattice};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Formal concepts in lectic order.
    Concepts,
    /// Closed itemsets in lectic order.
    Itemsets,
    /// Graded concepts with their grade pairs.
    Graded,
    /// Fixed-point iteration of the min-degree contraction.
    Iterate,
    /// Binarize a many-valued context and emit CXT.
    Threshold,
    /// Hasse diagram of the concept lattice in DOT.
    ExportDot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Cxt,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "graded-fca", version, about = "Formal concepts, closed itemsets and graded lattices")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Command,
    /// Context file.
    #[arg(long = "input", short = 'i')]
    pub input_path: PathBuf,
    /// Input format; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Binarization threshold in [0, 1]; required for csv input except with `iterate`.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long = "max-iter", default_value_t = 10_000)]
    pub max_iter: usize,
    /// Write output here instead of stdout.
    #[arg(long = "output", short = 'o')]
    pub output_path: Option<PathBuf>,
    #[arg(long = "json")]
    pub emit_json: bool,
}

impl RunConfig {
    pub fn new(command: Command, input_path: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            input_path: input_path.into(),
            format: None,
            theta: None,
            tol: 1e-9,
            max_iter: 10_000,
            output_path: None,
            emit_json: false,
        }
    }

    pub fn resolved_format(&self) -> Format {
        self.format.unwrap_or_else(|| {
            match self.input_path.extension().and_then(|e| e.to_str()) {
                Some(ext) if ext.eq_ignore_ascii_case("csv") => Format::Csv,
                _ => Format::Cxt,
            }
        })
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return Err(CliError::Usage(format!("--tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(CliError::Usage("--max-iter must be at least 1".into()));
        }
        if let Some(t) = self.theta {
            if !(0.0..=1.0).contains(&t) {
                return Err(CliError::Usage(format!("--theta must lie in [0, 1], got {t}")));
            }
        }
        let csv = self.resolved_format() == Format::Csv;
        let needs_theta = match self.command {
            Command::Threshold => true,
            Command::Iterate => false,
            _ => csv,
        };
        if needs_theta && self.theta.is_none() {
            return Err(CliError::Usage(format!(
                "--theta is required for `{}` on this input",
                self.command.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
            )));
        }
        if self.emit_json && matches!(self.command, Command::Threshold | Command::ExportDot) {
            return Err(CliError::Usage("--json is not available for this command".into()));
        }
        Ok(())
    }
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Parse(String),
    Numeric(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Numeric(_) => EXIT_NUMERIC,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Parse(m) | CliError::Numeric(m) => m,
        }
    }
}

impl From<GradedError> for CliError {
    fn from(e: GradedError) -> Self {
        match e {
            GradedError::Context(c) => CliError::Usage(c.to_string()),
            GradedError::Galois(g) => CliError::Usage(g.to_string()),
            other => CliError::Numeric(other.to_string()),
        }
    }
}

impl From<BallError> for CliError {
    fn from(e: BallError) -> Self {
        CliError::Numeric(e.to_string())
    }
}

enum Input {
    Binary(FormalContext),
    ManyValued(ManyValuedContext),
}

impl Input {
    fn load(config: &RunConfig) -> Result<Input, CliError> {
        let path = &config.input_path;
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let parse_err = |e: crate::context::ContextError| CliError::Parse(format!("{}: {e}", path.display()));
        Ok(match config.resolved_format() {
            Format::Cxt => Input::Binary(parse_cxt(&text).map_err(parse_err)?),
            Format::Csv => Input::ManyValued(parse_mv_csv(&text).map_err(parse_err)?),
        })
    }

    fn many_valued(&self) -> ManyValuedContext {
        match self {
            Input::Binary(ctx) => ManyValuedContext::from(ctx),
            Input::ManyValued(mv) => mv.clone(),
        }
    }

    /// The binary context, thresholded at `theta` when one is given.
    fn binary(&self, theta: Option<f64>) -> Result<FormalContext, CliError> {
        match (self, theta) {
            (Input::Binary(ctx), None) => Ok(ctx.clone()),
            (_, Some(t)) => threshold(&self.many_valued(), t).map_err(|e| CliError::Usage(e.to_string())),
            (Input::ManyValued(_), None) => Err(CliError::Usage("--theta is required".into())),
        }
    }
}

/// Runs one command; returns the exit code.
pub fn run(config: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match execute(config) {
        Ok(text) => {
            let written = match &config.output_path {
                Some(path) => std::fs::write(path, text.as_bytes())
                    .map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => EXIT_OK,
                Err(msg) => {
                    let _ = writeln!(err, "error: cannot write output: {msg}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message());
            e.exit_code()
        }
    }
}

fn execute(config: &RunConfig) -> Result<String, CliError> {
    config.validate()?;
    let input = Input::load(config)?;
    match config.command {
        Command::Concepts => {
            let ctx = input.binary(config.theta)?;
            Ok(render_concepts(&ctx, config.emit_json))
        }
        Command::Itemsets => {
            let ctx = input.binary(config.theta)?;
            Ok(render_itemsets(&ctx, config.emit_json))
        }
        Command::Graded => {
            let mv = input.many_valued();
            let theta = config.theta.unwrap_or(1.0);
            let lattice = graded_lattice(&mv, theta)?;
            Ok(render_graded(&lattice, config.emit_json))
        }
        Command::Iterate => {
            let mv = input.many_valued();
            let run = iterate_contraction(&mv, config.theta.unwrap_or(0.0), config.tol, config.max_iter)?;
            Ok(render_iteration(&run, config.tol, config.emit_json))
        }
        Command::Threshold => Ok(serialize_cxt(&input.binary(config.theta)?)),
        Command::ExportDot => {
            let ctx = input.binary(config.theta)?;
            Ok(render_dot(&ctx, &build_lattice(&ctx)))
        }
    }
}

fn json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptRecord {
    pub extent: Vec<String>,
    pub intent: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grade: Option<[Option<f64>; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptsDocument {
    pub concepts: Vec<ConceptRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<f64>>,
}

fn names(v: Vec<&str>) -> Vec<String> {
    v.into_iter().map(str::to_string).collect()
}

pub fn concepts_document(ctx: &FormalContext) -> ConceptsDocument {
    ConceptsDocument {
        concepts: enumerate_concepts(ctx)
            .iter()
            .map(|c| ConceptRecord {
                extent: names(object_names(ctx, &c.extent)),
                intent: names(attribute_names(ctx, &c.intent)),
                grade: None,
            })
            .collect(),
        chain: None,
    }
}

/// Graded concepts first (by grade pair), then those with an undefined
/// grade (lectic order); `null` marks an undefined grade.
pub fn graded_document(lattice: &GradedLattice) -> ConceptsDocument {
    let ctx = &lattice.context;
    let record = |c: &crate::lattice::Concept, r: Option<f64>, s: Option<f64>| ConceptRecord {
        extent: names(object_names(ctx, &c.extent)),
        intent: names(attribute_names(ctx, &c.intent)),
        grade: Some([r, s]),
    };
    let mut concepts: Vec<ConceptRecord> = lattice
        .entries
        .iter()
        .map(|e| record(&e.concept, Some(e.r()), Some(e.s())))
        .collect();
    concepts.extend(lattice.undefined.iter().map(|u| record(&u.concept, u.r, u.s)));
    ConceptsDocument {
        concepts,
        chain: Some(lattice.chain.iter().map(|b| b.radius).collect()),
    }
}

fn concept_line(extent: &[String], intent: &[String]) -> String {
    format!("{} | {}", extent.join(" "), intent.join(" "))
}

pub fn render_concepts(ctx: &FormalContext, json: bool) -> String {
    let doc = concepts_document(ctx);
    if json {
        return json_string(&doc);
    }
    let mut out = String::new();
    for c in &doc.concepts {
        out.push_str(&concept_line(&c.extent, &c.intent));
        out.push('\n');
    }
    out
}

pub fn render_itemsets(ctx: &FormalContext, json: bool) -> String {
    let sets: Vec<Vec<String>> = closed_itemsets(ctx)
        .iter()
        .map(|s| names(attribute_names(ctx, s)))
        .collect();
    if json {
        #[derive(Serialize)]
        struct Doc {
            itemsets: Vec<Vec<String>>,
        }
        return json_string(&Doc { itemsets: sets });
    }
    let mut out = String::new();
    for s in sets {
        let _ = writeln!(out, "{{{}}}", s.join(" "));
    }
    out
}

fn grade_cell(g: Option<f64>) -> String {
    g.map_or_else(|| "-".to_string(), |v| v.to_string())
}

pub fn render_graded(lattice: &GradedLattice, json: bool) -> String {
    let doc = graded_document(lattice);
    if json {
        return json_string(&doc);
    }
    let mut out = String::new();
    let _ = writeln!(out, "# theta = {}", lattice.theta);
    let _ = writeln!(out, "# r s | extent | intent");
    for c in &doc.concepts {
        let [r, s] = c.grade.unwrap_or([None, None]);
        let _ = writeln!(
            out,
            "{} {} | {}",
            grade_cell(r),
            grade_cell(s),
            concept_line(&c.extent, &c.intent)
        );
    }
    let chain: Vec<String> = doc.chain.unwrap_or_default().iter().map(f64::to_string).collect();
    let _ = writeln!(out, "chain {}", chain.join(" "));
    out
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Nodes `c0..cN` in lectic order, edges from subconcept to superconcept.
pub fn render_dot(ctx: &FormalContext, lattice: &ConceptLattice) -> String {
    let mut out = String::from("digraph concepts {\n    rankdir=BT;\n");
    for (i, c) in lattice.concepts.iter().enumerate() {
        let label = concept_line(
            &names(object_names(ctx, &c.extent)),
            &names(attribute_names(ctx, &c.intent)),
        );
        let _ = writeln!(out, "    c{i} [label=\"{}\"];", dot_escape(&label));
    }
    let mut covers = lattice.covers.clone();
    covers.sort_unstable();
    for (lower, upper) in covers {
        let _ = writeln!(out, "    c{lower} -> c{upper};");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone)]
pub struct SeedSummary {
    pub seed: Vector,
    pub report: FixedPointReport,
}

#[derive(Debug, Clone)]
pub struct IterationRun {
    pub k: f64,
    pub seeds: Vec<SeedSummary>,
    /// Index into `seeds` of the seed farthest from the origin.
    pub detailed: usize,
}

/// Iterates `x ↦ k·x`, `k` the smallest positive degree, from every cell at
/// or above `theta`.
pub fn iterate_contraction(
    mv: &ManyValuedContext,
    theta: f64,
    tol: f64,
    max_iter: usize,
) -> Result<IterationRun, GradedError> {
    let k = mv.min_positive().ok_or(GradedError::AllZero)?;
    let spec = crate::ball_domain::ContractionSpec::scaling(2, k)?;
    let cells = embed_cells(mv, theta)?;
    if cells.is_empty() {
        return Err(GradedError::UndefinedGrade("seed set"));
    }
    let mut seeds = Vec::with_capacity(cells.len());
    for cell in cells {
        let report = iterate_fixed_point(&spec, &cell.point, tol, max_iter)?;
        seeds.push(SeedSummary {
            seed: cell.point,
            report,
        });
    }
    let detailed = (0..seeds.len())
        .max_by(|&a, &b| norm(&seeds[a].seed, Norm::Max).total_cmp(&norm(&seeds[b].seed, Norm::Max)))
        .unwrap_or(0);
    Ok(IterationRun { k, seeds, detailed })
}

/// Rounds to the decimal precision of `tol`, which the certified bound
/// guarantees.
fn certified_display(v: &Vector, tol: f64) -> String {
    let digits = (-tol.log10()).ceil().clamp(0.0, 17.0) as usize;
    let parts: Vec<String> = v
        .components()
        .iter()
        .map(|c| {
            let rounded: f64 = format!("{c:.digits$}").parse().unwrap_or(*c);
            // no "-0"
            (rounded + 0.0).to_string()
        })
        .collect();
    format!("({})", parts.join(", "))
}

pub fn render_iteration(run: &IterationRun, tol: f64, json: bool) -> String {
    let detailed = &run.seeds[run.detailed];
    if json {
        #[derive(Serialize)]
        struct SeedDoc<'a> {
            seed: &'a [f64],
            fixed_point: &'a [f64],
            steps: usize,
            certified_bound: f64,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            k: f64,
            tol: f64,
            seed: &'a [f64],
            fixed_point: &'a [f64],
            steps: usize,
            certified_bound: f64,
            bounds: &'a [f64],
            seeds: Vec<SeedDoc<'a>>,
        }
        let r = &detailed.report;
        return json_string(&Doc {
            k: run.k,
            tol,
            seed: detailed.seed.components(),
            fixed_point: r.fixed_point.components(),
            steps: r.steps,
            certified_bound: r.certified_bound,
            bounds: &r.bounds,
            seeds: run
                .seeds
                .iter()
                .map(|s| SeedDoc {
                    seed: s.seed.components(),
                    fixed_point: s.report.fixed_point.components(),
                    steps: s.report.steps,
                    certified_bound: s.report.certified_bound,
                })
                .collect(),
        });
    }

    let mut out = String::new();
    let _ = writeln!(out, "k = {}", run.k);
    for s in &run.seeds {
        let _ = writeln!(
            out,
            "seed {} -> {} steps = {} bound = {:e}",
            s.seed,
            certified_display(&s.report.fixed_point, tol),
            s.report.steps,
            s.report.certified_bound
        );
    }
    let r = &detailed.report;
    let _ = writeln!(out, "# iterates from seed {}", detailed.seed);
    for (n, (ball, bound)) in r.iterates.items().iter().zip(&r.bounds).enumerate() {
        let _ = writeln!(
            out,
            "step {n}: x = {} radius = {:e} bound = {:e}",
            ball.center, ball.radius, bound
        );
    }
    let _ = writeln!(
        out,
        "fixed point {} k = {} steps = {} bound = {:e}",
        certified_display(&r.fixed_point, tol),
        run.k,
        r.steps,
        r.certified_bound
    );
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::health_center;

    #[test]
    fn certified_display_rounds_to_tolerance() {
        let v = Vector::new(vec![4e-10, -3e-12]).unwrap();
        assert_eq!(certified_display(&v, 1e-9), "(0, 0)");
        let w = Vector::new(vec![1.9999999999999]).unwrap();
        assert_eq!(certified_display(&w, 1e-6), "(2)");
    }

    #[test]
    fn config_validation() {
        let mut c = RunConfig::new(Command::Concepts, "x.csv");
        assert!(matches!(c.validate(), Err(CliError::Usage(_))));
        c.theta = Some(0.5);
        assert!(c.validate().is_ok());
        c.tol = 0.0;
        assert!(c.validate().is_err());
        let mut d = RunConfig::new(Command::Iterate, "x.csv");
        assert!(d.validate().is_ok());
        d.max_iter = 0;
        assert!(d.validate().is_err());
        let mut e = RunConfig::new(Command::ExportDot, "x.cxt");
        e.emit_json = true;
        assert!(e.validate().is_err());
        assert_eq!(RunConfig::new(Command::Concepts, "a.CSV").resolved_format(), Format::Csv);
        assert_eq!(RunConfig::new(Command::Concepts, "a.cxt").resolved_format(), Format::Cxt);
    }

    #[test]
    fn iteration_detail_follows_farthest_seed() {
        let run = iterate_contraction(&health_center(), 0.0, 1e-9, 100).unwrap();
        assert_eq!(run.seeds.len(), 16);
        assert_eq!(run.seeds[run.detailed].seed.components(), [4.0, 4.0]);
        let text = render_iteration(&run, 1e-9, false);
        assert!(text.lines().last().unwrap().starts_with("fixed point (0, 0) k = 0.1 "));
    }

    #[test]
    fn graded_text_marks_undefined_grades() {
        let lattice = graded_lattice(&health_center(), 0.5).unwrap();
        let text = render_graded(&lattice, false);
        assert!(text.contains("- 4 | P1 P2 P3 P4 | \n"));
        assert!(text.contains("4 - |  | S1 S2 S3 S4\n"));
        assert!(text.ends_with("chain 1 4\n"));
    }
}
