//! Command-line surface for tropicurve.
//!
//! Exit codes: 0 success or a passing certificate, 1 a certified negative
//! answer (the curve is not smooth or not balanced), 2 bad input, 3 a search
//! or budget failure inside a pipeline.

pub mod svg;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use tropicurve::curve::{SingularReason, TropicalCurve};
use tropicurve::io;
use tropicurve::rational::parse_rational;
use tropicurve::synthesis::{fully_faithful_pipeline, smoothing_pipeline, tate_demo, PipelineOptions};
use tropicurve::tropicalize::{tropicalize, Embedding};
use tropicurve::Error;

#[derive(Debug, Parser)]
#[command(name = "tropicurve", version, about = "Exact tropical curves from skeleta and PL coordinates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a curve for balancing and smoothness.
    Lint(Io),
    /// Tropicalize an embedding to a curve.
    Tropicalize(Render),
    /// Refine an embedding until it is fully faithful.
    Faithfulize(Refine),
    /// Refine an embedding until its tropicalization is smooth.
    Smooth(Refine),
    /// The Tate curve example with parameter `c`.
    DemoTate(Demo),
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input document.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Output document; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct Render {
    #[command(flatten)]
    pub io: Io,
    /// Also draw the curve as SVG.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    /// Coordinates for the drawing, as `i,j`.
    #[arg(long, default_value = "0,1")]
    pub proj: String,
}

#[derive(Debug, Args)]
pub struct Refine {
    #[command(flatten)]
    pub render: Render,
    /// Where to write the pipeline report; standard error when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Maximum number of edge-function rounds.
    #[arg(long, default_value_t = 64)]
    pub budget: usize,
    /// `auto` for the pruned core, or a core document listing edge ids.
    #[arg(long, default_value = "auto")]
    pub core: String,
}

#[derive(Debug, Args)]
pub struct Demo {
    /// Edge length parameter, a positive rational.
    #[arg(default_value = "1")]
    pub c: String,
    /// Where to write the embedding.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Where to write the curve.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value = "0,1")]
    pub proj: String,
}

/// Failure of a command, with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn input_error(message: impl Into<String>) -> Failure {
    Failure { code: 2, message: message.into() }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PillarSearchExhausted(..)
        | Error::CertificateFailure(..)
        | Error::Stage0Failure(..)
        | Error::MonotonicityViolation(..)
        | Error::NoRoom(..)
        | Error::PillarFailure(..) => 3,
        _ => 2,
    }
}

/// What a successful command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: u8,
    /// Document for `--out`, or standard output.
    pub output: String,
    /// Human-readable summary for standard error.
    pub summary: String,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure { code: 2, message: format!("cannot write {}: {e}", path.display()) };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(fail)?;
    f.write_all(contents.as_bytes()).map_err(fail)?;
    f.sync_all().map_err(fail)?;
    fs::rename(&tmp, path).map_err(fail)
}

/// Parses `i,j` and checks it against the dimension.
pub fn parse_proj(s: &str, dim: usize) -> Result<(usize, usize), Failure> {
    let bad = || input_error(format!("--proj expects two distinct coordinates below {dim}, got {s:?}"));
    let (a, b) = s.split_once(',').ok_or_else(bad)?;
    let i: usize = a.trim().parse().map_err(|_| bad())?;
    let j: usize = b.trim().parse().map_err(|_| bad())?;
    if i == j || i >= dim || j >= dim {
        return Err(bad());
    }
    Ok((i, j))
}

fn draw(curve: &TropicalCurve, svg: &Option<PathBuf>, proj: &str) -> Result<(), Failure> {
    if let Some(path) = svg {
        let p = parse_proj(proj, curve.dim())?;
        write_atomic(path, &svg::render(curve, p))?;
    }
    Ok(())
}

fn reason_text(r: &SingularReason) -> String {
    match r {
        SingularReason::RankDefect { rank, expected } => format!("directions span rank {rank}, expected {expected}"),
        SingularReason::NotSaturated { elementary_divisors } => {
            let big: Vec<&String> = elementary_divisors.iter().filter(|d| d.as_str() != "1").collect();
            let list = big.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ");
            format!("elementary divisor {list}")
        }
        SingularReason::InfiniteValence { valence } => format!("{valence} rays meet at an infinite vertex"),
    }
}

/// Balancing and smoothness of a curve, with one certificate per vertex.
pub fn lint(curve: &TropicalCurve) -> Result<Outcome, Failure> {
    let balancing = curve.check_balancing();
    let smooth = curve.check_smooth();
    let mut vertices = Vec::new();
    for v in curve.vertices() {
        vertices.push(serde_json::to_value(curve.check_vertex_smooth(&v.id)?).expect("serializable"));
    }
    let ok = balancing.balanced && smooth.smooth;
    let body = json!({
        "smooth": smooth.smooth,
        "balanced": balancing.balanced,
        "defects": balancing.defects,
        "singular_vertices": smooth.singular_vertices,
        "heavy_edges": smooth.heavy_edges,
        "vertices": vertices,
    });
    let mut summary = String::new();
    summary.push_str(&format!("balanced: {}\nsmooth: {}\n", balancing.balanced, smooth.smooth));
    for (v, d) in &balancing.defects {
        summary.push_str(&format!("  {v}: unbalanced, weighted sum {d:?}\n"));
    }
    for s in &smooth.singular_vertices {
        summary.push_str(&format!("  {}: singular, {}\n", s.vertex, reason_text(&s.reason)));
    }
    for e in &smooth.heavy_edges {
        summary.push_str(&format!("  {e}: weight above one\n"));
    }
    Ok(Outcome { code: if ok { 0 } else { 1 }, output: io::write_document("lint_report", body), summary })
}

fn load_embedding(path: &Path) -> Result<Embedding, Failure> {
    Ok(io::parse_embedding(&read(path)?)?)
}

fn faithfulness_summary(emb: &Embedding) -> Result<String, Failure> {
    let t = tropicalize(emb)?;
    let f = t.faithfulness();
    let s = t.curve.check_smooth();
    Ok(format!(
        "dimension {}, {} vertices, {} edges\nfully faithful: {}\nsmooth: {}\n",
        emb.dim(),
        t.curve.vertices().len(),
        t.curve.edges().len(),
        f.fully_faithful,
        s.smooth
    ))
}

fn refine(args: &Refine, smooth: bool) -> Result<(Outcome, String), Failure> {
    let emb = load_embedding(&args.render.io.input)?;
    let core = match args.core.as_str() {
        "auto" => None,
        path => Some(io::parse_core(&read(Path::new(path))?)?),
    };
    let opts = PipelineOptions { budget: args.budget, core, ..Default::default() };
    let (out, report) = if smooth { smoothing_pipeline(&emb, &opts)? } else { fully_faithful_pipeline(&emb, &opts)? };
    let t = tropicalize(&out)?;
    draw(&t.curve, &args.render.svg, &args.render.proj)?;
    let summary = format!("{} steps\n{}", report.steps.len(), faithfulness_summary(&out)?);
    Ok((Outcome { code: 0, output: io::write_embedding(&out), summary }, io::write_report(&report)))
}

/// Runs one command and returns what it would print.
pub fn run(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Lint(args) => {
            let curve = match io::parse_document(&read(&args.input)?)? {
                io::Document::Curve(c) => c,
                io::Document::Embedding(e) => tropicalize(&e)?.curve,
                other => return Err(input_error(format!("expected a curve document, found a {}", other.kind()))),
            };
            lint(&curve)
        }
        Command::Tropicalize(args) => {
            let emb = load_embedding(&args.io.input)?;
            let t = tropicalize(&emb)?;
            draw(&t.curve, &args.svg, &args.proj)?;
            Ok(Outcome { code: 0, output: io::write_curve(&t.curve), summary: faithfulness_summary(&emb)? })
        }
        Command::Faithfulize(args) | Command::Smooth(args) => {
            let (outcome, report) = refine(args, matches!(cli.command, Command::Smooth(_)))?;
            match &args.report {
                Some(p) => write_atomic(p, &report)?,
                None => eprint!("{report}"),
            }
            Ok(outcome)
        }
        Command::DemoTate(args) => {
            let c = parse_rational(&args.c).map_err(|e| input_error(e.to_string()))?;
            let demo = tate_demo(&c)?;
            let curve = &demo.tropicalization.curve;
            if let Some(p) = &args.curve {
                write_atomic(p, &io::write_curve(curve))?;
            }
            draw(curve, &args.svg, &args.proj)?;
            let rays = curve.edges().iter().filter(|e| e.length.is_none()).count();
            let summary = format!("{}{rays} rays\n", faithfulness_summary(&demo.embedding)?);
            Ok(Outcome { code: 0, output: io::write_embedding(&demo.embedding), summary })
        }
    }
}

fn out_path(cli: &Cli) -> Option<&PathBuf> {
    match &cli.command {
        Command::Lint(a) => a.out.as_ref(),
        Command::Tropicalize(a) => a.io.out.as_ref(),
        Command::Faithfulize(a) | Command::Smooth(a) => a.render.io.out.as_ref(),
        Command::DemoTate(a) => a.out.as_ref(),
    }
}

/// Entry point shared by the binary and the tests.
pub fn main_with(cli: Cli) -> ExitCode {
    match run(&cli) {
        Ok(o) => {
            let written = match out_path(&cli) {
                Some(p) => write_atomic(p, &o.output),
                None => {
                    print!("{}", o.output);
                    Ok(())
                }
            };
            eprint!("{}", o.summary);
            match written {
                Ok(()) => ExitCode::from(o.code),
                Err(f) => {
                    eprintln!("error: {}", f.message);
                    ExitCode::from(f.code)
                }
            }
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
