use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};

use wonder_core::diagram::BurrowDiagram;
use wonder_core::duality::{block_structure_check, discrepancy_table, pd_equivalence_report, ring_discrepancies};
use wonder_core::engine::{build_ring, EngineOptions, DEFAULT_MAX_REWRITES};
use wonder_core::format::{diagram_to_string, parse_any, ring_to_string, AnyFile, RingData};
use wonder_core::models::{
    broken_burrow_fixture, fm_power, keel_model, p2_point_fixture, synthetic_diagram, DiagonalFlag, Fiber,
};
use wonder_core::nest::{li_decomposition, render_decomposition};
use wonder_core::oracle::{compare_with_oracle, named_script, run as run_oracle, script_to_string, OracleScript};
use wonder_core::presentation::presentation_report;
use wonder_core::{Error, Result};

#[derive(Parser)]
#[command(name = "wonder", version, about = "Intersection rings of wonderful compactifications")]
struct Cli {
    /// Rewrite steps allowed per product
    #[arg(long, global = true, env = "WONDER_MAX_REWRITES", default_value_t = DEFAULT_MAX_REWRITES)]
    max_rewrites: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a diagram, ring or oracle file
    Validate { input: Option<PathBuf> },
    /// Write a built-in diagram
    Model(ModelArgs),
    /// Build the ring of a diagram
    Build {
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the dimension vector
    Betti { input: Option<PathBuf> },
    /// Print the additive decomposition of a diagram
    Decompose { input: Option<PathBuf> },
    /// Poincaré duality verdict (with the burrow equivalence for diagrams)
    Pd(ReportArgs),
    /// Ring discrepancies against diagonal-block discrepancies
    Discrepancy(ReportArgs),
    /// Gram block structure of the pairing
    Blocks(ReportArgs),
    /// Evaluate the relation families of the presentation
    Presentation(ReportArgs),
    /// Emit a reference script (fm-p1-3, keel-2, keel-3) or run one
    Oracle {
        script: String,
        #[arg(long)]
        run: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare a diagram's ring with a reference script
    Compare { diagram: PathBuf, script: String },
}

#[derive(clap::Args)]
struct ReportArgs {
    input: Option<PathBuf>,
    /// Print the structured report instead of the table
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelKind {
    FmP1,
    FmP2,
    FmCurve,
    Keel,
    Synth,
    Point,
    Broken,
}

#[derive(clap::Args)]
struct ModelArgs {
    kind: ModelKind,
    #[arg(long, default_value_t = 3)]
    n: usize,
    /// Smallest diagonal size for the FM models
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    min_size: u8,
    /// Dimension vector of the synthetic center, e.g. 1,2,1
    #[arg(long, value_delimiter = ',', default_values_t = vec![1usize, 2, 1])]
    dims: Vec<usize>,
    /// Degree at which the synthetic center fails duality
    #[arg(long = "break")]
    break_degree: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of broken centers (1 or 2)
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    count: u8,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_input(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) if p != Path::new("-") => {
            text = std::fs::read_to_string(p).map_err(|e| Error::Invalid(format!("cannot read {}: {e}", p.display())))?;
        }
        _ => {
            std::io::stdin().read_to_string(&mut text).map_err(Error::from)?;
        }
    }
    Ok(text)
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(Error::from)
        }
    }
}

fn load(path: Option<&Path>) -> Result<AnyFile> {
    parse_any(&read_input(path)?)
}

fn checked_diagram(d: BurrowDiagram) -> Result<BurrowDiagram> {
    let report = d.validate();
    if report.passed() {
        Ok(d)
    } else {
        Err(Error::Invalid(report.summary()))
    }
}

/// A ring from a ring file, or built from a diagram file (returned alongside).
fn load_ring(path: Option<&Path>, opts: EngineOptions) -> Result<(RingData, Option<BurrowDiagram>)> {
    match load(path)? {
        AnyFile::Ring(r) => Ok((*r, None)),
        AnyFile::Diagram(d) => {
            let d = checked_diagram(*d)?;
            let ring = build_ring(&d, opts)?;
            Ok((ring.to_ring_data(), Some(d)))
        }
        AnyFile::Oracle(_) => Err(Error::Invalid("expected a diagram or ring file, got an oracle script".into())),
    }
}

fn load_diagram(path: Option<&Path>) -> Result<BurrowDiagram> {
    match load(path)? {
        AnyFile::Diagram(d) => checked_diagram(*d),
        _ => Err(Error::Invalid("expected a diagram file".into())),
    }
}

fn load_script(arg: &str) -> Result<OracleScript> {
    if let Ok(s) = named_script(arg) {
        return Ok(s);
    }
    match load(Some(Path::new(arg)))? {
        AnyFile::Oracle(s) => Ok(*s),
        _ => Err(Error::Invalid(format!("{arg} is not an oracle script"))),
    }
}

fn join(v: &[usize]) -> String {
    v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ")
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

fn model(args: &ModelArgs) -> Result<BurrowDiagram> {
    let flag = if args.min_size == 3 { DiagonalFlag::AtLeastThree } else { DiagonalFlag::AtLeastTwo };
    match args.kind {
        ModelKind::FmP1 => fm_power(Fiber::P1, args.n, flag),
        ModelKind::FmP2 => fm_power(Fiber::P2, args.n, flag),
        ModelKind::FmCurve => fm_power(Fiber::Curve, args.n, flag),
        ModelKind::Keel => keel_model(args.n),
        ModelKind::Synth => {
            if let Some(k) = args.break_degree {
                let d = args.dims.len().saturating_sub(1);
                if k == 0 || k >= d {
                    return Err(Error::Invalid(format!("--break must lie strictly between 0 and {d}")));
                }
            }
            synthetic_diagram(&args.dims, args.break_degree, args.seed)
        }
        ModelKind::Point => Ok(p2_point_fixture()),
        ModelKind::Broken => broken_burrow_fixture(args.count as usize),
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    let opts = EngineOptions { max_rewrites: cli.max_rewrites };
    match &cli.command {
        Command::Validate { input } => {
            match load(input.as_deref())? {
                AnyFile::Diagram(d) => {
                    let report = d.validate();
                    if !report.passed() {
                        eprint!("{}", report.summary());
                        return Ok(1);
                    }
                    write_output(None, &format!("diagram ok: {} checks passed\n", report.entries.len()))?;
                }
                AnyFile::Ring(r) => {
                    r.algebra.check_associativity().map_err(Error::Invalid)?;
                    write_output(None, &format!("ring ok: dims {}\n", join(&r.algebra.dims())))?;
                }
                AnyFile::Oracle(s) => {
                    let run = run_oracle(&s)?;
                    write_output(None, &format!("oracle ok: {} steps, dims {}\n", s.steps.len(), join(&run.dims())))?;
                }
            }
            Ok(0)
        }
        Command::Model(args) => {
            let d = model(args)?;
            write_output(args.out.as_deref(), &diagram_to_string(&d))?;
            Ok(0)
        }
        Command::Build { input, out } => {
            let d = load_diagram(input.as_deref())?;
            let ring = build_ring(&d, opts)?;
            write_output(out.as_deref(), &ring_to_string(&ring.to_ring_data()))?;
            Ok(0)
        }
        Command::Betti { input } => {
            let dims = match load(input.as_deref())? {
                AnyFile::Ring(r) => r.algebra.dims(),
                AnyFile::Diagram(d) => li_decomposition(&checked_diagram(*d)?).poincare,
                AnyFile::Oracle(s) => run_oracle(&s)?.dims(),
            };
            write_output(None, &format!("{}\n", join(&dims)))?;
            Ok(0)
        }
        Command::Decompose { input } => {
            let d = load_diagram(input.as_deref())?;
            write_output(None, &render_decomposition(&d, &li_decomposition(&d)))?;
            Ok(0)
        }
        Command::Pd(args) => {
            let (ring, diagram) = load_ring(args.input.as_deref(), opts)?;
            let line = match ring_discrepancies(&ring) {
                Ok(v) => {
                    let pd = v.iter().all(|&x| x == 0);
                    format!("PD: {}; discrepancies: {}\n", if pd { "yes" } else { "no" }, join(&v))
                }
                Err(f) => format!("PD: no; {f}\n"),
            };
            let Some(d) = diagram else {
                write_output(None, &line)?;
                return Ok(0);
            };
            let report = pd_equivalence_report(&d, &ring);
            if args.json {
                write_output(None, &json(&report))?;
            } else {
                write_output(None, &format!("{line}{}", report.render()))?;
            }
            Ok(if report.holds { 0 } else { 3 })
        }
        Command::Discrepancy(args) => {
            let (ring, _) = load_ring(args.input.as_deref(), opts)?;
            let table = discrepancy_table(&ring);
            write_output(None, &if args.json { json(&table) } else { table.render(&ring) })?;
            Ok(if table.certified && !table.sums_match { 3 } else { 0 })
        }
        Command::Blocks(args) => {
            let (ring, _) = load_ring(args.input.as_deref(), opts)?;
            let report = block_structure_check(&ring);
            write_output(None, &if args.json { json(&report) } else { report.render(&ring) })?;
            Ok(if report.violations.is_empty() { 0 } else { 3 })
        }
        Command::Presentation(args) => {
            let d = load_diagram(args.input.as_deref())?;
            let ring = build_ring(&d, opts)?;
            let report = presentation_report(&ring)?;
            write_output(None, &if args.json { json(&report) } else { report.render() })?;
            Ok(if report.all_vanish() { 0 } else { 2 })
        }
        Command::Oracle { script, run, out } => {
            let is_named = named_script(script).is_ok();
            let s = load_script(script)?;
            if is_named && !run {
                write_output(out.as_deref(), &script_to_string(&s))?;
                return Ok(0);
            }
            let r = run_oracle(&s)?;
            let mut text = format!("dims: {}\n", join(&r.dims()));
            match &r.verdict {
                Some(v) => text.push_str(&format!(
                    "PD: {}; discrepancies: {}\n",
                    if v.is_pd { "yes" } else { "no" },
                    join(&v.discrepancy_vector())
                )),
                None => text.push_str("PD: no; no one-dimensional socle\n"),
            }
            let mut ok = true;
            for (label, rep) in &r.reports {
                ok &= rep.ok();
                text.push_str(&format!(
                    "{label}: inputs {} -> output {}; equivalence {}\n",
                    rep.inputs_pd
                        .iter()
                        .map(|(n, p)| format!("{n}={}", if *p { "PD" } else { "non-PD" }))
                        .collect::<Vec<_>>()
                        .join(" "),
                    if rep.output_pd { "PD" } else { "non-PD" },
                    if rep.equivalence_holds { "holds" } else { "VIOLATED" }
                ));
            }
            write_output(out.as_deref(), &text)?;
            Ok(if ok { 0 } else { 3 })
        }
        Command::Compare { diagram, script } => {
            let d = load_diagram(Some(diagram))?;
            let s = load_script(script)?;
            if &s.ambient != d.ambient_algebra() {
                return Err(Error::Invalid("script and diagram have different ambient rings".into()));
            }
            let ring = build_ring(&d, opts)?;
            let cmp = compare_with_oracle(&ring, &run_oracle(&s)?)?;
            write_output(None, &format!("{}\n", cmp.summary()))?;
            Ok(if cmp.agrees() { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            eprint!("{rendered}");
            if !rendered.contains("Usage:") {
                eprintln!("\n{}", Cli::command().render_usage());
            }
            return ExitCode::from(1);
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
