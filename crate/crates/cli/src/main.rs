//! `moufang`: seeded verification runs and data export for the Moufang loop
//! toolkit.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use moufang_core::algebra::{basis_table, MAX_LEVEL};
use moufang_core::birep::{check_sampled, BirepSamples};
use moufang_core::chart::LoopChart;
use moufang_core::suite::{
    emit_report, export_mul_table, export_structure_constants, export_structure_functions, run_suite,
    CheckKind, CheckRecord, DiffMode, LoopKind, OutputFormat, Report, RunConfig,
};

#[derive(Parser)]
#[command(name = "moufang", version, about = "Numerical checks for analytic Moufang loops")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the selected checks and print a report
    Verify(VerifyArgs),
    /// Write a multiplication table or bracket tensor as JSON
    Export(ExportArgs),
    /// Print a basis multiplication table, or render a saved JSON report
    Table(TableArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// JSON file mirroring the run configuration; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "loop", value_parser = parse::<LoopKind>)]
    loop_kind: Option<LoopKind>,
    /// Comma-separated subset of checks, `all`, or `none`
    #[arg(long, value_delimiter = ',')]
    checks: Option<Vec<String>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sampling radius in (0, 0.7]
    #[arg(long)]
    radius: Option<f64>,
    /// Scales every non-witness threshold by tol / 1e-8
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_parser = parse::<DiffMode>)]
    diff: Option<DiffMode>,
    #[arg(long, value_parser = parse::<OutputFormat>)]
    format: Option<OutputFormat>,
    /// Use basis tuples instead of random tangent vectors
    #[arg(long)]
    exhaustive_basis: bool,
    /// Sampled birepresentation table `{r, n, samples: [{g, S, T}]}` to check
    /// against the loop's multiplication
    #[arg(long)]
    birep_file: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    MulTable,
    StructureConstants,
    StructureFunctions,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(value_enum)]
    what: What,
    #[arg(long = "loop", value_parser = parse::<LoopKind>, default_value = "octonion")]
    loop_kind: LoopKind,
    /// Base point for structure functions, e.g. `0.1,0,0`
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Option<Vec<f64>>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[arg(long = "loop", value_parser = parse::<LoopKind>, conflicts_with_all = ["level", "report"])]
    loop_kind: Option<LoopKind>,
    /// Cayley-Dickson level 1..=4 (4 gives the sedenions)
    #[arg(long, conflicts_with = "report")]
    level: Option<u32>,
    /// Saved JSON report to render as a table
    #[arg(long)]
    report: Option<PathBuf>,
}

fn parse<T: std::str::FromStr<Err = moufang_core::Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: moufang_core::Error| e.to_string())
}

/// Errors that map to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl std::fmt::Display) -> anyhow::Error {
    Usage(e.to_string()).into()
}

/// Core errors caused by the caller's input rather than by a computation.
fn classify(e: moufang_core::Error) -> anyhow::Error {
    use moufang_core::Error as E;
    match e {
        E::ChartDomain(_) | E::Config(_) | E::Dimension { .. } | E::UnsupportedLevel(_) => usage(e),
        other => other.into(),
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path)
        .with_context(|| format!("read {}", path.display()))
        .map_err(|e| usage(format!("{e:#}")))
}

fn write_out(output: Option<&Path>, text: &str) -> anyhow::Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_checks(items: &[String]) -> anyhow::Result<Vec<CheckKind>> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        match item {
            "all" => out.extend(CheckKind::ALL),
            "none" => {}
            name => out.push(name.parse().map_err(classify)?),
        }
    }
    Ok(out)
}

fn build_config(args: &VerifyArgs) -> anyhow::Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_json(&read(path)?).map_err(classify)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.loop_kind {
        cfg.loop_kind = v;
    }
    if let Some(v) = &args.checks {
        cfg.checks = parse_checks(v)?;
    }
    if let Some(v) = args.samples {
        cfg.samples = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = args.radius {
        cfg.radius = v;
    }
    if let Some(v) = args.tol {
        cfg.tol = v;
    }
    if let Some(v) = args.diff {
        cfg.diff = v;
    }
    if let Some(v) = args.format {
        cfg.format = v;
    }
    cfg.exhaustive_basis |= args.exhaustive_basis;
    cfg.validate().map_err(classify)?;
    Ok(cfg)
}

fn sampled_records(cfg: &RunConfig, path: &Path) -> anyhow::Result<Vec<CheckRecord>> {
    let table = BirepSamples::from_json(&read(path)?).map_err(classify)?;
    let chart = LoopChart::new(cfg.loop_kind.level()).map_err(classify)?;
    let res = check_sampled(&chart, &table).map_err(classify)?;
    if res.pairs_checked == 0 {
        eprintln!("warning: no sample pair in {} has both products tabulated", path.display());
    }
    let t = cfg.scaled(1e-12);
    let mut out = vec![
        CheckRecord::from_residuals("birep.sampled-left", &[res.max_left], t, false),
        CheckRecord::from_residuals("birep.sampled-right", &[res.max_right], t, false),
    ];
    for r in out.iter_mut() {
        r.samples = res.pairs_checked;
    }
    if let Some(u) = res.unit {
        out.push(CheckRecord::from_residuals("birep.sampled-unit", &[u], t, false));
    }
    Ok(out)
}

fn verify(args: &VerifyArgs) -> anyhow::Result<bool> {
    let cfg = build_config(args)?;
    let mut report = run_suite(&cfg).map_err(classify)?;
    if let Some(path) = &args.birep_file {
        report.checks.extend(sampled_records(&cfg, path)?);
    }
    report
        .meta
        .versions
        .insert(env!("CARGO_PKG_NAME").into(), env!("CARGO_PKG_VERSION").into());
    write_out(args.output.as_deref(), &emit_report(&report, cfg.format))?;
    for f in report.failures() {
        eprintln!(
            "failed: {} (max {:.3e}, threshold {:.3e})",
            f.name, f.max_residual, f.threshold
        );
    }
    Ok(report.passed())
}

fn export(args: &ExportArgs) -> anyhow::Result<()> {
    let text = match args.what {
        What::MulTable => export_mul_table(args.loop_kind),
        What::StructureConstants => export_structure_constants(args.loop_kind),
        What::StructureFunctions => {
            let Some(at) = &args.at else {
                return Err(usage("structure-functions needs --at g1,g2,..."));
            };
            export_structure_functions(args.loop_kind, at)
        }
    }
    .map_err(classify)?;
    write_out(args.output.as_deref(), &text)
}

fn unit_label(sign: i8, m: usize) -> String {
    let s = if sign < 0 { "-" } else { "+" };
    if m == 0 {
        format!("{s}1")
    } else {
        format!("{s}e{m}")
    }
}

fn mul_table_text(level: u32) -> anyhow::Result<String> {
    let table = basis_table(level).map_err(classify)?;
    let n = table.dim();
    let width = 2 + n.to_string().len() + 1;
    let mut out = String::new();
    let _ = write!(out, "{:>width$}", "");
    for j in 0..n {
        let _ = write!(out, " {:>width$}", if j == 0 { "1".into() } else { format!("e{j}") });
    }
    out.push('\n');
    for i in 0..n {
        let _ = write!(out, "{:>width$}", if i == 0 { "1".into() } else { format!("e{i}") });
        for j in 0..n {
            let (sign, m) = table.product(i, j);
            let _ = write!(out, " {:>width$}", unit_label(sign, m));
        }
        out.push('\n');
    }
    Ok(out)
}

fn table(args: &TableArgs) -> anyhow::Result<()> {
    if let Some(path) = &args.report {
        let report = Report::from_json(&read(path)?).map_err(classify)?;
        return write_out(None, &emit_report(&report, OutputFormat::Table));
    }
    let level = match (args.loop_kind, args.level) {
        (Some(k), _) => k.level(),
        (None, Some(l)) if (1..=MAX_LEVEL).contains(&l) => l,
        (None, Some(l)) => return Err(usage(format!("level {l} not in 1..={MAX_LEVEL}"))),
        (None, None) => LoopKind::Octonion.level(),
    };
    write_out(None, &mul_table_text(level)?)
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Export(a) => export(a).map(|()| true),
        Command::Table(a) => table(a).map(|()| true),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use anyhow::bail;

    #[test]
    fn checks_list() {
        let v = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(parse_checks(&v(&["none"])).unwrap(), vec![]);
        assert_eq!(parse_checks(&v(&["all"])).unwrap().len(), 9);
        assert_eq!(
            parse_checks(&v(&["gle", " lie-cartan"])).unwrap(),
            vec![CheckKind::Gle, CheckKind::LieCartan]
        );
        assert!(parse_checks(&v(&["bogus"])).unwrap_err().downcast_ref::<Usage>().is_some());
    }

    #[test]
    fn table_text() {
        let t = mul_table_text(2).unwrap();
        assert_eq!(t.lines().count(), 5);
        let row1: Vec<&str> = t.lines().nth(2).unwrap().split_whitespace().collect();
        assert_eq!(row1, ["e1", "+e1", "-1", "+e3", "-e2"]);
    }

    #[test]
    fn bail_is_not_usage() {
        let e: anyhow::Error = (|| -> anyhow::Result<()> { bail!("x") })().unwrap_err();
        assert!(e.downcast_ref::<Usage>().is_none());
    }
}
