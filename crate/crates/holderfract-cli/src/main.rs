use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use holderfract::analysis::{exponent_scan, holder_constant_estimate_threads, ScanThresholds};
use holderfract::arc::{arc_parameterize, detect_branching, snowflake_ifs, turning_scan, Branching, DiamondSpec};
use holderfract::carpets::{carpet_connectivity_precheck, carpet_dimensions, sponge_ifs_lifted, sponge_parameterize, SpongeSpec};
use holderfract::gallery::{self, GallerySystem};
use holderfract::geometry::{connectedness_check, Connectedness};
use holderfract::holder::{holder_path, parameterize, SampledCurve};
use holderfract::ifs::IfsSystem;
use holderfract::oracle::{AdjacencyOracle, ExactRule};
use holderfract::remes::{remes_parameterize, validate_sosc};
use holderfract::word::{word_cut, Word};
use holderfract::Error;

#[derive(Parser)]
#[command(name = "holderfract", version, about = "Hölder parameterizations of IFS attractors")]
struct Cli {
    /// Directory for CSV/SVG/JSON outputs (created if missing).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for the pair estimators; results do not depend on it.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Accepted for interface stability; every algorithm is deterministic.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// IFS file (JSON), or a carpet spec for `carpet`/`sponge`.
    file: Option<PathBuf>,
    /// Use a gallery system instead of a file.
    #[arg(long)]
    gallery: Option<String>,
    /// Adjacency oracle; defaults to the gallery's exact rule, else the cover test.
    #[arg(long, value_enum)]
    oracle: Option<OracleKind>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    /// Numerical cover test.
    Approx,
    /// The exact rule registered for a gallery system.
    Exact,
    /// Consecutive pieces of an arc meet, others are disjoint.
    ArcChain,
    /// Gasket-type vertex swap.
    VertexSwap,
}

#[derive(Subcommand)]
enum Command {
    /// Similarity dimension.
    Dim(Source),
    /// The cut A*(delta).
    Cut {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        delta: f64,
    },
    /// Connectedness verdict.
    Connect(Source),
    /// Hölder path between two points of the attractor.
    Path {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_point)]
        from: Point,
        #[arg(long, value_parser = parse_point)]
        to: Point,
        #[arg(long, default_value_t = 6)]
        m: usize,
    },
    /// Whole-attractor parameterization for an exponent alpha > s.
    Param {
        #[command(flatten)]
        src: Source,
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 3)]
        depth: usize,
    },
    /// Arc parameterization of a non-branching attractor.
    Arc {
        #[command(flatten)]
        src: Source,
        #[arg(long, default_value_t = 5)]
        depth: usize,
        /// Also report bounded-turning estimates up to this depth.
        #[arg(long)]
        turning: Option<usize>,
    },
    /// Builds the IFS of a chain of diamonds and writes it as an IFS file.
    Snowflake {
        /// Diamond spec file (vertices and apertures).
        file: Option<PathBuf>,
        #[arg(long)]
        gallery: Option<String>,
    },
    /// Tree-tour parameterization of a self-similar set.
    Remes {
        #[command(flatten)]
        src: Source,
        #[arg(long = "N", default_value_t = 2)]
        n: usize,
        #[arg(long, value_parser = parse_point)]
        v: Point,
        #[arg(long)]
        tau: f64,
        #[arg(long)]
        r_override: Option<f64>,
    },
    /// Dimensions and connectivity report of a carpet or sponge.
    Carpet(Source),
    /// Parameterization of a connected carpet or sponge.
    Sponge {
        #[command(flatten)]
        src: Source,
        #[arg(long = "N", default_value_t = 1)]
        n: usize,
        #[arg(long)]
        r_override: Option<f64>,
    },
    /// Empirical exponent scan over arc curves of increasing depth.
    Scan {
        #[command(flatten)]
        src: Source,
        #[arg(long, value_parser = parse_usizes)]
        depths: Depths,
        #[arg(long, value_parser = parse_point)]
        exponents: Point,
        #[arg(long, default_value_t = 1 << 22)]
        pair_budget: usize,
    },
    /// Lists the gallery, or shows one entry.
    Gallery { name: Option<String> },
}

// Aliases keep clap from treating these as repeated arguments.
type Point = Vec<f64>;
type Depths = Vec<usize>;

fn parse_point(s: &str) -> Result<Point, String> {
    s.split(',').map(|c| c.trim().parse::<f64>().map_err(|e| format!("{c:?}: {e}"))).collect()
}

fn parse_usizes(s: &str) -> Result<Depths, String> {
    s.split(',').map(|c| c.trim().parse::<usize>().map_err(|e| format!("{c:?}: {e}"))).collect()
}

/// Failures split by exit code: usage (1), validation (2), construction (3).
enum Failure {
    Usage(String),
    Lib(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Lib(Error::Parse(format!("{}: {e}", path.display()))))
}

fn gallery_entry(name: &str) -> Result<gallery::GalleryEntry, Failure> {
    gallery::entry(name).ok_or_else(|| Failure::Usage(format!("--gallery: unknown system {name:?} (try `holderfract gallery`)")))
}

fn load_system(src: &Source) -> Result<(IfsSystem, AdjacencyOracle), Failure> {
    let (system, exact) = match (&src.file, &src.gallery) {
        (Some(_), Some(_)) => return Err(Failure::Usage("give either FILE or --gallery, not both".into())),
        (None, None) => return Err(Failure::Usage("missing FILE or --gallery".into())),
        (Some(path), None) => (IfsSystem::from_json(&read(path)?)?, None),
        (None, Some(name)) => {
            let e = gallery_entry(name)?;
            (e.ifs(), e.exact_oracle)
        }
    };
    let oracle = match (src.oracle, exact) {
        (Some(OracleKind::Approx), _) | (None, None) => AdjacencyOracle::approximate(4),
        (Some(OracleKind::Exact), None) => {
            return Err(Failure::Usage("--oracle exact: no exact rule is registered for this system".into()))
        }
        (Some(OracleKind::ArcChain), _) => AdjacencyOracle::exact(ExactRule::ArcChain),
        (Some(OracleKind::VertexSwap), _) => AdjacencyOracle::exact(ExactRule::VertexSwap),
        (_, Some(o)) => o,
    };
    Ok((system, oracle))
}

fn load_sponge(src: &Source) -> Result<SpongeSpec, Failure> {
    match (&src.file, &src.gallery) {
        (Some(_), Some(_)) => Err(Failure::Usage("give either FILE or --gallery, not both".into())),
        (None, None) => Err(Failure::Usage("missing FILE or --gallery".into())),
        (Some(path), None) => Ok(SpongeSpec::from_json(&read(path)?)?),
        (None, Some(name)) => match gallery_entry(name)?.system {
            GallerySystem::Sponge(spec) => Ok(spec),
            GallerySystem::Ifs(_) => Err(Failure::Usage(format!("--gallery: {name} is not a carpet or sponge"))),
        },
    }
}

struct Output<'a> {
    dir: Option<&'a Path>,
}

impl Output<'_> {
    fn write(&self, name: &str, contents: &str) -> Outcome {
        let Some(dir) = self.dir else { return Ok(()) };
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(name);
        fs::write(&path, contents).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
    }

    fn curve(&self, stem: &str, curve: &SampledCurve) -> Outcome {
        self.write(&format!("{stem}.csv"), &curve.to_csv())?;
        if curve.x[0].len() >= 2 {
            self.write(&format!("{stem}.svg"), &curve.to_svg(None, 1.0))?;
        }
        Ok(())
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialize")
}

fn fmt_point(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.6}")).collect();
    format!("({})", parts.join(", "))
}

fn run(cli: Cli) -> Outcome {
    let out = Output { dir: cli.out.as_deref() };
    let threads = cli.threads.max(1);
    match cli.command {
        Command::Dim(src) => {
            let (system, _) = load_system(&src)?;
            println!("s = {:.5}", system.s());
        }
        Command::Cut { src, delta } => {
            let (system, _) = load_system(&src)?;
            let cut = word_cut(&system, delta, &Word::empty())?;
            let s = system.s();
            let mut csv = String::new();
            for w in &cut.words {
                csv.push_str(&format!("{w};{}\n", w.weight()));
            }
            out.write("cut.csv", &csv)?;
            println!("|A*({delta})| = {}, mass = {:.12}", cut.len(), cut.mass(s));
        }
        Command::Connect(src) => {
            let (system, oracle) = load_system(&src)?;
            let report = connectedness_check(&system, &oracle)?;
            out.write("connect.json", &json(&report))?;
            match (report.verdict, report.certified_gap) {
                (Connectedness::Disconnected, Some(gap)) => println!("Disconnected (certified, gap >= {gap:.6})"),
                (Connectedness::Disconnected, None) => println!("Disconnected"),
                (Connectedness::Connected, _) => println!("Connected"),
                (Connectedness::ConnectedLikely, _) => println!("ConnectedLikely"),
            }
        }
        Command::Path { src, from, to, m } => {
            let (system, oracle) = load_system(&src)?;
            let path = holder_path(&system, &from, &to, m, &oracle)?;
            let curve = path.curve();
            out.curve("path", &curve)?;
            println!("path with {} breakpoints, r = {}, s = {:.5}", curve.len(), path.r, path.s);
        }
        Command::Param { src, alpha, depth } => {
            let (system, oracle) = load_system(&src)?;
            let p = parameterize(&system, alpha, depth, &oracle)?;
            out.curve("param", &p.curve)?;
            println!(
                "parameterization on [0, {:.6}] with {} breakpoints, {} plateaus, alpha = {alpha}, s = {:.5}",
                p.total_length,
                p.curve.len(),
                p.plateaus.len(),
                p.s
            );
        }
        Command::Arc { src, depth, turning } => {
            let (system, oracle) = load_system(&src)?;
            let arc = arc_parameterize(&system, depth, &oracle)?;
            out.curve("arc", &arc.curve)?;
            out.write("arc_system.json", &arc.system.to_json())?;
            println!(
                "arc from {} to {}, {} pieces, {} injectivity violations",
                fmt_point(&arc.v0),
                fmt_point(&arc.v1),
                arc.words.len(),
                arc.injectivity_violations
            );
            if let Some(max) = turning {
                let depths: Vec<usize> = (1..=max).collect();
                let scan = turning_scan(&arc.system, &depths, &oracle)?;
                out.write("turning.json", &json(&scan))?;
                println!("bounded turning estimates {:?}, unbounded suspect: {}", scan.estimates, scan.unbounded_suspect);
            }
        }
        Command::Snowflake { file, gallery: name } => {
            let spec = match (file, name) {
                (Some(path), None) => DiamondSpec::from_json(&read(&path)?)?,
                (None, Some(name)) if gallery::entry(&name).map(|e| e.name) == Some("fig3-snowflake") => gallery::fig3_diamonds(),
                (None, Some(name)) => return Err(Failure::Usage(format!("--gallery: {name} has no diamond spec"))),
                _ => return Err(Failure::Usage("give exactly one of FILE or --gallery".into())),
            };
            let system = snowflake_ifs(&spec)?;
            let text = system.to_json();
            if cli.out.is_some() {
                out.write("snowflake.json", &text)?;
            } else {
                println!("{text}");
            }
            eprintln!("{} maps, s = {:.5}", system.len(), system.s());
        }
        Command::Remes { src, n, v, tau, r_override } => {
            let (system, oracle) = load_system(&src)?;
            let sosc = validate_sosc(&system, &v, tau, n, r_override)?;
            let result = remes_parameterize(&system, &sosc, n, &oracle)?;
            out.curve("remes", &result.curve)?;
            out.write("remes_report.json", &result.report.to_json())?;
            let rep = &result.report;
            println!(
                "tour of {} tree edges, {} breakpoints, r = {}, every edge twice: {}, warnings: {}",
                rep.tree_edges,
                result.curve.len(),
                rep.r,
                rep.every_edge_twice,
                rep.warnings.len()
            );
        }
        Command::Carpet(src) => {
            let spec = load_sponge(&src)?;
            let dims = carpet_dimensions(&spec);
            let mut report = serde_json::json!({ "dimensions": dims });
            if spec.dim() == 2 {
                report["connectivity"] = serde_json::to_value(carpet_connectivity_precheck(&spec)?).expect("reports serialize");
            } else {
                let system = sponge_ifs_lifted(&spec);
                let verdict = connectedness_check(&system, &AdjacencyOracle::exact(spec.exact_rule()))?.verdict;
                report["connectivity"] = serde_json::json!({ "verdict": verdict });
            }
            let text = json(&report);
            out.write("carpet.json", &text)?;
            println!("{text}");
        }
        Command::Sponge { src, n, r_override } => {
            let spec = load_sponge(&src)?;
            let res = sponge_parameterize(&spec, n, r_override)?;
            out.curve("sponge", &res.curve)?;
            if let Some(report) = &res.report {
                out.write("sponge_report.json", &report.to_json())?;
            }
            match &res.sosc {
                Some(sosc) => println!("sponge tour with {} breakpoints, v = {}, tau = {}, r = {}", res.curve.len(), fmt_point(&sosc.v), sosc.tau, sosc.r),
                None => println!("segment with {} breakpoints", res.curve.len()),
            }
        }
        Command::Scan { src, depths, exponents, pair_budget } => {
            let (system, oracle) = load_system(&src)?;
            if let Ok(report) = detect_branching(&system, 3, &oracle) {
                if report.verdict == Branching::Branching {
                    return Err(Failure::Lib(Error::BranchingInput { level: report.depth_checked }));
                }
            }
            let curves = depths
                .iter()
                .map(|&d| arc_parameterize(&system, d, &oracle).map(|a| a.curve))
                .collect::<holderfract::Result<Vec<_>>>()?;
            let table = exponent_scan(&curves, &exponents, pair_budget, ScanThresholds::default())?;
            out.write("scan.csv", &table.to_csv())?;
            for row in &table.rows {
                println!("alpha = {:.5}: {:?} {:?}", row.exponent, row.verdict, row.values);
            }
            if threads > 1 || cli.out.is_some() {
                let finest = curves.last().expect("scan has curves");
                let h = holder_constant_estimate_threads(finest, system.s(), pair_budget, threads);
                println!("finest curve Hölder(1/s) estimate = {h:.6}");
            }
        }
        Command::Gallery { name } => match name {
            Some(name) => {
                let e = gallery_entry(&name)?;
                let text = json(&serde_json::json!({
                    "name": e.name,
                    "maps": e.ifs().len(),
                    "exact_oracle": e.exact_oracle.is_some(),
                    "constants": e.constants,
                }));
                out.write(&format!("{}.json", e.name), &text)?;
                println!("{text}");
            }
            None => {
                for e in gallery::entries() {
                    let sys = e.ifs();
                    println!("{:<18} {:>3} maps  s = {:.5}", e.name, sys.len(), sys.s());
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 3 })
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
