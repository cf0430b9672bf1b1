use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mforge_core::form::FormSpec;
use mforge_core::geometry::PolarSpace;
use mforge_core::report::{all_passed, from_jsonl, summarize, summary_table, to_jsonl, VerificationReport};
use mforge_core::suite::{run_suite, space_label, Suite, SuiteOptions};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser)]
#[command(name = "mforge", version, about = "Build polar space caches and verify root elation constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate a polar space and write its geom/1 cache.
    Build {
        #[command(flatten)]
        space: SpaceArgs,
        /// Cache path; defaults to <space>-q<q>.geom.json in the working directory.
        #[arg(long, env = "MFORGE_OUT")]
        out: Option<PathBuf>,
    },
    /// Run a verification suite and emit report/1 JSON lines.
    Verify {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, value_enum, default_value = "all", env = "MFORGE_SUITE")]
        suite: SuiteArg,
        #[arg(long, default_value_t = 1, env = "MFORGE_SEED")]
        seed: u64,
        /// Sampled quadrangle roots per suite when q > 2.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..), env = "MFORGE_SAMPLES")]
        samples: u64,
        /// Extension configurations per kind.
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..), env = "MFORGE_CONFIGS")]
        configs: u64,
        /// Group closure cap.
        #[arg(long, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..), env = "MFORGE_CAP")]
        cap: u64,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0, env = "MFORGE_JOBS")]
        jobs: usize,
        #[arg(long, value_enum, default_value = "text", env = "MFORGE_FORMAT")]
        format: Format,
        /// JSON lines output path.
        #[arg(long, env = "MFORGE_OUT")]
        out: Option<PathBuf>,
        /// Load the geometry from a cache instead of enumerating it.
        #[arg(long, env = "MFORGE_CACHE")]
        cache: Option<PathBuf>,
    },
    /// Summarize a report file.
    Report {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "text", env = "MFORGE_FORMAT")]
        format: Format,
    },
}

#[derive(Args)]
struct SpaceArgs {
    #[arg(long, value_enum, default_value = "w5", env = "MFORGE_SPACE")]
    space: Space,
    #[arg(long, default_value_t = 2, value_parser = parse_q, env = "MFORGE_Q")]
    q: u8,
}

fn parse_q(s: &str) -> Result<u8, String> {
    match s.parse::<u8>() {
        Ok(q @ (2 | 3 | 5)) => Ok(q),
        _ => Err(format!("unsupported field order {s}; expected 2, 3 or 5")),
    }
}

impl SpaceArgs {
    fn form(&self) -> FormSpec {
        match self.space {
            Space::W5 => FormSpec::symplectic(self.q),
            Space::Q6 => FormSpec::parabolic(self.q),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Space {
    W5,
    Q6,
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Axioms,
    GqElations,
    Extensions,
    Moufang,
    Corollaries,
    H3,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Axioms => Suite::Axioms,
            SuiteArg::GqElations => Suite::GqElations,
            SuiteArg::Extensions => Suite::Extensions,
            SuiteArg::Moufang => Suite::Moufang,
            SuiteArg::Corollaries => Suite::Corollaries,
            SuiteArg::H3 => Suite::H3,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn load(space: &SpaceArgs, cache: Option<&Path>) -> Result<PolarSpace, String> {
    match cache {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let g = PolarSpace::from_cache_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
            if g.q() != space.q || g.form().spec() != &space.form() {
                return Err(format!("{}: cache holds {}, not the requested space", path.display(), space_label(&g)));
            }
            Ok(g)
        }
        None => PolarSpace::build(&space.form()).map_err(|e| e.to_string()),
    }
}

fn print_summary(reports: &[VerificationReport], format: Format) {
    match format {
        Format::Text => print!("{}", summary_table(reports)),
        Format::Json => {
            let failures: Vec<&VerificationReport> = reports.iter().filter(|r| !r.passed()).collect();
            let v = serde_json::json!({ "reports": reports.len(), "claims": summarize(reports), "failures": failures });
            println!("{}", serde_json::to_string_pretty(&v).expect("summary serializes"));
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Build { space, out } => {
            let g = match PolarSpace::build(&space.form()) {
                Ok(g) => g,
                Err(e) => return usage(e),
            };
            let path = out.unwrap_or_else(|| PathBuf::from(format!("{}.geom.json", space_label(&g))));
            if let Err(e) = std::fs::write(&path, g.to_cache_json()) {
                return usage(format!("{}: {e}", path.display()));
            }
            println!(
                "{}: {} points, {} lines, {} planes -> {}",
                space_label(&g),
                g.num_points(),
                g.num_lines(),
                g.num_planes(),
                path.display()
            );
            ExitCode::SUCCESS
        }
        Command::Verify {
            space,
            suite,
            seed,
            samples,
            configs,
            cap,
            jobs,
            format,
            out,
            cache,
        } => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
                return usage(e);
            }
            let suite = Suite::from(suite);
            let geom = if suite.needs_geometry() {
                match load(&space, cache.as_deref()) {
                    Ok(g) => Some(g),
                    Err(e) => return usage(e),
                }
            } else {
                None
            };
            let opts = SuiteOptions {
                seed,
                samples: samples as usize,
                configs: configs as usize,
                cap: cap as usize,
            };
            let reports = run_suite(geom.as_ref(), suite, &opts);
            if let Some(path) = &out {
                if let Err(e) = std::fs::write(path, to_jsonl(&reports)) {
                    return usage(format!("{}: {e}", path.display()));
                }
            }
            print_summary(&reports, format);
            if all_passed(&reports) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Command::Report { path, format } => {
            let reports = match std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|s| from_jsonl(&s).map_err(|e| e.to_string()))
            {
                Ok(r) => r,
                Err(e) => return usage(format!("{}: {e}", path.display())),
            };
            print_summary(&reports, format);
            if all_passed(&reports) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}
