//! The `excol` command line: `construct`, `verify`, `sweep`.
//!
//! Exit codes: 0 success; 1 a verification or sweep check failed; 2 bad
//! input (arguments, spec, center, unreadable files); 3 a mutation
//! hypothesis failed during construction.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::mutation::{Collection, Engine, MutationError};
use crate::oracle::DiskCache;
use crate::sweep;
use crate::toric::{BundleSpec, CenterSpec};
use crate::verify::certify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_BAD_INPUT: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "excol",
    version,
    about = "Exceptional collections of line bundles on toric blow-ups"
)]
pub struct Cli {
    /// Ignore the on-disk cohomology cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CodimChoice {
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Both,
}

impl CodimChoice {
    fn codims(self) -> Vec<usize> {
        match self {
            CodimChoice::Two => vec![2],
            CodimChoice::Three => vec![3],
            CodimChoice::Both => vec![2, 3],
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the collection for one bundle and center by mutation.
    Construct {
        #[arg(long)]
        base_dim: usize,
        /// Comma-separated a0,a1,...,ar with a0 = 0.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        fiber_degrees: Vec<i64>,
        /// Comma-separated ray names, e.g. b1,f1.
        #[arg(long)]
        center: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify a collection file.
    Verify {
        #[arg(long)]
        collection: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also replay the mutation log and check every recorded hypothesis.
        #[arg(long)]
        audit: bool,
    },
    /// Construct and certify every case up to a size bound.
    Sweep {
        #[arg(long)]
        max_dim: usize,
        #[arg(long, default_value_t = 2)]
        max_degree: i64,
        #[arg(long, value_enum, default_value = "both")]
        codim: CodimChoice,
    },
}

fn cache(no_cache: bool) -> Option<DiskCache> {
    (!no_cache).then(DiskCache::from_env)
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> std::io::Result<()> {
    match out {
        Some(p) => fs::write(p, format!("{text}\n")),
        None => writeln!(stdout, "{text}"),
    }
}

fn construct(
    base_dim: usize,
    fiber_degrees: Vec<i64>,
    center: &str,
    out: Option<&Path>,
    cache: Option<DiskCache>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let spec = match BundleSpec::new(base_dim, fiber_degrees) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let center = CenterSpec::parse(center);
    let engine = match Engine::with_cache(&spec, &center, cache) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "error: invalid center {center}: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let (col, code) = match engine.construct() {
        Ok(col) => (col, EXIT_OK),
        Err(f) => {
            let _ = writeln!(stderr, "error: mutation failed: {}", f.error);
            match (f.error, f.partial) {
                (MutationError::Fan(_) | MutationError::WrongCodimension(..), _) => {
                    return EXIT_BAD_INPUT
                }
                (_, Some(partial)) => (partial, EXIT_HYPOTHESIS),
                (_, None) => return EXIT_HYPOTHESIS,
            }
        }
    };
    if let Err(e) = emit(out, &col.to_json(), stdout) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_BAD_INPUT;
    }
    if code == EXIT_OK {
        let _ = writeln!(stderr, "{} objects: {}", col.len(), col.labels());
    }
    code
}

fn verify(
    path: &Path,
    out: Option<&Path>,
    audit: bool,
    cache: Option<DiskCache>,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(stderr, "error: cannot read {}: {e}", path.display());
            return EXIT_BAD_INPUT;
        }
    };
    let col = match Collection::from_json(&text) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(stderr, "error: {} is not a collection: {e}", path.display());
            return EXIT_BAD_INPUT;
        }
    };
    let engine = match Engine::for_collection(&col, cache) {
        Ok(e) => e,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    let report = match certify(&engine.oracle, &col, engine.blow.expected_length()) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_BAD_INPUT;
        }
    };
    if let Err(e) = emit(out, &report.to_json(), stdout) {
        let _ = writeln!(stderr, "error: cannot write output: {e}");
        return EXIT_BAD_INPUT;
    }
    let mut ok = report.all_pass();
    if audit {
        if let Err(e) = engine.audit(&col) {
            let _ = writeln!(stderr, "audit failed: {e}");
            ok = false;
        }
    }
    let _ = writeln!(
        stderr,
        "exceptional={} semiorthogonal={} strong={} gram_unimodular={} length={}/{} violations={}",
        report.exceptional,
        report.semiorthogonal,
        report.strong,
        report.gram_unimodular,
        report.length_actual,
        report.length_expected,
        report.violations.len()
    );
    if ok {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn run_sweep(
    max_dim: usize,
    max_degree: i64,
    codim: CodimChoice,
    cache: Option<DiskCache>,
    stdout: &mut dyn Write,
) -> i32 {
    let results = sweep::run(max_dim, max_degree, &codim.codims(), cache);
    if results.is_empty() {
        let _ = writeln!(
            stdout,
            "no cases: no valid centers of the requested codimension in this range"
        );
        return EXIT_OK;
    }
    for r in &results {
        let _ = writeln!(stdout, "{}", r.row());
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    let _ = writeln!(
        stdout,
        "{} cases, {} passed, {} failed",
        results.len(),
        results.len() - failed.len(),
        failed.len()
    );
    if failed.is_empty() {
        EXIT_OK
    } else {
        for r in failed {
            let _ = writeln!(
                stdout,
                "failed: s={} a={:?} center={}",
                r.spec.s, r.spec.fiber_degrees, r.center
            );
        }
        EXIT_CHECK_FAILED
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_BAD_INPUT
            } else {
                EXIT_OK
            };
            let _ = write!(stderr, "{}", e.render());
            return code;
        }
    };
    let cache = cache(cli.no_cache);
    match cli.command {
        Command::Construct {
            base_dim,
            fiber_degrees,
            center,
            out,
        } => construct(
            base_dim,
            fiber_degrees,
            &center,
            out.as_deref(),
            cache,
            stdout,
            stderr,
        ),
        Command::Verify {
            collection,
            out,
            audit,
        } => verify(&collection, out.as_deref(), audit, cache, stdout, stderr),
        Command::Sweep {
            max_dim,
            max_degree,
            codim,
        } => run_sweep(max_dim, max_degree, codim, cache, stdout),
    }
}
