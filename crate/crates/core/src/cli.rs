//! Command-line surface. Every subcommand writes its primary output to the
//! given writer (stdout for the binary) so runs are reproducible in-process.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::graph::{
    dictator_set, independent_sets_of_size, maximal_independent_sets, perturb, IndependentSet,
};
use crate::grid::{GridShape, DEFAULT_SIZE_CAP};
use crate::io::{load_function, load_vertex_set, save_spectrum, spectrum_to_json, vertex_set_to_json, write_atomic};
use crate::stability::{recover_independent_set, StabilityReport};
use crate::tail::{bennett_log_tail, bennett_tail, lemma33_tail, TailParams, VARIANCE_SCALE};
use crate::transform::{fast_forward, level_weights};

/// Overrides [`DEFAULT_SIZE_CAP`].
pub const SIZE_CAP_ENV: &str = "DICTATORLAB_SIZE_CAP";

/// Column order of `verify` output.
pub const VERIFY_COLUMNS: &str =
    "r,n,k,seed,epsilon,tail_weight,tail_bound,i0,j,symdiff,theorem_bound,oracle_agrees";

#[derive(Debug, Parser)]
#[command(name = "dictatorlab", version, about = "Fourier analysis on Z_r^n and stability of independent sets in K_r^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CorpusKind {
    /// Dictator sets with k vertices removed, one trial per seed.
    Perturb,
    /// Every inclusion-maximal independent set.
    Maximal,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fourier level weights of a function file.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        /// Also write the full spectrum as JSON.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Recover the nearest dictator of an independent set and report every
    /// stability quantity as JSON.
    Recover {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run recovery over a corpus and emit one CSV row per trial.
    Verify {
        #[arg(long, required_unless_present = "set")]
        r: Option<usize>,
        #[arg(long, required_unless_present = "set")]
        n: Option<usize>,
        #[arg(long, value_enum, default_value_t = CorpusKind::Perturb)]
        corpus: CorpusKind,
        /// Vertices removed from the source dictator.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Number of trials; trial seeds are seed, seed+1, ….
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Source dictator coordinate (zero-based).
        #[arg(long, default_value_t = 0)]
        coord: usize,
        #[arg(long, default_value_t = 0)]
        value: usize,
        /// Verify a single vertex-set file instead of a generated corpus.
        #[arg(long, conflicts_with_all = ["r", "n"])]
        set: Option<PathBuf>,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List independent sets of a given size (default r^{n-1}) one per line.
    Enumerate {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: Option<usize>,
        /// List inclusion-maximal sets instead of sets of a fixed size.
        #[arg(long, conflicts_with = "size")]
        maximal: bool,
        #[arg(long, default_value_t = 1_000_000)]
        cap: usize,
    },
    /// Write perturbed dictator sets as vertex-set JSON.
    Corpus {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        coord: usize,
        #[arg(long, default_value_t = 0)]
        value: usize,
        /// One file per set in this directory; JSON lines on stdout otherwise.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Evaluate Bennett's tail bound and, in its regime, the specialised bound
    /// with ε′ = σ²/10⁴.
    Bennett {
        #[arg(long)]
        sigma2: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        t: f64,
    },
}

/// A parsed command plus environment-derived settings.
#[derive(Debug)]
pub struct RunConfig {
    pub command: Command,
    pub size_cap: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self { command, size_cap: DEFAULT_SIZE_CAP }
    }

    /// Parses arguments and reads the size cap from the environment.
    pub fn from_args<I, T>(args: I) -> std::result::Result<Result<Self>, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        Ok(size_cap_from_env().map(|size_cap| Self { command: cli.command, size_cap }))
    }
}

fn size_cap_from_env() -> Result<usize> {
    match std::env::var(SIZE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::validation(format!("{SIZE_CAP_ENV}={v:?} is not a positive integer"))),
        Err(_) => Ok(DEFAULT_SIZE_CAP),
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn emit(out: &mut dyn Write, output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => out.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

pub fn run(config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let cap = config.size_cap;
    match &config.command {
        Command::Spectrum { input, output, format } => {
            let f = load_function(input, cap)?;
            let spec = fast_forward(f.function());
            let levels = level_weights(&spec);
            if let Some(path) = output {
                save_spectrum(&spec, path)?;
            }
            let text = match format {
                Format::Csv => {
                    let mut s = String::from("level,weight\n");
                    for (k, w) in levels.weights().iter().enumerate() {
                        s.push_str(&format!("{k},{w}\n"));
                    }
                    s
                }
                Format::Json => {
                    let levels = serde_json::to_string(levels.weights()).expect("floats serialize");
                    let spec = spectrum_to_json(&spec);
                    format!("{{\"levels\":{levels},\"spectrum\":{spec}}}\n")
                }
            };
            emit(out, None, &text)
        }
        Command::Recover { set, output } => {
            let set = IndependentSet::new(load_vertex_set(set, cap)?)?;
            let (_, report) = recover_independent_set(&set)?;
            let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
            text.push('\n');
            emit(out, output.as_deref(), &text)
        }
        Command::Verify { r, n, corpus, k, seeds, seed, coord, value, set, cap: enum_cap, output } => {
            let text = match set {
                Some(path) => {
                    let set = IndependentSet::new(load_vertex_set(path, cap)?)?;
                    let shape = set.shape();
                    let k = shape.size() / shape.r() - set.len();
                    let (_, report) = recover_independent_set(&set)?;
                    let mut s = format!(
                        "# dictatorlab verify set={} seed={seed}\n{VERIFY_COLUMNS}\n",
                        path.display()
                    );
                    s.push_str(&verify_row(k, *seed, &report));
                    s
                }
                None => {
                    let (r, n) = (r.expect("required by clap"), n.expect("required by clap"));
                    let shape = GridShape::with_cap(r, n, cap)?;
                    verify_corpus(shape, *corpus, *k, *seeds, *seed, (*coord, *value), *enum_cap)?
                }
            };
            emit(out, output.as_deref(), &text)
        }
        Command::Enumerate { r, n, size, maximal, cap: enum_cap } => {
            let shape = GridShape::with_cap(*r, *n, cap)?;
            let found = if *maximal {
                maximal_independent_sets(shape, *enum_cap)
            } else {
                independent_sets_of_size(shape, size.unwrap_or(shape.size() / r), *enum_cap)
            };
            let mut text = String::new();
            for set in &found.sets {
                let points: Vec<Vec<usize>> =
                    set.points().into_iter().map(|p| p.coords().to_vec()).collect();
                text.push_str(&serde_json::to_string(&points).expect("plain data"));
                text.push('\n');
            }
            if found.truncated {
                eprintln!("warning: output truncated at {} sets", found.sets.len());
            }
            emit(out, None, &text)
        }
        Command::Corpus { r, n, k, seeds, seed, coord, value, out_dir } => {
            let shape = GridShape::with_cap(*r, *n, cap)?;
            let d = dictator_set(shape, *coord, *value)?;
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(dir).map_err(io_err(dir))?;
            }
            let mut text = String::new();
            for s in (0..*seeds).map(|i| seed.wrapping_add(i)) {
                let set = perturb(&d, *k, s)?;
                let json = vertex_set_to_json(&set);
                match out_dir {
                    Some(dir) => {
                        let path = dir.join(format!("r{r}_n{n}_k{k}_seed{s}.json"));
                        write_atomic(&path, format!("{json}\n").as_bytes())?;
                    }
                    None => {
                        text.push_str(&json);
                        text.push('\n');
                    }
                }
            }
            emit(out, None, &text)
        }
        Command::Bennett { sigma2, c, t } => {
            let params = TailParams::new(*sigma2, *c, *t)?;
            let mut text = format!(
                "bennett_tail,{}\nbennett_log_tail,{}\n",
                bennett_tail(&params),
                bennett_log_tail(&params)
            );
            match lemma33_tail(sigma2 / VARIANCE_SCALE, *c, *t) {
                Ok(v) => text.push_str(&format!("lemma33_tail,{v}\n")),
                Err(_) => text.push_str("lemma33_tail,out_of_regime\n"),
            }
            emit(out, None, &text)
        }
    }
}

fn verify_row(k: usize, seed: u64, report: &StabilityReport) -> String {
    let (i0, j) = report.recovery.dictator;
    format!(
        "{},{},{k},{seed},{},{},{},{i0},{j},{},{},{}\n",
        report.r,
        report.n,
        report.epsilon.value(),
        report.tail_weight,
        report.tail_bound,
        report.symdiff.value(),
        report.theorem_bound.value(),
        report.oracle_agrees,
    )
}

fn verify_corpus(
    shape: GridShape,
    corpus: CorpusKind,
    k: usize,
    seeds: u64,
    seed: u64,
    (coord, value): (usize, usize),
    enum_cap: usize,
) -> Result<String> {
    let (r, n) = (shape.r(), shape.n());
    let mut rows: Vec<(usize, u64, String)> = Vec::new();
    let header = match corpus {
        CorpusKind::Perturb => {
            let d = dictator_set(shape, coord, value)?;
            for s in (0..seeds).map(|i| seed.wrapping_add(i)) {
                let set = perturb(&d, k, s)?;
                let (_, report) = recover_independent_set(&set)?;
                rows.push((k, s, verify_row(k, s, &report)));
            }
            format!(
                "# dictatorlab verify r={r} n={n} corpus=perturb k={k} seeds={seeds} seed={seed} coord={coord} value={value}\n"
            )
        }
        CorpusKind::Maximal => {
            let found = maximal_independent_sets(shape, enum_cap);
            if found.truncated {
                return Err(Error::domain(format!(
                    "more than {enum_cap} maximal independent sets; raise --cap"
                )));
            }
            let max = shape.size() / r;
            for (idx, set) in found.sets.iter().enumerate() {
                let (_, report) = recover_independent_set(set)?;
                let k = max - set.len();
                rows.push((k, idx as u64, verify_row(k, idx as u64, &report)));
            }
            format!("# dictatorlab verify r={r} n={n} corpus=maximal seed={seed}\n")
        }
    };
    rows.sort_by_key(|(k, s, _)| (*k, *s));
    let mut text = header;
    text.push_str(VERIFY_COLUMNS);
    text.push('\n');
    rows.iter().for_each(|(_, _, row)| text.push_str(row));
    Ok(text)
}
