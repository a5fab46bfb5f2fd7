use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use conedensity::barcode::{gabriel_decompose, stalk_complex};
use conedensity::density::{densify_with, solo_approximator_check, DensifyOptions, DensityError, WGenerator};
use conedensity::interleave::{distance_bounds, distance_exact, DEFAULT_CAP};
use conedensity::io::{self, IoError, IrdimItem, VerifyError};
use conedensity::twisted::TwistedComplex;
use conedensity::{GraphPoint, MetricGraph, Rational};

const CERT_FAILURE: u8 = 2;
const UNDECIDED: u8 = 3;
const INVALID: u8 = 4;

#[derive(Parser)]
#[command(name = "conedensity", version, about = "Certified cone approximations of sheaves on metric graphs")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Enumeration cap for H⁰ searches.
    #[arg(long, global = true, default_value_t = DEFAULT_CAP)]
    cap: u64,
    /// Seed for randomized sampling.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Approximate a 1-Lipschitz complex by wrapped-generator cones.
    Densify {
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay every certificate in a document.
    Verify { document: PathBuf },
    /// Interleaving distance between two complexes.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, conflicts_with = "bounds")]
        exact: bool,
        #[arg(long)]
        bounds: bool,
        /// Comma-separated points (`v0`, `3:1/2`), `vertices`, or `random:K`.
        #[arg(long, default_value = "vertices")]
        samples: String,
        /// Search levels spent on the upper bound in `--bounds` mode.
        #[arg(long, default_value_t = 8)]
        budget: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Barcode of the stalk at a point.
    Decompose {
        #[arg(long)]
        sheaf: PathBuf,
        #[arg(long)]
        point: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check two-layer approximation over a corpus directory.
    Irdim {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn invalid(message: impl ToString) -> Self {
        Failure { code: INVALID, message: message.to_string() }
    }

    fn cert(message: impl ToString) -> Self {
        Failure { code: CERT_FAILURE, message: message.to_string() }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::invalid(e)
    }
}

fn read(path: &Path) -> Result<Value, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    io::parse_json(&bytes).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

fn write(out: Option<&Path>, doc: &Value) -> Result<(), Failure> {
    let text = io::to_canonical_string(doc);
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn rational(text: &str, what: &str) -> Result<Rational, Failure> {
    io::parse_rational(text).ok_or_else(|| Failure::invalid(format!("{what}: {text:?} is not a rational number")))
}

fn replay_line(out: Option<&Path>) -> String {
    match out {
        Some(p) => format!("conedensity verify {}", p.display()),
        None => "conedensity verify <report.json>".to_string(),
    }
}

fn samples(g: &MetricGraph<Rational>, spec: &str, seed: u64) -> Result<Vec<GraphPoint<Rational>>, Failure> {
    if spec == "vertices" {
        return Ok((0..g.vertex_count()).map(GraphPoint::Vertex).collect());
    }
    if let Some(k) = spec.strip_prefix("random:") {
        let k: usize = k.parse().map_err(|_| Failure::invalid(format!("bad sample count {k:?}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let e = rng.gen_range(0..g.edge_count().max(1));
            if g.edge_count() == 0 {
                out.push(GraphPoint::Vertex(0));
                continue;
            }
            let t = Rational::new(rng.gen_range(0..=16).into(), 16.into()) * g.edge(e).len.clone();
            out.push(g.point_on_edge(e, t).expect("offset within edge"));
        }
        return Ok(out);
    }
    spec.split(',').map(|s| io::parse_point_spec(g, s.trim()).ok_or_else(|| Failure::invalid(format!("unknown point {s:?}")))).collect()
}

fn density_failure(e: DensityError) -> Failure {
    match e {
        DensityError::Epsilon | DensityError::NotLipschitz(_) | DensityError::EmptyPiece(_) | DensityError::Uncovered(_) | DensityError::Radius { .. } => {
            Failure::invalid(e)
        }
        _ => Failure::cert(e),
    }
}

fn same_graph(a: &TwistedComplex<Rational>, b: &TwistedComplex<Rational>) -> Result<(), Failure> {
    if **a.graph() == **b.graph() {
        Ok(())
    } else {
        Err(Failure::invalid("the two complexes live on different graphs"))
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let g = &cli.global;
    match cli.command {
        Command::Densify { graph, sheaf, epsilon, out } => {
            let f = io::parse_sheaf(&read(&sheaf)?)?;
            if let Some(gp) = graph {
                let expected = io::parse_graph(&read(&gp)?)?;
                if expected != **f.graph() {
                    return Err(Failure::invalid("sheaf document is not on the given graph"));
                }
            }
            let eps = rational(&epsilon, "epsilon")?;
            let opts = DensifyOptions { cap: g.cap, ..DensifyOptions::default() };
            let report = densify_with(&f, &eps, &opts).map_err(density_failure)?;
            let doc = io::emit_density_report(&report, &replay_line(out.as_deref())).map_err(Failure::cert)?;
            write(out.as_deref(), &doc)?;
            eprintln!("certified {} <= {}; measured [{}, {}]", report.certificate.total(), report.bound, report.measured.lower, report.measured.upper);
            Ok(())
        }
        Command::Verify { document } => {
            let v = io::verify_document(&read(&document)?).map_err(|e| match e {
                VerifyError::Parse(p) => Failure::invalid(p),
                VerifyError::Certificate(m) => Failure::cert(m),
            })?;
            match (&v.total, &v.bound) {
                (Some(t), Some(b)) => println!("ok: {} replays at {} <= {}", v.kind, t, b),
                (Some(t), None) => println!("ok: {} replays at {}", v.kind, t),
                _ => println!("ok: {}", v.kind),
            }
            Ok(())
        }
        Command::Distance { a, b, exact, bounds, samples: spec, budget, out } => {
            let f = io::parse_sheaf(&read(&a)?)?;
            let h = io::parse_sheaf(&read(&b)?)?;
            same_graph(&f, &h)?;
            let result = if bounds && !exact {
                let pts = samples(f.graph(), &spec, g.seed)?;
                distance_bounds(&f, &h, &pts, g.cap, budget, None).map_err(Failure::invalid)?
            } else {
                distance_exact(&f, &h, g.cap).map_err(Failure::invalid)?
            };
            let doc = io::emit_distance_report(&f, &h, &result, &replay_line(out.as_deref())).map_err(Failure::cert)?;
            write(out.as_deref(), &doc)?;
            if result.undecided && result.lower != result.upper {
                return Err(Failure { code: UNDECIDED, message: format!("undecided at cap {}: [{}, {}]", g.cap, result.lower, result.upper) });
            }
            Ok(())
        }
        Command::Decompose { sheaf, point, out } => {
            let f = io::parse_sheaf(&read(&sheaf)?)?;
            let x = io::parse_point_spec(f.graph(), &point).ok_or_else(|| Failure::invalid(format!("unknown point {point:?}")))?;
            let stalk = stalk_complex(&f, &x).map_err(Failure::invalid)?;
            let dec = gabriel_decompose(&stalk).map_err(Failure::cert)?;
            dec.certificate.verify(&stalk, &dec.tower).map_err(Failure::cert)?;
            write(out.as_deref(), &io::emit_barcode(&dec.barcode))
        }
        Command::Irdim { corpus, epsilon, out } => {
            let eps = rational(&epsilon, "epsilon")?;
            let mut paths: Vec<PathBuf> = fs::read_dir(&corpus)
                .map_err(|e| Failure::invalid(format!("{}: {e}", corpus.display())))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x == "json"))
                .collect();
            paths.sort();
            let mut items = Vec::new();
            for p in &paths {
                let c = io::parse_sheaf(&read(p)?)?;
                let family: Vec<WGenerator<Rational>> = (0..c.graph().vertex_count()).map(|v| WGenerator::new(GraphPoint::Vertex(v), Rational::from_integer(0.into()), 0)).collect();
                let report = solo_approximator_check(c.graph(), &family, std::slice::from_ref(&c), &eps);
                let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                items.push((name, c, family, report));
            }
            let views: Vec<IrdimItem<'_>> = items
                .iter()
                .map(|(name, c, family, report)| IrdimItem { name: name.clone(), graph: c.graph(), family, report })
                .collect();
            let doc = io::emit_irdim_report(&eps, &views, &replay_line(out.as_deref()));
            write(out.as_deref(), &doc)?;
            if doc["dimension_bound_holds"] == Value::Bool(true) {
                Ok(())
            } else {
                Err(Failure::cert("some corpus item needs more than two layers"))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(INVALID) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(INVALID);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
