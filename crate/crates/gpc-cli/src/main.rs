//! `gpc` — Gaussian persistence curve toolkit.
//!
//! Subcommands: `curve` (sample a curve to CSV), `surface` (sample the
//! persistence surface on a grid), `norm` (closed-form and quadrature L1
//! norm), `dist` (1-Wasserstein and L1 curve distance), `stability`
//! (verify a stability bound; the exit code is the verdict), `moments`
//! (moment table or a two-diagram distinguishability probe).
//!
//! Exit codes: 0 success, 1 stability bound violated, 2 usage error,
//! 3 data error, 4 theorem hypothesis violated. All numbers are printed
//! with 10 significant digits so identical inputs give byte-identical
//! outputs; files are written atomically (temp file + rename).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gpc_core::curves::{l1_distance, GpcModel};
use gpc_core::diagram::{load_diagram, DiagramFormat, PersistenceDiagram};
use gpc_core::injectivity::{injectivity_probe, moment_table, ProbeResult};
use gpc_core::matching::{wasserstein1, Matching};
use gpc_core::numfmt::g10;
use gpc_core::quad::QuadratureSpec;
use gpc_core::stability::{verify, StabilityError, StabilityReport, Theorem, VerifyConfig};
use gpc_core::weights::{WeightError, WeightSpec};

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_DATA: u8 = 3;
const EXIT_HYPOTHESIS: u8 = 4;

/// Environment override for the quadrature relative tolerance.
const ENV_QUAD_RTOL: &str = "GPC_QUAD_RTOL";
/// Environment override for the support padding (multiples of sigma).
const ENV_QUAD_PAD: &str = "GPC_QUAD_PAD";

#[derive(Parser)]
#[command(
    name = "gpc",
    version,
    about = "Gaussian persistence curves: evaluation, distances, stability checks, moment probes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a Gaussian persistence curve to `t,value` CSV
    Curve {
        /// Diagram CSV (`birth,death` rows)
        input: PathBuf,
        /// Kernel bandwidth
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Weighting: none|life|midlife|entropy|mullife|normlife
        #[arg(long, default_value = "none")]
        weight: String,
        /// Sample range `MIN:MAX`; default: diagram support padded by 3 sigma
        #[arg(long, allow_hyphen_values = true)]
        range: Option<String>,
        /// Number of samples (endpoints included)
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Output file (stdout when omitted)
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample the persistence surface on a grid, as `x,y,value` CSV
    Surface {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value = "none")]
        weight: String,
        /// Grid extents `XMIN:XMAX:YMIN:YMAX`
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Grid resolution along x
        #[arg(long, default_value_t = 64)]
        nx: usize,
        /// Grid resolution along y
        #[arg(long, default_value_t = 64)]
        ny: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the curve's L1 norm, closed form and quadrature
    Norm {
        input: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value = "none")]
        weight: String,
    },
    /// 1-Wasserstein distance and L1 curve distance between two diagrams
    Dist {
        input1: PathBuf,
        input2: PathBuf,
        /// Skip the curve distance, print only W1
        #[arg(long)]
        w1_only: bool,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value = "none")]
        weight: String,
        /// Write the optimal matching as `c_index,d_index,cost` CSV
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// Verify a stability bound; exit 0 iff the bound holds
    Stability {
        /// Diagram CSV, or a directory of them (corpus mode pairs files
        /// with the same name in both directories)
        input1: PathBuf,
        input2: PathBuf,
        /// Which bound: A|B|J|G|P
        #[arg(long)]
        theorem: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Weighting for theorems B and J (A, G, P fix their own)
        #[arg(long, default_value = "none")]
        weight: String,
        /// Cross-Lipschitz constant for theorem J
        #[arg(long)]
        lipschitz_k: Option<f64>,
        /// Emit a single CSV row instead of the pretty report
        #[arg(long)]
        csv: bool,
    },
    /// Moment table of one diagram, or a moment probe of two
    Moments {
        input: PathBuf,
        /// Second diagram: switch to the distinguishability probe
        input2: Option<PathBuf>,
        /// Largest total moment order searched
        #[arg(long, default_value_t = 16)]
        max_order: u32,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
    Hypothesis(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Data(_) => EXIT_DATA,
            CliError::Hypothesis(_) => EXIT_HYPOTHESIS,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Data(m) | CliError::Hypothesis(m) => m,
        }
    }
}

impl From<StabilityError> for CliError {
    fn from(e: StabilityError) -> Self {
        match e {
            StabilityError::HypothesisViolated(_) | StabilityError::WeightKindMismatch => {
                CliError::Hypothesis(e.to_string())
            }
            other => CliError::Data(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("gpc: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Curve {
            input,
            sigma,
            weight,
            range,
            samples,
            output,
        } => cmd_curve(
            &input,
            sigma,
            &weight,
            range.as_deref(),
            samples,
            output.as_deref(),
        ),
        Command::Surface {
            input,
            sigma,
            weight,
            grid,
            nx,
            ny,
            output,
        } => cmd_surface(&input, sigma, &weight, &grid, nx, ny, output.as_deref()),
        Command::Norm {
            input,
            sigma,
            weight,
        } => cmd_norm(&input, sigma, &weight),
        Command::Dist {
            input1,
            input2,
            w1_only,
            sigma,
            weight,
            matching,
        } => cmd_dist(
            &input1,
            &input2,
            w1_only,
            sigma,
            &weight,
            matching.as_deref(),
        ),
        Command::Stability {
            input1,
            input2,
            theorem,
            sigma,
            weight,
            lipschitz_k,
            csv,
        } => cmd_stability(&input1, &input2, &theorem, sigma, &weight, lipschitz_k, csv),
        Command::Moments {
            input,
            input2,
            max_order,
            sigma,
        } => cmd_moments(&input, input2.as_deref(), max_order, sigma),
    }
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

fn check_sigma(sigma: f64) -> Result<(), CliError> {
    if sigma.is_finite() && sigma > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--sigma must be positive, got {sigma}"
        )))
    }
}

fn weight_spec(token: &str) -> Result<WeightSpec, CliError> {
    WeightSpec::from_token(token).map_err(|e| match e {
        WeightError::UnknownKind(_) => CliError::Usage(e.to_string()),
        other => CliError::Data(other.to_string()),
    })
}

fn quad_spec_from_env() -> Result<QuadratureSpec, CliError> {
    let parse = |name: &str, default: f64| -> Result<f64, CliError> {
        match std::env::var(name) {
            Ok(raw) => raw
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("{name} must be a number, got `{raw}`"))),
            Err(_) => Ok(default),
        }
    };
    let rtol = parse(ENV_QUAD_RTOL, 1e-9)?;
    let pad = parse(ENV_QUAD_PAD, 10.0)?;
    QuadratureSpec::new(rtol, pad).map_err(|e| CliError::Usage(e.to_string()))
}

fn load(path: &Path) -> Result<PersistenceDiagram, CliError> {
    let file =
        fs::File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    load_diagram(file, DiagramFormat::Csv)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn model(diagram: PersistenceDiagram, spec: &WeightSpec, sigma: f64) -> Result<GpcModel, CliError> {
    GpcModel::new(diagram, spec, sigma).map_err(|e| CliError::Data(e.to_string()))
}

/// Write via a temp file in the same directory plus rename, so failures
/// never leave a partial output behind.
fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("{}: not a file path", path.display())))?
        .to_os_string();
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let failed = |e: std::io::Error| CliError::Data(format!("{}: {e}", path.display()));
    fs::write(&tmp, contents).map_err(failed)?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        failed(e)
    })
}

fn emit(output: Option<&Path>, contents: &str) -> Result<(), CliError> {
    match output {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), CliError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 2 {
        if let (Ok(a), Ok(b)) = (parts[0].parse::<f64>(), parts[1].parse::<f64>()) {
            if a.is_finite() && b.is_finite() && a < b {
                return Ok((a, b));
            }
        }
    }
    Err(CliError::Usage(format!(
        "{what} must look like `MIN:MAX` with MIN < MAX, got `{s}`"
    )))
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

fn cmd_curve(
    input: &Path,
    sigma: f64,
    weight: &str,
    range: Option<&str>,
    samples: usize,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    if samples < 2 {
        return Err(CliError::Usage(format!(
            "--samples must be at least 2, got {samples}"
        )));
    }
    let range = range.map(|s| parse_pair(s, "--range")).transpose()?;
    let spec = weight_spec(weight)?;
    let model = model(load(input)?, &spec, sigma)?;
    let (t_min, t_max) = match range {
        Some(r) => r,
        None => match model.support() {
            Some((lo, hi)) => (lo - 3.0 * sigma, hi + 3.0 * sigma),
            None => (-3.0 * sigma, 3.0 * sigma),
        },
    };
    let csv = model.sample(t_min, t_max, samples).to_csv();
    emit(output, &csv)?;
    Ok(0)
}

fn cmd_surface(
    input: &Path,
    sigma: f64,
    weight: &str,
    grid: &str,
    nx: usize,
    ny: usize,
    output: Option<&Path>,
) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    if nx < 2 || ny < 2 {
        return Err(CliError::Usage(format!(
            "--nx and --ny must be at least 2, got {nx} x {ny}"
        )));
    }
    let parts: Vec<&str> = grid.splitn(3, ':').collect();
    let (x_part, rest) = match parts.as_slice() {
        [a, b, rest] => (format!("{a}:{b}"), rest.to_string()),
        _ => {
            return Err(CliError::Usage(format!(
                "--grid must look like `XMIN:XMAX:YMIN:YMAX`, got `{grid}`"
            )))
        }
    };
    let (x_min, x_max) = parse_pair(&x_part, "--grid x extent")?;
    let (y_min, y_max) = parse_pair(&rest, "--grid y extent")?;
    let spec = weight_spec(weight)?;
    let model = model(load(input)?, &spec, sigma)?;

    let mut csv = format!(
        "# sigma={} weight={} diagram={:#018x}\nx,y,value\n",
        g10(sigma),
        model.weights().kind(),
        model.diagram().digest()
    );
    for i in 0..nx {
        let x = x_min + (x_max - x_min) * i as f64 / (nx - 1) as f64;
        for j in 0..ny {
            let y = y_min + (y_max - y_min) * j as f64 / (ny - 1) as f64;
            csv.push_str(&format!(
                "{},{},{}\n",
                g10(x),
                g10(y),
                g10(model.surface_eval(x, y))
            ));
        }
    }
    emit(output, &csv)?;
    Ok(0)
}

fn cmd_norm(input: &Path, sigma: f64, weight: &str) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    let spec = weight_spec(weight)?;
    let quad = quad_spec_from_env()?;
    let model = model(load(input)?, &spec, sigma)?;
    let closed = model.l1_norm_closed();
    let numeric = model
        .l1_norm_quadrature(&quad)
        .map_err(|e| CliError::Data(e.to_string()))?;
    print!(
        "closed,{}\nquadrature,{}\nexact,{}\n",
        g10(closed.value),
        g10(numeric),
        closed.exact
    );
    Ok(0)
}

fn matching_csv(matching: &Matching, c: &PersistenceDiagram, d: &PersistenceDiagram) -> String {
    let cp = c.points();
    let dp = d.points();
    let linf = |i: usize, j: usize| {
        (cp[i].birth() - dp[j].birth())
            .abs()
            .max((cp[i].death() - dp[j].death()).abs())
    };
    let mut out = String::from("c_index,d_index,cost\n");
    for &(i, j) in &matching.pairs {
        out.push_str(&format!("{i},{j},{}\n", g10(linf(i, j))));
    }
    for &i in &matching.c_to_diagonal {
        out.push_str(&format!("{i},DIAG,{}\n", g10(0.5 * cp[i].lifespan())));
    }
    for &j in &matching.d_to_diagonal {
        out.push_str(&format!("DIAG,{j},{}\n", g10(0.5 * dp[j].lifespan())));
    }
    out
}

fn cmd_dist(
    input1: &Path,
    input2: &Path,
    w1_only: bool,
    sigma: f64,
    weight: &str,
    matching_out: Option<&Path>,
) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    let spec = weight_spec(weight)?;
    let c = load(input1)?;
    let d = load(input2)?;
    let (w1, matching) = wasserstein1(&c, &d);
    let mut out = format!("w1,{}\n", g10(w1));
    if !w1_only {
        let quad = quad_spec_from_env()?;
        let mc = model(c.clone(), &spec, sigma)?;
        let md = model(d.clone(), &spec, sigma)?;
        let dist = l1_distance(&mc, &md, &quad).map_err(|e| CliError::Data(e.to_string()))?;
        out.push_str(&format!("l1,{}\n", g10(dist)));
    }
    print!("{out}");
    if let Some(path) = matching_out {
        write_atomic(path, &matching_csv(&matching, &c, &d))?;
    }
    Ok(0)
}

fn report_pretty(r: &StabilityReport) -> String {
    format!(
        "theorem {}\nconstant {}\nadditive {}\nw1 {}\nl1_dist {}\nbound {}\nholds {}\nslack {}\ndigest {}\n",
        r.theorem.token(),
        g10(r.constant),
        g10(r.additive_term),
        g10(r.w1),
        g10(r.l1_dist),
        g10(r.bound_value),
        r.holds,
        g10(r.slack),
        r.inputs_digest
    )
}

fn report_csv_row(r: &StabilityReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{}\n",
        r.theorem.token(),
        g10(r.constant),
        g10(r.additive_term),
        g10(r.w1),
        g10(r.l1_dist),
        g10(r.bound_value),
        r.holds,
        g10(r.slack)
    )
}

const REPORT_CSV_HEADER: &str = "# theorem,constant,additive,w1,l1_dist,bound,holds,slack\n";

fn cmd_stability(
    input1: &Path,
    input2: &Path,
    theorem: &str,
    sigma: f64,
    weight: &str,
    lipschitz_k: Option<f64>,
    csv: bool,
) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    let theorem: Theorem = theorem
        .parse()
        .map_err(|e: StabilityError| CliError::Usage(e.to_string()))?;
    if let Some(k) = lipschitz_k {
        if !(k.is_finite() && k >= 0.0) {
            return Err(CliError::Usage(format!(
                "--lipschitz-k must be a nonnegative number, got {k}"
            )));
        }
    }
    let spec = weight_spec(weight)?;
    let cfg = VerifyConfig {
        sigma,
        weight_c: spec.clone(),
        weight_d: spec,
        lipschitz_k,
        quad: quad_spec_from_env()?,
    };

    if input1.is_dir() || input2.is_dir() {
        return cmd_stability_corpus(input1, input2, theorem, &cfg);
    }

    let c = load(input1)?;
    let d = load(input2)?;
    let report = verify(&c, &d, theorem, &cfg)?;
    if csv {
        print!("{REPORT_CSV_HEADER}{}", report_csv_row(&report));
    } else {
        print!("{}", report_pretty(&report));
    }
    Ok(if report.holds { 0 } else { EXIT_VIOLATION })
}

/// Corpus mode: pair equally named `.csv` files from the two directories,
/// evaluate each pair, and emit the reports as CSV rows in file-name
/// order. Exit 0 iff every bound holds.
fn cmd_stability_corpus(
    dir1: &Path,
    dir2: &Path,
    theorem: Theorem,
    cfg: &VerifyConfig,
) -> Result<u8, CliError> {
    if !dir1.is_dir() || !dir2.is_dir() {
        return Err(CliError::Usage(
            "corpus mode needs two directories (or two files)".to_string(),
        ));
    }
    let names = |dir: &Path| -> Result<Vec<String>, CliError> {
        let mut out = Vec::new();
        let entries =
            fs::read_dir(dir).map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
        for entry in entries {
            let entry = entry.map_err(|e| CliError::Data(format!("{}: {e}", dir.display())))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.ends_with(".csv") {
                out.push(name);
            }
        }
        out.sort();
        Ok(out)
    };
    let names1 = names(dir1)?;
    let names2 = names(dir2)?;
    let shared: Vec<&String> = names1.iter().filter(|n| names2.contains(n)).collect();
    if shared.is_empty() {
        return Err(CliError::Data(format!(
            "no equally named .csv files in {} and {}",
            dir1.display(),
            dir2.display()
        )));
    }
    let mut all_hold = true;
    let mut out = String::from("# file,theorem,constant,additive,w1,l1_dist,bound,holds,slack\n");
    for name in shared {
        let c = load(&dir1.join(name))?;
        let d = load(&dir2.join(name))?;
        let report = verify(&c, &d, theorem, cfg)?;
        all_hold &= report.holds;
        out.push_str(&format!("{name},{}", report_csv_row(&report)));
    }
    print!("{out}");
    Ok(if all_hold { 0 } else { EXIT_VIOLATION })
}

fn cmd_moments(
    input: &Path,
    input2: Option<&Path>,
    max_order: u32,
    sigma: f64,
) -> Result<u8, CliError> {
    check_sigma(sigma)?;
    if max_order > 32 {
        return Err(CliError::Usage(format!(
            "--max-order must be at most 32, got {max_order}"
        )));
    }
    let c = load(input)?;
    match input2 {
        None => {
            let table = moment_table(&c, max_order).map_err(|e| CliError::Data(e.to_string()))?;
            print!("{}", table.to_csv());
        }
        Some(path) => {
            let d = load(path)?;
            let verdict = injectivity_probe(&c, &d, sigma, max_order)
                .map_err(|e| CliError::Data(e.to_string()))?;
            match verdict {
                ProbeResult::Identical => println!("identical"),
                ProbeResult::Distinguished(m1, m2) => println!("distinguished,{m1},{m2}"),
                ProbeResult::Inconclusive(order) => println!("inconclusive,{order}"),
            }
        }
    }
    Ok(0)
}
