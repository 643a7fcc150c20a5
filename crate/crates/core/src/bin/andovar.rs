use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use andovar::colligation::colligation_for;
use andovar::dilation::{build_dilation, dilation_report};
use andovar::generate::{generate_pair, PairKind};
use andovar::io::{emit, pair_to_json, read_pair, read_polynomial};
use andovar::matrix::cis;
use andovar::pair::TRUNCATION_CAP;
use andovar::parallel::init_global_pool;
use andovar::transfer::TransferFunction;
use andovar::variety::Variety;
use andovar::vn::{vn_report_with, VnOptions};
use andovar::{ComplexMatrix, ContractionPair, Error, Result, Tolerances};

#[derive(Parser, Debug)]
#[command(name = "andovar", version, about = "Dilations, inner multipliers and distinguished varieties for commuting contractive matrix pairs")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Bound on |T1 T2 - T2 T1| [default: 1e-10 * n]
    #[arg(long, global = true)]
    tol_commute: Option<f64>,
    /// Allowed excess of |T_j| over 1
    #[arg(long, global = true)]
    tol_contract: Option<f64>,
    /// Purity margin on the spectral radius
    #[arg(long, global = true)]
    tol_pure: Option<f64>,
    /// Relative eigenvalue cut for defect ranks
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Target for |T1^{*N}| in the automatic truncation rule
    #[arg(long, global = true)]
    tol_trunc: Option<f64>,
    /// Truncation degree: "auto" or an explicit N
    #[arg(long, global = true, default_value = "auto")]
    truncation: String,
    /// Boundary samples of the variety
    #[arg(long, global = true, default_value_t = 720)]
    theta_samples: usize,
    /// Torus grid size per coordinate
    #[arg(long, global = true, default_value_t = 512)]
    torus_grid: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Output file [default: stdout]
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Halve every tolerance
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a pair and print its report
    Check { pair: PathBuf },
    /// Print the unitary colligation of a pair
    Colligation { pair: PathBuf },
    /// Sample the boundary of the variety (CSV, SVG or JSON)
    Variety { pair: PathBuf },
    /// Certify the von Neumann chain for a polynomial
    Vn { pair: PathBuf, poly: PathBuf },
    /// Build the truncated dilation and report its residuals
    Dilate {
        pair: PathBuf,
        /// Include Pi, Mz and MPsi in the output
        #[arg(long)]
        dump: bool,
    },
    /// Generate a commuting contractive pair
    Gen {
        /// diag | jordan-poly | triangular-commuting
        kind: String,
        #[arg(long, default_value_t = 3)]
        dim: usize,
    },
    /// Canned scenarios
    Demo {
        #[command(subcommand)]
        scenario: Demo,
    },
}

#[derive(Subcommand, Debug)]
enum Demo {
    /// T1 = T2 = 0 on C^m
    Shift {
        #[arg(long, default_value_t = 2)]
        m: usize,
    },
}

impl GlobalOpts {
    fn tolerances(&self, n: usize) -> Result<Tolerances> {
        let mut t = Tolerances::for_dim(n);
        if let Some(x) = self.tol_commute {
            t.commute = x;
        }
        if let Some(x) = self.tol_contract {
            t.contract = x;
        }
        if let Some(x) = self.tol_pure {
            t.pure = x;
        }
        if let Some(x) = self.rank_tol {
            t.rank = x;
        }
        if let Some(x) = self.tol_trunc {
            t.trunc = x;
        }
        if self.strict {
            t = t.strict();
        }
        t.validate()?;
        Ok(t)
    }

    fn load_pair(&self, path: &Path) -> Result<ContractionPair> {
        let f = read_pair(path)?;
        let tols = self.tolerances(f.n)?;
        ContractionPair::new(f.t1, f.t2, tols)
    }

    fn truncation(&self, pair: &ContractionPair) -> Result<usize> {
        match self.truncation.as_str() {
            "auto" => pair.truncation_degree(),
            s => {
                let n: usize = s
                    .parse()
                    .map_err(|_| Error::Input(format!("--truncation expects \"auto\" or an integer, got {s:?}")))?;
                if n > TRUNCATION_CAP {
                    return Err(Error::Input(format!("--truncation {n} exceeds the cap {TRUNCATION_CAP}")));
                }
                Ok(n)
            }
        }
    }

    fn vn_options(&self) -> VnOptions {
        VnOptions {
            n_theta: self.theta_samples,
            torus_grid: self.torus_grid,
        }
    }

    fn format(&self, default: Format, allowed: &[Format]) -> Result<Format> {
        let f = self.format.unwrap_or(default);
        if allowed.contains(&f) {
            Ok(f)
        } else {
            Err(Error::Input(format!("--format {f:?} is not available for this command").to_lowercase()))
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<()> {
        self.format(Format::Json, &[Format::Json])?;
        let text = serde_json::to_string_pretty(value).map_err(|e| Error::Numeric(e.to_string()))?;
        emit(self.output.as_deref(), &text)
    }
}

fn run(cli: Cli) -> Result<()> {
    let o = &cli.opts;
    match &cli.command {
        Command::Check { pair } => {
            let p = o.load_pair(pair)?;
            o.emit_json(p.report())
        }
        Command::Colligation { pair } => {
            let p = o.load_pair(pair)?;
            let c = colligation_for(&p)?;
            o.emit_json(&c.record())
        }
        Command::Variety { pair } => {
            let fmt = o.format(Format::Csv, &[Format::Csv, Format::Svg, Format::Json])?;
            let p = o.load_pair(pair)?;
            p.require_t1_pure()?;
            let v = Variety::for_pair(&p)?;
            let s = v.boundary_samples(o.theta_samples)?;
            let sum = s.summary();
            eprintln!(
                "variety: {} V0 points, {} V1 points, {} skipped angles, max residual {:e}",
                sum.v0, sum.v1, sum.skipped, sum.max_residual
            );
            let text = match fmt {
                Format::Csv => s.to_csv(),
                Format::Svg => s.to_svg(),
                Format::Json => serde_json::to_string_pretty(&s).map_err(|e| Error::Numeric(e.to_string()))?,
            };
            emit(o.output.as_deref(), &text)
        }
        Command::Vn { pair, poly } => {
            let p = o.load_pair(pair)?;
            let poly = read_polynomial(poly)?;
            p.require_t1_pure()?;
            let v = Variety::for_pair(&p)?;
            let r = vn_report_with(&p, &v, &poly, &o.vn_options())?;
            o.emit_json(&r)
        }
        Command::Dilate { pair, dump } => {
            let p = o.load_pair(pair)?;
            let n = o.truncation(&p)?;
            let c = colligation_for(&p)?;
            let d = build_dilation(&p, &c, n)?;
            let report = dilation_report(&d, &p)?;
            if *dump {
                #[derive(Serialize)]
                struct Dump<'a> {
                    report: &'a andovar::dilation::DilationReport,
                    model: &'a andovar::dilation::TruncatedDilation,
                }
                o.emit_json(&Dump {
                    report: &report,
                    model: &d,
                })
            } else {
                o.emit_json(&report)
            }
        }
        Command::Gen { kind, dim } => {
            o.format(Format::Json, &[Format::Json])?;
            let k: PairKind = kind.parse()?;
            let (t1, t2) = generate_pair(k, *dim, o.seed)?;
            emit(o.output.as_deref(), &pair_to_json(&t1, &t2))
        }
        Command::Demo { scenario: Demo::Shift { m } } => demo_shift(o, *m),
    }
}

#[derive(Serialize)]
struct ShiftDemo {
    m: usize,
    psi_symbol: &'static str,
    variety: &'static str,
    unitary: ComplexMatrix,
    psi_max_error: f64,
    variety_max_gap: f64,
    boundary_points: usize,
}

fn demo_shift(o: &GlobalOpts, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::Input("--m must be positive".into()));
    }
    let fmt = o.format(Format::Json, &[Format::Json, Format::Csv])?;
    let z = ComplexMatrix::zeros(m, m);
    let p = ContractionPair::new(z.clone(), z, o.tolerances(m)?)?;
    let c = colligation_for(&p)?;
    let psi = TransferFunction::psi(&c);
    let mut psi_err: f64 = 0.0;
    for j in 0..20 {
        let zz = cis(0.7 * j as f64) * (0.05 * j as f64);
        let want = ComplexMatrix::identity(m).scale(zz);
        psi_err = psi_err.max((&psi.eval(zz)? - &want).max_abs());
    }
    let v = Variety::new(&c, p.tolerances().pure)?;
    let s = v.boundary_samples(o.theta_samples)?;
    let gap = s.points.iter().map(|q| (q.z2 - q.z1).norm()).fold(0.0, f64::max);
    if fmt == Format::Csv {
        return emit(o.output.as_deref(), &s.to_csv());
    }
    let out = ShiftDemo {
        m,
        psi_symbol: "z·W*",
        variety: "{(z,z)}",
        unitary: c.unitary(),
        psi_max_error: psi_err,
        variety_max_gap: gap,
        boundary_points: s.points.len(),
    };
    println!("Psi(z) = z·W*  with W = I_{m}");
    println!("variety: {{(z,z)}}  max |z2 - z1| over {} boundary points = {:e}", s.points.len(), gap);
    if o.output.is_some() {
        let text = serde_json::to_string_pretty(&out).map_err(|e| Error::Numeric(e.to_string()))?;
        emit(o.output.as_deref(), &text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    init_global_pool();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
