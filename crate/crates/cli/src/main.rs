//! `tgreens`: spectrum, flux, verification and oracle-comparison runs over a
//! JSON-configured scattering kernel, with deterministic CSV output.
//!
//! Exit codes: 0 success, 1 tolerance/verification failure, 2 configuration
//! error, 3 numerical failure.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use transport_greens::greens::{self, QuadConfig};
use transport_greens::spectral::{self, SpectralData};
use transport_greens::verify::{self, VerifyConfig};
use transport_greens::ScatteringKernel;

use config::ConfigFile;
use output::{emit, fnv1a64, sci, write_manifest, Manifest};

#[derive(Parser)]
#[command(
    name = "tgreens",
    version,
    about = "Infinite-medium transport Green's function runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Discrete spectrum of the dispersion function (CSV).
    Spectrum(CommonArgs),
    /// Green's-function moment breakdown over an (x, mu0) grid (CSV).
    Flux(CommonArgs),
    /// Seeded identity suite; exits 1 if any identity fails.
    Verify(CommonArgs),
    /// Eigenfunction route against the Fourier-inversion oracle (CSV).
    OracleCompare(CommonArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// JSON configuration file (kernel plus per-command sections).
    #[arg(long)]
    config: PathBuf,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed for the randomized suites (recorded in the manifest).
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Command-specific tolerance override (see the README).
    #[arg(long)]
    tol: Option<f64>,
    /// Worker threads for grid fan-out.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write `<out>.manifest.json` with version, config hash and seed.
    #[arg(long)]
    manifest: bool,
    /// Negative control: build tables with h_l = 2l+1 - omega_l (dropping
    /// the c factor). The verify suite must fail on such tables.
    #[arg(long, hide = true)]
    corrupt_h: bool,
}

enum Failure {
    Tolerance(String),
    Config(String),
    Numerical(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Tolerance(_) => 1,
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Tolerance(m) | Failure::Config(m) | Failure::Numerical(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Spectrum(args) => run_command("spectrum", args, cmd_spectrum),
        Command::Flux(args) => run_command("flux", args, cmd_flux),
        Command::Verify(args) => run_command("verify", args, cmd_verify),
        Command::OracleCompare(args) => run_command("oracle-compare", args, cmd_oracle_compare),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("tgreens: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}

struct Ctx<'a> {
    args: &'a CommonArgs,
    cfg: ConfigFile,
    kernel: ScatteringKernel,
}

fn run_command(
    name: &str,
    args: &CommonArgs,
    body: fn(&Ctx) -> Result<String, Failure>,
) -> Result<(), Failure> {
    let raw = std::fs::read(&args.config)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg: ConfigFile = serde_json::from_slice(&raw)
        .map_err(|e| Failure::Config(format!("config parse failure: {e}")))?;
    cfg.validate_grids().map_err(Failure::Config)?;
    let (mut kernel, warning) = cfg.kernel().map_err(Failure::Config)?;
    if let Some(w) = warning {
        eprintln!("tgreens: {w}");
    }
    if args.corrupt_h {
        eprintln!("tgreens: warning: running with the corrupted h_l convention (negative control)");
        kernel = kernel.with_unscaled_h();
    }
    if let Some(t) = args.tol {
        if !(t > 0.0) {
            return Err(Failure::Config(format!("--tol must be > 0, got {t}")));
        }
    }
    if args.jobs == 0 {
        return Err(Failure::Config("--jobs must be >= 1".into()));
    }
    if args.manifest && args.out.is_none() {
        return Err(Failure::Config("--manifest requires --out".into()));
    }

    let ctx = Ctx { args, cfg, kernel };
    let content = body(&ctx)?;
    emit(ctx.args.out.as_deref(), &content)
        .map_err(|e| Failure::Config(format!("cannot write output: {e}")))?;

    if args.manifest {
        let manifest = Manifest {
            command: name,
            config_path: &args.config,
            config_hash: fnv1a64(&raw),
            seed: args.seed,
            tol: args.tol,
            jobs: args.jobs,
        };
        write_manifest(args.out.as_deref().unwrap(), &manifest)
            .map_err(|e| Failure::Config(format!("cannot write manifest: {e}")))?;
    }
    Ok(())
}

fn spectrum_of(kernel: &ScatteringKernel) -> Result<SpectralData, Failure> {
    let spectrum =
        spectral::find_discrete_spectrum(kernel).map_err(|e| Failure::Numerical(e.to_string()))?;
    for w in spectrum.warnings() {
        eprintln!("tgreens: spectrum scan: {w}");
    }
    Ok(spectrum)
}

fn cmd_spectrum(ctx: &Ctx) -> Result<String, Failure> {
    let residual_gate = ctx.args.tol.unwrap_or(1e-10);
    let spectrum = spectrum_of(&ctx.kernel)?;
    let mut out = String::from("m,nu0,lambda_prime,big_M,residual\n");
    for (i, mode) in spectrum.roots().iter().enumerate() {
        let residual = spectral::dispersion_real(&ctx.kernel, mode.nu0)
            .map_err(|e| Failure::Numerical(e.to_string()))?
            .abs();
        if residual > residual_gate {
            return Err(Failure::Numerical(format!(
                "root nu_0 = {} has residual {residual:.3e} above the gate {residual_gate:.1e}",
                mode.nu0
            )));
        }
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            i + 1,
            sci(mode.nu0),
            sci(mode.lambda_prime),
            sci(mode.big_m),
            sci(residual)
        ));
    }
    Ok(out)
}

/// Fan a per-x computation out over worker threads, reassembling the row
/// blocks in grid order so output stays byte-stable for any --jobs.
fn fan_out_rows<F>(xs: &[f64], jobs: usize, f: F) -> Result<Vec<String>, Failure>
where
    F: Fn(f64) -> Result<String, Failure> + Sync,
{
    if jobs <= 1 || xs.len() <= 1 {
        return xs.iter().map(|&x| f(x)).collect();
    }
    let mut blocks: Vec<Option<Result<String, Failure>>> = Vec::new();
    blocks.resize_with(xs.len(), || None);
    let slots: Vec<(usize, f64)> = xs.iter().copied().enumerate().collect();
    let chunk = slots.len().div_ceil(jobs);
    std::thread::scope(|scope| {
        let mut block_slices: Vec<&mut [Option<Result<String, Failure>>]> = Vec::new();
        let mut rest = blocks.as_mut_slice();
        for piece in slots.chunks(chunk) {
            let (head, tail) = rest.split_at_mut(piece.len());
            block_slices.push(head);
            rest = tail;
        }
        for (piece, sink) in slots.chunks(chunk).zip(block_slices) {
            let f = &f;
            scope.spawn(move || {
                for ((_, x), slot) in piece.iter().zip(sink.iter_mut()) {
                    *slot = Some(f(*x));
                }
            });
        }
    });
    blocks.into_iter().map(|b| b.unwrap()).collect()
}

fn cmd_flux(ctx: &Ctx) -> Result<String, Failure> {
    let section = ctx
        .cfg
        .flux
        .as_ref()
        .ok_or_else(|| Failure::Config("config has no flux section".into()))?;
    let quad = QuadConfig {
        abs_tol: ctx.args.tol.or(section.quad_abs_tol).unwrap_or(1e-9),
        ..QuadConfig::default()
    };
    let spectrum = spectrum_of(&ctx.kernel)?;
    let l_max = section.l_max;
    let mu0s = section.mu0.clone();

    let per_x = |x: f64| -> Result<String, Failure> {
        let mut rows = String::new();
        for &mu0 in &mu0s {
            let b = greens::greens_moments_with(&spectrum, x, mu0, l_max, &quad)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            for l in 0..=l_max {
                rows.push_str(&format!(
                    "{},{},{},{},{},{},{},{}\n",
                    sci(x),
                    sci(mu0),
                    l,
                    sci(b.uncollided_weight),
                    sci(b.discrete_moments[l]),
                    sci(b.continuum_moments[l]),
                    sci(b.collocation_moments[l]),
                    sci(b.total_moments[l]),
                ));
            }
        }
        Ok(rows)
    };

    let blocks = fan_out_rows(&section.x, ctx.args.jobs, per_x)?;
    let mut out = String::from("x,mu0,l,uncollided_weight,discrete,continuum,collocation,total\n");
    for b in blocks {
        out.push_str(&b);
    }
    Ok(out)
}

fn cmd_verify(ctx: &Ctx) -> Result<String, Failure> {
    let samples = ctx
        .cfg
        .verify
        .as_ref()
        .and_then(|v| v.samples)
        .unwrap_or(200);
    let vcfg = VerifyConfig {
        seed: ctx.args.seed,
        samples,
        kernels: Some(vec![ctx.kernel.clone()]),
    };
    let checks = verify::run_identity_suite(&vcfg);
    let mut out = String::from("identity,max_residual,tol,status\n");
    let mut worst: f64 = 0.0;
    let mut all_pass = true;
    for c in &checks {
        worst = worst.max(c.max_residual);
        all_pass &= c.pass;
        out.push_str(&format!(
            "{},{},{},{}\n",
            c.name,
            sci(c.max_residual),
            sci(c.tol),
            if c.pass { "PASS" } else { "FAIL" }
        ));
    }
    if !all_pass {
        emit(ctx.args.out.as_deref(), &out)
            .map_err(|e| Failure::Config(format!("cannot write output: {e}")))?;
        return Err(Failure::Tolerance(
            "identity suite reported failures".into(),
        ));
    }
    if let Some(tol) = ctx.args.tol {
        if worst > tol {
            emit(ctx.args.out.as_deref(), &out)
                .map_err(|e| Failure::Config(format!("cannot write output: {e}")))?;
            return Err(Failure::Tolerance(format!(
                "worst identity residual {worst:.3e} exceeds --tol {tol:.1e}"
            )));
        }
    }
    Ok(out)
}

fn cmd_oracle_compare(ctx: &Ctx) -> Result<String, Failure> {
    let section = ctx
        .cfg
        .oracle_compare
        .as_ref()
        .ok_or_else(|| Failure::Config("config has no oracle_compare section".into()))?;
    let bound = ctx.args.tol.or(section.rel_tol).unwrap_or(1e-6);
    let quad = QuadConfig::default();
    let spectrum = spectrum_of(&ctx.kernel)?;
    let l_max = section.l_max;
    let mu0s = section.mu0.clone();

    let per_x = |x: f64| -> Result<String, Failure> {
        let mut rows = String::new();
        for &mu0 in &mu0s {
            let eig = greens::greens_moments_with(&spectrum, x, mu0, l_max, &quad)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            let oracle = greens::fourier_oracle_moments(&ctx.kernel, x, mu0, l_max, &quad)
                .map_err(|e| Failure::Numerical(e.to_string()))?;
            for l in 0..=l_max {
                let e = eig.total_moments[l];
                let o = oracle[l];
                let rel = greens::relative_difference(e, o);
                rows.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    sci(x),
                    sci(mu0),
                    l,
                    sci(e),
                    sci(o),
                    sci(rel)
                ));
            }
        }
        Ok(rows)
    };

    let blocks = fan_out_rows(&section.x, ctx.args.jobs, per_x)?;
    let mut out = String::from("x,mu0,l,eigen_route,oracle_route,rel_diff\n");
    let mut max_rel: f64 = 0.0;
    for b in blocks {
        for line in b.lines() {
            let rel: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
            max_rel = max_rel.max(rel);
        }
        out.push_str(&b);
    }
    if max_rel > bound {
        emit(ctx.args.out.as_deref(), &out)
            .map_err(|e| Failure::Config(format!("cannot write output: {e}")))?;
        return Err(Failure::Tolerance(format!(
            "max rel_diff {max_rel:.3e} exceeds the bound {bound:.1e}"
        )));
    }
    Ok(out)
}
