use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hmimo_cli::{CliError, Format, Overrides, SweepKind, SweepSpec, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "hmimo", version, about = "Near-field holographic MIMO experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// DoF improvement against distance
    DofDistance(Common),
    /// DoF improvement against transmit-to-noise power ratio
    DofPower(Common),
    /// Capacity improvement against distance (paired Monte Carlo)
    CapacityDistance(Common),
    /// Dump the wavenumber lattice
    Lattice(Common),
    /// One realisation of the scalar field on a grid
    FieldSample(Common),
    /// One realisation of the shifted angular channel
    ChannelSample(Common),
    /// Print the default spec of a subcommand as TOML
    Defaults {
        #[arg(value_enum)]
        kind: KindArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    DofDistance,
    DofPower,
    CapacityDistance,
    Lattice,
    FieldSample,
    ChannelSample,
}

impl From<KindArg> for SweepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::DofDistance => SweepKind::DofVsDistance,
            KindArg::DofPower => SweepKind::DofVsPowerRatio,
            KindArg::CapacityDistance => SweepKind::CapacityVsDistance,
            KindArg::Lattice => SweepKind::LatticeDump,
            KindArg::FieldSample => SweepKind::FieldSample,
            KindArg::ChannelSample => SweepKind::ChannelSample,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    #[value(alias = "svg-lines")]
    Svg,
    Both,
}

#[derive(Args)]
struct Common {
    /// TOML spec file; absent sections take the subcommand defaults
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo trials per point
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    /// Output directory (default: $HMIMO_OUT_DIR, else the working directory)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Print a line per finished sweep point to stderr
    #[arg(long)]
    progress: bool,
}

fn load(kind: SweepKind, c: &Common) -> Result<SweepSpec, CliError> {
    let mut spec = match &c.spec {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Spec(format!("cannot read {}: {e}", path.display())))?;
            let spec = SweepSpec::from_toml(&text)?;
            if spec.kind != kind {
                return Err(CliError::Spec(format!(
                    "{} is a {} spec",
                    path.display(),
                    spec.kind.command()
                )));
            }
            spec
        }
        None => SweepSpec::defaults(kind),
    };
    spec.apply(&Overrides {
        seed: c.seed,
        trials: c.trials,
        snr_db: c.snr_db,
        out: c.out.clone(),
        format: c.format.map(|f| match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Svg => Format::Svg,
            FormatArg::Both => Format::Both,
        }),
    });
    spec.validate()?;
    Ok(spec)
}

fn execute(kind: SweepKind, c: &Common) -> Result<Vec<PathBuf>, CliError> {
    let spec = load(kind, c)?;
    let env = std::env::var_os(OUT_DIR_ENV).map(PathBuf::from);
    if kind == SweepKind::CapacityVsDistance && c.progress {
        let rows = hmimo_cli::run::run_capacity_vs_distance_with(&spec, |r| {
            eprintln!(
                "f = {:e} Hz  z = {:.4} m  improvement = {:.3} ± {:.3} %",
                r.f_hz, r.z_m, r.improvement_pct, r.improvement_se
            )
        })?;
        let dir = hmimo_cli::output_dir(&spec, env.as_deref());
        return hmimo_cli::emit::write_outputs(&spec, &hmimo_cli::run::Table::Capacity(rows), &dir);
    }
    hmimo_cli::execute(&spec, env.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, common) = match &cli.command {
        Command::Defaults { kind } => {
            print!("{}", SweepSpec::defaults((*kind).into()).to_toml());
            return ExitCode::SUCCESS;
        }
        Command::DofDistance(c) => (SweepKind::DofVsDistance, c),
        Command::DofPower(c) => (SweepKind::DofVsPowerRatio, c),
        Command::CapacityDistance(c) => (SweepKind::CapacityVsDistance, c),
        Command::Lattice(c) => (SweepKind::LatticeDump, c),
        Command::FieldSample(c) => (SweepKind::FieldSample, c),
        Command::ChannelSample(c) => (SweepKind::ChannelSample, c),
    };
    match execute(kind, common) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("hmimo: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
