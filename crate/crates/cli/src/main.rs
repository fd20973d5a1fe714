use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qoe_metrics::dataset_io::{build_dataset, read_ratings, ThresholdValues};
use qoe_metrics::emodel::{curve_data, default_table, EModelPoint};
use qoe_metrics::report::{emit, render_curve, render_emodel_table, FitReport};
use qoe_metrics::sos_model::verify_fit_invariance;
use qoe_metrics::{
    analyze, save_dataset, Dataset, Metadata, QoeError, QuantileSpec, ReportFormat, Result,
    Scale, ScaleKind, Statistic, Transform, VarianceMode,
};

#[derive(Parser)]
#[command(name = "qoe", version, about = "Quality-of-Experience metrics for subjective rating studies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-condition MOS, SOS, quantiles, acceptability and GoB/PoW/TME, plus the SOS fit.
    Analyze {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
        /// Quantiles to report, as n/q (e.g. 1/2,9/10).
        #[arg(long, value_delimiter = ',')]
        quantiles: Vec<QuantileSpec>,
        /// Thresholds for θ-acceptability.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        theta: Vec<f64>,
        /// GoB/PoW/TME thresholds: `default` or `gb,pw,te`.
        #[arg(long)]
        thresholds: Option<String>,
        /// Also report the empirical distribution of each condition.
        #[arg(long)]
        pmf: bool,
    },
    /// Fits the SOS hypothesis parameter a.
    FitSos {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// MOS / R / PoW / GoB / TME table.
    EmodelTable {
        /// MOS values to tabulate.
        #[arg(long, value_delimiter = ',', conflicts_with = "default_rows", allow_negative_numbers = true)]
        mos: Vec<f64>,
        /// The twelve standard rows (the default when --mos is absent).
        #[arg(long)]
        default_rows: bool,
        #[command(flatten)]
        out: TableOutput,
    },
    /// Converts transmission ratings R and MOS values into table rows.
    EmodelConvert {
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        r: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        mos: Vec<f64>,
        #[command(flatten)]
        out: TableOutput,
    },
    /// Maps ratings linearly onto another scale.
    Transform {
        /// Ratings CSV.
        ratings: PathBuf,
        /// Metadata JSON of the input.
        #[arg(long)]
        metadata: Option<PathBuf>,
        /// Source scale, lo:hi[:discrete]. Overrides the metadata scale.
        #[arg(long, value_parser = parse_scale)]
        from: Option<Scale>,
        /// Target scale, lo:hi[:discrete].
        #[arg(long, value_parser = parse_scale)]
        to: Scale,
        /// Transformed ratings CSV (stdout when absent).
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Metadata JSON describing the transformed dataset.
        #[arg(long, requires = "output")]
        metadata_output: Option<PathBuf>,
        /// Fit a before and after the transform and print both.
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value_t = Variance::Population)]
        variance: Variance,
    },
    /// GoB, PoW and neutral percentages over a MOS range, for plotting.
    CurveData {
        #[arg(long, default_value_t = 1.0)]
        mos_min: f64,
        #[arg(long, default_value_t = 4.5)]
        mos_max: f64,
        #[arg(long, default_value_t = 351)]
        steps: usize,
        #[command(flatten)]
        out: TableOutput,
    },
}

#[derive(Args)]
struct Input {
    /// Ratings CSV with header subject_id,condition_id,rating.
    ratings: PathBuf,
    /// Metadata JSON (scale, conditions, statistics, ...).
    #[arg(long)]
    metadata: Option<PathBuf>,
    /// Rating scale, lo:hi[:discrete]. Overrides the metadata scale.
    #[arg(long, value_parser = parse_scale)]
    scale: Option<Scale>,
    #[arg(long, value_enum, default_value_t = Variance::Population)]
    variance: Variance,
}

#[derive(Args)]
struct Output {
    /// Output file (stdout when absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct TableOutput {
    /// Output file (stdout when absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

impl From<Format> for ReportFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Json => ReportFormat::Json,
            Format::Csv => ReportFormat::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variance {
    Population,
    Sample,
}

impl From<Variance> for VarianceMode {
    fn from(v: Variance) -> Self {
        match v {
            Variance::Population => VarianceMode::Population,
            Variance::Sample => VarianceMode::Sample,
        }
    }
}

fn parse_scale(s: &str) -> std::result::Result<Scale, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let kind = match parts.as_slice() {
        [_, _] | [_, _, "continuous"] => ScaleKind::Continuous,
        [_, _, "discrete"] => ScaleKind::Discrete,
        _ => return Err(format!("expected lo:hi[:discrete], got `{s}`")),
    };
    let bound = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| format!("`{t}` is not a number"))
    };
    Scale::new(kind, bound(parts[0])?, bound(parts[1])?).map_err(|e| e.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| QoeError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_metadata(path: Option<&Path>) -> Result<Metadata> {
    match path {
        Some(p) => Metadata::read(open(p)?),
        None => Ok(Metadata::default()),
    }
}

fn load(ratings: &Path, metadata: Option<&Path>, scale: Option<Scale>) -> Result<Dataset> {
    let mut meta = read_metadata(metadata)?;
    if scale.is_some() {
        meta.scale = scale;
    }
    let ratings = read_ratings(open(ratings)?)?;
    build_dataset(ratings, &meta)
}

fn parse_thresholds(spec: &str, scale: &Scale) -> Result<Option<qoe_metrics::Thresholds>> {
    if spec == "default" {
        return Ok(None);
    }
    let values = spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|_| QoeError::InvalidParameter(format!("bad thresholds `{spec}`")))?;
    let [gob, pow, tme] = values[..] else {
        return Err(QoeError::InvalidParameter(format!(
            "expected `default` or three thresholds gb,pw,te, got `{spec}`"
        )));
    };
    ThresholdValues { gob, pow, tme }.on_scale(scale).map(Some)
}

fn table_rows(mos: &[f64]) -> Result<Vec<EModelPoint<f64>>> {
    if mos.is_empty() {
        default_table()
    } else {
        mos.iter().map(|&m| EModelPoint::from_mos(m)).collect()
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Analyze {
            input,
            out,
            quantiles,
            theta,
            thresholds,
            pmf,
        } => {
            let mut ds = load(&input.ratings, input.metadata.as_deref(), input.scale)?;
            let def = &mut ds.definition;
            if !quantiles.is_empty() {
                def.request(Statistic::Quantiles);
                def.quantiles = quantiles;
            }
            if !theta.is_empty() {
                def.request(Statistic::Acceptability);
                def.thetas = theta;
            }
            if pmf {
                def.request(Statistic::Pmf);
            }
            if let Some(spec) = thresholds {
                def.request(Statistic::GobPowTme);
                def.thresholds = parse_thresholds(&spec, &def.scale)?;
            }
            let report = analyze(&ds, input.variance.into())?;
            emit(&report.render(out.format.into())?, out.output.as_deref())
        }
        Command::FitSos { input, out } => {
            let ds = load(&input.ratings, input.metadata.as_deref(), input.scale)?;
            let report = FitReport::from_dataset(&ds, input.variance.into())?;
            emit(&report.render(out.format.into())?, out.output.as_deref())
        }
        Command::EmodelTable { mos, out, .. } => {
            let text = render_emodel_table(&table_rows(&mos)?, out.format.into())?;
            emit(&text, out.output.as_deref())
        }
        Command::EmodelConvert { r, mos, out } => {
            if r.is_empty() && mos.is_empty() {
                return Err(QoeError::InvalidParameter("pass --r and/or --mos values".into()));
            }
            let mut rows = r
                .iter()
                .map(|&r| EModelPoint::from_r(r))
                .collect::<Result<Vec<_>>>()?;
            for &m in &mos {
                rows.push(EModelPoint::from_mos(m)?);
            }
            emit(&render_emodel_table(&rows, out.format.into())?, out.output.as_deref())
        }
        Command::Transform {
            ratings,
            metadata,
            from,
            to,
            output,
            metadata_output,
            verify,
            variance,
        } => {
            let ds = load(&ratings, metadata.as_deref(), from)?;
            let transform = Transform::new(*ds.scale(), to);
            let moved = transform.apply_dataset(&ds)?;
            if verify {
                let (before, after) = verify_fit_invariance(&ds, &transform, variance.into())?;
                eprintln!("a before: {before}");
                eprintln!("a after:  {after}");
                eprintln!("difference: {:e}", (after - before).abs());
            }
            match output {
                Some(path) => save_dataset(&moved, &path, metadata_output.as_deref()),
                None => qoe_metrics::write_ratings(&moved.ratings, std::io::stdout().lock()),
            }
        }
        Command::CurveData {
            mos_min,
            mos_max,
            steps,
            out,
        } => {
            let points = curve_data(mos_min, mos_max, steps)?;
            emit(&render_curve(&points, out.format.into())?, out.output.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if let QoeError::Validation(violations) = &e {
                for v in violations.iter().skip(1) {
                    eprintln!("  {v}");
                }
            }
            ExitCode::from(if e.is_input_failure() { 2 } else { 1 })
        }
    }
}
