use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mixshape::moments::MomentSource;
use mixshape::pipeline::Mode;
use mixshape::{
    compare_models, estimate_node_count, exact_moments, io, moments_to_power_sums, recover_mixture, sample_deltas,
    sample_points, DeltaSamples, Error, FormKind, MomentVector, Result, Source, Wide,
};

/// Recover Gaussian mixtures, up to rigid motion, from the distribution of
/// squared distances between samples.
#[derive(Parser)]
#[command(name = "mixshape", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample squared distances (or points) from a model.
    Gen {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Write sampled points instead of squared distances.
        #[arg(long)]
        points: bool,
    },
    /// Raw moments of Δ, from samples or exactly from a model.
    Moments(MomentsArgs),
    /// Weighted power sums from raw moments.
    PowerSums {
        #[arg(long)]
        moments: PathBuf,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Recover a mixture from power sums or distance samples.
    Recover(RecoverArgs),
    /// Compare two models by power sums and shape.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        max_order: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Histogram of distance samples.
    Hist {
        #[arg(long)]
        deltas: PathBuf,
        #[arg(long)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Numerical rank of the Hankel matrix of power sums.
    EstimateK {
        #[arg(long)]
        power_sums: PathBuf,
    },
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true))]
struct MomentsArgs {
    #[arg(long, group = "input")]
    deltas: Option<PathBuf>,
    #[arg(long, group = "input", requires = "exact")]
    model: Option<PathBuf>,
    /// Evaluate the moments of the model exactly.
    #[arg(long, requires = "model")]
    exact: bool,
    #[arg(long)]
    max_order: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("input").required(true))]
struct RecoverArgs {
    #[arg(long, group = "input")]
    power_sums: Option<PathBuf>,
    #[arg(long, group = "input")]
    deltas: Option<PathBuf>,
    #[arg(long)]
    k: usize,
    #[arg(long)]
    d: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn create(path: &Path, write: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}

fn read_model(path: &Path) -> Result<mixshape::Model> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    io::model_from_json(&text)
}

fn read_deltas(path: &Path) -> Result<DeltaSamples> {
    Ok(DeltaSamples::new(
        io::read_deltas(open(path)?)?,
        None,
        FormKind::Euclidean,
    ))
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Gen {
            model,
            n,
            seed,
            out,
            points,
        } => {
            let m = read_model(&model)?;
            if points {
                let pts: Vec<Vec<f64>> = sample_points(&m, n, seed).into_iter().map(|(p, _)| p).collect();
                create(&out, |w| io::write_points(w, &pts))?;
            } else {
                let s = sample_deltas(&m, n, seed);
                create(&out, |w| io::write_deltas(w, &s.values))?;
            }
        }
        Command::Moments(args) => {
            let mv: MomentVector<Wide> = match (&args.deltas, &args.model) {
                (Some(path), _) => mixshape::empirical_moments(&read_deltas(path)?, args.max_order, 1)?,
                (_, Some(path)) => exact_moments(&read_model(path)?.cast::<Wide>(), args.max_order)?,
                _ => unreachable!("clap enforces one input"),
            };
            create(&args.out, |w| io::write_series(w, &mv.values, mv.stderr.as_deref()))?;
        }
        Command::PowerSums { moments, d, out } => {
            let (values, stderr) = io::read_series(open(&moments)?)?;
            let lift = |v: Vec<f64>| v.into_iter().map(Wide::from).collect::<Vec<_>>();
            let mv = MomentVector {
                source: if stderr.is_some() {
                    MomentSource::Empirical
                } else {
                    MomentSource::Exact
                },
                values: lift(values),
                stderr: stderr.map(lift),
                d,
            };
            let p = moments_to_power_sums(&mv)?;
            create(&out, |w| io::write_power_sums(w, &p))?;
        }
        Command::Recover(args) => {
            let (model, report, warnings) = match (&args.power_sums, &args.deltas) {
                (Some(path), _) => {
                    let p = io::read_power_sums::<Wide>(open(path)?)?;
                    let r = recover_mixture(&Source::PowerSums(p), args.k, args.d, None)?;
                    (
                        io::model_to_json(&r.recovered),
                        io::report_to_json(&r),
                        r.diagnostics.warnings,
                    )
                }
                (_, Some(path)) => {
                    let s = read_deltas(path)?;
                    let r = recover_mixture::<f64>(&Source::Deltas(s), args.k, args.d, None)?;
                    (
                        io::model_to_json(&r.recovered),
                        io::report_to_json(&r),
                        r.diagnostics.warnings,
                    )
                }
                _ => unreachable!("clap enforces one input"),
            };
            for w in warnings {
                eprintln!("warning: {w}");
            }
            create(&args.out, |w| {
                serde_json::to_writer_pretty(&mut *w, &model)?;
                writeln!(w)?;
                Ok(())
            })?;
            if let Some(path) = &args.report {
                create(path, |w| {
                    serde_json::to_writer_pretty(&mut *w, &report)?;
                    writeln!(w)?;
                    Ok(())
                })?;
            }
        }
        Command::Compare { a, b, max_order, tol } => {
            let c = compare_models(&read_model(&a)?, &read_model(&b)?, max_order, tol);
            println!("order  p_n(a)                   p_n(b)                   |difference|");
            for n in 0..c.discrepancy.len() {
                println!(
                    "{n:<6} {:<24} {:<24} {}",
                    io::fmt17(c.power_sums_a[n]),
                    io::fmt17(c.power_sums_b[n]),
                    io::fmt17(c.discrepancy[n])
                );
            }
            println!("max relative power-sum discrepancy: {}", io::fmt17(c.max_relative));
            match c.shape_distance {
                Some(s) => println!("shape distance: {}", io::fmt17(s)),
                None => println!("shape distance: n/a (sizes or weights do not match)"),
            }
            println!("tolerance: {}", io::fmt17(c.tol));
            println!("verdict: {}", if c.same_shape { "same shape" } else { "different" });
            return Ok(if c.same_shape {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            });
        }
        Command::Hist { deltas, bins, out } => {
            let h = io::histogram(&io::read_deltas(open(&deltas)?)?, bins)?;
            create(&out, |w| io::write_histogram(w, &h))?;
        }
        Command::EstimateK { power_sums } => {
            let p = io::read_power_sums::<Wide>(open(&power_sums)?)?;
            let opts = match p.stderr {
                Some(_) => mixshape::pipeline::Tolerances::empirical::<Wide>(mixshape::pipeline::relative_noise(&p)),
                // the file holds f64 text, so rank is judged at f64 precision
                None => mixshape::pipeline::Tolerances::exact::<f64>(),
            };
            let est = estimate_node_count(&p, &opts.prony);
            let mode = if opts.mode == Mode::Exact { "exact" } else { "empirical" };
            println!("nodes: {}", est.nodes);
            match components_for(est.nodes) {
                Some(k) => println!("components: {k}"),
                None => println!("components: none (node count is not k(k-1)/2 + 1)"),
            }
            println!("mode: {mode}");
            println!("rank threshold: {}", io::fmt17(opts.prony.rank_tol));
            println!("scale: {}", io::fmt17(est.scale));
            println!("singular values:");
            for s in est.singular_values {
                println!("  {}", io::fmt17(s));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

/// `k` with `k(k−1)/2 + 1 = nodes`.
fn components_for(nodes: usize) -> Option<usize> {
    (1..=nodes).find(|k| k * (k - 1) / 2 + 1 == nodes)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            if e.is_numerical() {
                match &e {
                    Error::Stage { stage, source } => eprintln!("error [{}]: {source}", stage.tag()),
                    _ => eprintln!("error [numerical]: {e}"),
                }
                ExitCode::from(3)
            } else {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        }
    }
}
