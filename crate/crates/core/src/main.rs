// negated float comparisons are used on purpose so that NaN is rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cltlab::charfun::{charfun_grid, levy_invert, levy_invert_auto, CharFn};
use cltlab::clt::{emit_csv, format_number, run_clt, CltExperiment};
use cltlab::finite_space::{are_independent, expectation, variance, FiniteProbSpace, FiniteRV};
use cltlab::numerics::{dirichlet_integral, gaussian_moment};
use cltlab::weak_convergence::{cdf_distance, levy_metric, portmanteau_testfn, ConvergenceProbe};
use cltlab::{DiscreteDist, Dist, Error, Result};

#[derive(Parser)]
#[command(
    name = "cltlab",
    version,
    about = "Characteristic functions, weak convergence and CLT experiments"
)]
struct Cli {
    /// Numerical tolerance
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for Monte Carlo draws
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Distances of normalized i.i.d. sums from N(0, 1), as CSV
    Clt {
        /// Discrete distribution file or preset:bernoulli / preset:die
        #[arg(long)]
        base: String,
        /// Comma-separated, strictly increasing sample sizes
        #[arg(long, value_delimiter = ',', default_value = "1,4,16,64,256")]
        ns: Vec<usize>,
        /// Simulate this many sums per n instead of convolving exactly
        #[arg(long)]
        mc: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Characteristic function on an even grid, as CSV t,re,im
    Charfun {
        #[arg(long)]
        dist: String,
        #[arg(long, default_value_t = -10.0, allow_negative_numbers = true)]
        tmin: f64,
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        tmax: f64,
        #[arg(long, default_value_t = 401)]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover P(a < X <= b) from the characteristic function
    Invert {
        #[arg(long)]
        dist: String,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Truncation of the inversion integral; chosen automatically if absent
        #[arg(long = "T")]
        t_max: Option<f64>,
    },
    /// Distances between two discrete distributions, as CSV metric,value
    Weakdist {
        #[arg(long)]
        left: PathBuf,
        #[arg(long)]
        right: PathBuf,
    },
    /// Reference integrals: preset:sinc or gauss_moment:<k>
    Integrate {
        #[arg(long = "fn")]
        func: String,
    },
    /// Finite probability space demonstrations
    Space {
        #[arg(long, default_value = "die")]
        demo: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {msg}", e.code());
            ExitCode::FAILURE
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_discrete(source: &str) -> Result<DiscreteDist> {
    match source {
        "preset:bernoulli" => DiscreteDist::new(vec![(-1.0, 0.5), (1.0, 0.5)]),
        "preset:die" => DiscreteDist::uniform(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]),
        s if s.starts_with("preset:") => Err(Error::InvalidParams(format!(
            "unknown discrete preset `{s}`"
        ))),
        path => DiscreteDist::from_text(&std::fs::read_to_string(path)?),
    }
}

fn load_dist(source: &str) -> Result<Dist> {
    match source {
        "preset:normal" => Ok(Dist::standard_normal()),
        s => load_discrete(s).map(Dist::Discrete),
    }
}

fn run(cli: Cli) -> Result<()> {
    let tol = cli.tol;
    if !(tol > 0.0) {
        return Err(Error::InvalidTolerance(tol));
    }
    match cli.cmd {
        Cmd::Clt { base, ns, mc, out } => {
            let base = Dist::Discrete(load_discrete(&base)?);
            let mut exp = CltExperiment::new(&base, ns)?
                .with_seed(cli.seed)
                .with_tol(tol)?;
            if let Some(draws) = mc {
                exp = exp.with_monte_carlo(draws)?;
            }
            let report = run_clt(&exp)?;
            emit_csv(&report, &mut output(out.as_ref())?)
        }
        Cmd::Charfun {
            dist,
            tmin,
            tmax,
            steps,
            out,
        } => {
            let phi = match dist.as_str() {
                "preset:normal" => CharFn::StandardNormal,
                s => CharFn::Of(load_dist(s)?),
            };
            let mut w = output(out.as_ref())?;
            writeln!(w, "t,re,im")?;
            for (t, z) in charfun_grid(&phi, tmin, tmax, steps)? {
                writeln!(
                    w,
                    "{},{},{}",
                    format_number(t),
                    format_number(z.re),
                    format_number(z.im)
                )?;
            }
            w.flush()?;
            Ok(())
        }
        Cmd::Invert { dist, a, b, t_max } => {
            let phi = match dist.as_str() {
                "preset:normal" => CharFn::StandardNormal,
                s => CharFn::Of(load_dist(s)?),
            };
            let p = match t_max {
                Some(t) => levy_invert(&phi, a, b, t, tol)?,
                None => levy_invert_auto(&phi, a, b, tol.max(1e-6))?,
            };
            println!("{}", format_number(p));
            Ok(())
        }
        Cmd::Weakdist { left, right } => {
            let read = |p: &PathBuf| -> Result<Dist> {
                Ok(Dist::Discrete(DiscreteDist::from_text(
                    &std::fs::read_to_string(p)?,
                )?))
            };
            let (mu, limit) = (read(&left)?, read(&right)?);
            let probe = ConvergenceProbe::with_defaults(limit.clone())?;
            let cdf = cdf_distance(&mu, &probe)?;
            let levy = levy_metric(&mu, &limit, tol)?;
            let testfn = portmanteau_testfn(&mu, &probe)?
                .into_iter()
                .fold(0.0f64, f64::max);
            let mut w = output(None)?;
            writeln!(w, "metric,value")?;
            writeln!(w, "cdf_sup,{}", format_number(cdf))?;
            writeln!(w, "levy,{}", format_number(levy))?;
            writeln!(w, "testfn_max,{}", format_number(testfn))?;
            w.flush()?;
            Ok(())
        }
        Cmd::Integrate { func } => {
            let v = if func == "preset:sinc" {
                dirichlet_integral(tol)?
            } else if let Some(k) = func.strip_prefix("gauss_moment:") {
                let k: u32 = k.parse().map_err(|_| {
                    Error::InvalidParams(format!("moment order `{k}` is not a nonnegative integer"))
                })?;
                gaussian_moment(k, tol)?
            } else {
                return Err(Error::InvalidParams(format!("unknown integrand `{func}`")));
            };
            println!("{}", format_number(v));
            Ok(())
        }
        Cmd::Space { demo } => {
            if demo != "die" {
                return Err(Error::InvalidParams(format!("unknown demo `{demo}`")));
            }
            let die = FiniteProbSpace::fair_die();
            let face = FiniteRV::new((1..=6).map(f64::from).collect())?;
            let two = die.product(&die)?;
            let first = FiniteRV::new((0..36).map(|i| f64::from(i / 6 + 1)).collect())?;
            let second = FiniteRV::new((0..36).map(|i| f64::from(i % 6 + 1)).collect())?;
            println!("mean,{}", format_number(expectation(&die, &face)?));
            println!("variance,{}", format_number(variance(&die, &face)?));
            println!(
                "two_dice_independent,{}",
                are_independent(&two, &[first.clone(), second])?
            );
            println!(
                "same_die_twice_independent,{}",
                are_independent(&two, &[first.clone(), first])?
            );
            Ok(())
        }
    }
}
