//! Flag parsing and validation into an [`ExperimentConfig`].

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand};
use scms_ldpc::code::DegreeDistribution;
use scms_ldpc::decoder::{QuantSpec, Variant};
use scms_ldpc::ga::{CheckErrorModel, Recurrence};
use scms_ldpc::harness::{FrameSelector, MessageKind, Population};

#[derive(Parser, Debug)]
#[command(name = "scms", version, about = "Self-corrected min-sum LDPC experiments")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// BER/FER over an Eb/N0 grid
    Sim {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecoderArgs,
        /// Eb/N0 grid in dB: `start:step:stop` (inclusive), a list `a,b,c` or one value
        #[arg(long)]
        ebno: String,
        #[arg(long, default_value_t = 100)]
        min_errors: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Per-iteration sign-change and erasure fractions
    Signstats {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecoderArgs,
        #[arg(long)]
        ebno: f64,
        #[arg(long, default_value_t = 1000)]
        frames: u64,
        /// all, failed or successful
        #[arg(long, default_value = "failed")]
        select: String,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Histogram of edge messages at one iteration
    Hist {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecoderArgs,
        #[arg(long)]
        ebno: f64,
        #[arg(long)]
        iteration: usize,
        /// check or variable
        #[arg(long, default_value = "check")]
        kind: String,
        /// all or unerased
        #[arg(long, default_value = "all")]
        population: String,
        #[arg(long, default_value_t = 100)]
        frames: u64,
        #[arg(long, default_value_t = 100)]
        bins: usize,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Gaussian-approximation threshold by bisection
    Threshold {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long, default_value_t = 0.3)]
        sigma_lo: f64,
        #[arg(long, default_value_t = 2.0)]
        sigma_hi: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Density-evolution trajectory at one noise level
    Detraj {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        ga: GaArgs,
        #[arg(long, conflicts_with = "ebno")]
        sigma: Option<f64>,
        /// Eb/N0 in dB, converted with the ensemble's design rate
        #[arg(long)]
        ebno: Option<f64>,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Tree-pruning oracle on random computation trees
    Treecheck {
        #[arg(long, default_value_t = 4)]
        depth: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 60)]
        max_nodes: usize,
        /// Mean of the leaf LLRs (variance is twice the mean)
        #[arg(long, default_value_t = 1.0)]
        mean: f64,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args, Debug)]
struct CodeArgs {
    #[arg(long, group = "source")]
    alist: Option<PathBuf>,
    #[arg(long, group = "source")]
    qc: Option<PathBuf>,
    /// `dv,dc` for a regular ensemble or `i:l_i,...;j:r_j,...` edge fractions
    #[arg(long, group = "source")]
    ensemble: Option<String>,
    /// Code length when sampling from `--ensemble`
    #[arg(long)]
    n: Option<usize>,
    /// Seed of the sampled graph
    #[arg(long, default_value_t = 1)]
    code_seed: u64,
}

#[derive(Args, Debug)]
struct DecoderArgs {
    /// sp, ms, nms:<scale>, oms:<offset> or scms
    #[arg(long, default_value = "scms")]
    decoder: String,
    /// Defaults to 200, or 30 with a quantizer
    #[arg(long)]
    max_iter: Option<usize>,
    /// float or fig4
    #[arg(long, default_value = "float")]
    quant: String,
}

#[derive(Args, Debug)]
struct GaArgs {
    /// theorem1 or theorem2
    #[arg(long, default_value = "theorem1")]
    recurrence: String,
    /// unconditional or conditioned
    #[arg(long, default_value = "unconditional")]
    check_model: String,
    #[arg(long, default_value_t = 10_000)]
    de_iters: usize,
}

#[derive(Args, Debug)]
struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV destination; nothing is written without it
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker threads, 0 for one per core
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CodeSource {
    Alist(PathBuf),
    Qc(PathBuf),
    Ensemble {
        spec: String,
        dist: DegreeDistribution,
        n: Option<usize>,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecoderSpec {
    pub variant: Variant,
    pub max_iter: usize,
    pub quant: Option<QuantSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaSpec {
    pub recurrence: Recurrence,
    pub check_model: CheckErrorModel,
    pub de_iters: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Sim {
        ebno: Vec<f64>,
        min_errors: u64,
        max_frames: u64,
    },
    Signstats {
        ebno: f64,
        frames: u64,
        select: FrameSelector,
    },
    Hist {
        ebno: f64,
        iteration: usize,
        kind: MessageKind,
        population: Population,
        frames: u64,
        bins: usize,
    },
    Threshold {
        ga: GaSpec,
        tol: f64,
        sigma_lo: f64,
        sigma_hi: f64,
    },
    Detraj {
        ga: GaSpec,
        sigma: Option<f64>,
        ebno: Option<f64>,
    },
    Treecheck {
        depth: usize,
        trials: usize,
        max_nodes: usize,
        mean: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sim { .. } => "sim",
            Command::Signstats { .. } => "signstats",
            Command::Hist { .. } => "hist",
            Command::Threshold { .. } => "threshold",
            Command::Detraj { .. } => "detraj",
            Command::Treecheck { .. } => "treecheck",
        }
    }
}

/// A validated experiment. `code` and `decoder` are `None` for commands
/// that do not use them.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub command: Command,
    pub code: Option<CodeSource>,
    pub decoder: Option<DecoderSpec>,
    pub seed: u64,
    pub output: Option<PathBuf>,
    pub workers: usize,
}

fn usage(msg: impl std::fmt::Display) -> clap::Error {
    Cli::command().error(ErrorKind::ValueValidation, msg)
}

/// Expands `start:step:stop` inclusively; also accepts `a,b,c` or a single value.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("bad number {t:?} in grid {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let grid = match parts.as_slice() {
        [start, step, stop] => {
            let (a, h, b) = (num(start)?, num(step)?, num(stop)?);
            if !(h > 0.0) || b < a {
                return Err(format!("grid {s:?} needs step > 0 and stop >= start"));
            }
            let count = ((b - a) / h + 1e-9).floor() as usize + 1;
            // round away accumulated binary noise such as 1.4999999999999998
            (0..count).map(|k| ((a + k as f64 * h) * 1e9).round() / 1e9).collect()
        }
        [list] => list.split(',').map(num).collect::<Result<Vec<_>, _>>()?,
        _ => return Err(format!("grid {s:?} is neither start:step:stop nor a list")),
    };
    if grid.is_empty() || grid.iter().any(|x| !x.is_finite()) {
        return Err(format!("grid {s:?} is empty or not finite"));
    }
    Ok(grid)
}

/// `dv,dc` or `i:l_i,...;j:r_j,...`.
pub fn parse_ensemble(s: &str) -> Result<DegreeDistribution, String> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let err = |e: scms_ldpc::code::CodeError| format!("ensemble {s:?}: {e}");
    if let Some((l, r)) = s.split_once(';') {
        let side = |t: &str| -> Result<Vec<(usize, f64)>, String> {
            t.split(',')
                .map(|p| {
                    let (d, f) = p.split_once(':').ok_or(format!("expected degree:fraction, got {p:?}"))?;
                    let d = d.parse().map_err(|_| format!("bad degree {d:?}"))?;
                    let f = f.parse().map_err(|_| format!("bad fraction {f:?}"))?;
                    Ok((d, f))
                })
                .collect()
        };
        return DegreeDistribution::new(&side(l)?, &side(r)?).map_err(err);
    }
    let (dv, dc) = s.split_once(',').ok_or(format!("ensemble {s:?} is neither dv,dc nor lambda;rho"))?;
    let dv = dv.parse().map_err(|_| format!("bad degree {dv:?}"))?;
    let dc = dc.parse().map_err(|_| format!("bad degree {dc:?}"))?;
    DegreeDistribution::regular(dv, dc).map_err(err)
}

fn code_source(a: CodeArgs, need_length: bool) -> Result<CodeSource, clap::Error> {
    match (a.alist, a.qc, a.ensemble) {
        (Some(p), None, None) => Ok(CodeSource::Alist(p)),
        (None, Some(p), None) => Ok(CodeSource::Qc(p)),
        (None, None, Some(spec)) => {
            let dist = parse_ensemble(&spec).map_err(usage)?;
            if need_length && a.n.is_none() {
                return Err(usage("--ensemble needs --n to sample a code"));
            }
            Ok(CodeSource::Ensemble {
                spec: spec.chars().filter(|c| !c.is_whitespace()).collect(),
                dist,
                n: a.n,
                seed: a.code_seed,
            })
        }
        _ => Err(Cli::command().error(
            ErrorKind::MissingRequiredArgument,
            "exactly one of --alist, --qc or --ensemble is required",
        )),
    }
}

fn decoder_spec(d: DecoderArgs) -> Result<DecoderSpec, clap::Error> {
    let variant: Variant = d.decoder.parse().map_err(usage)?;
    let quant = match d.quant.to_ascii_lowercase().as_str() {
        "float" => None,
        "fig4" => Some(QuantSpec::fig4()),
        other => return Err(usage(format!("unknown quantizer {other:?} (expected float or fig4)"))),
    };
    let max_iter = d.max_iter.unwrap_or(if quant.is_some() { 30 } else { 200 });
    if max_iter == 0 {
        return Err(usage("--max-iter must be at least 1"));
    }
    Ok(DecoderSpec {
        variant,
        max_iter,
        quant,
    })
}

fn ga_spec(g: GaArgs) -> Result<GaSpec, clap::Error> {
    let check_model = match g.check_model.to_ascii_lowercase().as_str() {
        "unconditional" => CheckErrorModel::Unconditional,
        "conditioned" => CheckErrorModel::ConditionedOnUnerased,
        other => return Err(usage(format!("unknown check model {other:?}"))),
    };
    Ok(GaSpec {
        recurrence: g.recurrence.parse().map_err(usage)?,
        check_model,
        de_iters: g.de_iters,
    })
}

/// Parses a full argument vector (including the program name).
pub fn parse_args<I, T>(argv: I) -> Result<ExperimentConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (command, code, decoder, common) = match cli.command {
        Cmd::Sim {
            code,
            dec,
            ebno,
            min_errors,
            max_frames,
            common,
        } => {
            let ebno = parse_grid(&ebno).map_err(usage)?;
            let cmd = Command::Sim {
                ebno,
                min_errors,
                max_frames,
            };
            (cmd, Some(code_source(code, true)?), Some(decoder_spec(dec)?), common)
        }
        Cmd::Signstats {
            code,
            dec,
            ebno,
            frames,
            select,
            common,
        } => {
            let cmd = Command::Signstats {
                ebno,
                frames,
                select: select.parse().map_err(usage)?,
            };
            (cmd, Some(code_source(code, true)?), Some(decoder_spec(dec)?), common)
        }
        Cmd::Hist {
            code,
            dec,
            ebno,
            iteration,
            kind,
            population,
            frames,
            bins,
            common,
        } => {
            let cmd = Command::Hist {
                ebno,
                iteration,
                kind: kind.parse().map_err(usage)?,
                population: population.parse().map_err(usage)?,
                frames,
                bins,
            };
            (cmd, Some(code_source(code, true)?), Some(decoder_spec(dec)?), common)
        }
        Cmd::Threshold {
            code,
            ga,
            tol,
            sigma_lo,
            sigma_hi,
            common,
        } => {
            let cmd = Command::Threshold {
                ga: ga_spec(ga)?,
                tol,
                sigma_lo,
                sigma_hi,
            };
            (cmd, Some(code_source(code, false)?), None, common)
        }
        Cmd::Detraj {
            code,
            ga,
            sigma,
            ebno,
            common,
        } => {
            if sigma.is_none() && ebno.is_none() {
                return Err(usage("detraj needs --sigma or --ebno"));
            }
            let cmd = Command::Detraj {
                ga: ga_spec(ga)?,
                sigma,
                ebno,
            };
            (cmd, Some(code_source(code, false)?), None, common)
        }
        Cmd::Treecheck {
            depth,
            trials,
            max_nodes,
            mean,
            common,
        } => {
            if !(mean > 0.0) || depth == 0 || trials == 0 {
                return Err(usage("treecheck needs depth >= 1, trials >= 1 and mean > 0"));
            }
            let cmd = Command::Treecheck {
                depth,
                trials,
                max_nodes,
                mean,
            };
            (cmd, None, None, common)
        }
    };
    Ok(ExperimentConfig {
        command,
        code,
        decoder,
        seed: common.seed,
        output: common.output,
        workers: common.workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inclusive_grid() {
        assert_eq!(parse_grid("1.0:0.5:3.0").unwrap(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(parse_grid("0:0.1:0.3").unwrap(), vec![0.0, 0.1, 0.2, 0.3]);
        assert_eq!(parse_grid("2").unwrap(), vec![2.0]);
        assert_eq!(parse_grid("1,3").unwrap(), vec![1.0, 3.0]);
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("1:0:3").is_err());
        assert!(parse_grid("a:b").is_err());
    }

    #[test]
    fn ensembles() {
        let d = parse_ensemble("3,6").unwrap();
        assert_eq!(d, DegreeDistribution::regular(3, 6).unwrap());
        let d = parse_ensemble("3:0.3, 4:0.7; 7:0.7,8:0.3").unwrap();
        assert_eq!(d.lambda(4), 0.7);
        assert_eq!(d.rho(8), 0.3);
        assert!(parse_ensemble("3").is_err());
        assert!(parse_ensemble("3:0.5;6:1").is_err());
    }
}
