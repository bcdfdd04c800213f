//! Library side of the `scms` binary: argument parsing and experiment runs.

mod args;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use scms_ldpc::channel::ebno_to_sigma;
use scms_ldpc::code::{degree_distributions, expand_qc, load_alist, load_qc, sample_irregular, CodeError, TannerGraph};
use scms_ldpc::decoder::{DecodeError, DecoderConfig, Variant};
use scms_ldpc::ga::{
    iterations_to_converge, threshold_search, trajectory, EnsembleParams, GaError, GaOptions, ThresholdOptions,
};
use scms_ldpc::harness::report::{
    config_echo, write_histogram, write_histogram_sidecar, write_iterstats, write_simrecords, write_trajectory,
};
use scms_ldpc::harness::tree::{prune_erased, random_tree, tree_decode, tree_run};
use scms_ldpc::harness::{
    message_histogram, run_monte_carlo, sign_change_stats, HarnessError, HistogramRequest, SimSetup, StopRule,
};
use thiserror::Error;

pub use args::{parse_args, parse_ensemble, parse_grid, CodeSource, Command, DecoderSpec, ExperimentConfig, GaSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    CodeFile { path: PathBuf, source: CodeError },
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Decode(#[from] DecodeError),
    #[error(transparent)]
    Ga(#[from] GaError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Builds the Tanner graph named by `source`. Ensemble sources need a length.
pub fn load_code(source: &CodeSource) -> Result<TannerGraph, CliError> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| CliError::Read { path: p.into(), source: e });
    let in_file = |p: &Path, e: CodeError| CliError::CodeFile { path: p.into(), source: e };
    match source {
        CodeSource::Alist(p) => load_alist(&read(p)?).map_err(|e| in_file(p, e)),
        CodeSource::Qc(p) => {
            let base = load_qc(&read(p)?).map_err(|e| in_file(p, e))?;
            expand_qc(&base).map_err(|e| in_file(p, e))
        }
        CodeSource::Ensemble { dist, n, seed, .. } => {
            let n = n.ok_or_else(|| CliError::Invalid("ensemble code needs a length".into()))?;
            Ok(sample_irregular(dist, n, *seed)?)
        }
    }
}

/// Short label used in CSV rows and the config echo.
pub fn code_label(source: &CodeSource) -> String {
    let stem = |p: &Path| p.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    match source {
        CodeSource::Alist(p) => format!("alist:{}", stem(p)),
        CodeSource::Qc(p) => format!("qc:{}", stem(p)),
        CodeSource::Ensemble { spec, n, seed, .. } => match n {
            Some(n) => format!("ens:{spec}:n{n}:s{seed}"),
            None => format!("ens:{spec}"),
        },
    }
}

fn decoder_config(spec: &DecoderSpec) -> DecoderConfig {
    DecoderConfig::new(spec.variant).max_iter(spec.max_iter).quant(spec.quant)
}

/// The config echo written at the top of every CSV. Worker count and output
/// path are left out so that files from different runs compare byte for byte.
pub fn echo_line(config: &ExperimentConfig) -> String {
    let mut pairs: Vec<(&str, String)> = vec![("cmd", config.command.name().into())];
    if let Some(code) = &config.code {
        pairs.push(("code", code_label(code)));
    }
    if let Some(d) = &config.decoder {
        pairs.push(("decoder", d.variant.to_string()));
        pairs.push(("max_iter", d.max_iter.to_string()));
        pairs.push(("quant", if d.quant.is_some() { "fig4" } else { "float" }.into()));
    }
    let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    match &config.command {
        Command::Sim {
            ebno,
            min_errors,
            max_frames,
        } => {
            pairs.push(("ebno", join(ebno)));
            pairs.push(("min_errors", min_errors.to_string()));
            pairs.push(("max_frames", max_frames.to_string()));
        }
        Command::Signstats { ebno, frames, select } => {
            pairs.push(("ebno", ebno.to_string()));
            pairs.push(("frames", frames.to_string()));
            pairs.push(("select", select.to_string()));
        }
        Command::Hist {
            ebno,
            iteration,
            kind,
            population,
            frames,
            bins,
        } => {
            pairs.push(("ebno", ebno.to_string()));
            pairs.push(("iteration", iteration.to_string()));
            pairs.push(("kind", kind.to_string()));
            pairs.push(("population", population.to_string()));
            pairs.push(("frames", frames.to_string()));
            pairs.push(("bins", bins.to_string()));
        }
        Command::Threshold {
            ga,
            tol,
            sigma_lo,
            sigma_hi,
        } => {
            push_ga(&mut pairs, ga);
            pairs.push(("tol", tol.to_string()));
            pairs.push(("bracket", format!("{sigma_lo},{sigma_hi}")));
        }
        Command::Detraj { ga, sigma, ebno } => {
            push_ga(&mut pairs, ga);
            if let Some(s) = sigma {
                pairs.push(("sigma", s.to_string()));
            }
            if let Some(e) = ebno {
                pairs.push(("ebno", e.to_string()));
            }
        }
        Command::Treecheck {
            depth,
            trials,
            max_nodes,
            mean,
        } => {
            pairs.push(("depth", depth.to_string()));
            pairs.push(("trials", trials.to_string()));
            pairs.push(("max_nodes", max_nodes.to_string()));
            pairs.push(("mean", mean.to_string()));
        }
    }
    pairs.push(("seed", config.seed.to_string()));
    config_echo(&pairs)
}

fn push_ga(pairs: &mut Vec<(&str, String)>, ga: &GaSpec) {
    pairs.push(("recurrence", ga.recurrence.to_string()));
    let model = match ga.check_model {
        scms_ldpc::ga::CheckErrorModel::Unconditional => "unconditional",
        scms_ldpc::ga::CheckErrorModel::ConditionedOnUnerased => "conditioned",
    };
    pairs.push(("check_model", model.into()));
    pairs.push(("de_iters", ga.de_iters.to_string()));
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

/// `out.csv` -> `out.stats.csv`
fn sidecar_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.stats.csv"))
}

fn ga_options(ga: &GaSpec) -> GaOptions {
    GaOptions {
        check_model: ga.check_model,
        ..GaOptions::default()
    }
}

fn ensemble_dist(source: &CodeSource) -> Result<scms_ldpc::code::DegreeDistribution, CliError> {
    match source {
        CodeSource::Ensemble { dist, .. } => Ok(dist.clone()),
        other => Ok(degree_distributions(&load_code(other)?)),
    }
}

/// Runs one experiment, printing summary lines to `out` and writing CSV to
/// the configured output path.
pub fn run<W: Write>(config: &ExperimentConfig, out: &mut W) -> Result<(), CliError> {
    let echo = echo_line(config);
    let missing = || CliError::Invalid(format!("{} needs a code and a decoder", config.command.name()));
    match &config.command {
        Command::Sim {
            ebno,
            min_errors,
            max_frames,
        } => {
            let (code, dec) = config.code.as_ref().zip(config.decoder.as_ref()).ok_or_else(missing)?;
            let graph = load_code(code)?;
            let setup = SimSetup::new(&graph, code_label(code), decoder_config(dec));
            let records = run_monte_carlo(&setup, ebno, StopRule::new(*min_errors, *max_frames), config.seed, config.workers)?;
            for r in &records {
                writeln!(
                    out,
                    "ebno={} frames={} frame_errors={} ber={:.3e} fer={:.3e} avg_iters={:.2}",
                    r.ebno_db,
                    r.frames,
                    r.frame_errors,
                    r.ber(),
                    r.fer(),
                    r.avg_iterations()
                )?;
            }
            if let Some(p) = &config.output {
                write_simrecords(create(p)?, &echo, &records)?;
            }
        }
        Command::Signstats { ebno, frames, select } => {
            let (code, dec) = config.code.as_ref().zip(config.decoder.as_ref()).ok_or_else(missing)?;
            let graph = load_code(code)?;
            let stats = sign_change_stats(
                &graph,
                &decoder_config(dec),
                *ebno,
                *frames,
                *select,
                config.seed,
                config.workers,
            )?;
            let first = stats.rows.first().map_or(0.0, |r| r.sign_change_fraction);
            let last = stats.rows.last().map_or(0.0, |r| r.sign_change_fraction);
            writeln!(
                out,
                "ebno={ebno} frames={} selected={} sign_changes first={first:.4} last={last:.4}",
                stats.frames_simulated, stats.frames_selected
            )?;
            if let Some(p) = &config.output {
                write_iterstats(create(p)?, &echo, &stats)?;
            }
        }
        Command::Hist {
            ebno,
            iteration,
            kind,
            population,
            frames,
            bins,
        } => {
            let (code, dec) = config.code.as_ref().zip(config.decoder.as_ref()).ok_or_else(missing)?;
            let graph = load_code(code)?;
            let req = HistogramRequest {
                ebno_db: *ebno,
                iteration: *iteration,
                kind: *kind,
                population: *population,
                frames: *frames,
                bins: *bins,
                seed: config.seed,
            };
            let mut cfg = decoder_config(dec);
            cfg.max_iter = cfg.max_iter.max(*iteration);
            let hist = message_histogram(&graph, &cfg, &req, config.workers)?;
            let opt = |x: Option<f64>| x.map_or("undefined".to_string(), |v| format!("{v:.4}"));
            writeln!(
                out,
                "ebno={ebno} iteration={iteration} samples={} mean={} variance={} variance_over_2mean={}",
                hist.samples,
                opt(hist.mean),
                opt(hist.variance),
                opt(hist.symmetry_ratio())
            )?;
            if let Some(p) = &config.output {
                write_histogram(create(p)?, &echo, &hist)?;
                write_histogram_sidecar(create(&sidecar_path(p))?, &echo, &hist)?;
            }
        }
        Command::Threshold {
            ga,
            tol,
            sigma_lo,
            sigma_hi,
        } => {
            let code = config.code.as_ref().ok_or_else(missing)?;
            let dist = ensemble_dist(code)?;
            let opts = ThresholdOptions {
                sigma_lo: *sigma_lo,
                sigma_hi: *sigma_hi,
                max_iter: ga.de_iters,
                tol: *tol,
                ga: ga_options(ga),
                ..ThresholdOptions::default()
            };
            let sigma = threshold_search(&dist, ga.recurrence, &opts)?;
            let rate = dist.design_rate();
            let ebno = 10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10();
            writeln!(out, "sigma*={sigma:.6} ebno*={ebno:.4} dB rate={rate:.4} recurrence={}", ga.recurrence)?;
            if let Some(p) = &config.output {
                let params = EnsembleParams::new(dist, sigma)?;
                let points = trajectory(&params, ga.recurrence, ga.de_iters, opts.target, opts.ga)?;
                write_trajectory(create(p)?, &echo, &points)?;
            }
        }
        Command::Detraj { ga, sigma, ebno } => {
            let code = config.code.as_ref().ok_or_else(missing)?;
            let dist = ensemble_dist(code)?;
            let sigma = match (sigma, ebno) {
                (Some(s), _) => *s,
                (None, Some(e)) => ebno_to_sigma(*e, dist.design_rate()).map_err(|e| CliError::Invalid(e.to_string()))?,
                (None, None) => return Err(CliError::Invalid("detraj needs --sigma or --ebno".into())),
            };
            let params = EnsembleParams::new(dist, sigma)?;
            let target = ThresholdOptions::default().target;
            let points = trajectory(&params, ga.recurrence, ga.de_iters, target, ga_options(ga))?;
            match iterations_to_converge(&params, ga.recurrence, ga.de_iters, target, ga_options(ga))? {
                Some(k) => writeln!(out, "sigma={sigma} converged after {k} iterations")?,
                None => writeln!(
                    out,
                    "sigma={sigma} did not converge in {} iterations (Pe={:.4e})",
                    ga.de_iters,
                    points.last().map_or(f64::NAN, |p| p.pe)
                )?,
            }
            if let Some(p) = &config.output {
                write_trajectory(create(p)?, &echo, &points)?;
            }
        }
        Command::Treecheck {
            depth,
            trials,
            max_nodes,
            mean,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            let mut rows = Vec::with_capacity(*trials);
            for trial in 0..*trials {
                let tree = random_tree(&mut rng, *depth, *max_nodes, *mean);
                let run = tree_run(&tree, &Variant::SelfCorrected);
                let pruned = prune_erased(&tree, &run);
                let ms = tree_decode(&pruned, &Variant::MinSum);
                rows.push((trial, tree.depth(), tree.len(), pruned.len(), run.root, ms));
            }
            let exact = rows.iter().filter(|r| r.4.to_bits() == r.5.to_bits()).count();
            writeln!(out, "{exact}/{trials} exact matches")?;
            if let Some(p) = &config.output {
                let mut w = create(p)?;
                writeln!(w, "{echo}")?;
                writeln!(w, "trial,depth,nodes,pruned_nodes,scms_root,ms_pruned_root,exact")?;
                for (t, d, n, pn, a, b) in rows {
                    writeln!(w, "{t},{d},{n},{pn},{a},{b},{}", a.to_bits() == b.to_bits())?;
                }
                w.flush()?;
            }
        }
    }
    Ok(())
}
