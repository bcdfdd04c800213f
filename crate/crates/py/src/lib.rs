//! Python bindings: codes, single-frame decoding, Monte-Carlo runs and the
//! Gaussian-approximation threshold.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use scms_ldpc::code::{self, DegreeDistribution, TannerGraph};
use scms_ldpc::decoder::{self, DecoderConfig, QuantSpec, Variant};
use scms_ldpc::ga::{self, Recurrence, ThresholdOptions};
use scms_ldpc::harness::tree::{prune_erased, random_tree, tree_decode, tree_run};
use scms_ldpc::harness::{self, SimSetup, StopRule};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn config(decoder: &str, max_iter: Option<usize>, quant: Option<&str>) -> PyResult<DecoderConfig> {
    let variant: Variant = decoder.parse().map_err(value_err)?;
    let quant = match quant {
        None | Some("float") => None,
        Some("fig4") => Some(QuantSpec::fig4()),
        Some(other) => return Err(value_err(format!("unknown quantizer {other:?} (expected float or fig4)"))),
    };
    let max_iter = max_iter.unwrap_or(if quant.is_some() { 30 } else { 200 });
    let cfg = DecoderConfig::new(variant).max_iter(max_iter).quant(quant);
    cfg.validate().map_err(value_err)?;
    Ok(cfg)
}

fn distribution(lam: Vec<(usize, f64)>, rho: Vec<(usize, f64)>) -> PyResult<DegreeDistribution> {
    DegreeDistribution::new(&lam, &rho).map_err(value_err)
}

/// Tanner graph of an LDPC code.
#[pyclass(name = "Code", frozen)]
struct PyCode {
    graph: TannerGraph,
}

#[pymethods]
impl PyCode {
    /// Parses MacKay alist text.
    #[staticmethod]
    fn from_alist(text: &str) -> PyResult<Self> {
        Ok(Self {
            graph: code::load_alist(text).map_err(value_err)?,
        })
    }

    /// Parses a quasi-cyclic base matrix (`rows cols z` then the shift grid).
    #[staticmethod]
    fn from_qc(text: &str) -> PyResult<Self> {
        let base = code::load_qc(text).map_err(value_err)?;
        Ok(Self {
            graph: code::expand_qc(&base).map_err(value_err)?,
        })
    }

    /// Random graph from edge-perspective degree fractions `[(degree, fraction), ...]`.
    #[staticmethod]
    fn sample(lam: Vec<(usize, f64)>, rho: Vec<(usize, f64)>, n: usize, seed: u64) -> PyResult<Self> {
        let dist = distribution(lam, rho)?;
        Ok(Self {
            graph: code::sample_irregular(&dist, n, seed).map_err(value_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.graph.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.graph.m()
    }

    #[getter]
    fn edges(&self) -> usize {
        self.graph.edge_count()
    }

    fn to_alist(&self) -> String {
        code::write_alist(&self.graph)
    }

    fn syndrome_ok(&self, bits: Vec<u8>) -> PyResult<bool> {
        self.graph.syndrome_ok(&bits).map_err(value_err)
    }

    /// Decodes one frame of channel LLRs.
    #[pyo3(signature = (llr, decoder = "scms", max_iter = None, quant = None))]
    fn decode(&self, llr: Vec<f64>, decoder: &str, max_iter: Option<usize>, quant: Option<&str>) -> PyResult<Decoded> {
        let cfg = config(decoder, max_iter, quant)?;
        let r = decoder::decode(&self.graph, &llr, &cfg).map_err(value_err)?;
        Ok(Decoded {
            bits: r.bits,
            app: r.app,
            iterations: r.iterations,
            converged: r.converged,
        })
    }

    /// BER/FER over an Eb/N0 grid with the all-zero codeword.
    #[pyo3(signature = (ebno, decoder = "scms", seed = 0, min_errors = 100, max_frames = 1_000_000, max_iter = None, quant = None, workers = 0))]
    #[allow(clippy::too_many_arguments)]
    fn simulate(
        &self,
        ebno: Vec<f64>,
        decoder: &str,
        seed: u64,
        min_errors: u64,
        max_frames: u64,
        max_iter: Option<usize>,
        quant: Option<&str>,
        workers: usize,
    ) -> PyResult<Vec<SimPoint>> {
        let setup = SimSetup::new(&self.graph, "python", config(decoder, max_iter, quant)?);
        let records = harness::run_monte_carlo(&setup, &ebno, StopRule::new(min_errors, max_frames), seed, workers)
            .map_err(value_err)?;
        Ok(records
            .iter()
            .map(|r| SimPoint {
                ebno_db: r.ebno_db,
                frames: r.frames,
                bit_errors: r.bit_errors,
                frame_errors: r.frame_errors,
                ber: r.ber(),
                fer: r.fer(),
                avg_iterations: r.avg_iterations(),
            })
            .collect())
    }
}

#[pyclass(frozen, get_all)]
struct Decoded {
    bits: Vec<u8>,
    app: Vec<f64>,
    iterations: usize,
    converged: bool,
}

#[pyclass(frozen, get_all)]
struct SimPoint {
    ebno_db: f64,
    frames: u64,
    bit_errors: u64,
    frame_errors: u64,
    ber: f64,
    fer: f64,
    avg_iterations: f64,
}

#[pymethods]
impl SimPoint {
    fn __repr__(&self) -> String {
        format!(
            "SimPoint(ebno_db={}, frames={}, frame_errors={}, ber={:.3e}, fer={:.3e})",
            self.ebno_db, self.frames, self.frame_errors, self.ber, self.fer
        )
    }
}

/// Threshold sigma* of an ensemble; `recurrence` is "theorem1" or "theorem2".
#[pyfunction]
#[pyo3(signature = (lam, rho, recurrence = "theorem1"))]
fn threshold(lam: Vec<(usize, f64)>, rho: Vec<(usize, f64)>, recurrence: &str) -> PyResult<f64> {
    let dist = distribution(lam, rho)?;
    let rec: Recurrence = recurrence.parse().map_err(value_err)?;
    ga::threshold_search(&dist, rec, &ThresholdOptions::default()).map_err(value_err)
}

/// `(exact, trials)` for the tree-pruning oracle on random trees.
#[pyfunction]
#[pyo3(signature = (depth = 4, trials = 1000, seed = 1))]
fn treecheck(depth: usize, trials: usize, seed: u64) -> (usize, usize) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let exact = (0..trials)
        .filter(|_| {
            let tree = random_tree(&mut rng, depth.max(1), 60, 1.0);
            let run = tree_run(&tree, &Variant::SelfCorrected);
            tree_decode(&prune_erased(&tree, &run), &Variant::MinSum).to_bits() == run.root.to_bits()
        })
        .count();
    (exact, trials)
}

#[pymodule]
fn scms_ldpc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCode>()?;
    m.add_class::<Decoded>()?;
    m.add_class::<SimPoint>()?;
    m.add_function(wrap_pyfunction!(threshold, m)?)?;
    m.add_function(wrap_pyfunction!(treecheck, m)?)?;
    Ok(())
}
