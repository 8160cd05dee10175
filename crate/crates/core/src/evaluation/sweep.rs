use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::baselines::{run_random, run_recombination, run_smw};
use crate::boes::{run_boes, RunConfig};
use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::landscape::{space_size, Landscape, Variant};
use crate::trace::RunTrace;

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    /// Template configuration; start and seed are replaced per run.
    Boes(RunConfig),
    Smw,
    Recombination { top_k: usize },
    /// Ignores the start variant.
    Random,
    /// Traces produced elsewhere, read from a directory.
    ExternalTraceDir(PathBuf),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartSampling {
    /// Every variant of the space once, in index order.
    AllVariants,
    /// `runs` distinct variants drawn uniformly with `seed`.
    Uniform { runs: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub method: Method,
    pub start_sampling: StartSampling,
    pub budget: usize,
    /// Run `i` uses seed `seed + i`.
    pub seed: u64,
}

pub fn trace_file_name(run: usize) -> String {
    format!("run_{run:05}.jsonl")
}

fn sample_starts(n: usize, sampling: StartSampling) -> Result<Vec<Variant>> {
    let size = space_size(n)?;
    let size = usize::try_from(size)
        .map_err(|_| Error::InvalidInput("variant space too large to sample".into()))?;
    let indices: Vec<usize> = match sampling {
        StartSampling::AllVariants => (0..size).collect(),
        StartSampling::Uniform { runs, seed } => {
            if runs == 0 || runs > size {
                return Err(Error::InvalidInput(format!(
                    "runs must be in 1..={size}, got {runs}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            index::sample(&mut rng, size, runs).into_vec()
        }
    };
    indices
        .into_iter()
        .map(|i| Variant::from_index(i as u64, n))
        .collect()
}

fn run_one(
    spec: &SweepSpec,
    landscape: &Landscape,
    store: Option<&EmbeddingStore>,
    start: &Variant,
    seed: u64,
) -> Result<RunTrace> {
    match &spec.method {
        Method::Boes(template) => {
            let store = store
                .ok_or_else(|| Error::InvalidInput("BOES sweeps need an embedding store".into()))?;
            let config = RunConfig {
                start: start.clone(),
                budget: spec.budget,
                seed,
                ..template.clone()
            };
            run_boes(&config, landscape, store)
        }
        Method::Smw => run_smw(landscape, start, spec.budget, seed),
        Method::Recombination { top_k } => {
            run_recombination(landscape, start, spec.budget, *top_k, seed)
        }
        Method::Random => run_random(landscape, spec.budget, seed),
        Method::ExternalTraceDir(_) => unreachable!("external traces are loaded, not run"),
    }
}

/// Runs the method once per sampled start on `jobs` worker threads.
///
/// Traces come back in start order and, with `out_dir`, are written as
/// `run_00000.jsonl`, `run_00001.jsonl`, ... Output does not depend on `jobs`.
pub fn sweep(
    spec: &SweepSpec,
    landscape: &Landscape,
    store: Option<&EmbeddingStore>,
    out_dir: Option<&Path>,
    jobs: usize,
) -> Result<Vec<RunTrace>> {
    if let Method::ExternalTraceDir(dir) = &spec.method {
        return load_traces(dir);
    }
    let starts = sample_starts(landscape.n(), spec.start_sampling)?;
    if let Some(dir) = out_dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))?;
    pool.install(|| {
        starts
            .par_iter()
            .enumerate()
            .map(|(i, start)| {
                let trace = run_one(spec, landscape, store, start, spec.seed.wrapping_add(i as u64))?;
                if let Some(dir) = out_dir {
                    trace.write_jsonl(dir.join(trace_file_name(i)))?;
                }
                Ok(trace)
            })
            .collect()
    })
}

/// Reads every `*.jsonl` trace in `dir`, in file-name order.
pub fn load_traces(dir: impl AsRef<Path>) -> Result<Vec<RunTrace>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.extension().is_some_and(|e| e == "jsonl") {
            paths.push(path);
        }
    }
    if paths.is_empty() {
        return Err(Error::InvalidInput(format!("no .jsonl traces in {}", dir.display())));
    }
    paths.sort();
    paths.iter().map(RunTrace::read_jsonl).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embeddings::synth_store;
    use crate::landscape::enumerate_variants;
    use crate::synthetic::{planted_landscape, PeakSpec};

    fn fixture() -> (Landscape, EmbeddingStore) {
        let store = synth_store(&enumerate_variants(2).unwrap(), 16, 3).unwrap();
        let planted = planted_landscape(&store, &PeakSpec::default()).unwrap();
        (planted.landscape, store)
    }

    #[test]
    fn all_variants_gives_one_trace_per_start() {
        let (landscape, _) = fixture();
        let spec = SweepSpec {
            method: Method::Smw,
            start_sampling: StartSampling::AllVariants,
            budget: 10,
            seed: 0,
        };
        let traces = sweep(&spec, &landscape, None, None, 2).unwrap();
        assert_eq!(traces.len(), 400);
        for (i, t) in traces.iter().enumerate() {
            assert_eq!(t.records[0].variant, Variant::from_index(i as u64, 2).unwrap().word());
        }
    }

    #[test]
    fn independent_of_jobs_and_round_trips() {
        let (landscape, store) = fixture();
        let template = RunConfig::new(landscape.wild_type().clone(), 0);
        let spec = SweepSpec {
            method: Method::Boes(template),
            start_sampling: StartSampling::Uniform { runs: 6, seed: 9 },
            budget: 8,
            seed: 4,
        };
        let dir = tempfile::tempdir().unwrap();
        let a = sweep(&spec, &landscape, Some(&store), Some(dir.path()), 1).unwrap();
        let b = sweep(&spec, &landscape, Some(&store), None, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        assert_eq!(a[2].header.seed, 6);
        let back = load_traces(dir.path()).unwrap();
        assert_eq!(back, a);
        let ext = SweepSpec {
            method: Method::ExternalTraceDir(dir.path().to_path_buf()),
            ..spec
        };
        assert_eq!(sweep(&ext, &landscape, None, None, 1).unwrap(), a);
    }

    #[test]
    fn rejects_bad_inputs() {
        let (landscape, _) = fixture();
        let mut spec = SweepSpec {
            method: Method::Boes(RunConfig::new(landscape.wild_type().clone(), 5)),
            start_sampling: StartSampling::Uniform { runs: 2, seed: 0 },
            budget: 5,
            seed: 0,
        };
        assert!(sweep(&spec, &landscape, None, None, 1).is_err());
        spec.method = Method::Random;
        spec.start_sampling = StartSampling::Uniform { runs: 0, seed: 0 };
        assert!(sweep(&spec, &landscape, None, None, 1).is_err());
        spec.start_sampling = StartSampling::Uniform { runs: 401, seed: 0 };
        assert!(sweep(&spec, &landscape, None, None, 1).is_err());
    }
}
