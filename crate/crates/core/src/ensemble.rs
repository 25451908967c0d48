//! Deterministic parallel execution of independent trajectories.
//!
//! Trajectory `i` always receives stream `(master_seed, i)`. Results come back
//! as a vector in stream-index order, so any fold over it is independent of
//! the worker count and of completion order.

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::rng::{make_stream, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub n_trajectories: usize,
    pub master_seed: u64,
    pub workers: usize,
}

impl EnsembleSpec {
    pub fn new(n_trajectories: usize, master_seed: u64, workers: usize) -> Self {
        Self {
            n_trajectories,
            master_seed,
            workers,
        }
    }
}

pub fn run_parallel_ensemble<T, F>(spec: EnsembleSpec, task: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64, &mut RngStream) -> Result<T> + Sync,
{
    if spec.workers == 0 {
        return Err(invalid("worker count must be at least 1"));
    }
    let run_one = |i: usize| {
        let index = i as u64;
        let mut rng = make_stream(spec.master_seed, index);
        task(index, &mut rng).map_err(|e| Error::Worker {
            stream_index: index,
            source: Box::new(e),
        })
    };
    if spec.workers == 1 {
        return (0..spec.n_trajectories).map(run_one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(spec.workers)
        .build()
        .map_err(|e| Error::Infeasible(format!("cannot start worker pool: {e}")))?;
    // Collecting into Result keeps index order and reports the first failing index.
    pool.install(|| {
        (0..spec.n_trajectories)
            .into_par_iter()
            .map(run_one)
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_across_worker_counts() {
        let task = |_: u64, rng: &mut RngStream| Ok((0..10).map(|_| rng.normal()).sum::<f64>());
        let one = run_parallel_ensemble(EnsembleSpec::new(257, 11, 1), task).unwrap();
        for w in [2, 4, 8] {
            let many = run_parallel_ensemble(EnsembleSpec::new(257, 11, w), task).unwrap();
            assert_eq!(one, many);
        }
    }

    #[test]
    fn single_trajectory_equals_direct_call() {
        let task = |_: u64, rng: &mut RngStream| Ok(rng.normal());
        let out = run_parallel_ensemble(EnsembleSpec::new(1, 5, 4), task).unwrap();
        assert_eq!(out, vec![make_stream(5, 0).normal()]);
    }

    #[test]
    fn failure_names_stream() {
        let task = |i: u64, _: &mut RngStream| {
            if i == 13 {
                Err(invalid("boom"))
            } else {
                Ok(i)
            }
        };
        let err = run_parallel_ensemble(EnsembleSpec::new(40, 0, 4), task).unwrap_err();
        match err {
            Error::Worker { stream_index, .. } => assert_eq!(stream_index, 13),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_workers_rejected() {
        let task = |_: u64, _: &mut RngStream| Ok(());
        assert!(run_parallel_ensemble(EnsembleSpec::new(3, 0, 0), task).is_err());
    }
}
