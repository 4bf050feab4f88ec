//! Thread-pool execution of independent synthesis jobs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::thread;

use rus_core::pipeline::{Job, JobOutcome, JobRunner};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "RUS_SYNTH_THREADS";

#[derive(Debug, Clone, Copy)]
pub struct ThreadedRunner {
    threads: usize,
}

impl ThreadedRunner {
    pub fn new(threads: usize) -> Self {
        Self { threads: threads.max(1) }
    }

    /// Uses `RUS_SYNTH_THREADS` when set to a positive integer, otherwise the
    /// available parallelism.
    pub fn from_env() -> Self {
        let available = thread::available_parallelism().map_or(1, |n| n.get());
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .unwrap_or(available);
        Self::new(threads)
    }

    pub fn threads(&self) -> usize {
        self.threads
    }
}

impl JobRunner for ThreadedRunner {
    fn run(&self, jobs: &[Job], work: &(dyn Fn(&Job) -> JobOutcome + Sync)) -> Vec<JobOutcome> {
        let workers = self.threads.min(jobs.len());
        if workers <= 1 {
            return jobs.iter().map(work).collect();
        }
        let next = AtomicUsize::new(0);
        let mut done: Vec<(usize, JobOutcome)> = thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|_| {
                    s.spawn(|| {
                        let mut mine = Vec::new();
                        loop {
                            let i = next.fetch_add(1, Ordering::Relaxed);
                            let Some(job) = jobs.get(i) else { break mine };
                            mine.push((i, work(job)));
                        }
                    })
                })
                .collect();
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("synthesis worker panicked"))
                .collect()
        });
        // selection must not depend on scheduling
        done.sort_by_key(|(i, _)| *i);
        done.into_iter().map(|(_, o)| o).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rus_core::pauli::TargetUnitary;
    use rus_core::params::parse_decimal;
    use rus_core::pipeline::{approximate, approximate_with, Config};

    #[test]
    fn threads_do_not_change_the_result() {
        let t = TargetUnitary::from_vector([0.6, 0.0, 0.8, 0.0]).unwrap();
        let cfg = Config::new(0.1, parse_decimal("0.25").unwrap());
        let seq = approximate(&t, &cfg).unwrap();
        for threads in [2, 5] {
            assert_eq!(approximate_with(&t, &cfg, &ThreadedRunner::new(threads)).unwrap(), seq);
        }
    }
}
