use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuilder};
use shellmodes_core::Executor;

/// Runs independent jobs on a dedicated rayon pool.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    /// `jobs = 0` lets rayon pick the worker count.
    pub fn new(jobs: usize) -> Self {
        let pool = ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .expect("thread pool");
        Self { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<R: Send>(&self, n: usize, job: &(dyn Fn(usize) -> R + Sync)) -> Vec<R> {
        self.pool.install(|| (0..n).into_par_iter().map(job).collect())
    }
}
