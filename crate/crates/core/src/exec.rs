//! Choice between the rayon-backed and the plain sequential executor.
//!
//! Every Monte-Carlo job is keyed by its own seed, so both executors produce
//! bit-identical results; only wall-clock time differs.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Execution::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// Maps `f` over `jobs`, returning results in job order.
    pub fn map<J, R, F>(self, jobs: Vec<J>, f: F) -> Vec<R>
    where
        J: Send,
        R: Send,
        F: Fn(J) -> R + Sync + Send,
    {
        match self {
            Execution::Sequential => jobs.into_iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                jobs.into_par_iter().map(f).collect()
            }
        }
    }
}
