//! Fork-join execution of independent tasks.
//!
//! With the `parallel` feature, [`ExecMode::Concurrent`] fans tasks out over
//! the rayon pool. Without it every mode runs on the calling thread. Results
//! are collected in task order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ExecMode {
    /// Run each task in turn on the caller.
    #[default]
    SequentialSimulated,
    /// Run tasks concurrently; the barrier is the return of [`fork_join`].
    Concurrent,
}

impl ExecMode {
    pub fn tag(self) -> &'static str {
        match self {
            ExecMode::SequentialSimulated => "sequential",
            ExecMode::Concurrent => "concurrent",
        }
    }
}

impl std::str::FromStr for ExecMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "sequential" | "sequential-simulated" => Ok(ExecMode::SequentialSimulated),
            "concurrent" => Ok(ExecMode::Concurrent),
            other => Err(crate::Error::Config(format!(
                "unknown mode `{other}` (expected sequential or concurrent)"
            ))),
        }
    }
}

/// Whether `Concurrent` actually uses more than one thread in this build.
pub const fn concurrency_available() -> bool {
    cfg!(feature = "parallel")
}

/// Runs `task(0) .. task(len - 1)` and returns their results in index order
/// once all have completed.
pub fn fork_join<T, F>(mode: ExecMode, len: usize, task: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        ExecMode::SequentialSimulated => (0..len).map(task).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Concurrent => (0..len).into_par_iter().map(task).collect(),
        #[cfg(not(feature = "parallel"))]
        ExecMode::Concurrent => (0..len).map(task).collect(),
    }
}

/// Maps `f` over `items`, concurrently when `mode` allows, preserving order.
pub fn map_items<I, T, F>(mode: ExecMode, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    fork_join(mode, items.len(), |i| f(&items[i]))
}
