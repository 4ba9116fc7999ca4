//! Replicate scheduling.

use rayon::prelude::*;

use crate::error::{HarnessError, Result};

/// Runs `task(0..count)` on `threads` workers and returns the results in index order.
///
/// Each task must derive its randomness from its index alone; then the output
/// does not depend on the worker count.
pub fn run_indexed<R, F>(threads: usize, count: usize, task: F) -> Result<Vec<R>>
where
    R: Send,
    F: Fn(usize) -> Result<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| HarnessError::Config(format!("worker pool: {e}")))?;
    pool.install(|| (0..count).into_par_iter().map(&task).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_stable() {
        for t in [1, 3, 8] {
            let v = run_indexed(t, 100, |i| Ok(i * i)).unwrap();
            assert_eq!(v, (0..100).map(|i| i * i).collect::<Vec<_>>());
        }
        let e = run_indexed(2, 10, |i| {
            if i == 7 {
                Err(HarnessError::Config("boom".into()))
            } else {
                Ok(i)
            }
        });
        assert!(e.is_err());
    }
}
