//! Parallel maps whose results never depend on the number of threads: work
//! item `i` is a pure function of `i`, and results are merged in index order.

use rayon::prelude::*;

pub struct Runner {
    pool: rayon::ThreadPool,
}

impl Runner {
    /// `threads = None` uses rayon's default.
    pub fn new(threads: Option<usize>) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.unwrap_or(0))
            .build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// `f(0), …, f(n − 1)` in order; the first error by index wins.
    pub fn map<T, E, F>(&self, range: std::ops::Range<usize>, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        let results: Vec<Result<T, E>> = self.pool.install(|| range.into_par_iter().map(&f).collect());
        results.into_iter().collect()
    }

    /// Smallest `i < n` with `f(i) = Some(_)`, evaluated in blocks of
    /// `block` indices so that work past the answer stays bounded.
    pub fn find_first<T, E, F>(&self, n: usize, block: usize, f: F) -> Result<Option<(usize, T)>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<Option<T>, E> + Sync + Send,
    {
        let block = block.max(1);
        let mut start = 0;
        while start < n {
            let end = (start + block).min(n);
            let hits = self.map(start..end, &f)?;
            if let Some((offset, hit)) = hits.into_iter().enumerate().find_map(|(i, h)| h.map(|h| (i, h))) {
                return Ok(Some((start + offset, hit)));
            }
            start = end;
        }
        Ok(None)
    }
}
