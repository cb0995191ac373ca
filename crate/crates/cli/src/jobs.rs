//! Worker-pool plumbing for `--jobs N`.

/// Runs `f` inside a rayon pool of `n` threads when a job count is given,
/// otherwise on the global pool. Render output never depends on the pool
/// size; this only bounds parallelism.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(n) if n > 0 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("building worker pool")
            .install(f),
        _ => f(),
    }
}
