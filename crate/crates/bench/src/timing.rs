use std::time::{Duration, Instant};

/// Untimed runs before measurement starts.
pub const WARMUPS: usize = 3;

/// Runs `f` [`WARMUPS`] times, then `reps` timed times, and returns the last
/// result with the median duration.
pub fn median_time<T>(reps: usize, mut f: impl FnMut() -> T) -> (T, Duration) {
    assert!(reps >= 1, "need at least one timed repetition");
    for _ in 0..WARMUPS {
        std::hint::black_box(f());
    }
    let mut times = Vec::with_capacity(reps);
    let mut last = None;
    for _ in 0..reps {
        let start = Instant::now();
        let out = std::hint::black_box(f());
        times.push(start.elapsed());
        last = Some(out);
    }
    times.sort_unstable();
    let mid = times.len() / 2;
    let median = if times.len() % 2 == 1 {
        times[mid]
    } else {
        (times[mid - 1] + times[mid]) / 2
    };
    (last.expect("reps >= 1"), median)
}
