use std::time::{Duration, Instant};

/// Spaces requests at least `1 / rate` seconds apart, so no one-second
/// window ever holds more than `rate` requests. The gap is measured from the
/// end of the previous request when [`RateLimiter::finish`] is called, which
/// keeps the guarantee even as the server sees arrivals.
#[derive(Debug)]
pub struct RateLimiter {
    interval: Duration,
    last: Option<Instant>,
}

impl RateLimiter {
    pub fn new(max_requests_per_second: f64) -> Self {
        RateLimiter { interval: Duration::from_secs_f64(1.0 / max_requests_per_second), last: None }
    }

    pub fn interval(&self) -> Duration {
        self.interval
    }

    /// Blocks until the next request may start.
    pub fn acquire(&mut self) {
        if let Some(last) = self.last {
            let ready = last + self.interval;
            let now = Instant::now();
            if ready > now {
                std::thread::sleep(ready - now);
            }
        }
        self.last = Some(Instant::now());
    }

    /// Marks the end of the current request.
    pub fn finish(&mut self) {
        self.last = Some(Instant::now());
    }
}
