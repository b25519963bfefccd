//! Sliding-window rate limiting for request dispatch.
//!
//! The public API budget without a key is 5 requests per rolling 30
//! seconds; a key raises it to 50. The limiter tracks dispatch instants
//! and tells the caller how long to hold the next request so the window
//! budget is never exceeded.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

pub const PUBLIC_BUDGET: usize = 5;
pub const KEYED_BUDGET: usize = 50;
pub const WINDOW: Duration = Duration::from_secs(30);

#[derive(Debug, Clone)]
pub struct RateLimiter {
    budget: usize,
    window: Duration,
    dispatched: VecDeque<Instant>,
}

impl RateLimiter {
    pub fn new(budget: usize, window: Duration) -> Self {
        RateLimiter {
            budget: budget.max(1),
            window,
            dispatched: VecDeque::new(),
        }
    }

    /// Budget for anonymous use of the public API.
    pub fn public_default() -> Self {
        RateLimiter::new(PUBLIC_BUDGET, WINDOW)
    }

    /// Budget when an API key is supplied.
    pub fn keyed_default() -> Self {
        RateLimiter::new(KEYED_BUDGET, WINDOW)
    }

    /// How long to wait before the next dispatch keeps the window under
    /// budget; `None` means dispatch immediately.
    pub fn required_delay(&mut self, now: Instant) -> Option<Duration> {
        let horizon = now.checked_sub(self.window);
        while let Some(front) = self.dispatched.front() {
            match horizon {
                Some(h) if *front <= h => {
                    self.dispatched.pop_front();
                }
                _ => break,
            }
        }
        if self.dispatched.len() < self.budget {
            None
        } else {
            let oldest = *self.dispatched.front().expect("non-empty at budget");
            Some((oldest + self.window).saturating_duration_since(now))
        }
    }

    /// Records a dispatch at `now`.
    pub fn record(&mut self, now: Instant) {
        self.dispatched.push_back(now);
    }
}
