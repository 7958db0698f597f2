use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Default cap on live nodes (or automaton states) for one compilation.
pub const DEFAULT_NODE_CAP: usize = 5_000_000;

/// Resource limits for a single compilation.
///
/// The node cap is checked on every allocation; the deadline only every
/// few thousand allocations since reading the clock is comparatively slow.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub node_cap: usize,
    deadline: Option<Instant>,
    ticks: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Self::new(DEFAULT_NODE_CAP, None)
    }
}

impl Budget {
    pub fn new(node_cap: usize, time_cap: Option<Duration>) -> Self {
        Budget {
            node_cap,
            deadline: time_cap.map(|d| Instant::now() + d),
            ticks: 0,
        }
    }

    pub fn unlimited() -> Self {
        Self::new(usize::MAX, None)
    }

    /// Called once per allocated node with the current total.
    #[inline]
    pub fn charge(&mut self, live: usize) -> Result<()> {
        if live > self.node_cap {
            return Err(Error::SizeCap { cap: self.node_cap });
        }
        self.tick()
    }

    #[inline]
    pub fn tick(&mut self) -> Result<()> {
        if let Some(deadline) = self.deadline {
            self.ticks = self.ticks.wrapping_add(1);
            if self.ticks.is_multiple_of(4096) && Instant::now() > deadline {
                return Err(Error::TimeCap);
            }
        }
        Ok(())
    }
}
