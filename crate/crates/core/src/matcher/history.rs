use alloc::vec;
use alloc::vec::Vec;

use crate::frame::{SampleFrame, CHANNELS};

/// Ring of the most recent frames, zero-filled until real data arrives.
///
/// Offset 0 is the newest frame, offset `capacity - 1` the oldest.
#[derive(Debug, Clone)]
pub struct HistoryBuffer {
    slots: Vec<[f64; CHANNELS]>,
    // position of the newest frame
    head: usize,
    filled: usize,
}

impl HistoryBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "history capacity must be positive");
        HistoryBuffer {
            slots: vec![[0.0; CHANNELS]; capacity],
            head: capacity - 1,
            filled: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.slots.len()
    }

    /// Number of real frames currently held (saturates at capacity).
    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn push(&mut self, frame: &SampleFrame) {
        self.head += 1;
        if self.head == self.slots.len() {
            self.head = 0;
        }
        self.slots[self.head] = *frame.angles();
        self.filled = (self.filled + 1).min(self.slots.len());
    }

    /// Frame `offset` steps back from the newest. Slots never written read
    /// as zero.
    #[inline]
    pub fn get(&self, offset: usize) -> &[f64; CHANNELS] {
        let cap = self.slots.len();
        debug_assert!(offset < cap);
        let idx = if offset <= self.head { self.head - offset } else { self.head + cap - offset };
        &self.slots[idx]
    }

    pub fn clear(&mut self) {
        self.slots.iter_mut().for_each(|s| *s = [0.0; CHANNELS]);
        self.head = self.slots.len() - 1;
        self.filled = 0;
    }

    pub fn size_bytes(&self) -> usize {
        self.slots.len() * CHANNELS * core::mem::size_of::<f64>()
    }
}
