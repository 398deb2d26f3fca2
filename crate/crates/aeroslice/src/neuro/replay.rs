//! Fixed-capacity experience ring with uniform sampling.

use rand::Rng;

/// One environment step as the learners see it: flattened global state,
/// the concatenated joint action, one reward per agent, and the successor
/// state.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub state: Vec<f64>,
    pub joint_action: Vec<f64>,
    pub rewards: Vec<f64>,
    pub next_state: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct ReplayBuffer {
    capacity: usize,
    items: Vec<Transition>,
    write_head: usize,
}

impl ReplayBuffer {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "capacity");
        Self {
            capacity,
            items: Vec::new(),
            write_head: 0,
        }
    }

    /// Appends, overwriting the oldest entry once full.
    pub fn push(&mut self, t: Transition) {
        if self.items.len() < self.capacity {
            self.items.push(t);
        } else {
            self.items[self.write_head] = t;
        }
        self.write_head = (self.write_head + 1) % self.capacity;
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn get(&self, idx: usize) -> &Transition {
        &self.items[idx]
    }

    /// Draws `k` indices uniformly with replacement, or nothing while the
    /// buffer still holds fewer than `k` entries.
    pub fn sample_indices(&self, rng: &mut impl Rng, k: usize) -> Option<Vec<usize>> {
        if self.items.len() < k || k == 0 {
            return None;
        }
        Some((0..k).map(|_| rng.random_range(0..self.items.len())).collect())
    }
}
