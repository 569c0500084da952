//! Uniform random class assignment.

use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{stage_rng, StageRng};

/// Draw one class uniformly.
pub fn predict_random<'a, R: Rng>(classes: &'a [String], rng: &mut R) -> Result<&'a str> {
    if classes.is_empty() {
        return Err(Error::Invalid("random baseline needs a non-empty class list".into()));
    }
    Ok(&classes[rng.random_range(0..classes.len())])
}

/// Seeded stream of uniform guesses.
pub struct RandomBaseline {
    classes: Vec<String>,
    rng: StageRng,
}

impl RandomBaseline {
    pub fn new(classes: &[String], seed: u64) -> Result<Self> {
        if classes.is_empty() {
            return Err(Error::Invalid("random baseline needs a non-empty class list".into()));
        }
        Ok(RandomBaseline {
            classes: classes.to_vec(),
            rng: stage_rng(seed, "random-baseline", ""),
        })
    }

    pub fn next_label(&mut self) -> String {
        self.classes[self.rng.random_range(0..self.classes.len())].clone()
    }

    pub fn predict_n(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.next_label()).collect()
    }
}
