//! Evaluation accounting shared by every optimizer.
//!
//! Function and gradient evaluations are charged one unit each against a
//! single counter owned by one run.

use crate::linalg::Vector;
use crate::objectives::Objective;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EvalCounter {
    pub function: u64,
    pub gradient: u64,
}

impl EvalCounter {
    pub fn total(&self) -> u64 {
        self.function + self.gradient
    }
}

/// One point of a best-so-far history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BestRecord {
    /// Total evaluations at the moment the improvement was observed.
    pub evals: u64,
    pub best_f: f64,
    /// Caller-defined label, e.g. the restart index.
    pub tag: usize,
}

/// Wraps an objective, charges every call, and tracks the best finite value
/// observed across all function evaluations.
pub struct Evaluator<'a> {
    objective: &'a dyn Objective,
    counter: EvalCounter,
    budget: Option<u64>,
    best: Option<(f64, Vector)>,
    history: Vec<BestRecord>,
    tag: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(objective: &'a dyn Objective, budget: Option<u64>) -> Self {
        Evaluator {
            objective,
            counter: EvalCounter::default(),
            budget,
            best: None,
            history: Vec::new(),
            tag: 0,
        }
    }

    pub fn objective(&self) -> &'a dyn Objective {
        self.objective
    }

    pub fn dim(&self) -> usize {
        self.objective.dim()
    }

    pub fn value(&mut self, x: &Vector) -> f64 {
        self.counter.function += 1;
        let f = self.objective.value(x);
        if f.is_finite() && self.best.as_ref().is_none_or(|(b, _)| f < *b) {
            self.best = Some((f, x.clone()));
            self.history.push(BestRecord {
                evals: self.counter.total(),
                best_f: f,
                tag: self.tag,
            });
        }
        f
    }

    pub fn gradient(&mut self, x: &Vector) -> Vector {
        self.counter.gradient += 1;
        self.objective.gradient(x)
    }

    pub fn counter(&self) -> EvalCounter {
        self.counter
    }

    pub fn total(&self) -> u64 {
        self.counter.total()
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn exhausted(&self) -> bool {
        self.budget.is_some_and(|b| self.counter.total() >= b)
    }

    pub fn remaining(&self) -> Option<u64> {
        self.budget.map(|b| b.saturating_sub(self.counter.total()))
    }

    pub fn set_tag(&mut self, tag: usize) {
        self.tag = tag;
    }

    pub fn best(&self) -> Option<(f64, &Vector)> {
        self.best.as_ref().map(|(f, x)| (*f, x))
    }

    pub fn history(&self) -> &[BestRecord] {
        &self.history
    }

    pub fn into_parts(self) -> (EvalCounter, Option<(f64, Vector)>, Vec<BestRecord>) {
        (self.counter, self.best, self.history)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::Levy;

    #[test]
    fn counts_and_tracks_best() {
        let f = Levy::new(2).unwrap();
        let mut ev = Evaluator::new(&f, Some(3));
        let a = ev.value(&Vector::from_vec(vec![3.0, 3.0]));
        ev.gradient(&Vector::zeros(2));
        assert!(!ev.exhausted());
        let b = ev.value(&Vector::from_vec(vec![1.0, 1.0]));
        assert!(b < a);
        assert!(ev.exhausted());
        assert_eq!(ev.counter(), EvalCounter { function: 2, gradient: 1 });
        assert_eq!(ev.history().len(), 2);
        assert_eq!(ev.history()[1].evals, 3);
        assert!(ev.best().unwrap().0 < 1e-30);
    }
}
