use std::sync::Arc;

use psl_core::lazy_stream::LazyStream;
use psl_core::trace::{TraceEntry, TraceLog};

type Run<T> = dyn Fn(TraceLog) -> LazyStream<(TraceLog, T)> + Send + Sync;

/// Nondeterministic computation threading the trace of the current search
/// path: given the path so far, the results with their extended logs.
pub struct SearchComputation<T>(Arc<Run<T>>);

impl<T> Clone for SearchComputation<T> {
    fn clone(&self) -> Self {
        SearchComputation(self.0.clone())
    }
}

impl<T: Clone + Send + Sync + 'static> SearchComputation<T> {
    pub fn new(f: impl Fn(TraceLog) -> LazyStream<(TraceLog, T)> + Send + Sync + 'static) -> Self {
        SearchComputation(Arc::new(f))
    }

    pub fn run(&self, log: TraceLog) -> LazyStream<(TraceLog, T)> {
        (self.0)(log)
    }

    pub fn unit(x: T) -> Self {
        Self::new(move |log| LazyStream::unit((log, x.clone())))
    }

    pub fn zero() -> Self {
        Self::new(|_| LazyStream::empty())
    }

    /// One result carrying `entry` appended to the log.
    pub fn tell(entry: TraceEntry, x: T) -> Self {
        Self::new(move |log| LazyStream::unit((log.push(entry.clone()), x.clone())))
    }

    pub fn bind<U, F>(self, f: F) -> SearchComputation<U>
    where
        U: Clone + Send + Sync + 'static,
        F: Fn(T) -> SearchComputation<U> + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        SearchComputation::new(move |log| {
            let f = f.clone();
            self.run(log).bind(move |(log, x)| f(x).run(log))
        })
    }

    /// All results of `self`, then all results of `other`, both from the
    /// same input log.
    pub fn plus(self, other: SearchComputation<T>) -> Self {
        Self::new(move |log| {
            let other = other.clone();
            let again = log.clone();
            self.run(log).plus_lazy(move || other.run(again))
        })
    }

    /// Results of `self` if it has any, else results of `other`. Forces at
    /// most one element of `self` to decide.
    pub fn or_else(self, other: SearchComputation<T>) -> Self {
        Self::new(move |log| {
            let left = self.run(log.clone());
            let other = other.clone();
            LazyStream::suspend(move || if left.is_empty() { other.run(log) } else { left })
        })
    }

    /// At most the first `n` results.
    pub fn truncate(self, n: usize) -> Self {
        Self::new(move |log| self.run(log).truncate(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(n: usize) -> TraceEntry {
        TraceEntry::silent("Skip", n)
    }

    fn logs<T: Clone + Send + Sync + 'static>(c: &SearchComputation<T>) -> Vec<(usize, T)> {
        c.run(TraceLog::new()).iter().map(|(l, x)| (l.len(), x)).collect()
    }

    #[test]
    fn unit_and_zero_thread_the_log() {
        let start = TraceLog::new().push(entry(0));
        let out = SearchComputation::unit(7).run(start.clone()).take(2);
        assert_eq!(out, vec![(start.clone(), 7)]);
        assert!(SearchComputation::<i32>::zero().run(start).is_empty());
    }

    #[test]
    fn bind_extends_left_to_right() {
        let c = SearchComputation::tell(entry(1), 1).bind(|x| SearchComputation::tell(entry(2), x + 1));
        assert_eq!(logs(&c), vec![(2, 2)]);
        let out = c.run(TraceLog::new()).head().unwrap().0.clone();
        let goals: Vec<usize> = out.entries().iter().map(|e| e.goals_after).collect();
        assert_eq!(goals, vec![1, 2]);
    }

    #[test]
    fn or_else_prefers_a_nonempty_left() {
        let l = SearchComputation::unit(1).plus(SearchComputation::unit(2));
        assert_eq!(
            logs(&l.clone().or_else(SearchComputation::unit(3))),
            vec![(0, 1), (0, 2)]
        );
        assert_eq!(
            logs(&SearchComputation::zero().or_else(SearchComputation::unit(3))),
            vec![(0, 3)]
        );
        assert_eq!(logs(&l.truncate(1)), vec![(0, 1)]);
    }
}
