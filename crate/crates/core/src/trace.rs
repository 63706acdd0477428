//! Trace entries and the persistent trace log threaded through search.

use std::fmt;
use std::sync::Arc;

/// One successful atomic step.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceEntry {
    /// Name of the strategy atom that produced the step.
    pub atom: String,
    /// Rendered script step; `None` for steps that leave no script text
    /// (assertions and identity steps).
    pub script: Option<String>,
    /// Position of the produced state in the step's own result stream.
    pub result_index: usize,
    /// Active goals after the step.
    pub goals_after: usize,
}

impl TraceEntry {
    pub fn silent(atom: &str, goals_after: usize) -> TraceEntry {
        TraceEntry {
            atom: atom.to_string(),
            script: None,
            result_index: 0,
            goals_after,
        }
    }

    pub fn scripted(atom: &str, script: String, result_index: usize, goals_after: usize) -> TraceEntry {
        TraceEntry {
            atom: atom.to_string(),
            script: Some(script),
            result_index,
            goals_after,
        }
    }
}

struct Node {
    entry: TraceEntry,
    prev: Option<Arc<Node>>,
    len: usize,
}

impl Drop for Node {
    fn drop(&mut self) {
        let mut next = self.prev.take();
        while let Some(node) = next {
            match Arc::try_unwrap(node) {
                Ok(mut n) => next = n.prev.take(),
                Err(_) => break,
            }
        }
    }
}

/// Append-only log shared between search branches. Extending a log never
/// copies it, so sibling branches share their common prefix.
#[derive(Clone, Default)]
pub struct TraceLog {
    last: Option<Arc<Node>>,
}

impl TraceLog {
    pub fn new() -> Self {
        TraceLog { last: None }
    }

    pub fn len(&self) -> usize {
        self.last.as_ref().map_or(0, |n| n.len)
    }

    pub fn is_empty(&self) -> bool {
        self.last.is_none()
    }

    pub fn push(&self, entry: TraceEntry) -> TraceLog {
        TraceLog {
            last: Some(Arc::new(Node {
                entry,
                prev: self.last.clone(),
                len: self.len() + 1,
            })),
        }
    }

    /// Monoid operation: `self` followed by `other`.
    pub fn append(&self, other: &TraceLog) -> TraceLog {
        other.entries().into_iter().fold(self.clone(), |acc, e| acc.push(e))
    }

    /// Entries, oldest first.
    pub fn entries(&self) -> Vec<TraceEntry> {
        let mut out = Vec::with_capacity(self.len());
        let mut cur = self.last.as_deref();
        while let Some(n) = cur {
            out.push(n.entry.clone());
            cur = n.prev.as_deref();
        }
        out.reverse();
        out
    }

    pub fn last(&self) -> Option<&TraceEntry> {
        self.last.as_deref().map(|n| &n.entry)
    }

    /// Whether `prefix` is this log or one of its ancestors.
    pub fn extends(&self, prefix: &TraceLog) -> bool {
        let mut cur = self.last.clone();
        while cur.as_ref().map_or(0, |n| n.len) > prefix.len() {
            cur = cur.and_then(|n| n.prev.clone());
        }
        match (&cur, &prefix.last) {
            (None, None) => true,
            (Some(a), Some(b)) => Arc::ptr_eq(a, b) || self.entries()[..prefix.len()] == prefix.entries()[..],
            _ => false,
        }
    }
}

impl FromIterator<TraceEntry> for TraceLog {
    fn from_iter<I: IntoIterator<Item = TraceEntry>>(iter: I) -> Self {
        iter.into_iter().fold(TraceLog::new(), |acc, e| acc.push(e))
    }
}

impl PartialEq for TraceLog {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.entries() == other.entries()
    }
}

impl Eq for TraceLog {}

impl fmt::Debug for TraceLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.entries()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn entry(i: usize) -> TraceEntry {
        TraceEntry::scripted("Auto", format!("step{i}"), i % 3, i)
    }

    fn log(ids: &[usize]) -> TraceLog {
        ids.iter().map(|i| entry(*i)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn monoid_laws(a in prop::collection::vec(0usize..50, 0..8),
                       b in prop::collection::vec(0usize..50, 0..8),
                       c in prop::collection::vec(0usize..50, 0..8)) {
            let (a, b, c) = (log(&a), log(&b), log(&c));
            prop_assert_eq!(TraceLog::new().append(&a), a.clone());
            prop_assert_eq!(a.append(&TraceLog::new()), a.clone());
            prop_assert_eq!(a.append(&b).append(&c), a.append(&b.append(&c)));
            prop_assert_eq!(a.append(&b).len(), a.len() + b.len());
        }
    }

    #[test]
    fn branches_share_their_prefix() {
        let base = log(&[1, 2]);
        let left = base.push(entry(3));
        let right = base.push(entry(4));
        assert!(left.extends(&base) && right.extends(&base));
        assert!(!left.extends(&right));
        assert_eq!(base.len(), 2);
        assert_eq!(left.last(), Some(&entry(3)));
    }

    #[test]
    fn long_logs_drop_without_overflow() {
        let mut l = TraceLog::new();
        for i in 0..200_000 {
            l = l.push(entry(i));
        }
        assert_eq!(l.len(), 200_000);
    }
}
