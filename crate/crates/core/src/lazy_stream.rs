//! Demand-driven, memoizing streams.
//!
//! A [`LazyStream`] is the nondeterminism container used throughout the
//! crate: a tactic maps a proof state to a stream of successor states, and
//! failure is the empty stream. Streams form a monad with zero and plus
//! (`unit`, `bind`, `empty`, `plus`).
//!
//! Every suspended cell is evaluated at most once, even when the stream is
//! shared between threads; forced prefixes are memoized so re-traversal does
//! not re-run the computation that produced them.

use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

type Thunk<T> = Box<dyn FnOnce() -> Step<T> + Send>;

enum Step<T> {
    Nil,
    Cons(T, LazyStream<T>),
    /// The cell evaluates to whatever the target stream evaluates to.
    Alias(LazyStream<T>),
}

impl<T> Step<T> {
    fn into_tail(self) -> Option<LazyStream<T>> {
        match self {
            Step::Nil => None,
            Step::Cons(_, tail) | Step::Alias(tail) => Some(tail),
        }
    }
}

struct Node<T> {
    state: OnceLock<Step<T>>,
    thunk: Mutex<Option<Thunk<T>>>,
}

impl<T> Drop for Node<T> {
    // Long forced chains would otherwise be dropped recursively.
    fn drop(&mut self) {
        let mut next = self.state.take().and_then(Step::into_tail);
        while let Some(stream) = next {
            match Arc::try_unwrap(stream.0) {
                Ok(mut node) => next = node.state.take().and_then(Step::into_tail),
                Err(_) => break,
            }
        }
    }
}

/// A lazy, memoizing, possibly unbounded sequence.
pub struct LazyStream<T>(Arc<Node<T>>);

impl<T> Clone for LazyStream<T> {
    fn clone(&self) -> Self {
        LazyStream(Arc::clone(&self.0))
    }
}

impl<T> fmt::Debug for LazyStream<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let forced = self.0.state.get().is_some();
        f.debug_struct("LazyStream").field("forced", &forced).finish()
    }
}

impl<T> Default for LazyStream<T> {
    fn default() -> Self {
        Self::empty()
    }
}

impl<T> LazyStream<T> {
    fn ready(step: Step<T>) -> Self {
        let state = OnceLock::new();
        let _ = state.set(step);
        LazyStream(Arc::new(Node {
            state,
            thunk: Mutex::new(None),
        }))
    }

    fn lazy(thunk: impl FnOnce() -> Step<T> + Send + 'static) -> Self {
        LazyStream(Arc::new(Node {
            state: OnceLock::new(),
            thunk: Mutex::new(Some(Box::new(thunk))),
        }))
    }

    /// The empty stream (`mzero`).
    pub fn empty() -> Self {
        Self::ready(Step::Nil)
    }

    /// The singleton stream (`return`).
    pub fn unit(x: T) -> Self {
        Self::ready(Step::Cons(x, Self::empty()))
    }

    pub fn cons(x: T, tail: LazyStream<T>) -> Self {
        Self::ready(Step::Cons(x, tail))
    }

    /// Defers the construction of a stream until its head is demanded.
    pub fn suspend(f: impl FnOnce() -> LazyStream<T> + Send + 'static) -> Self {
        Self::lazy(move || Step::Alias(f()))
    }

    /// Like [`cons`](Self::cons), but the tail is only built when demanded.
    pub fn cons_lazy(x: T, tail: impl FnOnce() -> LazyStream<T> + Send + 'static) -> Self
    where
        T: Send + 'static,
    {
        Self::cons(x, Self::suspend(tail))
    }

    fn resolve(&self) -> Option<(&T, &LazyStream<T>)> {
        let mut cur = self;
        loop {
            let step = cur.0.state.get_or_init(|| {
                let thunk = cur
                    .0
                    .thunk
                    .lock()
                    .unwrap_or_else(|e| e.into_inner())
                    .take()
                    .expect("lazy stream cell re-entered while being forced");
                thunk()
            });
            match step {
                Step::Nil => return None,
                Step::Cons(x, tail) => return Some((x, tail)),
                Step::Alias(next) => cur = next,
            }
        }
    }

    /// Forces the head, returning references into the memoized cell.
    pub fn head(&self) -> Option<&T> {
        self.resolve().map(|(x, _)| x)
    }

    /// Forces the head; true iff the stream has no elements.
    pub fn is_empty(&self) -> bool {
        self.resolve().is_none()
    }

    /// True once the head has been computed.
    pub fn is_forced(&self) -> bool {
        let mut cur = self;
        loop {
            match cur.0.state.get() {
                None => return false,
                Some(Step::Alias(next)) => cur = next,
                Some(_) => return true,
            }
        }
    }
}

impl<T: Clone + Send + Sync + 'static> LazyStream<T> {
    pub fn uncons(&self) -> Option<(T, LazyStream<T>)> {
        self.resolve().map(|(x, tail)| (x.clone(), tail.clone()))
    }

    pub fn from_vec(items: Vec<T>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(Self::empty(), |tail, x| Self::cons(x, tail))
    }

    /// Sequential concatenation (`++`). `other` is not forced until `self`
    /// is exhausted.
    pub fn plus(self, other: LazyStream<T>) -> Self {
        Self::lazy(move || match self.resolve() {
            None => Step::Alias(other),
            Some((x, rest)) => Step::Cons(x.clone(), rest.clone().plus(other)),
        })
    }

    /// Concatenation with a right operand built on demand.
    pub fn plus_lazy(self, other: impl FnOnce() -> LazyStream<T> + Send + 'static) -> Self {
        self.plus(Self::suspend(other))
    }

    /// Flat-map. `f` is applied to element `k` only once everything produced
    /// from earlier elements has been consumed.
    pub fn bind<U, F>(self, f: F) -> LazyStream<U>
    where
        U: Clone + Send + Sync + 'static,
        F: Fn(T) -> LazyStream<U> + Send + Sync + 'static,
    {
        bind_shared(self, Arc::new(f))
    }

    pub fn map<U, F>(self, f: F) -> LazyStream<U>
    where
        U: Clone + Send + Sync + 'static,
        F: Fn(T) -> U + Send + Sync + 'static,
    {
        map_shared(self, Arc::new(f))
    }

    /// Pairs each element with its position.
    pub fn enumerate(self) -> LazyStream<(usize, T)> {
        enumerate_from(self, 0)
    }

    pub fn filter<F>(self, keep: F) -> LazyStream<T>
    where
        F: Fn(&T) -> bool + Send + Sync + 'static,
    {
        self.bind(move |x| if keep(&x) { Self::unit(x) } else { Self::empty() })
    }

    /// Lazy prefix of at most `n` elements.
    pub fn truncate(self, n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Self::lazy(move || match self.resolve() {
            None => Step::Nil,
            Some((x, rest)) => Step::Cons(x.clone(), rest.clone().truncate(n - 1)),
        })
    }

    /// The first `min(n, len)` elements. Never forces element `n + 1`.
    pub fn take(&self, n: usize) -> Vec<T> {
        self.iter().take(n).collect()
    }

    /// The `index`-th element, forcing exactly `index + 1` cells.
    pub fn nth(&self, index: usize) -> Option<T> {
        self.iter().nth(index)
    }

    pub fn iter(&self) -> Iter<T> {
        Iter {
            cur: Some(self.clone()),
        }
    }
}

fn bind_shared<T, U>(xs: LazyStream<T>, f: Arc<dyn Fn(T) -> LazyStream<U> + Send + Sync>) -> LazyStream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    LazyStream::lazy(move || match xs.resolve() {
        None => Step::Nil,
        Some((x, rest)) => {
            let rest = bind_shared(rest.clone(), Arc::clone(&f));
            Step::Alias(f(x.clone()).plus(rest))
        }
    })
}

fn map_shared<T, U>(xs: LazyStream<T>, f: Arc<dyn Fn(T) -> U + Send + Sync>) -> LazyStream<U>
where
    T: Clone + Send + Sync + 'static,
    U: Clone + Send + Sync + 'static,
{
    LazyStream::lazy(move || match xs.resolve() {
        None => Step::Nil,
        Some((x, rest)) => Step::Cons(f(x.clone()), map_shared(rest.clone(), Arc::clone(&f))),
    })
}

fn enumerate_from<T>(xs: LazyStream<T>, i: usize) -> LazyStream<(usize, T)>
where
    T: Clone + Send + Sync + 'static,
{
    LazyStream::lazy(move || match xs.resolve() {
        None => Step::Nil,
        Some((x, rest)) => Step::Cons((i, x.clone()), enumerate_from(rest.clone(), i + 1)),
    })
}

/// Iterator over a stream; holds only the current suffix.
pub struct Iter<T> {
    cur: Option<LazyStream<T>>,
}

impl<T: Clone + Send + Sync + 'static> Iterator for Iter<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let cur = self.cur.take()?;
        let (x, tail) = cur.uncons()?;
        self.cur = Some(tail);
        Some(x)
    }
}

impl<T: Clone + Send + Sync + 'static> FromIterator<T> for LazyStream<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self::from_vec(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::sync::atomic::{AtomicUsize, Ordering};

    /// A stream `0..len` whose every cell bumps `counter` when forced.
    fn counted(len: usize, counter: Arc<AtomicUsize>) -> LazyStream<usize> {
        fn go(i: usize, len: usize, counter: Arc<AtomicUsize>) -> LazyStream<usize> {
            LazyStream::suspend(move || {
                counter.fetch_add(1, Ordering::SeqCst);
                if i == len {
                    LazyStream::empty()
                } else {
                    LazyStream::cons(i, go(i + 1, len, counter))
                }
            })
        }
        go(0, len, counter)
    }

    fn diverging() -> LazyStream<i32> {
        LazyStream::suspend(|| panic!("diverging stream was forced"))
    }

    fn all<T: Clone + Send + Sync + 'static>(s: &LazyStream<T>) -> Vec<T> {
        s.iter().collect()
    }

    #[test]
    fn unit_is_a_singleton() {
        let s = LazyStream::unit(5);
        assert_eq!(all(&s), vec![5]);
        assert_eq!(s.head(), Some(&5));
        assert_eq!(s.head(), Some(&5));
        assert!(s.uncons().unwrap().1.is_empty());
        assert_eq!(s.iter().count(), 1);
    }

    #[test]
    fn bind_flattens_in_order() {
        let s = LazyStream::from_vec(vec![1, 2]).bind(|x| LazyStream::from_vec(vec![x, x + 10]));
        assert_eq!(all(&s), vec![1, 11, 2, 12]);
        let e = LazyStream::<i32>::empty().bind(|x| LazyStream::unit(x + 1));
        assert!(e.is_empty());
        assert_eq!(all(&LazyStream::unit(7).bind(LazyStream::unit)), vec![7]);
    }

    #[test]
    fn plus_concatenates_lazily() {
        assert_eq!(all(&LazyStream::unit(1).plus(LazyStream::unit(2))), vec![1, 2]);
        assert_eq!(all(&LazyStream::empty().plus(LazyStream::unit(2))), vec![2]);
        let s = LazyStream::unit(1).plus(diverging());
        assert_eq!(s.take(1), vec![1]);
    }

    #[test]
    fn take_examples() {
        let s = LazyStream::from_vec(vec![1, 2, 3]);
        assert_eq!(s.take(2), vec![1, 2]);
        assert!(s.take(0).is_empty());
        assert!(diverging().take(0).is_empty());
        assert_eq!(LazyStream::unit(1).plus(LazyStream::unit(2)).take(3), vec![1, 2]);
    }

    #[test]
    fn take_forces_at_most_k_plus_one_cells() {
        for k in 0..8 {
            let counter = Arc::new(AtomicUsize::new(0));
            let s = counted(100, counter.clone());
            assert_eq!(s.take(k), (0..k).collect::<Vec<_>>());
            assert!(counter.load(Ordering::SeqCst) <= k + 1);
        }
    }

    #[test]
    fn forced_prefix_is_memoized() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted(5, counter.clone());
        assert_eq!(all(&s), vec![0, 1, 2, 3, 4]);
        let after_first = counter.load(Ordering::SeqCst);
        assert_eq!(all(&s), vec![0, 1, 2, 3, 4]);
        assert_eq!(counter.load(Ordering::SeqCst), after_first);
    }

    #[test]
    fn bind_does_not_apply_f_ahead_of_demand() {
        let calls = Arc::new(AtomicUsize::new(0));
        let c = calls.clone();
        let s = LazyStream::from_vec(vec![1, 2, 3]).bind(move |x| {
            c.fetch_add(1, Ordering::SeqCst);
            LazyStream::from_vec(vec![x, x])
        });
        assert_eq!(s.take(2), vec![1, 1]);
        assert_eq!(calls.load(Ordering::SeqCst), 1);
    }

    #[test]
    fn long_chains_do_not_overflow() {
        let s: LazyStream<usize> = (0..200_000).collect();
        let failing = s.clone().bind(|_| LazyStream::<usize>::empty());
        assert!(failing.is_empty());
        assert_eq!(s.iter().count(), 200_000);
        drop(s);
    }

    #[test]
    fn shared_forcing_across_threads_is_at_most_once() {
        let counter = Arc::new(AtomicUsize::new(0));
        let s = counted(50, counter.clone());
        std::thread::scope(|scope| {
            for _ in 0..4 {
                let s = s.clone();
                scope.spawn(move || assert_eq!(s.iter().count(), 50));
            }
        });
        assert_eq!(counter.load(Ordering::SeqCst), 51);
    }

    fn small_stream() -> impl Strategy<Value = Vec<i32>> {
        prop::collection::vec(-20i32..20, 0..5)
    }

    fn f(x: i32) -> LazyStream<i32> {
        LazyStream::from_vec((0..(x.rem_euclid(3))).map(|k| x * 2 + k).collect())
    }

    fn g(x: i32) -> LazyStream<i32> {
        if x % 2 == 0 {
            LazyStream::from_vec(vec![x - 1, x + 1])
        } else {
            LazyStream::empty()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn left_identity(a in -50i32..50) {
            prop_assert_eq!(all(&LazyStream::unit(a).bind(f)), all(&f(a)));
        }

        #[test]
        fn right_identity(m in small_stream()) {
            let s = LazyStream::from_vec(m.clone());
            prop_assert_eq!(all(&s.bind(LazyStream::unit)), m);
        }

        #[test]
        fn associativity(m in small_stream()) {
            let s = LazyStream::from_vec(m);
            let lhs = s.clone().bind(f).bind(g);
            let rhs = s.bind(|x| f(x).bind(g));
            prop_assert_eq!(all(&lhs), all(&rhs));
        }

        #[test]
        fn zero_laws(m in small_stream()) {
            let s = LazyStream::from_vec(m.clone());
            prop_assert!(LazyStream::<i32>::empty().bind(f).is_empty());
            prop_assert_eq!(all(&LazyStream::empty().plus(s.clone())), m.clone());
            prop_assert_eq!(all(&s.plus(LazyStream::empty())), m);
        }

        #[test]
        fn plus_is_associative(a in small_stream(), b in small_stream(), c in small_stream()) {
            let (sa, sb, sc) = (LazyStream::from_vec(a), LazyStream::from_vec(b), LazyStream::from_vec(c));
            let lhs = sa.clone().plus(sb.clone()).plus(sc.clone());
            let rhs = sa.plus(sb.plus(sc));
            prop_assert_eq!(all(&lhs), all(&rhs));
        }

        #[test]
        fn take_is_a_prefix(m in small_stream(), n in 0usize..8) {
            let s = LazyStream::from_vec(m.clone());
            let expect: Vec<i32> = m.iter().copied().take(n).collect();
            prop_assert_eq!(s.take(n), expect.clone());
            prop_assert_eq!(all(&s.truncate(n)), expect);
        }
    }
}
