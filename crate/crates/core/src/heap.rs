//! Binary min-heap with a position index so that any key can be updated or
//! removed in O(log n). Entries are ordered by `(priority, key)`.

use std::collections::HashMap;
use std::hash::Hash;

#[derive(Debug, Clone)]
pub struct IndexedHeap<K, P> {
    data: Vec<(P, K)>,
    pos: HashMap<K, usize>,
}

impl<K, P> Default for IndexedHeap<K, P> {
    fn default() -> Self {
        IndexedHeap { data: Vec::new(), pos: HashMap::new() }
    }
}

impl<K: Copy + Eq + Hash + Ord, P: Copy + Ord> IndexedHeap<K, P> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn contains(&self, k: &K) -> bool {
        self.pos.contains_key(k)
    }

    pub fn get(&self, k: &K) -> Option<P> {
        self.pos.get(k).map(|&i| self.data[i].0)
    }

    pub fn peek(&self) -> Option<(K, P)> {
        self.data.first().map(|&(p, k)| (k, p))
    }

    pub fn min_priority(&self) -> Option<P> {
        self.data.first().map(|e| e.0)
    }

    /// Insert or change the priority of `k`. Returns the previous priority.
    pub fn upsert(&mut self, k: K, p: P) -> Option<P> {
        match self.pos.get(&k) {
            Some(&i) => {
                let old = self.data[i].0;
                self.data[i].0 = p;
                if p < old {
                    self.sift_up(i);
                } else if p > old {
                    self.sift_down(i);
                }
                Some(old)
            }
            None => {
                self.data.push((p, k));
                let i = self.data.len() - 1;
                self.pos.insert(k, i);
                self.sift_up(i);
                None
            }
        }
    }

    pub fn remove(&mut self, k: &K) -> Option<P> {
        let i = self.pos.remove(k)?;
        let last = self.data.len() - 1;
        self.data.swap(i, last);
        let (p, _) = self.data.pop().expect("nonempty");
        if i < self.data.len() {
            self.pos.insert(self.data[i].1, i);
            self.sift_down(i);
            self.sift_up(i);
        }
        Some(p)
    }

    pub fn pop(&mut self) -> Option<(K, P)> {
        let (k, p) = self.peek()?;
        self.remove(&k);
        Some((k, p))
    }

    /// Entries in arbitrary order.
    pub fn iter(&self) -> impl Iterator<Item = (K, P)> + '_ {
        self.data.iter().map(|&(p, k)| (k, p))
    }

    fn less(&self, a: usize, b: usize) -> bool {
        self.data[a] < self.data[b]
    }

    fn swap(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
        self.pos.insert(self.data[a].1, a);
        self.pos.insert(self.data[b].1, b);
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if self.less(i, parent) {
                self.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        loop {
            let l = 2 * i + 1;
            let r = l + 1;
            let mut best = i;
            if l < self.data.len() && self.less(l, best) {
                best = l;
            }
            if r < self.data.len() && self.less(r, best) {
                best = r;
            }
            if best == i {
                break;
            }
            self.swap(i, best);
            i = best;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    #[test]
    fn ties_break_by_key() {
        let mut h = IndexedHeap::new();
        h.upsert(7usize, 3u64);
        h.upsert(2, 3);
        h.upsert(5, 4);
        assert_eq!(h.peek(), Some((2, 3)));
        h.upsert(2, 9);
        assert_eq!(h.pop(), Some((7, 3)));
        assert_eq!(h.pop(), Some((5, 4)));
        assert_eq!(h.remove(&2), Some(9));
        assert!(h.is_empty());
    }

    #[derive(Debug, Clone)]
    enum Op {
        Upsert(u8, u16),
        Remove(u8),
        Pop,
    }

    fn op() -> impl Strategy<Value = Op> {
        prop_oneof![
            (any::<u8>(), any::<u16>()).prop_map(|(k, p)| Op::Upsert(k, p)),
            any::<u8>().prop_map(Op::Remove),
            Just(Op::Pop),
        ]
    }

    proptest! {
        #[test]
        fn matches_model(ops in proptest::collection::vec(op(), 0..300)) {
            let mut h = IndexedHeap::new();
            let mut model: BTreeMap<u8, u16> = BTreeMap::new();
            for o in ops {
                match o {
                    Op::Upsert(k, p) => {
                        prop_assert_eq!(h.upsert(k, p), model.insert(k, p));
                    }
                    Op::Remove(k) => {
                        prop_assert_eq!(h.remove(&k), model.remove(&k));
                    }
                    Op::Pop => {
                        let want = model.iter().map(|(&k, &p)| (p, k)).min();
                        let got = h.pop();
                        prop_assert_eq!(got.map(|(k, p)| (p, k)), want);
                        if let Some((_, k)) = want {
                            model.remove(&k);
                        }
                    }
                }
                prop_assert_eq!(h.len(), model.len());
                let want = model.iter().map(|(&k, &p)| (p, k)).min();
                prop_assert_eq!(h.peek().map(|(k, p)| (p, k)), want);
            }
        }
    }
}
