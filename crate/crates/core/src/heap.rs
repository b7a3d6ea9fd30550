//! Min-priority queue of `(key, vertex)` pairs with lazy deletion.
//!
//! Equal keys pop in increasing vertex order. Callers validate popped entries
//! against their own state; stale entries are simply skipped.

use alloc::collections::BinaryHeap;
use core::cmp::Ordering;

use crate::graph::VertexId;

#[derive(Clone, Copy, Debug)]
struct Entry {
    key: f64,
    vertex: VertexId,
}

impl PartialEq for Entry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Entry {}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Entry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .total_cmp(&self.key)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct MinQueue {
    heap: BinaryHeap<Entry>,
}

impl MinQueue {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn push(&mut self, key: f64, vertex: VertexId) {
        self.heap.push(Entry { key, vertex });
    }

    pub(crate) fn pop(&mut self) -> Option<(f64, VertexId)> {
        self.heap.pop().map(|e| (e.key, e.vertex))
    }

    pub(crate) fn clear(&mut self) {
        self.heap.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pops_by_key_then_vertex() {
        let mut q = MinQueue::new();
        q.push(3.0, 1);
        q.push(1.0, 7);
        q.push(1.0, 2);
        q.push(0.0, 9);
        assert_eq!(q.pop(), Some((0.0, 9)));
        assert_eq!(q.pop(), Some((1.0, 2)));
        assert_eq!(q.pop(), Some((1.0, 7)));
        assert_eq!(q.pop(), Some((3.0, 1)));
        assert_eq!(q.pop(), None);
    }
}
