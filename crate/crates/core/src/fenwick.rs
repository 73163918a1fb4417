//! Growable binary-indexed tree over non-negative `f64` weights.
//!
//! Supports point update, prefix sums and prefix-sum inversion in
//! `O(log n)`, plus appending a new element in `O(log n)`.

#[derive(Debug, Clone, Default)]
pub struct Fenwick {
    // 1-based; tree[0] is unused.
    tree: Vec<f64>,
}

#[inline]
fn lsb(i: usize) -> usize {
    i & i.wrapping_neg()
}

impl Fenwick {
    pub fn new() -> Self {
        Fenwick { tree: vec![0.0] }
    }

    pub fn from_values(values: &[f64]) -> Self {
        let mut tree = Vec::with_capacity(values.len() + 1);
        tree.push(0.0);
        tree.extend_from_slice(values);
        for i in 1..tree.len() {
            let parent = i + lsb(i);
            if parent < tree.len() {
                tree[parent] += tree[i];
            }
        }
        Fenwick { tree }
    }

    pub fn len(&self) -> usize {
        self.tree.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Appends `value` as element `len()`.
    pub fn push(&mut self, value: f64) {
        let i = self.tree.len();
        let covered = self.prefix(i - 1) - self.prefix(i - lsb(i));
        self.tree.push(value + covered);
    }

    /// Adds `delta` to element `index` (0-based).
    pub fn add(&mut self, index: usize, delta: f64) {
        let mut i = index + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += lsb(i);
        }
    }

    /// Sum of the first `count` elements.
    pub fn prefix(&self, count: usize) -> f64 {
        let mut i = count.min(self.len());
        let mut sum = 0.0;
        while i > 0 {
            sum += self.tree[i];
            i -= lsb(i);
        }
        sum
    }

    pub fn total(&self) -> f64 {
        self.prefix(self.len())
    }

    /// Smallest 0-based index `k` with `prefix(k + 1) > target`, or `len()`
    /// when `target >= total()`.
    pub fn find(&self, mut target: f64) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        let mut pos = 0;
        let mut step = 1usize << (usize::BITS - 1 - n.leading_zeros());
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}
