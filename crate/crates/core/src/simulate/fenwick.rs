/// Binary indexed tree over non-negative weights with prefix-sum search.
#[derive(Clone, Debug)]
pub struct Fenwick {
    tree: Vec<f64>,
    values: Vec<f64>,
    top_bit: usize,
}

impl Fenwick {
    pub fn new(n: usize) -> Self {
        let top_bit = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self {
            tree: vec![0.0; n + 1],
            values: vec![0.0; n],
            top_bit,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn set(&mut self, i: usize, value: f64) {
        let delta = value - self.values[i];
        if delta == 0.0 {
            return;
        }
        self.values[i] = value;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Recomputes the tree from the stored values, discarding accumulated
    /// rounding from incremental updates.
    pub fn rebuild(&mut self) {
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        for i in 0..self.values.len() {
            let j = i + 1;
            self.tree[j] += self.values[i];
            let parent = j + (j & j.wrapping_neg());
            if parent < self.tree.len() {
                self.tree[parent] += self.tree[j];
            }
        }
    }

    pub fn total(&self) -> f64 {
        let mut j = self.values.len();
        let mut sum = 0.0;
        while j > 0 {
            sum += self.tree[j];
            j &= j - 1;
        }
        sum
    }

    /// Smallest index whose inclusive prefix sum exceeds `target`, clamped to
    /// the last index.
    pub fn find(&self, mut target: f64) -> usize {
        let mut pos = 0;
        let mut step = self.top_bit;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        pos.min(self.values.len().saturating_sub(1))
    }
}
