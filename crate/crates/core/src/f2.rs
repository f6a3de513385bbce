//! Linear algebra over F_2 on `u128` bit vectors.

/// Incremental row echelon form; each row remembers which inserted vectors it combines.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<(u32, u128, u128)>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon { rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the current rows: returns the residual and the tag combination used.
    pub fn reduce(&self, mut v: u128) -> (u128, u128) {
        let mut tag = 0u128;
        for &(piv, row, t) in &self.rows {
            if v >> piv & 1 == 1 {
                v ^= row;
                tag ^= t;
            }
        }
        (v, tag)
    }

    /// Inserts `v` with tag `t`. Returns `None` if independent, otherwise the
    /// relation `t ^ combo` (a combination of tags summing to zero).
    pub fn insert(&mut self, v: u128, t: u128) -> Option<u128> {
        let (r, combo) = self.reduce(v);
        if r == 0 {
            return Some(t ^ combo);
        }
        let piv = 127 - r.leading_zeros();
        let tag = t ^ combo;
        for row in self.rows.iter_mut() {
            if row.1 >> piv & 1 == 1 {
                row.1 ^= r;
                row.2 ^= tag;
            }
        }
        self.rows.push((piv, r, tag));
        None
    }

    pub fn contains(&self, v: u128) -> bool {
        self.reduce(v).0 == 0
    }

    /// Canonical representative of `v` modulo the span: pivots cleared.
    pub fn canonical(&self, v: u128) -> u128 {
        self.reduce(v).0
    }
}

/// Rank of a family of vectors.
pub fn rank(vs: &[u128]) -> usize {
    let mut e = Echelon::new();
    for &v in vs {
        e.insert(v, 0);
    }
    e.rank()
}

/// Basis of the kernel of `i -> vs[i]`, as masks over the index set.
pub fn kernel(vs: &[u128]) -> Vec<u128> {
    assert!(vs.len() <= 128);
    let mut e = Echelon::new();
    let mut out = Vec::new();
    for (i, &v) in vs.iter().enumerate() {
        if let Some(rel) = e.insert(v, 1u128 << i) {
            out.push(rel);
        }
    }
    out
}

/// Expresses `target` in terms of `vs` (tag masks), if it lies in their span.
pub fn solve(vs: &[u128], target: u128) -> Option<u128> {
    let mut e = Echelon::new();
    for (i, &v) in vs.iter().enumerate() {
        e.insert(v, 1u128 << i);
    }
    let (r, t) = e.reduce(target);
    (r == 0).then_some(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn small_kernel() {
        let vs = [0b011u128, 0b110, 0b101];
        assert_eq!(rank(&vs), 2);
        let k = kernel(&vs);
        assert_eq!(k, vec![0b111]);
        assert_eq!(solve(&vs, 0b101).map(|t| t.count_ones() % 2 == 1 || t == 0b011), Some(true));
    }

    proptest! {
        #[test]
        fn solve_reconstructs(vs in proptest::collection::vec(0u128..(1 << 12), 1..10), mask in 0u32..1024) {
            let mut target = 0u128;
            for (i, v) in vs.iter().enumerate() {
                if mask >> i & 1 == 1 { target ^= v; }
            }
            let t = solve(&vs, target).unwrap();
            let mut back = 0u128;
            for (i, v) in vs.iter().enumerate() {
                if t >> i & 1 == 1 { back ^= v; }
            }
            prop_assert_eq!(back, target);
            for k in kernel(&vs) {
                let mut z = 0u128;
                for (i, v) in vs.iter().enumerate() {
                    if k >> i & 1 == 1 { z ^= v; }
                }
                prop_assert_eq!(z, 0);
            }
        }
    }
}
