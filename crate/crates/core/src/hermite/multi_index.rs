use std::fmt;

/// Exponent vector of a tensorized Hermite basis function.
///
/// Ordering is graded: first by total degree, then lexicographically.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    total_degree: u32,
    exponents: Box<[u32]>,
}

impl MultiIndex {
    pub fn new(exponents: impl Into<Box<[u32]>>) -> Self {
        let exponents = exponents.into();
        let total_degree = exponents.iter().sum();
        Self {
            total_degree,
            exponents,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::new(vec![0; dim])
    }

    /// `n` in coordinate `axis`, zero elsewhere.
    pub fn axis(dim: usize, axis: usize, n: u32) -> Self {
        let mut e = vec![0; dim];
        e[axis] = n;
        Self::new(e)
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn total_degree(&self) -> u32 {
        self.total_degree
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    /// Recomputes the degree from the exponents and compares it with the stored value.
    pub fn is_consistent(&self) -> bool {
        self.exponents.iter().sum::<u32>() == self.total_degree
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.exponents[..])
    }
}

impl From<Vec<u32>> for MultiIndex {
    fn from(v: Vec<u32>) -> Self {
        Self::new(v)
    }
}

/// `C(t + d, d)`: number of multi-indices in `d` variables with total degree at most `t`.
pub fn count_up_to(dim: usize, t: u32) -> u128 {
    let mut c: u128 = 1;
    for i in 1..=dim as u128 {
        match c.checked_mul(t as u128 + i) {
            Some(v) => c = v / i,
            None => return u128::MAX,
        }
    }
    c
}

/// All multi-indices of total degree at most `t`, in graded order.
pub fn indices_up_to(dim: usize, t: u32) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    let mut current = vec![0u32; dim];
    for degree in 0..=t {
        compositions(&mut current, 0, degree, &mut out);
    }
    out.sort();
    out
}

fn compositions(current: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex::new(current.to_vec()));
        return;
    }
    for k in 0..=remaining {
        current[pos] = k;
        compositions(current, pos + 1, remaining - k, out);
    }
    current[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_is_sum() {
        let m = MultiIndex::new(vec![2, 0, 3]);
        assert_eq!(m.total_degree(), 5);
        assert!(m.is_consistent());
        assert_eq!(m.dim(), 3);
    }

    #[test]
    fn counts_match_enumeration() {
        for d in 1..=4 {
            for t in 0..=7 {
                let all = indices_up_to(d, t);
                assert_eq!(all.len() as u128, count_up_to(d, t), "d={d} t={t}");
                assert!(all.iter().all(|m| m.total_degree() <= t && m.dim() == d));
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
        assert_eq!(count_up_to(3, 168), 818_805);
    }

    #[test]
    fn graded_order() {
        let a = MultiIndex::new(vec![5, 0]);
        let b = MultiIndex::new(vec![0, 6]);
        assert!(a < b);
    }
}
