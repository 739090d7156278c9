//! Finite posets presented by their full strict order relation, with ids in
//! a linear extension. The main consumer is the order complex construction:
//! simplices are the chains of the poset.

use crate::error::{Error, Result};
use crate::simplicial::SimplicialComplex;

#[derive(Clone, Debug)]
pub struct Poset {
    /// above[i] = every j with i < j, sorted ascending. Because ids form a
    /// linear extension, every such j is numerically larger than i. The
    /// relation must be transitively closed; chain enumeration depends on it.
    above: Vec<Vec<u32>>,
}

impl Poset {
    pub fn new(above: Vec<Vec<u32>>) -> Self {
        for (i, list) in above.iter().enumerate() {
            let mut prev = i as u32;
            for &j in list {
                assert!(
                    j > prev || (prev == i as u32 && j > i as u32),
                    "ids must form a linear extension with sorted above-lists"
                );
                assert!((j as usize) < above.len(), "relation out of range");
                prev = j;
            }
        }
        #[cfg(debug_assertions)]
        {
            // transitive closure: above[j] must be contained in above[i]
            for i in 0..above.len() {
                for &j in &above[i] {
                    for &k in &above[j as usize] {
                        debug_assert!(
                            above[i].binary_search(&k).is_ok(),
                            "relation is not transitively closed at {} < {} < {}",
                            i,
                            j,
                            k
                        );
                    }
                }
            }
        }
        Poset { above }
    }

    pub fn len(&self) -> usize {
        self.above.len()
    }

    pub fn is_empty(&self) -> bool {
        self.above.is_empty()
    }

    pub fn above(&self, i: usize) -> &[u32] {
        &self.above[i]
    }

    pub fn less(&self, i: usize, j: u32) -> bool {
        self.above[i].binary_search(&j).is_ok()
    }

    /// Number of chains of each length (index 0 = single elements), by
    /// dynamic programming over the linear extension.
    pub fn chain_counts(&self) -> Vec<u64> {
        let n = self.len();
        // starting[i][l] = chains of length l+1 starting at i; computed
        // descending. To bound memory, keep only totals per length plus the
        // per-element vectors.
        let mut per_elem: Vec<Vec<u64>> = vec![Vec::new(); n];
        let mut totals: Vec<u64> = Vec::new();
        for i in (0..n).rev() {
            let mut mine = vec![1u64];
            for &j in &self.above[i] {
                let theirs = &per_elem[j as usize];
                for (l, &cnt) in theirs.iter().enumerate() {
                    if mine.len() <= l + 1 {
                        mine.resize(l + 2, 0);
                    }
                    mine[l + 1] += cnt;
                }
            }
            for (l, &cnt) in mine.iter().enumerate() {
                if totals.len() <= l {
                    totals.resize(l + 1, 0);
                }
                totals[l] += cnt;
            }
            per_elem[i] = mine;
        }
        totals
    }

    pub fn total_chains(&self) -> u64 {
        self.chain_counts().iter().sum()
    }

    /// Visit every chain (strictly increasing in the order) once.
    pub fn for_each_chain(&self, mut f: impl FnMut(&[u32])) {
        let mut stack: Vec<u32> = Vec::new();
        for start in 0..self.len() as u32 {
            self.dfs(start, usize::MAX, &mut stack, &mut f);
        }
    }

    /// Visit every chain with at most `max_len` elements.
    pub fn for_each_chain_up_to(&self, max_len: usize, mut f: impl FnMut(&[u32])) {
        let mut stack: Vec<u32> = Vec::new();
        for start in 0..self.len() as u32 {
            self.dfs(start, max_len, &mut stack, &mut f);
        }
    }

    fn dfs(&self, i: u32, max_len: usize, stack: &mut Vec<u32>, f: &mut impl FnMut(&[u32])) {
        stack.push(i);
        f(stack);
        if stack.len() < max_len {
            for &j in &self.above[i as usize] {
                self.dfs(j, max_len, stack, f);
            }
        }
        stack.pop();
    }

    /// Order complex: vertices are the poset elements, simplices its chains.
    pub fn order_complex(&self) -> SimplicialComplex {
        self.order_complex_up_to(usize::MAX)
    }

    /// Skeleton of the order complex spanned by chains of at most `max_len`
    /// elements. Homology below the top retained degree is unaffected by the
    /// truncation.
    pub fn order_complex_up_to(&self, max_len: usize) -> SimplicialComplex {
        let counts = self.chain_counts();
        let mut by_dim: Vec<Vec<u32>> = counts
            .iter()
            .take(max_len)
            .enumerate()
            .map(|(d, &c)| Vec::with_capacity(c as usize * (d + 1)))
            .collect();
        let keep = by_dim.len();
        self.for_each_chain_up_to(keep, |chain| {
            by_dim[chain.len() - 1].extend_from_slice(chain);
        });
        SimplicialComplex::from_closed_strata(self.len(), by_dim)
            .expect("chains form a closed family")
    }

    /// Order complex, refusing to materialize more than `cap` simplices.
    pub fn order_complex_capped(&self, cap: u64, what: &str) -> Result<SimplicialComplex> {
        self.order_complex_capped_up_to(usize::MAX, cap, what)
    }

    /// n-fold product poset, ordered componentwise. Elements are n-tuples of
    /// ids of self, listed in lexicographic order (a linear extension, since
    /// each factor's ids already are one). Returns the poset together with
    /// the tuple behind each new id.
    pub fn power(&self, n: usize, cap: u64) -> Result<(Poset, Vec<Vec<u32>>)> {
        if n == 0 {
            return Err(Error::InvalidInput("product power needs n >= 1".into()));
        }
        if self.is_empty() {
            return Ok((Poset::new(Vec::new()), Vec::new()));
        }
        let base = self.len() as u64;
        let count = base.checked_pow(n as u32).filter(|&c| c <= cap).ok_or_else(|| {
            Error::Capacity {
                what: "product poset elements".into(),
                needed: base.saturating_pow(n as u32),
                limit: cap,
            }
        })?;
        let count = count as usize;
        let mut tuples: Vec<Vec<u32>> = Vec::with_capacity(count);
        let mut cur = vec![0u32; n];
        loop {
            tuples.push(cur.clone());
            let mut pos = n;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                cur[pos] += 1;
                if (cur[pos] as usize) < self.len() {
                    break;
                }
                cur[pos] = 0;
            }
            if cur.iter().all(|&c| c == 0) {
                break;
            }
        }
        // index of a tuple in lexicographic order is its mixed-radix value
        let rank_of = |t: &[u32]| -> u32 {
            t.iter().fold(0u64, |acc, &c| acc * base + c as u64) as u32
        };
        // weak up-sets per factor element: the element itself plus everything
        // strictly above it
        let weak: Vec<Vec<u32>> = (0..self.len())
            .map(|i| {
                let mut w = Vec::with_capacity(1 + self.above[i].len());
                w.push(i as u32);
                w.extend_from_slice(&self.above[i]);
                w.sort_unstable();
                w
            })
            .collect();
        let mut above: Vec<Vec<u32>> = Vec::with_capacity(count);
        let mut counters = vec![0usize; n];
        for t in &tuples {
            let mut ups = Vec::new();
            counters.iter_mut().for_each(|c| *c = 0);
            'outer: loop {
                let cand: Vec<u32> = (0..n)
                    .map(|j| weak[t[j] as usize][counters[j]])
                    .collect();
                if cand != *t {
                    ups.push(rank_of(&cand));
                }
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    counters[pos] += 1;
                    if counters[pos] < weak[t[pos] as usize].len() {
                        break;
                    }
                    counters[pos] = 0;
                }
            }
            ups.sort_unstable();
            above.push(ups);
        }
        Ok((Poset::new(above), tuples))
    }
}

impl Poset {
    /// Truncated order complex under a total simplex budget.
    pub fn order_complex_capped_up_to(
        &self,
        max_len: usize,
        cap: u64,
        what: &str,
    ) -> Result<SimplicialComplex> {
        let total: u64 = self.chain_counts().iter().take(max_len).sum();
        if total > cap {
            return Err(Error::Capacity {
                what: what.to_string(),
                needed: total,
                limit: cap,
            });
        }
        Ok(self.order_complex_up_to(max_len))
    }
}

/// Staircase triangulation of the n-fold product of a complex: the order
/// complex of the n-th power of its face poset. Coordinate projections and
/// coordinate permutations act simplicially on the result.
pub fn product_complex(k: &SimplicialComplex, n: usize, cap: u64) -> Result<SimplicialComplex> {
    let (poset, _) = k.face_poset().power(n, cap)?;
    poset.order_complex_capped(cap, "product complex simplices")
}
