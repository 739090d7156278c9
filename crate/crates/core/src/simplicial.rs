//! Finite abstract simplicial complexes.
//!
//! Simplices are strictly increasing vertex lists. Storage is flat and
//! strided per dimension so that complexes with millions of simplices stay
//! cheap: `by_dim[d]` concatenates all d-simplices in lexicographic order.

use std::collections::{BTreeSet, HashMap};

use crate::chain::{ChainComplex, IntMatrix, IntegralHomology};
use crate::error::{Error, Result};
use crate::poset::Poset;

/// Sort a vertex list in place; returns the sign of the sorting permutation,
/// or an error when a vertex repeats.
pub fn sort_with_sign(verts: &mut [u32]) -> Result<i64> {
    let mut sign = 1i64;
    // insertion sort, counting swaps; vertex lists are tiny
    for i in 1..verts.len() {
        let mut j = i;
        while j > 0 && verts[j - 1] > verts[j] {
            verts.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in verts.windows(2) {
        if w[0] == w[1] {
            return Err(Error::InvalidInput(format!(
                "degenerate simplex: vertex {} repeats",
                w[0]
            )));
        }
    }
    Ok(sign)
}

fn cmp_simplex(a: &[u32], b: &[u32]) -> std::cmp::Ordering {
    a.cmp(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialComplex {
    n_vertices: usize,
    by_dim: Vec<Vec<u32>>,
}

impl SimplicialComplex {
    /// Build from maximal (or any generating) faces; closes downward and
    /// includes every vertex 0..n_vertices as a 0-simplex.
    pub fn from_facets(n_vertices: usize, facets: &[Vec<u32>]) -> Result<Self> {
        let mut all: BTreeSet<Vec<u32>> = BTreeSet::new();
        for v in 0..n_vertices as u32 {
            all.insert(vec![v]);
        }
        for facet in facets {
            let mut f = facet.clone();
            sort_with_sign(&mut f)?;
            if let Some(&v) = f.iter().find(|&&v| v as usize >= n_vertices) {
                return Err(Error::InvalidInput(format!(
                    "facet vertex {} out of range 0..{}",
                    v, n_vertices
                )));
            }
            if f.is_empty() {
                return Err(Error::InvalidInput("empty facet".into()));
            }
            // every nonempty subset
            let m = f.len();
            for mask in 1u32..(1 << m) {
                let sub: Vec<u32> = (0..m)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| f[i])
                    .collect();
                all.insert(sub);
            }
        }
        let mut by_dim: Vec<Vec<u32>> = Vec::new();
        for s in all {
            let d = s.len() - 1;
            while by_dim.len() <= d {
                by_dim.push(Vec::new());
            }
            by_dim[d].extend_from_slice(&s);
        }
        // BTreeSet orders by length only indirectly; re-sort each stratum
        let mut complex = SimplicialComplex { n_vertices, by_dim };
        complex.sort_strata();
        Ok(complex)
    }

    /// Build from an already downward-closed family, grouped by dimension as
    /// flat strided arrays. Used by order complexes, where closure holds by
    /// construction.
    pub fn from_closed_strata(n_vertices: usize, by_dim: Vec<Vec<u32>>) -> Result<Self> {
        for (d, flat) in by_dim.iter().enumerate() {
            if flat.len() % (d + 1) != 0 {
                return Err(Error::InvalidInput(format!(
                    "stratum {} has length {} not divisible by {}",
                    d,
                    flat.len(),
                    d + 1
                )));
            }
        }
        let mut complex = SimplicialComplex { n_vertices, by_dim };
        complex.sort_strata();
        if cfg!(debug_assertions) {
            complex.debug_validate()?;
        }
        Ok(complex)
    }

    fn sort_strata(&mut self) {
        for d in 0..self.by_dim.len() {
            let stride = d + 1;
            let flat = &mut self.by_dim[d];
            let n = flat.len() / stride;
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| {
                cmp_simplex(&flat[a * stride..(a + 1) * stride], &flat[b * stride..(b + 1) * stride])
            });
            let flat_ro = std::mem::take(flat);
            let mut out: Vec<u32> = Vec::with_capacity(flat_ro.len());
            for &i in &idx {
                let s = &flat_ro[i * stride..(i + 1) * stride];
                let duplicate = out.len() >= stride && &out[out.len() - stride..] == s;
                if !duplicate {
                    out.extend_from_slice(s);
                }
            }
            *flat = out;
        }
        while self
            .by_dim
            .last()
            .map(|f| f.is_empty())
            .unwrap_or(false)
        {
            self.by_dim.pop();
        }
    }

    fn debug_validate(&self) -> Result<()> {
        for d in 0..self.by_dim.len() {
            for i in 0..self.count(d) {
                let s = self.simplex(d, i);
                for w in s.windows(2) {
                    if w[0] >= w[1] {
                        return Err(Error::InvalidInput("simplex not strictly sorted".into()));
                    }
                }
                if s.last().map(|&v| v as usize >= self.n_vertices).unwrap_or(false) {
                    return Err(Error::InvalidInput("vertex out of range".into()));
                }
                if d > 0 {
                    // faces must be present
                    let mut face = Vec::with_capacity(d);
                    for drop in 0..=d {
                        face.clear();
                        face.extend(s.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &v)| v));
                        if self.index_of(d - 1, &face).is_none() {
                            return Err(Error::InvalidInput(
                                "family is not closed under faces".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Largest dimension with at least one simplex; empty complexes have none.
    pub fn dim(&self) -> Option<usize> {
        if self.by_dim.is_empty() {
            None
        } else {
            Some(self.by_dim.len() - 1)
        }
    }

    pub fn count(&self, d: usize) -> usize {
        self.by_dim.get(d).map(|f| f.len() / (d + 1)).unwrap_or(0)
    }

    pub fn total_count(&self) -> usize {
        (0..self.by_dim.len()).map(|d| self.count(d)).sum()
    }

    pub fn f_vector(&self) -> Vec<usize> {
        (0..self.by_dim.len()).map(|d| self.count(d)).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for (d, _) in self.by_dim.iter().enumerate() {
            let c = self.count(d) as i64;
            if d % 2 == 0 {
                chi += c;
            } else {
                chi -= c;
            }
        }
        chi
    }

    pub fn simplex(&self, d: usize, i: usize) -> &[u32] {
        let stride = d + 1;
        &self.by_dim[d][i * stride..(i + 1) * stride]
    }

    pub fn simplices(&self, d: usize) -> impl Iterator<Item = &[u32]> {
        self.by_dim
            .get(d)
            .map(|f| f.chunks_exact(d + 1))
            .into_iter()
            .flatten()
    }

    /// Index of a sorted simplex within its dimension stratum.
    pub fn index_of(&self, d: usize, simplex: &[u32]) -> Option<usize> {
        debug_assert_eq!(simplex.len(), d + 1);
        let flat = self.by_dim.get(d)?;
        let stride = d + 1;
        let n = flat.len() / stride;
        let (mut lo, mut hi) = (0usize, n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match cmp_simplex(&flat[mid * stride..(mid + 1) * stride], simplex) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return Some(mid),
            }
        }
        None
    }

    pub fn contains(&self, simplex: &[u32]) -> bool {
        if simplex.is_empty() {
            return false;
        }
        self.index_of(simplex.len() - 1, simplex).is_some()
    }

    /// Offsets for a global simplex numbering ordered by (dimension, lex).
    pub fn global_offsets(&self) -> Vec<usize> {
        let mut off = vec![0usize; self.by_dim.len() + 1];
        for d in 0..self.by_dim.len() {
            off[d + 1] = off[d] + self.count(d);
        }
        off
    }

    /// Matrix of the boundary map C_k -> C_{k-1}.
    pub fn boundary_matrix(&self, k: usize) -> IntMatrix {
        assert!(k >= 1);
        let mut m = IntMatrix::new(self.count(k - 1), self.count(k));
        let mut face = vec![0u32; k];
        for i in 0..self.count(k) {
            let s = self.simplex(k, i);
            for drop in 0..=k {
                let mut t = 0;
                for (j, &v) in s.iter().enumerate() {
                    if j != drop {
                        face[t] = v;
                        t += 1;
                    }
                }
                let row = self
                    .index_of(k - 1, &face)
                    .expect("face missing from closed complex");
                let sign = if drop % 2 == 0 { 1 } else { -1 };
                m.push(row, i, sign);
            }
        }
        m
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let dims = self.f_vector();
        let top = dims.len().saturating_sub(1);
        let boundaries: Vec<IntMatrix> = (1..=top).map(|k| self.boundary_matrix(k)).collect();
        ChainComplex::new(dims, boundaries).expect("simplicial chain complex is well formed")
    }

    pub fn betti(&self) -> Vec<usize> {
        self.chain_complex().betti()
    }

    pub fn integral_homology(&self) -> Vec<IntegralHomology> {
        self.chain_complex().integral_homology()
    }

    /// Face poset with global ids ordered by (dimension, lex); the order is a
    /// linear extension. `above[x]` lists the strict cofaces of x.
    pub fn face_poset(&self) -> Poset {
        let offsets = self.global_offsets();
        let total = *offsets.last().unwrap();
        let mut above: Vec<Vec<u32>> = vec![Vec::new(); total];
        // for each simplex, enumerate proper nonempty subsets and record the
        // coface relation on the subset
        for d in 1..self.by_dim.len() {
            for i in 0..self.count(d) {
                let s = self.simplex(d, i);
                let me = (offsets[d] + i) as u32;
                let m = d + 1;
                for mask in 1u32..((1 << m) - 1) {
                    let sub: Vec<u32> = (0..m)
                        .filter(|j| mask & (1 << j) != 0)
                        .map(|j| s[j])
                        .collect();
                    let sd = sub.len() - 1;
                    let si = self.index_of(sd, &sub).expect("closed complex");
                    above[offsets[sd] + si].push(me);
                }
            }
        }
        for list in &mut above {
            list.sort_unstable();
            list.dedup();
        }
        Poset::new(above)
    }

    /// Barycentric subdivision: order complex of the face poset. The new
    /// vertex with id v is the barycenter of the old simplex `table[v]`.
    pub fn barycentric_subdivision(&self) -> Subdivision {
        let poset = self.face_poset();
        let complex = poset.order_complex();
        let offsets = self.global_offsets();
        let mut table = Vec::with_capacity(*offsets.last().unwrap());
        for d in 0..self.by_dim.len() {
            for i in 0..self.count(d) {
                table.push(self.simplex(d, i).to_vec());
            }
        }
        Subdivision { complex, vertex_simplices: table }
    }

    /// Full subcomplex induced on a vertex subset, with vertices renumbered
    /// 0..k in increasing order of old id. Returns the complex and the old
    /// ids in new order.
    pub fn full_subcomplex(&self, vertices: &BTreeSet<u32>) -> (SimplicialComplex, Vec<u32>) {
        let old_ids: Vec<u32> = vertices.iter().cloned().collect();
        let renumber: HashMap<u32, u32> = old_ids
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let mut by_dim: Vec<Vec<u32>> = Vec::new();
        for d in 0..self.by_dim.len() {
            let mut flat = Vec::new();
            for s in self.simplices(d) {
                if s.iter().all(|v| renumber.contains_key(v)) {
                    for v in s {
                        flat.push(renumber[v]);
                    }
                }
            }
            by_dim.push(flat);
        }
        while by_dim.last().map(|f| f.is_empty()).unwrap_or(false) {
            by_dim.pop();
        }
        let sub = SimplicialComplex {
            n_vertices: old_ids.len(),
            by_dim,
        };
        (sub, old_ids)
    }

    /// Chain complex of the pair (X, A) where A is the full subcomplex on
    /// `sub_vertices`: the quotient by the subcomplex's chains. Also returns,
    /// per degree, the indices of the simplices that survive (those with a
    /// vertex outside A).
    pub fn relative_chain_complex(
        &self,
        sub_vertices: &BTreeSet<u32>,
    ) -> (ChainComplex, Vec<Vec<u32>>) {
        let mut kept: Vec<Vec<u32>> = Vec::new();
        let mut new_index: Vec<HashMap<u32, u32>> = Vec::new();
        for d in 0..self.by_dim.len() {
            let mut ks = Vec::new();
            let mut map = HashMap::new();
            for (i, s) in self.simplices(d).enumerate() {
                if !s.iter().all(|v| sub_vertices.contains(v)) {
                    map.insert(i as u32, ks.len() as u32);
                    ks.push(i as u32);
                }
            }
            kept.push(ks);
            new_index.push(map);
        }
        let dims: Vec<usize> = kept.iter().map(|k| k.len()).collect();
        let top = dims.len().saturating_sub(1);
        let mut boundaries = Vec::new();
        let mut face = Vec::new();
        for k in 1..=top {
            let mut m = IntMatrix::new(dims[k - 1], dims[k]);
            for (new_col, &old_col) in kept[k].iter().enumerate() {
                let s = self.simplex(k, old_col as usize);
                for drop in 0..=k {
                    face.clear();
                    face.extend(s.iter().enumerate().filter(|(j, _)| *j != drop).map(|(_, &v)| v));
                    let old_row = self.index_of(k - 1, &face).expect("closed complex") as u32;
                    if let Some(&new_row) = new_index[k - 1].get(&old_row) {
                        let sign = if drop % 2 == 0 { 1 } else { -1 };
                        m.push(new_row as usize, new_col, sign);
                    }
                }
            }
            boundaries.push(m);
        }
        (
            ChainComplex::new(dims, boundaries).expect("relative chain complex is well formed"),
            kept,
        )
    }
}

/// A barycentric subdivision together with the table sending each new vertex
/// to the simplex of the original complex it subdivides.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub complex: SimplicialComplex,
    pub vertex_simplices: Vec<Vec<u32>>,
}

impl Subdivision {
    /// Lift a vertex permutation of the original complex to the subdivision:
    /// the barycenter of s maps to the barycenter of the image of s.
    pub fn lift_vertex_map(&self, original: &SimplicialComplex, perm: &[u32]) -> Result<Vec<u32>> {
        let offsets = original.global_offsets();
        let mut out = Vec::with_capacity(self.vertex_simplices.len());
        for s in &self.vertex_simplices {
            let mut img: Vec<u32> = s.iter().map(|&v| perm[v as usize]).collect();
            sort_with_sign(&mut img)?;
            let d = img.len() - 1;
            let idx = original.index_of(d, &img).ok_or_else(|| {
                Error::InvalidInput("vertex map does not preserve the complex".into())
            })?;
            out.push((offsets[d] + idx) as u32);
        }
        Ok(out)
    }
}
