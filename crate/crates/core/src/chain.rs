//! Chain complexes of finitely generated free modules, presented by integer
//! boundary matrices, with exact homology: Betti numbers over the rationals,
//! torsion over the integers, and explicit cycle bases in a chosen degree.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{int_rank, int_smith, sv_axpy, Echelon, SparseVec};

/// Compact integer matrix in triplet form. Boundary matrices of the cell
/// models stay well inside i64 range, so entries are primitive integers and
/// only the elimination engines promote to arbitrary precision.
#[derive(Clone, Debug, Default)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<(u32, u32, i64)>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, r: usize, c: usize, v: i64) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if v != 0 {
            self.entries.push((r as u32, c as u32, v));
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn to_bigint_triplets(&self) -> Vec<(u32, u32, BigInt)> {
        self.entries
            .iter()
            .map(|&(r, c, v)| (r, c, BigInt::from(v)))
            .collect()
    }

    pub fn rank(&self) -> usize {
        int_rank(self.rows, self.cols, self.to_bigint_triplets())
    }

    /// Nonzero invariant factors in divisibility order.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        int_smith(self.rows, self.cols, self.to_bigint_triplets())
    }

    /// Columns as sparse rational vectors (duplicate triplets are summed).
    pub fn columns(&self) -> Vec<SparseVec> {
        let mut sorted = self.entries.clone();
        sorted.sort_unstable_by_key(|&(r, c, _)| (c, r));
        let mut out: Vec<SparseVec> = vec![Vec::new(); self.cols];
        for (r, c, v) in sorted {
            let col = &mut out[c as usize];
            if let Some(last) = col.last_mut() {
                if last.0 == r {
                    last.1 += BigRational::from(BigInt::from(v));
                    if last.1.is_zero() {
                        col.pop();
                    }
                    continue;
                }
            }
            col.push((r, BigRational::from(BigInt::from(v))));
        }
        out
    }

    /// Apply to a sparse vector (matrix times column vector).
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut acc: HashMap<u32, BigRational> = HashMap::new();
        // index columns lazily: for small vectors scan entries grouped by col
        let mut by_col: HashMap<u32, Vec<(u32, i64)>> = HashMap::new();
        for &(r, c, val) in &self.entries {
            by_col.entry(c).or_default().push((r, val));
        }
        for (c, coeff) in v {
            if let Some(col) = by_col.get(c) {
                for &(r, val) in col {
                    let slot = acc.entry(r).or_insert_with(BigRational::zero);
                    *slot += coeff * BigRational::from(BigInt::from(val));
                }
            }
        }
        let mut out: SparseVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        out.sort_unstable_by_key(|e| e.0);
        out
    }
}

/// Homology of one degree with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntegralHomology {
    pub betti: usize,
    /// torsion coefficients d_1 | d_2 | ..., each > 1
    pub torsion: Vec<BigInt>,
}

/// A bounded chain complex C_0 <- C_1 <- ... <- C_top.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    dims: Vec<usize>,
    /// boundaries[k] is the matrix of d_{k+1}: C_{k+1} -> C_k
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    pub fn new(dims: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidInput("chain complex needs at least C_0".into()));
        }
        if boundaries.len() + 1 != dims.len() {
            return Err(Error::InvalidInput(format!(
                "chain complex with {} degrees needs {} boundary matrices, got {}",
                dims.len(),
                dims.len() - 1,
                boundaries.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            if b.rows != dims[k] || b.cols != dims[k + 1] {
                return Err(Error::InvalidInput(format!(
                    "boundary {} has shape {}x{}, expected {}x{}",
                    k + 1,
                    b.rows,
                    b.cols,
                    dims[k],
                    dims[k + 1]
                )));
            }
        }
        Ok(ChainComplex { dims, boundaries })
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len() - 1
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Matrix of d_k: C_k -> C_{k-1}, for 1 <= k <= top.
    pub fn boundary(&self, k: usize) -> Option<&IntMatrix> {
        if k == 0 || k > self.top_degree() {
            None
        } else {
            Some(&self.boundaries[k - 1])
        }
    }

    /// Verify d o d = 0. Quadratic in column support; intended for models of
    /// modest size and for tests.
    pub fn check_boundaries_compose_to_zero(&self) -> Result<()> {
        for k in 2..=self.top_degree() {
            let upper = self.boundary(k).unwrap();
            let lower = self.boundary(k - 1).unwrap();
            for (j, col) in upper.columns().into_iter().enumerate() {
                let image = lower.apply(&col);
                if !image.is_empty() {
                    return Err(Error::InvalidInput(format!(
                        "boundary of boundary is nonzero in degree {} at column {}",
                        k, j
                    )));
                }
            }
        }
        Ok(())
    }

    /// Betti numbers over the rationals for every degree 0..=top.
    pub fn betti(&self) -> Vec<usize> {
        let ranks: Vec<usize> = self.boundaries.iter().map(|b| b.rank()).collect();
        (0..=self.top_degree())
            .map(|k| {
                let out = if k == 0 { 0 } else { ranks[k - 1] };
                let inn = if k == self.top_degree() { 0 } else { ranks[k] };
                self.dims[k] - out - inn
            })
            .collect()
    }

    /// Integral homology in every degree: Betti number plus the torsion
    /// coefficients of H_k, read off the Smith form of d_{k+1}.
    pub fn integral_homology(&self) -> Vec<IntegralHomology> {
        let smiths: Vec<Vec<BigInt>> = self
            .boundaries
            .iter()
            .map(|b| b.invariant_factors())
            .collect();
        (0..=self.top_degree())
            .map(|k| {
                let rank_out = if k == 0 { 0 } else { smiths[k - 1].len() };
                let (rank_in, torsion) = if k == self.top_degree() {
                    (0, Vec::new())
                } else {
                    let f = &smiths[k];
                    (
                        f.len(),
                        f.iter().filter(|d| !d.is_one()).cloned().collect(),
                    )
                };
                IntegralHomology {
                    betti: self.dims[k] - rank_out - rank_in,
                    torsion,
                }
            })
            .collect()
    }

    /// Integral homology in a single degree, touching only d_k and d_{k+1}.
    /// Much cheaper than `integral_homology` on complexes whose other
    /// boundary maps are large.
    pub fn integral_homology_at(&self, k: usize) -> IntegralHomology {
        let rank_out = if k == 0 || k > self.top_degree() {
            0
        } else {
            self.boundaries[k - 1].rank()
        };
        let (rank_in, torsion) = if k >= self.top_degree() {
            (0, Vec::new())
        } else {
            let f = self.boundaries[k].invariant_factors();
            (
                f.len(),
                f.iter().filter(|d| !d.is_one()).cloned().collect(),
            )
        };
        IntegralHomology {
            betti: self.dims[k] - rank_out - rank_in,
            torsion,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        let mut chi = 0i64;
        for (k, &d) in self.dims.iter().enumerate() {
            let term = d as i64;
            if k % 2 == 0 {
                chi += term;
            } else {
                chi -= term;
            }
        }
        chi
    }

    /// Cycle basis of H_k with an expressor for class coordinates.
    pub fn homology_basis(&self, k: usize) -> HomologyBasis {
        assert!(k <= self.top_degree());
        // echelon of boundary columns from degree k+1
        let mut boundary_ech = Echelon::new();
        if k < self.top_degree() {
            for col in self.boundary(k + 1).unwrap().columns() {
                let mut r = col;
                boundary_ech.reduce(&mut r, |_, _| {});
                if !r.is_empty() {
                    boundary_ech.insert(r);
                }
            }
        }
        // kernel of d_k via column reduction with combination tracking
        let mut kernel: Vec<SparseVec> = Vec::new();
        if k == 0 {
            for j in 0..self.dims[0] {
                kernel.push(vec![(j as u32, BigRational::one())]);
            }
        } else {
            let cols = self.boundary(k).unwrap().columns();
            // low -> (reduced column, combination)
            let mut stored: HashMap<u32, (SparseVec, SparseVec)> = HashMap::new();
            for (j, col) in cols.into_iter().enumerate() {
                let mut r = col;
                let mut v: SparseVec = vec![(j as u32, BigRational::one())];
                while let Some((low, val)) = r.last().cloned() {
                    match stored.get(&low) {
                        Some((rcol, vcol)) => {
                            let pivot = &rcol.last().unwrap().1;
                            let coeff = -(&val / pivot);
                            sv_axpy(&mut r, &coeff, rcol);
                            sv_axpy(&mut v, &coeff, vcol);
                        }
                        None => break,
                    }
                }
                if r.is_empty() {
                    kernel.push(v);
                } else {
                    let low = r.last().unwrap().0;
                    stored.insert(low, (r, v));
                }
            }
        }
        // pick out homology classes: kernel vectors surviving reduction by
        // boundaries and previously kept classes
        let mut basis = HomologyBasis {
            boundary_ech,
            class_ech: Echelon::new(),
            class_of_low: HashMap::new(),
            reps: Vec::new(),
        };
        for z in kernel {
            let mut r = z;
            basis.reduce_partial(&mut r, |_, _| {});
            if !r.is_empty() {
                let low = r.last().unwrap().0;
                basis.class_of_low.insert(low, basis.reps.len());
                basis.reps.push(r.clone());
                basis.class_ech.insert(r);
            }
        }
        basis
    }
}

/// Basis of one homology degree: explicit cycle representatives together with
/// the reduction data needed to express any cycle in the basis.
pub struct HomologyBasis {
    boundary_ech: Echelon,
    class_ech: Echelon,
    class_of_low: HashMap<u32, usize>,
    /// cycle representatives; class i is the class of reps[i]
    pub reps: Vec<SparseVec>,
}

impl HomologyBasis {
    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Reduce a chain against boundaries and kept classes as far as the
    /// echelon structure allows, reporting class usages. Stops when the
    /// trailing entry is absorbed by neither echelon; for a genuine cycle in
    /// a completed basis this only happens at zero.
    fn reduce_partial(&self, v: &mut SparseVec, mut on_class: impl FnMut(usize, &BigRational)) {
        loop {
            let (low, val) = match v.last().cloned() {
                Some(e) => e,
                None => return,
            };
            if let Some(col) = self.boundary_ech.get(low) {
                let coeff = -(&val / &col.last().unwrap().1);
                sv_axpy(v, &coeff, col);
            } else if let Some(&idx) = self.class_of_low.get(&low) {
                let col = self.class_ech.get(low).unwrap();
                let coeff = &val / &col.last().unwrap().1;
                on_class(idx, &coeff);
                let neg = -coeff;
                sv_axpy(v, &neg, col);
            } else {
                return;
            }
        }
    }

    /// Coordinates of the class of cycle z in this basis.
    pub fn class_coordinates(&self, z: &SparseVec) -> Result<Vec<BigRational>> {
        let mut coords = vec![BigRational::zero(); self.dim()];
        let mut v = z.clone();
        self.reduce_partial(&mut v, |idx, c| {
            coords[idx] += c;
        });
        if !v.is_empty() {
            return Err(Error::InvalidInput(
                "chain is not a cycle modulo boundaries".into(),
            ));
        }
        Ok(coords)
    }

    /// True when z is a boundary (trivial class).
    pub fn is_boundary(&self, z: &SparseVec) -> Result<bool> {
        Ok(self.class_coordinates(z)?.iter().all(|c| c.is_zero()))
    }
}

/// Tensor product of two chain complexes. Degree k is spanned by pairs
/// (x, y) with x in degree p of `a`, y in degree q of `b`, p + q = k,
/// ordered by p, then by the index of x, then by the index of y. The
/// boundary follows the sign rule d(x@y) = dx@y + (-1)^p x@dy.
pub fn tensor_complex(a: &ChainComplex, b: &ChainComplex) -> Result<ChainComplex> {
    let top = a.top_degree() + b.top_degree();
    let dims: Vec<usize> = (0..=top)
        .map(|k| {
            (0..=k.min(a.top_degree()))
                .filter(|&p| k - p <= b.top_degree())
                .map(|p| a.dim(p) * b.dim(k - p))
                .sum()
        })
        .collect();
    // integer columns of each boundary matrix, duplicates summed
    let int_columns = |m: &IntMatrix| -> Vec<Vec<(u32, i64)>> {
        let mut cols: Vec<Vec<(u32, i64)>> = vec![Vec::new(); m.cols];
        let mut sorted = m.entries.clone();
        sorted.sort_unstable_by_key(|&(r, c, _)| (c, r));
        for (r, c, v) in sorted {
            let col = &mut cols[c as usize];
            match col.last_mut() {
                Some(last) if last.0 == r => last.1 += v,
                _ => col.push((r, v)),
            }
        }
        cols.iter_mut().for_each(|c| c.retain(|&(_, v)| v != 0));
        cols
    };
    let a_cols: Vec<Vec<Vec<(u32, i64)>>> =
        (1..=a.top_degree()).map(|p| int_columns(a.boundary(p).unwrap())).collect();
    let b_cols: Vec<Vec<Vec<(u32, i64)>>> =
        (1..=b.top_degree()).map(|q| int_columns(b.boundary(q).unwrap())).collect();
    // starting offset of the (p, k - p) block inside degree k
    let block_offset = |k: usize, p: usize| -> usize {
        (0..p)
            .filter(|&p2| p2 <= k && k - p2 <= b.top_degree())
            .map(|p2| a.dim(p2) * b.dim(k - p2))
            .sum()
    };
    let mut boundaries = Vec::with_capacity(top);
    for k in 1..=top {
        let mut d = IntMatrix::new(dims[k - 1], dims[k]);
        for p in 0..=k.min(a.top_degree()) {
            let q = k - p;
            if q > b.top_degree() {
                continue;
            }
            let base = block_offset(k, p);
            let sign = if p % 2 == 0 { 1 } else { -1 };
            for i in 0..a.dim(p) {
                for j in 0..b.dim(q) {
                    let col = base + i * b.dim(q) + j;
                    if p >= 1 {
                        let dst = block_offset(k - 1, p - 1);
                        for &(r, v) in &a_cols[p - 1][i] {
                            d.push(dst + r as usize * b.dim(q) + j, col, v);
                        }
                    }
                    if q >= 1 {
                        let dst = block_offset(k - 1, p);
                        for &(r, v) in &b_cols[q - 1][j] {
                            d.push(dst + i * b.dim(q - 1) + r as usize, col, sign * v);
                        }
                    }
                }
            }
        }
        boundaries.push(d);
    }
    ChainComplex::new(dims, boundaries)
}

pub fn alternating_sum(counts: &[usize]) -> i64 {
    let mut s = 0i64;
    for (k, &c) in counts.iter().enumerate() {
        if k % 2 == 0 {
            s += c as i64;
        } else {
            s -= c as i64;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Circle modelled as a square: 4 vertices, 4 edges glued in a loop.
    fn circle() -> ChainComplex {
        let mut d1 = IntMatrix::new(4, 4);
        for e in 0..4usize {
            let a = e;
            let b = (e + 1) % 4;
            d1.push(a, e, -1);
            d1.push(b, e, 1);
        }
        ChainComplex::new(vec![4, 4], vec![d1]).unwrap()
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        c.check_boundaries_compose_to_zero().unwrap();
        assert_eq!(c.betti(), vec![1, 1]);
        let ih = c.integral_homology();
        assert_eq!(ih[0], IntegralHomology { betti: 1, torsion: vec![] });
        assert_eq!(ih[1], IntegralHomology { betti: 1, torsion: vec![] });
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn circle_cycle_coordinates() {
        let c = circle();
        let basis = c.homology_basis(1);
        assert_eq!(basis.dim(), 1);
        // the full loop is a cycle; twice the loop has coordinate twice that
        let loop_cycle: SparseVec = (0..4)
            .map(|e| (e as u32, BigRational::from(BigInt::from(1))))
            .collect();
        let once = basis.class_coordinates(&loop_cycle).unwrap();
        let twice_vec: SparseVec = (0..4)
            .map(|e| (e as u32, BigRational::from(BigInt::from(2))))
            .collect();
        let twice = basis.class_coordinates(&twice_vec).unwrap();
        assert_eq!(&once[0] + &once[0], twice[0]);
        assert!(!once[0].is_zero());
    }

    #[test]
    fn minimal_model_with_torsion() {
        // one cell in each degree 0..2 with degree-2 attaching map doubling:
        // homology Z, Z/2, 0
        let d1 = IntMatrix::new(1, 1);
        let mut d2 = IntMatrix::new(1, 1);
        d2.push(0, 0, 2);
        let c = ChainComplex::new(vec![1, 1, 1], vec![d1, d2]).unwrap();
        assert_eq!(c.betti(), vec![1, 0, 0]);
        let ih = c.integral_homology();
        assert_eq!(ih[0].torsion, Vec::<BigInt>::new());
        assert_eq!(ih[1].torsion, vec![BigInt::from(2)]);
        assert_eq!(ih[1].betti, 0);
        assert_eq!(ih[2].betti, 0);
    }

    #[test]
    fn non_cycle_is_rejected() {
        let c = circle();
        let basis = c.homology_basis(1);
        // a single edge is not a cycle
        let edge: SparseVec = vec![(0, BigRational::from(BigInt::from(1)))];
        assert!(basis.class_coordinates(&edge).is_err());
    }

    #[test]
    fn tensor_with_a_point_is_the_identity() {
        let point = ChainComplex::new(vec![1], vec![]).unwrap();
        let c = circle();
        for t in [tensor_complex(&point, &c).unwrap(), tensor_complex(&c, &point).unwrap()] {
            assert_eq!(t.dims(), c.dims());
            t.check_boundaries_compose_to_zero().unwrap();
            assert_eq!(t.betti(), vec![1, 1]);
        }
    }

    #[test]
    fn torus_from_two_circles() {
        let t = tensor_complex(&circle(), &circle()).unwrap();
        assert_eq!(t.dims(), &[16, 32, 16]);
        t.check_boundaries_compose_to_zero().unwrap();
        assert_eq!(t.betti(), vec![1, 2, 1]);
        assert_eq!(t.euler_characteristic(), 0);
    }

    #[test]
    fn tensor_square_of_a_torsion_model() {
        // M has homology Z, Z/2, 0; the tensor square picks up the torsion
        // products and the degree-shifted torsion of Z/2 with itself
        let d1 = IntMatrix::new(1, 1);
        let mut d2 = IntMatrix::new(1, 1);
        d2.push(0, 0, 2);
        let m = ChainComplex::new(vec![1, 1, 1], vec![d1, d2]).unwrap();
        let t = tensor_complex(&m, &m).unwrap();
        t.check_boundaries_compose_to_zero().unwrap();
        let ih = t.integral_homology();
        assert_eq!(t.betti(), vec![1, 0, 0, 0, 0]);
        assert_eq!(ih[1].torsion, vec![BigInt::from(2), BigInt::from(2)]);
        assert_eq!(ih[2].torsion, vec![BigInt::from(2)]);
        assert_eq!(ih[3].torsion, vec![BigInt::from(2)]);
        assert_eq!(ih[4].betti, 0);
    }

    #[test]
    fn degree_zero_classes_count_components() {
        // two disjoint edges: 4 vertices, 2 edges, two components
        let mut d1 = IntMatrix::new(4, 2);
        d1.push(0, 0, -1);
        d1.push(1, 0, 1);
        d1.push(2, 1, -1);
        d1.push(3, 1, 1);
        let c = ChainComplex::new(vec![4, 2], vec![d1]).unwrap();
        assert_eq!(c.betti(), vec![2, 0]);
        let b0 = c.homology_basis(0);
        assert_eq!(b0.dim(), 2);
        // vertices 0 and 1 are homologous, 0 and 2 are not
        let z01: SparseVec = vec![
            (0, BigRational::from(BigInt::from(1))),
            (1, BigRational::from(BigInt::from(-1))),
        ];
        assert!(b0.is_boundary(&z01).unwrap());
        let z02: SparseVec = vec![
            (0, BigRational::from(BigInt::from(1))),
            (2, BigRational::from(BigInt::from(-1))),
        ];
        assert!(!b0.is_boundary(&z02).unwrap());
    }
}
