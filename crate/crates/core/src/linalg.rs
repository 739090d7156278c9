//! Exact sparse linear algebra over the integers and rationals.
//!
//! Everything here is exact: ranks are computed by fraction-free integer
//! elimination with content reduction, Smith normal forms by unit-pivot
//! sparse elimination followed by a dense cleanup of the residual block.
//! No floating point, no modular shortcuts.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Sparse matrix with exact rational entries, row/column indexed from 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(u32, u32), BigRational>,
}

impl SparseMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn set(&mut self, r: usize, c: usize, value: BigRational) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        if value.is_zero() {
            self.entries.remove(&(r as u32, c as u32));
        } else {
            self.entries.insert((r as u32, c as u32), value);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, value: &BigRational) {
        assert!(r < self.rows && c < self.cols, "entry out of range");
        let key = (r as u32, c as u32);
        let cur = self.entries.entry(key).or_insert_with(BigRational::zero);
        *cur += value;
        if cur.is_zero() {
            self.entries.remove(&key);
        }
    }

    pub fn set_int(&mut self, r: usize, c: usize, value: i64) {
        self.set(r, c, BigRational::from(BigInt::from(value)));
    }

    pub fn get(&self, r: usize, c: usize) -> BigRational {
        self.entries
            .get(&(r as u32, c as u32))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &BigRational)> {
        self.entries
            .iter()
            .map(|(&(r, c), v)| (r as usize, c as usize, v))
    }

    pub fn from_int_triplets(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (u32, u32, BigInt)>,
    ) -> Self {
        let mut m = SparseMatrix::new(rows, cols);
        for (r, c, v) in triplets {
            if !v.is_zero() {
                m.add_to(r as usize, c as usize, &BigRational::from(v));
            }
        }
        m
    }

    pub fn transpose(&self) -> SparseMatrix {
        let mut t = SparseMatrix::new(self.cols, self.rows);
        for (r, c, v) in self.iter() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn is_integer(&self) -> bool {
        self.entries.values().all(|v| v.is_integer())
    }

    /// Integer triplets after clearing denominators row by row. Row scaling
    /// by a positive rational preserves both rank and right kernel.
    fn integer_rows(&self) -> Vec<(u32, u32, BigInt)> {
        let mut per_row: HashMap<u32, BigInt> = HashMap::new();
        for (&(r, _), v) in &self.entries {
            let d = per_row.entry(r).or_insert_with(BigInt::one);
            *d = d.lcm(v.denom());
        }
        self.entries
            .iter()
            .map(|(&(r, c), v)| {
                let scale = &per_row[&r];
                let scaled = v * BigRational::from(scale.clone());
                debug_assert!(scaled.is_integer());
                (r, c, scaled.to_integer())
            })
            .collect()
    }

    /// Rank over the rationals.
    pub fn rank_rational(&self) -> usize {
        int_rank(self.rows, self.cols, self.integer_rows())
    }

    /// Basis of the right kernel { v : A v = 0 } over the rationals.
    /// Each vector is returned dense with length `cols`.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        // Reduced row echelon form on sparse rows.
        let mut rows: Vec<BTreeMap<u32, BigRational>> = Vec::new();
        let mut grouped: BTreeMap<u32, BTreeMap<u32, BigRational>> = BTreeMap::new();
        for (&(r, c), v) in &self.entries {
            grouped.entry(r).or_default().insert(c, v.clone());
        }
        rows.extend(grouped.into_values());

        let mut pivot_of_col: BTreeMap<u32, usize> = BTreeMap::new();
        let mut reduced: Vec<BTreeMap<u32, BigRational>> = Vec::new();
        for mut row in rows {
            loop {
                let lead = match row.keys().next().cloned() {
                    Some(c) => c,
                    None => break,
                };
                if let Some(&idx) = pivot_of_col.get(&lead) {
                    let coeff = row[&lead].clone();
                    let other = reduced[idx].clone();
                    for (c, v) in other {
                        let delta = &v * &coeff;
                        let cur = row.entry(c).or_insert_with(BigRational::zero);
                        *cur -= delta;
                        if cur.is_zero() {
                            row.remove(&c);
                        }
                    }
                } else {
                    // normalize pivot to 1
                    let coeff = row[&lead].clone();
                    for v in row.values_mut() {
                        *v /= coeff.clone();
                    }
                    pivot_of_col.insert(lead, reduced.len());
                    reduced.push(row);
                    break;
                }
            }
        }
        // back-substitute to full RREF
        let order: Vec<(u32, usize)> = pivot_of_col.iter().map(|(&c, &i)| (c, i)).collect();
        for k in (0..order.len()).rev() {
            let (pc, pi) = order[k];
            let prow = reduced[pi].clone();
            for &(qc, qi) in order.iter().take(k) {
                let _ = qc;
                let coeff = match reduced[qi].get(&pc) {
                    Some(v) => v.clone(),
                    None => continue,
                };
                for (c, v) in &prow {
                    let delta = v * &coeff;
                    let cur = reduced[qi].entry(*c).or_insert_with(BigRational::zero);
                    *cur -= delta;
                    if cur.is_zero() {
                        reduced[qi].remove(c);
                    }
                }
            }
        }

        let pivot_cols: BTreeSet<u32> = pivot_of_col.keys().cloned().collect();
        let mut basis = Vec::new();
        for free in 0..self.cols as u32 {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![BigRational::zero(); self.cols];
            v[free as usize] = BigRational::one();
            for (&pc, &pi) in &pivot_of_col {
                if let Some(coeff) = reduced[pi].get(&free) {
                    v[pc as usize] = -coeff.clone();
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Smith normal form. Requires integer entries.
    pub fn smith_normal_form(&self, with_transforms: bool) -> Result<SmithForm> {
        if !self.is_integer() {
            return Err(Error::InvalidInput(
                "smith_normal_form requires integer entries".into(),
            ));
        }
        let triplets: Vec<(u32, u32, BigInt)> = self
            .entries
            .iter()
            .map(|(&(r, c), v)| (r, c, v.to_integer()))
            .collect();
        if with_transforms {
            let (d, u, v) = dense_smith_with_transforms(self.rows, self.cols, &triplets);
            let rank = d.len();
            Ok(SmithForm {
                invariant_factors: d,
                rank,
                row_transform: Some(u),
                col_transform: Some(v),
            })
        } else {
            let d = int_smith(self.rows, self.cols, triplets);
            let rank = d.len();
            Ok(SmithForm {
                invariant_factors: d,
                rank,
                row_transform: None,
                col_transform: None,
            })
        }
    }
}

/// Result of a Smith normal form computation: the nonzero diagonal entries
/// d_1 | d_2 | ... (all positive), the rank, and optional unimodular
/// transforms U, V with U * A * V equal to the diagonal form.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub row_transform: Option<Vec<Vec<BigInt>>>,
    pub col_transform: Option<Vec<Vec<BigInt>>>,
}

impl SmithForm {
    /// Invariant factors larger than 1, i.e. the torsion coefficients of the
    /// cokernel.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

// ---------------------------------------------------------------------------
// Sparse integer elimination engine
// ---------------------------------------------------------------------------

struct Elim {
    // rows stored sparse, sorted by column; an empty vec marks a retired row
    row_data: Vec<Vec<(u32, BigInt)>>,
    col_rows: Vec<HashSet<u32>>,
    active: BTreeSet<(u32, u32)>, // (nnz, row)
    rank: usize,
    // when false, only +-1 pivots may be used and content reduction is off
    // (unimodular mode for Smith forms)
    reduce_content: bool,
}

impl Elim {
    fn new(rows: usize, cols: usize, triplets: Vec<(u32, u32, BigInt)>, reduce_content: bool) -> Self {
        let mut row_maps: Vec<BTreeMap<u32, BigInt>> = vec![BTreeMap::new(); rows];
        for (r, c, v) in triplets {
            if v.is_zero() {
                continue;
            }
            let slot = row_maps[r as usize].entry(c).or_insert_with(BigInt::zero);
            *slot += v;
            if slot.is_zero() {
                row_maps[r as usize].remove(&c);
            }
        }
        let mut row_data = Vec::with_capacity(rows);
        let mut col_rows = vec![HashSet::new(); cols];
        let mut active = BTreeSet::new();
        for (r, m) in row_maps.into_iter().enumerate() {
            let v: Vec<(u32, BigInt)> = m.into_iter().collect();
            if !v.is_empty() {
                active.insert((v.len() as u32, r as u32));
                for (c, _) in &v {
                    col_rows[*c as usize].insert(r as u32);
                }
            }
            row_data.push(v);
        }
        Elim {
            row_data,
            col_rows,
            active,
            rank: 0,
            reduce_content,
        }
    }

    fn row_nnz(&self, r: u32) -> usize {
        self.row_data[r as usize].len()
    }

    fn row_entry(&self, r: u32, c: u32) -> Option<&BigInt> {
        let row = &self.row_data[r as usize];
        row.binary_search_by_key(&c, |e| e.0)
            .ok()
            .map(|i| &row[i].1)
    }

    fn retire_row(&mut self, r: u32) -> Vec<(u32, BigInt)> {
        let row = std::mem::take(&mut self.row_data[r as usize]);
        self.active.remove(&(row.len() as u32, r));
        for (c, _) in &row {
            self.col_rows[*c as usize].remove(&r);
        }
        row
    }

    fn install_row(&mut self, r: u32, row: Vec<(u32, BigInt)>) {
        for (c, _) in &row {
            self.col_rows[*c as usize].insert(r);
        }
        if !row.is_empty() {
            self.active.insert((row.len() as u32, r));
        }
        self.row_data[r as usize] = row;
    }

    /// row_t <- (a * row_t - b * row_p), merged sparse; content-reduced when
    /// allowed. a is the pivot value, b the entry of row_t in the pivot col.
    fn combine(target: &[(u32, BigInt)], pivot_row: &[(u32, BigInt)], a: &BigInt, b: &BigInt, reduce: bool) -> Vec<(u32, BigInt)> {
        let mut out: Vec<(u32, BigInt)> = Vec::with_capacity(target.len() + pivot_row.len());
        let (mut i, mut j) = (0usize, 0usize);
        while i < target.len() || j < pivot_row.len() {
            let next = match (target.get(i), pivot_row.get(j)) {
                (Some((ci, vi)), Some((cj, vj))) => {
                    if ci < cj {
                        i += 1;
                        (*ci, vi * a)
                    } else if cj < ci {
                        j += 1;
                        (*cj, -(vj * b))
                    } else {
                        let val = vi * a - vj * b;
                        i += 1;
                        j += 1;
                        (*ci, val)
                    }
                }
                (Some((ci, vi)), None) => {
                    i += 1;
                    (*ci, vi * a)
                }
                (None, Some((cj, vj))) => {
                    j += 1;
                    (*cj, -(vj * b))
                }
                (None, None) => unreachable!(),
            };
            if !next.1.is_zero() {
                out.push(next);
            }
        }
        if reduce && !out.is_empty() {
            let mut g = BigInt::zero();
            for (_, v) in &out {
                g = g.gcd(v);
                if g.is_one() {
                    break;
                }
            }
            if !g.is_one() && !g.is_zero() {
                for (_, v) in &mut out {
                    *v = &*v / &g;
                }
            }
        }
        out
    }

    /// Eliminate with pivot at (r, c); removes row r and column c and updates
    /// every other row meeting column c. In unimodular mode the pivot must be
    /// a unit and rows are rewritten as row - (b/a) * pivot_row.
    fn eliminate(&mut self, r: u32, c: u32) {
        let pivot_row = self.retire_row(r);
        let a = pivot_row
            .binary_search_by_key(&c, |e| e.0)
            .ok()
            .map(|i| pivot_row[i].1.clone())
            .expect("pivot entry must exist");
        let mut touched: Vec<u32> = self.col_rows[c as usize].iter().cloned().collect();
        touched.sort_unstable();
        for r2 in touched {
            let old = self.retire_row(r2);
            let b = old
                .binary_search_by_key(&c, |e| e.0)
                .ok()
                .map(|i| old[i].1.clone())
                .expect("column index out of sync");
            let new = if self.reduce_content {
                Self::combine(&old, &pivot_row, &a, &b, true)
            } else {
                // unimodular: a is +-1, rewrite as row - (b * a) * pivot since 1/a = a
                debug_assert!(a.abs().is_one());
                let factor = &b * &a;
                Self::combine(&old, &pivot_row, &BigInt::one(), &factor, false)
            };
            debug_assert!(new.binary_search_by_key(&c, |e| e.0).is_err());
            self.install_row(r2, new);
        }
        self.rank += 1;
    }

    /// Repeatedly eliminate rows/columns with a single structural nonzero.
    /// In unimodular mode only unit singletons are taken.
    fn singleton_pass(&mut self) {
        loop {
            let mut progress = false;
            // singleton rows
            let singles: Vec<u32> = self
                .active
                .range((1u32, 0u32)..(2u32, 0u32))
                .map(|&(_, r)| r)
                .collect();
            for r in singles {
                if self.row_nnz(r) != 1 {
                    continue;
                }
                let (c, ref v) = self.row_data[r as usize][0];
                if !self.reduce_content && !v.abs().is_one() {
                    continue;
                }
                // deleting the row and its column costs no arithmetic: other
                // entries in column c are wiped by row operations that touch
                // only column c
                let _ = self.retire_row(r);
                let mut others: Vec<u32> = self.col_rows[c as usize].iter().cloned().collect();
                others.sort_unstable();
                for r2 in others {
                    let mut row = self.retire_row(r2);
                    if let Ok(i) = row.binary_search_by_key(&c, |e| e.0) {
                        row.remove(i);
                    }
                    self.install_row(r2, row);
                }
                self.rank += 1;
                progress = true;
            }
            // singleton columns
            for c in 0..self.col_rows.len() {
                if self.col_rows[c].len() != 1 {
                    continue;
                }
                let r = *self.col_rows[c].iter().next().unwrap();
                if !self.reduce_content {
                    let v = self.row_entry(r, c as u32).unwrap();
                    if !v.abs().is_one() {
                        continue;
                    }
                }
                // deleting row r: its other entries are wiped by column ops
                // against column c, touching row r only
                let _ = self.retire_row(r);
                self.rank += 1;
                progress = true;
            }
            if !progress {
                break;
            }
        }
    }

    /// Markowitz-style pivot: scan the sparsest active rows and pick the
    /// entry minimizing (row_nnz - 1) * (col_nnz - 1), preferring units.
    /// Returns None when empty (or, in unimodular mode, when no unit entry
    /// remains anywhere).
    fn pick_pivot(&self) -> Option<(u32, u32)> {
        let mut best: Option<(u64, bool, u32, u32)> = None;
        let mut scanned = 0usize;
        for &(nnz, r) in self.active.iter() {
            if let Some((cost, false, _, _)) = best {
                // rows are ordered by nnz, so no later entry can beat a unit
                // pivot whose cost is below what this row size allows
                if scanned >= 8 && cost <= (nnz as u64).saturating_sub(1) {
                    break;
                }
            }
            for (c, v) in &self.row_data[r as usize] {
                let unit = v.abs().is_one();
                if !self.reduce_content && !unit {
                    continue;
                }
                let cost = (nnz as u64 - 1) * (self.col_rows[*c as usize].len() as u64 - 1);
                let cand = (cost, !unit, r, *c);
                if best.map(|b| cand < b).unwrap_or(true) {
                    best = Some(cand);
                }
            }
            scanned += 1;
            if scanned >= 64 && best.map(|b| !b.1).unwrap_or(false) {
                break;
            }
        }
        // unimodular mode may find nothing among the sparsest rows even
        // though a unit exists further down; fall back to a full scan
        if best.is_none() && !self.reduce_content {
            for &(nnz, r) in self.active.iter() {
                for (c, v) in &self.row_data[r as usize] {
                    if !v.abs().is_one() {
                        continue;
                    }
                    let cost = (nnz as u64 - 1) * (self.col_rows[*c as usize].len() as u64 - 1);
                    let cand = (cost, false, r, *c);
                    if best.map(|b| cand < b).unwrap_or(true) {
                        best = Some(cand);
                    }
                }
            }
        }
        best.map(|(_, _, r, c)| (r, c))
    }

    fn run_rank(mut self) -> usize {
        loop {
            self.singleton_pass();
            match self.pick_pivot() {
                Some((r, c)) => self.eliminate(r, c),
                None => break,
            }
        }
        self.rank
    }

    /// Unit-pivot unimodular elimination; returns the number of unit pivots
    /// taken plus the residual matrix (densified) that has no unit entries.
    fn run_unimodular(mut self) -> (usize, Vec<Vec<BigInt>>) {
        loop {
            self.singleton_pass();
            match self.pick_pivot() {
                Some((r, c)) => self.eliminate(r, c),
                None => break,
            }
        }
        // densify the residual
        let mut live_rows: Vec<u32> = (0..self.row_data.len() as u32)
            .filter(|&r| !self.row_data[r as usize].is_empty())
            .collect();
        live_rows.sort_unstable();
        let mut live_cols: BTreeSet<u32> = BTreeSet::new();
        for &r in &live_rows {
            for (c, _) in &self.row_data[r as usize] {
                live_cols.insert(*c);
            }
        }
        let col_index: HashMap<u32, usize> = live_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
        for (i, &r) in live_rows.iter().enumerate() {
            for (c, v) in &self.row_data[r as usize] {
                dense[i][col_index[c]] = v.clone();
            }
        }
        (self.rank, dense)
    }
}

/// Exact rank of an integer matrix given as triplets.
pub fn int_rank(rows: usize, cols: usize, triplets: Vec<(u32, u32, BigInt)>) -> usize {
    Elim::new(rows, cols, triplets, true).run_rank()
}

/// Nonzero invariant factors (positive, divisibility chain) of an integer
/// matrix given as triplets.
pub fn int_smith(rows: usize, cols: usize, triplets: Vec<(u32, u32, BigInt)>) -> Vec<BigInt> {
    let (units, residual) = Elim::new(rows, cols, triplets, false).run_unimodular();
    let mut factors = vec![BigInt::one(); units];
    factors.extend(dense_diagonalize(residual));
    normalize_chain(&mut factors);
    factors
}

/// Diagonalize by repeated pivoting with euclidean reduction; returns the
/// nonzero diagonal values (not yet in divisibility order).
fn dense_diagonalize(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let m = a.len();
    let n = if m == 0 { 0 } else { a[0].len() };
    let mut out = Vec::new();
    let mut t = 0usize;
    while t < m.min(n) {
        // locate entry of minimal absolute value in the live block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if a[i][j].abs() < a[bi][bj].abs() {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let (pi, pj) = match best {
            Some(p) => p,
            None => break,
        };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        // euclidean clearing of row t and column t
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in t..n {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().take(m).skip(t) {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient rounding toward nearest keeps euclidean steps shrinking fast
    let (q, r) = a.div_rem(b);
    let two_r: BigInt = &r * 2;
    if two_r.abs() > b.abs() {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Rearrange positive diagonal values into a divisibility chain using the
/// gcd/lcm exchange, which is realizable by unimodular operations.
fn normalize_chain(d: &mut [BigInt]) {
    let n = d.len();
    loop {
        let mut stable = true;
        for i in 0..n {
            for j in i + 1..n {
                if (&d[j] % &d[i]).is_zero() {
                    continue;
                }
                let g = d[i].gcd(&d[j]);
                let l = (&d[i] / &g) * &d[j];
                d[i] = g;
                d[j] = l;
                stable = false;
            }
        }
        if stable {
            break;
        }
    }
}

/// Dense Smith normal form with unimodular transforms, intended for small
/// matrices (map-level computations and tests). Returns (factors, U, V) with
/// U * A * V diagonal.
pub fn dense_smith_with_transforms(
    rows: usize,
    cols: usize,
    triplets: &[(u32, u32, BigInt)],
) -> (Vec<BigInt>, Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut a = vec![vec![BigInt::zero(); cols]; rows];
    for (r, c, v) in triplets {
        a[*r as usize][*c as usize] += v;
    }
    let mut u: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut v: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let mut t = 0usize;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if a[i][j].is_zero() {
                    continue;
                }
                best = match best {
                    None => Some((i, j)),
                    Some((bi, bj)) => {
                        if a[i][j].abs() < a[bi][bj].abs() {
                            Some((i, j))
                        } else {
                            Some((bi, bj))
                        }
                    }
                };
            }
        }
        let (pi, pj) = match best {
            Some(p) => p,
            None => break,
        };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    for j in 0..rows {
                        let d = &q * &u[t][j];
                        u[i][j] -= d;
                    }
                }
                if !a[i][t].is_zero() {
                    a.swap(t, i);
                    u.swap(t, i);
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut() {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                    for row in v.iter_mut() {
                        let d = &q * &row[t];
                        row[j] -= d;
                    }
                }
                if !a[t][j].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, j);
                    }
                    for row in v.iter_mut() {
                        row.swap(t, j);
                    }
                    clean = false;
                }
            }
            // divisibility of the remaining block
            if clean {
                let mut fixed = true;
                'outer: for i in t + 1..rows {
                    for j in t + 1..cols {
                        if !(&a[i][j] % &a[t][t]).is_zero() {
                            // add row i to row t and restart clearing
                            for k in 0..cols {
                                let add = a[i][k].clone();
                                a[t][k] += add;
                            }
                            for k in 0..rows {
                                let add = u[i][k].clone();
                                u[t][k] += add;
                            }
                            fixed = false;
                            break 'outer;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
        }
        if a[t][t].sign() == num_bigint::Sign::Minus {
            for j in 0..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        t += 1;
    }
    let factors: Vec<BigInt> = (0..t).map(|i| a[i][i].clone()).collect();
    (factors, u, v)
}

// ---------------------------------------------------------------------------
// Dense rational matrices for homology-level maps
// ---------------------------------------------------------------------------

/// Small dense matrix over the rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn mul(&self, other: &QMatrix) -> QMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = QMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out.get(i, j).clone();
                    out.set(i, j, cur + a * b);
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &QMatrix) -> QMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] -= other.data[i].clone();
        }
        out
    }

    pub fn add(&self, other: &QMatrix) -> QMatrix {
        assert!(self.rows == other.rows && self.cols == other.cols);
        let mut out = self.clone();
        for i in 0..self.data.len() {
            out.data[i] += other.data[i].clone();
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> QMatrix {
        let mut out = self.clone();
        for v in &mut out.data {
            *v *= c.clone();
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let want_one = i == j;
                let v = self.get(i, j);
                if want_one && !v.is_one() {
                    return false;
                }
                if !want_one && !v.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_scaled_identity(&self, c: &BigRational) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in 0..self.cols {
                let expect = if i == j { c.clone() } else { BigRational::zero() };
                if *self.get(i, j) != expect {
                    return false;
                }
            }
        }
        true
    }

    /// Rank over the rationals, through the sparse elimination engine.
    pub fn rank(&self) -> usize {
        let mut m = SparseMatrix::new(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let v = self.get(r, c);
                if !v.is_zero() {
                    m.set(r, c, v.clone());
                }
            }
        }
        m.rank_rational()
    }

    /// Gauss-Jordan inverse; None when singular.
    pub fn inverse(&self) -> Option<QMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = QMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            if pivot != col {
                for j in 0..n {
                    let tmp = a.get(col, j).clone();
                    a.set(col, j, a.get(pivot, j).clone());
                    a.set(pivot, j, tmp);
                    let tmp = inv.get(col, j).clone();
                    inv.set(col, j, inv.get(pivot, j).clone());
                    inv.set(pivot, j, tmp);
                }
            }
            let p = a.get(col, col).clone();
            for j in 0..n {
                a.set(col, j, a.get(col, j) / &p);
                inv.set(col, j, inv.get(col, j) / &p);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let d = a.get(col, j) * &f;
                    a.set(r, j, a.get(r, j) - d);
                    let d = inv.get(col, j) * &f;
                    inv.set(r, j, inv.get(r, j) - d);
                }
            }
        }
        Some(inv)
    }
}

// ---------------------------------------------------------------------------
// Sparse rational vectors and column echelons (cycle tracking)
// ---------------------------------------------------------------------------

/// Sparse rational vector: (index, value) sorted by index, values nonzero.
pub type SparseVec = Vec<(u32, BigRational)>;

pub fn sv_from_entries(mut entries: Vec<(u32, BigRational)>) -> SparseVec {
    entries.sort_by_key(|e| e.0);
    let mut out: SparseVec = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        if let Some(last) = out.last_mut() {
            if last.0 == i {
                last.1 += v;
                if last.1.is_zero() {
                    out.pop();
                }
                continue;
            }
        }
        if !v.is_zero() {
            out.push((i, v));
        }
    }
    out
}

/// v <- v + c * w
pub fn sv_axpy(v: &mut SparseVec, c: &BigRational, w: &SparseVec) {
    if c.is_zero() || w.is_empty() {
        return;
    }
    let mut out: SparseVec = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < v.len() || j < w.len() {
        match (v.get(i), w.get(j)) {
            (Some((iv, vv)), Some((jw, vw))) => {
                if iv < jw {
                    out.push((*iv, vv.clone()));
                    i += 1;
                } else if jw < iv {
                    out.push((*jw, vw * c));
                    j += 1;
                } else {
                    let val = vv + vw * c;
                    if !val.is_zero() {
                        out.push((*iv, val));
                    }
                    i += 1;
                    j += 1;
                }
            }
            (Some((iv, vv)), None) => {
                out.push((*iv, vv.clone()));
                i += 1;
            }
            (None, Some((jw, vw))) => {
                out.push((*jw, vw * c));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    *v = out;
}

pub fn sv_scale(v: &mut SparseVec, c: &BigRational) {
    if c.is_zero() {
        v.clear();
        return;
    }
    for (_, val) in v.iter_mut() {
        *val *= c.clone();
    }
}

/// Column echelon keyed by lowest (largest) index; supports reduction with a
/// callback reporting which stored column was used and with what coefficient.
#[derive(Default)]
pub struct Echelon {
    cols: HashMap<u32, SparseVec>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon {
            cols: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn get(&self, low: u32) -> Option<&SparseVec> {
        self.cols.get(&low)
    }

    /// Reduce v against the echelon. Whenever a stored column with low `l`
    /// and pivot value p absorbs v's trailing entry c, the callback receives
    /// (l, c/p) (the coefficient of the stored column inside v).
    pub fn reduce(&self, v: &mut SparseVec, mut on_use: impl FnMut(u32, &BigRational)) {
        while let Some((low, val)) = v.last().cloned() {
            match self.cols.get(&low) {
                Some(col) => {
                    let pivot = &col.last().unwrap().1;
                    let coeff = &val / pivot;
                    on_use(low, &coeff);
                    let neg = -coeff;
                    sv_axpy(v, &neg, col);
                }
                None => break,
            }
        }
    }

    /// Insert a fully reduced nonzero column; returns its low index.
    pub fn insert(&mut self, v: SparseVec) -> u32 {
        let low = v.last().expect("cannot insert zero column").0;
        debug_assert!(!self.cols.contains_key(&low));
        self.cols.insert(low, v);
        low
    }
}


#[cfg(test)]
mod prop_tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_matrix() -> impl Strategy<Value = SparseMatrix> {
        (1usize..8, 1usize..8).prop_flat_map(|(r, c)| {
            proptest::collection::vec((-6i64..7, 0..r, 0..c), 0..24).prop_map(move |entries| {
                let mut m = SparseMatrix::new(r, c);
                for (v, i, j) in entries {
                    m.add_to(i, j, &BigRational::from(BigInt::from(v)));
                }
                m
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_killed(m in arb_matrix()) {
            let basis = m.kernel_basis();
            prop_assert_eq!(basis.len(), m.cols() - m.rank_rational());
            for v in basis {
                for r in 0..m.rows() {
                    let mut acc = BigRational::zero();
                    for c in 0..m.cols() {
                        acc += m.get(r, c) * &v[c];
                    }
                    prop_assert!(acc.is_zero());
                }
            }
        }

        #[test]
        fn smith_chain_divides_and_counts_rank(m in arb_matrix()) {
            let s = m.smith_normal_form(false).unwrap();
            prop_assert_eq!(s.rank, m.rank_rational());
            for w in s.invariant_factors.windows(2) {
                prop_assert!((&w[1] % &w[0]).is_zero(), "chain broken: {:?}", s.invariant_factors);
            }
            let (d2, _, _) = dense_smith_with_transforms(
                m.rows(), m.cols(),
                &m.iter().map(|(r, c, v)| (r as u32, c as u32, v.to_integer())).collect::<Vec<_>>(),
            );
            prop_assert_eq!(s.invariant_factors, d2);
        }
    }
}
