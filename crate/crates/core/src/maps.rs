//! Maps between cellular configuration models: the inclusion of a nested
//! copy of the space, the projection forgetting unmarked points, transfers
//! along the marked-block covering, and the stabilisation inserting a new
//! point at a base vertex.
//!
//! Every map is stored as one sparse rational matrix per degree, in the same
//! canonical-cell bases the boundary matrices use. A cell class is rewritten
//! through `canonicalize_blocks`, so the matrices compose exactly with the
//! boundary operators; `check_commutes` verifies that degree by degree.
//!
//! Homology-level maps are produced against explicit cycle bases, which is
//! where the stabilisation lives: inserting a point is only a chain map out
//! of the nested copy, and becomes an endofamily map after inverting the
//! inclusion on homology.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::chain::{ChainComplex, HomologyBasis};
use crate::config::{ConfigSpace, IsotypicComplex};
use crate::error::{Error, Result};
use crate::linalg::{sv_axpy, sv_from_entries, QMatrix, SparseVec};
use crate::orbifold::GlobalQuotientOrbifold;
use crate::simplicial::sort_with_sign;

fn rat(v: i64) -> BigRational {
    BigRational::from(BigInt::from(v))
}

pub fn binomial(n: usize, m: usize) -> i64 {
    if m > n {
        return 0;
    }
    let mut out = 1i64;
    for i in 0..m.min(n - m) {
        out = out * (n - i) as i64 / (i + 1) as i64;
    }
    out
}

pub fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// A degree-preserving map of cellular chain complexes, one sparse column
/// per source cell.
pub struct ChainMap {
    /// cols[k][j] = image of source cell j of degree k
    pub cols: Vec<Vec<SparseVec>>,
    pub src_dims: Vec<usize>,
    pub dst_dims: Vec<usize>,
}

impl ChainMap {
    pub fn degrees(&self) -> usize {
        self.cols.len()
    }

    /// Apply to a chain of degree k.
    pub fn apply(&self, k: usize, v: &SparseVec) -> SparseVec {
        let mut out: SparseVec = Vec::new();
        if k >= self.cols.len() {
            return out;
        }
        for (j, c) in v {
            if let Some(col) = self.cols[k].get(*j as usize) {
                sv_axpy(&mut out, c, col);
            }
        }
        out
    }

    /// self after inner (the composite first applies `inner`).
    pub fn compose(&self, inner: &ChainMap) -> ChainMap {
        let len = self.cols.len().min(inner.cols.len());
        let mut cols = Vec::with_capacity(len);
        for k in 0..len {
            assert_eq!(
                self.src_dims[k], inner.dst_dims[k],
                "composition shape mismatch in degree {}",
                k
            );
            cols.push(
                inner.cols[k]
                    .iter()
                    .map(|c| self.apply(k, c))
                    .collect::<Vec<_>>(),
            );
        }
        ChainMap {
            cols,
            src_dims: inner.src_dims[..len].to_vec(),
            dst_dims: self.dst_dims[..len].to_vec(),
        }
    }

    /// True when every degree is `factor` times the identity.
    pub fn is_scaled_identity(&self, factor: i64) -> bool {
        let f = rat(factor);
        for k in 0..self.cols.len() {
            if self.src_dims[k] != self.dst_dims[k] {
                return false;
            }
            for (j, col) in self.cols[k].iter().enumerate() {
                let want: SparseVec = if factor == 0 {
                    Vec::new()
                } else {
                    vec![(j as u32, f.clone())]
                };
                if *col != want {
                    return false;
                }
            }
        }
        true
    }

    /// Check the chain map condition against both boundary operators.
    pub fn check_commutes(&self, src: &ChainComplex, dst: &ChainComplex) -> Result<()> {
        for k in 1..self.cols.len() {
            let src_bdy = match src.boundary(k) {
                Some(b) => b.columns(),
                None => continue,
            };
            let dst_bdy = dst.boundary(k).map(|b| b.columns());
            for (j, col) in self.cols[k].iter().enumerate() {
                let mut lhs: SparseVec = Vec::new();
                if let Some(cols) = &dst_bdy {
                    for (r, c) in col {
                        sv_axpy(&mut lhs, c, &cols[*r as usize]);
                    }
                }
                let mut rhs: SparseVec = Vec::new();
                for (r, c) in &src_bdy[j] {
                    sv_axpy(&mut rhs, c, &self.cols[k - 1][*r as usize]);
                }
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "map does not commute with the boundary at degree {} cell {}",
                        k, j
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Rewrite `weight` times the oriented product cell `tuple` in the canonical
/// basis of `iso`, appending to `acc`. Cells filtered out of the basis have
/// vanishing class and contribute nothing.
fn rewrite_into(
    cs: &ConfigSpace,
    iso: &IsotypicComplex,
    degree: usize,
    tuple: &[u32],
    weight: i64,
    acc: &mut Vec<(u32, BigRational)>,
) {
    let tr = cs.canonicalize_blocks(tuple, &iso.blocks);
    if let Some(row) = iso.cell_index(degree, &tr.canon) {
        let chi = iso.chi.eval_parts(tr.sigma_sign, &tr.g_ids);
        let v = weight * tr.sign * chi;
        if v != 0 {
            acc.push((row, rat(v)));
        }
    }
}

fn require_trivial(iso: &IsotypicComplex) -> Result<()> {
    if iso.chi.sign_exponent % 2 != 0 || iso.chi.base_values.iter().any(|&v| v != 1) {
        return Err(Error::InvalidInput(
            "transfer maps are defined on the trivial isotypic piece".into(),
        ));
    }
    Ok(())
}

/// Translation table from cell ids of a sub-model into cell ids of the
/// ambient model along a vertex embedding, with orientation signs.
fn cell_translation(
    small_cs: &ConfigSpace,
    big_cs: &ConfigSpace,
    old_vertex: &[u32],
) -> Result<Vec<(u32, i64)>> {
    if old_vertex.len() != small_cs.model().n_vertices() {
        return Err(Error::InvalidInput(
            "vertex translation has the wrong length".into(),
        ));
    }
    let mut out = Vec::with_capacity(small_cs.tables.total);
    for id in 0..small_cs.tables.total {
        let d = small_cs.tables.dim_of[id] as usize;
        let local = id - small_cs.tables.offsets[d];
        let mut verts: Vec<u32> = small_cs
            .model()
            .simplex(d, local)
            .iter()
            .map(|&v| old_vertex[v as usize])
            .collect();
        let sign = sort_with_sign(&mut verts)?;
        let big_local = big_cs.model().index_of(d, &verts).ok_or_else(|| {
            Error::InvalidInput("translated cell is missing from the ambient model".into())
        })?;
        out.push(((big_cs.tables.offsets[d] + big_local) as u32, sign));
    }
    Ok(out)
}

/// Chain map induced by including a sub-model's configuration space into the
/// ambient one. Both complexes must use the same blocks.
pub fn inclusion_map(
    small_cs: &ConfigSpace,
    small: &IsotypicComplex,
    big_cs: &ConfigSpace,
    big: &IsotypicComplex,
    old_vertex: &[u32],
) -> Result<ChainMap> {
    if small.blocks != big.blocks {
        return Err(Error::InvalidInput(
            "inclusion needs matching block structure".into(),
        ));
    }
    let table = cell_translation(small_cs, big_cs, old_vertex)?;
    let len = small.complex.top_degree() + 1;
    let mut cols = Vec::with_capacity(len);
    for k in 0..len {
        if k > big.complex.top_degree() && !small.cells[k].is_empty() {
            return Err(Error::InvalidInput(
                "ambient complex is capped below the sub-model".into(),
            ));
        }
        let mut deg_cols = Vec::with_capacity(small.cells[k].len());
        for t in &small.cells[k] {
            let mut weight = 1i64;
            let image: Vec<u32> = t
                .iter()
                .map(|&s| {
                    let (id, sign) = table[s as usize];
                    weight *= sign;
                    id
                })
                .collect();
            let mut entries = Vec::new();
            rewrite_into(big_cs, big, k, &image, weight, &mut entries);
            deg_cols.push(sv_from_entries(entries));
        }
        cols.push(deg_cols);
    }
    Ok(ChainMap {
        cols,
        src_dims: small.dims()[..len].to_vec(),
        dst_dims: (0..len).map(|k| big.complex.dim(k)).collect(),
    })
}

/// Chain map appending a new point at the base vertex: configurations of n
/// points in the sub-model become configurations of n + 1 points in the
/// ambient model. The base vertex orbit must stay clear of the sub-model.
pub fn append_point_map(
    small_cs: &ConfigSpace,
    small: &IsotypicComplex,
    big_cs: &ConfigSpace,
    big: &IsotypicComplex,
    old_vertex: &[u32],
    base_vertex: u32,
) -> Result<ChainMap> {
    let n = small.n;
    if small.blocks != vec![n] || big.blocks != vec![n + 1] {
        return Err(Error::InvalidInput(
            "point insertion goes from one unordered family to the next".into(),
        ));
    }
    let base_local = big_cs
        .model()
        .index_of(0, &[base_vertex])
        .ok_or_else(|| Error::InvalidInput("base vertex is not in the model".into()))?;
    let base_id = (big_cs.tables.offsets[0] + base_local) as u32;
    let table = cell_translation(small_cs, big_cs, old_vertex)?;
    let len = small.complex.top_degree() + 1;
    let mut cols = Vec::with_capacity(len);
    for k in 0..len {
        if k > big.complex.top_degree() && !small.cells[k].is_empty() {
            return Err(Error::InvalidInput(
                "ambient complex is capped below the sub-model".into(),
            ));
        }
        let mut deg_cols = Vec::with_capacity(small.cells[k].len());
        for t in &small.cells[k] {
            let mut weight = 1i64;
            let mut image: Vec<u32> = t
                .iter()
                .map(|&s| {
                    let (id, sign) = table[s as usize];
                    weight *= sign;
                    id
                })
                .collect();
            for &c in &image {
                if !big_cs.tables.masks_disjoint(c, base_id) {
                    return Err(Error::InvalidInput(
                        "insertion point orbit meets the configuration".into(),
                    ));
                }
            }
            image.push(base_id);
            let mut entries = Vec::new();
            rewrite_into(big_cs, big, k, &image, weight, &mut entries);
            deg_cols.push(sv_from_entries(entries));
        }
        cols.push(deg_cols);
    }
    Ok(ChainMap {
        cols,
        src_dims: small.dims()[..len].to_vec(),
        dst_dims: (0..len).map(|k| big.complex.dim(k)).collect(),
    })
}

/// Transfer along the covering that marks the first blocks: a full family
/// class is sent to the sum of the block-sorted classes lying over it. One
/// entry per block-canonical cell in the orbit, so the matrix is built by a
/// single pass over the finer basis.
pub fn block_refine_map(
    cs: &ConfigSpace,
    src: &IsotypicComplex,
    mid: &IsotypicComplex,
) -> Result<ChainMap> {
    require_trivial(src)?;
    require_trivial(mid)?;
    let n = src.n;
    if src.blocks != vec![n] || mid.n != n {
        return Err(Error::InvalidInput(
            "transfer starts at the single-block family".into(),
        ));
    }
    let len = src.complex.top_degree().min(mid.complex.top_degree()) + 1;
    let mut entries: Vec<Vec<Vec<(u32, BigRational)>>> = (0..len)
        .map(|k| vec![Vec::new(); src.complex.dim(k)])
        .collect();
    for (k, row_entries) in entries.iter_mut().enumerate() {
        for (r, cell) in mid.cells[k].iter().enumerate() {
            let tr = cs.canonicalize(cell);
            let col = src.cell_index(k, &tr.canon).ok_or_else(|| {
                Error::InvalidInput("coarse and fine complexes use different caps".into())
            })?;
            row_entries[col as usize].push((r as u32, rat(tr.sign)));
        }
    }
    let cols = entries
        .into_iter()
        .map(|deg| deg.into_iter().map(sv_from_entries).collect())
        .collect();
    Ok(ChainMap {
        cols,
        src_dims: (0..len).map(|k| src.complex.dim(k)).collect(),
        dst_dims: (0..len).map(|k| mid.complex.dim(k)).collect(),
    })
}

/// Projection of the marked-block covering: each block-sorted cell lies over
/// exactly one full family cell.
pub fn block_sum_map(
    cs: &ConfigSpace,
    mid: &IsotypicComplex,
    src: &IsotypicComplex,
) -> Result<ChainMap> {
    require_trivial(src)?;
    require_trivial(mid)?;
    let n = src.n;
    if src.blocks != vec![n] || mid.n != n {
        return Err(Error::InvalidInput(
            "covering projection lands in the single-block family".into(),
        ));
    }
    let len = mid.complex.top_degree().min(src.complex.top_degree()) + 1;
    let mut cols = Vec::with_capacity(len);
    for k in 0..len {
        let mut deg_cols = Vec::with_capacity(mid.cells[k].len());
        for cell in &mid.cells[k] {
            let tr = cs.canonicalize(cell);
            let row = src.cell_index(k, &tr.canon).ok_or_else(|| {
                Error::InvalidInput("coarse and fine complexes use different caps".into())
            })?;
            deg_cols.push(vec![(row, rat(tr.sign))]);
        }
        cols.push(deg_cols);
    }
    Ok(ChainMap {
        cols,
        src_dims: (0..len).map(|k| mid.complex.dim(k)).collect(),
        dst_dims: (0..len).map(|k| src.complex.dim(k)).collect(),
    })
}

/// Projection forgetting the unmarked points: a cell maps to its marked head
/// when every forgotten coordinate is a vertex, and dies otherwise.
pub fn forget_map(
    cs: &ConfigSpace,
    mid: &IsotypicComplex,
    dst: &IsotypicComplex,
    m: usize,
) -> Result<ChainMap> {
    require_trivial(mid)?;
    require_trivial(dst)?;
    let n = mid.n;
    if m == 0 {
        if dst.n != 0 {
            return Err(Error::InvalidInput(
                "forgetting every point lands in the empty family".into(),
            ));
        }
    } else if mid.blocks != vec![m, n - m] || dst.blocks != vec![m] {
        return Err(Error::InvalidInput(
            "projection needs a marked block of the requested size".into(),
        ));
    }
    let len = mid.complex.top_degree() + 1;
    let mut cols = Vec::with_capacity(len);
    for k in 0..len {
        let mut deg_cols = Vec::with_capacity(mid.cells[k].len());
        for cell in &mid.cells[k] {
            let tail_flat = cell[m..]
                .iter()
                .all(|&s| cs.tables.dim_of[s as usize] == 0);
            let mut entries = Vec::new();
            if tail_flat {
                if k > dst.complex.top_degree() {
                    return Err(Error::InvalidInput(
                        "marked family complex is capped below the projection".into(),
                    ));
                }
                rewrite_into(cs, dst, k, &cell[..m], 1, &mut entries);
            }
            deg_cols.push(sv_from_entries(entries));
        }
        cols.push(deg_cols);
    }
    Ok(ChainMap {
        cols,
        src_dims: (0..len).map(|k| mid.complex.dim(k)).collect(),
        dst_dims: (0..len).map(|k| dst.complex.dim(k)).collect(),
    })
}

/// Result of the chain-level covering identity check: pushing forward after
/// transferring multiplies by the number of marked-block choices.
pub struct PushPullCheck {
    pub n: usize,
    pub m: usize,
    pub factor: i64,
    pub degrees: usize,
    pub chain_level_identity: bool,
}

/// Verify projection-after-transfer is binomial(n, m) times the identity on
/// the nose, cell by cell.
pub fn verify_push_pull(
    cs: &ConfigSpace,
    n: usize,
    m: usize,
    cap: Option<usize>,
    max_cells: u64,
) -> Result<PushPullCheck> {
    if m > n {
        return Err(Error::InvalidInput("marked block larger than the family".into()));
    }
    let src = cs.block_isotypic_complex(&[n], cap, max_cells)?;
    let mid_blocks = if m == 0 || m == n {
        vec![n]
    } else {
        vec![m, n - m]
    };
    let mid = cs.block_isotypic_complex(&mid_blocks, cap, max_cells)?;
    let refine = block_refine_map(cs, &src, &mid)?;
    refine.check_commutes(&src.complex, &mid.complex)?;
    let sum = block_sum_map(cs, &mid, &src)?;
    sum.check_commutes(&mid.complex, &src.complex)?;
    let round_trip = sum.compose(&refine);
    let factor = binomial(n, m);
    Ok(PushPullCheck {
        n,
        m,
        factor,
        degrees: round_trip.degrees(),
        chain_level_identity: round_trip.is_scaled_identity(factor),
    })
}

// ---------------------------------------------------------------------------
// Homology-level machinery
// ---------------------------------------------------------------------------

/// Cycle bases for every reliable degree of one complex.
pub struct HomologyData {
    pub bases: Vec<HomologyBasis>,
    pub exact_top: usize,
    pub cell_dims: Vec<usize>,
    pub betti: Vec<usize>,
}

pub fn homology_data(iso: &IsotypicComplex) -> HomologyData {
    let exact_top = iso.exact_top();
    let bases: Vec<HomologyBasis> = (0..=exact_top)
        .map(|k| iso.complex.homology_basis(k))
        .collect();
    let betti = bases.iter().map(|b| b.dim()).collect();
    HomologyData {
        bases,
        exact_top,
        cell_dims: iso.complex.dims().to_vec(),
        betti,
    }
}

/// Matrices induced on homology, one per degree. Degrees beyond a complex's
/// cell range contribute zero-dimensional spaces; degrees whose homology is
/// clipped by a cap stop the family.
pub fn induced_on_homology(
    f: &ChainMap,
    src: &HomologyData,
    dst: &HomologyData,
) -> Result<Vec<QMatrix>> {
    let lim = src.cell_dims.len().max(dst.cell_dims.len());
    let mut out = Vec::new();
    for k in 0..lim {
        let src_structural = k >= src.cell_dims.len() || src.cell_dims[k] == 0;
        let dst_structural = k >= dst.cell_dims.len() || dst.cell_dims[k] == 0;
        if (k > src.exact_top && !src_structural) || (k > dst.exact_top && !dst_structural) {
            break;
        }
        let sdim = if k < src.bases.len() { src.bases[k].dim() } else { 0 };
        let ddim = if k < dst.bases.len() { dst.bases[k].dim() } else { 0 };
        if k >= f.cols.len() && !src_structural && sdim > 0 {
            break;
        }
        let mut m = QMatrix::zeros(ddim, sdim);
        for j in 0..sdim {
            let img = f.apply(k, &src.bases[k].reps[j]);
            if k < dst.bases.len() {
                let coords = dst.bases[k].class_coordinates(&img)?;
                for (i, c) in coords.into_iter().enumerate() {
                    m.set(i, j, c);
                }
            } else if !img.is_empty() {
                return Err(Error::InvalidInput(
                    "image chain lands beyond the target complex".into(),
                ));
            }
        }
        out.push(m);
    }
    Ok(out)
}

fn compose_h(outer: &[QMatrix], inner: &[QMatrix]) -> Result<Vec<QMatrix>> {
    let len = outer.len().min(inner.len());
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if outer[k].cols != inner[k].rows {
            return Err(Error::InvalidInput(format!(
                "homology maps do not compose in degree {}",
                k
            )));
        }
        out.push(outer[k].mul(&inner[k]));
    }
    Ok(out)
}

fn add_h(a: &[QMatrix], b: &[QMatrix]) -> Result<Vec<QMatrix>> {
    let len = a.len().min(b.len());
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        if a[k].rows != b[k].rows || a[k].cols != b[k].cols {
            return Err(Error::InvalidInput(format!(
                "homology maps have different shapes in degree {}",
                k
            )));
        }
        out.push(a[k].add(&b[k]));
    }
    Ok(out)
}

fn scale_h(a: &[QMatrix], c: i64) -> Vec<QMatrix> {
    let f = rat(c);
    a.iter().map(|m| m.scale(&f)).collect()
}

/// Compare two per-degree families; Ok(degree count) when equal on the
/// common range, Err carrying the first failing degree otherwise.
fn eq_h(a: &[QMatrix], b: &[QMatrix]) -> std::result::Result<usize, usize> {
    let len = a.len().min(b.len());
    for k in 0..len {
        if a[k].rows != b[k].rows || a[k].cols != b[k].cols {
            return Err(k);
        }
        if !a[k].sub(&b[k]).is_zero() {
            return Err(k);
        }
    }
    Ok(len)
}

fn identity_h(h: &HomologyData, len: usize) -> Vec<QMatrix> {
    (0..len)
        .map(|k| {
            let d = if k < h.bases.len() { h.bases[k].dim() } else { 0 };
            QMatrix::identity(d)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// The transfer algebra of one orbifold
// ---------------------------------------------------------------------------

/// Homology of the unordered families up to `n_max` points, together with
/// every transfer between them, all chain-verified during construction.
pub struct TransferAlgebra<'a> {
    pub cs: &'a ConfigSpace<'a>,
    pub n_max: usize,
    pub cap: Option<usize>,
    pub max_cells: u64,
    pub plain: Vec<IsotypicComplex>,
    pub homology: Vec<HomologyData>,
    transfers: HashMap<(usize, usize), Vec<QMatrix>>,
}

impl<'a> TransferAlgebra<'a> {
    pub fn new(
        cs: &'a ConfigSpace<'a>,
        n_max: usize,
        cap: Option<usize>,
        max_cells: u64,
    ) -> Result<Self> {
        let mut plain = Vec::with_capacity(n_max + 1);
        for k in 0..=n_max {
            plain.push(cs.block_isotypic_complex(&[k], cap, max_cells)?);
        }
        let homology: Vec<HomologyData> = plain.iter().map(homology_data).collect();
        let mut transfers = HashMap::new();
        for k in 0..=n_max {
            // marking every point changes nothing
            let len = homology[k].bases.len();
            transfers.insert((k, k), identity_h(&homology[k], len));
        }
        for n in 1..=n_max {
            for m in 0..n {
                let mid_blocks = if m == 0 { vec![n] } else { vec![m, n - m] };
                let mid = cs.block_isotypic_complex(&mid_blocks, cap, max_cells)?;
                let refine = block_refine_map(cs, &plain[n], &mid)?;
                refine.check_commutes(&plain[n].complex, &mid.complex)?;
                let project = forget_map(cs, &mid, &plain[m], m)?;
                project.check_commutes(&mid.complex, &plain[m].complex)?;
                let composite = project.compose(&refine);
                let induced = induced_on_homology(&composite, &homology[n], &homology[m])?;
                transfers.insert((n, m), induced);
            }
        }
        Ok(TransferAlgebra {
            cs,
            n_max,
            cap,
            max_cells,
            plain,
            homology,
            transfers,
        })
    }

    /// The transfer from n points down to m marked points, on homology.
    pub fn transfer(&self, n: usize, m: usize) -> Result<&Vec<QMatrix>> {
        self.transfers.get(&(n, m)).ok_or_else(|| {
            Error::InvalidInput(format!("no transfer from {} to {} points", n, m))
        })
    }

    pub fn betti(&self, n: usize) -> &[usize] {
        &self.homology[n].betti
    }
}

// ---------------------------------------------------------------------------
// Nested copies and stabilisation
// ---------------------------------------------------------------------------

/// The sub-model playing the role of a smaller copy of the space, as its own
/// quotient orbifold, together with the vertex embedding and the insertion
/// vertex.
pub struct NestedCopy {
    pub orbifold: GlobalQuotientOrbifold,
    pub vertex_map: Vec<u32>,
    pub base_vertex: u32,
}

/// Build the nested copy an orbifold's stabilisation data describes, or None
/// when no such data is present.
pub fn nested_copy(orb: &GlobalQuotientOrbifold) -> Result<Option<NestedCopy>> {
    let spec = match &orb.stab {
        Some(s) => s,
        None => return Ok(None),
    };
    let verts: BTreeSet<u32> = spec.nested_copy_vertices.iter().cloned().collect();
    // the copy is used purely as a configuration source; boundary data of the
    // ambient orbifold lives at input level and does not restrict
    let (orbifold, vertex_map) = orb.restrict_to_vertices(&verts)?;
    Ok(Some(NestedCopy {
        orbifold,
        vertex_map,
        base_vertex: spec.base_cell,
    }))
}

/// Stabilisation on homology at n points: invert the inclusion of the nested
/// copy and insert a point at the base vertex. Errors when the inclusion is
/// not an isomorphism on homology, in which case no insertion map exists at
/// this resolution.
pub fn stabilisation_map(
    big_cs: &ConfigSpace,
    algebra: &TransferAlgebra,
    small_cs: &ConfigSpace,
    vertex_map: &[u32],
    base_vertex: u32,
    n: usize,
) -> Result<Vec<QMatrix>> {
    if n + 1 > algebra.n_max {
        return Err(Error::InvalidInput(
            "stabilisation target exceeds the computed family".into(),
        ));
    }
    let small_iso = small_cs.block_isotypic_complex(&[n], algebra.cap, algebra.max_cells)?;
    let small_h = homology_data(&small_iso);
    let incl = inclusion_map(small_cs, &small_iso, big_cs, &algebra.plain[n], vertex_map)?;
    incl.check_commutes(&small_iso.complex, &algebra.plain[n].complex)?;
    let incl_h = induced_on_homology(&incl, &small_h, &algebra.homology[n])?;
    let mut inv = Vec::with_capacity(incl_h.len());
    for (deg, m) in incl_h.iter().enumerate() {
        if m.rows != m.cols {
            return Err(Error::InvalidInput(format!(
                "nested copy has different homology at {} points in degree {}",
                n, deg
            )));
        }
        match m.inverse() {
            Some(i) => inv.push(i),
            None => {
                return Err(Error::InvalidInput(format!(
                    "inclusion of the nested copy is singular at {} points in degree {}",
                    n, deg
                )))
            }
        }
    }
    let app = append_point_map(
        small_cs,
        &small_iso,
        big_cs,
        &algebra.plain[n + 1],
        vertex_map,
        base_vertex,
    )?;
    app.check_commutes(&small_iso.complex, &algebra.plain[n + 1].complex)?;
    let app_h = induced_on_homology(&app, &small_h, &algebra.homology[n + 1])?;
    Ok(app_h
        .iter()
        .zip(inv.iter())
        .map(|(a, i)| a.mul(i))
        .collect())
}

// ---------------------------------------------------------------------------
// Relations and the stability table
// ---------------------------------------------------------------------------

/// Outcome of the classical relations between transfers and insertions at a
/// fixed number of points, verified as exact matrix identities on homology.
pub struct DoldRelations {
    pub n: usize,
    /// highest homology degree every comparison covered
    pub degrees: usize,
    /// t(n, n-1) s(n-1) = s(n-2) t(n-1, n-2) + 1
    pub insertion: bool,
    /// per m: t(m+1, m) ... t(n, n-1) = (n-m)! t(n, m)
    pub iterated: Vec<(usize, bool)>,
    /// per m: t(n, m) s(n-1) = s(m-1) t(n-1, m-1) + t(n-1, m)
    pub mixed: Vec<(usize, bool)>,
}

impl DoldRelations {
    pub fn all_hold(&self) -> bool {
        self.insertion
            && self.iterated.iter().all(|&(_, ok)| ok)
            && self.mixed.iter().all(|&(_, ok)| ok)
    }
}

/// Check the transfer/insertion relations at n points. `s[k]` must hold the
/// homology matrices of the insertion at k points for every k < n.
pub fn verify_dold_relations(
    algebra: &TransferAlgebra,
    s: &[Vec<QMatrix>],
    n: usize,
) -> Result<DoldRelations> {
    if n < 2 {
        return Err(Error::InvalidInput("relations start at two points".into()));
    }
    if s.len() < n {
        return Err(Error::InvalidInput(
            "missing insertion maps below the requested level".into(),
        ));
    }
    let mut degrees = usize::MAX;
    let mut record = |r: std::result::Result<usize, usize>| -> bool {
        match r {
            Ok(len) => {
                degrees = degrees.min(len.saturating_sub(1));
                true
            }
            Err(_) => false,
        }
    };

    let lhs = compose_h(algebra.transfer(n, n - 1)?, &s[n - 1])?;
    let rhs = add_h(
        &compose_h(&s[n - 2], algebra.transfer(n - 1, n - 2)?)?,
        &identity_h(&algebra.homology[n - 1], lhs.len()),
    )?;
    let insertion = record(eq_h(&lhs, &rhs));

    let mut iterated = Vec::new();
    for m in 0..n {
        // the composite applies t(n, n-1) first, then steps down to t(m+1, m)
        let mut down: Vec<QMatrix> = algebra.transfer(n, n - 1)?.clone();
        for k in (m..n - 1).rev() {
            down = compose_h(algebra.transfer(k + 1, k)?, &down)?;
        }
        let want = scale_h(algebra.transfer(n, m)?, factorial(n - m));
        iterated.push((m, record(eq_h(&down, &want))));
    }

    let mut mixed = Vec::new();
    for m in 1..n {
        let lhs = compose_h(algebra.transfer(n, m)?, &s[n - 1])?;
        let rhs = add_h(
            &compose_h(&s[m - 1], algebra.transfer(n - 1, m - 1)?)?,
            algebra.transfer(n - 1, m)?,
        )?;
        mixed.push((m, record(eq_h(&lhs, &rhs))));
    }

    Ok(DoldRelations {
        n,
        degrees: if degrees == usize::MAX { 0 } else { degrees },
        insertion,
        iterated,
        mixed,
    })
}

/// One homology degree of one stability row.
pub struct StabilityCell {
    pub degree: usize,
    pub betti_n: usize,
    pub betti_next: usize,
    /// inside the proven range 2k <= n
    pub stable_range: bool,
    pub transfer_rank: usize,
    /// the transfer from n+1 points surjects onto this degree
    pub transfer_onto: bool,
    pub s_rank: Option<usize>,
    pub s_iso: Option<bool>,
}

/// Comparison of n against n + 1 points across all reliable degrees.
pub struct StabilityRow {
    pub n: usize,
    pub cells: Vec<StabilityCell>,
    pub insertion_available: bool,
    /// every in-range degree has matching Betti numbers and a verified
    /// isomorphism (insertion when available, transfer surjectivity else)
    pub range_verified: bool,
}

pub fn stability_table(
    algebra: &TransferAlgebra,
    s_maps: &[Option<Vec<QMatrix>>],
    rows: usize,
) -> Result<Vec<StabilityRow>> {
    if rows + 1 > algebra.n_max {
        return Err(Error::InvalidInput(
            "stability rows need one extra family".into(),
        ));
    }
    let mut out = Vec::with_capacity(rows);
    for n in 1..=rows {
        let t = algebra.transfer(n + 1, n)?;
        let s = s_maps.get(n).and_then(|o| o.as_ref());
        let lo = &algebra.homology[n].betti;
        let hi = &algebra.homology[n + 1].betti;
        let deg_count = t.len().min(lo.len());
        let mut cells = Vec::with_capacity(deg_count);
        let mut range_verified = true;
        for k in 0..deg_count {
            let betti_n = lo[k];
            let betti_next = hi.get(k).copied().unwrap_or(0);
            let stable_range = 2 * k <= n;
            let transfer_rank = t[k].rank();
            let transfer_onto = transfer_rank == betti_n;
            let (s_rank, s_iso) = match s {
                Some(mats) if k < mats.len() => {
                    let r = mats[k].rank();
                    (Some(r), Some(betti_n == betti_next && r == betti_n))
                }
                _ => (None, None),
            };
            if stable_range {
                let dir_ok = s_iso.unwrap_or(transfer_onto);
                if betti_n != betti_next || !dir_ok {
                    range_verified = false;
                }
            }
            cells.push(StabilityCell {
                degree: k,
                betti_n,
                betti_next,
                stable_range,
                transfer_rank,
                transfer_onto,
                s_rank,
                s_iso,
            });
        }
        out.push(StabilityRow {
            n,
            cells,
            insertion_available: s.is_some(),
            range_verified,
        });
    }
    Ok(out)
}
