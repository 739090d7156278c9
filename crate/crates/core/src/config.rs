//! Models for configuration spaces of a global quotient X = M/G.
//!
//! A configuration of n points in X is an n-tuple of points of M whose
//! G-orbits are pairwise distinct. Cellularly: a product cell s_1 x ... x s_n
//! of simplices of the model lies in the configuration space exactly when the
//! vertex orbit sets of the coordinates are pairwise disjoint.
//!
//! Two models are built here. The cellular model works with canonical
//! representatives of G wr S_n orbits of product cells and cuts out isotypic
//! pieces of rank one characters; it scales to large inputs because cells are
//! never triangulated. The staircase model is the order complex of the poset
//! of product cells; it is an honest simplicial complex carrying a free
//! action in the unordered setting, and is used for integral computations
//! and as an independent cross-check.

use std::collections::HashMap;

use num_rational::BigRational;
use num_traits::Zero;

use crate::chain::{ChainComplex, IntMatrix};
use crate::error::{Error, Result};
use crate::groups::{permutation_sign, simplex_image, FiniteGroup, WreathCharacter, WreathGroup};
use crate::orbifold::GlobalQuotientOrbifold;
use crate::poset::Poset;
use crate::simplicial::SimplicialComplex;

/// Precomputed per-simplex data for the model complex under the group action:
/// global ids ordered by (dimension, lex), orbit bitmasks for disjointness
/// tests, the action with orientation signs, canonical orbit representatives
/// and transporters, stabilizers, and codimension one faces.
pub struct SimplexTables {
    pub offsets: Vec<usize>,
    pub total: usize,
    pub dim_of: Vec<u8>,
    mask_words: usize,
    orbit_mask: Vec<u64>,
    /// action[g][s] = image simplex id
    action: Vec<Vec<u32>>,
    action_sign: Vec<Vec<i8>>,
    pub canon: Vec<u32>,
    /// element carrying canon[s] to s
    pub to_canon_g: Vec<u32>,
    pub stab_ids: Vec<Vec<u32>>,
    /// codimension one faces with simplicial boundary signs
    faces: Vec<Vec<(u32, i8)>>,
    /// strict cofaces of every codimension, ascending
    cofaces: Vec<Vec<u32>>,
}

impl SimplexTables {
    pub fn new(model: &SimplicialComplex, group: &FiniteGroup) -> Result<Self> {
        let offsets = model.global_offsets();
        let total = *offsets.last().unwrap();
        let top = model.dim().unwrap_or(0);

        let mut dim_of = vec![0u8; total];
        for d in 0..=top {
            for i in 0..model.count(d) {
                dim_of[offsets[d] + i] = d as u8;
            }
        }

        // vertex orbits
        let mins = group.orbit_mins();
        let mut orbit_of_min: HashMap<u32, u32> = HashMap::new();
        let mut sorted: Vec<u32> = mins.clone();
        sorted.sort_unstable();
        sorted.dedup();
        for (i, m) in sorted.iter().enumerate() {
            orbit_of_min.insert(*m, i as u32);
        }
        let vertex_orbit: Vec<u32> = mins.iter().map(|m| orbit_of_min[m]).collect();
        let n_orbits = sorted.len();
        let mask_words = n_orbits.div_ceil(64);

        let mut orbit_mask = vec![0u64; total * mask_words];
        for d in 0..=top {
            for (i, s) in model.simplices(d).enumerate() {
                let base = (offsets[d] + i) * mask_words;
                for &v in s {
                    let o = vertex_orbit[v as usize] as usize;
                    orbit_mask[base + o / 64] |= 1 << (o % 64);
                }
            }
        }

        let id_of = |d: usize, s: &[u32]| -> u32 {
            (offsets[d] + model.index_of(d, s).expect("closed under the action")) as u32
        };

        let mut action = Vec::with_capacity(group.order());
        let mut action_sign = Vec::with_capacity(group.order());
        for g in group.ids() {
            let perm = group.element(g);
            let mut img = vec![0u32; total];
            let mut sgn = vec![0i8; total];
            for d in 0..=top {
                for (i, s) in model.simplices(d).enumerate() {
                    let (t, sign) = simplex_image(perm, s)?;
                    if model.index_of(d, &t).is_none() {
                        return Err(Error::InvalidInput(
                            "group action does not preserve the model".into(),
                        ));
                    }
                    img[offsets[d] + i] = id_of(d, &t);
                    sgn[offsets[d] + i] = sign as i8;
                }
            }
            action.push(img);
            action_sign.push(sgn);
        }

        let mut canon = vec![0u32; total];
        let mut to_canon_g = vec![0u32; total];
        let mut stab_ids: Vec<Vec<u32>> = vec![Vec::new(); total];
        for s in 0..total as u32 {
            let mut c = s;
            for g in group.ids() {
                c = c.min(action[g as usize][s as usize]);
            }
            canon[s as usize] = c;
            to_canon_g[s as usize] = group
                .ids()
                .find(|&g| action[g as usize][c as usize] == s)
                .expect("transporter exists inside the orbit");
            for g in group.ids() {
                if action[g as usize][s as usize] == s {
                    stab_ids[s as usize].push(g);
                }
            }
        }

        // codimension one faces with signs
        let mut faces: Vec<Vec<(u32, i8)>> = vec![Vec::new(); total];
        for d in 1..=top {
            for (i, s) in model.simplices(d).enumerate() {
                let me = offsets[d] + i;
                for drop in 0..=d {
                    let face: Vec<u32> = s
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != drop)
                        .map(|(_, &v)| v)
                        .collect();
                    let sign = if drop % 2 == 0 { 1i8 } else { -1i8 };
                    faces[me].push((id_of(d - 1, &face), sign));
                }
            }
        }

        // strict cofaces via vertex containment
        let mut cofaces: Vec<Vec<u32>> = vec![Vec::new(); total];
        for d in 0..=top {
            for (i, s) in model.simplices(d).enumerate() {
                let me = offsets[d] + i;
                for e in d + 1..=top {
                    for (j, t) in model.simplices(e).enumerate() {
                        if s.iter().all(|v| t.contains(v)) {
                            cofaces[me].push((offsets[e] + j) as u32);
                        }
                    }
                }
            }
        }

        Ok(SimplexTables {
            offsets,
            total,
            dim_of,
            mask_words,
            orbit_mask,
            action,
            action_sign,
            canon,
            to_canon_g,
            stab_ids,
            faces,
            cofaces,
        })
    }

    pub fn mask_of(&self, s: u32) -> &[u64] {
        &self.orbit_mask[s as usize * self.mask_words..(s as usize + 1) * self.mask_words]
    }

    pub fn masks_disjoint(&self, a: u32, b: u32) -> bool {
        let ma = self.mask_of(a);
        let mb = self.mask_of(b);
        ma.iter().zip(mb).all(|(x, y)| x & y == 0)
    }

    pub fn apply(&self, g: u32, s: u32) -> u32 {
        self.action[g as usize][s as usize]
    }

    pub fn apply_sign(&self, g: u32, s: u32) -> i8 {
        self.action_sign[g as usize][s as usize]
    }

    pub fn faces_of(&self, s: u32) -> &[(u32, i8)] {
        &self.faces[s as usize]
    }

    pub fn cofaces_of(&self, s: u32) -> &[u32] {
        &self.cofaces[s as usize]
    }

    /// Whether every stabilizer element of s has base character value one.
    fn stab_fixed_by(&self, s: u32, base_values: &[i8]) -> bool {
        self.stab_ids[s as usize]
            .iter()
            .all(|&g| base_values[g as usize] == 1)
    }
}

/// A valid configuration cell: coordinates pairwise orbit disjoint.
pub fn tuple_valid(tables: &SimplexTables, tuple: &[u32]) -> bool {
    for i in 0..tuple.len() {
        for j in i + 1..tuple.len() {
            if !tables.masks_disjoint(tuple[i], tuple[j]) {
                return false;
            }
        }
    }
    true
}

/// Transport data expressing an arbitrary tuple as a wreath element applied
/// to its canonical form.
pub struct Transport {
    pub canon: Vec<u32>,
    /// sigma[p] = coordinate of the original tuple holding canonical entry p
    pub sigma: Vec<u32>,
    /// g_ids[j] = base element with g_j . canon[sigma^{-1}(j)] = tuple[j]
    pub g_ids: Vec<u32>,
    /// orientation sign of the wreath element acting on the canonical cell
    pub sign: i64,
    pub sigma_sign: i64,
}

pub struct ConfigSpace<'a> {
    pub orbifold: &'a GlobalQuotientOrbifold,
    pub tables: SimplexTables,
}

impl<'a> ConfigSpace<'a> {
    pub fn new(orbifold: &'a GlobalQuotientOrbifold) -> Result<Self> {
        let tables = SimplexTables::new(&orbifold.model, &orbifold.group)?;
        Ok(ConfigSpace { orbifold, tables })
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.orbifold.group
    }

    pub fn model(&self) -> &SimplicialComplex {
        &self.orbifold.model
    }

    pub fn tuple_degree(&self, tuple: &[u32]) -> usize {
        tuple.iter().map(|&s| self.tables.dim_of[s as usize] as usize).sum()
    }

    /// Image of a tuple under a wreath element given as (sigma, base ids).
    pub fn tuple_image(&self, sigma: &[u32], gs: &[u32], tuple: &[u32]) -> Vec<u32> {
        let n = tuple.len();
        let mut inv = vec![0u32; n];
        for (p, &j) in sigma.iter().enumerate() {
            inv[j as usize] = p as u32;
        }
        (0..n)
            .map(|j| self.tables.apply(gs[j], tuple[inv[j] as usize]))
            .collect()
    }

    /// Image and orientation sign of a tuple under a wreath element: the
    /// Koszul sign of the coordinate shuffle times the per coordinate
    /// orientation signs, so that the element carries the oriented cell of
    /// `tuple` onto `sign` times the oriented image cell.
    pub fn tuple_action_sign(&self, sigma: &[u32], gs: &[u32], tuple: &[u32]) -> (Vec<u32>, i64) {
        let n = tuple.len();
        let image = self.tuple_image(sigma, gs, tuple);
        let mut sign = 1i64;
        for p in 0..n {
            for q in p + 1..n {
                if sigma[p] > sigma[q] {
                    let dp = self.tables.dim_of[tuple[p] as usize];
                    let dq = self.tables.dim_of[tuple[q] as usize];
                    if dp % 2 == 1 && dq % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
        }
        for p in 0..n {
            sign *= self.tables.apply_sign(gs[sigma[p] as usize], tuple[p]) as i64;
        }
        (image, sign)
    }

    /// Canonicalize: sort the per coordinate orbit minima and record the
    /// wreath element carrying the canonical cell onto the given tuple,
    /// together with its orientation sign.
    pub fn canonicalize(&self, tuple: &[u32]) -> Transport {
        self.canonicalize_blocks(tuple, &[tuple.len()])
    }

    /// Block variant: coordinates are sorted within each block only, the
    /// shuffle never crosses block boundaries. Canonical cells for the block
    /// subgroup (product of per block wreath groups) arise this way.
    pub fn canonicalize_blocks(&self, tuple: &[u32], block_sizes: &[usize]) -> Transport {
        let n = tuple.len();
        debug_assert_eq!(block_sizes.iter().sum::<usize>(), n);
        let mut pairs: Vec<(u32, u32)> = Vec::with_capacity(n);
        let mut off = 0;
        for &b in block_sizes {
            let mut blk: Vec<(u32, u32)> = (off..off + b)
                .map(|j| (self.tables.canon[tuple[j] as usize], j as u32))
                .collect();
            blk.sort_unstable();
            debug_assert!(blk.windows(2).all(|w| w[0].0 < w[1].0));
            pairs.extend(blk);
            off += b;
        }
        let canon: Vec<u32> = pairs.iter().map(|&(c, _)| c).collect();
        let sigma: Vec<u32> = pairs.iter().map(|&(_, j)| j).collect();
        let mut g_ids = vec![0u32; n];
        for (p, &(c, j)) in pairs.iter().enumerate() {
            let _ = p;
            g_ids[j as usize] = self.tables.to_canon_g[tuple[j as usize] as usize];
            debug_assert_eq!(self.tables.apply(g_ids[j as usize], c), tuple[j as usize]);
        }
        // Koszul sign of moving factor p to position sigma[p]
        let mut sign = 1i64;
        for p in 0..n {
            for q in p + 1..n {
                if sigma[p] > sigma[q] {
                    let dp = self.tables.dim_of[canon[p] as usize] as u32;
                    let dq = self.tables.dim_of[canon[q] as usize] as u32;
                    if dp % 2 == 1 && dq % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
        }
        for p in 0..n {
            let j = sigma[p];
            sign *= self.tables.apply_sign(g_ids[j as usize], canon[p]) as i64;
        }
        Transport {
            sigma_sign: permutation_sign(&sigma),
            canon,
            sigma,
            g_ids,
            sign,
        }
    }

    /// Order of the stabilizer of a canonical tuple inside G wr S_n: the
    /// coordinate permutation is forced to be trivial, so it is the product
    /// of the simplex stabilizer orders.
    pub fn stabilizer_order(&self, canon: &[u32]) -> usize {
        canon
            .iter()
            .map(|&s| self.tables.stab_ids[s as usize].len())
            .product()
    }

    /// Enumerate canonical cells (tuples of canonical simplices, strictly
    /// sorted within each block, pairwise orbit disjoint) of total degree
    /// <= cap, grouped by degree.
    fn enumerate_canonical(
        &self,
        block_sizes: &[usize],
        cap: usize,
        max_cells: u64,
        keep: impl Fn(&[u32]) -> bool,
    ) -> Result<Vec<Vec<Vec<u32>>>> {
        let canonical_ids: Vec<u32> = (0..self.tables.total as u32)
            .filter(|&s| self.tables.canon[s as usize] == s)
            .collect();
        let n: usize = block_sizes.iter().sum();
        // position -> remaining coordinates in the same block after it
        let mut left_in_block = vec![0usize; n];
        {
            let mut off = 0;
            for &b in block_sizes {
                for j in 0..b {
                    left_in_block[off + j] = b - j;
                }
                off += b;
            }
        }
        let mut out: Vec<Vec<Vec<u32>>> = vec![Vec::new(); cap + 1];
        let mut count: u64 = 0;
        let mut stack: Vec<u32> = Vec::with_capacity(n);

        struct Ctx<'c, F: Fn(&[u32]) -> bool> {
            cs: &'c SimplexTables,
            ids: &'c [u32],
            n: usize,
            cap: usize,
            max_cells: u64,
            keep: F,
            left_in_block: Vec<usize>,
        }
        fn rec<F: Fn(&[u32]) -> bool>(
            ctx: &Ctx<'_, F>,
            start: usize,
            degree: usize,
            stack: &mut Vec<u32>,
            out: &mut [Vec<Vec<u32>>],
            count: &mut u64,
        ) -> Result<()> {
            if stack.len() == ctx.n {
                if (ctx.keep)(stack) {
                    *count += 1;
                    if *count > ctx.max_cells {
                        return Err(Error::Capacity {
                            what: "configuration cell enumeration".into(),
                            needed: *count,
                            limit: ctx.max_cells,
                        });
                    }
                    out[degree].push(stack.clone());
                }
                return Ok(());
            }
            let remaining = ctx.left_in_block[stack.len()];
            // the candidate scan restarts at every block boundary
            let fresh_block = stack.is_empty() || ctx.left_in_block[stack.len() - 1] == 1;
            let start = if fresh_block { 0 } else { start };
            for (pos, &s) in ctx.ids.iter().enumerate().skip(start) {
                let d = ctx.cs.dim_of[s as usize] as usize;
                // ids ascend with dimension, so every later candidate in the
                // current block has dimension at least d
                if degree + d * remaining > ctx.cap {
                    break;
                }
                if stack.iter().any(|&t| !ctx.cs.masks_disjoint(t, s)) {
                    continue;
                }
                stack.push(s);
                rec(ctx, pos + 1, degree + d, stack, out, count)?;
                stack.pop();
            }
            Ok(())
        }

        let ctx = Ctx {
            cs: &self.tables,
            ids: &canonical_ids,
            n,
            cap,
            max_cells,
            keep,
            left_in_block,
        };
        rec(&ctx, 0, 0, &mut stack, &mut out, &mut count)?;
        Ok(out)
    }

    /// Chain complex of the chi isotypic piece of the cellular model of
    /// ordered configurations, up to degree `cap` (inclusive). Betti numbers
    /// of degrees below `cap` are exact; the top degree is truncated unless
    /// `cap` reaches n * dim(model).
    pub fn isotypic_complex(
        &self,
        n: usize,
        chi: &WreathCharacter,
        cap: Option<usize>,
        max_cells: u64,
    ) -> Result<IsotypicComplex> {
        if chi.base_values.len() != self.group().order() {
            return Err(Error::BadCharacter(format!(
                "character has {} base values for a group of order {}",
                chi.base_values.len(),
                self.group().order()
            )));
        }
        self.isotypic_complex_blocks(&[n], chi, cap, max_cells)
    }

    /// Trivial-character chain complex for the block subgroup: the product of
    /// per block wreath groups acting on configurations whose first blocks
    /// are marked. Cells are tuples sorted within each block.
    pub fn block_isotypic_complex(
        &self,
        block_sizes: &[usize],
        cap: Option<usize>,
        max_cells: u64,
    ) -> Result<IsotypicComplex> {
        let triv = WreathCharacter::trivial(self.group().order());
        self.isotypic_complex_blocks(block_sizes, &triv, cap, max_cells)
    }

    fn isotypic_complex_blocks(
        &self,
        block_sizes: &[usize],
        chi: &WreathCharacter,
        cap: Option<usize>,
        max_cells: u64,
    ) -> Result<IsotypicComplex> {
        let n: usize = block_sizes.iter().sum();
        if n == 0 {
            // a single empty configuration
            return Ok(IsotypicComplex {
                n,
                blocks: block_sizes.to_vec(),
                chi: chi.clone(),
                cells: vec![vec![Vec::new()]],
                index: vec![HashMap::from([(Vec::new(), 0u32)])],
                complex: ChainComplex::new(vec![1], vec![])?,
                truncated: false,
            });
        }
        let full_top = n * self.model().dim().unwrap_or(0);
        let cap = cap.unwrap_or(full_top).min(full_top);
        let base_values = &chi.base_values;
        let cells = self.enumerate_canonical(block_sizes, cap, max_cells, |tuple| {
            tuple
                .iter()
                .all(|&s| self.tables.stab_fixed_by(s, base_values))
        })?;
        let index: Vec<HashMap<Vec<u32>, u32>> = cells
            .iter()
            .map(|stratum| {
                stratum
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (t.clone(), i as u32))
                    .collect()
            })
            .collect();

        let dims: Vec<usize> = cells.iter().map(|s| s.len()).collect();
        let mut boundaries = Vec::new();
        for k in 1..=cap {
            let mut m = IntMatrix::new(dims[k - 1], dims[k]);
            for (col, tuple) in cells[k].iter().enumerate() {
                let mut acc: HashMap<u32, i64> = HashMap::new();
                let mut prefix = 1i64;
                for i in 0..n {
                    let s = tuple[i];
                    let d = self.tables.dim_of[s as usize];
                    if d > 0 {
                        for &(face, fsign) in self.tables.faces_of(s) {
                            let mut t = tuple.clone();
                            t[i] = face;
                            let tr = self.canonicalize_blocks(&t, block_sizes);
                            if let Some(&row) = index[k - 1].get(&tr.canon) {
                                let chi_val = chi.eval_parts(tr.sigma_sign, &tr.g_ids);
                                let term = prefix * fsign as i64 * tr.sign * chi_val;
                                *acc.entry(row).or_insert(0) += term;
                            }
                        }
                    }
                    if d % 2 == 1 {
                        prefix = -prefix;
                    }
                }
                let mut rows: Vec<(u32, i64)> =
                    acc.into_iter().filter(|&(_, v)| v != 0).collect();
                rows.sort_unstable_by_key(|e| e.0);
                for (row, v) in rows {
                    m.push(row as usize, col, v);
                }
            }
            boundaries.push(m);
        }
        let truncated = cap < full_top;
        Ok(IsotypicComplex {
            n,
            blocks: block_sizes.to_vec(),
            chi: chi.clone(),
            cells,
            index,
            complex: ChainComplex::new(dims, boundaries)?,
            truncated,
        })
    }

    /// The poset of ordered configuration cells, graded by total dimension,
    /// ordered componentwise by the face relation. Ids form a linear
    /// extension ordered by (grade, lex).
    pub fn deleted_product_poset(&self, n: usize, max_elems: u64) -> Result<TuplePoset> {
        let mut tuples: Vec<Vec<u32>> = Vec::new();
        let mut stack: Vec<u32> = Vec::with_capacity(n);
        fn rec(
            tables: &SimplexTables,
            n: usize,
            max: u64,
            stack: &mut Vec<u32>,
            out: &mut Vec<Vec<u32>>,
        ) -> Result<()> {
            if stack.len() == n {
                if out.len() as u64 >= max {
                    return Err(Error::Capacity {
                        what: "ordered configuration cells".into(),
                        needed: out.len() as u64 + 1,
                        limit: max,
                    });
                }
                out.push(stack.clone());
                return Ok(());
            }
            for s in 0..tables.total as u32 {
                if stack.iter().any(|&t| !tables.masks_disjoint(t, s)) {
                    continue;
                }
                stack.push(s);
                rec(tables, n, max, stack, out)?;
                stack.pop();
            }
            Ok(())
        }
        rec(&self.tables, n, max_elems, &mut stack, &mut tuples)?;
        let grade = |t: &Vec<u32>| -> u32 {
            t.iter().map(|&s| self.tables.dim_of[s as usize] as u32).sum()
        };
        tuples.sort_unstable_by(|a, b| (grade(a), a).cmp(&(grade(b), b)));
        let index: HashMap<Vec<u32>, u32> = tuples
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        // componentwise face order: T < T' iff every coordinate of T is a
        // face of (or equals) the matching coordinate of T', and T != T'
        let mut above: Vec<Vec<u32>> = vec![Vec::new(); tuples.len()];
        let mut choice: Vec<&[u32]> = Vec::with_capacity(n);
        for (i, t) in tuples.iter().enumerate() {
            choice.clear();
            let mut singleton: Vec<Vec<u32>> = Vec::with_capacity(n);
            for &s in t {
                let mut c = vec![s];
                c.extend_from_slice(self.tables.cofaces_of(s));
                singleton.push(c);
            }
            // product over per coordinate coface lists
            let mut counters = vec![0usize; n];
            'outer: loop {
                let cand: Vec<u32> = (0..n).map(|j| singleton[j][counters[j]]).collect();
                if cand != *t {
                    if let Some(&id) = index.get(&cand) {
                        above[i].push(id);
                    }
                }
                // advance odometer
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    counters[pos] += 1;
                    if counters[pos] < singleton[pos].len() {
                        break;
                    }
                    counters[pos] = 0;
                }
            }
            above[i].sort_unstable();
        }
        let grades: Vec<u32> = tuples.iter().map(grade).collect();
        Ok(TuplePoset {
            poset: Poset::new(above),
            tuples,
            grade: grades,
            index,
        })
    }

    /// Staircase model: the order complex of the cell poset.
    pub fn staircase_model(&self, n: usize, max_cells: u64) -> Result<StaircaseModel> {
        self.staircase_model_up_to(n, usize::MAX, max_cells)
    }

    /// Staircase model truncated to simplices of dimension < max_len; keeps
    /// homology exact in degrees strictly below max_len - 1.
    pub fn staircase_model_up_to(
        &self,
        n: usize,
        max_len: usize,
        max_cells: u64,
    ) -> Result<StaircaseModel> {
        let tuples = self.deleted_product_poset(n, max_cells)?;
        let complex =
            tuples
                .poset
                .order_complex_capped_up_to(max_len, max_cells, "staircase model")?;
        Ok(StaircaseModel { tuples, complex })
    }
}

/// Isotypic piece of the cellular configuration model. Basis elements of
/// degree k are the canonical cells listed in `cells[k]`; the chain complex
/// carries integer boundary matrices in that basis.
pub struct IsotypicComplex {
    pub n: usize,
    /// Sizes of the coordinate blocks the symmetric part is allowed to
    /// permute within. A plain configuration space uses one block of size n.
    pub blocks: Vec<usize>,
    pub chi: WreathCharacter,
    pub cells: Vec<Vec<Vec<u32>>>,
    index: Vec<HashMap<Vec<u32>, u32>>,
    pub complex: ChainComplex,
    pub truncated: bool,
}

impl IsotypicComplex {
    pub fn cell_index(&self, degree: usize, canon: &[u32]) -> Option<u32> {
        self.index.get(degree)?.get(canon).copied()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.len()).collect()
    }

    /// Highest degree whose homology is unaffected by the degree cap.
    pub fn exact_top(&self) -> usize {
        let top = self.complex.top_degree();
        if self.truncated {
            top.saturating_sub(1)
        } else {
            top
        }
    }
}

impl WreathCharacter {
    /// Evaluate from transport parts: a permutation sign and base ids.
    pub fn eval_parts(&self, sigma_sign: i64, g_ids: &[u32]) -> i64 {
        let mut v = if self.sign_exponent % 2 == 1 {
            sigma_sign
        } else {
            1
        };
        for &g in g_ids {
            v *= self.base_values[g as usize] as i64;
        }
        v
    }
}

/// Ordered configuration cells as a graded poset.
pub struct TuplePoset {
    pub poset: Poset,
    pub tuples: Vec<Vec<u32>>,
    pub grade: Vec<u32>,
    pub index: HashMap<Vec<u32>, u32>,
}

/// Order complex of the cell poset: a simplicial model of the ordered
/// configuration space. Vertex v of the complex is poset element v.
pub struct StaircaseModel {
    pub tuples: TuplePoset,
    pub complex: SimplicialComplex,
}

impl StaircaseModel {
    /// Chain complex of the quotient by the wreath action, valid over the
    /// integers when the action on cells is free. Cells of the quotient are
    /// orbit representatives (lexicographically least chains); the action
    /// preserves chain order, so transport signs are all +1.
    pub fn free_quotient_complex(
        &self,
        cs: &ConfigSpace<'_>,
        w: &WreathGroup,
    ) -> Result<ChainComplex> {
        // poset-level images for every group element
        let mut elem_maps: Vec<Vec<u32>> = Vec::with_capacity(w.order());
        for gid in w.ids() {
            let (sigma, gs) = w.element(gid);
            let map: Vec<u32> = self
                .tuples
                .tuples
                .iter()
                .map(|t| {
                    let img = cs.tuple_image(sigma, gs, t);
                    *self
                        .tuples
                        .index
                        .get(&img)
                        .expect("wreath action preserves the cell poset")
                })
                .collect();
            elem_maps.push(map);
        }

        let top = self.complex.dim().unwrap_or(0);
        // canonical (lex least) form per cell and freeness check
        let mut canonical_of: Vec<Vec<u32>> = Vec::new(); // per degree: quotient index or MAX
        let mut reps: Vec<Vec<u32>> = Vec::new(); // per degree: rep cell indices
        for d in 0..=top {
            let count = self.complex.count(d);
            let mut canon_idx = vec![u32::MAX; count];
            let mut rep_list = Vec::new();
            let mut scratch: Vec<u32> = Vec::with_capacity(d + 1);
            for i in 0..count {
                let cell = self.complex.simplex(d, i);
                let mut best: Option<Vec<u32>> = None;
                for gid in w.ids() {
                    let map = &elem_maps[gid as usize];
                    scratch.clear();
                    scratch.extend(cell.iter().map(|&v| map[v as usize]));
                    debug_assert!(scratch.windows(2).all(|x| x[0] < x[1]));
                    if gid != w.identity_id() && scratch.as_slice() == cell {
                        return Err(Error::NonFreeAction(format!(
                            "cell {:?} is fixed by a nontrivial symmetry",
                            cell
                        )));
                    }
                    if best.as_ref().map(|b| scratch < *b).unwrap_or(true) {
                        best = Some(scratch.clone());
                    }
                }
                let best = best.unwrap();
                if best.as_slice() == cell {
                    canon_idx[i] = rep_list.len() as u32;
                    rep_list.push(i as u32);
                }
            }
            canonical_of.push(canon_idx);
            reps.push(rep_list);
        }
        // resolve non canonical cells to their representative's quotient id
        let resolve = |d: usize, i: usize, elem_maps: &Vec<Vec<u32>>| -> u32 {
            let cell = self.complex.simplex(d, i);
            let mut best: Option<Vec<u32>> = None;
            for gid in w.ids() {
                let map = &elem_maps[gid as usize];
                let img: Vec<u32> = cell.iter().map(|&v| map[v as usize]).collect();
                if best.as_ref().map(|b| img < *b).unwrap_or(true) {
                    best = Some(img);
                }
            }
            let b = best.unwrap();
            let bi = self.complex.index_of(d, &b).expect("orbit stays in complex");
            canonical_of[d][bi]
        };

        let dims: Vec<usize> = reps.iter().map(|r| r.len()).collect();
        let mut boundaries = Vec::new();
        for k in 1..=top {
            let mut m = IntMatrix::new(dims[k - 1], dims[k]);
            for (col, &rep) in reps[k].iter().enumerate() {
                let s = self.complex.simplex(k, rep as usize);
                let mut face = Vec::with_capacity(k);
                for drop in 0..=k {
                    face.clear();
                    face.extend(
                        s.iter()
                            .enumerate()
                            .filter(|(j, _)| *j != drop)
                            .map(|(_, &v)| v),
                    );
                    let fi = self.complex.index_of(k - 1, &face).expect("closed");
                    let row = if canonical_of[k - 1][fi] != u32::MAX {
                        canonical_of[k - 1][fi]
                    } else {
                        resolve(k - 1, fi, &elem_maps)
                    };
                    let sign = if drop % 2 == 0 { 1 } else { -1 };
                    m.push(row as usize, col, sign);
                }
            }
            boundaries.push(m);
        }
        ChainComplex::new(dims, boundaries)
    }
}

/// A chain in the cellular model: formal rational combination of ordered
/// tuples. Used by the map layer; kept here next to the cell conventions.
pub type CellChain = HashMap<Vec<u32>, BigRational>;

pub fn cell_chain_add(chain: &mut CellChain, tuple: Vec<u32>, coeff: BigRational) {
    if coeff.is_zero() {
        return;
    }
    let slot = chain.entry(tuple).or_insert_with(BigRational::zero);
    *slot += coeff;
    if slot.is_zero() {
        if let Some(key) = chain
            .iter()
            .find(|(_, v)| v.is_zero())
            .map(|(k, _)| k.clone())
        {
            chain.remove(&key);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::WreathCharacter;
    use crate::orbifold::GlobalQuotientOrbifold;

    fn disk_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let disk = SimplicialComplex::from_facets(3, &[vec![0, 1, 2]]).unwrap();
        let g = FiniteGroup::trivial(3);
        GlobalQuotientOrbifold::new(disk, g, subdiv, vec![0, 1, 2], None).unwrap()
    }

    fn sphere_orbifold() -> GlobalQuotientOrbifold {
        let s2 = SimplicialComplex::from_facets(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        GlobalQuotientOrbifold::new(s2, FiniteGroup::trivial(4), 0, vec![], None).unwrap()
    }

    fn fan_z3_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let fan = SimplicialComplex::from_facets(
            4,
            &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 1, 3]],
        )
        .unwrap();
        let rot = FiniteGroup::from_generators(4, &[vec![0, 2, 3, 1]]).unwrap();
        GlobalQuotientOrbifold::new(fan, rot, subdiv, vec![1, 2, 3], None).unwrap()
    }

    #[test]
    fn one_point_configuration_recovers_the_space() {
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let iso = cs.isotypic_complex(1, &triv, None, 1 << 20).unwrap();
        assert_eq!(iso.complex.betti(), orb.model.betti());
        iso.complex.check_boundaries_compose_to_zero().unwrap();

        let orb2 = sphere_orbifold();
        let cs2 = ConfigSpace::new(&orb2).unwrap();
        let iso2 = cs2.isotypic_complex(1, &triv, None, 1 << 20).unwrap();
        assert_eq!(iso2.complex.betti(), vec![1, 0, 1]);
    }

    #[test]
    fn quotient_one_point_model_matches_orbit_space() {
        // Conf_1 of the fan mod Z/3 in the trivial character computes the
        // homology of the quotient (a cone, hence a point) over Q
        let orb = fan_z3_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(3);
        let iso = cs.isotypic_complex(1, &triv, None, 1 << 20).unwrap();
        assert_eq!(iso.complex.betti(), vec![1, 0, 0]);
        iso.complex.check_boundaries_compose_to_zero().unwrap();
    }

    #[test]
    fn two_points_in_a_disk_circle_homology() {
        // ordered configurations of two points in a disk are homotopy
        // equivalent to a circle; the swap acts by rotation, so the trivial
        // part keeps everything and the sign part vanishes
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let sign = WreathCharacter::coordinate_sign(1);
        let iso_t = cs.isotypic_complex(2, &triv, None, 1 << 20).unwrap();
        let iso_s = cs.isotypic_complex(2, &sign, None, 1 << 20).unwrap();
        iso_t.complex.check_boundaries_compose_to_zero().unwrap();
        iso_s.complex.check_boundaries_compose_to_zero().unwrap();
        let bt = iso_t.complex.betti();
        let bs = iso_s.complex.betti();
        assert_eq!(&bt[..2], &[1, 1]);
        assert!(bt[2..].iter().all(|&b| b == 0));
        assert!(bs.iter().all(|&b| b == 0));

        // the staircase model computes the ordered homology; its Betti
        // numbers must match the sum of the two isotypic pieces
        let stair = cs.staircase_model(2, 1 << 22).unwrap();
        let ordered = stair.complex.betti();
        for k in 0..ordered.len() {
            let t = bt.get(k).copied().unwrap_or(0);
            let s = bs.get(k).copied().unwrap_or(0);
            assert_eq!(ordered[k], t + s, "degree {}", k);
        }
        assert_eq!(&ordered[..2], &[1, 1]);
    }

    #[test]
    fn two_points_on_a_sphere() {
        // ordered pairs on S^2 deformation retract to the sphere itself
        let orb = sphere_orbifold();
        let cs = ConfigSpace::new(&orb).unwrap();
        let stair = cs.staircase_model(2, 1 << 22).unwrap();
        assert_eq!(stair.complex.betti(), vec![1, 0, 1]);

        // unordered pairs form the projective plane: free quotient, integral
        let w = WreathGroup::new(FiniteGroup::trivial(4), 2).unwrap();
        let q = stair.free_quotient_complex(&cs, &w).unwrap();
        let ih = q.integral_homology();
        assert_eq!(ih[0].betti, 1);
        assert_eq!(ih[1].betti, 0);
        assert_eq!(ih[1].torsion, vec![num_bigint::BigInt::from(2)]);
        assert_eq!(ih[2].betti, 0);
        assert!(ih[2].torsion.is_empty());
        q.check_boundaries_compose_to_zero().unwrap();
    }

    #[test]
    fn isotypic_pieces_sum_to_ordered_homology_with_group() {
        // fan with Z/3 rotation, two points: W = Z/3 wr S_2 has four rank one
        // characters (sign exponent x trivial base, since Z/3 has no sign)
        let orb = fan_z3_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let stair = cs.staircase_model(2, 1 << 22).unwrap();
        let ordered = stair.complex.betti();

        let triv = WreathCharacter::trivial(3);
        let sign = WreathCharacter::coordinate_sign(3);
        let bt = cs.isotypic_complex(2, &triv, None, 1 << 21).unwrap().complex.betti();
        let bs = cs.isotypic_complex(2, &sign, None, 1 << 21).unwrap().complex.betti();
        // rank one characters do not exhaust W here (there are higher
        // dimensional irreducibles), so we only check the inequality and
        // exactness of each piece
        for k in 0..ordered.len() {
            let t = bt.get(k).copied().unwrap_or(0);
            let s = bs.get(k).copied().unwrap_or(0);
            assert!(t + s <= ordered[k], "degree {}", k);
        }
    }

    #[test]
    fn degree_cap_truncates_but_matches_low_degrees() {
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let full = cs.isotypic_complex(2, &triv, None, 1 << 20).unwrap();
        let capped = cs.isotypic_complex(2, &triv, Some(2), 1 << 20).unwrap();
        assert!(capped.truncated);
        let bf = full.complex.betti();
        let bc = capped.complex.betti();
        // degrees strictly below the cap agree
        for k in 0..2 {
            assert_eq!(bf[k], bc[k], "degree {}", k);
        }
    }

    #[test]
    fn canonicalize_round_trips() {
        let orb = fan_z3_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let w = WreathGroup::new(orb.group.clone(), 2).unwrap();
        // take a few canonical cells and scramble them by group elements
        let triv = WreathCharacter::trivial(3);
        let iso = cs.isotypic_complex(2, &triv, Some(2), 1 << 20).unwrap();
        let mut checked = 0;
        for stratum in &iso.cells {
            for cell in stratum.iter().take(5) {
                for gid in w.ids() {
                    let (sigma, gs) = w.element(gid);
                    let img = cs.tuple_image(sigma, gs, cell);
                    if !tuple_valid(&cs.tables, &img) {
                        continue;
                    }
                    let tr = cs.canonicalize(&img);
                    assert_eq!(&tr.canon, cell);
                    // applying the recorded transport must recover img
                    let mut inv_sigma = vec![0u32; 2];
                    for (p, &j) in tr.sigma.iter().enumerate() {
                        inv_sigma[j as usize] = p as u32;
                    }
                    let rebuilt: Vec<u32> = (0..2)
                        .map(|j| cs.tables.apply(tr.g_ids[j], tr.canon[inv_sigma[j] as usize]))
                        .collect();
                    assert_eq!(rebuilt, img);
                    checked += 1;
                }
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn capacity_guards_fire() {
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        assert!(matches!(
            cs.isotypic_complex(2, &triv, None, 3),
            Err(Error::Capacity { .. })
        ));
        assert!(matches!(
            cs.staircase_model(2, 10),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn nonfree_quotient_is_rejected() {
        // one point on the fan with Z/3: the apex barycenter cell is fixed
        let orb = fan_z3_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let stair = cs.staircase_model(1, 1 << 20).unwrap();
        let w = WreathGroup::new(orb.group.clone(), 1).unwrap();
        assert!(matches!(
            stair.free_quotient_complex(&cs, &w),
            Err(Error::NonFreeAction(_))
        ));
    }

    #[test]
    fn single_block_complex_matches_plain_complex() {
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let plain = cs.isotypic_complex(2, &triv, None, 1 << 20).unwrap();
        let block = cs.block_isotypic_complex(&[2], None, 1 << 20).unwrap();
        assert_eq!(plain.cells, block.cells);
        assert_eq!(plain.complex.betti(), block.complex.betti());
        assert_eq!(block.blocks, vec![2]);
    }

    #[test]
    fn unit_blocks_enumerate_ordered_tuples() {
        // With singleton blocks no coordinates may be swapped, so every
        // unordered cell splits into one cell per ordering of its entries.
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let plain = cs.isotypic_complex(2, &triv, None, 1 << 20).unwrap();
        let ordered = cs.block_isotypic_complex(&[1, 1], None, 1 << 20).unwrap();
        ordered.complex.check_boundaries_compose_to_zero().unwrap();
        let pd = plain.dims();
        let od = ordered.dims();
        assert_eq!(od.len(), pd.len());
        for (a, b) in pd.iter().zip(od.iter()) {
            assert_eq!(2 * a, *b);
        }
        // Two labelled points in a disk retract to a circle.
        let betti = ordered.complex.betti();
        assert_eq!(betti[0], 1);
        assert_eq!(betti[1], 1);
        assert!(betti[2..].iter().all(|&b| b == 0));
    }

    #[test]
    fn mixed_blocks_count_marked_configurations() {
        // Blocks [1, 2] mark one of three points: each unordered triple
        // yields three marked cells, one per choice of marked entry.
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(1);
        let plain = cs.isotypic_complex(3, &triv, None, 1 << 20).unwrap();
        let marked = cs.block_isotypic_complex(&[1, 2], None, 1 << 20).unwrap();
        marked.complex.check_boundaries_compose_to_zero().unwrap();
        for (a, b) in plain.dims().iter().zip(marked.dims().iter()) {
            assert_eq!(3 * a, *b);
        }
        assert_eq!(marked.complex.betti()[0], 1);
    }

    #[test]
    fn unit_blocks_with_rotation_group() {
        let orb = fan_z3_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        let triv = WreathCharacter::trivial(3);
        let plain = cs.isotypic_complex(2, &triv, None, 1 << 20).unwrap();
        let ordered = cs.block_isotypic_complex(&[1, 1], None, 1 << 20).unwrap();
        ordered.complex.check_boundaries_compose_to_zero().unwrap();
        for (a, b) in plain.dims().iter().zip(ordered.dims().iter()) {
            assert_eq!(2 * a, *b);
        }
        assert_eq!(ordered.complex.betti()[0], 1);
    }
}

