//! Strata of the configuration space counted by how many points sit on the
//! singular locus. Each stratum is modeled as a product of two smaller
//! configuration models, one over the complement of the singular locus and
//! one over the locus itself; the module also accounts compactly supported
//! Euler characteristics over the strata and checks that they add up to the
//! value computed on the whole space at once.

use std::collections::{BTreeSet, HashMap};

use crate::chain::{tensor_complex, ChainComplex};
use crate::config::{tuple_valid, ConfigSpace, SimplexTables};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, WreathGroup};
use crate::orbifold::GlobalQuotientOrbifold;

/// Connected components of the complement of the singular locus, as sorted
/// lists of model vertex ids, ordered by smallest member.
pub fn complement_components(orb: &GlobalQuotientOrbifold) -> Vec<Vec<u32>> {
    let sing: BTreeSet<u32> = orb.singular_vertices().into_iter().collect();
    let keep: BTreeSet<u32> = (0..orb.model.n_vertices() as u32)
        .filter(|v| !sing.contains(v))
        .collect();
    let (sub, old_ids) = orb.model.full_subcomplex(&keep);
    let nv = sub.n_vertices();
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); nv];
    if sub.dim().unwrap_or(0) >= 1 {
        for e in sub.simplices(1) {
            adj[e[0] as usize].push(e[1]);
            adj[e[1] as usize].push(e[0]);
        }
    }
    let mut seen = vec![false; nv];
    let mut out: Vec<Vec<u32>> = Vec::new();
    for start in 0..nv {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        let mut comp = Vec::new();
        seen[start] = true;
        while let Some(v) = stack.pop() {
            comp.push(old_ids[v]);
            for &w in &adj[v] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    stack.push(w as usize);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out.sort_by_key(|c| c[0]);
    out
}

/// Restriction to an arbitrary vertex set: the full subcomplex acted on by
/// the restriction of the subgroup that preserves the set. Unlike
/// `restrict_to_vertices` this never fails on asymmetric sets; elements
/// moving the set away are simply dropped.
fn restrict_with_stabilizer(
    orb: &GlobalQuotientOrbifold,
    keep: &BTreeSet<u32>,
) -> Result<(GlobalQuotientOrbifold, Vec<u32>)> {
    let (sub, old_ids) = orb.model.full_subcomplex(keep);
    let pos_of: HashMap<u32, u32> = old_ids
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i as u32))
        .collect();
    let mut gens = Vec::new();
    for g in orb.group.ids().skip(1) {
        if keep.iter().all(|&v| keep.contains(&orb.group.apply(g, v))) {
            let perm: Vec<u32> = old_ids
                .iter()
                .map(|&v| pos_of[&orb.group.apply(g, v)])
                .collect();
            gens.push(perm);
        }
    }
    let group = FiniteGroup::from_generators(sub.n_vertices(), &gens)?;
    let restricted = GlobalQuotientOrbifold::new(sub, group, 0, vec![], None)?;
    if restricted.subdiv_level != 0 {
        return Err(Error::InvalidInput(
            "restricted action is not regular; the vertex correspondence would be lost".into(),
        ));
    }
    Ok((restricted, old_ids))
}

/// One stratum of the configuration space: n - m points in the complement of
/// the singular locus and m points on the locus. Homology is computed twice,
/// as a convolution of the factor Betti numbers and from the tensor product
/// of the factor chain complexes.
#[derive(Clone, Debug)]
pub struct StratumModel {
    pub n: usize,
    pub m: usize,
    pub free_betti: Vec<usize>,
    pub singular_betti: Vec<usize>,
    /// convolution of the factor Betti numbers
    pub betti: Vec<usize>,
    /// Betti numbers of the tensor product complex
    pub tensor_betti: Vec<usize>,
    pub consistent: bool,
}

fn point_complex() -> Result<ChainComplex> {
    ChainComplex::new(vec![1], vec![])
}

fn factor_complex(
    orb: &GlobalQuotientOrbifold,
    keep: &BTreeSet<u32>,
    count: usize,
    stabilizer_only: bool,
    max_cells: u64,
) -> Result<ChainComplex> {
    if count == 0 {
        return point_complex();
    }
    if keep.is_empty() {
        return Err(Error::InvalidInput(
            "a factor with marked points needs a nonempty subcomplex".into(),
        ));
    }
    let (restricted, _) = if stabilizer_only {
        restrict_with_stabilizer(orb, keep)?
    } else {
        orb.restrict_to_vertices(keep)?
    };
    let cs = ConfigSpace::new(&restricted)?;
    let iso = cs.block_isotypic_complex(&[count], None, max_cells)?;
    Ok(iso.complex)
}

/// Build the product model of the (n, m) stratum. When `component` is given,
/// the free factor is drawn from that single connected component of the
/// complement instead of the whole complement.
pub fn stratum_model(
    orb: &GlobalQuotientOrbifold,
    n: usize,
    m: usize,
    component: Option<usize>,
    max_cells: u64,
) -> Result<StratumModel> {
    if m > n {
        return Err(Error::InvalidInput(
            "a stratum cannot mark more points than it has".into(),
        ));
    }
    let sing: BTreeSet<u32> = orb.singular_vertices().into_iter().collect();
    if m > 0 && sing.is_empty() {
        return Err(Error::InvalidInput(
            "the singular locus is empty; no stratum marks points on it".into(),
        ));
    }
    let free_keep: BTreeSet<u32> = match component {
        None => (0..orb.model.n_vertices() as u32)
            .filter(|v| !sing.contains(v))
            .collect(),
        Some(i) => {
            let comps = complement_components(orb);
            comps
                .get(i)
                .ok_or_else(|| {
                    Error::InvalidInput(format!(
                        "complement component {} of {} requested",
                        i,
                        comps.len()
                    ))
                })?
                .iter()
                .cloned()
                .collect()
        }
    };
    let free_cx = factor_complex(orb, &free_keep, n - m, component.is_some(), max_cells)?;
    let sing_cx = factor_complex(orb, &sing, m, false, max_cells)?;
    let free_betti = free_cx.betti();
    let singular_betti = sing_cx.betti();
    let len = free_betti.len() + singular_betti.len() - 1;
    let mut betti = vec![0usize; len];
    for (p, &a) in free_betti.iter().enumerate() {
        for (q, &b) in singular_betti.iter().enumerate() {
            betti[p + q] += a * b;
        }
    }
    let tensor_betti = tensor_complex(&free_cx, &sing_cx)?.betti();
    let consistent = betti == tensor_betti;
    Ok(StratumModel {
        n,
        m,
        free_betti,
        singular_betti,
        betti,
        tensor_betti,
        consistent,
    })
}

/// One comparison row for a stratum: Betti numbers at n and n + 1 points, of
/// which the first (n - m) / 2 + 1 degrees are expected to agree.
#[derive(Clone, Debug)]
pub struct StratumStabilityRow {
    pub n: usize,
    pub m: usize,
    /// largest degree in the expected agreement range, (n - m) / 2
    pub range: usize,
    pub betti_small: Vec<usize>,
    pub betti_large: Vec<usize>,
    pub pass: bool,
}

/// Compare the homology of the (n, m) strata for n = n_lo .. n_hi against
/// n + 1 points, in the stable range of degrees.
pub fn stratum_stability(
    orb: &GlobalQuotientOrbifold,
    m: usize,
    n_lo: usize,
    n_hi: usize,
    max_cells: u64,
) -> Result<Vec<StratumStabilityRow>> {
    if n_lo < m || n_hi < n_lo {
        return Err(Error::InvalidInput(
            "stratum stability needs m <= n_lo <= n_hi".into(),
        ));
    }
    let mut models: Vec<StratumModel> = Vec::new();
    for n in n_lo..=n_hi + 1 {
        models.push(stratum_model(orb, n, m, None, max_cells)?);
    }
    let mut rows = Vec::new();
    for n in n_lo..=n_hi {
        let small = &models[n - n_lo];
        let large = &models[n - n_lo + 1];
        let range = (n - m) / 2;
        let pass = (0..=range).all(|k| {
            small.betti.get(k).copied().unwrap_or(0) == large.betti.get(k).copied().unwrap_or(0)
        });
        rows.push(StratumStabilityRow {
            n,
            m,
            range,
            betti_small: small.betti.clone(),
            betti_large: large.betti.clone(),
            pass,
        });
    }
    Ok(rows)
}

/// Alternating chain count of the order complex of a subset of a product
/// poset of cells, by the recursion N(t) = 1 - sum of N(u) over smaller
/// members u < t. Tuples are visited in lexicographic order, which extends
/// the product face order because cell ids grow with dimension.
struct TupleEuler {
    /// weak faces of each cell: the cell itself plus all strict faces
    weak_faces: Vec<Vec<u32>>,
    base: u64,
}

impl TupleEuler {
    fn new(tables: &SimplexTables) -> Self {
        let mut weak_faces: Vec<Vec<u32>> = (0..tables.total as u32).map(|c| vec![c]).collect();
        for c in 0..tables.total as u32 {
            for &cof in tables.cofaces_of(c) {
                weak_faces[cof as usize].push(c);
            }
        }
        weak_faces.iter_mut().for_each(|f| f.sort_unstable());
        TupleEuler {
            weak_faces,
            base: tables.total as u64,
        }
    }

    fn rank(&self, t: &[u32]) -> u64 {
        t.iter().fold(0u64, |acc, &c| acc * self.base + c as u64)
    }

    /// chi of the order complex of { t : member(t) }, where members are fed
    /// in ascending rank order by the caller through `tuples`.
    fn chi<I, F>(&self, k: usize, tuples: I, mut member: F) -> i64
    where
        I: Iterator<Item = Vec<u32>>,
        F: FnMut(&[u32]) -> bool,
    {
        let mut weights: HashMap<u64, i64> = HashMap::new();
        let mut chi = 0i64;
        let mut counters = vec![0usize; k];
        for t in tuples {
            let mut n_t = 1i64;
            // odometer over products of weak faces, skipping t itself
            counters.iter_mut().for_each(|c| *c = 0);
            'outer: loop {
                let u: Vec<u32> = (0..k)
                    .map(|i| self.weak_faces[t[i] as usize][counters[i]])
                    .collect();
                if u != t {
                    if let Some(w) = weights.get(&self.rank(&u)) {
                        n_t -= w;
                    }
                }
                let mut pos = k;
                loop {
                    if pos == 0 {
                        break 'outer;
                    }
                    pos -= 1;
                    counters[pos] += 1;
                    if counters[pos] < self.weak_faces[t[pos] as usize].len() {
                        break;
                    }
                    counters[pos] = 0;
                }
            }
            let _ = member(&t);
            weights.insert(self.rank(&t), n_t);
            chi += n_t;
        }
        chi
    }
}

/// All k-tuples of cell ids below `total`, ascending in rank, filtered.
fn filtered_tuples(
    total: usize,
    k: usize,
    mut keep: impl FnMut(&[u32]) -> bool,
) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; k];
    loop {
        if keep(&cur) {
            out.push(cur.clone());
        }
        let mut pos = k;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if (cur[pos] as usize) < total {
                break;
            }
            cur[pos] = 0;
        }
        if cur.iter().all(|&c| c == 0) {
            return out;
        }
    }
}

/// Tuples fixed by a wreath element, ascending in rank: one free choice per
/// cycle of the coordinate permutation, constrained to cells fixed by the
/// product of the attached group elements around the cycle.
fn fixed_tuples(
    tables: &SimplexTables,
    group: &FiniteGroup,
    sigma: &[u32],
    gs: &[u32],
) -> Vec<Vec<u32>> {
    let k = sigma.len();
    let mut seen = vec![false; k];
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut cycle_fix: Vec<Vec<u32>> = Vec::new();
    for start in 0..k {
        if seen[start] {
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut around = group.identity_id();
        let mut j = start;
        loop {
            let next = sigma[j] as usize;
            if next == start {
                around = group.compose_ids(gs[start] as u32, around);
                break;
            }
            around = group.compose_ids(gs[next] as u32, around);
            seen[next] = true;
            cyc.push(next);
            j = next;
        }
        let fix: Vec<u32> = (0..tables.total as u32)
            .filter(|&c| tables.apply(around, c) == c)
            .collect();
        if fix.is_empty() {
            return Vec::new();
        }
        cycles.push(cyc);
        cycle_fix.push(fix);
    }
    let mut out = Vec::new();
    let mut counters = vec![0usize; cycles.len()];
    loop {
        let mut t = vec![0u32; k];
        for (ci, cyc) in cycles.iter().enumerate() {
            let mut val = cycle_fix[ci][counters[ci]];
            t[cyc[0]] = val;
            let mut j = cyc[0];
            loop {
                let next = sigma[j] as usize;
                if next == cyc[0] {
                    break;
                }
                val = tables.apply(gs[next] as u32, val);
                t[next] = val;
                j = next;
            }
        }
        out.push(t);
        let mut pos = cycles.len();
        loop {
            if pos == 0 {
                out.sort_unstable();
                return out;
            }
            pos -= 1;
            counters[pos] += 1;
            if counters[pos] < cycle_fix[pos].len() {
                break;
            }
            counters[pos] = 0;
        }
    }
}

/// Compactly supported Euler characteristic of the quotient of the open
/// k-point configuration space whose coordinates avoid the excluded cells:
/// averaged over the wreath group, each term the difference between the
/// alternating chain counts of the fixed tuples and of the fixed bad tuples.
fn tuple_chi_c(
    tables: &SimplexTables,
    group: &FiniteGroup,
    k: usize,
    excluded: &[bool],
    max_tuples: u64,
) -> Result<i64> {
    if k == 0 {
        return Ok(1);
    }
    let sweep = (tables.total as u64).checked_pow(k as u32);
    match sweep {
        Some(s) if s <= max_tuples => {}
        _ => {
            return Err(Error::Capacity {
                what: "chi_c tuple sweep".into(),
                needed: sweep.unwrap_or(u64::MAX),
                limit: max_tuples,
            })
        }
    }
    let wreath = WreathGroup::new(group.clone(), k)?;
    let euler = TupleEuler::new(tables);
    let bad = |t: &[u32]| -> bool {
        t.iter().any(|&c| excluded[c as usize]) || !tuple_valid(tables, t)
    };
    let mut sum = 0i64;
    for id in wreath.ids() {
        let (sigma, gs) = wreath.element(id);
        let (chi_all, chi_bad) = if id == wreath.identity_id() {
            // the whole product: chi is the alternating cell count, no
            // recursion needed
            let chi_m: i64 = (0..tables.total)
                .map(|c| if tables.dim_of[c] % 2 == 0 { 1 } else { -1 })
                .sum();
            let chi_all = chi_m.pow(k as u32);
            let bad_tuples = filtered_tuples(tables.total, k, |t| bad(t));
            let chi_bad = euler.chi(k, bad_tuples.into_iter(), |_| true);
            (chi_all, chi_bad)
        } else {
            let fixed = fixed_tuples(tables, group, sigma, gs);
            let chi_all = euler.chi(k, fixed.iter().cloned(), |_| true);
            let chi_bad = euler.chi(k, fixed.into_iter().filter(|t| bad(t)), |_| true);
            (chi_all, chi_bad)
        };
        sum += chi_all - chi_bad;
    }
    let order = wreath.order() as i64;
    if sum % order != 0 {
        return Err(Error::InvalidInput(
            "group average of Euler counts is not an integer; action tables are inconsistent"
                .into(),
        ));
    }
    Ok(sum / order)
}

/// Compactly supported Euler characteristics of the configuration space and
/// of its strata, with the additivity comparison between the two.
#[derive(Clone, Debug)]
pub struct ChiCReport {
    pub n: usize,
    /// chi_c of the whole configuration space, computed in one sweep
    pub total: i64,
    /// chi_c per stratum, index m = points on the singular locus
    pub strata: Vec<i64>,
    /// total equals the sum over strata
    pub additive: bool,
}

pub fn chi_c_report(
    orb: &GlobalQuotientOrbifold,
    n: usize,
    max_tuples: u64,
) -> Result<ChiCReport> {
    let tables = SimplexTables::new(&orb.model, &orb.group)?;
    let no_exclusions = vec![false; tables.total];
    let total = tuple_chi_c(&tables, &orb.group, n, &no_exclusions, max_tuples)?;

    let sing: BTreeSet<u32> = orb.singular_vertices().into_iter().collect();
    // cells of the model lying entirely inside the singular locus
    let mut sing_cell = vec![false; tables.total];
    {
        let mut idx = 0usize;
        for d in 0..=orb.model.dim().unwrap_or(0) {
            for s in orb.model.simplices(d) {
                sing_cell[idx] = s.iter().all(|v| sing.contains(v));
                idx += 1;
            }
        }
    }

    let singular_factor: Vec<i64> = if sing.is_empty() {
        (0..=n).map(|m| if m == 0 { 1 } else { 0 }).collect()
    } else {
        let (sing_orb, _) = orb.restrict_to_vertices(&sing)?;
        let sing_tables = SimplexTables::new(&sing_orb.model, &sing_orb.group)?;
        let none = vec![false; sing_tables.total];
        let mut vals = Vec::with_capacity(n + 1);
        for m in 0..=n {
            vals.push(tuple_chi_c(&sing_tables, &sing_orb.group, m, &none, max_tuples)?);
        }
        vals
    };
    let mut strata = Vec::with_capacity(n + 1);
    for m in 0..=n {
        let free = tuple_chi_c(&tables, &orb.group, n - m, &sing_cell, max_tuples)?;
        strata.push(free * singular_factor[m]);
    }
    let additive = total == strata.iter().sum::<i64>();
    Ok(ChiCReport {
        n,
        total,
        strata,
        additive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::fixtures::*;
    use crate::simplicial::SimplicialComplex;

    fn reflection_orbifold() -> GlobalQuotientOrbifold {
        // reflection through the equator plane of the octahedron
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![0, 1, 5, 3, 4, 2]]).unwrap();
        GlobalQuotientOrbifold::new(oct, g, 1, vec![], None).unwrap()
    }

    #[test]
    fn complement_components_of_the_fixtures() {
        // removing the two poles leaves the connected equatorial band
        let foot = football_orbifold(1);
        assert_eq!(complement_components(&foot).len(), 1);
        // removing the fixed equator separates the hemispheres
        let refl = reflection_orbifold();
        let comps = complement_components(&refl);
        assert_eq!(comps.len(), 2);
        assert_eq!(comps[0].len(), comps[1].len());
    }

    #[test]
    fn football_stratum_with_both_points_marked() {
        // two points on two poles: a single unordered configuration
        let foot = football_orbifold(1);
        let s = stratum_model(&foot, 2, 2, None, 1_000_000).unwrap();
        assert_eq!(s.singular_betti, vec![1]);
        assert_eq!(s.betti, vec![1]);
        assert!(s.consistent);
    }

    #[test]
    fn football_stratum_with_one_marked_point() {
        let foot = football_orbifold(1);
        let s = stratum_model(&foot, 1, 1, None, 1_000_000).unwrap();
        // one point on two poles
        assert_eq!(s.betti, vec![2]);
        assert!(s.consistent);
        // one marked, one free: the free point lives on the open band, which
        // the band subcomplex models up to homotopy
        let s21 = stratum_model(&foot, 2, 1, None, 1_000_000).unwrap();
        assert_eq!(s21.free_betti, vec![1, 1, 0]);
        assert_eq!(s21.betti, vec![2, 2, 0]);
        assert!(s21.consistent);
    }

    #[test]
    fn unmarked_stratum_of_a_trivial_quotient_is_the_plain_model() {
        // with a trivial group there are no singular points and the m = 0
        // stratum is the configuration space itself
        let orb = sphere_orbifold(0);
        let s = stratum_model(&orb, 2, 0, None, 1_000_000).unwrap();
        let cs = ConfigSpace::new(&orb).unwrap();
        let conf = cs.block_isotypic_complex(&[2], None, 1_000_000).unwrap();
        let mut expect = conf.complex.betti();
        expect.resize(s.betti.len().max(expect.len()), 0);
        let mut got = s.betti.clone();
        got.resize(expect.len(), 0);
        assert_eq!(got, expect);
        assert!(s.consistent);
    }

    #[test]
    fn marked_stratum_needs_a_singular_locus() {
        let orb = sphere_orbifold(0);
        assert!(stratum_model(&orb, 2, 1, None, 1_000_000).is_err());
    }

    #[test]
    fn component_choice_agrees_with_the_full_complement() {
        // the football complement is connected, so the named component must
        // reproduce the full answer
        let foot = football_orbifold(1);
        let full = stratum_model(&foot, 2, 1, None, 1_000_000).unwrap();
        let one = stratum_model(&foot, 2, 1, Some(0), 1_000_000).unwrap();
        assert_eq!(full.betti, one.betti);
        assert!(stratum_model(&foot, 2, 1, Some(1), 1_000_000).is_err());

        // the reflection swaps the two hemispheres; one point in the full
        // complement matches one point in a single hemisphere
        let refl = reflection_orbifold();
        let full = stratum_model(&refl, 1, 0, None, 1_000_000).unwrap();
        let left = stratum_model(&refl, 1, 0, Some(0), 1_000_000).unwrap();
        let right = stratum_model(&refl, 1, 0, Some(1), 1_000_000).unwrap();
        assert_eq!(full.betti[0], 1);
        assert_eq!(full.betti, left.betti);
        assert_eq!(full.betti, right.betti);
    }

    #[test]
    fn stratum_stability_for_the_football() {
        let foot = football_orbifold(1);
        let rows = stratum_stability(&foot, 1, 1, 2, 1_000_000).unwrap();
        assert_eq!(rows.len(), 2);
        for row in &rows {
            assert!(row.pass, "stratum row at n = {} failed", row.n);
        }
        assert_eq!(rows[0].range, 0);
        assert_eq!(rows[1].range, 0);
        assert_eq!(rows[0].betti_small, vec![2]);
    }

    #[test]
    fn chi_c_of_closed_surfaces_without_singularities() {
        let orb = sphere_orbifold(0);
        let r1 = chi_c_report(&orb, 1, 10_000_000).unwrap();
        assert_eq!(r1.total, 2);
        assert_eq!(r1.strata, vec![2, 0]);
        assert!(r1.additive);
        let r2 = chi_c_report(&orb, 2, 10_000_000).unwrap();
        assert_eq!(r2.total, 1);
        assert_eq!(r2.strata, vec![1, 0, 0]);
        assert!(r2.additive);
    }

    #[test]
    fn chi_c_of_the_football() {
        let foot = football_orbifold(1);
        let r1 = chi_c_report(&foot, 1, 10_000_000).unwrap();
        assert_eq!(r1.total, 2);
        assert_eq!(r1.strata, vec![0, 2]);
        assert!(r1.additive);
        // two points: the only contribution is both points on the poles
        let r2 = chi_c_report(&foot, 2, 10_000_000).unwrap();
        assert_eq!(r2.total, 1);
        assert_eq!(r2.strata, vec![0, 0, 1]);
        assert!(r2.additive);
    }

    #[test]
    fn chi_c_of_the_antipodal_quotient() {
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, g, 0, vec![], None).unwrap();
        let r = chi_c_report(&orb, 1, 10_000_000).unwrap();
        assert_eq!(r.total, 1);
        assert_eq!(r.strata, vec![1, 0]);
        assert!(r.additive);
    }

    #[test]
    fn chi_c_matches_the_pair_difference_for_two_triangles() {
        // dual route against the explicit pair computation: two disjoint
        // triangles, two ordered points, trivial group
        let two = SimplicialComplex::from_facets(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let orb =
            GlobalQuotientOrbifold::new(two, FiniteGroup::trivial(6), 0, vec![], None).unwrap();
        let tables = SimplexTables::new(&orb.model, &orb.group).unwrap();
        let none = vec![false; tables.total];
        // unordered two point configurations: chi_c = (2 + something) / 2
        let unordered = tuple_chi_c(&tables, &orb.group, 2, &none, 1_000_000).unwrap();
        assert_eq!(unordered, 1);
        let r = chi_c_report(&orb, 2, 1_000_000).unwrap();
        assert_eq!(r.total, 1);
        assert!(r.additive);
    }

    #[test]
    fn chi_c_on_an_interval() {
        let edge = SimplicialComplex::from_facets(2, &[vec![0, 1]]).unwrap();
        let orb =
            GlobalQuotientOrbifold::new(edge, FiniteGroup::trivial(2), 0, vec![], None).unwrap();
        let r1 = chi_c_report(&orb, 1, 1_000_000).unwrap();
        assert_eq!(r1.total, 1);
        let r2 = chi_c_report(&orb, 2, 1_000_000).unwrap();
        assert_eq!(r2.total, 0);
        assert!(r2.additive);
    }
}
