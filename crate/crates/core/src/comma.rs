//! Configuration groupoids of a finite group action on a point set, the
//! partitioned variant whose permutations preserve the marked block, and the
//! comma categories of the forgetful functor between them. The fibers of
//! that functor being homotopically discrete with C(n, m) points is the
//! combinatorial heart of the covering property, and this module checks it
//! by exhaustive enumeration, together with the base change isomorphisms
//! that make the fiber independent of the chosen object.

use std::collections::{HashMap, HashSet};

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::groups::{invert_perm, FiniteGroup};

/// An arrow of a configuration groupoid: a permutation of the coordinates
/// together with one group element per coordinate. Coordinate i of the
/// source is carried by gs[i] to coordinate sigma[i] of the target.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ConfArrow {
    pub source: u32,
    pub target: u32,
    pub sigma: Vec<u32>,
    pub gs: Vec<u32>,
}

/// The groupoid of ordered n-point configurations of a finite group action:
/// objects are tuples of points with pairwise distinct orbits, arrows are
/// permutations decorated with group elements. With a partition, only
/// permutations preserving the first block of coordinates are kept.
pub struct ConfGroupoid {
    pub group: FiniteGroup,
    pub n: usize,
    /// size of the marked first block, None for the unpartitioned groupoid
    pub partition: Option<usize>,
    pub objects: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    sigmas: Vec<Vec<u32>>,
    sigma_index: HashMap<Vec<u32>, u32>,
}

impl ConfGroupoid {
    pub fn new(
        group: FiniteGroup,
        n: usize,
        partition: Option<usize>,
        max_objects: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput(
                "configuration groupoids need at least one point".into(),
            ));
        }
        if let Some(m) = partition {
            if m > n {
                return Err(Error::InvalidInput(
                    "the marked block cannot exceed the number of points".into(),
                ));
            }
        }
        let points = group.n_points();
        let sweep = (points as u64).checked_pow(n as u32);
        match sweep {
            Some(s) if s <= max_objects => {}
            _ => {
                return Err(Error::Capacity {
                    what: "configuration groupoid objects".into(),
                    needed: sweep.unwrap_or(u64::MAX),
                    limit: max_objects,
                })
            }
        }
        // orbit labels to test the no-arrow condition between coordinates
        let mut orbit = vec![u32::MAX; points];
        for p in 0..points as u32 {
            orbit[p as usize] = group
                .ids()
                .map(|g| group.apply(g, p))
                .min()
                .unwrap_or(p);
        }
        let mut objects = Vec::new();
        let mut tuple = vec![0u32; n];
        'outer: loop {
            let distinct = (0..n).all(|i| {
                (i + 1..n).all(|j| orbit[tuple[i] as usize] != orbit[tuple[j] as usize])
            });
            if distinct {
                objects.push(tuple.clone());
            }
            let mut pos = n;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                tuple[pos] += 1;
                if (tuple[pos] as usize) < points {
                    break;
                }
                tuple[pos] = 0;
            }
        }
        let index = objects
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i as u32))
            .collect();
        let sigmas: Vec<Vec<u32>> = (0..n as u32)
            .permutations(n)
            .filter(|s| match partition {
                Some(m) => (0..m).all(|i| (s[i] as usize) < m),
                None => true,
            })
            .collect();
        let sigma_index = sigmas
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as u32))
            .collect();
        Ok(ConfGroupoid {
            group,
            n,
            partition,
            objects,
            index,
            sigmas,
            sigma_index,
        })
    }

    pub fn n_objects(&self) -> usize {
        self.objects.len()
    }

    /// total number of arrows: every (sigma, gs) pair gives a valid arrow
    /// out of every object, since orbits are preserved
    pub fn n_arrows(&self) -> u64 {
        self.objects.len() as u64
            * self.sigmas.len() as u64
            * (self.group.order() as u64).pow(self.n as u32)
    }

    pub fn sigma_allowed(&self, sigma: &[u32]) -> bool {
        self.sigma_index.contains_key(sigma)
    }

    pub fn identity(&self, x: u32) -> ConfArrow {
        ConfArrow {
            source: x,
            target: x,
            sigma: (0..self.n as u32).collect(),
            gs: vec![self.group.identity_id(); self.n],
        }
    }

    /// The arrow out of x determined by a permutation and group elements.
    pub fn arrow(&self, x: u32, sigma: &[u32], gs: &[u32]) -> Result<ConfArrow> {
        if x as usize >= self.objects.len() {
            return Err(Error::InvalidInput("object index out of range".into()));
        }
        if !self.sigma_allowed(sigma) || gs.len() != self.n {
            return Err(Error::InvalidInput(
                "arrow data does not fit the groupoid".into(),
            ));
        }
        let src = &self.objects[x as usize];
        let mut tgt = vec![0u32; self.n];
        for i in 0..self.n {
            tgt[sigma[i] as usize] = self.group.apply(gs[i], src[i]);
        }
        let target = *self
            .index
            .get(&tgt)
            .expect("orbit-distinct tuples are closed under arrows");
        Ok(ConfArrow {
            source: x,
            target,
            sigma: sigma.to_vec(),
            gs: gs.to_vec(),
        })
    }

    pub fn arrows_from(&self, x: u32) -> Vec<ConfArrow> {
        let order = self.group.order();
        let mut out = Vec::with_capacity(self.sigmas.len() * order.pow(self.n as u32));
        for sigma in &self.sigmas {
            let mut gs = vec![0u32; self.n];
            loop {
                out.push(self.arrow(x, sigma, &gs).expect("enumerated arrow"));
                let mut pos = self.n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    gs[pos] += 1;
                    if (gs[pos] as usize) < order {
                        break;
                    }
                    gs[pos] = 0;
                }
                if gs.iter().all(|&g| g == 0) {
                    break;
                }
            }
        }
        out
    }

    pub fn hom(&self, x: u32, y: u32) -> Vec<ConfArrow> {
        self.arrows_from(x)
            .into_iter()
            .filter(|a| a.target == y)
            .collect()
    }

    /// b after a; fails unless the endpoints match.
    pub fn compose(&self, b: &ConfArrow, a: &ConfArrow) -> Result<ConfArrow> {
        if a.target != b.source {
            return Err(Error::InvalidInput(
                "arrows do not share the middle object".into(),
            ));
        }
        let sigma: Vec<u32> = (0..self.n)
            .map(|i| b.sigma[a.sigma[i] as usize])
            .collect();
        if !self.sigma_allowed(&sigma) {
            return Err(Error::InvalidInput(
                "composite permutation leaves the groupoid".into(),
            ));
        }
        let gs: Vec<u32> = (0..self.n)
            .map(|i| self.group.compose_ids(b.gs[a.sigma[i] as usize], a.gs[i]))
            .collect();
        Ok(ConfArrow {
            source: a.source,
            target: b.target,
            sigma,
            gs,
        })
    }

    pub fn invert(&self, a: &ConfArrow) -> ConfArrow {
        let inv = invert_perm(&a.sigma);
        let gs: Vec<u32> = (0..self.n)
            .map(|j| self.group.inverse_id(a.gs[inv[j] as usize]))
            .collect();
        ConfArrow {
            source: a.target,
            target: a.source,
            sigma: inv,
            gs,
        }
    }
}

/// The comma category of the forgetful functor from the partitioned to the
/// plain configuration groupoid, at a base object x: objects are arrows
/// f: x -> c of the plain groupoid, morphisms are block arrows h: c -> c'
/// with h after f equal to f'.
pub struct CommaCategory {
    pub x: u32,
    pub objects: Vec<ConfArrow>,
    pub morphisms: Vec<(u32, u32, ConfArrow)>,
}

fn check_variants(full: &ConfGroupoid, part: &ConfGroupoid) -> Result<()> {
    if full.partition.is_some() || part.partition.is_none() {
        return Err(Error::InvalidInput(
            "comma categories compare the plain groupoid with a partitioned one".into(),
        ));
    }
    if full.n != part.n
        || full.group.order() != part.group.order()
        || full.objects != part.objects
    {
        return Err(Error::InvalidInput(
            "the two groupoids do not share objects".into(),
        ));
    }
    Ok(())
}

pub fn comma_category(full: &ConfGroupoid, part: &ConfGroupoid, x: u32) -> Result<CommaCategory> {
    check_variants(full, part)?;
    if x as usize >= full.objects.len() {
        return Err(Error::InvalidInput("object index out of range".into()));
    }
    let objects = full.arrows_from(x);
    let mut morphisms = Vec::new();
    for (i, f1) in objects.iter().enumerate() {
        let back = full.invert(f1);
        for (j, f2) in objects.iter().enumerate() {
            let h = full.compose(f2, &back).expect("endpoints match");
            if !part.sigma_allowed(&h.sigma) {
                continue;
            }
            // the defining condition of a comma morphism, checked literally
            let round = full.compose(&h, f1).expect("endpoints match");
            if round != *f2 {
                return Err(Error::InvalidInput(
                    "comma morphism fails its defining equation".into(),
                ));
            }
            morphisms.push((i as u32, j as u32, h));
        }
    }
    Ok(CommaCategory {
        x,
        objects,
        morphisms,
    })
}

/// A small category given by an object count and its non-identity arrows
/// as (source, target, invertible) triples.
pub struct SmallCategory {
    pub n_objects: usize,
    pub arrows: Vec<(u32, u32, bool)>,
}

impl CommaCategory {
    pub fn as_small_category(&self, full: &ConfGroupoid) -> SmallCategory {
        let arrows = self
            .morphisms
            .iter()
            .filter(|(i, j, h)| i != j || *h != full.identity(h.source))
            .map(|(i, j, _)| (*i, *j, true))
            .collect();
        SmallCategory {
            n_objects: self.objects.len(),
            arrows,
        }
    }
}

pub struct Skeleton {
    pub n_classes: usize,
    pub reps: Vec<u32>,
    /// true when the skeleton carries identity morphisms only
    pub discrete: bool,
}

/// One object per isomorphism class, plus the check that nothing but
/// identities survives: no endomorphisms, no parallel arrow pairs, and no
/// non-invertible arrows anywhere.
pub fn skeleton(cat: &SmallCategory) -> Skeleton {
    let mut parent: Vec<u32> = (0..cat.n_objects as u32).collect();
    fn find(parent: &mut [u32], i: u32) -> u32 {
        let mut i = i;
        while parent[i as usize] != i {
            parent[i as usize] = parent[parent[i as usize] as usize];
            i = parent[i as usize];
        }
        i
    }
    let mut discrete = true;
    let mut seen = HashSet::new();
    for &(i, j, invertible) in &cat.arrows {
        if invertible {
            let (a, b) = (find(&mut parent, i), find(&mut parent, j));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        } else {
            discrete = false;
        }
        if i == j || !seen.insert((i, j)) {
            // an endomorphism, or a second arrow between the same objects:
            // either way a nontrivial automorphism survives in the skeleton
            discrete = false;
        }
    }
    let mut reps: Vec<u32> = (0..cat.n_objects as u32)
        .filter(|&i| find(&mut parent, i) == i)
        .collect();
    reps.sort_unstable();
    Skeleton {
        n_classes: reps.len(),
        reps,
        discrete,
    }
}

/// Base change along b: precomposition pulls the comma category at the
/// target of b back to the one at its source. Returns true when the pull
/// backs along b and its inverse are mutually inverse bijections on objects
/// and carry morphisms onto morphisms, both ways.
pub fn verify_comma_invariance(
    full: &ConfGroupoid,
    part: &ConfGroupoid,
    b: &ConfArrow,
) -> Result<bool> {
    let at_source = comma_category(full, part, b.source)?;
    let at_target = comma_category(full, part, b.target)?;
    let back = full.invert(b);
    let index_source: HashMap<&ConfArrow, u32> = at_source
        .objects
        .iter()
        .enumerate()
        .map(|(i, f)| (f, i as u32))
        .collect();
    let index_target: HashMap<&ConfArrow, u32> = at_target
        .objects
        .iter()
        .enumerate()
        .map(|(i, f)| (f, i as u32))
        .collect();
    let mut fwd = vec![u32::MAX; at_target.objects.len()];
    for (i, f) in at_target.objects.iter().enumerate() {
        let pulled = full.compose(f, b)?;
        match index_source.get(&pulled) {
            Some(&k) => fwd[i] = k,
            None => return Ok(false),
        }
    }
    let mut bwd = vec![u32::MAX; at_source.objects.len()];
    for (i, f) in at_source.objects.iter().enumerate() {
        let pulled = full.compose(f, &back)?;
        match index_target.get(&pulled) {
            Some(&k) => bwd[i] = k,
            None => return Ok(false),
        }
    }
    let objects_ok = (0..fwd.len()).all(|i| bwd[fwd[i] as usize] == i as u32)
        && (0..bwd.len()).all(|i| fwd[bwd[i] as usize] == i as u32);
    if !objects_ok {
        return Ok(false);
    }
    let mor_source: HashSet<(u32, u32, &ConfArrow)> = at_source
        .morphisms
        .iter()
        .map(|(i, j, h)| (*i, *j, h))
        .collect();
    let mor_target: HashSet<(u32, u32, &ConfArrow)> = at_target
        .morphisms
        .iter()
        .map(|(i, j, h)| (*i, *j, h))
        .collect();
    let forward_ok = at_target
        .morphisms
        .iter()
        .all(|(i, j, h)| mor_source.contains(&(fwd[*i as usize], fwd[*j as usize], h)));
    let backward_ok = at_source
        .morphisms
        .iter()
        .all(|(i, j, h)| mor_target.contains(&(bwd[*i as usize], bwd[*j as usize], h)));
    Ok(forward_ok && backward_ok && at_source.morphisms.len() == at_target.morphisms.len())
}

pub fn binomial(n: u64, m: u64) -> u64 {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    let mut acc = 1u64;
    for i in 0..m {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Result of sweeping every comma category and every base change arrow of a
/// configuration groupoid for one partition size.
#[derive(Clone, Debug)]
pub struct CommaSweep {
    pub n: usize,
    pub m: usize,
    /// number of base objects, hence comma categories inspected
    pub commas: usize,
    pub expected_size: u64,
    pub all_discrete: bool,
    pub all_sized: bool,
    /// number of base change arrows checked exhaustively
    pub arrows_checked: u64,
    pub invariance: bool,
}

impl CommaSweep {
    pub fn pass(&self) -> bool {
        self.all_discrete && self.all_sized && self.invariance
    }
}

/// Check every comma category of the forgetful functor over one base action:
/// skeleta must be discrete with C(n, m) objects, and every arrow of the
/// plain groupoid must induce mutually inverse base changes. Arrows of the
/// comma categories are compared through a compact packed encoding so the
/// sweep stays exhaustive yet fast.
pub fn sweep_comma_categories(
    group: &FiniteGroup,
    n: usize,
    m: usize,
    max_objects: u64,
) -> Result<CommaSweep> {
    if m >= n {
        return Err(Error::InvalidInput(
            "the sweep wants a proper marked block, m < n".into(),
        ));
    }
    let full = ConfGroupoid::new(group.clone(), n, None, max_objects)?;
    let part = ConfGroupoid::new(group.clone(), n, Some(m), max_objects)?;
    let order = full.group.order() as u64;
    let expected_size = binomial(n as u64, m as u64);

    // packed code of an arrow out of a fixed object: permutation index then
    // the group elements, mixed radix
    let pack = |arrow: &ConfArrow, sigma_index: &HashMap<Vec<u32>, u32>| -> u64 {
        let mut code = sigma_index[&arrow.sigma] as u64;
        for &g in &arrow.gs {
            code = code * order + g as u64;
        }
        code
    };
    let full_sigma_index: HashMap<Vec<u32>, u32> = (0..full.n as u32)
        .permutations(full.n)
        .enumerate()
        .map(|(i, s)| (s, i as u32))
        .collect();

    struct CommaData {
        objects: Vec<ConfArrow>,
        object_index: HashMap<u64, u32>,
        /// packed morphism labels, u64::MAX where no morphism exists
        table: Vec<u64>,
    }

    let mut commas: Vec<CommaData> = Vec::with_capacity(full.n_objects());
    let mut all_discrete = true;
    let mut all_sized = true;
    for x in 0..full.n_objects() as u32 {
        let comma = comma_category(&full, &part, x)?;
        let k = comma.objects.len();
        let mut table = vec![u64::MAX; k * k];
        for (i, j, h) in &comma.morphisms {
            table[*i as usize * k + *j as usize] = pack(h, &full_sigma_index);
        }
        let skel = skeleton(&comma.as_small_category(&full));
        if !skel.discrete {
            all_discrete = false;
        }
        if skel.n_classes as u64 != expected_size {
            all_sized = false;
        }
        let object_index = comma
            .objects
            .iter()
            .enumerate()
            .map(|(i, f)| (pack(f, &full_sigma_index), i as u32))
            .collect();
        commas.push(CommaData {
            objects: comma.objects,
            object_index,
            table,
        });
    }

    let mut arrows_checked = 0u64;
    let mut invariance = true;
    for x in 0..full.n_objects() as u32 {
        for b in commas[x as usize].objects.clone() {
            // every arrow out of x is a base change b: x -> target
            arrows_checked += 1;
            let from = &commas[x as usize];
            let to = &commas[b.target as usize];
            let k = from.objects.len();
            let mut fwd = vec![u32::MAX; to.objects.len()];
            let mut ok = true;
            for (i, f) in to.objects.iter().enumerate() {
                let pulled = full.compose(f, &b)?;
                match from.object_index.get(&pack(&pulled, &full_sigma_index)) {
                    Some(&idx) if fwd.iter().all(|&v| v != idx) => fwd[i] = idx,
                    _ => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                // morphisms must be carried onto morphisms with the same
                // label, in both directions; with the bijection established
                // it is enough to compare tables cellwise through fwd
                'table: for i in 0..fwd.len() {
                    for j in 0..fwd.len() {
                        let there = to.table[i * fwd.len() + j];
                        let here = from.table[fwd[i] as usize * k + fwd[j] as usize];
                        if there != here {
                            ok = false;
                            break 'table;
                        }
                    }
                }
            }
            if !ok {
                invariance = false;
            }
        }
    }
    Ok(CommaSweep {
        n,
        m,
        commas: full.n_objects(),
        expected_size,
        all_discrete,
        all_sized,
        arrows_checked,
        invariance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2_on_four() -> FiniteGroup {
        FiniteGroup::from_generators(4, &[vec![1, 0, 3, 2]]).unwrap()
    }

    #[test]
    fn object_counts_of_small_configuration_groupoids() {
        let triv = ConfGroupoid::new(FiniteGroup::trivial(3), 2, None, 10_000).unwrap();
        assert_eq!(triv.n_objects(), 6);
        // one orbit only: no pair of points has distinct orbits
        let swap = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        let empty = ConfGroupoid::new(swap, 2, None, 10_000).unwrap();
        assert_eq!(empty.n_objects(), 0);
        let two_orbits = ConfGroupoid::new(z2_on_four(), 2, None, 10_000).unwrap();
        assert_eq!(two_orbits.n_objects(), 8);
        assert_eq!(two_orbits.n_arrows(), 8 * 2 * 4);
    }

    #[test]
    fn groupoid_laws_hold_exhaustively() {
        let g = ConfGroupoid::new(z2_on_four(), 2, None, 10_000).unwrap();
        for x in 0..g.n_objects() as u32 {
            let id = g.identity(x);
            for a in g.arrows_from(x) {
                let inv = g.invert(&a);
                assert_eq!(g.compose(&inv, &a).unwrap(), id);
                assert_eq!(g.compose(&a, &inv).unwrap(), g.identity(a.target));
                assert_eq!(g.compose(&a, &id).unwrap(), a);
                for c in g.arrows_from(a.target) {
                    let ca = g.compose(&c, &a).unwrap();
                    assert_eq!(ca.source, x);
                    assert_eq!(ca.target, c.target);
                }
            }
        }
    }

    #[test]
    fn hom_sets_share_the_component_size() {
        // connected component of (0, 2): all 8 objects, so every hom set
        // carries an equal share of the arrows out of an object
        let g = ConfGroupoid::new(z2_on_four(), 2, None, 10_000).unwrap();
        let from = g.arrows_from(0);
        assert_eq!(from.len(), 8);
        for y in 0..g.n_objects() as u32 {
            assert_eq!(g.hom(0, y).len(), from.len() / g.n_objects());
        }
    }

    #[test]
    fn comma_skeleta_have_binomial_size() {
        let base = FiniteGroup::trivial(3);
        let full = ConfGroupoid::new(base.clone(), 2, None, 10_000).unwrap();
        let part = ConfGroupoid::new(base.clone(), 2, Some(1), 10_000).unwrap();
        let comma = comma_category(&full, &part, 0).unwrap();
        let skel = skeleton(&comma.as_small_category(&full));
        assert_eq!(skel.n_classes, 2);
        assert!(skel.discrete);

        let full3 = ConfGroupoid::new(base.clone(), 3, None, 10_000).unwrap();
        let part3 = ConfGroupoid::new(base, 3, Some(1), 10_000).unwrap();
        let comma3 = comma_category(&full3, &part3, 0).unwrap();
        let skel3 = skeleton(&comma3.as_small_category(&full3));
        assert_eq!(skel3.n_classes, 3);
        assert!(skel3.discrete);
    }

    #[test]
    fn full_partition_collapses_to_a_point() {
        let base = z2_on_four();
        let full = ConfGroupoid::new(base.clone(), 2, None, 10_000).unwrap();
        let part = ConfGroupoid::new(base, 2, Some(2), 10_000).unwrap();
        let comma = comma_category(&full, &part, 3).unwrap();
        let skel = skeleton(&comma.as_small_category(&full));
        assert_eq!(skel.n_classes, 1);
        assert!(skel.discrete);
    }

    #[test]
    fn skeleton_of_generic_categories() {
        // a discrete category is its own skeleton
        let discrete = SmallCategory {
            n_objects: 4,
            arrows: vec![],
        };
        let s = skeleton(&discrete);
        assert_eq!(s.n_classes, 4);
        assert!(s.discrete);
        // a group viewed as a one object category keeps its arrows
        let group_cat = SmallCategory {
            n_objects: 1,
            arrows: vec![(0, 0, true)],
        };
        let s = skeleton(&group_cat);
        assert_eq!(s.n_classes, 1);
        assert!(!s.discrete);
        // a non-invertible arrow also blocks discreteness
        let arrow_cat = SmallCategory {
            n_objects: 2,
            arrows: vec![(0, 1, false)],
        };
        assert!(!skeleton(&arrow_cat).discrete);
    }

    #[test]
    fn comma_morphisms_match_a_brute_force_enumeration() {
        // independently enumerate every candidate block arrow h between the
        // targets and keep those satisfying the defining equation
        let base = z2_on_four();
        let full = ConfGroupoid::new(base.clone(), 2, None, 10_000).unwrap();
        let part = ConfGroupoid::new(base, 2, Some(1), 10_000).unwrap();
        let comma = comma_category(&full, &part, 2).unwrap();
        let mut expected = HashSet::new();
        for (i, f1) in comma.objects.iter().enumerate() {
            for (j, f2) in comma.objects.iter().enumerate() {
                for h in part.arrows_from(f1.target) {
                    if h.target != f2.target {
                        continue;
                    }
                    let lifted = full.arrow(h.source, &h.sigma, &h.gs).unwrap();
                    if full.compose(&lifted, f1).unwrap() == *f2 {
                        expected.insert((i as u32, j as u32, lifted));
                    }
                }
            }
        }
        let got: HashSet<_> = comma
            .morphisms
            .iter()
            .map(|(i, j, h)| (*i, *j, h.clone()))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn base_change_is_invariant_on_small_fixtures() {
        let base = FiniteGroup::trivial(3);
        let full = ConfGroupoid::new(base.clone(), 2, None, 10_000).unwrap();
        let part = ConfGroupoid::new(base, 2, Some(1), 10_000).unwrap();
        for x in 0..full.n_objects() as u32 {
            for b in full.arrows_from(x) {
                assert!(verify_comma_invariance(&full, &part, &b).unwrap());
            }
        }
        let mixed = z2_on_four();
        let full = ConfGroupoid::new(mixed.clone(), 2, None, 10_000).unwrap();
        let part = ConfGroupoid::new(mixed, 2, Some(1), 10_000).unwrap();
        for x in 0..full.n_objects() as u32 {
            for b in full.arrows_from(x) {
                assert!(verify_comma_invariance(&full, &part, &b).unwrap());
            }
        }
    }

    #[test]
    fn sweeps_pass_on_the_acceptance_bases() {
        let sweep = sweep_comma_categories(&FiniteGroup::trivial(3), 3, 1, 10_000).unwrap();
        assert!(sweep.pass());
        assert_eq!(sweep.expected_size, 3);
        assert_eq!(sweep.commas, 6);
        assert_eq!(sweep.arrows_checked, 6 * 6);
        let z2 = FiniteGroup::from_generators(6, &[vec![1, 0, 3, 2, 5, 4]]).unwrap();
        let sweep = sweep_comma_categories(&z2, 2, 1, 100_000).unwrap();
        assert!(sweep.pass());
        assert_eq!(sweep.expected_size, 2);
    }

    #[test]
    fn binomial_coefficients() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(4, 4), 1);
        assert_eq!(binomial(3, 5), 0);
    }
}
