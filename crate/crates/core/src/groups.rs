//! Finite permutation groups acting on simplicial complexes, wreath products
//! indexing the symmetries of configuration tuples, and the rank one
//! characters used to cut out isotypic pieces.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::simplicial::{sort_with_sign, SimplicialComplex};

/// Parity of a permutation given as an image vector: +1 or -1.
pub fn permutation_sign(p: &[u32]) -> i64 {
    let mut sign = 1i64;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// (a . b)(x) = a(b(x))
pub fn compose_perms(a: &[u32], b: &[u32]) -> Vec<u32> {
    b.iter().map(|&x| a[x as usize]).collect()
}

pub fn invert_perm(p: &[u32]) -> Vec<u32> {
    let mut inv = vec![0u32; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x as usize] = i as u32;
    }
    inv
}

fn validate_permutation(n_points: usize, p: &[u32]) -> Result<()> {
    if p.len() != n_points {
        return Err(Error::InvalidInput(format!(
            "permutation has length {}, expected {}",
            p.len(),
            n_points
        )));
    }
    let mut seen = vec![false; n_points];
    for &x in p {
        if x as usize >= n_points || seen[x as usize] {
            return Err(Error::InvalidInput(
                "generator is not a permutation of the vertex set".into(),
            ));
        }
        seen[x as usize] = true;
    }
    Ok(())
}

const GROUP_ORDER_CAP: usize = 100_000;

/// A finite permutation group on a fixed point set, closed under products.
/// Element 0 is the identity; elements are sorted lexicographically by image
/// vector so ids are deterministic.
#[derive(Clone, Debug)]
pub struct FiniteGroup {
    n_points: usize,
    elements: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u32>,
    inverses: Vec<u32>,
}

impl FiniteGroup {
    pub fn trivial(n_points: usize) -> Self {
        Self::from_generators(n_points, &[]).expect("trivial group")
    }

    pub fn from_generators(n_points: usize, gens: &[Vec<u32>]) -> Result<Self> {
        Self::from_generators_capped(n_points, gens, GROUP_ORDER_CAP)
    }

    pub fn from_generators_capped(
        n_points: usize,
        gens: &[Vec<u32>],
        cap: usize,
    ) -> Result<Self> {
        for g in gens {
            validate_permutation(n_points, g)?;
        }
        let identity: Vec<u32> = (0..n_points as u32).collect();
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        seen.insert(identity.clone());
        let mut queue: VecDeque<Vec<u32>> = VecDeque::new();
        queue.push_back(identity);
        while let Some(cur) = queue.pop_front() {
            for g in gens {
                let next = compose_perms(g, &cur);
                if !seen.contains(&next) {
                    if seen.len() >= cap {
                        return Err(Error::Capacity {
                            what: "group closure".into(),
                            needed: (seen.len() + 1) as u64,
                            limit: cap as u64,
                        });
                    }
                    seen.insert(next.clone());
                    queue.push_back(next);
                }
            }
        }
        let elements: Vec<Vec<u32>> = seen.into_iter().collect();
        let index: HashMap<Vec<u32>, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let inverses: Vec<u32> = elements.iter().map(|e| index[&invert_perm(e)]).collect();
        Ok(FiniteGroup {
            n_points,
            elements,
            index,
            inverses,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity_id(&self) -> u32 {
        0
    }

    pub fn element(&self, id: u32) -> &[u32] {
        &self.elements[id as usize]
    }

    pub fn id_of(&self, perm: &[u32]) -> Option<u32> {
        self.index.get(perm).copied()
    }

    pub fn compose_ids(&self, a: u32, b: u32) -> u32 {
        let p = compose_perms(self.element(a), self.element(b));
        self.index[&p]
    }

    pub fn inverse_id(&self, a: u32) -> u32 {
        self.inverses[a as usize]
    }

    pub fn apply(&self, g: u32, x: u32) -> u32 {
        self.elements[g as usize][x as usize]
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> {
        0..self.elements.len() as u32
    }

    /// For each point, the smallest point in its orbit.
    pub fn orbit_mins(&self) -> Vec<u32> {
        let mut mins: Vec<u32> = (0..self.n_points as u32).collect();
        for x in 0..self.n_points as u32 {
            let mut m = x;
            for g in self.ids() {
                m = m.min(self.apply(g, x));
            }
            mins[x as usize] = m;
        }
        mins
    }

    /// Orbits as sorted lists, ordered by their minimum.
    pub fn orbits(&self) -> Vec<Vec<u32>> {
        let mins = self.orbit_mins();
        let mut by_min: HashMap<u32, BTreeSet<u32>> = HashMap::new();
        for x in 0..self.n_points as u32 {
            by_min.entry(mins[x as usize]).or_default().insert(x);
        }
        let mut keys: Vec<u32> = by_min.keys().cloned().collect();
        keys.sort_unstable();
        keys.into_iter()
            .map(|k| by_min[&k].iter().cloned().collect())
            .collect()
    }

    pub fn stabilizer_ids(&self, x: u32) -> Vec<u32> {
        self.ids().filter(|&g| self.apply(g, x) == x).collect()
    }

    /// Some group element sending x to y, if any.
    pub fn transporter(&self, x: u32, y: u32) -> Option<u32> {
        self.ids().find(|&g| self.apply(g, x) == y)
    }
}

/// Image of a sorted simplex under a vertex permutation: the sorted image
/// and the orientation sign of the sorting.
pub fn simplex_image(perm: &[u32], s: &[u32]) -> Result<(Vec<u32>, i64)> {
    let mut img: Vec<u32> = s.iter().map(|&v| perm[v as usize]).collect();
    let sign = sort_with_sign(&mut img)?;
    Ok((img, sign))
}

/// Every generator must carry simplices to simplices; products then do too.
pub fn validate_action(complex: &SimplicialComplex, group: &FiniteGroup) -> Result<()> {
    if group.n_points() != complex.n_vertices() {
        return Err(Error::InvalidInput(format!(
            "group acts on {} points but the complex has {} vertices",
            group.n_points(),
            complex.n_vertices()
        )));
    }
    for g in group.ids() {
        let perm = group.element(g);
        for d in 0..=complex.dim().unwrap_or(0) {
            for s in complex.simplices(d) {
                let (img, _) = simplex_image(perm, s)?;
                if complex.index_of(d, &img).is_none() {
                    return Err(Error::InvalidInput(format!(
                        "group element does not preserve the complex: simplex {:?} maps outside",
                        s
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Regularity: any element mapping a simplex to itself fixes it pointwise.
pub fn check_regular(complex: &SimplicialComplex, group: &FiniteGroup) -> Result<()> {
    for g in group.ids().skip(1) {
        let perm = group.element(g);
        for d in 1..=complex.dim().unwrap_or(0) {
            for s in complex.simplices(d) {
                let (img, _) = simplex_image(perm, s)?;
                if img == s && s.iter().any(|&v| perm[v as usize] != v) {
                    return Err(Error::NonRegularAction(format!(
                        "element moves simplex {:?} onto itself without fixing it",
                        s
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Simplicial quotient by a group action.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub complex: SimplicialComplex,
    /// orbit id (= new vertex id) for each original vertex
    pub vertex_orbit: Vec<u32>,
}

/// Quotient complex of a regular action whose simplices embed into the
/// orbit space: vertices of one simplex lie in distinct orbits, and distinct
/// simplex orbits have distinct vertex orbit images. When these fail the
/// error advises subdividing.
pub fn quotient_complex(complex: &SimplicialComplex, group: &FiniteGroup) -> Result<Quotient> {
    validate_action(complex, group)?;
    check_regular(complex, group)?;
    let mins = group.orbit_mins();
    // renumber orbits by their minimal representative
    let mut orbit_no: HashMap<u32, u32> = HashMap::new();
    let mut sorted_mins: Vec<u32> = mins.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    sorted_mins.sort_unstable();
    for (i, m) in sorted_mins.iter().enumerate() {
        orbit_no.insert(*m, i as u32);
    }
    let vertex_orbit: Vec<u32> = mins.iter().map(|m| orbit_no[m]).collect();

    let dim = complex.dim().unwrap_or(0);
    let mut by_dim: Vec<Vec<u32>> = Vec::with_capacity(dim + 1);
    for d in 0..=dim {
        let mut images: BTreeSet<Vec<u32>> = BTreeSet::new();
        let mut image_count = 0usize;
        let mut orbit_reps: BTreeSet<Vec<u32>> = BTreeSet::new();
        for s in complex.simplices(d) {
            let mut img: Vec<u32> = s.iter().map(|&v| vertex_orbit[v as usize]).collect();
            img.sort_unstable();
            if img.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::NonRegularAction(format!(
                    "simplex {:?} has two vertices in one orbit",
                    s
                )));
            }
            // canonical representative of the simplex orbit: the lexicographic
            // minimum of the images under all group elements
            let mut canon: Option<Vec<u32>> = None;
            for g in group.ids() {
                let (gi, _) = simplex_image(group.element(g), s)?;
                canon = Some(match canon {
                    None => gi,
                    Some(c) => c.min(gi),
                });
            }
            if orbit_reps.insert(canon.unwrap()) {
                image_count += 1;
            }
            images.insert(img);
        }
        if images.len() != image_count {
            return Err(Error::NonRegularAction(format!(
                "distinct simplex orbits collide in the quotient in dimension {}",
                d
            )));
        }
        let mut flat = Vec::with_capacity(images.len() * (d + 1));
        for img in images {
            flat.extend_from_slice(&img);
        }
        by_dim.push(flat);
    }
    let q = SimplicialComplex::from_closed_strata(sorted_mins.len(), by_dim)?;
    Ok(Quotient {
        complex: q,
        vertex_orbit,
    })
}

// ---------------------------------------------------------------------------
// Wreath products
// ---------------------------------------------------------------------------

/// Element of G wr S_n: a coordinate permutation sigma together with one base
/// group element per coordinate, acting on tuples by
/// (gamma . T)_j = g_j . T_{sigma^{-1}(j)}.
pub type WreathElem = (Vec<u32>, Vec<u32>);

const WREATH_ORDER_CAP: u64 = 1_000_000;

#[derive(Clone, Debug)]
pub struct WreathGroup {
    pub base: FiniteGroup,
    pub n: usize,
    elements: Vec<WreathElem>,
    index: HashMap<WreathElem, u32>,
    inverses: Vec<u32>,
    sigma_signs: Vec<i64>,
}

impl WreathGroup {
    pub fn new(base: FiniteGroup, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("wreath product needs n >= 1".into()));
        }
        let mut order: u64 = 1;
        for k in 1..=n as u64 {
            order = order.saturating_mul(k).saturating_mul(base.order() as u64);
        }
        if order > WREATH_ORDER_CAP {
            return Err(Error::Capacity {
                what: format!("wreath product order with n = {}", n),
                needed: order,
                limit: WREATH_ORDER_CAP,
            });
        }
        // all permutations of n in lexicographic order
        let mut perms: Vec<Vec<u32>> = Vec::new();
        let mut cur: Vec<u32> = (0..n as u32).collect();
        loop {
            perms.push(cur.clone());
            // next permutation
            let mut i = n as isize - 2;
            while i >= 0 && cur[i as usize] >= cur[i as usize + 1] {
                i -= 1;
            }
            if i < 0 {
                break;
            }
            let i = i as usize;
            let mut j = n - 1;
            while cur[j] <= cur[i] {
                j -= 1;
            }
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        let g_order = base.order() as u32;
        let mut elements = Vec::with_capacity(order as usize);
        for sigma in &perms {
            let mut gs = vec![0u32; n];
            loop {
                elements.push((sigma.clone(), gs.clone()));
                // odometer over base ids
                let mut pos = n;
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    gs[pos] += 1;
                    if gs[pos] < g_order {
                        break;
                    }
                    gs[pos] = 0;
                }
                if gs.iter().all(|&g| g == 0) {
                    break;
                }
            }
        }
        elements.sort();
        let index: HashMap<WreathElem, u32> = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.clone(), i as u32))
            .collect();
        let mut inverses = Vec::with_capacity(elements.len());
        let mut sigma_signs = Vec::with_capacity(elements.len());
        for (sigma, gs) in &elements {
            let inv_sigma = invert_perm(sigma);
            let inv_gs: Vec<u32> = (0..n)
                .map(|j| base.inverse_id(gs[sigma[j] as usize]))
                .collect();
            inverses.push(index[&(inv_sigma, inv_gs)]);
            sigma_signs.push(permutation_sign(sigma));
        }
        Ok(WreathGroup {
            base,
            n,
            elements,
            index,
            inverses,
            sigma_signs,
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity_id(&self) -> u32 {
        debug_assert!(self.elements[0].0.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(self.elements[0].1.iter().all(|&g| g == 0));
        0
    }

    pub fn element(&self, id: u32) -> &WreathElem {
        &self.elements[id as usize]
    }

    pub fn id_of(&self, e: &WreathElem) -> Option<u32> {
        self.index.get(e).copied()
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> {
        0..self.elements.len() as u32
    }

    pub fn sigma_sign(&self, id: u32) -> i64 {
        self.sigma_signs[id as usize]
    }

    pub fn inverse_id(&self, id: u32) -> u32 {
        self.inverses[id as usize]
    }

    /// (sigma; g) (tau; h) = (sigma tau; j -> g_j h_{sigma^{-1}(j)})
    pub fn compose_ids(&self, a: u32, b: u32) -> u32 {
        let (sa, ga) = &self.elements[a as usize];
        let (sb, gb) = &self.elements[b as usize];
        let sigma = compose_perms(sa, sb);
        let sa_inv = invert_perm(sa);
        let gs: Vec<u32> = (0..self.n)
            .map(|j| self.base.compose_ids(ga[j], gb[sa_inv[j] as usize]))
            .collect();
        self.index[&(sigma, gs)]
    }
}

/// Rank one character of a wreath product: the coordinate permutation sign
/// raised to a fixed exponent times a product of base character values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WreathCharacter {
    pub sign_exponent: u32,
    /// one value, +1 or -1, per base group element id
    pub base_values: Vec<i8>,
}

impl WreathCharacter {
    pub fn trivial(base_order: usize) -> Self {
        WreathCharacter {
            sign_exponent: 0,
            base_values: vec![1; base_order],
        }
    }

    pub fn coordinate_sign(base_order: usize) -> Self {
        WreathCharacter {
            sign_exponent: 1,
            base_values: vec![1; base_order],
        }
    }

    pub fn from_parts(sign_exponent: u32, base_values: Vec<i8>) -> Self {
        WreathCharacter {
            sign_exponent: sign_exponent % 2,
            base_values,
        }
    }

    pub fn eval(&self, w: &WreathGroup, id: u32) -> i64 {
        let (_, gs) = w.element(id);
        let mut v = if self.sign_exponent % 2 == 1 {
            w.sigma_sign(id)
        } else {
            1
        };
        for &g in gs {
            v *= self.base_values[g as usize] as i64;
        }
        v
    }

    /// The base values must define a homomorphism G -> {1, -1}.
    pub fn check_base_multiplicative(&self, base: &FiniteGroup) -> Result<()> {
        if self.base_values.len() != base.order() {
            return Err(Error::BadCharacter(format!(
                "character has {} values for a group of order {}",
                self.base_values.len(),
                base.order()
            )));
        }
        if self.base_values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::BadCharacter("values must be +1 or -1".into()));
        }
        for a in base.ids() {
            for b in base.ids() {
                let ab = base.compose_ids(a, b);
                if self.base_values[ab as usize] as i64
                    != self.base_values[a as usize] as i64 * self.base_values[b as usize] as i64
                {
                    return Err(Error::BadCharacter(
                        "base values are not multiplicative".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Exhaustive multiplicativity over the whole wreath product.
    pub fn check_multiplicative(&self, w: &WreathGroup) -> Result<()> {
        for a in w.ids() {
            for b in w.ids() {
                let ab = w.compose_ids(a, b);
                if self.eval(w, ab) != self.eval(w, a) * self.eval(w, b) {
                    return Err(Error::BadCharacter(format!(
                        "character fails on the product of elements {} and {}",
                        a, b
                    )));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perm_basics() {
        assert_eq!(permutation_sign(&[0, 1, 2]), 1);
        assert_eq!(permutation_sign(&[1, 0, 2]), -1);
        assert_eq!(permutation_sign(&[1, 2, 0]), 1);
        let a = vec![1u32, 2, 0];
        let b = invert_perm(&a);
        assert_eq!(compose_perms(&a, &b), vec![0, 1, 2]);
    }

    #[test]
    fn cyclic_group_closure() {
        let g = FiniteGroup::from_generators(3, &[vec![1, 2, 0]]).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.identity_id(), 0);
        assert_eq!(g.element(0), &[0, 1, 2]);
        for id in g.ids() {
            assert_eq!(g.compose_ids(id, g.inverse_id(id)), 0);
        }
        assert_eq!(g.orbits(), vec![vec![0, 1, 2]]);
    }

    #[test]
    fn symmetric_group_from_transpositions() {
        let g = FiniteGroup::from_generators(3, &[vec![1, 0, 2], vec![0, 2, 1]]).unwrap();
        assert_eq!(g.order(), 6);
        assert_eq!(g.stabilizer_ids(2).len(), 2);
    }

    #[test]
    fn closure_respects_cap() {
        let err = FiniteGroup::from_generators_capped(3, &[vec![1, 0, 2], vec![0, 2, 1]], 4)
            .unwrap_err();
        matches!(err, Error::Capacity { .. });
    }

    #[test]
    fn bad_generator_rejected() {
        assert!(FiniteGroup::from_generators(3, &[vec![0, 0, 1]]).is_err());
        assert!(FiniteGroup::from_generators(3, &[vec![0, 1]]).is_err());
    }

    fn octahedron() -> SimplicialComplex {
        // vertices 0..6 as +x,+y,+z,-x,-y,-z
        let facets = vec![
            vec![0, 1, 2],
            vec![0, 1, 5],
            vec![0, 4, 2],
            vec![0, 4, 5],
            vec![3, 1, 2],
            vec![3, 1, 5],
            vec![3, 4, 2],
            vec![3, 4, 5],
        ];
        SimplicialComplex::from_facets(6, &facets).unwrap()
    }

    #[test]
    fn edge_swap_is_not_regular_until_subdivided() {
        let edge = SimplicialComplex::from_facets(2, &[vec![0, 1]]).unwrap();
        let swap = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        validate_action(&edge, &swap).unwrap();
        assert!(matches!(
            check_regular(&edge, &swap),
            Err(Error::NonRegularAction(_))
        ));
        let sd = edge.barycentric_subdivision();
        let lifted = sd.lift_vertex_map(&edge, &[1, 0]).unwrap();
        let swap2 = FiniteGroup::from_generators(sd.complex.n_vertices(), &[lifted]).unwrap();
        check_regular(&sd.complex, &swap2).unwrap();
        let q = quotient_complex(&sd.complex, &swap2).unwrap();
        assert_eq!(q.complex.f_vector(), vec![2, 1]);
        assert_eq!(q.complex.betti(), vec![1, 0]);
    }

    #[test]
    fn antipodal_quotient_needs_subdivision_and_gives_projective_plane() {
        let oct = octahedron();
        let antipodal = vec![3u32, 4, 5, 0, 1, 2];
        let g = FiniteGroup::from_generators(6, &[antipodal.clone()]).unwrap();
        validate_action(&oct, &g).unwrap();
        // regular (no simplex is setwise fixed) but the quotient collapses
        // distinct edge orbits onto the same vertex orbit pair
        check_regular(&oct, &g).unwrap();
        assert!(quotient_complex(&oct, &g).is_err());

        let sd = oct.barycentric_subdivision();
        let lifted = sd.lift_vertex_map(&oct, &antipodal).unwrap();
        let g2 = FiniteGroup::from_generators(sd.complex.n_vertices(), &[lifted]).unwrap();
        let q = quotient_complex(&sd.complex, &g2).unwrap();
        assert_eq!(q.complex.f_vector(), vec![13, 36, 24]);
        assert_eq!(q.complex.euler_characteristic(), 1);
        let ih = q.complex.integral_homology();
        assert_eq!(ih[0].betti, 1);
        assert_eq!(ih[1].betti, 0);
        assert_eq!(ih[1].torsion, vec![num_bigint::BigInt::from(2)]);
        assert_eq!(ih[2].betti, 0);
    }

    #[test]
    fn wreath_order_and_inverses() {
        let z2 = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        let w = WreathGroup::new(z2, 2).unwrap();
        assert_eq!(w.order(), 8);
        assert_eq!(w.identity_id(), 0);
        for id in w.ids() {
            assert_eq!(w.compose_ids(id, w.inverse_id(id)), w.identity_id());
            assert_eq!(w.compose_ids(w.inverse_id(id), id), w.identity_id());
        }
    }

    #[test]
    fn wreath_composition_is_associative() {
        let z3 = FiniteGroup::from_generators(3, &[vec![1, 2, 0]]).unwrap();
        let w = WreathGroup::new(z3, 2).unwrap();
        for a in w.ids() {
            for b in w.ids() {
                for c in [0u32, 5, w.order() as u32 - 1] {
                    let left = w.compose_ids(w.compose_ids(a, b), c);
                    let right = w.compose_ids(a, w.compose_ids(b, c));
                    assert_eq!(left, right);
                }
            }
        }
    }

    #[test]
    fn wreath_characters_are_multiplicative() {
        let z2 = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        let w = WreathGroup::new(z2.clone(), 3).unwrap();
        assert_eq!(w.order(), 48);
        let triv = WreathCharacter::trivial(2);
        triv.check_base_multiplicative(&z2).unwrap();
        triv.check_multiplicative(&w).unwrap();
        let sign = WreathCharacter::coordinate_sign(2);
        sign.check_multiplicative(&w).unwrap();
        // base character: the nontrivial character of Z/2
        let or = WreathCharacter::from_parts(1, vec![1, -1]);
        or.check_base_multiplicative(&z2).unwrap();
        or.check_multiplicative(&w).unwrap();
        // a non-multiplicative assignment is rejected
        let z3 = FiniteGroup::from_generators(3, &[vec![1, 2, 0]]).unwrap();
        let bad = WreathCharacter::from_parts(0, vec![1, -1, 1]);
        assert!(bad.check_base_multiplicative(&z3).is_err());
    }

    #[test]
    fn wreath_needs_positive_n() {
        let z2 = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        assert!(WreathGroup::new(z2.clone(), 0).is_err());
        let w1 = WreathGroup::new(z2, 1).unwrap();
        assert_eq!(w1.order(), 2);
    }
}
