//! Character-projected chain complexes of simplicial group actions.
//!
//! The group is handed over as an explicit closed list of vertex permutations
//! together with a +-1 character value per element. Degree by degree we pick
//! the least simplex of every orbit, record how the rest of the orbit is
//! transported onto it, and keep the orbits whose stabilizers act with the
//! character's sign. The boundary of the resulting weighted orbit sums is
//! expressed in the same basis, which is exactly the image of the projector
//! (1/|G|) sum chi(g) g on chains.

use std::collections::HashMap;

use crate::chain::{ChainComplex, IntMatrix};
use crate::error::{Error, Result};
use crate::simplicial::{sort_with_sign, SimplicialComplex};

/// A validated simplicial action: every permutation maps simplices to
/// simplices and the list is closed under composition, with `perms[0]` the
/// identity.
pub struct SimplicialAction<'a> {
    pub complex: &'a SimplicialComplex,
    perms: Vec<Vec<u32>>,
}

/// The chain complex of chains transforming by a character, with the orbit
/// representatives that index each degree's basis.
pub struct EquivariantChainComplex {
    /// per degree, the simplex index of each contributing orbit representative
    pub reps: Vec<Vec<u32>>,
    pub complex: ChainComplex,
}

struct OrbitData {
    /// per simplex: least simplex index of its orbit
    rep: Vec<u32>,
    /// per simplex: id of a permutation carrying the representative onto it
    tperm: Vec<u32>,
    /// per simplex: orientation sign of that carry
    tsign: Vec<i8>,
    /// per representative index: whether the stabilizer matches the character
    contributes: Vec<bool>,
    /// per simplex: basis column of its representative, or u32::MAX
    col: Vec<u32>,
    basis: Vec<u32>,
}

impl<'a> SimplicialAction<'a> {
    pub fn new(complex: &'a SimplicialComplex, perms: Vec<Vec<u32>>) -> Result<Self> {
        if perms.is_empty() {
            return Err(Error::InvalidInput("action needs at least the identity".into()));
        }
        let nv = complex.n_vertices();
        for (i, p) in perms.iter().enumerate() {
            if p.len() != nv {
                return Err(Error::InvalidInput(format!(
                    "permutation {} acts on {} vertices, complex has {}",
                    i,
                    p.len(),
                    nv
                )));
            }
            let mut seen = vec![false; nv];
            for &v in p {
                if v as usize >= nv || seen[v as usize] {
                    return Err(Error::InvalidInput(format!("element {} is not a permutation", i)));
                }
                seen[v as usize] = true;
            }
        }
        if !perms[0].iter().enumerate().all(|(v, &w)| v as u32 == w) {
            return Err(Error::InvalidInput("perms[0] must be the identity".into()));
        }
        // closure under composition
        let index: HashMap<&[u32], usize> =
            perms.iter().enumerate().map(|(i, p)| (p.as_slice(), i)).collect();
        if index.len() != perms.len() {
            return Err(Error::InvalidInput("duplicate group elements".into()));
        }
        let mut scratch = vec![0u32; nv];
        for p in &perms {
            for q in &perms {
                for v in 0..nv {
                    scratch[v] = p[q[v] as usize];
                }
                if !index.contains_key(scratch.as_slice()) {
                    return Err(Error::InvalidInput(
                        "permutation list is not closed under composition".into(),
                    ));
                }
            }
        }
        // every permutation must send simplices to simplices
        let action = SimplicialAction { complex, perms };
        let mut verts = Vec::new();
        for d in 0..=complex.dim().unwrap_or(0) {
            for s in 0..complex.count(d) {
                for p in &action.perms {
                    verts.clear();
                    verts.extend(action.complex.simplex(d, s).iter().map(|&v| p[v as usize]));
                    verts.sort_unstable();
                    if action.complex.index_of(d, &verts).is_none() {
                        return Err(Error::InvalidInput(
                            "a group element does not preserve the complex".into(),
                        ));
                    }
                }
            }
        }
        Ok(action)
    }

    pub fn order(&self) -> usize {
        self.perms.len()
    }

    fn check_character(&self, chi: &[i64]) -> Result<()> {
        if chi.len() != self.perms.len() {
            return Err(Error::BadCharacter(format!(
                "character has {} values for a group of order {}",
                chi.len(),
                self.perms.len()
            )));
        }
        if chi[0] != 1 || chi.iter().any(|&c| c != 1 && c != -1) {
            return Err(Error::BadCharacter("character values must be +-1 with chi(e) = 1".into()));
        }
        Ok(())
    }

    fn image_of(&self, d: usize, s: usize, perm: &[u32]) -> (u32, i8) {
        let mut verts: Vec<u32> = self
            .complex
            .simplex(d, s)
            .iter()
            .map(|&v| perm[v as usize])
            .collect();
        let sign = sort_with_sign(&mut verts).expect("group elements are injective on simplices");
        let idx = self.complex.index_of(d, &verts).expect("action was validated") as u32;
        (idx, sign as i8)
    }

    /// Orbit representatives, transports and stabilizer filtering in one
    /// degree. `drop` marks simplices excluded from the basis (the subcomplex
    /// of a relative pair); dropped simplices still get transport data so
    /// boundary terms through them can be discarded by the caller.
    fn orbit_data(&self, d: usize, chi: &[i64], dropped: Option<&[bool]>) -> OrbitData {
        let count = self.complex.count(d);
        let mut rep = vec![u32::MAX; count];
        let mut tperm = vec![0u32; count];
        let mut tsign = vec![1i8; count];
        let mut contributes = vec![false; count];
        for s in 0..count {
            if rep[s] != u32::MAX {
                continue;
            }
            // ascending scan: s is the least index of a fresh orbit
            let mut ok = true;
            for (gid, p) in self.perms.iter().enumerate() {
                let (img, sign) = self.image_of(d, s, p);
                if img as usize == s && chi[gid] * sign as i64 != 1 {
                    ok = false;
                }
                if rep[img as usize] == u32::MAX {
                    rep[img as usize] = s as u32;
                    tperm[img as usize] = gid as u32;
                    tsign[img as usize] = sign;
                }
            }
            contributes[s] = ok;
        }
        let mut col = vec![u32::MAX; count];
        let mut basis = Vec::new();
        for s in 0..count {
            if rep[s] as usize == s && contributes[s] && !dropped.map_or(false, |in_sub| in_sub[s])
            {
                col[s] = basis.len() as u32;
                basis.push(s as u32);
            }
        }
        OrbitData { rep, tperm, tsign, contributes, col, basis }
    }

    /// Chain complex of the chi-isotypic chains.
    pub fn isotypic_complex(&self, chi: &[i64]) -> Result<EquivariantChainComplex> {
        self.assemble(chi, None)
    }

    /// Chain complex of the chi-isotypic chains of the pair (X, A), where the
    /// subcomplex A is given by a membership predicate on (degree, vertices).
    /// A must be face closed and invariant; both are verified.
    pub fn relative_isotypic_complex<F>(
        &self,
        chi: &[i64],
        mut in_sub: F,
    ) -> Result<EquivariantChainComplex>
    where
        F: FnMut(usize, &[u32]) -> bool,
    {
        let top = self.complex.dim().map_or(0, |d| d);
        let mut membership: Vec<Vec<bool>> = Vec::with_capacity(top + 1);
        for d in 0..=top {
            membership.push(
                (0..self.complex.count(d))
                    .map(|s| in_sub(d, self.complex.simplex(d, s)))
                    .collect(),
            );
        }
        let mut verts = Vec::new();
        for d in 0..=top {
            for s in 0..self.complex.count(d) {
                if !membership[d][s] {
                    continue;
                }
                let sv = self.complex.simplex(d, s);
                if d > 0 {
                    for dr in 0..=d {
                        verts.clear();
                        verts.extend(sv.iter().enumerate().filter(|(j, _)| *j != dr).map(|(_, &v)| v));
                        let f = self.complex.index_of(d - 1, &verts).expect("face closed complex");
                        if !membership[d - 1][f] {
                            return Err(Error::InvalidInput(
                                "relative subcomplex is not face closed".into(),
                            ));
                        }
                    }
                }
                for p in &self.perms[1..] {
                    verts.clear();
                    verts.extend(sv.iter().map(|&v| p[v as usize]));
                    verts.sort_unstable();
                    let img = self.complex.index_of(d, &verts).expect("action was validated");
                    if !membership[d][img] {
                        return Err(Error::InvalidInput(
                            "relative subcomplex is not group invariant".into(),
                        ));
                    }
                }
            }
        }
        self.assemble(chi, Some(&membership))
    }

    fn assemble(&self, chi: &[i64], sub: Option<&Vec<Vec<bool>>>) -> Result<EquivariantChainComplex> {
        self.check_character(chi)?;
        let top = match self.complex.dim() {
            Some(d) => d,
            None => {
                return Ok(EquivariantChainComplex {
                    reps: vec![Vec::new()],
                    complex: ChainComplex::new(vec![0], vec![])?,
                })
            }
        };
        let mut dims = Vec::with_capacity(top + 1);
        let mut reps = Vec::with_capacity(top + 1);
        let mut boundaries = Vec::with_capacity(top);
        let mut prev: Option<OrbitData> = None;
        let mut verts = Vec::new();
        for d in 0..=top {
            let od = self.orbit_data(d, chi, sub.map(|m| m[d].as_slice()));
            dims.push(od.basis.len());
            if d > 0 {
                let below = prev.as_ref().unwrap();
                let mut m = IntMatrix::new(below.basis.len(), od.basis.len());
                for (c, &s) in od.basis.iter().enumerate() {
                    let sv = self.complex.simplex(d, s as usize);
                    for dr in 0..=d {
                        verts.clear();
                        verts.extend(sv.iter().enumerate().filter(|(j, _)| *j != dr).map(|(_, &v)| v));
                        let f = self.complex.index_of(d - 1, &verts).expect("face closed complex");
                        let r = below.rep[f] as usize;
                        if !below.contributes[r] || below.col[r] == u32::MAX {
                            continue;
                        }
                        let drop_sign = if dr % 2 == 0 { 1 } else { -1 };
                        let coeff =
                            drop_sign * below.tsign[f] as i64 * chi[below.tperm[f] as usize];
                        m.push(below.col[r] as usize, c, coeff);
                    }
                }
                boundaries.push(m);
            }
            reps.push(od.basis.clone());
            prev = Some(od);
        }
        Ok(EquivariantChainComplex {
            reps,
            complex: ChainComplex::new(dims, boundaries)?,
        })
    }

    /// Quotient complex: one simplex per orbit, on the orbit classes of
    /// vertices. Demands a regular action and refuses identifications that
    /// would glue distinct orbits onto one vertex set; both failure modes are
    /// cured by barycentric subdivision.
    pub fn quotient_complex(&self) -> Result<SimplicialComplex> {
        let nv = self.complex.n_vertices();
        let mut vclass = vec![u32::MAX; nv];
        let mut n_classes = 0u32;
        for v in 0..nv {
            if vclass[v] != u32::MAX {
                continue;
            }
            for p in &self.perms {
                let w = p[v] as usize;
                if vclass[w] == u32::MAX {
                    vclass[w] = n_classes;
                }
            }
            n_classes += 1;
        }
        let top = match self.complex.dim() {
            Some(d) => d,
            None => return SimplicialComplex::from_facets(0, &[]),
        };
        let mut images: Vec<Vec<u32>> = Vec::new();
        let mut seen: HashMap<Vec<u32>, (usize, usize)> = HashMap::new();
        let mut verts = Vec::new();
        for d in 0..=top {
            for s in 0..self.complex.count(d) {
                let sv = self.complex.simplex(d, s);
                // regularity: a setwise fixed simplex must be pointwise fixed
                for p in &self.perms[1..] {
                    verts.clear();
                    verts.extend(sv.iter().map(|&v| p[v as usize]));
                    verts.sort_unstable();
                    if verts == sv && sv.iter().any(|&v| p[v as usize] != v) {
                        return Err(Error::NonRegularAction(
                            "a simplex is fixed setwise but not pointwise; subdivide first".into(),
                        ));
                    }
                }
                let mut q: Vec<u32> = sv.iter().map(|&v| vclass[v as usize]).collect();
                q.sort_unstable();
                q.dedup();
                if q.len() != sv.len() {
                    return Err(Error::NonRegularAction(
                        "a simplex meets one vertex orbit twice; subdivide first".into(),
                    ));
                }
                let rep = self.orbit_leader(d, s);
                match seen.get(&q) {
                    Some(&(rd, rs)) if (rd, rs) != (d, rep) => {
                        return Err(Error::NonRegularAction(
                            "two simplex orbits share a vertex set in the quotient; subdivide first"
                                .into(),
                        ));
                    }
                    Some(_) => {}
                    None => {
                        seen.insert(q.clone(), (d, rep));
                        images.push(q);
                    }
                }
            }
        }
        SimplicialComplex::from_facets(n_classes as usize, &images)
    }

    fn orbit_leader(&self, d: usize, s: usize) -> usize {
        let mut best = s;
        for p in &self.perms[1..] {
            let (img, _) = self.image_of(d, s, p);
            best = best.min(img as usize);
        }
        best
    }
}

/// Dimensions of the relative chi-isotypic cohomology of a pair; over the
/// rationals these agree degree by degree with the relative homology of the
/// projected complex.
pub fn relative_isotypic_cohomology<F>(
    action: &SimplicialAction,
    chi: &[i64],
    in_sub: F,
) -> Result<Vec<usize>>
where
    F: FnMut(usize, &[u32]) -> bool,
{
    Ok(action.relative_isotypic_complex(chi, in_sub)?.complex.betti())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::FiniteGroup;
    use crate::orbifold::fixtures::octahedron_complex;

    fn group_perms(g: &FiniteGroup) -> Vec<Vec<u32>> {
        g.ids().map(|id| g.element(id).to_vec()).collect()
    }

    #[test]
    fn trivial_group_recovers_the_full_complex() {
        let oct = octahedron_complex();
        let action = SimplicialAction::new(&oct, vec![(0..6).collect()]).unwrap();
        let iso = action.isotypic_complex(&[1]).unwrap();
        assert_eq!(iso.complex.dims(), &[6, 12, 8]);
        assert_eq!(iso.complex.betti(), oct.betti());
    }

    #[test]
    fn antipodal_isotypic_pieces() {
        // the antipodal action is free, so the trivial piece computes the
        // projective plane and the two pieces exhaust the sphere homology
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let action = SimplicialAction::new(&oct, group_perms(&g)).unwrap();
        let triv = action.isotypic_complex(&[1, 1]).unwrap();
        assert_eq!(triv.complex.betti(), vec![1, 0, 0]);
        let sign = action.isotypic_complex(&[1, -1]).unwrap();
        let total = oct.betti();
        let t = triv.complex.betti();
        let s = sign.complex.betti();
        for k in 0..total.len() {
            assert_eq!(t[k] + s[k], total[k], "degree {}", k);
        }
    }

    #[test]
    fn sign_character_on_a_swapped_pair_of_points() {
        let two = SimplicialComplex::from_facets(2, &[vec![0], vec![1]]).unwrap();
        let g = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        let action = SimplicialAction::new(&two, group_perms(&g)).unwrap();
        let sign = action.isotypic_complex(&[1, -1]).unwrap();
        // the difference of the two vertices spans the degree-0 space
        assert_eq!(sign.complex.dims(), &[1]);
        assert_eq!(sign.complex.betti(), vec![1]);
    }

    #[test]
    fn relative_pair_interval_mod_endpoints() {
        let edge = SimplicialComplex::from_facets(2, &[vec![0, 1]]).unwrap();
        let action = SimplicialAction::new(&edge, vec![vec![0, 1]]).unwrap();
        let betti = relative_isotypic_cohomology(&action, &[1], |d, _| d == 0).unwrap();
        assert_eq!(betti, vec![0, 1]);
    }

    #[test]
    fn relative_pair_sphere_mod_facet() {
        let s2 = SimplicialComplex::from_facets(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        let action = SimplicialAction::new(&s2, vec![vec![0, 1, 2, 3]]).unwrap();
        let betti =
            relative_isotypic_cohomology(&action, &[1], |_, verts| verts.iter().all(|&v| v <= 2))
                .unwrap();
        assert_eq!(betti, vec![0, 0, 1]);
    }

    #[test]
    fn relative_sub_must_be_invariant_and_closed() {
        let edge = SimplicialComplex::from_facets(2, &[vec![0, 1]]).unwrap();
        let g = FiniteGroup::from_generators(2, &[vec![1, 0]]).unwrap();
        let action = SimplicialAction::new(&edge, group_perms(&g)).unwrap();
        // only one endpoint: not invariant under the swap
        let res = action.relative_isotypic_complex(&[1, 1], |d, v| d == 0 && v[0] == 0);
        assert!(res.is_err());
        // the edge without its endpoints: not face closed
        let res = action.relative_isotypic_complex(&[1, 1], |d, _| d == 1);
        assert!(res.is_err());
    }

    #[test]
    fn quotient_of_the_subdivided_antipodal_sphere_is_a_projective_plane() {
        let oct = octahedron_complex();
        let sd = oct.barycentric_subdivision();
        let lifted = sd.lift_vertex_map(&oct, &[3, 4, 5, 0, 1, 2]).unwrap();
        let g = FiniteGroup::from_generators(sd.complex.n_vertices(), &[lifted]).unwrap();
        let action = SimplicialAction::new(&sd.complex, group_perms(&g)).unwrap();
        let q = action.quotient_complex().unwrap();
        assert_eq!(q.n_vertices(), 13);
        let ih = q.integral_homology();
        assert_eq!(ih[0].betti, 1);
        assert_eq!(ih[1].betti, 0);
        assert_eq!(ih[1].torsion, vec![num_bigint::BigInt::from(2)]);
        assert_eq!(ih[2].betti, 0);
        // free and regular: quotient Betti equals trivial-isotypic Betti
        let triv = action.isotypic_complex(&[1, 1]).unwrap();
        assert_eq!(q.betti(), triv.complex.betti());
    }

    #[test]
    fn quotient_rejects_gluing_before_subdivision() {
        // antipodal action on the raw octahedron: free and regular, but two
        // distinct facet orbits would land on the same vertex classes
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let action = SimplicialAction::new(&oct, group_perms(&g)).unwrap();
        assert!(matches!(action.quotient_complex(), Err(Error::NonRegularAction(_))));
    }

    #[test]
    fn quotient_of_swapped_disjoint_triangles() {
        let two = SimplicialComplex::from_facets(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let action = SimplicialAction::new(&two, group_perms(&g)).unwrap();
        let q = action.quotient_complex().unwrap();
        assert_eq!(q.f_vector(), vec![3, 3, 1]);
    }

    #[test]
    fn projector_is_idempotent_and_commutes_with_the_boundary() {
        // unnormalized projector P = sum chi(g) g on chains satisfies
        // P P = |G| P and P d = d P; checked as dense integer matrices
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let perms = group_perms(&g);
        let action = SimplicialAction::new(&oct, perms.clone()).unwrap();
        for chi in [[1i64, 1], [1, -1]] {
            let mut proj: Vec<Vec<Vec<i64>>> = Vec::new();
            for d in 0..=2 {
                let n = oct.count(d);
                let mut p = vec![vec![0i64; n]; n];
                for (gid, perm) in perms.iter().enumerate() {
                    for s in 0..n {
                        let (img, sign) = action.image_of(d, s, perm);
                        p[img as usize][s] += chi[gid] * sign as i64;
                    }
                }
                proj.push(p);
            }
            let order = perms.len() as i64;
            for d in 0..=2 {
                let p = &proj[d];
                let n = p.len();
                for i in 0..n {
                    for j in 0..n {
                        let mut pp = 0;
                        for k in 0..n {
                            pp += p[i][k] * p[k][j];
                        }
                        assert_eq!(pp, order * p[i][j]);
                    }
                }
            }
            // commutation with the simplicial boundary
            for d in 1..=2 {
                let bd = oct.boundary_matrix(d);
                let rows = oct.count(d - 1);
                let cols = oct.count(d);
                let mut dense = vec![vec![0i64; cols]; rows];
                for (j, col) in bd.columns().iter().enumerate() {
                    for &(i, ref val) in col.iter() {
                        use num_traits::ToPrimitive;
                        dense[i as usize][j] = val.to_integer().to_i64().unwrap();
                    }
                }
                for i in 0..rows {
                    for j in 0..cols {
                        let mut pd = 0;
                        let mut dp = 0;
                        for k in 0..cols {
                            pd += dense[i][k] * proj[d][k][j];
                        }
                        for k in 0..rows {
                            dp += proj[d - 1][i][k] * dense[k][j];
                        }
                        assert_eq!(pd, dp, "degree {} entry ({}, {})", d, i, j);
                    }
                }
            }
        }
    }
}
