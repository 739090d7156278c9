//! Global quotient models X = M/G: a finite simplicial complex together with
//! a simplicial action, subdivided until the action is regular. Keeps the
//! data one level down so the singular locus can be read off barycenters.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::groups::{check_regular, validate_action, FiniteGroup};
use crate::linalg::SparseVec;
use crate::simplicial::SimplicialComplex;

use num_rational::BigRational;
use num_traits::{One, Signed};

/// User-supplied stabilisation data: a G-invariant full subcomplex of the
/// model playing the role of a smaller nested copy of the space, plus a base
/// vertex whose orbit stays clear of it and whose stabilizer is trivial.
/// New configuration points are inserted along the orbit of the base vertex.
#[derive(Clone, Debug)]
pub struct StabilisationSpec {
    pub nested_copy_vertices: Vec<u32>,
    pub base_cell: u32,
}

#[derive(Clone, Debug)]
pub struct GlobalQuotientOrbifold {
    pub input: SimplicialComplex,
    /// model = iterated barycentric subdivision of the input
    pub model: SimplicialComplex,
    /// group acting on the model's vertices
    pub group: FiniteGroup,
    pub subdiv_level: usize,
    /// the model one subdivision earlier, when subdiv_level >= 1
    prev_model: Option<SimplicialComplex>,
    prev_group: Option<FiniteGroup>,
    /// model vertex -> simplex of prev_model it subdivides
    last_table: Option<Vec<Vec<u32>>>,
    pub boundary_vertices: BTreeSet<u32>,
    pub stab: Option<StabilisationSpec>,
}

const MAX_AUTO_SUBDIV: usize = 4;

impl GlobalQuotientOrbifold {
    pub fn new(
        input: SimplicialComplex,
        group: FiniteGroup,
        requested_subdiv: usize,
        boundary_vertices: Vec<u32>,
        stab: Option<StabilisationSpec>,
    ) -> Result<Self> {
        validate_action(&input, &group)?;
        for &v in &boundary_vertices {
            if v as usize >= input.n_vertices() {
                return Err(Error::InvalidInput(format!(
                    "boundary vertex {} out of range",
                    v
                )));
            }
        }

        let mut level = 0usize;
        let mut model = input.clone();
        let mut acting = group.clone();
        let mut prev_model = None;
        let mut prev_group = None;
        let mut last_table = None;
        loop {
            let regular = check_regular(&model, &acting).is_ok();
            if level >= requested_subdiv && regular {
                break;
            }
            if level >= requested_subdiv + MAX_AUTO_SUBDIV {
                return Err(Error::NonRegularAction(format!(
                    "action still not regular after {} subdivisions",
                    level
                )));
            }
            let sd = model.barycentric_subdivision();
            let mut lifted_gens = Vec::with_capacity(acting.order());
            for g in acting.ids().skip(1) {
                lifted_gens.push(sd.lift_vertex_map(&model, acting.element(g))?);
            }
            let lifted = FiniteGroup::from_generators(sd.complex.n_vertices(), &lifted_gens)?;
            if lifted.order() != acting.order() {
                return Err(Error::InvalidInput(
                    "lifted action changed the group order".into(),
                ));
            }
            prev_model = Some(std::mem::replace(&mut model, sd.complex));
            prev_group = Some(std::mem::replace(&mut acting, lifted));
            last_table = Some(sd.vertex_simplices);
            level += 1;
        }

        let orbifold = GlobalQuotientOrbifold {
            input,
            model,
            group: acting,
            subdiv_level: level,
            prev_model,
            prev_group,
            last_table,
            boundary_vertices: boundary_vertices.into_iter().collect(),
            stab,
        };
        orbifold.validate_stab()?;
        Ok(orbifold)
    }

    fn validate_stab(&self) -> Result<()> {
        let stab = match &self.stab {
            Some(s) => s,
            None => return Ok(()),
        };
        let nv = self.model.n_vertices();
        if stab.base_cell as usize >= nv {
            return Err(Error::InvalidInput("stabilisation base vertex out of range".into()));
        }
        let nested: BTreeSet<u32> = stab.nested_copy_vertices.iter().cloned().collect();
        if nested.is_empty() {
            return Err(Error::InvalidInput("nested copy must have vertices".into()));
        }
        for &v in &nested {
            if v as usize >= nv {
                return Err(Error::InvalidInput(format!(
                    "nested copy vertex {} out of range",
                    v
                )));
            }
        }
        // the nested copy must be G-invariant as a vertex set
        for g in self.group.ids() {
            for &v in &nested {
                if !nested.contains(&self.group.apply(g, v)) {
                    return Err(Error::InvalidInput(
                        "nested copy vertex set is not group invariant".into(),
                    ));
                }
            }
        }
        // the base vertex orbit must avoid the nested copy
        for g in self.group.ids() {
            if nested.contains(&self.group.apply(g, stab.base_cell)) {
                return Err(Error::InvalidInput(
                    "base vertex orbit meets the nested copy".into(),
                ));
            }
        }
        // insertion happens at a point with no isotropy, so the base vertex
        // must have a trivial stabilizer
        for g in self.group.ids() {
            if g != self.group.identity_id() && self.group.apply(g, stab.base_cell) == stab.base_cell
            {
                return Err(Error::InvalidInput(
                    "stabilisation base vertex has nontrivial stabilizer".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.model.dim().unwrap_or(0)
    }

    /// Closed iff every codimension one simplex lies in exactly two top
    /// simplices (and the complex is pure enough for that to make sense).
    pub fn is_closed(&self) -> bool {
        let d = match self.model.dim() {
            Some(d) if d >= 1 => d,
            _ => return false,
        };
        let mut face_count = vec![0u32; self.model.count(d - 1)];
        for s in self.model.simplices(d) {
            for drop in 0..=d {
                let face: Vec<u32> = s
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != drop)
                    .map(|(_, &v)| v)
                    .collect();
                let idx = self.model.index_of(d - 1, &face).expect("closed family");
                face_count[idx] += 1;
            }
        }
        face_count.iter().all(|&c| c == 2)
    }

    /// Vertices of the model that subdivide a cell fixed pointwise by some
    /// nontrivial element (one level down), or, at level zero, vertices fixed
    /// by some nontrivial element. Returned in model coordinates, sorted.
    pub fn singular_vertices(&self) -> Vec<u32> {
        let mut out: BTreeSet<u32> = BTreeSet::new();
        match (&self.prev_model, &self.prev_group, &self.last_table) {
            (Some(_prev), Some(pg), Some(table)) => {
                for (v, cell) in table.iter().enumerate() {
                    let fixed_by_some = pg.ids().skip(1).any(|g| {
                        let perm = pg.element(g);
                        cell.iter().all(|&x| perm[x as usize] == x)
                    });
                    if fixed_by_some {
                        out.insert(v as u32);
                    }
                }
            }
            _ => {
                for v in 0..self.model.n_vertices() as u32 {
                    if self
                        .group
                        .ids()
                        .skip(1)
                        .any(|g| self.group.apply(g, v) == v)
                    {
                        out.insert(v);
                    }
                }
            }
        }
        out.into_iter().collect()
    }

    /// The singular locus as a full subcomplex of the model, with the old
    /// vertex ids alongside.
    pub fn singular_locus(&self) -> (SimplicialComplex, Vec<u32>) {
        let verts: BTreeSet<u32> = self.singular_vertices().into_iter().collect();
        self.model.full_subcomplex(&verts)
    }

    /// Every point identified with v by the action, other than v itself.
    pub fn ghost_orbit(&self, v: u32) -> Vec<u32> {
        let mut out: BTreeSet<u32> = self
            .group
            .ids()
            .map(|g| self.group.apply(g, v))
            .collect();
        out.remove(&v);
        out.into_iter().collect()
    }

    /// Restriction to an invariant vertex set: the full subcomplex of the
    /// model on `keep`, acted on by the image of the group. Returns the
    /// restricted quotient together with the model vertex behind each new
    /// vertex id. Boundary and stabilisation data do not restrict; the result
    /// carries neither.
    pub fn restrict_to_vertices(
        &self,
        keep: &BTreeSet<u32>,
    ) -> Result<(GlobalQuotientOrbifold, Vec<u32>)> {
        for &v in keep {
            if v as usize >= self.model.n_vertices() {
                return Err(Error::InvalidInput(format!(
                    "restriction vertex {} out of range",
                    v
                )));
            }
        }
        for g in self.group.ids() {
            for &v in keep {
                if !keep.contains(&self.group.apply(g, v)) {
                    return Err(Error::InvalidInput(
                        "restriction vertex set is not group invariant".into(),
                    ));
                }
            }
        }
        let (sub, old_ids) = self.model.full_subcomplex(keep);
        let pos_of: std::collections::HashMap<u32, u32> = old_ids
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, i as u32))
            .collect();
        let mut gens = Vec::new();
        for g in self.group.ids().skip(1) {
            let perm: Vec<u32> = old_ids
                .iter()
                .map(|&v| pos_of[&self.group.apply(g, v)])
                .collect();
            gens.push(perm);
        }
        // from_generators returns the image of the action, which may be
        // smaller than the ambient group when elements restrict to the
        // identity; the restricted quotient space only sees the image
        let small_group = FiniteGroup::from_generators(sub.n_vertices(), &gens)?;
        let orbifold = GlobalQuotientOrbifold::new(sub, small_group, 0, vec![], None)?;
        if orbifold.subdiv_level != 0 {
            return Err(Error::InvalidInput(
                "restricted action is not regular; the vertex correspondence would be lost".into(),
            ));
        }
        Ok((orbifold, old_ids))
    }

    /// The sign by which each group element acts on the fundamental class.
    /// Requires a closed model with one dimensional top homology.
    pub fn orientation_values(&self) -> Result<Vec<i8>> {
        let d = self.model.dim().unwrap_or(0);
        if !self.is_closed() {
            return Err(Error::NotClosed(
                "orientation twist needs a closed model".into(),
            ));
        }
        let cx = self.model.chain_complex();
        let basis = cx.homology_basis(d);
        if basis.dim() != 1 {
            return Err(Error::NotOrientable(format!(
                "top homology has dimension {}",
                basis.dim()
            )));
        }
        let z = &basis.reps[0];
        let mut out = Vec::with_capacity(self.group.order());
        for g in self.group.ids() {
            let perm = self.group.element(g);
            let mut entries: Vec<(u32, BigRational)> = Vec::with_capacity(z.len());
            for (idx, coeff) in z {
                let s = self.model.simplex(d, *idx as usize);
                let (img, sign) = crate::groups::simplex_image(perm, s)?;
                let img_idx = self.model.index_of(d, &img).expect("action preserves model") as u32;
                let signed = if sign > 0 { coeff.clone() } else { -coeff.clone() };
                entries.push((img_idx, signed));
            }
            let gz: SparseVec = crate::linalg::sv_from_entries(entries);
            let coords = basis.class_coordinates(&gz)?;
            let c = &coords[0];
            if c.abs() != BigRational::one() {
                return Err(Error::NotOrientable(format!(
                    "element acts on top homology by {}",
                    c
                )));
            }
            out.push(if c.is_positive() { 1 } else { -1 });
        }
        Ok(out)
    }
}

/// Canonical small inputs shared by the test suites and the command line
/// examples: a disk, the octahedral sphere, a cone on a triangle, and the
/// half-turn sphere quotient.
pub mod fixtures {
    use super::*;

    pub fn octahedron_complex() -> SimplicialComplex {
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

    pub fn fan_complex() -> SimplicialComplex {
        // cone on a triangle: apex 0, rim 1, 2, 3
        SimplicialComplex::from_facets(4, &[vec![0, 1, 2], vec![0, 2, 3], vec![0, 1, 3]]).unwrap()
    }

    /// Disk with trivial group. At one subdivision the model of the single
    /// 2-simplex has vertices 0,1,2 (corners), 3,4,5 (edge midpoints for
    /// {0,1}, {0,2}, {1,2}) and 6 (center); the nested copy keeps everything
    /// except the far rim midpoint 5, which serves as the insertion point.
    pub fn disk_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let disk = SimplicialComplex::from_facets(3, &[vec![0, 1, 2]]).unwrap();
        let g = FiniteGroup::trivial(3);
        let stab = if subdiv == 1 {
            Some(StabilisationSpec {
                nested_copy_vertices: vec![0, 1, 2, 3, 4, 6],
                base_cell: 5,
            })
        } else {
            None
        };
        GlobalQuotientOrbifold::new(disk, g, subdiv, vec![0, 1, 2], stab).unwrap()
    }

    /// Octahedral sphere, trivial group.
    pub fn sphere_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let oct = octahedron_complex();
        let g = FiniteGroup::trivial(6);
        GlobalQuotientOrbifold::new(oct, g, subdiv, vec![], None).unwrap()
    }

    /// Cone over a triangle modded by the rotation of order three; the apex
    /// is the single cone point.
    pub fn cone_z3_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let fan = fan_complex();
        let g = FiniteGroup::from_generators(4, &[vec![0, 2, 3, 1]]).unwrap();
        GlobalQuotientOrbifold::new(fan, g, subdiv, vec![1, 2, 3], None).unwrap()
    }

    /// Sphere modded by the half turn about the axis through vertices 2 and
    /// 5; the two poles become cone points of order two.
    pub fn football_orbifold(subdiv: usize) -> GlobalQuotientOrbifold {
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 2, 0, 1, 5]]).unwrap();
        GlobalQuotientOrbifold::new(oct, g, subdiv, vec![], None).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn disk_model_subdivides_on_request() {
        let disk = SimplicialComplex::from_facets(3, &[vec![0, 1, 2]]).unwrap();
        let g = FiniteGroup::trivial(3);
        let orb = GlobalQuotientOrbifold::new(disk, g, 1, vec![0, 1, 2], None).unwrap();
        assert_eq!(orb.subdiv_level, 1);
        assert_eq!(orb.model.f_vector(), vec![7, 12, 6]);
        assert!(!orb.is_closed());
        let (locus, _) = orb.singular_locus();
        assert_eq!(locus.n_vertices(), 0);
        assert!(orb.orientation_values().is_err());
    }

    #[test]
    fn octahedron_is_closed_and_oriented() {
        let oct = octahedron_complex();
        let g = FiniteGroup::trivial(6);
        let orb = GlobalQuotientOrbifold::new(oct, g, 0, vec![], None).unwrap();
        assert!(orb.is_closed());
        assert_eq!(orb.orientation_values().unwrap(), vec![1]);
    }

    #[test]
    fn antipodal_map_reverses_orientation() {
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, g, 0, vec![], None).unwrap();
        let or = orb.orientation_values().unwrap();
        assert_eq!(or.len(), 2);
        assert_eq!(or[0], 1);
        assert_eq!(or[1], -1);
    }

    #[test]
    fn half_turn_preserves_orientation_and_has_two_cone_points() {
        // rotation by pi about the z axis: x -> -x, y -> -y
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 2, 0, 1, 5]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, g.clone(), 1, vec![], None).unwrap();
        assert_eq!(orb.subdiv_level, 1);
        assert_eq!(orb.orientation_values().unwrap(), vec![1, 1]);
        let sing = orb.singular_vertices();
        // exactly the barycenters of the two fixed poles survive
        assert_eq!(sing.len(), 2);
        let (locus, _) = orb.singular_locus();
        assert_eq!(locus.f_vector(), vec![2]);
    }

    #[test]
    fn reflection_flips_orientation() {
        // reflection through the equator plane: z -> -z
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![0, 1, 5, 3, 4, 2]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, g, 1, vec![], None).unwrap();
        let or = orb.orientation_values().unwrap();
        assert_eq!(or, vec![1, -1]);
        // the fixed equator square subdivides into an 8 vertex circle
        let (locus, _) = orb.singular_locus();
        assert_eq!(locus.betti(), vec![1, 1]);
    }

    #[test]
    fn unorientable_model_is_rejected() {
        let facets = vec![
            vec![0, 1, 4],
            vec![0, 1, 5],
            vec![0, 2, 3],
            vec![0, 2, 5],
            vec![0, 3, 4],
            vec![1, 2, 3],
            vec![1, 2, 4],
            vec![1, 3, 5],
            vec![2, 4, 5],
            vec![3, 4, 5],
        ];
        let rp2 = SimplicialComplex::from_facets(6, &facets).unwrap();
        let g = FiniteGroup::trivial(6);
        let orb = GlobalQuotientOrbifold::new(rp2, g, 0, vec![], None).unwrap();
        assert!(orb.is_closed());
        assert!(matches!(
            orb.orientation_values(),
            Err(Error::NotOrientable(_))
        ));
    }

    #[test]
    fn fan_rotation_is_regular_without_subdividing() {
        let fan = fan_complex();
        let rot = FiniteGroup::from_generators(4, &[vec![0, 2, 3, 1]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(fan, rot, 0, vec![1, 2, 3], None).unwrap();
        assert_eq!(orb.subdiv_level, 0);
        // at level zero the singular vertices are the fixed vertices
        assert_eq!(orb.singular_vertices(), vec![0]);
    }

    #[test]
    fn fan_rotation_singular_point_after_subdivision() {
        let fan = fan_complex();
        let rot = FiniteGroup::from_generators(4, &[vec![0, 2, 3, 1]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(fan, rot, 1, vec![1, 2, 3], None).unwrap();
        assert_eq!(orb.subdiv_level, 1);
        let sing = orb.singular_vertices();
        assert_eq!(sing.len(), 1);
        let (locus, _) = orb.singular_locus();
        assert_eq!(locus.f_vector(), vec![1]);
    }

    #[test]
    fn ghost_orbits_match_the_action() {
        let disk = disk_orbifold(1);
        assert!(disk.ghost_orbit(0).is_empty());

        let oct = octahedron_complex();
        let anti = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, anti, 0, vec![], None).unwrap();
        assert_eq!(orb.ghost_orbit(0), vec![3]);
        assert_eq!(orb.ghost_orbit(3), vec![0]);

        let foot = football_orbifold(1);
        // model vertices 0..5 are the barycenters of the input vertices; the
        // poles 2 and 5 are fixed, the equator vertices pair up
        assert!(foot.ghost_orbit(2).is_empty());
        assert!(foot.ghost_orbit(5).is_empty());
        assert_eq!(foot.ghost_orbit(0), vec![3]);
    }

    #[test]
    fn restriction_to_the_singular_locus() {
        let foot = football_orbifold(1);
        let sing: BTreeSet<u32> = foot.singular_vertices().into_iter().collect();
        assert_eq!(sing.len(), 2);
        let (restricted, old_ids) = foot.restrict_to_vertices(&sing).unwrap();
        assert_eq!(restricted.model.f_vector(), vec![2]);
        // the half turn fixes both poles, so only the identity survives
        assert_eq!(restricted.group.order(), 1);
        assert_eq!(old_ids, vec![2, 5]);
    }

    #[test]
    fn restriction_to_the_free_complement() {
        let foot = football_orbifold(1);
        let sing: BTreeSet<u32> = foot.singular_vertices().into_iter().collect();
        let keep: BTreeSet<u32> = (0..foot.model.n_vertices() as u32)
            .filter(|v| !sing.contains(v))
            .collect();
        let (restricted, old_ids) = foot.restrict_to_vertices(&keep).unwrap();
        assert_eq!(old_ids.len(), foot.model.n_vertices() - 2);
        // the equatorial band survives with the faithful half turn action
        assert_eq!(restricted.group.order(), 2);
        assert_eq!(restricted.model.betti(), vec![1, 1, 0]);
    }

    #[test]
    fn restriction_rejects_non_invariant_sets() {
        let oct = octahedron_complex();
        let anti = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        let orb = GlobalQuotientOrbifold::new(oct, anti, 0, vec![], None).unwrap();
        let half: BTreeSet<u32> = [0u32].into_iter().collect();
        assert!(orb.restrict_to_vertices(&half).is_err());
    }

    #[test]
    fn stab_spec_validation() {
        let disk = SimplicialComplex::from_facets(3, &[vec![0, 1, 2]]).unwrap();
        let g = FiniteGroup::trivial(3);
        // model after one subdivision has 7 vertices; vertex ids:
        // 0,1,2 originals; 3,4,5 edge midpoints; 6 center
        let good = StabilisationSpec {
            nested_copy_vertices: vec![0, 3, 6],
            base_cell: 5,
        };
        GlobalQuotientOrbifold::new(disk.clone(), g.clone(), 1, vec![], Some(good)).unwrap();
        let overlapping = StabilisationSpec {
            nested_copy_vertices: vec![0, 3, 6],
            base_cell: 3,
        };
        assert!(
            GlobalQuotientOrbifold::new(disk.clone(), g.clone(), 1, vec![], Some(overlapping))
                .is_err()
        );
        let out_of_range = StabilisationSpec {
            nested_copy_vertices: vec![99],
            base_cell: 5,
        };
        assert!(GlobalQuotientOrbifold::new(disk, g, 1, vec![], Some(out_of_range)).is_err());
    }

    #[test]
    fn stab_base_vertex_needs_trivial_stabilizer() {
        // half turn on the octahedron fixes the poles 2 and 5; a pole is not
        // a legal insertion point, an equator vertex is
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 2, 0, 1, 5]]).unwrap();
        let pole = StabilisationSpec {
            nested_copy_vertices: vec![2],
            base_cell: 5,
        };
        let err = GlobalQuotientOrbifold::new(oct.clone(), g.clone(), 0, vec![], Some(pole));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
        let equator = StabilisationSpec {
            nested_copy_vertices: vec![2],
            base_cell: 0,
        };
        GlobalQuotientOrbifold::new(oct, g, 0, vec![], Some(equator)).unwrap();
    }
}
