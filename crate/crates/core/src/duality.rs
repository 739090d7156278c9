//! Twisted duality for configuration spaces of closed quotients. The
//! homology of the configuration space is compared against the compactly
//! supported cohomology of the open configuration space, which is realized
//! as relative cohomology of a finite pair: the subdivided n-fold product of
//! the model against the subcomplex spanned by the non-disjoint tuples. The
//! twist is the orientation character of the wreath group.

use crate::config::{tuple_valid, ConfigSpace};
use crate::equivariant::{relative_isotypic_cohomology, SimplicialAction};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, WreathCharacter, WreathGroup};
use crate::orbifold::GlobalQuotientOrbifold;
use crate::simplicial::SimplicialComplex;

/// The character omega_n by which a wreath element (sigma; g_1..g_n) acts on
/// orientations: the sign of sigma raised to the model dimension, times the
/// sign of each g_i on the top homology of the model.
pub fn orientation_character(orb: &GlobalQuotientOrbifold) -> Result<WreathCharacter> {
    let values = orb.orientation_values()?;
    Ok(WreathCharacter::from_parts(orb.dim() as u32, values))
}

/// Finite pair computing compactly supported cohomology of the open
/// configuration space: `ambient` is the order complex of the n-th power of
/// the face poset of the model (a subdivision of the n-fold product), and the
/// closed part is the full subcomplex on the vertices whose tuples fail
/// orbit-disjointness. The wreath group acts on the ambient complex.
pub struct CompactSupportPair {
    pub n: usize,
    /// dimension of the open configuration space, n times the model dimension
    pub nd: usize,
    pub ambient: SimplicialComplex,
    /// the cell tuple behind each ambient vertex
    pub tuples: Vec<Vec<u32>>,
    /// per ambient vertex: true when the tuple is not orbit-disjoint
    pub in_closed: Vec<bool>,
    pub wreath: WreathGroup,
    /// action of each wreath element on ambient vertices, in id order
    pub perms: Vec<Vec<u32>>,
}

pub fn compact_support_pair(cs: &ConfigSpace, n: usize, cap: u64) -> Result<CompactSupportPair> {
    let orb = cs.orbifold;
    if n == 0 {
        return Err(Error::InvalidInput(
            "compact support pair needs at least one point".into(),
        ));
    }
    if !orb.boundary_vertices.is_empty() {
        return Err(Error::NotClosed(
            "compact support pairs need a model without boundary data".into(),
        ));
    }
    let (power, tuples) = orb.model.face_poset().power(n, cap)?;
    let ambient = power.order_complex_capped(cap, "product subdivision simplices")?;
    let in_closed: Vec<bool> = tuples.iter().map(|t| !tuple_valid(&cs.tables, t)).collect();
    let wreath = WreathGroup::new(orb.group.clone(), n)?;
    let base = cs.tables.total as u64;
    let rank_of = |t: &[u32]| -> u32 {
        t.iter().fold(0u64, |acc, &c| acc * base + c as u64) as u32
    };
    let mut perms = Vec::with_capacity(wreath.order());
    for id in wreath.ids() {
        let (sigma, gs) = wreath.element(id);
        let perm: Vec<u32> = tuples
            .iter()
            .map(|t| rank_of(&cs.tuple_image(sigma, gs, t)))
            .collect();
        perms.push(perm);
    }
    Ok(CompactSupportPair {
        n,
        nd: n * orb.dim(),
        ambient,
        tuples,
        in_closed,
        wreath,
        perms,
    })
}

/// Relative cohomology dimensions of the pair, projected to the chi-isotypic
/// part for a wreath character chi.
pub fn relative_isotypic_betti(
    pair: &CompactSupportPair,
    chi: &WreathCharacter,
) -> Result<Vec<usize>> {
    let values: Vec<i64> = pair
        .wreath
        .ids()
        .map(|w| chi.eval(&pair.wreath, w))
        .collect();
    let action = SimplicialAction::new(&pair.ambient, pair.perms.clone())?;
    relative_isotypic_cohomology(&action, &values, |_, s| {
        s.iter().all(|&v| pair.in_closed[v as usize])
    })
}

/// Relative cohomology dimensions of the pair with no group identification:
/// the ordered view of the open configuration space.
pub fn relative_ordered_betti(pair: &CompactSupportPair) -> Result<Vec<usize>> {
    let id: Vec<u32> = (0..pair.ambient.n_vertices() as u32).collect();
    let action = SimplicialAction::new(&pair.ambient, vec![id])?;
    relative_isotypic_cohomology(&action, &[1], |_, s| {
        s.iter().all(|&v| pair.in_closed[v as usize])
    })
}

#[derive(Clone, Debug)]
pub struct DualityReport {
    pub n: usize,
    pub nd: usize,
    /// rational Betti numbers of the configuration space, degrees 0..=nd
    pub conf_betti: Vec<usize>,
    /// omega-isotypic relative Betti numbers of the pair, degrees 0..=nd
    pub relative_betti: Vec<usize>,
    /// conf_betti[k] == relative_betti[nd - k] for every k
    pub matched: bool,
}

/// Compare homology of the configuration space in degree k against the
/// omega-twisted relative cohomology of the compact support pair in degree
/// nd - k, for all k at once.
pub fn duality_check(
    orb: &GlobalQuotientOrbifold,
    n: usize,
    cap: u64,
    max_cells: u64,
) -> Result<DualityReport> {
    let omega = orientation_character(orb)?;
    let cs = ConfigSpace::new(orb)?;
    let iso = cs.block_isotypic_complex(&[n], None, max_cells)?;
    let mut left = iso.complex.betti();
    let pair = compact_support_pair(&cs, n, cap)?;
    let mut right = relative_isotypic_betti(&pair, &omega)?;
    let nd = pair.nd;
    left.resize(nd + 1, 0);
    right.resize(nd + 1, 0);
    let matched = (0..=nd).all(|k| left[k] == right[nd - k]);
    Ok(DualityReport {
        n,
        nd,
        conf_betti: left,
        relative_betti: right,
        matched,
    })
}

/// Check that omega_n restricted to the subgroup preserving the first
/// n - m and the last m coordinates agrees with the product of the two
/// block characters, over every pair of block elements.
pub fn verify_block_factorisation(
    base: &FiniteGroup,
    omega: &WreathCharacter,
    n: usize,
    m: usize,
) -> Result<()> {
    if m == 0 || m >= n {
        return Err(Error::InvalidInput(
            "block factorisation needs 0 < m < n".into(),
        ));
    }
    let whole = WreathGroup::new(base.clone(), n)?;
    let first = WreathGroup::new(base.clone(), n - m)?;
    let second = WreathGroup::new(base.clone(), m)?;
    for a in first.ids() {
        let (sa, ga) = first.element(a).clone();
        for b in second.ids() {
            let (sb, gb) = second.element(b);
            let mut sigma = sa.clone();
            sigma.extend(sb.iter().map(|&x| x + (n - m) as u32));
            let mut gs = ga.clone();
            gs.extend_from_slice(gb);
            let id = whole.id_of(&(sigma, gs)).ok_or_else(|| {
                Error::InvalidInput("block element missing from the wreath product".into())
            })?;
            let lhs = omega.eval(&whole, id);
            let rhs = omega.eval(&first, a) * omega.eval(&second, b);
            if lhs != rhs {
                return Err(Error::BadCharacter(format!(
                    "block factorisation fails at elements {} and {}: {} vs {}",
                    a, b, lhs, rhs
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::fixtures::*;

    fn antipodal_orbifold() -> GlobalQuotientOrbifold {
        let oct = octahedron_complex();
        let g = FiniteGroup::from_generators(6, &[vec![3, 4, 5, 0, 1, 2]]).unwrap();
        GlobalQuotientOrbifold::new(oct, g, 0, vec![], None).unwrap()
    }

    fn tetra_sphere_orbifold() -> GlobalQuotientOrbifold {
        let s = SimplicialComplex::from_facets(
            4,
            &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        GlobalQuotientOrbifold::new(s, FiniteGroup::trivial(4), 0, vec![], None).unwrap()
    }

    #[test]
    fn orientation_characters_of_the_fixtures() {
        let sphere = sphere_orbifold(0);
        let om = orientation_character(&sphere).unwrap();
        assert_eq!(om.sign_exponent, 0);
        assert_eq!(om.base_values, vec![1]);

        let foot = football_orbifold(1);
        assert_eq!(orientation_character(&foot).unwrap().base_values, vec![1, 1]);

        let anti = antipodal_orbifold();
        assert_eq!(orientation_character(&anti).unwrap().base_values, vec![1, -1]);

        assert!(orientation_character(&disk_orbifold(1)).is_err());
    }

    #[test]
    fn one_point_duality_on_the_sphere() {
        let orb = sphere_orbifold(1);
        let report = duality_check(&orb, 1, 1_000_000, 1_000_000).unwrap();
        assert_eq!(report.nd, 2);
        assert_eq!(report.conf_betti, vec![1, 0, 1]);
        assert_eq!(report.relative_betti, vec![1, 0, 1]);
        assert!(report.matched);
    }

    #[test]
    fn one_point_pair_has_empty_closed_part() {
        let orb = sphere_orbifold(0);
        let cs = ConfigSpace::new(&orb).unwrap();
        let pair = compact_support_pair(&cs, 1, 100_000).unwrap();
        assert!(pair.in_closed.iter().all(|&b| !b));
        // with nothing removed the relative groups are the plain cohomology
        // of the subdivided sphere
        assert_eq!(relative_ordered_betti(&pair).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn twisted_duality_for_the_antipodal_quotient() {
        // the quotient is the projective plane: trivial-isotypic homology is
        // (1,0,0) and the twist moves the fundamental class to the other end
        let orb = antipodal_orbifold();
        let report = duality_check(&orb, 1, 1_000_000, 1_000_000).unwrap();
        assert_eq!(report.conf_betti, vec![1, 0, 0]);
        assert_eq!(report.relative_betti, vec![0, 0, 1]);
        assert!(report.matched);
    }

    #[test]
    fn two_point_duality_on_the_tetrahedral_sphere() {
        let orb = tetra_sphere_orbifold();
        let report = duality_check(&orb, 2, 5_000_000, 1_000_000).unwrap();
        assert_eq!(report.nd, 4);
        assert_eq!(report.conf_betti, vec![1, 0, 0, 0, 0]);
        assert_eq!(report.relative_betti, vec![0, 0, 0, 0, 1]);
        assert!(report.matched);
    }

    #[test]
    fn football_duality_for_one_point() {
        let orb = football_orbifold(1);
        let report = duality_check(&orb, 1, 1_000_000, 1_000_000).unwrap();
        assert_eq!(report.conf_betti, vec![1, 0, 1]);
        assert!(report.matched);
    }

    #[test]
    fn ordered_two_point_pair_detects_the_open_manifold() {
        // the ordered configuration space of two points on the sphere is a
        // connected orientable open 4-manifold homotopy equivalent to the
        // sphere itself; its compactly supported cohomology mirrors that
        let orb = tetra_sphere_orbifold();
        let cs = ConfigSpace::new(&orb).unwrap();
        let pair = compact_support_pair(&cs, 2, 5_000_000).unwrap();
        let betti = relative_ordered_betti(&pair).unwrap();
        assert_eq!(betti, vec![0, 0, 1, 0, 1]);
    }

    #[test]
    fn euler_characteristics_add_over_the_pair() {
        // two disjoint triangles: chi of the pair difference must equal the
        // alternating count over the orbit-disjoint tuples
        let two = SimplicialComplex::from_facets(6, &[vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let orb =
            GlobalQuotientOrbifold::new(two, FiniteGroup::trivial(6), 0, vec![], None).unwrap();
        let cs = ConfigSpace::new(&orb).unwrap();
        let pair = compact_support_pair(&cs, 2, 1_000_000).unwrap();
        let closed: std::collections::BTreeSet<u32> = (0..pair.tuples.len() as u32)
            .filter(|&v| pair.in_closed[v as usize])
            .collect();
        let (a, _) = pair.ambient.full_subcomplex(&closed);
        let lhs = pair.ambient.euler_characteristic() - a.euler_characteristic();
        let rhs: i64 = pair
            .tuples
            .iter()
            .enumerate()
            .filter(|(v, _)| !pair.in_closed[*v])
            .map(|(_, t)| if cs.tuple_degree(t) % 2 == 0 { 1 } else { -1 })
            .sum();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs, 2);
    }

    #[test]
    fn pair_rejects_boundary_data() {
        let orb = disk_orbifold(1);
        let cs = ConfigSpace::new(&orb).unwrap();
        assert!(matches!(
            compact_support_pair(&cs, 1, 1_000_000),
            Err(Error::NotClosed(_))
        ));
        let sphere = sphere_orbifold(0);
        let cs2 = ConfigSpace::new(&sphere).unwrap();
        assert!(compact_support_pair(&cs2, 0, 1_000_000).is_err());
    }

    #[test]
    fn block_factorisation_of_orientation_characters() {
        // even dimension with an orientation-reversing element
        let anti = antipodal_orbifold();
        let om = orientation_character(&anti).unwrap();
        let base = anti.group.clone();
        verify_block_factorisation(&base, &om, 2, 1).unwrap();
        verify_block_factorisation(&base, &om, 3, 1).unwrap();
        verify_block_factorisation(&base, &om, 3, 2).unwrap();
        om.check_base_multiplicative(&base).unwrap();
        let w2 = WreathGroup::new(base, 2).unwrap();
        om.check_multiplicative(&w2).unwrap();

        // odd dimension: the permutation sign enters
        let odd = WreathCharacter::from_parts(1, vec![1]);
        let triv = FiniteGroup::trivial(3);
        verify_block_factorisation(&triv, &odd, 3, 1).unwrap();
        let w3 = WreathGroup::new(triv, 3).unwrap();
        odd.check_multiplicative(&w3).unwrap();
    }
}
