//! Assembly and verification of the move relations.
//!
//! A [`MoveSide`] is one side of a bistellar move: a cluster of 4-simplices
//! together with vertex coordinates. Its integral is the Berezin integral of
//! the product of the simplex weights (deformed, if a deformation chain is
//! given) and one degree-one factor per inner triangle, taken over the
//! generators of the inner tetrahedra and divided by the measure scalars.
//!
//! The verification entry points compare the two sides of the three-to-three
//! move: undeformed ([`verify_33`]), deformed by a chain on the common
//! boundary tetrahedra ([`verify_d1`]), and shifted by images of inner
//! tetrahedron chains ([`verify_b`]). The two-to-four assembly is exploratory
//! and only reports what it finds ([`explore_24`]).

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::field::{FieldError, FieldScalar, FieldTag};
use crate::grassmann::{product_integral, Generator, GrassmannElement, GrassmannError};
use crate::triangulation::{
    FaceLattice, Triangulation, TriangulationError, VertexCoordinates,
};
use crate::weights::{
    deformed_weight, face_operator, weight, xchain_from_tet_chain, WeightError, XChain,
};

/// Errors from assembling or comparing move sides.
#[derive(Debug, Error)]
pub enum PachnerError {
    /// An explicit degree-one factor that the triangle's face operator does
    /// not send to one.
    #[error("the factor supplied for triangle {0:?} is not sent to one by its face operator")]
    WNotInverse([u32; 3]),
    /// A coefficient on a tetrahedron outside the common boundary of the two
    /// sides.
    #[error("tetrahedron {0:?} is not a common boundary tetrahedron of the two sides")]
    UnsupportedTetrahedron([u32; 4]),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Triangulation(#[from] TriangulationError),
    #[error(transparent)]
    Weight(#[from] WeightError),
    #[error(transparent)]
    Grassmann(#[from] GrassmannError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// How the degree-one factor `w_s` with `d_s(w_s) = 1` is chosen for each
/// inner triangle `s`.
#[derive(Debug, Clone)]
pub enum WChoice {
    /// Solve on the first generator of each face operator (this reproduces
    /// the factors `(zeta_34 / zeta_23) a_1234` and `-b_1456` on the
    /// three-to-three sides).
    Auto,
    /// Solve on the last generator of each face operator; an independent
    /// solution whenever the operator has several terms.
    AutoLast,
    /// Explicit factors, one per inner triangle in increasing order. Each is
    /// checked against the face operator before use.
    Explicit(Vec<GrassmannElement>),
}

/// One side of a move: a cluster of 4-simplices with vertex coordinates.
#[derive(Debug, Clone)]
pub struct MoveSide {
    tri: Triangulation,
    lat: FaceLattice,
    zeta: VertexCoordinates,
    inner_tets: Vec<[u32; 4]>,
    inner_triangles: Vec<[u32; 3]>,
}

impl MoveSide {
    /// Builds a side from a cluster and coordinates covering its vertices.
    pub fn new(tri: Triangulation, zeta: VertexCoordinates) -> Result<MoveSide, PachnerError> {
        for v in 1..=tri.n_vertices() {
            if !zeta.vertices().any(|w| w == v) {
                return Err(PachnerError::InvalidInput(format!(
                    "coordinates are missing vertex {v}"
                )));
            }
        }
        let lat = tri.lattice()?;
        let inner_tets = lat.inner_tetrahedra();
        let inner_triangles = lat.inner_triangles();
        Ok(MoveSide {
            tri,
            lat,
            zeta,
            inner_tets,
            inner_triangles,
        })
    }

    /// Builds a side from a built-in cluster name.
    pub fn builtin(name: &str, zeta: VertexCoordinates) -> Result<MoveSide, PachnerError> {
        MoveSide::new(Triangulation::builtin(name)?, zeta)
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.tri
    }

    pub fn lattice(&self) -> &FaceLattice {
        &self.lat
    }

    pub fn zeta(&self) -> &VertexCoordinates {
        &self.zeta
    }

    /// The inner tetrahedra, in increasing order; the integral runs over
    /// their generators.
    pub fn inner_tetrahedra(&self) -> &[[u32; 4]] {
        &self.inner_tets
    }

    /// The inner triangles, in increasing order; each contributes one
    /// degree-one factor.
    pub fn inner_triangles(&self) -> &[[u32; 3]] {
        &self.inner_triangles
    }

    /// The measure scalar of each inner tetrahedron `t`:
    /// `zeta_{t_2} - zeta_{t_3}`. The integral is divided by their product.
    pub fn measure_scalars(&self) -> Vec<FieldScalar> {
        self.inner_tets
            .iter()
            .map(|t| self.zeta.diff(t[2], t[3]))
            .collect()
    }
}

/// The boundary tetrahedra the two sides share, in increasing order.
pub fn common_boundary_tetrahedra(a: &MoveSide, b: &MoveSide) -> Vec<[u32; 4]> {
    let other = b.lat.boundary_tetrahedra();
    a.lat
        .boundary_tetrahedra()
        .into_iter()
        .filter(|t| other.contains(t))
        .collect()
}

/// The integral of one side: the product of its simplex weights (deformed by
/// `x` when given) and its degree-one triangle factors, Berezin-integrated
/// over the generators of the inner tetrahedra (in increasing tetrahedron
/// order, `a` then `b`, first listed innermost) and divided by the measure
/// scalars. The result lives in the generators of the boundary tetrahedra.
pub fn side_integral(
    side: &MoveSide,
    x: Option<&XChain>,
    choice: &WChoice,
) -> Result<GrassmannElement, PachnerError> {
    let zeta = &side.zeta;
    let field = zeta.field_tag();
    if let WChoice::Explicit(ws) = choice {
        if ws.len() != side.inner_triangles.len() {
            return Err(PachnerError::InvalidInput(format!(
                "{} factors supplied for {} inner triangles",
                ws.len(),
                side.inner_triangles.len()
            )));
        }
    }
    let mut factors: Vec<GrassmannElement> = Vec::new();
    for (idx, u) in side.tri.simplices().iter().enumerate() {
        factors.push(match x {
            Some(x) => deformed_weight(u, side.tri.epsilon_by_index(idx), x, zeta),
            None => weight(u, zeta),
        });
    }
    for (i, s) in side.inner_triangles.iter().enumerate() {
        let d = face_operator(s, &side.lat, zeta)?;
        factors.push(match choice {
            WChoice::Auto => d.solve_inverse_of_one()?,
            WChoice::AutoLast => d.solve_inverse_of_one_last()?,
            WChoice::Explicit(ws) => {
                if d.apply(&ws[i])? != GrassmannElement::one(field) {
                    return Err(PachnerError::WNotInverse(*s));
                }
                ws[i].clone()
            }
        });
    }
    let vars: Vec<Generator> = side
        .inner_tets
        .iter()
        .flat_map(|t| [Generator::a(*t), Generator::b(*t)])
        .collect();
    let mut out = product_integral(field, &factors, &vars)?;
    for m in side.measure_scalars() {
        out = out.scale(&m.inv()?);
    }
    Ok(out)
}

/// The outcome of comparing the two sides of a relation.
#[derive(Debug, Clone)]
pub struct RelationReport {
    /// Value of the left side, in boundary-tetrahedron generators.
    pub lhs_value: GrassmannElement,
    /// Value of the right side, in boundary-tetrahedron generators.
    pub rhs_value: GrassmannElement,
    /// Whether the two sides agree exactly.
    pub equal: bool,
    /// The difference `lhs - rhs`; zero exactly when `equal`.
    pub residual: GrassmannElement,
}

impl RelationReport {
    fn from_sides(
        lhs_value: GrassmannElement,
        rhs_value: GrassmannElement,
    ) -> Result<RelationReport, PachnerError> {
        let residual = lhs_value.gr_sub(&rhs_value)?;
        Ok(RelationReport {
            equal: residual.is_zero(),
            lhs_value,
            rhs_value,
            residual,
        })
    }

    /// The number of monomials in the residual.
    pub fn residual_terms(&self) -> usize {
        self.residual.term_count()
    }
}

/// Verifies the undeformed three-to-three relation at the given coordinates,
/// with a factor choice for each side.
pub fn verify_33(
    zeta: &VertexCoordinates,
    w_lhs: &WChoice,
    w_rhs: &WChoice,
) -> Result<RelationReport, PachnerError> {
    let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone())?;
    let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone())?;
    RelationReport::from_sides(
        side_integral(&lhs, None, w_lhs)?,
        side_integral(&rhs, None, w_rhs)?,
    )
}

/// Verifies the deformed three-to-three relation: both sides are deformed by
/// the images of one coefficient chain on the nine common boundary
/// tetrahedra, and must still agree.
pub fn verify_d1(
    zeta: &VertexCoordinates,
    boundary_tet_coeffs: &BTreeMap<[u32; 4], FieldScalar>,
) -> Result<RelationReport, PachnerError> {
    let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone())?;
    let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone())?;
    let common = common_boundary_tetrahedra(&lhs, &rhs);
    for t in boundary_tet_coeffs.keys() {
        if !common.contains(t) {
            return Err(PachnerError::UnsupportedTetrahedron(*t));
        }
    }
    let field = zeta.field_tag();
    let x_lhs = xchain_from_tet_chain(&lhs.lat, boundary_tet_coeffs, field, true)?;
    let x_rhs = xchain_from_tet_chain(&rhs.lat, boundary_tet_coeffs, field, true)?;
    RelationReport::from_sides(
        side_integral(&lhs, Some(&x_lhs), &WChoice::Auto)?,
        side_integral(&rhs, Some(&x_rhs), &WChoice::Auto)?,
    )
}

/// Checks that one side's integral does not change when the image of a chain
/// on its inner tetrahedra is added to the deformation.
pub fn verify_b(
    side: &MoveSide,
    base_x: &XChain,
    inner_tet_coeffs: &BTreeMap<[u32; 4], FieldScalar>,
) -> Result<bool, PachnerError> {
    let field = side.zeta.field_tag();
    let shift = xchain_from_tet_chain(&side.lat, inner_tet_coeffs, field, false)?;
    let before = side_integral(side, Some(base_x), &WChoice::Auto)?;
    let after = side_integral(side, Some(&base_x.add(&shift)?), &WChoice::Auto)?;
    Ok(before == after)
}

/// Assembles both sides of the two-to-four move by the same rules as the
/// three-to-three relation and reports what it finds. This is an exploration
/// tool: there is no contract that the two sides agree.
pub fn explore_24(
    zeta: &VertexCoordinates,
    x_lhs: Option<&XChain>,
    x_rhs: Option<&XChain>,
    w_lhs: &WChoice,
    w_rhs: &WChoice,
) -> Result<RelationReport, PachnerError> {
    let lhs = MoveSide::builtin("pachner24_lhs", zeta.clone())?;
    let rhs = MoveSide::builtin("pachner24_rhs", zeta.clone())?;
    RelationReport::from_sides(
        side_integral(&lhs, x_lhs, w_lhs)?,
        side_integral(&rhs, x_rhs, w_rhs)?,
    )
}

/// A coefficient chain with one random scalar per listed tetrahedron.
pub fn random_tet_chain<R: Rng + ?Sized>(
    tets: &[[u32; 4]],
    field: FieldTag,
    rng: &mut R,
) -> BTreeMap<[u32; 4], FieldScalar> {
    tets.iter().map(|t| (*t, field.random_scalar(rng))).collect()
}

/// A deformation chain with one random raw coordinate per simplex vertex.
pub fn random_xchain<R: Rng + ?Sized>(
    simplices: &[[u32; 5]],
    field: FieldTag,
    rng: &mut R,
) -> XChain {
    let mut x = XChain::zero(field);
    for u in simplices {
        for v in u {
            x.add_entry(*u, *v, &field.random_scalar(rng))
                .expect("vertex of its simplex");
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coords(field: FieldTag, seed: u64) -> VertexCoordinates {
        Triangulation::builtin("pachner33_lhs")
            .unwrap()
            .random_coordinates(field, seed)
            .unwrap()
    }

    fn gf() -> FieldTag {
        FieldTag::prime_field(1_000_003).unwrap()
    }

    #[test]
    fn the_sides_carry_the_expected_measure() {
        let zeta = coords(FieldTag::Rationals, 5);
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone()).unwrap();
        assert_eq!(lhs.inner_tetrahedra(), &[[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 3, 6]]);
        assert_eq!(lhs.inner_triangles(), &[[1, 2, 3]]);
        assert_eq!(
            lhs.measure_scalars(),
            vec![zeta.diff(3, 4), zeta.diff(3, 5), zeta.diff(3, 6)]
        );
        assert_eq!(rhs.inner_tetrahedra(), &[[1, 4, 5, 6], [2, 4, 5, 6], [3, 4, 5, 6]]);
        assert_eq!(rhs.inner_triangles(), &[[4, 5, 6]]);
        assert_eq!(
            rhs.measure_scalars(),
            vec![zeta.diff(5, 6), zeta.diff(5, 6), zeta.diff(5, 6)]
        );
    }

    #[test]
    fn the_sides_share_nine_boundary_tetrahedra() {
        let zeta = coords(FieldTag::Rationals, 5);
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone()).unwrap();
        let common = common_boundary_tetrahedra(&lhs, &rhs);
        assert_eq!(
            common,
            vec![
                [1, 2, 4, 5],
                [1, 2, 4, 6],
                [1, 2, 5, 6],
                [1, 3, 4, 5],
                [1, 3, 4, 6],
                [1, 3, 5, 6],
                [2, 3, 4, 5],
                [2, 3, 4, 6],
                [2, 3, 5, 6],
            ]
        );
        assert_eq!(common, lhs.lattice().boundary_tetrahedra());
        assert_eq!(common, rhs.lattice().boundary_tetrahedra());
        let a = MoveSide::builtin("pachner24_lhs", zeta.clone()).unwrap();
        let b = MoveSide::builtin("pachner24_rhs", zeta).unwrap();
        let common24 = common_boundary_tetrahedra(&a, &b);
        assert_eq!(common24.len(), 8);
        assert_eq!(common24, a.lattice().boundary_tetrahedra());
        assert_eq!(common24, b.lattice().boundary_tetrahedra());
    }

    #[test]
    fn the_relation_holds_with_the_canonical_factors() {
        for seed in [1u64, 2] {
            let zeta = coords(FieldTag::Rationals, seed);
            let report = verify_33(&zeta, &WChoice::Auto, &WChoice::Auto).unwrap();
            assert!(report.equal, "seed {seed}");
            assert_eq!(report.residual_terms(), 0);
            assert!(!report.lhs_value.is_zero());
            assert_eq!(
                report.lhs_value.degrees(),
                [4usize].into_iter().collect()
            );
            // The integral removes every inner-tetrahedron generator.
            for t in [[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 3, 6]] {
                assert!(!report.lhs_value.mentions_tetrahedron(t));
            }
            for t in [[1, 4, 5, 6], [2, 4, 5, 6], [3, 4, 5, 6]] {
                assert!(!report.rhs_value.mentions_tetrahedron(t));
            }
        }
    }

    #[test]
    fn the_relation_holds_with_explicit_factors() {
        let zeta = coords(FieldTag::Rationals, 3);
        // w_123 = (zeta_34 / zeta_23) a_1234 and w_456 = -b_1456.
        let w_lhs = GrassmannElement::from_generator(
            zeta.diff(3, 4).div(&zeta.diff(2, 3)).unwrap(),
            Generator::a([1, 2, 3, 4]),
        );
        let w_rhs = GrassmannElement::from_generator(
            zeta.field_tag().integer(-1),
            Generator::b([1, 4, 5, 6]),
        );
        let explicit = verify_33(
            &zeta,
            &WChoice::Explicit(vec![w_lhs]),
            &WChoice::Explicit(vec![w_rhs]),
        )
        .unwrap();
        assert!(explicit.equal);
        // These explicit factors are the canonical ones.
        let auto = verify_33(&zeta, &WChoice::Auto, &WChoice::Auto).unwrap();
        assert_eq!(explicit.lhs_value, auto.lhs_value);
        assert_eq!(explicit.rhs_value, auto.rhs_value);
    }

    #[test]
    fn the_value_is_independent_of_the_factor_choice() {
        for seed in [4u64, 9] {
            let zeta = coords(gf(), seed);
            let first = verify_33(&zeta, &WChoice::Auto, &WChoice::Auto).unwrap();
            let last = verify_33(&zeta, &WChoice::AutoLast, &WChoice::AutoLast).unwrap();
            assert!(first.equal && last.equal);
            assert_eq!(first.lhs_value, last.lhs_value);
            assert_eq!(first.rhs_value, last.rhs_value);
        }
    }

    #[test]
    fn a_wrong_factor_is_rejected() {
        let zeta = coords(FieldTag::Rationals, 3);
        let not_inverse = GrassmannElement::from_generator(
            zeta.field_tag().one(),
            Generator::a([1, 2, 3, 4]),
        );
        let err = verify_33(
            &zeta,
            &WChoice::Explicit(vec![not_inverse]),
            &WChoice::Auto,
        )
        .unwrap_err();
        assert!(matches!(err, PachnerError::WNotInverse([1, 2, 3])));
    }

    #[test]
    fn a_zero_deformation_reduces_to_the_undeformed_side() {
        let zeta = coords(FieldTag::Rationals, 6);
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let x = XChain::zero(zeta.field_tag());
        let deformed = side_integral(&lhs, Some(&x), &WChoice::Auto).unwrap();
        let plain = side_integral(&lhs, None, &WChoice::Auto).unwrap();
        assert_eq!(deformed, plain);
    }

    #[test]
    fn boundary_deformations_balance() {
        let zeta = coords(FieldTag::Rationals, 7);
        let field = zeta.field_tag();
        // An empty chain reduces to the undeformed relation.
        let empty = verify_d1(&zeta, &BTreeMap::new()).unwrap();
        let undeformed = verify_33(&zeta, &WChoice::Auto, &WChoice::Auto).unwrap();
        assert!(empty.equal);
        assert_eq!(empty.lhs_value, undeformed.lhs_value);
        // A single coefficient on the tetrahedron 2345.
        let mut chain = BTreeMap::new();
        chain.insert([2u32, 3, 4, 5], field.one());
        let single = verify_d1(&zeta, &chain).unwrap();
        assert!(single.equal);
        assert_ne!(single.lhs_value, undeformed.lhs_value);
        // Random coefficients on all nine tetrahedra, over a prime field.
        for seed in [11u64, 12] {
            let zeta = coords(gf(), seed);
            let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
            let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone()).unwrap();
            let common = common_boundary_tetrahedra(&lhs, &rhs);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let chain = random_tet_chain(&common, gf(), &mut rng);
            let report = verify_d1(&zeta, &chain).unwrap();
            assert!(report.equal, "seed {seed}");
        }
    }

    #[test]
    fn a_coefficient_off_the_common_boundary_is_rejected() {
        let zeta = coords(FieldTag::Rationals, 7);
        let field = zeta.field_tag();
        for bad in [[1u32, 2, 3, 4], [1u32, 2, 3, 7]] {
            let mut chain = BTreeMap::new();
            chain.insert(bad, field.one());
            let err = verify_d1(&zeta, &chain).unwrap_err();
            assert!(matches!(err, PachnerError::UnsupportedTetrahedron(t) if t == bad));
        }
    }

    #[test]
    fn deformed_sides_have_even_degrees_only() {
        let zeta = coords(gf(), 13);
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let rhs = MoveSide::builtin("pachner33_rhs", zeta.clone()).unwrap();
        let common = common_boundary_tetrahedra(&lhs, &rhs);
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let chain = random_tet_chain(&common, gf(), &mut rng);
        let report = verify_d1(&zeta, &chain).unwrap();
        assert!(report.equal);
        for value in [&report.lhs_value, &report.rhs_value] {
            assert!(value.degrees().into_iter().all(|d| [0, 2, 4].contains(&d)));
        }
        // Each graded component of the relation holds separately.
        for d in [0usize, 2, 4] {
            assert_eq!(
                report.lhs_value.graded_component(d),
                report.rhs_value.graded_component(d)
            );
        }
    }

    #[test]
    fn inner_shifts_do_not_change_a_side() {
        let zeta = coords(FieldTag::Rationals, 8);
        let field = zeta.field_tag();
        let lhs = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        // Zero base, unit coefficient on the inner tetrahedron 1234.
        let mut chain = BTreeMap::new();
        chain.insert([1u32, 2, 3, 4], field.one());
        assert!(verify_b(&lhs, &XChain::zero(field), &chain).unwrap());
        // Random base and random inner chains on both sides.
        for (seed, name) in [(21u64, "pachner33_lhs"), (22, "pachner33_rhs")] {
            let zeta = coords(gf(), seed);
            let side = MoveSide::builtin(name, zeta.clone()).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = random_xchain(side.triangulation().simplices(), gf(), &mut rng);
            let chain = random_tet_chain(side.inner_tetrahedra(), gf(), &mut rng);
            assert!(verify_b(&side, &base, &chain).unwrap(), "side {name}");
        }
    }

    #[test]
    fn an_inner_chain_touching_the_boundary_is_rejected() {
        let zeta = coords(FieldTag::Rationals, 8);
        let field = zeta.field_tag();
        let lhs = MoveSide::builtin("pachner33_lhs", zeta).unwrap();
        let mut chain = BTreeMap::new();
        chain.insert([2u32, 3, 4, 5], field.one());
        let err = verify_b(&lhs, &XChain::zero(field), &chain).unwrap_err();
        assert!(matches!(
            err,
            PachnerError::Weight(WeightError::BoundaryTetWithoutFlag([2, 3, 4, 5]))
        ));
    }

    #[test]
    fn the_integral_matches_an_unoptimized_evaluation() {
        use crate::grassmann::berezin_integrate;
        let zeta = coords(FieldTag::Rationals, 14);
        let side = MoveSide::builtin("pachner33_lhs", zeta.clone()).unwrap();
        let fast = side_integral(&side, None, &WChoice::Auto).unwrap();
        // Multiply the weights (increasing simplex order), then the triangle
        // factor, then integrate a/b per inner tetrahedron, first listed
        // innermost, and divide by the measure scalars.
        let mut product = GrassmannElement::one(zeta.field_tag());
        for u in side.triangulation().simplices() {
            product = product.gr_mul(&weight(u, &zeta)).unwrap();
        }
        let d = face_operator(&[1, 2, 3], side.lattice(), &zeta).unwrap();
        product = product.gr_mul(&d.solve_inverse_of_one().unwrap()).unwrap();
        let vars: Vec<Generator> = side
            .inner_tetrahedra()
            .iter()
            .flat_map(|t| [Generator::a(*t), Generator::b(*t)])
            .collect();
        let mut plain = berezin_integrate(&product, &vars).unwrap();
        for m in side.measure_scalars() {
            plain = plain.scale(&m.inv().unwrap());
        }
        assert_eq!(fast, plain);
    }

    #[test]
    fn the_exploration_reports_without_judging() {
        let zeta = coords(gf(), 17);
        let report = explore_24(&zeta, None, None, &WChoice::Auto, &WChoice::Auto).unwrap();
        // No equality contract; the report itself must be consistent.
        assert_eq!(report.equal, report.residual.is_zero());
        assert_eq!(report.residual_terms(), report.residual.term_count());
        // A zero deformation chain gives the same residual as no chain.
        let zero = XChain::zero(zeta.field_tag());
        let deformed =
            explore_24(&zeta, Some(&zero), Some(&zero), &WChoice::Auto, &WChoice::Auto).unwrap();
        assert_eq!(report.residual, deformed.residual);
        // Both assemblies integrate out every inner tetrahedron.
        let rhs_side = MoveSide::builtin("pachner24_rhs", zeta).unwrap();
        for t in rhs_side.inner_tetrahedra() {
            assert!(!report.rhs_value.mentions_tetrahedron(*t));
        }
    }
}
