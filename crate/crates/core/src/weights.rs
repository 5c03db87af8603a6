//! Grassmann weights of 4-simplices, face operators and deformations.
//!
//! Every tetrahedron `t` carries two Grassmann generators `a_t`, `b_t`. To a
//! 4-simplex `u` we attach five degree-one elements `v_1, ..., v_5`, one per
//! vertex: the first three are the rows of the gauged single-simplex block of
//! the fourth chain map, read as Grassmann elements through
//! `(t, t_0) -> a_t`, `(t, t_1) -> b_t`; the last two are solved from the
//! relations `sum_r v_r = 0` and `sum_r zeta_{u_r} v_r = 0`. The weight of
//! `u` is the degree-three element
//! `W_u = v_1 v_2 v_3 / (zeta_{u_3} - zeta_{u_4})`,
//! and the same element is produced by the alternative row triples checked in
//! the tests.
//!
//! A *face operator* `d_s`, for a triangle `s`, is a first-order derivation
//! in the generators of the tetrahedra containing `s`; a `w`-factor for `s`
//! is any Grassmann element with `d_s(w) = 1`. An [`XChain`] deforms weights
//! to first order: `W~_u = W_u + eps_u sum_r x_{u,r} v_r`, which only depends
//! on the deformation coordinates modulo the plane spanned by `(1,...,1)` and
//! the vertex coordinates.

use std::collections::BTreeMap;

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::complex::{gauge_f4, single_simplex_f4, Label};
use crate::field::{FieldError, FieldScalar, FieldTag};
use crate::grassmann::{Generator, GrassmannElement, GrassmannOperator};
use crate::triangulation::{FaceLattice, VertexCoordinates};

/// Errors from weight and deformation data.
#[derive(Debug, Error)]
pub enum WeightError {
    #[error("invalid deformation chain: {0}")]
    InvalidInput(String),
    /// The face operator is only defined on inner triangles.
    #[error("triangle {0:?} is not an inner triangle")]
    FaceNotInner([u32; 3]),
    /// A tetrahedron chain touched the boundary without opting in.
    #[error("tetrahedron {0:?} lies in the boundary; pass include_boundary to allow it")]
    BoundaryTetWithoutFlag([u32; 4]),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// The five degree-one elements of a 4-simplex, indexed by its vertices in
/// increasing order.
pub fn v_rows(u: &[u32; 5], zeta: &VertexCoordinates) -> [GrassmannElement; 5] {
    let field = zeta.field_tag();
    let gauged = gauge_f4(&single_simplex_f4(u, zeta), zeta);
    let mut rows: Vec<GrassmannElement> = vec![GrassmannElement::zero(field); 3];
    for (r, c, coeff) in gauged.iter_entries() {
        if r >= 3 {
            continue;
        }
        let Label::TetVertex(t, i) = gauged.col_labels()[c] else {
            panic!("single-simplex block must have (tetrahedron, vertex) columns");
        };
        let g = if i == t[0] {
            Generator::a(t)
        } else {
            Generator::b(t)
        };
        rows[r] = rows[r]
            .gr_add(&GrassmannElement::from_generator(coeff.clone(), g))
            .expect("same field");
    }
    let [v1, v2, v3]: [GrassmannElement; 3] = rows.try_into().expect("three rows");
    // Solve the remaining two rows from the two linear relations.
    let s = v1
        .gr_add(&v2)
        .and_then(|x| x.gr_add(&v3))
        .expect("same field")
        .scale(&field.integer(-1));
    let t = v1
        .scale(zeta.get(u[0]))
        .gr_add(&v2.scale(zeta.get(u[1])))
        .and_then(|x| x.gr_add(&v3.scale(zeta.get(u[2]))))
        .expect("same field")
        .scale(&field.integer(-1));
    let denom_inv = zeta.diff(u[4], u[3]).inv().expect("distinct coordinates");
    let v4 = s
        .scale(zeta.get(u[4]))
        .gr_sub(&t)
        .expect("same field")
        .scale(&denom_inv);
    let v5 = t
        .gr_sub(&s.scale(zeta.get(u[3])))
        .expect("same field")
        .scale(&denom_inv);
    [v1, v2, v3, v4, v5]
}

/// The degree-three weight `W_u = v_1 v_2 v_3 / (zeta_{u_3} - zeta_{u_4})`.
pub fn weight(u: &[u32; 5], zeta: &VertexCoordinates) -> GrassmannElement {
    let [v1, v2, v3, _, _] = v_rows(u, zeta);
    let scalar = zeta.diff(u[3], u[4]).inv().expect("distinct coordinates");
    v1.gr_mul(&v2)
        .and_then(|x| x.gr_mul(&v3))
        .expect("same field")
        .scale(&scalar)
}

/// The face operator `d_s = sum_{t ⊃ s} d_{t,s}` of an inner triangle `s`,
/// a first-order differential operator in the generators of the tetrahedra
/// containing `s`. For a sorted tetrahedron `t = (i, j, k, l)` the four
/// summands are
///
/// * `s = (i,j,k)`: `(zeta_jk ∂a - zeta_ik ∂b) / zeta_kl`,
/// * `s = (i,j,l)`: `(-zeta_jl ∂a + zeta_il ∂b) / zeta_kl`,
/// * `s = (i,k,l)`: `∂a`,
/// * `s = (j,k,l)`: `-∂b`.
pub fn face_operator(
    s: &[u32; 3],
    lat: &FaceLattice,
    zeta: &VertexCoordinates,
) -> Result<GrassmannOperator, WeightError> {
    if lat.is_inner_triangle(s) != Some(true) {
        return Err(WeightError::FaceNotInner(*s));
    }
    let field = zeta.field_tag();
    let mut terms: Vec<(FieldScalar, Generator)> = Vec::new();
    for t in lat.tets_containing_triangle(s) {
        let [i, j, k, l] = t;
        let omitted = t.iter().find(|v| !s.contains(v)).expect("one extra");
        let kl_inv = zeta.diff(k, l).inv().expect("distinct coordinates");
        match *omitted {
            v if v == l => {
                terms.push((&zeta.diff(j, k) * &kl_inv, Generator::a(t)));
                terms.push(((&zeta.diff(i, k) * &kl_inv).neg(), Generator::b(t)));
            }
            v if v == k => {
                terms.push(((&zeta.diff(j, l) * &kl_inv).neg(), Generator::a(t)));
                terms.push((&zeta.diff(i, l) * &kl_inv, Generator::b(t)));
            }
            v if v == j => {
                terms.push((field.one(), Generator::a(t)));
            }
            _ => {
                terms.push((field.integer(-1), Generator::b(t)));
            }
        }
    }
    Ok(GrassmannOperator::new(field, terms))
}

/// First-order deformation coordinates: a raw 5-tuple per 4-simplex, indexed
/// by the simplex vertices. Tuples are only meaningful modulo the plane
/// spanned by `(1,...,1)` and the vertex coordinates, and everything computed
/// from an `XChain` is invariant under that shift.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XChain {
    field: FieldTag,
    coords: BTreeMap<[u32; 5], [FieldScalar; 5]>,
}

impl XChain {
    pub fn zero(field: FieldTag) -> XChain {
        XChain {
            field,
            coords: BTreeMap::new(),
        }
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coords
            .values()
            .all(|c| c.iter().all(|v| v.is_zero()))
    }

    /// The tuple at `u` (zeros when the simplex carries no deformation).
    pub fn get(&self, u: &[u32; 5]) -> [FieldScalar; 5] {
        self.coords
            .get(u)
            .cloned()
            .unwrap_or_else(|| [0; 5].map(|_| self.field.zero()))
    }

    /// Adds `c` to the coordinate of `u` at `vertex`.
    pub fn add_entry(
        &mut self,
        u: [u32; 5],
        vertex: u32,
        c: &FieldScalar,
    ) -> Result<(), WeightError> {
        let Some(pos) = u.iter().position(|v| *v == vertex) else {
            return Err(WeightError::InvalidInput(format!(
                "vertex {vertex} is not a vertex of {u:?}"
            )));
        };
        if c.field_tag() != self.field {
            return Err(FieldError::MixedFields(self.field, c.field_tag()).into());
        }
        let entry = self
            .coords
            .entry(u)
            .or_insert_with(|| [0; 5].map(|_| self.field.zero()));
        entry[pos] = &entry[pos] + c;
        Ok(())
    }

    /// Shifts the tuple at `u` by `alpha (1,...,1) + beta zeta`; deformed
    /// weights do not change under this.
    pub fn shift_by_relation_plane(
        &mut self,
        u: [u32; 5],
        alpha: &FieldScalar,
        beta: &FieldScalar,
        zeta: &VertexCoordinates,
    ) {
        let entry = self
            .coords
            .entry(u)
            .or_insert_with(|| [0; 5].map(|_| self.field.zero()));
        for (pos, v) in u.iter().enumerate() {
            entry[pos] = &(&entry[pos] + alpha) + &(beta * zeta.get(*v));
        }
    }

    /// The sum of two deformation chains.
    pub fn add(&self, other: &XChain) -> Result<XChain, WeightError> {
        if self.field != other.field {
            return Err(FieldError::MixedFields(self.field, other.field).into());
        }
        let field = self.field;
        let mut out = self.clone();
        for (u, tuple) in &other.coords {
            let entry = out
                .coords
                .entry(*u)
                .or_insert_with(|| [0; 5].map(|_| field.zero()));
            for (pos, c) in tuple.iter().enumerate() {
                entry[pos] = &entry[pos] + c;
            }
        }
        Ok(out)
    }

    pub fn simplices(&self) -> impl Iterator<Item = &[u32; 5]> {
        self.coords.keys()
    }

    /// Parses `{"chain": [[[1,2,3,4,5], 5, "2/3"], ...]}`; entries for the
    /// same `(simplex, vertex)` pair accumulate.
    pub fn from_json(text: &str, field: FieldTag) -> Result<XChain, WeightError> {
        #[derive(Deserialize)]
        struct File {
            chain: Vec<(Vec<u32>, u32, String)>,
        }
        let file: File = serde_json::from_str(text)
            .map_err(|e| WeightError::InvalidInput(format!("JSON parse error: {e}")))?;
        let mut x = XChain::zero(field);
        for (u, vertex, coeff) in file.chain {
            let u: [u32; 5] = u.clone().try_into().map_err(|_| {
                WeightError::InvalidInput(format!("simplex {u:?} does not have 5 vertices"))
            })?;
            if !u.windows(2).all(|w| w[0] < w[1]) {
                return Err(WeightError::InvalidInput(format!(
                    "simplex {u:?} is not strictly increasing"
                )));
            }
            let c = field.parse(&coeff)?;
            x.add_entry(u, vertex, &c)?;
        }
        Ok(x)
    }

    /// The export form, listing nonzero entries as `[simplex, vertex, coeff]`
    /// triples in simplex-then-vertex order.
    pub fn to_json(&self) -> Value {
        let mut chain: Vec<Value> = Vec::new();
        for (u, tuple) in &self.coords {
            for (pos, c) in tuple.iter().enumerate() {
                if !c.is_zero() {
                    chain.push(json!([u.to_vec(), u[pos], c.to_string()]));
                }
            }
        }
        json!({ "chain": chain })
    }
}

/// Turns a coefficient per tetrahedron into deformation coordinates: a
/// coefficient `c` on `t` adds `c` at `(u, opposite vertex of t in u)` for
/// every 4-simplex `u` containing `t`.  Boundary tetrahedra (one 4-simplex)
/// are rejected unless `include_boundary` is set.
pub fn xchain_from_tet_chain(
    lat: &FaceLattice,
    chain: &BTreeMap<[u32; 4], FieldScalar>,
    field: FieldTag,
    include_boundary: bool,
) -> Result<XChain, WeightError> {
    let mut x = XChain::zero(field);
    for (t, c) in chain {
        let Some(cofacets) = lat.cofacets(t) else {
            return Err(WeightError::InvalidInput(format!(
                "{t:?} is not a tetrahedron of this triangulation"
            )));
        };
        if !include_boundary && cofacets.len() == 1 {
            return Err(WeightError::BoundaryTetWithoutFlag(*t));
        }
        for ui in cofacets {
            let u = lat.simplices()[*ui];
            let opp = *u.iter().find(|v| !t.contains(v)).expect("one extra");
            x.add_entry(u, opp, c)?;
        }
    }
    Ok(x)
}

/// The first-order deformed weight
/// `W~_u = W_u + eps_u sum_r x_{u,r} v_r`.
pub fn deformed_weight(
    u: &[u32; 5],
    eps_u: i8,
    x: &XChain,
    zeta: &VertexCoordinates,
) -> GrassmannElement {
    let field = zeta.field_tag();
    let rows = v_rows(u, zeta);
    let tuple = x.get(u);
    let mut deformation = GrassmannElement::zero(field);
    for (row, coeff) in rows.iter().zip(&tuple) {
        deformation = deformation
            .gr_add(&row.scale(coeff))
            .expect("same field");
    }
    weight(u, zeta)
        .gr_add(&deformation.scale(&field.integer(eps_u as i64)))
        .expect("same field")
}
