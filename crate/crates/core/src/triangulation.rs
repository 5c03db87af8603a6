//! Triangulated compact 4-manifolds: simplex lists, the face lattice,
//! orientations and exact vertex coordinates.
//!
//! A triangulation is a list of 4-simplices, each a strictly increasing
//! 5-tuple of 1-based vertex ids, together with an orientation sign per
//! simplex. A tetrahedron shared by two 4-simplices is *inner*; a tetrahedron
//! of exactly one 4-simplex is *boundary*. Lower-dimensional faces are
//! boundary precisely when they lie in some boundary tetrahedron. Vertex
//! coordinates are distinct scalars of one exact field; all matrix and weight
//! constructions are rational functions of them.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use itertools::Itertools;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::field::{FieldError, FieldScalar, FieldTag};

/// Errors produced while building or interrogating triangulations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TriangulationError {
    /// A tetrahedron occurred in more than two 4-simplices.
    #[error("tetrahedron {0:?} lies in more than two 4-simplices")]
    TetrahedronInThreeSimplices([u32; 4]),
    /// Stored orientations do not induce opposite signs on a shared facet.
    #[error("orientations are inconsistent across inner tetrahedron {0:?}")]
    OrientationInconsistent([u32; 4]),
    /// Orientation propagation ran into a contradiction.
    #[error("no consistent orientation exists (first contradiction at 4-simplex {0:?})")]
    NonOrientable([u32; 5]),
    /// The dual adjacency graph is not connected.
    #[error("the dual adjacency graph across inner tetrahedra is not connected")]
    DisconnectedInterior,
    /// `boundary_sign` was asked about a non-facet.
    #[error("{face:?} is not a facet of {cofacet:?}")]
    NotAFacet { face: Vec<u32>, cofacet: Vec<u32> },
    /// An unknown built-in cluster name.
    #[error("unknown built-in triangulation {0:?}")]
    UnknownBuiltin(String),
    /// GF(p) has fewer than `needed` elements, so distinct coordinates do not fit.
    #[error("field gf:{p} is too small for {needed} distinct vertex coordinates")]
    FieldTooSmall { p: u64, needed: u32 },
    /// Malformed input data.
    #[error("invalid triangulation input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Names of the built-in clusters.
pub const BUILTIN_NAMES: [&str; 5] = [
    "pachner33_lhs",
    "pachner33_rhs",
    "pachner24_lhs",
    "pachner24_rhs",
    "boundary_delta5",
];

/// A triangulated compact oriented 4-manifold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangulation {
    n_vertices: u32,
    simplices: Vec<[u32; 5]>,
    epsilon: Vec<i8>,
}

impl Triangulation {
    /// Builds a triangulation from sorted simplices. When `epsilon` is absent
    /// the orientation is propagated from the first simplex with sign `+1`.
    pub fn new(
        n_vertices: u32,
        simplices: Vec<[u32; 5]>,
        epsilon: Option<Vec<i8>>,
    ) -> Result<Triangulation, TriangulationError> {
        if simplices.is_empty() {
            return Err(TriangulationError::InvalidInput(
                "no 4-simplices given".into(),
            ));
        }
        for u in &simplices {
            if !u.windows(2).all(|w| w[0] < w[1]) {
                return Err(TriangulationError::InvalidInput(format!(
                    "simplex {u:?} is not strictly increasing"
                )));
            }
            if u[0] < 1 || u[4] > n_vertices {
                return Err(TriangulationError::InvalidInput(format!(
                    "simplex {u:?} uses vertices outside 1..={n_vertices}"
                )));
            }
        }
        let epsilon = match epsilon {
            Some(e) => {
                if e.len() != simplices.len() {
                    return Err(TriangulationError::InvalidInput(format!(
                        "{} orientations for {} simplices",
                        e.len(),
                        simplices.len()
                    )));
                }
                if e.iter().any(|s| *s != 1 && *s != -1) {
                    return Err(TriangulationError::InvalidInput(
                        "orientations must be +1 or -1".into(),
                    ));
                }
                e
            }
            None => propagate_orientation(&simplices, 0, 1)?,
        };
        let mut order: Vec<usize> = (0..simplices.len()).collect();
        order.sort_by_key(|&i| simplices[i]);
        if order.windows(2).any(|w| simplices[w[0]] == simplices[w[1]]) {
            return Err(TriangulationError::InvalidInput(
                "duplicate 4-simplex".into(),
            ));
        }
        let t = Triangulation {
            n_vertices,
            simplices: order.iter().map(|&i| simplices[i]).collect(),
            epsilon: order.iter().map(|&i| epsilon[i]).collect(),
        };
        tet_cofacet_map(&t.simplices)?;
        Ok(t)
    }

    /// One of the named clusters around the Pachner moves, with the standard
    /// orientation: the side listed first in a move is oriented like the
    /// boundary of the 5-simplex on vertices 1..6, the opposite side with the
    /// reversed global sign, so that both sides induce the same orientation on
    /// their common boundary.
    pub fn builtin(name: &str) -> Result<Triangulation, TriangulationError> {
        let (simplices, epsilon): (Vec<[u32; 5]>, Vec<i8>) = match name {
            "pachner33_lhs" => (
                vec![[1, 2, 3, 4, 5], [1, 2, 3, 4, 6], [1, 2, 3, 5, 6]],
                vec![1, -1, 1],
            ),
            "pachner33_rhs" => (
                vec![[1, 2, 4, 5, 6], [1, 3, 4, 5, 6], [2, 3, 4, 5, 6]],
                vec![1, -1, 1],
            ),
            "pachner24_lhs" => (vec![[1, 2, 3, 4, 5], [1, 2, 3, 4, 6]], vec![1, -1]),
            "pachner24_rhs" => (
                vec![
                    [1, 2, 3, 5, 6],
                    [1, 2, 4, 5, 6],
                    [1, 3, 4, 5, 6],
                    [2, 3, 4, 5, 6],
                ],
                vec![-1, 1, -1, 1],
            ),
            "boundary_delta5" => (
                vec![
                    [1, 2, 3, 4, 5],
                    [1, 2, 3, 4, 6],
                    [1, 2, 3, 5, 6],
                    [1, 2, 4, 5, 6],
                    [1, 3, 4, 5, 6],
                    [2, 3, 4, 5, 6],
                ],
                vec![1, -1, 1, -1, 1, -1],
            ),
            other => return Err(TriangulationError::UnknownBuiltin(other.to_owned())),
        };
        Triangulation::new(6, simplices, Some(epsilon))
    }

    pub fn n_vertices(&self) -> u32 {
        self.n_vertices
    }

    /// The 4-simplices in increasing lexicographic order.
    pub fn simplices(&self) -> &[[u32; 5]] {
        &self.simplices
    }

    /// The orientation sign of the `i`-th simplex.
    pub fn epsilon_by_index(&self, i: usize) -> i8 {
        self.epsilon[i]
    }

    /// The orientation sign of a simplex.
    pub fn epsilon(&self, u: &[u32; 5]) -> Option<i8> {
        self.simplex_index(u).map(|i| self.epsilon[i])
    }

    pub fn simplex_index(&self, u: &[u32; 5]) -> Option<usize> {
        self.simplices.binary_search(u).ok()
    }

    /// Recomputes every orientation sign by walking the dual adjacency graph
    /// from `reference`, which receives `sign`. Two 4-simplices sharing an
    /// inner tetrahedron must induce opposite signs on it.
    pub fn orient_from_reference(
        &self,
        reference: &[u32; 5],
        sign: i8,
    ) -> Result<Triangulation, TriangulationError> {
        let start = self.simplex_index(reference).ok_or_else(|| {
            TriangulationError::InvalidInput(format!("{reference:?} is not a 4-simplex here"))
        })?;
        let epsilon = propagate_orientation(&self.simplices, start, sign)?;
        Ok(Triangulation {
            n_vertices: self.n_vertices,
            simplices: self.simplices.clone(),
            epsilon,
        })
    }

    /// Builds the face lattice, checking the two-cofacet rule and the
    /// consistency of the stored orientations.
    pub fn lattice(&self) -> Result<FaceLattice, TriangulationError> {
        let tet_map = tet_cofacet_map(&self.simplices)?;
        let mut tets: BTreeMap<[u32; 4], TetInfo> = BTreeMap::new();
        for (t, cofacets) in tet_map {
            let inner = cofacets.len() == 2;
            if inner {
                let (u1, u2) = (cofacets[0], cofacets[1]);
                let s1 = boundary_sign(&t, &self.simplices[u1])? as i32;
                let s2 = boundary_sign(&t, &self.simplices[u2])? as i32;
                let e1 = self.epsilon[u1] as i32;
                let e2 = self.epsilon[u2] as i32;
                if e1 * s1 + e2 * s2 != 0 {
                    return Err(TriangulationError::OrientationInconsistent(t));
                }
            }
            tets.insert(t, TetInfo { cofacets, inner });
        }
        let boundary_tets: Vec<[u32; 4]> = tets
            .iter()
            .filter(|(_, info)| !info.inner)
            .map(|(t, _)| *t)
            .collect();
        let in_boundary_tet = |face: &[u32]| {
            boundary_tets
                .iter()
                .any(|t| face.iter().all(|v| t.contains(v)))
        };
        let mut triangles: BTreeMap<[u32; 3], bool> = BTreeMap::new();
        let mut edges: BTreeMap<[u32; 2], bool> = BTreeMap::new();
        let mut vertices: BTreeMap<u32, bool> = BTreeMap::new();
        for t in tets.keys() {
            for s in t.iter().copied().combinations(3) {
                let s = [s[0], s[1], s[2]];
                triangles.entry(s).or_insert_with(|| !in_boundary_tet(&s));
            }
            for e in t.iter().copied().combinations(2) {
                let e = [e[0], e[1]];
                edges.entry(e).or_insert_with(|| !in_boundary_tet(&e));
            }
            for v in t {
                vertices.entry(*v).or_insert_with(|| !in_boundary_tet(&[*v]));
            }
        }
        Ok(FaceLattice {
            simplices: self.simplices.clone(),
            tets,
            triangles,
            edges,
            vertices,
        })
    }

    /// Draws distinct vertex coordinates, reproducibly from the seed.
    pub fn random_coordinates(
        &self,
        field: FieldTag,
        seed: u64,
    ) -> Result<VertexCoordinates, TriangulationError> {
        if let FieldTag::PrimeField(p) = field {
            if p < self.n_vertices as u64 {
                return Err(TriangulationError::FieldTooSmall {
                    p,
                    needed: self.n_vertices,
                });
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut taken: BTreeMap<String, ()> = BTreeMap::new();
        let mut zeta = BTreeMap::new();
        for v in 1..=self.n_vertices {
            loop {
                let c = field.random_scalar(&mut rng);
                let key = c.to_string();
                if let std::collections::btree_map::Entry::Vacant(e) = taken.entry(key) {
                    e.insert(());
                    zeta.insert(v, c);
                    break;
                }
            }
        }
        VertexCoordinates::new(field, zeta)
    }

    /// Parses the JSON input format; returns the triangulation and, when the
    /// file pins vertex coordinates, those coordinates.
    pub fn from_json(
        text: &str,
    ) -> Result<(Triangulation, Option<VertexCoordinates>), TriangulationError> {
        let file: TriangulationFile = serde_json::from_str(text)
            .map_err(|e| TriangulationError::InvalidInput(format!("JSON parse error: {e}")))?;
        let mut simplices = Vec::with_capacity(file.simplices.len());
        for s in &file.simplices {
            let arr: [u32; 5] = s.clone().try_into().map_err(|_| {
                TriangulationError::InvalidInput(format!("simplex {s:?} does not have 5 vertices"))
            })?;
            simplices.push(arr);
        }
        let tri = Triangulation::new(file.n_vertices, simplices, file.orientations)?;
        let zeta = match file.zeta {
            None => None,
            Some(map) => {
                let field: FieldTag = file
                    .field
                    .as_deref()
                    .ok_or_else(|| {
                        TriangulationError::InvalidInput(
                            "\"field\" is required when \"zeta\" is given".into(),
                        )
                    })?
                    .parse()?;
                let mut zeta = BTreeMap::new();
                for (k, v) in map {
                    let vertex: u32 = k.parse().map_err(|_| {
                        TriangulationError::InvalidInput(format!("bad vertex id {k:?} in zeta"))
                    })?;
                    zeta.insert(vertex, field.parse(&v)?);
                }
                for v in 1..=file.n_vertices {
                    if !zeta.contains_key(&v) {
                        return Err(TriangulationError::InvalidInput(format!(
                            "zeta is missing vertex {v}"
                        )));
                    }
                }
                Some(VertexCoordinates::new(field, zeta)?)
            }
        };
        Ok((tri, zeta))
    }
}

#[derive(Deserialize)]
struct TriangulationFile {
    n_vertices: u32,
    simplices: Vec<Vec<u32>>,
    #[serde(default)]
    orientations: Option<Vec<i8>>,
    #[serde(default)]
    zeta: Option<BTreeMap<String, String>>,
    #[serde(default)]
    field: Option<String>,
}

/// Cofacet indices per tetrahedron, rejecting tetrahedra in 3+ simplices.
fn tet_cofacet_map(
    simplices: &[[u32; 5]],
) -> Result<BTreeMap<[u32; 4], Vec<usize>>, TriangulationError> {
    let mut map: BTreeMap<[u32; 4], Vec<usize>> = BTreeMap::new();
    for (i, u) in simplices.iter().enumerate() {
        for omit in 0..5 {
            let mut t = [0u32; 4];
            let mut k = 0;
            for (j, v) in u.iter().enumerate() {
                if j != omit {
                    t[k] = *v;
                    k += 1;
                }
            }
            let entry = map.entry(t).or_default();
            entry.push(i);
            if entry.len() > 2 {
                return Err(TriangulationError::TetrahedronInThreeSimplices(t));
            }
        }
    }
    Ok(map)
}

/// Breadth-first orientation propagation across shared inner tetrahedra.
fn propagate_orientation(
    simplices: &[[u32; 5]],
    start: usize,
    sign: i8,
) -> Result<Vec<i8>, TriangulationError> {
    let tet_map = tet_cofacet_map(simplices)?;
    let mut eps: Vec<i8> = vec![0; simplices.len()];
    eps[start] = sign;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        for (t, cofacets) in &tet_map {
            if cofacets.len() != 2 || !cofacets.contains(&i) {
                continue;
            }
            let j = if cofacets[0] == i {
                cofacets[1]
            } else {
                cofacets[0]
            };
            let si = boundary_sign(t, &simplices[i]).expect("facet by construction");
            let sj = boundary_sign(t, &simplices[j]).expect("facet by construction");
            // Opposite induced orientations: eps_i * si = -eps_j * sj.
            let required = -eps[i] * si * sj;
            if eps[j] == 0 {
                eps[j] = required;
                queue.push_back(j);
            } else if eps[j] != required {
                return Err(TriangulationError::NonOrientable(simplices[j]));
            }
        }
    }
    if eps.contains(&0) {
        return Err(TriangulationError::DisconnectedInterior);
    }
    Ok(eps)
}

/// The sign with which `face` enters the boundary of `cofacet`: `(-1)^k`
/// where `k` is the 0-based position of the omitted vertex.
pub fn boundary_sign(face: &[u32], cofacet: &[u32]) -> Result<i8, TriangulationError> {
    let err = || TriangulationError::NotAFacet {
        face: face.to_vec(),
        cofacet: cofacet.to_vec(),
    };
    if face.len() + 1 != cofacet.len() {
        return Err(err());
    }
    let mut omitted = None;
    let mut fi = 0;
    for (k, v) in cofacet.iter().enumerate() {
        if fi < face.len() && face[fi] == *v {
            fi += 1;
        } else if omitted.is_none() {
            omitted = Some(k);
        } else {
            return Err(err());
        }
    }
    if fi != face.len() {
        return Err(err());
    }
    let k = omitted.expect("lengths differ by one");
    Ok(if k % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, Clone)]
struct TetInfo {
    cofacets: Vec<usize>,
    inner: bool,
}

/// All faces of a triangulation with inner/boundary classification.
#[derive(Debug, Clone)]
pub struct FaceLattice {
    simplices: Vec<[u32; 5]>,
    tets: BTreeMap<[u32; 4], TetInfo>,
    triangles: BTreeMap<[u32; 3], bool>,
    edges: BTreeMap<[u32; 2], bool>,
    vertices: BTreeMap<u32, bool>,
}

impl FaceLattice {
    pub fn simplices(&self) -> &[[u32; 5]] {
        &self.simplices
    }

    pub fn tetrahedra(&self) -> impl Iterator<Item = [u32; 4]> + '_ {
        self.tets.keys().copied()
    }

    pub fn inner_tetrahedra(&self) -> Vec<[u32; 4]> {
        self.tets
            .iter()
            .filter(|(_, i)| i.inner)
            .map(|(t, _)| *t)
            .collect()
    }

    pub fn boundary_tetrahedra(&self) -> Vec<[u32; 4]> {
        self.tets
            .iter()
            .filter(|(_, i)| !i.inner)
            .map(|(t, _)| *t)
            .collect()
    }

    pub fn is_inner_tetrahedron(&self, t: &[u32; 4]) -> Option<bool> {
        self.tets.get(t).map(|i| i.inner)
    }

    /// Indices (into `simplices`) of the 4-simplices containing `t`.
    pub fn cofacets(&self, t: &[u32; 4]) -> Option<&[usize]> {
        self.tets.get(t).map(|i| i.cofacets.as_slice())
    }

    pub fn triangles(&self) -> impl Iterator<Item = [u32; 3]> + '_ {
        self.triangles.keys().copied()
    }

    pub fn inner_triangles(&self) -> Vec<[u32; 3]> {
        self.triangles
            .iter()
            .filter(|(_, inner)| **inner)
            .map(|(s, _)| *s)
            .collect()
    }

    pub fn is_inner_triangle(&self, s: &[u32; 3]) -> Option<bool> {
        self.triangles.get(s).copied()
    }

    pub fn edges(&self) -> impl Iterator<Item = [u32; 2]> + '_ {
        self.edges.keys().copied()
    }

    pub fn inner_edges(&self) -> Vec<[u32; 2]> {
        self.edges
            .iter()
            .filter(|(_, inner)| **inner)
            .map(|(e, _)| *e)
            .collect()
    }

    pub fn is_inner_edge(&self, e: &[u32; 2]) -> Option<bool> {
        self.edges.get(e).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.vertices.keys().copied()
    }

    pub fn inner_vertices(&self) -> Vec<u32> {
        self.vertices
            .iter()
            .filter(|(_, inner)| **inner)
            .map(|(v, _)| *v)
            .collect()
    }

    pub fn is_inner_vertex(&self, v: u32) -> Option<bool> {
        self.vertices.get(&v).copied()
    }

    /// Tetrahedra having `s` as a face.
    pub fn tets_containing_triangle(&self, s: &[u32; 3]) -> Vec<[u32; 4]> {
        self.tets
            .keys()
            .filter(|t| s.iter().all(|v| t.contains(v)))
            .copied()
            .collect()
    }
}

/// Distinct exact coordinates at the vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexCoordinates {
    field: FieldTag,
    zeta: BTreeMap<u32, FieldScalar>,
}

impl VertexCoordinates {
    /// Validates that all values belong to `field` and are pairwise distinct.
    pub fn new(
        field: FieldTag,
        zeta: BTreeMap<u32, FieldScalar>,
    ) -> Result<VertexCoordinates, TriangulationError> {
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for (v, c) in &zeta {
            if c.field_tag() != field {
                return Err(FieldError::MixedFields(field, c.field_tag()).into());
            }
            if !seen.insert(c.to_string()) {
                return Err(TriangulationError::InvalidInput(format!(
                    "coordinate {c} at vertex {v} repeats an earlier coordinate"
                )));
            }
        }
        Ok(VertexCoordinates { field, zeta })
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    /// The coordinate of a vertex; the vertex must exist.
    pub fn get(&self, v: u32) -> &FieldScalar {
        self.zeta
            .get(&v)
            .unwrap_or_else(|| panic!("no coordinate for vertex {v}"))
    }

    /// The difference `zeta_i - zeta_j`, nonzero whenever `i != j`.
    pub fn diff(&self, i: u32, j: u32) -> FieldScalar {
        self.get(i) - self.get(j)
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.zeta.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &FieldScalar)> {
        self.zeta.iter().map(|(v, c)| (*v, c))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zeta_123456() -> VertexCoordinates {
        let field = FieldTag::Rationals;
        let zeta = (1..=6).map(|v| (v, field.integer(v as i64))).collect();
        VertexCoordinates::new(field, zeta).unwrap()
    }

    #[test]
    fn builtin_names_resolve() {
        for name in BUILTIN_NAMES {
            assert!(Triangulation::builtin(name).is_ok(), "{name}");
        }
        assert!(matches!(
            Triangulation::builtin("pachner42"),
            Err(TriangulationError::UnknownBuiltin(_))
        ));
    }

    #[test]
    fn pachner33_lhs_lattice() {
        let t = Triangulation::builtin("pachner33_lhs").unwrap();
        let l = t.lattice().unwrap();
        assert_eq!(
            l.inner_tetrahedra(),
            vec![[1, 2, 3, 4], [1, 2, 3, 5], [1, 2, 3, 6]]
        );
        assert_eq!(l.tetrahedra().count(), 12);
        assert_eq!(l.boundary_tetrahedra().len(), 9);
        assert_eq!(l.inner_triangles(), vec![[1, 2, 3]]);
        assert!(l.inner_vertices().is_empty());
        assert!(l.inner_edges().is_empty());
    }

    #[test]
    fn pachner33_rhs_lattice() {
        let t = Triangulation::builtin("pachner33_rhs").unwrap();
        let l = t.lattice().unwrap();
        assert_eq!(
            l.inner_tetrahedra(),
            vec![[1, 4, 5, 6], [2, 4, 5, 6], [3, 4, 5, 6]]
        );
        assert_eq!(l.inner_triangles(), vec![[4, 5, 6]]);
        assert!(l.inner_vertices().is_empty());
    }

    #[test]
    fn pachner33_sides_share_their_boundary() {
        let lhs = Triangulation::builtin("pachner33_lhs").unwrap();
        let rhs = Triangulation::builtin("pachner33_rhs").unwrap();
        let b_lhs = lhs.lattice().unwrap().boundary_tetrahedra();
        let b_rhs = rhs.lattice().unwrap().boundary_tetrahedra();
        assert_eq!(b_lhs, b_rhs);
        assert_eq!(
            b_lhs,
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
    }

    #[test]
    fn pachner24_lattices() {
        let lhs = Triangulation::builtin("pachner24_lhs").unwrap();
        let l = lhs.lattice().unwrap();
        assert_eq!(l.inner_tetrahedra(), vec![[1, 2, 3, 4]]);
        assert!(l.inner_triangles().is_empty());
        assert!(l.inner_edges().is_empty());

        let rhs = Triangulation::builtin("pachner24_rhs").unwrap();
        let r = rhs.lattice().unwrap();
        assert_eq!(
            r.inner_tetrahedra(),
            vec![
                [1, 2, 5, 6],
                [1, 3, 5, 6],
                [1, 4, 5, 6],
                [2, 3, 5, 6],
                [2, 4, 5, 6],
                [3, 4, 5, 6],
            ]
        );
        assert_eq!(
            r.inner_triangles(),
            vec![[1, 5, 6], [2, 5, 6], [3, 5, 6], [4, 5, 6]]
        );
        assert_eq!(r.inner_edges(), vec![[5, 6]]);
        assert!(r.inner_vertices().is_empty());
        // The two sides share all eight boundary tetrahedra.
        assert_eq!(l.boundary_tetrahedra(), r.boundary_tetrahedra());
        assert_eq!(l.boundary_tetrahedra().len(), 8);
    }

    #[test]
    fn boundary_delta5_is_closed() {
        let t = Triangulation::builtin("boundary_delta5").unwrap();
        let l = t.lattice().unwrap();
        assert_eq!(l.tetrahedra().count(), 15);
        assert_eq!(l.inner_tetrahedra().len(), 15);
        for tet in l.tetrahedra() {
            assert_eq!(l.cofacets(&tet).unwrap().len(), 2);
        }
        assert_eq!(l.inner_triangles().len(), 20);
        assert_eq!(l.inner_edges().len(), 15);
        assert_eq!(l.inner_vertices().len(), 6);
    }

    #[test]
    fn boundary_sign_examples() {
        assert_eq!(boundary_sign(&[1, 2, 3], &[1, 2, 3, 4]).unwrap(), -1);
        assert_eq!(boundary_sign(&[2, 3, 4], &[1, 2, 3, 4]).unwrap(), 1);
        assert_eq!(boundary_sign(&[1, 3, 4], &[1, 2, 3, 4]).unwrap(), -1);
        assert_eq!(boundary_sign(&[1, 2, 4], &[1, 2, 3, 4]).unwrap(), 1);
        assert_eq!(
            boundary_sign(&[1, 2, 3, 4], &[1, 2, 3, 4, 5]).unwrap(),
            1
        );
        assert!(matches!(
            boundary_sign(&[1, 2, 5], &[1, 2, 3, 4]),
            Err(TriangulationError::NotAFacet { .. })
        ));
        assert!(matches!(
            boundary_sign(&[1, 2], &[1, 2, 3, 4]),
            Err(TriangulationError::NotAFacet { .. })
        ));
    }

    /// The square of the simplicial boundary operator vanishes: signs from
    /// `boundary_sign` cancel along codimension-2 faces.
    #[test]
    fn boundary_of_boundary_is_zero() {
        for name in BUILTIN_NAMES {
            let t = Triangulation::builtin(name).unwrap();
            for u in t.simplices() {
                let mut acc: BTreeMap<[u32; 3], i32> = BTreeMap::new();
                for tet in u.iter().copied().combinations(4) {
                    let tet = [tet[0], tet[1], tet[2], tet[3]];
                    let s1 = boundary_sign(&tet, u).unwrap() as i32;
                    for tri in tet.iter().copied().combinations(3) {
                        let tri = [tri[0], tri[1], tri[2]];
                        let s2 = boundary_sign(&tri, &tet).unwrap() as i32;
                        *acc.entry(tri).or_insert(0) += s1 * s2;
                    }
                }
                assert!(acc.values().all(|v| *v == 0), "{name}: {u:?}");
            }
        }
    }

    #[test]
    fn stored_orientations_match_propagation() {
        // Each built-in's stored signs agree with propagation from its first
        // simplex with the stored sign.
        for name in BUILTIN_NAMES {
            let t = Triangulation::builtin(name).unwrap();
            let reference = t.simplices()[0];
            let again = t
                .orient_from_reference(&reference, t.epsilon_by_index(0))
                .unwrap();
            assert_eq!(&again, &t, "{name}");
        }
    }

    #[test]
    fn pinned_move_orientations() {
        let lhs = Triangulation::builtin("pachner33_lhs").unwrap();
        assert_eq!(lhs.epsilon(&[1, 2, 3, 4, 5]), Some(1));
        assert_eq!(lhs.epsilon(&[1, 2, 3, 4, 6]), Some(-1));
        assert_eq!(lhs.epsilon(&[1, 2, 3, 5, 6]), Some(1));
        let rhs = Triangulation::builtin("pachner33_rhs").unwrap();
        assert_eq!(rhs.epsilon(&[1, 2, 4, 5, 6]), Some(1));
        assert_eq!(rhs.epsilon(&[1, 3, 4, 5, 6]), Some(-1));
        assert_eq!(rhs.epsilon(&[2, 3, 4, 5, 6]), Some(1));
    }

    #[test]
    fn flipping_the_reference_flips_every_sign() {
        for name in BUILTIN_NAMES {
            let t = Triangulation::builtin(name).unwrap();
            let reference = t.simplices()[0];
            let plus = t.orient_from_reference(&reference, 1).unwrap();
            let minus = t.orient_from_reference(&reference, -1).unwrap();
            for u in t.simplices() {
                assert_eq!(plus.epsilon(u).unwrap(), -minus.epsilon(u).unwrap());
            }
        }
    }

    #[test]
    fn inconsistent_orientations_are_rejected() {
        let t = Triangulation::new(
            6,
            vec![[1, 2, 3, 4, 5], [1, 2, 3, 4, 6], [1, 2, 3, 5, 6]],
            Some(vec![1, 1, 1]),
        )
        .unwrap();
        assert!(matches!(
            t.lattice(),
            Err(TriangulationError::OrientationInconsistent(_))
        ));
    }

    #[test]
    fn overfull_tetrahedron_is_rejected() {
        let r = Triangulation::new(
            7,
            vec![[1, 2, 3, 4, 5], [1, 2, 3, 4, 6], [1, 2, 3, 4, 7]],
            None,
        );
        assert_eq!(
            r,
            Err(TriangulationError::TetrahedronInThreeSimplices([
                1, 2, 3, 4
            ]))
        );
    }

    #[test]
    fn disconnected_interior_is_rejected() {
        let r = Triangulation::new(10, vec![[1, 2, 3, 4, 5], [6, 7, 8, 9, 10]], None);
        assert_eq!(r, Err(TriangulationError::DisconnectedInterior));
    }

    #[test]
    fn random_coordinates_are_distinct_and_reproducible() {
        let t = Triangulation::builtin("boundary_delta5").unwrap();
        for field in [FieldTag::Rationals, FieldTag::PrimeField(1000003)] {
            let a = t.random_coordinates(field, 42).unwrap();
            let b = t.random_coordinates(field, 42).unwrap();
            assert_eq!(a, b);
            let c = t.random_coordinates(field, 43).unwrap();
            assert_ne!(a, c);
        }
    }

    #[test]
    fn tiny_fields_are_rejected_or_exhausted() {
        let t = Triangulation::builtin("boundary_delta5").unwrap();
        assert_eq!(
            t.random_coordinates(FieldTag::PrimeField(5), 1),
            Err(TriangulationError::FieldTooSmall { p: 5, needed: 6 })
        );
        // Six vertices in GF(7) still works: seven residues available.
        let z = t.random_coordinates(FieldTag::PrimeField(7), 1).unwrap();
        let values: BTreeSet<String> = z.iter().map(|(_, c)| c.to_string()).collect();
        assert_eq!(values.len(), 6);
    }

    #[test]
    fn coordinates_must_be_distinct() {
        let field = FieldTag::Rationals;
        let mut zeta: BTreeMap<u32, FieldScalar> = BTreeMap::new();
        zeta.insert(1, field.integer(3));
        zeta.insert(2, field.integer(3));
        assert!(matches!(
            VertexCoordinates::new(field, zeta),
            Err(TriangulationError::InvalidInput(_))
        ));
    }

    #[test]
    fn json_round_trip_with_zeta() {
        let text = r#"{
            "n_vertices": 6,
            "simplices": [[1,2,3,4,5],[1,2,3,4,6],[1,2,3,5,6]],
            "orientations": [1,-1,1],
            "zeta": {"1":"1","2":"1/2","3":"3","4":"-4","5":"5/7","6":"6"},
            "field": "q"
        }"#;
        let (tri, zeta) = Triangulation::from_json(text).unwrap();
        assert_eq!(&tri, &Triangulation::builtin("pachner33_lhs").unwrap());
        let zeta = zeta.unwrap();
        assert_eq!(zeta.get(2).to_string(), "1/2");
        assert_eq!(zeta.diff(1, 4).to_string(), "5");
    }

    #[test]
    fn json_without_orientations_propagates() {
        let text = r#"{
            "n_vertices": 6,
            "simplices": [[1,2,3,4,5],[1,2,3,4,6],[1,2,3,5,6]]
        }"#;
        let (tri, zeta) = Triangulation::from_json(text).unwrap();
        assert!(zeta.is_none());
        assert_eq!(&tri, &Triangulation::builtin("pachner33_lhs").unwrap());
    }

    #[test]
    fn json_errors_are_reported() {
        assert!(matches!(
            Triangulation::from_json("{"),
            Err(TriangulationError::InvalidInput(_))
        ));
        // Unsorted simplex.
        let text = r#"{"n_vertices": 6, "simplices": [[2,1,3,4,5]]}"#;
        assert!(matches!(
            Triangulation::from_json(text),
            Err(TriangulationError::InvalidInput(_))
        ));
        // Zeta without field.
        let text = r#"{"n_vertices": 6,
            "simplices": [[1,2,3,4,5],[1,2,3,4,6],[1,2,3,5,6]],
            "zeta": {"1":"1","2":"2","3":"3","4":"4","5":"5","6":"6"}}"#;
        assert!(matches!(
            Triangulation::from_json(text),
            Err(TriangulationError::InvalidInput(_))
        ));
    }

    #[test]
    fn diff_is_antisymmetric() {
        let zeta = zeta_123456();
        for i in 1..=6 {
            for j in 1..=6 {
                let d = zeta.diff(i, j);
                assert_eq!(d, zeta.diff(j, i).neg());
                assert_eq!(d.is_zero(), i == j);
            }
        }
    }
}
