//! The two exotic chain complexes attached to a coordinatized triangulation.
//!
//! **First complex** (five spaces, four maps). For `k = 2, 3, 4` let `W_k` be
//! the span of pairs `(a, i)` of a `k`-simplex `a` and a vertex `i` of `a`,
//! where `a` ranges over *inner* triangles for `k = 2` and over *all*
//! tetrahedra and 4-simplices for `k = 3, 4`. The subspace `V_k` is cut out,
//! per simplex, by the two linear constraints
//! `sum_i y_{a,i} = 0` and `sum_i zeta_i y_{a,i} = 0`,
//! so each triangle contributes one degree of freedom and each tetrahedron or
//! 4-simplex two or three. A distinguished basis keeps the coordinates at the
//! first one, two or three vertices of each simplex; the remaining two are
//! recovered by [`lift_to_constrained`]. The complex is
//! `V0 -> V2 -> V3 -> V4 -> V0*` with `V0` (`V0*`) spanned by the inner
//! vertices, and its maps `f2..f5` are rational in the vertex coordinates.
//!
//! **Second complex** (five spaces, four maps `g2..g5`). It runs from inner
//! vertices through inner tetrahedra and a three-dimensional space per
//! 4-simplex to oriented inner edges and a doubled copy of the inner
//! vertices. Its middle space is presented by 5-tuples per 4-simplex modulo
//! the plane spanned by `(1,...,1)` and `(zeta_{u_0},...,zeta_{u_4})`; the
//! canonical form puts the last two coordinates to zero.
//!
//! Both complexes square to zero for every triangulated compact oriented
//! 4-manifold and every choice of distinct coordinates; the test suites check
//! this machine-exactly, next to pinned dimensions and ranks.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use serde_json::{json, Value};
use thiserror::Error;

use crate::field::{FieldScalar, FieldTag};
use crate::triangulation::{boundary_sign, FaceLattice, Triangulation, VertexCoordinates};

/// Errors from chain-complex level computations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    /// Two consecutive maps fed to the homology computation do not compose
    /// to zero.
    #[error("maps {0} and {1} do not compose to zero; this is not a complex")]
    NotAComplex(usize, usize),
    /// A triangle was requested inside a 4-simplex that does not contain it.
    #[error("triangle {triangle:?} is not a face of {simplex:?}")]
    TriangleNotInSimplex { triangle: [u32; 3], simplex: [u32; 5] },
}

/// Formats a vertex tuple: digits concatenated while all ids are below ten,
/// comma-separated otherwise.
fn fmt_verts(vs: &[u32]) -> String {
    if vs.iter().all(|v| *v < 10) {
        vs.iter().map(|v| v.to_string()).collect()
    } else {
        vs.iter().map(|v| v.to_string()).join(",")
    }
}

/// A basis vector of one of the chain spaces.
///
/// The display forms (`V3:(1234,1)`, `GT:1234`, ...) are the row and column
/// labels used by the JSON matrix export.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Label {
    /// A coordinate on an inner vertex (source of the first complex).
    Vertex(u32),
    /// A `(triangle, vertex)` coordinate.
    TriVertex([u32; 3], u32),
    /// A `(tetrahedron, vertex)` coordinate.
    TetVertex([u32; 4], u32),
    /// A `(4-simplex, vertex)` coordinate.
    SimpVertex([u32; 5], u32),
    /// A coordinate on an inner vertex (target of the first complex).
    DualVertex(u32),
    /// An inner vertex (source of the second complex).
    GVertex(u32),
    /// An inner tetrahedron.
    GTet([u32; 4]),
    /// A canonical middle coordinate: 4-simplex and one of its first three
    /// vertices.
    GMid([u32; 5], u32),
    /// An oriented inner edge `i -> j` with `i < j`.
    GEdge([u32; 2]),
    /// First copy of an inner vertex (target of the second complex).
    GDualE(u32),
    /// Second copy of an inner vertex (target of the second complex).
    GDualF(u32),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Vertex(v) => write!(f, "V0:{v}"),
            Label::TriVertex(s, i) => write!(f, "V2:({},{})", fmt_verts(s), i),
            Label::TetVertex(t, i) => write!(f, "V3:({},{})", fmt_verts(t), i),
            Label::SimpVertex(u, i) => write!(f, "V4:({},{})", fmt_verts(u), i),
            Label::DualVertex(v) => write!(f, "V0*:{v}"),
            Label::GVertex(v) => write!(f, "GV:{v}"),
            Label::GTet(t) => write!(f, "GT:{}", fmt_verts(t)),
            Label::GMid(u, r) => write!(f, "GM:({},{})", fmt_verts(u), r),
            Label::GEdge(e) => write!(f, "GE:({},{})", e[0], e[1]),
            Label::GDualE(v) => write!(f, "GVe:{v}"),
            Label::GDualF(v) => write!(f, "GVf:{v}"),
        }
    }
}

/// A sparse exact matrix with labelled rows and columns.
///
/// The matrix acts on coordinate vectors over its column labels and produces
/// vectors over its row labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactMatrix {
    field: FieldTag,
    rows: Vec<Label>,
    cols: Vec<Label>,
    row_index: BTreeMap<Label, usize>,
    col_index: BTreeMap<Label, usize>,
    entries: BTreeMap<(usize, usize), FieldScalar>,
}

impl ExactMatrix {
    /// An all-zero matrix over the given bases. Labels must be unique per
    /// side.
    pub fn new(field: FieldTag, rows: Vec<Label>, cols: Vec<Label>) -> ExactMatrix {
        let row_index: BTreeMap<Label, usize> =
            rows.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        let col_index: BTreeMap<Label, usize> =
            cols.iter().enumerate().map(|(i, l)| (*l, i)).collect();
        assert_eq!(row_index.len(), rows.len(), "duplicate row label");
        assert_eq!(col_index.len(), cols.len(), "duplicate column label");
        ExactMatrix {
            field,
            rows,
            cols,
            row_index,
            col_index,
            entries: BTreeMap::new(),
        }
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn row_labels(&self) -> &[Label] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[Label] {
        &self.cols
    }

    pub fn row_of(&self, l: &Label) -> Option<usize> {
        self.row_index.get(l).copied()
    }

    pub fn col_of(&self, l: &Label) -> Option<usize> {
        self.col_index.get(l).copied()
    }

    /// Sets an entry, dropping explicit zeros.
    pub fn set(&mut self, r: usize, c: usize, v: FieldScalar) {
        assert!(r < self.nrows() && c < self.ncols(), "entry out of range");
        assert_eq!(v.field_tag(), self.field, "entry from the wrong field");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    /// Adds `v` into the entry at `(r, c)`.
    pub fn add_to(&mut self, r: usize, c: usize, v: &FieldScalar) {
        let sum = &self.get(r, c) + v;
        self.set(r, c, sum);
    }

    /// The entry at `(r, c)` (zero when absent).
    pub fn get(&self, r: usize, c: usize) -> FieldScalar {
        self.entries
            .get(&(r, c))
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    /// Nonzero entries in row-major order.
    pub fn iter_entries(&self) -> impl Iterator<Item = (usize, usize, &FieldScalar)> {
        self.entries.iter().map(|((r, c), v)| (*r, *c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Matrix product `self * rhs`; the column labels of `self` must equal
    /// the row labels of `rhs`.
    pub fn matmul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.field, rhs.field, "fields must agree");
        assert_eq!(self.cols, rhs.rows, "inner spaces must agree");
        let mut by_col: BTreeMap<usize, Vec<(usize, &FieldScalar)>> = BTreeMap::new();
        for ((r, k), v) in &self.entries {
            by_col.entry(*k).or_default().push((*r, v));
        }
        let mut acc: BTreeMap<(usize, usize), FieldScalar> = BTreeMap::new();
        for ((k, c), b) in &rhs.entries {
            if let Some(col) = by_col.get(k) {
                for (r, a) in col {
                    let term = *a * b;
                    match acc.get_mut(&(*r, *c)) {
                        Some(e) => *e = &*e + &term,
                        None => {
                            acc.insert((*r, *c), term);
                        }
                    }
                }
            }
        }
        let mut out = ExactMatrix::new(self.field, self.rows.clone(), rhs.cols.clone());
        for ((r, c), v) in acc {
            out.set(r, c, v);
        }
        out
    }

    /// Applies the matrix to a coordinate vector over its column labels.
    pub fn apply(&self, v: &ChainVector) -> ChainVector {
        assert_eq!(self.cols, v.labels, "vector must live on the domain");
        let mut out = ChainVector::zero(self.field, self.rows.clone());
        for ((r, c), a) in &self.entries {
            if !v.coords[*c].is_zero() {
                out.coords[*r] = &out.coords[*r] + &(a * &v.coords[*c]);
            }
        }
        out
    }

    /// Multiplies one column by a scalar.
    pub fn scale_col(&mut self, c: usize, s: &FieldScalar) {
        assert_eq!(s.field_tag(), self.field);
        let keys: Vec<(usize, usize)> = self
            .entries
            .keys()
            .filter(|(_, cc)| *cc == c)
            .copied()
            .collect();
        for k in keys {
            let v = &self.entries[&k] * s;
            self.set(k.0, k.1, v);
        }
    }

    /// Multiplies one row by a scalar.
    pub fn scale_row(&mut self, r: usize, s: &FieldScalar) {
        assert_eq!(s.field_tag(), self.field);
        let keys: Vec<(usize, usize)> = self
            .entries
            .range((r, 0)..(r + 1, 0))
            .map(|(k, _)| *k)
            .collect();
        for k in keys {
            let v = &self.entries[&k] * s;
            self.set(k.0, k.1, v);
        }
    }

    /// The rank, by exact Gaussian elimination.
    pub fn rank(&self) -> usize {
        let nrows = self.nrows();
        let ncols = self.ncols();
        let zero = self.field.zero();
        let mut m: Vec<Vec<FieldScalar>> = vec![vec![zero; ncols]; nrows];
        for ((r, c), v) in &self.entries {
            m[*r][*c] = v.clone();
        }
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..nrows).find(|r| !m[*r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            let inv = m[rank][col].inv().expect("nonzero pivot");
            for r in rank + 1..nrows {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] * &inv;
                let (top, tail) = m.split_at_mut(r);
                let pivot_row = &top[rank][col..];
                for (cell, p) in tail[0][col..].iter_mut().zip(pivot_row) {
                    *cell = &*cell - &(&factor * p);
                }
            }
            rank += 1;
            if rank == nrows {
                break;
            }
        }
        rank
    }

    /// The export form: row and column labels as strings plus a sorted sparse
    /// entry list with exact coefficients rendered as text.
    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|((r, c), v)| json!([r, c, v.to_string()]))
            .collect();
        json!({
            "rows": self.rows.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "cols": self.cols.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
            "entries": entries,
        })
    }
}

/// A coordinate vector over a labelled basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainVector {
    field: FieldTag,
    labels: Vec<Label>,
    coords: Vec<FieldScalar>,
}

impl ChainVector {
    pub fn zero(field: FieldTag, labels: Vec<Label>) -> ChainVector {
        let coords = vec![field.zero(); labels.len()];
        ChainVector {
            field,
            labels,
            coords,
        }
    }

    pub fn field_tag(&self) -> FieldTag {
        self.field
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn coords(&self) -> &[FieldScalar] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// The coordinate at a label, which must belong to the basis.
    pub fn get(&self, l: &Label) -> &FieldScalar {
        let i = self
            .labels
            .iter()
            .position(|x| x == l)
            .unwrap_or_else(|| panic!("label {l} is not in this basis"));
        &self.coords[i]
    }

    /// Replaces the coordinate at a label, which must belong to the basis.
    pub fn set(&mut self, l: &Label, v: FieldScalar) {
        assert_eq!(v.field_tag(), self.field);
        let i = self
            .labels
            .iter()
            .position(|x| x == l)
            .unwrap_or_else(|| panic!("label {l} is not in this basis"));
        self.coords[i] = v;
    }

    /// Adds `v` into the coordinate at a label.
    pub fn add_to(&mut self, l: &Label, v: &FieldScalar) {
        let sum = self.get(l) + v;
        self.set(l, sum);
    }

    pub fn add(&self, other: &ChainVector) -> ChainVector {
        assert_eq!(self.labels, other.labels, "bases must agree");
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        ChainVector {
            field: self.field,
            labels: self.labels.clone(),
            coords,
        }
    }

    pub fn scale(&self, s: &FieldScalar) -> ChainVector {
        let coords = self.coords.iter().map(|a| a * s).collect();
        ChainVector {
            field: self.field,
            labels: self.labels.clone(),
            coords,
        }
    }
}

/// Completes the distinguished leading coordinates of one simplex to the full
/// coordinate tuple satisfying the two constraints.
///
/// `leading` holds the coordinates at the first `n - 2` vertices of the
/// `n`-vertex simplex; the returned tuple appends the solved coordinates at
/// the last two vertices, so that both `sum_i y_i` and `sum_i zeta_i y_i`
/// vanish.
pub fn lift_to_constrained(
    simplex: &[u32],
    leading: &[FieldScalar],
    zeta: &VertexCoordinates,
) -> Vec<FieldScalar> {
    let n = simplex.len();
    assert_eq!(leading.len() + 2, n, "need all but the last two coordinates");
    let field = zeta.field_tag();
    let mut sum_w = field.zero();
    let mut sum_zw = field.zero();
    for (w, v) in leading.iter().zip(simplex) {
        sum_w = &sum_w + w;
        sum_zw = &sum_zw + &(zeta.get(*v) * w);
    }
    let r = simplex[n - 2];
    let s = simplex[n - 1];
    let zeta_sr = zeta.diff(s, r);
    let y_r = (&sum_zw - &(zeta.get(s) * &sum_w))
        .div(&zeta_sr)
        .expect("distinct coordinates");
    let y_s = (&(zeta.get(r) * &sum_w) - &sum_zw)
        .div(&zeta_sr)
        .expect("distinct coordinates");
    let mut out = leading.to_vec();
    out.push(y_r);
    out.push(y_s);
    out
}

/// Distinguished basis of `V2`: one coordinate per inner triangle.
fn v2_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.inner_triangles()
        .iter()
        .map(|s| Label::TriVertex(*s, s[0]))
        .collect()
}

/// Distinguished basis of `V3`: two coordinates per tetrahedron.
fn v3_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.tetrahedra()
        .flat_map(|t| [Label::TetVertex(t, t[0]), Label::TetVertex(t, t[1])])
        .collect()
}

/// Distinguished basis of `V4`: three coordinates per 4-simplex.
fn v4_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.simplices()
        .iter()
        .flat_map(|u| {
            [
                Label::SimpVertex(*u, u[0]),
                Label::SimpVertex(*u, u[1]),
                Label::SimpVertex(*u, u[2]),
            ]
        })
        .collect()
}

/// Full coordinate basis of `W2`: three coordinates per inner triangle.
fn w2_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.inner_triangles()
        .iter()
        .flat_map(|s| s.iter().map(|i| Label::TriVertex(*s, *i)).collect::<Vec<_>>())
        .collect()
}

/// Full coordinate basis of `W3`: four coordinates per tetrahedron.
fn w3_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.tetrahedra()
        .flat_map(|t| t.iter().map(|i| Label::TetVertex(t, *i)).collect::<Vec<_>>())
        .collect()
}

/// Full coordinate basis of `W4`: five coordinates per 4-simplex.
fn w4_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.simplices()
        .iter()
        .flat_map(|u| u.iter().map(|i| Label::SimpVertex(*u, *i)).collect::<Vec<_>>())
        .collect()
}

/// The lift `V_k -> W_k` on the distinguished bases, as a matrix.
fn lift_matrix(
    zeta: &VertexCoordinates,
    full: Vec<Label>,
    distinguished: Vec<Label>,
) -> ExactMatrix {
    let field = zeta.field_tag();
    let mut m = ExactMatrix::new(field, full, distinguished);
    // Group the distinguished labels by simplex, preserving order.
    let mut by_simplex: BTreeMap<Vec<u32>, Vec<(usize, u32)>> = BTreeMap::new();
    for (c, l) in m.col_labels().to_vec().iter().enumerate() {
        let (simplex, i): (Vec<u32>, u32) = match l {
            Label::TriVertex(s, i) => (s.to_vec(), *i),
            Label::TetVertex(t, i) => (t.to_vec(), *i),
            Label::SimpVertex(u, i) => (u.to_vec(), *i),
            other => panic!("unexpected label {other} in a distinguished basis"),
        };
        by_simplex.entry(simplex).or_default().push((c, i));
    }
    for (simplex, cols) in by_simplex {
        let k = cols.len();
        assert_eq!(k + 2, simplex.len());
        for (which, (c, _)) in cols.iter().enumerate() {
            let mut leading = vec![field.zero(); k];
            leading[which] = field.one();
            let lifted = lift_to_constrained(&simplex, &leading, zeta);
            for (pos, v) in simplex.iter().enumerate() {
                let row_label = match simplex.len() {
                    3 => Label::TriVertex([simplex[0], simplex[1], simplex[2]], *v),
                    4 => Label::TetVertex(
                        [simplex[0], simplex[1], simplex[2], simplex[3]],
                        *v,
                    ),
                    5 => Label::SimpVertex(
                        [
                            simplex[0], simplex[1], simplex[2], simplex[3], simplex[4],
                        ],
                        *v,
                    ),
                    _ => unreachable!(),
                };
                let r = m.row_of(&row_label).expect("full basis contains the pair");
                m.set(r, *c, lifted[pos].clone());
            }
        }
    }
    m
}

/// The projection `W_k -> V_k` that keeps the distinguished coordinates.
fn projection_matrix(field: FieldTag, full: Vec<Label>, distinguished: Vec<Label>) -> ExactMatrix {
    let mut m = ExactMatrix::new(field, distinguished, full);
    for r in 0..m.nrows() {
        let l = m.row_labels()[r];
        let c = m.col_of(&l).expect("distinguished label is a full label");
        m.set(r, c, field.one());
    }
    m
}

/// The map `V0 -> W2` on full triangle coordinates: for an inner triangle
/// `s` and an even permutation `(i, j, k)` of its sorted vertices,
/// `y_{s,i} = (zeta_ij^-1 - zeta_ik^-1) y_i - zeta_ij^-1 y_j + zeta_ik^-1 y_k`,
/// where coordinates of boundary vertices read as zero.
fn map_f2_full(lat: &FaceLattice, zeta: &VertexCoordinates) -> ExactMatrix {
    let field = zeta.field_tag();
    let v0: Vec<Label> = lat.inner_vertices().iter().map(|v| Label::Vertex(*v)).collect();
    let mut m = ExactMatrix::new(field, w2_labels(lat), v0);
    for s in lat.inner_triangles() {
        for rot in 0..3 {
            let i = s[rot];
            let j = s[(rot + 1) % 3];
            let k = s[(rot + 2) % 3];
            let inv_ij = zeta.diff(i, j).inv().expect("distinct coordinates");
            let inv_ik = zeta.diff(i, k).inv().expect("distinct coordinates");
            let r = m
                .row_of(&Label::TriVertex(s, i))
                .expect("triangle coordinate");
            for (v, coeff) in [
                (i, &inv_ij - &inv_ik),
                (j, -&inv_ij),
                (k, inv_ik.clone()),
            ] {
                if let Some(c) = m.col_of(&Label::Vertex(v)) {
                    m.add_to(r, c, &coeff);
                }
            }
        }
    }
    m
}

/// The map `W2 -> W3`: `y_{t,i} = sum ε_s^{(t)} y_{s,i}` over the inner
/// triangles `s` of `t` containing `i`, with the simplicial boundary sign.
fn map_f3_full(lat: &FaceLattice, field: FieldTag) -> ExactMatrix {
    let mut m = ExactMatrix::new(field, w3_labels(lat), w2_labels(lat));
    for t in lat.tetrahedra() {
        for tri in t.iter().copied().combinations(3) {
            let s = [tri[0], tri[1], tri[2]];
            if lat.is_inner_triangle(&s) != Some(true) {
                continue;
            }
            let sign = boundary_sign(&s, &t).expect("facet");
            let coeff = field.integer(sign as i64);
            for i in s {
                let r = m.row_of(&Label::TetVertex(t, i)).expect("pair");
                let c = m.col_of(&Label::TriVertex(s, i)).expect("pair");
                m.add_to(r, c, &coeff);
            }
        }
    }
    m
}

/// The map `W3 -> W4`: `y_{u,i} = sum ε_t^{(u)} y_{t,i}` over the facet
/// tetrahedra of `u` containing `i`.
fn map_f4_full(lat: &FaceLattice, field: FieldTag) -> ExactMatrix {
    let mut m = ExactMatrix::new(field, w4_labels(lat), w3_labels(lat));
    for u in lat.simplices() {
        for tet in u.iter().copied().combinations(4) {
            let t = [tet[0], tet[1], tet[2], tet[3]];
            let sign = boundary_sign(&t, u).expect("facet");
            let coeff = field.integer(sign as i64);
            for i in t {
                let r = m.row_of(&Label::SimpVertex(*u, i)).expect("pair");
                let c = m.col_of(&Label::TetVertex(t, i)).expect("pair");
                m.add_to(r, c, &coeff);
            }
        }
    }
    m
}

/// The map `W4 -> V0*`: `y*_i = sum_{u ∋ i} ε_u y_{u,i}` over inner vertices
/// `i`, weighted by the global orientation signs.
fn map_f5_full(tri: &Triangulation, lat: &FaceLattice, field: FieldTag) -> ExactMatrix {
    let dual: Vec<Label> = lat
        .inner_vertices()
        .iter()
        .map(|v| Label::DualVertex(*v))
        .collect();
    let mut m = ExactMatrix::new(field, dual, w4_labels(lat));
    for (idx, u) in tri.simplices().iter().enumerate() {
        let eps = field.integer(tri.epsilon_by_index(idx) as i64);
        for i in u {
            if let Some(r) = m.row_of(&Label::DualVertex(*i)) {
                let c = m.col_of(&Label::SimpVertex(*u, *i)).expect("pair");
                m.add_to(r, c, &eps);
            }
        }
    }
    m
}

/// The first chain complex on its distinguished bases.
pub struct FComplex {
    pub f2: ExactMatrix,
    pub f3: ExactMatrix,
    pub f4: ExactMatrix,
    pub f5: ExactMatrix,
}

impl FComplex {
    /// The dimensions of the five spaces `V0, V2, V3, V4, V0*`.
    pub fn dims(&self) -> [usize; 5] {
        [
            self.f2.ncols(),
            self.f3.ncols(),
            self.f4.ncols(),
            self.f5.ncols(),
            self.f5.nrows(),
        ]
    }
}

/// Builds the four maps of the first complex over the distinguished bases.
pub fn build_f_complex(
    tri: &Triangulation,
    lat: &FaceLattice,
    zeta: &VertexCoordinates,
) -> FComplex {
    let field = zeta.field_tag();
    let p2 = projection_matrix(field, w2_labels(lat), v2_labels(lat));
    let p3 = projection_matrix(field, w3_labels(lat), v3_labels(lat));
    let p4 = projection_matrix(field, w4_labels(lat), v4_labels(lat));
    let l2 = lift_matrix(zeta, w2_labels(lat), v2_labels(lat));
    let l3 = lift_matrix(zeta, w3_labels(lat), v3_labels(lat));
    let l4 = lift_matrix(zeta, w4_labels(lat), v4_labels(lat));
    let f2 = p2.matmul(&map_f2_full(lat, zeta));
    let f3 = p3.matmul(&map_f3_full(lat, field).matmul(&l2));
    let f4 = p4.matmul(&map_f4_full(lat, field).matmul(&l3));
    let f5 = map_f5_full(tri, lat, field).matmul(&l4);
    FComplex { f2, f3, f4, f5 }
}

/// The tetrahedron gauge scalar `zeta_{t_2} - zeta_{t_3}` (third minus fourth
/// vertex).
fn tet_gauge(t: &[u32; 4], zeta: &VertexCoordinates) -> FieldScalar {
    zeta.diff(t[2], t[3])
}

/// The gauged map `f4 D3`: each column over a tetrahedron `t` is multiplied
/// by `zeta_{t_2} - zeta_{t_3}`. Works on any matrix whose columns are
/// `(tetrahedron, vertex)` pairs, in particular on the single-simplex block.
pub fn gauge_f4(f4: &ExactMatrix, zeta: &VertexCoordinates) -> ExactMatrix {
    let mut m = f4.clone();
    for c in 0..m.ncols() {
        let Label::TetVertex(t, _) = m.col_labels()[c] else {
            panic!("gauge_f4 expects (tetrahedron, vertex) columns");
        };
        m.scale_col(c, &tet_gauge(&t, zeta));
    }
    m
}

/// The gauged map `D3^-1 f3 D2`: rows over a tetrahedron `t` are divided by
/// `zeta_{t_2} - zeta_{t_3}`, columns over a triangle `s` are multiplied by
/// `zeta_{s_1} - zeta_{s_2}`.
pub fn gauge_f3(f3: &ExactMatrix, zeta: &VertexCoordinates) -> ExactMatrix {
    let mut m = f3.clone();
    for r in 0..m.nrows() {
        let Label::TetVertex(t, _) = m.row_labels()[r] else {
            panic!("gauge_f3 expects (tetrahedron, vertex) rows");
        };
        let inv = tet_gauge(&t, zeta).inv().expect("distinct coordinates");
        m.scale_row(r, &inv);
    }
    for c in 0..m.ncols() {
        let Label::TriVertex(s, _) = m.col_labels()[c] else {
            panic!("gauge_f3 expects (triangle, vertex) columns");
        };
        m.scale_col(c, &zeta.diff(s[1], s[2]));
    }
    m
}

/// The block of `f4` for a single 4-simplex, with the *full* five-coordinate
/// codomain: rows are the pairs `(u, i)` for `i` in `u`, columns the
/// distinguished pairs of the five facet tetrahedra.
pub fn single_simplex_f4(u: &[u32; 5], zeta: &VertexCoordinates) -> ExactMatrix {
    let field = zeta.field_tag();
    let rows: Vec<Label> = u.iter().map(|i| Label::SimpVertex(*u, *i)).collect();
    let mut facets: Vec<[u32; 4]> = u
        .iter()
        .copied()
        .combinations(4)
        .map(|t| [t[0], t[1], t[2], t[3]])
        .collect();
    facets.sort();
    let cols: Vec<Label> = facets
        .iter()
        .flat_map(|t| [Label::TetVertex(*t, t[0]), Label::TetVertex(*t, t[1])])
        .collect();
    let mut m = ExactMatrix::new(field, rows, cols);
    for t in &facets {
        let sign = boundary_sign(t, u).expect("facet");
        let coeff = field.integer(sign as i64);
        for which in 0..2 {
            let mut leading = vec![field.zero(); 2];
            leading[which] = field.one();
            let lifted = lift_to_constrained(t, &leading, zeta);
            let c = m
                .col_of(&Label::TetVertex(*t, t[which]))
                .expect("distinguished pair");
            for (pos, i) in t.iter().enumerate() {
                let r = m.row_of(&Label::SimpVertex(*u, *i)).expect("pair");
                m.add_to(r, c, &(&coeff * &lifted[pos]));
            }
        }
    }
    m
}

/// Puts a raw 5-tuple over the 4-simplex `u` into canonical form modulo the
/// plane spanned by `(1,...,1)` and the vertex coordinates: the output keeps
/// the coordinates at the first three vertices, the last two become zero.
pub fn canonical_mid_coords(
    u: &[u32; 5],
    raw: &[FieldScalar; 5],
    zeta: &VertexCoordinates,
) -> [FieldScalar; 3] {
    let beta = (&raw[3] - &raw[4])
        .div(&zeta.diff(u[3], u[4]))
        .expect("distinct coordinates");
    let alpha = &raw[3] - &(&beta * zeta.get(u[3]));
    [0, 1, 2].map(|r| &(&raw[r] - &alpha) - &(&beta * zeta.get(u[r])))
}

/// The alternating triangle form `zeta_{qr} x_p + zeta_{rp} x_q + zeta_{pq}
/// x_r` in the coordinates `x` at the vertices `p, q, r`.
pub fn triangle_invariant(
    zeta: &VertexCoordinates,
    [p, q, r]: [u32; 3],
    [xp, xq, xr]: [&FieldScalar; 3],
) -> FieldScalar {
    let a = &zeta.diff(q, r) * xp;
    let b = &zeta.diff(r, p) * xq;
    let c = &zeta.diff(p, q) * xr;
    &(&a + &b) + &c
}

/// The triangle form of a canonical 5-tuple on a 4-simplex `u`, evaluated on
/// a triangle `s` of `u`.  The tuple lists the coordinates at the first three
/// vertices of `u`; the canonical form has zero at the last two.
pub fn triangle_invariant_in_simplex(
    zeta: &VertexCoordinates,
    u: &[u32; 5],
    x: &[FieldScalar; 3],
    s: &[u32; 3],
) -> Result<FieldScalar, ComplexError> {
    if !s.iter().all(|v| u.contains(v)) {
        return Err(ComplexError::TriangleNotInSimplex { triangle: *s, simplex: *u });
    }
    let field = zeta.field_tag();
    let coord_at = |v: u32| -> FieldScalar {
        match u.iter().position(|w| *w == v).expect("vertex of u") {
            r @ 0..=2 => x[r].clone(),
            _ => field.zero(),
        }
    };
    let coords = s.map(coord_at);
    Ok(triangle_invariant(zeta, *s, [&coords[0], &coords[1], &coords[2]]))
}

/// The sign of the permutation taking the sorted tuple to `perm`.
fn perm_sign(perm: &[u32]) -> i64 {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Basis of the middle space of the second complex: three canonical
/// coordinates per 4-simplex.
fn gmid_labels(lat: &FaceLattice) -> Vec<Label> {
    lat.simplices()
        .iter()
        .flat_map(|u| [0, 1, 2].map(|r| Label::GMid(*u, u[r])))
        .collect()
}

/// The second chain complex.
pub struct GComplex {
    pub g2: ExactMatrix,
    pub g3: ExactMatrix,
    pub g4: ExactMatrix,
    pub g5: ExactMatrix,
}

impl GComplex {
    /// The dimensions of the five spaces.
    pub fn dims(&self) -> [usize; 5] {
        [
            self.g2.ncols(),
            self.g3.ncols(),
            self.g4.ncols(),
            self.g5.ncols(),
            self.g5.nrows(),
        ]
    }
}

/// `g2`: an inner vertex `i` maps to the sum of the tetrahedra containing it,
/// each weighted by `1 / (zeta_{ij} zeta_{ik} zeta_{il})` over the other
/// three vertices.
pub fn build_g2(lat: &FaceLattice, zeta: &VertexCoordinates) -> ExactMatrix {
    let field = zeta.field_tag();
    let rows: Vec<Label> = lat.inner_tetrahedra().iter().map(|t| Label::GTet(*t)).collect();
    let cols: Vec<Label> = lat.inner_vertices().iter().map(|v| Label::GVertex(*v)).collect();
    let mut m = ExactMatrix::new(field, rows, cols);
    for t in lat.inner_tetrahedra() {
        let r = m.row_of(&Label::GTet(t)).expect("inner tetrahedron");
        for i in t {
            let Some(c) = m.col_of(&Label::GVertex(i)) else {
                continue;
            };
            let mut denom = field.one();
            for j in t {
                if j != i {
                    denom = &denom * &zeta.diff(i, j);
                }
            }
            m.add_to(r, c, &denom.inv().expect("distinct coordinates"));
        }
    }
    m
}

/// `g3`: a tetrahedron maps, in each of its 4-simplices, to the canonical
/// form of the indicator of the opposite vertex.  The domain is spanned by
/// the inner tetrahedra, or by all tetrahedra when `include_boundary` is set
/// (a boundary tetrahedron contributes its single 4-simplex).
pub fn build_g3(
    lat: &FaceLattice,
    zeta: &VertexCoordinates,
    include_boundary: bool,
) -> ExactMatrix {
    let field = zeta.field_tag();
    let domain: Vec<[u32; 4]> = if include_boundary {
        lat.tetrahedra().collect()
    } else {
        lat.inner_tetrahedra()
    };
    let cols: Vec<Label> = domain.iter().map(|t| Label::GTet(*t)).collect();
    let mut m = ExactMatrix::new(field, gmid_labels(lat), cols);
    for t in domain {
        let c = m.col_of(&Label::GTet(t)).expect("tetrahedron");
        for ui in lat.cofacets(&t).expect("tetrahedron of the lattice") {
            let u = lat.simplices()[*ui];
            let opp = u.iter().position(|v| !t.contains(v)).expect("one extra");
            let mut raw = [0; 5].map(|_| field.zero());
            raw[opp] = field.one();
            let canon = canonical_mid_coords(&u, &raw, zeta);
            for (r, coord) in canon.into_iter().enumerate() {
                let row = m.row_of(&Label::GMid(u, u[r])).expect("middle label");
                m.add_to(row, c, &coord);
            }
        }
    }
    m
}

/// `g4`: on the block of a 4-simplex `u` with orientation `ε_u`, a canonical
/// 5-tuple `x` maps to `ε_u` times the sum, over the ten splits of `u` into a
/// sorted triple and a sorted pair, of the permutation sign times the
/// triangle form of `x` on the triple times the oriented edge on the pair;
/// boundary edges are dropped.
pub fn build_g4(tri: &Triangulation, lat: &FaceLattice, zeta: &VertexCoordinates) -> ExactMatrix {
    let field = zeta.field_tag();
    let rows: Vec<Label> = lat.inner_edges().iter().map(|e| Label::GEdge(*e)).collect();
    let mut m = ExactMatrix::new(field, rows, gmid_labels(lat));
    for (idx, u) in tri.simplices().iter().enumerate() {
        let eps = field.integer(tri.epsilon_by_index(idx) as i64);
        for which in 0..3 {
            let col_label = Label::GMid(*u, u[which]);
            let c = m.col_of(&col_label).expect("middle label");
            // Canonical coordinates of this basis vector at the vertices of u.
            let coord_at = |v: u32| -> FieldScalar {
                if v == u[which] {
                    field.one()
                } else {
                    field.zero()
                }
            };
            for pair in u.iter().copied().combinations(2) {
                let e = [pair[0], pair[1]];
                let Some(r) = m.row_of(&Label::GEdge(e)) else {
                    continue;
                };
                let triple: Vec<u32> = u.iter().copied().filter(|v| !e.contains(v)).collect();
                let perm = [triple[0], triple[1], triple[2], e[0], e[1]];
                let sign = field.integer(perm_sign(&perm));
                let x = [
                    coord_at(triple[0]),
                    coord_at(triple[1]),
                    coord_at(triple[2]),
                ];
                let y = triangle_invariant(
                    zeta,
                    [triple[0], triple[1], triple[2]],
                    [&x[0], &x[1], &x[2]],
                );
                m.add_to(r, c, &(&(&eps * &sign) * &y));
            }
        }
    }
    m
}

/// `g5`: an oriented inner edge `i -> j` maps to
/// `E_i + zeta_j F_i - E_j - zeta_i F_j`, dropping boundary vertices.
pub fn build_g5(lat: &FaceLattice, zeta: &VertexCoordinates) -> ExactMatrix {
    let field = zeta.field_tag();
    let inner_vertices = lat.inner_vertices();
    let mut rows: Vec<Label> = inner_vertices.iter().map(|v| Label::GDualE(*v)).collect();
    rows.extend(inner_vertices.iter().map(|v| Label::GDualF(*v)));
    let cols: Vec<Label> = lat.inner_edges().iter().map(|e| Label::GEdge(*e)).collect();
    let mut m = ExactMatrix::new(field, rows, cols);
    for e in lat.inner_edges() {
        let c = m.col_of(&Label::GEdge(e)).expect("inner edge");
        let [i, j] = e;
        if let Some(r) = m.row_of(&Label::GDualE(i)) {
            m.add_to(r, c, &field.one());
        }
        if let Some(r) = m.row_of(&Label::GDualF(i)) {
            m.add_to(r, c, zeta.get(j));
        }
        if let Some(r) = m.row_of(&Label::GDualE(j)) {
            m.add_to(r, c, &field.integer(-1));
        }
        if let Some(r) = m.row_of(&Label::GDualF(j)) {
            m.add_to(r, c, &zeta.get(i).neg());
        }
    }
    m
}

/// Builds the four maps of the second complex.
pub fn build_g_complex(
    tri: &Triangulation,
    lat: &FaceLattice,
    zeta: &VertexCoordinates,
) -> GComplex {
    GComplex {
        g2: build_g2(lat, zeta),
        g3: build_g3(lat, zeta, false),
        g4: build_g4(tri, lat, zeta),
        g5: build_g5(lat, zeta),
    }
}

/// Homology dimensions of a finite complex `C_0 -> C_1 -> ... -> C_n` given
/// the space dimensions and the maps (`maps[i]: C_i -> C_{i+1}`):
/// `H_i = dim ker(outgoing) - rank(incoming)`.  Fails if two consecutive
/// maps do not compose to zero.
pub fn homology_dims(dims: &[usize], maps: &[&ExactMatrix]) -> Result<Vec<usize>, ComplexError> {
    assert_eq!(maps.len() + 1, dims.len());
    for (i, m) in maps.iter().enumerate() {
        assert_eq!(m.ncols(), dims[i], "map {i} domain dimension");
        assert_eq!(m.nrows(), dims[i + 1], "map {i} codomain dimension");
    }
    for i in 0..maps.len().saturating_sub(1) {
        if !maps[i + 1].matmul(maps[i]).is_zero() {
            return Err(ComplexError::NotAComplex(i, i + 1));
        }
    }
    let ranks: Vec<usize> = maps.iter().map(|m| m.rank()).collect();
    Ok((0..dims.len())
        .map(|i| {
            let outgoing = if i < ranks.len() { ranks[i] } else { 0 };
            let incoming = if i > 0 { ranks[i - 1] } else { 0 };
            dims[i] - outgoing - incoming
        })
        .collect())
}
