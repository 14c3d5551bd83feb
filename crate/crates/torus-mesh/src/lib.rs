//! Periodic triangle meshes on the 3-torus.
//!
//! A level surface of a triply periodic function lives in the quotient
//! `T³ = R³/Z³`.  We triangulate it with vertices in the fundamental
//! domain `[0,1)³` and record, for every directed triangle edge, the
//! integer *wrap vector* — the deck translation separating the canonical
//! representatives of its endpoints.  Wrap vectors are the whole point:
//! they carry the embedding `H₁(Σ) → H₁(T³) = Z³` that distinguishes a
//! contractible section from one that winds around the torus, and every
//! downstream classification (closure classes, souls, stability zones)
//! reads them.
//!
//! Contents:
//!
//! * [`TorusMesh`], [`Face`] — the mesh with per-edge wraps and optional
//!   exact rational coordinates.
//! * [`TorusMesh::validate`] — structural audit: wraps close up around
//!   every face, and every directed edge is glued to exactly one reverse
//!   partner with the opposite wrap (closed orientable manifold check).
//! * [`marching_tetrahedra`](crate::marching::marching_tetrahedra) —
//!   level-surface extraction on a periodic grid with a Freudenthal
//!   tetrahedral split (no ambiguous configurations) and in-place Newton
//!   refinement of vertex positions.
//! * [`mu_cube_mesh`](crate::mu_cube::mu_cube_mesh) — the exact
//!   genus-3 polyhedral surface `{4,6|4}` with half-integer coordinates.
//! * [`topology`] — connected components with Euler characteristic,
//!   genus, and the rank of the wrap-class image in `H₁(T³)`.
//! * [`load_pmesh`](crate::io::load_pmesh) /
//!   [`TorusMesh::save_pmesh`](crate::io::save_pmesh) — the plain-text
//!   interchange format.

use std::collections::HashMap;

use num::rational::Rational64;
use thiserror::Error;
use torus_lattice::{int_basis, IVec3};

pub mod io;
pub mod marching;
pub mod mu_cube;

pub use io::load_pmesh;
pub use marching::{marching_tetrahedra, DEFAULT_REFINE_TOL};
pub use mu_cube::mu_cube_mesh;

/// Errors of the mesh layer.
#[derive(Debug, Error)]
pub enum MeshError {
    /// Level-surface extraction requires a 3-dimensional field.
    #[error("field has dimension {0}, level surfaces need dimension 3")]
    Dimension(usize),
    /// Grid resolution must be at least 2 cells per period.
    #[error("grid resolution {0} too small (need at least 2)")]
    Resolution(usize),
    /// The level value must be finite.
    #[error("level value must be finite, got {0}")]
    NonFiniteLevel(f64),
    /// A pmesh file failed to parse.
    #[error("pmesh parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    /// Structural validation failed; `problems` lists each violation.
    #[error("invalid mesh: {}", problems.join("; "))]
    Invalid { problems: Vec<String> },
}

/// One oriented triangle.  `wrap[e]` is the deck translation of directed
/// edge `e`: edge 0 runs `v[0] -> v[1]`, edge 1 runs `v[1] -> v[2]`,
/// edge 2 runs `v[2] -> v[0]`, and the representative of the edge's head
/// is `position(head) + wrap[e]`.  The three wraps of a face always sum
/// to zero (the walk around a triangle closes up).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub v: [usize; 3],
    pub wrap: [IVec3; 3],
}

impl Face {
    /// Deck offsets of the three corners in the face's own frame,
    /// anchored at corner 0: `[0, wrap[0], wrap[0] + wrap[1]]`.
    pub fn corner_offsets(&self) -> [IVec3; 3] {
        let w0 = self.wrap[0];
        [
            [0, 0, 0],
            w0,
            [
                w0[0] + self.wrap[1][0],
                w0[1] + self.wrap[1][1],
                w0[2] + self.wrap[1][2],
            ],
        ]
    }
}

/// A triangle mesh in the 3-torus: canonical vertex positions in
/// `[0,1)³`, faces with per-edge wrap vectors, and (optionally) exact
/// rational coordinates that the floating positions mirror bit-for-bit.
#[derive(Debug, Clone, Default)]
pub struct TorusMesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<Face>,
    /// Exact coordinates, when the mesh comes from an exact construction
    /// (the `{4,6|4}` model, or a pmesh file with the `exact` flag).
    pub exact: Option<Vec<[Rational64; 3]>>,
}

/// Canonical key of an undirected edge: directed `(a, b, w)` and
/// `(b, a, -w)` collapse to one key.  Self-edges (`a == b`, legitimate on
/// a quotient) canonicalize the wrap by sign.
fn edge_key(a: usize, b: usize, w: IVec3) -> (usize, usize, IVec3) {
    if a < b {
        (a, b, w)
    } else if b < a {
        (b, a, [-w[0], -w[1], -w[2]])
    } else {
        let mut cw = w;
        torus_lattice::sign_normalize(&mut cw);
        (a, a, cw)
    }
}

/// True if the directed edge `(a -> b, w)` is the canonical orientation
/// of its undirected class (used to pair up gluings).
fn edge_is_forward(a: usize, b: usize, w: IVec3) -> bool {
    if a != b {
        a < b
    } else {
        let mut cw = w;
        torus_lattice::sign_normalize(&mut cw);
        cw == w
    }
}

impl TorusMesh {
    /// Representative corner positions of face `f` in the face's own
    /// frame (anchored at corner 0): canonical position plus deck offset.
    pub fn corner_positions(&self, f: usize) -> [[f64; 3]; 3] {
        let face = &self.faces[f];
        let offs = face.corner_offsets();
        let mut out = [[0.0; 3]; 3];
        for c in 0..3 {
            let p = self.vertices[face.v[c]];
            for d in 0..3 {
                out[c][d] = p[d] + offs[c][d] as f64;
            }
        }
        out
    }

    /// Exact representative corner positions, when exact coordinates are
    /// present.
    pub fn exact_corner_positions(&self, f: usize) -> Option<[[Rational64; 3]; 3]> {
        let exact = self.exact.as_ref()?;
        let face = &self.faces[f];
        let offs = face.corner_offsets();
        let mut out = [[Rational64::from_integer(0); 3]; 3];
        for c in 0..3 {
            let p = exact[face.v[c]];
            for d in 0..3 {
                out[c][d] = p[d] + Rational64::from_integer(offs[c][d]);
            }
        }
        Some(out)
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut seen = std::collections::HashSet::new();
        for face in &self.faces {
            for e in 0..3 {
                seen.insert(edge_key(face.v[e], face.v[(e + 1) % 3], face.wrap[e]));
            }
        }
        seen.len()
    }

    /// Structural validation.  Checks, collecting every violation:
    ///
    /// * vertex positions finite and inside `[0,1)³`; exact coordinates
    ///   (when present) in range and mirrored exactly by the floats;
    /// * face indices in range; no zero-wrap self-edges;
    /// * the three wraps of each face sum to zero;
    /// * every directed edge glued to exactly one partner carrying the
    ///   reversed orientation and negated wrap — i.e. the mesh is a
    ///   closed, consistently oriented surface.
    pub fn validate(&self) -> Result<(), MeshError> {
        let mut problems = Vec::new();
        for (i, p) in self.vertices.iter().enumerate() {
            if !p.iter().all(|x| x.is_finite()) {
                problems.push(format!("vertex {i}: non-finite position"));
            } else if !p.iter().all(|&x| (0.0..1.0).contains(&x)) {
                problems.push(format!("vertex {i}: position {p:?} outside [0,1)"));
            }
        }
        if let Some(exact) = &self.exact {
            if exact.len() != self.vertices.len() {
                problems.push(format!(
                    "exact coordinate count {} != vertex count {}",
                    exact.len(),
                    self.vertices.len()
                ));
            } else {
                let zero = Rational64::from_integer(0);
                let one = Rational64::from_integer(1);
                for (i, (q, p)) in exact.iter().zip(&self.vertices).enumerate() {
                    for d in 0..3 {
                        if q[d] < zero || q[d] >= one {
                            problems.push(format!("vertex {i}: exact coordinate outside [0,1)"));
                            break;
                        }
                        let as_f = *q[d].numer() as f64 / *q[d].denom() as f64;
                        if as_f != p[d] {
                            problems.push(format!(
                                "vertex {i}: float position diverges from exact coordinate"
                            ));
                            break;
                        }
                    }
                }
            }
        }

        // Directed-edge gluing audit: per undirected class, count forward
        // and reverse appearances.
        let mut classes: HashMap<(usize, usize, IVec3), (usize, usize)> = HashMap::new();
        for (fi, face) in self.faces.iter().enumerate() {
            for &vi in &face.v {
                if vi >= self.vertices.len() {
                    problems.push(format!("face {fi}: vertex index {vi} out of range"));
                }
            }
            if face.v.iter().any(|&vi| vi >= self.vertices.len()) {
                continue;
            }
            let wsum: IVec3 = [
                face.wrap[0][0] + face.wrap[1][0] + face.wrap[2][0],
                face.wrap[0][1] + face.wrap[1][1] + face.wrap[2][1],
                face.wrap[0][2] + face.wrap[1][2] + face.wrap[2][2],
            ];
            if wsum != [0, 0, 0] {
                problems.push(format!("face {fi}: wraps sum to {wsum:?}, not zero"));
            }
            for e in 0..3 {
                let (a, b, w) = (face.v[e], face.v[(e + 1) % 3], face.wrap[e]);
                if a == b && w == [0, 0, 0] {
                    problems.push(format!("face {fi}: edge {e} is a zero-wrap self-loop"));
                    continue;
                }
                let entry = classes.entry(edge_key(a, b, w)).or_insert((0, 0));
                if edge_is_forward(a, b, w) {
                    entry.0 += 1;
                } else {
                    entry.1 += 1;
                }
            }
        }
        for (key, (fwd, rev)) in &classes {
            if *fwd != 1 || *rev != 1 {
                problems.push(format!(
                    "edge {:?}: {} forward / {} reverse gluings (need exactly 1 + 1)",
                    key, fwd, rev
                ));
                if problems.len() > 24 {
                    problems.push("... further problems suppressed".to_string());
                    break;
                }
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(MeshError::Invalid { problems })
        }
    }
}

/// Face-to-face gluing: `pairs[f][e] = (f́, é)` — crossing directed edge
/// `e` of face `f` lands in face `f́`, whose directed edge `é` is the
/// reverse of `e`.
#[derive(Debug, Clone)]
pub struct MeshAdjacency {
    pub pairs: Vec<[(usize, usize); 3]>,
}

/// Build the edge-gluing map of a valid mesh.
pub fn adjacency(mesh: &TorusMesh) -> Result<MeshAdjacency, MeshError> {
    mesh.validate()?;
    let mut by_class: HashMap<(usize, usize, IVec3), [(usize, usize); 2]> = HashMap::new();
    for (fi, face) in mesh.faces.iter().enumerate() {
        for e in 0..3 {
            let (a, b, w) = (face.v[e], face.v[(e + 1) % 3], face.wrap[e]);
            let slot = if edge_is_forward(a, b, w) { 0 } else { 1 };
            by_class.entry(edge_key(a, b, w)).or_insert([(usize::MAX, 0); 2])[slot] = (fi, e);
        }
    }
    let mut pairs = vec![[(usize::MAX, usize::MAX); 3]; mesh.faces.len()];
    for sides in by_class.values() {
        let [(f0, e0), (f1, e1)] = *sides;
        pairs[f0][e0] = (f1, e1);
        pairs[f1][e1] = (f0, e0);
    }
    Ok(MeshAdjacency { pairs })
}

/// Topology of one connected component.
#[derive(Debug, Clone)]
pub struct ComponentTopology {
    pub faces: usize,
    pub edges: usize,
    pub vertices: usize,
    /// Euler characteristic `V - E + F` (even for a closed orientable
    /// surface).
    pub euler: i64,
    /// Genus `(2 - euler) / 2`.
    pub genus: u32,
    /// Rank of the image of the component's first homology in
    /// `H₁(T³) = Z³` — the number of independent directions the surface
    /// winds around the torus.  At most 3.
    pub rank: usize,
    /// Row-reduced integer basis of that image (rational span).
    pub wrap_classes: Vec<IVec3>,
    /// Indices of the component's faces in the parent mesh.
    pub face_ids: Vec<usize>,
}

/// Topology of a whole mesh, one entry per connected component, in
/// order of each component's smallest face index.
#[derive(Debug, Clone)]
pub struct MeshTopology {
    pub components: Vec<ComponentTopology>,
}

/// Connected components with genus and wrap-class ranks.
///
/// Components are found by flooding the face-gluing graph.  Within each
/// component a breadth-first spanning tree over the vertex graph assigns
/// every vertex an integer potential `phi` in `Z³`; each non-tree edge
/// `(a -> b, w)` then contributes the translation class
/// `phi(a) + w - phi(b)`, and the rank of all such classes is the rank of
/// the component's homological image in the torus.
pub fn topology(mesh: &TorusMesh) -> Result<MeshTopology, MeshError> {
    let adj = adjacency(mesh)?;
    let nf = mesh.faces.len();
    let mut comp = vec![usize::MAX; nf];
    let mut order = Vec::new();
    for seed in 0..nf {
        if comp[seed] != usize::MAX {
            continue;
        }
        let id = order.len();
        order.push(seed);
        comp[seed] = id;
        let mut stack = vec![seed];
        while let Some(f) = stack.pop() {
            for e in 0..3 {
                let (nf2, _) = adj.pairs[f][e];
                if comp[nf2] == usize::MAX {
                    comp[nf2] = id;
                    stack.push(nf2);
                }
            }
        }
    }

    let mut components = Vec::with_capacity(order.len());
    for id in 0..order.len() {
        let face_ids: Vec<usize> = (0..nf).filter(|&f| comp[f] == id).collect();

        // Vertex adjacency restricted to this component, one entry per
        // undirected edge class.
        let mut edges: HashMap<(usize, usize, IVec3), ()> = HashMap::new();
        for &f in &face_ids {
            let face = &mesh.faces[f];
            for e in 0..3 {
                edges.insert(
                    edge_key(face.v[e], face.v[(e + 1) % 3], face.wrap[e]),
                    (),
                );
            }
        }
        let mut verts: Vec<usize> = face_ids
            .iter()
            .flat_map(|&f| mesh.faces[f].v)
            .collect();
        verts.sort_unstable();
        verts.dedup();
        let vcount = verts.len();
        let ecount = edges.len();
        let fcount = face_ids.len();

        // Spanning-tree potentials over the vertex graph.
        let vindex: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut graph: Vec<Vec<(usize, IVec3)>> = vec![Vec::new(); vcount];
        let mut edge_list: Vec<(usize, usize, IVec3)> = edges.keys().cloned().collect();
        edge_list.sort_unstable();
        for &(a, b, w) in &edge_list {
            let (ia, ib) = (vindex[&a], vindex[&b]);
            graph[ia].push((ib, w));
            graph[ib].push((ia, [-w[0], -w[1], -w[2]]));
        }
        let mut phi: Vec<Option<IVec3>> = vec![None; vcount];
        let mut queue = std::collections::VecDeque::new();
        phi[0] = Some([0, 0, 0]);
        queue.push_back(0usize);
        while let Some(u) = queue.pop_front() {
            let pu = phi[u].unwrap();
            for &(v, w) in &graph[u] {
                if phi[v].is_none() {
                    phi[v] = Some([pu[0] + w[0], pu[1] + w[1], pu[2] + w[2]]);
                    queue.push_back(v);
                }
            }
        }
        // The component is edge-connected through faces, hence vertex
        // connected: all potentials are set.
        let mut classes = Vec::new();
        for &(a, b, w) in &edge_list {
            let (ia, ib) = (vindex[&a], vindex[&b]);
            let (pa, pb) = (phi[ia].unwrap(), phi[ib].unwrap());
            let class = [pa[0] + w[0] - pb[0], pa[1] + w[1] - pb[1], pa[2] + w[2] - pb[2]];
            if class != [0, 0, 0] {
                classes.push(class);
            }
        }
        let wrap_classes = int_basis(&classes);

        let euler = vcount as i64 - ecount as i64 + fcount as i64;
        if euler % 2 != 0 || euler > 2 {
            return Err(MeshError::Invalid {
                problems: vec![format!(
                    "component {id}: Euler characteristic {euler} impossible for a closed orientable surface"
                )],
            });
        }
        components.push(ComponentTopology {
            faces: fcount,
            edges: ecount,
            vertices: vcount,
            euler,
            genus: ((2 - euler) / 2) as u32,
            rank: wrap_classes.len(),
            wrap_classes,
            face_ids,
        });
    }
    Ok(MeshTopology { components })
}
