//! Level-surface extraction on a periodic grid by marching tetrahedra.
//!
//! Each cell of an `n³` grid over the fundamental domain is split into six
//! tetrahedra around its main diagonal (the Freudenthal split).  Linear
//! interpolation inside tetrahedra has no ambiguous sign configurations —
//! unlike cube-based marching, no face decider is needed, and the output
//! is a combinatorial manifold by construction.  Grid points with value
//! exactly at the level are treated as positive (the symbolic perturbation
//! `c - δ`), so degenerate hits cannot pinch the surface.
//!
//! Periodicity is handled at the source: corner values at index `n` reuse
//! index `0`, and every mesh vertex lives on a grid edge identified by its
//! canonical (wrapped) lower endpoint and direction class.  Deck offsets
//! of the cube corners then yield the wrap vectors of each triangle edge
//! exactly, with no geometric epsilon anywhere.
//!
//! Vertex positions are refined in place: each vertex slides along its
//! grid edge by safeguarded Newton iteration until `|f - c|` drops below
//! the requested tolerance, so downstream geometry (curvature, flows,
//! section planes) sees the true surface rather than the chord
//! approximation.

use std::collections::HashMap;

use torus_fields::TrigField;

use crate::{Face, MeshError, TorusMesh};

/// Default refinement tolerance on `|f(vertex) - c|`.
pub const DEFAULT_REFINE_TOL: f64 = 1e-10;

/// The seven within-cube edge direction classes (axes, face diagonals,
/// body diagonal) a Freudenthal tetrahedron can use.
const DELTAS: [[usize; 3]; 7] = [
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [1, 1, 0],
    [1, 0, 1],
    [0, 1, 1],
    [1, 1, 1],
];

fn delta_index(d: [usize; 3]) -> u8 {
    DELTAS
        .iter()
        .position(|&x| x == d)
        .expect("tetrahedral edge direction") as u8
}

/// The six tetrahedra of the Freudenthal split: axis insertion orders
/// (permutations of x,y,z) with their parities.  Tet corners are
/// `p0, p0+e[a], p0+e[a]+e[b], p0+(1,1,1)`, a chain in the componentwise
/// order; the parity is the sign of the tetrahedron's orientation.
const PERMS: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([0, 2, 1], -1),
    ([1, 0, 2], -1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([2, 1, 0], -1),
];

/// Parity of a permutation of (0,1,2,3) given as an array: true for even.
fn perm_even(p: [usize; 4]) -> bool {
    let mut inv = 0;
    for i in 0..4 {
        for j in (i + 1)..4 {
            if p[i] > p[j] {
                inv += 1;
            }
        }
    }
    inv % 2 == 0
}

/// Extract the level surface `f = c` as a periodic triangle mesh on an
/// `n³` grid, refining vertices to `|f - c| <= refine_tol` (pass a
/// non-positive tolerance to keep plain linear interpolation).
///
/// The output is an oriented closed surface: triangle normals point
/// toward the region `f >= c`.  Resolution must capture the surface's
/// features; the extraction is topologically faithful once `n` resolves
/// the narrowest handles of the level set.
pub fn marching_tetrahedra(
    field: &TrigField,
    c: f64,
    n: usize,
    refine_tol: f64,
) -> Result<TorusMesh, MeshError> {
    if field.dim() != 3 {
        return Err(MeshError::Dimension(field.dim()));
    }
    if n < 2 {
        return Err(MeshError::Resolution(n));
    }
    if !c.is_finite() {
        return Err(MeshError::NonFiniteLevel(c));
    }

    // Grid values on the canonical lattice; index n wraps to 0.
    let nf = n as f64;
    let mut vals = vec![0.0f64; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [i as f64 / nf, j as f64 / nf, k as f64 / nf];
                vals[(i * n + j) * n + k] =
                    field.eval(&x).expect("dimension checked above");
            }
        }
    }
    let val_at = |p: [usize; 3]| vals[((p[0] % n) * n + (p[1] % n)) * n + (p[2] % n)];

    let mut mesh = TorusMesh::default();
    // Vertex registry: grid edge (canonical lower corner, direction class)
    // -> vertex id.  Positions may renormalize by a unit shift when the
    // refined point lands exactly on the far face; the shift joins the
    // vertex's deck offset in every referencing cube.
    let mut registry: HashMap<(usize, usize, usize, u8), usize> = HashMap::new();
    let mut shifts: Vec<[i64; 3]> = Vec::new();

    // Resolve (or create) the mesh vertex on the grid edge from `lo` to
    // `lo + d`, returning (vertex id, deck offset in this cube's frame).
    let mut cut = |lo: [usize; 3],
                   d: [usize; 3],
                   mesh: &mut TorusMesh,
                   shifts: &mut Vec<[i64; 3]>|
     -> (usize, [i64; 3]) {
        let lo_mod = [lo[0] % n, lo[1] % n, lo[2] % n];
        let key = (lo_mod[0], lo_mod[1], lo_mod[2], delta_index(d));
        let id = match registry.get(&key) {
            Some(&id) => id,
            None => {
                let hi = [lo[0] + d[0], lo[1] + d[1], lo[2] + d[2]];
                let (v_lo, v_hi) = (val_at(lo), val_at(hi));
                let mut t = (c - v_lo) / (v_hi - v_lo);
                if !(0.0..=1.0).contains(&t) {
                    t = t.clamp(0.0, 1.0);
                }
                if refine_tol > 0.0 {
                    t = refine_on_edge(field, c, lo_mod, d, nf, t, v_lo - c, v_hi - c, refine_tol);
                }
                let mut pos = [0.0f64; 3];
                let mut shift = [0i64; 3];
                for a in 0..3 {
                    let raw = (lo_mod[a] as f64 + t * d[a] as f64) / nf;
                    if raw >= 1.0 {
                        pos[a] = raw - 1.0;
                        shift[a] = 1;
                    } else {
                        pos[a] = raw;
                    }
                }
                let id = mesh.vertices.len();
                mesh.vertices.push(pos);
                shifts.push(shift);
                registry.insert(key, id);
                id
            }
        };
        let off = [
            (lo[0] / n) as i64 + shifts[id][0],
            (lo[1] / n) as i64 + shifts[id][1],
            (lo[2] / n) as i64 + shifts[id][2],
        ];
        (id, off)
    };

    let emit = |corners: [(usize, [i64; 3]); 3], mesh: &mut TorusMesh| {
        let (v0, o0) = corners[0];
        let (v1, o1) = corners[1];
        let (v2, o2) = corners[2];
        mesh.faces.push(Face {
            v: [v0, v1, v2],
            wrap: [
                [o1[0] - o0[0], o1[1] - o0[1], o1[2] - o0[2]],
                [o2[0] - o1[0], o2[1] - o1[1], o2[2] - o1[2]],
                [o0[0] - o2[0], o0[1] - o2[1], o0[2] - o2[2]],
            ],
        });
    };

    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // Fast reject: all eight corners on one side.
                let mut lo_v = f64::INFINITY;
                let mut hi_v = f64::NEG_INFINITY;
                for di in 0..2 {
                    for dj in 0..2 {
                        for dk in 0..2 {
                            let v = val_at([i + di, j + dj, k + dk]);
                            lo_v = lo_v.min(v);
                            hi_v = hi_v.max(v);
                        }
                    }
                }
                if lo_v >= c || hi_v < c {
                    continue;
                }

                for (perm, parity) in PERMS {
                    let mut tet = [[i, j, k]; 4];
                    tet[1][perm[0]] += 1;
                    tet[2] = tet[1];
                    tet[2][perm[1]] += 1;
                    tet[3] = [i + 1, j + 1, k + 1];
                    let tv = [
                        val_at(tet[0]),
                        val_at(tet[1]),
                        val_at(tet[2]),
                        val_at(tet[3]),
                    ];
                    let pos_mask: Vec<usize> = (0..4).filter(|&a| tv[a] >= c).collect();
                    let neg_mask: Vec<usize> = (0..4).filter(|&a| tv[a] < c).collect();
                    // Tet corners form a chain in componentwise order, so
                    // the edge from corner a to corner b (a < b) points in
                    // a positive direction class.
                    let mut edge = |a: usize, b: usize, mesh: &mut TorusMesh, shifts: &mut Vec<[i64; 3]>| {
                        let (lo, hi) = (tet[a.min(b)], tet[a.max(b)]);
                        let d = [hi[0] - lo[0], hi[1] - lo[1], hi[2] - lo[2]];
                        cut(lo, d, mesh, shifts)
                    };
                    match pos_mask.len() {
                        0 | 4 => {}
                        1 | 3 => {
                            let single_positive = pos_mask.len() == 1;
                            let apex = if single_positive {
                                pos_mask[0]
                            } else {
                                neg_mask[0]
                            };
                            let others: Vec<usize> =
                                (0..4).filter(|&a| a != apex).collect();
                            let e0 = edge(apex, others[0], &mut mesh, &mut shifts);
                            let e1 = edge(apex, others[1], &mut mesh, &mut shifts);
                            let e2 = edge(apex, others[2], &mut mesh, &mut shifts);
                            // Normal toward the positive side: calibrated
                            // per apex index and tet parity.
                            let flip = if single_positive {
                                (apex % 2 == 0) ^ (parity < 0)
                            } else {
                                (apex % 2 == 1) ^ (parity < 0)
                            };
                            if flip {
                                emit([e0, e2, e1], &mut mesh);
                            } else {
                                emit([e0, e1, e2], &mut mesh);
                            }
                        }
                        2 => {
                            let (pi, pj) = (pos_mask[0], pos_mask[1]);
                            let (nk, nl) = (neg_mask[0], neg_mask[1]);
                            let q0 = edge(pi, nk, &mut mesh, &mut shifts);
                            let q1 = edge(pi, nl, &mut mesh, &mut shifts);
                            let q2 = edge(pj, nl, &mut mesh, &mut shifts);
                            let q3 = edge(pj, nk, &mut mesh, &mut shifts);
                            let flip = perm_even([pi, pj, nk, nl]) ^ (parity < 0);
                            if flip {
                                emit([q0, q3, q2], &mut mesh);
                                emit([q0, q2, q1], &mut mesh);
                            } else {
                                emit([q0, q1, q2], &mut mesh);
                                emit([q0, q2, q3], &mut mesh);
                            }
                        }
                        _ => unreachable!(),
                    }
                }
            }
        }
    }
    Ok(mesh)
}

/// Slide the cut point along its grid edge until `|f - c| <= tol`, by
/// Newton steps safeguarded with the sign-change bracket (bisection
/// whenever Newton would leave it).  `g_lo`/`g_hi` are `f - c` at the
/// edge ends; the symbolic sign rule guarantees they straddle zero.
#[allow(clippy::too_many_arguments)]
fn refine_on_edge(
    field: &TrigField,
    c: f64,
    lo: [usize; 3],
    d: [usize; 3],
    nf: f64,
    mut t: f64,
    g_lo: f64,
    g_hi: f64,
    tol: f64,
) -> f64 {
    let point = |t: f64| {
        [
            (lo[0] as f64 + t * d[0] as f64) / nf,
            (lo[1] as f64 + t * d[1] as f64) / nf,
            (lo[2] as f64 + t * d[2] as f64) / nf,
        ]
    };
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let (mut ga, _gb) = (g_lo, g_hi);
    // Orient the bracket by the sign at the low end; g changes sign on it.
    for _ in 0..64 {
        let x = point(t);
        let g = field.eval(&x).expect("dimension checked by caller") - c;
        if g.abs() <= tol {
            return t;
        }
        if (g > 0.0) == (ga > 0.0) {
            a = t;
            ga = g;
        } else {
            b = t;
        }
        // Newton proposal from the directional derivative along the edge.
        let grad = field.grad(&x).expect("dimension checked by caller");
        let dg = (grad[0] * d[0] as f64 + grad[1] * d[1] as f64 + grad[2] * d[2] as f64) / nf;
        let newton = t - g / dg;
        t = if dg != 0.0 && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
    }
    t
}
