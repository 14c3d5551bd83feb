//! The exact polyhedral genus-3 surface `{4,6|4}` ("mu-cube").
//!
//! Tile the torus by the eight half-cubes of side 1/2 and call a half-cube
//! *filled* when at least two of its three half-grid indices are odd; the
//! filled cubes form a thickened copy of the cube-edge skeleton.  The
//! boundary of that solid is a closed surface built from 12 axis-aligned
//! squares of side 1/2: a square face of the half-grid belongs to the
//! surface exactly when it separates a filled half-cube from an empty one,
//! which happens precisely when one of the two in-plane indices is odd
//! (for faces normal to z: one of the x/y half-indices odd, for either
//! z-level).  Each square is split into two triangles, giving the exact
//! counts
//!
//! `V = 8, E = 36, F = 24, χ = -4` — genus 3 —
//!
//! with every vertex a point of the half-integer lattice `{0, 1/2}³`.
//! All coordinates are exact (halves are exact in binary floating point,
//! and the mesh carries its rational coordinates), so downstream exact
//! tracing can run on integers after scaling by 2.
//!
//! Orientation: triangle normals point out of the filled solid.  A face
//! at z-level `c/2` has outward normal `(-1)^c ẑ` (the filled neighbor
//! sits on the odd z side), and cyclically for x and y.
//!
//! The surface is self-complementary: translation by `(1/2, 1/2, 1/2)`
//! maps it onto itself while exchanging inside and outside (reversing
//! orientation) — the hallmark of the `{4,6|4}` polyhedron.

use num::rational::Rational64;

use crate::{Face, TorusMesh};

/// Build the exact `{4,6|4}` mesh.
pub fn mu_cube_mesh() -> TorusMesh {
    // The eight half-lattice points, id = 4*i + 2*j + k for (i,j,k) in
    // {0,1}³ meaning (i/2, j/2, k/2).
    let mut vertices = Vec::with_capacity(8);
    let mut exact = Vec::with_capacity(8);
    for i in 0..2i64 {
        for j in 0..2i64 {
            for k in 0..2i64 {
                vertices.push([i as f64 / 2.0, j as f64 / 2.0, k as f64 / 2.0]);
                exact.push([
                    Rational64::new(i, 2),
                    Rational64::new(j, 2),
                    Rational64::new(k, 2),
                ]);
            }
        }
    }

    let mut faces = Vec::with_capacity(24);
    // A corner given in half-units (each coordinate in {0, 1, 2}):
    // canonical vertex id plus deck offset.
    let corner = |h: [i64; 3]| -> (usize, [i64; 3]) {
        let mut id = 0usize;
        let mut off = [0i64; 3];
        for a in 0..3 {
            let (canon, o) = if h[a] >= 2 { (h[a] - 2, 1) } else { (h[a], 0) };
            id = id * 2 + canon as usize;
            off[a] = o;
        }
        (id, off)
    };
    let mut quad = |c00: [i64; 3], c10: [i64; 3], c11: [i64; 3], c01: [i64; 3]| {
        let q = [corner(c00), corner(c10), corner(c11), corner(c01)];
        for t in [[q[0], q[1], q[2]], [q[0], q[2], q[3]]] {
            let [(v0, o0), (v1, o1), (v2, o2)] = t;
            faces.push(Face {
                v: [v0, v1, v2],
                wrap: [
                    [o1[0] - o0[0], o1[1] - o0[1], o1[2] - o0[2]],
                    [o2[0] - o1[0], o2[1] - o1[1], o2[2] - o1[2]],
                    [o0[0] - o2[0], o0[1] - o2[1], o0[2] - o2[2]],
                ],
            });
        }
    };

    // For each axis `ax` (normal direction) the surface holds the squares
    // whose two in-plane half-indices (u, v) have exactly one odd entry,
    // at both levels c in {0, 1}.  Corners are listed counterclockwise
    // as seen from the outward normal (-1)^c along `ax`.
    for ax in 0..3usize {
        let (ua, va) = ((ax + 1) % 3, (ax + 2) % 3);
        for (u0, v0) in [(0i64, 1i64), (1, 0)] {
            for c in 0..2i64 {
                let mk = |du: i64, dv: i64| -> [i64; 3] {
                    let mut h = [0i64; 3];
                    h[ax] = c;
                    h[ua] = u0 + du;
                    h[va] = v0 + dv;
                    h
                };
                // CCW around +ax is (u,v) -> (u+1,v) -> (u+1,v+1) -> (u,v+1)
                // since e_u x e_v = e_ax for the cyclic axis order.
                if c == 0 {
                    quad(mk(0, 0), mk(1, 0), mk(1, 1), mk(0, 1));
                } else {
                    quad(mk(0, 0), mk(0, 1), mk(1, 1), mk(1, 0));
                }
            }
        }
    }

    TorusMesh {
        vertices,
        faces,
        exact: Some(exact),
    }
}
