//! Combinatorial section tracing on a periodic triangle mesh.
//!
//! The walker works on the quotient mesh but reasons about one fixed
//! Euclidean lift of the curve it follows.  Its state is a triangle, the
//! edge through which the curve entered it, and the lattice frame
//! `F ∈ ℤ³` of the current lift of that triangle.  The plane height at a
//! corner with representative `r` is `⟨B, r + F⟩ − s`; the curve exits
//! through the unique other edge whose endpoint heights straddle zero,
//! and crossing into the neighbor transfers the frame by comparing the
//! corner offsets the shared edge carries in the two triangles.
//!
//! For an integer direction the plane height moves in integer steps
//! `m = ⟨B,F⟩` as the frame changes, so the state `(triangle, edge, m)`
//! is discrete and the first return to the seed state is an exact
//! closure certificate; the deck class of the period is the frame
//! difference.  Ties at corners are broken as if the level were `s + δ`
//! for an infinitesimal `δ > 0` (heights `≤ 0` count as negative), which
//! keeps the walk consistent even when the plane hits a vertex.

use std::collections::HashSet;

use torus_fields::TrigField;
use torus_lattice::{content, dot_i, IVec3};
use torus_mesh::{MeshAdjacency, TorusMesh};

use crate::field_trace::{trace_field_section, FieldTraceOptions};
use crate::{Recorder, SectionError, Trajectory};

/// Tuning for the mesh walker.
#[derive(Debug, Clone)]
pub struct WalkOptions {
    /// Safety bound on edges crossed per component.
    pub max_steps: usize,
    /// Stop enumerating after this many components (`None`: all).
    pub max_components: Option<usize>,
    /// Record the polyline (classes and closure are tracked regardless).
    pub record: bool,
    /// Decimation cap for recorded samples.
    pub sample_cap: usize,
}

impl Default for WalkOptions {
    fn default() -> Self {
        WalkOptions {
            max_steps: 4_000_000,
            max_components: None,
            record: false,
            sample_cap: 1 << 16,
        }
    }
}

/// Per-face geometry pulled out of the mesh once per call: corner
/// representatives, their plane heights at frame zero, and the corner
/// offsets (integer part of the anchored lift).
struct Geometry {
    reps: Vec<[[f64; 3]; 3]>,
    bdot: Vec<[f64; 3]>,
    offsets: Vec<[IVec3; 3]>,
}

fn geometry(mesh: &TorusMesh, b: [f64; 3]) -> Geometry {
    let mut reps = Vec::with_capacity(mesh.faces.len());
    let mut bdot = Vec::with_capacity(mesh.faces.len());
    let mut offsets = Vec::with_capacity(mesh.faces.len());
    for (fi, face) in mesh.faces.iter().enumerate() {
        let r = mesh.corner_positions(fi);
        let mut d = [0.0f64; 3];
        for c in 0..3 {
            d[c] = b[0] * r[c][0] + b[1] * r[c][1] + b[2] * r[c][2];
        }
        reps.push(r);
        bdot.push(d);
        offsets.push(face.corner_offsets());
    }
    Geometry {
        reps,
        bdot,
        offsets,
    }
}

/// Frame of the neighboring triangle for the same Euclidean lift: the
/// shared edge starts at vertex `a` with offset `offsets[f][e]` here and
/// ends at `a` with offset `offsets[f2][e2+1]` there.
fn transfer(geo: &Geometry, frame: IVec3, f: usize, e: usize, f2: usize, e2: usize) -> IVec3 {
    let oa = geo.offsets[f][e];
    let ob = geo.offsets[f2][(e2 + 1) % 3];
    [
        frame[0] + oa[0] - ob[0],
        frame[1] + oa[1] - ob[1],
        frame[2] + oa[2] - ob[2],
    ]
}

/// Crossing point of edge `e` of face `f` in the lift with frame
/// `frame`, for plane height offset `plane = ⟨B,F⟩ − s`.
fn edge_crossing(geo: &Geometry, f: usize, e: usize, frame: IVec3, plane: f64) -> [f64; 3] {
    let a = e;
    let b = (e + 1) % 3;
    let ha = geo.bdot[f][a] + plane;
    let hb = geo.bdot[f][b] + plane;
    // On a crossed edge the heights straddle zero, so the denominator
    // is bounded away from zero.
    let t = ha / (ha - hb);
    let ra = geo.reps[f][a];
    let rb = geo.reps[f][b];
    [
        ra[0] + t * (rb[0] - ra[0]) + frame[0] as f64,
        ra[1] + t * (rb[1] - ra[1]) + frame[1] as f64,
        ra[2] + t * (rb[2] - ra[2]) + frame[2] as f64,
    ]
}

/// The unique exit edge of face `f` entered through `e_in`, given the
/// three corner heights.  Heights `> 0` are the positive side.
fn exit_edge(h: [f64; 3], e_in: usize) -> Option<usize> {
    let pos = [h[0] > 0.0, h[1] > 0.0, h[2] > 0.0];
    for k in 1..3 {
        let e = (e_in + k) % 3;
        if pos[e] != pos[(e + 1) % 3] {
            return Some(e);
        }
    }
    None
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

/// Extended gcd: `(g, x, y)` with `a·x + b·y = g ≥ 0`.
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Some frame with `⟨b, F⟩ = 1` for a primitive integer direction.
fn unit_frame(b: IVec3) -> IVec3 {
    let (g01, x0, x1) = ext_gcd(b[0], b[1]);
    let (g, y, z) = ext_gcd(g01, b[2]);
    debug_assert_eq!(g, 1, "direction must be primitive");
    [x0 * y, x1 * y, z]
}

/// Walk one component of the section of `mesh` by the plane
/// `⟨b, x⟩ = s` (with `b` primitive integer), starting from the state
/// "entering face `f0` through edge `e0` at plane-lift `m0`".
///
/// Marks every state it passes (and the co-directed twin state across
/// each entry edge) in `visited`, so an enumeration never reports the
/// same quotient curve twice.
#[allow(clippy::too_many_arguments)]
fn walk_rational_component(
    geo: &Geometry,
    adj: &MeshAdjacency,
    b: IVec3,
    s: f64,
    seed: (usize, usize, i128),
    opts: &WalkOptions,
    visited: &mut HashSet<(usize, usize, i128)>,
) -> Result<Trajectory, SectionError> {
    let (f0, e0, m0) = seed;
    let frame0 = {
        let u = unit_frame(b);
        let k = i64::try_from(m0).map_err(|_| SectionError::Overflow)?;
        [u[0] * k, u[1] * k, u[2] * k]
    };
    debug_assert_eq!(dot_i(&b, &frame0), m0);

    let (mut f, mut e, mut m, mut frame) = (f0, e0, m0, frame0);
    let mut rec = Recorder::new(opts.record, opts.sample_cap);
    let mut prev = edge_crossing(geo, f, e, frame, m as f64 - s);
    rec.push(0.0, prev);
    let mut arc = 0.0f64;
    let mut closed = false;
    let mut translation = None;
    let mut steps = 0usize;

    loop {
        visited.insert((f, e, m));
        // The same curve point seen from the other side of the entry
        // edge starts the reverse-direction trace; mark it too.
        let (tf, te) = adj.pairs[f][e];
        let tframe = transfer(geo, frame, f, e, tf, te);
        visited.insert((tf, te, dot_i(&b, &tframe)));

        if steps >= opts.max_steps {
            break;
        }
        let plane = m as f64 - s;
        let h = [
            geo.bdot[f][0] + plane,
            geo.bdot[f][1] + plane,
            geo.bdot[f][2] + plane,
        ];
        let exit = exit_edge(h, e).ok_or(SectionError::Degenerate { face: f })?;
        let p = edge_crossing(geo, f, exit, frame, plane);
        arc += dist(prev, p);
        prev = p;
        steps += 1;
        rec.push(arc, p);

        let (f2, e2) = adj.pairs[f][exit];
        let frame2 = transfer(geo, frame, f, exit, f2, e2);
        let m2 = dot_i(&b, &frame2);
        if (f2, e2, m2) == (f0, e0, m0) {
            closed = true;
            translation = Some([
                frame2[0] - frame0[0],
                frame2[1] - frame0[1],
                frame2[2] - frame0[2],
            ]);
            break;
        }
        (f, e, m, frame) = (f2, e2, m2, frame2);
    }

    rec.push_final(arc, prev);
    Ok(Trajectory {
        samples: rec.into_samples(),
        arc_length: arc,
        steps,
        closed,
        translation,
        singular_adjacent: false,
    })
}

/// Enumerate the connected components of the section of `mesh` by the
/// plane `⟨b, x⟩ = s` for an integer direction `b`.
///
/// Components come back in deterministic seed-scan order (face, entry
/// edge, plane lift).  Every component of a rational section closes; a
/// component returned with `closed == false` exhausted `max_steps` and
/// should be treated as a budget failure by the caller.
pub fn rational_mesh_section(
    mesh: &TorusMesh,
    adj: &MeshAdjacency,
    b: IVec3,
    s: f64,
    opts: &WalkOptions,
) -> Result<Vec<Trajectory>, SectionError> {
    if b == [0, 0, 0] {
        return Err(SectionError::ZeroDirection);
    }
    if !s.is_finite() {
        return Err(SectionError::BadLevel);
    }
    // ⟨b,x⟩ = s and ⟨b/g, x⟩ = s/g cut the same plane; a primitive
    // direction makes every integer a reachable plane lift.
    let g = content(&b) as i64;
    let bp = [b[0] / g, b[1] / g, b[2] / g];
    let sp = s / g as f64;
    let geo = geometry(mesh, [bp[0] as f64, bp[1] as f64, bp[2] as f64]);

    let mut visited: HashSet<(usize, usize, i128)> = HashSet::new();
    let mut components = Vec::new();
    'scan: for f in 0..mesh.faces.len() {
        for e in 0..3 {
            let alpha = geo.bdot[f][e];
            let beta = geo.bdot[f][(e + 1) % 3];
            if alpha == beta {
                continue; // edge parallel to the plane family
            }
            // Integer lifts m with the crossing strictly inside the
            // height interval: m ∈ (s − max, s − min].
            let lo = sp - alpha.max(beta);
            let hi = sp - alpha.min(beta);
            let m_first = lo.floor() as i128 + 1;
            let m_last = hi.floor() as i128;
            for m in m_first..=m_last {
                // Re-check with the walker's own predicate so boundary
                // rounding cannot seed a non-crossing state.
                let crosses = (alpha + m as f64 > sp) != (beta + m as f64 > sp);
                if !crosses || visited.contains(&(f, e, m)) {
                    continue;
                }
                let traj =
                    walk_rational_component(&geo, adj, bp, sp, (f, e, m), opts, &mut visited)?;
                components.push(traj);
                if opts
                    .max_components
                    .is_some_and(|k| components.len() >= k)
                {
                    break 'scan;
                }
            }
        }
    }
    Ok(components)
}

/// Trace a single section curve for an arbitrary real direction.
///
/// Closure can no longer be certified by integer data, so the walker
/// declares closure when it re-enters the seed face through the seed
/// edge with the plane lift `⟨b,F⟩` reproduced to within `1e-7` — for a
/// generic irrational direction that never happens and the trace runs
/// to its budget, which is the interesting regime.
pub fn float_mesh_section_trace(
    mesh: &TorusMesh,
    adj: &MeshAdjacency,
    b: [f64; 3],
    s: f64,
    seed: Option<(usize, usize)>,
    opts: &WalkOptions,
) -> Result<Trajectory, SectionError> {
    if !b.iter().all(|x| x.is_finite()) || !s.is_finite() {
        return Err(SectionError::BadDirection);
    }
    if b == [0.0; 3] {
        return Err(SectionError::ZeroDirection);
    }
    let geo = geometry(mesh, b);
    let (f0, e0) = match seed {
        Some(se) => {
            if se.0 >= mesh.faces.len() || se.1 >= 3 {
                return Err(SectionError::NoSeed);
            }
            se
        }
        None => {
            let mut found = None;
            'seek: for f in 0..mesh.faces.len() {
                for e in 0..3 {
                    let ha = geo.bdot[f][e] - s;
                    let hb = geo.bdot[f][(e + 1) % 3] - s;
                    if (ha > 0.0) != (hb > 0.0) {
                        found = Some((f, e));
                        break 'seek;
                    }
                }
            }
            found.ok_or(SectionError::NoSeed)?
        }
    };
    {
        let ha = geo.bdot[f0][e0] - s;
        let hb = geo.bdot[f0][(e0 + 1) % 3] - s;
        if (ha > 0.0) == (hb > 0.0) {
            return Err(SectionError::NoSeed);
        }
    }

    let frame0 = [0i64; 3];
    let m0 = 0.0f64;
    let (mut f, mut e, mut m, mut frame) = (f0, e0, m0, frame0);
    let mut rec = Recorder::new(opts.record, opts.sample_cap);
    let mut prev = edge_crossing(&geo, f, e, frame, m - s);
    rec.push(0.0, prev);
    let mut arc = 0.0f64;
    let mut closed = false;
    let mut translation = None;
    let mut steps = 0usize;

    while steps < opts.max_steps {
        let plane = m - s;
        let h = [
            geo.bdot[f][0] + plane,
            geo.bdot[f][1] + plane,
            geo.bdot[f][2] + plane,
        ];
        let exit = exit_edge(h, e).ok_or(SectionError::Degenerate { face: f })?;
        let p = edge_crossing(&geo, f, exit, frame, plane);
        arc += dist(prev, p);
        prev = p;
        steps += 1;
        rec.push(arc, p);

        let (f2, e2) = adj.pairs[f][exit];
        let frame2 = transfer(&geo, frame, f, exit, f2, e2);
        let m2 = b[0] * frame2[0] as f64 + b[1] * frame2[1] as f64 + b[2] * frame2[2] as f64;
        if (f2, e2) == (f0, e0) && (m2 - m0).abs() <= 1e-7 * (1.0 + m0.abs()) {
            closed = true;
            translation = Some([frame2[0], frame2[1], frame2[2]]);
            break;
        }
        (f, e, m, frame) = (f2, e2, m2, frame2);
    }

    rec.push_final(arc, prev);
    Ok(Trajectory {
        samples: rec.into_samples(),
        arc_length: arc,
        steps,
        closed,
        translation,
        singular_adjacent: false,
    })
}

/// A sectionable surface: a smooth level set or a periodic mesh.
pub enum Surface<'a> {
    Field { field: &'a TrigField, c: f64 },
    Mesh { mesh: &'a TorusMesh, adj: &'a MeshAdjacency },
}

/// Trace one section curve of `surface` by the plane `⟨b,x⟩ = s`, from
/// an optional spatial seed hint, up to an arc-length budget.
///
/// Field surfaces use the predictor–corrector tracer; meshes use the
/// combinatorial walker (the hint selects the crossed edge nearest to
/// it, and the budget converts to a step bound via the mean edge
/// length).  Samples are always recorded.
pub fn trace_section(
    surface: &Surface<'_>,
    b: [f64; 3],
    s: f64,
    seed: Option<[f64; 3]>,
    budget_arc: f64,
    sample_cap: usize,
) -> Result<Trajectory, SectionError> {
    if !(budget_arc > 0.0) || !budget_arc.is_finite() {
        return Err(SectionError::BadBudget);
    }
    match surface {
        Surface::Field { field, c } => {
            let opts = FieldTraceOptions {
                sample_cap,
                ..FieldTraceOptions::default()
            };
            let x0 = match seed {
                Some(x) => x,
                None => crate::field_trace::find_section_seed(field, *c, b, s, 12)?,
            };
            trace_field_section(field, *c, b, s, x0, budget_arc, &opts)
        }
        Surface::Mesh { mesh, adj } => {
            let geo = geometry(mesh, b);
            let seed_edge = match seed {
                None => None,
                Some(hint) => {
                    // Nearest crossed edge to the hint, by crossing point
                    // distance on the canonical torus.
                    let mut best: Option<((usize, usize), f64)> = None;
                    for f in 0..mesh.faces.len() {
                        for e in 0..3 {
                            let ha = geo.bdot[f][e] - s;
                            let hb = geo.bdot[f][(e + 1) % 3] - s;
                            if (ha > 0.0) == (hb > 0.0) {
                                continue;
                            }
                            let p = edge_crossing(&geo, f, e, [0; 3], -s);
                            let mut d2 = 0.0;
                            for a in 0..3 {
                                let mut dd = (p[a] - hint[a]).rem_euclid(1.0);
                                if dd > 0.5 {
                                    dd = 1.0 - dd;
                                }
                                d2 += dd * dd;
                            }
                            if best.map_or(true, |(_, bd)| d2 < bd) {
                                best = Some(((f, e), d2));
                            }
                        }
                    }
                    Some(best.ok_or(SectionError::NoSeed)?.0)
                }
            };
            // Convert the arc budget to a step bound.
            let mut total = 0.0;
            let mut edges = 0usize;
            for f in 0..mesh.faces.len().min(512) {
                for e in 0..3 {
                    total += dist(geo.reps[f][e], geo.reps[f][(e + 1) % 3]);
                    edges += 1;
                }
            }
            if edges == 0 {
                return Err(SectionError::NoSeed);
            }
            let mean_edge = (total / edges as f64).max(1e-9);
            // Crossing segments are shorter than edges on average;
            // budget generously and let arc be the honest measure.
            let max_steps = ((budget_arc / mean_edge) * 4.0).ceil() as usize;
            let opts = WalkOptions {
                max_steps: max_steps.clamp(16, 200_000_000),
                max_components: None,
                record: true,
                sample_cap,
            };
            float_mesh_section_trace(mesh, adj, b, s, seed_edge, &opts)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ext_gcd_and_unit_frame() {
        fn gcd(a: i64, b: i64) -> i64 {
            if b == 0 {
                a.abs()
            } else {
                gcd(b, a.rem_euclid(b))
            }
        }
        for b in [[2i64, 3, 5], [1, 0, 0], [-7, 3, 9], [4, -9, 1]] {
            let (g, x, y) = ext_gcd(b[0], b[1]);
            assert_eq!(g, gcd(b[0], b[1]));
            assert_eq!(b[0] * x + b[1] * y, g);
            if content(&b) == 1 {
                let u = unit_frame(b);
                assert_eq!(dot_i(&b, &u), 1);
            }
        }
    }

    #[test]
    fn exit_edge_is_unique_and_total() {
        // Entry through edge 0 (corners 0 and 1 straddle), third corner
        // on either side: the exit is forced.
        assert_eq!(exit_edge([1.0, -1.0, 2.0], 0), Some(1));
        assert_eq!(exit_edge([1.0, -1.0, -2.0], 0), Some(2));
        assert_eq!(exit_edge([-1.0, 1.0, 2.0], 0), Some(2));
        assert_eq!(exit_edge([-1.0, 1.0, -2.0], 0), Some(1));
        // Degenerate: no straddle anywhere.
        assert_eq!(exit_edge([1.0, 1.0, 1.0], 0), None);
    }
}
