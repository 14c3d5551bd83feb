//! Exact section tracing on meshes with rational vertex coordinates.
//!
//! Same walk as [`rational_mesh_section`](crate::rational_mesh_section),
//! but every plane height is an integer: coordinates, the level, and
//! the deck contribution are all scaled by a common denominator, so
//! sign tests, closure detection, and translation classes carry no
//! floating-point error at all.  This is the reference oracle the
//! floating walker is checked against.

use std::collections::HashSet;

use torus_lattice::{content, dot_i, IVec3};
use torus_mesh::{MeshAdjacency, TorusMesh};

use crate::{Recorder, SectionError, Trajectory, WalkOptions};

/// Integer plane heights for one face: `height[c] + L·m` is `L` times
/// the distance numerator of corner `c` at plane lift `m`.
struct ExactGeometry {
    /// `L·⟨b, ρ_c⟩ − L·s` per face corner, `ρ_c` the exact corner
    /// representative.
    height: Vec<[i128; 3]>,
    /// Float corner representatives, for recorded sample positions.
    reps: Vec<[[f64; 3]; 3]>,
    offsets: Vec<[IVec3; 3]>,
    /// The common scale: heights move by `L` per unit of plane lift.
    scale: i128,
}

fn checked_mul(a: i128, b: i128) -> Result<i128, SectionError> {
    a.checked_mul(b).ok_or(SectionError::Overflow)
}

fn checked_add(a: i128, b: i128) -> Result<i128, SectionError> {
    a.checked_add(b).ok_or(SectionError::Overflow)
}

fn lcm_i128(a: i128, b: i128) -> Result<i128, SectionError> {
    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a.rem_euclid(b))
        }
    }
    checked_mul(a / gcd(a, b), b)
}

fn exact_geometry(
    mesh: &TorusMesh,
    b: IVec3,
    s_num: i64,
    s_den: i64,
) -> Result<ExactGeometry, SectionError> {
    let exact = mesh.exact.as_ref().ok_or(SectionError::ExactUnavailable)?;
    // Common denominator of every coordinate and the level.
    let mut scale: i128 = s_den.unsigned_abs() as i128;
    for q in exact {
        for c in q {
            scale = lcm_i128(scale, *c.denom() as i128)?;
        }
    }
    let s_scaled = checked_mul(s_num as i128, scale / s_den as i128)?;

    let mut height = Vec::with_capacity(mesh.faces.len());
    let mut reps = Vec::with_capacity(mesh.faces.len());
    let mut offsets = Vec::with_capacity(mesh.faces.len());
    for (fi, face) in mesh.faces.iter().enumerate() {
        let offs = face.corner_offsets();
        let mut h = [0i128; 3];
        for c in 0..3 {
            let q = &exact[face.v[c]];
            let mut acc: i128 = -s_scaled;
            for a in 0..3 {
                // b_a · (num/den + off) scaled by L, all exact.
                let coord = checked_mul(*q[a].numer() as i128, scale / *q[a].denom() as i128)?;
                let lifted = checked_add(coord, checked_mul(offs[c][a] as i128, scale)?)?;
                acc = checked_add(acc, checked_mul(b[a] as i128, lifted)?)?;
            }
            h[c] = acc;
        }
        height.push(h);
        reps.push(mesh.corner_positions(fi));
        offsets.push(offs);
    }
    Ok(ExactGeometry {
        height,
        reps,
        offsets,
        scale,
    })
}

fn transfer(geo: &ExactGeometry, frame: IVec3, f: usize, e: usize, f2: usize, e2: usize) -> IVec3 {
    let oa = geo.offsets[f][e];
    let ob = geo.offsets[f2][(e2 + 1) % 3];
    [
        frame[0] + oa[0] - ob[0],
        frame[1] + oa[1] - ob[1],
        frame[2] + oa[2] - ob[2],
    ]
}

fn edge_crossing(geo: &ExactGeometry, f: usize, e: usize, frame: IVec3, m: i128) -> [f64; 3] {
    let a = e;
    let b = (e + 1) % 3;
    let ha = (geo.height[f][a] + geo.scale * m) as f64;
    let hb = (geo.height[f][b] + geo.scale * m) as f64;
    let t = ha / (ha - hb);
    let ra = geo.reps[f][a];
    let rb = geo.reps[f][b];
    [
        ra[0] + t * (rb[0] - ra[0]) + frame[0] as f64,
        ra[1] + t * (rb[1] - ra[1]) + frame[1] as f64,
        ra[2] + t * (rb[2] - ra[2]) + frame[2] as f64,
    ]
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

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

fn unit_frame(b: IVec3) -> IVec3 {
    let (g01, x0, x1) = ext_gcd(b[0], b[1]);
    let (g, y, z) = ext_gcd(g01, b[2]);
    debug_assert_eq!(g, 1);
    [x0 * y, x1 * y, z]
}

/// Enumerate the section components of an exact mesh by the plane
/// `⟨b, x⟩ = s_num/s_den`, entirely in integer arithmetic.
///
/// Components come back in deterministic seed-scan order.  For a
/// rational direction every component must close; `closed == false`
/// means the step budget was exhausted.
pub fn exact_mesh_section(
    mesh: &TorusMesh,
    adj: &MeshAdjacency,
    b: IVec3,
    s_num: i64,
    s_den: i64,
    opts: &WalkOptions,
) -> Result<Vec<Trajectory>, SectionError> {
    if b == [0, 0, 0] {
        return Err(SectionError::ZeroDirection);
    }
    if s_den == 0 {
        return Err(SectionError::BadLevel);
    }
    let (s_num, s_den) = if s_den < 0 { (-s_num, -s_den) } else { (s_num, s_den) };
    // Primitive direction: ⟨b/g, x⟩ = s/g cuts the same plane and makes
    // every integer plane lift reachable by a frame.
    let g = content(&b) as i64;
    let bp = [b[0] / g, b[1] / g, b[2] / g];
    let geo = exact_geometry(mesh, bp, s_num, s_den * g)?;
    let uf = unit_frame(bp);

    let mut visited: HashSet<(usize, usize, i128)> = HashSet::new();
    let mut components = Vec::new();
    'scan: for f in 0..mesh.faces.len() {
        for e in 0..3 {
            let ha = geo.height[f][e];
            let hb = geo.height[f][(e + 1) % 3];
            if ha == hb {
                continue;
            }
            // Crossing lifts m: exactly one of ha + Lm > 0, hb + Lm > 0.
            // That is Lm ∈ (−max, −min], i.e. m ∈ the matching integer
            // window under floor division by the positive scale L.
            let lo = -ha.max(hb); // strict
            let hi = -ha.min(hb); // inclusive
            let m_first = lo.div_euclid(geo.scale) + 1;
            let m_last = hi.div_euclid(geo.scale);
            for m in m_first..=m_last {
                let pa = ha + geo.scale * m > 0;
                let pb = hb + geo.scale * m > 0;
                if pa == pb || visited.contains(&(f, e, m)) {
                    continue;
                }
                let traj = walk_component(&geo, adj, bp, uf, (f, e, m), opts, &mut visited)?;
                components.push(traj);
                if opts.max_components.is_some_and(|k| components.len() >= k) {
                    break 'scan;
                }
            }
        }
    }
    Ok(components)
}

#[allow(clippy::too_many_arguments)]
fn walk_component(
    geo: &ExactGeometry,
    adj: &MeshAdjacency,
    b: IVec3,
    uf: IVec3,
    seed: (usize, usize, i128),
    opts: &WalkOptions,
    visited: &mut HashSet<(usize, usize, i128)>,
) -> Result<Trajectory, SectionError> {
    let (f0, e0, m0) = seed;
    let k = i64::try_from(m0).map_err(|_| SectionError::Overflow)?;
    let frame0 = [uf[0] * k, uf[1] * k, uf[2] * k];
    debug_assert_eq!(dot_i(&b, &frame0), m0);

    let (mut f, mut e, mut m, mut frame) = (f0, e0, m0, frame0);
    let mut rec = Recorder::new(opts.record, opts.sample_cap);
    let mut prev = edge_crossing(geo, f, e, frame, m);
    rec.push(0.0, prev);
    let mut arc = 0.0f64;
    let mut closed = false;
    let mut translation = None;
    let mut steps = 0usize;

    loop {
        visited.insert((f, e, m));
        let (tf, te) = adj.pairs[f][e];
        let tframe = transfer(geo, frame, f, e, tf, te);
        visited.insert((tf, te, dot_i(&b, &tframe)));

        if steps >= opts.max_steps {
            break;
        }
        let pos = |c: usize| geo.height[f][c] + geo.scale * m > 0;
        let mut exit = None;
        for kk in 1..3 {
            let cand = (e + kk) % 3;
            if pos(cand) != pos((cand + 1) % 3) {
                exit = Some(cand);
                break;
            }
        }
        let exit = exit.ok_or(SectionError::Degenerate { face: f })?;
        let p = edge_crossing(geo, f, exit, frame, m);
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
