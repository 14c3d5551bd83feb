//! Predictor–corrector tracing of smooth B-sections, seed hunting, and
//! critical points of the plane height on a level surface.
//!
//! The section curve `{ε = c} ∩ {⟨B,x⟩ = s}` has tangent `∇ε × B`.  We
//! advance along the normalized tangent with a fourth-order step and
//! then project back onto both constraints with a Gauss–Newton
//! correction, so constraint drift does not accumulate.  Closure is
//! declared on return to the start modulo ℤ³; the integer part of the
//! return displacement is the translation class.

use torus_fields::TrigField;
use torus_lattice::IVec3;

use crate::{Recorder, SectionError, Trajectory};

/// Tuning for the smooth tracer.
#[derive(Debug, Clone)]
pub struct FieldTraceOptions {
    /// Arc-length step of the integrator.
    pub step: f64,
    /// Decimation cap for recorded samples.
    pub sample_cap: usize,
    /// Distance (modulo ℤ³) to the start below which the trace closes.
    pub closure_tol: f64,
    /// Tangent degeneracy threshold `|∇ε × B|/(|∇ε||B|)` below which the
    /// trajectory is flagged singular-adjacent.
    pub singular_tol: f64,
    /// Known critical points (canonical torus coordinates); passing
    /// within `1e-5` of one also flags the trajectory.
    pub critical_points: Vec<[f64; 3]>,
}

impl Default for FieldTraceOptions {
    fn default() -> Self {
        FieldTraceOptions {
            step: 5e-3,
            sample_cap: 1 << 16,
            closure_tol: 1e-4,
            singular_tol: 1e-5,
            critical_points: Vec::new(),
        }
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn grad3(field: &TrigField, x: [f64; 3]) -> Result<[f64; 3], SectionError> {
    let g = field.grad(&x)?;
    Ok([g[0], g[1], g[2]])
}

/// Gauss–Newton projection onto `{ε = c} ∩ {⟨b,x⟩ = s}`.
fn project(
    field: &TrigField,
    c: f64,
    b: [f64; 3],
    s: f64,
    mut x: [f64; 3],
) -> Result<[f64; 3], SectionError> {
    let bb = dot(b, b);
    let tol = 1e-12 * (1.0 + c.abs() + s.abs());
    for _ in 0..60 {
        let r1 = field.eval(&x)? - c;
        let r2 = dot(b, x) - s;
        if r1.abs() <= tol && r2.abs() <= tol {
            return Ok(x);
        }
        let g = grad3(field, x)?;
        let a11 = dot(g, g);
        let a12 = dot(g, b);
        let det = a11 * bb - a12 * a12;
        if !(det.abs() > 1e-14 * (1.0 + a11 * bb)) {
            return Err(SectionError::ProjectionFailed(x));
        }
        // Minimum-norm Newton step for the 2-constraint system:
        // δ = −Jᵀ (JJᵀ)⁻¹ r with J = [∇ε; b].
        let y1 = (r1 * bb - r2 * a12) / det;
        let y2 = (r2 * a11 - r1 * a12) / det;
        for a in 0..3 {
            x[a] -= y1 * g[a] + y2 * b[a];
        }
        if !x.iter().all(|v| v.is_finite()) {
            return Err(SectionError::ProjectionFailed(x));
        }
    }
    Err(SectionError::ProjectionFailed(x))
}

/// Find a point on the section by projecting from a deterministic grid
/// of starts until one converges.
pub fn find_section_seed(
    field: &TrigField,
    c: f64,
    b: [f64; 3],
    s: f64,
    n_grid: usize,
) -> Result<[f64; 3], SectionError> {
    if b == [0.0; 3] {
        return Err(SectionError::ZeroDirection);
    }
    let n = n_grid.max(2);
    // Offset the plane constraint start along b so ⟨b,x⟩ = s is
    // reachable from inside one period: start points x0 + t·b/|b|².
    let t0 = s / dot(b, b);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x = [
                    i as f64 / n as f64 + t0 * b[0],
                    j as f64 / n as f64 + t0 * b[1],
                    k as f64 / n as f64 + t0 * b[2],
                ];
                if let Ok(p) = project(field, c, b, s, x) {
                    return Ok(p);
                }
            }
        }
    }
    Err(SectionError::NoSeed)
}

/// Trace the section of `{ε = c}` by `⟨b,x⟩ = s` from `seed` (projected
/// onto the section first) until closure or the arc-length budget.
pub fn trace_field_section(
    field: &TrigField,
    c: f64,
    b: [f64; 3],
    s: f64,
    seed: [f64; 3],
    budget_arc: f64,
    opts: &FieldTraceOptions,
) -> Result<Trajectory, SectionError> {
    if b == [0.0; 3] {
        return Err(SectionError::ZeroDirection);
    }
    if !b.iter().all(|x| x.is_finite()) {
        return Err(SectionError::BadDirection);
    }
    if !(budget_arc > 0.0 && budget_arc.is_finite() && opts.step > 0.0) {
        return Err(SectionError::BadBudget);
    }
    let h = opts.step;
    let bn = norm(b);
    let mut singular = false;

    // Normalized tangent field; tracks degeneracy through `singular`.
    let mut tangent = |x: [f64; 3], flag: &mut bool| -> Result<[f64; 3], SectionError> {
        let g = grad3(field, x)?;
        let t = cross(g, b);
        let tn = norm(t);
        if tn <= opts.singular_tol * norm(g) * bn {
            *flag = true;
            if tn == 0.0 {
                return Err(SectionError::TangentDegenerate(x));
            }
        }
        Ok([t[0] / tn, t[1] / tn, t[2] / tn])
    };

    let x0 = project(field, c, b, s, seed)?;
    let mut x = x0;
    let mut rec = Recorder::new(true, opts.sample_cap);
    rec.push(0.0, x);
    let mut arc = 0.0f64;
    let mut closed = false;
    let mut translation: Option<IVec3> = None;
    let min_arc = 20.0 * h;
    let n_steps = (budget_arc / h).ceil() as usize;
    let mut steps = 0usize;

    for _ in 0..n_steps {
        // Classical RK4 on the unit tangent.
        let k1 = tangent(x, &mut singular)?;
        let x2 = [x[0] + 0.5 * h * k1[0], x[1] + 0.5 * h * k1[1], x[2] + 0.5 * h * k1[2]];
        let k2 = tangent(x2, &mut singular)?;
        let x3 = [x[0] + 0.5 * h * k2[0], x[1] + 0.5 * h * k2[1], x[2] + 0.5 * h * k2[2]];
        let k3 = tangent(x3, &mut singular)?;
        let x4 = [x[0] + h * k3[0], x[1] + h * k3[1], x[2] + h * k3[2]];
        let k4 = tangent(x4, &mut singular)?;
        let mut xn = [0.0; 3];
        for a in 0..3 {
            xn[a] = x[a] + h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
        }
        let xn = project(field, c, b, s, xn)?;
        arc += dist(x, xn);
        x = xn;
        steps += 1;
        rec.push(arc, x);

        if !opts.critical_points.is_empty() {
            for p in &opts.critical_points {
                if torus_dist(x, *p) < 1e-5 {
                    singular = true;
                }
            }
        }

        if arc > min_arc {
            let d = [x[0] - x0[0], x[1] - x0[1], x[2] - x0[2]];
            let n = [d[0].round(), d[1].round(), d[2].round()];
            let miss =
                ((d[0] - n[0]).powi(2) + (d[1] - n[1]).powi(2) + (d[2] - n[2]).powi(2)).sqrt();
            if miss < opts.closure_tol {
                closed = true;
                translation = Some([n[0] as i64, n[1] as i64, n[2] as i64]);
                break;
            }
        }
    }

    rec.push_final(arc, x);
    Ok(Trajectory {
        samples: rec.into_samples(),
        arc_length: arc,
        steps,
        closed,
        translation,
        singular_adjacent: singular,
    })
}

fn dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn torus_dist(a: [f64; 3], b: [f64; 3]) -> f64 {
    let mut d2 = 0.0;
    for i in 0..3 {
        let mut d = (a[i] - b[i]).rem_euclid(1.0);
        if d > 0.5 {
            d = 1.0 - d;
        }
        d2 += d * d;
    }
    d2.sqrt()
}

/// Morse type of the plane height `⟨B,·⟩` restricted to the surface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CriticalKind {
    Minimum,
    Saddle,
    Maximum,
    Degenerate,
}

/// A critical point of the height function on `{ε = c}`: a point where
/// `∇ε ∥ B`.  Sections through its plane level change topology there.
#[derive(Debug, Clone)]
pub struct CriticalPoint {
    /// Canonical position in `[0,1)³`.
    pub position: [f64; 3],
    pub kind: CriticalKind,
    /// Height `⟨B, position⟩` of the critical section (for the
    /// canonical representative).
    pub plane_level: f64,
}

/// Solve a 3×3 linear system by partial-pivot elimination.
fn solve3(mut a: [[f64; 3]; 3], mut r: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| {
            a[i][col]
                .abs()
                .partial_cmp(&a[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        r.swap(col, piv);
        for row in (col + 1)..3 {
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            r[row] -= f * r[col];
        }
    }
    let mut x = [0.0; 3];
    for col in (0..3).rev() {
        let mut acc = r[col];
        for k in (col + 1)..3 {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

fn hess3(field: &TrigField, x: [f64; 3]) -> Result<[[f64; 3]; 3], SectionError> {
    let h = field.hess(&x)?;
    Ok([
        [h[0], h[1], h[2]],
        [h[3], h[4], h[5]],
        [h[6], h[7], h[8]],
    ])
}

fn matvec(m: [[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [dot(m[0], v), dot(m[1], v), dot(m[2], v)]
}

/// Find the critical points of the height `⟨B,·⟩` on the level surface
/// `{ε = c}`: solutions of `ε = c`, `∇ε ∥ B`, classified by the
/// restricted second-order behavior.
///
/// Newton runs from a grid of seeds with pitch a quarter of the
/// smallest harmonic period; results are deduplicated on the torus and
/// sorted by plane level.
pub fn find_critical_points(
    field: &TrigField,
    c: f64,
    b: [f64; 3],
) -> Result<Vec<CriticalPoint>, SectionError> {
    if b == [0.0; 3] {
        return Err(SectionError::ZeroDirection);
    }
    let bb = dot(b, b);
    // Complete b to a frame: u, v span the directions in which ∇ε must
    // vanish for ∇ε ∥ b.
    let k = (0..3).min_by(|&i, &j| {
        b[i].abs()
            .partial_cmp(&b[j].abs())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
    .unwrap();
    let mut u = [0.0; 3];
    u[k] = 1.0;
    let bu = dot(b, u) / bb;
    for a in 0..3 {
        u[a] -= bu * b[a];
    }
    let un = norm(u);
    for x in u.iter_mut() {
        *x /= un;
    }
    let mut v = cross(b, u);
    let vn = norm(v);
    for x in v.iter_mut() {
        *x /= vn;
    }

    let pitch = 4 * field.max_freq().max(1) as usize;
    let tol = 1e-12 * (1.0 + c.abs());
    let mut found: Vec<CriticalPoint> = Vec::new();
    for i in 0..pitch {
        for j in 0..pitch {
            for l in 0..pitch {
                let mut x = [
                    (i as f64 + 0.5) / pitch as f64,
                    (j as f64 + 0.5) / pitch as f64,
                    (l as f64 + 0.5) / pitch as f64,
                ];
                let mut ok = false;
                for _ in 0..50 {
                    let f = field.eval(&x)? - c;
                    let g = grad3(field, x)?;
                    let r = [f, dot(g, u), dot(g, v)];
                    if r.iter().all(|t| t.abs() <= tol) {
                        ok = true;
                        break;
                    }
                    let hm = hess3(field, x)?;
                    let jac = [g, matvec(hm, u), matvec(hm, v)];
                    match solve3(jac, r) {
                        Some(d) => {
                            for a in 0..3 {
                                x[a] -= d[a];
                            }
                            if !x.iter().all(|t| t.is_finite()) {
                                break;
                            }
                        }
                        None => break,
                    }
                }
                if !ok {
                    continue;
                }
                let pos = [
                    x[0].rem_euclid(1.0),
                    x[1].rem_euclid(1.0),
                    x[2].rem_euclid(1.0),
                ];
                if found.iter().any(|p| torus_dist(p.position, pos) < 1e-7) {
                    continue;
                }
                // Restricted Hessian: for a curve γ on the surface,
                // (⟨B,γ⟩)'' = −λ γ'ᵀ(Hess ε)γ' with λ = ⟨B,∇ε⟩/|∇ε|².
                let g = grad3(field, pos)?;
                let gg = dot(g, g);
                if gg < 1e-20 {
                    // Critical point of ε itself: not a regular surface
                    // point, skip (the level is near-critical there).
                    continue;
                }
                let lambda = dot(b, g) / gg;
                let jj = (0..3).min_by(|&i2, &j2| {
                    g[i2].abs()
                        .partial_cmp(&g[j2].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap();
                let mut ej = [0.0; 3];
                ej[jj] = 1.0;
                let mut t1 = cross(g, ej);
                let t1n = norm(t1);
                for a in t1.iter_mut() {
                    *a /= t1n;
                }
                let mut t2 = cross(g, t1);
                let t2n = norm(t2);
                for a in t2.iter_mut() {
                    *a /= t2n;
                }
                let hm = hess3(field, pos)?;
                let m11 = -lambda * dot(t1, matvec(hm, t1));
                let m12 = -lambda * dot(t1, matvec(hm, t2));
                let m22 = -lambda * dot(t2, matvec(hm, t2));
                let det = m11 * m22 - m12 * m12;
                let scale = m11.abs().max(m22.abs()).max(m12.abs()).max(1e-30);
                let kind = if det.abs() <= 1e-9 * scale * scale {
                    CriticalKind::Degenerate
                } else if det < 0.0 {
                    CriticalKind::Saddle
                } else if m11 + m22 > 0.0 {
                    CriticalKind::Minimum
                } else {
                    CriticalKind::Maximum
                };
                found.push(CriticalPoint {
                    position: pos,
                    kind,
                    plane_level: dot(b, pos),
                });
            }
        }
    }
    found.sort_by(|p, q| {
        p.plane_level
            .partial_cmp(&q.plane_level)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| {
                p.position
                    .partial_cmp(&q.position)
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
    });
    Ok(found)
}
