//! Oracle tests for section tracing: closures certified by independent
//! routes (2-D contour reasoning, exact arithmetic, hand-solved
//! critical points) frozen into assertions.

use torus_fields::TrigField;
use torus_gasket::tribonacci_direction;
use torus_lattice::{dot_i, normalize_indivisible, IVec3};
use torus_mesh::{adjacency, marching_tetrahedra, mu_cube_mesh, DEFAULT_REFINE_TOL};
use torus_section::{
    classify_with, displacement_exponent, exact_mesh_section, find_critical_points,
    float_mesh_section_trace, rational_mesh_section, trace_field_section, trace_section,
    CriticalKind, FieldTraceOptions, Surface, TrajectoryClass, WalkOptions,
};

fn record_opts() -> WalkOptions {
    WalkOptions {
        record: true,
        ..WalkOptions::default()
    }
}

// ---------------------------------------------------------------------------
// Rational sections on meshes.
// ---------------------------------------------------------------------------

#[test]
fn sphere_sections_are_closed_and_null() {
    let f = TrigField::cos3();
    let mesh = marching_tetrahedra(&f, 2.5, 16, DEFAULT_REFINE_TOL).unwrap();
    let adj = adjacency(&mesh).unwrap();
    for b in [[1i64, 2, 3], [0, 0, 1], [5, -3, 2]] {
        let comps = rational_mesh_section(&mesh, &adj, b, 0.08, &WalkOptions::default()).unwrap();
        assert!(!comps.is_empty(), "plane should cut the sphere for {b:?}");
        for t in &comps {
            assert!(t.closed);
            assert_eq!(t.translation, Some([0, 0, 0]), "sphere sections bound disks");
        }
    }
}

#[test]
fn horizontal_sections_of_cos3_level_zero_are_plane_contours() {
    // With B = ẑ, s = 0.3 the section is the contour
    // cos 2πx + cos 2πy = −cos 0.6π > 0 in the (x,y)-torus: a single
    // closed loop around the maximum at the origin, null-homologous.
    let f = TrigField::cos3();
    let mesh = marching_tetrahedra(&f, 0.0, 24, DEFAULT_REFINE_TOL).unwrap();
    let adj = adjacency(&mesh).unwrap();
    let comps =
        rational_mesh_section(&mesh, &adj, [0, 0, 1], 0.3, &record_opts()).unwrap();
    assert_eq!(comps.len(), 1, "one contour loop at this level");
    let t = &comps[0];
    assert!(t.closed);
    assert_eq!(t.translation, Some([0, 0, 0]));
    // Every recorded point really sits on the plane z = 0.3 (the walker
    // manufactures points from plane heights, so this is an identity up
    // to rounding) and on the surface to mesh accuracy.
    for s in &t.samples {
        assert!((s.pos[2] - 0.3).abs() < 1e-9);
        let v = f.eval(&s.pos).unwrap();
        assert!(v.abs() < 0.05, "sample off the surface: ε = {v}");
    }
}

#[test]
fn rational_sections_of_genus_three_levels_close_with_orthogonal_classes() {
    let f = TrigField::cos3();
    let mesh = marching_tetrahedra(&f, 0.0, 20, DEFAULT_REFINE_TOL).unwrap();
    let adj = adjacency(&mesh).unwrap();
    for b in [[1i64, 0, 0], [1, 1, 2], [2, -1, 3], [3, 5, 1]] {
        let comps = rational_mesh_section(&mesh, &adj, b, 0.37, &WalkOptions::default()).unwrap();
        assert!(!comps.is_empty());
        for t in &comps {
            assert!(t.closed, "rational sections must close for {b:?}");
            let n = t.translation.unwrap();
            assert_eq!(dot_i(&b, &n), 0, "class {n:?} not orthogonal to {b:?}");
        }
    }
}

// ---------------------------------------------------------------------------
// Exact tracing on the μ-cube.
// ---------------------------------------------------------------------------

#[test]
fn square_zone_direction_yields_one_common_indivisible_class() {
    // B = (1,1,4) lies strictly inside the square zone Q_z: every
    // section at every generic offset closes, and the essential ones
    // all translate along the same primitive class — here ±(1,−1,0),
    // the common line of the planes ⟨B,·⟩ = const and ⟨ẑ,·⟩ = const.
    let mesh = mu_cube_mesh();
    let adj = adjacency(&mesh).unwrap();
    let b: IVec3 = [1, 1, 4];
    let mut essential = 0usize;
    for t in 0..16 {
        let comps =
            exact_mesh_section(&mesh, &adj, b, 2 * t + 1, 32, &WalkOptions::default()).unwrap();
        assert!(!comps.is_empty(), "offset {t}: plane misses the surface?");
        for traj in &comps {
            assert!(traj.closed, "exact rational section must close");
            let n = traj.translation.unwrap();
            assert_eq!(dot_i(&b, &n), 0);
            if n != [0, 0, 0] {
                essential += 1;
                let prim = normalize_indivisible(&n).expect("nonzero");
                assert_eq!(prim, [1, -1, 0], "class {n:?} off the zone line");
            }
        }
    }
    assert!(essential > 0, "the zone direction should wind somewhere");
}

#[test]
fn exact_and_float_walkers_agree_on_the_mu_cube() {
    // Twenty random rational (B, s): the float walker must reproduce
    // the exact walker's component list state for state — counts,
    // closure, classes, in the same deterministic seed order.
    let mesh = mu_cube_mesh();
    let adj = adjacency(&mesh).unwrap();
    // Simple deterministic LCG so the pairs are reproducible.
    let mut state = 0x9e3779b97f4a7c15u64;
    let mut next = || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        state
    };
    let mut tested = 0;
    while tested < 20 {
        let b: IVec3 = [
            (next() % 13) as i64 - 6,
            (next() % 13) as i64 - 6,
            (next() % 13) as i64 - 6,
        ];
        if b == [0, 0, 0] {
            continue;
        }
        let t = (next() % 16) as i64;
        let (s_num, s_den) = (2 * t + 1, 32i64);
        let s = s_num as f64 / s_den as f64;
        let exact = exact_mesh_section(&mesh, &adj, b, s_num, s_den, &WalkOptions::default())
            .unwrap();
        let float =
            rational_mesh_section(&mesh, &adj, b, s, &WalkOptions::default()).unwrap();
        assert_eq!(exact.len(), float.len(), "component count for {b:?}, s={s}");
        for (e, f) in exact.iter().zip(&float) {
            assert_eq!(e.closed, f.closed);
            assert_eq!(e.translation, f.translation, "class mismatch at {b:?}, s={s}");
            assert_eq!(e.steps, f.steps);
        }
        tested += 1;
    }
}

#[test]
fn tribonacci_direction_wanders_on_the_mu_cube() {
    let mesh = mu_cube_mesh();
    let adj = adjacency(&mesh).unwrap();
    let b = tribonacci_direction();
    let opts = WalkOptions {
        max_steps: 200_000,
        record: true,
        ..WalkOptions::default()
    };
    let t = float_mesh_section_trace(&mesh, &adj, b, 0.11, None, &opts).unwrap();
    assert!(!t.closed, "chaotic direction should not close");
    assert_eq!(t.steps, 200_000);
    // The polyline stays exactly on its plane...
    let p0 = t.samples[0].pos;
    let s0 = b[0] * p0[0] + b[1] * p0[1] + b[2] * p0[2];
    for s in &t.samples {
        let v = b[0] * s.pos[0] + b[1] * s.pos[1] + b[2] * s.pos[2];
        assert!((v - s0).abs() < 1e-6, "plane drift {v} vs {s0}");
    }
    // ...and wanders: sublinear but persistent displacement growth.
    let fit = displacement_exponent(&t).expect("enough samples");
    assert!(
        fit.slope > 0.25 && fit.slope < 1.1,
        "displacement exponent {} out of the wandering range",
        fit.slope
    );
}

// ---------------------------------------------------------------------------
// Smooth tracer.
// ---------------------------------------------------------------------------

#[test]
fn field_tracer_closes_on_a_horizontal_contour() {
    let f = TrigField::cos3();
    let t = trace_field_section(
        &f,
        0.0,
        [0.0, 0.0, 1.0],
        0.3,
        [0.2, 0.1, 0.3],
        50.0,
        &FieldTraceOptions::default(),
    )
    .unwrap();
    assert!(t.closed, "contour loop must close within budget");
    assert_eq!(t.translation, Some([0, 0, 0]));
    assert!(!t.singular_adjacent);
    // Both constraints hold along the whole polyline.
    for s in &t.samples {
        assert!((f.eval(&s.pos).unwrap()).abs() < 1e-9);
        assert!((s.pos[2] - 0.3).abs() < 1e-9);
    }
}

#[test]
fn field_tracer_reports_the_winding_class_of_a_tilted_section() {
    // B = (1,1,10) is a small rational tilt of ẑ; sections of the c = 0
    // level wind around the torus.  The class must be orthogonal to B,
    // and the mesh walker must know it too (up to traversal sign).
    let f = TrigField::cos3();
    let b = [1.0, 1.0, 10.0];
    let t = trace_field_section(
        &f,
        0.0,
        b,
        0.3,
        [0.2, 0.1, 0.0],
        120.0,
        &FieldTraceOptions::default(),
    )
    .unwrap();
    assert!(t.closed, "rational section must close");
    let n = t.translation.unwrap();
    assert_eq!(n[0] + n[1] + 10 * n[2], 0, "class {n:?} not orthogonal to B");
    assert_ne!(n, [0, 0, 0], "a tilted section at this level winds");

    let mesh = marching_tetrahedra(&f, 0.0, 24, DEFAULT_REFINE_TOL).unwrap();
    let adj = adjacency(&mesh).unwrap();
    let comps =
        rational_mesh_section(&mesh, &adj, [1, 1, 10], 0.3, &WalkOptions::default()).unwrap();
    let classes: Vec<IVec3> = comps.iter().filter_map(|c| c.translation).collect();
    assert!(
        classes.contains(&n) || classes.contains(&[-n[0], -n[1], -n[2]]),
        "mesh walker classes {classes:?} miss the smooth tracer's {n:?}"
    );
}

#[test]
fn critical_points_of_the_vertical_height_on_level_zero() {
    // ∇𝔠 ∥ ẑ forces sin 2πx = sin 2πy = 0, and 𝔠 = 0 then forces the
    // mixed corners: exactly four critical points, all saddles, at the
    // two plane levels 1/4 and 3/4.
    let f = TrigField::cos3();
    let pts = find_critical_points(&f, 0.0, [0.0, 0.0, 1.0]).unwrap();
    assert_eq!(pts.len(), 4, "{pts:?}");
    let mut expected = vec![
        [0.0, 0.5, 0.25],
        [0.5, 0.0, 0.25],
        [0.0, 0.5, 0.75],
        [0.5, 0.0, 0.75],
    ];
    expected.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut got: Vec<[f64; 3]> = pts.iter().map(|p| p.position).collect();
    got.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for (g, e) in got.iter().zip(&expected) {
        for a in 0..3 {
            let mut d = (g[a] - e[a]).rem_euclid(1.0);
            if d > 0.5 {
                d = 1.0 - d;
            }
            assert!(d < 1e-9, "критical point {g:?} vs expected {e:?}");
        }
    }
    for p in &pts {
        assert_eq!(p.kind, CriticalKind::Saddle, "at {:?}", p.position);
        let lvl = p.plane_level;
        assert!(
            (lvl - 0.25).abs() < 1e-9 || (lvl - 0.75).abs() < 1e-9,
            "plane level {lvl}"
        );
    }
}

// ---------------------------------------------------------------------------
// Classification.
// ---------------------------------------------------------------------------

#[test]
fn classify_splits_trivial_winding_and_chaotic() {
    let mesh = mu_cube_mesh();
    let adj = adjacency(&mesh).unwrap();

    // A square-zone direction: closed essential sections.
    let (_, class) = classify_with(
        |budget| {
            let opts = WalkOptions {
                max_steps: budget as usize,
                record: true,
                max_components: Some(1),
                ..WalkOptions::default()
            };
            let mut comps = exact_mesh_section(&mesh, &adj, [1, 1, 4], 3, 32, &opts)?;
            Ok(comps.remove(0))
        },
        10_000.0,
    )
    .unwrap();
    match class {
        TrajectoryClass::Trivial | TrajectoryClass::ClosedNonZero { .. } => {}
        other => panic!("square-zone section misclassified: {other:?}"),
    }

    // The Tribonacci direction: open and wandering.
    let (traj, class) = classify_with(
        |budget| {
            let opts = WalkOptions {
                max_steps: budget as usize,
                record: true,
                ..WalkOptions::default()
            };
            float_mesh_section_trace(&mesh, &adj, tribonacci_direction(), 0.11, None, &opts)
        },
        25_000.0,
    )
    .unwrap();
    assert!(!traj.closed);
    match class {
        TrajectoryClass::ChaoticCandidate { exponent } => {
            assert!(
                exponent > 0.2 && exponent < 1.2,
                "chaotic exponent {exponent}"
            );
        }
        other => panic!("Tribonacci section misclassified: {other:?}"),
    }
}

#[test]
fn unified_trace_runs_both_backends() {
    let f = TrigField::cos3();
    let surf = Surface::Field { field: &f, c: 0.0 };
    let t = trace_section(&surf, [0.0, 0.0, 1.0], 0.3, None, 30.0, 1 << 12).unwrap();
    assert!(t.closed);
    assert!(!t.samples.is_empty());

    let mesh = marching_tetrahedra(&f, 0.0, 16, DEFAULT_REFINE_TOL).unwrap();
    let adj = adjacency(&mesh).unwrap();
    let surf = Surface::Mesh {
        mesh: &mesh,
        adj: &adj,
    };
    let t = trace_section(&surf, [0.0, 0.0, 1.0], 0.3, Some([0.2, 0.1, 0.3]), 30.0, 1 << 12)
        .unwrap();
    assert!(t.closed, "mesh backend should close the same contour");
    assert_eq!(t.translation, Some([0, 0, 0]));
    assert!(t.arc_length > 0.1);
}
