//! Trajectory classification and diffusion statistics.
//!
//! Closed traces are split by their deck class.  Open traces are probed
//! at one, two, and four times the budget: if the maximal deviation
//! from the best-fit line stays bounded under the doublings the curve
//! is strongly asymptotic to that line; otherwise it is a chaotic
//! candidate whose displacement growth exponent we estimate.

use torus_lattice::linfit::{least_squares, LineFit};
use torus_lattice::IVec3;

use crate::{SectionError, Trajectory};

/// Verdict on a single traced section.
#[derive(Debug, Clone, PartialEq)]
pub enum TrajectoryClass {
    /// Closed with zero deck class: bounded in the lift.
    Trivial,
    /// Closed around the torus: translated by `n` per period.
    ClosedNonZero { n: IVec3 },
    /// Open but within bounded distance of a line.
    OpenAsymptotic { direction: [f64; 3], deviation: f64 },
    /// Open with unbounded wandering; `exponent` estimates the growth
    /// rate of the displacement with arc length.
    ChaoticCandidate { exponent: f64 },
}

fn classify_closed(t: &Trajectory) -> TrajectoryClass {
    match t.translation {
        Some([0, 0, 0]) | None => TrajectoryClass::Trivial,
        Some(n) => TrajectoryClass::ClosedNonZero { n },
    }
}

/// Principal direction of a trace: the dominant eigenvector of the
/// sample covariance, oriented along the net displacement.
pub fn fit_direction(t: &Trajectory) -> [f64; 3] {
    let n = t.samples.len();
    if n < 2 {
        return [1.0, 0.0, 0.0];
    }
    let mut mean = [0.0f64; 3];
    for s in &t.samples {
        for a in 0..3 {
            mean[a] += s.pos[a];
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }
    let mut cov = [[0.0f64; 3]; 3];
    for s in &t.samples {
        let d = [s.pos[0] - mean[0], s.pos[1] - mean[1], s.pos[2] - mean[2]];
        for a in 0..3 {
            for b in 0..3 {
                cov[a][b] += d[a] * d[b];
            }
        }
    }
    // Power iteration from the end-to-end displacement (or a default
    // axis if the trace came back to its start).
    let disp = t.displacement();
    let dn = (disp[0].powi(2) + disp[1].powi(2) + disp[2].powi(2)).sqrt();
    let mut v = if dn > 1e-12 {
        [disp[0] / dn, disp[1] / dn, disp[2] / dn]
    } else {
        [1.0, 0.0, 0.0]
    };
    for _ in 0..64 {
        let w = [
            cov[0][0] * v[0] + cov[0][1] * v[1] + cov[0][2] * v[2],
            cov[1][0] * v[0] + cov[1][1] * v[1] + cov[1][2] * v[2],
            cov[2][0] * v[0] + cov[2][1] * v[1] + cov[2][2] * v[2],
        ];
        let wn = (w[0].powi(2) + w[1].powi(2) + w[2].powi(2)).sqrt();
        if wn < 1e-30 {
            break;
        }
        v = [w[0] / wn, w[1] / wn, w[2] / wn];
    }
    if disp[0] * v[0] + disp[1] * v[1] + disp[2] * v[2] < 0.0 {
        v = [-v[0], -v[1], -v[2]];
    }
    v
}

/// Maximal distance of the trace's samples from the line through
/// `origin` with direction `dir` (assumed unit).
pub fn max_line_deviation(t: &Trajectory, origin: [f64; 3], dir: [f64; 3]) -> f64 {
    let mut worst = 0.0f64;
    for s in &t.samples {
        let d = [
            s.pos[0] - origin[0],
            s.pos[1] - origin[1],
            s.pos[2] - origin[2],
        ];
        let along = d[0] * dir[0] + d[1] * dir[1] + d[2] * dir[2];
        let perp = [
            d[0] - along * dir[0],
            d[1] - along * dir[1],
            d[2] - along * dir[2],
        ];
        let p = (perp[0].powi(2) + perp[1].powi(2) + perp[2].powi(2)).sqrt();
        worst = worst.max(p);
    }
    worst
}

/// Log–log fit of the displacement `|x(t) − x(0)|` against arc length
/// over the tail of the trace (the first 1/256 of the arc is treated as
/// transient).  `None` when too few usable samples exist.
pub fn displacement_exponent(t: &Trajectory) -> Option<LineFit> {
    let first = t.samples.first()?;
    let total = t.samples.last()?.arc;
    if !(total > 0.0) {
        return None;
    }
    let cutoff = total / 256.0;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for s in &t.samples {
        if s.arc <= cutoff {
            continue;
        }
        let d = ((s.pos[0] - first.pos[0]).powi(2)
            + (s.pos[1] - first.pos[1]).powi(2)
            + (s.pos[2] - first.pos[2]).powi(2))
        .sqrt();
        if d > 0.0 {
            xs.push(s.arc.ln());
            ys.push(d.ln());
        }
    }
    least_squares(&xs, &ys)
}

/// Pooled diffusion-exponent estimate over a family of traces.
#[derive(Debug, Clone)]
pub struct DiffusionEstimate {
    pub exponent: f64,
    /// Approximate 95% confidence interval (normal theory over the
    /// per-trajectory slopes; a fixed ±0.2 band when only one usable
    /// trace exists).
    pub ci: (f64, f64),
    pub per_trajectory: Vec<f64>,
}

/// Estimate the diffusion exponent of a family of open traces.
pub fn diffusion_exponent(family: &[Trajectory]) -> Option<DiffusionEstimate> {
    let slopes: Vec<f64> = family
        .iter()
        .filter(|t| !t.closed)
        .filter_map(|t| displacement_exponent(t).map(|f| f.slope))
        .collect();
    if slopes.is_empty() {
        return None;
    }
    let k = slopes.len() as f64;
    let mean = slopes.iter().sum::<f64>() / k;
    let ci = if slopes.len() == 1 {
        (mean - 0.2, mean + 0.2)
    } else {
        let var = slopes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (k - 1.0);
        let half = 1.96 * (var / k).sqrt();
        (mean - half, mean + half)
    };
    Some(DiffusionEstimate {
        exponent: mean,
        ci,
        per_trajectory: slopes,
    })
}

/// Classify a section by re-tracing it at doubled budgets.
///
/// `trace_at(budget)` must trace the *same* curve from the same seed
/// with the given arc budget and samples recorded.  Returns the longest
/// trace together with its classification.
pub fn classify_with<F>(
    mut trace_at: F,
    base_budget: f64,
) -> Result<(Trajectory, TrajectoryClass), SectionError>
where
    F: FnMut(f64) -> Result<Trajectory, SectionError>,
{
    if !(base_budget > 0.0) || !base_budget.is_finite() {
        return Err(SectionError::BadBudget);
    }
    let t1 = trace_at(base_budget)?;
    if t1.closed {
        let class = classify_closed(&t1);
        return Ok((t1, class));
    }
    let t2 = trace_at(2.0 * base_budget)?;
    if t2.closed {
        let class = classify_closed(&t2);
        return Ok((t2, class));
    }
    let t4 = trace_at(4.0 * base_budget)?;
    if t4.closed {
        let class = classify_closed(&t4);
        return Ok((t4, class));
    }

    let dir = fit_direction(&t4);
    let origin = t4
        .samples
        .first()
        .map(|s| s.pos)
        .unwrap_or([0.0; 3]);
    let dev1 = max_line_deviation(&t1, origin, dir);
    let dev4 = max_line_deviation(&t4, origin, dir);
    // Bounded deviation across two doublings: the long trace may not
    // wander meaningfully farther from the line than the short one.
    // The absolute floor keeps short-budget noise from flapping the
    // verdict when both deviations are tiny.
    let bounded = dev4 <= 1.5 * dev1.max(0.05);
    let class = if bounded {
        TrajectoryClass::OpenAsymptotic {
            direction: dir,
            deviation: dev4,
        }
    } else {
        let exponent = displacement_exponent(&t4)
            .map(|f| f.slope)
            .unwrap_or(f64::NAN);
        TrajectoryClass::ChaoticCandidate { exponent }
    };
    Ok((t4, class))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::TrajSample;

    fn line_traj(n: usize, dir: [f64; 3], wobble: f64) -> Trajectory {
        let samples: Vec<TrajSample> = (0..n)
            .map(|i| {
                let t = i as f64;
                TrajSample {
                    arc: t,
                    pos: [
                        t * dir[0] + wobble * (t * 0.7).sin(),
                        t * dir[1] + wobble * (t * 1.3).cos(),
                        t * dir[2],
                    ],
                }
            })
            .collect();
        Trajectory {
            arc_length: (n - 1) as f64,
            steps: n - 1,
            closed: false,
            translation: None,
            singular_adjacent: false,
            samples,
        }
    }

    #[test]
    fn fitted_direction_recovers_the_line() {
        let d = [2.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0];
        let t = line_traj(500, d, 0.05);
        let fit = fit_direction(&t);
        let dot = fit[0] * d[0] + fit[1] * d[1] + fit[2] * d[2];
        assert!(dot > 0.999_99, "misaligned: {fit:?}");
        let dev = max_line_deviation(&t, t.samples[0].pos, fit);
        assert!(dev < 0.11, "deviation {dev}");
    }

    #[test]
    fn displacement_exponent_sees_ballistic_growth() {
        let t = line_traj(2000, [1.0, 0.0, 0.0], 0.0);
        let fit = displacement_exponent(&t).unwrap();
        assert!((fit.slope - 1.0).abs() < 1e-6);
    }

    #[test]
    fn diffusive_polyline_scores_near_half() {
        // A deterministic "random walk": direction flips by a quadratic
        // residue pattern, displacement ~ sqrt(arc).
        let n = 1 << 14;
        let mut pos = [0.0f64; 3];
        let mut samples = Vec::with_capacity(n);
        let mut state = 1u64;
        for i in 0..n {
            samples.push(TrajSample {
                arc: i as f64,
                pos,
            });
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let axis = (state >> 33) as usize % 3;
            let sign = if (state >> 17) & 1 == 0 { 1.0 } else { -1.0 };
            pos[axis] += sign;
        }
        let t = Trajectory {
            arc_length: (n - 1) as f64,
            steps: n - 1,
            closed: false,
            translation: None,
            singular_adjacent: false,
            samples,
        };
        let fit = displacement_exponent(&t).unwrap();
        assert!(
            fit.slope > 0.25 && fit.slope < 0.8,
            "slope {} for a diffusive walk",
            fit.slope
        );
    }
}
