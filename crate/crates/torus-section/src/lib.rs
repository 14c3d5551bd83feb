//! Plane sections of periodic surfaces in the 3-torus.
//!
//! A *B-section* is the intersection of a level surface with an affine
//! plane `⟨B,x⟩ = s`.  Lifted to Euclidean 3-space the section is a
//! union of curves; on the quotient each curve either closes up — with
//! an integer translation class `n ∈ ℤ³` recording the deck element it
//! picked up — or wanders.  This crate traces those curves two ways:
//!
//! * **combinatorially**, walking triangle to triangle across a
//!   [`TorusMesh`](torus_mesh::TorusMesh) while carrying the lattice
//!   frame of the current lift.  For an integer direction the walker's
//!   state space is finite and closure is detected *exactly*, from
//!   integer data alone, no matter how long the period is;
//! * **differentially**, by a predictor–corrector advance along
//!   `∇ε × B` on a smooth level surface `ε = c`, projecting back onto
//!   the pair of constraints after every step.
//!
//! On top of the tracers sit the trajectory classifiers: closed curves
//! split into trivial and essential by their class, open ones into
//! asymptotic-to-a-line and chaotic candidates by how the deviation
//! from the fitted line behaves as the budget doubles.

use thiserror::Error;
use torus_fields::FieldError;
use torus_lattice::IVec3;
use torus_mesh::MeshError;

pub mod classify;
pub mod exact;
pub mod field_trace;
pub mod mesh_walk;

pub use classify::{
    classify_with, diffusion_exponent, displacement_exponent, fit_direction, max_line_deviation,
    DiffusionEstimate, TrajectoryClass,
};
pub use exact::exact_mesh_section;
pub use field_trace::{
    find_critical_points, find_section_seed, trace_field_section, CriticalKind, CriticalPoint,
    FieldTraceOptions,
};
pub use mesh_walk::{
    float_mesh_section_trace, rational_mesh_section, trace_section, Surface, WalkOptions,
};

/// Everything that can go wrong while sectioning a surface.
#[derive(Debug, Error)]
pub enum SectionError {
    #[error("plane direction must be nonzero")]
    ZeroDirection,
    #[error("plane direction must have finite components")]
    BadDirection,
    #[error("budget and step must be positive and finite")]
    BadBudget,
    #[error("level denominator must be nonzero")]
    BadLevel,
    #[error("surface mesh is unusable: {0}")]
    Mesh(#[from] MeshError),
    #[error("field evaluation failed: {0}")]
    Field(#[from] FieldError),
    #[error("the plane does not cross the surface (no seed edge found)")]
    NoSeed,
    #[error("walker lost the section at face {face}: no exit crossing")]
    Degenerate { face: usize },
    #[error("section tangent vanished at {0:?} (critical point on the curve)")]
    TangentDegenerate([f64; 3]),
    #[error("integer overflow while tracking the deck frame")]
    Overflow,
    #[error("corrector failed to converge onto the section near {0:?}")]
    ProjectionFailed([f64; 3]),
    #[error("exact tracing requires a mesh with exact rational coordinates")]
    ExactUnavailable,
}

/// One recorded point of a traced section, in the Euclidean lift.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajSample {
    /// Arc length from the start of the trace.
    pub arc: f64,
    /// Position in the lift (not reduced modulo ℤ³).
    pub pos: [f64; 3],
}

/// A traced B-section: a (possibly decimated) polyline in the lift plus
/// the closure data the classifiers need.
#[derive(Debug, Clone)]
pub struct Trajectory {
    /// Samples along the curve; empty when recording was disabled.
    pub samples: Vec<TrajSample>,
    /// Total arc length traced.
    pub arc_length: f64,
    /// Number of elementary advances (mesh edges crossed or integrator
    /// steps taken).
    pub steps: usize,
    /// Whether the trace returned to its start modulo ℤ³.
    pub closed: bool,
    /// Deck translation picked up over one period, when closed.
    pub translation: Option<IVec3>,
    /// Whether the trace passed near a critical point of the height
    /// function (tangent degeneracy or proximity to a supplied list).
    pub singular_adjacent: bool,
}

impl Trajectory {
    /// End-to-end displacement in the lift (zero vector if no samples
    /// were recorded).
    pub fn displacement(&self) -> [f64; 3] {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => [
                b.pos[0] - a.pos[0],
                b.pos[1] - a.pos[1],
                b.pos[2] - a.pos[2],
            ],
            _ => [0.0; 3],
        }
    }
}

/// Decimating sample recorder: keeps at most `cap` samples by doubling
/// its stride whenever the buffer fills, so arbitrarily long traces
/// stay within memory while preserving uniform coverage.
pub(crate) struct Recorder {
    on: bool,
    cap: usize,
    stride: usize,
    count: usize,
    samples: Vec<TrajSample>,
}

impl Recorder {
    pub(crate) fn new(on: bool, cap: usize) -> Self {
        Recorder {
            on,
            cap: cap.max(8),
            stride: 1,
            count: 0,
            samples: Vec::new(),
        }
    }

    pub(crate) fn push(&mut self, arc: f64, pos: [f64; 3]) {
        if self.on {
            if self.count % self.stride == 0 {
                if self.samples.len() >= self.cap {
                    let mut keep = 0usize;
                    self.samples.retain(|_| {
                        keep += 1;
                        keep % 2 == 1
                    });
                    self.stride *= 2;
                }
                if self.count % self.stride == 0 {
                    self.samples.push(TrajSample { arc, pos });
                }
            }
            self.count += 1;
        }
    }

    /// Record the final point unconditionally (closure point or budget
    /// stop), so the polyline always ends where the trace ended.
    pub(crate) fn push_final(&mut self, arc: f64, pos: [f64; 3]) {
        if self.on {
            let dup = self
                .samples
                .last()
                .is_some_and(|s| s.pos == pos && s.arc == arc);
            if !dup {
                self.samples.push(TrajSample { arc, pos });
            }
        }
    }

    pub(crate) fn into_samples(self) -> Vec<TrajSample> {
        self.samples
    }
}
