//! Periodic, pseudoperiodic, and quasiperiodic scalar functions.
//!
//! The representable class is finite cosine sums with integer frequency
//! vectors,
//!
//! ```text
//!     f(x) = Σᵢ aᵢ · cos(2π⟨kᵢ, x⟩ + φᵢ),        kᵢ ∈ ℤᵐ,
//! ```
//!
//! which covers every function this workspace computes with — in particular
//! the two 3-periodic workhorses
//!
//! ```text
//!     𝔠(x,y,z) = cos 2πx + cos 2πy + cos 2πz
//!     𝔡(x,y,z) = cos 2πx·cos 2πy + cos 2πy·cos 2πz + cos 2πz·cos 2πx
//! ```
//!
//! (𝔡 is stored product-free via cos A·cos B = ½cos(A−B) + ½cos(A+B)) —
//! while keeping gradients and Hessians analytic.
//!
//! On top of the periodic layer live:
//!
//! - [`PseudoperiodicSpec`]: a multivalued function presented as linear part
//!   plus periodic part, f = ⟨S,x⟩ + ε(x), with [`decompose_sampled`]
//!   recovering S exactly from lattice increments of a black-box sample;
//! - [`PlaneEmbedding`] / [`PlaneFunction`]: the quasiperiodic restriction
//!   f = φ∘ℓ of a periodic φ to an affine line or plane, evaluated through
//!   the projected frequencies so that derivatives stay analytic;
//! - [`frequency_generators`]: the projections ⟨kᵢ,u⟩ (and ⟨kᵢ,v⟩) that
//!   generate the frequency module of the restriction over ℤ.
//!
//! All values are immutable after construction and safe to share across
//! threads.

use std::fmt::Write as _;

use thiserror::Error;

const TAU: f64 = std::f64::consts::TAU;

/// Amplitudes at or below this threshold are dropped during
/// canonicalization (they are numerically indistinguishable from zero and
/// would otherwise break canonical equality of specs).
const AMPLITUDE_EPS: f64 = 1e-15;

/// Errors from construction, evaluation, and parsing of fields.
#[derive(Debug, Error)]
pub enum FieldError {
    #[error("dimension mismatch: field has dimension {expected}, point has dimension {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field dimension must be at least 1")]
    ZeroDimension,
    #[error("term {index}: frequency vector has length {got}, field dimension is {expected}")]
    BadTermDimension {
        index: usize,
        got: usize,
        expected: usize,
    },
    #[error("term {index}: amplitude/phase must be finite")]
    NonFiniteTerm { index: usize },
    #[error("degenerate plane embedding: spanning directions are linearly dependent")]
    DegeneratePlane,
    #[error(
        "input is not pseudoperiodic: lattice-increment defect {defect:.3e} exceeds tolerance {tol:.3e}"
    )]
    NotPseudoperiodic { defect: f64, tol: f64 },
    #[error("field spec parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// One cosine harmonic `amp · cos(2π⟨freq, x⟩ + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub freq: Vec<i64>,
    pub amp: f64,
    pub phase: f64,
}

/// A finite sum of cosine harmonics with integer frequency vectors.
///
/// Canonical form (established by [`TrigField::new`]): every frequency
/// vector is sign-normalized (first nonzero entry positive, phase negated
/// alongside — `cos` is even, so the value is unchanged), duplicate
/// frequencies are merged by phasor addition, amplitudes are positive
/// (except the constant term, which carries its sign in the amplitude and
/// has phase 0), phases lie in (−π, π], and terms are sorted by frequency.
/// Canonical form makes structural equality meaningful and serialization
/// deterministic.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigField {
    dim: usize,
    terms: Vec<Term>,
}

impl TrigField {
    /// Build a field from raw terms, establishing the canonical form.
    pub fn new(dim: usize, terms: Vec<Term>) -> Result<Self, FieldError> {
        if dim == 0 {
            return Err(FieldError::ZeroDimension);
        }
        for (index, t) in terms.iter().enumerate() {
            if t.freq.len() != dim {
                return Err(FieldError::BadTermDimension {
                    index,
                    got: t.freq.len(),
                    expected: dim,
                });
            }
            if !t.amp.is_finite() || !t.phase.is_finite() {
                return Err(FieldError::NonFiniteTerm { index });
            }
        }

        // Sign-normalize frequencies and accumulate phasors per frequency.
        let mut acc: Vec<(Vec<i64>, f64, f64)> = Vec::new(); // (freq, re, im)
        for t in &terms {
            let mut k = t.freq.clone();
            let mut phase = t.phase;
            if let Some(first) = k.iter().find(|&&x| x != 0) {
                if *first < 0 {
                    for e in k.iter_mut() {
                        *e = -*e;
                    }
                    phase = -phase;
                }
            }
            // amp·cos(θ+φ) = Re(amp·e^{iφ}·e^{iθ}); sum phasors per frequency.
            let (re, im) = (t.amp * phase.cos(), t.amp * phase.sin());
            match acc.iter_mut().find(|(kk, _, _)| *kk == k) {
                Some((_, r, i)) => {
                    *r += re;
                    *i += im;
                }
                None => acc.push((k, re, im)),
            }
        }

        let mut out: Vec<Term> = Vec::with_capacity(acc.len());
        for (freq, re, im) in acc {
            let is_const = freq.iter().all(|&x| x == 0);
            if is_const {
                // Constant term: value is `re` (imaginary part is an artifact
                // of a zero frequency and does not contribute to cos).
                if re.abs() > AMPLITUDE_EPS {
                    out.push(Term {
                        freq,
                        amp: re,
                        phase: 0.0,
                    });
                }
                continue;
            }
            let amp = (re * re + im * im).sqrt();
            if amp > AMPLITUDE_EPS {
                let phase = im.atan2(re);
                out.push(Term { freq, amp, phase });
            }
        }
        out.sort_by(|a, b| a.freq.cmp(&b.freq));
        Ok(TrigField { dim, terms: out })
    }

    /// The field 𝔠(x,y,z) = cos 2πx + cos 2πy + cos 2πz.
    ///
    /// Regular levels: spheres for |c| > 1, genus-3 surfaces for |c| < 1.
    pub fn cos3() -> Self {
        let t = |f: [i64; 3]| Term {
            freq: f.to_vec(),
            amp: 1.0,
            phase: 0.0,
        };
        TrigField::new(3, vec![t([1, 0, 0]), t([0, 1, 0]), t([0, 0, 1])]).unwrap()
    }

    /// The field 𝔡 = cos 2πx·cos 2πy + cos 2πy·cos 2πz + cos 2πz·cos 2πx,
    /// expanded into six product-free harmonics of amplitude ½.
    ///
    /// Range [−1, 3].  Note that 𝔡 is also invariant under translation
    /// by (½,½,½), so its true period lattice is body-centered: in the
    /// unit torus a regular level for −1 < c < 0 is a connected genus-7
    /// surface, the free double cover of the genus-4 surface the same
    /// level cuts in the primitive cell (see [`TrigField::cos3d_primitive`]).
    pub fn cos3d() -> Self {
        let t = |f: [i64; 3]| Term {
            freq: f.to_vec(),
            amp: 0.5,
            phase: 0.0,
        };
        TrigField::new(
            3,
            vec![
                t([1, -1, 0]),
                t([1, 1, 0]),
                t([0, 1, -1]),
                t([0, 1, 1]),
                t([1, 0, -1]),
                t([1, 0, 1]),
            ],
        )
        .unwrap()
    }

    /// 𝔡 in the coordinates of its primitive period lattice.
    ///
    /// The periods of 𝔡 form the body-centered lattice generated by
    /// (1,0,0), (0,1,0), (½,½,½); substituting x = w₁ + w₃/2,
    /// y = w₂ + w₃/2, z = w₃/2 turns every harmonic of 𝔡 into an
    /// integer harmonic in w, and the unit w-torus becomes the honest
    /// quotient.  Level sets here are the true level surfaces of 𝔡:
    /// connected genus-4 surfaces for −1 < c < 0, which the unit-cube
    /// extraction of [`TrigField::cos3d`] double-covers.
    pub fn cos3d_primitive() -> Self {
        let t = |f: [i64; 3]| Term {
            freq: f.to_vec(),
            amp: 0.5,
            phase: 0.0,
        };
        TrigField::new(
            3,
            vec![
                t([1, 1, 1]),
                t([1, -1, 0]),
                t([0, 1, 1]),
                t([0, 1, 0]),
                t([1, 0, 1]),
                t([1, 0, 0]),
            ],
        )
        .unwrap()
    }

    /// Look up a built-in field by name (`cos3` for 𝔠, `cos3d` for 𝔡,
    /// `cos3d-primitive` for 𝔡 in its primitive period cell).
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "cos3" => Some(Self::cos3()),
            "cos3d" => Some(Self::cos3d()),
            "cos3d-primitive" | "cos3d_primitive" => Some(Self::cos3d_primitive()),
            _ => None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    fn check_dim(&self, point: &[f64]) -> Result<(), FieldError> {
        if point.len() != self.dim {
            return Err(FieldError::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        Ok(())
    }

    /// Reduce a point into [0,1)ᵐ. Integer frequencies make the field exactly
    /// 1-periodic, so evaluating at the reduced point is mathematically
    /// identical and keeps the trig arguments small (translation invariance
    /// then holds to machine precision regardless of |x|).
    fn reduced(&self, point: &[f64]) -> Vec<f64> {
        point.iter().map(|&x| x - x.floor()).collect()
    }

    /// Evaluate the field. Invariant under integer translation of `point`.
    pub fn eval(&self, point: &[f64]) -> Result<f64, FieldError> {
        self.check_dim(point)?;
        let xr = self.reduced(point);
        let mut s = 0.0;
        for t in &self.terms {
            let arg: f64 = t
                .freq
                .iter()
                .zip(&xr)
                .map(|(&k, &x)| k as f64 * x)
                .sum::<f64>();
            s += t.amp * (TAU * arg + t.phase).cos();
        }
        Ok(s)
    }

    /// Analytic gradient: ∇f(x) = −2π Σᵢ aᵢ kᵢ sin(2π⟨kᵢ,x⟩ + φᵢ).
    pub fn grad(&self, point: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.check_dim(point)?;
        let xr = self.reduced(point);
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            let arg: f64 = t
                .freq
                .iter()
                .zip(&xr)
                .map(|(&k, &x)| k as f64 * x)
                .sum::<f64>();
            let d = -TAU * t.amp * (TAU * arg + t.phase).sin();
            for (gi, &k) in g.iter_mut().zip(&t.freq) {
                *gi += d * k as f64;
            }
        }
        Ok(g)
    }

    /// Analytic Hessian (row-major m×m).
    pub fn hess(&self, point: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.check_dim(point)?;
        let xr = self.reduced(point);
        let m = self.dim;
        let mut h = vec![0.0; m * m];
        for t in &self.terms {
            let arg: f64 = t
                .freq
                .iter()
                .zip(&xr)
                .map(|(&k, &x)| k as f64 * x)
                .sum::<f64>();
            let d2 = -TAU * TAU * t.amp * (TAU * arg + t.phase).cos();
            for i in 0..m {
                for j in 0..m {
                    h[i * m + j] += d2 * t.freq[i] as f64 * t.freq[j] as f64;
                }
            }
        }
        Ok(h)
    }

    /// Conservative range bound: the field's values lie in
    /// [const − Σ'|aᵢ|, const + Σ'|aᵢ|] (primed sum over nonconstant terms).
    pub fn range_bound(&self) -> (f64, f64) {
        let mut c0 = 0.0;
        let mut r = 0.0;
        for t in &self.terms {
            if t.freq.iter().all(|&k| k == 0) {
                c0 += t.amp;
            } else {
                r += t.amp.abs();
            }
        }
        (c0 - r, c0 + r)
    }

    /// Largest |entry| over all frequency vectors (0 for a constant field);
    /// 1/that is the shortest period present, which seeds grid pitches.
    pub fn max_freq(&self) -> i64 {
        self.terms
            .iter()
            .flat_map(|t| t.freq.iter())
            .map(|k| k.abs())
            .max()
            .unwrap_or(0)
    }

    /// Serialize in the field-spec text format (parseable back).
    pub fn to_spec_string(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.dim);
        for t in &self.terms {
            for k in &t.freq {
                let _ = write!(s, "{k} ");
            }
            let _ = writeln!(s, " {:.17e} {:.17e}", t.amp, t.phase);
        }
        s
    }
}

/// Parse the field-spec text format:
///
/// ```text
/// # comments and blank lines are ignored
/// <dimension>
/// k1 k2 ... km  amplitude  phase
/// ...
/// ```
///
/// A line holding just a built-in name (`cos3`, `cos3d`) expands to that
/// field's harmonic list.
pub fn parse_field_spec(text: &str) -> Result<TrigField, FieldError> {
    let mut dim: Option<usize> = None;
    let mut terms: Vec<Term> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if dim.is_none() {
            if let Some(f) = TrigField::builtin(line) {
                return Ok(f);
            }
            let d: usize = line.parse().map_err(|_| FieldError::Parse {
                line: lineno + 1,
                msg: format!("expected a dimension or a built-in field name, got '{line}'"),
            })?;
            if d == 0 {
                return Err(FieldError::ZeroDimension);
            }
            dim = Some(d);
            continue;
        }
        let d = dim.unwrap();
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != d + 2 {
            return Err(FieldError::Parse {
                line: lineno + 1,
                msg: format!(
                    "expected {} integer frequencies, an amplitude, and a phase ({} tokens), got {}",
                    d,
                    d + 2,
                    tokens.len()
                ),
            });
        }
        let mut freq = Vec::with_capacity(d);
        for tok in &tokens[..d] {
            freq.push(tok.parse::<i64>().map_err(|_| FieldError::Parse {
                line: lineno + 1,
                msg: format!("bad integer frequency '{tok}'"),
            })?);
        }
        let amp: f64 = tokens[d].parse().map_err(|_| FieldError::Parse {
            line: lineno + 1,
            msg: format!("bad amplitude '{}'", tokens[d]),
        })?;
        let phase: f64 = tokens[d + 1].parse().map_err(|_| FieldError::Parse {
            line: lineno + 1,
            msg: format!("bad phase '{}'", tokens[d + 1]),
        })?;
        terms.push(Term { freq, amp, phase });
    }
    match dim {
        Some(d) => TrigField::new(d, terms),
        None => Err(FieldError::Parse {
            line: 0,
            msg: "empty field spec".into(),
        }),
    }
}

// ──────────────────────────────────────────────────────────────────────────
// Pseudoperiodic functions: linear + periodic
// ──────────────────────────────────────────────────────────────────────────

/// A pseudoperiodic function f(x) = ⟨linear, x⟩ + periodic(x).
///
/// The differential of f descends to a closed 1-form on the torus; the
/// linear part is the cohomology class of that form.
#[derive(Debug, Clone)]
pub struct PseudoperiodicSpec {
    pub linear: Vec<f64>,
    pub periodic: TrigField,
}

impl PseudoperiodicSpec {
    pub fn new(linear: Vec<f64>, periodic: TrigField) -> Result<Self, FieldError> {
        if linear.len() != periodic.dim() {
            return Err(FieldError::DimensionMismatch {
                expected: periodic.dim(),
                got: linear.len(),
            });
        }
        Ok(PseudoperiodicSpec { linear, periodic })
    }

    pub fn dim(&self) -> usize {
        self.periodic.dim()
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, FieldError> {
        let lin: f64 = self.linear.iter().zip(point).map(|(s, x)| s * x).sum();
        Ok(lin + self.periodic.eval(point)?)
    }

    pub fn grad(&self, point: &[f64]) -> Result<Vec<f64>, FieldError> {
        let mut g = self.periodic.grad(point)?;
        for (gi, s) in g.iter_mut().zip(&self.linear) {
            *gi += s;
        }
        Ok(g)
    }
}

/// Result of recovering the linear part of a sampled pseudoperiodic function.
#[derive(Debug, Clone)]
pub struct SampledDecomposition {
    /// The recovered covector S: f(x) − ⟨S,x⟩ is 1-periodic.
    pub linear: Vec<f64>,
    /// Worst deviation of a lattice increment from its mean — the certificate
    /// that the residual is periodic to tolerance.
    pub max_defect: f64,
}

impl SampledDecomposition {
    /// Evaluate the periodic residual ε_f(x) = f(x) − ⟨S,x⟩ of the original
    /// sample `f`.
    pub fn residual<F: Fn(&[f64]) -> f64>(&self, f: F, point: &[f64]) -> f64 {
        let lin: f64 = self.linear.iter().zip(point).map(|(s, x)| s * x).sum();
        f(point) - lin
    }
}

/// Identity-shaped constructor: package an explicit (linear, periodic) pair.
/// Inverse (up to an additive constant) of sampling the spec and running
/// [`decompose_sampled`].
pub fn decompose_explicit(
    linear: Vec<f64>,
    periodic: TrigField,
) -> Result<PseudoperiodicSpec, FieldError> {
    PseudoperiodicSpec::new(linear, periodic)
}

/// Tolerance for the periodicity defect of lattice increments, relative to
/// the increment scale. Increments of a genuinely pseudoperiodic function
/// are exactly constant; 1e−9 absorbs float evaluation noise only.
const DECOMPOSE_TOL: f64 = 1e-9;

/// Recover the linear part of a pseudoperiodic function from lattice
/// increments f(x+eᵢ) − f(x), averaged over a fixed deterministic sample of
/// base points; the increments must be constant to tolerance or the input is
/// not pseudoperiodic.
///
/// This is exact for the representable class (no quadrature): the periodic
/// part cancels in every increment.
pub fn decompose_sampled<F: Fn(&[f64]) -> f64>(
    f: F,
    dim: usize,
) -> Result<SampledDecomposition, FieldError> {
    if dim == 0 {
        return Err(FieldError::ZeroDimension);
    }
    // Deterministic low-discrepancy base points: fractional parts of
    // j·(√2, √3, √5, √7, …) — irrational strides avoid hitting symmetry axes.
    let strides = [
        std::f64::consts::SQRT_2,
        1.732_050_807_568_877_2,
        2.236_067_977_499_79,
        2.645_751_311_064_590_7,
        3.316_624_790_355_399_8,
        3.605_551_275_463_989,
    ];
    let n_base = 8;
    let base_points: Vec<Vec<f64>> = (1..=n_base)
        .map(|j| {
            (0..dim)
                .map(|i| (j as f64 * strides[i % strides.len()]).fract())
                .collect()
        })
        .collect();

    let mut linear = vec![0.0; dim];
    let mut max_defect = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..dim {
        // Increments over eᵢ and 2eᵢ from every base point.
        let mut incs = Vec::with_capacity(2 * n_base);
        for b in &base_points {
            let mut b1 = b.clone();
            b1[i] += 1.0;
            let mut b2 = b.clone();
            b2[i] += 2.0;
            let f0 = f(b);
            let f1 = f(&b1);
            let f2 = f(&b2);
            incs.push(f1 - f0);
            incs.push((f2 - f0) / 2.0);
            scale = scale.max(f0.abs()).max(f1.abs()).max(f2.abs());
        }
        let mean = incs.iter().sum::<f64>() / incs.len() as f64;
        for v in &incs {
            max_defect = max_defect.max((v - mean).abs());
        }
        linear[i] = mean;
        scale = scale.max(mean.abs());
    }
    let tol = DECOMPOSE_TOL * scale.max(1.0);
    if max_defect > tol {
        return Err(FieldError::NotPseudoperiodic {
            defect: max_defect,
            tol,
        });
    }
    Ok(SampledDecomposition { linear, max_defect })
}

// ──────────────────────────────────────────────────────────────────────────
// Quasiperiodic restrictions: f = φ ∘ ℓ
// ──────────────────────────────────────────────────────────────────────────

/// An affine line (1 direction) or plane (2 directions) in ℝᵐ:
/// ℓ(s) = base + s·u, or ℓ(s,t) = base + s·u + t·v.
#[derive(Debug, Clone)]
pub struct PlaneEmbedding {
    pub base: Vec<f64>,
    pub dirs: Vec<Vec<f64>>,
}

impl PlaneEmbedding {
    /// Affine line through `base` with direction `u`.
    pub fn line(base: Vec<f64>, u: Vec<f64>) -> Result<Self, FieldError> {
        if u.len() != base.len() {
            return Err(FieldError::DimensionMismatch {
                expected: base.len(),
                got: u.len(),
            });
        }
        if u.iter().map(|x| x * x).sum::<f64>() < 1e-24 {
            return Err(FieldError::DegeneratePlane);
        }
        Ok(PlaneEmbedding {
            base,
            dirs: vec![u],
        })
    }

    /// Affine plane through `base` spanned by `u`, `v` (must be independent).
    pub fn plane(base: Vec<f64>, u: Vec<f64>, v: Vec<f64>) -> Result<Self, FieldError> {
        if u.len() != base.len() || v.len() != base.len() {
            return Err(FieldError::DimensionMismatch {
                expected: base.len(),
                got: if u.len() != base.len() { u.len() } else { v.len() },
            });
        }
        let uu: f64 = u.iter().map(|x| x * x).sum();
        let vv: f64 = v.iter().map(|x| x * x).sum();
        let uv: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
        // Gram determinant vanishes iff u ∥ v.
        if uu * vv - uv * uv <= 1e-12 * uu * vv || uu == 0.0 || vv == 0.0 {
            return Err(FieldError::DegeneratePlane);
        }
        Ok(PlaneEmbedding {
            base,
            dirs: vec![u, v],
        })
    }

    /// Intrinsic dimension (1 for a line, 2 for a plane).
    pub fn k(&self) -> usize {
        self.dirs.len()
    }

    /// The ambient point ℓ(st).
    pub fn point(&self, st: &[f64]) -> Vec<f64> {
        let mut p = self.base.clone();
        for (coef, d) in st.iter().zip(&self.dirs) {
            for (pi, di) in p.iter_mut().zip(d) {
                *pi += coef * di;
            }
        }
        p
    }
}

/// One harmonic of a restricted field, with real plane-frequencies.
#[derive(Debug, Clone)]
struct PlaneTerm {
    kappa: Vec<f64>, // ⟨k,u⟩ (, ⟨k,v⟩)
    amp: f64,
    phase: f64, // φ + 2π⟨k, base⟩
}

/// The quasiperiodic restriction of a [`TrigField`] to an affine line or
/// plane: a trig polynomial in the intrinsic coordinates with real
/// frequencies (the projections of the integer frequencies).
#[derive(Debug, Clone)]
pub struct PlaneFunction {
    k: usize,
    terms: Vec<PlaneTerm>,
}

impl PlaneFunction {
    pub fn k(&self) -> usize {
        self.k
    }

    fn check_dim(&self, st: &[f64]) -> Result<(), FieldError> {
        if st.len() != self.k {
            return Err(FieldError::DimensionMismatch {
                expected: self.k,
                got: st.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, st: &[f64]) -> Result<f64, FieldError> {
        self.check_dim(st)?;
        let mut s = 0.0;
        for t in &self.terms {
            let arg: f64 = t.kappa.iter().zip(st).map(|(k, x)| k * x).sum();
            s += t.amp * (TAU * arg + t.phase).cos();
        }
        Ok(s)
    }

    pub fn grad(&self, st: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.check_dim(st)?;
        let mut g = vec![0.0; self.k];
        for t in &self.terms {
            let arg: f64 = t.kappa.iter().zip(st).map(|(k, x)| k * x).sum();
            let d = -TAU * t.amp * (TAU * arg + t.phase).sin();
            for (gi, ki) in g.iter_mut().zip(&t.kappa) {
                *gi += d * ki;
            }
        }
        Ok(g)
    }

    /// Analytic Hessian, row-major k×k.
    pub fn hess(&self, st: &[f64]) -> Result<Vec<f64>, FieldError> {
        self.check_dim(st)?;
        let k = self.k;
        let mut h = vec![0.0; k * k];
        for t in &self.terms {
            let arg: f64 = t.kappa.iter().zip(st).map(|(ki, x)| ki * x).sum();
            let d2 = -TAU * TAU * t.amp * (TAU * arg + t.phase).cos();
            for i in 0..k {
                for j in 0..k {
                    h[i * k + j] += d2 * t.kappa[i] * t.kappa[j];
                }
            }
        }
        Ok(h)
    }
}

/// Restrict a periodic field to an affine line/plane: returns the handle
/// evaluating φ∘ℓ with analytic derivatives in the intrinsic coordinates.
pub fn restrict_to_plane(
    field: &TrigField,
    plane: &PlaneEmbedding,
) -> Result<PlaneFunction, FieldError> {
    if plane.base.len() != field.dim() {
        return Err(FieldError::DimensionMismatch {
            expected: field.dim(),
            got: plane.base.len(),
        });
    }
    let terms = field
        .terms()
        .iter()
        .map(|t| {
            let kappa: Vec<f64> = plane
                .dirs
                .iter()
                .map(|d| t.freq.iter().zip(d).map(|(&k, &x)| k as f64 * x).sum())
                .collect();
            let kb: f64 = t
                .freq
                .iter()
                .zip(&plane.base)
                .map(|(&k, &x)| k as f64 * x)
                .sum();
            PlaneTerm {
                kappa,
                amp: t.amp,
                phase: t.phase + TAU * kb,
            }
        })
        .collect();
    Ok(PlaneFunction {
        k: plane.k(),
        terms,
    })
}

/// The projections of the field's nonzero frequencies onto the plane:
/// one real k-covector ⟨kᵢ,u⟩ (, ⟨kᵢ,v⟩) per harmonic. These generate the
/// frequency module of the restriction over ℤ. Zero frequencies (constant
/// terms) contribute nothing and are omitted.
pub fn frequency_generators(
    field: &TrigField,
    plane: &PlaneEmbedding,
) -> Result<Vec<Vec<f64>>, FieldError> {
    if plane.base.len() != field.dim() {
        return Err(FieldError::DimensionMismatch {
            expected: field.dim(),
            got: plane.base.len(),
        });
    }
    Ok(field
        .terms()
        .iter()
        .filter(|t| t.freq.iter().any(|&k| k != 0))
        .map(|t| {
            plane
                .dirs
                .iter()
                .map(|d| t.freq.iter().zip(d).map(|(&k, &x)| k as f64 * x).sum())
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cos3_values() {
        let c = TrigField::cos3();
        assert_abs_diff_eq!(c.eval(&[0.0, 0.0, 0.0]).unwrap(), 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.eval(&[0.5, 0.0, 0.0]).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cos3_gradient_at_special_points() {
        let c = TrigField::cos3();
        let g0 = c.grad(&[0.0, 0.0, 0.0]).unwrap();
        for gi in g0 {
            assert_abs_diff_eq!(gi, 0.0, epsilon = 1e-14);
        }
        let g = c.grad(&[0.25, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(g[0], -TAU, epsilon = 1e-12);
        assert_abs_diff_eq!(g[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[2], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn canonicalization_merges_and_sign_normalizes() {
        // cos(2π(−x+z) + 0.7) must normalize to frequency (1,0,−1), phase −0.7.
        let f = TrigField::new(
            3,
            vec![Term {
                freq: vec![-1, 0, 1],
                amp: 2.0,
                phase: 0.7,
            }],
        )
        .unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].freq, vec![1, 0, -1]);
        assert_abs_diff_eq!(f.terms()[0].phase, -0.7, epsilon = 1e-15);
        // Value unchanged by normalization.
        let p = [0.3, 0.9, 0.17];
        let direct = 2.0 * (TAU * (-p[0] + p[2]) + 0.7).cos();
        assert_abs_diff_eq!(f.eval(&p).unwrap(), direct, epsilon = 1e-13);

        // Two equal frequencies merge by phasor addition.
        let g = TrigField::new(
            2,
            vec![
                Term {
                    freq: vec![1, 2],
                    amp: 1.0,
                    phase: 0.0,
                },
                Term {
                    freq: vec![-1, -2],
                    amp: 1.0,
                    phase: 0.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(g.terms().len(), 1);
        assert_abs_diff_eq!(g.terms()[0].amp, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let c = TrigField::cos3();
        assert!(matches!(
            c.eval(&[0.0, 0.0]),
            Err(FieldError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            c.grad(&[0.0; 4]),
            Err(FieldError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn spec_round_trip() {
        let d = TrigField::cos3d();
        let s = d.to_spec_string();
        let back = parse_field_spec(&s).unwrap();
        assert_eq!(d, back);
        assert_eq!(parse_field_spec("cos3").unwrap(), TrigField::cos3());
        assert!(parse_field_spec("3\n1 0 0 bad 0").is_err());
        assert!(parse_field_spec("").is_err());
    }

    #[test]
    fn range_bound_brackets_reality() {
        let c = TrigField::cos3();
        let (lo, hi) = c.range_bound();
        assert_abs_diff_eq!(lo, -3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hi, 3.0, epsilon = 1e-14);
        let d = TrigField::cos3d();
        let (lo, hi) = d.range_bound();
        // The sum bound ±3 brackets the true range [−1, 3].
        assert!(lo <= -1.0 && hi >= 3.0);
    }
}
