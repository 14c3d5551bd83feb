//! Exact integer lattice arithmetic and small dense 3-vector helpers.
//!
//! Everything homological in this workspace lives in `H₁(T³,ℤ) ≅ ℤ³` or
//! `H₂(T³,ℤ) ≅ ℤ³`: translation classes of closed sections, wrap vectors of
//! periodic meshes, souls of stability zones. This crate provides the shared
//! primitives:
//!
//! - [`IVec3`] operations with `i128` intermediates (no silent overflow for any
//!   input this workspace produces),
//! - gcd / content / sign normalization giving the canonical *indivisible*
//!   representative of a projective integer class,
//! - exact rank over ℤ of a family of classes (fraction-free elimination — the
//!   only piece of Smith-form machinery the rank computations need),
//! - plain `f64` 3-vector helpers used by the geometric layers.
//!
//! All functions are pure; nothing allocates beyond its output.

/// Integer lattice vector in ℤ³ (a homology class of the 3-torus).
pub type IVec3 = [i64; 3];

/// Greatest common divisor of two non-negative integers (Euclid).
#[inline]
pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Greatest common divisor for `u128` (used by the gasket's i128 vectors).
#[inline]
pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Content of an integer vector: the gcd of the absolute values of its
/// entries; 0 for the zero vector.
pub fn content(v: &IVec3) -> u64 {
    v.iter().fold(0u64, |g, &x| gcd_u64(g, x.unsigned_abs()))
}

/// Exact dot product with an `i128` accumulator.
#[inline]
pub fn dot_i(a: &IVec3, b: &IVec3) -> i128 {
    a.iter().zip(b).map(|(&x, &y)| x as i128 * y as i128).sum()
}

/// Exact cross product. Entries of the inputs stay far below 2⁶³ in every
/// caller, so the `i128` intermediates always fit back into `i64`; if they
/// ever do not, that is a caller bug and we panic rather than wrap.
pub fn cross_i(a: &IVec3, b: &IVec3) -> IVec3 {
    let c = [
        a[1] as i128 * b[2] as i128 - a[2] as i128 * b[1] as i128,
        a[2] as i128 * b[0] as i128 - a[0] as i128 * b[2] as i128,
        a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128,
    ];
    [
        i64::try_from(c[0]).expect("cross product overflows i64"),
        i64::try_from(c[1]).expect("cross product overflows i64"),
        i64::try_from(c[2]).expect("cross product overflows i64"),
    ]
}

/// Sign-normalize in place: flip the vector so its first nonzero entry is
/// positive (the canonical representative of a projective class, and of a
/// homology class defined modulo sign).
pub fn sign_normalize(v: &mut IVec3) {
    for &x in v.iter() {
        if x != 0 {
            if x < 0 {
                for e in v.iter_mut() {
                    *e = -*e;
                }
            }
            return;
        }
    }
}

/// Canonical indivisible representative of a nonzero class: divide by the
/// content and sign-normalize. Returns `None` for the zero vector.
pub fn normalize_indivisible(v: &IVec3) -> Option<IVec3> {
    let c = content(v);
    if c == 0 {
        return None;
    }
    let mut w = [v[0] / c as i64, v[1] / c as i64, v[2] / c as i64];
    sign_normalize(&mut w);
    Some(w)
}

/// True iff `v` is nonzero, has content 1, and is sign-normalized.
pub fn is_canonical_indivisible(v: &IVec3) -> bool {
    normalize_indivisible(v) == Some(*v)
}

/// Exact rank over ℤ (equivalently over ℚ) of a family of lattice classes.
///
/// Fraction-free Gaussian elimination on an n×3 integer matrix with `i128`
/// entries. Inputs in this workspace are homology classes with entries
/// ≲ 10⁶, so the Bareiss-style products never approach the i128 range.
pub fn int_rank(rows: &[IVec3]) -> usize {
    let mut m: Vec<[i128; 3]> = rows
        .iter()
        .map(|r| [r[0] as i128, r[1] as i128, r[2] as i128])
        .collect();
    let mut rank = 0;
    for col in 0..3 {
        // Find a pivot row with nonzero entry in this column.
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][col];
        for r in rank + 1..m.len() {
            if m[r][col] != 0 {
                let f = m[r][col];
                for c in col..3 {
                    m[r][c] = m[r][c] * piv - m[rank][c] * f;
                }
                // Keep entries small: divide the row by its content.
                let g = m[r]
                    .iter()
                    .fold(0u128, |g, &x| gcd_u128(g, x.unsigned_abs()));
                if g > 1 {
                    for c in 0..3 {
                        m[r][c] /= g as i128;
                    }
                }
            }
        }
        rank += 1;
        if rank == 3 {
            break;
        }
    }
    rank
}

/// Row-reduced basis of the ℚ-span of a family of lattice classes, with
/// integer entries (each row content-reduced and sign-normalized, rows in
/// echelon order).  `int_basis(v).len() == int_rank(v)`.
///
/// The rows span the same *rational* subspace as the inputs; this is what
/// rank tests and soul directions need (a soul is a line or a plane normal,
/// both insensitive to finite-index sublattices).
pub fn int_basis(rows: &[IVec3]) -> Vec<IVec3> {
    let mut m: Vec<[i128; 3]> = rows
        .iter()
        .filter(|r| r.iter().any(|&x| x != 0))
        .map(|r| [r[0] as i128, r[1] as i128, r[2] as i128])
        .collect();
    let mut rank = 0;
    for col in 0..3 {
        let Some(p) = (rank..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][col];
        for r in rank + 1..m.len() {
            if m[r][col] != 0 {
                let f = m[r][col];
                for c in col..3 {
                    m[r][c] = m[r][c] * piv - m[rank][c] * f;
                }
                let g = m[r]
                    .iter()
                    .fold(0u128, |g, &x| gcd_u128(g, x.unsigned_abs()));
                if g > 1 {
                    for c in 0..3 {
                        m[r][c] /= g as i128;
                    }
                }
            }
        }
        rank += 1;
        if rank == 3 {
            break;
        }
    }
    m.truncate(rank);
    m.iter()
        .map(|row| {
            let g = row
                .iter()
                .fold(0u128, |g, &x| gcd_u128(g, x.unsigned_abs()));
            let mut v = [
                (row[0] / g as i128) as i64,
                (row[1] / g as i128) as i64,
                (row[2] / g as i128) as i64,
            ];
            sign_normalize(&mut v);
            v
        })
        .collect()
}

/// Ordinary least-squares line fit, shared by every log-log exponent
/// estimator in the workspace (box dimensions, zone-statistics exponents,
/// diffusion exponents).
pub mod linfit {
    /// Result of fitting y = slope·x + intercept.
    #[derive(Debug, Clone, Copy)]
    pub struct LineFit {
        pub slope: f64,
        pub intercept: f64,
        /// Coefficient of determination; 1.0 when the fit is exact (also
        /// reported for a perfectly flat response).
        pub r2: f64,
        pub n: usize,
    }

    /// Least-squares line through (xs, ys). Returns `None` for fewer than
    /// two points or a degenerate abscissa.
    pub fn least_squares(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
        let n = xs.len();
        if n < 2 || n != ys.len() {
            return None;
        }
        let nf = n as f64;
        let mx = xs.iter().sum::<f64>() / nf;
        let my = ys.iter().sum::<f64>() / nf;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        if sxx <= 0.0 {
            return None;
        }
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
        Some(LineFit {
            slope,
            intercept,
            r2,
            n,
        })
    }
}

/// Dense f64 3-vector helpers for the geometric layers.
pub mod vec3 {
    /// Euclidean 3-vector.
    pub type Vec3 = [f64; 3];

    #[inline]
    pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
        a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
    }

    #[inline]
    pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[inline]
    pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
    }

    #[inline]
    pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
        [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
    }

    #[inline]
    pub fn scale(a: &Vec3, s: f64) -> Vec3 {
        [a[0] * s, a[1] * s, a[2] * s]
    }

    #[inline]
    pub fn norm(a: &Vec3) -> f64 {
        dot(a, a).sqrt()
    }

    #[inline]
    pub fn dist(a: &Vec3, b: &Vec3) -> f64 {
        norm(&sub(a, b))
    }

    /// Unit vector in the direction of `a`; panics on the zero vector.
    pub fn normalize(a: &Vec3) -> Vec3 {
        let n = norm(a);
        assert!(n > 0.0, "cannot normalize the zero vector");
        scale(a, 1.0 / n)
    }

    /// Angle between two nonzero vectors, in radians, numerically clamped.
    pub fn angle(a: &Vec3, b: &Vec3) -> f64 {
        let c = dot(a, b) / (norm(a) * norm(b));
        c.clamp(-1.0, 1.0).acos()
    }

    /// Distance from point `p` to the line through `o` with unit direction `d`.
    pub fn dist_to_line(p: &Vec3, o: &Vec3, d: &Vec3) -> f64 {
        let r = sub(p, o);
        norm(&cross(&r, d))
    }
}
