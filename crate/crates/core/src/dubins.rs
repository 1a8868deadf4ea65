//! Steering function: shortest bounded-curvature path between two
//! configurations, drawn from the six arc-line-arc families, plus evenly
//! spaced intermediate configurations along it.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{normalize_angle, Config};
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DubinsError {
    #[error("configuration contains a non-finite coordinate")]
    NonFinite,
    #[error("turning radius must be strictly positive")]
    InvalidRadius,
    #[error("no family admits a solution for this configuration pair")]
    NoPath,
    #[error("arclength is outside [0, total_length]")]
    ArclengthOutOfRange,
}

/// The six Dubins families, in tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Lsl,
    Rsr,
    Lsr,
    Rsl,
    Rlr,
    Lrl,
}

pub const ALL_FAMILIES: [Family; 6] = [
    Family::Lsl,
    Family::Rsr,
    Family::Lsr,
    Family::Rsl,
    Family::Rlr,
    Family::Lrl,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegKind {
    Left,
    Straight,
    Right,
}

impl Family {
    pub fn segments(self) -> [SegKind; 3] {
        use SegKind::*;
        match self {
            Family::Lsl => [Left, Straight, Left],
            Family::Rsr => [Right, Straight, Right],
            Family::Lsr => [Left, Straight, Right],
            Family::Rsl => [Right, Straight, Left],
            Family::Rlr => [Right, Left, Right],
            Family::Lrl => [Left, Right, Left],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Lsl => "LSL",
            Family::Rsr => "RSR",
            Family::Lsr => "LSR",
            Family::Rsl => "RSL",
            Family::Rlr => "RLR",
            Family::Lrl => "LRL",
        }
    }

    fn is_ccc(self) -> bool {
        matches!(self, Family::Rlr | Family::Lrl)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A bounded-curvature path between two configurations.
///
/// `seg_params` holds the first-arc angle in radians, the middle segment
/// (meters for the straight of S-families, radians for the middle arc of
/// RLR/LRL), and the last-arc angle in radians. All three are non-negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DubinsPath<T> {
    pub family: Family,
    pub seg_params: [T; 3],
    pub r_min: T,
    pub start: Config<T>,
    pub end: Config<T>,
    pub total_length: T,
}

impl<T: Real> DubinsPath<T> {
    /// Segment lengths in meters.
    pub fn segment_lengths(&self) -> [T; 3] {
        let mid = if self.family.is_ccc() {
            self.seg_params[1] * self.r_min
        } else {
            self.seg_params[1]
        };
        [
            self.seg_params[0] * self.r_min,
            mid,
            self.seg_params[2] * self.r_min,
        ]
    }

    pub fn is_degenerate(&self) -> bool {
        self.total_length == T::zero()
    }
}

/// Normalized candidate: segment parameters in units of the turning radius.
#[derive(Debug, Clone, Copy)]
struct Candidate<T> {
    family: Family,
    t: T,
    p: T,
    q: T,
}

impl<T: Real> Candidate<T> {
    fn normalized_length(&self) -> T {
        self.t + self.p + self.q
    }
}

struct Inputs<T> {
    alpha: T,
    beta: T,
    d: T,
    sa: T,
    sb: T,
    ca: T,
    cb: T,
    c_ab: T,
}

impl<T: Real> Inputs<T> {
    fn new(from: &Config<T>, to: &Config<T>, r_min: T) -> Self {
        let dx = to.x - from.x;
        let dy = to.y - from.y;
        let d = dx.hypot(dy) / r_min;
        let phi = dy.atan2(dx);
        let alpha = normalize_angle(from.theta - phi);
        let beta = normalize_angle(to.theta - phi);
        Self {
            alpha,
            beta,
            d,
            sa: alpha.sin(),
            sb: beta.sin(),
            ca: alpha.cos(),
            cb: beta.cos(),
            c_ab: (alpha - beta).cos(),
        }
    }

    /// Clamp a squared tangent length that is negative only through rounding
    /// noise; genuinely negative discriminants stay inadmissible.
    fn admissible_p_sq(&self, p_sq: T) -> Option<T> {
        if p_sq >= T::zero() {
            return Some(p_sq);
        }
        let scale = self.d + T::of(2.0);
        if p_sq > -T::epsilon() * T::of(16.0) * scale * scale {
            Some(T::zero())
        } else {
            None
        }
    }

    fn candidate(&self, family: Family) -> Option<Candidate<T>> {
        let two = T::of(2.0);
        let (alpha, beta, d) = (self.alpha, self.beta, self.d);
        let (sa, sb, ca, cb, c_ab) = (self.sa, self.sb, self.ca, self.cb, self.c_ab);
        match family {
            Family::Lsl => {
                let p_sq = self.admissible_p_sq(two + d * d - two * c_ab + two * d * (sa - sb))?;
                let p = p_sq.sqrt();
                if p <= T::of(1e-12) {
                    // Coincident turning circles: a single left arc. The
                    // atan2 below would see pure rounding noise here and can
                    // insert a spurious full turn.
                    return Some(Candidate {
                        family,
                        t: normalize_angle(beta - alpha),
                        p: T::zero(),
                        q: T::zero(),
                    });
                }
                let tmp = (cb - ca).atan2(d + sa - sb);
                Some(Candidate {
                    family,
                    t: normalize_angle(tmp - alpha),
                    p,
                    q: normalize_angle(beta - tmp),
                })
            }
            Family::Rsr => {
                let p_sq = self.admissible_p_sq(two + d * d - two * c_ab + two * d * (sb - sa))?;
                let p = p_sq.sqrt();
                if p <= T::of(1e-12) {
                    return Some(Candidate {
                        family,
                        t: normalize_angle(alpha - beta),
                        p: T::zero(),
                        q: T::zero(),
                    });
                }
                let tmp = (ca - cb).atan2(d - sa + sb);
                Some(Candidate {
                    family,
                    t: normalize_angle(alpha - tmp),
                    p,
                    q: normalize_angle(tmp - beta),
                })
            }
            Family::Lsr => {
                let p_sq = self.admissible_p_sq(d * d - two + two * c_ab + two * d * (sa + sb))?;
                let p = p_sq.sqrt();
                let tmp = (-ca - cb).atan2(d + sa + sb) - (-two).atan2(p);
                Some(Candidate {
                    family,
                    t: normalize_angle(tmp - alpha),
                    p,
                    q: normalize_angle(tmp - normalize_angle(beta)),
                })
            }
            Family::Rsl => {
                let p_sq = self.admissible_p_sq(d * d - two + two * c_ab - two * d * (sa + sb))?;
                let p = p_sq.sqrt();
                let tmp = (ca + cb).atan2(d - sa - sb) - two.atan2(p);
                Some(Candidate {
                    family,
                    t: normalize_angle(alpha - tmp),
                    p,
                    q: normalize_angle(beta - tmp),
                })
            }
            Family::Rlr => {
                let tmp = (T::of(6.0) - d * d + two * c_ab + two * d * (sa - sb)) / T::of(8.0);
                if tmp.abs() > T::one() {
                    return None;
                }
                let p = normalize_angle(T::TAU() - tmp.acos());
                if p <= T::of(1e-9) {
                    // acos collapsed to zero; the single-arc limit belongs to
                    // RSR and the join angle below would be rounding noise.
                    return None;
                }
                let phi = (ca - cb).atan2(d - sa + sb);
                let t = normalize_angle(alpha - phi + normalize_angle(p / two));
                Some(Candidate {
                    family,
                    t,
                    p,
                    q: normalize_angle(alpha - beta - t + normalize_angle(p)),
                })
            }
            Family::Lrl => {
                let tmp = (T::of(6.0) - d * d + two * c_ab + two * d * (sb - sa)) / T::of(8.0);
                if tmp.abs() > T::one() {
                    return None;
                }
                let p = normalize_angle(T::TAU() - tmp.acos());
                if p <= T::of(1e-9) {
                    return None;
                }
                let phi = (ca - cb).atan2(d + sa - sb);
                let t = normalize_angle(-alpha - phi + p / two);
                Some(Candidate {
                    family,
                    t,
                    p,
                    q: normalize_angle(normalize_angle(beta) - alpha - t + normalize_angle(p)),
                })
            }
        }
    }
}

fn build_path<T: Real>(
    cand: Candidate<T>,
    from: &Config<T>,
    to: &Config<T>,
    r_min: T,
) -> DubinsPath<T> {
    let mid = if cand.family.is_ccc() {
        cand.p
    } else {
        cand.p * r_min
    };
    DubinsPath {
        family: cand.family,
        seg_params: [cand.t, mid, cand.q],
        r_min,
        start: *from,
        end: *to,
        total_length: cand.normalized_length() * r_min,
    }
}

/// Compute the closed-form solution of one family, if it exists.
pub fn family_path<T: Real>(
    from: &Config<T>,
    to: &Config<T>,
    r_min: T,
    family: Family,
) -> Option<DubinsPath<T>> {
    Inputs::new(from, to, r_min)
        .candidate(family)
        .map(|c| build_path(c, from, to, r_min))
}

/// Shortest bounded-curvature path over all six families.
///
/// Identical configurations (within 1e-12 per coordinate) yield a zero-length
/// degenerate path. Ties are broken by family order LSL < RSR < LSR < RSL <
/// RLR < LRL.
pub fn shortest_path<T: Real>(
    from: &Config<T>,
    to: &Config<T>,
    r_min: T,
) -> Result<DubinsPath<T>, DubinsError> {
    if !from.is_finite() || !to.is_finite() {
        return Err(DubinsError::NonFinite);
    }
    if !r_min.is_finite() || r_min <= T::zero() {
        return Err(DubinsError::InvalidRadius);
    }
    if from.almost_eq(to, T::of(1e-12)) {
        return Ok(DubinsPath {
            family: Family::Lsl,
            seg_params: [T::zero(); 3],
            r_min,
            start: *from,
            end: *to,
            total_length: T::zero(),
        });
    }

    let inputs = Inputs::new(from, to, r_min);
    let mut best: Option<Candidate<T>> = None;
    for family in ALL_FAMILIES {
        if let Some(cand) = inputs.candidate(family) {
            let better = match &best {
                None => true,
                Some(b) => cand.normalized_length() < b.normalized_length(),
            };
            if better {
                best = Some(cand);
            }
        }
    }
    best.map(|c| build_path(c, from, to, r_min))
        .ok_or(DubinsError::NoPath)
}

/// Advance a configuration along one segment by `len` meters.
fn advance<T: Real>(q: &Config<T>, kind: SegKind, len: T, r_min: T) -> Config<T> {
    let (s0, c0) = q.theta.sin_cos();
    match kind {
        SegKind::Straight => Config::new(q.x + len * c0, q.y + len * s0, q.theta),
        SegKind::Left => {
            let phi = len / r_min;
            let t1 = q.theta + phi;
            Config::new(
                q.x + r_min * (t1.sin() - s0),
                q.y + r_min * (c0 - t1.cos()),
                t1,
            )
        }
        SegKind::Right => {
            let phi = len / r_min;
            let t1 = q.theta - phi;
            Config::new(
                q.x + r_min * (s0 - t1.sin()),
                q.y + r_min * (t1.cos() - c0),
                t1,
            )
        }
    }
}

/// Configuration reached after traveling `s` meters along the path. The
/// heading is the path tangent direction.
pub fn point_at_arclength<T: Real>(path: &DubinsPath<T>, s: T) -> Result<Config<T>, DubinsError> {
    if !s.is_finite() || s < T::zero() || s > path.total_length {
        return Err(DubinsError::ArclengthOutOfRange);
    }
    let kinds = path.family.segments();
    let lengths = path.segment_lengths();
    let mut q = path.start;
    let mut remaining = s;
    for (kind, len) in kinds.into_iter().zip(lengths) {
        if remaining <= len {
            return Ok(advance(&q, kind, remaining, path.r_min));
        }
        q = advance(&q, kind, len, path.r_min);
        remaining -= len;
    }
    Ok(q)
}

/// The minimum number of evenly spaced configurations along the path such
/// that consecutive spacing is at most `s_max`. The last configuration
/// coincides with the path end; a degenerate path yields none.
pub fn intermediate_nodes<T: Real>(path: &DubinsPath<T>, s_max: T) -> Vec<Config<T>> {
    debug_assert!(s_max > T::zero());
    if path.is_degenerate() {
        return Vec::new();
    }
    let ratio = path.total_length / s_max;
    let mut n = ratio.ceil();
    // ceil() overcounts when total_length sits a rounding error above an
    // integer multiple of s_max; the minimum-count contract allows 1e-9 slack.
    if n > T::one() && path.total_length / (n - T::one()) <= s_max + T::of(1e-9) {
        n -= T::one();
    }
    let count = n.to_usize().unwrap_or(1).max(1);
    let mut nodes = Vec::with_capacity(count);
    for j in 1..=count {
        let s = if j == count {
            path.total_length
        } else {
            path.total_length * T::from_usize(j).unwrap() / n
        };
        // In range by construction.
        nodes.push(point_at_arclength(path, s).expect("arclength within path bounds"));
    }
    nodes
}
