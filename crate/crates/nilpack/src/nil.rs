//! Points, translations and isometries of Nil in the projective model.
//!
//! A point is the affine part (a, b, c) of a homogeneous row vector
//! (1; a, b, c). Translations act on the right by the matrix
//!
//! ```text
//!             | 1  x  y  z |
//!   L(x,y,z) =| 0  1  0  0 |
//!             | 0  0  1  x |
//!             | 0  0  0  1 |
//! ```
//!
//! so translating (a, b, c) by (x, y, z) gives (x + a, y + b, z + bx + c).
//! The group law is noncommutative: the z column picks up the bx shear.
//!
//! Rotations about the z axis of the origin act linearly in "linearized"
//! coordinates (x, y, z - xy/2); see [`NilPoint::to_linearized`]. A general
//! orientation-preserving isometry fixing the fibre direction is stored as
//! a rotation about the origin followed by a right translation.

use crate::numeric::wrap_angle;

/// A point of Nil in model coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NilPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// Parameters (x, y, z) of the right translation L(x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NilTranslation {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// A translation along the centre of the group: (0, 0, z). These commute
/// with every isometry considered here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreTranslation {
    pub z: f64,
}

/// Rotation by `omega` about the origin's fibre, followed by `trans`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NilIsometry {
    /// Rotation angle, kept in (-pi, pi].
    pub omega: f64,
    pub trans: NilTranslation,
}

// ======================================================================
// points
// ======================================================================

impl NilPoint {
    pub const ORIGIN: NilPoint = NilPoint { a: 0.0, b: 0.0, c: 0.0 };

    pub fn new(a: f64, b: f64, c: f64) -> Self {
        NilPoint { a, b, c }
    }

    /// Right-translates the point: (1; a, b, c) * L(t).
    pub fn translate(self, t: NilTranslation) -> NilPoint {
        NilPoint::new(t.x + self.a, t.y + self.b, t.z + self.b * t.x + self.c)
    }

    /// Rotates by `omega` (counterclockwise for positive `omega`) about
    /// the fibre through the origin. The planar part turns rigidly; the
    /// third coordinate shifts so the fibre foliation is preserved:
    ///
    /// ```text
    ///   z -> z - ab/2 + (a^2 - b^2)/4 sin(2w) + ab/2 cos(2w)
    /// ```
    pub fn rotate_about_origin(self, omega: f64) -> NilPoint {
        let (s, co) = omega.sin_cos();
        let (s2, c2) = (2.0 * omega).sin_cos();
        let x = self.a * co - self.b * s;
        let y = self.a * s + self.b * co;
        let z = self.c - 0.5 * self.a * self.b
            + 0.25 * (self.a * self.a - self.b * self.b) * s2
            + 0.5 * self.a * self.b * c2;
        NilPoint::new(x, y, z)
    }

    /// Shear to coordinates in which origin-fixing rotations are linear:
    /// (a, b, c) -> (a, b, c - ab/2). Volume preserving.
    pub fn to_linearized(self) -> NilPoint {
        NilPoint::new(self.a, self.b, self.c - 0.5 * self.a * self.b)
    }

    /// Inverse of [`NilPoint::to_linearized`].
    pub fn from_linearized(self) -> NilPoint {
        NilPoint::new(self.a, self.b, self.c + 0.5 * self.a * self.b)
    }

    /// Max-norm distance between model coordinate triples (not the
    /// Riemannian distance; used for residuals and dedup).
    pub fn coord_distance(self, other: NilPoint) -> f64 {
        (self.a - other.a)
            .abs()
            .max((self.b - other.b).abs())
            .max((self.c - other.c).abs())
    }

    pub fn is_finite(self) -> bool {
        self.a.is_finite() && self.b.is_finite() && self.c.is_finite()
    }
}

// ======================================================================
// translations
// ======================================================================

impl NilTranslation {
    pub const IDENTITY: NilTranslation = NilTranslation { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        NilTranslation { x, y, z }
    }

    /// The translation carrying the origin to `p`; its parameters are the
    /// coordinates of `p` itself.
    pub fn carrying_origin_to(p: NilPoint) -> Self {
        NilTranslation::new(p.a, p.b, p.c)
    }

    /// Matrix product L(self) * L(rhs). Note the order: the z entry is
    /// `rhs.z + self.x * rhs.y + self.z`.
    pub fn multiply(self, rhs: NilTranslation) -> NilTranslation {
        NilTranslation::new(
            rhs.x + self.x,
            rhs.y + self.y,
            rhs.z + self.x * rhs.y + self.z,
        )
    }

    /// Translation equal to "apply `self`, then apply `next`" on points.
    /// Because points multiply on the right, this is L(next) * L(self).
    pub fn then(self, next: NilTranslation) -> NilTranslation {
        next.multiply(self)
    }

    /// Group inverse: L(t)^-1 = L(-x, -y, xy - z).
    pub fn inverse(self) -> NilTranslation {
        NilTranslation::new(-self.x, -self.y, self.x * self.y - self.z)
    }

    /// Image of the origin, i.e. the parameters read as a point.
    pub fn image_of_origin(self) -> NilPoint {
        NilPoint::new(self.x, self.y, self.z)
    }

    /// Conjugation by the rotation `omega` about the origin maps the
    /// translation by t to the translation by (rotation of t's target).
    pub fn rotated(self, omega: f64) -> NilTranslation {
        NilTranslation::carrying_origin_to(self.image_of_origin().rotate_about_origin(omega))
    }
}

impl FibreTranslation {
    pub fn new(z: f64) -> Self {
        FibreTranslation { z }
    }

    pub fn to_translation(self) -> NilTranslation {
        NilTranslation::new(0.0, 0.0, self.z)
    }

    pub fn to_isometry(self) -> NilIsometry {
        NilIsometry::translation(self.to_translation())
    }
}

// ======================================================================
// isometries
// ======================================================================

impl NilIsometry {
    pub const IDENTITY: NilIsometry = NilIsometry {
        omega: 0.0,
        trans: NilTranslation::IDENTITY,
    };

    pub fn new(omega: f64, trans: NilTranslation) -> Self {
        NilIsometry {
            omega: wrap_angle(omega),
            trans,
        }
    }

    pub fn rotation(omega: f64) -> Self {
        NilIsometry::new(omega, NilTranslation::IDENTITY)
    }

    pub fn translation(trans: NilTranslation) -> Self {
        NilIsometry {
            omega: 0.0,
            trans,
        }
    }

    /// Rotation by `omega` about the whole fibre line through `center`:
    /// conjugate the origin rotation by the translation carrying the
    /// origin to `center`. Fixes every point of that fibre.
    pub fn rotation_about_fibre(center: NilPoint, omega: f64) -> Self {
        let t = NilTranslation::carrying_origin_to(center);
        NilIsometry::translation(t.inverse())
            .then(NilIsometry::rotation(omega))
            .then(NilIsometry::translation(t))
    }

    pub fn apply(self, p: NilPoint) -> NilPoint {
        p.rotate_about_origin(self.omega).translate(self.trans)
    }

    /// Composition in application order: `self` first, then `next`.
    ///
    /// Pushing `self`'s translation past `next`'s rotation conjugates it:
    /// the combined translation is (self.trans rotated by next.omega)
    /// followed by next.trans.
    pub fn then(self, next: NilIsometry) -> NilIsometry {
        NilIsometry::new(
            self.omega + next.omega,
            self.trans.rotated(next.omega).then(next.trans),
        )
    }

    pub fn inverse(self) -> NilIsometry {
        NilIsometry::new(-self.omega, self.trans.rotated(-self.omega).inverse())
    }

    /// Max deviation of coordinates from the identity's action over a
    /// fixed probe set; cheap "is this the identity" measure for tests
    /// and relator checks.
    pub fn deviation_from_identity(self, probes: &[NilPoint]) -> f64 {
        probes
            .iter()
            .map(|&p| self.apply(p).coord_distance(p))
            .fold(0.0, f64::max)
    }
}
