//! Measurement directions and the ±1-valued spin observables `σ⃗·n̂`.

use std::f64::consts::{PI, TAU};
use std::ops::Neg;

use crate::error::{Error, Result};
use crate::linalg::{Complex, ComplexMatrix};
use serde::Serialize;

/// Input norms further than this from 1 are rejected; closer ones are
/// renormalized.
pub const NORM_TOL: f64 = 1e-9;
/// Default entrywise tolerance for [`commutes`].
pub const COMMUTATOR_TOL: f64 = 1e-10;

/// A direction in three dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct UnitVector3 {
    x: f64,
    y: f64,
    z: f64,
}

impl UnitVector3 {
    pub const X: Self = Self { x: 1.0, y: 0.0, z: 0.0 };
    pub const Y: Self = Self { x: 0.0, y: 1.0, z: 0.0 };
    pub const Z: Self = Self { x: 0.0, y: 0.0, z: 1.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotUnitVector { norm });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Normalizes any nonzero finite vector.
    pub fn normalize(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotUnitVector { norm });
        }
        Self::new(x / norm, y / norm, z / norm)
    }

    /// `(sinθ cosφ, sinθ sinφ, cosθ)` for arbitrary real angles.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self {
            x: st * cp,
            y: st * sp,
            z: ct,
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Neg for UnitVector3 {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }
}

/// Polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`, in radians.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PolarAngles {
    theta: f64,
    phi: f64,
}

impl PolarAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if (0.0..=PI).contains(&theta) && (0.0..TAU).contains(&phi) {
            Ok(Self { theta, phi })
        } else {
            Err(Error::AngleOutOfRange { theta, phi })
        }
    }

    /// Canonical angles of a direction; the azimuth is 0 at the poles.
    pub fn from_direction(n: &UnitVector3) -> Self {
        let theta = n.z.clamp(-1.0, 1.0).acos();
        let mut phi = if n.x == 0.0 && n.y == 0.0 {
            0.0
        } else {
            n.y.atan2(n.x)
        };
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Self { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

pub fn from_polar(a: PolarAngles) -> UnitVector3 {
    UnitVector3::from_angles(a.theta, a.phi)
}

/// `σ⃗·n̂` with eigenvalues ±1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpinObservable {
    direction: UnitVector3,
    matrix: ComplexMatrix,
}

impl SpinObservable {
    pub fn direction(&self) -> UnitVector3 {
        self.direction
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// `x σ_x + y σ_y + z σ_z = [[z, x - iy], [x + iy, -z]]`.
pub fn spin_observable(n: UnitVector3) -> SpinObservable {
    let matrix = ComplexMatrix::from_rows2([
        [Complex::new(n.z, 0.0), Complex::new(n.x, -n.y)],
        [Complex::new(n.x, n.y), Complex::new(-n.z, 0.0)],
    ]);
    SpinObservable {
        direction: n,
        matrix,
    }
}

/// Whether `‖ab - ba‖_max ≤ tol`.
pub fn commutes(a: &SpinObservable, b: &SpinObservable, tol: f64) -> bool {
    let ab = a.matrix.matmul(&b.matrix).expect("2x2");
    let ba = b.matrix.matmul(&a.matrix).expect("2x2");
    ab.max_abs_diff(&ba).expect("2x2") <= tol
}
