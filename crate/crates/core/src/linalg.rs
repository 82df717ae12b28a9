//! Small fixed-size linear algebra for toral maps.

use crate::error::{refused, Result};

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::sqrt(x * x + y * y)
}

/// Representative of `x` modulo 1 in `[0, 1)`.
#[inline]
pub fn wrap_unit(x: f64) -> f64 {
    let r = x - libm::floor(x);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Representative of `x` modulo 1 in `[-1/2, 1/2)`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    x - libm::floor(x + 0.5)
}

/// Quotient distance on `R/Z`.
#[inline]
pub fn circle_unit_dist(a: f64, b: f64) -> f64 {
    abs(wrap_centered(a - b))
}

/// Euclidean product metric on the flat torus `R²/Z²`.
#[inline]
pub fn torus_dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    hypot(circle_unit_dist(p[0], q[0]), circle_unit_dist(p[1], q[1]))
}

/// Integer 2×2 matrix acting on the torus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntMatrix2(pub [[i64; 2]; 2]);

impl IntMatrix2 {
    pub const IDENTITY: IntMatrix2 = IntMatrix2([[1, 0], [0, 1]]);

    pub fn det(&self) -> i64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, other: &IntMatrix2) -> IntMatrix2 {
        let a = &self.0;
        let b = &other.0;
        IntMatrix2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }

    /// Inverse over the integers; exists only for determinant ±1.
    pub fn inverse(&self) -> Option<IntMatrix2> {
        let d = self.det();
        if d != 1 && d != -1 {
            return None;
        }
        let m = &self.0;
        Some(IntMatrix2([[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]]))
    }

    pub fn is_unimodular(&self) -> bool {
        self.inverse().is_some()
    }

    pub fn apply_real(&self, p: [f64; 2]) -> [f64; 2] {
        let m = &self.0;
        [m[0][0] as f64 * p[0] + m[0][1] as f64 * p[1], m[1][0] as f64 * p[0] + m[1][1] as f64 * p[1]]
    }

    /// The induced toral map, result reduced into `[0,1)²`.
    pub fn apply_torus(&self, p: [f64; 2]) -> [f64; 2] {
        let q = self.apply_real(p);
        [wrap_unit(q[0]), wrap_unit(q[1])]
    }

    /// The induced map on the `m×m` grid `(Z/m)²`.
    pub fn apply_grid(&self, i: usize, j: usize, m: usize) -> (usize, usize) {
        let mm = m as i64;
        let a = &self.0;
        let (x, y) = (i as i64, j as i64);
        let u = (a[0][0] * x + a[0][1] * y).rem_euclid(mm);
        let v = (a[1][0] * x + a[1][1] * y).rem_euclid(mm);
        (u as usize, v as usize)
    }

    /// Spectral norm (largest singular value); the Lipschitz constant of the
    /// linear map.
    pub fn operator_norm(&self) -> f64 {
        let m = &self.0;
        let (a, b, c, d) = (m[0][0] as f64, m[0][1] as f64, m[1][0] as f64, m[1][1] as f64);
        let s = a * a + b * b + c * c + d * d;
        let det = a * d - b * c;
        let disc = sqrt((s * s - 4.0 * det * det).max(0.0));
        sqrt((s + disc) / 2.0)
    }

    pub fn commutes_with(&self, other: &IntMatrix2) -> bool {
        self.mul(other) == other.mul(self)
    }

    pub fn eigen(&self) -> Result<Eigen2> {
        Eigen2::of(self)
    }
}

/// Real eigen-decomposition `A = P diag(λ) P⁻¹` with unit eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigen2 {
    pub values: [f64; 2],
    /// Columns are the eigenvectors.
    pub vectors: [[f64; 2]; 2],
    pub inverse: [[f64; 2]; 2],
}

impl Eigen2 {
    pub fn of(m: &IntMatrix2) -> Result<Eigen2> {
        let [[a, b], [c, d]] = m.0;
        let (a, b, c, d) = (a as f64, b as f64, c as f64, d as f64);
        let tr = a + d;
        let det = a * d - b * c;
        let disc = tr * tr - 4.0 * det;
        if disc <= 0.0 {
            return Err(refused!("matrix has no pair of distinct real eigenvalues (discriminant {disc})"));
        }
        let root = sqrt(disc);
        // Order by decreasing modulus so index 0 is the most expanding direction.
        let mut values = [(tr + root) / 2.0, (tr - root) / 2.0];
        if abs(values[1]) > abs(values[0]) {
            values.swap(0, 1);
        }
        let mut cols = [[0.0; 2]; 2];
        for (k, &l) in values.iter().enumerate() {
            let v = if b != 0.0 {
                [b, l - a]
            } else if c != 0.0 {
                [l - d, c]
            } else if abs(l - a) < abs(l - d) {
                [1.0, 0.0]
            } else {
                [0.0, 1.0]
            };
            let n = hypot(v[0], v[1]);
            cols[k] = [v[0] / n, v[1] / n];
        }
        let vectors = [[cols[0][0], cols[1][0]], [cols[0][1], cols[1][1]]];
        let pd = vectors[0][0] * vectors[1][1] - vectors[0][1] * vectors[1][0];
        let inverse = [[vectors[1][1] / pd, -vectors[0][1] / pd], [-vectors[1][0] / pd, vectors[0][0] / pd]];
        Ok(Eigen2 { values, vectors, inverse })
    }

    pub fn to_eigen(&self, v: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.inverse, v)
    }

    pub fn from_eigen(&self, c: [f64; 2]) -> [f64; 2] {
        mat_vec(&self.vectors, c)
    }

    /// Spectral norms of `P` and `P⁻¹`.
    pub fn conditioning(&self) -> (f64, f64) {
        (real_operator_norm(&self.vectors), real_operator_norm(&self.inverse))
    }
}

pub(crate) fn mat_vec(m: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

pub(crate) fn real_operator_norm(m: &[[f64; 2]; 2]) -> f64 {
    let [[a, b], [c, d]] = *m;
    let s = a * a + b * b + c * c + d * d;
    let det = a * d - b * c;
    let disc = sqrt((s * s - 4.0 * det * det).max(0.0));
    sqrt((s + disc) / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAT: IntMatrix2 = IntMatrix2([[2, 1], [1, 1]]);

    #[test]
    fn cat_map_spectrum() {
        let e = CAT.eigen().unwrap();
        let golden = (3.0 + sqrt(5.0)) / 2.0;
        assert!((e.values[0] - golden).abs() < 1e-12);
        assert!((e.values[0] * e.values[1] - 1.0).abs() < 1e-12);
        let v = e.from_eigen([1.0, 0.0]);
        let av = CAT.apply_real(v);
        assert!((av[0] - golden * v[0]).abs() < 1e-12 && (av[1] - golden * v[1]).abs() < 1e-12);
        let back = e.to_eigen(e.from_eigen([0.3, -0.7]));
        assert!((back[0] - 0.3).abs() < 1e-12 && (back[1] + 0.7).abs() < 1e-12);
    }

    #[test]
    fn inverse_only_when_unimodular() {
        assert_eq!(CAT.inverse().unwrap().mul(&CAT), IntMatrix2::IDENTITY);
        assert!(IntMatrix2([[1, 3], [2, 4]]).inverse().is_none());
    }

    #[test]
    fn operator_norm_of_diagonal() {
        assert!((IntMatrix2([[3, 0], [0, -1]]).operator_norm() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_spectrum_refused() {
        assert!(IntMatrix2([[0, -1], [1, 0]]).eigen().is_err());
    }

    #[test]
    fn wrapping() {
        assert_eq!(wrap_unit(-0.25), 0.75);
        assert_eq!(wrap_centered(0.75), -0.25);
        assert!((torus_dist([0.0, 0.0], [0.5, 0.5]) - sqrt(0.5)).abs() < 1e-15);
    }
}
