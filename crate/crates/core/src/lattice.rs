//! Exact K-theory of the A2 category at level `n`.
//!
//! `K_0` is identified with `Z^2` through the basis `([S1], [S2])`. All
//! matrices act on column vectors, so the `j`-th column of a matrix is the
//! image of the `j`-th basis vector. The Euler pairing is
//! `chi(x, y) = x^T M y` with `chi(A, B) = sum_i (-1)^i dim Hom^i(A, B)`,
//! contravariant in the first argument.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::level::Level;

/// An element of `K_0 = Z[S1] + Z[S2]`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct KClass {
    pub coeff_s1: i64,
    pub coeff_s2: i64,
}

impl KClass {
    pub const S1: KClass = KClass::new(1, 0);
    pub const S2: KClass = KClass::new(0, 1);
    /// `[E] = [S1] + [S2]`, from the extension `S2 -> E -> S1`.
    pub const E: KClass = KClass::new(1, 1);

    pub const fn new(coeff_s1: i64, coeff_s2: i64) -> Self {
        KClass { coeff_s1, coeff_s2 }
    }

    pub fn as_array(self) -> [i64; 2] {
        [self.coeff_s1, self.coeff_s2]
    }
}

impl Add for KClass {
    type Output = KClass;
    fn add(self, o: KClass) -> KClass {
        KClass::new(self.coeff_s1 + o.coeff_s1, self.coeff_s2 + o.coeff_s2)
    }
}

impl Sub for KClass {
    type Output = KClass;
    fn sub(self, o: KClass) -> KClass {
        KClass::new(self.coeff_s1 - o.coeff_s1, self.coeff_s2 - o.coeff_s2)
    }
}

impl Neg for KClass {
    type Output = KClass;
    fn neg(self) -> KClass {
        KClass::new(-self.coeff_s1, -self.coeff_s2)
    }
}

impl fmt::Display for KClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.coeff_s1, self.coeff_s2)
    }
}

/// A 2x2 integer matrix, serialized row-major as `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    pub const fn new(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn det(&self) -> i64 {
        let [[a, b], [c, d]] = self.0;
        a * d - b * c
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    /// Inverse of a unimodular matrix; `None` when `det != +-1`.
    pub fn inverse(&self) -> Option<Mat2> {
        let det = self.det();
        if det != 1 && det != -1 {
            return None;
        }
        let [[a, b], [c, d]] = self.0;
        Some(Mat2::new(d * det, -b * det, -c * det, a * det))
    }

    pub fn pow(&self, mut e: u32) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::IDENTITY;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    pub fn scale(&self, s: i64) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(s * a, s * b, s * c, s * d)
    }

    pub fn transpose(&self) -> Mat2 {
        let [[a, b], [c, d]] = self.0;
        Mat2::new(a, c, b, d)
    }

    pub fn apply(&self, v: KClass) -> KClass {
        let [[a, b], [c, d]] = self.0;
        KClass::new(a * v.coeff_s1 + b * v.coeff_s2, c * v.coeff_s1 + d * v.coeff_s2)
    }

    /// Characteristic polynomial `x^2 - tr x + det` as `(tr, det)`.
    pub fn char_poly(&self) -> (i64, i64) {
        (self.trace(), self.det())
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let a = self.0;
        let b = o.0;
        Mat2([
            [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
            [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
        ])
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-1)
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [[a, b], [c, d]] = self.0;
        write!(f, "[[{a}, {b}], [{c}, {d}]]")
    }
}

/// Matrix of the Euler pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerMatrix {
    pub entries: Mat2,
    pub n: Level,
}

impl EulerMatrix {
    pub fn pairing(&self, x: KClass, y: KClass) -> i64 {
        let m = self.entries.0;
        x.coeff_s1 * (m[0][0] * y.coeff_s1 + m[0][1] * y.coeff_s2)
            + x.coeff_s2 * (m[1][0] * y.coeff_s1 + m[1][1] * y.coeff_s2)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Inverse,
}

/// Matrix of `Tw_{S_i}` (or its inverse) acting on `K_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwistMatrix {
    pub entries: Mat2,
    pub generator: usize,
    pub direction: Direction,
}

fn sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn euler_form(n: Level) -> EulerMatrix {
    let entries = match n {
        Level::Finite(n) => {
            let n = n as i64;
            let diag = 1 + sign(n);
            Mat2::new(diag, -1, sign(n - 1), diag)
        }
        // No Serre-dual contribution: Hom*(S2, S1) = 0.
        Level::Infinite => Mat2::new(1, -1, 0, 1),
    };
    EulerMatrix { entries, n }
}

/// `euler_form` for a raw integer level, rejecting `n < 2`.
pub fn euler_form_checked(n: i64) -> Result<EulerMatrix> {
    Ok(euler_form(Level::finite(n)?))
}

/// `[X] -> [X] - chi(S_i, X) [S_i]`, or its inverse.
pub fn twist_kmatrix(n: Level, i: usize, direction: Direction) -> Result<TwistMatrix> {
    if !n.is_finite() {
        return Err(Error::InfiniteLevel);
    }
    if i != 1 && i != 2 {
        return Err(Error::InvalidSimple(i));
    }
    let chi = euler_form(n).entries.0;
    let row = i - 1;
    let mut m = Mat2::IDENTITY.0;
    for j in 0..2 {
        m[row][j] -= chi[row][j];
    }
    let forward = Mat2(m);
    let entries = match direction {
        Direction::Forward => forward,
        Direction::Inverse => forward.inverse().expect("twist matrices are unimodular"),
    };
    Ok(TwistMatrix {
        entries,
        generator: i,
        direction,
    })
}

/// Sign rule `[X[k]] = (-1)^k [X]`.
pub fn shift_kclass(k: i64, v: KClass) -> KClass {
    if sign(k) == 1 {
        v
    } else {
        -v
    }
}

/// `(-1)^k` as a matrix.
pub fn shift_kmatrix(k: i64) -> Mat2 {
    Mat2::IDENTITY.scale(sign(k))
}

pub(crate) fn parity_sign(k: i64) -> i64 {
    sign(k)
}

pub use crate::tilting::class_of;

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(n: u32) -> Level {
        Level::Finite(n)
    }

    #[test]
    fn euler_examples() {
        assert_eq!(euler_form(lv(4)).entries, Mat2::new(2, -1, -1, 2));
        assert_eq!(euler_form(lv(3)).entries, Mat2::new(0, -1, 1, 0));
        assert_eq!(euler_form(Level::Infinite).entries, Mat2::new(1, -1, 0, 1));
        assert!(euler_form_checked(1).is_err());
    }

    #[test]
    fn euler_pairing_convention() {
        let m = euler_form(lv(5));
        // one extension S1 -> S2[1]
        assert_eq!(m.pairing(KClass::S1, KClass::S2), -1);
        assert_eq!(m.pairing(KClass::S2, KClass::S1), 1);
        assert_eq!(m.pairing(KClass::S1, KClass::S1), 0);
    }

    #[test]
    fn twist_examples() {
        let t = twist_kmatrix(lv(3), 1, Direction::Forward).unwrap();
        assert_eq!(t.entries, Mat2::new(1, 1, 0, 1));
        let t = twist_kmatrix(lv(4), 1, Direction::Forward).unwrap();
        assert_eq!(t.entries, Mat2::new(-1, 1, 0, 1));
        for n in 2..9 {
            for i in 1..=2 {
                let f = twist_kmatrix(lv(n), i, Direction::Forward).unwrap().entries;
                let b = twist_kmatrix(lv(n), i, Direction::Inverse).unwrap().entries;
                assert_eq!(f * b, Mat2::IDENTITY);
                // det = -(-1)^n
                assert_eq!(f.det(), -sign(n as i64));
            }
        }
        assert_eq!(twist_kmatrix(Level::Infinite, 1, Direction::Forward), Err(Error::InfiniteLevel));
        assert_eq!(twist_kmatrix(lv(3), 3, Direction::Forward), Err(Error::InvalidSimple(3)));
    }

    #[test]
    fn braid_relation_and_center() {
        for n in 2..=8 {
            let t1 = twist_kmatrix(lv(n), 1, Direction::Forward).unwrap().entries;
            let t2 = twist_kmatrix(lv(n), 2, Direction::Forward).unwrap().entries;
            assert_eq!(t1 * t2 * t1, t2 * t1 * t2);
            assert_eq!((t1 * t2).pow(3), Mat2::IDENTITY.scale(sign(n as i64)));
        }
    }

    #[test]
    fn twists_preserve_pairing() {
        for n in 2..=7 {
            let chi = euler_form(lv(n));
            for i in 1..=2 {
                let t = twist_kmatrix(lv(n), i, Direction::Forward).unwrap().entries;
                for a in -3..=3 {
                    for b in -3..=3 {
                        for c in -3..=3 {
                            for d in -3..=3 {
                                let x = KClass::new(a, b);
                                let y = KClass::new(c, d);
                                assert_eq!(chi.pairing(t.apply(x), t.apply(y)), chi.pairing(x, y));
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn serre_functor_images() {
        for n in 2..=8 {
            let t1 = twist_kmatrix(lv(n), 1, Direction::Forward).unwrap().entries;
            let t2 = twist_kmatrix(lv(n), 2, Direction::Forward).unwrap().entries;
            let sigma = t1 * t2 * shift_kmatrix(n as i64 - 1);
            assert_eq!(sigma.apply(KClass::S1), KClass::new(0, -1));
            assert_eq!(sigma.apply(KClass::S2), KClass::E);
        }
    }

    #[test]
    fn shift_examples() {
        assert_eq!(shift_kclass(1, KClass::new(1, 0)), KClass::new(-1, 0));
        assert_eq!(shift_kclass(2, KClass::new(3, -2)), KClass::new(3, -2));
        assert_eq!(shift_kclass(-3, KClass::new(0, 1)), KClass::new(0, -1));
    }

    #[test]
    fn matrix_json_is_row_major() {
        let s = serde_json::to_string(&Mat2::new(1, 2, 3, 4)).unwrap();
        assert_eq!(s, "[[1,2],[3,4]]");
    }
}
