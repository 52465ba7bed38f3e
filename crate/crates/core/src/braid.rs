//! The braid group on three strands and the autoequivalence groups built
//! from it.
//!
//! A braid is stored as its image in `SL(2, Z)` together with its exponent
//! sum. The kernel of `Br3 -> SL(2, Z)` is generated by `tau^2`, where
//! `tau = (s1 s2)^3` is central with exponent sum 6; the exponent sum is
//! injective on that kernel, so the pair is a faithful representation and
//! equality of braids is equality of pairs.
//!
//! Convention: the generator `s_i` acts on the category as the *inverse*
//! spherical twist `Tw_{S_i}^{-1}`. With this choice the centre `tau`
//! corresponds to the shift `[3n - 4]`, and the Serre-type functors are
//!
//! * `Sigma   = Tw1 Tw2 [n-1]      = (s1 s2)^-1 [n-1]`
//! * `Upsilon = Tw2 Tw1 Tw2 [2n-3] = (s2 s1 s2)^-1 [2n-3]`
//! * `Sigma*  = Tw2 Tw1 [1]        = (s2 s1)^-1 [1]` (only used at n = 2).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{parity_sign, shift_kmatrix, twist_kmatrix, Direction, Mat2};
use crate::level::Level;

/// One letter of a braid word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    S1,
    S1Inv,
    S2,
    S2Inv,
}

impl Letter {
    pub fn inverse(self) -> Letter {
        match self {
            Letter::S1 => Letter::S1Inv,
            Letter::S1Inv => Letter::S1,
            Letter::S2 => Letter::S2Inv,
            Letter::S2Inv => Letter::S2,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::S1 => 'a',
            Letter::S1Inv => 'A',
            Letter::S2 => 'b',
            Letter::S2Inv => 'B',
        }
    }

    fn matrix(self) -> Mat2 {
        match self {
            Letter::S1 => Mat2::new(1, 1, 0, 1),
            Letter::S1Inv => Mat2::new(1, -1, 0, 1),
            Letter::S2 => Mat2::new(1, 0, -1, 1),
            Letter::S2Inv => Mat2::new(1, 0, 1, 1),
        }
    }

    fn exponent(self) -> i64 {
        match self {
            Letter::S1 | Letter::S2 => 1,
            Letter::S1Inv | Letter::S2Inv => -1,
        }
    }
}

/// A free-form word in `s1^{+-1}, s2^{+-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BraidWord {
    pub letters: Vec<Letter>,
}

impl BraidWord {
    pub fn new(letters: Vec<Letter>) -> Self {
        BraidWord { letters }
    }

    pub fn inverse(&self) -> BraidWord {
        BraidWord::new(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, other: &BraidWord) -> BraidWord {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        BraidWord::new(letters)
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// Parses words over `a, A, b, B` with parentheses and integer powers,
/// e.g. `"((ab)^3)"` or `"a^-2 b"`. Whitespace is ignored.
impl FromStr for BraidWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let word = parse_seq(&chars, &mut pos, 0)?;
        if pos != chars.len() {
            return Err(Error::BraidParse(format!("unexpected '{}' at {}", chars[pos], pos)));
        }
        Ok(word)
    }
}

fn parse_seq(chars: &[char], pos: &mut usize, depth: usize) -> Result<BraidWord> {
    let mut out = Vec::new();
    while *pos < chars.len() {
        let item = match chars[*pos] {
            'a' | 'A' | 'b' | 'B' => {
                let l = match chars[*pos] {
                    'a' => Letter::S1,
                    'A' => Letter::S1Inv,
                    'b' => Letter::S2,
                    _ => Letter::S2Inv,
                };
                *pos += 1;
                BraidWord::new(vec![l])
            }
            '(' => {
                *pos += 1;
                let inner = parse_seq(chars, pos, depth + 1)?;
                if *pos >= chars.len() || chars[*pos] != ')' {
                    return Err(Error::BraidParse("unbalanced '('".into()));
                }
                *pos += 1;
                inner
            }
            ')' if depth > 0 => break,
            c => return Err(Error::BraidParse(format!("unexpected '{c}' at {}", *pos))),
        };
        let item = if *pos < chars.len() && chars[*pos] == '^' {
            *pos += 1;
            let start = *pos;
            if *pos < chars.len() && (chars[*pos] == '-' || chars[*pos] == '+') {
                *pos += 1;
            }
            while *pos < chars.len() && chars[*pos].is_ascii_digit() {
                *pos += 1;
            }
            let text: String = chars[start..*pos].iter().collect();
            let e: i64 = text
                .parse()
                .map_err(|_| Error::BraidParse(format!("bad exponent '{text}'")))?;
            if e.unsigned_abs() > 10_000 {
                return Err(Error::BraidParse(format!("exponent {e} too large")));
            }
            let base = if e < 0 { item.inverse() } else { item };
            let mut rep = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
            for _ in 0..e.unsigned_abs() {
                rep.extend_from_slice(&base.letters);
            }
            BraidWord::new(rep)
        } else {
            item
        };
        out.extend(item.letters);
    }
    Ok(BraidWord::new(out))
}

/// A braid as `(image in SL(2, Z), exponent sum)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BraidElement {
    pub sl2: Mat2,
    pub expsum: i64,
}

/// `(s1 s2)^3`.
pub const TAU: BraidElement = BraidElement {
    sl2: Mat2([[-1, 0], [0, -1]]),
    expsum: 6,
};

impl BraidElement {
    pub const IDENTITY: BraidElement = BraidElement {
        sl2: Mat2::IDENTITY,
        expsum: 0,
    };

    /// Checked constructor: `sl2` must have determinant 1 and `expsum` must be
    /// congruent mod 12 to the exponent sum of any word representing `sl2`.
    pub fn new(sl2: Mat2, expsum: i64) -> Result<Self> {
        let b = BraidElement { sl2, expsum };
        b.to_word().map(|_| b)
    }

    pub fn compose(&self, other: &BraidElement) -> BraidElement {
        BraidElement {
            sl2: self.sl2 * other.sl2,
            expsum: self.expsum + other.expsum,
        }
    }

    pub fn inverse(&self) -> BraidElement {
        BraidElement {
            sl2: self.sl2.inverse().expect("det 1"),
            expsum: -self.expsum,
        }
    }

    pub fn pow(&self, e: i64) -> BraidElement {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut acc = BraidElement::IDENTITY;
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base);
        }
        acc
    }

    /// A word representing this braid.
    pub fn to_word(&self) -> Result<BraidWord> {
        if self.sl2.det() != 1 {
            return Err(Error::InvalidBraid(format!("det {} != 1", self.sl2.det())));
        }
        let mut m = self.sl2.0;
        // Letters g_1, g_2, ... applied on the left: g_k ... g_1 M = U.
        let mut applied: Vec<Letter> = Vec::new();
        let push_pow = |applied: &mut Vec<Letter>, l: Letter, q: i64| {
            let l = if q < 0 { l.inverse() } else { l };
            for _ in 0..q.unsigned_abs() {
                applied.push(l);
            }
        };
        while m[1][0] != 0 {
            let (a, c) = (m[0][0], m[1][0]);
            if a == 0 {
                // s1: row1 += row2
                m[0][0] += m[1][0];
                m[0][1] += m[1][1];
                applied.push(Letter::S1);
            } else if a.abs() > c.abs() {
                let q = a / c;
                // s1^{-q}: row1 -= q row2
                m[0][0] -= q * m[1][0];
                m[0][1] -= q * m[1][1];
                push_pow(&mut applied, Letter::S1, -q);
            } else {
                let q = c / a;
                // s2^{q}: row2 -= q row1
                m[1][0] -= q * m[0][0];
                m[1][1] -= q * m[0][1];
                push_pow(&mut applied, Letter::S2, q);
            }
        }
        let mut letters: Vec<Letter> = applied.iter().map(|l| l.inverse()).collect();
        let (a, b) = (m[0][0], m[0][1]);
        if a == -1 {
            // -I = (s1 s2 s1)^2
            letters.extend_from_slice(&[Letter::S1, Letter::S2, Letter::S1, Letter::S1, Letter::S2, Letter::S1]);
            push_pow(&mut letters, Letter::S1, -b);
        } else {
            push_pow(&mut letters, Letter::S1, b);
        }
        let mut word = BraidWord::new(letters);
        let diff = self.expsum - braid_eval(&word).expsum;
        if diff.rem_euclid(12) != 0 {
            return Err(Error::InvalidBraid(format!(
                "exponent sum {} is inconsistent with matrix {}",
                self.expsum, self.sl2
            )));
        }
        let tau2 = [Letter::S1, Letter::S2].repeat(6);
        let tau2 = BraidWord::new(tau2);
        let k = diff / 12;
        let block = if k < 0 { tau2.inverse() } else { tau2 };
        for _ in 0..k.unsigned_abs() {
            word = word.concat(&block);
        }
        Ok(word)
    }
}

/// Evaluates a word left to right.
pub fn braid_eval(w: &BraidWord) -> BraidElement {
    w.letters.iter().fold(BraidElement::IDENTITY, |acc, l| BraidElement {
        sl2: acc.sl2 * l.matrix(),
        expsum: acc.expsum + l.exponent(),
    })
}

/// Action on `K_0` of a braid, with `s_i` acting as `Tw_{S_i}^{-1}`.
fn braid_kaction(n: Level, b: &BraidElement) -> Result<Mat2> {
    let t1 = twist_kmatrix(n, 1, Direction::Inverse)?.entries;
    let t2 = twist_kmatrix(n, 2, Direction::Inverse)?.entries;
    let t1i = twist_kmatrix(n, 1, Direction::Forward)?.entries;
    let t2i = twist_kmatrix(n, 2, Direction::Forward)?.entries;
    // tau^2 acts trivially on K_0 since (T1 T2)^3 = +-1, so any word works.
    let w = b.to_word()?;
    Ok(w.letters.iter().fold(Mat2::IDENTITY, |acc, l| {
        acc * match l {
            Letter::S1 => t1,
            Letter::S1Inv => t1i,
            Letter::S2 => t2,
            Letter::S2Inv => t2i,
        }
    }))
}

/// A reachable autoequivalence at finite level: an element of
/// `(Br3 x Z) / <(tau, -(3n-4))>`, kept in canonical form with the exponent
/// sum in `[0, 6)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AutEq {
    pub sl2: Mat2,
    pub expsum: i64,
    pub shift: i64,
    pub n: Level,
}

impl AutEq {
    pub fn braid(&self) -> BraidElement {
        BraidElement {
            sl2: self.sl2,
            expsum: self.expsum,
        }
    }

    pub fn identity(n: Level) -> Result<Self> {
        auteq_make(n, BraidElement::IDENTITY, 0)
    }

    pub fn shift_by(n: Level, k: i64) -> Result<Self> {
        auteq_make(n, BraidElement::IDENTITY, k)
    }

    pub fn from_word(n: Level, w: &str, shift: i64) -> Result<Self> {
        auteq_make(n, braid_eval(&w.parse()?), shift)
    }

    /// `Tw_{S_i}`.
    pub fn twist(n: Level, i: usize) -> Result<Self> {
        match i {
            1 => Self::from_word(n, "A", 0),
            2 => Self::from_word(n, "B", 0),
            _ => Err(Error::InvalidSimple(i)),
        }
    }

    /// `Sigma = Tw1 Tw2 [n-1]`.
    pub fn sigma(n: Level) -> Result<Self> {
        Self::from_word(n, "AB", n.get()? - 1)
    }

    /// `Upsilon = Tw2 Tw1 Tw2 [2n-3]`.
    pub fn upsilon(n: Level) -> Result<Self> {
        Self::from_word(n, "BAB", 2 * n.get()? - 3)
    }

    /// `Sigma* = Tw2 Tw1 [1]`.
    pub fn sigma_star(n: Level) -> Result<Self> {
        Self::from_word(n, "BA", 1)
    }

    /// The central braid `tau` with no extra shift.
    pub fn tau(n: Level) -> Result<Self> {
        auteq_make(n, TAU, 0)
    }

    pub fn compose(&self, other: &AutEq) -> Result<AutEq> {
        auteq_compose(self, other)
    }

    pub fn inverse(&self) -> AutEq {
        auteq_inverse(self)
    }

    pub fn pow(&self, e: i64) -> AutEq {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut acc = AutEq::identity(self.n).expect("finite level");
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base).expect("same level");
        }
        acc
    }

    /// `Some(k)` if this is the shift functor `[k]`.
    pub fn as_shift(&self) -> Option<i64> {
        (self.sl2 == Mat2::IDENTITY && self.expsum == 0).then_some(self.shift)
    }

    pub fn kaction(&self) -> Mat2 {
        kaction(self)
    }

    pub fn psl2(&self) -> Psl2 {
        psl2_quotient(self)
    }
}

impl fmt::Display for AutEq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, e={}, [{}])", self.sl2, self.expsum, self.shift)
    }
}

pub fn auteq_make(n: Level, braid: BraidElement, shift: i64) -> Result<AutEq> {
    let tau_shift = n.tau_shift()?;
    let j = braid.expsum.div_euclid(6);
    Ok(AutEq {
        sl2: braid.sl2.scale(parity_sign(j)),
        expsum: braid.expsum - 6 * j,
        shift: shift + j * tau_shift,
        n,
    })
}

pub fn auteq_compose(x: &AutEq, y: &AutEq) -> Result<AutEq> {
    x.n.check_same(y.n)?;
    auteq_make(x.n, x.braid().compose(&y.braid()), x.shift + y.shift)
}

pub fn auteq_inverse(x: &AutEq) -> AutEq {
    auteq_make(x.n, x.braid().inverse(), -x.shift).expect("finite level")
}

/// An element of `PSL(2, Z)`: a matrix up to sign, normalized so that its
/// first nonzero entry is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Psl2(pub Mat2);

impl Psl2 {
    pub const IDENTITY: Psl2 = Psl2(Mat2::IDENTITY);

    pub fn from_matrix(m: Mat2) -> Psl2 {
        let flat = [m.0[0][0], m.0[0][1], m.0[1][0], m.0[1][1]];
        let first = flat.iter().copied().find(|&v| v != 0).unwrap_or(1);
        Psl2(if first < 0 { -m } else { m })
    }

    pub fn compose(&self, o: &Psl2) -> Psl2 {
        Psl2::from_matrix(self.0 * o.0)
    }

    pub fn inverse(&self) -> Psl2 {
        Psl2::from_matrix(self.0.inverse().expect("det 1"))
    }

    /// Order in `PSL(2, Z)`; `None` for elements of infinite order.
    pub fn order(&self) -> Option<u32> {
        let mut acc = *self;
        for k in 1..=6 {
            if acc == Psl2::IDENTITY {
                return Some(k);
            }
            acc = acc.compose(self);
        }
        None
    }
}

pub fn psl2_quotient(x: &AutEq) -> Psl2 {
    Psl2::from_matrix(x.sl2)
}

/// Action on `K_0`.
pub fn kaction(x: &AutEq) -> Mat2 {
    braid_kaction(x.n, &x.braid()).expect("canonical braids are valid") * shift_kmatrix(x.shift)
}

/// An autoequivalence of the ordinary derived category: `Sigma^k`, with
/// `Sigma^3 = [1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AutEqInfty {
    pub sigma_power: i64,
}

impl AutEqInfty {
    pub const IDENTITY: AutEqInfty = AutEqInfty { sigma_power: 0 };
    pub const SIGMA: AutEqInfty = AutEqInfty { sigma_power: 1 };

    pub fn shift_by(k: i64) -> Self {
        AutEqInfty { sigma_power: 3 * k }
    }

    pub fn compose(&self, o: &AutEqInfty) -> AutEqInfty {
        AutEqInfty {
            sigma_power: self.sigma_power + o.sigma_power,
        }
    }

    pub fn inverse(&self) -> AutEqInfty {
        AutEqInfty {
            sigma_power: -self.sigma_power,
        }
    }

    /// `Sigma^k = Sigma^r [q]` with `k = 3q + r`, `r in {0, 1, 2}`.
    pub fn split_shift(&self) -> (i64, i64) {
        (self.sigma_power.rem_euclid(3), self.sigma_power.div_euclid(3))
    }

    pub fn as_shift(&self) -> Option<i64> {
        let (r, q) = self.split_shift();
        (r == 0).then_some(q)
    }

    /// `Sigma` sends `[S1] -> -[S2]` and `[S2] -> [E]`.
    pub fn kaction(&self) -> Mat2 {
        let (r, q) = self.split_shift();
        Mat2::new(0, 1, -1, 1).pow(r as u32) * shift_kmatrix(q)
    }
}

/// Coset of an autoequivalence modulo shifts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProjectiveClass {
    Psl2(Psl2),
    SigmaMod3(u8),
}

/// An autoequivalence at any level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Transporter {
    Finite(AutEq),
    Infinite(AutEqInfty),
}

impl Transporter {
    pub fn level(&self) -> Level {
        match self {
            Transporter::Finite(a) => a.n,
            Transporter::Infinite(_) => Level::Infinite,
        }
    }

    pub fn identity(n: Level) -> Self {
        match n {
            Level::Finite(_) => Transporter::Finite(AutEq::identity(n).expect("finite")),
            Level::Infinite => Transporter::Infinite(AutEqInfty::IDENTITY),
        }
    }

    pub fn shift_by(n: Level, k: i64) -> Self {
        match n {
            Level::Finite(_) => Transporter::Finite(AutEq::shift_by(n, k).expect("finite")),
            Level::Infinite => Transporter::Infinite(AutEqInfty::shift_by(k)),
        }
    }

    pub fn sigma(n: Level) -> Self {
        match n {
            Level::Finite(_) => Transporter::Finite(AutEq::sigma(n).expect("finite")),
            Level::Infinite => Transporter::Infinite(AutEqInfty::SIGMA),
        }
    }

    pub fn upsilon(n: Level) -> Result<Self> {
        Ok(Transporter::Finite(AutEq::upsilon(n)?))
    }

    pub fn sigma_star(n: Level) -> Result<Self> {
        Ok(Transporter::Finite(AutEq::sigma_star(n)?))
    }

    pub fn compose(&self, o: &Transporter) -> Result<Transporter> {
        match (self, o) {
            (Transporter::Finite(a), Transporter::Finite(b)) => Ok(Transporter::Finite(a.compose(b)?)),
            (Transporter::Infinite(a), Transporter::Infinite(b)) => Ok(Transporter::Infinite(a.compose(b))),
            _ => Err(Error::LevelMismatch(self.level().to_string(), o.level().to_string())),
        }
    }

    pub fn inverse(&self) -> Transporter {
        match self {
            Transporter::Finite(a) => Transporter::Finite(a.inverse()),
            Transporter::Infinite(a) => Transporter::Infinite(a.inverse()),
        }
    }

    pub fn pow(&self, e: i64) -> Transporter {
        let base = if e < 0 { self.inverse() } else { *self };
        let mut acc = Transporter::identity(self.level());
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&base).expect("same level");
        }
        acc
    }

    pub fn kaction(&self) -> Mat2 {
        match self {
            Transporter::Finite(a) => a.kaction(),
            Transporter::Infinite(a) => a.kaction(),
        }
    }

    pub fn as_shift(&self) -> Option<i64> {
        match self {
            Transporter::Finite(a) => a.as_shift(),
            Transporter::Infinite(a) => a.as_shift(),
        }
    }

    pub fn projective_class(&self) -> ProjectiveClass {
        match self {
            Transporter::Finite(a) => ProjectiveClass::Psl2(a.psl2()),
            Transporter::Infinite(a) => ProjectiveClass::SigmaMod3(a.split_shift().0 as u8),
        }
    }
}

impl fmt::Display for Transporter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transporter::Finite(a) => write!(f, "{a}"),
            Transporter::Infinite(a) => write!(f, "Sigma^{}", a.sigma_power),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::KClass;

    fn lv(n: u32) -> Level {
        Level::Finite(n)
    }

    fn ev(s: &str) -> BraidElement {
        braid_eval(&s.parse().unwrap())
    }

    #[test]
    fn parse_words() {
        assert_eq!("aBA".parse::<BraidWord>().unwrap().to_string(), "aBA");
        assert_eq!("((ab)^3)".parse::<BraidWord>().unwrap().to_string(), "ababab");
        assert_eq!("(ab)^-2".parse::<BraidWord>().unwrap().to_string(), "BABA");
        assert_eq!("a b".parse::<BraidWord>().unwrap().to_string(), "ab");
        assert!("".parse::<BraidWord>().unwrap().is_empty());
        assert!("ac".parse::<BraidWord>().is_err());
        assert!("(ab".parse::<BraidWord>().is_err());
        assert!("ab)".parse::<BraidWord>().is_err());
        assert!("a^x".parse::<BraidWord>().is_err());
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ev("aba"), ev("bab"));
        assert_eq!(ev("ababab"), TAU);
        assert_eq!(ev(""), BraidElement::IDENTITY);
        assert_eq!(ev("aA"), BraidElement::IDENTITY);
    }

    #[test]
    fn words_roundtrip_through_decomposition() {
        for w in ["", "a", "B", "abAB", "aaabBBa", "ababab", "BABABA", "aaaaaaaaabbbb", "(ab)^12", "(ab)^-7a"] {
            let b = ev(w);
            let back = braid_eval(&b.to_word().unwrap());
            assert_eq!(back, b, "{w}");
        }
        assert!(BraidElement::new(Mat2::IDENTITY, 1).is_err());
        assert!(BraidElement::new(Mat2::IDENTITY, 12).is_ok());
        assert!(BraidElement::new(Mat2::new(2, 0, 0, 1), 0).is_err());
    }

    #[test]
    fn tau_is_the_3n_minus_4_shift() {
        let n = lv(3);
        let tau = AutEq::tau(n).unwrap();
        assert_eq!(tau, AutEq::shift_by(n, 5).unwrap());
        for n in 2..=8 {
            let n = lv(n);
            let tau = AutEq::tau(n).unwrap();
            assert_eq!(tau.inverse().as_shift(), Some(-(n.tau_shift().unwrap())));
        }
    }

    #[test]
    fn serre_and_upsilon_relations() {
        for n in 2..=8 {
            let n = lv(n);
            let s = AutEq::sigma(n).unwrap();
            let u = AutEq::upsilon(n).unwrap();
            assert_eq!(s.pow(3).as_shift(), Some(1));
            assert_eq!(u.pow(2).as_shift(), Some(n.get().unwrap() - 2));
            assert_eq!(s.compose(&s.pow(2)).unwrap(), AutEq::shift_by(n, 1).unwrap());
        }
    }

    #[test]
    fn projective_orders() {
        let n = lv(5);
        assert_eq!(AutEq::sigma(n).unwrap().psl2().order(), Some(3));
        assert_eq!(AutEq::upsilon(n).unwrap().psl2().order(), Some(2));
        assert_eq!(AutEq::identity(n).unwrap().psl2().order(), Some(1));
        assert_eq!(AutEq::twist(n, 1).unwrap().psl2().order(), None);
    }

    #[test]
    fn kaction_examples() {
        let n = lv(3);
        assert_eq!(AutEq::sigma(n).unwrap().kaction(), Mat2::new(0, 1, -1, 1));
        assert_eq!(AutEq::shift_by(n, 1).unwrap().kaction(), -Mat2::IDENTITY);
        for n in 2..=8 {
            let n = lv(n);
            assert_eq!(
                AutEq::tau(n).unwrap().kaction(),
                AutEq::shift_by(n, n.tau_shift().unwrap()).unwrap().kaction()
            );
            let s = AutEq::sigma(n).unwrap().kaction();
            assert_eq!(s.apply(KClass::S1), KClass::new(0, -1));
            assert_eq!(s.apply(KClass::S2), KClass::E);
            let t1 = twist_kmatrix(n, 1, Direction::Forward).unwrap().entries;
            assert_eq!(AutEq::twist(n, 1).unwrap().kaction(), t1);
        }
    }

    #[test]
    fn mismatched_levels() {
        let a = AutEq::identity(lv(3)).unwrap();
        let b = AutEq::identity(lv(4)).unwrap();
        assert!(matches!(a.compose(&b), Err(Error::LevelMismatch(..))));
        assert!(AutEq::identity(Level::Infinite).is_err());
    }

    #[test]
    fn infinite_level_group() {
        let s = AutEqInfty::SIGMA;
        assert_eq!(s.compose(&s).compose(&s), AutEqInfty::shift_by(1));
        assert_eq!(AutEqInfty::shift_by(1).kaction(), -Mat2::IDENTITY);
        assert_eq!(s.kaction().pow(3), -Mat2::IDENTITY);
        assert_eq!(s.inverse().kaction() * s.kaction(), Mat2::IDENTITY);
    }

    #[test]
    fn auteq_json_shape() {
        let v = serde_json::to_value(AutEq::sigma(lv(3)).unwrap()).unwrap();
        for key in ["sl2", "expsum", "shift", "n"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
