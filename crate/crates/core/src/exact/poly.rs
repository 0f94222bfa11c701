//! Noncommutative polynomials in the four ±1-valued observables `A0, A1, B0, B1`.
//!
//! The algebra is generated by the letters subject to `X² = 1` for every
//! letter and `[A_x, B_y] = 0` across parties. Letters of the same party do not
//! commute. Every monomial is kept in normal form: the Alice word precedes the
//! Bob word and neither word contains two equal adjacent letters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exact::QSqrt2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    A0,
    A1,
    B0,
    B1,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Letter {
    pub const ALL: [Letter; 4] = [Letter::A0, Letter::A1, Letter::B0, Letter::B1];

    pub fn party(self) -> Party {
        match self {
            Letter::A0 | Letter::A1 => Party::Alice,
            Letter::B0 | Letter::B1 => Party::Bob,
        }
    }

    /// Alice's observable `A_x`.
    pub fn alice(x: usize) -> Letter {
        [Letter::A0, Letter::A1][x]
    }

    /// Bob's observable `B_y`.
    pub fn bob(y: usize) -> Letter {
        [Letter::B0, Letter::B1][y]
    }

    /// Measurement setting (0 or 1) within the party.
    pub fn setting(self) -> usize {
        match self {
            Letter::A0 | Letter::B0 => 0,
            Letter::A1 | Letter::B1 => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Letter::A0 => "A0",
            Letter::A1 => "A1",
            Letter::B0 => "B0",
            Letter::B1 => "B1",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A normal-form word: Alice letters followed by Bob letters.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    alice: Vec<Letter>,
    bob: Vec<Letter>,
}

fn push_reduced(word: &mut Vec<Letter>, l: Letter) {
    if word.last() == Some(&l) {
        word.pop();
    } else {
        word.push(l);
    }
}

impl Monomial {
    pub fn unit() -> Self {
        Self::default()
    }

    /// Normal form of the product of `letters` taken in order.
    pub fn from_letters<I: IntoIterator<Item = Letter>>(letters: I) -> Self {
        let mut m = Monomial::unit();
        for l in letters {
            m.push(l);
        }
        m
    }

    fn push(&mut self, l: Letter) {
        match l.party() {
            Party::Alice => push_reduced(&mut self.alice, l),
            Party::Bob => push_reduced(&mut self.bob, l),
        }
    }

    pub fn letter(l: Letter) -> Self {
        Self::from_letters([l])
    }

    pub fn alice_word(&self) -> &[Letter] {
        &self.alice
    }

    pub fn bob_word(&self) -> &[Letter] {
        &self.bob
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        self.alice.iter().chain(self.bob.iter()).copied()
    }

    pub fn degree(&self) -> usize {
        self.alice.len() + self.bob.len()
    }

    pub fn is_unit(&self) -> bool {
        self.degree() == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut m = self.clone();
        for &l in &other.alice {
            push_reduced(&mut m.alice, l);
        }
        for &l in &other.bob {
            push_reduced(&mut m.bob, l);
        }
        m
    }

    /// Word reversal within each party; the letters are hermitian.
    pub fn adjoint(&self) -> Monomial {
        Monomial {
            alice: self.alice.iter().rev().copied().collect(),
            bob: self.bob.iter().rev().copied().collect(),
        }
    }

    /// The smaller of the monomial and its adjoint; real moments identify them.
    pub fn hermitian_class(&self) -> Monomial {
        let adj = self.adjoint();
        if adj < *self {
            adj
        } else {
            self.clone()
        }
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.letters().cmp(other.letters()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        for l in self.letters() {
            f.write_str(l.name())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Monomial {
    type Err = Error;

    /// Parses a concatenation such as `A0B1A1`; `1` is the unit.
    fn from_str(s: &str) -> Result<Self> {
        if s == "1" {
            return Ok(Monomial::unit());
        }
        let bytes = s.as_bytes();
        if s.is_empty() || bytes.len() % 2 != 0 {
            return Err(Error::Parse(format!("invalid word `{s}`")));
        }
        let mut letters = Vec::with_capacity(bytes.len() / 2);
        for pair in bytes.chunks(2) {
            let l = match pair {
                b"A0" => Letter::A0,
                b"A1" => Letter::A1,
                b"B0" => Letter::B0,
                b"B1" => Letter::B1,
                _ => return Err(Error::Parse(format!("invalid word `{s}`"))),
            };
            letters.push(l);
        }
        Ok(Monomial::from_letters(letters))
    }
}

/// Signed letter relabeling `l ↦ ±l'` extended to an algebra homomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LetterMap {
    images: [(bool, Letter); 4],
}

impl LetterMap {
    /// `images[i]` is the image of `Letter::ALL[i]` as (negated, letter).
    /// Alice letters must map into one party and Bob letters into the other,
    /// otherwise the commutation relations are not preserved.
    pub fn new(images: [(bool, Letter); 4]) -> Result<Self> {
        let party = |i: usize| images[i].1.party();
        if party(0) != party(1) || party(2) != party(3) || party(0) == party(2) {
            return Err(Error::InvalidSubstitution(
                "each party must map onto a single, distinct party".into(),
            ));
        }
        if images[0].1 == images[1].1 || images[2].1 == images[3].1 {
            return Err(Error::InvalidSubstitution("map is not a bijection".into()));
        }
        Ok(LetterMap { images })
    }

    pub fn identity() -> Self {
        LetterMap {
            images: Letter::ALL.map(|l| (false, l)),
        }
    }

    /// `A0 → −B1, A1 → −B0, B0 → −A0, B1 → A1`.
    pub fn tsirelson_symmetry() -> Self {
        LetterMap {
            images: [
                (true, Letter::B1),
                (true, Letter::B0),
                (true, Letter::A0),
                (false, Letter::A1),
            ],
        }
    }

    pub fn image(&self, l: Letter) -> (bool, Letter) {
        self.images[l.index()]
    }

    /// Composition `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &LetterMap) -> LetterMap {
        let images = Letter::ALL.map(|l| {
            let (n1, l1) = other.image(l);
            let (n2, l2) = self.image(l1);
            (n1 ^ n2, l2)
        });
        LetterMap { images }
    }

    /// Image of a monomial as (negated, monomial).
    pub fn apply_monomial(&self, m: &Monomial) -> (bool, Monomial) {
        let mut neg = false;
        let mut out = Monomial::unit();
        for l in m.letters() {
            let (n, img) = self.image(l);
            neg ^= n;
            out.push(img);
        }
        (neg, out)
    }
}

/// Finite linear combination of normal-form monomials with Q(√2) coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NCPolynomial {
    terms: BTreeMap<Monomial, QSqrt2>,
}

impl NCPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: QSqrt2) -> Self {
        Self::term(c, Monomial::unit())
    }

    pub fn one() -> Self {
        Self::constant(QSqrt2::one())
    }

    pub fn term(c: QSqrt2, m: Monomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    pub fn letter(l: Letter) -> Self {
        Self::term(QSqrt2::one(), Monomial::letter(l))
    }

    pub fn monomial(m: Monomial) -> Self {
        Self::term(QSqrt2::one(), m)
    }

    pub fn add_term(&mut self, m: Monomial, c: &QSqrt2) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                *v += c;
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> QSqrt2 {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &QSqrt2)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &QSqrt2) -> Self {
        let mut out = Self::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &(v * c));
        }
        out
    }

    pub fn mul(&self, other: &NCPolynomial) -> NCPolynomial {
        let mut out = Self::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), &(c1 * c2));
            }
        }
        out
    }

    pub fn adjoint(&self) -> NCPolynomial {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(), c);
        }
        out
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn substitute(&self, map: &LetterMap) -> NCPolynomial {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let (neg, img) = map.apply_monomial(m);
            let c = if neg { -c } else { c.clone() };
            out.add_term(img, &c);
        }
        out
    }

    /// Re-reduces every monomial; the identity on well-formed polynomials.
    pub fn normalized(&self) -> NCPolynomial {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            out.add_term(Monomial::from_letters(m.letters()), c);
        }
        out
    }
}

impl Add for &NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c);
        }
        out
    }
}

impl Add for NCPolynomial {
    type Output = NCPolynomial;
    fn add(self, rhs: NCPolynomial) -> NCPolynomial {
        &self + &rhs
    }
}

impl Sub for &NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: &NCPolynomial) -> NCPolynomial {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), &-c);
        }
        out
    }
}

impl Sub for NCPolynomial {
    type Output = NCPolynomial;
    fn sub(self, rhs: NCPolynomial) -> NCPolynomial {
        &self - &rhs
    }
}

impl Mul for &NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: &NCPolynomial) -> NCPolynomial {
        NCPolynomial::mul(self, rhs)
    }
}

impl Mul for NCPolynomial {
    type Output = NCPolynomial;
    fn mul(self, rhs: NCPolynomial) -> NCPolynomial {
        NCPolynomial::mul(&self, &rhs)
    }
}

impl Neg for NCPolynomial {
    type Output = NCPolynomial;
    fn neg(self) -> NCPolynomial {
        self.scale(&QSqrt2::from_int(-1))
    }
}

// Coefficients print as `p/q`, `r/t*s2`, or `(p/q±r/t*s2)` when both parts are
// present. Terms are separated by ` + ` / ` - `.
fn fmt_coefficient(c: &QSqrt2) -> (bool, String) {
    let p = c.rational_part();
    let q = c.surd_part();
    use num_traits::{Signed, Zero};
    if q.is_zero() {
        (p.is_negative(), format!("{}/{}", p.numer().abs(), p.denom()))
    } else if p.is_zero() {
        (q.is_negative(), format!("{}/{}*s2", q.numer().abs(), q.denom()))
    } else {
        (false, format!("({c})"))
    }
}

impl fmt::Display for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let (neg, body) = fmt_coefficient(c);
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            f.write_str(&body)?;
            if !m.is_unit() {
                write!(f, "*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for NCPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn parse_term(t: &str) -> Result<(QSqrt2, Monomial)> {
    let bad = || Error::Parse(format!("invalid polynomial term `{t}`"));
    if t.is_empty() {
        return Err(bad());
    }
    let (mut coef, rest) = if let Some(inner) = t.strip_prefix('(') {
        let close = inner.find(')').ok_or_else(bad)?;
        let c: QSqrt2 = inner[..close].parse()?;
        let rest = &inner[close + 1..];
        let rest = if rest.is_empty() {
            rest
        } else {
            rest.strip_prefix('*').ok_or_else(bad)?
        };
        (c, rest)
    } else {
        (QSqrt2::one(), t)
    };
    let mut word = Monomial::unit();
    let mut seen_word = false;
    if !rest.is_empty() {
        for piece in rest.split('*') {
            if seen_word {
                return Err(bad());
            }
            if piece == "s2" {
                coef = coef * QSqrt2::sqrt2();
            } else if piece.starts_with('A') || piece.starts_with('B') {
                word = piece.parse()?;
                seen_word = true;
            } else {
                coef = coef * piece.parse::<QSqrt2>().map_err(|_| bad())?;
            }
        }
    }
    Ok((coef, word))
}

impl FromStr for NCPolynomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s: String = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| if c == '−' { '-' } else { c })
            .collect();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut out = Self::zero();
        let mut depth = 0usize;
        let mut start = 0usize;
        let mut negative = false;
        let chars: Vec<char> = s.chars().collect();
        let mut pieces = Vec::new();
        for (i, &ch) in chars.iter().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth = depth.saturating_sub(1),
                '+' | '-' if depth == 0 => {
                    if i > start {
                        pieces.push((negative, chars[start..i].iter().collect::<String>()));
                    } else if i > 0 {
                        return Err(Error::Parse(format!("dangling sign in `{s}`")));
                    }
                    negative = ch == '-';
                    start = i + 1;
                }
                _ => {}
            }
        }
        pieces.push((negative, chars[start..].iter().collect::<String>()));
        for (neg, body) in pieces {
            let (c, m) = parse_term(&body)?;
            let c = if neg { -c } else { c };
            out.add_term(m, &c);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> NCPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn cross_party_products_reduce() {
        assert_eq!(p("A0B0") * p("A0B1"), p("B0B1"));
        assert_eq!(p("A0A1") * p("A1A0"), NCPolynomial::one());
        assert_eq!(p("A0 + A1") * p("A0 - A1"), p("A1A0 - A0A1"));
    }

    #[test]
    fn words_in_any_order_normalize() {
        assert_eq!(p("B1A0B0"), p("A0B1B0"));
        assert_eq!(p("A0A0B1"), p("B1"));
    }

    #[test]
    fn adjoint_reverses_each_party() {
        assert_eq!(p("A0B0B1").adjoint(), p("A0B1B0"));
        assert_eq!(p("A0A1").adjoint(), p("A1A0"));
        let c = p("(1/3+1/2*s2)");
        assert_eq!(c.adjoint(), c);
    }

    #[test]
    fn symmetry_substitution() {
        let s = LetterMap::tsirelson_symmetry();
        assert_eq!(p("A0B0").substitute(&s), p("A0B1"));
        let chsh = p("A0B0 + A1B0 + A0B1 - A1B1");
        assert_eq!(chsh.substitute(&s), chsh);
        let f = p("1/2*A0A1B1 - 3/1*s2*B0");
        assert_eq!(f.substitute(&LetterMap::identity()), f);
        let mut s8 = LetterMap::identity();
        for _ in 0..8 {
            s8 = s.compose(&s8);
        }
        assert_eq!(s8, LetterMap::identity());
    }

    #[test]
    fn invalid_maps_rejected() {
        let bad = LetterMap::new([
            (false, Letter::A0),
            (false, Letter::B0),
            (false, Letter::A1),
            (false, Letter::B1),
        ]);
        assert!(bad.is_err());
    }

    #[test]
    fn text_round_trip() {
        let f = p("1/1*A0B0B1 - 1/2*s2*B0");
        assert_eq!(f.to_string(), "-1/2*s2*B0 + 1/1*A0B0B1");
        assert_eq!(p(&f.to_string()), f);
        let g = p("(1/1-1/2*s2)*A0 + 2/3 - B1");
        assert_eq!(p(&g.to_string()), g);
        assert_eq!(g.coefficient(&Monomial::unit()), QSqrt2::from_ratio(2, 3));
        assert_eq!(NCPolynomial::zero().to_string(), "0");
        assert!("A2".parse::<NCPolynomial>().is_err());
        assert!("1/2*A0*B0".parse::<NCPolynomial>().is_err());
    }
}
