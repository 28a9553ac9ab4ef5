//! Sparse multivariate Laurent polynomials over [`Fq`] or [`W2`]
//! coefficients: the patch coordinate rings and their Witt-level lifts.
//!
//! A [`RingTag`] pins down the ring (coefficients, number of coordinates,
//! which coordinates are inverted); a [`Laurent`] stores a canonical term
//! map keyed by exponent vectors in graded-lexicographic order. Negative
//! exponents are admitted only on inverted coordinates, and zero
//! coefficients are never stored, so structural equality is ring equality
//! and rendering is bit-stable.
//!
//! Mixing tags in arithmetic is a programming error and panics; moving a
//! polynomial into a larger localization is explicit via
//! [`Laurent::extend_tag`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::arith::{CoeffRing, Fq, Level, W2};
use crate::Error;

/// Exponents are hard-bounded so Frobenius pullback (which multiplies them
/// by p) overflows loudly instead of wrapping.
pub const MAX_EXPONENT: i32 = 1 << 15;

/// Exponent vector with graded-lexicographic ordering.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Mono(Vec<i32>);

impl Mono {
    fn constant(nvars: usize) -> Mono {
        Mono(vec![0; nvars])
    }

    fn total_degree(&self) -> i64 {
        self.0.iter().map(|&e| e as i64).sum()
    }

    fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Mono) -> Mono {
        Mono(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| checked_exp(a + b))
                .collect(),
        )
    }

    pub fn exponents(&self) -> &[i32] {
        &self.0
    }
}

fn checked_exp(e: i32) -> i32 {
    assert!(
        e.abs() <= MAX_EXPONENT,
        "exponent {e} exceeds the supported bound {MAX_EXPONENT}"
    );
    e
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Mono) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Mono) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

/// Identifies one localized polynomial ring: coefficient ring, number of
/// coordinates and the set of inverted coordinates (0-based).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RingTag<R: CoeffRing> {
    ring: R,
    nvars: usize,
    inverted: BTreeSet<usize>,
}

impl<R: CoeffRing> RingTag<R> {
    pub fn new(ring: R, nvars: usize, inverted: BTreeSet<usize>) -> RingTag<R> {
        assert!(nvars >= 1, "a patch ring needs at least one coordinate");
        assert!(
            inverted.iter().all(|&i| i < nvars),
            "inverted coordinate out of range"
        );
        RingTag {
            ring,
            nvars,
            inverted,
        }
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn inverted(&self) -> &BTreeSet<usize> {
        &self.inverted
    }

    pub fn is_inverted(&self, var: usize) -> bool {
        self.inverted.contains(&var)
    }

    /// True if `self` includes into `other`: same ring data, possibly more
    /// inverted coordinates there.
    pub fn includes_into(&self, other: &RingTag<R>) -> bool {
        self.ring == other.ring
            && self.nvars == other.nvars
            && self.inverted.is_subset(&other.inverted)
    }

    /// Smallest common localization of the two tags.
    pub fn union(&self, other: &RingTag<R>) -> RingTag<R> {
        assert_eq!(self.ring, other.ring, "ring mismatch in tag union");
        assert_eq!(
            self.nvars, other.nvars,
            "variable count mismatch in tag union"
        );
        let inverted = self.inverted.union(&other.inverted).copied().collect();
        RingTag::new(self.ring.clone(), self.nvars, inverted)
    }

    pub fn level(&self) -> Level {
        self.ring.level()
    }
}

impl RingTag<Fq> {
    /// Same localization over `W2` coefficients.
    pub fn lift_level(&self) -> RingTag<W2> {
        RingTag::new(
            W2::new(self.ring.params().clone()),
            self.nvars,
            self.inverted.clone(),
        )
    }
}

impl RingTag<W2> {
    /// Same localization over the residue field.
    pub fn reduce_level(&self) -> RingTag<Fq> {
        RingTag::new(
            Fq::new(self.ring.params().clone()),
            self.nvars,
            self.inverted.clone(),
        )
    }
}

/// A sparse Laurent polynomial in canonical form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Laurent<R: CoeffRing> {
    tag: RingTag<R>,
    terms: BTreeMap<Mono, R::Elem>,
}

impl<R: CoeffRing> Laurent<R> {
    pub fn zero(tag: &RingTag<R>) -> Laurent<R> {
        Laurent {
            tag: tag.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(tag: &RingTag<R>) -> Laurent<R> {
        Laurent::constant(tag, tag.ring.one())
    }

    pub fn constant(tag: &RingTag<R>, c: R::Elem) -> Laurent<R> {
        let mut terms = BTreeMap::new();
        if !tag.ring.is_zero(&c) {
            terms.insert(Mono::constant(tag.nvars), c);
        }
        Laurent {
            tag: tag.clone(),
            terms,
        }
    }

    pub fn from_u64(tag: &RingTag<R>, n: u64) -> Laurent<R> {
        Laurent::constant(tag, tag.ring.from_u64(n))
    }

    /// The coordinate `t_{var+1}`.
    pub fn var(tag: &RingTag<R>, var: usize) -> Laurent<R> {
        Laurent::term(tag, &unit_exp(tag.nvars, var, 1), tag.ring.one())
    }

    /// A single term `c * t^exps`.
    pub fn term(tag: &RingTag<R>, exps: &[i32], c: R::Elem) -> Laurent<R> {
        assert_eq!(exps.len(), tag.nvars, "exponent vector length mismatch");
        for (i, &e) in exps.iter().enumerate() {
            checked_exp(e);
            assert!(
                e >= 0 || tag.is_inverted(i),
                "negative exponent on non-inverted coordinate t{}",
                i + 1
            );
        }
        let mut terms = BTreeMap::new();
        if !tag.ring.is_zero(&c) {
            terms.insert(Mono(exps.to_vec()), c);
        }
        Laurent {
            tag: tag.clone(),
            terms,
        }
    }

    pub fn tag(&self) -> &RingTag<R> {
        &self.tag
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_constant() && self.tag.ring.is_one(c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &R::Elem)> {
        self.terms.iter()
    }

    /// The unique term, if the polynomial is a monomial.
    pub fn single_term(&self) -> Option<(&Mono, &R::Elem)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }

    fn assert_same_tag(&self, other: &Laurent<R>) {
        assert_eq!(self.tag, other.tag, "polynomial ring tag mismatch");
    }

    fn insert_term(&mut self, mono: Mono, c: R::Elem) {
        if self.tag.ring.is_zero(&c) {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = self.tag.ring.add(o.get(), &c);
                if self.tag.ring.is_zero(&sum) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Laurent<R>) -> Laurent<R> {
        self.assert_same_tag(other);
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Laurent<R> {
        let ring = &self.tag.ring;
        Laurent {
            tag: self.tag.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub(&self, other: &Laurent<R>) -> Laurent<R> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Laurent<R>) -> Laurent<R> {
        self.assert_same_tag(other);
        let ring = self.tag.ring.clone();
        let mut out = Laurent::zero(&self.tag);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.insert_term(ma.mul(mb), ring.mul(ca, cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &R::Elem) -> Laurent<R> {
        let ring = self.tag.ring.clone();
        let mut out = Laurent::zero(&self.tag);
        for (m, a) in &self.terms {
            out.insert_term(m.clone(), ring.mul(a, c));
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Laurent<R> {
        let mut acc = Laurent::one(&self.tag);
        let mut base = self.clone();
        let mut exp = exp;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Partial derivative with respect to `t_{var+1}`.
    pub fn deriv(&self, var: usize) -> Laurent<R> {
        assert!(var < self.tag.nvars, "derivative index out of range");
        let ring = self.tag.ring.clone();
        let mut out = Laurent::zero(&self.tag);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let factor = if e > 0 {
                ring.from_u64(e as u64)
            } else {
                ring.neg(&ring.from_u64((-e) as u64))
            };
            let coeff = ring.mul(c, &factor);
            if ring.is_zero(&coeff) {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] -= 1;
            out.insert_term(Mono(exps), coeff);
        }
        out
    }

    /// Reinterpret in a larger localization of the same ring.
    pub fn extend_tag(&self, target: &RingTag<R>) -> Laurent<R> {
        assert!(
            self.tag.includes_into(target),
            "tag {:?} does not include into {:?}",
            self.tag,
            target
        );
        Laurent {
            tag: target.clone(),
            terms: self.terms.clone(),
        }
    }

    /// Ring-homomorphism substitution `t_i -> images[i]`. All images must
    /// share one tag; inverted coordinates require invertible images.
    pub fn substitute(&self, images: &[Laurent<R>]) -> Result<Laurent<R>, Error>
    where
        R: PolyInvert,
    {
        assert_eq!(
            images.len(),
            self.tag.nvars,
            "one image per coordinate required"
        );
        let target = images[0].tag.clone();
        for im in images {
            assert_eq!(im.tag, target, "substitution images must share one tag");
        }
        assert_eq!(
            self.tag.ring.params(),
            target.ring.params(),
            "substitution across different base parameters"
        );
        let mut inverses: BTreeMap<usize, Laurent<R>> = BTreeMap::new();
        for &i in &self.tag.inverted {
            let inv = images[i].invert().map_err(|e| Error::NonInvertibleImage {
                var: i + 1,
                witness: e.to_string(),
            })?;
            inverses.insert(i, inv);
        }
        let mut out = Laurent::zero(&target);
        for (m, c) in &self.terms {
            let mut acc = Laurent::constant(&target, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let base = if e > 0 { &images[i] } else { &inverses[&i] };
                acc = acc.mul(&base.pow(e.unsigned_abs()));
            }
            out = out.add(&acc);
        }
        Ok(out)
    }

    /// Unit inversion per the level-specific rules.
    pub fn invert(&self) -> Result<Laurent<R>, Error>
    where
        R: PolyInvert,
    {
        R::invert_poly(self)
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let ring = &self.tag.ring;
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms.iter().rev() {
            let mono = render_mono(m);
            let coeff = ring.render(c);
            let wrapped = if coeff.contains('+') && !coeff.starts_with('(') {
                format!("({coeff})")
            } else {
                coeff
            };
            let part = if mono.is_empty() {
                wrapped
            } else if ring.is_one(c) {
                mono
            } else {
                format!("{wrapped}*{mono}")
            };
            parts.push(part);
        }
        parts.join(" + ")
    }
}

fn render_mono(m: &Mono) -> String {
    let mut factors = Vec::new();
    for (i, &e) in m.0.iter().enumerate() {
        if e == 0 {
            continue;
        }
        if e == 1 {
            factors.push(format!("t{}", i + 1));
        } else {
            factors.push(format!("t{}^{}", i + 1, e));
        }
    }
    factors.join("*")
}

impl<R: CoeffRing> fmt::Display for Laurent<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn unit_exp(nvars: usize, var: usize, e: i32) -> Vec<i32> {
    assert!(var < nvars, "variable index out of range");
    let mut exps = vec![0; nvars];
    exps[var] = e;
    exps
}

impl Laurent<Fq> {
    /// Frobenius pullback `f -> f^p`: p-th power of every coefficient and
    /// p-scaled exponents, which agrees with p-fold self-multiplication.
    pub fn frobenius_pullback(&self) -> Laurent<Fq> {
        let ring = self.tag.ring.clone();
        let p = ring.p() as i32;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let exps: Vec<i32> =
                    m.0.iter()
                        .map(|&e| checked_exp(e.saturating_mul(p)))
                        .collect();
                (Mono(exps), ring.frobenius(c))
            })
            .collect();
        Laurent {
            tag: self.tag.clone(),
            terms,
        }
    }

    /// Coefficientwise naive lift, a section of [`Laurent::reduce`].
    pub fn lift(&self) -> Laurent<W2> {
        let tag = self.tag.lift_level();
        let w = tag.ring().clone();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), w.teichmuller(c)))
            .collect();
        Laurent { tag, terms }
    }

    /// `p * (any lift of self)`.
    pub fn times_p(&self) -> Laurent<W2> {
        let tag = self.tag.lift_level();
        let w = tag.ring().clone();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m.clone(), w.p_times(c)))
            .collect();
        Laurent { tag, terms }
    }
}

impl Laurent<W2> {
    /// Coefficientwise reduction mod p.
    pub fn reduce(&self) -> Laurent<Fq> {
        let tag = self.tag.reduce_level();
        let w = self.tag.ring().clone();
        let mut out = Laurent::zero(&tag);
        for (m, c) in &self.terms {
            out.insert_term(m.clone(), w.reduce(c));
        }
        out
    }

    /// Exact division by p; every coefficient must lie in `p*W2`.
    pub fn div_p(&self) -> Result<Laurent<Fq>, Error> {
        let tag = self.tag.reduce_level();
        let w = self.tag.ring().clone();
        let mut out = Laurent::zero(&tag);
        for (m, c) in &self.terms {
            let q = w.div_p(c).map_err(|_| Error::NotDivisibleByP {
                witness: Laurent::term(&self.tag, &m.0, c.clone()).render(),
            })?;
            out.insert_term(m.clone(), q);
        }
        Ok(out)
    }
}

/// Level-specific unit inversion: monomials over the field, `u + p*g` with
/// `u` a monomial unit over `W2`.
pub trait PolyInvert: CoeffRing + Sized {
    fn invert_poly(f: &Laurent<Self>) -> Result<Laurent<Self>, Error>;
}

impl PolyInvert for Fq {
    fn invert_poly(f: &Laurent<Fq>) -> Result<Laurent<Fq>, Error> {
        let not_a_unit = || Error::NotAUnit {
            witness: f.render(),
        };
        let (mono, coeff) = f.single_term().ok_or_else(not_a_unit)?;
        for (i, &e) in mono.0.iter().enumerate() {
            if e != 0 && !f.tag.is_inverted(i) {
                return Err(not_a_unit());
            }
        }
        let cinv = f.tag.ring.inv(coeff).map_err(|_| not_a_unit())?;
        let exps: Vec<i32> = mono.0.iter().map(|&e| -e).collect();
        Ok(Laurent::term(&f.tag, &exps, cinv))
    }
}

impl PolyInvert for W2 {
    fn invert_poly(f: &Laurent<W2>) -> Result<Laurent<W2>, Error> {
        // u + p*g with u a monomial unit mod p: inverse is u^-1 - p*u^-2*g
        let reduced = f.reduce();
        let u_inv_modp = reduced.invert().map_err(|_| Error::NotAUnit {
            witness: reduced.render(),
        })?;
        let u = reduced.lift();
        let g = f
            .sub(&u)
            .div_p()
            .expect("f - lift(reduce(f)) is divisible by p");
        let correction = u_inv_modp.mul(&u_inv_modp).mul(&g).times_p();
        Ok(u_inv_modp.lift().sub(&correction))
    }
}

// Thin operator sugar over borrowed polynomials.
impl<R: CoeffRing> std::ops::Add for &Laurent<R> {
    type Output = Laurent<R>;
    fn add(self, rhs: &Laurent<R>) -> Laurent<R> {
        Laurent::add(self, rhs)
    }
}

impl<R: CoeffRing> std::ops::Sub for &Laurent<R> {
    type Output = Laurent<R>;
    fn sub(self, rhs: &Laurent<R>) -> Laurent<R> {
        Laurent::sub(self, rhs)
    }
}

impl<R: CoeffRing> std::ops::Mul for &Laurent<R> {
    type Output = Laurent<R>;
    fn mul(self, rhs: &Laurent<R>) -> Laurent<R> {
        Laurent::mul(self, rhs)
    }
}

impl<R: CoeffRing> std::ops::Neg for &Laurent<R> {
    type Output = Laurent<R>;
    fn neg(self) -> Laurent<R> {
        Laurent::neg(self)
    }
}

/// Parses the canonical polynomial grammar (and modest human variations:
/// whitespace, `-`, integer literals above the characteristic).
///
/// Grammar sketch: a sum of terms, each a `*`-product of factors; factors
/// are unsigned integers, coordinates `tN` (optionally `^k`, negative `k`
/// only on inverted coordinates), the extension generator `x`, or a
/// parenthesized sub-expression. At the Witt level a parenthesized pair
/// `(a0,a1)` of base-field constants denotes Witt coordinates.
pub fn parse_poly<R: PolyInvert>(tag: &RingTag<R>, src: &str) -> Result<Laurent<R>, Error> {
    let mut p = Parser {
        tag,
        bytes: src.as_bytes(),
        pos: 0,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos != p.bytes.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a, R: CoeffRing> {
    tag: &'a RingTag<R>,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a, R: PolyInvert> Parser<'a, R> {
    fn err(&self, msg: &str) -> Error {
        Error::PolyParse {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Laurent<R>, Error> {
        let mut negate = false;
        if self.peek() == Some(b'-') {
            self.pos += 1;
            negate = true;
        }
        let mut acc = self.term()?;
        if negate {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(b'-') => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Laurent<R>, Error> {
        let mut acc = self.factor()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            let f = self.factor()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Laurent<R>, Error> {
        let base = self.atom()?;
        if self.peek() != Some(b'^') {
            return Ok(base);
        }
        self.pos += 1;
        let exp = self.int_exponent()?;
        if exp >= 0 {
            Ok(base.pow(exp as u32))
        } else {
            let inv = base.invert().map_err(|e| Error::PolyParse {
                pos: self.pos,
                msg: format!("negative power of a non-unit: {e}"),
            })?;
            Ok(inv.pow((-exp) as u32))
        }
    }

    fn atom(&mut self) -> Result<Laurent<R>, Error> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let first = self.expr()?;
                match self.peek() {
                    Some(b')') => {
                        self.pos += 1;
                        Ok(first)
                    }
                    Some(b',') => {
                        self.pos += 1;
                        let second = self.expr()?;
                        if self.peek() != Some(b')') {
                            return Err(self.err("expected ')' after Witt pair"));
                        }
                        self.pos += 1;
                        self.witt_pair(first, second)
                    }
                    _ => Err(self.err("expected ')' or ','")),
                }
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                Ok(Laurent::from_u64(self.tag, n))
            }
            Some(b't') => {
                self.pos += 1;
                let idx = self.uint()? as usize;
                if idx == 0 || idx > self.tag.nvars() {
                    return Err(self.err(&format!(
                        "coordinate index out of range 1..={}",
                        self.tag.nvars()
                    )));
                }
                let var = idx - 1;
                // handle the power here to report negative exponents precisely
                if self.peek() == Some(b'^') {
                    let save = self.pos;
                    self.pos += 1;
                    let e = self.int_exponent()?;
                    if e < 0 && !self.tag.is_inverted(var) {
                        return Err(Error::PolyParse {
                            pos: save,
                            msg: format!("coordinate t{idx} is not inverted in this ring"),
                        });
                    }
                    return Ok(Laurent::term(
                        self.tag,
                        &unit_exp(self.tag.nvars(), var, e),
                        self.tag.ring().one(),
                    ));
                }
                Ok(Laurent::var(self.tag, var))
            }
            Some(b'x') => {
                self.pos += 1;
                match self.tag.ring().ext_generator() {
                    Some(g) => Ok(Laurent::constant(self.tag, g)),
                    None => Err(self.err("'x' needs an extension field (degree e > 1)")),
                }
            }
            _ => Err(self.err("expected a number, coordinate, 'x' or '('")),
        }
    }

    fn witt_pair(&mut self, a0: Laurent<R>, a1: Laurent<R>) -> Result<Laurent<R>, Error> {
        let constant = |p: &Laurent<R>| -> Option<R::Elem> {
            if p.is_zero() {
                Some(p.tag().ring().zero())
            } else {
                p.single_term()
                    .filter(|(m, _)| m.is_constant())
                    .map(|(_, c)| c.clone())
            }
        };
        let (c0, c1) = match (constant(&a0), constant(&a1)) {
            (Some(c0), Some(c1)) => (c0, c1),
            _ => return Err(self.err("Witt pair components must be scalar constants")),
        };
        match self.tag.ring().witt_pair(&c0, &c1) {
            Some(c) => Ok(Laurent::constant(self.tag, c)),
            None => Err(self.err("Witt pair is only valid for mod-p2 coefficients")),
        }
    }

    fn uint(&mut self) -> Result<u64, Error> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .unwrap()
            .parse::<u64>()
            .map_err(|_| self.err("integer literal out of range"))
    }

    fn int_exponent(&mut self) -> Result<i32, Error> {
        let negative = if self.peek() == Some(b'-') {
            self.pos += 1;
            true
        } else {
            false
        };
        let n = self.uint()?;
        if n > MAX_EXPONENT as u64 {
            return Err(self.err(&format!("exponent exceeds the bound {MAX_EXPONENT}")));
        }
        let e = n as i32;
        Ok(if negative { -e } else { e })
    }
}
