//! Exact scalars: the base field `F_{p^e}` for an odd prime `p` and the
//! length-2 Witt ring `W2(F_{p^e})`.
//!
//! Elements ([`FieldElem`], [`Witt2Elem`]) are plain canonical data; all
//! arithmetic goes through the ring handles [`Fq`] and [`W2`], which share an
//! immutable [`FieldParams`]. Canonical representatives (coefficients in
//! `[0, p)`) make `==` structural equality and keep printed output
//! deterministic.
//!
//! The target scale is deliberately small: `3 <= p <= 13` and extension
//! degree `e <= 3`, enough to exercise a nontrivial inverse Frobenius in
//! [`W2::div_p`] while keeping the Witt carry expansion in 64-bit integers.

use std::fmt;
use std::sync::Arc;

use crate::Error;

/// Largest supported extension degree.
pub const MAX_EXT_DEGREE: usize = 3;

const SUPPORTED_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// Shared parameters of `F_{p^e}`: the odd prime, the extension degree and
/// the (monic, irreducible) modulus for `e > 1`.
#[derive(Debug, PartialEq, Eq, Hash)]
pub struct FieldParams {
    p: u64,
    e: usize,
    /// Monic modulus, ascending coefficients, length `e + 1`. For `e = 1`
    /// this is the formal `x - 0`, never consulted.
    modulus: Vec<u64>,
    /// Witt addition carry coefficients `binom(p, i) / p mod p` for
    /// `i = 1..p-1`.
    carry: Vec<u64>,
}

impl FieldParams {
    /// Validates and freezes field parameters. The modulus is checked
    /// irreducible by exhaustive root search, which is complete for
    /// degrees 2 and 3.
    pub fn new(p: u64, e: usize, modulus: &[u64]) -> Result<Arc<FieldParams>, Error> {
        if !SUPPORTED_PRIMES.contains(&p) {
            return Err(Error::BadParams(format!(
                "p = {p} is not an odd prime in the supported range 3..=13"
            )));
        }
        if e == 0 || e > MAX_EXT_DEGREE {
            return Err(Error::BadParams(format!(
                "extension degree {e} outside 1..={MAX_EXT_DEGREE}"
            )));
        }
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            if modulus.len() != e + 1 {
                return Err(Error::BadParams(format!(
                    "modulus must list {} coefficients for degree {e}",
                    e + 1
                )));
            }
            let mut m: Vec<u64> = modulus.iter().map(|c| c % p).collect();
            let lead = m[e];
            if lead == 0 {
                return Err(Error::BadParams(
                    "modulus leading coefficient is zero".into(),
                ));
            }
            // normalize monic
            let inv = mod_pow(lead, p - 2, p);
            for c in m.iter_mut() {
                *c = *c * inv % p;
            }
            for a in 0..p {
                let mut acc = 0u64;
                for &c in m.iter().rev() {
                    acc = (acc * a + c) % p;
                }
                if acc == 0 {
                    return Err(Error::BadParams(format!(
                        "modulus is reducible over F_{p}: root at {a}"
                    )));
                }
            }
            m
        };
        let carry = (1..p).map(|i| binom(p, i) / p % p).collect();
        Ok(Arc::new(FieldParams {
            p,
            e,
            modulus,
            carry,
        }))
    }

    /// The prime field `F_p`.
    pub fn prime_field(p: u64) -> Result<Arc<FieldParams>, Error> {
        FieldParams::new(p, 1, &[])
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> usize {
        self.e
    }

    /// Number of field elements `p^e`.
    pub fn order(&self) -> u64 {
        self.p.pow(self.e as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
}

fn binom(n: u64, k: u64) -> u64 {
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn mod_pow(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// An element of `F_{p^e}` as a canonical coefficient vector over `Z/p`
/// (degree-`i` coefficient in `rep[i]`, unused slots zero).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct FieldElem {
    rep: [u64; MAX_EXT_DEGREE],
}

impl FieldElem {
    pub fn coeffs(&self) -> &[u64; MAX_EXT_DEGREE] {
        &self.rep
    }
}

/// An element of `W2(F_{p^e})` in Witt coordinates `(a0, a1)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Witt2Elem {
    pub a0: FieldElem,
    pub a1: FieldElem,
}

/// Coefficient level: the residue field or its length-2 Witt thickening.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Level {
    ModP,
    ModP2,
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::ModP => write!(f, "mod-p"),
            Level::ModP2 => write!(f, "mod-p2"),
        }
    }
}

/// Ring operations shared by the two coefficient rings, enough for the
/// polynomial layer (arithmetic, literals, rendering and the parser hooks).
pub trait CoeffRing: Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug {
    type Elem: Clone + PartialEq + Eq + std::hash::Hash + fmt::Debug;

    fn params(&self) -> &Arc<FieldParams>;
    fn level(&self) -> Level;
    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn is_one(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of the integer `n` (reduced mod `p` resp. mod `p^2`).
    fn from_u64(&self, n: u64) -> Self::Elem;
    /// The extension generator `x`, absent over the prime field.
    fn ext_generator(&self) -> Option<Self::Elem>;
    /// Assemble a Witt pair from two base-field constants; `None` where
    /// pairs make no sense (mod p) or the components are not base scalars.
    fn witt_pair(&self, a0: &Self::Elem, a1: &Self::Elem) -> Option<Self::Elem>;
    /// Canonical text form; see the polynomial grammar for how it embeds.
    fn render(&self, a: &Self::Elem) -> String;
}

/// The field `F_{p^e}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Fq {
    params: Arc<FieldParams>,
}

impl Fq {
    pub fn new(params: Arc<FieldParams>) -> Fq {
        Fq { params }
    }

    pub fn p(&self) -> u64 {
        self.params.p
    }

    pub fn e(&self) -> usize {
        self.params.e
    }

    /// Element from raw coefficients (reduced mod p; excess degrees must be
    /// absent).
    pub fn elem(&self, coeffs: &[u64]) -> FieldElem {
        assert!(
            coeffs.len() <= self.params.e,
            "coefficient list longer than degree"
        );
        let mut rep = [0u64; MAX_EXT_DEGREE];
        for (i, &c) in coeffs.iter().enumerate() {
            rep[i] = c % self.params.p;
        }
        FieldElem { rep }
    }

    /// All `p^e` field elements in lexicographic order of representatives.
    pub fn elements(&self) -> Vec<FieldElem> {
        let p = self.params.p;
        let e = self.params.e;
        let mut out = Vec::with_capacity(self.params.order() as usize);
        let mut rep = [0u64; MAX_EXT_DEGREE];
        loop {
            out.push(FieldElem { rep });
            let mut i = 0;
            loop {
                if i == e {
                    return out;
                }
                rep[i] += 1;
                if rep[i] < p {
                    break;
                }
                rep[i] = 0;
                i += 1;
            }
        }
    }

    pub fn pow(&self, a: &FieldElem, mut exp: u64) -> FieldElem {
        let mut base = *a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse. Fails on zero.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem, Error> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.params.order() - 2))
    }

    /// The absolute Frobenius `x -> x^p`, a field automorphism.
    pub fn frobenius(&self, a: &FieldElem) -> FieldElem {
        self.pow(a, self.params.p)
    }

    /// Inverse of [`Fq::frobenius`], i.e. `x -> x^{p^{e-1}}`.
    pub fn inv_frobenius(&self, a: &FieldElem) -> FieldElem {
        let mut acc = *a;
        for _ in 1..self.params.e {
            acc = self.frobenius(&acc);
        }
        acc
    }
}

impl CoeffRing for Fq {
    type Elem = FieldElem;

    fn params(&self) -> &Arc<FieldParams> {
        &self.params
    }

    fn level(&self) -> Level {
        Level::ModP
    }

    fn zero(&self) -> FieldElem {
        FieldElem::default()
    }

    fn one(&self) -> FieldElem {
        self.elem(&[1])
    }

    fn is_zero(&self, a: &FieldElem) -> bool {
        a.rep == [0; MAX_EXT_DEGREE]
    }

    fn is_one(&self, a: &FieldElem) -> bool {
        *a == self.one()
    }

    fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.params.p;
        let mut rep = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.params.e {
            rep[i] = (a.rep[i] + b.rep[i]) % p;
        }
        FieldElem { rep }
    }

    fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.params.p;
        let mut rep = [0u64; MAX_EXT_DEGREE];
        for i in 0..self.params.e {
            rep[i] = (a.rep[i] + p - b.rep[i]) % p;
        }
        FieldElem { rep }
    }

    fn neg(&self, a: &FieldElem) -> FieldElem {
        self.sub(&self.zero(), a)
    }

    fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.params.p;
        let e = self.params.e;
        // schoolbook product then reduction by the monic modulus
        let mut buf = [0u64; 2 * MAX_EXT_DEGREE - 1];
        for i in 0..e {
            if a.rep[i] == 0 {
                continue;
            }
            for j in 0..e {
                buf[i + j] = (buf[i + j] + a.rep[i] * b.rep[j]) % p;
            }
        }
        for k in (e..2 * e - 1).rev() {
            let c = buf[k];
            if c == 0 {
                continue;
            }
            buf[k] = 0;
            for i in 0..e {
                let m = self.params.modulus[i];
                buf[k - e + i] = (buf[k - e + i] + c * (p - m)) % p;
            }
        }
        let mut rep = [0u64; MAX_EXT_DEGREE];
        rep[..e].copy_from_slice(&buf[..e]);
        FieldElem { rep }
    }

    fn from_u64(&self, n: u64) -> FieldElem {
        self.elem(&[n % self.params.p])
    }

    fn ext_generator(&self) -> Option<FieldElem> {
        if self.params.e > 1 {
            Some(self.elem(&[0, 1]))
        } else {
            None
        }
    }

    fn witt_pair(&self, _a0: &FieldElem, _a1: &FieldElem) -> Option<FieldElem> {
        None
    }

    fn render(&self, a: &FieldElem) -> String {
        render_field(&self.params, a)
    }
}

fn render_field(params: &FieldParams, a: &FieldElem) -> String {
    let e = params.e;
    let mut parts: Vec<String> = Vec::new();
    for i in 0..e {
        let c = a.rep[i];
        if c == 0 {
            continue;
        }
        let part = match i {
            0 => format!("{c}"),
            1 if c == 1 => "x".to_string(),
            1 => format!("{c}*x"),
            _ if c == 1 => format!("x^{i}"),
            _ => format!("{c}*x^{i}"),
        };
        parts.push(part);
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join("+")
    }
}

/// The ring `W2(F_{p^e})` of length-2 Witt vectors.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct W2 {
    field: Fq,
}

impl W2 {
    pub fn new(params: Arc<FieldParams>) -> W2 {
        W2 {
            field: Fq::new(params),
        }
    }

    pub fn field(&self) -> &Fq {
        &self.field
    }

    pub fn p(&self) -> u64 {
        self.field.p()
    }

    /// The element `p = (0, 1)`.
    pub fn p_elem(&self) -> Witt2Elem {
        Witt2Elem {
            a0: self.field.zero(),
            a1: self.field.one(),
        }
    }

    /// The multiplicative (Teichmüller) lift `a -> (a, 0)`.
    pub fn teichmuller(&self, a: &FieldElem) -> Witt2Elem {
        Witt2Elem {
            a0: *a,
            a1: self.field.zero(),
        }
    }

    /// Reduction mod p, a surjective ring homomorphism onto `F_{p^e}`.
    pub fn reduce(&self, a: &Witt2Elem) -> FieldElem {
        a.a0
    }

    /// `p * (any lift of a)`, i.e. `(0, a^p)`.
    pub fn p_times(&self, a: &FieldElem) -> Witt2Elem {
        Witt2Elem {
            a0: self.field.zero(),
            a1: self.field.frobenius(a),
        }
    }

    /// Exact division by p on `p*W2`: the unique `b` with `p_times(b) = a`.
    pub fn div_p(&self, a: &Witt2Elem) -> Result<FieldElem, Error> {
        if !self.field.is_zero(&a.a0) {
            return Err(Error::NotDivisibleByP {
                witness: self.render(a),
            });
        }
        Ok(self.field.inv_frobenius(&a.a1))
    }

    /// Inverse of a unit (`a0 != 0`).
    pub fn inv(&self, a: &Witt2Elem) -> Result<Witt2Elem, Error> {
        let k = &self.field;
        if k.is_zero(&a.a0) {
            return Err(Error::NotAUnit {
                witness: self.render(a),
            });
        }
        let b0 = k.inv(&a.a0)?;
        // second Witt coordinate of the inverse: -a1 * a0^{-2p}
        let b0p = k.frobenius(&b0);
        let corr = k.neg(&k.mul(&a.a1, &k.mul(&b0p, &b0p)));
        Ok(Witt2Elem { a0: b0, a1: corr })
    }

    /// The integral carry `(a^p + b^p - (a+b)^p) / p` reduced mod p.
    fn carry(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let k = &self.field;
        let p = self.field.params.p;
        let mut acc = k.zero();
        let mut apow = *a; // a^i
        for i in 1..p {
            let c = self.field.params.carry[(i - 1) as usize];
            let term = k.mul(&k.from_u64(c), &k.mul(&apow, &k.pow(b, p - i)));
            acc = k.add(&acc, &term);
            apow = k.mul(&apow, a);
        }
        k.neg(&acc)
    }
}

impl CoeffRing for W2 {
    type Elem = Witt2Elem;

    fn params(&self) -> &Arc<FieldParams> {
        self.field.params()
    }

    fn level(&self) -> Level {
        Level::ModP2
    }

    fn zero(&self) -> Witt2Elem {
        Witt2Elem::default()
    }

    fn one(&self) -> Witt2Elem {
        self.teichmuller(&self.field.one())
    }

    fn is_zero(&self, a: &Witt2Elem) -> bool {
        self.field.is_zero(&a.a0) && self.field.is_zero(&a.a1)
    }

    fn is_one(&self, a: &Witt2Elem) -> bool {
        *a == self.one()
    }

    fn add(&self, a: &Witt2Elem, b: &Witt2Elem) -> Witt2Elem {
        let k = &self.field;
        Witt2Elem {
            a0: k.add(&a.a0, &b.a0),
            a1: k.add(&k.add(&a.a1, &b.a1), &self.carry(&a.a0, &b.a0)),
        }
    }

    fn sub(&self, a: &Witt2Elem, b: &Witt2Elem) -> Witt2Elem {
        self.add(a, &self.neg(b))
    }

    fn neg(&self, a: &Witt2Elem) -> Witt2Elem {
        // valid for odd p: the carry C(a, -a) vanishes
        let k = &self.field;
        Witt2Elem {
            a0: k.neg(&a.a0),
            a1: k.neg(&a.a1),
        }
    }

    fn mul(&self, a: &Witt2Elem, b: &Witt2Elem) -> Witt2Elem {
        let k = &self.field;
        Witt2Elem {
            a0: k.mul(&a.a0, &b.a0),
            a1: k.add(
                &k.mul(&k.frobenius(&a.a0), &b.a1),
                &k.mul(&k.frobenius(&b.a0), &a.a1),
            ),
        }
    }

    fn from_u64(&self, n: u64) -> Witt2Elem {
        let p = self.field.params().p;
        let p2 = p * p;
        let n = n % p2;
        let n0 = n % p;
        // n = n0^p + p*n1 mod p^2 pins the second coordinate
        let t = mod_pow(n0, p, p2);
        let n1 = ((n + p2 - t) % p2) / p;
        Witt2Elem {
            a0: self.field.from_u64(n0),
            a1: self.field.from_u64(n1),
        }
    }

    fn ext_generator(&self) -> Option<Witt2Elem> {
        self.field.ext_generator().map(|x| self.teichmuller(&x))
    }

    fn witt_pair(&self, a0: &Witt2Elem, a1: &Witt2Elem) -> Option<Witt2Elem> {
        // the pair components are base-field expressions; read them mod p
        Some(Witt2Elem {
            a0: self.reduce(a0),
            a1: self.reduce(a1),
        })
    }

    fn render(&self, a: &Witt2Elem) -> String {
        let params = self.field.params();
        if self.field.is_zero(&a.a1) {
            render_field(params, &a.a0)
        } else {
            format!(
                "({},{})",
                render_field(params, &a.a0),
                render_field(params, &a.a1)
            )
        }
    }
}
