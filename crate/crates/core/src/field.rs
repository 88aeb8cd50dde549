//! Finite fields `F_{p^k}` in a polynomial basis.
//!
//! Elements are plain integer codes `Σ coeffs[i]·p^i` over the polynomial
//! basis `1, x, …, x^{k-1}`; all arithmetic goes through a shared [`Field`]
//! handle that owns precomputed addition, multiplication, inversion and
//! Frobenius tables. Fields are tiny here (order at most [`MAX_ORDER`]), so
//! table lookups beat any clever representation.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported field order.
pub const MAX_ORDER: u64 = 256;

/// Parameters of `F_{p^k}`: the characteristic, the extension degree and a
/// monic irreducible modulus listed low-degree-first (`k + 1` coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub p: u32,
    pub k: u32,
    pub modulus: Vec<u32>,
}

impl FieldDescriptor {
    /// Descriptor with the default modulus: the lexicographically smallest
    /// monic irreducible of degree `k`, coefficients compared from the
    /// constant term upwards.
    pub fn with_default_modulus(p: u32, k: u32) -> Result<Self> {
        check_parameters(p, k)?;
        let modulus = smallest_irreducible(p, k as usize);
        Ok(FieldDescriptor { p, k, modulus })
    }

    pub fn order(&self) -> u64 {
        (self.p as u64).pow(self.k)
    }

    /// Validates every invariant of the descriptor.
    pub fn validate(&self) -> Result<()> {
        check_parameters(self.p, self.k)?;
        let k = self.k as usize;
        if self.modulus.len() != k + 1
            || self.modulus[k] != 1
            || self.modulus.iter().any(|&c| c >= self.p)
            || !is_irreducible(&self.modulus, self.p)
        {
            return Err(Error::ReducibleModulus(self.modulus.clone()));
        }
        Ok(())
    }
}

fn check_parameters(p: u32, k: u32) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if k == 0 {
        return Err(Error::InvalidField(
            "extension degree must be at least 1".into(),
        ));
    }
    let order = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
    if order > MAX_ORDER {
        return Err(Error::FieldTooLarge(order));
    }
    Ok(())
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`.
fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u32> = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &c) in m.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - (lead * c) % p) % p;
            }
        }
        r.pop();
    }
    r
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
fn is_irreducible(modulus: &[u32], p: u32) -> bool {
    let deg = modulus.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as usize).pow(d as u32);
        for t in 0..count {
            let mut g = digits(t, p, d);
            g.push(1);
            if poly_rem(modulus, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

/// Little-endian base-`p` digits of `t`, padded to `len`.
fn digits(mut t: usize, p: u32, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len + 1);
    for _ in 0..len {
        out.push((t % p as usize) as u32);
        t /= p as usize;
    }
    out
}

fn smallest_irreducible(p: u32, k: usize) -> Vec<u32> {
    // Walk candidates with the constant term as the most significant digit,
    // which is exactly low-degree-first lexicographic order.
    let count = (p as usize).pow(k as u32);
    for t in 0..count {
        let mut c = digits(t, p, k);
        c.reverse();
        c.push(1);
        if is_irreducible(&c, p) {
            return c;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

/// An element of a finite field, stored as its canonical integer code.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Elem(pub u32);

impl Elem {
    pub const ZERO: Elem = Elem(0);
    pub const ONE: Elem = Elem(1);

    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The Frobenius power `x ↦ x^(p^j)`.
#[derive(
    Copy, Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct FieldAutomorphism {
    pub j: u32,
}

impl FieldAutomorphism {
    pub const IDENTITY: FieldAutomorphism = FieldAutomorphism { j: 0 };

    pub fn is_identity(self) -> bool {
        self.j == 0
    }
}

struct Tables {
    desc: FieldDescriptor,
    order: u32,
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
    inv: Vec<u32>,
    // frobenius[j][a] = a^(p^j)
    frobenius: Vec<Vec<u32>>,
}

/// Shared handle to a finite field with its arithmetic tables.
#[derive(Clone)]
pub struct Field(Arc<Tables>);

impl Field {
    pub fn new(desc: FieldDescriptor) -> Result<Self> {
        desc.validate()?;
        let p = desc.p;
        let k = desc.k as usize;
        let q = desc.order() as u32;
        let qs = q as usize;
        let coeffs: Vec<Vec<u32>> = (0..qs).map(|t| digits(t, p, k)).collect();
        let encode = |c: &[u32]| c.iter().rev().fold(0u32, |acc, &d| acc * p + d);

        let mut add = vec![0u32; qs * qs];
        let mut mul = vec![0u32; qs * qs];
        for a in 0..qs {
            for b in 0..qs {
                let sum: Vec<u32> = (0..k).map(|i| (coeffs[a][i] + coeffs[b][i]) % p).collect();
                add[a * qs + b] = encode(&sum);
                let mut prod = vec![0u32; 2 * k - 1];
                for i in 0..k {
                    for j in 0..k {
                        prod[i + j] = (prod[i + j] + coeffs[a][i] * coeffs[b][j]) % p;
                    }
                }
                let mut r = poly_rem(&prod, &desc.modulus, p);
                r.resize(k, 0);
                mul[a * qs + b] = encode(&r);
            }
        }
        let neg: Vec<u32> = (0..qs)
            .map(|a| (0..qs).find(|&b| add[a * qs + b] == 0).unwrap() as u32)
            .collect();
        let inv: Vec<u32> = (0..qs)
            .map(|a| {
                if a == 0 {
                    0
                } else {
                    (1..qs).find(|&b| mul[a * qs + b] == 1).unwrap() as u32
                }
            })
            .collect();
        let mut frobenius = vec![(0..q).collect::<Vec<u32>>()];
        for _ in 1..k {
            let prev = frobenius.last().unwrap();
            let next = prev
                .iter()
                .map(|&a| {
                    // a^p by repeated multiplication
                    let mut r = 1u32;
                    for _ in 0..p {
                        r = mul[r as usize * qs + a as usize];
                    }
                    r
                })
                .collect();
            frobenius.push(next);
        }
        Ok(Field(Arc::new(Tables {
            desc,
            order: q,
            add,
            mul,
            neg,
            inv,
            frobenius,
        })))
    }

    /// `F_{p^k}` with the default modulus.
    pub fn with_order(p: u32, k: u32) -> Result<Self> {
        Field::new(FieldDescriptor::with_default_modulus(p, k)?)
    }

    pub fn prime(p: u32) -> Result<Self> {
        Field::with_order(p, 1)
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.0.desc
    }

    pub fn characteristic(&self) -> u32 {
        self.0.desc.p
    }

    pub fn degree(&self) -> u32 {
        self.0.desc.k
    }

    /// Number of elements `q = p^k`.
    pub fn order(&self) -> u32 {
        self.0.order
    }

    pub fn elem(&self, code: u32) -> Result<Elem> {
        if code < self.0.order {
            Ok(Elem(code))
        } else {
            Err(Error::ElementOutOfRange {
                code,
                order: self.0.order,
            })
        }
    }

    pub fn contains(&self, a: Elem) -> bool {
        a.0 < self.0.order
    }

    /// Polynomial-basis coordinates of `a`, constant term first.
    pub fn coeffs(&self, a: Elem) -> Vec<u32> {
        digits(a.0 as usize, self.0.desc.p, self.0.desc.k as usize)
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<Elem> {
        let p = self.0.desc.p;
        if coeffs.len() != self.0.desc.k as usize || coeffs.iter().any(|&c| c >= p) {
            return Err(Error::InvalidField(format!(
                "coefficients {coeffs:?} do not describe an element"
            )));
        }
        Ok(Elem(coeffs.iter().rev().fold(0, |acc, &d| acc * p + d)))
    }

    #[inline]
    fn idx(&self, a: Elem, b: Elem) -> usize {
        debug_assert!(self.contains(a) && self.contains(b));
        a.0 as usize * self.0.order as usize + b.0 as usize
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.0.add[self.idx(a, b)])
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.0.neg[a.0 as usize])
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        Elem(self.0.mul[self.idx(a, b)])
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a.is_zero() {
            Err(Error::ZeroInverse)
        } else {
            Ok(Elem(self.0.inv[a.0 as usize]))
        }
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = Elem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// All elements in ascending code order; `0` and `1` come first.
    pub fn elements(&self) -> Vec<Elem> {
        (0..self.0.order).map(Elem).collect()
    }

    /// The `k` Frobenius powers, identity first.
    pub fn automorphisms(&self) -> Vec<FieldAutomorphism> {
        (0..self.0.desc.k)
            .map(|j| FieldAutomorphism { j })
            .collect()
    }

    pub fn automorphism(&self, j: u32) -> Result<FieldAutomorphism> {
        if j < self.0.desc.k {
            Ok(FieldAutomorphism { j })
        } else {
            Err(Error::InvalidField(format!(
                "automorphism exponent {j} out of range for degree {}",
                self.0.desc.k
            )))
        }
    }

    #[inline]
    pub fn apply(&self, aut: FieldAutomorphism, a: Elem) -> Elem {
        Elem(self.0.frobenius[aut.j as usize][a.0 as usize])
    }

    /// The automorphism inverse to `aut` in the cyclic Galois group.
    pub fn inverse_automorphism(&self, aut: FieldAutomorphism) -> FieldAutomorphism {
        let k = self.0.desc.k;
        FieldAutomorphism { j: (k - aut.j) % k }
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.desc == other.0.desc
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.0.desc;
        write!(f, "F_{}^{} mod {:?}", d.p, d.k, d.modulus)
    }
}
