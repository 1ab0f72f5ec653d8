//! Univariate polynomial algebra over a finite field: arithmetic, gcd,
//! complete factorization (squarefree decomposition, distinct-degree and
//! equal-degree splitting), the arithmetic functions mu / lambda / M(n),
//! resultants, discriminants, and Pellet's identity.

use crate::cycles::CycleType;
use crate::error::{Error, Result};
use crate::fields::{FieldElem, Fq};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use std::fmt;

/// Default guard for exhaustive operations (number of polynomials).
pub const DEFAULT_ENUM_CAP: u64 = 1_000_000;

/// Below this many candidates, equal-degree splitting falls back to a
/// deterministic divisor scan instead of randomized splitting.
const EDS_DETERMINISTIC_CAP: u64 = 512;

/// Formal variable label.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize)]
pub enum Var {
    X,
    Y,
    /// The auxiliary variable of norm polynomials and correlation sums.
    T,
}

impl Var {
    pub fn symbol(self) -> char {
        match self {
            Var::X => 'x',
            Var::Y => 'y',
            Var::T => 'T',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Dense univariate polynomial, low degree first, trimmed (no trailing
/// zeros). The zero polynomial has an empty coefficient vector.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct UniPoly {
    coeffs: Vec<FieldElem>,
    var: Var,
}

impl Serialize for UniPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
        for c in &self.coeffs {
            seq.serialize_element(c)?;
        }
        seq.end()
    }
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<FieldElem>, var: Var) -> UniPoly {
        while coeffs.last().map_or(false, FieldElem::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs, var }
    }

    pub fn zero(var: Var) -> UniPoly {
        UniPoly { coeffs: vec![], var }
    }

    pub fn constant(c: FieldElem, var: Var) -> UniPoly {
        UniPoly::new(vec![c], var)
    }

    pub fn one(fq: &Fq, var: Var) -> UniPoly {
        UniPoly::constant(fq.one(), var)
    }

    /// The monomial `var`.
    pub fn var_poly(fq: &Fq, var: Var) -> UniPoly {
        UniPoly::new(vec![fq.zero(), fq.one()], var)
    }

    /// The monomial c * var^e.
    pub fn monomial(fq: &Fq, c: FieldElem, e: usize, var: Var) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero(var);
        }
        let mut coeffs = vec![fq.zero(); e + 1];
        coeffs[e] = c;
        UniPoly { coeffs, var }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(&self, var: Var) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.clone(),
            var,
        }
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Coefficient of var^i (zero beyond the degree).
    pub fn coeff(&self, fq: &Fq, i: usize) -> FieldElem {
        self.coeffs.get(i).cloned().unwrap_or_else(|| fq.zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    /// Degree of a nonzero polynomial; panics on zero.
    pub fn deg(&self) -> usize {
        self.degree().expect("degree of zero polynomial")
    }

    pub fn lead_coeff(&self) -> Option<&FieldElem> {
        self.coeffs.last()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.lead_coeff().map_or(false, |c| {
            c.coords().first() == Some(&1) && c.coords()[1..].iter().all(|&x| x == 0)
        })
    }

    pub fn add(&self, fq: &Fq, other: &UniPoly) -> UniPoly {
        debug_assert_eq!(self.var, other.var);
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut coeffs = Vec::with_capacity(n);
        for i in 0..n {
            let a = self.coeffs.get(i);
            let b = other.coeffs.get(i);
            coeffs.push(match (a, b) {
                (Some(a), Some(b)) => fq.add(a, b),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => unreachable!(),
            });
        }
        UniPoly::new(coeffs, self.var)
    }

    pub fn neg(&self, fq: &Fq) -> UniPoly {
        UniPoly {
            coeffs: self.coeffs.iter().map(|c| fq.neg(c)).collect(),
            var: self.var,
        }
    }

    pub fn sub(&self, fq: &Fq, other: &UniPoly) -> UniPoly {
        self.add(fq, &other.neg(fq))
    }

    pub fn mul(&self, fq: &Fq, other: &UniPoly) -> UniPoly {
        debug_assert_eq!(self.var, other.var);
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(self.var);
        }
        let mut coeffs = vec![fq.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    coeffs[i + j] = fq.add(&coeffs[i + j], &fq.mul(a, b));
                }
            }
        }
        UniPoly::new(coeffs, self.var)
    }

    pub fn mul_scalar(&self, fq: &Fq, c: &FieldElem) -> UniPoly {
        if c.is_zero() {
            return UniPoly::zero(self.var);
        }
        UniPoly {
            coeffs: self.coeffs.iter().map(|a| fq.mul(a, c)).collect(),
            var: self.var,
        }
    }

    /// Multiplication by var^e.
    pub fn shift_up(&self, fq: &Fq, e: usize) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![fq.zero(); e];
        coeffs.extend(self.coeffs.iter().cloned());
        UniPoly { coeffs, var: self.var }
    }

    pub fn pow(&self, fq: &Fq, mut e: usize) -> UniPoly {
        let mut base = self.clone();
        let mut acc = UniPoly::one(fq, self.var);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(fq, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(fq, &base);
            }
        }
        acc
    }

    /// Quotient and remainder; `other` must be nonzero.
    pub fn divrem(&self, fq: &Fq, other: &UniPoly) -> Result<(UniPoly, UniPoly)> {
        debug_assert_eq!(self.var, other.var);
        if other.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let db = other.deg();
        if self.is_zero() || self.deg() < db {
            return Ok((UniPoly::zero(self.var), self.clone()));
        }
        let lb_inv = fq.inv(other.lead_coeff().unwrap())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![fq.zero(); self.deg() - db + 1];
        let mut dr = rem.len() - 1;
        loop {
            if !rem[dr].is_zero() && dr >= db {
                let c = fq.mul(&rem[dr], &lb_inv);
                quot[dr - db] = c.clone();
                for j in 0..=db {
                    let s = fq.mul(&c, &other.coeffs[j]);
                    rem[dr - db + j] = fq.sub(&rem[dr - db + j], &s);
                }
            }
            if dr == 0 || dr < db {
                break;
            }
            dr -= 1;
        }
        Ok((
            UniPoly::new(quot, self.var),
            UniPoly::new(rem, self.var),
        ))
    }

    pub fn rem(&self, fq: &Fq, other: &UniPoly) -> Result<UniPoly> {
        Ok(self.divrem(fq, other)?.1)
    }

    /// Exact division; `None` if `other` does not divide `self`.
    pub fn exact_div(&self, fq: &Fq, other: &UniPoly) -> Option<UniPoly> {
        let (q, r) = self.divrem(fq, other).ok()?;
        if r.is_zero() {
            Some(q)
        } else {
            None
        }
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, fq: &Fq, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(fq, &b).unwrap();
            a = b;
            b = r;
        }
        a.monic(fq)
    }

    /// Scales to leading coefficient one (zero polynomial unchanged).
    pub fn monic(&self, fq: &Fq) -> UniPoly {
        match self.lead_coeff() {
            None => self.clone(),
            Some(lc) => {
                if self.is_monic() {
                    self.clone()
                } else {
                    self.mul_scalar(fq, &fq.inv(lc).unwrap())
                }
            }
        }
    }

    pub fn derivative(&self, fq: &Fq) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero(self.var);
        }
        let coeffs = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| fq.mul_scalar(c, (i + 1) as u64))
            .collect();
        UniPoly::new(coeffs, self.var)
    }

    pub fn eval(&self, fq: &Fq, x: &FieldElem) -> FieldElem {
        let mut acc = fq.zero();
        for c in self.coeffs.iter().rev() {
            acc = fq.mul(&acc, x);
            acc = fq.add(&acc, c);
        }
        acc
    }

    /// Canonical index vector used for deterministic factor ordering.
    pub fn canonical_key(&self, fq: &Fq) -> (usize, Vec<u64>) {
        (
            self.coeffs.len(),
            self.coeffs.iter().map(|c| fq.elem_index(c)).collect(),
        )
    }
}

/// a^e mod m by square-and-multiply.
pub fn powmod(fq: &Fq, a: &UniPoly, mut e: u128, m: &UniPoly) -> UniPoly {
    let mut base = a.rem(fq, m).unwrap();
    let mut acc = UniPoly::one(fq, a.var());
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(fq, &base).rem(fq, m).unwrap();
        }
        e >>= 1;
        if e > 0 {
            base = base.mul(fq, &base).rem(fq, m).unwrap();
        }
    }
    acc
}

/// A complete factorization: `unit * prod factors_i ^ mult_i` reproduces the
/// input exactly. Factors are monic irreducible, sorted canonically.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: FieldElem,
    pub factors: Vec<(UniPoly, usize)>,
}

impl Factorization {
    pub fn product(&self, fq: &Fq) -> UniPoly {
        let var = self
            .factors
            .first()
            .map(|(f, _)| f.var())
            .unwrap_or(Var::Y);
        let mut acc = UniPoly::constant(self.unit.clone(), var);
        for (f, e) in &self.factors {
            acc = acc.mul(fq, &f.pow(fq, *e));
        }
        acc
    }

    /// Number of irreducible factors counted with multiplicity.
    pub fn big_omega(&self) -> usize {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    fn sort(&mut self, fq: &Fq) {
        self.factors.sort_by_key(|(f, _)| f.canonical_key(fq));
    }
}

/// Squarefree decomposition of a monic polynomial: pairwise coprime monic
/// squarefree parts with distinct multiplicities, `prod g_i^{e_i} = f`.
/// Handles p-th powers (vanishing derivative) by root extraction.
pub fn squarefree_decomposition(fq: &Fq, f: &UniPoly) -> Result<Vec<(UniPoly, usize)>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    let mut out = Vec::new();
    sqf_rec(fq, f, 1, &mut out)?;
    out.sort_by_key(|&(_, e)| e);
    Ok(out)
}

fn sqf_rec(fq: &Fq, f: &UniPoly, outer_mult: usize, out: &mut Vec<(UniPoly, usize)>) -> Result<()> {
    if f.is_constant() {
        return Ok(());
    }
    let df = f.derivative(fq);
    if df.is_zero() {
        // f is a p-th power: extract the root coefficient-wise.
        let p = fq.p() as usize;
        let root_exp = (fq.q() / fq.p()) as u128;
        let mut coeffs = Vec::with_capacity(f.deg() / p + 1);
        for (i, c) in f.coeffs().iter().enumerate() {
            if i % p == 0 {
                coeffs.push(fq.pow(c, root_exp));
            } else {
                debug_assert!(c.is_zero());
            }
        }
        let root = UniPoly::new(coeffs, f.var());
        return sqf_rec(fq, &root, outer_mult * p, out);
    }
    let mut c = f.gcd(fq, &df);
    let mut w = f.exact_div(fq, &c).unwrap();
    let mut i = 1usize;
    while !w.is_constant() {
        let y = w.gcd(fq, &c);
        let layer = w.exact_div(fq, &y).unwrap();
        if !layer.is_constant() {
            out.push((layer, i * outer_mult));
        }
        c = c.exact_div(fq, &y).unwrap();
        w = y;
        i += 1;
    }
    if !c.is_constant() {
        sqf_rec(fq, &c, outer_mult, out)?;
    }
    Ok(())
}

/// Splits monic `f = s * t` with s squarefree, gcd(s, t) = 1, and every
/// irreducible factor of t of multiplicity >= 2 in f.
pub fn squarefree_split(fq: &Fq, f: &UniPoly) -> Result<(UniPoly, UniPoly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    let decomp = squarefree_decomposition(fq, f)?;
    let mut s = UniPoly::one(fq, f.var());
    for (g, e) in &decomp {
        if *e == 1 {
            s = s.mul(fq, g);
        }
    }
    let t = f.exact_div(fq, &s).unwrap();
    Ok((s, t))
}

/// Distinct-degree splitting of a monic squarefree polynomial: returns
/// (product of all irreducible factors of degree d, d) pairs, d increasing.
pub fn distinct_degree_split(fq: &Fq, f: &UniPoly) -> Vec<(UniPoly, usize)> {
    debug_assert!(f.is_monic());
    let var = f.var();
    let mut out = Vec::new();
    let mut rem = f.clone();
    let x = UniPoly::var_poly(fq, var);
    let mut h = x.rem(fq, &rem).unwrap();
    let mut d = 0usize;
    while !rem.is_constant() {
        d += 1;
        if 2 * d > rem.deg() {
            let deg = rem.deg();
            out.push((rem, deg));
            break;
        }
        h = powmod(fq, &h, fq.q() as u128, &rem);
        let g = h.sub(fq, &x).gcd(fq, &rem);
        if !g.is_constant() {
            out.push((g.clone(), d));
            rem = rem.exact_div(fq, &g).unwrap();
            h = h.rem(fq, &rem).unwrap();
        }
    }
    out
}

/// Equal-degree splitting: factors a monic squarefree product of degree-d
/// irreducibles. Deterministic divisor scan below a size threshold,
/// Cantor-Zassenhaus otherwise.
pub fn equal_degree_split<R: rand::Rng + ?Sized>(
    fq: &Fq,
    f: &UniPoly,
    d: usize,
    rng: &mut R,
) -> Vec<UniPoly> {
    debug_assert!(f.is_monic());
    debug_assert_eq!(f.deg() % d, 0);
    if f.deg() == d {
        return vec![f.clone()];
    }
    let candidates = (fq.q() as u128).checked_pow(d as u32);
    if let Some(c) = candidates {
        if c <= EDS_DETERMINISTIC_CAP as u128 {
            return eds_deterministic(fq, f, d);
        }
    }
    eds_random(fq, f, d, rng)
}

fn eds_deterministic(fq: &Fq, f: &UniPoly, d: usize) -> Vec<UniPoly> {
    let var = f.var();
    let mut rem = f.clone();
    let mut out = Vec::new();
    let total = (fq.q() as u128).pow(d as u32);
    let mut idx: u128 = 0;
    while rem.deg() > d {
        debug_assert!(idx < total);
        // monic candidate of degree d from digit expansion
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut v = idx;
        for _ in 0..d {
            coeffs.push(fq.elem_from_index((v % fq.q() as u128) as u64));
            v /= fq.q() as u128;
        }
        coeffs.push(fq.one());
        let cand = UniPoly::new(coeffs, var);
        if let Some(q) = rem.exact_div(fq, &cand) {
            out.push(cand);
            rem = q;
            continue; // same candidate cannot divide twice (squarefree)
        }
        idx += 1;
    }
    out.push(rem);
    out
}

fn eds_random<R: rand::Rng + ?Sized>(fq: &Fq, f: &UniPoly, d: usize, rng: &mut R) -> Vec<UniPoly> {
    if f.deg() == d {
        return vec![f.clone()];
    }
    let var = f.var();
    loop {
        let r = random_poly_deg_below(fq, f.deg(), rng, var);
        if r.is_constant() {
            continue;
        }
        let g0 = r.gcd(fq, f);
        if !g0.is_constant() && g0.deg() < f.deg() {
            let rest = f.exact_div(fq, &g0).unwrap();
            let mut out = eds_random(fq, &g0, d, rng);
            out.extend(eds_random(fq, &rest, d, rng));
            return out;
        }
        let split = if fq.p() == 2 {
            // Trace from F_{2^{k d}} to F_2: sum of r^{2^j} over j < k*d.
            let m = fq.k() * d;
            let mut acc = r.rem(fq, f).unwrap();
            let mut cur = acc.clone();
            for _ in 1..m {
                cur = cur.mul(fq, &cur).rem(fq, f).unwrap();
                acc = acc.add(fq, &cur);
            }
            acc
        } else {
            // r^{(q^d - 1)/2} via the norm chain r^{1 + q + ... + q^{d-1}}
            let mut s = r.rem(fq, f).unwrap();
            for _ in 1..d {
                s = powmod(fq, &s, fq.q() as u128, f).mul(fq, &r).rem(fq, f).unwrap();
            }
            let t = powmod(fq, &s, ((fq.q() - 1) / 2) as u128, f);
            t.sub(fq, &UniPoly::one(fq, var))
        };
        let g = split.gcd(fq, f);
        if !g.is_constant() && g.deg() < f.deg() {
            let rest = f.exact_div(fq, &g).unwrap();
            let mut out = eds_random(fq, &g, d, rng);
            out.extend(eds_random(fq, &rest, d, rng));
            return out;
        }
    }
}

/// Complete factorization into monic irreducibles with multiplicities.
/// Equal-degree splitting draws from the supplied RNG; the resulting
/// multiset is unique regardless of the stream.
pub fn factor<R: rand::Rng + ?Sized>(fq: &Fq, f: &UniPoly, rng: &mut R) -> Result<Factorization> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let unit = f.lead_coeff().unwrap().clone();
    let monic = f.monic(fq);
    let mut factors: Vec<(UniPoly, usize)> = Vec::new();
    if !monic.is_constant() {
        for (layer, e) in squarefree_decomposition(fq, &monic)? {
            for (prod, d) in distinct_degree_split(fq, &layer) {
                for irr in equal_degree_split(fq, &prod, d, rng) {
                    factors.push((irr, e));
                }
            }
        }
    }
    let mut fac = Factorization { unit, factors };
    fac.sort(fq);
    debug_assert_eq!(fac.product(fq), *f);
    Ok(fac)
}

/// Irreducibility test (no factor extraction, deterministic).
pub fn is_irreducible(fq: &Fq, f: &UniPoly) -> bool {
    if f.is_zero() || f.is_constant() {
        return false;
    }
    if f.deg() == 1 {
        return true;
    }
    let monic = f.monic(fq);
    let df = monic.derivative(fq);
    if df.is_zero() || !monic.gcd(fq, &df).is_constant() {
        return false;
    }
    let split = distinct_degree_split(fq, &monic);
    split.len() == 1 && split[0].1 == monic.deg()
}

/// Moebius function on F_q[x]: (-1)^k on a constant times k distinct primes,
/// 0 when not squarefree.
pub fn mobius(fq: &Fq, g: &UniPoly) -> Result<i8> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let monic = g.monic(fq);
    if monic.is_constant() {
        return Ok(1);
    }
    let decomp = squarefree_decomposition(fq, &monic)?;
    if decomp.iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    let mut k = 0usize;
    for (layer, _) in &decomp {
        for (prod, d) in distinct_degree_split(fq, layer) {
            k += prod.deg() / d;
        }
    }
    Ok(if k % 2 == 0 { 1 } else { -1 })
}

/// Liouville function: (-1)^Omega with Omega counting prime factors with
/// multiplicity. Completely multiplicative.
pub fn liouville(fq: &Fq, g: &UniPoly) -> Result<i8> {
    if g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let monic = g.monic(fq);
    if monic.is_constant() {
        return Ok(1);
    }
    let mut omega = 0usize;
    for (layer, e) in squarefree_decomposition(fq, &monic)? {
        for (prod, d) in distinct_degree_split(fq, &layer) {
            omega += e * (prod.deg() / d);
        }
    }
    Ok(if omega % 2 == 0 { 1 } else { -1 })
}

/// M(n) = sum of mu(h) over monic h of degree n, by direct enumeration.
/// Exists as a cross-check of factor/mobius against the closed form
/// (1, -q, 0, 0, ...).
pub fn mobius_sum(fq: &Fq, n: usize, cap: u64) -> Result<i64> {
    let count = (fq.q() as u128)
        .checked_pow(n as u32)
        .ok_or(Error::CapExceeded { needed: u128::MAX, cap })?;
    if count > cap as u128 {
        return Err(Error::CapExceeded { needed: count, cap });
    }
    let mut sum: i64 = 0;
    for_each_monic_poly(fq, n, Var::Y, |h| {
        sum += mobius(fq, h).unwrap() as i64;
    });
    Ok(sum)
}

/// Factorization type: {degree -> number of irreducible factors of that
/// degree, counted with multiplicity}.
pub fn cycle_type_of(fq: &Fq, f: &UniPoly) -> Result<CycleType> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    let mut ct = CycleType::new();
    for (layer, e) in squarefree_decomposition(fq, f)? {
        for (prod, d) in distinct_degree_split(fq, &layer) {
            ct.add(d, e * (prod.deg() / d));
        }
    }
    Ok(ct)
}

/// Number of monic irreducibles of degree n over F_q:
/// (1/n) * sum over e | n of mu_Z(n/e) q^e.
pub fn count_irreducibles(fq: &Fq, n: usize) -> Result<num::BigUint> {
    if n == 0 {
        return Err(Error::InvalidInput("degree must be >= 1".into()));
    }
    let q = BigInt::from(fq.q());
    let mut sum = BigInt::zero();
    for e in 1..=n {
        if n % e == 0 {
            let mu = mobius_int(n / e);
            if mu != 0 {
                sum += BigInt::from(mu) * num::pow::pow(q.clone(), e);
            }
        }
    }
    let (quot, rem) = num::Integer::div_rem(&sum, &BigInt::from(n));
    debug_assert!(rem.is_zero());
    debug_assert!(!quot.is_negative());
    Ok(quot.to_biguint().unwrap())
}

fn mobius_int(mut n: usize) -> i64 {
    let mut k = 0;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            k += 1;
        }
        d += 1;
    }
    if n > 1 {
        k += 1;
    }
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

// ---------------------------------------------------------------------------
// Resultants and discriminants over the base field.
// ---------------------------------------------------------------------------

/// Standard-convention resultant lc(f)^{deg g} * prod over f-roots of g,
/// via a remainder sequence. Zero when either input is zero.
pub(crate) fn resultant_std(fq: &Fq, f: &UniPoly, g: &UniPoly) -> FieldElem {
    if f.is_zero() || g.is_zero() {
        return fq.zero();
    }
    let mut a = f.clone();
    let mut b = g.clone();
    let mut acc = fq.one();
    loop {
        if b.is_constant() {
            let e = a.degree().unwrap_or(0);
            return fq.mul(&acc, &fq.pow(b.lead_coeff().unwrap(), e as u128));
        }
        let r = a.rem(fq, &b).unwrap();
        if r.is_zero() {
            return fq.zero();
        }
        let da = a.deg();
        let db = b.deg();
        if da % 2 == 1 && db % 2 == 1 {
            acc = fq.neg(&acc);
        }
        let lb = b.lead_coeff().unwrap();
        acc = fq.mul(&acc, &fq.pow(lb, (da - r.deg()) as u128));
        a = b;
        b = r;
    }
}

/// Resultant with the frozen sign convention
/// res(f, g) = lc(g)^{deg f} * prod over g-roots of f,
/// i.e. res(y - a, y - b) = b - a. Errors when both inputs are zero.
pub fn resultant(fq: &Fq, f: &UniPoly, g: &UniPoly) -> Result<FieldElem> {
    if f.is_zero() && g.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.is_zero() || g.is_zero() {
        return Ok(fq.zero());
    }
    let std = resultant_std(fq, f, g);
    if (f.deg() * g.deg()) % 2 == 1 {
        Ok(fq.neg(&std))
    } else {
        Ok(std)
    }
}

/// Discriminant of a monic polynomial: (-1)^{n(n-1)/2} res(f, f'). Equals the
/// squared root-difference product; zero exactly when f is inseparable.
pub fn discriminant(fq: &Fq, f: &UniPoly) -> Result<FieldElem> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let df = f.derivative(fq);
    if df.is_zero() {
        return Ok(fq.zero());
    }
    let n = f.deg();
    let res = resultant_std(fq, f, &df);
    Ok(if (n * (n - 1) / 2) % 2 == 1 {
        fq.neg(&res)
    } else {
        res
    })
}

/// Pellet's identity: for monic squarefree f over odd q,
/// (-1)^{deg f} chi(disc f) equals mu(f) = lambda(f).
pub fn pellet_predict(fq: &Fq, f: &UniPoly) -> Result<i8> {
    if fq.p() == 2 {
        return Err(Error::CharTwoUnsupported);
    }
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if !f.is_monic() {
        return Err(Error::NonMonic);
    }
    if f.is_constant() {
        return Err(Error::ConstantPolynomial);
    }
    let disc = discriminant(fq, f)?;
    if disc.is_zero() {
        return Err(Error::NotSquarefree);
    }
    let chi = fq.quadratic_character(&disc)?;
    Ok(if f.deg() % 2 == 0 { chi } else { -chi })
}

/// Square root in F_q[x] when it exists: leading coefficient must be a
/// square and all factor multiplicities even, detected via squarefree
/// decomposition without full factorization.
pub fn is_perfect_square(fq: &Fq, f: &UniPoly) -> Option<UniPoly> {
    if f.is_zero() {
        return Some(UniPoly::zero(f.var()));
    }
    let lc = f.lead_coeff().unwrap();
    let sqrt_lc = fq.sqrt(lc)?;
    if f.is_constant() {
        return Some(UniPoly::constant(sqrt_lc, f.var()));
    }
    if f.deg() % 2 == 1 {
        return None;
    }
    let monic = f.monic(fq);
    let mut root = UniPoly::constant(sqrt_lc, f.var());
    for (layer, e) in squarefree_decomposition(fq, &monic).ok()? {
        if e % 2 == 1 {
            return None;
        }
        root = root.mul(fq, &layer.pow(fq, e / 2));
    }
    debug_assert_eq!(root.mul(fq, &root), *f);
    Some(root)
}

/// Monic squarefree part (product of the distinct irreducible factors with
/// odd multiplicity), plus the constant and square cofactor:
/// f = a * u * t^2 with u monic squarefree.
pub fn square_class_decompose(fq: &Fq, f: &UniPoly) -> Result<(FieldElem, UniPoly, UniPoly)> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let a = f.lead_coeff().unwrap().clone();
    let monic = f.monic(fq);
    let mut u = UniPoly::one(fq, f.var());
    let mut t = UniPoly::one(fq, f.var());
    if !monic.is_constant() {
        for (layer, e) in squarefree_decomposition(fq, &monic)? {
            if e % 2 == 1 {
                u = u.mul(fq, &layer);
            }
            t = t.mul(fq, &layer.pow(fq, e / 2));
        }
    }
    debug_assert_eq!(
        UniPoly::constant(a.clone(), f.var())
            .mul(fq, &u)
            .mul(fq, &t)
            .mul(fq, &t),
        *f
    );
    Ok((a, u, t))
}

// ---------------------------------------------------------------------------
// Enumeration and sampling.
// ---------------------------------------------------------------------------

/// Visits all monic polynomials of degree exactly n (q^n of them) in
/// canonical odometer order.
pub fn for_each_monic_poly(fq: &Fq, n: usize, var: Var, mut visit: impl FnMut(&UniPoly)) {
    let q = fq.q() as u128;
    let total = q.pow(n as u32);
    let mut idx: u128 = 0;
    while idx < total {
        let mut coeffs = Vec::with_capacity(n + 1);
        let mut v = idx;
        for _ in 0..n {
            coeffs.push(fq.elem_from_index((v % q) as u64));
            v /= q;
        }
        coeffs.push(fq.one());
        let poly = UniPoly { coeffs, var };
        visit(&poly);
        idx += 1;
    }
}

/// Visits all polynomials of degree <= d (q^{d+1}, including zero).
pub fn for_each_poly_deg_at_most(fq: &Fq, d: usize, var: Var, mut visit: impl FnMut(&UniPoly)) {
    let q = fq.q() as u128;
    let total = q.pow(d as u32 + 1);
    let mut idx: u128 = 0;
    while idx < total {
        let mut coeffs = Vec::with_capacity(d + 1);
        let mut v = idx;
        for _ in 0..=d {
            coeffs.push(fq.elem_from_index((v % q) as u64));
            v /= q;
        }
        let poly = UniPoly::new(coeffs, var);
        visit(&poly);
        idx += 1;
    }
}

/// Uniform polynomial with each of the d+1 coefficients drawn independently.
pub fn random_poly_deg_at_most<R: rand::Rng + ?Sized>(
    fq: &Fq,
    d: usize,
    rng: &mut R,
    var: Var,
) -> UniPoly {
    let coeffs = (0..=d).map(|_| fq.random_elem(rng)).collect();
    UniPoly::new(coeffs, var)
}

fn random_poly_deg_below<R: rand::Rng + ?Sized>(
    fq: &Fq,
    deg: usize,
    rng: &mut R,
    var: Var,
) -> UniPoly {
    random_poly_deg_at_most(fq, deg.saturating_sub(1), rng, var)
}

/// Uniform monic polynomial of degree exactly n.
pub fn random_monic_poly<R: rand::Rng + ?Sized>(
    fq: &Fq,
    n: usize,
    rng: &mut R,
    var: Var,
) -> UniPoly {
    let mut coeffs: Vec<FieldElem> = (0..n).map(|_| fq.random_elem(rng)).collect();
    coeffs.push(fq.one());
    UniPoly { coeffs, var }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fq(p: u64, k: usize) -> Fq {
        Fq::new(p, k, None).unwrap()
    }

    fn poly(fq: &Fq, cs: &[u64]) -> UniPoly {
        UniPoly::new(cs.iter().map(|&c| fq.from_u64(c)).collect(), Var::Y)
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(0x5eed)
    }

    #[test]
    fn factor_examples() {
        let f2 = fq(2, 1);
        // y^2 + y = y (y + 1)
        let f = poly(&f2, &[0, 1, 1]);
        let fac = factor(&f2, &f, &mut rng()).unwrap();
        assert_eq!(fac.factors.len(), 2);
        assert!(fac.factors.iter().all(|(_, e)| *e == 1));
        // y^2 + 1 = (y + 1)^2 in char 2
        let f = poly(&f2, &[1, 0, 1]);
        let fac = factor(&f2, &f, &mut rng()).unwrap();
        assert_eq!(fac.factors, vec![(poly(&f2, &[1, 1]), 2)]);
        // y^2 + 1 irreducible over F_3
        let f3 = fq(3, 1);
        let f = poly(&f3, &[1, 0, 1]);
        let fac = factor(&f3, &f, &mut rng()).unwrap();
        assert_eq!(fac.factors, vec![(f.clone(), 1)]);
        assert!(is_irreducible(&f3, &f));
    }

    #[test]
    fn factor_reconstruction_random() {
        let mut r = rng();
        for (p, k) in [(2, 1), (3, 1), (5, 1), (3, 2), (2, 2)] {
            let f = fq(p, k);
            for n in 1..=8 {
                for _ in 0..40 {
                    let g = random_monic_poly(&f, n, &mut r, Var::Y);
                    let fac = factor(&f, &g, &mut r).unwrap();
                    assert_eq!(fac.product(&f), g);
                    for (irr, _) in &fac.factors {
                        assert!(is_irreducible(&f, irr), "claimed factor not irreducible");
                    }
                }
            }
        }
    }

    #[test]
    fn squarefree_split_examples() {
        let f3 = fq(3, 1);
        // y^2 (y+1): s = y+1, t = y^2
        let f = poly(&f3, &[0, 1]).pow(&f3, 2).mul(&f3, &poly(&f3, &[1, 1]));
        let (s, t) = squarefree_split(&f3, &f).unwrap();
        assert_eq!(s, poly(&f3, &[1, 1]));
        assert_eq!(t, poly(&f3, &[0, 0, 1]));
        // squarefree f -> (f, 1)
        let f = poly(&f3, &[1, 0, 1]);
        let (s, t) = squarefree_split(&f3, &f).unwrap();
        assert_eq!(s, f);
        assert!(t.is_constant());
        // (y+1)^2 -> (1, (y+1)^2)
        let f = poly(&f3, &[1, 1]).pow(&f3, 2);
        let (s, t) = squarefree_split(&f3, &f).unwrap();
        assert!(s.is_constant());
        assert_eq!(t, f);
        // gcd(s, t) = 1 on random inputs, including p-th powers
        let mut r = rng();
        for _ in 0..100 {
            let g = random_monic_poly(&f3, 9, &mut r, Var::Y);
            let (s, t) = squarefree_split(&f3, &g).unwrap();
            assert_eq!(s.mul(&f3, &t), g);
            assert!(s.gcd(&f3, &t).is_constant());
        }
    }

    #[test]
    fn sqf_decomposition_pth_powers() {
        let f3 = fq(3, 1);
        // (y+1)^3 has vanishing derivative
        let f = poly(&f3, &[1, 1]).pow(&f3, 3);
        let d = squarefree_decomposition(&f3, &f).unwrap();
        assert_eq!(d, vec![(poly(&f3, &[1, 1]), 3)]);
        let f = poly(&f3, &[1, 1]).pow(&f3, 6).mul(&f3, &poly(&f3, &[2, 1]));
        let d = squarefree_decomposition(&f3, &f).unwrap();
        assert_eq!(d, vec![(poly(&f3, &[2, 1]), 1), (poly(&f3, &[1, 1]), 6)]);
    }

    #[test]
    fn mobius_examples() {
        let f3 = fq(3, 1);
        assert_eq!(mobius(&f3, &poly(&f3, &[0, 1])).unwrap(), -1);
        let f = poly(&f3, &[0, 1]).mul(&f3, &poly(&f3, &[1, 1]));
        assert_eq!(mobius(&f3, &f).unwrap(), 1);
        let f = poly(&f3, &[1, 1]).pow(&f3, 2);
        assert_eq!(mobius(&f3, &f).unwrap(), 0);
        assert_eq!(mobius(&f3, &UniPoly::zero(Var::Y)), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn liouville_examples() {
        let f3 = fq(3, 1);
        assert_eq!(liouville(&f3, &poly(&f3, &[0, 0, 1])).unwrap(), 1);
        let f2 = fq(2, 1);
        assert_eq!(liouville(&f2, &poly(&f2, &[1, 1, 0, 1])).unwrap(), -1);
        // multiplicativity: lambda(y * (y+1)) = lambda(y) lambda(y+1)
        let a = poly(&f3, &[0, 1]);
        let b = poly(&f3, &[1, 1]);
        assert_eq!(
            liouville(&f3, &a.mul(&f3, &b)).unwrap(),
            liouville(&f3, &a).unwrap() * liouville(&f3, &b).unwrap()
        );
    }

    #[test]
    fn mobius_equals_liouville_on_squarefree() {
        for q in [2u64, 3] {
            let f = fq(q, 1);
            for n in 1..=4 {
                for_each_monic_poly(&f, n, Var::Y, |g| {
                    let m = mobius(&f, g).unwrap();
                    if m != 0 {
                        assert_eq!(m, liouville(&f, g).unwrap());
                    }
                });
            }
        }
    }

    #[test]
    fn mobius_sum_closed_form() {
        for q in [2u64, 3, 5] {
            let f = fq(q, 1);
            assert_eq!(mobius_sum(&f, 0, DEFAULT_ENUM_CAP).unwrap(), 1);
            assert_eq!(mobius_sum(&f, 1, DEFAULT_ENUM_CAP).unwrap(), -(q as i64));
            for n in 2..=4 {
                assert_eq!(mobius_sum(&f, n, DEFAULT_ENUM_CAP).unwrap(), 0);
            }
        }
        let f5 = fq(5, 1);
        assert!(matches!(
            mobius_sum(&f5, 9, 1000),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn resultant_examples() {
        let f7 = fq(7, 1);
        // res(y - a, y - b) = b - a
        let a = f7.from_u64(2);
        let b = f7.from_u64(5);
        let fa = UniPoly::new(vec![f7.neg(&a), f7.one()], Var::Y);
        let fb = UniPoly::new(vec![f7.neg(&b), f7.one()], Var::Y);
        assert_eq!(resultant(&f7, &fa, &fb).unwrap(), f7.sub(&b, &a));
        // res(f, c) = c^{deg f}
        let f = poly(&f7, &[1, 2, 0, 1]);
        let c = UniPoly::constant(f7.from_u64(3), Var::Y);
        assert_eq!(
            resultant(&f7, &f, &c).unwrap(),
            f7.pow(&f7.from_u64(3), 3)
        );
        // res(y^2 + 1, y + 1) = 2 over F_3
        let f3 = fq(3, 1);
        assert_eq!(
            resultant(&f3, &poly(&f3, &[1, 0, 1]), &poly(&f3, &[1, 1])).unwrap(),
            f3.from_u64(2)
        );
        assert_eq!(
            resultant(&f3, &UniPoly::zero(Var::Y), &UniPoly::zero(Var::Y)),
            Err(Error::ZeroPolynomial)
        );
    }

    #[test]
    fn discriminant_examples() {
        let f7 = fq(7, 1);
        // disc(y^2 + c) = -4c
        for c in 0..7 {
            let f = poly(&f7, &[c, 0, 1]);
            let expect = f7.neg(&f7.from_u64(4 * c % 7));
            assert_eq!(discriminant(&f7, &f).unwrap(), expect);
        }
        // disc(y^2 + y + 1) = -3 = 2 over F_5
        let f5 = fq(5, 1);
        assert_eq!(
            discriminant(&f5, &poly(&f5, &[1, 1, 1])).unwrap(),
            f5.from_u64(2)
        );
        // disc(y^2) = 0
        assert!(discriminant(&f5, &poly(&f5, &[0, 0, 1])).unwrap().is_zero());
        // non-monic rejected
        assert_eq!(
            discriminant(&f5, &poly(&f5, &[1, 0, 2])),
            Err(Error::NonMonic)
        );
        // disc = 0 iff gcd(f, f') nonconstant (exhaustive small grid)
        for q in [3u64, 5] {
            let f = fq(q, 1);
            for n in 1..=3 {
                for_each_monic_poly(&f, n, Var::Y, |g| {
                    let d = discriminant(&f, g).unwrap();
                    let sep = g.gcd(&f, &g.derivative(&f)).is_constant();
                    assert_eq!(d.is_zero(), !sep, "q={q} g={g:?}");
                });
            }
        }
    }

    #[test]
    fn pellet_examples() {
        let f3 = fq(3, 1);
        let f = poly(&f3, &[1, 0, 1]); // y^2 + 1
        assert_eq!(pellet_predict(&f3, &f).unwrap(), -1);
        assert_eq!(mobius(&f3, &f).unwrap(), -1);
        let f = poly(&f3, &[0, 1]).mul(&f3, &poly(&f3, &[1, 1]));
        assert_eq!(pellet_predict(&f3, &f).unwrap(), 1);
        assert_eq!(mobius(&f3, &f).unwrap(), 1);
        let f2 = fq(2, 1);
        assert_eq!(
            pellet_predict(&f2, &poly(&f2, &[1, 1])),
            Err(Error::CharTwoUnsupported)
        );
        assert_eq!(
            pellet_predict(&f3, &poly(&f3, &[1, 1]).pow(&f3, 2)),
            Err(Error::NotSquarefree)
        );
    }

    #[test]
    fn perfect_square_examples() {
        let f3 = fq(3, 1);
        let g = poly(&f3, &[1, 1]);
        assert_eq!(is_perfect_square(&f3, &g.pow(&f3, 2)).unwrap(), g);
        assert_eq!(is_perfect_square(&f3, &poly(&f3, &[1, 0, 1])), None);
        let f5 = fq(5, 1);
        let f = poly(&f5, &[0, 0, 4]); // 4y^2
        assert_eq!(is_perfect_square(&f5, &f).unwrap(), poly(&f5, &[0, 2]));
    }

    #[test]
    fn cycle_type_examples() {
        let f2 = fq(2, 1);
        let f = poly(&f2, &[1, 1, 0, 1]); // irreducible cubic
        assert_eq!(cycle_type_of(&f2, &f).unwrap(), CycleType::from_parts([(3, 1)]));
        let f = poly(&f2, &[0, 1])
            .mul(&f2, &poly(&f2, &[1, 1]))
            .mul(&f2, &poly(&f2, &[1, 1, 1]));
        assert_eq!(
            cycle_type_of(&f2, &f).unwrap(),
            CycleType::from_parts([(1, 2), (2, 1)])
        );
        let f3 = fq(3, 1);
        let f = poly(&f3, &[1, 1]).pow(&f3, 2);
        assert_eq!(cycle_type_of(&f3, &f).unwrap(), CycleType::from_parts([(1, 2)]));
    }

    #[test]
    fn count_irreducibles_examples() {
        use num::BigUint;
        let f2 = fq(2, 1);
        assert_eq!(count_irreducibles(&f2, 1).unwrap(), BigUint::from(2u32));
        assert_eq!(count_irreducibles(&f2, 3).unwrap(), BigUint::from(2u32));
        let f3 = fq(3, 1);
        assert_eq!(count_irreducibles(&f3, 2).unwrap(), BigUint::from(3u32));
        assert!(count_irreducibles(&f3, 0).is_err());
        // cross-check against exhaustive factoring for q^n <= 10^4
        for (q, nmax) in [(2u64, 13usize), (3, 8), (5, 5)] {
            let f = fq(q, 1);
            for n in 1..=nmax {
                if (q as u128).pow(n as u32) > 10_000 {
                    break;
                }
                let mut count = 0u64;
                for_each_monic_poly(&f, n, Var::Y, |g| {
                    if is_irreducible(&f, g) {
                        count += 1;
                    }
                });
                assert_eq!(count_irreducibles(&f, n).unwrap(), BigUint::from(count));
            }
        }
    }

    #[test]
    fn factor_over_extension_field() {
        let f9 = fq(3, 2);
        let mut r = rng();
        for n in 1..=6 {
            for _ in 0..20 {
                let g = random_monic_poly(&f9, n, &mut r, Var::Y);
                let fac = factor(&f9, &g, &mut r).unwrap();
                assert_eq!(fac.product(&f9), g);
            }
        }
        // a^q = a means y^9 - y splits into all 9 linear factors over F_9
        let mut coeffs = vec![f9.zero(); 10];
        coeffs[1] = f9.neg(&f9.one());
        coeffs[9] = f9.one();
        let g = UniPoly::new(coeffs, Var::Y);
        let fac = factor(&f9, &g, &mut r).unwrap();
        assert_eq!(fac.factors.len(), 9);
        assert!(fac.factors.iter().all(|(f, e)| f.deg() == 1 && *e == 1));
    }

    #[test]
    fn char2_extension_factor() {
        let f4 = fq(2, 2);
        let mut r = rng();
        for n in 1..=5 {
            for _ in 0..20 {
                let g = random_monic_poly(&f4, n, &mut r, Var::Y);
                let fac = factor(&f4, &g, &mut r).unwrap();
                assert_eq!(fac.product(&f4), g);
                for (irr, _) in &fac.factors {
                    assert!(is_irreducible(&f4, irr));
                }
            }
        }
    }
}
