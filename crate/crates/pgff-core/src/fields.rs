//! Exact arithmetic in prime fields F_p and extensions F_{p^k}.
//!
//! A field is described by an [`Fq`] value (the `FieldSpec`): characteristic
//! `p`, extension degree `k`, and for `k > 1` a monic irreducible modulus over
//! F_p. Elements are coefficient vectors in the power basis of the modulus.
//! All operations are pure; `Fq` is immutable after construction and can be
//! shared freely.

use crate::error::{Error, Result};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use smallvec::{smallvec, SmallVec};

/// Inline capacity covers every field exercised by the experiments
/// (extension degree over F_p up to 4 without spilling).
pub type ElemCoeffs = SmallVec<[u64; 4]>;

/// An element of F_{p^k}, as `k` residues mod p in the power basis of the
/// modulus (coordinate `i` multiplies `t^i`).
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct FieldElem {
    pub(crate) coeffs: ElemCoeffs,
}

impl FieldElem {
    /// Raw power-basis coordinates, low to high.
    pub fn coords(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// Elements serialize as a bare integer for prime fields and as the
/// low-to-high coordinate array otherwise.
impl Serialize for FieldElem {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.coeffs.len() == 1 {
            s.serialize_u64(self.coeffs[0])
        } else {
            let mut seq = s.serialize_seq(Some(self.coeffs.len()))?;
            for c in &self.coeffs {
                seq.serialize_element(c)?;
            }
            seq.end()
        }
    }
}

/// Description of F_{p^k}: the carrier of `q`, `p`, Frobenius and the
/// quadratic character.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fq {
    p: u64,
    k: usize,
    q: u64,
    /// Monic irreducible of degree k over F_p, low to high, length k+1.
    /// Present iff k > 1.
    modulus: Option<Vec<u64>>,
}

impl Fq {
    /// Builds F_{p^k}. When `k > 1` and no modulus is given, the
    /// lexicographically smallest monic irreducible of degree `k` over F_p
    /// (coefficients compared low-to-high) is chosen, so fields are
    /// reproducible across runs.
    pub fn new(p: u64, k: usize, modulus: Option<&[u64]>) -> Result<Fq> {
        if !is_prime_u64(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        let mut q: u64 = 1;
        for _ in 0..k {
            q = q.checked_mul(p).ok_or(Error::FieldTooLarge)?;
        }
        let modulus = match (k, modulus) {
            (1, None) => None,
            (1, Some(_)) => {
                return Err(Error::InvalidInput(
                    "modulus only applies to extension fields (k > 1)".into(),
                ))
            }
            (_, Some(m)) => {
                if m.len() != k + 1 || m[k] != 1 || m.iter().any(|&c| c >= p) {
                    return Err(Error::BadModulus);
                }
                if !fp_poly_is_irreducible(p, m) {
                    return Err(Error::ReducibleModulus);
                }
                Some(m.to_vec())
            }
            (_, None) => Some(default_modulus(p, k)),
        };
        Ok(Fq { p, k, q, modulus })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Field size q = p^k.
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> Option<&[u64]> {
        self.modulus.as_deref()
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem {
            coeffs: smallvec![0; self.k],
        }
    }

    pub fn one(&self) -> FieldElem {
        self.from_u64(1)
    }

    /// The image of the integer `c` in the prime subfield.
    pub fn from_u64(&self, c: u64) -> FieldElem {
        let mut coeffs: ElemCoeffs = smallvec![0; self.k];
        coeffs[0] = c % self.p;
        FieldElem { coeffs }
    }

    /// Element from power-basis coordinates (low to high, reduced mod p;
    /// shorter slices are zero-padded).
    pub fn from_coords(&self, coords: &[u64]) -> Result<FieldElem> {
        if coords.len() > self.k {
            return Err(Error::InvalidInput(format!(
                "element has {} coordinates but k = {}",
                coords.len(),
                self.k
            )));
        }
        let mut coeffs: ElemCoeffs = smallvec![0; self.k];
        for (i, &c) in coords.iter().enumerate() {
            coeffs[i] = c % self.p;
        }
        Ok(FieldElem { coeffs })
    }

    /// The generator t of the power basis (only meaningful for k > 1).
    pub fn gen(&self) -> Result<FieldElem> {
        if self.k == 1 {
            return Err(Error::InvalidInput(
                "prime field has no power-basis generator t".into(),
            ));
        }
        self.from_coords(&[0, 1])
    }

    /// Canonical index of an element: its base-p digit expansion, coordinate
    /// 0 least significant. Enumerating indices `0..q` walks the canonical
    /// element order used for deterministic searches.
    pub fn elem_index(&self, a: &FieldElem) -> u64 {
        let mut idx = 0u64;
        for &c in a.coeffs.iter().rev() {
            idx = idx * self.p + c;
        }
        idx
    }

    pub fn elem_from_index(&self, mut idx: u64) -> FieldElem {
        debug_assert!(idx < self.q);
        let mut coeffs: ElemCoeffs = smallvec![0; self.k];
        for c in coeffs.iter_mut() {
            *c = idx % self.p;
            idx /= self.p;
        }
        FieldElem { coeffs }
    }

    /// All field elements in canonical order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        (0..self.q).map(move |i| self.elem_from_index(i))
    }

    pub fn random_elem<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> FieldElem {
        self.elem_from_index(rng.gen_range(0..self.q))
    }

    pub fn add(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        debug_assert_eq!(a.coeffs.len(), self.k);
        debug_assert_eq!(b.coeffs.len(), self.k);
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(&x, &y)| {
                let s = x + y;
                if s >= self.p {
                    s - self.p
                } else {
                    s
                }
            })
            .collect();
        FieldElem { coeffs }
    }

    pub fn neg(&self, a: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| if x == 0 { 0 } else { self.p - x })
            .collect();
        FieldElem { coeffs }
    }

    pub fn sub(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let coeffs = a
            .coeffs
            .iter()
            .zip(b.coeffs.iter())
            .map(|(&x, &y)| if x >= y { x - y } else { x + self.p - y })
            .collect();
        FieldElem { coeffs }
    }

    pub fn mul(&self, a: &FieldElem, b: &FieldElem) -> FieldElem {
        let p = self.p as u128;
        if self.k == 1 {
            let v = (a.coeffs[0] as u128 * b.coeffs[0] as u128) % p;
            return FieldElem {
                coeffs: smallvec![v as u64],
            };
        }
        // Schoolbook product, then reduction by the monic modulus.
        let k = self.k;
        let mut prod: SmallVec<[u128; 8]> = smallvec![0; 2 * k - 1];
        for i in 0..k {
            let ai = a.coeffs[i] as u128;
            if ai == 0 {
                continue;
            }
            for j in 0..k {
                prod[i + j] += ai * b.coeffs[j] as u128;
            }
        }
        for v in prod.iter_mut() {
            *v %= p;
        }
        let m = self.modulus.as_ref().unwrap();
        for i in (k..2 * k - 1).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            prod[i] = 0;
            for j in 0..k {
                if m[j] != 0 {
                    // t^i = t^{i-k} * t^k = -t^{i-k} * (m_0 + ... + m_{k-1} t^{k-1})
                    let sub = c * m[j] as u128 % p;
                    prod[i - k + j] = (prod[i - k + j] + p - sub) % p;
                }
            }
        }
        let coeffs = prod[..k].iter().map(|&v| v as u64).collect();
        FieldElem { coeffs }
    }

    pub fn mul_scalar(&self, a: &FieldElem, c: u64) -> FieldElem {
        let c = c % self.p;
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| ((x as u128 * c as u128) % self.p as u128) as u64)
            .collect();
        FieldElem { coeffs }
    }

    pub fn pow(&self, a: &FieldElem, mut e: u128) -> FieldElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Multiplicative inverse. Errors on zero.
    pub fn inv(&self, a: &FieldElem) -> Result<FieldElem> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if self.k == 1 {
            let (g, x, _) = ext_gcd(a.coeffs[0] as i128, self.p as i128);
            debug_assert_eq!(g, 1);
            let v = x.rem_euclid(self.p as i128) as u64;
            return Ok(FieldElem {
                coeffs: smallvec![v],
            });
        }
        // Extended Euclid in F_p[t] against the modulus.
        let m = self.modulus.as_ref().unwrap();
        let inv = fp_poly_inv_mod(self.p, &a.coeffs, m).ok_or(Error::DivisionByZero)?;
        let mut coeffs: ElemCoeffs = smallvec![0; self.k];
        for (i, &c) in inv.iter().enumerate() {
            coeffs[i] = c;
        }
        Ok(FieldElem { coeffs })
    }

    pub fn div(&self, a: &FieldElem, b: &FieldElem) -> Result<FieldElem> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Iterated absolute Frobenius a^{p^j}. A field automorphism; the
    /// identity for j ≡ 0 (mod k).
    pub fn frobenius(&self, a: &FieldElem, j: usize) -> FieldElem {
        let j = j % self.k;
        let mut r = a.clone();
        for _ in 0..j {
            r = self.pow(&r, self.p as u128);
        }
        r
    }

    /// Quadratic character: 0 for 0, 1 for nonzero squares, -1 otherwise,
    /// computed as a^{(q-1)/2}. Rejects characteristic 2, where every
    /// element is a square and the character degenerates.
    pub fn quadratic_character(&self, a: &FieldElem) -> Result<i8> {
        if self.p == 2 {
            return Err(Error::CharTwoUnsupported);
        }
        if a.is_zero() {
            return Ok(0);
        }
        let v = self.pow(a, ((self.q - 1) / 2) as u128);
        if v == self.one() {
            Ok(1)
        } else {
            debug_assert_eq!(v, self.neg(&self.one()));
            Ok(-1)
        }
    }

    /// Canonical square root: the root with the smaller canonical index,
    /// `None` for non-squares. In characteristic 2 squaring is bijective and
    /// the root is a^{q/2}.
    pub fn sqrt(&self, a: &FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            return Some(self.zero());
        }
        if self.p == 2 {
            return Some(self.pow(a, (self.q / 2) as u128));
        }
        if self.quadratic_character(a) != Ok(1) {
            return None;
        }
        // Fields in play are small; a canonical-order scan keeps the witness
        // deterministic without extra number theory.
        for idx in 1..self.q {
            let c = self.elem_from_index(idx);
            if self.mul(&c, &c) == *a {
                return Some(c);
            }
        }
        unreachable!("quadratic character said square");
    }

    /// Renders an element as an integer (prime field) or a `t`-polynomial.
    pub fn elem_to_string(&self, a: &FieldElem) -> String {
        if self.k == 1 {
            return a.coeffs[0].to_string();
        }
        let mut terms: Vec<String> = Vec::new();
        for i in (0..self.k).rev() {
            let c = a.coeffs[i];
            if c == 0 {
                continue;
            }
            let t = match (i, c) {
                (0, _) => c.to_string(),
                (1, 1) => "t".into(),
                (1, _) => format!("{c}*t"),
                (_, 1) => format!("t^{i}"),
                (_, _) => format!("{c}*t^{i}"),
            };
            terms.push(t);
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ")
        }
    }
}

/// An extension F_{q^s} of a base field F_q = F_{p^k}, realized as
/// F_{p^{ks}} together with the embedding of the base. Probe evaluation and
/// norm computations run through this.
#[derive(Clone, Debug)]
pub struct Extension {
    base: Fq,
    big: Fq,
    s: usize,
    /// Images in `big` of the base power basis 1, t, ..., t^{k-1}.
    base_basis: Vec<FieldElem>,
}

impl Extension {
    pub fn new(base: &Fq, s: usize) -> Result<Extension> {
        if s == 0 {
            return Err(Error::InvalidInput("extension degree must be >= 1".into()));
        }
        if s == 1 {
            let base_basis = (0..base.k())
                .map(|i| {
                    let mut coords = vec![0u64; i + 1];
                    coords[i] = 1;
                    base.from_coords(&coords).unwrap()
                })
                .collect();
            return Ok(Extension {
                base: base.clone(),
                big: base.clone(),
                s,
                base_basis,
            });
        }
        let big = Fq::new(base.p(), base.k() * s, None)?;
        let gen_img = if base.k() == 1 {
            big.one()
        } else {
            // Deterministic root of the base modulus in the big field: first
            // root in canonical order. The modulus splits completely here.
            let m = base.modulus().unwrap();
            let mut found = None;
            for idx in 0..big.q() {
                let c = big.elem_from_index(idx);
                let mut acc = big.zero();
                for &mc in m.iter().rev() {
                    acc = big.mul(&acc, &c);
                    acc = big.add(&acc, &big.from_u64(mc));
                }
                if acc.is_zero() {
                    found = Some(c);
                    break;
                }
            }
            found.ok_or_else(|| Error::Internal("base modulus has no root in extension".into()))?
        };
        let mut base_basis = Vec::with_capacity(base.k());
        let mut pw = big.one();
        for _ in 0..base.k() {
            base_basis.push(pw.clone());
            pw = big.mul(&pw, &gen_img);
        }
        Ok(Extension {
            base: base.clone(),
            big,
            s,
            base_basis,
        })
    }

    pub fn base(&self) -> &Fq {
        &self.base
    }

    /// The realized field F_{q^s}.
    pub fn big(&self) -> &Fq {
        &self.big
    }

    pub fn degree(&self) -> usize {
        self.s
    }

    pub fn embed(&self, a: &FieldElem) -> FieldElem {
        let mut acc = self.big.zero();
        for (i, b) in self.base_basis.iter().enumerate() {
            if a.coeffs[i] != 0 {
                acc = self.big.add(&acc, &self.big.mul_scalar(b, a.coeffs[i]));
            }
        }
        acc
    }

    /// Inverse of `embed` where defined: expresses `a` in the embedded base
    /// field, `None` if `a` lies outside it.
    pub fn unembed(&self, a: &FieldElem) -> Option<FieldElem> {
        if self.s == 1 {
            return Some(a.clone());
        }
        let p = self.base.p();
        let kk = self.big.k();
        let k = self.base.k();
        // Solve sum_i c_i * base_basis[i] = a over F_p by Gaussian elimination
        // on the (kk x k) coordinate matrix.
        let mut mat: Vec<Vec<u64>> = (0..kk)
            .map(|row| {
                let mut r: Vec<u64> = (0..k).map(|col| self.base_basis[col].coeffs[row]).collect();
                r.push(a.coeffs[row]);
                r
            })
            .collect();
        let mut pivots: Vec<usize> = Vec::new();
        let mut row = 0usize;
        for col in 0..k {
            let Some(sel) = (row..kk).find(|&r| mat[r][col] != 0) else {
                return None; // basis columns are independent, so this cannot happen
            };
            mat.swap(row, sel);
            let inv = mod_inv_u64(mat[row][col], p);
            for v in mat[row].iter_mut() {
                *v = (*v as u128 * inv as u128 % p as u128) as u64;
            }
            for r in 0..kk {
                if r != row && mat[r][col] != 0 {
                    let f = mat[r][col];
                    for c in 0..=k {
                        let sub = mat[row][c] as u128 * f as u128 % p as u128;
                        mat[r][c] = ((mat[r][c] as u128 + p as u128 - sub) % p as u128) as u64;
                    }
                }
            }
            pivots.push(row);
            row += 1;
        }
        // Rows beyond the pivots must have zero RHS for consistency.
        for r in row..kk {
            if mat[r][k] != 0 {
                return None;
            }
        }
        let coords: Vec<u64> = (0..k).map(|c| mat[pivots[c]][k]).collect();
        Some(self.base.from_coords(&coords).unwrap())
    }

    /// Relative Frobenius x -> x^{q^j} with q the base field size.
    pub fn frobenius_base(&self, a: &FieldElem, j: usize) -> FieldElem {
        let mut r = a.clone();
        for _ in 0..(j % self.s.max(1)) {
            r = self.big.pow(&r, self.base.q() as u128);
        }
        r
    }

    pub fn in_base(&self, a: &FieldElem) -> bool {
        self.frobenius_base(a, 1) == *a
    }
}

/// Probe points per the classification machinery: `m` pairwise non-conjugate
/// elements of F_{q^k} \ F_q whose powers 1, tau, ..., tau^d are linearly
/// independent over F_q. Requires prime k > d.
pub fn find_probe_points(
    base: &Fq,
    k: usize,
    d: usize,
    m: usize,
) -> Result<(Extension, Vec<FieldElem>)> {
    if !is_prime_u64(k as u64) {
        return Err(Error::InvalidInput(format!(
            "probe extension degree {k} must be prime"
        )));
    }
    if k <= d {
        return Err(Error::InvalidInput(format!(
            "need k > d for independent powers (k = {k}, d = {d})"
        )));
    }
    let ext = Extension::new(base, k)?;
    let mut chosen: Vec<FieldElem> = Vec::new();
    let mut seen_orbit_reps: Vec<u64> = Vec::new();
    for idx in 0..ext.big().q() {
        if chosen.len() == m {
            break;
        }
        let tau = ext.big().elem_from_index(idx);
        if ext.in_base(&tau) {
            continue;
        }
        // Orbit representative: smallest canonical index among conjugates.
        let mut rep = idx;
        let mut c = tau.clone();
        for _ in 1..k {
            c = ext.frobenius_base(&c, 1);
            rep = rep.min(ext.big().elem_index(&c));
        }
        if rep != idx || seen_orbit_reps.contains(&rep) {
            continue;
        }
        if !powers_independent_over_base(&ext, &tau, d) {
            continue;
        }
        seen_orbit_reps.push(rep);
        chosen.push(tau);
    }
    if chosen.len() < m {
        return Err(Error::InvalidInput(format!(
            "only {} qualifying Frobenius orbits available, {m} requested",
            chosen.len()
        )));
    }
    Ok((ext, chosen))
}

/// Checks that 1, tau, ..., tau^d are F_q-linearly independent, via the
/// F_p-rank of the vectors { omega * tau^i } with omega running over the
/// embedded base power basis.
fn powers_independent_over_base(ext: &Extension, tau: &FieldElem, d: usize) -> bool {
    let big = ext.big();
    let p = big.p();
    let kk = big.k();
    let kb = ext.base().k();
    let mut rows: Vec<Vec<u64>> = Vec::with_capacity((d + 1) * kb);
    let mut pw = big.one();
    for _ in 0..=d {
        for omega in 0..kb {
            let v = big.mul(&pw, &ext.base_basis[omega]);
            rows.push(v.coeffs.to_vec());
        }
        pw = big.mul(&pw, tau);
    }
    rank_mod_p(&mut rows, p, kk) == (d + 1) * kb
}

fn rank_mod_p(rows: &mut [Vec<u64>], p: u64, width: usize) -> usize {
    let mut rank = 0usize;
    let mut col = 0usize;
    while col < width && rank < rows.len() {
        if let Some(sel) = (rank..rows.len()).find(|&r| rows[r][col] != 0) {
            rows.swap(rank, sel);
            let inv = mod_inv_u64(rows[rank][col], p);
            for v in rows[rank].iter_mut() {
                *v = (*v as u128 * inv as u128 % p as u128) as u64;
            }
            for r in 0..rows.len() {
                if r != rank && rows[r][col] != 0 {
                    let f = rows[r][col];
                    for c in col..width {
                        let sub = rows[rank][c] as u128 * f as u128 % p as u128;
                        rows[r][c] = ((rows[r][c] as u128 + p as u128 - sub) % p as u128) as u64;
                    }
                }
            }
            rank += 1;
        }
        col += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// F_p[t] helpers on raw coefficient vectors (used for modulus validation and
// element inversion; kept separate from UniPoly to avoid a layering cycle).
// ---------------------------------------------------------------------------

fn fp_trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn fp_rem(p: u64, a: &[u64], m: &[u64]) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    fp_trim(&mut r);
    let dm = m.len() - 1;
    let lm_inv = mod_inv_u64(m[dm], p);
    while r.len() > dm {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * lm_inv as u128 % p as u128) as u64;
        for j in 0..=dm {
            let sub = c as u128 * m[j] as u128 % p as u128;
            let idx = dr - dm + j;
            r[idx] = ((r[idx] as u128 + p as u128 - sub) % p as u128) as u64;
        }
        fp_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn fp_mulmod(p: u64, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    fp_rem(p, &prod, m)
}

fn fp_powmod(p: u64, a: &[u64], mut e: u128, m: &[u64]) -> Vec<u64> {
    let mut base = fp_rem(p, a, m);
    let mut acc = vec![1u64];
    while e > 0 {
        if e & 1 == 1 {
            acc = fp_mulmod(p, &acc, &base, m);
        }
        e >>= 1;
        if e > 0 {
            base = fp_mulmod(p, &base, &base, m);
        }
    }
    acc
}

fn fp_gcd(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    fp_trim(&mut a);
    fp_trim(&mut b);
    while !b.is_empty() {
        let r = fp_rem(p, &a, &b);
        a = b;
        b = r;
    }
    if let Some(&lc) = a.last() {
        let inv = mod_inv_u64(lc, p);
        for v in a.iter_mut() {
            *v = (*v as u128 * inv as u128 % p as u128) as u64;
        }
    }
    a
}

/// Rabin irreducibility test for a monic polynomial over F_p.
fn fp_poly_is_irreducible(p: u64, m: &[u64]) -> bool {
    let k = m.len() - 1;
    if k == 0 {
        return false;
    }
    if k == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // t^{p^k} == t mod m
    let mut xp = x.clone();
    for _ in 0..k {
        xp = fp_powmod(p, &xp, p as u128, m);
    }
    let mut diff = xp.clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    fp_trim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    // gcd(t^{p^{k/l}} - t, m) = 1 for each prime l | k
    let mut rem = k;
    let mut l = 2;
    let mut prime_divs = Vec::new();
    while l * l <= rem {
        if rem % l == 0 {
            prime_divs.push(l);
            while rem % l == 0 {
                rem /= l;
            }
        }
        l += 1;
    }
    if rem > 1 {
        prime_divs.push(rem);
    }
    for l in prime_divs {
        let e = k / l;
        let mut xp = x.clone();
        for _ in 0..e {
            xp = fp_powmod(p, &xp, p as u128, m);
        }
        let mut diff = xp;
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        fp_trim(&mut diff);
        let g = fp_gcd(p, &diff, m);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest (low-to-high coefficients) monic irreducible of
/// degree k over F_p.
fn default_modulus(p: u64, k: usize) -> Vec<u64> {
    let mut coeffs = vec![0u64; k + 1];
    coeffs[k] = 1;
    // Odometer with the last low-order coordinate varying slowest would not be
    // lex order; lex order on (c_0, ..., c_{k-1}) advances c_{k-1} fastest.
    let total = p.pow(k as u32);
    for idx in 0..total {
        let mut rem = idx;
        for i in (0..k).rev() {
            coeffs[i] = rem % p;
            rem /= p;
        }
        if fp_poly_is_irreducible(p, &coeffs) {
            return coeffs;
        }
    }
    unreachable!("irreducibles of every degree exist over F_p")
}

fn fp_poly_inv_mod(p: u64, a: &[u64], m: &[u64]) -> Option<Vec<u64>> {
    // Extended Euclid: returns a^{-1} mod m.
    let mut r0: Vec<u64> = m.to_vec();
    let mut r1: Vec<u64> = a.to_vec();
    fp_trim(&mut r1);
    let mut s0: Vec<u64> = vec![];
    let mut s1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // divide r0 by r1
        let (q, r) = fp_divrem(p, &r0, &r1);
        let qs1 = fp_mul_plain(p, &q, &s1);
        let s2 = fp_sub(p, &s0, &qs1);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s2);
    }
    if r0.len() != 1 {
        return None;
    }
    let inv = mod_inv_u64(r0[0], p);
    let mut out = s0;
    for v in out.iter_mut() {
        *v = (*v as u128 * inv as u128 % p as u128) as u64;
    }
    fp_trim(&mut out);
    Some(out)
}

fn fp_divrem(p: u64, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    fp_trim(&mut r);
    let db = b.len() - 1;
    if r.len() <= db {
        return (vec![], r);
    }
    let mut q = vec![0u64; r.len() - db];
    let lb_inv = mod_inv_u64(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let c = (r[dr] as u128 * lb_inv as u128 % p as u128) as u64;
        q[dr - db] = c;
        for j in 0..=db {
            let sub = c as u128 * b[j] as u128 % p as u128;
            let idx = dr - db + j;
            r[idx] = ((r[idx] as u128 + p as u128 - sub) % p as u128) as u64;
        }
        fp_trim(&mut r);
        if r.is_empty() {
            break;
        }
    }
    (q, r)
}

fn fp_mul_plain(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = ((prod[i + j] as u128 + x as u128 * y as u128) % p as u128) as u64;
        }
    }
    prod
}

fn fp_sub(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = if x >= y { x - y } else { x + p - y };
    }
    fp_trim(&mut out);
    out
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

pub(crate) fn mod_inv_u64(a: u64, p: u64) -> u64 {
    let (g, x, _) = ext_gcd(a as i128, p as i128);
    debug_assert_eq!(g, 1);
    x.rem_euclid(p as i128) as u64
}

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'wit: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..r - 1 {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'wit;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn make_field_basics() {
        let f2 = Fq::new(2, 1, None).unwrap();
        assert_eq!(f2.q(), 2);
        let f9 = Fq::new(3, 2, Some(&[1, 0, 1])).unwrap();
        assert_eq!(f9.q(), 9);
        // t^2 = -1 in the default F_9 model
        let f9d = Fq::new(3, 2, None).unwrap();
        assert_eq!(f9d.modulus().unwrap(), &[1, 0, 1]);
        let f8 = Fq::new(2, 3, Some(&[1, 1, 0, 1])).unwrap();
        assert_eq!(f8.q(), 8);
        assert_eq!(Fq::new(2, 3, None).unwrap().modulus().unwrap(), &[1, 1, 0, 1]);

        assert_eq!(Fq::new(4, 1, None), Err(Error::NotPrime(4)));
        assert_eq!(
            Fq::new(3, 2, Some(&[2, 0, 1])), // t^2 + 2 = t^2 - 1 has root 1
            Err(Error::ReducibleModulus)
        );
        assert!(Fq::new(3, 2, Some(&[1, 0, 2])).is_err()); // non-monic
    }

    #[test]
    fn inv_examples() {
        let f5 = Fq::new(5, 1, None).unwrap();
        assert_eq!(f5.inv(&f5.one()).unwrap(), f5.one());
        assert_eq!(f5.inv(&f5.from_u64(2)).unwrap(), f5.from_u64(3));
        assert_eq!(f5.inv(&f5.zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn field_axioms_exhaustive_small_q() {
        for (p, k) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4)] {
            let f = Fq::new(p, k, None).unwrap();
            let elems: Vec<_> = f.elements().collect();
            for a in &elems {
                assert_eq!(f.pow(a, f.q() as u128), *a, "a^q = a in q={}", f.q());
                if !a.is_zero() {
                    assert_eq!(f.mul(a, &f.inv(a).unwrap()), f.one());
                }
                for b in &elems {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in &elems {
                        assert_eq!(f.mul(a, &f.add(b, c)), f.add(&f.mul(a, b), &f.mul(a, c)));
                        assert_eq!(f.mul(&f.mul(a, b), c), f.mul(a, &f.mul(b, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn frobenius_is_automorphism() {
        // exhaustive for q^k <= 81
        for (p, k) in [(3, 2), (2, 3), (3, 4), (2, 4), (5, 2), (7, 2)] {
            let f = Fq::new(p, k, None).unwrap();
            if f.q() > 81 {
                continue;
            }
            let elems: Vec<_> = f.elements().collect();
            for a in &elems {
                assert_eq!(f.frobenius(a, k), *a);
                for b in &elems {
                    assert_eq!(
                        f.frobenius(&f.add(a, b), 1),
                        f.add(&f.frobenius(a, 1), &f.frobenius(b, 1))
                    );
                    assert_eq!(
                        f.frobenius(&f.mul(a, b), 1),
                        f.mul(&f.frobenius(a, 1), &f.frobenius(b, 1))
                    );
                }
            }
        }
        // t in F_9 with base q = 3: t^3 = -t
        let f9 = Fq::new(3, 2, None).unwrap();
        let t = f9.gen().unwrap();
        assert_eq!(f9.frobenius(&t, 1), f9.neg(&t));
    }

    #[test]
    fn quadratic_character_examples() {
        let f5 = Fq::new(5, 1, None).unwrap();
        assert_eq!(f5.quadratic_character(&f5.zero()).unwrap(), 0);
        assert_eq!(f5.quadratic_character(&f5.from_u64(2)).unwrap(), -1);
        let f9 = Fq::new(3, 2, None).unwrap();
        let minus_one = f9.neg(&f9.one());
        assert_eq!(f9.quadratic_character(&minus_one).unwrap(), 1);
        let f2 = Fq::new(2, 1, None).unwrap();
        assert_eq!(
            f2.quadratic_character(&f2.one()),
            Err(Error::CharTwoUnsupported)
        );
    }

    #[test]
    fn quadratic_character_multiplicative_and_balanced() {
        for (p, k) in [(3, 1), (5, 1), (7, 1), (3, 2), (11, 1), (13, 1), (5, 2), (3, 3)] {
            let f = Fq::new(p, k, None).unwrap();
            if f.q() > 27 {
                continue;
            }
            let elems: Vec<_> = f.elements().collect();
            let mut squares = 0;
            for a in &elems {
                let xa = f.quadratic_character(a).unwrap();
                if xa == 1 {
                    squares += 1;
                }
                for b in &elems {
                    if !a.is_zero() && !b.is_zero() {
                        let xb = f.quadratic_character(b).unwrap();
                        let xab = f.quadratic_character(&f.mul(a, b)).unwrap();
                        assert_eq!(xab, xa * xb);
                    }
                }
            }
            assert_eq!(squares as u64, (f.q() - 1) / 2);
        }
    }

    #[test]
    fn extension_embed_roundtrip() {
        let f9 = Fq::new(3, 2, None).unwrap();
        let ext = Extension::new(&f9, 2).unwrap();
        assert_eq!(ext.big().q(), 81);
        for a in f9.elements() {
            let img = ext.embed(&a);
            assert_eq!(ext.unembed(&img), Some(a.clone()));
            assert!(ext.in_base(&img));
            for b in f9.elements() {
                assert_eq!(
                    ext.embed(&f9.mul(&a, &b)),
                    ext.big().mul(&ext.embed(&a), &ext.embed(&b))
                );
            }
        }
        // something outside the base must fail to descend
        let outside = ext
            .big()
            .elements()
            .find(|x| !ext.in_base(x))
            .unwrap();
        assert_eq!(ext.unembed(&outside), None);
    }

    #[test]
    fn probe_points_examples() {
        let f3 = Fq::new(3, 1, None).unwrap();
        let (ext, taus) = find_probe_points(&f3, 5, 1, 2).unwrap();
        assert_eq!(taus.len(), 2);
        for t in &taus {
            assert!(!ext.in_base(t));
        }
        // non-conjugacy
        let mut c = taus[0].clone();
        for _ in 0..5 {
            c = ext.frobenius_base(&c, 1);
            assert_ne!(c, taus[1]);
        }

        let f2 = Fq::new(2, 1, None).unwrap();
        assert!(find_probe_points(&f2, 2, 2, 1).is_err());

        // degree-4 independence in F_243
        let (_, taus) = find_probe_points(&f3, 5, 4, 1).unwrap();
        assert_eq!(taus.len(), 1);
    }

    #[test]
    fn sqrt_canonical() {
        let f5 = Fq::new(5, 1, None).unwrap();
        let four = f5.from_u64(4);
        let r = f5.sqrt(&four).unwrap();
        assert_eq!(f5.mul(&r, &r), four);
        assert_eq!(r, f5.from_u64(2)); // canonical: smaller index of {2, 3}
        assert!(f5.sqrt(&f5.from_u64(2)).is_none());
        let f4 = Fq::new(2, 2, None).unwrap();
        for a in f4.elements() {
            let r = f4.sqrt(&a).unwrap();
            assert_eq!(f4.mul(&r, &r), a);
        }
    }
}
