//! Multiplication and inversion on canonical keys, one routine per model kind.

use alloc::vec::Vec;

use super::{Key, ModelKind};
use crate::codec::{put_i64, put_u64, Reader};
use crate::error::{Error, Result};

pub(super) fn identity(kind: &ModelKind) -> Key {
    let mut out = Key::new();
    match kind {
        ModelKind::Free { .. } => {}
        ModelKind::FreeAbelian { dim } => out.extend(core::iter::repeat(0).take(*dim)),
        ModelKind::Heisenberg | ModelKind::BaumslagSolitar { .. } => out.extend([0, 0, 0]),
        ModelKind::Lamplighter => out.push(0),
        ModelKind::Finite(t) => put_u64(&mut out, u64::from(t.identity())),
        ModelKind::DirectProduct(factors) => {
            for f in factors {
                let k = identity(&f.kind);
                put_u64(&mut out, k.len() as u64);
                out.extend_from_slice(&k);
            }
        }
    }
    out
}

pub(super) fn mul(kind: &ModelKind, a: &[u8], b: &[u8]) -> Result<Key> {
    let mut out = Key::new();
    match kind {
        ModelKind::Free { .. } => {
            out.extend_from_slice(a);
            for &letter in b {
                if out.last() == Some(&(letter ^ 1)) {
                    out.pop();
                } else {
                    out.push(letter);
                }
            }
        }
        ModelKind::FreeAbelian { dim } => {
            let (mut ra, mut rb) = (Reader::new(a), Reader::new(b));
            for _ in 0..*dim {
                let s = ra.i64().checked_add(rb.i64()).ok_or(Error::Overflow("Z^d"))?;
                put_i64(&mut out, s);
            }
        }
        ModelKind::Heisenberg => {
            let [a1, b1, c1] = heis(a);
            let [a2, b2, c2] = heis(b);
            let of = || Error::Overflow("Heisenberg");
            put_i64(&mut out, a1.checked_add(a2).ok_or_else(of)?);
            put_i64(&mut out, b1.checked_add(b2).ok_or_else(of)?);
            let c = a1
                .checked_mul(b2)
                .and_then(|t| t.checked_add(c1))
                .and_then(|t| t.checked_add(c2))
                .ok_or_else(of)?;
            put_i64(&mut out, c);
        }
        ModelKind::Lamplighter => {
            let (p1, l1) = lamps(a);
            let (p2, l2) = lamps(b);
            let p = p1.checked_add(p2).ok_or(Error::Overflow("lamplighter"))?;
            put_i64(&mut out, p);
            // L1 symmetric-difference (L2 shifted by p1); both lists ascending.
            let (mut i, mut j) = (0, 0);
            while i < l1.len() || j < l2.len() {
                let y = l2.get(j).map(|v| v + p1);
                match (l1.get(i), y) {
                    (Some(&x), Some(y)) if x == y => {
                        i += 1;
                        j += 1;
                    }
                    (Some(&x), Some(y)) if x < y => {
                        put_i64(&mut out, x);
                        i += 1;
                    }
                    (Some(_), Some(y)) | (None, Some(y)) => {
                        put_i64(&mut out, y);
                        j += 1;
                    }
                    (Some(&x), None) => {
                        put_i64(&mut out, x);
                        i += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
        }
        ModelKind::BaumslagSolitar { m } => {
            let (p1, q1, r1) = bs(a);
            let (p2, q2, r2) = bs(b);
            let m = i128::from(*m);
            let of = || Error::Overflow("Baumslag-Solitar");
            let pow = |e: u64| -> Result<i128> {
                u32::try_from(e).ok().and_then(|e| m.checked_pow(e)).ok_or_else(of)
            };
            // (p,q,r) is the affine map x -> m^(r-p) x + q / m^p.
            let big_q = q1
                .checked_mul(pow(p2)?)
                .and_then(|x| q2.checked_mul(pow(r1).ok()?).and_then(|y| x.checked_add(y)))
                .ok_or_else(of)?;
            let big_p = p1 + p2;
            let k = (r1 as i128 - p1 as i128) + (r2 as i128 - p2 as i128);
            let (p, q, r) = bs_normalize(m, k, big_q, big_p).ok_or_else(of)?;
            put_u64(&mut out, p);
            put_i64(&mut out, q);
            put_u64(&mut out, r);
        }
        ModelKind::Finite(t) => {
            let x = Reader::new(a).u64() as u32;
            let y = Reader::new(b).u64() as u32;
            put_u64(&mut out, u64::from(t.mul(x, y)));
        }
        ModelKind::DirectProduct(factors) => {
            let (mut ra, mut rb) = (Reader::new(a), Reader::new(b));
            for f in factors {
                let la = ra.u64() as usize;
                let ka = ra.take(la);
                let lb = rb.u64() as usize;
                let kb = rb.take(lb);
                let k = mul(&f.kind, ka, kb)?;
                put_u64(&mut out, k.len() as u64);
                out.extend_from_slice(&k);
            }
        }
    }
    Ok(out)
}

pub(super) fn inv(kind: &ModelKind, a: &[u8]) -> Result<Key> {
    let mut out = Key::new();
    match kind {
        ModelKind::Free { .. } => out.extend(a.iter().rev().map(|l| l ^ 1)),
        ModelKind::FreeAbelian { dim } => {
            let mut r = Reader::new(a);
            for _ in 0..*dim {
                put_i64(&mut out, r.i64().checked_neg().ok_or(Error::Overflow("Z^d"))?);
            }
        }
        ModelKind::Heisenberg => {
            let [x, y, z] = heis(a);
            let of = || Error::Overflow("Heisenberg");
            put_i64(&mut out, x.checked_neg().ok_or_else(of)?);
            put_i64(&mut out, y.checked_neg().ok_or_else(of)?);
            let c = x.checked_mul(y).and_then(|t| t.checked_sub(z)).ok_or_else(of)?;
            put_i64(&mut out, c);
        }
        ModelKind::Lamplighter => {
            let (p, l) = lamps(a);
            let of = || Error::Overflow("lamplighter");
            put_i64(&mut out, p.checked_neg().ok_or_else(of)?);
            for x in l {
                put_i64(&mut out, x.checked_sub(p).ok_or_else(of)?);
            }
        }
        ModelKind::BaumslagSolitar { .. } => {
            let (p, q, r) = bs(a);
            put_u64(&mut out, r as u64);
            put_i64(&mut out, -(q as i64));
            put_u64(&mut out, p as u64);
        }
        ModelKind::Finite(t) => {
            let x = Reader::new(a).u64() as u32;
            put_u64(&mut out, u64::from(t.inv(x)));
        }
        ModelKind::DirectProduct(factors) => {
            let mut ra = Reader::new(a);
            for f in factors {
                let la = ra.u64() as usize;
                let k = inv(&f.kind, ra.take(la))?;
                put_u64(&mut out, k.len() as u64);
                out.extend_from_slice(&k);
            }
        }
    }
    Ok(out)
}

pub(super) fn heis(key: &[u8]) -> [i64; 3] {
    let mut r = Reader::new(key);
    [r.i64(), r.i64(), r.i64()]
}

pub(super) fn lamps(key: &[u8]) -> (i64, Vec<i64>) {
    let mut r = Reader::new(key);
    let cursor = r.i64();
    let mut lit = Vec::new();
    while !r.is_empty() {
        lit.push(r.i64());
    }
    (cursor, lit)
}

/// Normal form `t^-p a^q t^r` of a BS(1,m) key, with `q` widened.
pub(super) fn bs(key: &[u8]) -> (u64, i128, u64) {
    let mut r = Reader::new(key);
    (r.u64(), i128::from(r.i64()), r.u64())
}

/// Normal form of the affine map `x -> m^k x + big_q / m^big_p`.
fn bs_normalize(m: i128, k: i128, mut big_q: i128, mut big_p: u64) -> Option<(u64, i64, u64)> {
    if big_q == 0 {
        big_p = 0;
    }
    while big_p > 0 && big_q % m == 0 {
        big_q /= m;
        big_p -= 1;
    }
    let p = (big_p as i128).max(-k);
    let extra = u32::try_from(p - big_p as i128).ok()?;
    let q = big_q.checked_mul(m.checked_pow(extra)?)?;
    let r = k + p;
    Some((
        u64::try_from(p).ok()?,
        i64::try_from(q).ok()?,
        u64::try_from(r).ok()?,
    ))
}
