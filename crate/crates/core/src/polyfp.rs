//! Polynomials over `F_p` and their factorization (Cantor-Zassenhaus).
//!
//! Coefficients are stored low to high with no trailing zeros.

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};

use crate::arith::{mul_mod, pow_mod};

pub type Poly = Vec<u64>;

fn trim(mut a: Poly) -> Poly {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

pub fn from_ints(c: &[i64], p: u64) -> Poly {
    trim(c.iter().map(|&x| x.rem_euclid(p as i64) as u64).collect())
}

pub fn degree(a: &[u64]) -> Option<usize> {
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

fn inv(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

pub fn sub(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

pub fn add(a: &[u64], b: &[u64], p: u64) -> Poly {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
            .collect(),
    )
}

pub fn mul(a: &[u64], b: &[u64], p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    trim(out)
}

pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Poly, Poly) {
    assert!(!b.is_empty(), "division by zero polynomial");
    let mut r = a.to_vec();
    if r.len() < b.len() {
        return (Vec::new(), trim(r));
    }
    let db = b.len() - 1;
    let lead_inv = inv(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    for i in (db..r.len()).rev() {
        let c = mul_mod(r[i], lead_inv, p);
        if c == 0 {
            continue;
        }
        q[i - db] = c;
        for j in 0..=db {
            r[i - db + j] = (r[i - db + j] + p - mul_mod(c, b[j], p)) % p;
        }
    }
    (trim(q), trim(r))
}

pub fn rem(a: &[u64], b: &[u64], p: u64) -> Poly {
    divrem(a, b, p).1
}

pub fn monic(a: &[u64], p: u64) -> Poly {
    match a.last() {
        None => Vec::new(),
        Some(&l) => {
            let li = inv(l, p);
            a.iter().map(|&x| mul_mod(x, li, p)).collect()
        }
    }
}

pub fn gcd(a: &[u64], b: &[u64], p: u64) -> Poly {
    let mut a = trim(a.to_vec());
    let mut b = trim(b.to_vec());
    while !b.is_empty() {
        let r = rem(&a, &b, p);
        a = b;
        b = r;
    }
    monic(&a, p)
}

pub fn powmod(base: &[u64], e: &BigUint, m: &[u64], p: u64) -> Poly {
    let mut result: Poly = rem(&[1], m, p);
    let base = rem(base, m, p);
    for i in (0..e.bits()).rev() {
        result = rem(&mul(&result, &result, p), m, p);
        if e.bit(i) {
            result = rem(&mul(&result, &base, p), m, p);
        }
    }
    result
}

fn derivative(a: &[u64], p: u64) -> Poly {
    trim(
        a.iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
            .collect(),
    )
}

/// `g` with `g(x)^p = a(x)` when `a' = 0`.
fn pth_root(a: &[u64], p: u64) -> Poly {
    // over F_p, c^(1/p) = c
    trim(a.iter().step_by(p as usize).copied().collect())
}

/// Square-free decomposition: `a = prod g_i^{e_i}` with `g_i` square-free, coprime.
fn squarefree(a: &[u64], p: u64) -> Vec<(Poly, u32)> {
    let a = monic(a, p);
    let mut out = Vec::new();
    if degree(&a).unwrap_or(0) == 0 {
        return out;
    }
    let d = derivative(&a, p);
    if d.is_empty() {
        for (g, e) in squarefree(&pth_root(&a, p), p) {
            out.push((g, e * p as u32));
        }
        return out;
    }
    let mut c = gcd(&a, &d, p);
    let mut w = divrem(&a, &c, p).0;
    let mut i = 1u32;
    while degree(&w).unwrap_or(0) > 0 {
        let y = gcd(&w, &c, p);
        let z = divrem(&w, &y, p).0;
        if degree(&z).unwrap_or(0) > 0 {
            out.push((monic(&z, p), i));
        }
        i += 1;
        w = y;
        c = divrem(&c, &w, p).0;
    }
    if degree(&c).unwrap_or(0) > 0 {
        for (g, e) in squarefree(&pth_root(&c, p), p) {
            out.push((g, e * p as u32));
        }
    }
    out
}

/// Distinct-degree factorization of a monic square-free polynomial.
fn distinct_degree(a: &[u64], p: u64) -> Vec<(Poly, usize)> {
    let mut out = Vec::new();
    let mut f = a.to_vec();
    let x: Poly = vec![0, 1];
    let pb = BigUint::from(p);
    let mut h = x.clone();
    let mut d = 0;
    while degree(&f).unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = powmod(&h, &pb, &f, p);
        let g = gcd(&f, &sub(&h, &x, p), p);
        if degree(&g).unwrap_or(0) > 0 {
            f = divrem(&f, &g, p).0;
            h = rem(&h, &f, p);
            out.push((g, d));
        }
    }
    if degree(&f).unwrap_or(0) > 0 {
        let df = degree(&f).unwrap();
        out.push((monic(&f, p), df));
    }
    out
}

/// Splits a product of distinct irreducibles of degree `d`.
fn equal_degree(a: &[u64], d: usize, p: u64, rng: &mut impl Rng) -> Vec<Poly> {
    let n = degree(a).unwrap();
    if n == d {
        return vec![monic(a, p)];
    }
    let exp = if p == 2 {
        BigUint::from(0u32)
    } else {
        (BigUint::from(p).pow(d as u32) - 1u32) / 2u32
    };
    loop {
        let r: Poly = trim((0..n).map(|_| rng.gen_range(0..p)).collect());
        if degree(&r).unwrap_or(0) == 0 {
            continue;
        }
        let b = if p == 2 {
            // trace map into F_2 on each factor
            let mut t = r.clone();
            let mut acc = r.clone();
            for _ in 1..d {
                t = rem(&mul(&t, &t, p), a, p);
                acc = add(&acc, &t, p);
            }
            acc
        } else {
            sub(&powmod(&r, &exp, a, p), &[1], p)
        };
        let g = gcd(a, &b, p);
        let dg = degree(&g).unwrap_or(0);
        if dg > 0 && dg < n {
            let h = divrem(a, &g, p).0;
            let mut out = equal_degree(&g, d, p, rng);
            out.extend(equal_degree(&h, d, p, rng));
            return out;
        }
    }
}

/// Monic irreducible factors with multiplicities, sorted by degree then
/// coefficients.
pub fn factor(a: &[u64], p: u64) -> Vec<(Poly, u32)> {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC2 ^ p);
    let mut out = Vec::new();
    for (g, e) in squarefree(a, p) {
        for (h, d) in distinct_degree(&g, p) {
            for irr in equal_degree(&h, d, p, &mut rng) {
                out.push((irr, e));
            }
        }
    }
    out.sort_by(|x, y| {
        x.0.len()
            .cmp(&y.0.len())
            .then_with(|| x.0.iter().rev().cmp(y.0.iter().rev()))
    });
    let mut merged: Vec<(Poly, u32)> = Vec::new();
    for (g, e) in out {
        match merged.last_mut() {
            Some((h, f)) if *h == g => *f += e,
            _ => merged.push((g, e)),
        }
    }
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expand(fs: &[(Poly, u32)], p: u64) -> Poly {
        let mut acc = vec![1];
        for (g, e) in fs {
            for _ in 0..*e {
                acc = mul(&acc, g, p);
            }
        }
        acc
    }

    #[test]
    fn x2_plus_1_mod_5() {
        let f = from_ints(&[1, 0, 1], 5);
        let fs = factor(&f, 5);
        assert_eq!(fs, vec![(vec![2, 1], 1), (vec![3, 1], 1)]);
    }

    #[test]
    fn products_reconstruct() {
        for (c, p) in [
            (vec![-5i64, 0, 0, 0, 0, 1], 31u64),
            (vec![508, 718, 197, 1], 3),
            (vec![1, 0, 0, 0, 0, 0, 0, 0, 1], 2),
            (vec![1, 1, 0, 1, 0, 0, 1, 1], 2),
            (vec![4, 0, 4, 0, 1], 3),
            (vec![23, 0, 0, 0, 1], 71),
            (vec![-1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], 13),
        ] {
            let f = from_ints(&c, p);
            let fs = factor(&f, p);
            assert_eq!(expand(&fs, p), monic(&f, p), "p={p}");
            for (g, _) in &fs {
                // irreducible: no factor from distinct-degree splitting below its degree
                assert_eq!(distinct_degree(g, p).len(), 1);
            }
        }
        let fs = factor(&from_ints(&[-5, 0, 0, 0, 0, 1], 31), 31);
        assert_eq!(fs.len(), 5);
        let fs = factor(&from_ints(&[508, 718, 197, 1], 3), 3);
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].0.len(), 4);
    }

    #[test]
    fn repeated_factors() {
        // (x+1)^3 (x^2+x+1)^2 over F_2 and F_3
        for p in [2u64, 3] {
            let a = vec![1, 1];
            let b = vec![1, 1, 1];
            let f = mul(&mul(&mul(&a, &a, p), &a, p), &mul(&b, &b, p), p);
            let fs = factor(&f, p);
            assert_eq!(expand(&fs, p), f);
        }
    }
}
