//! Integral ideals of an order as lattices in lower-triangular Hermite form.
//!
//! Row `i` of the basis has its pivot in column `i` and zeros to its right,
//! so row 0 is `(a, 0, ..., 0)` with `I ∩ Z = aZ`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::ext_gcd;
use crate::order::{Elem, Order};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ideal {
    basis: Vec<Vec<BigInt>>,
    norm: BigInt,
}

/// Incremental Hermite form of a full-rank lattice containing `d Z^n`.
struct ModHnf {
    h: Vec<Vec<BigInt>>,
    d: BigInt,
}

impl ModHnf {
    fn new(n: usize, d: &BigInt) -> Self {
        let d = d.abs();
        assert!(!d.is_zero(), "modular HNF needs a nonzero multiple");
        let h = (0..n)
            .map(|i| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = d.clone();
                r
            })
            .collect();
        ModHnf { h, d }
    }

    fn insert(&mut self, v: &[BigInt]) {
        let d = &self.d;
        let mut v: Vec<BigInt> = v.iter().map(|x| x.mod_floor(d)).collect();
        for c in (0..v.len()).rev() {
            if v[c].is_zero() {
                continue;
            }
            let hc = &self.h[c];
            let (g, x, y) = ext_gcd(&hc[c], &v[c]);
            let a = &hc[c] / &g;
            let b = &v[c] / &g;
            let mut new_h = Vec::with_capacity(c + 1);
            let mut new_v = Vec::with_capacity(c + 1);
            for j in 0..=c {
                new_h.push(&x * &hc[j] + &y * &v[j]);
                new_v.push(&a * &v[j] - &b * &hc[j]);
            }
            for j in 0..c {
                new_h[j] = new_h[j].mod_floor(d);
                new_v[j] = new_v[j].mod_floor(d);
            }
            new_v[c] = BigInt::zero();
            for j in 0..=c {
                self.h[c][j] = std::mem::take(&mut new_h[j]);
                v[j] = std::mem::take(&mut new_v[j]);
            }
        }
    }

    fn finish(mut self) -> Vec<Vec<BigInt>> {
        let n = self.h.len();
        for c in (0..n).rev() {
            for r in c + 1..n {
                let q = self.h[r][c].div_floor(&self.h[c][c]);
                if !q.is_zero() {
                    for j in 0..=c {
                        let t = &q * &self.h[c][j];
                        self.h[r][j] -= t;
                    }
                }
            }
        }
        self.h
    }
}

impl Ideal {
    /// The ideal generated by `gens` together with `d`, where `d` must lie
    /// in the ideal generated by `gens` (or be deliberately added).
    pub fn from_generators(order: &Order, gens: &[Elem], d: &BigInt) -> Ideal {
        let n = order.degree();
        let mut m = ModHnf::new(n, d);
        for g in gens {
            for j in 0..n {
                m.insert(&order.mul(g, &order.basis_elem(j)));
            }
        }
        Self::from_basis(m.finish())
    }

    /// The Z-module spanned by `rows` plus `d Z^n`, assumed to be an ideal.
    pub fn from_z_basis(rows: &[Elem], d: &BigInt) -> Ideal {
        let n = rows.first().map(|r| r.len()).unwrap_or(0);
        let mut m = ModHnf::new(n, d);
        for r in rows {
            m.insert(r);
        }
        Self::from_basis(m.finish())
    }

    fn from_basis(basis: Vec<Vec<BigInt>>) -> Ideal {
        let norm = (0..basis.len()).map(|i| basis[i][i].clone()).product();
        Ideal { basis, norm }
    }

    pub fn unit(order: &Order) -> Ideal {
        Self::from_basis((0..order.degree()).map(|i| order.basis_elem(i)).collect())
    }

    pub fn principal(order: &Order, a: &[BigInt]) -> Ideal {
        let nm = order.norm(a).abs();
        assert!(!nm.is_zero(), "principal ideal of zero");
        Self::from_z_basis(&order.mult_matrix(a), &nm)
    }

    pub fn from_int(order: &Order, a: &BigInt) -> Ideal {
        let n = order.degree();
        let a = a.abs();
        Self::from_basis(
            (0..n)
                .map(|i| {
                    let mut r = vec![BigInt::zero(); n];
                    r[i] = a.clone();
                    r
                })
                .collect(),
        )
    }

    /// `(p, alpha)`.
    pub fn two_element(order: &Order, p: &BigInt, alpha: &[BigInt]) -> Ideal {
        Self::from_generators(order, &[alpha.to_vec()], p)
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn norm(&self) -> &BigInt {
        &self.norm
    }

    /// Positive generator of `I ∩ Z`.
    pub fn min_int(&self) -> &BigInt {
        &self.basis[0][0]
    }

    pub fn is_unit(&self) -> bool {
        self.norm.is_one()
    }

    pub fn mul(&self, other: &Ideal, order: &Order) -> Ideal {
        let d = self.min_int() * other.min_int();
        let n = order.degree();
        let mut m = ModHnf::new(n, &d);
        for a in &self.basis {
            for b in &other.basis {
                m.insert(&order.mul(a, b));
            }
        }
        Self::from_basis(m.finish())
    }

    /// `self * (p, alpha)`, using the multiple `d` of the result.
    pub fn mul_two_element(
        &self,
        order: &Order,
        p: &BigInt,
        alpha: &[BigInt],
        d: &BigInt,
    ) -> Ideal {
        let mut m = ModHnf::new(order.degree(), d);
        for b in &self.basis {
            m.insert(&b.iter().map(|x| x * p).collect::<Vec<_>>());
            m.insert(&order.mul(b, alpha));
        }
        Self::from_basis(m.finish())
    }

    pub fn pow(&self, e: u64, order: &Order) -> Ideal {
        let mut result = Ideal::unit(order);
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base, order);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, order);
            }
        }
        result
    }

    pub fn add(&self, other: &Ideal) -> Ideal {
        let d = self.min_int().gcd(other.min_int());
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Self::from_z_basis(&rows, &d)
    }

    /// Canonical representative of `x` modulo the ideal.
    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        let mut v = x.to_vec();
        for c in (0..v.len()).rev() {
            let q = v[c].div_floor(&self.basis[c][c]);
            if !q.is_zero() {
                for j in 0..=c {
                    v[j] -= &q * &self.basis[c][j];
                }
            }
        }
        v
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.reduce(x).iter().all(|c| c.is_zero())
    }

    /// Coordinates of `x` over the basis rows, if `x` lies in the ideal.
    pub fn coords(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let n = x.len();
        let mut v = x.to_vec();
        let mut c = vec![BigInt::zero(); n];
        for i in (0..n).rev() {
            let (q, r) = v[i].div_mod_floor(&self.basis[i][i]);
            if !r.is_zero() {
                return None;
            }
            if !q.is_zero() {
                for j in 0..=i {
                    v[j] -= &q * &self.basis[i][j];
                }
            }
            c[i] = q;
        }
        Some(c)
    }

    /// Largest `k` with `x` in `self^k`, capped at `cap`. Requires `x != 0`.
    pub fn valuation_of(&self, x: &[BigInt], order: &Order, cap: u32) -> u32 {
        assert!(x.iter().any(|c| !c.is_zero()), "valuation of zero");
        let mut pw = self.clone();
        let mut k = 0;
        while k < cap && pw.contains(x) {
            k += 1;
            pw = pw.mul(self, order);
        }
        k
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::to_elem;

    fn gaussian() -> Order {
        Order::new(vec![
            vec![to_elem(&[1, 0]), to_elem(&[0, 1])],
            vec![to_elem(&[0, 1]), to_elem(&[-1, 0])],
        ])
        .unwrap()
    }

    #[test]
    fn principal_and_two_element_agree() {
        let o = gaussian();
        let a = Ideal::principal(&o, &to_elem(&[2, 1]));
        let b = Ideal::two_element(&o, &BigInt::from(5), &to_elem(&[2, 1]));
        assert_eq!(a, b);
        assert_eq!(a.norm(), &BigInt::from(5));
        assert!(a.contains(&to_elem(&[5, 0])));
        assert!(!a.contains(&to_elem(&[1, 0])));
    }

    #[test]
    fn split_prime_product() {
        let o = gaussian();
        let p = Ideal::principal(&o, &to_elem(&[2, 1]));
        let q = Ideal::principal(&o, &to_elem(&[2, -1]));
        assert_eq!(p.mul(&q, &o), Ideal::from_int(&o, &BigInt::from(5)));
        let r = Ideal::principal(&o, &to_elem(&[1, 1]));
        assert_eq!(r.pow(2, &o), Ideal::from_int(&o, &BigInt::from(2)));
        assert_eq!(r.pow(5, &o).norm(), &BigInt::from(32));
    }

    #[test]
    fn valuations_and_coords() {
        let o = gaussian();
        let r = Ideal::principal(&o, &to_elem(&[1, 1]));
        assert_eq!(r.valuation_of(&to_elem(&[8, 0]), &o, 50), 6);
        assert_eq!(r.valuation_of(&o.one(), &o, 50), 0);
        let x = to_elem(&[3, 7]);
        let p = Ideal::principal(&o, &to_elem(&[2, 1]));
        let y = o.mul(&x, &to_elem(&[2, 1]));
        let c = p.coords(&y).unwrap();
        let back: Vec<BigInt> = (0..2)
            .map(|j| (0..2).map(|i| &c[i] * &p.basis()[i][j]).sum())
            .collect();
        assert_eq!(back, y);
    }

    #[test]
    fn sum_of_coprime_ideals_is_unit() {
        let o = gaussian();
        let p = Ideal::principal(&o, &to_elem(&[2, 1]));
        let q = Ideal::principal(&o, &to_elem(&[2, -1]));
        assert!(p.add(&q).is_unit());
        assert_eq!(p.add(&p), p);
    }
}
