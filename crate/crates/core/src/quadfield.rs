//! Native arithmetic of quadratic fields `Q(sqrt d)`.
//!
//! Integral basis `1, w` with `w = (delta + sqrt D)/2`, `delta = D mod 2`.
//! A primitive ideal is stored as the lattice `[a, (B + sqrt D)/2]` with
//! `a > 0` and `B^2 = D mod 4a`. The step
//! `[a, beta] -> [|C|, (-B + sqrt D)/2]`, `C = N(beta)/a`, replaces an ideal
//! by an equivalent one, `I = (beta/C) J`, and drives reduction, principal
//! generators, class keys and the fundamental unit.

use std::collections::HashMap;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime, is_squarefree, kronecker, sqrt_mod};
use crate::backend::{ClassData, FieldBackend, PrimeIdeal, UnitData};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{self, Elem, Order};
use crate::zabgroup::AbGroup;

/// Largest `|D|` accepted for class group computations.
pub const DISC_BOUND: i64 = 1_000_000_000;
/// Largest prime tried when building the class group.
const CLASS_PRIME_BOUND: u64 = 1_000_000;

/// `[a, (b + sqrt D)/2]` with `a > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Lattice {
    a: BigInt,
    b: BigInt,
}

#[derive(Debug)]
pub struct QuadField {
    pub d: i64,
    pub disc: i64,
    delta: i64,
    /// `w^2 = delta*w + c`.
    c: i64,
    order: Order,
    /// `floor(sqrt D)` for real fields.
    sqrt_floor: BigInt,
    units: UnitData,
    /// Norm of the fundamental unit, `+-1` (1 for imaginary fields).
    pub unit_norm: i32,
    class_number: u64,
    class_cache: Mutex<HashMap<u64, ClassData>>,
}

impl QuadField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::Invalid(format!(
                "d = {d} is not a squarefree integer other than 0, 1"
            )));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        if disc.abs() > DISC_BOUND {
            return Err(Error::Resource(format!(
                "|D| = {} above bound {DISC_BOUND}",
                disc.abs()
            )));
        }
        let delta = disc.rem_euclid(2);
        let c = (disc - delta) / 4;
        let order = Order::new(vec![
            vec![order::to_elem(&[1, 0]), order::to_elem(&[0, 1])],
            vec![order::to_elem(&[0, 1]), order::to_elem(&[c, delta])],
        ])?;
        let sqrt_floor = if disc > 0 {
            BigInt::from(disc).sqrt()
        } else {
            BigInt::zero()
        };
        let mut k = QuadField {
            d,
            disc,
            delta,
            c,
            order,
            sqrt_floor,
            units: UnitData {
                fundamental: Vec::new(),
                torsion_gen: Vec::new(),
                torsion_order: 2,
            },
            unit_norm: 1,
            class_number: 0,
            class_cache: Mutex::new(HashMap::new()),
        };
        k.units = k.compute_units();
        if disc > 0 {
            k.unit_norm = k.norm(&k.units.fundamental[0]).to_i32().unwrap();
        }
        k.class_number = k.count_classes();
        Ok(k)
    }

    pub fn omega_coeffs(&self) -> (i64, i64) {
        (self.delta, self.c)
    }

    pub fn is_real(&self) -> bool {
        self.disc > 0
    }

    pub fn elem(&self, x: i64, y: i64) -> Elem {
        order::to_elem(&[x, y])
    }

    pub fn norm(&self, x: &[BigInt]) -> BigInt {
        // (x + y w)(x + y w') = x^2 + delta x y - c y^2
        &x[0] * &x[0] + BigInt::from(self.delta) * &x[0] * &x[1]
            - BigInt::from(self.c) * &x[1] * &x[1]
    }

    pub fn conj(&self, x: &[BigInt]) -> Elem {
        vec![&x[0] + BigInt::from(self.delta) * &x[1], -&x[1]]
    }

    pub fn conj_ideal(&self, i: &Ideal) -> Ideal {
        let rows: Vec<Elem> = i.basis().iter().map(|r| self.conj(r)).collect();
        Ideal::from_z_basis(&rows, i.min_int())
    }

    /// Sign of `A + B sqrt D` for a real field.
    fn sign_surd(&self, a: &BigInt, b: &BigInt) -> i32 {
        let sa = a.signum().to_i32().unwrap();
        let sb = b.signum().to_i32().unwrap();
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = a * a;
        let rhs = b * b * BigInt::from(self.disc);
        if lhs > rhs {
            sa
        } else {
            sb
        }
    }

    /// Sign of `x` under the real embedding with `sqrt d > 0`.
    pub fn real_sign(&self, x: &[BigInt]) -> i32 {
        assert!(self.is_real());
        // 2(x + y w) = (2x + delta y) + y sqrt D
        self.sign_surd(
            &(BigInt::from(2) * &x[0] + BigInt::from(self.delta) * &x[1]),
            &x[1],
        )
    }

    /// Real embedding as a float (sizes up to about 1e300).
    pub fn real_value(&self, x: &[BigInt]) -> f64 {
        let s = (self.disc as f64).sqrt();
        let x0 = x[0].to_f64().unwrap_or(f64::INFINITY);
        let x1 = x[1].to_f64().unwrap_or(f64::INFINITY);
        if x0.signum() != x1.signum() && x0.abs() > 1e12 {
            // cancellation: use x + y w = N(x) / conj(x)
            let n = self.norm(x).to_f64().unwrap();
            let c = self.conj(x);
            return n
                / (c[0].to_f64().unwrap()
                    + c[1].to_f64().unwrap() * (self.delta as f64 + s) / 2.0);
        }
        x0 + x1 * (self.delta as f64 + s) / 2.0
    }

    fn compute_units(&self) -> UnitData {
        let (torsion_gen, torsion_order) = match self.d {
            -1 => (self.elem(0, 1), 4),
            -3 => (self.elem(0, 1), 6),
            _ => (self.elem(-1, 0), 2),
        };
        let fundamental = if self.is_real() {
            vec![self.cycle_unit()]
        } else {
            Vec::new()
        };
        UnitData {
            fundamental,
            torsion_gen,
            torsion_order,
        }
    }

    /// The multiplier of one period of the reduced-ideal cycle of `O`,
    /// normalized to be `> 1`.
    fn cycle_unit(&self) -> Elem {
        let start = self.normalize_real(Lattice {
            a: BigInt::one(),
            b: BigInt::from(self.delta),
        });
        let mut cur = start.clone();
        let mut num = self.order.one();
        let mut den = BigInt::one();
        loop {
            let (next, beta, c) = self.rho(&cur);
            num = self.order.mul(&num, &beta);
            den *= c;
            simplify(&mut num, &mut den);
            cur = next;
            if cur == start {
                break;
            }
        }
        assert!(den.abs().is_one(), "cycle multiplier is not integral");
        let mut u: Elem = num.iter().map(|x| x * &den).collect();
        // choose among +-u, +-conj(u) the one > 1
        if self.real_sign(&u) < 0 {
            u = order::neg(&u);
        }
        let one = self.order.one();
        if self.real_sign(&order::sub(&u, &one)) < 0 {
            u = self.conj(&u);
            if self.real_sign(&u) < 0 {
                u = order::neg(&u);
            }
        }
        u
    }

    fn norm_b(&self, l: &Lattice) -> BigInt {
        // C = (B^2 - D) / 4a
        let num = &l.b * &l.b - BigInt::from(self.disc);
        let four_a = BigInt::from(4) * &l.a;
        debug_assert!(num.is_multiple_of(&four_a));
        num / four_a
    }

    /// Representative of `B` mod `2a` in `(-a, a]`.
    fn normalize_imag(&self, l: Lattice) -> Lattice {
        let two_a = BigInt::from(2) * &l.a;
        let mut b = l.b.mod_floor(&two_a);
        if b > l.a {
            b -= &two_a;
        }
        Lattice { a: l.a, b }
    }

    /// Largest `B <= floor(sqrt D)` in the class of `B` mod `2a`.
    fn normalize_real(&self, l: Lattice) -> Lattice {
        let two_a = BigInt::from(2) * &l.a;
        let b = &self.sqrt_floor - (&self.sqrt_floor - &l.b).mod_floor(&two_a);
        Lattice { a: l.a, b }
    }

    fn normalize(&self, l: Lattice) -> Lattice {
        if self.is_real() {
            self.normalize_real(l)
        } else {
            self.normalize_imag(l)
        }
    }

    /// One reduction step: `I = (beta/C) J`; returns `(J, beta, C)`.
    fn rho(&self, l: &Lattice) -> (Lattice, Elem, BigInt) {
        let c = self.norm_b(l);
        let beta = vec![(&l.b - BigInt::from(self.delta)) / 2, BigInt::one()];
        let next = self.normalize(Lattice {
            a: c.abs(),
            b: -&l.b,
        });
        (next, beta, c)
    }

    fn is_reduced(&self, l: &Lattice) -> bool {
        if self.is_real() {
            // |sqrt D - 2a| < B < sqrt D
            if l.b.is_negative() || l.b.is_zero() || l.b > self.sqrt_floor {
                return false;
            }
            let two_a = BigInt::from(2) * &l.a;
            // B > |sqrt D - 2a|  <=>  B - 2a < -sqrt D < B - 2a ... as two sign tests
            let left = self.sign_surd(&(&l.b - &two_a), &BigInt::one()) > 0;
            let right = self.sign_surd(&(&l.b + &two_a), &-BigInt::one()) > 0;
            left && right
        } else {
            let c = self.norm_b(l);
            l.a < c || (l.a == c && !l.b.is_negative())
        }
    }

    /// Reduces a primitive lattice, accumulating the multiplier `num/den`.
    fn reduce_tracked(&self, l: Lattice, num: &mut Elem, den: &mut BigInt) -> Lattice {
        let mut cur = self.normalize(l);
        while !self.is_reduced(&cur) {
            let (next, beta, c) = self.rho(&cur);
            *num = self.order.mul(num, &beta);
            *den *= c;
            simplify(num, den);
            cur = next;
        }
        cur
    }

    /// Content and primitive lattice of an ideal.
    fn to_lattice(&self, i: &Ideal) -> (BigInt, Lattice) {
        let rows = i.basis();
        let content = rows[1][1].clone();
        let a = &rows[0][0] / &content;
        let b = &rows[1][0] / &content;
        let bb = BigInt::from(2) * b + BigInt::from(self.delta);
        (content, Lattice { a, b: bb })
    }

    fn from_lattice(&self, l: &Lattice) -> Ideal {
        let b = (&l.b - BigInt::from(self.delta)) / 2;
        Ideal::from_z_basis(
            &[vec![l.a.clone(), BigInt::zero()], vec![b, BigInt::one()]],
            &l.a,
        )
    }

    /// Canonical key of the (wide) ideal class of a nonzero ideal.
    fn class_key(&self, i: &Ideal) -> Lattice {
        let (_, l) = self.to_lattice(i);
        let mut num = self.order.one();
        let mut den = BigInt::one();
        let r = self.reduce_tracked(l, &mut num, &mut den);
        self.cycle_min(&r)
    }

    fn cycle_min(&self, r: &Lattice) -> Lattice {
        if !self.is_real() {
            return r.clone();
        }
        let mut best = r.clone();
        let mut cur = self.rho(r).0;
        while &cur != r {
            if cur < best {
                best = cur.clone();
            }
            cur = self.rho(&cur).0;
        }
        best
    }

    /// `gamma` with `(gamma) = i`, totally positive when possible.
    pub fn principal_generator(&self, i: &Ideal) -> Result<Elem> {
        let (content, l) = self.to_lattice(i);
        let mut num = self.order.one();
        let mut den = BigInt::one();
        let mut cur = self.reduce_tracked(l, &mut num, &mut den);
        if self.is_real() {
            let start = cur.clone();
            while !cur.a.is_one() {
                let (next, beta, c) = self.rho(&cur);
                num = self.order.mul(&num, &beta);
                den *= c;
                simplify(&mut num, &mut den);
                cur = next;
                if cur == start {
                    return Err(Error::NotPrincipal);
                }
            }
        } else if !cur.a.is_one() {
            return Err(Error::NotPrincipal);
        }
        let scaled: Elem = num.iter().map(|x| x * &content).collect();
        if !scaled.iter().all(|x| x.is_multiple_of(&den)) {
            return Err(Error::Defect("principal generator not integral".into()));
        }
        let mut g: Elem = scaled.iter().map(|x| x / &den).collect();
        if self.is_real() {
            if self.norm(&g).is_negative() && self.unit_norm == -1 {
                g = self.order.mul(&g, &self.units.fundamental[0]);
            }
            if self.real_sign(&g) < 0 {
                g = order::neg(&g);
            }
        }
        debug_assert_eq!(&Ideal::principal(&self.order, &g), i);
        Ok(g)
    }

    /// Class number by counting reduced ideals (reduced forms for `D < 0`,
    /// cycles of reduced ideals for `D > 0`).
    fn count_classes(&self) -> u64 {
        let reduced = self.reduced_lattices();
        if !self.is_real() {
            return reduced.len() as u64;
        }
        let mut seen = std::collections::HashSet::new();
        let mut cycles = 0;
        for l in reduced {
            if seen.contains(&l) {
                continue;
            }
            cycles += 1;
            let mut cur = l.clone();
            loop {
                seen.insert(cur.clone());
                cur = self.rho(&cur).0;
                if cur == l {
                    break;
                }
            }
        }
        cycles
    }

    fn reduced_lattices(&self) -> Vec<Lattice> {
        let dd = self.disc;
        let mut out = Vec::new();
        if dd < 0 {
            let amax = ((-dd) as f64 / 3.0).sqrt() as i64 + 1;
            for a in 1..=amax {
                for b in -a + 1..=a {
                    if (b - dd).rem_euclid(2) != 0 || (b * b - dd) % (4 * a) != 0 {
                        continue;
                    }
                    let l = Lattice {
                        a: BigInt::from(a),
                        b: BigInt::from(b),
                    };
                    if self.is_reduced(&l) {
                        out.push(l);
                    }
                }
            }
        } else {
            let s = self.sqrt_floor.to_i64().unwrap();
            for a in 1..=s {
                for b in 1..=s {
                    if (b - dd).rem_euclid(2) != 0 || (b * b - dd) % (4 * a) != 0 {
                        continue;
                    }
                    let l = Lattice {
                        a: BigInt::from(a),
                        b: BigInt::from(b),
                    };
                    if self.is_reduced(&l) {
                        out.push(l);
                    }
                }
            }
        }
        out
    }

    /// Primes above `p`, ordered by the residue of `w` they contain.
    pub fn split_prime(&self, p: u64) -> Vec<PrimeIdeal> {
        let k = kronecker(self.disc, p);
        let roots: Vec<u64> = match k {
            -1 => {
                let alpha = self.elem(p as i64, 0);
                return vec![PrimeIdeal::new(&self.order, p, alpha, 1, 2)];
            }
            _ => self.omega_roots(p),
        };
        let e = if k == 0 { 2 } else { 1 };
        roots
            .into_iter()
            .map(|r| {
                let alpha = vec![-BigInt::from(r), BigInt::one()];
                PrimeIdeal::new(&self.order, p, alpha, e, 1)
            })
            .collect()
    }

    /// Roots of `x^2 - delta x - c` modulo `p` (one for ramified `p`).
    fn omega_roots(&self, p: u64) -> Vec<u64> {
        let c = self.c.rem_euclid(p as i64) as u64;
        let delta = self.delta as u64 % p;
        let mut roots: Vec<u64> = if p == 2 {
            (0..2u64)
                .filter(|x| (x * x + 2 * 2 - delta * x - c).is_multiple_of(2))
                .collect()
        } else {
            let disc = self.disc.rem_euclid(p as i64) as u64;
            let s = sqrt_mod(disc, p).expect("split or ramified prime");
            let inv2 = p.div_ceil(2);
            let r1 = ((delta + s) % p) * inv2 % p;
            let r2 = ((delta + p - s) % p) * inv2 % p;
            vec![r1, r2]
        };
        roots.sort_unstable();
        roots.dedup();
        roots
    }

    /// `(AbGroup, generator ideals)` of the class group, generators prime to `avoid`.
    pub fn class_group(&self) -> Result<(AbGroup, Vec<Ideal>)> {
        let cd = self.class_data_avoiding(0)?;
        Ok((cd.group(), cd.gens))
    }

    fn class_data_avoiding(&self, avoid: u64) -> Result<ClassData> {
        if let Some(cd) = self.class_cache.lock().unwrap().get(&avoid) {
            return Ok(cd.clone());
        }
        let cd = self.build_class_data(avoid)?;
        self.class_cache.lock().unwrap().insert(avoid, cd.clone());
        Ok(cd)
    }

    fn build_class_data(&self, avoid: u64) -> Result<ClassData> {
        let h = self.class_number;
        if h == 1 {
            return Ok(ClassData::trivial());
        }
        let o = &self.order;
        let unit = Ideal::unit(o);
        // subgroup: key -> (reduced representative, exponents)
        let mut elems: Vec<(Ideal, Vec<i64>)> = vec![(unit.clone(), Vec::new())];
        let mut index: HashMap<Lattice, usize> = HashMap::new();
        index.insert(self.class_key(&unit), 0);
        let mut gens: Vec<(Ideal, u64)> = Vec::new();
        let mut rels: Vec<Vec<i64>> = Vec::new();
        let mut ell = 1u64;
        while (elems.len() as u64) < h {
            ell += 1;
            if ell > CLASS_PRIME_BOUND {
                return Err(Error::Resource(
                    "class group generators not found below prime bound".into(),
                ));
            }
            if ell == avoid || !is_prime(ell) || kronecker(self.disc, ell) == -1 {
                continue;
            }
            let g = self.split_prime(ell).remove(0).ideal;
            if index.contains_key(&self.class_key(&g)) {
                continue;
            }
            let k = gens.len();
            for (_, e) in elems.iter_mut() {
                e.push(0);
            }
            for r in rels.iter_mut() {
                r.push(0);
            }
            let base: Vec<(Ideal, Vec<i64>)> = elems.clone();
            let mut power = g.clone();
            let mut j = 1i64;
            loop {
                let key = self.class_key(&power);
                if let Some(&pos) = index.get(&key) {
                    let mut r: Vec<i64> = elems[pos].1.iter().map(|x| -x).collect();
                    r[k] += j;
                    rels.push(r);
                    break;
                }
                for (rep, e) in &base {
                    let prod = self.reduced_ideal(&rep.mul(&power, o));
                    let mut ne = e.clone();
                    ne[k] = j;
                    index.insert(self.class_key(&prod), elems.len());
                    elems.push((prod, ne));
                }
                j += 1;
                power = self.reduced_ideal(&power.mul(&g, o));
            }
            gens.push((g, ell));
        }
        let mut principal_gens = Vec::new();
        let mut denominators = Vec::new();
        for r in &rels {
            let mut a = unit.clone();
            let mut den = BigInt::one();
            for (i, &ri) in r.iter().enumerate() {
                let (g, _) = &gens[i];
                if ri > 0 {
                    a = a.mul(&g.pow(ri as u64, o), o);
                } else if ri < 0 {
                    a = a.mul(&self.conj_ideal(g).pow((-ri) as u64, o), o);
                    den *= num_traits::pow(g.norm().clone(), (-ri) as usize);
                }
            }
            principal_gens.push(self.principal_generator(&a)?);
            denominators.push(den);
        }
        Ok(ClassData {
            gens: gens.into_iter().map(|(g, _)| g).collect(),
            relations: rels
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect(),
            principal_gens,
            denominators,
        })
    }

    /// An equivalent primitive reduced ideal.
    fn reduced_ideal(&self, i: &Ideal) -> Ideal {
        let (_, l) = self.to_lattice(i);
        let mut num = self.order.one();
        let mut den = BigInt::one();
        self.from_lattice(&self.reduce_tracked(l, &mut num, &mut den))
    }

    pub fn ideal_mul(&self, a: &Ideal, b: &Ideal) -> Ideal {
        a.mul(b, &self.order)
    }

    pub fn ideal_pow(&self, a: &Ideal, k: u64) -> Ideal {
        a.pow(k, &self.order)
    }
}

/// Divides `num` and `den` by their common content; keeps `den > 0`.
fn simplify(num: &mut Elem, den: &mut BigInt) {
    let mut g = den.clone();
    for x in num.iter() {
        g = g.gcd(x);
    }
    if den.is_negative() {
        g = -g;
    }
    if !g.is_one() && !g.is_zero() {
        for x in num.iter_mut() {
            *x = &*x / &g;
        }
        *den = &*den / &g;
    }
}

impl FieldBackend for QuadField {
    fn order(&self) -> &Order {
        &self.order
    }

    fn signature(&self) -> (usize, usize) {
        if self.is_real() {
            (2, 0)
        } else {
            (0, 1)
        }
    }

    fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(self.split_prime(p))
    }

    fn class_data(&self, p: u64) -> Result<ClassData> {
        self.class_data_avoiding(p)
    }

    fn units(&self) -> &UnitData {
        &self.units
    }

    fn class_number(&self) -> BigInt {
        BigInt::from(self.class_number)
    }

    fn descriptor(&self) -> String {
        format!("Q(sqrt({}))", self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backend::check_factorization;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn discriminants_and_signatures() {
        let k = QuadField::new(-1).unwrap();
        assert_eq!(k.disc, -4);
        assert_eq!(k.signature(), (0, 1));
        assert_eq!(QuadField::new(5).unwrap().disc, 5);
        assert_eq!(QuadField::new(2).unwrap().disc, 8);
        assert!(QuadField::new(12).is_err());
        assert!(QuadField::new(1).is_err());
        assert!(QuadField::new(0).is_err());
    }

    #[test]
    fn splitting_examples() {
        let k = QuadField::new(-1).unwrap();
        let ps = k.split_prime(2);
        assert_eq!((ps.len(), ps[0].e, ps[0].f), (1, 2, 1));
        let k = QuadField::new(2).unwrap();
        let ps = k.split_prime(7);
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|p| p.e == 1 && p.f == 1));
        let ps = k.split_prime(5);
        assert_eq!((ps.len(), ps[0].e, ps[0].f), (1, 1, 2));
    }

    #[test]
    fn factorization_sweep() {
        for d in [-23i64, -5, -3, -1, 2, 3, 5, 13, 15, 21, -15, 10] {
            let k = QuadField::new(d).unwrap();
            for p in [2u64, 3, 5, 7, 11, 13, 17, 101] {
                assert!(
                    check_factorization(&k.order, p, &k.split_prime(p)),
                    "d={d} p={p}"
                );
            }
        }
    }

    #[test]
    fn class_groups() {
        let inv = |d: i64| {
            QuadField::new(d)
                .unwrap()
                .class_group()
                .unwrap()
                .0
                .invariant_factors
        };
        assert_eq!(inv(-23), vec![big(3)]);
        assert_eq!(inv(-5), vec![big(2)]);
        assert!(inv(2).is_empty());
        assert_eq!(inv(-14), vec![big(4)]);
        assert_eq!(inv(-21), vec![big(2), big(2)]);
        assert_eq!(inv(10), vec![big(2)]);
        assert_eq!(inv(79), vec![big(3)]);
    }

    #[test]
    fn fundamental_units() {
        let unit = |d: i64| {
            let k = QuadField::new(d).unwrap();
            (k.units().fundamental[0].clone(), k.unit_norm)
        };
        assert_eq!(unit(2), (order::to_elem(&[1, 1]), -1));
        // (1 + sqrt5)/2 = w
        assert_eq!(unit(5), (order::to_elem(&[0, 1]), -1));
        assert_eq!(unit(3), (order::to_elem(&[2, 1]), 1));
        // 1520 + 273 sqrt31
        assert_eq!(unit(31), (order::to_elem(&[1520, 273]), 1));
    }

    #[test]
    fn principal_generators() {
        let k = QuadField::new(-1).unwrap();
        let i = Ideal::principal(&k.order, &k.elem(2, 1));
        let g = k.principal_generator(&i).unwrap();
        assert_eq!(Ideal::principal(&k.order, &g), i);
        assert_eq!(k.norm(&g), big(5));

        let k = QuadField::new(-5).unwrap();
        let p2 = k.split_prime(2).remove(0);
        assert_eq!(k.principal_generator(&p2.ideal), Err(Error::NotPrincipal));

        let k = QuadField::new(-23).unwrap();
        let p2 = k.split_prime(2).remove(0);
        let cube = p2.ideal.pow(3, &k.order);
        let g = k.principal_generator(&cube).unwrap();
        assert_eq!(k.norm(&g), big(8));
        // (+-3 +- sqrt(-23))/2 in coordinates on 1, w = (1 + sqrt(-23))/2
        assert!(
            g[1].abs().is_one()
                && (g[0] == big(1) || g[0] == big(-2) || g[0] == big(-1) || g[0] == big(2))
        );
    }

    #[test]
    fn totally_positive_when_possible() {
        let k = QuadField::new(2).unwrap();
        let p7 = k.split_prime(7).remove(0);
        let g = k.principal_generator(&p7.ideal).unwrap();
        assert_eq!(k.norm(&g), big(7));
        assert_eq!(k.real_sign(&g), 1);
        assert_eq!(k.real_sign(&k.conj(&g)), 1);
    }

    #[test]
    fn class_relations_are_principal() {
        for d in [-23i64, -14, -21, 10, 79, -47] {
            let k = QuadField::new(d).unwrap();
            let cd = k.class_data(3).unwrap();
            assert_eq!(cd.class_number(), k.class_number());
            for (j, r) in cd.relations.iter().enumerate() {
                let mut a = Ideal::unit(&k.order);
                let mut inv = Ideal::unit(&k.order);
                for (i, ri) in r.iter().enumerate() {
                    let e = ri.to_i64().unwrap();
                    if e >= 0 {
                        a = a.mul(&cd.gens[i].pow(e as u64, &k.order), &k.order);
                    } else {
                        inv = inv.mul(&cd.gens[i].pow((-e) as u64, &k.order), &k.order);
                    }
                }
                // prod g^r * den = (gamma) * prod_{r<0} g^|r| ... checked as (gamma) * inv = a * den
                let lhs = Ideal::principal(&k.order, &cd.principal_gens[j]).mul(&inv, &k.order);
                let rhs = a.mul(&Ideal::from_int(&k.order, &cd.denominators[j]), &k.order);
                assert_eq!(lhs, rhs, "d={d} relation {j}");
            }
        }
    }
}
