//! Unit groups of residue rings `O/P^k` for a prime `P` above `p`.
//!
//! `(O/P^k)^*` splits as the cyclic Teichmüller part of order `q - 1` times
//! the one-unit group `U^1/U^k`. One-units are handled in two regimes:
//! below `j0 = floor(e/(p-1)) + 1` by a ladder of additive layers
//! `U^a/U^b ~ P^a/P^b` (`b <= 2a`), from `j0` on by the p-adic logarithm,
//! which identifies `U^j0/U^k` with `P^j0/P^k`.

use std::collections::HashMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

use crate::arith::{factor_big, mod_inv, pow_big, valuation_u64};
use crate::backend::PrimeIdeal;
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{self, Elem, Order};
use crate::zabgroup::{normalize_invariants, p_local_snf, AbGroup};

/// Bound on the largest prime factor of `q - 1` handled by baby-step giant-step.
pub const BSGS_BOUND: u64 = 1 << 48;

/// Coordinates modulo `p^prec` over the integral basis.
#[derive(Clone, Debug)]
pub struct ResidueRing<'a> {
    pub order: &'a Order,
    pub p: u64,
    pub prec: u32,
    pub modulus: BigInt,
}

impl<'a> ResidueRing<'a> {
    pub fn new(order: &'a Order, p: u64, prec: u32) -> Self {
        ResidueRing {
            order,
            p,
            prec,
            modulus: pow_big(p, prec),
        }
    }

    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        order::reduce_coords(x, &self.modulus)
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Elem {
        self.order.mul_mod(a, b, &self.modulus)
    }

    pub fn pow(&self, a: &[BigInt], e: &BigInt) -> Elem {
        self.order.pow_mod(a, e, &self.modulus)
    }

    pub fn pow_u(&self, a: &[BigInt], e: u64) -> Elem {
        self.pow(a, &BigInt::from(e))
    }

    pub fn one(&self) -> Elem {
        self.order.one()
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt]) -> Elem {
        self.reduce(&order::sub(a, b))
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Elem {
        self.reduce(&order::add(a, b))
    }
}

/// `P^j` as `(p^ceil(j/e), pi^j)` for a uniformizer `pi` that is a unit at
/// the other primes above `p`.
pub fn prime_power(order: &Order, prime: &PrimeIdeal, pi: &[BigInt], j: u32) -> Ideal {
    if j == 0 {
        return Ideal::unit(order);
    }
    let c = j.div_ceil(prime.e);
    let d = pow_big(prime.p, c);
    let g = order.pow_mod(pi, &BigInt::from(j), &d);
    Ideal::from_generators(order, &[g], &d)
}

/// Finds `pi` in `P \ P^2` lying in no other prime above `p`.
pub fn find_uniformizer(order: &Order, prime: &PrimeIdeal, others: &[PrimeIdeal]) -> Elem {
    let p2 = prime.ideal.mul(&prime.ideal, order);
    let good = |x: &Elem| !p2.contains(x) && others.iter().all(|q| !q.ideal.contains(x));
    if good(&prime.alpha) {
        return prime.alpha.clone();
    }
    let rows = prime.ideal.basis().to_vec();
    for r in &rows {
        if good(r) {
            return r.clone();
        }
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(prime.p ^ 0x7f4a_7c15);
    let span = BigInt::from(prime.p.max(3));
    loop {
        let mut x = order.zero();
        for r in &rows {
            let c = BigInt::from(rng.gen_range(0..span.to_u64().unwrap()));
            x = order::add(&x, &order::scale(r, &c));
        }
        x = order::add(&x, &prime.alpha);
        if good(&x) {
            return x;
        }
    }
}

/// Working data for one prime at a fixed precision: uniformizer,
/// localizing idempotent, inverses, logarithm and exponential.
#[derive(Clone, Debug)]
pub struct LocalContext<'a> {
    pub ring: ResidueRing<'a>,
    pub prime: PrimeIdeal,
    pub pi: Elem,
    /// `eps = 1 mod P^(e*prec)`, `eps = 0 mod Q^(e_Q*prec)` for the other `Q | p`.
    pub eps: Elem,
}

impl<'a> LocalContext<'a> {
    pub fn new(order: &'a Order, prime: &PrimeIdeal, others: &[PrimeIdeal], prec: u32) -> Self {
        let ring = ResidueRing::new(order, prime.p, prec);
        let pi = ring.reduce(&find_uniformizer(order, prime, others));
        let mut ctx = LocalContext {
            ring,
            prime: prime.clone(),
            pi,
            eps: order.one(),
        };
        if !others.is_empty() {
            let mut b0 = order.one();
            for q in others {
                let beta = q
                    .ideal
                    .basis()
                    .iter()
                    .find(|r| !prime.ideal.contains(r))
                    .cloned()
                    .expect("distinct primes are coprime");
                b0 = ctx.ring.mul(&b0, &beta);
            }
            let m = others.iter().map(|q| q.e).max().unwrap() * prec;
            let b = ctx.ring.pow_u(&b0, m as u64);
            let binv = ctx.inverse(&b);
            ctx.eps = ctx.ring.mul(&b, &binv);
        }
        ctx
    }

    pub fn order(&self) -> &'a Order {
        self.ring.order
    }

    /// Inverse of a `P`-unit modulo `P^(e*prec)` by Newton iteration.
    pub fn inverse(&self, u: &[BigInt]) -> Elem {
        let ring = &self.ring;
        let q = self.prime.q();
        let mut x = ring.pow(u, &(q - 2u32).max(BigInt::zero()));
        let target = self.prime.e * ring.prec;
        let mut acc = 1u32;
        let two = ring.order.from_int(BigInt::from(2));
        while acc < target {
            let ux = ring.mul(u, &x);
            x = ring.mul(&x, &ring.sub(&two, &ux));
            acc *= 2;
        }
        x
    }

    /// Number of log-series terms needed modulo `P^k` for arguments in
    /// `P^j`, and the largest `v_p(i)` among them.
    pub fn log_terms(p: u64, e: u32, j: u32, k: u32) -> (u64, u32) {
        let mut last = 0u64;
        let mut guard = 0u32;
        let mut i = 1u64;
        loop {
            let v = valuation_u64(i, p);
            if (i as i64) * j as i64 - (e as i64) * (v as i64) < k as i64 {
                last = i;
                guard = guard.max(v);
            }
            let logp = (i as f64).ln() / (p as f64).ln();
            if i > e as u64 + 1
                && (i as f64) * j as f64 - e as f64 * logp.floor() >= k as f64
                && (i as f64) * j as f64 - e as f64 * (logp.floor() + 1.0) >= k as f64
            {
                break;
            }
            i += 1;
        }
        (last, guard)
    }

    /// `log(u)` modulo `p^(prec - guard)` for `u = 1 mod P^j`, `j > e/(p-1)`,
    /// accurate modulo `P^k`.
    pub fn log(&self, u: &[BigInt], j: u32, k: u32) -> Result<Elem> {
        let p = self.prime.p;
        let e = self.prime.e;
        if (j as u64) * (p - 1) <= e as u64 {
            return Err(Error::Precision(format!(
                "log argument level {j} at or below e/(p-1) for e={e}, p={p}"
            )));
        }
        let ring = &self.ring;
        let (terms, guard) = Self::log_terms(p, e, j, k);
        if ring.prec < guard + k.div_ceil(e) {
            return Err(Error::Precision(format!(
                "log needs precision {} but ring has {}",
                guard + k.div_ceil(e),
                ring.prec
            )));
        }
        let x = ring.mul(&self.eps, &ring.sub(u, &ring.one()));
        let mut power = x.clone();
        let mut acc = ring.order.zero();
        for i in 1..=terms {
            if i > 1 {
                power = ring.mul(&power, &x);
            }
            let v = valuation_u64(i, p);
            let pv = pow_big(p, v);
            let unit = BigInt::from(i / p.pow(v));
            let mut term = Vec::with_capacity(power.len());
            for c in &power {
                let (qt, r) = c.div_rem(&pv);
                if !r.is_zero() {
                    return Err(Error::Precision(format!(
                        "log term {i} not divisible by p^{v}"
                    )));
                }
                term.push(qt);
            }
            let uinv = mod_inv(&unit, &ring.modulus).expect("prime-to-p unit");
            let term = order::scale(&term, &uinv);
            acc = if i % 2 == 1 {
                ring.add(&acc, &term)
            } else {
                ring.sub(&acc, &term)
            };
        }
        Ok(order::reduce_coords(&acc, &pow_big(p, ring.prec - guard)))
    }

    /// `exp(x)` for `x` in `P^j`, `j > e/(p-1)`, accurate modulo `P^k`.
    pub fn exp(&self, x: &[BigInt], j: u32, k: u32) -> Result<Elem> {
        let p = self.prime.p;
        let e = self.prime.e;
        if (j as u64) * (p - 1) <= e as u64 {
            return Err(Error::Precision(format!(
                "exp argument level {j} too shallow"
            )));
        }
        let ring = &self.ring;
        // terms x^i/i! with i*j - e*v_p(i!) < k are needed
        let mut i = 1u64;
        let mut vfact = 0u32;
        let mut last = 0u64;
        let mut loss = 0u32;
        loop {
            vfact += valuation_u64(i, p);
            if (i as i64) * (j as i64) - (e as i64) * (vfact as i64) < k as i64 {
                last = i;
                loss = vfact;
            } else if (i as f64) * (j as f64 - e as f64 / (p as f64 - 1.0)) >= k as f64 {
                break;
            }
            i += 1;
        }
        if ring.prec < loss + k.div_ceil(e) {
            return Err(Error::Precision(format!(
                "exp needs precision {} but ring has {}",
                loss + k.div_ceil(e),
                ring.prec
            )));
        }
        let xl = ring.mul(&self.eps, x);
        let mut acc = ring.one();
        let mut power = ring.one();
        let mut fact_unit = BigInt::one();
        let mut fact_v = 0u32;
        for i in 1..=last {
            power = ring.mul(&power, &xl);
            let v = valuation_u64(i, p);
            fact_v += v;
            fact_unit = (fact_unit * BigInt::from(i / p.pow(v))).mod_floor(&ring.modulus);
            let pv = pow_big(p, fact_v);
            let mut term = Vec::with_capacity(power.len());
            for c in &power {
                let (qt, r) = c.div_rem(&pv);
                if !r.is_zero() {
                    return Err(Error::Precision(format!(
                        "exp term {i} not divisible by p^{fact_v}"
                    )));
                }
                term.push(qt);
            }
            let uinv = mod_inv(&fact_unit, &ring.modulus).expect("prime-to-p unit");
            acc = ring.add(&acc, &order::scale(&term, &uinv));
        }
        Ok(order::reduce_coords(&acc, &pow_big(p, ring.prec - loss)))
    }
}

/// Working precision for a local unit group modulo `P^k`.
pub fn working_precision(p: u64, e: u32, k: u32) -> u32 {
    let j0 = e / (p as u32 - 1).max(1) + 1;
    let guard = if k > j0 {
        LocalContext::log_terms(p, e, j0, k).1
    } else {
        0
    };
    k.div_ceil(e) + guard + 1
}

/// `j0 = floor(e/(p-1)) + 1`, the first level where log and exp converge.
pub fn log_level(p: u64, e: u32) -> u32 {
    (e as u64 / (p - 1)) as u32 + 1
}

/// Exponent bound: `u^(p^A) = 1 mod P^k` for every one-unit `u`.
pub fn one_unit_exponent(p: u64, e: u32, k: u32) -> u32 {
    let mut j = 1u64;
    let mut s = 0;
    while j < k as u64 {
        j = (j * p).min(j + e as u64);
        s += 1;
    }
    s
}

#[derive(Clone, Debug)]
struct Layer {
    lower: Ideal,
    upper: Ideal,
    gens: Vec<Elem>,
    inv_gens: Vec<Elem>,
    col0: usize,
}

#[derive(Clone, Debug)]
struct Deep {
    lower: Ideal,
    top: Ideal,
    col0: usize,
}

/// Residue field `O/P` with discrete logarithms.
#[derive(Clone, Debug)]
pub struct ResidueField<'a> {
    order: &'a Order,
    prime: Ideal,
    p: BigInt,
    pub q: BigInt,
    factors: Vec<(u64, u32)>,
    pub generator: Elem,
}

impl<'a> ResidueField<'a> {
    pub fn new(order: &'a Order, prime: &PrimeIdeal) -> Result<Self> {
        let q = prime.q();
        let qm1 = &q - 1u32;
        let factors = if qm1.is_one() {
            Vec::new()
        } else {
            factor_big(&qm1).ok_or_else(|| Error::Resource(format!("cannot factor q-1 = {qm1}")))?
        };
        if factors.iter().any(|&(l, _)| l > BSGS_BOUND) {
            return Err(Error::Resource(format!(
                "q-1 = {qm1} has a factor above the BSGS bound"
            )));
        }
        let mut f = ResidueField {
            order,
            prime: prime.ideal.clone(),
            p: BigInt::from(prime.p),
            q,
            factors,
            generator: order.one(),
        };
        f.generator = f.find_generator();
        Ok(f)
    }

    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        self.prime.reduce(&order::reduce_coords(x, &self.p))
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Elem {
        self.reduce(&self.order.mul_mod(a, b, &self.p))
    }

    pub fn pow(&self, a: &[BigInt], e: &BigInt) -> Elem {
        self.reduce(&self.order.pow_mod(a, e, &self.p))
    }

    fn is_one(&self, a: &[BigInt]) -> bool {
        self.reduce(a) == self.reduce(&self.order.one())
    }

    fn find_generator(&self) -> Elem {
        let qm1 = &self.q - 1u32;
        let n = self.order.degree();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x9e37_79b9);
        loop {
            let x: Elem = (0..n)
                .map(|_| BigInt::from(rng.gen_range(0..self.p.to_u64().unwrap())))
                .collect();
            let x = self.reduce(&x);
            if order::is_zero(&x) {
                continue;
            }
            if self
                .factors
                .iter()
                .all(|&(l, _)| !self.is_one(&self.pow(&x, &(&qm1 / l))))
            {
                return x;
            }
        }
    }

    /// `c` with `generator^c = x` in `O/P`, `x` a unit.
    pub fn dlog(&self, x: &[BigInt]) -> Result<BigInt> {
        let qm1 = &self.q - 1u32;
        let x = self.reduce(x);
        if order::is_zero(&x) {
            return Err(Error::Invalid("discrete log of a non-unit".into()));
        }
        let mut residues = Vec::new();
        for &(l, a) in &self.factors {
            let la = pow_big(l, a);
            let cof = &qm1 / &la;
            let g = self.pow(&self.generator, &cof);
            let h = self.pow(&x, &cof);
            let g0 = self.pow(&g, &pow_big(l, a - 1));
            let mut xl = BigInt::zero();
            for i in 0..a {
                let ginv = self.pow(&g, &(&la - &xl).mod_floor(&la));
                let hi = self.pow(&self.mul(&ginv, &h), &pow_big(l, a - 1 - i));
                let d = self.bsgs(&g0, &hi, l)?;
                xl += BigInt::from(d) * pow_big(l, i);
            }
            residues.push((xl, la));
        }
        let mut r = BigInt::zero();
        let mut m = BigInt::one();
        for (a, n) in residues {
            let t = ((a - &r) * mod_inv(&m, &n).unwrap()).mod_floor(&n);
            r += &m * t;
            m *= n;
        }
        Ok(r.mod_floor(&qm1.max(BigInt::one())))
    }

    fn bsgs(&self, g: &[BigInt], h: &[BigInt], ord: u64) -> Result<u64> {
        let m = (ord as f64).sqrt().ceil() as u64 + 1;
        let mut table: HashMap<Elem, u64> = HashMap::with_capacity(m as usize);
        let mut cur = self.reduce(&self.order.one());
        for j in 0..m {
            table.entry(cur.clone()).or_insert(j);
            cur = self.mul(&cur, g);
        }
        let giant = self.pow(g, &BigInt::from((ord - m % ord) % ord));
        let mut y = self.reduce(h);
        for i in 0..=m {
            if let Some(&j) = table.get(&y) {
                return Ok((i * m + j) % ord);
            }
            y = self.mul(&y, &giant);
        }
        Err(Error::Defect(
            "baby-step giant-step found no logarithm".into(),
        ))
    }
}

#[derive(Clone, Debug)]
struct Teich<'a> {
    field: ResidueField<'a>,
    gen: Elem,
}

/// Structure of `(O/P^k)^*` with discrete logarithms.
#[derive(Debug)]
pub struct LocalUnitGroup<'a> {
    pub prime: PrimeIdeal,
    pub k: u32,
    pub q: BigInt,
    pub ctx: LocalContext<'a>,
    j0: u32,
    top: u32,
    layers: Vec<Layer>,
    deep: Option<Deep>,
    /// Exponent of the one-unit group divides `p^exp_bound`.
    pub exp_bound: u32,
    raw_cols: usize,
    transform: Vec<Vec<BigInt>>,
    /// `(column of the transform, exponent)` for each nontrivial cyclic factor.
    factors: Vec<(usize, u32)>,
    teich: OnceLock<std::result::Result<Teich<'a>, Error>>,
    others: Vec<PrimeIdeal>,
}

impl<'a> LocalUnitGroup<'a> {
    /// `others` are the remaining primes above `p`, needed for localization.
    pub fn new(
        order: &'a Order,
        prime: &PrimeIdeal,
        others: &[PrimeIdeal],
        k: u32,
    ) -> Result<Self> {
        if k == 0 {
            return Err(Error::Invalid("local unit group needs k >= 1".into()));
        }
        let p = prime.p;
        let e = prime.e;
        let prec = working_precision(p, e, k);
        let ctx = LocalContext::new(order, prime, others, prec);
        let j0 = log_level(p, e);
        let top = j0.min(k);
        let n = order.degree();
        let exp_bound = one_unit_exponent(p, e, k);
        let mut layers = Vec::new();
        let mut a = 1;
        let mut col = 0;
        while a < top {
            let b = (2 * a).min(top);
            let lower = prime_power(order, prime, &ctx.pi, a);
            let upper = prime_power(order, prime, &ctx.pi, b);
            let gens: Vec<Elem> = lower
                .basis()
                .iter()
                .map(|r| ctx.ring.reduce(&order::add(r, &order.one())))
                .collect();
            let inv_gens = gens.iter().map(|g| ctx.inverse(g)).collect();
            layers.push(Layer {
                lower,
                upper,
                gens,
                inv_gens,
                col0: col,
            });
            col += n;
            a = b;
        }
        let deep = (k > j0).then(|| {
            let d = Deep {
                lower: prime_power(order, prime, &ctx.pi, j0),
                top: prime_power(order, prime, &ctx.pi, k),
                col0: col,
            };
            col += n;
            d
        });
        let mut g = LocalUnitGroup {
            prime: prime.clone(),
            k,
            q: prime.q(),
            ctx,
            j0,
            top,
            layers,
            deep,
            exp_bound,
            raw_cols: col,
            transform: Vec::new(),
            factors: Vec::new(),
            teich: OnceLock::new(),
            others: others.to_vec(),
        };
        g.build_structure()?;
        Ok(g)
    }

    fn power_signed(&self, layer: &Layer, i: usize, c: &BigInt) -> Elem {
        let ring = &self.ctx.ring;
        if c.is_negative() {
            ring.pow(&layer.gens[i], &-c)
        } else {
            ring.pow(&layer.inv_gens[i], c)
        }
    }

    /// Raw coordinates of a one-unit starting at ladder layer `start`.
    fn raw_dlog_from(&self, u: &[BigInt], start: usize) -> Result<Vec<BigInt>> {
        let ring = &self.ctx.ring;
        let mut raw = vec![BigInt::zero(); self.raw_cols];
        let mut u = ring.reduce(u);
        let one = ring.one();
        for layer in &self.layers[start..] {
            let r = layer.upper.reduce(&order::sub(&u, &one));
            let c = layer
                .lower
                .coords(&r)
                .ok_or_else(|| Error::Defect("element left its one-unit layer".into()))?;
            for (i, ci) in c.iter().enumerate() {
                if !ci.is_zero() {
                    u = ring.mul(&u, &self.power_signed(layer, i, ci));
                }
                raw[layer.col0 + i] = ci.clone();
            }
        }
        if let Some(deep) = &self.deep {
            let l = self.ctx.log(&u, self.j0, self.k)?;
            let l = deep.top.reduce(&l);
            let c = deep
                .lower
                .coords(&l)
                .ok_or_else(|| Error::Defect("logarithm outside P^j0".into()))?;
            for (i, ci) in c.into_iter().enumerate() {
                raw[deep.col0 + i] = ci;
            }
        } else {
            let top = prime_power(self.ctx.order(), &self.prime, &self.ctx.pi, self.top);
            if !top.contains(&order::sub(&u, &one)) {
                return Err(Error::Defect("ladder did not reach the top level".into()));
            }
        }
        Ok(raw)
    }

    fn build_structure(&mut self) -> Result<()> {
        let ring = &self.ctx.ring;
        let mut rels: Vec<Vec<BigInt>> = Vec::new();
        let pa = pow_big(self.prime.p, self.exp_bound + 1);
        for (li, layer) in self.layers.iter().enumerate() {
            for row in layer.upper.basis() {
                let r = layer.lower.coords(row).expect("P^b inside P^a");
                let mut z = ring.one();
                for (i, ri) in r.iter().enumerate() {
                    if !ri.is_zero() {
                        let ri = ri.mod_floor(&pa);
                        z = ring.mul(&z, &ring.pow(&layer.gens[i], &ri));
                    }
                }
                let deeper = self.raw_dlog_from(&z, li + 1)?;
                let mut rel: Vec<BigInt> = deeper.iter().map(|x| -x).collect();
                for (i, ri) in r.into_iter().enumerate() {
                    rel[layer.col0 + i] = ri;
                }
                rels.push(rel);
            }
        }
        if let Some(deep) = &self.deep {
            for row in deep.top.basis() {
                let c = deep.lower.coords(row).expect("P^k inside P^j0");
                let mut rel = vec![BigInt::zero(); self.raw_cols];
                for (i, ci) in c.into_iter().enumerate() {
                    rel[deep.col0 + i] = ci;
                }
                rels.push(rel);
            }
        }
        let a = self.exp_bound + 1;
        let snf = p_local_snf(&rels, self.raw_cols, self.prime.p, a, true);
        if snf.exponents.iter().any(|&v| v >= a) {
            return Err(Error::Defect(format!(
                "one-unit group of P^{} exceeds its exponent bound",
                self.k
            )));
        }
        self.transform = snf.transform.unwrap();
        self.factors = snf
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > 0)
            .map(|(j, &v)| (j, v))
            .collect();
        let expected = (self.k - 1) * self.prime.f;
        let total: u32 = self.factors.iter().map(|f| f.1).sum();
        if total != expected {
            return Err(Error::Defect(format!(
                "one-unit group order p^{total}, expected p^{expected}"
            )));
        }
        Ok(())
    }

    /// Exponents `v_i` of the one-unit group `prod Z/p^{v_i}`.
    pub fn one_unit_exponents(&self) -> Vec<u32> {
        self.factors.iter().map(|f| f.1).collect()
    }

    /// Coordinates of a one-unit on the cyclic factors, reduced mod `p^{v_i}`.
    pub fn dlog_one_unit(&self, u: &[BigInt]) -> Result<Vec<BigInt>> {
        let one = self.ctx.ring.one();
        if !self.prime.ideal.contains(&order::sub(u, &one)) {
            return Err(Error::Invalid("not a one-unit".into()));
        }
        let raw = self.raw_dlog_from(u, 0)?;
        Ok(self.to_snf_coords(&raw))
    }

    fn to_snf_coords(&self, raw: &[BigInt]) -> Vec<BigInt> {
        self.factors
            .iter()
            .map(|&(j, v)| {
                let s: BigInt = raw
                    .iter()
                    .zip(self.transform.iter())
                    .filter(|(x, _)| !x.is_zero())
                    .map(|(x, row)| x * &row[j])
                    .sum();
                s.mod_floor(&pow_big(self.prime.p, v))
            })
            .collect()
    }

    fn teich(&self) -> Result<&Teich<'a>> {
        self.teich
            .get_or_init(|| {
                let field = ResidueField::new(self.ctx.order(), &self.prime)?;
                let ring = &self.ctx.ring;
                let top = prime_power(self.ctx.order(), &self.prime, &self.ctx.pi, self.k);
                let mut t = ring.reduce(&field.generator);
                loop {
                    let next = ring.pow(&t, &self.q);
                    if top.reduce(&next) == top.reduce(&t) {
                        break;
                    }
                    t = next;
                }
                Ok(Teich { field, gen: t })
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Element of exact order `q - 1` modulo `P^k`.
    pub fn teichmueller_generator(&self) -> Result<Elem> {
        Ok(self.teich()?.gen.clone())
    }

    /// Full structure `Z/(q-1) x prod Z/p^{v_i}`.
    pub fn structure(&self) -> AbGroup {
        let mut orders: Vec<BigInt> = vec![&self.q - 1u32];
        orders.extend(self.factors.iter().map(|&(_, v)| pow_big(self.prime.p, v)));
        AbGroup::from_cyclic_orders(&orders)
    }

    pub fn order(&self) -> BigInt {
        (&self.q - 1u32) * num_traits::pow(self.q.clone(), (self.k - 1) as usize)
    }

    /// `[c mod (q-1)] ++ one-unit coordinates` for a `P`-unit `u`.
    pub fn dlog(&self, u: &[BigInt]) -> Result<Vec<BigInt>> {
        let t = self.teich()?;
        let c = t.field.dlog(u)?;
        let ring = &self.ctx.ring;
        let qm1 = &self.q - 1u32;
        let back = ring.pow(
            &t.gen,
            &(&qm1 - &c).mod_floor(&qm1.clone().max(BigInt::one())),
        );
        let one_unit = ring.mul(u, &back);
        let mut out = vec![c];
        out.extend(self.dlog_one_unit(&one_unit)?);
        Ok(out)
    }

    /// Orders of the coordinates returned by [`dlog`](Self::dlog).
    pub fn dlog_moduli(&self) -> Vec<BigInt> {
        let mut m = vec![&self.q - 1u32];
        m.extend(self.factors.iter().map(|&(_, v)| pow_big(self.prime.p, v)));
        m
    }

    /// Explicit generators matching [`dlog`](Self::dlog): the Teichmüller
    /// generator followed by one-unit generators (deep ones via `exp`).
    pub fn generators(&self) -> Result<Vec<Elem>> {
        let order = self.ctx.order();
        let p = self.prime.p;
        let a = self.exp_bound + 1;
        let vinv = inverse_mod_prime_power(&self.transform, p, a)?;
        // deep generators need exp at extra precision
        let extra = {
            let mut i = 1u64;
            let mut vf = 0u32;
            let mut loss = 0u32;
            while (i as f64) * (self.j0 as f64 - self.prime.e as f64 / (p as f64 - 1.0))
                < self.k as f64 + 1.0
            {
                vf += valuation_u64(i, p);
                loss = vf;
                i += 1;
            }
            loss
        };
        let hi = LocalContext::new(
            order,
            &self.prime,
            &self.others,
            self.ctx.ring.prec + extra + 1,
        );
        let ring = &self.ctx.ring;
        let pa = pow_big(p, a);
        let mut out = vec![self.teichmueller_generator()?];
        for &(j, _) in &self.factors {
            let coeffs = &vinv[j];
            let mut g = ring.one();
            for layer in &self.layers {
                for i in 0..layer.gens.len() {
                    let c = coeffs[layer.col0 + i].mod_floor(&pa);
                    if !c.is_zero() {
                        g = ring.mul(&g, &ring.pow(&layer.gens[i], &c));
                    }
                }
            }
            if let Some(deep) = &self.deep {
                let mut x = order.zero();
                for (i, row) in deep.lower.basis().iter().enumerate() {
                    let c = coeffs[deep.col0 + i].mod_floor(&pa);
                    x = order::add(&x, &order::scale(row, &c));
                }
                let ex = hi.exp(&hi.ring.reduce(&x), self.j0, self.k)?;
                g = ring.mul(&g, &ring.reduce(&ex));
            }
            out.push(g);
        }
        Ok(out)
    }

    /// Reduction modulo `P^k`.
    pub fn reduce(&self, x: &[BigInt]) -> Elem {
        prime_power(self.ctx.order(), &self.prime, &self.ctx.pi, self.k).reduce(x)
    }
}

/// Inverse of a matrix that is invertible modulo `p^a`.
pub fn inverse_mod_prime_power(m: &[Vec<BigInt>], p: u64, a: u32) -> Result<Vec<Vec<BigInt>>> {
    let n = m.len();
    let pa = pow_big(p, a);
    let mut aug: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row: Vec<BigInt> = r.iter().map(|x| x.mod_floor(&pa)).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                }
            }));
            row
        })
        .collect();
    let pb = BigInt::from(p);
    for c in 0..n {
        let piv = (c..n)
            .find(|&i| !aug[i][c].is_multiple_of(&pb))
            .ok_or_else(|| Error::Defect("matrix not invertible mod p".into()))?;
        aug.swap(c, piv);
        let inv = mod_inv(&aug[c][c], &pa).unwrap();
        for x in aug[c].iter_mut() {
            *x = (&*x * &inv).mod_floor(&pa);
        }
        for i in 0..n {
            if i != c && !aug[i][c].is_zero() {
                let f = aug[i][c].clone();
                for j in 0..2 * n {
                    let v = (&aug[i][j] - &f * &aug[c][j]).mod_floor(&pa);
                    aug[i][j] = v;
                }
            }
        }
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Unit group of `O/m` for `m = prod P_i^{k_i}` (all above one `p`),
/// as the product of the local groups.
pub struct RingUnitGroup<'a> {
    pub components: Vec<LocalUnitGroup<'a>>,
}

impl<'a> RingUnitGroup<'a> {
    pub fn new(
        order: &'a Order,
        all_primes: &[PrimeIdeal],
        modulus: &[(usize, u32)],
    ) -> Result<Self> {
        let mut components = Vec::new();
        for &(idx, k) in modulus {
            let others: Vec<PrimeIdeal> = all_primes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .map(|(_, q)| q.clone())
                .collect();
            components.push(LocalUnitGroup::new(order, &all_primes[idx], &others, k)?);
        }
        Ok(RingUnitGroup { components })
    }

    pub fn structure(&self) -> AbGroup {
        let mut orders = Vec::new();
        for c in &self.components {
            orders.push(&c.q - 1u32);
            orders.extend(
                c.one_unit_exponents()
                    .iter()
                    .map(|&v| pow_big(c.prime.p, v)),
            );
        }
        AbGroup::from_cyclic_orders(&orders)
    }

    pub fn order(&self) -> BigInt {
        self.components.iter().map(|c| c.order()).product()
    }

    pub fn dlog(&self, u: &[BigInt]) -> Result<Vec<BigInt>> {
        let mut out = Vec::new();
        for c in &self.components {
            out.extend(c.dlog(u)?);
        }
        Ok(out)
    }

    pub fn dlog_moduli(&self) -> Vec<BigInt> {
        self.components
            .iter()
            .flat_map(|c| c.dlog_moduli())
            .collect()
    }

    pub fn invariants(&self) -> Vec<BigInt> {
        normalize_invariants(&self.dlog_moduli())
    }
}
