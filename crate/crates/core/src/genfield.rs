//! Number fields loaded from fixture documents.
//!
//! A fixture carries the integral basis with its multiplication table, class
//! group and unit data, and prime factorizations for primes dividing the
//! index. Every claim is checked before the field is handed out; verified
//! fields are cached by the SHA-256 of the document.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{factor, is_prime};
use crate::backend::{ClassData, FieldBackend, PrimeIdeal, UnitData};
use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::order::{self, Elem, Order};
use crate::polyfp;
use crate::zabgroup::{det_bareiss, normalize_invariants};

/// Integers are decimal strings so that arbitrary sizes survive any JSON reader.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// Defining polynomial, coefficients from the constant term up.
    pub poly: Vec<String>,
    pub degree: usize,
    pub signature: (usize, usize),
    pub disc: String,
    pub index: String,
    /// Integral basis `w_i = num_i(theta) / den_i`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<BasisDoc>>,
    pub basis_mul_table: Vec<Vec<Vec<String>>>,
    pub class_group: ClassGroupDoc,
    pub units: UnitsDoc,
    #[serde(default)]
    pub primes: Vec<PrimeEntryDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub num: Vec<String>,
    pub den: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassGroupDoc {
    #[serde(default)]
    pub cyc: Vec<String>,
    /// Column-style Hermite bases: column `j` is a generator of the lattice.
    pub gens_hnf: Vec<Vec<Vec<String>>>,
    pub relations: Vec<Vec<String>>,
    pub principal_gens: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitsDoc {
    pub fundamental: Vec<Vec<String>>,
    pub torsion_gen: Vec<String>,
    pub torsion_order: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeEntryDoc {
    pub p: String,
    pub ideals: Vec<PrimeIdealDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimeIdealDoc {
    /// `alpha` of the two-element form `(p, alpha)`.
    pub two_elt: Vec<String>,
    pub e: u32,
    pub f: u32,
    pub hnf: Vec<Vec<String>>,
}

fn fx(msg: impl Into<String>) -> Error {
    Error::Fixture(msg.into())
}

fn int(s: &str) -> Result<BigInt> {
    s.trim()
        .parse::<BigInt>()
        .map_err(|_| fx(format!("not an integer: {s:?}")))
}

fn ints(v: &[String]) -> Result<Vec<BigInt>> {
    v.iter().map(|s| int(s)).collect()
}

fn strs(v: &[BigInt]) -> Vec<String> {
    v.iter().map(|x| x.to_string()).collect()
}

fn elem_of_len(v: &[String], n: usize, what: &str) -> Result<Elem> {
    let e = ints(v)?;
    if e.len() != n {
        return Err(fx(format!(
            "{what} has {} coordinates, expected {n}",
            e.len()
        )));
    }
    Ok(e)
}

/// Column-style basis matrix to the ideal it spans.
fn ideal_from_columns(order: &Order, m: &[Vec<String>], what: &str) -> Result<Ideal> {
    let n = order.degree();
    if m.len() != n || m.iter().any(|r| r.len() != n) {
        return Err(fx(format!("{what}: basis matrix is not {n}x{n}")));
    }
    let rows: Vec<Vec<BigInt>> = m.iter().map(|r| ints(r)).collect::<Result<_>>()?;
    let cols: Vec<Elem> = (0..n)
        .map(|j| (0..n).map(|i| rows[i][j].clone()).collect())
        .collect();
    let det = det_bareiss(cols.clone()).abs();
    if det.is_zero() {
        return Err(fx(format!("{what}: singular basis")));
    }
    let ideal = Ideal::from_z_basis(&cols, &det);
    if ideal.norm() != &det {
        return Err(fx(format!("{what}: lattice index mismatch")));
    }
    for b in ideal.basis() {
        for j in 0..n {
            if !ideal.contains(&order.mul(b, &order.basis_elem(j))) {
                return Err(fx(format!("{what}: lattice is not an ideal")));
            }
        }
    }
    Ok(ideal)
}

/// A fixture-backed number field after verification.
#[derive(Debug)]
pub struct GenField {
    pub name: String,
    pub poly: Vec<BigInt>,
    pub signature: (usize, usize),
    pub disc: BigInt,
    pub index: BigInt,
    order: Order,
    /// `theta^j` in the integral basis, when the basis is known.
    theta_powers: Option<Vec<Elem>>,
    class: ClassData,
    pub cyc: Vec<BigInt>,
    units: UnitData,
    prime_table: BTreeMap<u64, Vec<PrimeIdeal>>,
    kd_cache: Mutex<HashMap<u64, Vec<PrimeIdeal>>>,
    doc: FixtureDoc,
}

impl GenField {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: FixtureDoc =
            serde_json::from_str(text).map_err(|e| fx(format!("schema violation: {e}")))?;
        Self::from_doc(doc)
    }

    pub fn from_doc(doc: FixtureDoc) -> Result<Self> {
        let poly = ints(&doc.poly)?;
        let n = doc.degree;
        if n == 0 || poly.len() != n + 1 {
            return Err(fx(format!(
                "polynomial length {} does not match degree {n}",
                poly.len()
            )));
        }
        if !poly[n].is_one() {
            return Err(fx("polynomial is not monic"));
        }
        let (r1, r2) = doc.signature;
        if r1 + 2 * r2 != n {
            return Err(fx(format!(
                "signature ({r1},{r2}) inconsistent with degree {n}"
            )));
        }
        let disc = int(&doc.disc)?;
        let index = int(&doc.index)?;
        if disc.is_zero() || !index.is_positive() {
            return Err(fx("discriminant and index must be nonzero"));
        }
        if (disc.is_negative()) != (r2 % 2 == 1) {
            return Err(fx("discriminant sign contradicts the signature"));
        }

        let table: Vec<Vec<Vec<BigInt>>> = doc
            .basis_mul_table
            .iter()
            .map(|row| row.iter().map(|v| ints(v)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        if table.len() != n {
            return Err(fx("multiplication table has wrong size"));
        }
        let order = Order::new(table).map_err(|e| fx(format!("multiplication table: {e}")))?;
        order.check_table()?;
        verify_discriminant(&order, &disc)?;

        let theta_powers = match &doc.basis {
            Some(b) => Some(verify_basis(&order, &poly, b, &index)?),
            None => None,
        };

        let units = verify_units(&order, &doc.units, r1 + r2 - 1)?;
        let (class, cyc) = verify_class_group(&order, &doc.class_group)?;

        let mut prime_table = BTreeMap::new();
        for entry in &doc.primes {
            let p = int(&entry.p)?
                .to_u64()
                .filter(|&p| is_prime(p))
                .ok_or_else(|| fx(format!("prime table entry {} is not a prime", entry.p)))?;
            let mut primes = Vec::new();
            for (k, pd) in entry.ideals.iter().enumerate() {
                let what = format!("prime {k} above {p}");
                let alpha = elem_of_len(&pd.two_elt, n, &what)?;
                let pr = PrimeIdeal::new(&order, p, alpha, pd.e, pd.f);
                let from_hnf = ideal_from_columns(&order, &pd.hnf, &what)?;
                if from_hnf != pr.ideal {
                    return Err(fx(format!("{what}: two-element form and basis disagree")));
                }
                if pr.ideal.norm() != &pr.q() {
                    return Err(fx(format!("{what}: norm is not p^f")));
                }
                primes.push(pr);
            }
            let total: u32 = primes.iter().map(|q| q.e * q.f).sum();
            if total as usize != n || !crate::backend::check_factorization(&order, p, &primes) {
                return Err(fx(format!(
                    "factorization of {p} does not multiply back to (p)"
                )));
            }
            prime_table.insert(p, primes);
        }

        let name = doc.name.clone().unwrap_or_else(|| poly_string(&poly));
        let field = GenField {
            name,
            poly,
            signature: (r1, r2),
            disc,
            index,
            order,
            theta_powers,
            class,
            cyc,
            units,
            prime_table,
            kd_cache: Mutex::new(HashMap::new()),
            doc,
        };
        for (&p, primes) in &field.prime_table {
            if !field.index.is_multiple_of(&BigInt::from(p)) && field.theta_powers.is_some() {
                let kd = field.kummer_dedekind(p)?;
                let mut a: Vec<&Ideal> = kd.iter().map(|q| &q.ideal).collect();
                let mut b: Vec<&Ideal> = primes.iter().map(|q| &q.ideal).collect();
                a.sort_by_key(|i| i.basis().to_vec());
                b.sort_by_key(|i| i.basis().to_vec());
                if a != b {
                    return Err(fx(format!(
                        "prime table for {p} disagrees with polynomial factorization"
                    )));
                }
            }
        }
        Ok(field)
    }

    /// SHA-256 of the canonical serialization, in hex.
    pub fn fingerprint(&self) -> String {
        format!("{:x}", Sha256::digest(to_json(self).as_bytes()))
    }

    pub fn doc(&self) -> &FixtureDoc {
        &self.doc
    }

    /// Primes above `p` from the polynomial factorization modulo `p`.
    fn kummer_dedekind(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        let thetas = self.theta_powers.as_ref().ok_or_else(|| {
            fx(format!(
                "no integral basis in fixture; factorization of {p} must be supplied"
            ))
        })?;
        let pb = BigInt::from(p);
        let coeffs: Vec<u64> = self
            .poly
            .iter()
            .map(|c| c.mod_floor(&pb).to_u64().unwrap())
            .collect();
        let n = self.order.degree();
        let mut out = Vec::new();
        for (g, e) in polyfp::factor(&coeffs, p) {
            let f = (g.len() - 1) as u32;
            // an irreducible defining polynomial leaves p inert: (p) = (p, p)
            let mut alpha = if f as usize == n {
                self.order.from_int(pb.clone())
            } else {
                self.order.zero()
            };
            if (f as usize) < n {
                for (j, &c) in g.iter().enumerate() {
                    if c != 0 {
                        alpha = order::add(&alpha, &order::scale(&thetas[j], &BigInt::from(c)));
                    }
                }
            }
            out.push(PrimeIdeal::new(&self.order, p, alpha, e, f));
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Arc<GenField>> {
        let bytes = std::fs::read(path)
            .map_err(|e| Error::Invalid(format!("cannot read fixture {}: {e}", path.display())))?;
        Self::load_bytes(&bytes)
    }

    /// Parses and verifies, reusing an earlier result for identical bytes.
    pub fn load_bytes(bytes: &[u8]) -> Result<Arc<GenField>> {
        static CACHE: OnceLock<Mutex<HashMap<[u8; 32], Arc<GenField>>>> = OnceLock::new();
        let key: [u8; 32] = Sha256::digest(bytes).into();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(f) = cache.lock().unwrap().get(&key) {
            return Ok(f.clone());
        }
        let text = std::str::from_utf8(bytes).map_err(|_| fx("fixture is not UTF-8"))?;
        let field = Arc::new(Self::from_json(text)?);
        cache.lock().unwrap().insert(key, field.clone());
        Ok(field)
    }

    /// `v_P(x)` for nonzero `x`.
    pub fn valuation(&self, x: &[BigInt], pr: &PrimeIdeal) -> Result<u32> {
        if order::is_zero(x) {
            return Err(Error::Invalid("valuation of zero".into()));
        }
        let cap = (self.order.norm(x).abs().bits() as u32 + 1) * pr.e + 1;
        Ok(pr.ideal.valuation_of(x, &self.order, cap))
    }
}

fn poly_string(c: &[BigInt]) -> String {
    let mut parts = Vec::new();
    for (i, a) in c.iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let mag = a.abs();
        let coef = if mag.is_one() && i > 0 {
            String::new()
        } else {
            mag.to_string()
        };
        let mono = match i {
            0 => coef,
            1 if coef.is_empty() => "x".to_string(),
            1 => format!("{coef}*x"),
            _ if coef.is_empty() => format!("x^{i}"),
            _ => format!("{coef}*x^{i}"),
        };
        let sign = if a.is_negative() { "-" } else { "+" };
        parts.push((sign, mono));
    }
    let mut s = String::new();
    for (k, (sign, mono)) in parts.into_iter().enumerate() {
        if k == 0 {
            if sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(&mono);
    }
    s
}

fn verify_discriminant(order: &Order, disc: &BigInt) -> Result<()> {
    let n = order.degree();
    let traces: Vec<BigInt> = (0..n).map(|k| order.trace(&order.basis_elem(k))).collect();
    let gram: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let w = order.table_entry(i, j);
                    w.iter().zip(&traces).map(|(a, t)| a * t).sum()
                })
                .collect()
        })
        .collect();
    if &det_bareiss(gram) != disc {
        return Err(fx(
            "discriminant does not match the trace form of the basis",
        ));
    }
    Ok(())
}

/// Checks the multiplication table against polynomial arithmetic and
/// returns `theta^j` (`j < n`) in the integral basis.
fn verify_basis(
    order: &Order,
    poly: &[BigInt],
    basis: &[BasisDoc],
    index: &BigInt,
) -> Result<Vec<Elem>> {
    let n = order.degree();
    if basis.len() != n {
        return Err(fx("integral basis has wrong length"));
    }
    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(n);
    for (i, b) in basis.iter().enumerate() {
        let num = elem_of_len(&b.num, n, &format!("basis element {i}"))?;
        let den = int(&b.den)?;
        if !den.is_positive() {
            return Err(fx(format!("basis element {i} has nonpositive denominator")));
        }
        rows.push(
            num.into_iter()
                .map(|x| BigRational::new(x, den.clone()))
                .collect(),
        );
    }
    let reduce = |mut v: Vec<BigRational>| -> Vec<BigRational> {
        for d in (n..v.len()).rev() {
            let t = std::mem::replace(&mut v[d], BigRational::zero());
            if t.is_zero() {
                continue;
            }
            for i in 0..n {
                v[d - n + i] -= &t * BigRational::from_integer(poly[i].clone());
            }
        }
        v.truncate(n);
        v
    };
    let pairs: Vec<(usize, usize)> = if n <= 12 {
        (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect()
    } else {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xba515);
        (0..300)
            .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
            .collect()
    };
    for (i, j) in pairs {
        let mut prod = vec![BigRational::zero(); 2 * n - 1];
        for (a, x) in rows[i].iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in rows[j].iter().enumerate() {
                prod[a + b] += x * y;
            }
        }
        let lhs = reduce(prod);
        let mut rhs = vec![BigRational::zero(); n];
        for (k, c) in order.table_entry(i, j).iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, x) in rows[k].iter().enumerate() {
                rhs[t] += x * BigRational::from_integer(c.clone());
            }
        }
        if lhs != rhs {
            return Err(fx(format!(
                "multiplication table entry ({i},{j}) contradicts the basis"
            )));
        }
    }
    let inv = invert_rational(&rows).ok_or_else(|| fx("integral basis is singular"))?;
    // index = 1 / |det(rows)|
    let det_inv: BigRational = determinant_rational(&inv);
    if det_inv.abs() != BigRational::from_integer(index.clone()) {
        return Err(fx("index does not match the integral basis"));
    }
    inv.into_iter()
        .enumerate()
        .map(|(j, r)| {
            r.into_iter()
                .map(|x| {
                    if x.is_integer() {
                        Ok(x.to_integer())
                    } else {
                        Err(fx(format!("theta^{j} is not integral on the basis")))
                    }
                })
                .collect()
        })
        .collect()
}

fn invert_rational(m: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let piv = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, piv);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (lo, hi) = if i < c {
                    a.split_at_mut(c)
                } else {
                    a.split_at_mut(i)
                };
                let (src, dst) = if i < c {
                    (&hi[0], &mut lo[i])
                } else {
                    (&lo[c], &mut hi[0])
                };
                for j in 0..2 * n {
                    if !src[j].is_zero() {
                        dst[j] -= &f * &src[j];
                    }
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn determinant_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return BigRational::zero();
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &a[c][c];
            let (lo, hi) = a.split_at_mut(i);
            for j in c..n {
                let t = &f * &lo[c][j];
                hi[0][j] -= t;
            }
        }
    }
    det
}

fn verify_units(order: &Order, u: &UnitsDoc, expected: usize) -> Result<UnitData> {
    let n = order.degree();
    if u.fundamental.len() != expected {
        return Err(fx(format!(
            "unit verification failed: {} fundamental units, expected r1 + r2 - 1 = {expected}",
            u.fundamental.len()
        )));
    }
    let mut fundamental = Vec::new();
    for (i, v) in u.fundamental.iter().enumerate() {
        let e = elem_of_len(v, n, &format!("unit {i}"))?;
        let nm = order.norm(&e);
        if !nm.abs().is_one() {
            return Err(fx(format!(
                "unit verification failed: unit {i} has norm {nm}"
            )));
        }
        fundamental.push(e);
    }
    let tg = elem_of_len(&u.torsion_gen, n, "torsion generator")?;
    let w = u.torsion_order;
    if w == 0 || w % 2 == 1 {
        return Err(fx(format!(
            "unit verification failed: torsion order {w} is not even"
        )));
    }
    if order.pow(&tg, w) != order.one() {
        return Err(fx(
            "unit verification failed: torsion generator has wrong order",
        ));
    }
    for (l, _) in factor(w) {
        if order.pow(&tg, w / l) == order.one() {
            return Err(fx(
                "unit verification failed: torsion generator is not primitive",
            ));
        }
    }
    Ok(UnitData {
        fundamental,
        torsion_gen: tg,
        torsion_order: w,
    })
}

fn verify_class_group(order: &Order, c: &ClassGroupDoc) -> Result<(ClassData, Vec<BigInt>)> {
    let n = order.degree();
    let g = c.gens_hnf.len();
    let gens: Vec<Ideal> = c
        .gens_hnf
        .iter()
        .enumerate()
        .map(|(i, m)| ideal_from_columns(order, m, &format!("class generator {i}")))
        .collect::<Result<_>>()?;
    if c.relations.len() != c.principal_gens.len() {
        return Err(fx(
            "class relations and principal generators differ in number",
        ));
    }
    let mut relations = Vec::new();
    let mut principal_gens = Vec::new();
    for (j, (r, pg)) in c.relations.iter().zip(&c.principal_gens).enumerate() {
        let r = ints(r)?;
        if r.len() != g {
            return Err(fx(format!("class relation {j} has wrong length")));
        }
        if r.iter().any(|x| x.is_negative()) {
            return Err(fx(format!("class relation {j} has negative exponents")));
        }
        let gamma = elem_of_len(pg, n, &format!("principal generator {j}"))?;
        let mut prod = Ideal::unit(order);
        for (gi, ri) in gens.iter().zip(&r) {
            let e = ri
                .to_u64()
                .ok_or_else(|| fx("class relation exponent too large"))?;
            prod = prod.mul(&gi.pow(e, order), order);
        }
        if order::is_zero(&gamma) || Ideal::principal(order, &gamma) != prod {
            return Err(fx(format!(
                "class relation {j}: generator does not generate the product"
            )));
        }
        relations.push(r);
        principal_gens.push(gamma);
    }
    let denominators = vec![BigInt::one(); relations.len()];
    let class = ClassData {
        gens,
        relations,
        principal_gens,
        denominators,
    };
    let cyc = normalize_invariants(&ints(&c.cyc)?);
    let group = class.group();
    if group.free_rank != 0 || group.invariant_factors != cyc {
        return Err(fx(
            "class group relations do not give the stated cyclic structure",
        ));
    }
    Ok((class, cyc))
}

impl FieldBackend for GenField {
    fn order(&self) -> &Order {
        &self.order
    }

    fn signature(&self) -> (usize, usize) {
        self.signature
    }

    fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>> {
        if !is_prime(p) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        if let Some(ps) = self.prime_table.get(&p) {
            return Ok(ps.clone());
        }
        if self.index.is_multiple_of(&BigInt::from(p)) {
            return Err(fx(format!(
                "{p} divides the index; factorization must be supplied in fixture"
            )));
        }
        if let Some(ps) = self.kd_cache.lock().unwrap().get(&p) {
            return Ok(ps.clone());
        }
        let ps = self.kummer_dedekind(p)?;
        self.kd_cache.lock().unwrap().insert(p, ps.clone());
        Ok(ps)
    }

    fn class_data(&self, p: u64) -> Result<ClassData> {
        let pb = BigInt::from(p);
        for (i, g) in self.class.gens.iter().enumerate() {
            if g.norm().is_multiple_of(&pb) {
                return Err(Error::Invalid(format!(
                    "class generator {i} is not prime to {p}; regenerate the fixture with generators avoiding {p}"
                )));
            }
        }
        Ok(self.class.clone())
    }

    fn units(&self) -> &UnitData {
        &self.units
    }

    fn class_number(&self) -> BigInt {
        self.cyc.iter().product()
    }

    fn descriptor(&self) -> String {
        poly_string(&self.poly)
    }
}

/// Serializes a verified field back to the fixture schema.
pub fn to_json(field: &GenField) -> String {
    serde_json::to_string_pretty(&field.doc).expect("fixture document serializes")
}

/// Builds a fixture document for `x^2 - d` from the native quadratic backend;
/// the integral basis is `1, w` with `w = (delta + sqrt D)/2`.
pub fn quadratic_doc(k: &crate::quadfield::QuadField, primes: &[u64]) -> Result<FixtureDoc> {
    let d = k.d;
    let (delta, _) = k.omega_coeffs();
    let o = k.order();
    let table = (0..2)
        .map(|i| (0..2).map(|j| strs(&o.table_entry(i, j))).collect())
        .collect();
    // theta = sqrt d; w = theta or (1 + theta)/2
    let basis = if delta == 0 {
        vec![
            BasisDoc {
                num: vec!["1".into(), "0".into()],
                den: "1".into(),
            },
            BasisDoc {
                num: vec!["0".into(), "1".into()],
                den: "1".into(),
            },
        ]
    } else {
        vec![
            BasisDoc {
                num: vec!["1".into(), "0".into()],
                den: "1".into(),
            },
            BasisDoc {
                num: vec!["1".into(), "1".into()],
                den: "2".into(),
            },
        ]
    };
    let cd = k.class_data(0)?;
    let g = cd.group();
    let (gens, relations, principal_gens) = diagonal_class_data(k, &cd, &g)?;
    let units = k.units();
    let mut prime_entries = Vec::new();
    for &p in primes {
        let ps = k.primes_above(p)?;
        prime_entries.push(PrimeEntryDoc {
            p: p.to_string(),
            ideals: ps
                .iter()
                .map(|q| PrimeIdealDoc {
                    two_elt: strs(&q.alpha),
                    e: q.e,
                    f: q.f,
                    hnf: columns_of(&q.ideal),
                })
                .collect(),
        });
    }
    Ok(FixtureDoc {
        name: Some(format!("native_quad_{d}")),
        poly: vec![(-d).to_string(), "0".into(), "1".into()],
        degree: 2,
        signature: k.signature(),
        disc: k.disc.to_string(),
        index: if delta == 0 { "1".into() } else { "2".into() },
        basis: Some(basis),
        basis_mul_table: table,
        class_group: ClassGroupDoc {
            cyc: strs(&g.invariant_factors),
            gens_hnf: gens,
            relations,
            principal_gens,
        },
        units: UnitsDoc {
            fundamental: units.fundamental.iter().map(|u| strs(u)).collect(),
            torsion_gen: strs(&units.torsion_gen),
            torsion_order: units.torsion_order,
        },
        primes: prime_entries,
        source: Some("native quadratic backend".into()),
    })
}

fn columns_of(i: &Ideal) -> Vec<Vec<String>> {
    let b = i.basis();
    let n = b.len();
    (0..n)
        .map(|r| (0..n).map(|c| b[c][r].to_string()).collect())
        .collect()
}

type ClassDocParts = (Vec<Vec<Vec<String>>>, Vec<Vec<String>>, Vec<Vec<String>>);

/// Class group data in diagonal form `g_i^{d_i} = (gamma_i)` with ideal
/// generators built from the presentation's prime ideals.
fn diagonal_class_data(
    k: &crate::quadfield::QuadField,
    cd: &ClassData,
    g: &crate::zabgroup::AbGroup,
) -> Result<ClassDocParts> {
    let o = k.order();
    let mut gens = Vec::new();
    let mut rels = Vec::new();
    let mut pgs = Vec::new();
    let m = g.invariant_factors.len();
    for (i, d) in g.invariant_factors.iter().enumerate() {
        // generator i: prod cd.gens^{v_j} with v_j >= 0 (shift negatives by the class number)
        let h = k.class_number();
        let mut ideal = Ideal::unit(o);
        for (j, v) in g.generators[i].iter().enumerate() {
            let e = v.mod_floor(&h).to_u64().unwrap();
            ideal = ideal.mul(&cd.gens[j].pow(e, o), o);
        }
        let dpow = ideal.pow(d.to_u64().unwrap(), o);
        let gamma = k.principal_generator(&dpow)?;
        let mut rel = vec!["0".to_string(); m];
        rel[i] = d.to_string();
        gens.push(columns_of(&ideal));
        rels.push(rel);
        pgs.push(strs(&gamma));
    }
    Ok((gens, rels, pgs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian_doc() -> FixtureDoc {
        FixtureDoc {
            name: Some("gauss".into()),
            poly: vec!["1".into(), "0".into(), "1".into()],
            degree: 2,
            signature: (0, 1),
            disc: "-4".into(),
            index: "1".into(),
            basis: Some(vec![
                BasisDoc {
                    num: vec!["1".into(), "0".into()],
                    den: "1".into(),
                },
                BasisDoc {
                    num: vec!["0".into(), "1".into()],
                    den: "1".into(),
                },
            ]),
            basis_mul_table: vec![
                vec![vec!["1".into(), "0".into()], vec!["0".into(), "1".into()]],
                vec![vec!["0".into(), "1".into()], vec!["-1".into(), "0".into()]],
            ],
            class_group: ClassGroupDoc {
                cyc: vec![],
                gens_hnf: vec![],
                relations: vec![],
                principal_gens: vec![],
            },
            units: UnitsDoc {
                fundamental: vec![],
                torsion_gen: vec!["0".into(), "1".into()],
                torsion_order: 4,
            },
            primes: vec![],
            source: None,
        }
    }

    #[test]
    fn gaussian_fixture_parses() {
        let f = GenField::from_doc(gaussian_doc()).unwrap();
        assert_eq!(f.degree(), 2);
        assert_eq!(f.signature(), (0, 1));
        let ps = f.primes_above(5).unwrap();
        assert_eq!(ps.len(), 2);
        assert!(ps.iter().all(|q| q.e == 1 && q.f == 1));
        let ps = f.primes_above(2).unwrap();
        assert_eq!((ps.len(), ps[0].e), (1, 2));
        assert_eq!(f.descriptor(), "x^2 + 1");
    }

    #[test]
    fn fake_unit_is_rejected() {
        let mut d = gaussian_doc();
        d.signature = (2, 0);
        d.poly = vec!["-2".into(), "0".into(), "1".into()];
        d.disc = "8".into();
        d.basis_mul_table[1][1] = vec!["2".into(), "0".into()];
        d.units = UnitsDoc {
            fundamental: vec![vec!["2".into(), "1".into()]],
            torsion_gen: vec!["-1".into(), "0".into()],
            torsion_order: 2,
        };
        let err = GenField::from_doc(d).unwrap_err();
        assert!(
            err.to_string().contains("unit verification failed"),
            "{err}"
        );
    }

    #[test]
    fn bad_table_is_rejected() {
        let mut d = gaussian_doc();
        d.basis_mul_table[1][1] = vec!["-2".into(), "0".into()];
        assert!(GenField::from_doc(d).is_err());
    }

    #[test]
    fn unknown_key_is_rejected() {
        let mut v = serde_json::to_value(gaussian_doc()).unwrap();
        v["bogus"] = serde_json::json!(1);
        let err = GenField::from_json(&v.to_string()).unwrap_err();
        assert!(err.to_string().contains("schema violation"));
    }

    #[test]
    fn valuations() {
        let f = GenField::from_doc(gaussian_doc()).unwrap();
        let p2 = &f.primes_above(2).unwrap()[0];
        let o = f.order();
        assert_eq!(f.valuation(&o.from_int(BigInt::from(2)), p2).unwrap(), 2);
        assert_eq!(f.valuation(&o.one(), p2).unwrap(), 0);
        assert_eq!(f.valuation(&p2.alpha, p2).unwrap(), 1);
        assert!(f.valuation(&o.zero(), p2).is_err());
    }

    #[test]
    fn poly_strings() {
        let s = |v: &[i64]| poly_string(&v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
        assert_eq!(s(&[508, 718, 197, 1]), "x^3 + 197*x^2 + 718*x + 508");
        assert_eq!(s(&[-5, 0, 0, 0, 0, 1]), "x^5 - 5");
        assert_eq!(s(&[1, -1, 1]), "x^2 - x + 1");
    }
}
