//! Ray class groups `Cl(m)` in the ordinary sense for moduli supported
//! above a single rational prime.
//!
//! Presentation: generators are the cyclic factors of `(O/m)^*` followed by
//! the class group generators. Relations are the residue group orders, the
//! images of the global units, and one row per class relation
//! `prod g_i^{R_i} = (gamma/den)`, namely `(-dlog(gamma/den) | R)`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{pow_big, valuation};
use crate::backend::{ClassData, FieldBackend, PrimeIdeal};
use crate::error::{Error, Result};
use crate::localunits::{one_unit_exponent, LocalUnitGroup, RingUnitGroup};
use crate::order::{Elem, Order};
use crate::zabgroup::{group_from_relations, p_local_snf, AbGroup, IntMatrix};

/// `prod P_i^{k_i}` over primes above `p`; `parts` index into `primes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Modulus {
    pub p: u64,
    pub primes: Vec<PrimeIdeal>,
    pub parts: Vec<(usize, u32)>,
}

impl Modulus {
    pub fn trivial(p: u64, primes: Vec<PrimeIdeal>) -> Self {
        Modulus {
            p,
            primes,
            parts: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn norm(&self) -> BigInt {
        self.parts
            .iter()
            .map(|&(i, k)| num_traits::pow(self.primes[i].q(), k as usize))
            .product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenTag {
    Teichmueller { prime: usize },
    OneUnit { prime: usize, index: usize },
    Class { index: usize },
}

#[derive(Clone, Debug)]
pub struct RayClassGroup {
    pub group: AbGroup,
    pub modulus: Modulus,
    pub tags: Vec<GenTag>,
    pub class_number: BigInt,
    /// `#(O/m)^*`.
    pub residue_order: BigInt,
    /// Order of the image of the global units in `(O/m)^*`.
    pub unit_image_order: BigInt,
}

fn global_units(field: &dyn FieldBackend) -> Vec<Elem> {
    let u = field.units();
    let mut v = vec![u.torsion_gen.clone()];
    v.extend(u.fundamental.iter().cloned());
    v
}

fn reduce_row(v: &mut [BigInt], moduli: &[BigInt]) {
    for (x, m) in v.iter_mut().zip(moduli) {
        *x = x.mod_floor(m);
    }
}

/// The full ray class group with generator tags.
pub fn ray_class_group(field: &dyn FieldBackend, m: &Modulus) -> Result<RayClassGroup> {
    let order = field.order();
    let cd = field.class_data(m.p)?;
    let ring = RingUnitGroup::new(order, &m.primes, &m.parts)?;
    let moduli = ring.dlog_moduli();
    let r = moduli.len();
    let c = cd.gens.len();
    let g = r + c;
    let mut tags = Vec::with_capacity(g);
    for (pi, comp) in m.parts.iter().zip(&ring.components) {
        tags.push(GenTag::Teichmueller { prime: pi.0 });
        for index in 0..comp.one_unit_exponents().len() {
            tags.push(GenTag::OneUnit { prime: pi.0, index });
        }
    }
    tags.extend((0..c).map(|index| GenTag::Class { index }));

    let mut rows: Vec<Vec<BigInt>> = Vec::new();
    for (i, mi) in moduli.iter().enumerate() {
        let mut row = vec![BigInt::zero(); g];
        row[i] = mi.clone();
        rows.push(row);
    }
    let mut unit_rows = Vec::new();
    for u in global_units(field) {
        let mut v = ring.dlog(&u)?;
        reduce_row(&mut v, &moduli);
        v.resize(g, BigInt::zero());
        unit_rows.push(v);
    }
    rows.extend(unit_rows.iter().cloned());
    for row in class_rows(order, &ring, &cd, &moduli)? {
        rows.push(row);
    }
    let group = if g == 0 {
        AbGroup::trivial()
    } else {
        group_from_relations(g, &IntMatrix::from_rows(&rows, g))
    };

    let residue_order = ring.order();
    let unit_coker = if r == 0 {
        BigInt::one()
    } else {
        let mut res_rows: Vec<Vec<BigInt>> = (0..r)
            .map(|i| {
                let mut row = vec![BigInt::zero(); r];
                row[i] = moduli[i].clone();
                row
            })
            .collect();
        res_rows.extend(unit_rows.iter().map(|u| u[..r].to_vec()));
        group_from_relations(r, &IntMatrix::from_rows(&res_rows, r))
            .order()
            .unwrap()
    };
    let unit_image_order = &residue_order / &unit_coker;
    Ok(RayClassGroup {
        group,
        modulus: m.clone(),
        tags,
        class_number: cd.class_number(),
        residue_order,
        unit_image_order,
    })
}

fn class_rows(
    order: &Order,
    ring: &RingUnitGroup,
    cd: &ClassData,
    moduli: &[BigInt],
) -> Result<Vec<Vec<BigInt>>> {
    let r = moduli.len();
    let c = cd.gens.len();
    let mut rows = Vec::new();
    for (j, rel) in cd.relations.iter().enumerate() {
        let mut v = ring.dlog(&cd.principal_gens[j])?;
        if !cd.denominators[j].is_one() {
            let den = order.from_int(cd.denominators[j].clone());
            let dv = ring.dlog(&den)?;
            for (x, y) in v.iter_mut().zip(dv) {
                *x -= y;
            }
        }
        let mut row: Vec<BigInt> = v.into_iter().map(|x| -x).collect();
        reduce_row(&mut row, moduli);
        debug_assert_eq!(row.len(), r);
        row.extend(rel.iter().cloned());
        debug_assert_eq!(row.len(), r + c);
        rows.push(row);
    }
    Ok(rows)
}

/// `p`-rank of `Cl(m)`; uses the p-part path when `ell = m.p`.
pub fn ray_rank_p(field: &dyn FieldBackend, m: &Modulus, ell: u64) -> Result<usize> {
    if ell == m.p {
        Ok(ray_p_part(field, m)?.len())
    } else {
        Ok(ray_class_group(field, m)?.group.p_rank(ell))
    }
}

/// Nontrivial `p`-power invariants of `Cl(m)`, descending, with `p = m.p`.
pub fn ray_p_part(field: &dyn FieldBackend, m: &Modulus) -> Result<Vec<BigInt>> {
    PPartContext::new(field, m.p, m.primes.clone())?.p_part(&m.parts)
}

/// Shared data for p-part computations of many moduli above one `p`:
/// class data, global units and a cache of local unit groups.
///
/// The prime-to-p Teichmüller factors vanish after tensoring with `Z_p`, so
/// only one-unit coordinates are kept; elements are sent to one-units by
/// raising to `Q = lcm(q - 1)`, which is invertible in `Z_p`.
pub struct PPartContext<'a> {
    field: &'a dyn FieldBackend,
    pub p: u64,
    pub primes: Vec<PrimeIdeal>,
    class: ClassData,
    units: Vec<Elem>,
    local: Mutex<HashMap<(usize, u32), Arc<LocalUnitGroup<'a>>>>,
}

impl<'a> PPartContext<'a> {
    pub fn new(field: &'a dyn FieldBackend, p: u64, primes: Vec<PrimeIdeal>) -> Result<Self> {
        if primes.iter().any(|q| q.p != p) {
            return Err(Error::Invalid(
                "primes of mixed residue characteristic".into(),
            ));
        }
        Ok(PPartContext {
            field,
            p,
            primes,
            class: field.class_data(p)?,
            units: global_units(field),
            local: Mutex::new(HashMap::new()),
        })
    }

    pub fn class_number(&self) -> BigInt {
        self.class.class_number()
    }

    fn local_group(&self, idx: usize, k: u32) -> Result<Arc<LocalUnitGroup<'a>>> {
        if let Some(g) = self.local.lock().unwrap().get(&(idx, k)) {
            return Ok(g.clone());
        }
        let others: Vec<PrimeIdeal> = self
            .primes
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != idx)
            .map(|(_, q)| q.clone())
            .collect();
        let g = Arc::new(LocalUnitGroup::new(
            self.field.order(),
            &self.primes[idx],
            &others,
            k,
        )?);
        self.local.lock().unwrap().insert((idx, k), g.clone());
        Ok(g)
    }

    /// Nontrivial `p`-power invariants of `Cl(prod P_i^{k_i})`, descending.
    pub fn p_part(&self, parts: &[(usize, u32)]) -> Result<Vec<BigInt>> {
        let p = self.p;
        let order = self.field.order();
        let cd = &self.class;
        let h = cd.class_number();
        let comps = parts
            .iter()
            .map(|&(idx, k)| self.local_group(idx, k))
            .collect::<Result<Vec<_>>>()?;
        let q_exp = comps
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(&(&c.q - 1u32)));
        let sizes: Vec<usize> = comps.iter().map(|c| c.one_unit_exponents().len()).collect();
        let r: usize = sizes.iter().sum();
        let c = cd.gens.len();
        let g = r + c;
        if g == 0 {
            return Ok(Vec::new());
        }
        let max_local = parts
            .iter()
            .map(|&(i, k)| one_unit_exponent(p, self.primes[i].e, k))
            .max()
            .unwrap_or(0);
        let vh = if h.is_one() { 0 } else { valuation(&h, p) };
        let a = vh + max_local + 1;

        let mut rows: Vec<Vec<BigInt>> = Vec::new();
        let mut offset = 0;
        for comp in &comps {
            for (t, &v) in comp.one_unit_exponents().iter().enumerate() {
                let mut row = vec![BigInt::zero(); g];
                row[offset + t] = pow_big(p, v);
                rows.push(row);
            }
            offset += comp.one_unit_exponents().len();
        }
        let one_unit_coords = |x: &Elem| -> Result<Vec<BigInt>> {
            let mut out = Vec::with_capacity(r);
            for comp in &comps {
                let y = comp.ctx.ring.pow(x, &q_exp);
                out.extend(comp.dlog_one_unit(&y)?);
            }
            Ok(out)
        };
        for u in &self.units {
            let mut row = one_unit_coords(u)?;
            row.resize(g, BigInt::zero());
            rows.push(row);
        }
        for (j, rel) in cd.relations.iter().enumerate() {
            let mut v = one_unit_coords(&cd.principal_gens[j])?;
            if !cd.denominators[j].is_one() {
                let den = order.from_int(cd.denominators[j].clone());
                let dv = one_unit_coords(&den)?;
                for (x, y) in v.iter_mut().zip(dv) {
                    *x -= y;
                }
            }
            let mut row: Vec<BigInt> = v.into_iter().map(|x| -x).collect();
            row.extend(rel.iter().map(|x| x * &q_exp));
            rows.push(row);
        }
        let snf = p_local_snf(&rows, g, p, a, false);
        if snf.exponents.iter().any(|&v| v >= a) {
            return Err(Error::Defect(format!(
                "ray class p-part exceeds exponent bound p^{}",
                a - 1
            )));
        }
        let mut out: Vec<BigInt> = snf
            .exponents
            .iter()
            .filter(|&&v| v > 0)
            .map(|&v| pow_big(p, v))
            .collect();
        out.sort_by(|x, y| y.cmp(x));
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;
    use crate::zabgroup::p_part_invariants;

    fn modulus(k: &QuadField, p: u64, parts: &[(usize, u32)]) -> Modulus {
        Modulus {
            p,
            primes: k.split_prime(p),
            parts: parts.to_vec(),
        }
    }

    #[test]
    fn trivial_modulus_is_class_group() {
        let k = QuadField::new(-23).unwrap();
        let g = ray_class_group(&k, &modulus(&k, 3, &[])).unwrap();
        assert_eq!(g.group.invariant_factors, vec![BigInt::from(3)]);
        assert_eq!(ray_rank_p(&k, &modulus(&k, 3, &[]), 3).unwrap(), 1);
    }

    #[test]
    fn gaussian_mod_nine() {
        let k = QuadField::new(-1).unwrap();
        let g = ray_class_group(&k, &modulus(&k, 3, &[(0, 2)])).unwrap();
        assert_eq!(g.group.order().unwrap(), BigInt::from(18));
        assert_eq!(g.residue_order, BigInt::from(72));
        assert_eq!(g.unit_image_order, BigInt::from(4));
    }

    #[test]
    fn q_sqrt_minus_23_at_two() {
        let k = QuadField::new(-23).unwrap();
        let g = ray_class_group(&k, &modulus(&k, 2, &[(0, 1)])).unwrap();
        assert_eq!(g.group.invariant_factors, vec![BigInt::from(3)]);
    }

    #[test]
    fn p_part_path_matches_full_group() {
        for d in [-1i64, -5, -23, 2, 5, -14, 10, 79] {
            let k = QuadField::new(d).unwrap();
            for p in [2u64, 3, 5, 7] {
                let np = k.split_prime(p).len();
                for mask in 0..(1u32 << np) {
                    for n in [1u32, 2, 4] {
                        let parts: Vec<(usize, u32)> = (0..np)
                            .filter(|i| mask >> i & 1 == 1)
                            .map(|i| (i, n * k.split_prime(p)[i].e))
                            .collect();
                        let m = modulus(&k, p, &parts);
                        let full = ray_class_group(&k, &m).unwrap();
                        let fast = ray_p_part(&k, &m).unwrap();
                        assert_eq!(
                            fast,
                            p_part_invariants(&full.group, p),
                            "d={d} p={p} mask={mask} n={n}"
                        );
                        // exact sequence order identity
                        assert_eq!(
                            full.group.order().unwrap() * &full.unit_image_order,
                            &full.class_number * &full.residue_order
                        );
                    }
                }
            }
        }
    }
}
