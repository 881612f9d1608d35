//! Formula-side cross-checks of the ray class pipeline: the p-rank formula
//! through the Kummer group `V_S`, the torsion rank at `S = P`, local roots
//! of unity `W_S`, the normalized regulator and the Z_p-rank from unit
//! logarithms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{pow_big, valuation};
use crate::backend::{FieldBackend, PrimeIdeal};
use crate::error::{Error, Result};
use crate::localunits::LocalUnitGroup;
use crate::order::Elem;
use crate::sramdriver::{classify, format_subset, report_for, subset_from_mask, SweepConfig};
use crate::zabgroup::{p_local_snf, smith_normal_form, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShafarevichInput {
    pub r1: usize,
    pub r2: usize,
    pub delta_k: bool,
    /// `([K_P : Q_p], delta_P)` for each prime in `S`.
    pub places: Vec<(u32, bool)>,
    pub v_rank: usize,
}

fn others(primes: &[PrimeIdeal], idx: usize) -> Vec<PrimeIdeal> {
    primes
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != idx)
        .map(|(_, q)| q.clone())
        .collect()
}

fn floor_level(p: u64, e: u32) -> u32 {
    (p as u32 * e) / (p as u32 - 1)
}

/// Level `k` with `U^(k)` inside `(U^1)^(p^m)`.
fn power_level(p: u64, e: u32, m: u32) -> u32 {
    e * m + floor_level(p, e) + 1
}

/// One-unit coordinates of `x^(q-1)`.
fn one_unit_coords(g: &LocalUnitGroup, x: &[BigInt]) -> Result<Vec<BigInt>> {
    let y = g.ctx.ring.pow(x, &(&g.q - 1u32));
    g.dlog_one_unit(&y)
}

/// `v_p(#mu(K_P))` for the `idx`-th prime above `p`.
pub fn local_root_of_unity_valuation(
    field: &dyn FieldBackend,
    primes: &[PrimeIdeal],
    idx: usize,
) -> Result<u32> {
    let pr = &primes[idx];
    let p = pr.p;
    let degree = pr.local_degree();
    let mut m_max = 0u32;
    while (p - 1) * p.pow(m_max) <= degree as u64 {
        m_max += 1;
    }
    let k = power_level(p, pr.e, m_max + 1);
    let ot = others(primes, idx);
    let exps = |k: u32| -> Result<Vec<BigInt>> {
        let g = LocalUnitGroup::new(field.order(), pr, &ot, k)?;
        let mut v: Vec<BigInt> = g
            .one_unit_exponents()
            .iter()
            .filter(|&&a| a > 0)
            .map(|&a| pow_big(p, a))
            .collect();
        v.sort_by(|a, b| b.cmp(a));
        Ok(v)
    };
    let c = classify(&exps(k)?, &exps(k + pr.e)?, p, 1);
    if !c.stable || c.r_tilde != degree as usize || c.torsion.len() > 1 {
        return Err(Error::Defect(format!(
            "local principal units at {} are not Z_p^{degree} x cyclic",
            pr.display()
        )));
    }
    Ok(c.torsion.first().map(|t| valuation(t, p)).unwrap_or(0))
}

/// `delta_P`: whether `K_P` contains the `p`-th roots of unity.
pub fn local_delta(field: &dyn FieldBackend, primes: &[PrimeIdeal], idx: usize) -> Result<bool> {
    Ok(local_root_of_unity_valuation(field, primes, idx)? > 0)
}

pub fn global_delta(field: &dyn FieldBackend, p: u64) -> bool {
    field.units().torsion_order.is_multiple_of(p)
}

/// Generators of `V_empty / K^{*p}` given by their local one-unit
/// coordinates at one prime: global units first, then one element per
/// p-torsion class.
struct KummerGenerators {
    units: Vec<Elem>,
    /// Class-torsion element `prod_j (gamma_j / den_j)^{y_j}` as `y`.
    class_combos: Vec<Vec<BigInt>>,
}

fn kummer_generators(field: &dyn FieldBackend, p: u64) -> Result<KummerGenerators> {
    let u = field.units();
    let mut units = u.fundamental.clone();
    if u.torsion_order.is_multiple_of(p) {
        units.push(u.torsion_gen.clone());
    }
    let cd = field.class_data(p)?;
    let mut class_combos = Vec::new();
    if !cd.gens.is_empty() {
        let c = cd.gens.len();
        let rel = IntMatrix::from_rows(&cd.relations, c);
        let (d, umat, _) = smith_normal_form(&rel);
        let pb = BigInt::from(p);
        for i in 0..d.rows().min(d.cols()) {
            let di = d.get(i, i);
            if !di.is_zero() && di.is_multiple_of(&pb) {
                class_combos.push(umat.row(i).to_vec());
            }
        }
    }
    Ok(KummerGenerators {
        units,
        class_combos,
    })
}

/// Coordinates mod `p` of the Kummer generators in `U^1_P / (U^1_P)^p`.
fn kummer_rows(
    field: &dyn FieldBackend,
    gens: &KummerGenerators,
    primes: &[PrimeIdeal],
    idx: usize,
) -> Result<Vec<Vec<u64>>> {
    let pr = &primes[idx];
    let p = pr.p;
    let g = LocalUnitGroup::new(
        field.order(),
        pr,
        &others(primes, idx),
        power_level(p, pr.e, 1),
    )?;
    let pb = BigInt::from(p);
    let modp = |v: Vec<BigInt>| -> Vec<u64> {
        v.iter()
            .map(|x| x.mod_floor(&pb).to_u64().unwrap())
            .collect()
    };
    let mut rows = Vec::new();
    for u in &gens.units {
        rows.push(modp(one_unit_coords(&g, u)?));
    }
    if !gens.class_combos.is_empty() {
        let cd = field.class_data(p)?;
        let mut rel_coords = Vec::new();
        for (j, gamma) in cd.principal_gens.iter().enumerate() {
            let mut v = one_unit_coords(&g, gamma)?;
            if !cd.denominators[j].is_one() {
                let den = field.order().from_int(cd.denominators[j].clone());
                for (x, y) in v.iter_mut().zip(one_unit_coords(&g, &den)?) {
                    *x -= y;
                }
            }
            rel_coords.push(v);
        }
        for y in &gens.class_combos {
            let mut acc = vec![BigInt::zero(); g.one_unit_exponents().len()];
            for (yj, cj) in y.iter().zip(&rel_coords) {
                for (a, c) in acc.iter_mut().zip(cj) {
                    *a += yj * c;
                }
            }
            rows.push(modp(acc));
        }
    }
    Ok(rows)
}

/// Rank over `F_p` by Gaussian elimination.
pub fn rank_mod_p(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&i| !rows[i][c].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = crate::arith::pow_mod(rows[rank][c] % p, p - 2, p);
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_multiple_of(p) {
                let f = crate::arith::mul_mod(rows[i][c] % p, inv, p);
                for j in c..cols {
                    let sub = crate::arith::mul_mod(f, rows[rank][j] % p, p);
                    rows[i][j] = (rows[i][j] % p + p - sub) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// `dim_{F_p}` of `{alpha : (alpha) = a^p, alpha in K_P^{*p} for P in S} / K^{*p}`.
pub fn v_group_rank(field: &dyn FieldBackend, p: u64, s: &[u8]) -> Result<usize> {
    if p == 2 {
        return Err(Error::Invalid(
            "the Kummer-side formulas are implemented for odd p".into(),
        ));
    }
    let primes = field.primes_above(p)?;
    if s.len() != primes.len() {
        return Err(Error::Invalid(
            "subset length differs from prime count".into(),
        ));
    }
    let gens = kummer_generators(field, p)?;
    let t = gens.units.len() + gens.class_combos.len();
    let mut blocks: Vec<Vec<Vec<u64>>> = Vec::new();
    for (i, _) in s.iter().enumerate().filter(|(_, &b)| b == 1) {
        blocks.push(kummer_rows(field, &gens, &primes, i)?);
    }
    let rows: Vec<Vec<u64>> = (0..t)
        .map(|r| blocks.iter().flat_map(|b| b[r].iter().copied()).collect())
        .collect();
    Ok(t - rank_mod_p(rows, p))
}

pub fn shafarevich_input(field: &dyn FieldBackend, p: u64, s: &[u8]) -> Result<ShafarevichInput> {
    let primes = field.primes_above(p)?;
    let (r1, r2) = field.signature();
    let mut places = Vec::new();
    for (i, _) in s.iter().enumerate().filter(|(_, &b)| b == 1) {
        places.push((primes[i].local_degree(), local_delta(field, &primes, i)?));
    }
    Ok(ShafarevichInput {
        r1,
        r2,
        delta_k: global_delta(field, p),
        places,
        v_rank: v_group_rank(field, p, s)?,
    })
}

/// Predicted `rk_p(A_S)`.
pub fn shafarevich_rank(input: &ShafarevichInput) -> Result<usize> {
    let local: i64 = input
        .places
        .iter()
        .map(|&(d, delta)| d as i64 + delta as i64)
        .sum();
    let r = input.v_rank as i64 + local - input.delta_k as i64 - (input.r1 + input.r2) as i64 + 1;
    if r < 0 {
        return Err(Error::Defect(format!(
            "p-rank formula gives negative value {r}"
        )));
    }
    Ok(r as usize)
}

/// Predicted `rk_p(T_P)` from an input computed at `S = P`.
pub fn torsion_rank_prediction(input: &ShafarevichInput) -> Result<usize> {
    let local: i64 = input.places.iter().map(|&(_, delta)| delta as i64).sum();
    let r = input.v_rank as i64 + local - input.delta_k as i64;
    if r < 0 {
        return Err(Error::Defect(format!(
            "torsion rank formula gives negative value {r}"
        )));
    }
    Ok(r as usize)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WData {
    pub valuation: u32,
    /// False for `S` a proper subset of `P`, where the global roots of unity
    /// are subtracted through their diagonal image.
    pub exact: bool,
}

/// `v_p(#W_S)`: local roots of unity at `S` modulo the global ones.
pub fn w_group_order(field: &dyn FieldBackend, p: u64, s: &[u8]) -> Result<WData> {
    let primes = field.primes_above(p)?;
    let mut local = 0;
    for (i, _) in s.iter().enumerate().filter(|(_, &b)| b == 1) {
        local += local_root_of_unity_valuation(field, &primes, i)?;
    }
    let global = if s.contains(&1) {
        crate::arith::valuation_u64(field.units().torsion_order, p)
    } else {
        0
    };
    if local < global {
        return Err(Error::Defect(
            "global roots of unity exceed local ones".into(),
        ));
    }
    Ok(WData {
        valuation: local - global,
        exact: s.iter().all(|&b| b == 1),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegulatorData {
    pub valuation: u32,
    /// Level `n` (in units of `e_P`) of the final computation.
    pub precision: u32,
}

/// `v_p` of the normalized regulator: the p-divisibility of the logarithm
/// of the fundamental unit inside `log(U_P)`. Unit rank at most one.
pub fn normalized_regulator_valuation(field: &dyn FieldBackend, p: u64) -> Result<RegulatorData> {
    let units = field.units();
    match units.fundamental.len() {
        0 => {
            return Ok(RegulatorData {
                valuation: 0,
                precision: 0,
            })
        }
        1 => {}
        r => {
            return Err(Error::Invalid(format!(
                "regulator valuation needs unit rank <= 1, got {r}"
            )))
        }
    }
    let primes = field.primes_above(p)?;
    let mut vw = 0;
    for i in 0..primes.len() {
        vw = vw.max(local_root_of_unity_valuation(field, &primes, i)?);
    }
    let w = pow_big(p, vw);
    let mut n = 8 + vw;
    for _ in 0..=3 {
        let mut d: Option<u32> = None;
        for (i, pr) in primes.iter().enumerate() {
            let k = pr.e * n + floor_level(p, pr.e) + 1;
            let g = LocalUnitGroup::new(field.order(), pr, &others(&primes, i), k)?;
            let x = g.ctx.ring.pow(&units.fundamental[0], &((&g.q - 1u32) * &w));
            let coords = g.dlog_one_unit(&x)?;
            for (c, &a) in coords.iter().zip(g.one_unit_exponents().iter()) {
                let c = c.mod_floor(&pow_big(p, a));
                if !c.is_zero() {
                    let v = valuation(&c, p);
                    d = Some(d.map_or(v, |x| x.min(v)));
                }
            }
        }
        if let Some(d) = d.filter(|&d| d < n) {
            return Ok(RegulatorData {
                valuation: d - vw,
                precision: n,
            });
        }
        n *= 2;
    }
    Err(Error::Precision(format!(
        "unit logarithm not separated at p={p}"
    )))
}

/// `dim_{Q_p} Q_p log_S(E)`, measured from the growth of the unit image in
/// `prod_{P in S} U^1_P / U^(k)` between consecutive levels.
pub fn log_dimension(field: &dyn FieldBackend, p: u64, s: &[u8]) -> Result<usize> {
    let primes = field.primes_above(p)?;
    let chosen: Vec<usize> = s
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| i)
        .collect();
    if chosen.is_empty() {
        return Ok(0);
    }
    let units = field.units();
    let mut all_units = units.fundamental.clone();
    all_units.push(units.torsion_gen.clone());
    let degree: u32 = chosen.iter().map(|&i| primes[i].local_degree()).sum();
    let coker_exp = |n: u32| -> Result<u32> {
        let mut groups = Vec::new();
        for &i in &chosen {
            let pr = &primes[i];
            groups.push(LocalUnitGroup::new(
                field.order(),
                pr,
                &others(&primes, i),
                pr.e * n + floor_level(p, pr.e) + 1,
            )?);
        }
        let g: usize = groups.iter().map(|x| x.one_unit_exponents().len()).sum();
        let mut rows = Vec::new();
        let mut off = 0;
        let mut top = 0;
        for grp in &groups {
            for (t, &a) in grp.one_unit_exponents().iter().enumerate() {
                let mut row = vec![BigInt::zero(); g];
                row[off + t] = pow_big(p, a);
                rows.push(row);
                top = top.max(a);
            }
            off += grp.one_unit_exponents().len();
        }
        for u in &all_units {
            let mut row = Vec::with_capacity(g);
            for grp in &groups {
                row.extend(one_unit_coords(grp, u)?);
            }
            rows.push(row);
        }
        Ok(p_local_snf(&rows, g, p, top + 1, false)
            .exponents
            .iter()
            .sum())
    };
    let mut n = 6;
    for _ in 0..4 {
        let (a, b, c) = (coker_exp(n)?, coker_exp(n + 1)?, coker_exp(n + 2)?);
        if b - a == c - b && b - a <= degree {
            return Ok((degree - (b - a)) as usize);
        }
        n *= 2;
    }
    Err(Error::Precision(format!(
        "unit image growth not stable at p={p}"
    )))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub p: u64,
    pub v_torsion: u32,
    pub v_regulator: u32,
    pub v_roots: u32,
    /// `v_p(#T) - v_p(#R) - v_p(#W)`, the class part.
    pub v_class: i64,
    pub v_class_number: u32,
    pub consistent: bool,
}

/// `v_p(#T_P) = v_p(class part) + v_p(#R_P) + v_p(#W_P)` with the class part
/// bounded by `v_p(h)`.
pub fn check_decomposition(
    field: &dyn FieldBackend,
    p: u64,
    cfg: &SweepConfig,
) -> Result<DecompositionReport> {
    if p == 2 {
        return Err(Error::Invalid(
            "the torsion decomposition check is implemented for odd p".into(),
        ));
    }
    let report = report_for(field, p, None, cfg)?;
    if !report.stable {
        return Err(Error::Defect(format!("S=P at p={p} did not stabilize")));
    }
    let v_torsion: u32 = report.torsion.iter().map(|t| valuation(t, p)).sum();
    let v_regulator = normalized_regulator_valuation(field, p)?.valuation;
    let all = vec![1u8; report.s.len()];
    let v_roots = w_group_order(field, p, &all)?.valuation;
    let h = field.class_number();
    let v_class_number = if h.is_one() { 0 } else { valuation(&h, p) };
    let v_class = v_torsion as i64 - v_regulator as i64 - v_roots as i64;
    Ok(DecompositionReport {
        p,
        v_torsion,
        v_regulator,
        v_roots,
        v_class,
        v_class_number,
        consistent: 0 <= v_class && v_class <= v_class_number as i64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerLine {
    pub identity: String,
    pub subset: String,
    pub formula: i64,
    pub pipeline: i64,
    pub ok: bool,
}

/// Both sides of every formula identity for one `(K, p)`, all subsets.
pub fn cross_validate(
    field: &dyn FieldBackend,
    p: u64,
    cfg: &SweepConfig,
) -> Result<Vec<LedgerLine>> {
    let primes = field.primes_above(p)?;
    let g = primes.len();
    let mut out = Vec::new();
    let line = |identity: &str, s: &[u8], formula: i64, pipeline: i64| LedgerLine {
        identity: identity.into(),
        subset: format_subset(s),
        formula,
        pipeline,
        ok: formula == pipeline,
    };
    for mask in 0..1u64 << g {
        let s = subset_from_mask(mask, g);
        let report = report_for(field, p, Some(&s), cfg)?;
        let input = shafarevich_input(field, p, &s)?;
        out.push(line(
            "p-rank formula",
            &s,
            shafarevich_rank(&input)? as i64,
            report.rank as i64,
        ));
        let degree: u32 = input.places.iter().map(|x| x.0).sum();
        let logdim = log_dimension(field, p, &s)?;
        out.push(line(
            "Z_p-rank from unit logarithms",
            &s,
            degree as i64 - logdim as i64,
            report.r_tilde as i64,
        ));
        if mask == (1u64 << g) - 1 {
            let t = torsion_rank_prediction(&input)? as i64;
            out.push(line(
                "torsion rank formula",
                &s,
                t,
                report.torsion.len() as i64,
            ));
            // the regulator side is only available for unit rank <= 1
            let (r1, r2) = field.signature();
            if r1 + r2 > 2 {
                continue;
            }
            let d = check_decomposition(field, p, cfg)?;
            out.push(LedgerLine {
                identity: "torsion order = class part * regulator * roots of unity".into(),
                subset: format_subset(&s),
                formula: d.v_regulator as i64 + d.v_roots as i64 + d.v_class,
                pipeline: d.v_torsion as i64,
                ok: d.consistent,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadfield::QuadField;

    #[test]
    fn empty_subset_collapses_to_class_rank() {
        for (d, p, rk) in [
            (-23i64, 3u64, 1usize),
            (-1, 5, 0),
            (-14, 3, 0),
            (79, 3, 1),
            (-3, 3, 0),
        ] {
            let k = QuadField::new(d).unwrap();
            let g = k.primes_above(p).unwrap().len();
            let input = shafarevich_input(&k, p, &vec![0; g]).unwrap();
            let (r1, r2) = k.signature();
            assert_eq!(
                input.v_rank,
                rk + r1 + r2 - 1 + input.delta_k as usize,
                "d={d}"
            );
            assert_eq!(shafarevich_rank(&input).unwrap(), rk, "d={d}");
        }
    }

    #[test]
    fn local_roots_of_unity() {
        // Q_3(sqrt -3) contains mu_3; Q_2(sqrt -5) only +-1
        let k = QuadField::new(-3).unwrap();
        let ps = k.primes_above(3).unwrap();
        assert_eq!(local_root_of_unity_valuation(&k, &ps, 0).unwrap(), 1);
        let k = QuadField::new(-5).unwrap();
        let ps = k.primes_above(2).unwrap();
        assert_eq!(local_root_of_unity_valuation(&k, &ps, 0).unwrap(), 1);
        assert_eq!(
            w_group_order(&k, 2, &[1]).unwrap(),
            WData {
                valuation: 0,
                exact: true
            }
        );
        let k = QuadField::new(-1).unwrap();
        let ps = k.primes_above(2).unwrap();
        assert_eq!(local_root_of_unity_valuation(&k, &ps, 0).unwrap(), 2);
        let k = QuadField::new(6).unwrap();
        let ps = k.primes_above(3).unwrap();
        assert_eq!(local_root_of_unity_valuation(&k, &ps, 0).unwrap(), 1);
        let k = QuadField::new(2).unwrap();
        assert_eq!(w_group_order(&k, 5, &[1]).unwrap().valuation, 0);
        let k = QuadField::new(-3).unwrap();
        assert_eq!(w_group_order(&k, 3, &[1]).unwrap().valuation, 0);
    }

    #[test]
    fn regulator_examples() {
        let k = QuadField::new(2).unwrap();
        assert_eq!(normalized_regulator_valuation(&k, 7).unwrap().valuation, 0);
        assert!(normalized_regulator_valuation(&k, 13).unwrap().valuation >= 1);
        assert!(normalized_regulator_valuation(&k, 31).unwrap().valuation >= 1);
        let k = QuadField::new(5).unwrap();
        assert_eq!(normalized_regulator_valuation(&k, 7).unwrap().valuation, 0);
    }

    #[test]
    fn gaussian_p5_full_ledger() {
        let k = QuadField::new(-1).unwrap();
        let lines = cross_validate(&k, 5, &SweepConfig::default()).unwrap();
        assert!(lines.iter().all(|l| l.ok), "{lines:?}");
        let input = shafarevich_input(&k, 5, &[1, 1]).unwrap();
        assert_eq!(shafarevich_rank(&input).unwrap(), 2);
    }

    #[test]
    fn decomposition_examples() {
        let cfg = SweepConfig::default();
        let d = check_decomposition(&QuadField::new(2).unwrap(), 13, &cfg).unwrap();
        assert!(d.consistent);
        assert_eq!((d.v_class, d.v_torsion), (0, d.v_regulator));
        assert!(d.v_torsion >= 1);
        let d = check_decomposition(&QuadField::new(-23).unwrap(), 3, &cfg).unwrap();
        assert!(d.consistent && d.v_class <= 1);
    }

    #[test]
    fn rank_mod_p_basic() {
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], 5), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 2], vec![2, 4]], 3), 1);
        assert_eq!(rank_mod_p(vec![vec![1, 0], vec![0, 3]], 3), 1);
        assert_eq!(rank_mod_p(vec![], 3), 0);
    }
}
