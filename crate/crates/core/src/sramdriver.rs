//! Sweep over subsets `S` of the primes above `p`: p-parts of the ray class
//! groups of `(prod_{P in S} P^{e_P})^n` at two exponents, classified into
//! growing entries (the Z_p-rank) and stable entries (the torsion).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::pow_big;
use crate::backend::{FieldBackend, PrimeIdeal};
use crate::error::{Error, Result};
use crate::rayclass::{Modulus, PPartContext};

/// Largest number of primes above `p` for which all subsets are swept.
pub const MAX_PRIMES_ABOVE: usize = 16;

pub const DEFAULT_MAX_EXPONENT: u32 = 1024;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub n0: u32,
    /// Fixed exponent overriding `n0 + floor(30/p)`.
    pub n: Option<u32>,
    pub delta: u32,
    pub max_escalations: u32,
    /// Resource bound: more primes above `p` than this is an error.
    pub max_primes_above: usize,
    /// Resource bound on every ray class exponent `n + delta` tried.
    pub max_exponent: u32,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            primes: Vec::new(),
            n0: 6,
            n: None,
            delta: 4,
            max_escalations: 3,
            max_primes_above: MAX_PRIMES_ABOVE,
            max_exponent: DEFAULT_MAX_EXPONENT,
        }
    }
}

impl SweepConfig {
    pub fn range(bp: u64, bq: u64) -> Self {
        SweepConfig {
            primes: crate::arith::primes_in_range(bp, bq),
            ..Default::default()
        }
    }

    pub fn exponent(&self, p: u64) -> u32 {
        let n = self.n.unwrap_or(self.n0 + (30 / p) as u32);
        n.max(n_min(p))
    }

    pub fn validate(&self) -> Result<()> {
        if self.delta == 0 {
            return Err(Error::Invalid(
                "stabilization stride must be at least 1".into(),
            ));
        }
        if let Some(p) = self.primes.iter().find(|&&p| !crate::arith::is_prime(p)) {
            return Err(Error::Invalid(format!("{p} is not prime")));
        }
        Ok(())
    }
}

/// Smallest exponent at which the p-rank of the ray class group is stable.
pub fn n_min(p: u64) -> u32 {
    if p == 2 {
        3
    } else {
        2
    }
}

/// Membership list `[d_1, ..., d_g]` of the subset with the given mask; the
/// first prime is the most significant bit.
pub fn subset_from_mask(mask: u64, g: usize) -> Vec<u8> {
    (0..g).map(|j| ((mask >> (g - 1 - j)) & 1) as u8).collect()
}

pub fn mask_from_subset(s: &[u8]) -> u64 {
    s.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64)
}

pub fn format_subset(s: &[u8]) -> String {
    let items: Vec<String> = s.iter().map(|b| b.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// `(prod_{P in S} P^{e_P})^n`.
pub fn modulus_for(p: u64, primes: &[PrimeIdeal], s: &[u8], n: u32) -> Result<Modulus> {
    if s.len() != primes.len() {
        return Err(Error::Invalid(
            "subset length differs from prime count".into(),
        ));
    }
    if primes.iter().any(|q| q.p != p) {
        return Err(Error::Invalid(
            "primes of mixed residue characteristic".into(),
        ));
    }
    let parts = s
        .iter()
        .enumerate()
        .filter(|(_, &b)| b == 1)
        .map(|(i, _)| (i, primes[i].e * n))
        .collect();
    Ok(Modulus {
        p,
        primes: primes.to_vec(),
        parts,
    })
}

/// p-part invariants of `Cl(m(S)^n)`, descending.
pub fn compute_aks(ctx: &PPartContext, s: &[u8], n: u32) -> Result<Vec<BigInt>> {
    let m = modulus_for(ctx.p, &ctx.primes, s, n)?;
    ctx.p_part(&m.parts)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub r_tilde: usize,
    pub torsion: Vec<BigInt>,
    pub stable: bool,
    /// A stable entry exceeds a growing one.
    pub ambiguous: bool,
}

/// Splits `at_n` into stable entries (the torsion) and growing entries.
///
/// Entries are scanned from the small end; at each value the copies in
/// `at_next` first account for images `p^delta * g` of entries already
/// classified as growing, the remaining copies must be stable, and any
/// further copies in `at_n` are growing. Stable means this accounts for both
/// lists exactly; otherwise the plain multiset intersection is reported as
/// the torsion with `stable = false`.
pub fn classify(at_n: &[BigInt], at_next: &[BigInt], p: u64, delta: u32) -> Classification {
    let factor = pow_big(p, delta);
    // value -> [copies in at_n, copies in at_next, pending growth images]
    let mut counts: BTreeMap<BigInt, [usize; 3]> = BTreeMap::new();
    for x in at_n {
        counts.entry(x.clone()).or_default()[0] += 1;
    }
    for x in at_next {
        counts.entry(x.clone()).or_default()[1] += 1;
    }
    let mut torsion = Vec::new();
    let mut growing = Vec::new();
    let mut consistent = true;
    while let Some((x, [ca, cb, ce])) = counts.pop_first() {
        let images = cb.min(ce);
        if ce > images {
            consistent = false;
        }
        let stable_here = cb - images;
        if stable_here > ca {
            consistent = false;
        }
        let stable_here = stable_here.min(ca);
        torsion.extend(std::iter::repeat_n(x.clone(), stable_here));
        let grow = ca - stable_here;
        if grow > 0 {
            growing.extend(std::iter::repeat_n(x.clone(), grow));
            counts.entry(&x * &factor).or_default()[2] += grow;
        }
    }
    if !consistent {
        let mut b: Vec<&BigInt> = at_next.iter().collect();
        torsion.clear();
        growing.clear();
        let mut a: Vec<&BigInt> = at_n.iter().collect();
        a.sort();
        for x in a {
            if let Some(pos) = b.iter().position(|y| *y == x) {
                b.swap_remove(pos);
                torsion.push(x.clone());
            } else {
                growing.push(x.clone());
            }
        }
    }
    let ambiguous = match (torsion.last(), growing.first()) {
        (Some(t), Some(g)) => t > g,
        _ => false,
    };
    torsion.reverse();
    Classification {
        r_tilde: growing.len(),
        torsion,
        stable: consistent,
        ambiguous,
    }
}

pub mod decimal {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        raw.iter()
            .map(|x| {
                x.parse()
                    .map_err(|_| serde::de::Error::custom(format!("not an integer: {x}")))
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SRamReport {
    pub p: u64,
    pub s: Vec<u8>,
    pub mask: u64,
    /// Exponent at which `invariants` was computed.
    pub n: u32,
    pub delta: u32,
    #[serde(with = "decimal")]
    pub invariants: Vec<BigInt>,
    #[serde(with = "decimal")]
    pub invariants_next: Vec<BigInt>,
    /// p-rank of the ray class group at exponent `n`.
    pub rank: usize,
    pub r_tilde: usize,
    #[serde(with = "decimal")]
    pub torsion: Vec<BigInt>,
    pub stable: bool,
    pub ambiguous: bool,
    pub s_rational: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl SRamReport {
    fn failed(p: u64, s: Vec<u8>, n: u32, delta: u32, e: &Error) -> Self {
        SRamReport {
            p,
            mask: mask_from_subset(&s),
            s,
            n,
            delta,
            invariants: Vec::new(),
            invariants_next: Vec::new(),
            rank: 0,
            r_tilde: 0,
            torsion: Vec::new(),
            stable: false,
            ambiguous: false,
            s_rational: false,
            error: Some(e.to_string()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSummary {
    pub display: String,
    pub e: u32,
    pub f: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeBlock {
    pub p: u64,
    pub primes: Vec<PrimeSummary>,
    pub reports: Vec<SRamReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Runs the two-exponent test for one subset, escalating `(n, delta)` to
/// `(n + delta, 2 delta)` while the comparison is unstable.
pub fn analyze_subset(ctx: &PPartContext, s: &[u8], cfg: &SweepConfig) -> SRamReport {
    let p = ctx.p;
    let mut n = cfg.exponent(p);
    let mut delta = cfg.delta;
    let mut result = None;
    for round in 0..=cfg.max_escalations {
        if n + delta > cfg.max_exponent {
            let e = Error::Resource(format!(
                "exponent {} above bound {}",
                n + delta,
                cfg.max_exponent
            ));
            return SRamReport::failed(p, s.to_vec(), n, delta, &e);
        }
        let at_n = match compute_aks(ctx, s, n) {
            Ok(v) => v,
            Err(e) => return SRamReport::failed(p, s.to_vec(), n, delta, &e),
        };
        let at_next = match compute_aks(ctx, s, n + delta) {
            Ok(v) => v,
            Err(e) => return SRamReport::failed(p, s.to_vec(), n, delta, &e),
        };
        let c = classify(&at_n, &at_next, p, delta);
        let stable = c.stable;
        result = Some((n, delta, at_n, at_next, c));
        if stable || round == cfg.max_escalations {
            break;
        }
        n += delta;
        delta *= 2;
    }
    let (n, delta, invariants, invariants_next, c) = result.expect("at least one round");
    SRamReport {
        p,
        mask: mask_from_subset(s),
        s: s.to_vec(),
        n,
        delta,
        rank: invariants.len(),
        invariants,
        invariants_next,
        r_tilde: c.r_tilde,
        s_rational: c.stable && c.torsion.is_empty(),
        torsion: c.torsion,
        stable: c.stable,
        ambiguous: c.ambiguous,
        error: None,
    }
}

/// All subsets for one `p`, in mask order.
pub fn sweep_prime(field: &dyn FieldBackend, p: u64, cfg: &SweepConfig) -> PrimeBlock {
    let primes = match field.primes_above(p) {
        Ok(v) => v,
        Err(e) => {
            return PrimeBlock {
                p,
                primes: Vec::new(),
                reports: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let summaries = primes
        .iter()
        .map(|q| PrimeSummary {
            display: q.display(),
            e: q.e,
            f: q.f,
        })
        .collect();
    if primes.len() > cfg.max_primes_above.min(63) {
        let e = Error::Resource(format!("{} primes above {p}", primes.len()));
        return PrimeBlock {
            p,
            primes: summaries,
            reports: Vec::new(),
            error: Some(e.to_string()),
        };
    }
    let ctx = match PPartContext::new(field, p, primes) {
        Ok(c) => c,
        Err(e) => {
            return PrimeBlock {
                p,
                primes: summaries,
                reports: Vec::new(),
                error: Some(e.to_string()),
            }
        }
    };
    let g = ctx.primes.len();
    let reports: Vec<SRamReport> = (0..1u64 << g)
        .into_par_iter()
        .map(|mask| analyze_subset(&ctx, &subset_from_mask(mask, g), cfg))
        .collect();
    PrimeBlock {
        p,
        primes: summaries,
        reports,
        error: None,
    }
}

/// Sweep over all configured primes, ascending.
pub fn sweep(field: &dyn FieldBackend, cfg: &SweepConfig) -> Result<Vec<PrimeBlock>> {
    cfg.validate()?;
    let mut primes = cfg.primes.clone();
    primes.sort_unstable();
    primes.dedup();
    Ok(primes
        .par_iter()
        .map(|&p| sweep_prime(field, p, cfg))
        .collect())
}

/// One subset at a chosen prime; `None` selects all primes above `p`.
pub fn report_for(
    field: &dyn FieldBackend,
    p: u64,
    s: Option<&[u8]>,
    cfg: &SweepConfig,
) -> Result<SRamReport> {
    let primes = field.primes_above(p)?;
    let all = vec![1u8; primes.len()];
    let s = s.unwrap_or(&all).to_vec();
    let ctx = PPartContext::new(field, p, primes)?;
    let r = analyze_subset(&ctx, &s, cfg);
    match &r.error {
        Some(e) => Err(Error::Resource(e.clone())),
        None => Ok(r),
    }
}
