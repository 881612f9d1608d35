//! p-rationality scan of real quadratic fields: a congruence filter on the
//! fundamental unit modulo `p^2`, with every suspect and every excluded
//! prime verified by the ray class pipeline at `S = P`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{kronecker, primes_in_range, sqrt_mod};
use crate::backend::FieldBackend;
use crate::error::{Error, Result};
use crate::quadfield::QuadField;
use crate::sramdriver::{decimal, report_for, SweepConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Suspect,
    Excluded(String),
}

/// `(a + b w)` modulo `m` with `w^2 = delta w + c`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct QuadMod {
    a: u64,
    b: u64,
}

struct QuadRing {
    m: u64,
    delta: u64,
    c: u64,
}

impl QuadRing {
    fn mulm(&self, x: u64, y: u64) -> u64 {
        ((x as u128 * y as u128) % self.m as u128) as u64
    }

    fn add(&self, x: u64, y: u64) -> u64 {
        ((x as u128 + y as u128) % self.m as u128) as u64
    }

    fn mul(&self, x: QuadMod, y: QuadMod) -> QuadMod {
        let bb = self.mulm(x.b, y.b);
        QuadMod {
            a: self.add(self.mulm(x.a, y.a), self.mulm(self.c, bb)),
            b: self.add(
                self.add(self.mulm(x.a, y.b), self.mulm(x.b, y.a)),
                self.mulm(self.delta, bb),
            ),
        }
    }

    fn pow(&self, mut x: QuadMod, mut e: u64) -> QuadMod {
        let mut r = QuadMod {
            a: 1 % self.m,
            b: 0,
        };
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        r
    }
}

fn reduce(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m))
        .to_u64()
        .expect("reduced below modulus")
}

/// Root of `x^2 - delta x - c` modulo `p^2` lifted from the root `r0` mod `p`.
fn lift_root(r0: u64, delta: i64, c: i64, p: u64) -> u64 {
    let m = (p * p) as i128;
    let r = r0 as i128;
    let f = (r * r - delta as i128 * r - c as i128).rem_euclid(m);
    let df = (2 * r - delta as i128).rem_euclid(p as i128);
    let inv = crate::arith::pow_mod(df as u64, p - 2, p) as i128;
    // f is divisible by p; one Newton step
    (r - (f / p as i128 * inv).rem_euclid(p as i128) * p as i128).rem_euclid(m) as u64
}

/// The congruence test on `eps^(p - chi(p))` modulo `p^2`. A pass means the
/// logarithm of the fundamental unit is not divisible by `p^2`, so the
/// normalized regulator, and with it the torsion at `S = P`, is trivial.
pub fn fermat_quotient_filter(k: &QuadField, p: u64) -> Verdict {
    if !k.is_real() {
        return Verdict::Excluded("imaginary field".into());
    }
    if p == 2 {
        return Verdict::Excluded("p = 2".into());
    }
    if k.disc.unsigned_abs().is_multiple_of(p) {
        return Verdict::Excluded("p ramified".into());
    }
    if k.class_number().is_multiple_of(&BigInt::from(p)) {
        return Verdict::Excluded("p divides the class number".into());
    }
    let (delta, c) = k.omega_coeffs();
    let m = p * p;
    let ring = QuadRing {
        m,
        delta: delta.rem_euclid(m as i64) as u64,
        c: c.rem_euclid(m as i64) as u64,
    };
    let eps = &k.units().fundamental[0];
    let x = QuadMod {
        a: reduce(&eps[0], m),
        b: reduce(&eps[1], m),
    };
    let chi = kronecker(k.disc, p);
    let y = ring.pow(x, (p as i64 - chi as i64) as u64);
    let one = y.b == 0 && y.a == 1;
    let minus_one = y.b == 0 && y.a == m - 1;
    if chi == 1 {
        // both primes above p see the same verdict
        let r0 = sqrt_mod(k.disc.rem_euclid(p as i64) as u64, p).expect("split prime");
        let half = crate::arith::pow_mod(2, p - 2, p);
        let roots = [
            crate::arith::mul_mod((delta.rem_euclid(p as i64) as u64 + r0) % p, half, p),
            crate::arith::mul_mod((delta.rem_euclid(p as i64) as u64 + p - r0) % p, half, p),
        ];
        let at = |r: u64| ring.add(y.a, ring.mulm(y.b, lift_root(r, delta, c, p))) == 1;
        assert_eq!(
            at(roots[0]),
            at(roots[1]),
            "conjugate primes disagree at p={p}"
        );
    }
    if one || minus_one {
        Verdict::Suspect
    } else {
        Verdict::Pass
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub p: u64,
    pub n: u32,
    #[serde(with = "decimal")]
    pub torsion: Vec<BigInt>,
    pub r_tilde: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanResult {
    pub d: i64,
    pub p_min: u64,
    pub p_max: u64,
    pub suspects: Vec<u64>,
    pub confirmed: Vec<u64>,
    pub skipped: Vec<(u64, String)>,
    pub evidence: Vec<Evidence>,
    pub failures: Vec<(u64, String)>,
}

/// Filter phase only: suspects and excluded primes, ascending.
pub fn filter_range(k: &QuadField, p_min: u64, p_max: u64) -> (Vec<u64>, Vec<(u64, String)>) {
    let primes = primes_in_range(p_min.max(2), p_max);
    let verdicts: Vec<(u64, Verdict)> = primes
        .par_iter()
        .map(|&p| (p, fermat_quotient_filter(k, p)))
        .collect();
    let mut suspects = Vec::new();
    let mut skipped = Vec::new();
    for (p, v) in verdicts {
        match v {
            Verdict::Pass => {}
            Verdict::Suspect => suspects.push(p),
            Verdict::Excluded(reason) => skipped.push((p, reason)),
        }
    }
    (suspects, skipped)
}

/// Filter every prime in `[p_min, p_max]`, then verify suspects and excluded
/// odd primes with the pipeline at `S = P`.
pub fn scan_range(d: i64, p_min: u64, p_max: u64, cfg: &SweepConfig) -> Result<ScanResult> {
    if d <= 0 {
        return Err(Error::Invalid(format!(
            "scan needs a real quadratic field, got d = {d}"
        )));
    }
    if p_min > p_max {
        return Err(Error::Invalid(format!("empty range [{p_min}, {p_max}]")));
    }
    let k = QuadField::new(d)?;
    let (suspects, skipped) = filter_range(&k, p_min, p_max);
    let mut to_verify: Vec<u64> = suspects.clone();
    to_verify.extend(skipped.iter().map(|x| x.0).filter(|&p| p != 2));
    to_verify.sort_unstable();
    let outcomes: Vec<(u64, Result<Evidence>)> = to_verify
        .par_iter()
        .map(|&p| {
            let r = report_for(&k, p, None, cfg).and_then(|r| {
                if r.stable {
                    Ok(Evidence {
                        p,
                        n: r.n,
                        torsion: r.torsion,
                        r_tilde: r.r_tilde,
                    })
                } else {
                    Err(Error::Defect(format!("S=P did not stabilize at n={}", r.n)))
                }
            });
            (p, r)
        })
        .collect();
    let mut confirmed = Vec::new();
    let mut evidence = Vec::new();
    let mut failures = Vec::new();
    for (p, r) in outcomes {
        match r {
            Ok(ev) => {
                if !ev.torsion.is_empty() {
                    confirmed.push(p);
                    evidence.push(ev);
                }
            }
            Err(e) => failures.push((p, e.to_string())),
        }
    }
    Ok(ScanResult {
        d,
        p_min,
        p_max,
        suspects,
        confirmed,
        skipped,
        evidence,
        failures,
    })
}

impl ScanResult {
    pub fn confirmed_line(&self) -> String {
        if self.confirmed.is_empty() {
            "confirmed: (none)".into()
        } else {
            let v: Vec<String> = self.confirmed.iter().map(|p| p.to_string()).collect();
            format!("confirmed: {}", v.join(", "))
        }
    }
}

/// `eps^m` modulo `p^2` as `(a, b)`; exposed for independent checks.
pub fn unit_power_mod_p2(k: &QuadField, p: u64, m: u64) -> (u64, u64) {
    let (delta, c) = k.omega_coeffs();
    let md = p * p;
    let ring = QuadRing {
        m: md,
        delta: delta.rem_euclid(md as i64) as u64,
        c: c.rem_euclid(md as i64) as u64,
    };
    let eps = &k.units().fundamental[0];
    let y = ring.pow(
        QuadMod {
            a: reduce(&eps[0], md),
            b: reduce(&eps[1], md),
        },
        m,
    );
    (y.a, y.b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_examples() {
        let k2 = QuadField::new(2).unwrap();
        assert_eq!(fermat_quotient_filter(&k2, 13), Verdict::Suspect);
        assert_eq!(fermat_quotient_filter(&k2, 31), Verdict::Suspect);
        assert_eq!(fermat_quotient_filter(&k2, 7), Verdict::Pass);
        assert!(matches!(
            fermat_quotient_filter(&k2, 2),
            Verdict::Excluded(_)
        ));
        let k5 = QuadField::new(5).unwrap();
        assert_eq!(fermat_quotient_filter(&k5, 3), Verdict::Pass);
        assert!(matches!(
            fermat_quotient_filter(&k5, 5),
            Verdict::Excluded(_)
        ));
    }

    #[test]
    fn power_mod_p2_matches_bigint() {
        // (1 + sqrt 2)^8 mod 49 by exact expansion
        let k = QuadField::new(2).unwrap();
        let mut x = (BigInt::from(1), BigInt::from(1));
        for _ in 1..8 {
            x = (&x.0 + 2 * &x.1, &x.0 + &x.1);
        }
        let (a, b) = unit_power_mod_p2(&k, 7, 8);
        assert_eq!(
            (BigInt::from(a), BigInt::from(b)),
            (x.0.mod_floor(&49.into()), x.1.mod_floor(&49.into()))
        );
        assert!((a, b) != (1, 0));
    }

    #[test]
    fn small_range_sqrt2() {
        let r = scan_range(2, 3, 200, &SweepConfig::default()).unwrap();
        assert_eq!(r.confirmed, vec![13, 31]);
        assert_eq!(r.confirmed_line(), "confirmed: 13, 31");
        assert!(r.failures.is_empty());
    }

    #[test]
    fn filter_agrees_with_pipeline() {
        let cfg = SweepConfig::default();
        for d in [2i64, 3, 5, 6, 7, 10, 11, 13] {
            let k = QuadField::new(d).unwrap();
            for p in primes_in_range(3, 300) {
                let v = fermat_quotient_filter(&k, p);
                if matches!(v, Verdict::Excluded(_)) {
                    continue;
                }
                let r = report_for(&k, p, None, &cfg).unwrap();
                assert!(r.stable, "d={d} p={p}");
                assert_eq!(
                    v == Verdict::Suspect,
                    !r.torsion.is_empty(),
                    "d={d} p={p} T={:?}",
                    r.torsion
                );
            }
        }
    }
}
