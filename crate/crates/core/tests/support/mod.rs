//! Checks shared by the acceptance runner and the integration tests. Each
//! returns the number of cases checked or a description of the first failure.
#![allow(dead_code)]

#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub mod localunits;

use abram_core::quadfield::QuadField;
use abram_core::rayclass::{ray_class_group, ray_p_part};
use abram_core::sramdriver::{modulus_for, subset_from_mask};
use abram_core::zabgroup::{group_from_relations, p_part_invariants, smith_normal_form};
use abram_core::{FieldBackend, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `U M V = D` with `U`, `V` unimodular and `D` a divisor chain.
pub fn check_snf(m: &IntMatrix) -> Result<(), String> {
    let (d, u, v) = smith_normal_form(m);
    ensure!(u.mul(m).mul(&v) == d, "U M V != D for {m:?}");
    ensure!(d.is_diagonal(), "D not diagonal for {m:?}");
    ensure!(
        u.det().abs() == BigInt::from(1) && v.det().abs() == BigInt::from(1),
        "transform not unimodular for {m:?}"
    );
    let k = d.rows().min(d.cols());
    for i in 0..k {
        ensure!(!d.get(i, i).is_negative(), "negative diagonal for {m:?}");
        if i + 1 < k {
            ensure!(
                d.get(i + 1, i + 1).is_multiple_of(d.get(i, i)),
                "divisibility chain broken for {m:?}"
            );
        }
    }
    if m.rows() == m.cols() && !m.det().is_zero() {
        let g = group_from_relations(m.cols(), m);
        ensure!(
            g.order() == Some(m.det().abs()),
            "group order differs from |det| for {m:?}"
        );
    }
    Ok(())
}

/// Random integer matrices from a fixed seed.
pub fn snf_suite(count: usize) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..count {
        let rows = rng.gen_range(1..=5);
        let cols = rng.gen_range(1..=5);
        let sparse = rng.gen_bool(0.3);
        let data: Vec<Vec<BigInt>> = (0..rows)
            .map(|_| {
                (0..cols)
                    .map(|_| {
                        if sparse && rng.gen_bool(0.6) {
                            BigInt::zero()
                        } else {
                            BigInt::from(rng.gen_range(-30i64..=30))
                        }
                    })
                    .collect()
            })
            .collect();
        check_snf(&IntMatrix::from_rows(&data, cols))?;
    }
    Ok(count)
}

/// `#Cl_m = h * #(O/m)^* / #image(units)`, and the fast p-part agrees with
/// the full group, for quadratic fields and moduli built from primes above p.
pub fn ray_order_suite(ds: &[i64], ps: &[u64], ns: &[u32]) -> Result<usize, String> {
    let mut checked = 0;
    for &d in ds {
        let k = QuadField::new(d).map_err(|e| e.to_string())?;
        for &p in ps {
            let primes = k.primes_above(p).map_err(|e| e.to_string())?;
            let g = primes.len();
            for mask in 0..1u64 << g {
                let s = subset_from_mask(mask, g);
                for &n in ns {
                    let m = modulus_for(p, &primes, &s, n).map_err(|e| e.to_string())?;
                    let rc =
                        ray_class_group(&k, &m).map_err(|e| format!("d={d} p={p} n={n}: {e}"))?;
                    let order = rc
                        .group
                        .order()
                        .ok_or_else(|| format!("d={d} p={p}: infinite ray class group"))?;
                    let (q, r) =
                        (&rc.class_number * &rc.residue_order).div_rem(&rc.unit_image_order);
                    ensure!(
                        r.is_zero() && q == order,
                        "d={d} p={p} S={s:?} n={n}: order identity"
                    );
                    let fast = ray_p_part(&k, &m).map_err(|e| e.to_string())?;
                    ensure!(
                        fast == p_part_invariants(&rc.group, p),
                        "d={d} p={p} S={s:?} n={n}: p-part"
                    );
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}
