use abram_core::arith::factor;
use abram_core::localunits::LocalUnitGroup;
use abram_core::order::{self, to_elem, Elem, Order};
use abram_core::PrimeIdeal;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

/// Power-basis order of a monic `x^n = sum c_i x^i`.
pub fn power_basis(c: &[i64]) -> Order {
    let n = c.len();
    let reduce = |mut v: Vec<i64>| -> Vec<i64> {
        for d in (n..v.len()).rev() {
            let t = v[d];
            v[d] = 0;
            for i in 0..n {
                v[d - n + i] += t * c[i];
            }
        }
        v.truncate(n);
        v
    };
    let table = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = vec![0i64; 2 * n];
                    v[i + j] = 1;
                    to_elem(&reduce(v))
                })
                .collect()
        })
        .collect();
    Order::new(table).unwrap()
}

/// All residues modulo an ideal given by its lower-triangular basis.
pub fn residues(basis: &[Vec<BigInt>]) -> Vec<Elem> {
    let n = basis.len();
    let mut out = vec![vec![BigInt::zero(); n]];
    for i in 0..n {
        let d = basis[i][i].to_u64().unwrap();
        let mut next = Vec::new();
        for x in &out {
            for t in 0..d {
                let mut y = x.clone();
                y[i] = BigInt::from(t);
                next.push(y);
            }
        }
        out = next;
    }
    out
}

pub struct Case {
    pub name: &'static str,
    pub poly: Vec<i64>,
    pub p: u64,
    pub alphas: Vec<(Vec<i64>, u32, u32)>,
    pub ks: Vec<u32>,
}

pub fn cases() -> Vec<Case> {
    vec![
        Case {
            name: "Q(i) at 2",
            poly: vec![-1, 0],
            p: 2,
            alphas: vec![(vec![1, 1], 2, 1)],
            ks: vec![1, 2, 3, 5, 8, 11],
        },
        Case {
            name: "Q(i) at 3",
            poly: vec![-1, 0],
            p: 3,
            alphas: vec![(vec![3, 0], 1, 2)],
            ks: vec![1, 2, 3],
        },
        Case {
            name: "Q(i) at 5",
            poly: vec![-1, 0],
            p: 5,
            alphas: vec![(vec![2, 1], 1, 1), (vec![-2, 1], 1, 1)],
            ks: vec![1, 2, 4],
        },
        Case {
            name: "Q(sqrt2) at 2",
            poly: vec![2, 0],
            p: 2,
            alphas: vec![(vec![0, 1], 2, 1)],
            ks: vec![2, 4, 7, 10],
        },
        Case {
            name: "Q(sqrt-3) at 3",
            poly: vec![-1, 1],
            p: 3,
            alphas: vec![(vec![-1, 2], 2, 1)],
            ks: vec![1, 2, 3, 6],
        },
        Case {
            name: "Q(cbrt2) at 3",
            poly: vec![2, 0, 0],
            p: 3,
            alphas: vec![(vec![1, 1, 0], 3, 1)],
            ks: vec![2, 4, 6],
        },
        Case {
            name: "Q(cbrt2) at 2",
            poly: vec![2, 0, 0],
            p: 2,
            alphas: vec![(vec![0, 1, 0], 3, 1)],
            ks: vec![3, 5, 8, 11],
        },
        Case {
            name: "Q(zeta8) at 2",
            poly: vec![-1, 0, 0, 0],
            p: 2,
            alphas: vec![(vec![1, 1, 0, 0], 4, 1)],
            ks: vec![4, 6, 9, 12],
        },
        Case {
            name: "Q(cbrt2) at 5",
            poly: vec![2, 0, 0],
            p: 5,
            // x^3 - 2 = (x - 3)(x^2 + 3x + 4) mod 5
            alphas: vec![(vec![-3, 1, 0], 1, 1), (vec![4, 3, 1], 1, 2)],
            ks: vec![1, 2],
        },
    ]
}

/// `#{x : x^d = 1}` for the abelian group with the given invariants.
pub fn kernel_size(inv: &[BigInt], d: u64) -> u64 {
    inv.iter()
        .map(|n| n.gcd(&BigInt::from(d)).to_u64().unwrap())
        .product()
}

/// Order, kernel sizes and dlog injectivity against enumeration of
/// `(O/P^k)^*`; returns the number of `(P, k)` cases checked.
pub fn check_structure() -> Result<usize, String> {
    let mut checked = 0;
    for case in cases() {
        let o = power_basis(&case.poly);
        let primes: Vec<PrimeIdeal> = case
            .alphas
            .iter()
            .map(|(a, e, f)| PrimeIdeal::new(&o, case.p, to_elem(a), *e, *f))
            .collect();
        for (idx, pr) in primes.iter().enumerate() {
            let others: Vec<PrimeIdeal> = primes
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != idx)
                .map(|(_, q)| q.clone())
                .collect();
            for &k in &case.ks {
                let g = LocalUnitGroup::new(&o, pr, &others, k)
                    .map_err(|e| format!("{} k={k}: {e}", case.name))?;
                let pk = pr.ideal.pow(k as u64, &o);
                let units: Vec<Elem> = residues(pk.basis())
                    .into_iter()
                    .filter(|x| !pr.ideal.contains(x))
                    .collect();
                ensure!(
                    BigInt::from(units.len()) == g.order(),
                    "{} k={k}: order",
                    case.name
                );
                let inv = g.structure().invariant_factors;
                let total = units.len() as u64;
                let modulus = pk.min_int().clone();
                for (l, a) in factor(total) {
                    for j in 1..=a {
                        let d = l.pow(j);
                        let count = units
                            .iter()
                            .filter(|x| {
                                pk.contains(&order::sub(
                                    &o.pow_mod(x, &BigInt::from(d), &modulus),
                                    &o.one(),
                                ))
                            })
                            .count() as u64;
                        ensure!(
                            count == kernel_size(&inv, d),
                            "{} k={k}: kernel of {d}",
                            case.name
                        );
                    }
                }
                // dlog is injective on units when the group is small
                if units.len() <= 5000 {
                    let mut seen = std::collections::HashSet::new();
                    for x in &units {
                        let c = g.dlog(x).map_err(|e| format!("{} k={k}: {e}", case.name))?;
                        ensure!(seen.insert(c), "{} k={k}: dlog collision", case.name);
                    }
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// The dlog of the i-th generator is the i-th unit vector.
pub fn check_generators() -> Result<usize, String> {
    let mut checked = 0;
    for case in cases() {
        let o = power_basis(&case.poly);
        let primes: Vec<PrimeIdeal> = case
            .alphas
            .iter()
            .map(|(a, e, f)| PrimeIdeal::new(&o, case.p, to_elem(a), *e, *f))
            .collect();
        let pr = &primes[0];
        let others = primes[1..].to_vec();
        let k = *case.ks.last().unwrap();
        let g =
            LocalUnitGroup::new(&o, pr, &others, k).map_err(|e| format!("{}: {e}", case.name))?;
        let gens = g.generators().map_err(|e| format!("{}: {e}", case.name))?;
        let moduli = g.dlog_moduli();
        for (i, gi) in gens.iter().enumerate() {
            let c = g.dlog(gi).map_err(|e| format!("{}: {e}", case.name))?;
            for (j, cj) in c.iter().enumerate() {
                let want = if i == j {
                    BigInt::one()
                } else {
                    BigInt::zero()
                };
                ensure!(
                    cj.mod_floor(&moduli[j]) == want.mod_floor(&moduli[j]),
                    "{}: gen {i} coord {j}",
                    case.name
                );
            }
        }
        checked += 1;
    }
    Ok(checked)
}
