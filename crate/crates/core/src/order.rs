//! Orders given by an integral basis and its multiplication table.
//!
//! Elements are coordinate vectors over the basis `w_0 = 1, w_1, ..., w_{n-1}`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::zabgroup::det_bareiss;

pub type Elem = Vec<BigInt>;

#[derive(Clone, Debug)]
pub struct Order {
    n: usize,
    /// Sparse products `w_i * w_j`, indexed by `i * n + j`.
    table: Vec<Vec<(usize, BigInt)>>,
    /// Same table when all entries are small enough for the word-size path.
    small: Option<Vec<Vec<(usize, i64)>>>,
}

const SMALL_ENTRY: i64 = 1 << 30;
const SMALL_MODULUS_BITS: u64 = 62;

impl Order {
    /// `table[i][j]` holds the coordinates of `w_i * w_j`.
    pub fn new(table: Vec<Vec<Vec<BigInt>>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Invalid("empty multiplication table".into()));
        }
        let mut sparse = Vec::with_capacity(n * n);
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Invalid(format!(
                    "multiplication table row {i} has wrong size"
                )));
            }
            for v in row {
                if v.len() != n {
                    return Err(Error::Invalid(
                        "multiplication table entry has wrong size".into(),
                    ));
                }
                sparse.push(
                    v.iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(k, c)| (k, c.clone()))
                        .collect::<Vec<_>>(),
                );
            }
        }
        let one_ok = (0..n).all(|j| {
            let mut e = vec![BigInt::zero(); n];
            e[j] = BigInt::one();
            table[0][j] == e && table[j][0] == e
        });
        if !one_ok {
            return Err(Error::Invalid("first basis element is not 1".into()));
        }
        let small = sparse
            .iter()
            .map(|v| {
                v.iter()
                    .map(|(k, c)| {
                        c.to_i64()
                            .filter(|x| x.abs() < SMALL_ENTRY)
                            .map(|x| (*k, x))
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect::<Option<Vec<_>>>();
        Ok(Order {
            n,
            table: sparse,
            small,
        })
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn zero(&self) -> Elem {
        vec![BigInt::zero(); self.n]
    }

    pub fn one(&self) -> Elem {
        self.from_int(BigInt::one())
    }

    pub fn from_int(&self, a: BigInt) -> Elem {
        let mut v = self.zero();
        v[0] = a;
        v
    }

    pub fn basis_elem(&self, i: usize) -> Elem {
        let mut v = self.zero();
        v[i] = BigInt::one();
        v
    }

    pub fn table_entry(&self, i: usize, j: usize) -> Elem {
        let mut v = self.zero();
        for (k, c) in &self.table[i * self.n + j] {
            v[*k] = c.clone();
        }
        v
    }

    /// Exact product.
    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Elem {
        let n = self.n;
        let mut out = self.zero();
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                let c = &a[i] * &b[j];
                for (k, t) in &self.table[i * n + j] {
                    out[*k] += &c * t;
                }
            }
        }
        out
    }

    /// Product reduced coordinatewise into `[0, m)`.
    pub fn mul_mod(&self, a: &[BigInt], b: &[BigInt], m: &BigInt) -> Elem {
        if let (Some(small), Some(mw)) = (&self.small, small_modulus(m)) {
            let aw: Vec<u64> = a.iter().map(|x| to_word(x, mw)).collect();
            let bw: Vec<u64> = b.iter().map(|x| to_word(x, mw)).collect();
            return self
                .mul_words(small, &aw, &bw, mw)
                .into_iter()
                .map(BigInt::from)
                .collect();
        }
        let mut out = self.mul(a, b);
        for x in out.iter_mut() {
            *x = x.mod_floor(m);
        }
        out
    }

    fn mul_words(&self, small: &[Vec<(usize, i64)>], a: &[u64], b: &[u64], m: u64) -> Vec<u64> {
        let n = self.n;
        let mut acc = vec![0i128; n];
        let mut pending = 0u32;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                if b[j] == 0 {
                    continue;
                }
                let c = ((a[i] as u128 * b[j] as u128) % m as u128) as i128;
                for &(k, t) in &small[i * n + j] {
                    acc[k] += c * t as i128;
                }
                pending += 1;
                // |c * t| < 2^92; flush well before i128 overflow
                if pending >= 1 << 20 {
                    for x in acc.iter_mut() {
                        *x %= m as i128;
                    }
                    pending = 0;
                }
            }
        }
        acc.into_iter()
            .map(|x| x.rem_euclid(m as i128) as u64)
            .collect()
    }

    pub fn pow_mod(&self, a: &[BigInt], e: &BigInt, m: &BigInt) -> Elem {
        assert!(!e.is_negative());
        let mut result = self.one();
        result[0] = result[0].mod_floor(m);
        let bits = e.bits();
        let mut base: Elem = a.iter().map(|x| x.mod_floor(m)).collect();
        for i in 0..bits {
            if e.bit(i) {
                result = self.mul_mod(&result, &base, m);
            }
            if i + 1 < bits {
                base = self.mul_mod(&base, &base, m);
            }
        }
        result
    }

    /// Exact power.
    pub fn pow(&self, a: &[BigInt], e: u64) -> Elem {
        let mut result = self.one();
        let mut base = a.to_vec();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(&result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        result
    }

    /// Rows are the coordinates of `a * w_i`.
    pub fn mult_matrix(&self, a: &[BigInt]) -> Vec<Vec<BigInt>> {
        (0..self.n)
            .map(|i| self.mul(a, &self.basis_elem(i)))
            .collect()
    }

    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        det_bareiss(self.mult_matrix(a))
    }

    pub fn trace(&self, a: &[BigInt]) -> BigInt {
        let m = self.mult_matrix(a);
        (0..self.n).map(|i| m[i][i].clone()).sum()
    }

    /// Checks commutativity and associativity of the table on basis
    /// elements; exhaustive up to degree 10, sampled beyond.
    pub fn check_table(&self) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            for j in 0..i {
                if self.table_entry(i, j) != self.table_entry(j, i) {
                    return Err(Error::Fixture(format!(
                        "multiplication table not commutative at ({i},{j})"
                    )));
                }
            }
        }
        let triples: Vec<(usize, usize, usize)> = if n <= 10 {
            (0..n)
                .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
                .collect()
        } else {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed);
            let mut v = Vec::new();
            for _ in 0..400 {
                v.push((
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                ));
            }
            v
        };
        for (i, j, k) in triples {
            let left = self.mul(&self.table_entry(i, j), &self.basis_elem(k));
            let right = self.mul(&self.basis_elem(i), &self.table_entry(j, k));
            if left != right {
                return Err(Error::Fixture(format!(
                    "multiplication table not associative at ({i},{j},{k})"
                )));
            }
        }
        Ok(())
    }
}

fn small_modulus(m: &BigInt) -> Option<u64> {
    if m.bits() <= SMALL_MODULUS_BITS {
        m.to_u64()
    } else {
        None
    }
}

fn to_word(x: &BigInt, m: u64) -> u64 {
    match x.to_u64() {
        Some(v) if v < m => v,
        _ => x.mod_floor(&BigInt::from(m)).to_u64().unwrap(),
    }
}

pub fn add(a: &[BigInt], b: &[BigInt]) -> Elem {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[BigInt], b: &[BigInt]) -> Elem {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn neg(a: &[BigInt]) -> Elem {
    a.iter().map(|x| -x).collect()
}

pub fn scale(a: &[BigInt], c: &BigInt) -> Elem {
    a.iter().map(|x| x * c).collect()
}

pub fn reduce_coords(a: &[BigInt], m: &BigInt) -> Elem {
    a.iter().map(|x| x.mod_floor(m)).collect()
}

pub fn is_zero(a: &[BigInt]) -> bool {
    a.iter().all(|x| x.is_zero())
}

pub fn to_elem(v: &[i64]) -> Elem {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian() -> Order {
        let t = vec![
            vec![to_elem(&[1, 0]), to_elem(&[0, 1])],
            vec![to_elem(&[0, 1]), to_elem(&[-1, 0])],
        ];
        Order::new(t).unwrap()
    }

    #[test]
    fn gaussian_arithmetic() {
        let o = gaussian();
        let a = to_elem(&[2, 1]);
        let b = to_elem(&[2, -1]);
        assert_eq!(o.mul(&a, &b), to_elem(&[5, 0]));
        assert_eq!(o.norm(&a), BigInt::from(5));
        assert_eq!(o.trace(&a), BigInt::from(4));
        assert_eq!(o.pow(&to_elem(&[0, 1]), 4), o.one());
        o.check_table().unwrap();
    }

    #[test]
    fn modular_paths_agree() {
        let o = gaussian();
        let a = to_elem(&[123456789, -987654321]);
        let b = to_elem(&[-55555, 77777]);
        let small = BigInt::from(1_000_003u64);
        let big = BigInt::from(3u64).pow(90);
        let exact = o.mul(&a, &b);
        assert_eq!(o.mul_mod(&a, &b, &small), reduce_coords(&exact, &small));
        assert_eq!(o.mul_mod(&a, &b, &big), reduce_coords(&exact, &big));
        let e = BigInt::from(1000);
        let m = BigInt::from(7u64).pow(5);
        assert_eq!(o.pow_mod(&a, &e, &m), reduce_coords(&o.pow(&a, 1000), &m));
    }

    #[test]
    fn rejects_bad_tables() {
        let t = vec![
            vec![to_elem(&[1, 0]), to_elem(&[0, 1])],
            vec![to_elem(&[0, 2]), to_elem(&[-1, 0])],
        ];
        assert!(Order::new(t).is_err());
        let e = |v: &[i64]| to_elem(v);
        let t = vec![
            vec![e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])],
            vec![e(&[0, 1, 0]), e(&[1, 0, 0]), e(&[0, 0, 1])],
            vec![e(&[0, 0, 1]), e(&[1, 0, 0]), e(&[1, 0, 0])],
        ];
        assert!(Order::new(t).unwrap().check_table().is_err());
    }
}
