//! The field interface shared by the native quadratic backend and the
//! fixture-loaded general backend.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ideal::Ideal;
use crate::order::{Elem, Order};
use crate::zabgroup::{group_from_relations, AbGroup, IntMatrix};

/// A prime of `K` above the rational prime `p`, given as `(p, alpha)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeIdeal {
    pub p: u64,
    pub e: u32,
    pub f: u32,
    pub alpha: Elem,
    pub ideal: Ideal,
}

impl PrimeIdeal {
    pub fn new(order: &Order, p: u64, alpha: Elem, e: u32, f: u32) -> PrimeIdeal {
        let ideal = Ideal::two_element(order, &BigInt::from(p), &alpha);
        PrimeIdeal {
            p,
            e,
            f,
            alpha,
            ideal,
        }
    }

    /// Residue field size `p^f`.
    pub fn q(&self) -> BigInt {
        num_traits::pow(BigInt::from(self.p), self.f as usize)
    }

    pub fn local_degree(&self) -> u32 {
        self.e * self.f
    }

    /// `[p, [alpha]~, e, f]`, the usual printed shape of a prime ideal.
    pub fn display(&self) -> String {
        let a: Vec<String> = self.alpha.iter().map(|c| c.to_string()).collect();
        format!("[{}, [{}]~, {}, {}]", self.p, a.join(", "), self.e, self.f)
    }
}

/// A presentation of the class group: ideals `g_i` prime to a given `p`, and
/// relations `prod_i g_i^{R_ji} = (gamma_j / den_j)`.
#[derive(Clone, Debug)]
pub struct ClassData {
    pub gens: Vec<Ideal>,
    pub relations: Vec<Vec<BigInt>>,
    pub principal_gens: Vec<Elem>,
    /// Integer denominators prime to `p` (all ones for fixture data).
    pub denominators: Vec<BigInt>,
}

impl ClassData {
    pub fn trivial() -> Self {
        ClassData {
            gens: Vec::new(),
            relations: Vec::new(),
            principal_gens: Vec::new(),
            denominators: Vec::new(),
        }
    }

    pub fn group(&self) -> AbGroup {
        let g = self.gens.len();
        let m = IntMatrix::from_rows(&self.relations, g);
        group_from_relations(g, &m)
    }

    pub fn class_number(&self) -> BigInt {
        self.group().order().unwrap_or_else(BigInt::one)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UnitData {
    pub fundamental: Vec<Elem>,
    pub torsion_gen: Elem,
    pub torsion_order: u64,
}

/// Uniform view of a number field used by the ray class machinery.
pub trait FieldBackend: Send + Sync {
    fn order(&self) -> &Order;
    fn signature(&self) -> (usize, usize);
    fn degree(&self) -> usize {
        self.order().degree()
    }
    /// Primes above `p` in the backend's canonical order.
    fn primes_above(&self, p: u64) -> Result<Vec<PrimeIdeal>>;
    /// Class group presentation with generators prime to `p`.
    fn class_data(&self, p: u64) -> Result<ClassData>;
    fn units(&self) -> &UnitData;
    fn class_number(&self) -> BigInt;
    /// Short human-readable descriptor (polynomial or discriminant).
    fn descriptor(&self) -> String;
}

/// Checks `prod P^e = (p)` for a list of primes above `p`.
pub fn check_factorization(order: &Order, p: u64, primes: &[PrimeIdeal]) -> bool {
    let mut acc = Ideal::unit(order);
    for pr in primes {
        acc = acc.mul(&pr.ideal.pow(pr.e as u64, order), order);
    }
    acc == Ideal::from_int(order, &BigInt::from(p))
        && primes
            .iter()
            .all(|pr| pr.ideal.norm() == &pr.q() && !pr.ideal.norm().is_negative())
}
