//! Structure of S-ramified abelian pro-p groups of number fields.
//!
//! For a number field `K`, a prime `p` and a subset `S` of the primes of `K`
//! above `p`, the pro-p group `A_S` is read off the p-parts of ray class
//! groups of moduli `(prod_{P in S} P^{e_P})^n` for growing `n`: invariants
//! that keep growing account for the Z_p-rank, the stable ones form the
//! torsion subgroup.

pub mod arith;
pub mod backend;
pub mod error;
pub mod formulas;
pub mod genfield;
pub mod ideal;
pub mod localunits;
pub mod order;
pub mod polyfp;
pub mod quadfield;
pub mod rayclass;
pub mod report;
pub mod scan;
pub mod sramdriver;
pub mod zabgroup;

pub use backend::{ClassData, FieldBackend, PrimeIdeal, UnitData};
pub use error::{Error, Result};
pub use ideal::Ideal;
pub use order::{Elem, Order};
pub use zabgroup::{AbGroup, IntMatrix};
