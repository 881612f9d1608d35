//! Integer matrices, Hermite and Smith normal forms, and finitely generated
//! abelian groups given by generators and relations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{mod_inv, pow_big};

/// Dense integer matrix stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            entries: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: &[Vec<BigInt>], cols: usize) -> Self {
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged matrix row");
            entries.extend(r.iter().cloned());
        }
        IntMatrix {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let v: Vec<Vec<BigInt>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        Self::from_rows(&v, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// Determinant of a square matrix (fraction-free Bareiss elimination).
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        det_bareiss(self.to_rows())
    }
}

pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

fn row_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    let (a, b) = if dst < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[dst], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(dst);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

fn col_axpy(rows: &mut [Vec<BigInt>], dst: usize, src: usize, q: &BigInt) {
    if q.is_zero() {
        return;
    }
    for r in rows.iter_mut() {
        if !r[src].is_zero() {
            let t = q * &r[src];
            r[dst] -= t;
        }
    }
}

fn swap_cols(rows: &mut [Vec<BigInt>], a: usize, b: usize) {
    if a != b {
        for r in rows.iter_mut() {
            r.swap(a, b);
        }
    }
}

/// Row-style Hermite normal form: returns `(H, U)` with `U` unimodular,
/// `U * M = H`, `H` upper echelon with positive pivots, entries above each
/// pivot reduced into `[0, pivot)`, and zero rows last.
pub fn hermite_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut h = m.to_rows();
    let mut u = IntMatrix::identity(rows).to_rows();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let piv = (r..rows)
                .filter(|&i| !h[i][c].is_zero())
                .min_by(|&a, &b| h[a][c].abs().cmp(&h[b][c].abs()));
            let Some(pi) = piv else { break };
            h.swap(r, pi);
            u.swap(r, pi);
            let mut clean = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_floor(&h[r][c]);
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
                if !h[i][c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            for x in h[r].iter_mut() {
                *x = -&*x;
            }
            for x in u[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let q = h[i][c].div_floor(&h[r][c]);
            row_axpy(&mut h, i, r, &q);
            row_axpy(&mut u, i, r, &q);
        }
        r += 1;
    }
    (
        IntMatrix::from_rows(&h, cols),
        IntMatrix::from_rows(&u, rows),
    )
}

/// Smith normal form: returns `(D, U, V)` with `U * M * V = D` diagonal,
/// nonnegative, and `d_1 | d_2 | ...`.
pub fn smith_normal_form(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows, m.cols);
    let mut d = m.to_rows();
    let mut u = IntMatrix::identity(rows).to_rows();
    let mut v = IntMatrix::identity(cols).to_rows();
    let n = rows.min(cols);
    for t in 0..n {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[i][j].is_zero() && best.is_none_or(|(a, b)| d[i][j].abs() < d[a][b].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        d.swap(t, pi);
        u.swap(t, pi);
        swap_cols(&mut d, t, pj);
        swap_cols(&mut v, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if d[i][t].is_zero() {
                    continue;
                }
                let q = d[i][t].div_floor(&d[t][t]);
                row_axpy(&mut d, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !d[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if d[t][j].is_zero() {
                    continue;
                }
                let q = d[t][j].div_floor(&d[t][t]);
                col_axpy(&mut d, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !d[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // bring the smallest remaining entry of row/column t to the pivot
                let mut bi = (t, t);
                for i in t + 1..rows {
                    if !d[i][t].is_zero() && d[i][t].abs() < d[bi.0][bi.1].abs() {
                        bi = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !d[t][j].is_zero() && d[t][j].abs() < d[bi.0][bi.1].abs() {
                        bi = (t, j);
                    }
                }
                if bi.0 != t {
                    d.swap(t, bi.0);
                    u.swap(t, bi.0);
                } else if bi.1 != t {
                    swap_cols(&mut d, t, bi.1);
                    swap_cols(&mut v, t, bi.1);
                }
                continue;
            }
            let bad = (t + 1..rows).find(|&i| {
                (t + 1..cols).any(|j| !d[i][j].is_zero() && !d[i][j].is_multiple_of(&d[t][t]))
            });
            match bad {
                Some(i) => {
                    let m1 = BigInt::from(-1);
                    row_axpy(&mut d, t, i, &m1);
                    row_axpy(&mut u, t, i, &m1);
                }
                None => break,
            }
        }
        if d[t][t].is_negative() {
            for x in d[t].iter_mut() {
                *x = -&*x;
            }
            for x in u[t].iter_mut() {
                *x = -&*x;
            }
        }
    }
    (
        IntMatrix::from_rows(&d, cols),
        IntMatrix::from_rows(&u, rows),
        IntMatrix::from_rows(&v, cols),
    )
}

/// Finitely generated abelian group `Z^r x Z/d_1 x ... x Z/d_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbGroup {
    pub invariant_factors: Vec<BigInt>,
    pub free_rank: usize,
    /// Each generator as an exponent vector over the presentation's generators,
    /// aligned with `invariant_factors` followed by the free part.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<BigInt>>,
}

impl AbGroup {
    pub fn trivial() -> Self {
        AbGroup {
            invariant_factors: Vec::new(),
            free_rank: 0,
            generators: Vec::new(),
        }
    }

    /// Builds a finite group from arbitrary cyclic orders, normalizing to a
    /// divisibility chain.
    pub fn from_cyclic_orders(orders: &[BigInt]) -> Self {
        AbGroup {
            invariant_factors: normalize_invariants(orders),
            free_rank: 0,
            generators: Vec::new(),
        }
    }

    pub fn order(&self) -> Option<BigInt> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.invariant_factors.iter().product())
        }
    }

    pub fn p_rank(&self, p: u64) -> usize {
        let pb = BigInt::from(p);
        self.free_rank
            + self
                .invariant_factors
                .iter()
                .filter(|d| d.is_multiple_of(&pb))
                .count()
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }
}

/// Normalizes a list of cyclic orders into invariant factors `d_1 | d_2 | ...`,
/// dropping ones. Zeros are not allowed.
pub fn normalize_invariants(orders: &[BigInt]) -> Vec<BigInt> {
    let mut a: Vec<BigInt> = orders
        .iter()
        .map(|x| x.abs())
        .filter(|x| !x.is_one())
        .collect();
    assert!(a.iter().all(|x| !x.is_zero()), "zero cyclic order");
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let g = a[i].gcd(&a[j]);
            let l = a[i].lcm(&a[j]);
            a[i] = g;
            a[j] = l;
        }
    }
    a.retain(|x| !x.is_one());
    a
}

/// Cokernel `Z^g / (row lattice of relations)`.
pub fn group_from_relations(num_generators: usize, relations: &IntMatrix) -> AbGroup {
    assert!(relations.rows == 0 || relations.cols == num_generators);
    let m = if relations.rows == 0 {
        IntMatrix::zero(0, num_generators)
    } else {
        relations.clone()
    };
    let (d, _, v) = smith_normal_form(&m);
    let vinv = unimodular_inverse(&v);
    let mut inv = Vec::new();
    let mut gens = Vec::new();
    let mut free = Vec::new();
    for j in 0..num_generators {
        let dj = if j < d.rows {
            d.get(j, j).clone()
        } else {
            BigInt::zero()
        };
        if dj.is_zero() {
            free.push(vinv.row(j).to_vec());
        } else if !dj.is_one() {
            inv.push(dj);
            gens.push(vinv.row(j).to_vec());
        }
    }
    let free_rank = free.len();
    gens.extend(free);
    AbGroup {
        invariant_factors: inv,
        free_rank,
        generators: gens,
    }
}

/// Inverse of a unimodular matrix (via HNF of `[V | I]`).
pub fn unimodular_inverse(v: &IntMatrix) -> IntMatrix {
    let n = v.rows;
    let (h, u) = hermite_normal_form(v);
    // U V = H must be the identity for unimodular V
    debug_assert!(h == IntMatrix::identity(n), "matrix is not unimodular");
    u
}

/// Descending list of the nontrivial p-parts of the invariant factors.
pub fn p_part_invariants(g: &AbGroup, p: u64) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let mut out: Vec<BigInt> = g
        .invariant_factors
        .iter()
        .filter_map(|d| {
            let mut q = BigInt::one();
            let mut x = d.clone();
            while x.is_multiple_of(&pb) {
                x /= &pb;
                q *= &pb;
            }
            (!q.is_one()).then_some(q)
        })
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out
}

/// Invariant factors of `Z^g / (L + D Z^g)` for the row lattice `L`,
/// by elimination over `Z/D`. When `D` is a multiple of the exponent of a
/// finite cokernel this is the cokernel itself.
pub fn invariants_mod(relations: &[Vec<BigInt>], g: usize, modulus: &BigInt) -> Vec<BigInt> {
    let md = modulus;
    let mut a: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(md)).collect())
        .collect();
    let rows = a.len();
    let mut diag = Vec::new();
    let mut t = 0;
    while t < g && t < rows {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..g {
                if !a[i][j].is_zero() && best.is_none_or(|(x, y)| a[i][j] < a[x][y]) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        swap_cols(&mut a, t, pj);
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                row_axpy(&mut a, i, t, &q);
                for x in a[i].iter_mut() {
                    *x = x.mod_floor(md);
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..g {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for r in a.iter_mut() {
                    if !r[t].is_zero() {
                        let v = (&r[j] - &q * &r[t]).mod_floor(md);
                        r[j] = v;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
            let mut bi = (t, t);
            for i in t + 1..rows {
                if !a[i][t].is_zero() && a[i][t] < a[bi.0][bi.1] {
                    bi = (i, t);
                }
            }
            for j in t + 1..g {
                if !a[t][j].is_zero() && a[t][j] < a[bi.0][bi.1] {
                    bi = (t, j);
                }
            }
            if bi.0 != t {
                a.swap(t, bi.0);
            } else if bi.1 != t {
                swap_cols(&mut a, t, bi.1);
            }
        }
        diag.push(a[t][t].gcd(md));
        t += 1;
    }
    while diag.len() < g {
        diag.push(md.clone());
    }
    normalize_invariants(&diag)
}

/// Result of a Smith reduction over `Z/p^a`.
#[derive(Clone, Debug)]
pub struct LocalSnf {
    /// Exponent `v_j` of the cyclic factor `Z/p^{v_j}` attached to column `j`
    /// of the transformed basis; `a` means the column was not reached.
    pub exponents: Vec<u32>,
    /// Column transform mod `p^a`: coordinates `c` map to `c * V`.
    pub transform: Option<Vec<Vec<BigInt>>>,
}

/// Smith reduction of the row lattice `L + p^a Z^g` over the local ring
/// `Z/p^a`, pivoting on minimal valuation.
pub fn p_local_snf(
    relations: &[Vec<BigInt>],
    g: usize,
    p: u64,
    a: u32,
    want_transform: bool,
) -> LocalSnf {
    let pa = pow_big(p, a);
    let pb = BigInt::from(p);
    let val = |x: &BigInt| -> u32 {
        if x.is_zero() {
            return a;
        }
        let mut v = 0;
        let mut y = x.clone();
        while v < a && y.is_multiple_of(&pb) {
            y /= &pb;
            v += 1;
        }
        v
    };
    let mut m: Vec<Vec<BigInt>> = relations
        .iter()
        .map(|r| r.iter().map(|x| x.mod_floor(&pa)).collect())
        .collect();
    let rows = m.len();
    let mut vt: Option<Vec<Vec<BigInt>>> = want_transform.then(|| IntMatrix::identity(g).to_rows());
    let mut exps = vec![a; g];
    let mut vals: Vec<Vec<u32>> = m.iter().map(|r| r.iter().map(&val).collect()).collect();
    for t in 0..g.min(rows) {
        let mut best: Option<(usize, usize, u32)> = None;
        'scan: for i in t..rows {
            for j in t..g {
                let v = vals[i][j];
                if v < a && best.is_none_or(|(_, _, bv)| v < bv) {
                    best = Some((i, j, v));
                    if v == 0 {
                        break 'scan;
                    }
                }
            }
        }
        let Some((pi, pj, v)) = best else { break };
        m.swap(t, pi);
        vals.swap(t, pi);
        swap_cols(&mut m, t, pj);
        for r in vals.iter_mut() {
            r.swap(t, pj);
        }
        if let Some(vt) = vt.as_mut() {
            swap_cols(vt, t, pj);
        }
        let pv = pow_big(p, v);
        let unit = &m[t][t] / &pv;
        let uinv = mod_inv(&unit, &pa).expect("pivot unit part invertible");
        for x in m[t].iter_mut() {
            *x = (&*x * &uinv).mod_floor(&pa);
        }
        // pivot is now p^v; clear its column below and its row to the right
        for i in t + 1..rows {
            if m[i][t].is_zero() {
                continue;
            }
            let q = &m[i][t] / &pv;
            let (lo, hi) = m.split_at_mut(i);
            let src = &lo[t];
            let dst = &mut hi[0];
            for j in t..g {
                if !src[j].is_zero() {
                    dst[j] = (&dst[j] - &q * &src[j]).mod_floor(&pa);
                }
            }
            vals[i] = dst.iter().map(&val).collect();
        }
        if let Some(vt) = vt.as_mut() {
            for j in t + 1..g {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = &m[t][j] / &pv;
                for r in vt.iter_mut() {
                    if !r[t].is_zero() {
                        let x = (&r[j] - &q * &r[t]).mod_floor(&pa);
                        r[j] = x;
                    }
                }
            }
        }
        for j in t + 1..g {
            m[t][j] = BigInt::zero();
            vals[t][j] = a;
        }
        exps[t] = v;
    }
    LocalSnf {
        exponents: exps,
        transform: vt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn snf_diag(m: &IntMatrix) -> Vec<BigInt> {
        let (d, _, _) = smith_normal_form(m);
        (0..d.rows().min(d.cols()))
            .map(|i| d.get(i, i).clone())
            .collect()
    }

    #[test]
    fn hnf_identity() {
        let i = IntMatrix::identity(2);
        let (h, u) = hermite_normal_form(&i);
        assert_eq!(h, i);
        assert_eq!(u, i);
    }

    #[test]
    fn hnf_gcd_pivot() {
        let m = IntMatrix::from_i64(&[&[4], &[6]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h, IntMatrix::from_i64(&[&[2], &[0]]));
        assert_eq!(u.mul(&m), h);
        assert_eq!(u.det().abs(), b(1));
    }

    #[test]
    fn hnf_preserves_determinant() {
        let m = IntMatrix::from_i64(&[&[2, 4], &[6, 8]]);
        let (h, u) = hermite_normal_form(&m);
        assert_eq!(h.det().abs(), b(8));
        assert_eq!(u.mul(&m), h);
        assert_eq!(h, IntMatrix::from_i64(&[&[2, 0], &[0, 4]]));
    }

    #[test]
    fn snf_examples() {
        assert_eq!(
            snf_diag(&IntMatrix::from_i64(&[&[2, 0], &[0, 3]])),
            vec![b(1), b(6)]
        );
        assert_eq!(snf_diag(&IntMatrix::zero(2, 3)), vec![b(0), b(0)]);
        assert_eq!(
            snf_diag(&IntMatrix::from_i64(&[&[2, 4], &[6, 8]])),
            vec![b(2), b(4)]
        );
    }

    #[test]
    fn snf_transforms() {
        let m = IntMatrix::from_i64(&[&[2, 4, 4], &[-6, 6, 12], &[10, -4, -16]]);
        let (d, u, v) = smith_normal_form(&m);
        assert_eq!(u.mul(&m).mul(&v), d);
        assert!(d.is_diagonal());
        assert_eq!(snf_diag(&m), vec![b(2), b(6), b(12)]);
    }

    #[test]
    fn groups_from_relations() {
        let g = group_from_relations(2, &IntMatrix::from_i64(&[&[2, 0], &[0, 3]]));
        assert_eq!(g.invariant_factors, vec![b(6)]);
        assert_eq!(g.free_rank, 0);
        let g = group_from_relations(3, &IntMatrix::zero(0, 3));
        assert_eq!(g.free_rank, 3);
        assert!(g.invariant_factors.is_empty());
        let g = group_from_relations(1, &IntMatrix::from_i64(&[&[5], &[7]]));
        assert!(g.is_trivial());
    }

    #[test]
    fn p_parts() {
        let g = AbGroup::from_cyclic_orders(&[b(12), b(2)]);
        assert_eq!(p_part_invariants(&g, 2), vec![b(4), b(2)]);
        assert_eq!(
            p_part_invariants(&AbGroup::from_cyclic_orders(&[b(18)]), 3),
            vec![b(9)]
        );
        assert!(p_part_invariants(&AbGroup::from_cyclic_orders(&[b(15)]), 2).is_empty());
    }

    #[test]
    fn modular_invariants_match_snf() {
        let rels = vec![vec![b(4), b(6)], vec![b(2), b(10)], vec![b(0), b(12)]];
        let g = group_from_relations(2, &IntMatrix::from_rows(&rels, 2));
        let order = g.order().unwrap();
        assert_eq!(invariants_mod(&rels, 2, &(order * 5)), g.invariant_factors);
    }

    #[test]
    fn local_snf_with_transform() {
        // Z^2 / <(9, 3), (0, 27)> has 3-part Z/3 x Z/81
        let rels = vec![vec![b(9), b(3)], vec![b(0), b(27)]];
        let s = p_local_snf(&rels, 2, 3, 6, true);
        let mut e = s.exponents.clone();
        e.sort();
        assert_eq!(e, vec![1, 4]);
        let v = s.transform.unwrap();
        // each relation maps into the diagonal lattice
        let pa = pow_big(3, 6);
        for r in &rels {
            for j in 0..2 {
                let c: BigInt = (0..2).map(|i| &r[i] * &v[i][j]).sum();
                assert!(c.mod_floor(&pa).is_multiple_of(&pow_big(3, s.exponents[j])));
            }
        }
    }
}
