//! Exact integer matrices, Smith normal form, and the determinant-divisor
//! oracle used to cross-check it.
//!
//! Everything here works over arbitrary-precision integers. Pivoting during
//! diagonalization can grow entries well past the input magnitude, so fixed
//! width arithmetic is never used on matrix entries.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::Error;

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self, Error> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from small integer rows. All rows must have equal length.
    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self, Error> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Dimension(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend(row.iter().map(|&v| BigInt::from(v)));
        }
        Ok(IntMatrix { rows: rows.len(), cols, entries })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigInt) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.entries[c * self.rows + r] = self.get(r, c).clone();
            }
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.entries.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] -= factor * row[src]
    fn sub_row(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for c in 0..self.cols {
            let s = &self.entries[src * self.cols + c];
            if s.is_zero() {
                continue;
            }
            let delta = s * factor;
            self.entries[dst * self.cols + c] -= delta;
        }
    }

    /// col[dst] -= factor * col[src]
    fn sub_col(&mut self, dst: usize, src: usize, factor: &BigInt) {
        for r in 0..self.rows {
            let s = &self.entries[r * self.cols + src];
            if s.is_zero() {
                continue;
            }
            let delta = s * factor;
            self.entries[r * self.cols + dst] -= delta;
        }
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(r, c))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Invariant factors of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SmithForm {
    /// Positive diagonal entries d_1 | d_2 | ... | d_rank.
    #[serde(serialize_with = "crate::serde_big::seq")]
    pub invariant_factors: Vec<BigInt>,
    pub rank: usize,
    pub source_dims: (usize, usize),
}

impl SmithForm {
    pub fn divisibility_chain_holds(&self) -> bool {
        self.invariant_factors.iter().all(|d| d.is_positive())
            && self
                .invariant_factors
                .windows(2)
                .all(|w| (&w[1] % &w[0]).is_zero())
    }

    /// Product of the first `k` invariant factors.
    pub fn leading_product(&self, k: usize) -> BigInt {
        self.invariant_factors.iter().take(k).product()
    }
}

/// Diagonalizes `a` by unimodular row and column operations.
///
/// Pivot selection takes the smallest nonzero entry of the trailing block,
/// clears its row and column by Euclidean division, and repeats until the
/// pivot divides the whole remaining block.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut m = a.clone();
    let (rows, cols) = (m.rows, m.cols);
    let mut factors = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let Some((pr, pc)) = smallest_nonzero(&m, t) else {
            break;
        };
        m.swap_rows(t, pr);
        m.swap_cols(t, pc);
        loop {
            let mut dirty = false;
            for r in t + 1..rows {
                if m.get(r, t).is_zero() {
                    continue;
                }
                let q = m.get(r, t).div_floor(m.get(t, t));
                m.sub_row(r, t, &q);
                if !m.get(r, t).is_zero() {
                    dirty = true;
                }
            }
            for c in t + 1..cols {
                if m.get(t, c).is_zero() {
                    continue;
                }
                let q = m.get(t, c).div_floor(m.get(t, t));
                m.sub_col(c, t, &q);
                if !m.get(t, c).is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // A remainder smaller than the pivot survived; move it up.
                let (pr, pc) = smallest_in_cross(&m, t);
                m.swap_rows(t, pr);
                m.swap_cols(t, pc);
                continue;
            }
            // Row and column are clear. Enforce divisibility of the block.
            let pivot = m.get(t, t).clone();
            let offender = (t + 1..rows)
                .flat_map(|r| (t + 1..cols).map(move |c| (r, c)))
                .find(|&(r, c)| !(m.get(r, c) % &pivot).is_zero());
            match offender {
                Some((r, _)) => {
                    // row[t] += row[r] brings the offending entry into row t.
                    m.sub_row(t, r, &BigInt::from(-1));
                }
                None => break,
            }
        }
        factors.push(m.get(t, t).abs());
        t += 1;
    }
    SmithForm { rank: factors.len(), invariant_factors: factors, source_dims: (rows, cols) }
}

fn smallest_nonzero(m: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, BigInt)> = None;
    for r in t..m.rows {
        for c in t..m.cols {
            let v = m.get(r, c);
            if v.is_zero() {
                continue;
            }
            let av = v.abs();
            if best.as_ref().map_or(true, |(_, _, b)| av < *b) {
                let unit = av.is_one();
                best = Some((r, c, av));
                if unit {
                    return best.map(|(r, c, _)| (r, c));
                }
            }
        }
    }
    best.map(|(r, c, _)| (r, c))
}

fn smallest_in_cross(m: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t, m.get(t, t).abs());
    for r in t + 1..m.rows {
        let v = m.get(r, t);
        if !v.is_zero() && v.abs() < best.2 {
            best = (r, t, v.abs());
        }
    }
    for c in t + 1..m.cols {
        let v = m.get(t, c);
        if !v.is_zero() && v.abs() < best.2 {
            best = (t, c, v.abs());
        }
    }
    (best.0, best.1)
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "determinant of a non-square matrix");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m: Vec<Vec<BigInt>> =
        (0..n).map(|r| (0..n).map(|c| a.get(r, c).clone()).collect()).collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&r| !m[r][k].is_zero()) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                m[i][j] = v / &prev;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Greatest common divisor of all `k x k` minors of `a` (zero when every
/// minor vanishes, one for `k = 0`).
///
/// Enumerates every row and column subset, so only use it on small matrices.
pub fn determinant_divisors(a: &IntMatrix, k: usize) -> Result<BigInt, Error> {
    if k > a.rows.min(a.cols) {
        return Err(Error::Dimension(format!(
            "minor size {k} exceeds matrix dimensions {}x{}",
            a.rows, a.cols
        )));
    }
    if k == 0 {
        return Ok(BigInt::one());
    }
    let row_sets = subsets(a.rows, k);
    let col_sets = subsets(a.cols, k);
    let mut g = BigInt::zero();
    for rs in &row_sets {
        for cs in &col_sets {
            let mut minor = IntMatrix::zero(k, k);
            for (i, &r) in rs.iter().enumerate() {
                for (j, &c) in cs.iter().enumerate() {
                    minor.set(i, j, a.get(r, c).clone());
                }
            }
            g = g.gcd(&determinant(&minor));
            if g.is_one() {
                return Ok(g);
            }
        }
    }
    Ok(g)
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A finitely generated abelian group, ℤ^rank ⊕ ⊕ ℤ/t_i.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct AbelianInvariants {
    pub rank: usize,
    /// Torsion coefficients, each at least 2, each dividing the next.
    #[serde(serialize_with = "crate::serde_big::seq")]
    pub torsion: Vec<BigInt>,
}

impl AbelianInvariants {
    pub fn free(rank: usize) -> Self {
        AbelianInvariants { rank, torsion: Vec::new() }
    }

    pub fn trivial() -> Self {
        Self::free(0)
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Cyclic means generated by one element: ℤ, ℤ/n, or trivial.
    pub fn is_cyclic(&self) -> bool {
        self.rank + self.torsion.len() <= 1
    }

    pub fn torsion_u64(&self) -> Option<Vec<u64>> {
        self.torsion.iter().map(|t| u64::try_from(t).ok()).collect()
    }

    /// Minimal number of generators.
    pub fn generator_count(&self) -> usize {
        self.rank + self.torsion.len()
    }

    /// Normalizes an arbitrary list of cyclic orders (0 meaning ℤ) into
    /// invariant-factor form.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let n = orders.len();
        let mut m = IntMatrix::zero(n, n);
        for (i, &o) in orders.iter().enumerate() {
            m.set(i, i, BigInt::from(o));
        }
        cokernel_invariants(&m)
    }
}

impl fmt::Display for AbelianInvariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Cokernel of the relation matrix `a`: the group ℤ^cols modulo the row
/// lattice of `a`.
pub fn cokernel_invariants(a: &IntMatrix) -> AbelianInvariants {
    let snf = smith_normal_form(a);
    AbelianInvariants {
        rank: a.cols - snf.rank,
        torsion: snf.invariant_factors.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Cokernel of a sparse relation matrix given row by row as
/// `column -> coefficient` maps.
///
/// Unit pivots are eliminated first without densifying; whatever survives is
/// handed to the dense Smith form. Relation matrices coming from mapping tori
/// are mostly unit differences, so the dense remainder is tiny.
pub fn sparse_cokernel_invariants(cols: usize, rows: Vec<BTreeMap<usize, BigInt>>) -> AbelianInvariants {
    let mut rows: Vec<Option<BTreeMap<usize, BigInt>>> = rows
        .into_iter()
        .map(|mut r| {
            r.retain(|_, v| !v.is_zero());
            (!r.is_empty()).then_some(r)
        })
        .collect();
    let mut by_col: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cols];
    for (i, r) in rows.iter().enumerate() {
        if let Some(r) = r {
            for &c in r.keys() {
                by_col[c].insert(i);
            }
        }
    }
    let mut live_col = vec![true; cols];

    loop {
        let mut pick: Option<(usize, usize, usize)> = None;
        for (i, r) in rows.iter().enumerate() {
            let Some(r) = r else { continue };
            if pick.is_some_and(|(_, _, len)| len <= r.len()) {
                continue;
            }
            let unit = r
                .iter()
                .filter(|(_, v)| v.abs().is_one())
                .min_by_key(|(c, _)| by_col[**c].len())
                .map(|(c, _)| *c);
            if let Some(c) = unit {
                pick = Some((i, c, r.len()));
            }
        }
        let Some((pi, pc, _)) = pick else { break };

        let pivot_row = rows[pi].take().expect("live row");
        let e = pivot_row[&pc].clone();
        for &c in pivot_row.keys() {
            by_col[c].remove(&pi);
        }
        let others: Vec<usize> = by_col[pc].iter().copied().collect();
        for oi in others {
            let row = rows[oi].as_mut().expect("indexed row is live");
            let factor = &row[&pc] * &e;
            for (&c, v) in &pivot_row {
                let entry = row.entry(c).or_insert_with(BigInt::zero);
                let was_zero = entry.is_zero();
                *entry -= &factor * v;
                if entry.is_zero() {
                    row.remove(&c);
                    by_col[c].remove(&oi);
                } else if was_zero {
                    by_col[c].insert(oi);
                }
            }
            if row.is_empty() {
                rows[oi] = None;
            }
        }
        live_col[pc] = false;
    }

    let col_map: Vec<usize> = (0..cols).filter(|&c| live_col[c]).collect();
    let remaining: Vec<&BTreeMap<usize, BigInt>> = rows.iter().flatten().collect();
    let mut dense = IntMatrix::zero(remaining.len(), col_map.len());
    for (i, r) in remaining.iter().enumerate() {
        for (c, v) in r.iter() {
            let j = col_map.binary_search(c).expect("pivot columns were cleared");
            dense.set(i, j, v.clone());
        }
    }
    cokernel_invariants(&dense)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn factors(m: &IntMatrix) -> Vec<i64> {
        smith_normal_form(m)
            .invariant_factors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn identity_has_unit_factors() {
        let snf = smith_normal_form(&IntMatrix::identity(2));
        assert_eq!(snf.rank, 2);
        assert_eq!(factors(&IntMatrix::identity(2)), vec![1, 1]);
    }

    #[test]
    fn cyclic_monodromy_minus_identity() {
        // n = 5: [[-1, 1], [-1, 1 - n]]; d1 = 1, d1 d2 = |det| = 5
        let m = IntMatrix::from_rows(&[[-1, 1], [-1, -4]]).unwrap();
        assert_eq!(factors(&m), vec![1, 5]);
    }

    #[test]
    fn two_by_two_with_gcd_two() {
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]).unwrap();
        assert_eq!(factors(&m), vec![2, 4]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let snf = smith_normal_form(&IntMatrix::zero(3, 2));
        assert_eq!(snf.rank, 0);
        assert!(snf.invariant_factors.is_empty());
        assert_eq!(snf.source_dims, (3, 2));
    }

    #[test]
    fn empty_matrices() {
        assert_eq!(smith_normal_form(&IntMatrix::zero(0, 3)).rank, 0);
        let c = cokernel_invariants(&IntMatrix::zero(0, 3));
        assert_eq!(c, AbelianInvariants::free(3));
        assert_eq!(determinant(&IntMatrix::zero(0, 0)), BigInt::one());
    }

    #[test]
    fn divisors_examples() {
        assert_eq!(determinant_divisors(&IntMatrix::identity(3), 2).unwrap(), BigInt::one());
        let m = IntMatrix::from_rows(&[[2, 4], [6, 8]]).unwrap();
        assert_eq!(determinant_divisors(&m, 2).unwrap(), BigInt::from(8));
        assert_eq!(determinant_divisors(&IntMatrix::zero(2, 2), 1).unwrap(), BigInt::zero());
        assert!(determinant_divisors(&m, 3).is_err());
    }

    #[test]
    fn cokernel_examples() {
        let seven = IntMatrix::from_rows(&[[-1, 1], [-1, -6]]).unwrap();
        let c = cokernel_invariants(&seven);
        assert_eq!(c.rank, 0);
        assert_eq!(c.torsion, vec![BigInt::from(7)]);

        assert_eq!(cokernel_invariants(&IntMatrix::zero(2, 2)), AbelianInvariants::free(2));

        let one = IntMatrix::from_rows(&[[-1, 1], [-1, 0]]).unwrap();
        assert!(cokernel_invariants(&one).is_trivial());
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = IntMatrix::from_rows(&[[0, 2, 1], [3, -1, 4], [5, 0, -2]]).unwrap();
        // cofactor along the first row: 0*(2-0) - 2*(-6-20) + 1*(0+5) = 57
        assert_eq!(determinant(&m), BigInt::from(57));
    }

    #[test]
    fn large_entries_do_not_overflow() {
        let big = 3_000_000_000_i64;
        let m = IntMatrix::from_rows(&[[big, big + 1], [big - 1, big]]).unwrap();
        // det = big^2 - (big^2 - 1) = 1
        assert_eq!(factors(&m), vec![1, 1]);
    }

    #[test]
    fn cyclic_orders_normalize() {
        let g = AbelianInvariants::from_cyclic_orders(&[4, 6, 0, 1]);
        assert_eq!(g.rank, 1);
        assert_eq!(g.torsion, vec![BigInt::from(2), BigInt::from(12)]);
        assert_eq!(g.to_string(), "Z + Z/2 + Z/12");
    }

    fn sparse_rows(m: &IntMatrix) -> Vec<BTreeMap<usize, BigInt>> {
        (0..m.rows())
            .map(|r| (0..m.cols()).map(|c| (c, m.get(r, c).clone())).collect())
            .collect()
    }

    #[test]
    fn sparse_prepass_agrees_with_dense() {
        let cases: [&[[i64; 4]]; 4] = [
            &[[1, -1, 0, 0], [0, 1, -1, 0], [0, 0, 1, -1], [0, 0, 0, 6]],
            &[[2, 4, 0, 0], [6, 8, 0, 0], [0, 0, 1, 3], [0, 0, 3, 1]],
            &[[0, 0, 0, 0], [1, 1, 1, 1], [-1, 2, 0, 5], [3, 3, 3, 3]],
            &[[4, 6, 10, 0], [6, 9, 15, 0], [0, 0, 0, 0], [0, 0, 0, 0]],
        ];
        for rows in cases {
            let m = IntMatrix::from_rows(rows).unwrap();
            assert_eq!(sparse_cokernel_invariants(4, sparse_rows(&m)), cokernel_invariants(&m));
        }
    }
}
