//! Matrix permanents: the coherent sum over every assignment of N photons
//! to N detectors.
//!
//! Two independent routes are kept: plain enumeration of all N! permutations
//! and Ryser's inclusion-exclusion formula with Gray-code subset updates.
//! [`permanent`] picks enumeration up to N = 6 and Ryser above.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest N accepted by [`permanent`].
pub const MAX_PERMANENT_SIZE: usize = 12;

/// Largest N evaluated by enumeration in [`permanent`].
pub const ENUMERATION_CUTOFF: usize = 6;

/// Square matrix of field amplitudes, entry (i, j) = U(detector i, emitter j).
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    size: usize,
    entries: Vec<Complex64>,
}

impl AmplitudeMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::ContractViolation("amplitude matrix is empty".into()));
        }
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::ContractViolation(
                "amplitude matrix is not square".into(),
            ));
        }
        Self::from_entries(size, rows.into_iter().flatten().collect())
    }

    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Result<Self> {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j));
            }
        }
        Self::from_entries(size, entries)
    }

    pub fn try_from_fn(
        size: usize,
        mut f: impl FnMut(usize, usize) -> Result<Complex64>,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                entries.push(f(i, j)?);
            }
        }
        Self::from_entries(size, entries)
    }

    fn from_entries(size: usize, entries: Vec<Complex64>) -> Result<Self> {
        if size == 0 {
            return Err(Error::ContractViolation("amplitude matrix is empty".into()));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::ContractViolation(
                "amplitude matrix has non-finite entries".into(),
            ));
        }
        Ok(AmplitudeMatrix { size, entries })
    }

    pub fn identity(size: usize) -> Result<Self> {
        Self::from_fn(size, |i, j| {
            if i == j {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.size + col]
    }

    /// Same matrix with rows reordered: new row i is old row `order[i]`.
    pub fn permute_rows(&self, order: &[usize]) -> Self {
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for &src in order {
            entries.extend_from_slice(&self.entries[src * n..(src + 1) * n]);
        }
        AmplitudeMatrix { size: n, entries }
    }

    /// Same matrix with columns reordered: new column j is old column `order[j]`.
    pub fn permute_cols(&self, order: &[usize]) -> Self {
        Self::from_fn(self.size, |i, j| self.get(i, order[j]))
            .expect("reordering keeps entries finite")
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        AmplitudeMatrix {
            size: self.size,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }
}

/// Permanent with the size guard and the enumeration/Ryser switchover.
pub fn permanent(matrix: &AmplitudeMatrix) -> Result<Complex64> {
    let n = matrix.size();
    if n > MAX_PERMANENT_SIZE {
        return Err(Error::SizeGuard {
            size: n,
            max: MAX_PERMANENT_SIZE,
        });
    }
    if n <= ENUMERATION_CUTOFF {
        Ok(permanent_enumerate(matrix))
    } else {
        Ok(permanent_ryser(matrix))
    }
}

/// Σ_σ Π_i a(i, σ(i)) over all N! permutations.
pub fn permanent_enumerate(matrix: &AmplitudeMatrix) -> Complex64 {
    fn walk(m: &AmplitudeMatrix, row: usize, used: u32, acc: Complex64) -> Complex64 {
        let n = m.size();
        if row == n {
            return acc;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for col in 0..n {
            if used & (1 << col) == 0 {
                sum += walk(m, row + 1, used | (1 << col), acc * m.get(row, col));
            }
        }
        sum
    }
    walk(matrix, 0, 0, Complex64::new(1.0, 0.0))
}

/// Ryser: perm(A) = (-1)^N Σ_{S ⊆ cols} (-1)^{|S|} Π_i Σ_{j∈S} a(i, j),
/// visiting subsets in Gray-code order so each step updates the row sums by
/// one column.
pub fn permanent_ryser(matrix: &AmplitudeMatrix) -> Complex64 {
    let n = matrix.size();
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for step in 1u64..(1u64 << n) {
        let next = step ^ (step >> 1);
        let flipped = (gray ^ next).trailing_zeros() as usize;
        let adding = next & (1 << flipped) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if adding {
                *s += matrix.get(i, flipped);
            } else {
                *s -= matrix.get(i, flipped);
            }
        }
        gray = next;
        let product: Complex64 = row_sums.iter().product();
        if next.count_ones() % 2 == 0 {
            total += product;
        } else {
            total -= product;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}
