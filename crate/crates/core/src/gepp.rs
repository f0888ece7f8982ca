//! Gaussian elimination with partial pivoting, `PA = LU`, over real, complex
//! and quaternion matrices.
//!
//! The magnitude used to compare pivot candidates is a [`PivotRule`]. LAPACK's
//! `xGETRF` compares complex candidates with `|Re| + |Im|` (the `L1` rule);
//! the textbook choice is the modulus. Both rules agree on real data.
//!
//! Pivot selection follows `IxAMAX`: the first row attaining the maximum wins,
//! so a candidate must be strictly larger than the current row to move it.
//! A column that is entirely zero below the diagonal marks the factorization
//! singular and elimination continues with the next column.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ensembles::Matrix;
use crate::error::{Error, Result};
use crate::scalar::{Kind, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PivotRule {
    /// Sum of absolute coordinate values (LAPACK `CABS1`).
    L1,
    /// Euclidean modulus.
    Modulus,
}

impl PivotRule {
    #[inline]
    pub fn magnitude(self, s: &Scalar) -> f64 {
        match self {
            PivotRule::L1 => s.l1_magnitude(),
            PivotRule::Modulus => s.modulus(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PivotRule::L1 => "l1",
            PivotRule::Modulus => "modulus",
        }
    }
}

impl fmt::Display for PivotRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PivotRule {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(PivotRule::L1),
            "modulus" => Ok(PivotRule::Modulus),
            other => Err(Error::domain(format!("unknown pivot rule '{other}'"))),
        }
    }
}

/// A permutation of `0..n`, stored as the image of each index.
///
/// For a factorization, entry `i` is the row of `A` that ends up as row `i`
/// of `PA`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        validate(&images)?;
        Ok(Permutation(images))
    }

    /// Accepts the usual one-line notation, e.g. `[2, 3, 1]`.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        let zero: Vec<usize> = images
            .iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or_else(|| Error::domain("one-based permutation contains 0"))
            })
            .collect::<Result<_>>()?;
        Self::from_zero_based(zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    /// Number of disjoint cycles, fixed points included.
    pub fn cycle_count(&self) -> usize {
        count_cycles(&self.0)
    }

    /// `PA`: row `i` of the result is row `self[i]` of `a`.
    pub fn apply_rows(&self, a: &Matrix) -> Result<Matrix> {
        if a.n() != self.len() {
            return Err(Error::domain("permutation and matrix sizes differ"));
        }
        let n = a.n();
        let mut out = Matrix::zeros(n, a.kind());
        for (i, &src) in self.0.iter().enumerate() {
            for j in 0..n {
                out.set(i, j, a.get(src, j));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.one_based().iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn validate(images: &[usize]) -> Result<()> {
    let mut seen = vec![false; images.len()];
    for &p in images {
        match seen.get_mut(p) {
            Some(s) if !*s => *s = true,
            Some(_) => return Err(Error::domain(format!("permutation repeats index {p}"))),
            None => return Err(Error::domain(format!("permutation index {p} out of range"))),
        }
    }
    Ok(())
}

fn count_cycles(images: &[usize]) -> usize {
    let mut seen = vec![false; images.len()];
    let mut cycles = 0;
    for start in 0..images.len() {
        if seen[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = images[i];
        }
    }
    cycles
}

/// Cycle count of a zero-based permutation given in one-line notation.
pub fn cycle_count(perm: &[usize]) -> Result<usize> {
    validate(perm)?;
    Ok(count_cycles(perm))
}

/// One elimination step as seen by the pivot search.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotStep {
    pub step: usize,
    /// Row chosen as pivot (zero-based, in the working matrix).
    pub pivot_row: usize,
    /// Rule magnitude of the chosen pivot.
    pub pivot_magnitude: f64,
    /// Rule magnitudes of rows `step..n` of the column before the swap.
    pub candidates: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factorization {
    pub perm: Permutation,
    /// LAPACK-style `ipiv`: at step `k` rows `k` and `pivots[k]` were exchanged.
    pub pivots: Vec<usize>,
    pub l: Matrix,
    pub u: Matrix,
    pub swaps: usize,
    pub singular: bool,
    pub rule: PivotRule,
}

impl Factorization {
    pub fn swap_count(&self) -> usize {
        self.swaps
    }

    /// Whether the first elimination step exchanged rows.
    pub fn first_step_swapped(&self) -> bool {
        self.pivots.first().is_some_and(|&p| p != 0)
    }

    pub fn cycle_count(&self) -> usize {
        self.perm.cycle_count()
    }

    /// `max |(PA - LU)_ij|`.
    pub fn residual(&self, a: &Matrix) -> Result<f64> {
        let pa = self.perm.apply_rows(a)?;
        let lu = self.l.matmul(&self.u)?;
        Ok(pa.max_modulus_diff(&lu))
    }
}

pub fn swap_count(f: &Factorization) -> usize {
    f.swaps
}

/// Factors `a` as `PA = LU` with pivots chosen by `rule`.
pub fn factorize(a: &Matrix, rule: PivotRule) -> Factorization {
    eliminate(a, rule, None)
}

/// As [`factorize`], also returning the pivot search at each step.
pub fn factorize_traced(a: &Matrix, rule: PivotRule) -> (Factorization, Vec<PivotStep>) {
    let mut trace = Vec::with_capacity(a.n());
    let f = eliminate(a, rule, Some(&mut trace));
    (f, trace)
}

fn eliminate(a: &Matrix, rule: PivotRule, mut trace: Option<&mut Vec<PivotStep>>) -> Factorization {
    let n = a.n();
    let kind = a.kind();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    let mut swaps = 0;
    let mut singular = false;

    for k in 0..n {
        let mut p = k;
        let mut best = rule.magnitude(&w.get(k, k));
        for i in k + 1..n {
            let m = rule.magnitude(&w.get(i, k));
            if m > best {
                best = m;
                p = i;
            }
        }
        if let Some(t) = trace.as_deref_mut() {
            t.push(PivotStep {
                step: k,
                pivot_row: p,
                pivot_magnitude: best,
                candidates: (k..n).map(|i| rule.magnitude(&w.get(i, k))).collect(),
            });
        }
        pivots.push(p);
        if best == 0.0 {
            singular = true;
            continue;
        }
        if p != k {
            w.swap_rows(p, k);
            perm.swap(p, k);
            swaps += 1;
        }
        let inv = w.get(k, k).invert().expect("pivot has nonzero magnitude");
        for i in k + 1..n {
            let m = w.get(i, k) * inv;
            w.set(i, k, m);
            for j in k + 1..n {
                w.set(i, j, w.get(i, j) - m * w.get(k, j));
            }
        }
    }

    let mut l = Matrix::zeros(n, kind);
    let mut u = Matrix::zeros(n, kind);
    for i in 0..n {
        for j in 0..n {
            match i.cmp(&j) {
                std::cmp::Ordering::Greater => l.set(i, j, w.get(i, j)),
                std::cmp::Ordering::Equal => {
                    l.set(i, j, Scalar::one(kind));
                    u.set(i, j, w.get(i, j));
                }
                std::cmp::Ordering::Less => u.set(i, j, w.get(i, j)),
            }
        }
    }
    debug_assert!(kind == Kind::Real || l.kind() == kind);

    Factorization {
        perm: Permutation(perm),
        pivots,
        l,
        u,
        swaps,
        singular,
        rule,
    }
}
