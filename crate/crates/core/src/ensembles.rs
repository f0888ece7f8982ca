//! Random matrix ensembles and the dense matrix type they produce.
//!
//! GOE, GUE and GSE samples are built as `(G + G*)/√2` from a square `G` of
//! iid real, complex or quaternion standard normals (complex parts have
//! variance 1/2, quaternion parts 1/4, so every off-diagonal entry has
//! `E|a|² = 1`). The β-Hermite model is the real symmetric tridiagonal matrix
//! with N(0, 1) diagonal and `χ_{β(n-k)}/√2` on the k-th super/sub-diagonal
//! entry, for any real β > 0.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RandomStream;
use crate::scalar::{Kind, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Unsymmetrized iid N(0, 1) entries.
    #[serde(rename = "iid")]
    IidGaussian,
    Goe,
    Gue,
    Gse,
    /// Tridiagonal β-Hermite model.
    #[serde(rename = "hbeta")]
    HBeta,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::IidGaussian => "iid",
            Family::Goe => "goe",
            Family::Gue => "gue",
            Family::Gse => "gse",
            Family::HBeta => "hbeta",
        }
    }

    /// Scalar kind of the entries this family produces.
    pub fn kind(self) -> Kind {
        match self {
            Family::Gue => Kind::Complex,
            Family::Gse => Kind::Quaternion,
            _ => Kind::Real,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "iid" => Ok(Family::IidGaussian),
            "goe" => Ok(Family::Goe),
            "gue" => Ok(Family::Gue),
            "gse" => Ok(Family::Gse),
            "hbeta" => Ok(Family::HBeta),
            other => Err(Error::domain(format!("unknown ensemble '{other}'"))),
        }
    }
}

/// A validated ensemble description: `beta` is present exactly for
/// [`Family::HBeta`] and is then positive and finite; `n ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct EnsembleSpec {
    family: Family,
    n: usize,
    beta: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    family: Family,
    n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
}

impl TryFrom<RawSpec> for EnsembleSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        EnsembleSpec::new(r.family, r.n, r.beta)
    }
}

impl From<EnsembleSpec> for RawSpec {
    fn from(s: EnsembleSpec) -> Self {
        RawSpec {
            family: s.family,
            n: s.n,
            beta: s.beta,
        }
    }
}

impl EnsembleSpec {
    pub fn new(family: Family, n: usize, beta: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("matrix size n must be at least 1"));
        }
        match (family, beta) {
            (Family::HBeta, Some(b)) if b > 0.0 && b.is_finite() => {}
            (Family::HBeta, Some(b)) => {
                return Err(Error::domain(format!("beta must be positive and finite, got {b}")))
            }
            (Family::HBeta, None) => return Err(Error::domain("hbeta ensemble requires beta")),
            (_, Some(_)) => return Err(Error::domain(format!("beta only applies to hbeta, not {family}"))),
            (_, None) => {}
        }
        Ok(EnsembleSpec { family, n, beta })
    }

    pub fn iid(n: usize) -> Result<Self> {
        Self::new(Family::IidGaussian, n, None)
    }

    pub fn goe(n: usize) -> Result<Self> {
        Self::new(Family::Goe, n, None)
    }

    pub fn gue(n: usize) -> Result<Self> {
        Self::new(Family::Gue, n, None)
    }

    pub fn gse(n: usize) -> Result<Self> {
        Self::new(Family::Gse, n, None)
    }

    pub fn hbeta(n: usize, beta: f64) -> Result<Self> {
        Self::new(Family::HBeta, n, Some(beta))
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }
}

/// Dense square matrix of scalars, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    entries: Vec<Scalar>,
    spec: Option<EnsembleSpec>,
}

impl Matrix {
    pub fn zeros(n: usize, kind: Kind) -> Self {
        Matrix {
            n,
            entries: vec![Scalar::zero(kind); n * n],
            spec: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, Kind::Real);
        for i in 0..n {
            m.set(i, i, Scalar::ONE);
        }
        m
    }

    /// Square matrix from rows; fails if the rows are ragged or not square.
    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::domain("matrix rows must form a square array"));
        }
        Ok(Matrix {
            n,
            entries: rows.into_iter().flatten().collect(),
            spec: None,
        })
    }

    pub fn from_real_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.as_ref().iter().copied().map(Scalar::real).collect())
                .collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The ensemble this matrix was sampled from, if any.
    pub fn spec(&self) -> Option<&EnsembleSpec> {
        self.spec.as_ref()
    }

    pub fn with_spec(mut self, spec: EnsembleSpec) -> Self {
        self.spec = Some(spec);
        self
    }

    /// Largest scalar kind among the entries (`Real` for an empty matrix).
    pub fn kind(&self) -> Kind {
        self.entries.iter().map(Scalar::kind).max().unwrap_or(Kind::Real)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.entries[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, s: Scalar) {
        self.entries[i * self.n + j] = s;
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.entries
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.n {
                self.entries.swap(a * self.n + j, b * self.n + j);
            }
        }
    }

    /// Matrix product with scalar products taken in order `self[i][k] · rhs[k][j]`.
    pub fn matmul(&self, rhs: &Matrix) -> Result<Matrix> {
        if self.n != rhs.n {
            return Err(Error::domain("matrix dimensions differ"));
        }
        let n = self.n;
        let kind = self.kind().max(rhs.kind());
        let mut out = Matrix::zeros(n, kind);
        for i in 0..n {
            for j in 0..n {
                let mut acc = Scalar::zero(kind);
                for k in 0..n {
                    acc = acc + self.get(i, k) * rhs.get(k, j);
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }

    pub fn conjugate_transpose(&self) -> Matrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i).conjugate());
            }
        }
        out
    }

    /// Exact entrywise test of `A = A*`.
    pub fn is_hermitian(&self) -> bool {
        (0..self.n).all(|i| (0..=i).all(|j| self.get(i, j) == self.get(j, i).conjugate()))
    }

    /// Largest entry modulus, `max |a_ij|`.
    pub fn max_modulus(&self) -> f64 {
        self.entries.iter().map(Scalar::modulus).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_modulus_diff(&self, rhs: &Matrix) -> f64 {
        self.entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (*a - *b).modulus())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> MatrixJson {
        let kind = self.kind();
        let column = |c: usize| -> Option<Vec<f64>> {
            (c < kind.dim()).then(|| self.entries.iter().map(|s| s.components()[c]).collect())
        };
        MatrixJson {
            n: self.n,
            family: self.spec.map(|s| s.family),
            beta: self.spec.and_then(|s| s.beta),
            kind,
            x: column(0).unwrap_or_default(),
            y: column(1),
            u: column(2),
            v: column(3),
        }
    }

    pub fn from_json(j: &MatrixJson) -> Result<Matrix> {
        let nn = j.n * j.n;
        let parts = [Some(&j.x), j.y.as_ref(), j.u.as_ref(), j.v.as_ref()];
        for (c, p) in parts.iter().enumerate() {
            match p {
                Some(p) if p.len() != nn => {
                    return Err(Error::domain(format!(
                        "component array {c} has {} entries, expected {nn}",
                        p.len()
                    )))
                }
                None if c < j.kind.dim() => {
                    return Err(Error::domain(format!("{:?} matrix is missing component {c}", j.kind)))
                }
                _ => {}
            }
        }
        let entries = (0..nn)
            .map(|e| {
                let mut c = [0.0; 4];
                for (slot, p) in c.iter_mut().zip(parts) {
                    *slot = p.map_or(0.0, |p| p[e]);
                }
                Scalar::from_components(j.kind, c)
            })
            .collect::<Result<Vec<_>>>()?;
        let spec = match j.family {
            Some(f) => Some(EnsembleSpec::new(f, j.n, j.beta)?),
            None => None,
        };
        Ok(Matrix { n: j.n, entries, spec })
    }
}

/// JSON debug form of a [`Matrix`]: size, provenance and one flattened
/// row-major array per used coordinate (`x` real part, `y`/`u`/`v` the
/// `i`/`j`/`k` parts).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub kind: Kind,
    pub x: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<f64>>,
}

fn hermitian_part(g: &[Scalar], n: usize, spec: EnsembleSpec) -> Matrix {
    let mut a = Matrix::zeros(n, spec.family.kind());
    for i in 0..n {
        for j in i..n {
            let s = (g[i * n + j] + g[j * n + i].conjugate()).scale(FRAC_1_SQRT_2);
            a.set(i, j, s);
            if i != j {
                a.set(j, i, s.conjugate());
            }
        }
    }
    a.with_spec(spec)
}

/// Draws one matrix from `spec`. Entries are consumed from `stream` in a
/// fixed row-major order, so a stream position determines the sample.
pub fn sample(spec: &EnsembleSpec, stream: &mut RandomStream) -> Result<Matrix> {
    let n = spec.n;
    let nn = n * n;
    let m = match spec.family {
        Family::IidGaussian => {
            let entries = (0..nn).map(|_| Scalar::real(stream.standard_normal())).collect();
            Matrix {
                n,
                entries,
                spec: Some(*spec),
            }
        }
        Family::Goe => {
            let g: Vec<Scalar> = (0..nn).map(|_| Scalar::real(stream.standard_normal())).collect();
            hermitian_part(&g, n, *spec)
        }
        Family::Gue => {
            let g: Vec<Scalar> = (0..nn).map(|_| stream.next_complex_normal()).collect();
            hermitian_part(&g, n, *spec)
        }
        Family::Gse => {
            let g: Vec<Scalar> = (0..nn).map(|_| stream.next_quaternion_normal()).collect();
            hermitian_part(&g, n, *spec)
        }
        Family::HBeta => {
            let beta = spec.beta.ok_or_else(|| Error::domain("hbeta ensemble requires beta"))?;
            let mut a = Matrix::zeros(n, Kind::Real).with_spec(*spec);
            for i in 0..n {
                a.set(i, i, Scalar::real(stream.standard_normal()));
            }
            // entry (k, k+1), 1-based, carries χ_{β(n-k)}
            for k in 1..n {
                let off = FRAC_1_SQRT_2 * stream.next_chi(beta * (n - k) as f64)?;
                a.set(k - 1, k, Scalar::real(off));
                a.set(k, k - 1, Scalar::real(off));
            }
            a
        }
    };
    Ok(m)
}
