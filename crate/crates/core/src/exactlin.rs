//! Exact rational linear algebra for the combinatorial invariants of a
//! hypergraph, plus floating-point projections onto affine sets `w + K`.
//!
//! `K` is the kernel of the incidence matrix restricted to the zero-sum
//! hyperplane `Γ`. It is computed as the kernel of the incidence matrix with an
//! all-ones row appended, which is the same subspace.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::Hypergraph;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a finite `f64` (every finite double is a dyadic rational).
pub fn rat_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Dense row-major matrix of reduced rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn from_integers(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self::from_fn(rows, cols, |r, c| Rational::from_integer(entries[r * cols + c].into()))
    }

    pub fn incidence(h: &Hypergraph) -> Self {
        let inc = h.incidence();
        Self::from_fn(inc.rows(), inc.cols(), |r, c| {
            Rational::from_integer(inc.entry(r, c).into())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Rational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Appends a row.
    pub fn push_row(&mut self, row: Vec<Rational>) {
        assert_eq!(row.len(), self.cols);
        self.data.extend(row);
        self.rows += 1;
    }

    pub fn scale(&self, k: &Rational) -> Self {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * k).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    pub fn to_f64(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(r, c).to_f64().unwrap_or(f64::NAN)
        })
    }

    /// Reduced row echelon form and the pivot columns.
    pub fn rref(&self) -> (RationalMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..a.cols {
            if row == a.rows {
                break;
            }
            let Some(p) = (row..a.rows).find(|&r| !a.get(r, col).is_zero()) else {
                continue;
            };
            a.swap_rows(row, p);
            let inv = a.get(row, col).recip();
            for c in col..a.cols {
                let v = a.get(row, c) * &inv;
                a.set(row, c, v);
            }
            for r in 0..a.rows {
                if r == row || a.get(r, col).is_zero() {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for c in col..a.cols {
                    let v = a.get(r, c) - &factor * a.get(row, c);
                    a.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, one vector per free column.
    pub fn kernel(&self) -> Vec<Vec<Rational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r.get(row, f).clone();
                }
                v
            })
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

pub fn rank(m: &RationalMatrix) -> usize {
    m.rank()
}

/// Exact basis of a kernel, together with the ambient dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelBasis {
    ambient: usize,
    basis: Vec<Vec<Rational>>,
}

impl KernelBasis {
    pub fn new(ambient: usize, basis: Vec<Vec<Rational>>) -> Self {
        assert!(basis.iter().all(|v| v.len() == ambient));
        KernelBasis { ambient, basis }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn vectors(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn vectors_f64(&self) -> Vec<Vec<f64>> {
        self.basis
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }
}

/// `K = ker(I(H)) ∩ Γ`.
pub fn kernel_gamma(h: &Hypergraph) -> KernelBasis {
    let mut m = RationalMatrix::incidence(h);
    m.push_row(vec![Rational::one(); h.m()]);
    KernelBasis::new(h.m(), m.kernel())
}

/// `ker(I(H))` without the zero-sum constraint.
pub fn kernel_full(h: &Hypergraph) -> KernelBasis {
    KernelBasis::new(h.m(), RationalMatrix::incidence(h).kernel())
}

/// Orthonormal floating-point frame for `span(K)`, for repeated projections.
#[derive(Clone, Debug)]
pub struct AffineProjector {
    frame: Vec<Vec<f64>>,
    ambient: usize,
}

impl AffineProjector {
    /// Gram–Schmidt with one re-orthogonalization pass.
    pub fn new(k: &KernelBasis) -> Self {
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(k.dim());
        for mut v in k.vectors_f64() {
            for _ in 0..2 {
                for q in &frame {
                    let d = dot(&v, q);
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
                }
            }
            let n = dot(&v, &v).sqrt();
            if n > 1e-12 {
                v.iter_mut().for_each(|a| *a /= n);
                frame.push(v);
            }
        }
        AffineProjector {
            frame,
            ambient: k.ambient(),
        }
    }

    /// Orthogonal projection of `x` onto `w + span(K)` and the distance to it.
    pub fn project(&self, x: &[f64], w: &[f64]) -> (Vec<f64>, f64) {
        assert_eq!(x.len(), self.ambient);
        assert_eq!(w.len(), self.ambient);
        let diff: Vec<f64> = x.iter().zip(w).map(|(a, b)| a - b).collect();
        let mut proj = w.to_vec();
        for q in &self.frame {
            let d = dot(&diff, q);
            proj.iter_mut().zip(q).for_each(|(p, qi)| *p += d * qi);
        }
        let dist = x
            .iter()
            .zip(&proj)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        (proj, dist)
    }

    pub fn distance(&self, x: &[f64], w: &[f64]) -> f64 {
        self.project(x, w).1
    }
}

pub fn project_affine(x: &[f64], w: &[f64], k: &KernelBasis) -> (Vec<f64>, f64) {
    AffineProjector::new(k).project(x, w)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Formats as `p/q`, always with an explicit denominator.
pub fn rational_to_string(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q = BigInt::from_str(q.trim()).ok()?;
            if q.is_zero() {
                return None;
            }
            Some(Rational::new(BigInt::from_str(p.trim()).ok()?, q))
        }
        None => Some(Rational::from_integer(BigInt::from_str(s).ok()?)),
    }
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    ambient: usize,
    dim: usize,
    basis: Vec<Vec<String>>,
}

impl Serialize for KernelBasis {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        KernelJson {
            ambient: self.ambient,
            dim: self.dim(),
            basis: self
                .basis
                .iter()
                .map(|v| v.iter().map(rational_to_string).collect())
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for KernelBasis {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = KernelJson::deserialize(d)?;
        let basis = raw
            .basis
            .iter()
            .map(|v| {
                v.iter()
                    .map(|s| parse_rational(s).ok_or_else(|| D::Error::custom(format!("bad rational `{s}`"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        if basis.len() != raw.dim || basis.iter().any(|v| v.len() != raw.ambient) {
            return Err(D::Error::custom("kernel basis shape does not match dim/ambient"));
        }
        Ok(KernelBasis::new(raw.ambient, basis))
    }
}

/// Largest absolute entry, exactly.
pub fn max_abs(m: &RationalMatrix) -> Rational {
    m.data
        .iter()
        .map(|x| x.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_small_cases() {
        let tri = Hypergraph::new(3, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        assert_eq!(RationalMatrix::incidence(&tri).rank(), 3);
        let s = Hypergraph::single_edge(3).unwrap();
        assert_eq!(RationalMatrix::incidence(&s).rank(), 1);
        assert_eq!(RationalMatrix::incidence(&Hypergraph::cube()).rank(), 4);
        assert_eq!(RationalMatrix::zeros(3, 2).rank(), 0);
    }

    #[test]
    fn duplicate_edges_have_rank_one() {
        let h = Hypergraph::from_json(r#"{"m":2,"edges":[[0,1],[0,1]]}"#).unwrap();
        assert_eq!(RationalMatrix::incidence(&h).rank(), 1);
    }

    #[test]
    fn single_edge_kernel_is_gamma() {
        let s = Hypergraph::single_edge(3).unwrap();
        assert_eq!(kernel_gamma(&s).dim(), 2);
        assert_eq!(kernel_full(&s).dim(), 2);
    }

    #[test]
    fn path_kernels() {
        let p = Hypergraph::path(3).unwrap();
        let full = kernel_full(&p);
        assert_eq!(full.dim(), 1);
        assert_eq!(full.vectors()[0], vec![rat(1, 1), rat(-1, 1), rat(1, 1)]);
        assert_eq!(kernel_gamma(&p).dim(), 0);
    }

    #[test]
    fn kernel_vectors_are_exact() {
        let h = Hypergraph::cube();
        let inc = RationalMatrix::incidence(&h);
        let k = kernel_gamma(&h);
        for v in k.vectors() {
            assert!(inc.mul_vec(v).iter().all(Zero::is_zero));
            assert!(v.iter().fold(Rational::zero(), |a, b| a + b).is_zero());
        }
        let mut stacked = RationalMatrix::zeros(0, 8);
        for v in k.vectors() {
            stacked.push_row(v.clone());
        }
        assert_eq!(stacked.rank(), k.dim());
    }

    #[test]
    fn projection_trivial_cases() {
        let k = kernel_gamma(&Hypergraph::cube());
        let w = vec![0.125; 8];
        let (p, d) = project_affine(&w, &w, &k);
        assert_eq!(p, w);
        assert_eq!(d, 0.0);

        let kv = &k.vectors_f64()[0];
        let x: Vec<f64> = w.iter().zip(kv).map(|(a, b)| a + 0.01 * b).collect();
        let (p, d) = project_affine(&x, &w, &k);
        assert!(d < 1e-14);
        assert!(p.iter().zip(&x).all(|(a, b)| (a - b).abs() < 1e-14));

        let empty = kernel_gamma(&Hypergraph::tetrahedron());
        let (p, d) = project_affine(&[0.4, 0.2, 0.2, 0.2], &[0.25; 4], &empty);
        assert_eq!(p, vec![0.25; 4]);
        assert!((d - (0.15f64.powi(2) + 3.0 * 0.05f64.powi(2)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rational_strings() {
        assert_eq!(rational_to_string(&rat(-2, 4)), "-1/2");
        assert_eq!(rational_to_string(&rat(3, 1)), "3/1");
        assert_eq!(parse_rational("-1/2"), Some(rat(-1, 2)));
        assert_eq!(parse_rational("7"), Some(rat(7, 1)));
        assert_eq!(parse_rational("1/0"), None);
        let k = kernel_gamma(&Hypergraph::octahedron());
        let json = serde_json::to_string(&k).unwrap();
        let back: KernelBasis = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
    }
}
