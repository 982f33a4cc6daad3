use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::descriptor::NormalFormDescriptor;
use super::rotation::RotationNumber;
use crate::error::{Error, Result};
use crate::interval::{int, rat};

/// Square matrix of exact rationals, row major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|row| row.len() != dim) {
            return Err(Error::Dimension("matrix must be square and non-empty".into()));
        }
        Ok(Matrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        Matrix::new(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix {
            dim,
            entries: vec![BigRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Matrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, BigRational::one());
        }
        m
    }

    /// `J = [[0, -I], [I, 0]]`.
    pub fn standard_form(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 != 0 {
            return Err(Error::Dimension(format!("symplectic dimension must be even, got {dim}")));
        }
        let k = dim / 2;
        let mut j = Matrix::zeros(dim);
        for i in 0..k {
            j.set(i, k + i, -BigRational::one());
            j.set(k + i, i, BigRational::one());
        }
        Ok(j)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.dim + j] = v;
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let v = out.get(i, j) + a * b;
                        out.set(i, j, v);
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> Matrix {
        Matrix {
            dim: self.dim,
            entries: self.entries.iter().map(|a| a * k).collect(),
        }
    }

    pub fn trace(&self) -> BigRational {
        (0..self.dim).fold(BigRational::zero(), |acc, i| acc + self.get(i, i))
    }

    pub fn rank(&self) -> usize {
        let n = self.dim;
        let mut rows: Vec<Vec<BigRational>> =
            (0..n).map(|i| self.entries[i * n..(i + 1) * n].to_vec()).collect();
        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..n).find(|&r| !rows[r][col].is_zero()) else {
                continue;
            };
            rows.swap(rank, pivot);
            let p = rows[rank][col].clone();
            for r in 0..n {
                if r != rank && !rows[r][col].is_zero() {
                    let f = &rows[r][col] / &p;
                    for c in col..n {
                        let v = &rows[r][c] - &f * &rows[rank][c];
                        rows[r][c] = v;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// `dim ker(M - I)`.
    pub fn eigenvalue_one_nullity(&self) -> usize {
        self.dim - self.sub(&Matrix::identity(self.dim)).rank()
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect()
    }

    /// Symplectic direct sum: for `A = [[A1, B1], [C1, D1]]` and
    /// `B = [[A2, B2], [C2, D2]]` the result interleaves the blocks as
    /// `[[A1, 0, B1, 0], [0, A2, 0, B2], [C1, 0, D1, 0], [0, C2, 0, D2]]`.
    pub fn diamond(&self, other: &Matrix) -> Result<Matrix> {
        if self.dim % 2 != 0 || other.dim % 2 != 0 {
            return Err(Error::Dimension("diamond product needs even dimensions".into()));
        }
        let (i, j) = (self.dim / 2, other.dim / 2);
        let n = 2 * (i + j);
        let mut out = Matrix::zeros(n);
        // position of a row/column of `self` and `other` in the product
        let left = |a: usize| if a < i { a } else { a - i + i + j };
        let right = |b: usize| if b < j { i + b } else { b - j + 2 * i + j };
        for r in 0..self.dim {
            for c in 0..self.dim {
                out.set(left(r), left(c), self.get(r, c).clone());
            }
        }
        for r in 0..other.dim {
            for c in 0..other.dim {
                out.set(right(r), right(c), other.get(r, c).clone());
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| crate::interval::format_rational(self.get(i, j)))
                .collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// True iff `Mᵀ J M = J` exactly.
pub fn check_symplectic(m: &Matrix) -> Result<bool> {
    let j = Matrix::standard_form(m.dim())?;
    Ok(m.transpose().mul(&j).mul(m) == j)
}

/// A matrix verified to satisfy `Mᵀ J M = J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymplecticMatrix(Matrix);

impl SymplecticMatrix {
    pub fn new(m: Matrix) -> Result<Self> {
        if check_symplectic(&m)? {
            Ok(SymplecticMatrix(m))
        } else {
            Err(Error::Validation("matrix does not satisfy MᵀJM = J".into()))
        }
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn diamond(&self, other: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix(self.0.diamond(&other.0).expect("symplectic blocks are even"))
    }
}

/// Conjugacy class of a 2×2 symplectic matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockClass {
    /// `N1(1, 1)`
    UnipotentPositive,
    I2,
    /// `N1(1, -1)`
    UnipotentNegative,
    /// `N1(-1, 1)`
    NegUnipotentPositive,
    NegI2,
    /// `N1(-1, -1)`
    NegUnipotentNegative,
    /// `R(θ)` with `cos θ = cos`; `upper` when `θ ∈ (π, 2π)`.
    Rotation { cos: BigRational, upper: bool },
    Hyperbolic,
}

impl BlockClass {
    /// `θ / 2π` in floating point for a rotation class.
    pub fn turn(&self) -> Option<f64> {
        let BlockClass::Rotation { cos, upper } = self else {
            return None;
        };
        let base = cos.to_f64()?.clamp(-1.0, 1.0).acos() / (2.0 * std::f64::consts::PI);
        Some(if *upper { 1.0 - base } else { base })
    }

    /// `θ / 2π` exactly, when the cosine is one of the rational values
    /// `0, ±1/2` (the only rational cosines of rational angles strictly
    /// between 0 and π).
    pub fn exact_turn(&self) -> Option<BigRational> {
        let BlockClass::Rotation { cos, upper } = self else {
            return None;
        };
        let base = if cos.is_zero() {
            rat(1, 4)
        } else if *cos == rat(1, 2) {
            rat(1, 6)
        } else if *cos == rat(-1, 2) {
            rat(1, 3)
        } else {
            return None;
        };
        Some(if *upper { BigRational::one() - base } else { base })
    }
}

/// Classifies a 2×2 symplectic matrix by trace and off-diagonal sign data.
pub fn classify_2x2(m: &Matrix) -> Result<BlockClass> {
    if m.dim() != 2 {
        return Err(Error::Dimension(format!("expected a 2x2 matrix, got {0}x{0}", m.dim())));
    }
    if !check_symplectic(m)? {
        return Err(Error::Validation("2x2 matrix is not symplectic (det != 1)".into()));
    }
    let tr = m.trace();
    let two = int(2);
    let b = m.get(0, 1);
    let c = m.get(1, 0);
    if tr.abs() < two {
        // c != 0 here, and its sign is the sign of sin θ
        return Ok(BlockClass::Rotation {
            cos: tr / &two,
            upper: c.is_negative(),
        });
    }
    if tr.abs() > two {
        return Ok(BlockClass::Hyperbolic);
    }
    let positive = tr.is_positive();
    // M = ±(I + N) with N nilpotent; the sign of b - c (for +M) picks the class
    let (b, c) = if positive { (b.clone(), c.clone()) } else { (-b, -c) };
    let is_identity = b.is_zero() && c.is_zero();
    let s = &b - &c;
    Ok(match (positive, is_identity, s.is_positive()) {
        (true, true, _) => BlockClass::I2,
        (true, false, true) => BlockClass::UnipotentPositive,
        (true, false, false) => BlockClass::UnipotentNegative,
        (false, true, _) => BlockClass::NegI2,
        // -M = N1(1, s) means M = N1(-1, -s)
        (false, false, true) => BlockClass::NegUnipotentNegative,
        (false, false, false) => BlockClass::NegUnipotentPositive,
    })
}

/// Literal normal-form blocks.
pub mod blocks {
    use super::*;

    /// `N1(λ, b) = [[λ, b], [0, λ]]`.
    pub fn n1(lambda: i64, b: i64) -> SymplecticMatrix {
        SymplecticMatrix(Matrix::from_ints(&[&[lambda, b], &[0, lambda]]).unwrap())
    }

    pub fn identity(dim: usize) -> SymplecticMatrix {
        SymplecticMatrix(Matrix::identity(dim))
    }

    pub fn neg_identity(dim: usize) -> SymplecticMatrix {
        SymplecticMatrix(Matrix::identity(dim).scale(&int(-1)))
    }

    /// Exact rational point `(cos θ, sin θ)` on the unit circle, within
    /// roughly 1e-15 of the true angle when no exact point exists.
    pub fn unit_circle_point(rho: &RotationNumber) -> (BigRational, BigRational) {
        if let Some(v) = rho.as_exact() {
            if *v == rat(1, 4) {
                return (int(0), int(1));
            }
            if *v == rat(3, 4) {
                return (int(0), int(-1));
            }
        }
        // rational parametrisation by tan(θ/2) or cot(θ/2), whichever is bounded
        let half = rho.angle() / 2.0;
        let (t, use_cot) = if half.tan().abs() <= 1.0 {
            (half.tan(), false)
        } else {
            (1.0 / half.tan(), true)
        };
        let t = BigRational::from_float(t).unwrap_or_else(BigRational::zero);
        let t2 = &t * &t;
        let denom = BigRational::one() + &t2;
        let two_t = &t * int(2) / &denom;
        if use_cot {
            ((&t2 - BigRational::one()) / &denom, two_t)
        } else {
            ((BigRational::one() - &t2) / &denom, two_t)
        }
    }

    fn rotation_matrix(rho: &RotationNumber) -> Matrix {
        let (c, s) = unit_circle_point(rho);
        Matrix::new(vec![vec![c.clone(), -s.clone()], vec![s, c]]).unwrap()
    }

    /// `R(θ)` for `θ = 2π ρ`.
    pub fn rotation(rho: &RotationNumber) -> SymplecticMatrix {
        SymplecticMatrix(rotation_matrix(rho))
    }

    /// `N2(ω, b) = [[R(θ), b], [0, R(θ)]]` with `b = ∓R(θ)`, which makes
    /// `(b2 - b3) sin θ` positive for the trivial form and negative for the
    /// non-trivial one.
    pub fn n2(rho: &RotationNumber, trivial: bool) -> SymplecticMatrix {
        let r = rotation_matrix(rho);
        let b = r.scale(&int(if trivial { -1 } else { 1 }));
        let mut m = Matrix::zeros(4);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, r.get(i, j).clone());
                m.set(2 + i, 2 + j, r.get(i, j).clone());
                m.set(i, 2 + j, b.get(i, j).clone());
            }
        }
        SymplecticMatrix(m)
    }

    /// `diag(λ, 1/λ)` blocks filling a hyperbolic part of dimension `dim`.
    pub fn hyperbolic(dim: usize) -> Option<SymplecticMatrix> {
        (0..dim / 2)
            .map(|i| {
                let lambda = int(i as i64 + 2);
                SymplecticMatrix(
                    Matrix::new(vec![
                        vec![lambda.clone(), int(0)],
                        vec![int(0), lambda.recip()],
                    ])
                    .unwrap(),
                )
            })
            .reduce(|a, b| a.diamond(&b))
    }

    /// Assembles the literal normal form a descriptor describes.
    pub fn direct_sum(d: &NormalFormDescriptor) -> Result<SymplecticMatrix> {
        d.validate()?;
        let mut parts: Vec<SymplecticMatrix> = Vec::new();
        parts.extend((0..d.p_minus).map(|_| n1(1, 1)));
        if d.p_zero > 0 {
            parts.push(identity(2 * d.p_zero as usize));
        }
        parts.extend((0..d.p_plus).map(|_| n1(1, -1)));
        parts.extend((0..d.q_minus).map(|_| n1(-1, 1)));
        if d.q_zero > 0 {
            parts.push(neg_identity(2 * d.q_zero as usize));
        }
        parts.extend((0..d.q_plus).map(|_| n1(-1, -1)));
        parts.extend(d.thetas.iter().map(rotation));
        parts.extend(d.alphas.iter().map(|a| n2(a, false)));
        parts.extend(d.betas.iter().map(|b| n2(b, true)));
        parts.extend(hyperbolic(d.hyperbolic_dim as usize));
        parts
            .into_iter()
            .reduce(|a, b| a.diamond(&b))
            .ok_or_else(|| Error::Validation("descriptor has no blocks".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::blocks::*;
    use super::*;

    #[test]
    fn symplectic_check_examples() {
        assert!(check_symplectic(&Matrix::identity(2)).unwrap());
        assert!(check_symplectic(&Matrix::from_ints(&[&[0, -1], &[1, 0]]).unwrap()).unwrap());
        assert!(!check_symplectic(&Matrix::from_ints(&[&[1, 0], &[0, 2]]).unwrap()).unwrap());
        let odd = Matrix::identity(3);
        assert!(matches!(check_symplectic(&odd), Err(Error::Dimension(_))));
    }

    #[test]
    fn classify_examples() {
        let quarter = classify_2x2(&Matrix::from_ints(&[&[0, -1], &[1, 0]]).unwrap()).unwrap();
        assert_eq!(quarter.exact_turn(), Some(rat(1, 4)));
        assert_eq!(
            classify_2x2(&Matrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap()).unwrap(),
            BlockClass::UnipotentPositive
        );
        let hyp = Matrix::new(vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        assert_eq!(classify_2x2(&hyp).unwrap(), BlockClass::Hyperbolic);
        assert!(matches!(
            classify_2x2(&Matrix::from_ints(&[&[1, 0], &[0, 2]]).unwrap()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn lower_triangular_unipotent_is_negative_class() {
        let m = Matrix::from_ints(&[&[1, 0], &[3, 1]]).unwrap();
        assert_eq!(classify_2x2(&m).unwrap(), BlockClass::UnipotentNegative);
        // -M = [[1, 0], [-3, 1]] ~ N1(1, 1), so M ~ N1(-1, -1)
        let m = Matrix::from_ints(&[&[-1, 0], &[3, -1]]).unwrap();
        assert_eq!(classify_2x2(&m).unwrap(), BlockClass::NegUnipotentNegative);
    }

    #[test]
    fn all_literal_blocks_are_symplectic() {
        let rho = RotationNumber::ratio(3, 5).unwrap();
        for m in [
            n1(1, 1),
            n1(1, -1),
            n1(-1, 1),
            n1(-1, -1),
            identity(2),
            neg_identity(2),
            rotation(&rho),
            n2(&rho, true),
            n2(&rho, false),
            hyperbolic(4).unwrap(),
        ] {
            assert!(check_symplectic(m.matrix()).unwrap(), "{}", m.matrix());
        }
    }

    #[test]
    fn n2_sign_rule() {
        for (p, q) in [(1, 5), (3, 5), (2, 7), (6, 7)] {
            let rho = RotationNumber::ratio(p, q).unwrap();
            for trivial in [true, false] {
                let m = n2(&rho, trivial);
                let m = m.matrix();
                let sign = (m.get(0, 3) - m.get(1, 2)) * m.get(1, 0);
                assert_eq!(sign.is_positive(), trivial);
            }
        }
    }

    #[test]
    fn diamond_of_rotations_places_blocks() {
        let r = rotation(&RotationNumber::ratio(1, 4).unwrap());
        let m = r.diamond(&hyperbolic(2).unwrap());
        assert_eq!(m.dim(), 4);
        assert!(check_symplectic(m.matrix()).unwrap());
        assert_eq!(*m.matrix().get(0, 2), int(-1));
        assert_eq!(*m.matrix().get(2, 0), int(1));
        assert_eq!(*m.matrix().get(1, 1), int(2));
        assert_eq!(*m.matrix().get(3, 3), rat(1, 2));
    }

    #[test]
    fn kernel_dimension_at_one_matches_block_counts() {
        let d = NormalFormDescriptor {
            p_minus: 1,
            p_zero: 1,
            p_plus: 2,
            q_zero: 1,
            thetas: vec![RotationNumber::ratio(1, 3).unwrap()],
            ..Default::default()
        };
        let m = direct_sum(&d).unwrap();
        assert_eq!(m.matrix().eigenvalue_one_nullity() as u32, d.eigenvalue_one_nullity());
    }
}
