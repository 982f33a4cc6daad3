//! Spectra of rational matrices.
//!
//! The characteristic polynomial is computed exactly and split into
//! square-free factors over Q, so every repeated eigenvalue (including the
//! defective ones of Jordan-type blocks) is found with its exact multiplicity.
//! Only the simple roots of each factor are located in floating point.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::descriptor::NormalFormDescriptor;
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::interval::int;

/// Polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(BigRational::zero());
        }
        Poly(coeffs)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.0.len() == 1 && self.0[0].is_zero()
    }

    fn lead(&self) -> &BigRational {
        self.0.last().unwrap()
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.lead().clone();
        Poly::new(self.0.iter().map(|c| c / &lead).collect())
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Quotient and remainder of polynomial division.
    pub fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let mut rem = self.0.clone();
        let d = divisor.degree();
        if self.degree() < d || self.is_zero() {
            return (Poly::new(vec![]), self.clone());
        }
        let mut quot = vec![BigRational::zero(); self.degree() - d + 1];
        let lead = divisor.lead();
        for k in (0..quot.len()).rev() {
            let f = &rem[k + d] / lead;
            if !f.is_zero() {
                for (i, c) in divisor.0.iter().enumerate() {
                    let v = &rem[k + i] - &f * c;
                    rem[k + i] = v;
                }
            }
            quot[k] = f;
        }
        rem.truncate(d.max(1));
        (Poly::new(quot), Poly::new(rem))
    }

    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn eval(&self, z: Complex64) -> Complex64 {
        let c = self.f64_coeffs();
        horner(&c, z)
    }

    fn f64_coeffs(&self) -> Vec<f64> {
        self.0.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

fn horner(c: &[f64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::zero(), |acc, &a| acc * z + a)
}

/// Exact characteristic polynomial `det(x I - M)` by Faddeev–LeVerrier.
pub fn char_poly(m: &Matrix) -> Poly {
    let n = m.dim();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let mut mk = Matrix::zeros(n);
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = m.mul(&mk);
        for i in 0..n {
            let v = next.get(i, i) + &coeffs[n - k + 1];
            next.set(i, i, v);
        }
        let c = -(m.mul(&next).trace()) / int(k as i64);
        coeffs[n - k] = c;
        mk = next;
    }
    Poly::new(coeffs)
}

/// Yun's square-free factorisation: pairs `(factor, multiplicity)` with
/// monic, pairwise coprime, square-free factors.
pub fn squarefree_factors(p: &Poly) -> Vec<(Poly, usize)> {
    let p = p.monic();
    if p.degree() == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let dp = p.derivative();
    let mut a = p.gcd(&dp);
    let mut b = p.div_rem(&a).0;
    let mut c = dp.div_rem(&a).0;
    let mut d = c_minus_db(&c, &b);
    let mut i = 1;
    loop {
        a = b.gcd(&d);
        b = b.div_rem(&a).0;
        c = d.div_rem(&a).0;
        if a.degree() > 0 {
            out.push((a.monic(), i));
        }
        i += 1;
        if b.degree() == 0 {
            break;
        }
        d = c_minus_db(&c, &b);
    }
    out
}

fn c_minus_db(c: &Poly, b: &Poly) -> Poly {
    let db = b.derivative();
    let len = c.0.len().max(db.0.len());
    Poly::new(
        (0..len)
            .map(|i| {
                let x = c.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                let y = db.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect(),
    )
}

/// Roots of a square-free polynomial by the Aberth–Ehrlich iteration.
pub fn simple_roots(p: &Poly) -> Vec<Complex64> {
    let p = p.monic();
    let n = p.degree();
    if n == 0 {
        return vec![];
    }
    let c = p.f64_coeffs();
    let dc: Vec<f64> = p.derivative().f64_coeffs();
    let radius = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            Complex64::from_polar(radius.min(2.0), angle)
        })
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for k in 0..n {
            let pz = horner(&c, z[k]);
            let dpz = horner(&dc, z[k]);
            if pz.norm() == 0.0 {
                continue;
            }
            let ratio = pz / dpz;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| Complex64::one() / (z[k] - z[j]))
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if step.is_finite() {
                z[k] -= step;
                moved = moved.max(step.norm());
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    // Newton polish on the exact-coefficient polynomial
    for zk in z.iter_mut() {
        for _ in 0..3 {
            let dpz = horner(&dc, *zk);
            if dpz.norm() == 0.0 {
                break;
            }
            let step = p.eval(*zk) / dpz;
            if step.is_finite() {
                *zk -= step;
            }
        }
    }
    z
}

/// All eigenvalues of `m` with algebraic multiplicity.
pub fn eigenvalues(m: &Matrix) -> Vec<Complex64> {
    squarefree_factors(&char_poly(m))
        .into_iter()
        .flat_map(|(f, mult)| {
            simple_roots(&f)
                .into_iter()
                .flat_map(move |z| std::iter::repeat(z).take(mult))
        })
        .collect()
}

/// Unit-circle eigenvalues implied by a descriptor.
pub fn expected_unit_circle_spectrum(d: &NormalFormDescriptor) -> Vec<Complex64> {
    let mut out = Vec::new();
    let one = Complex64::new(1.0, 0.0);
    out.extend(std::iter::repeat(one).take(2 * (d.p_minus + d.p_zero + d.p_plus) as usize));
    out.extend(std::iter::repeat(-one).take(2 * (d.q_minus + d.q_zero + d.q_plus) as usize));
    for t in &d.thetas {
        let w = Complex64::from_polar(1.0, t.angle());
        out.extend([w, w.conj()]);
    }
    for a in d.alphas.iter().chain(&d.betas) {
        let w = Complex64::from_polar(1.0, a.angle());
        out.extend([w, w.conj(), w, w.conj()]);
    }
    out
}

/// True iff the unit-circle eigenvalues of `m` match those implied by `d`
/// within `tol`. Does not distinguish trivial from non-trivial `N2` forms.
pub fn descriptor_consistent(m: &Matrix, d: &NormalFormDescriptor, tol: f64) -> Result<bool> {
    if m.dim() != d.dim() as usize {
        return Err(Error::Dimension(format!(
            "matrix is {0}x{0} but the descriptor has dimension {1}",
            m.dim(),
            d.dim()
        )));
    }
    let on_circle: Vec<Complex64> = eigenvalues(m)
        .into_iter()
        .filter(|z| (z.norm() - 1.0).abs() <= tol)
        .collect();
    let mut expected = expected_unit_circle_spectrum(d);
    if on_circle.len() != expected.len() {
        return Ok(false);
    }
    for z in on_circle {
        let Some(pos) = expected.iter().position(|w| (z - w).norm() <= tol) else {
            return Ok(false);
        };
        expected.swap_remove(pos);
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::super::matrix::blocks;
    use super::super::rotation::RotationNumber;
    use super::*;
    use crate::interval::rat;

    #[test]
    fn char_poly_of_rotation_and_hyperbolic() {
        let r = Matrix::from_ints(&[&[0, -1], &[1, 0]]).unwrap();
        assert_eq!(char_poly(&r), Poly::new(vec![int(1), int(0), int(1)]));
        let h = Matrix::new(vec![vec![int(2), int(0)], vec![int(0), rat(1, 2)]]).unwrap();
        assert_eq!(char_poly(&h), Poly::new(vec![int(1), rat(-5, 2), int(1)]));
    }

    #[test]
    fn squarefree_split_of_jordan_block() {
        let n1 = Matrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap();
        let f = squarefree_factors(&char_poly(&n1));
        assert_eq!(f, vec![(Poly::new(vec![int(-1), int(1)]), 2)]);
    }

    #[test]
    fn descriptor_consistency_examples() {
        let quarter = RotationNumber::ratio(1, 4).unwrap();
        let r = Matrix::from_ints(&[&[0, -1], &[1, 0]]).unwrap();
        let rot = NormalFormDescriptor::rotations(vec![quarter], 0);
        let hyp = NormalFormDescriptor::hyperbolic(2);
        assert!(descriptor_consistent(&r, &rot, 1e-9).unwrap());
        let h = blocks::hyperbolic(2).unwrap();
        assert!(descriptor_consistent(h.matrix(), &hyp, 1e-9).unwrap());
        assert!(!descriptor_consistent(&r, &hyp, 1e-9).unwrap());
        assert!(matches!(
            descriptor_consistent(&Matrix::identity(4), &hyp, 1e-9),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn wrong_angle_is_inconsistent() {
        let m = blocks::rotation(&RotationNumber::ratio(1, 3).unwrap());
        let d = NormalFormDescriptor::rotations(vec![RotationNumber::ratio(2, 5).unwrap()], 0);
        assert!(!descriptor_consistent(m.matrix(), &d, 1e-9).unwrap());
        // R(θ) and R(2π-θ) share a spectrum
        let d = NormalFormDescriptor::rotations(vec![RotationNumber::ratio(2, 3).unwrap()], 0);
        assert!(descriptor_consistent(m.matrix(), &d, 1e-9).unwrap());
    }
}
