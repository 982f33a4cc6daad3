use num_bigint::BigInt;

use super::rotation::RotationNumber;
use crate::error::{Error, Result};

/// Block counts and angles of the basic normal form of a symplectic matrix:
///
/// `N1(1,1)^p- ⋄ I_2p0 ⋄ N1(1,-1)^p+ ⋄ N1(-1,1)^q- ⋄ -I_2q0 ⋄ N1(-1,-1)^q+
///  ⋄ R(θ_1..θ_r) ⋄ N2(α_1..α_r*) ⋄ N2(β_1..β_r0) ⋄ M0`
///
/// with the `N2(α)` blocks non-trivial, the `N2(β)` blocks trivial and `M0`
/// hyperbolic of dimension `hyperbolic_dim`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct NormalFormDescriptor {
    pub p_minus: u32,
    pub p_zero: u32,
    pub p_plus: u32,
    pub q_minus: u32,
    pub q_zero: u32,
    pub q_plus: u32,
    pub thetas: Vec<RotationNumber>,
    pub alphas: Vec<RotationNumber>,
    pub betas: Vec<RotationNumber>,
    pub hyperbolic_dim: u32,
}

impl NormalFormDescriptor {
    pub fn hyperbolic(dim: u32) -> Self {
        NormalFormDescriptor {
            hyperbolic_dim: dim,
            ..Default::default()
        }
    }

    pub fn rotations(thetas: Vec<RotationNumber>, hyperbolic_dim: u32) -> Self {
        NormalFormDescriptor {
            thetas,
            hyperbolic_dim,
            ..Default::default()
        }
    }

    /// `r`
    pub fn r(&self) -> u32 {
        self.thetas.len() as u32
    }

    /// `r_*`
    pub fn r_star(&self) -> u32 {
        self.alphas.len() as u32
    }

    /// `r_0`
    pub fn r_zero(&self) -> u32 {
        self.betas.len() as u32
    }

    /// Total algebraic multiplicity of eigenvalues on the unit circle.
    pub fn elliptic_height(&self) -> u32 {
        2 * (self.p_minus + self.p_zero + self.p_plus)
            + 2 * (self.q_minus + self.q_zero + self.q_plus)
            + 2 * self.r()
            + 4 * self.r_star()
            + 4 * self.r_zero()
    }

    /// Ambient dimension `2k` of the matrix the descriptor describes.
    pub fn dim(&self) -> u32 {
        self.elliptic_height() + self.hyperbolic_dim
    }

    /// Kernel dimension of `P - I`: one per `N1(1,±1)`, two per `I_2`.
    pub fn eigenvalue_one_nullity(&self) -> u32 {
        self.p_minus + 2 * self.p_zero + self.p_plus
    }

    /// No eigenvalue `±1` blocks. Required for every iterate to be
    /// non-degenerate.
    pub fn is_free_of_real_unit_blocks(&self) -> bool {
        self.p_minus == 0
            && self.p_zero == 0
            && self.p_plus == 0
            && self.q_minus == 0
            && self.q_zero == 0
            && self.q_plus == 0
    }

    pub fn all_rotation_numbers(&self) -> impl Iterator<Item = &RotationNumber> {
        self.thetas.iter().chain(&self.alphas).chain(&self.betas)
    }

    /// Number of blocks whose symplectic-path index is odd, giving the
    /// parity of the initial index when there is no hyperbolic part.
    pub fn odd_block_count(&self) -> u32 {
        self.p_minus + self.p_zero + self.q_minus + self.q_zero + self.q_plus + self.r()
    }

    /// Denominators of `2ρ` over all exact rotation numbers.
    pub fn double_turn_denominators(&self) -> Vec<BigInt> {
        self.all_rotation_numbers()
            .filter_map(|r| r.as_exact())
            .map(|v| (v * BigInt::from(2)).denom().clone())
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.hyperbolic_dim % 2 != 0 {
            return Err(Error::Validation(format!(
                "hyperbolic_dim must be even, got {}",
                self.hyperbolic_dim
            )));
        }
        for r in self.all_rotation_numbers() {
            r.validate()?;
        }
        if self.dim() == 0 {
            return Err(Error::Validation("descriptor describes an empty matrix".into()));
        }
        Ok(())
    }

    pub fn validate_for_ambient(&self, ambient: u32) -> Result<()> {
        self.validate()?;
        if self.dim() != ambient {
            return Err(Error::Dimension(format!(
                "descriptor blocks sum to dimension {} but the ambient dimension is {ambient}",
                self.dim()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quarter() -> RotationNumber {
        RotationNumber::ratio(1, 4).unwrap()
    }

    #[test]
    fn elliptic_height_examples() {
        assert_eq!(NormalFormDescriptor::hyperbolic(2).elliptic_height(), 0);
        let one_rotation = NormalFormDescriptor::rotations(vec![quarter()], 0);
        assert_eq!(one_rotation.elliptic_height(), 2);
        assert_eq!(one_rotation.dim(), 2);
        let s3 = NormalFormDescriptor::rotations(vec![quarter()], 2);
        assert_eq!(s3.elliptic_height(), 2);
        assert_eq!(s3.dim(), 4);
    }

    #[test]
    fn height_plus_hyperbolic_is_ambient() {
        let d = NormalFormDescriptor {
            p_plus: 1,
            q_zero: 2,
            alphas: vec![quarter()],
            betas: vec![quarter()],
            thetas: vec![quarter(), quarter()],
            hyperbolic_dim: 4,
            ..Default::default()
        };
        assert_eq!(d.elliptic_height() + d.hyperbolic_dim, 2 + 4 + 4 + 4 + 4 + 4);
        assert!(d.validate_for_ambient(22).is_ok());
        assert!(matches!(d.validate_for_ambient(20), Err(Error::Dimension(_))));
    }

    #[test]
    fn odd_hyperbolic_dim_rejected() {
        assert!(NormalFormDescriptor::hyperbolic(3).validate().is_err());
    }

    #[test]
    fn double_turn_denominators() {
        let d = NormalFormDescriptor::rotations(
            vec![RotationNumber::ratio(3, 5).unwrap(), RotationNumber::ratio(1, 4).unwrap()],
            0,
        );
        assert_eq!(d.double_turn_denominators(), vec![BigInt::from(5), BigInt::from(2)]);
    }
}
