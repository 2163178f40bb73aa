use std::fmt;

use crate::error::{Error, Result};
use crate::exactalg::Rational;

/// Coefficient ring for truncated formal power series.
///
/// `mul` is the ring product; for linear maps it is composition
/// `self ∘ other`.
pub trait Coeff: Clone + PartialEq {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Result<Self>;
    fn scale(&self, c: &Rational) -> Self;
    fn mul(&self, other: &Self) -> Result<Self>;
    fn invert(&self) -> Result<Self>;

    fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }
}

impl Coeff for Rational {
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        Ok(self + other)
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        Ok(self * other)
    }
    fn invert(&self) -> Result<Self> {
        self.recip().ok_or_else(|| Error::NotInvertible("zero rational".into()))
    }
}

/// Power series `c0 + c1 h + ... + cN h^N` truncated modulo `h^(N+1)`.
#[derive(Clone, PartialEq)]
pub struct HSeries<T: Coeff> {
    coeffs: Vec<T>,
}

impl<T: Coeff> HSeries<T> {
    /// Series with the given coefficients; `order = coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::TruncationMismatch("series needs at least one coefficient".into()));
        }
        Ok(HSeries { coeffs })
    }

    /// The constant series `c` at the given truncation order.
    pub fn constant(c: T, order: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![c];
        coeffs.resize(order + 1, z);
        HSeries { coeffs }
    }

    /// `c h^k` truncated at `order`.
    pub fn monomial(c: T, k: usize, order: usize) -> Self {
        let z = c.zero_like();
        let mut coeffs = vec![z; order + 1];
        if k <= order {
            coeffs[k] = c;
        }
        HSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Option<&T> {
        self.coeffs.get(k)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff_mut(&mut self, k: usize) -> Option<&mut T> {
        self.coeffs.get_mut(k)
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<T> = self.coeffs.iter().take(order + 1).cloned().collect();
        let z = coeffs[0].zero_like();
        coeffs.resize(order + 1, z);
        HSeries { coeffs }
    }

    fn check_order(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::TruncationMismatch(format!(
                "orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(HSeries { coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect() }
    }

    /// Multiply by `h^k`, dropping what falls past the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.coeffs.len();
        let z = self.coeffs[0].zero_like();
        let mut coeffs = vec![z; n];
        for i in 0..n.saturating_sub(k) {
            coeffs[i + k] = self.coeffs[i].clone();
        }
        HSeries { coeffs }
    }

    /// Cauchy product; for maps this is composition `self ∘ other`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_order(other)?;
        let n = self.coeffs.len();
        let mut coeffs: Vec<Option<T>> = vec![None; n];
        for i in 0..n {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..n - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let p = self.coeffs[i].mul(&other.coeffs[j])?;
                coeffs[i + j] = Some(match coeffs[i + j].take() {
                    Some(acc) => acc.add(&p)?,
                    None => p,
                });
            }
        }
        let zero = self.coeffs[0].mul(&other.coeffs[0])?.zero_like();
        Ok(HSeries { coeffs: coeffs.into_iter().map(|c| c.unwrap_or_else(|| zero.clone())).collect() })
    }

    /// Inverse through the constant term and the recursion
    /// `b_k = -b_0 Σ_{j≥1} a_j b_{k-j}`.
    pub fn invert(&self) -> Result<Self> {
        let b0 = self.coeffs[0].invert()?;
        let n = self.coeffs.len();
        let mut b: Vec<T> = vec![b0.clone()];
        for k in 1..n {
            let mut acc: Option<T> = None;
            for j in 1..=k {
                if self.coeffs[j].is_zero() || b[k - j].is_zero() {
                    continue;
                }
                let p = self.coeffs[j].mul(&b[k - j])?;
                acc = Some(match acc {
                    Some(a) => a.add(&p)?,
                    None => p,
                });
            }
            let bk = match acc {
                Some(a) => b0.mul(&a)?.neg(),
                None => b0.zero_like(),
            };
            b.push(bk);
        }
        Ok(HSeries { coeffs: b })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Lowest power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn map<U: Coeff>(&self, f: impl Fn(&T) -> U) -> HSeries<U> {
        HSeries { coeffs: self.coeffs.iter().map(f).collect() }
    }

    pub fn try_map<U: Coeff>(&self, f: impl Fn(&T) -> Result<U>) -> Result<HSeries<U>> {
        Ok(HSeries { coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()? })
    }
}

impl<T: Coeff> Coeff for HSeries<T> {
    fn zero_like(&self) -> Self {
        HSeries { coeffs: self.coeffs.iter().map(|c| c.zero_like()).collect() }
    }
    fn is_zero(&self) -> bool {
        HSeries::is_zero(self)
    }
    fn add(&self, other: &Self) -> Result<Self> {
        HSeries::add(self, other)
    }
    fn scale(&self, c: &Rational) -> Self {
        HSeries::scale(self, c)
    }
    fn mul(&self, other: &Self) -> Result<Self> {
        HSeries::mul(self, other)
    }
    fn invert(&self) -> Result<Self> {
        HSeries::invert(self)
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for HSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*h")?,
                _ => write!(f, "{c}*h^{k}")?,
            }
        }
        Ok(())
    }
}

impl<T: Coeff + fmt::Debug> fmt::Debug for HSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.coeffs).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn geometric_inverse() {
        let s = HSeries::from_coeffs(vec![q(1, 1), q(-1, 1), q(0, 1)]).unwrap();
        let inv = s.invert().unwrap();
        assert_eq!(inv.to_string(), "1 + 1*h + 1*h^2");
        let one = s.mul(&inv).unwrap();
        assert_eq!(one, HSeries::constant(q(1, 1), 2));
    }

    #[test]
    fn order_mismatch_is_rejected() {
        let a = HSeries::constant(q(1, 1), 2);
        let b = HSeries::constant(q(1, 1), 3);
        assert!(matches!(a.add(&b), Err(Error::TruncationMismatch(_))));
        assert!(matches!(a.mul(&b), Err(Error::TruncationMismatch(_))));
    }

    #[test]
    fn zero_constant_term_not_invertible() {
        let s = HSeries::monomial(q(1, 1), 1, 2);
        assert!(matches!(s.invert(), Err(Error::NotInvertible(_))));
    }

    #[test]
    fn shift_drops_overflow() {
        let s = HSeries::from_coeffs(vec![q(1, 1), q(2, 1), q(3, 1)]).unwrap();
        assert_eq!(s.shift(1).to_string(), "0 + 1*h + 2*h^2");
        assert_eq!(s.valuation(), Some(0));
        assert_eq!(s.shift(1).valuation(), Some(1));
    }
}
