//! Admissible task losses of the form l(y, alpha) = g(|y - pred(alpha)|)
//! with g nondecreasing and g(0) = 0.

use super::DecisionVector;
use crate::error::{Error, Result};

/// Marker for a user-supplied gap function; the increments are extracted at
/// construction, so only the name needs to be kept.
#[derive(Debug, Clone)]
pub struct CustomG {
    name: &'static str,
}

#[derive(Debug, Clone)]
enum LossKind {
    Absolute,
    ZeroOne,
    SquaredError,
    Custom(CustomG),
}

/// An admissible loss together with its class count and the derived
/// increment coefficients c_i = g(i) - g(i-1).
///
/// Admissibility (all c_i >= 0) is checked at construction, so every value
/// of this type is valid.
#[derive(Debug, Clone)]
pub struct AdmissibleLoss {
    kind: LossKind,
    k: usize,
    coeffs: Vec<f64>,
}

impl AdmissibleLoss {
    /// g(t) = t, the absolute error. All increments are 1.
    pub fn absolute(k: usize) -> Result<Self> {
        Self::build(LossKind::Absolute, k, |i| i as f64)
    }

    /// g(0) = 0, g(t) = 1 otherwise: the classification error.
    pub fn zero_one(k: usize) -> Result<Self> {
        Self::build(LossKind::ZeroOne, k, |i| if i == 0 { 0.0 } else { 1.0 })
    }

    /// g(t) = t^2. Increments are the odd numbers 2i - 1.
    pub fn squared_error(k: usize) -> Result<Self> {
        Self::build(LossKind::SquaredError, k, |i| (i * i) as f64)
    }

    /// An arbitrary nondecreasing g with g(0) = 0.
    pub fn custom(name: &'static str, g: impl Fn(usize) -> f64, k: usize) -> Result<Self> {
        Self::build(LossKind::Custom(CustomG { name }), k, g)
    }

    fn build(kind: LossKind, k: usize, g: impl Fn(usize) -> f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::BadClassCount { k });
        }
        let origin = g(0);
        if origin != 0.0 {
            return Err(Error::NonzeroOrigin { value: origin });
        }
        let mut coeffs = Vec::with_capacity(k - 1);
        for i in 1..k {
            let c = g(i) - g(i - 1);
            if !c.is_finite() || c < 0.0 {
                return Err(Error::NotAdmissible { index: i, value: c });
            }
            coeffs.push(c);
        }
        Ok(Self { kind, k, coeffs })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn name(&self) -> &'static str {
        match &self.kind {
            LossKind::Absolute => "absolute",
            LossKind::ZeroOne => "zero_one",
            LossKind::SquaredError => "squared_error",
            LossKind::Custom(c) => c.name,
        }
    }

    /// The increments (c_1, ..., c_{k-1}).
    pub fn cost_coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// g reconstructed as the prefix sum of the increments.
    pub fn g(&self, gap: usize) -> f64 {
        debug_assert!(gap < self.k);
        self.coeffs[..gap].iter().sum()
    }

    /// l(y, alpha) = g(|y - pred(alpha)|).
    pub fn eval(&self, y: usize, alpha: &DecisionVector) -> Result<f64> {
        self.check_args(y, alpha)?;
        let r = alpha.pred();
        Ok(self.g(y.abs_diff(r)))
    }

    /// The same loss through the increment expansion
    /// `sum_{i<y} c_{y-i} [alpha_i >= 0] + sum_{i>=y} c_{i-y+1} [alpha_i < 0]`.
    ///
    /// The selected increments are accumulated in ascending coefficient
    /// order so the sum is bitwise identical to [`AdmissibleLoss::eval`].
    pub fn eval_via_coeffs(&self, y: usize, alpha: &DecisionVector) -> Result<f64> {
        self.check_args(y, alpha)?;
        let a = alpha.values();
        let mut total = 0.0;
        // i = y-1 down to 1 walks c_1, c_2, ... upward
        for i in (1..y).rev() {
            if a[i - 1] >= 0.0 {
                total += self.coeffs[y - i - 1];
            }
        }
        for i in y..self.k {
            if a[i - 1] < 0.0 {
                total += self.coeffs[i - y];
            }
        }
        Ok(total)
    }

    fn check_args(&self, y: usize, alpha: &DecisionVector) -> Result<()> {
        if y < 1 || y > self.k {
            return Err(Error::LabelOutOfRange { label: y, k: self.k });
        }
        if alpha.k() != self.k {
            return Err(Error::DimensionMismatch {
                context: "loss_eval",
                expected: self.k - 1,
                actual: alpha.k() - 1,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dv(values: &[f64]) -> DecisionVector {
        DecisionVector::new(values.to_vec()).unwrap()
    }

    #[test]
    fn coefficients_of_the_builtin_losses() {
        assert_eq!(
            AdmissibleLoss::absolute(4).unwrap().cost_coeffs(),
            &[1.0, 1.0, 1.0]
        );
        assert_eq!(
            AdmissibleLoss::squared_error(4).unwrap().cost_coeffs(),
            &[1.0, 3.0, 5.0]
        );
        assert_eq!(
            AdmissibleLoss::zero_one(3).unwrap().cost_coeffs(),
            &[1.0, 0.0]
        );
    }

    #[test]
    fn prefix_sums_reconstruct_g() {
        let sq = AdmissibleLoss::squared_error(6).unwrap();
        for i in 0..6 {
            assert_eq!(sq.g(i), (i * i) as f64);
        }
        let zo = AdmissibleLoss::zero_one(6).unwrap();
        assert_eq!(zo.g(0), 0.0);
        for i in 1..6 {
            assert_eq!(zo.g(i), 1.0);
        }
    }

    #[test]
    fn rejects_decreasing_g() {
        let err = AdmissibleLoss::custom("bad", |i| -(i as f64), 4).unwrap_err();
        assert!(matches!(err, Error::NotAdmissible { index: 1, .. }));
        assert!(matches!(
            AdmissibleLoss::custom("offset", |i| i as f64 + 1.0, 4),
            Err(Error::NonzeroOrigin { .. })
        ));
    }

    #[test]
    fn eval_examples() {
        let alpha = dv(&[-1.0, -0.5, 2.0]); // pred = 3
        let abs = AdmissibleLoss::absolute(4).unwrap();
        assert_eq!(abs.eval(3, &alpha).unwrap(), 0.0);
        assert_eq!(abs.eval(1, &alpha).unwrap(), 2.0);
        let sq = AdmissibleLoss::squared_error(4).unwrap();
        assert_eq!(sq.eval(1, &alpha).unwrap(), 4.0);
    }

    #[test]
    fn eval_routes_agree_exactly() {
        let alpha = dv(&[-1.0, -0.5, 0.0, 2.0]);
        for loss in [
            AdmissibleLoss::absolute(5).unwrap(),
            AdmissibleLoss::zero_one(5).unwrap(),
            AdmissibleLoss::squared_error(5).unwrap(),
        ] {
            for y in 1..=5 {
                assert_eq!(
                    loss.eval(y, &alpha).unwrap(),
                    loss.eval_via_coeffs(y, &alpha).unwrap(),
                    "{} y={}",
                    loss.name(),
                    y
                );
            }
        }
    }

    #[test]
    fn label_out_of_range() {
        let abs = AdmissibleLoss::absolute(3).unwrap();
        let alpha = dv(&[0.0, 1.0]);
        assert!(matches!(
            abs.eval(0, &alpha),
            Err(Error::LabelOutOfRange { label: 0, k: 3 })
        ));
        assert!(matches!(
            abs.eval(4, &alpha),
            Err(Error::LabelOutOfRange { label: 4, k: 3 })
        ));
    }
}
