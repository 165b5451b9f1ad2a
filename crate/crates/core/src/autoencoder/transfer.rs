use std::fmt;
use std::str::FromStr;

use ndarray::{Array, Dimension};
use serde::{Deserialize, Serialize};

/// Elementwise transfer function of an encoder or decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransferKind {
    /// Logistic sigmoid, `1 / (1 + exp(-z))`.
    Logsig,
    /// Saturating linear, `clamp(z, 0, 1)`.
    Satlin,
    /// Identity.
    Purelin,
}

impl TransferKind {
    #[inline]
    pub fn apply_scalar(self, z: f64) -> f64 {
        match self {
            TransferKind::Logsig => 1.0 / (1.0 + (-z).exp()),
            TransferKind::Satlin => z.clamp(0.0, 1.0),
            TransferKind::Purelin => z,
        }
    }

    /// Derivative at `z`. Satlin uses 0 at its kinks.
    #[inline]
    pub fn derivative_scalar(self, z: f64) -> f64 {
        match self {
            TransferKind::Logsig => {
                let s = 1.0 / (1.0 + (-z).exp());
                s * (1.0 - s)
            }
            TransferKind::Satlin => {
                if z > 0.0 && z < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            TransferKind::Purelin => 1.0,
        }
    }

    pub fn apply<D: Dimension>(self, z: &Array<f64, D>) -> Array<f64, D> {
        z.mapv(|v| self.apply_scalar(v))
    }

    pub fn derivative<D: Dimension>(self, z: &Array<f64, D>) -> Array<f64, D> {
        z.mapv(|v| self.derivative_scalar(v))
    }

    pub(crate) fn code(self) -> &'static str {
        match self {
            TransferKind::Logsig => "logsig",
            TransferKind::Satlin => "satlin",
            TransferKind::Purelin => "purelin",
        }
    }
}

impl fmt::Display for TransferKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TransferKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "logsig" => Ok(TransferKind::Logsig),
            "satlin" => Ok(TransferKind::Satlin),
            "purelin" => Ok(TransferKind::Purelin),
            other => Err(format!("unknown transfer function {other:?}")),
        }
    }
}

/// Applies `kind` componentwise to `z`.
pub fn transfer_apply(kind: TransferKind, z: &[f64]) -> Vec<f64> {
    z.iter().map(|&v| kind.apply_scalar(v)).collect()
}

/// Componentwise derivative of `kind` at `z`.
pub fn transfer_derivative(kind: TransferKind, z: &[f64]) -> Vec<f64> {
    z.iter().map(|&v| kind.derivative_scalar(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn apply_examples() {
        assert_eq!(transfer_apply(TransferKind::Logsig, &[0.0]), [0.5]);
        assert_eq!(transfer_apply(TransferKind::Satlin, &[-1.0, 0.3, 2.0]), [0.0, 0.3, 1.0]);
        assert_eq!(transfer_apply(TransferKind::Purelin, &[4.0, -4.0]), [4.0, -4.0]);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(transfer_derivative(TransferKind::Logsig, &[0.0]), [0.25]);
        assert_eq!(transfer_derivative(TransferKind::Satlin, &[0.5, 2.0, 0.0, 1.0]), [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(transfer_derivative(TransferKind::Purelin, &[-3.0]), [1.0]);
    }

    proptest! {
        #[test]
        fn ranges(z in -30.0f64..30.0) {
            let s = TransferKind::Logsig.apply_scalar(z);
            prop_assert!(s > 0.0 && s < 1.0);
            let c = TransferKind::Satlin.apply_scalar(z);
            prop_assert!((0.0..=1.0).contains(&c));
            prop_assert_eq!(TransferKind::Purelin.apply_scalar(z), z);
        }

        #[test]
        fn logsig_derivative_matches_difference_quotient(z in -10.0f64..10.0) {
            let h = 1e-6;
            let k = TransferKind::Logsig;
            let fd = (k.apply_scalar(z + h) - k.apply_scalar(z - h)) / (2.0 * h);
            prop_assert!((fd - k.derivative_scalar(z)).abs() < 1e-9);
        }
    }
}
