use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// The six adjustment techniques for estimating the effect of X on Y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Technique {
    /// Y on X.
    SimpleRegression,
    /// Y on X and W, coefficient of X.
    MultipleRegression,
    /// Y on the residuals of X given W.
    ResidualX,
    /// Residuals of Y given W, on X.
    ResidualY,
    /// Residuals of Y given W, on the residuals of X given W.
    ResidualXY,
    /// Y on the fitted values of X given W.
    FittedX,
}

impl Technique {
    pub const ALL: [Technique; 6] = [
        Technique::SimpleRegression,
        Technique::MultipleRegression,
        Technique::ResidualX,
        Technique::ResidualY,
        Technique::ResidualXY,
        Technique::FittedX,
    ];

    /// The four techniques shown in the figures, in plotting order.
    pub const DISPLAYED: [Technique; 4] = [
        Technique::SimpleRegression,
        Technique::MultipleRegression,
        Technique::ResidualY,
        Technique::FittedX,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Technique::SimpleRegression => "SimpleRegression",
            Technique::MultipleRegression => "MultipleRegression",
            Technique::ResidualX => "ResidualX",
            Technique::ResidualY => "ResidualY",
            Technique::ResidualXY => "ResidualXY",
            Technique::FittedX => "FittedX",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Technique::SimpleRegression => "Simple Regression",
            Technique::MultipleRegression => "Multiple Regression",
            Technique::ResidualX => "Residual X",
            Technique::ResidualY => "Residual Y",
            Technique::ResidualXY => "Residual X and Y",
            Technique::FittedX => "Fitted X",
        }
    }
}

impl fmt::Display for Technique {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Technique {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| GraphError::UnknownName(s.to_string()))
    }
}
