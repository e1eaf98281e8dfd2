//! Closed-form welfare guarantees over parameter grids.

use serde::Serialize;

use crate::analysis::{welfare_lower_bound, StrategyCount};
use crate::error::Result;
use crate::numeric::{format_rational, int, phi_approx, rat, to_decimal, Extended, Num};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsRow {
    pub alpha: String,
    pub gamma: String,
    pub m: String,
    pub fraction: String,
    pub decimal: String,
    #[serde(skip)]
    pub value: Num,
}

/// Every combination, α outermost, then γ, then m.
pub fn bounds_table(
    alphas: &[Num],
    gammas: &[Extended],
    ms: &[StrategyCount],
) -> Result<Vec<BoundsRow>> {
    let mut rows = Vec::new();
    for alpha in alphas {
        for gamma in gammas {
            for &m in ms {
                let value = welfare_lower_bound(alpha, gamma, m)?;
                rows.push(BoundsRow {
                    alpha: format_rational(alpha),
                    gamma: gamma.to_string(),
                    m: m.to_string(),
                    fraction: format_rational(&value),
                    decimal: to_decimal(&value, 4),
                    value,
                });
            }
        }
    }
    Ok(rows)
}

/// α ∈ {2, 1618/1000}, γ ∈ {1, 2, 10}, m ∈ {4, ∞}.
pub fn standard_grid() -> Result<Vec<BoundsRow>> {
    bounds_table(
        &[int(2), phi_approx()],
        &[
            Extended::Finite(int(1)),
            Extended::Finite(int(2)),
            Extended::Finite(int(10)),
        ],
        &[StrategyCount::Finite(4), StrategyCount::Infinite],
    )
}

/// `steps + 1` evenly spaced values from 1618/1000 to 2.
pub fn alpha_sweep(steps: u32) -> Vec<Num> {
    let (lo, hi) = (phi_approx(), int(2));
    let steps = steps.max(1);
    (0..=steps)
        .map(|s| &lo + (&hi - &lo) * rat(s as i64, steps as i64))
        .collect()
}
