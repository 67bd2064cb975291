use super::result::{Participant, PayoutLine};
use crate::money::Money;

pub const CURRENCY_PLACES: u32 = 2;

/// Rounds every line total to cents (half-even) and assigns the residual
/// `round(Σ exact) - Σ rounded` to a single line so that the rounded sum is
/// exactly the rounded exact sum.
///
/// The residual goes to `preferred` when it names one of the lines;
/// otherwise to the line whose rounding moved it furthest away from the
/// residual's direction (largest remainder for a positive residual, smallest
/// for a negative one). Ties pick the last such line.
pub fn round_payouts(mut lines: Vec<PayoutLine>, preferred: Option<&Participant>) -> Vec<PayoutLine> {
    if lines.is_empty() {
        return lines;
    }
    let exact_sum: Money = lines.iter().map(|l| &l.total).sum();
    for line in &mut lines {
        line.rounded_total = line.total.round_half_even(CURRENCY_PLACES);
    }
    let rounded_sum: Money = lines.iter().map(|l| &l.rounded_total).sum();
    let residual = exact_sum.round_half_even(CURRENCY_PLACES) - rounded_sum;
    if residual.is_zero() {
        return lines;
    }

    let target = preferred
        .and_then(|p| lines.iter().position(|l| &l.participant == p))
        .unwrap_or_else(|| {
            let remainders = lines.iter().map(|l| &l.total - &l.rounded_total);
            let positive = residual.is_positive();
            let mut best: Option<(usize, Money)> = None;
            for (idx, rem) in remainders.enumerate() {
                let better = match &best {
                    None => true,
                    Some((_, current)) if positive => rem >= *current,
                    Some((_, current)) => rem <= *current,
                };
                if better {
                    best = Some((idx, rem));
                }
            }
            best.expect("non-empty lines").0
        });
    lines[target].rounded_total += residual;
    lines
}
