use alloc::vec::Vec;

use super::StatsError;

/// Quantile by linear interpolation between order statistics at position
/// `(n - 1) * q`.
pub fn quantile(values: &[f64], q: f64) -> Result<f64, StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    quantile_sorted(&sorted, q)
}

/// [`quantile`] on input already sorted ascending.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> Result<f64, StatsError> {
    if sorted.is_empty() {
        return Err(StatsError::Empty);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(StatsError::InvalidLevel(q));
    }
    let pos = (sorted.len() - 1) as f64 * q;
    let lo = libm::floor(pos) as usize;
    let frac = pos - lo as f64;
    let below = sorted[lo];
    if frac == 0.0 || lo + 1 >= sorted.len() {
        return Ok(below);
    }
    let above = sorted[lo + 1];
    Ok((below + frac * (above - below)).clamp(below, above))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn odd_length_median() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.5).unwrap(), 3.0);
    }

    #[test]
    fn quartiles_and_iqr() {
        let v = [5.0, 4.0, 3.0, 2.0, 1.0];
        let q1 = quantile(&v, 0.25).unwrap();
        let q3 = quantile(&v, 0.75).unwrap();
        assert_eq!((q1, q3, q3 - q1), (2.0, 4.0, 2.0));
    }

    #[test]
    fn interpolates_between_order_statistics() {
        // index 2.25 -> 2 + 0.25 * (10 - 2)
        assert_eq!(quantile(&[1.0, 1.0, 2.0, 10.0], 0.75).unwrap(), 4.0);
    }

    #[test]
    fn errors() {
        assert_eq!(quantile(&[], 0.5), Err(StatsError::Empty));
        assert_eq!(quantile(&[1.0], 1.5), Err(StatsError::InvalidLevel(1.5)));
        assert_eq!(quantile(&[f64::NAN], 0.5), Err(StatsError::NonFinite));
    }

    proptest! {
        #[test]
        fn bounded_and_monotone(
            v in prop::collection::vec(-1e6f64..1e6, 1..60),
            a in 0.0f64..=1.0,
            b in 0.0f64..=1.0,
        ) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let min = v.iter().copied().fold(f64::INFINITY, f64::min);
            let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let ql = quantile(&v, lo).unwrap();
            let qh = quantile(&v, hi).unwrap();
            prop_assert!(min <= ql && qh <= max);
            prop_assert!(ql <= qh);
        }
    }
}
