use super::StatsError;

/// Streaming central-moment accumulator (mean and M2..M4 sums).
///
/// Updates and merges use the pairwise formulas of Pébay so partial
/// accumulators from different workers combine without a second pass.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

/// Distribution shape: skewness `g1 = m3 / m2^1.5` and excess kurtosis
/// `g2 = m4 / m2^2 - 3`, with `m_k` the k-th central moment divided by n.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Shape {
    pub skewness: f64,
    pub kurtosis_excess: f64,
}

impl Moments {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.n as f64;
        self.n += 1;
        let n = self.n as f64;
        let delta = x - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2
            - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
    }

    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let na = self.n as f64;
        let nb = other.n as f64;
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let d3 = d2 * delta;
        let d4 = d2 * d2;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d3 * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self {
            n: self.n + other.n,
            mean: self.mean + delta * nb / n,
            m2,
            m3,
            m4,
        }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population variance (divide by n).
    pub fn variance(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.m2 / self.n as f64
        }
    }

    pub fn shape(&self) -> Result<Shape, StatsError> {
        self.shape_about(0.0)
    }

    /// Shape of an accumulator that was fed `x - origin`. The origin only
    /// enters the zero-variance test, which is relative to the data's magnitude.
    fn shape_about(&self, origin: f64) -> Result<Shape, StatsError> {
        if self.n < 2 {
            return Err(StatsError::TooFewSamples {
                needed: 2,
                found: self.n as usize,
            });
        }
        let n = self.n as f64;
        let m2 = self.m2 / n;
        let scale = f64::EPSILON * (self.mean + origin);
        // Relative to the mean's magnitude this is rounding noise, not spread.
        if !(m2 > 0.0) || m2 <= scale * scale {
            return Err(StatsError::ZeroVariance);
        }
        let m3 = self.m3 / n;
        let m4 = self.m4 / n;
        Ok(Shape {
            skewness: m3 / (m2 * libm::sqrt(m2)),
            kurtosis_excess: m4 / (m2 * m2) - 3.0,
        })
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::new();
        for x in iter {
            m.push(x);
        }
        m
    }
}

/// Neumaier-compensated mean.
fn compensated_mean(values: &[f64]) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for &x in values {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    (s + c) / values.len() as f64
}

/// Population skewness and excess kurtosis of `values`.
///
/// Values are centered on their compensated mean before accumulation, so a
/// large common offset does not cost precision.
pub fn skewness_kurtosis(values: &[f64]) -> Result<Shape, StatsError> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    if values.is_empty() {
        return Moments::new().shape();
    }
    let origin = compensated_mean(values);
    values.iter().map(|x| x - origin).collect::<Moments>().shape_about(origin)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Uniform};

    #[test]
    fn symmetric_three_points() {
        // m2 = 2/3, m3 = 0, m4 = 2/3 -> g2 = (2/3)/(4/9) - 3 = -1.5
        let s = skewness_kurtosis(&[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.skewness, 0.0);
        assert!((s.kurtosis_excess + 1.5).abs() < 1e-12);
    }

    #[test]
    fn constant_is_degenerate() {
        assert_eq!(skewness_kurtosis(&[5.0, 5.0, 5.0]), Err(StatsError::ZeroVariance));
        assert!(matches!(
            skewness_kurtosis(&[1.0]),
            Err(StatsError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn uniform_excess_kurtosis() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let dist = Uniform::new(0.0, 1.0).unwrap();
        let v: Vec<f64> = (0..100_000).map(|_| dist.sample(&mut rng)).collect();
        let s = skewness_kurtosis(&v).unwrap();
        assert!((s.kurtosis_excess + 1.2).abs() < 0.05, "{s:?}");
        assert!(s.skewness.abs() < 0.05);
    }

    proptest! {
        #[test]
        fn merge_matches_single_pass(
            v in prop::collection::vec(-1e3f64..1e3, 4..80),
            split in 0usize..80,
        ) {
            let split = split.min(v.len());
            let whole: Moments = v.iter().copied().collect();
            let a: Moments = v[..split].iter().copied().collect();
            let b: Moments = v[split..].iter().copied().collect();
            let merged = a.merge(&b);
            prop_assert_eq!(merged.count(), whole.count());
            let scale = whole.m2.abs().max(1.0);
            prop_assert!((merged.m2 - whole.m2).abs() <= 1e-9 * scale);
            if let (Ok(x), Ok(y)) = (whole.shape(), merged.shape()) {
                prop_assert!((x.skewness - y.skewness).abs() < 1e-6);
                prop_assert!((x.kurtosis_excess - y.kurtosis_excess).abs() < 1e-6);
            }
        }

        #[test]
        fn shape_invariant_under_positive_affine_maps(
            v in prop::collection::vec(-100f64..100.0, 5..60),
            scale in 0.01f64..100.0,
            shift in -1e3f64..1e3,
        ) {
            let Ok(base) = skewness_kurtosis(&v) else { return Ok(()); };
            let mapped: Vec<f64> = v.iter().map(|x| x * scale + shift).collect();
            let m = skewness_kurtosis(&mapped).unwrap();
            prop_assert!((m.skewness - base.skewness).abs() < 1e-6 * base.skewness.abs().max(1.0));
            prop_assert!((m.kurtosis_excess - base.kurtosis_excess).abs() < 1e-6 * base.kurtosis_excess.abs().max(1.0));
        }
    }
}
