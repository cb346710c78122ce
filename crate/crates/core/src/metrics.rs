//! Quality metrics for hash outputs: bucket histograms, collision rate,
//! chi-squared uniformity and avalanche.

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitString;
use crate::hash::{hash, hash_batch, HashConfig, HashError, HashValue};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("hash of length {found} does not match {expected} qubits")]
    LengthMismatch { expected: usize, found: usize },
    #[error("histogram is empty")]
    EmptyHistogram,
    #[error("no inputs given")]
    EmptyInputs,
    #[error("inputs must share one length; saw {0} and {1}")]
    UnequalInputs(usize, usize),
    #[error("batch size {size} is invalid for {width}-bit inputs")]
    InvalidBatchSize { size: usize, width: usize },
    #[error(transparent)]
    Hash(#[from] HashError),
}

/// One counter per possible hash value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BucketHistogram {
    pub n_qubits: usize,
    pub counts: Vec<u64>,
    pub total: u64,
}

impl BucketHistogram {
    pub fn from_counts(n_qubits: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), 1 << n_qubits, "one count per bucket");
        let total = counts.iter().sum();
        Self { n_qubits, counts, total }
    }

    pub fn buckets(&self) -> usize {
        self.counts.len()
    }

    pub fn occupied(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub histogram: BucketHistogram,
    pub collision_rate: f64,
    pub chi_squared: f64,
    pub p_value: f64,
    pub avalanche_mean: Option<f64>,
}

impl MetricsReport {
    pub fn from_histogram(histogram: BucketHistogram, avalanche_mean: Option<f64>) -> Result<Self, MetricsError> {
        let collision_rate = collision_rate(&histogram)?;
        let (chi_squared, p_value) = chi_squared_p(&histogram)?;
        Ok(Self { histogram, collision_rate, chi_squared, p_value, avalanche_mean })
    }
}

pub fn bucket_histogram(hashes: &[HashValue], n_qubits: usize) -> Result<BucketHistogram, MetricsError> {
    let mut counts = vec![0u64; 1 << n_qubits];
    for h in hashes {
        if h.len() != n_qubits {
            return Err(MetricsError::LengthMismatch { expected: n_qubits, found: h.len() });
        }
        counts[h.index()] += 1;
    }
    Ok(BucketHistogram { n_qubits, counts, total: hashes.len() as u64 })
}

/// (mean bucket count + population stdev of bucket counts) / 2^n, taken over
/// all buckets including empty ones.
pub fn collision_rate(h: &BucketHistogram) -> Result<f64, MetricsError> {
    if h.total == 0 {
        return Err(MetricsError::EmptyHistogram);
    }
    let buckets = h.buckets() as f64;
    let mean = h.total as f64 / buckets;
    let var = h.counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / buckets;
    Ok((mean + var.sqrt()) / buckets)
}

/// Pearson statistic against the uniform expectation and its upper-tail
/// probability with 2^n − 1 degrees of freedom.
pub fn chi_squared_p(h: &BucketHistogram) -> Result<(f64, f64), MetricsError> {
    if h.total == 0 {
        return Err(MetricsError::EmptyHistogram);
    }
    let expected = h.total as f64 / h.buckets() as f64;
    let chi2 = h.counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum::<f64>();
    let df = (h.buckets() - 1) as f64;
    let p = if df == 0.0 { 1.0 } else { chi_squared_sf(chi2, df) };
    Ok((chi2, p.clamp(0.0, 1.0)))
}

/// Survival function of the chi-squared distribution, Q(df/2, x/2).
pub fn chi_squared_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    regularized_gamma_q(df / 2.0, x / 2.0)
}

const GAMMA_EPS: f64 = 1e-15;
const GAMMA_MAX_ITER: usize = 1000;

/// Upper regularized incomplete gamma Q(a, x).
pub fn regularized_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < a + 1.0 {
        1.0 - gamma_p_series(a, x)
    } else {
        gamma_q_continued_fraction(a, x)
    }
}

fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut term = 1.0 / a;
    let mut sum = term;
    for _ in 0..GAMMA_MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * GAMMA_EPS {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

// modified Lentz
fn gamma_q_continued_fraction(a: f64, x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=GAMMA_MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < GAMMA_EPS {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// ln Γ(x) for x > 0 (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + 7.5;
    let series = COEF[1..].iter().enumerate().fold(COEF[0], |acc, (i, c)| acc + c / (x + i as f64 + 1.0));
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + series.ln()
}

/// Mean normalized Hamming distance between hash(x) and hash(x with one bit flipped),
/// over every input and every bit position.
pub fn avalanche_score(cfg: &HashConfig, inputs: &[BitString]) -> Result<f64, MetricsError> {
    let first = inputs.first().ok_or(MetricsError::EmptyInputs)?;
    let len = first.len();
    if let Some(bad) = inputs.iter().find(|x| x.len() != len) {
        return Err(MetricsError::UnequalInputs(len, bad.len()));
    }
    if len == 0 {
        return Err(MetricsError::EmptyInputs);
    }
    let base = hash_batch(inputs, cfg)?;
    let mut total = 0usize;
    for (x, hx) in inputs.iter().zip(&base) {
        for i in 0..len {
            total += hash(&x.flipped(i), cfg)?.bits.hamming_distance(&hx.bits);
        }
    }
    let trials = inputs.len() * len * cfg.n_qubits;
    Ok(total as f64 / trials as f64)
}

/// Width used for sweep inputs: two encoding layers' worth of bits.
pub fn default_input_width(cfg: &HashConfig) -> usize {
    2 * cfg.n_qubits
}

/// Integers `0..size` as `width`-bit strings.
pub fn integer_inputs(size: usize, width: usize) -> Result<Vec<BitString>, MetricsError> {
    let fits = width >= usize::BITS as usize || size <= 1usize << width;
    if size == 0 || width == 0 || !fits {
        return Err(MetricsError::InvalidBatchSize { size, width });
    }
    Ok((0..size as u64).map(|i| BitString::from_uint(i, width).expect("checked above")).collect())
}

/// Hashes inputs `0..B` for each batch size `B` and scores each batch.
pub fn batch_sweep(
    cfg: &HashConfig,
    batch_sizes: &[usize],
    input_width: usize,
) -> Result<Vec<(usize, MetricsReport)>, MetricsError> {
    batch_sizes
        .iter()
        .map(|&size| {
            let inputs = integer_inputs(size, input_width)?;
            let hashes = hash_batch(&inputs, cfg)?;
            let histogram = bucket_histogram(&hashes, cfg.n_qubits)?;
            let avalanche = avalanche_score(cfg, &inputs)?;
            Ok((size, MetricsReport::from_histogram(histogram, Some(avalanche))?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hash::Template;

    fn hv(s: &str) -> HashValue {
        HashValue { bits: s.parse().unwrap() }
    }

    fn uniform(k: u64) -> BucketHistogram {
        BucketHistogram::from_counts(4, vec![k; 16])
    }

    fn single_bucket(total: u64) -> BucketHistogram {
        let mut counts = vec![0; 16];
        counts[0] = total;
        BucketHistogram::from_counts(4, counts)
    }

    #[test]
    fn histogram_examples() {
        let h = bucket_histogram(&[hv("0000"), hv("0000"), hv("1111")], 4).unwrap();
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[15], 1);
        assert_eq!(h.counts.iter().sum::<u64>(), 3);
        assert_eq!(h.total, 3);

        let empty = bucket_histogram(&[], 4).unwrap();
        assert_eq!(empty, BucketHistogram::from_counts(4, vec![0; 16]));

        let all: Vec<HashValue> = (0..160).map(|i| HashValue::from_index(i % 16, 4)).collect();
        assert_eq!(bucket_histogram(&all, 4).unwrap(), uniform(10));

        assert_eq!(bucket_histogram(&[hv("000")], 4), Err(MetricsError::LengthMismatch { expected: 4, found: 3 }));
    }

    #[test]
    fn collision_rate_closed_forms() {
        assert_eq!(collision_rate(&uniform(10)).unwrap(), 0.625);

        // mean 6.25; one bucket deviates by 93.75, fifteen by 6.25
        let sd = ((93.75f64 * 93.75 + 15.0 * 6.25 * 6.25) / 16.0).sqrt();
        let cr = collision_rate(&single_bucket(100)).unwrap();
        assert!((cr - (6.25 + sd) / 16.0).abs() < 1e-12);
        assert!((cr - 1.903_5).abs() < 1e-4);

        let one = collision_rate(&single_bucket(1)).unwrap();
        let mean: f64 = 1.0 / 16.0;
        let sd = (((1.0 - mean) * (1.0 - mean) + 15.0 * mean * mean) / 16.0).sqrt();
        assert!((one - (mean + sd) / 16.0).abs() < 1e-15);

        assert_eq!(collision_rate(&uniform(0)), Err(MetricsError::EmptyHistogram));
    }

    #[test]
    fn chi_squared_examples() {
        assert_eq!(chi_squared_p(&uniform(10)).unwrap(), (0.0, 1.0));
        let (chi2, p) = chi_squared_p(&single_bucket(100)).unwrap();
        assert!((chi2 - 1500.0).abs() < 1e-9);
        assert!(p < 1e-12);
        assert_eq!(chi_squared_p(&uniform(0)), Err(MetricsError::EmptyHistogram));
    }

    #[test]
    fn ln_gamma_known_values() {
        assert!(ln_gamma(1.0).abs() < 1e-13);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-12);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-12);
        assert!((ln_gamma(7.5) - 1_871.254_305_797_788_7_f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn sf_known_values() {
        // df = 2 has sf = exp(-x/2)
        for x in [0.1, 1.0, 3.0, 10.0, 40.0] {
            assert!((chi_squared_sf(x, 2.0) - (-x / 2.0f64).exp()).abs() < 1e-13);
        }
        // df = 1 median
        assert!((chi_squared_sf(0.454_936_423_119_572_7, 1.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn pqc4_avalanche_is_a_quarter() {
        let inputs = integer_inputs(256, 8).unwrap();
        let a = avalanche_score(&HashConfig::new(Template::Pqc4), &inputs).unwrap();
        assert_eq!(a, 0.25);
    }

    #[test]
    fn degenerate_hasher_has_no_avalanche() {
        let inputs = integer_inputs(64, 8).unwrap();
        let cfg = HashConfig::new(Template::Pqc3).with_angles(0.7, 0.7);
        assert_eq!(avalanche_score(&cfg, &inputs).unwrap(), 0.0);
    }

    #[test]
    fn avalanche_input_errors() {
        let cfg = HashConfig::new(Template::Pqc3);
        assert_eq!(avalanche_score(&cfg, &[]), Err(MetricsError::EmptyInputs));
        let mixed = ["10".parse().unwrap(), "101".parse().unwrap()];
        assert_eq!(avalanche_score(&cfg, &mixed), Err(MetricsError::UnequalInputs(2, 3)));
    }

    #[test]
    fn sweep_reports_in_order() {
        let cfg = HashConfig::new(Template::Pqc3);
        let reports = batch_sweep(&cfg, &[25, 50, 100], 8).unwrap();
        let sizes: Vec<usize> = reports.iter().map(|(s, _)| *s).collect();
        assert_eq!(sizes, [25, 50, 100]);
        let means: Vec<f64> = reports.iter().map(|(_, r)| r.histogram.total as f64 / 16.0).collect();
        assert!(means.windows(2).all(|w| w[0] <= w[1]));

        let (_, single) = &batch_sweep(&cfg, &[1], 8).unwrap()[0];
        let mean: f64 = 1.0 / 16.0;
        let sd = (((1.0 - mean) * (1.0 - mean) + 15.0 * mean * mean) / 16.0).sqrt();
        assert!((single.collision_rate - (mean + sd) / 16.0).abs() < 1e-15);
    }

    #[test]
    fn sweep_rejects_bad_sizes() {
        let cfg = HashConfig::new(Template::Pqc3);
        assert_eq!(batch_sweep(&cfg, &[0], 8).unwrap_err(), MetricsError::InvalidBatchSize { size: 0, width: 8 });
        assert!(batch_sweep(&cfg, &[257], 8).is_err());
        assert!(batch_sweep(&cfg, &[256], 8).is_ok());
    }
}
