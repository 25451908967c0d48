//! Information measures for a single stored bit.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::stats::{wilson_interval, Z_95};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// `p log2 p` with the limit 0 at p = 0.
fn plog2p(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.log2()
    }
}

fn plnp(p: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p * p.ln()
    }
}

/// Mutual information of a binary symmetric channel with error probability
/// `p_e`: `1 + p log2 p + (1 - p) log2 (1 - p)`, in bits.
pub fn bit_information(p_e: f64) -> Result<f64> {
    check_probability("p_e", p_e)?;
    if p_e == 0.0 || p_e == 1.0 {
        return Ok(1.0);
    }
    if p_e == 0.5 {
        return Ok(0.0);
    }
    Ok((1.0 + plog2p(p_e) + plog2p(1.0 - p_e)).clamp(0.0, 1.0))
}

/// Memory information entropy divided by k, in nats.
pub fn memory_entropy(p0: f64) -> Result<f64> {
    check_probability("p0", p0)?;
    Ok(-(plnp(p0) + plnp(1.0 - p0)))
}

pub fn nats_to_bits(nats: f64) -> f64 {
    nats / std::f64::consts::LN_2
}

/// Read-out error statistics with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BitChannelStats {
    pub trials: u64,
    pub errors: u64,
    pub p_e_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BitChannelStats {
    pub fn from_counts(errors: u64, trials: u64) -> Result<Self> {
        if trials == 0 {
            return Err(invalid("no trials"));
        }
        if errors > trials {
            return Err(invalid(format!("{errors} errors out of {trials} trials")));
        }
        let (ci_low, ci_high) = wilson_interval(errors, trials, Z_95);
        Ok(Self {
            trials,
            errors,
            p_e_hat: errors as f64 / trials as f64,
            ci_low,
            ci_high,
        })
    }
}

pub fn estimate_error_prob(sent: &[u8], received: &[u8]) -> Result<BitChannelStats> {
    if sent.is_empty() {
        return Err(invalid("empty bit lists"));
    }
    if sent.len() != received.len() {
        return Err(invalid(format!(
            "length mismatch: {} sent, {} received",
            sent.len(),
            received.len()
        )));
    }
    let errors = sent.iter().zip(received).filter(|(a, b)| a != b).count();
    BitChannelStats::from_counts(errors as u64, sent.len() as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InformationContent {
    pub bits: f64,
    pub low: f64,
    pub high: f64,
}

/// Information left in the channel, with the image of the error-probability
/// interval. The curve falls monotonically towards p = 0.5 from either side,
/// so the minimum sits at the point of the interval nearest 0.5 and the
/// maximum at the endpoint farthest from it.
pub fn remaining_information(stats: &BitChannelStats) -> InformationContent {
    let info =
        |p: f64| bit_information(p).expect("probabilities from BitChannelStats are in range");
    let (lo, hi) = (stats.ci_low, stats.ci_high);
    let nearest = 0.5f64.clamp(lo, hi);
    let farthest = if (lo - 0.5).abs() >= (hi - 0.5).abs() {
        lo
    } else {
        hi
    };
    InformationContent {
        bits: info(stats.p_e_hat),
        low: info(nearest),
        high: info(farthest),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    #[test]
    fn information_reference_values() {
        assert_eq!(bit_information(0.0).unwrap(), 1.0);
        assert_eq!(bit_information(1.0).unwrap(), 1.0);
        assert_eq!(bit_information(0.5).unwrap(), 0.0);
        // 1 - h2(0.11), evaluated independently.
        let h = -(0.11f64 * 0.11f64.log2() + 0.89f64 * 0.89f64.log2());
        assert!((bit_information(0.11).unwrap() - (1.0 - h)).abs() < 1e-15);
        assert!((bit_information(0.11).unwrap() - 0.5001).abs() < 1e-4);
        assert!(bit_information(-0.1).is_err());
        assert!(bit_information(1.1).is_err());
        assert!(bit_information(f64::NAN).is_err());
    }

    #[test]
    fn information_decreases_on_lower_half() {
        let grid: Vec<f64> = (0..=500).map(|i| i as f64 / 1000.0).collect();
        for w in grid.windows(2) {
            assert!(
                bit_information(w[1]).unwrap() < bit_information(w[0]).unwrap(),
                "{w:?}"
            );
        }
    }

    #[test]
    fn entropy_reference_values() {
        assert_eq!(memory_entropy(1.0).unwrap(), 0.0);
        assert_eq!(memory_entropy(0.0).unwrap(), 0.0);
        assert!((memory_entropy(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert!((nats_to_bits(memory_entropy(0.5).unwrap()) - 1.0).abs() < 1e-15);
        assert!(memory_entropy(2.0).is_err());
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let s = memory_entropy(p).unwrap();
            assert!(s > 0.0 && s <= LN_2 + 1e-15);
        }
    }

    #[test]
    fn estimate_from_lists() {
        let sent = vec![1u8, 0, 1, 1, 0];
        let s = estimate_error_prob(&sent, &sent).unwrap();
        assert_eq!((s.p_e_hat, s.ci_low), (0.0, 0.0));
        let inv: Vec<u8> = sent.iter().map(|b| 1 - b).collect();
        assert_eq!(estimate_error_prob(&sent, &inv).unwrap().p_e_hat, 1.0);
        assert!(estimate_error_prob(&[], &[]).is_err());
        assert!(estimate_error_prob(&[1], &[1, 0]).is_err());
    }

    #[test]
    fn wilson_example_from_mismatch_counts() {
        let sent = vec![0u8; 1000];
        let received: Vec<u8> = (0..1000).map(|i| u8::from(i < 346)).collect();
        let s = estimate_error_prob(&sent, &received).unwrap();
        assert_eq!(s.errors, 346);
        assert!((s.p_e_hat - 0.346).abs() < 1e-15);
        assert!((s.ci_low - 0.317).abs() < 1e-3 && (s.ci_high - 0.376).abs() < 1e-3);
    }

    #[test]
    fn remaining_information_examples() {
        let coin = BitChannelStats::from_counts(500, 1000).unwrap();
        let r = remaining_information(&coin);
        assert_eq!((r.bits, r.low), (0.0, 0.0));
        assert!(r.high > 0.0);
        let clean = BitChannelStats::from_counts(0, 1000).unwrap();
        let r = remaining_information(&clean);
        assert_eq!((r.bits, r.high), (1.0, 1.0));
        assert!(r.low < 1.0);
        let partial = BitChannelStats::from_counts(3462, 10_000).unwrap();
        let r = remaining_information(&partial);
        assert!((r.bits - 0.0694).abs() < 1e-4, "{}", r.bits);
        assert!(r.low <= r.bits && r.bits <= r.high);
    }
}
