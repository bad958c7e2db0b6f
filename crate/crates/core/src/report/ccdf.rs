use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CcdfPoint {
    pub x: f64,
    /// Fraction of the sample with value `>= x`.
    pub p: f64,
}

/// Empirical complementary CDF, one point per distinct value.
pub fn ccdf(values: &[f64]) -> Result<Vec<CcdfPoint>> {
    if values.is_empty() {
        return Err(Error::Domain("CCDF of an empty sample".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("CCDF sample contains NaN".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let x = sorted[i];
        out.push(CcdfPoint {
            x,
            p: (n - i) as f64 / n as f64,
        });
        while i < n && sorted[i] == x {
            i += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sample() {
        let c = ccdf(&[1.0, 1.0, 2.0]).unwrap();
        assert_eq!(
            c,
            [
                CcdfPoint { x: 1.0, p: 1.0 },
                CcdfPoint {
                    x: 2.0,
                    p: 1.0 / 3.0
                }
            ]
        );
    }

    #[test]
    fn all_equal_and_empty() {
        assert_eq!(ccdf(&[4.0; 5]).unwrap(), [CcdfPoint { x: 4.0, p: 1.0 }]);
        assert!(ccdf(&[]).is_err());
        assert!(ccdf(&[f64::NAN]).is_err());
    }

    #[test]
    fn agrees_with_count_oracle() {
        let values: Vec<f64> = (0..200).map(|i| ((i * 37) % 23) as f64 / 2.0).collect();
        let c = ccdf(&values).unwrap();
        for point in &c {
            let count = values.iter().filter(|v| **v >= point.x).count();
            assert_eq!(point.p, count as f64 / values.len() as f64);
        }
        assert!(c.windows(2).all(|w| w[0].x < w[1].x && w[0].p > w[1].p));
        let mut distinct = values.clone();
        distinct.sort_by(f64::total_cmp);
        distinct.dedup();
        assert_eq!(c.len(), distinct.len());
    }
}
