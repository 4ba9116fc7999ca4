//! Summary statistics over replicate values.

use statrs::distribution::{ContinuousCDF, Normal};

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance; zero for fewer than two values.
pub fn variance(x: &[f64]) -> f64 {
    if x.len() < 2 {
        return 0.0;
    }
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
}

/// Standard error of the mean.
pub fn std_error(x: &[f64]) -> f64 {
    (variance(x) / x.len() as f64).sqrt()
}

pub fn covariance(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    if x.len() < 2 {
        return 0.0;
    }
    let (mx, my) = (mean(x), mean(y));
    x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / (x.len() - 1) as f64
}

/// Pearson correlation, `0` when either side is constant.
pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let d = (variance(x) * variance(y)).sqrt();
    if d > 0.0 {
        covariance(x, y) / d
    } else {
        0.0
    }
}

/// Standard error of the sample covariance, from the spread of the centered products.
pub fn covariance_se(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let prods: Vec<f64> = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).collect();
    std_error(&prods)
}

pub fn median(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

fn central_moment(x: &[f64], k: i32) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(k)).sum::<f64>() / x.len() as f64
}

/// Moment skewness `m3 / m2^{3/2}`; zero for constant data.
pub fn skewness(x: &[f64]) -> f64 {
    let m2 = central_moment(x, 2);
    if m2 > 0.0 {
        central_moment(x, 3) / m2.powf(1.5)
    } else {
        0.0
    }
}

/// `m4 / m2^2 - 3`; zero for constant data.
pub fn excess_kurtosis(x: &[f64]) -> f64 {
    let m2 = central_moment(x, 2);
    if m2 > 0.0 {
        central_moment(x, 4) / (m2 * m2) - 3.0
    } else {
        0.0
    }
}

/// Kolmogorov distance between the empirical law of `x` and `N(0, σ̂²)`, with
/// `σ̂²` the sample variance. Zero variance gives the distance to a point mass at 0.
pub fn ks_to_centered_normal(x: &[f64]) -> f64 {
    let mut v = x.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    let sd = variance(x).sqrt();
    let cdf = |t: f64| -> f64 {
        if sd > 0.0 {
            Normal::new(0.0, sd).expect("positive sd").cdf(t)
        } else if t >= 0.0 {
            1.0
        } else {
            0.0
        }
    };
    let mut d: f64 = 0.0;
    for (i, &t) in v.iter().enumerate() {
        let c = cdf(t);
        d = d.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Slope of `ln y` against `ln x`; `None` with fewer than two points or nonpositive values.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    Some(ols_slope(&lx, &ly))
}
