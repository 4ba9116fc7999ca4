//! Deterministic low-discrepancy direction sets on the unit sphere.

use std::f64::consts::PI;

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical inverse of `i` in base `b`.
pub fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let inv = 1.0 / b as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

fn inverse_normal_cdf(p: f64) -> f64 {
    -std::f64::consts::SQRT_2 * statrs::function::erf::erfc_inv(2.0 * p)
}

/// The `i`-th direction of the sequence in dimension `d`.
///
/// `d = 1` alternates `+1, -1`; `d = 2` uses the golden-ratio Kronecker
/// sequence on the circle; `d = 3` maps a 2-D Halton point to the sphere by
/// the area-preserving cylinder map; higher dimensions push a Halton point
/// through the inverse normal cdf and normalize.
pub fn direction(d: usize, i: u64) -> Vec<f64> {
    match d {
        0 => panic!("dimension must be positive"),
        1 => vec![if i % 2 == 0 { 1.0 } else { -1.0 }],
        2 => {
            let golden = 0.5 * (5f64.sqrt() - 1.0);
            let a = 2.0 * PI * ((i as f64 * golden).fract());
            vec![a.cos(), a.sin()]
        }
        3 => {
            let z = 1.0 - 2.0 * radical_inverse(i + 1, 2);
            let a = 2.0 * PI * radical_inverse(i + 1, 3);
            let r = (1.0 - z * z).max(0.0).sqrt();
            vec![r * a.cos(), r * a.sin(), z]
        }
        _ => {
            let mut v: Vec<f64> = (0..d)
                .map(|k| {
                    let b = PRIMES[k % PRIMES.len()] + if k >= PRIMES.len() { 58 } else { 0 };
                    inverse_normal_cdf(radical_inverse(i + 1, b).clamp(1e-12, 1.0 - 1e-12))
                })
                .collect();
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if n == 0.0 {
                v[0] = 1.0;
                return v;
            }
            v.iter_mut().for_each(|x| *x /= n);
            v
        }
    }
}

/// The first `k` directions of the sequence.
pub fn directions(d: usize, k: usize) -> Vec<Vec<f64>> {
    (0..k as u64).map(|i| direction(d, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directions_are_unit() {
        for d in 1..=6 {
            for u in directions(d, 200) {
                let n: f64 = u.iter().map(|x| x * x).sum();
                assert!((n - 1.0).abs() < 1e-12, "d={d}");
            }
        }
    }

    #[test]
    fn sphere_points_are_balanced() {
        let us = directions(3, 4096);
        for k in 0..3 {
            let m: f64 = us.iter().map(|u| u[k]).sum::<f64>() / us.len() as f64;
            assert!(m.abs() < 0.02);
        }
    }
}
