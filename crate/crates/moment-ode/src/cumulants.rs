use crate::error::{MomentError, Result};

/// Cumulants `k_1..k_n` from raw moments `mu_1..mu_n` (n <= 4) via
/// `mu_m = k_m + sum_{l<m} C(m-1, l-1) k_l mu_{m-l}`.
pub fn cumulants_from_moments(mu: &[f64]) -> Result<Vec<f64>> {
    if mu.len() > 4 {
        return Err(MomentError::Order(mu.len()));
    }
    let raw = |j: usize| if j == 0 { 1.0 } else { mu[j - 1] };
    let mut kappa: Vec<f64> = Vec::with_capacity(mu.len());
    for m in 1..=mu.len() {
        let mut k = raw(m);
        for l in 1..m {
            k -= binomial(m - 1, l - 1) * kappa[l - 1] * raw(m - l);
        }
        kappa.push(k);
    }
    Ok(kappa)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_mass_and_gaussian() {
        let m = 1.7f64;
        let k = cumulants_from_moments(&[m, m * m, m * m * m, m.powi(4)]).unwrap();
        assert!((k[0] - m).abs() < 1e-15);
        assert!(k[1].abs() < 1e-14 && k[2].abs() < 1e-13 && k[3].abs() < 1e-12);

        let (a, s) = (0.3f64, 0.7);
        let g = [a, a * a + s, a * a * a + 3.0 * a * s, a.powi(4) + 6.0 * a * a * s + 3.0 * s * s];
        let k = cumulants_from_moments(&g).unwrap();
        assert!((k[1] - s).abs() < 1e-15);
        assert!(k[2].abs() < 1e-15 && k[3].abs() < 1e-14);
        assert!(cumulants_from_moments(&[0.0; 5]).is_err());
    }
}
