//! Cumulative quadrature on a fine grid of nodes interleaved with midpoints.

/// Midpoint value of the cubic Hermite interpolant.
pub(crate) fn hermite_mid(v0: f64, v1: f64, d0: f64, d1: f64, h: f64) -> f64 {
    0.5 * (v0 + v1) + h * (d0 - d1) / 8.0
}

/// `y(t) = int_0^t e^{-(g(t) - g(s))} f(s) ds` at every fine point.
///
/// Each panel `[t_{2k}, t_{2k+2}]` uses Simpson for the full panel and the
/// three-point rule `(5, 8, -1) / 12` for its first half.
pub(crate) fn damped_cumulative(fine: &[f64], g: &[f64], f: &[f64]) -> Vec<f64> {
    damped_cumulative_sided(fine, g, f, f)
}

/// As [`damped_cumulative`], with `f_left` supplying each panel's right end,
/// so an integrand that jumps at a node is sampled from inside the panel.
pub(crate) fn damped_cumulative_sided(fine: &[f64], g: &[f64], f: &[f64], f_left: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; fine.len()];
    for k in 0..fine.len() / 2 {
        let (i0, im, i1) = (2 * k, 2 * k + 1, 2 * k + 2);
        let h = fine[i1] - fine[i0];
        let w = |i: usize, f: &[f64]| (g[i] - g[i0]).exp() * f[i];
        let (w0, wm, w1) = (w(i0, f), w(im, f), w(i1, f_left));
        y[im] = (-(g[im] - g[i0])).exp() * (y[i0] + h / 24.0 * (5.0 * w0 + 8.0 * wm - w1));
        y[i1] = (-(g[i1] - g[i0])).exp() * (y[i0] + h / 6.0 * (w0 + 4.0 * wm + w1));
    }
    y
}

pub(crate) fn cumulative(fine: &[f64], f: &[f64]) -> Vec<f64> {
    damped_cumulative(fine, &vec![0.0; fine.len()], f)
}

pub(crate) fn cumulative_sided(fine: &[f64], f: &[f64], f_left: &[f64]) -> Vec<f64> {
    damped_cumulative_sided(fine, &vec![0.0; fine.len()], f, f_left)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damped_integral_of_a_constant() {
        let fine: Vec<f64> = (0..=40).map(|i| i as f64 * 0.05).collect();
        let g: Vec<f64> = fine.iter().map(|t| 0.7 * t).collect();
        let y = damped_cumulative(&fine, &g, &vec![1.0; fine.len()]);
        for (t, v) in fine.iter().zip(&y) {
            let exact = (1.0 - (-0.7 * t).exp()) / 0.7;
            assert!((v - exact).abs() < 1e-7, "{t}: {v} vs {exact}");
        }
        let c = cumulative(&fine, &fine.iter().map(|t| t * t).collect::<Vec<_>>());
        assert!((c[40] - 8.0 / 3.0).abs() < 1e-12);
        assert!((hermite_mid(0.0, 1.0, 0.0, 3.0, 1.0) - 0.125).abs() < 1e-15);
    }
}
