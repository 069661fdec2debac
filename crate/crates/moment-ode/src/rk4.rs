//! Classic fourth-order Runge-Kutta on a fixed grid whose midpoints are tabulated.

/// Where a right-hand side is evaluated: time and index into the fine grid
/// (node `k` is index `2k`, the midpoint after it `2k + 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stage {
    pub t: f64,
    pub fine: usize,
    /// True for the stage at the end of a step, where one-sided quantities
    /// such as `Edot` at a kink take their left limit.
    pub left: bool,
}

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, at: Stage, y: &[f64], dy: &mut [f64]);
}

/// Integrates from `y0` over `fine` (nodes interleaved with midpoints) and
/// returns the state at every node.
pub fn integrate<S: OdeSystem>(system: &S, fine: &[f64], y0: &[f64]) -> Vec<Vec<f64>> {
    let d = system.dim();
    assert_eq!(y0.len(), d);
    assert!(fine.len() % 2 == 1, "fine grid must interleave nodes and midpoints");
    let nodes = fine.len() / 2 + 1;
    let mut out = Vec::with_capacity(nodes);
    let mut y = y0.to_vec();
    out.push(y.clone());
    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; d], vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    let mut tmp = vec![0.0; d];
    for k in 0..nodes - 1 {
        let (i0, im, i1) = (2 * k, 2 * k + 1, 2 * k + 2);
        let h = fine[i1] - fine[i0];
        let start = Stage { t: fine[i0], fine: i0, left: false };
        let mid = Stage { t: fine[im], fine: im, left: false };
        let end = Stage { t: fine[i1], fine: i1, left: true };
        system.rhs(start, &y, &mut k1);
        axpy(&y, 0.5 * h, &k1, &mut tmp);
        system.rhs(mid, &tmp, &mut k2);
        axpy(&y, 0.5 * h, &k2, &mut tmp);
        system.rhs(mid, &tmp, &mut k3);
        axpy(&y, h, &k3, &mut tmp);
        system.rhs(end, &tmp, &mut k4);
        for j in 0..d {
            y[j] += h / 6.0 * (k1[j] + 2.0 * (k2[j] + k3[j]) + k4[j]);
        }
        out.push(y.clone());
    }
    out
}

fn axpy(y: &[f64], a: f64, x: &[f64], out: &mut [f64]) {
    for j in 0..y.len() {
        out[j] = y[j] + a * x[j];
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rhs(&self, at: Stage, y: &[f64], dy: &mut [f64]) {
            dy[0] = -self.0 * y[0] + at.t;
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let fine: Vec<f64> = (0..=2 * n).map(|i| i as f64 / (2 * n) as f64).collect();
            let y = integrate(&Decay(2.0), &fine, &[1.0]);
            // y' = -2y + t, y(0) = 1
            let exact = 1.25 * (-2f64).exp() + 0.5 - 0.25;
            (y[n][0] - exact).abs()
        };
        let ratio = err(10) / err(20);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }
}
