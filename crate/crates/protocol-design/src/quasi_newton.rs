/// Controls for [`minimize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeSettings {
    pub max_iterations: usize,
    /// Stop once the largest gradient component is below this.
    pub gradient_tol: f64,
    /// Stop once an iteration lowers the value by less than this, relative.
    pub value_tol: f64,
}

impl Default for MinimizeSettings {
    fn default() -> Self {
        MinimizeSettings {
            max_iterations: 4000,
            gradient_tol: 1e-9,
            value_tol: 1e-15,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// BFGS on the inverse Hessian with a backtracking Armijo line search.
///
/// `f` may return `+inf` outside the feasible set; the line search then backs off.
/// `grad` supplies the gradient, typically by finite differences.
pub fn minimize(
    f: impl Fn(&[f64]) -> f64,
    grad: impl Fn(&[f64]) -> Vec<f64>,
    x0: Vec<f64>,
    settings: &MinimizeSettings,
) -> Minimum {
    let n = x0.len();
    let mut x = x0;
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut h = vec![vec![0.0; n]; n];
    let reset = |h: &mut Vec<Vec<f64>>, scale: f64| {
        for (i, row) in h.iter_mut().enumerate() {
            row.iter_mut().for_each(|v| *v = 0.0);
            row[i] = scale;
        }
    };
    let initial_scale = 1e-3 / max_abs(&g).max(1e-300);
    reset(&mut h, initial_scale);
    let mut fresh = true;
    for it in 0..settings.max_iterations {
        if max_abs(&g) < settings.gradient_tol {
            return Minimum { x, value: fx, iterations: it, converged: true };
        }
        let mut d: Vec<f64> = h.iter().map(|row| -dot(row, &g)).collect();
        let mut slope = dot(&d, &g);
        if slope >= 0.0 {
            reset(&mut h, initial_scale);
            d = g.iter().map(|v| -initial_scale * v).collect();
            slope = dot(&d, &g);
            fresh = true;
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + step * b).collect();
            let ft = f(&trial);
            if ft.is_finite() && ft <= fx + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((xn, fxn)) = accepted else {
            if fresh {
                // Even a steepest-descent step fails: stationary to working precision.
                return Minimum { x, value: fx, iterations: it, converged: true };
            }
            reset(&mut h, initial_scale);
            fresh = true;
            continue;
        };
        let gn = grad(&xn);
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        let decrease = fx - fxn;
        let done = decrease <= settings.value_tol * fx.abs().max(1e-300);
        x = xn;
        fx = fxn;
        g = gn;
        if done {
            return Minimum { x, value: fx, iterations: it + 1, converged: true };
        }
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if fresh {
                reset(&mut h, sy / dot(&y, &y));
            }
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let rho = 1.0 / sy;
            let hy: Vec<f64> = h.iter().map(|row| dot(row, &y)).collect();
            let yhy = dot(&y, &hy);
            for i in 0..n {
                for j in 0..n {
                    h[i][j] += -rho * (s[i] * hy[j] + hy[i] * s[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
                }
            }
            fresh = false;
        }
    }
    Minimum { x, value: fx, iterations: settings.max_iterations, converged: false }
}
