/// Single-pass central moments up to fourth order, mergeable (Pébay's update).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    n: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAccumulator {
    pub fn push(&mut self, x: f64) {
        self.merge(&MomentAccumulator {
            n: 1,
            mean: x,
            ..Default::default()
        });
    }

    pub fn merge(&mut self, b: &MomentAccumulator) {
        if b.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *b;
            return;
        }
        let (na, nb) = (self.n as f64, b.n as f64);
        let n = na + nb;
        let d = b.mean - self.mean;
        let (d2, d3, d4) = (d * d, d * d * d, d * d * d * d);
        let m2 = self.m2 + b.m2 + d2 * na * nb / n;
        let m3 = self.m3 + b.m3 + d3 * na * nb * (na - nb) / (n * n) + 3.0 * d * (na * b.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + b.m4
            + d4 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * b.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * d * (na * b.m3 - nb * self.m3) / n;
        *self = MomentAccumulator {
            n: self.n + b.n,
            mean: self.mean + d * nb / n,
            m2,
            m3,
            m4,
        };
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Population central moment of order 2, 3 or 4.
    pub fn central(&self, order: usize) -> f64 {
        let s = match order {
            2 => self.m2,
            3 => self.m3,
            4 => self.m4,
            _ => panic!("central moments are kept for orders 2 to 4"),
        };
        if self.n == 0 {
            0.0
        } else {
            s / self.n as f64
        }
    }
}

/// Sample statistics of the work with jackknife errors over contiguous batches.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkStatistics {
    pub count: u64,
    pub mean: f64,
    /// Central moments of order 2, 3, 4.
    pub central: [f64; 3],
    /// `kappa_2, kappa_3, kappa_4`.
    pub cumulants: [f64; 3],
    pub se_mean: f64,
    pub se_variance: f64,
    /// Jackknife error of the third central moment; NaN with fewer than eight batches.
    pub se_third: f64,
    /// Set when the statistics describe a single record.
    pub single_sample: bool,
}

impl WorkStatistics {
    pub fn variance(&self) -> f64 {
        self.cumulants[0]
    }

    /// Batches are merged in the order given; errors are jackknifed over them
    /// when there are at least eight, and taken from the moments otherwise.
    pub fn from_groups(groups: &[MomentAccumulator]) -> Self {
        let mut all = MomentAccumulator::default();
        for g in groups {
            all.merge(g);
        }
        let (m2, m3, m4) = (all.central(2), all.central(3), all.central(4));
        let n = all.count();
        let filled: Vec<&MomentAccumulator> = groups.iter().filter(|g| g.count() > 0).collect();
        let (se_mean, se_variance, se_third) = if filled.len() >= 8 {
            let leave_out: Vec<MomentAccumulator> = (0..filled.len())
                .map(|i| {
                    let mut acc = MomentAccumulator::default();
                    for (j, g) in filled.iter().enumerate() {
                        if j != i {
                            acc.merge(g);
                        }
                    }
                    acc
                })
                .collect();
            let jack = |f: &dyn Fn(&MomentAccumulator) -> f64| {
                let k = leave_out.len() as f64;
                let vals: Vec<f64> = leave_out.iter().map(f).collect();
                let avg = vals.iter().sum::<f64>() / k;
                ((k - 1.0) / k * vals.iter().map(|v| (v - avg).powi(2)).sum::<f64>()).sqrt()
            };
            (jack(&|a| a.mean()), jack(&|a| a.central(2)), jack(&|a| a.central(3)))
        } else if n >= 2 {
            let nf = n as f64;
            ((m2 / nf).sqrt(), ((m4 - m2 * m2).max(0.0) / nf).sqrt(), f64::NAN)
        } else {
            (0.0, 0.0, f64::NAN)
        };
        WorkStatistics {
            count: n,
            mean: all.mean(),
            central: [m2, m3, m4],
            cumulants: [m2, m3, m4 - 3.0 * m2 * m2],
            se_mean,
            se_variance,
            se_third,
            single_sample: n == 1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_matches_two_pass_moments() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37 % 101) as f64 / 7.0).sin() * 3.0 + 1.0).collect();
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let c = |k: i32| xs.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / xs.len() as f64;
        let mut a = MomentAccumulator::default();
        let mut b = MomentAccumulator::default();
        for (i, &x) in xs.iter().enumerate() {
            if i % 3 == 0 { a.push(x) } else { b.push(x) }
        }
        a.merge(&b);
        assert!((a.mean() - mean).abs() < 1e-13);
        for k in 2..=4 {
            assert!((a.central(k) - c(k as i32)).abs() < 1e-11, "order {k}");
        }
    }
}
