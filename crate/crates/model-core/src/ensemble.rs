use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{ModelError, Result};
use crate::quad::GaussRule;
use crate::registry::Registry;

/// A pure preparation, reduced to its excited-state population.
///
/// The azimuthal phase never enters the work statistics and is not stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurePrep {
    p_e: f64,
    weight: f64,
}

impl PurePrep {
    pub fn new(p_e: f64, weight: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_e) {
            return Err(ModelError::invalid("prep.p_e", format!("{p_e} outside [0, 1]")));
        }
        if !(weight.is_finite() && weight >= 0.0) {
            return Err(ModelError::invalid("prep.weight", format!("{weight} is negative")));
        }
        Ok(PurePrep { p_e, weight })
    }

    /// Polar Bloch angle `theta`; `p_e = sin^2(theta / 2)`.
    pub fn from_bloch_angle(theta: f64, weight: f64) -> Result<Self> {
        Self::new((0.5 * theta).sin().powi(2), weight)
    }

    pub fn p_e(&self) -> f64 {
        self.p_e
    }

    pub fn p_g(&self) -> f64 {
        1.0 - self.p_e
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn is_eigenstate(&self) -> bool {
        self.p_e == 0.0 || self.p_e == 1.0
    }
}

/// Probability density of `p_e` on `[0, 1]`.
pub trait PopulationDensity: Send + Sync + Debug {
    fn name(&self) -> &str;
    fn pdf(&self, p: f64) -> f64;
    fn inverse_cdf(&self, u: f64) -> f64;
}

/// Haar-random pure states: `p_e` is uniform on `[0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct UniformPopulation;

impl PopulationDensity for UniformPopulation {
    fn name(&self) -> &str {
        "uniform"
    }
    fn pdf(&self, _p: f64) -> f64 {
        1.0
    }
    fn inverse_cdf(&self, u: f64) -> f64 {
        u
    }
}

/// A decomposition of the initial density matrix into pure preparations.
#[derive(Debug, Clone)]
pub enum EnsembleSpec {
    Discrete {
        label: String,
        preps: Vec<PurePrep>,
    },
    Continuous {
        label: String,
        density: Arc<dyn PopulationDensity>,
        nodes: usize,
    },
}

pub const DEFAULT_QUAD_NODES: usize = 64;

impl EnsembleSpec {
    pub fn discrete(label: impl Into<String>, preps: Vec<PurePrep>) -> Result<Self> {
        if preps.is_empty() {
            return Err(ModelError::invalid("ensemble.preps", "empty decomposition"));
        }
        let total: f64 = preps.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(ModelError::invalid(
                "ensemble.preps",
                format!("weights sum to {total}, not 1"),
            ));
        }
        Ok(EnsembleSpec::Discrete {
            label: label.into(),
            preps,
        })
    }

    pub fn continuous(
        label: impl Into<String>,
        density: Arc<dyn PopulationDensity>,
        nodes: usize,
    ) -> Result<Self> {
        if nodes == 0 {
            return Err(ModelError::invalid("ensemble.nodes", "need at least one node"));
        }
        let spec = EnsembleSpec::Continuous {
            label: label.into(),
            density,
            nodes,
        };
        let mass: f64 = spec.resolve().iter().map(|p| p.weight).sum();
        if (mass - 1.0).abs() > 1e-8 {
            return Err(ModelError::invalid(
                "ensemble.density",
                format!("integrates to {mass}, not 1"),
            ));
        }
        Ok(spec)
    }

    /// `{|e>, |g>}` with equal weights.
    pub fn eigenstates() -> Self {
        Self::discrete(
            "EG",
            vec![PurePrep { p_e: 1.0, weight: 0.5 }, PurePrep { p_e: 0.0, weight: 0.5 }],
        )
        .expect("valid")
    }

    /// `{|+>, |->}`; both members have `p_e = 1/2`.
    pub fn plus_minus() -> Self {
        Self::discrete("PM", vec![PurePrep { p_e: 0.5, weight: 1.0 }]).expect("valid")
    }

    pub fn haar(nodes: usize) -> Result<Self> {
        Self::continuous("Haar", Arc::new(UniformPopulation), nodes)
    }

    /// Equal mixture of `p_e = p` and `p_e = 1 - p`.
    pub fn polar_pair(p: f64) -> Result<Self> {
        Self::discrete(
            format!("polar_pair({p})"),
            vec![PurePrep::new(p, 0.5)?, PurePrep::new(1.0 - p, 0.5)?],
        )
    }

    pub fn label(&self) -> &str {
        match self {
            EnsembleSpec::Discrete { label, .. } | EnsembleSpec::Continuous { label, .. } => label,
        }
    }

    /// Weighted preparations; continuous densities become Gauss-Legendre nodes.
    pub fn resolve(&self) -> Vec<PurePrep> {
        match self {
            EnsembleSpec::Discrete { preps, .. } => preps.clone(),
            EnsembleSpec::Continuous { density, nodes, .. } => GaussRule::new(*nodes)
                .unit_points()
                .iter()
                .map(|&(p, w)| PurePrep {
                    p_e: p,
                    weight: w * density.pdf(p),
                })
                .collect(),
        }
    }

    /// Ensemble-averaged excited population `<e|rho_0|e>`.
    pub fn mean_excited(&self) -> f64 {
        self.resolve().iter().map(|p| p.weight * p.p_e).sum()
    }

    /// True when every member is an energy eigenstate.
    pub fn is_classical(&self) -> bool {
        match self {
            EnsembleSpec::Discrete { preps, .. } => preps.iter().all(PurePrep::is_eigenstate),
            EnsembleSpec::Continuous { .. } => false,
        }
    }

    /// Maps a uniform variate to a member's `p_e`.
    pub fn sample_p_e(&self, u: f64) -> f64 {
        match self {
            EnsembleSpec::Discrete { preps, .. } => {
                let mut acc = 0.0;
                for p in preps {
                    acc += p.weight;
                    if u < acc {
                        return p.p_e;
                    }
                }
                preps.last().expect("non-empty").p_e
            }
            EnsembleSpec::Continuous { density, .. } => density.inverse_cdf(u).clamp(0.0, 1.0),
        }
    }
}

/// Builds a named ensemble from numeric parameters.
pub trait EnsembleFactory: Send + Sync {
    fn describe(&self) -> &str;
    fn build(&self, params: &[f64], quad_nodes: usize) -> Result<EnsembleSpec>;
}

struct FnEnsemble {
    about: &'static str,
    arity: usize,
    build: fn(&[f64], usize) -> Result<EnsembleSpec>,
}

impl EnsembleFactory for FnEnsemble {
    fn describe(&self) -> &str {
        self.about
    }
    fn build(&self, params: &[f64], quad_nodes: usize) -> Result<EnsembleSpec> {
        if params.len() != self.arity {
            return Err(ModelError::invalid(
                "ensemble.params",
                format!("expected {} parameter(s), got {}", self.arity, params.len()),
            ));
        }
        (self.build)(params, quad_nodes)
    }
}

/// `eg`, `pm`, `haar`, `polar_pair(p)`.
pub fn ensemble_registry() -> Registry<dyn EnsembleFactory> {
    let mut r: Registry<dyn EnsembleFactory> = Registry::new("ensemble");
    r.register(
        "eg",
        Box::new(FnEnsemble {
            about: "energy eigenstates |e>, |g> with weight 1/2",
            arity: 0,
            build: |_, _| Ok(EnsembleSpec::eigenstates()),
        }),
    );
    r.register(
        "pm",
        Box::new(FnEnsemble {
            about: "|+>, |-> with weight 1/2",
            arity: 0,
            build: |_, _| Ok(EnsembleSpec::plus_minus()),
        }),
    );
    r.register(
        "haar",
        Box::new(FnEnsemble {
            about: "uniform on the Bloch sphere",
            arity: 0,
            build: |_, nodes| EnsembleSpec::haar(nodes),
        }),
    );
    r.register(
        "polar_pair",
        Box::new(FnEnsemble {
            about: "p_e = p and 1 - p with weight 1/2",
            arity: 1,
            build: |params, _| EnsembleSpec::polar_pair(params[0]),
        }),
    );
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_ensembles_share_the_maximally_mixed_state() {
        let all = [
            EnsembleSpec::eigenstates(),
            EnsembleSpec::plus_minus(),
            EnsembleSpec::haar(DEFAULT_QUAD_NODES).unwrap(),
            EnsembleSpec::polar_pair(0.25).unwrap(),
        ];
        for e in &all {
            assert!((e.mean_excited() - 0.5).abs() < 1e-10, "{}", e.label());
        }
        assert!(all[0].is_classical());
        assert!(!all[1].is_classical());
    }

    #[test]
    fn haar_quadrature_reproduces_moments() {
        let haar = EnsembleSpec::haar(64).unwrap();
        let coherence: f64 = haar.resolve().iter().map(|p| p.weight() * p.p_e() * p.p_g()).sum();
        assert!((coherence - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn bloch_angle_maps_to_population() {
        let p = PurePrep::from_bloch_angle(std::f64::consts::FRAC_PI_2, 1.0).unwrap();
        assert!((p.p_e() - 0.5).abs() < 1e-15);
        // |g>/2 + sqrt(3)|e>/2
        let q = PurePrep::from_bloch_angle(2.0 * std::f64::consts::FRAC_PI_3, 1.0).unwrap();
        assert!((q.p_e() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn validation_and_sampling() {
        assert!(PurePrep::new(1.5, 1.0).is_err());
        assert!(EnsembleSpec::discrete("x", vec![PurePrep::new(0.3, 0.7).unwrap()]).is_err());
        let eg = EnsembleSpec::eigenstates();
        assert_eq!(eg.sample_p_e(0.2), 1.0);
        assert_eq!(eg.sample_p_e(0.7), 0.0);
        assert_eq!(EnsembleSpec::haar(8).unwrap().sample_p_e(0.3), 0.3);
    }

    #[test]
    fn registry_builds_named_ensembles() {
        let r = ensemble_registry();
        assert_eq!(r.names(), vec!["eg", "haar", "pm", "polar_pair"]);
        let pair = r.get("polar_pair").unwrap().build(&[0.25], 64).unwrap();
        assert_eq!(pair.resolve().len(), 2);
        assert!(r.get("polar_pair").unwrap().build(&[], 64).is_err());
        assert!(r.get("ghz").is_err());
    }
}
