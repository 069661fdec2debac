use fluctuation_analysis::*;
use model_core::{
    free_energy_change, free_energy_change_quadrature, BathSpec, DriveProtocol, EnsembleSpec, Frozen,
    Linear, Power, Ramp, Tanh,
};
use moment_ode::{MomentProblem, SolverSettings};

fn constant() -> BathSpec {
    BathSpec::constant(1.0, 0.1).unwrap()
}

fn bound_protocols(tau: f64) -> Vec<DriveProtocol> {
    vec![
        DriveProtocol::from_schedule(Linear::new(1.0), tau).unwrap(),
        DriveProtocol::from_schedule(Power::new(1.0, 0.5), tau).unwrap(),
        DriveProtocol::from_schedule(Power::new(1.0, 1.0 / 3.0), tau).unwrap(),
        DriveProtocol::from_schedule(Tanh::new(2.0), tau).unwrap(),
    ]
}

fn problem(e: &EnsembleSpec, p: &DriveProtocol, bath: &BathSpec) -> MomentProblem {
    MomentProblem::new(e, p, bath, SolverSettings::default()).unwrap()
}

#[test]
fn dissipated_work_examples() {
    assert_eq!(dissipated_work(0.3, 0.3), 0.0);
    let p = DriveProtocol::from_schedule(Linear::new(1.0), 5.0).unwrap();
    let s = problem(&EnsembleSpec::eigenstates(), &p, &constant()).hierarchy(1).unwrap();
    let mu = s.moment(s.last(), 1);
    let closed = dissipated_work(mu, free_energy_change(&p, 1.0));
    let quad = dissipated_work(mu, free_energy_change_quadrature(&p, 1.0));
    assert!((closed - quad).abs() < 1e-9);
    assert!(closed > 0.0);
    for p in bound_protocols(5.0) {
        let s = problem(&EnsembleSpec::eigenstates(), &p, &constant()).hierarchy(1).unwrap();
        for (k, &t) in s.times().iter().enumerate().skip(1).step_by(50) {
            let df = free_energy_change(&p.with_tau(t).unwrap(), 1.0);
            let w = dissipated_work(s.moment(k, 1), df);
            assert!(w >= -1e-8, "{} t={t}: {w:e} mu={} df={df}", p.name(), s.moment(k, 1));
        }
    }
}

#[test]
fn classical_ensemble_has_no_deviation() {
    let routes = xi_routes();
    assert_eq!(routes.names(), vec!["formal-solution", "mgf-ansatz", "phi-alpha-ode"]);
    for p in bound_protocols(5.0) {
        let pr = problem(&EnsembleSpec::eigenstates(), &p, &constant());
        for name in routes.names() {
            let xi = routes.get(name).unwrap().compute(&pr).unwrap();
            assert_eq!(xi.route(), name);
            assert!(xi.xi().iter().all(|x| x.abs() < 1e-8), "{name} {}", p.name());
            let b = xi.bound().unwrap();
            assert!(b.values.iter().all(|v| v.abs() < 1e-8));
        }
    }
}

#[test]
fn routes_agree_for_coherent_ensembles() {
    let ensembles = [EnsembleSpec::plus_minus(), EnsembleSpec::polar_pair(0.25).unwrap(), EnsembleSpec::haar(16).unwrap()];
    for tau in [1.0, 5.0, 20.0] {
        for p in bound_protocols(tau) {
            for e in &ensembles {
                let pr = problem(e, &p, &constant());
                let mgf = xi_routes().get("mgf-ansatz").unwrap().compute(&pr).unwrap();
                let ode = xi_from_ode(&pr).unwrap();
                let formal = xi_formal_solution(&pr).unwrap();
                for k in 0..ode.xi().len() {
                    let x = ode.xi()[k];
                    assert!(x >= 0.0);
                    assert!((mgf.xi()[k] - x).abs() < 1e-3 * x.max(0.01), "{} {} k={k}", p.name(), e.label());
                    assert!((formal.xi()[k] - x).abs() <= 1e-6 * x.max(1e-6), "{} {}", p.name(), e.label());
                }
                assert!(ode.final_xi() > 1e-4);
            }
        }
    }
}

#[test]
fn phi_alpha_formal_solution_reproduces_xi() {
    let p = DriveProtocol::from_schedule(Tanh::new(0.5), 6.0).unwrap();
    let pr = problem(&EnsembleSpec::plus_minus(), &p, &BathSpec::ohmic(1.0, 0.3).unwrap());
    let table = phi_alpha(&pr);
    // xi(tau) = int_0^tau e^{-Phi(t)} int_0^t e^{Phi(s)} alpha(s) ds dt with Phi = int phi.
    let trap = |f: &dyn Fn(usize) -> f64, n: usize| -> Vec<f64> {
        let mut out = vec![0.0; n];
        for i in 1..n {
            out[i] = out[i - 1] + 0.5 * (table[i].t - table[i - 1].t) * (f(i) + f(i - 1));
        }
        out
    };
    let n = table.len();
    let big_phi = trap(&|i| table[i].phi, n);
    let inner = trap(&|i| big_phi[i].exp() * table[i].alpha, n);
    let outer = trap(&|i| (-big_phi[i]).exp() * inner[i], n);
    let xi = xi_from_ode(&pr).unwrap().final_xi();
    assert!(((outer[n - 1] - xi) / xi).abs() < 1e-4, "{} vs {xi}", outer[n - 1]);
}

#[test]
fn jensen_bound_holds_and_depends_on_the_decomposition() {
    for tau in [0.5, 1.0, 2.0, 5.0, 10.0, 20.0] {
        for p in bound_protocols(tau) {
            let mut bounds = Vec::new();
            let mut wdiss = Vec::new();
            for e in [EnsembleSpec::plus_minus(), EnsembleSpec::polar_pair(0.25).unwrap()] {
                let pr = problem(&e, &p, &constant());
                let s = pr.hierarchy(1).unwrap();
                let w = dissipated_work(s.moment(s.last(), 1), free_energy_change(&p, 1.0));
                let b = xi_from_ode(&pr).unwrap().bound().unwrap().final_value();
                assert!(b <= w + 1e-8, "{} tau={tau}: {b} > {w}", p.name());
                let g = pr.mgf(&[1.0]).unwrap().final_value(0);
                assert!(jarzynski_ratio(g, free_energy_change(&p, 1.0), 1.0) <= 1.0 + 1e-8);
                bounds.push(b);
                wdiss.push(w);
            }
            assert!((wdiss[0] - wdiss[1]).abs() < 1e-6);
            assert!((bounds[0] - bounds[1]).abs() > 100.0 * 1e-8, "{} tau={tau}", p.name());
        }
    }
}

#[test]
fn bound_edge_cases() {
    let zero = XiResult::new("test", 1.0, vec![0.0, 1.0], vec![0.0, 0.0], None).unwrap();
    assert_eq!(jensen_bound(&zero, 1.0).unwrap().values, vec![0.0, 0.0]);
    let near = XiResult::new("test", 2.0, vec![0.0, 1.0], vec![0.0, 1.0 - 1e-14], None).unwrap();
    let b = jensen_bound(&near, 2.0).unwrap();
    assert!(b.capped && (b.final_value() - 0.5 * 1e12f64.ln()).abs() < 1e-12);
    assert!(matches!(
        XiResult::new("test", 1.0, vec![0.0], vec![1.0], None),
        Err(FluctuationError::XiAtOne { .. })
    ));
    assert!(matches!(
        XiResult::new("test", 1.0, vec![0.0], vec![-1e-6], None),
        Err(FluctuationError::NegativeXi { .. })
    ));
    let off = EnsembleSpec::discrete("off", vec![model_core::PurePrep::new(0.3, 1.0).unwrap()]).unwrap();
    let p = DriveProtocol::from_schedule(Linear::new(1.0), 1.0).unwrap();
    assert!(matches!(
        xi_from_ode(&problem(&off, &p, &constant())),
        Err(FluctuationError::NotEquilibrium { .. })
    ));
}

#[test]
fn closed_form_variance_matches_the_hierarchy() {
    let tau = 5.0;
    let protocols = vec![
        DriveProtocol::from_schedule(Linear::new(0.5), tau).unwrap(),
        DriveProtocol::from_schedule(Power::new(1.0, 0.5), tau).unwrap(),
        DriveProtocol::from_schedule(Power::new(1.0, 1.0 / 3.0), tau).unwrap(),
        DriveProtocol::from_schedule(Tanh::new(2.0), tau).unwrap(),
        DriveProtocol::from_schedule(Ramp::new(2.0, tau), tau).unwrap(),
    ];
    for p in &protocols {
        for bath in [constant(), BathSpec::ohmic(1.0, 0.1).unwrap()] {
            let mut totals = Vec::new();
            for e in [EnsembleSpec::eigenstates(), EnsembleSpec::plus_minus(), EnsembleSpec::haar(16).unwrap()] {
                let pr = problem(&e, p, &bath);
                let s = pr.hierarchy(2).unwrap();
                let v = variance_closed_form(&pr, &s).unwrap();
                let h = s.variance(s.last());
                assert!(((v.total - h) / h).abs() < 1e-4, "{} {}: {} vs {h}", p.name(), e.label(), v.total);
                if e.is_classical() {
                    assert_eq!(v.coherent, 0.0);
                } else {
                    assert!(v.coherent > 0.0);
                }
                totals.push(v.total);
            }
            assert!(totals[0] > totals[1] && totals[0] > totals[2]);
        }
    }
    let frozen = DriveProtocol::from_schedule(Frozen::new(0.7), 3.0).unwrap();
    let pr = problem(&EnsembleSpec::plus_minus(), &frozen, &constant());
    let v = variance_closed_form(&pr, &pr.hierarchy(1).unwrap()).unwrap();
    assert_eq!((v.total, v.classical, v.coherent), (0.0, 0.0, 0.0));
}

#[test]
fn closed_form_variance_survives_near_jumps() {
    // Plateaus joined by ramps a millionth of an interval wide, as the
    // erasure optimizer produces.
    let knots = vec![(0.0, 0.0), (1e-6, 0.8), (2.0, 0.8), (2.0 + 2e-6, 1.9), (4.0, 1.9), (4.0 + 2e-6, 3.0), (5.0, 3.0)];
    let p = DriveProtocol::from_schedule(model_core::PiecewiseLinear::new(knots).unwrap(), 5.0).unwrap();
    for e in [EnsembleSpec::eigenstates(), EnsembleSpec::plus_minus()] {
        let pr = problem(&e, &p, &constant());
        let s = pr.hierarchy(2).unwrap();
        let v = variance_closed_form(&pr, &s).unwrap().total;
        let h = s.variance(s.last());
        assert!(((v - h) / h).abs() < 1e-4, "{}: {v} vs {h}", e.label());
    }
}

#[test]
fn classical_fdr_defect_vanishes_for_slow_drives() {
    let family = |tau: f64| DriveProtocol::from_schedule(Ramp::new(1.0, tau), tau);
    let taus = [10.0, 20.0, 40.0, 80.0, 160.0];
    let r = fdr_scan(&EnsembleSpec::eigenstates(), &family, &constant(), &taus, SolverSettings::default()).unwrap();
    for w in r.rows.windows(2) {
        assert!(w[1].d_cl.abs() < w[0].d_cl.abs(), "{:?}", r.rows);
    }
    for row in &r.rows {
        assert_eq!(row.prediction, 0.0);
        assert!((row.sigma2_rate - row.sigma2_rate_stencil).abs() < 1e-4 * row.sigma2_rate.abs().max(1e-6));
    }
    assert!(model_core::relaxation_time(0.0, &constant()) == 0.0);
}

#[test]
fn slow_cumulants_vanish_classically() {
    let p = DriveProtocol::from_schedule(Ramp::new(1.0, 50.0), 50.0).unwrap();
    let pr = problem(&EnsembleSpec::eigenstates(), &p, &constant());
    let s = slow_cumulant_rates(&pr, &pr.hierarchy(2).unwrap()).unwrap();
    assert!(s.kappa3_rate.iter().chain(&s.kappa4_rate).all(|&v| v == 0.0));
    assert_eq!(pr.kernels().source_moment(0, 10).gg, 0.0);
}

#[test]
fn consistency_report_for_classical_ensembles_and_short_runs() {
    let family = |tau: f64| DriveProtocol::from_schedule(Linear::new(0.1), tau);
    let rows = xi_cumulant_consistency(&EnsembleSpec::eigenstates(), &family, &constant(), &[5.0, 200.0], SolverSettings::default())
        .unwrap();
    for r in &rows {
        assert!(r.lhs.abs() < 1e-12 && r.rhs == 0.0);
    }
    assert!(!rows[0].in_regime && rows[1].in_regime);
}

fn ohmic_ramp(tau: f64) -> (DriveProtocol, BathSpec) {
    (
        DriveProtocol::from_schedule(Ramp::new(1.0, tau), tau).unwrap(),
        BathSpec::ohmic(1.0, 0.1).unwrap(),
    )
}

#[test]
#[ignore = "fails: the classical defect (about 4e-6) swamps the predicted coherent term (about 1e-9) at tau = 100"]
fn coherent_fdr_defect_matches_the_slow_driving_prediction() {
    let family = |tau: f64| Ok(ohmic_ramp(tau).0);
    let r = fdr_scan(&EnsembleSpec::plus_minus(), &family, &ohmic_ramp(1.0).1, &[100.0], SolverSettings::default())
        .unwrap();
    let ratio = r.rows[0].ratio();
    assert!((ratio - 1.0).abs() < 0.1, "{ratio}");
}

#[test]
#[ignore = "fails: the integrated slow-driving rate gives 4e-6 against a hierarchy third cumulant of 6e-4 at tau = 100"]
fn integrated_slow_third_cumulant_matches_the_hierarchy() {
    let (p, bath) = ohmic_ramp(100.0);
    let pr = problem(&EnsembleSpec::plus_minus(), &p, &bath);
    let s = pr.hierarchy(4).unwrap();
    let slow = *slow_cumulant_rates(&pr, &s).unwrap().kappa3.last().unwrap();
    let k3 = s.cumulants(s.last())[2];
    assert!(((slow - k3) / k3).abs() < 0.1, "{slow} vs {k3}");
}
