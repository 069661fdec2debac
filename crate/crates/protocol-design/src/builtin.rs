use model_core::{
    DriveProtocol, Frozen, Linear, ModelError, PiecewiseLinear, Power, Ramp, Registry, Result, Tanh,
};

/// Builds a named protocol from numeric parameters.
pub trait ProtocolFactory: Send + Sync {
    fn describe(&self) -> &str;
    /// Number of parameters, or `None` for a variable-length list.
    fn arity(&self) -> Option<usize>;
    fn build(&self, params: &[f64], tau: f64) -> Result<DriveProtocol>;
}

struct FnProtocol {
    about: &'static str,
    arity: Option<usize>,
    build: fn(&[f64], f64) -> Result<DriveProtocol>,
}

impl ProtocolFactory for FnProtocol {
    fn describe(&self) -> &str {
        self.about
    }

    fn arity(&self) -> Option<usize> {
        self.arity
    }

    fn build(&self, params: &[f64], tau: f64) -> Result<DriveProtocol> {
        if let Some(n) = self.arity {
            if params.len() != n {
                return Err(ModelError::invalid(
                    "protocol.params",
                    format!("expected {n} parameter(s), got {}", params.len()),
                ));
            }
        }
        (self.build)(params, tau)
    }
}

fn piecewise(params: &[f64], tau: f64) -> Result<DriveProtocol> {
    if params.len() % 2 != 0 {
        return Err(ModelError::invalid("protocol.params", "piecewise needs (t, E) pairs"));
    }
    let knots = params.chunks(2).map(|c| (c[0], c[1])).collect();
    DriveProtocol::from_schedule(PiecewiseLinear::new(knots)?, tau)
}

/// `linear(c)`, `power(c, p)`, `tanh(a)`, `ramp(E_f)`, `constant(E)` and
/// `piecewise(t0, E0, t1, E1, ...)`.
pub fn protocol_registry() -> Registry<dyn ProtocolFactory> {
    let mut r: Registry<dyn ProtocolFactory> = Registry::new("protocol");
    let entries: [(&str, &'static str, Option<usize>, fn(&[f64], f64) -> Result<DriveProtocol>); 6] = [
        ("linear", "E = c t", Some(1), |p, tau| DriveProtocol::from_schedule(Linear::new(p[0]), tau)),
        ("power", "E = c t^p", Some(2), |p, tau| DriveProtocol::from_schedule(Power::new(p[0], p[1]), tau)),
        ("tanh", "E = tanh(a t)", Some(1), |p, tau| DriveProtocol::from_schedule(Tanh::new(p[0]), tau)),
        ("ramp", "E = E_f t / tau", Some(1), |p, tau| DriveProtocol::from_schedule(Ramp::new(p[0], tau), tau)),
        ("constant", "E held fixed", Some(1), |p, tau| DriveProtocol::from_schedule(Frozen::new(p[0]), tau)),
        ("piecewise", "linear between (t, E) knots", None, piecewise),
    ];
    for (name, about, arity, build) in entries {
        r.register(name, Box::new(FnProtocol { about, arity, build }));
    }
    r
}

pub fn builtin_protocol(name: &str, params: &[f64], tau: f64) -> Result<DriveProtocol> {
    protocol_registry().get(name)?.build(params, tau)
}
