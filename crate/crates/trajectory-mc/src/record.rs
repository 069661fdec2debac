#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpDirection {
    ToGround,
    ToExcited,
}

impl JumpDirection {
    pub fn label(self) -> &'static str {
        match self {
            JumpDirection::ToGround => "jump_g",
            JumpDirection::ToExcited => "jump_e",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub t: f64,
    pub direction: JumpDirection,
    /// Work accumulated before the jump.
    pub work: f64,
    /// Heat accumulated including the jump.
    pub heat: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalState {
    Ground,
    Excited,
    Superposition(f64),
}

impl FinalState {
    pub fn p_e(self) -> f64 {
        match self {
            FinalState::Ground => 0.0,
            FinalState::Excited => 1.0,
            FinalState::Superposition(p) => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    /// Index into a discrete ensemble; `None` for continuous ensembles.
    pub prep_index: Option<usize>,
    pub p_e: f64,
    pub jumps: Vec<Jump>,
    pub work: f64,
    pub heat: f64,
    pub final_state: FinalState,
    pub seed: u64,
    pub stream: u64,
}

impl TrajectoryRecord {
    pub fn first_jump(&self) -> Option<f64> {
        self.jumps.first().map(|j| j.t)
    }

    /// `U(tau) - U(0)` with `U = p_e E`.
    pub fn internal_energy_change(&self, e_start: f64, e_end: f64) -> f64 {
        self.final_state.p_e() * e_end - self.p_e * e_start
    }
}
