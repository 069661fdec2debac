use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Row or column label of a [`TwoByTwo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Excited,
    Ground,
}

/// Real 2x2 matrix in the (e, g) basis.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TwoByTwo {
    pub ee: f64,
    pub eg: f64,
    pub ge: f64,
    pub gg: f64,
}

impl TwoByTwo {
    pub const ZERO: TwoByTwo = TwoByTwo {
        ee: 0.0,
        eg: 0.0,
        ge: 0.0,
        gg: 0.0,
    };

    pub const fn new(ee: f64, eg: f64, ge: f64, gg: f64) -> Self {
        TwoByTwo { ee, eg, ge, gg }
    }

    pub const fn diag(e: f64, g: f64) -> Self {
        TwoByTwo::new(e, 0.0, 0.0, g)
    }

    pub fn get(&self, row: Level, col: Level) -> f64 {
        match (row, col) {
            (Level::Excited, Level::Excited) => self.ee,
            (Level::Excited, Level::Ground) => self.eg,
            (Level::Ground, Level::Excited) => self.ge,
            (Level::Ground, Level::Ground) => self.gg,
        }
    }

    /// Sum of all four entries.
    pub fn sum(&self) -> f64 {
        self.ee + self.eg + self.ge + self.gg
    }

    /// `[row e, row g]` sums.
    pub fn row_sums(&self) -> [f64; 2] {
        [self.ee + self.eg, self.ge + self.gg]
    }

    pub fn is_finite(&self) -> bool {
        self.ee.is_finite() && self.eg.is_finite() && self.ge.is_finite() && self.gg.is_finite()
    }

    pub fn max_abs_diff(&self, other: &TwoByTwo) -> f64 {
        (self.ee - other.ee)
            .abs()
            .max((self.eg - other.eg).abs())
            .max((self.ge - other.ge).abs())
            .max((self.gg - other.gg).abs())
    }
}

impl Add for TwoByTwo {
    type Output = TwoByTwo;
    fn add(self, o: TwoByTwo) -> TwoByTwo {
        TwoByTwo::new(self.ee + o.ee, self.eg + o.eg, self.ge + o.ge, self.gg + o.gg)
    }
}

impl AddAssign for TwoByTwo {
    fn add_assign(&mut self, o: TwoByTwo) {
        *self = *self + o;
    }
}

impl Sub for TwoByTwo {
    type Output = TwoByTwo;
    fn sub(self, o: TwoByTwo) -> TwoByTwo {
        self + (-o)
    }
}

impl Neg for TwoByTwo {
    type Output = TwoByTwo;
    fn neg(self) -> TwoByTwo {
        self * -1.0
    }
}

impl Mul<f64> for TwoByTwo {
    type Output = TwoByTwo;
    fn mul(self, s: f64) -> TwoByTwo {
        TwoByTwo::new(self.ee * s, self.eg * s, self.ge * s, self.gg * s)
    }
}

impl Mul for TwoByTwo {
    type Output = TwoByTwo;
    fn mul(self, o: TwoByTwo) -> TwoByTwo {
        TwoByTwo::new(
            self.ee * o.ee + self.eg * o.ge,
            self.ee * o.eg + self.eg * o.gg,
            self.ge * o.ee + self.gg * o.ge,
            self.ge * o.eg + self.gg * o.gg,
        )
    }
}
