use serde::{Deserialize, Serialize};

use super::ScatteringError;

/// Depth of the deep square-well preset.
pub const FIG5_DEPTH: f64 = 992.25;
/// Full width of the deep square-well preset.
pub const FIG5_WIDTH: f64 = 20.0;

/// Piecewise-constant potential vanishing outside `[x_0, x_n]`.
///
/// `values[0]` applies left of `breakpoints[0]`, `values[j]` between
/// `breakpoints[j - 1]` and `breakpoints[j]`, and the last value right of the last
/// breakpoint. Both outer values are zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewisePotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self, ScatteringError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(ScatteringError::InvalidPotential(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(ScatteringError::InvalidPotential("non-finite entry".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ScatteringError::InvalidPotential("breakpoints must be strictly increasing".into()));
        }
        if values[0] != 0.0 || values[values.len() - 1] != 0.0 {
            return Err(ScatteringError::InvalidPotential("outermost values must be exactly zero".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn free() -> Self {
        Self { breakpoints: Vec::new(), values: vec![0.0] }
    }

    /// Constant `height` on `[-width/2, width/2]`.
    pub fn centered_step(height: f64, width: f64) -> Result<Self, ScatteringError> {
        if !(width > 0.0) {
            return Err(ScatteringError::InvalidPotential("width must be positive".into()));
        }
        Self::new(vec![-0.5 * width, 0.5 * width], vec![0.0, height, 0.0])
    }

    pub fn square_well(depth: f64, width: f64) -> Result<Self, ScatteringError> {
        Self::centered_step(-depth, width)
    }

    pub fn square_barrier(height: f64, width: f64) -> Result<Self, ScatteringError> {
        Self::centered_step(height, width)
    }

    /// Well of depth 992.25 and width 20 centred at the origin.
    pub fn fig5_well() -> Self {
        Self::square_well(FIG5_DEPTH, FIG5_WIDTH).expect("preset is valid")
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Left edge of the interaction region (0 for the free potential).
    pub fn left_edge(&self) -> f64 {
        self.breakpoints.first().copied().unwrap_or(0.0)
    }

    pub fn right_edge(&self) -> f64 {
        self.breakpoints.last().copied().unwrap_or(0.0)
    }

    /// Cutoff radius ζ = max |breakpoint|.
    pub fn cutoff(&self) -> f64 {
        self.breakpoints.iter().fold(0.0, |m, b| m.max(b.abs()))
    }

    /// Interior segments as `(left, right, value)`.
    pub fn interior(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.breakpoints.windows(2).zip(self.values[1..].iter()).map(|(w, v)| (w[0], w[1], *v))
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::min)
    }

    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn segment_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|b| *b <= x)
    }

    /// Value at `x`; a point on a breakpoint takes the value to its right.
    pub fn value_at(&self, x: f64) -> f64 {
        self.values[self.segment_index(x)]
    }

    /// Value at `x`, averaging the two sides when `x` sits on a breakpoint.
    pub fn value_at_averaged(&self, x: f64) -> f64 {
        match self.breakpoints.iter().position(|b| *b == x) {
            Some(j) => 0.5 * (self.values[j] + self.values[j + 1]),
            None => self.value_at(x),
        }
    }

    /// Same potential with an extra breakpoint at `x` that leaves the profile unchanged.
    pub fn split_at(&self, x: f64) -> Result<Self, ScatteringError> {
        if self.breakpoints.contains(&x) {
            return Ok(self.clone());
        }
        let j = self.segment_index(x);
        let mut breakpoints = self.breakpoints.clone();
        let mut values = self.values.clone();
        breakpoints.insert(j, x);
        values.insert(j, self.values[j]);
        Self::new(breakpoints, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_malformed_input() {
        assert!(PiecewisePotential::new(vec![0.0, 1.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewisePotential::new(vec![1.0, 0.0], vec![0.0, 1.0, 0.0]).is_err());
        assert!(PiecewisePotential::new(vec![0.0, 1.0], vec![0.5, 1.0, 0.0]).is_err());
        assert!(PiecewisePotential::new(vec![0.0, 1.0], vec![0.0, f64::NAN, 0.0]).is_err());
    }

    #[test]
    fn lookup_and_cutoff() {
        let v = PiecewisePotential::new(vec![-3.0, 0.0, 2.0], vec![0.0, -1.0, 4.0, 0.0]).unwrap();
        assert_eq!(v.cutoff(), 3.0);
        assert_eq!(v.value_at(-5.0), 0.0);
        assert_eq!(v.value_at(-1.0), -1.0);
        assert_eq!(v.value_at(0.0), 4.0);
        assert_eq!(v.value_at_averaged(0.0), 1.5);
        assert_eq!(v.value_at(2.0), 0.0);
        let segs: Vec<_> = v.interior().collect();
        assert_eq!(segs, vec![(-3.0, 0.0, -1.0), (0.0, 2.0, 4.0)]);
    }

    #[test]
    fn split_keeps_profile() {
        let v = PiecewisePotential::fig5_well();
        let s = v.split_at(3.0).unwrap();
        assert_eq!(s.breakpoints(), &[-10.0, 3.0, 10.0]);
        for x in [-11.0, -10.0, -2.0, 3.0, 9.9, 10.0, 12.0] {
            assert_eq!(v.value_at(x), s.value_at(x));
        }
    }
}
