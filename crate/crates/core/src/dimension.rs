use alloc::string::String;

/// A dimension (or critical exponent) estimate with its bracket and method.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionResult {
    pub value: f64,
    pub bracket: (f64, f64),
    pub method: String,
    /// Never smaller than half the bracket width.
    pub error: f64,
}

impl DimensionResult {
    pub fn new(value: f64, bracket: (f64, f64), method: impl Into<String>, error: f64) -> Self {
        let half = 0.5 * (bracket.1 - bracket.0);
        DimensionResult { value, bracket, method: method.into(), error: error.max(half) }
    }

    /// A result known to lie in `[lo, hi]`, reported at the midpoint.
    pub fn from_bracket(lo: f64, hi: f64, method: impl Into<String>) -> Self {
        Self::new(0.5 * (lo + hi), (lo, hi), method, 0.5 * (hi - lo))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.bracket.0 <= x && x <= self.bracket.1
    }
}
