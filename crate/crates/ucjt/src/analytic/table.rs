//! Cached table of the first-order weight moment W(r).
//!
//! W(r) is expensive (each value is a nested quadrature) and is consumed
//! inside a triple-nested interference integral, so it is tabulated once per
//! parameter set. Interpolation is monotone piecewise-cubic
//! (Fritsch-Carlson), which cannot overshoot: the table inherits the proved
//! properties of W — values in [0, 1] and non-increasing in r — instead of
//! merely approximating them.
//!
//! W(r) depends on r only through the clamped path loss, so it is constant
//! on [0, d0]; the interpolation grid covers [d0, C] with log spacing.

/// Monotone cubic interpolant of W over [0, C].
#[derive(Debug, Clone)]
pub struct WeightMomentTable {
    /// Grid nodes in meters, strictly increasing, spanning [d0, C]. Empty
    /// when the whole cell lies inside the clamp radius (C <= d0).
    nodes: Vec<f64>,
    /// W at each node.
    values: Vec<f64>,
    /// Fritsch-Carlson derivative at each node.
    slopes: Vec<f64>,
    /// W on the clamped region [0, d0] (equals the first node value).
    clamp_value: f64,
    /// Cell radius; queries are clamped to [0, C].
    radius_m: f64,
}

impl WeightMomentTable {
    /// Builds the interpolant from precomputed `(r, W(r))` samples. `nodes`
    /// must be strictly increasing; `values` non-increasing (weight moments
    /// are). A single sample yields a constant table.
    pub fn from_samples(nodes: Vec<f64>, values: Vec<f64>, radius_m: f64) -> Self {
        debug_assert_eq!(nodes.len(), values.len());
        debug_assert!(!values.is_empty());
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        let clamp_value = values[0];
        let slopes = fritsch_carlson_slopes(&nodes, &values);
        WeightMomentTable { nodes, values, slopes, clamp_value, radius_m }
    }

    /// Number of grid nodes.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Grid nodes (for refinement checks).
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Node values (for refinement checks).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Interpolated W at distance `r` meters. Queries are clamped to
    /// [0, C]; below the first node the exact constant value is returned.
    pub fn eval(&self, r: f64) -> f64 {
        let r = r.min(self.radius_m);
        if self.nodes.len() < 2 || r <= self.nodes[0] {
            return self.clamp_value;
        }
        let last = self.nodes.len() - 1;
        if r >= self.nodes[last] {
            return self.values[last];
        }
        // Binary search for the bracketing interval.
        let i = match self.nodes.binary_search_by(|n| n.total_cmp(&r)) {
            Ok(exact) => return self.values[exact],
            Err(insertion) => insertion - 1,
        };
        let h = self.nodes[i + 1] - self.nodes[i];
        let s = (r - self.nodes[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        // Cubic Hermite basis.
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// Fritsch-Carlson monotone slopes: secant-limited derivatives that make
/// the cubic Hermite interpolant preserve the monotonicity of the data.
fn fritsch_carlson_slopes(nodes: &[f64], values: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let h: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = values.windows(2).zip(&h).map(|(w, &hi)| (w[1] - w[0]) / hi).collect();

    let mut m = vec![0.0; n];
    // Interior: weighted harmonic mean of adjacent secants, zero at local
    // extrema (sign change).
    for i in 1..n - 1 {
        if delta[i - 1] * delta[i] <= 0.0 {
            m[i] = 0.0;
        } else {
            let w1 = 2.0 * h[i] + h[i - 1];
            let w2 = h[i] + 2.0 * h[i - 1];
            m[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
        }
    }
    // Endpoints: one-sided three-point estimate, clamped to keep shape.
    m[0] = endpoint_slope(h[0], h.get(1).copied().unwrap_or(h[0]), delta[0], delta.get(1).copied().unwrap_or(delta[0]));
    m[n - 1] = endpoint_slope(
        h[n - 2],
        if n >= 3 { h[n - 3] } else { h[n - 2] },
        delta[n - 2],
        if n >= 3 { delta[n - 3] } else { delta[n - 2] },
    );
    m
}

fn endpoint_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if m * d0 <= 0.0 {
        0.0
    } else if d0 * d1 <= 0.0 && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
