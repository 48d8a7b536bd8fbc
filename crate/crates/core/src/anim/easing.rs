use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Easing {
    Linear,
    SmoothStep,
    /// Keeps the previous value until the key is reached.
    Hold,
}

/// Reparameterizes normalized time `u` in `[0, 1]`.
pub fn easing_eval(kind: Easing, u: f64) -> f64 {
    match kind {
        Easing::Linear => u,
        Easing::SmoothStep => 3.0 * u * u - 2.0 * u * u * u,
        Easing::Hold => {
            if u < 1.0 {
                0.0
            } else {
                1.0
            }
        }
    }
}
