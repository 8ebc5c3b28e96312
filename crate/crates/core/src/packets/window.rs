//! Smooth compactly supported window whose integer translates square-sum to one.

use std::f64::consts::FRAC_PI_2;

/// `e^{−1/x}` for `x > 0`, else `0`.
fn edge(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step: `0` for `x ≤ 0`, `1` for `x ≥ 1`, `ρ(x) + ρ(1 − x) = 1`.
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = edge(x);
        a / (a + edge(1.0 - x))
    }
}

/// One-dimensional partition function `b = ψ²`: `1` at the origin, `0` on
/// `|u| ≥ 1`, and `Σ_m b(u − m) = 1` for every `u`.
pub fn partition(u: f64) -> f64 {
    Window.value(u).powi(2)
}

/// Half-width of the window's support, in units of the cube side.
pub const SUPPORT_HALF_WIDTH: f64 = 1.0;

/// `ψ(u) = cos(π/2 · ρ(|u|))`, so `ψ(u)² + ψ(1 − u)² = 1` on `[0, 1]` and
/// `Σ_m ψ(u − m)² = 1`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Window;

impl Window {
    pub fn value(&self, u: f64) -> f64 {
        let s = smooth_step(u.abs());
        if s >= 1.0 {
            0.0
        } else {
            (FRAC_PI_2 * s).cos()
        }
    }

    /// Tensor product over the axes.
    pub fn value_nd(&self, u: &[f64]) -> f64 {
        u.iter().map(|v| self.value(*v)).product()
    }
}

pub fn build_window() -> Window {
    Window
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn center_and_support() {
        let w = build_window();
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(1.0), 0.0);
        assert_eq!(w.value(-1.1), 0.0);
        assert!((w.value(0.5) - (FRAC_PI_2 / 2.0).cos()).abs() < 1e-15);
        assert!(w.value(0.9) > 0.0 && w.value(0.9) < w.value(0.1));
    }

    #[test]
    fn squares_partition_unity() {
        let w = build_window();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let u: [f64; 2] = [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)];
            let mut sum = 0.0;
            let base = [u[0].floor() as i64, u[1].floor() as i64];
            for a in -2..=2 {
                for b in -2..=2 {
                    let c = [(base[0] + a) as f64, (base[1] + b) as f64];
                    sum += w.value_nd(&[u[0] - c[0], u[1] - c[1]]).powi(2);
                }
            }
            worst = worst.max((sum - 1.0).abs());
        }
        assert!(worst < 1e-10);
    }

    #[test]
    fn step_symmetry() {
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            assert!((smooth_step(x) + smooth_step(1.0 - x) - 1.0).abs() < 1e-15);
        }
    }
}
