//! Brute-force evaluation of the deformed product for scalar functions of one
//! variable directly from its oscillatory-integral definition
//!
//! ```text
//! (f x g)(x) = \iint f(x + J xi) g(x + y) e^{2 pi i xi y} dxi dy
//! ```
//!
//! damped by `e^{-eps (xi^2 + y^2)}` and extrapolated to `eps -> 0`. In one
//! dimension every skew form vanishes, so the reference is the pointwise
//! product reached through a genuinely two-dimensional oscillatory integral.

use std::f64::consts::PI;

/// `\iint f(x) g(x + y) e^{2 pi i xi y} e^{-eps (xi^2 + y^2)} dxi dy` by the
/// trapezoid rule; the xi integral is done in closed form for each y so only
/// the y quadrature is numerical.
pub fn damped_product<F, G>(f: F, g: G, x: f64, eps: f64, y_max: f64, steps: usize) -> f64
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    // \int e^{2 pi i xi y} e^{-eps xi^2} dxi = sqrt(pi/eps) e^{-pi^2 y^2 / eps}
    let dy = 2.0 * y_max / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let y = -y_max + i as f64 * dy;
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        let kernel = (PI / eps).sqrt() * (-PI * PI * y * y / eps).exp() * (-eps * y * y).exp();
        acc += w * kernel * g(x + y);
    }
    f(x) * acc * dy
}

/// Same integral with both variables on a tensor trapezoid grid and no closed
/// form: `y` over `[-y_max, y_max]`, `xi` over `[-xi_max, xi_max]`. Returns the
/// values at every `x` in `xs`.
pub fn damped_product_2d<F, G>(
    f: F,
    g: G,
    xs: &[f64],
    eps: f64,
    (y_max, y_steps): (f64, usize),
    (xi_max, xi_steps): (f64, usize),
) -> Vec<f64>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let dy = 2.0 * y_max / y_steps as f64;
    let dxi = 2.0 * xi_max / xi_steps as f64;
    let trap = |i: usize, n: usize| if i == 0 || i == n { 0.5 } else { 1.0 };
    // the xi integral does not depend on x, so it is shared across all x
    let kernel: Vec<f64> = (0..=y_steps)
        .map(|i| {
            let y = -y_max + i as f64 * dy;
            let inner: f64 = (0..=xi_steps)
                .map(|j| {
                    let xi = -xi_max + j as f64 * dxi;
                    trap(j, xi_steps) * (2.0 * PI * xi * y).cos() * (-eps * xi * xi).exp()
                })
                .sum();
            trap(i, y_steps) * inner * dxi * (-eps * y * y).exp() * dy
        })
        .collect();
    xs.iter()
        .map(|&x| {
            let acc: f64 = kernel
                .iter()
                .enumerate()
                .map(|(i, w)| w * g(x - y_max + i as f64 * dy))
                .sum();
            f(x) * acc
        })
        .collect()
}

/// Richardson extrapolation to `eps -> 0` of a quantity with an expansion in
/// integer powers of `eps`, from values at `eps_0, eps_0/2, eps_0/4, ...`.
pub fn richardson(values: &[f64]) -> f64 {
    let mut table = values.to_vec();
    let mut factor = 2.0;
    for level in 1..values.len() {
        for i in 0..values.len() - level {
            table[i] = (factor * table[i + 1] - table[i]) / (factor - 1.0);
        }
        factor *= 2.0;
    }
    table[0]
}

pub type Scalar = fn(f64) -> f64;

/// Scalar pairs for the oracle comparison; smooth and of moderate decay.
pub const CASES: [(Scalar, Scalar); 5] = [
    (|x| (-x * x / 4.5).exp(), |x| (-x * x / 2.0).exp()),
    (|x| (-(x - 1.0).powi(2) / 3.0).exp() * (2.0 * x).cos(), |x| (-x * x / 2.0).exp()),
    (|x| 1.0 / (1.0 + x * x), |x| (-(x + 0.5).powi(2)).exp() * x),
    (|x| (-x * x / 8.0).exp() * (0.7 * x).sin(), |x| (-x * x / 5.0).exp() * (1.0 + x)),
    (|x| 1.0 + 0.5 * (-x * x).exp(), |x| (-x.powi(4) / 16.0).exp()),
];

/// Damped full quadrature at `eps = 0.2, 0.1, ..., 0.0125`, extrapolated.
/// The kernel is negligible beyond `|y| = 3` at these damping levels, and the
/// xi step keeps its periodic images outside that window.
pub fn oracle_product(f: Scalar, g: Scalar, xs: &[f64]) -> Vec<f64> {
    let levels: Vec<Vec<f64>> = (0..5)
        .map(|l| {
            let eps = 0.2 / (1 << l) as f64;
            damped_product_2d(f, g, xs, eps, (3.0, 600), (6.0 / eps.sqrt(), (120.0 / eps.sqrt()) as usize))
        })
        .collect();
    (0..xs.len())
        .map(|i| richardson(&levels.iter().map(|v| v[i]).collect::<Vec<_>>()))
        .collect()
}
