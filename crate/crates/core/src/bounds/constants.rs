//! The constants `C̃(α, β) = sup_{x ≥ 0} h_{α,β}(x)` and `C(α) = C̃(α, ½)`.
//!
//! `h_{α,β}(x) = ((α+x)^β / (1+x)) · (x / (α+1+x)^β + 1/α^β)`.
//!
//! The supremum is found by sampling `h` on `x = 0` plus a geometric grid
//! wide enough to contain every interior maximizer, refining each grid-local
//! maximum by golden-section search and then by bisection on `h'`. As
//! `x → ∞`, `h` tends to `1` for `β < 1` and to `1 + 1/α` for `β = 1`; when
//! the limit beats every finite candidate the supremum is reported as not
//! attained.

use serde::Serialize;

use crate::error::{Error, Result};

const GRID_MIN: f64 = 1e-9;
const GRID_DECADES_ABOVE_ALPHA: f64 = 12.0;
const POINTS_PER_DECADE: usize = 40;
const GOLDEN_REL_TOL: f64 = 1e-12;
const MAX_REFINEMENTS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantResult {
    pub alpha: f64,
    pub beta: f64,
    pub value: f64,
    /// Location of the supremum; `f64::INFINITY` when it is only a limit.
    #[serde(serialize_with = "finite_or_null")]
    pub maximizer: f64,
    pub attained: bool,
    /// `|quintic(maximizer)|` over the largest coefficient magnitude; only
    /// for `β = ½` with an attained maximum.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quintic_residual: Option<f64>,
}

fn finite_or_null<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_none()
    }
}

fn check_alpha_beta(alpha: f64, beta: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, inf)",
        });
    }
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::Domain {
            name: "beta",
            value: beta,
            domain: "(0, 1]",
        });
    }
    Ok(())
}

/// `h_{α,β}(x)`, evaluated as `x/(1+x)·(1 − 1/(α+1+x))^β + (1 + x/α)^β/(1+x)`.
pub fn h_alpha_beta(alpha: f64, beta: f64, x: f64) -> f64 {
    let tail = x / (1.0 + x) * (1.0 - 1.0 / (alpha + 1.0 + x)).powf(beta);
    let head = (1.0 + x / alpha).powf(beta) / (1.0 + x);
    tail + head
}

fn h_derivative(alpha: f64, beta: f64, x: f64) -> f64 {
    let tail_over_x = (1.0 - 1.0 / (alpha + 1.0 + x)).powf(beta) / (1.0 + x);
    let log_slope = beta / (alpha + x) - 1.0 / (1.0 + x);
    let tail = tail_over_x * (1.0 + x * (log_slope - beta / (alpha + 1.0 + x)));
    let head = (1.0 + x / alpha).powf(beta) / (1.0 + x) * log_slope;
    tail + head
}

fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if b - a <= GOLDEN_REL_TOL * b.abs().max(1.0) {
            break;
        }
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

/// Root of a decreasing sign change of `g` in `[a, b]`.
fn bisect_decreasing(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        if g(mid) > 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

/// `C̃(α, β)` with its maximizer.
pub fn c_tilde(alpha: f64, beta: f64) -> Result<ConstantResult> {
    check_alpha_beta(alpha, beta)?;
    let h = |x: f64| h_alpha_beta(alpha, beta, x);

    let top = GRID_DECADES_ABOVE_ALPHA + (1.0 + alpha).log10();
    let decades = top - GRID_MIN.log10();
    let count = (decades * POINTS_PER_DECADE as f64).ceil() as usize;
    let mut grid = Vec::with_capacity(count + 2);
    grid.push(0.0);
    grid.extend((0..=count).map(|i| GRID_MIN * 10f64.powf(decades * i as f64 / count as f64)));
    let values: Vec<f64> = grid.iter().map(|&x| h(x)).collect();

    let mut best_x = 0.0;
    let mut best = values[0];
    let mut peaks: Vec<usize> = (1..grid.len() - 1)
        .filter(|&i| values[i] >= values[i - 1] && values[i] >= values[i + 1])
        .collect();
    peaks.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    for &i in peaks.iter().take(MAX_REFINEMENTS) {
        let (lo, hi) = (grid[i - 1], grid[i + 1]);
        let slope = |x: f64| h_derivative(alpha, beta, x);
        // near the peak h is flat to rounding, so prefer the root of h'
        let refined = if slope(lo) > 0.0 && slope(hi) < 0.0 {
            bisect_decreasing(slope, lo, hi)
        } else {
            golden_section_max(h, lo, hi)
        };
        for x in [refined, grid[i]] {
            let v = h(x);
            if v > best {
                best = v;
                best_x = x;
            }
        }
    }
    let last = grid.len() - 1;
    if values[last] > best {
        best = values[last];
        best_x = grid[last];
    }

    let limit = if beta == 1.0 { 1.0 + 1.0 / alpha } else { 1.0 };
    if limit > best {
        return Ok(ConstantResult {
            alpha,
            beta,
            value: limit,
            maximizer: f64::INFINITY,
            attained: false,
            quintic_residual: None,
        });
    }

    let quintic_residual = (beta == 0.5).then(|| quintic_residual(alpha, best_x));
    Ok(ConstantResult {
        alpha,
        beta,
        value: best,
        maximizer: best_x,
        attained: true,
        quintic_residual,
    })
}

/// `C(α) = C̃(α, ½)`.
pub fn c_of_alpha(alpha: f64) -> Result<ConstantResult> {
    c_tilde(alpha, 0.5)
}

/// Coefficients, in ascending powers of `x`, of the quintic whose root is
/// the maximizer of `h_{a,½}`.
pub fn quintic_coefficients(a: f64) -> [f64; 6] {
    [
        (1.0 + a).powi(2) * (1.0 - 3.0 * a),
        (1.0 + a) * (1.0 - 9.0 * a - 6.0 * a * a),
        -(2.0 + 15.0 * a + 15.0 * a * a + 3.0 * a.powi(3)),
        -(2.0 + 10.0 * a + 5.0 * a * a),
        1.0 - 2.0 * a,
        1.0,
    ]
}

pub fn quintic(a: f64, x: f64) -> f64 {
    quintic_coefficients(a)
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + c)
}

/// `|quintic(a, x)|` scaled by the largest coefficient magnitude.
pub fn quintic_residual(a: f64, x: f64) -> f64 {
    let scale = quintic_coefficients(a)
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    quintic(a, x).abs() / scale
}
