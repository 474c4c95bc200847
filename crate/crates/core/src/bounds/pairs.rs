//! Closed forms for the pair mixture of four Bernoulli laws,
//! `R = ½(Be(a) * Be(b) + Be(c) * Be(d))`.
//!
//! With `u = a+b+c+d`, `v = ab+cd` and `w = u/2 − v`, the mixture is
//! `(1 − w − v/2) δ_0 + w δ_1 + (v/2) δ_2`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BernoulliPairStats {
    pub u: f64,
    pub v: f64,
    /// `R({1})`.
    pub w: f64,
    /// `min{w, 1 − w}`.
    pub tau: f64,
    /// Variance of `R`.
    pub sigma2: f64,
    /// `d_TV(R, δ_1 * R)`.
    pub tv_smooth: f64,
    /// `Q(R; 0)`.
    pub conc0: f64,
}

pub fn bernoulli_pair_stats(a: f64, b: f64, c: f64, d: f64) -> Result<BernoulliPairStats> {
    for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                name,
                value: x,
                domain: "[0, 1]",
            });
        }
    }
    Ok(stats_unchecked(a, b, c, d))
}

pub(crate) fn stats_unchecked(a: f64, b: f64, c: f64, d: f64) -> BernoulliPairStats {
    let u = a + b + c + d;
    let v = a * b + c * d;
    let w = u / 2.0 - v;
    BernoulliPairStats {
        u,
        v,
        w,
        tau: w.min(1.0 - w),
        sigma2: u / 2.0 + v - u * u / 4.0,
        tv_smooth: 0.5 * (1.0 - w) + 0.25 * (2.0 - 4.0 * w - v).abs() + 0.25 * (2.0 * w - v).abs(),
        conc0: (1.0 - w - v / 2.0).max(w).max(v / 2.0),
    }
}

impl BernoulliPairStats {
    /// Masses of `R` at `0, 1, 2`.
    pub fn masses(&self) -> [f64; 3] {
        [1.0 - self.w - self.v / 2.0, self.w, self.v / 2.0]
    }

    /// `1 − d_TV(R, δ_1 * R)` from the four-case piecewise formula.
    pub fn one_minus_tv_piecewise(&self) -> f64 {
        let (w2, v) = (2.0 * self.w, self.v);
        let upper = 1.0 - v / 2.0;
        if w2 <= v.min(upper) {
            w2
        } else if w2 >= v.max(upper) {
            1.0 - self.w
        } else if v <= upper {
            self.w + v / 2.0
        } else {
            1.0 - v / 2.0
        }
    }

    /// `1 − Q(R; 0) = min{(u − v)/2, 1 − u/2 + v, 1 − v/2}`.
    pub fn one_minus_conc0_alt(&self) -> f64 {
        let (u, v) = (self.u, self.v);
        ((u - v) / 2.0).min(1.0 - u / 2.0 + v).min(1.0 - v / 2.0)
    }

    /// Slacks `rhs − lhs` of every inequality satisfied by a Bernoulli pair
    /// mixture, labelled. All are nonnegative in exact arithmetic.
    pub fn inequality_slacks(&self) -> [(&'static str, f64); 8] {
        let nu = 1.0 - self.tv_smooth;
        let zeta = 1.0 - self.conc0;
        let (u, v, w) = (self.u, self.v, self.w);
        [
            ("tv_lower: min{w,1-w} <= 1-tv", nu - w.min(1.0 - w)),
            ("tv_upper: 1-tv <= min{2w,1-w}", (2.0 * w).min(1.0 - w) - nu),
            ("conc_lower: sigma2/2 <= 1-conc0", zeta - self.sigma2 / 2.0),
            ("conc_upper: 1-conc0 <= 2 sigma2", 2.0 * self.sigma2 - zeta),
            ("v_lower: max{u-2,0} <= v", v - (u - 2.0).max(0.0)),
            (
                "v_upper: v <= min{u^2/4, 2-u+u^2/4}",
                (u * u / 4.0).min(2.0 - u + u * u / 4.0) - v,
            ),
            ("w_range: 0 <= w", w),
            ("w_range: w <= 1", 1.0 - w),
        ]
    }
}
