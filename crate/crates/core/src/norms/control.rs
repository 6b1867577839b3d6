use std::fmt;
use std::sync::Arc;

use crate::error::{arg, Error, Result};
use crate::paths::{Path, TimeGrid};
use crate::quadrature::GaussRule;

use super::besov::{besov_integral_on, BesovParams};

/// Where a control came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlKind {
    BesovDerived,
    PlSurrogate,
    User,
}

/// A function `ω(s, t)` on `domain.0 <= s <= t <= domain.1`, expected to be
/// superadditive and to vanish on the diagonal. Arguments outside the domain
/// are clamped into it.
#[derive(Clone)]
pub struct Control {
    rule: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    kind: ControlKind,
    domain: (f64, f64),
}

impl fmt::Debug for Control {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Control")
            .field("kind", &self.kind)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl Control {
    pub fn new(
        kind: ControlKind,
        domain: (f64, f64),
        rule: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self { rule: Arc::new(rule), kind, domain }
    }

    pub fn user(domain: (f64, f64), rule: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(ControlKind::User, domain, rule)
    }

    pub fn kind(&self) -> ControlKind {
        self.kind
    }

    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        let (lo, hi) = self.domain;
        let (s, t) = (s.clamp(lo, hi), t.clamp(lo, hi));
        if t <= s {
            return 0.0;
        }
        (self.rule)(s, t)
    }

    /// `ω(s, u) + ω(u, t) - ω(s, t)`; superadditivity means this is `<= 0`.
    pub fn superadditivity_excess(&self, s: f64, u: f64, t: f64) -> f64 {
        self.eval(s, u) + self.eval(u, t) - self.eval(s, t)
    }
}

/// `ω_f(s, t) = ||f||^p_{B^r_p([s,t])}` with the multiplicative constant set to 1.
pub fn control_from_besov(f: &Path, r: f64, p: f64) -> Result<Control> {
    BesovParams::new(r, p)?;
    let g = f.grid();
    let f = f.clone();
    Ok(Control::new(ControlKind::BesovDerived, (g.start(), g.end()), move |s, t| {
        besov_integral_on(&f, r, p, s, t).unwrap_or(f64::NAN)
    }))
}

/// The piecewise control `ω^D` attached to `ω` and a partition `D`:
///
/// * inside one cell, `((t - s) / (t_{i+1} - t_i))^{p(1-r)+1} ω(t_i, t_{i+1})`;
/// * across cells, `ω^D(s, t_{i+1}) + ω(t_{i+1}, t_j) + ω^D(t_j, t)`.
pub fn pl_control(omega: &Control, partition: &TimeGrid, p: f64, r: f64) -> Result<Control> {
    let e = p * (1.0 - r) + 1.0;
    if !(e >= 1.0) || !e.is_finite() {
        return arg(format!("need p(1 - r) + 1 >= 1, got p = {p}, r = {r}"));
    }
    let (lo, hi) = omega.domain();
    let tol = 1e-12 * (hi - lo).abs().max(1.0);
    if partition.start() < lo - tol || partition.end() > hi + tol {
        return Err(Error::Domain(format!(
            "partition [{}, {}] is not inside the control domain [{lo}, {hi}]",
            partition.start(),
            partition.end()
        )));
    }
    let pts = partition.points().to_vec();
    let cell: Vec<f64> = pts.windows(2).map(|w| omega.eval(w[0], w[1])).collect();
    let base = omega.clone();
    let span = (partition.start(), partition.end());
    let grid = partition.clone();
    Ok(Control::new(ControlKind::PlSurrogate, span, move |s, t| {
        let within = |i: usize, a: f64, b: f64| {
            let h = pts[i + 1] - pts[i];
            ((b - a) / h).powf(e) * cell[i]
        };
        let i = grid.locate(s);
        if t <= pts[i + 1] {
            return within(i, s, t);
        }
        // Last grid index not after t.
        let j = pts.partition_point(|&x| x <= t) - 1;
        let mut total = within(i, s, pts[i + 1]);
        if j > i + 1 {
            total += base.eval(pts[i + 1], pts[j]);
        }
        if t > pts[j] {
            total += within(j, pts[j], t);
        }
        total
    }))
}

/// `(∫_0^{T-h} ω(t, t+h) dt, ω(0, T) h)` with time measured from the control's
/// domain start. The elementary estimate says the first is at most the second.
pub fn control_integral_check(omega: &Control, h: f64, horizon: f64) -> Result<(f64, f64)> {
    if !(h > 0.0 && h < horizon) {
        return arg(format!("need 0 < h < T, got h = {h}, T = {horizon}"));
    }
    let t0 = omega.domain().0;
    let rule = GaussRule::new(4);
    let lhs = rule.composite(t0, t0 + horizon - h, 64, |t| omega.eval(t, t + h));
    Ok((lhs, omega.eval(t0, t0 + horizon) * h))
}
