//! Continuous-time profile functions and the window-integral identities they
//! must satisfy to hide drift from a scheme in the limit of infinite
//! sampling rate.
//!
//! For a pair `(W1, W2)` under Lebesgue observation measure the identity is
//! `|W2| * int_{W1} f = |W1| * int_{W2} f`. The verifier evaluates both sides
//! by composite Simpson quadrature, split at every point where `f` may jump.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::{AdversarialProfile, Provenance};
use crate::error::{Error, Result};
use crate::windowing::ContinuousScheme;

pub const DEFAULT_GRID_POINTS: usize = 50;
pub const DEFAULT_QUAD_PANELS: usize = 512;
/// Minimum Simpson panels per smooth piece when `f` has jumps.
pub const MIN_PANELS_DISCONTINUOUS: usize = 4;

/// Profile on an interval `[0, len)`, extended by the owning function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum Shape {
    Constant {
        value: f64,
    },
    /// Equal-width steps across the interval.
    Steps {
        values: Vec<f64>,
    },
    /// `offset + amplitude * sin(2 pi x / len)`.
    Sine {
        offset: f64,
        amplitude: f64,
    },
}

impl Shape {
    /// Square wave: ones on the first `duty` fraction, zeros after it,
    /// expressed with `steps` equal steps.
    pub fn square(ones: usize, steps: usize) -> Self {
        Shape::Steps {
            values: (0..steps).map(|i| if i < ones { 1.0 } else { 0.0 }).collect(),
        }
    }

    fn eval(&self, x: f64, len: f64) -> f64 {
        match self {
            Shape::Constant { value } => *value,
            Shape::Steps { values } => {
                let k = values.len();
                let idx = ((x / len) * k as f64).floor();
                values[(idx.max(0.0) as usize).min(k - 1)]
            }
            Shape::Sine { offset, amplitude } => offset + amplitude * (TAU * x / len).sin(),
        }
    }

    /// Mean over `[0, len)`.
    pub fn mean(&self) -> f64 {
        match self {
            Shape::Constant { value } => *value,
            Shape::Steps { values } => values.iter().sum::<f64>() / values.len() as f64,
            Shape::Sine { offset, .. } => *offset,
        }
    }

    /// Offsets in `(0, len)` where the shape jumps.
    fn jumps(&self, len: f64) -> Vec<f64> {
        match self {
            Shape::Steps { values } => {
                let k = values.len();
                (1..k)
                    .filter(|&j| values[j] != values[j - 1])
                    .map(|j| len * j as f64 / k as f64)
                    .collect()
            }
            _ => Vec::new(),
        }
    }

    fn has_jumps(&self) -> bool {
        matches!(self, Shape::Steps { values } if values.windows(2).any(|w| w[0] != w[1]))
    }

    fn validate(&self) -> Result<()> {
        let finite = match self {
            Shape::Constant { value } => value.is_finite(),
            Shape::Steps { values } => !values.is_empty() && values.iter().all(|v| v.is_finite()),
            Shape::Sine { offset, amplitude } => offset.is_finite() && amplitude.is_finite(),
        };
        if finite {
            Ok(())
        } else {
            Err(Error::invalid(format!("shape {self:?} is empty or not finite")))
        }
    }
}

/// Time domain of a profile function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionDomain {
    Real,
    NonNegative,
}

/// Named families of continuous-time profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum AdversarialFunction {
    /// `f(t) = pattern(t mod l)` on the whole real line.
    Periodic { l: f64, pattern: Shape },
    /// `head` on `[0, a)`, then `tail` repeated with period `l`; the two
    /// must share their mean.
    PeriodicAfterMatchedMean { a: f64, l: f64, head: Shape, tail: Shape },
    /// `head` on `[0, a)`, then the constant `c`, which must equal the mean
    /// of the head.
    ConstantAfter { a: f64, head: Shape, c: f64 },
    /// `f(t) = p(t mod l) + t * q(t mod l)` with `q` of mean zero. Satisfies
    /// the sliding identities yet leaves `[0, 1]` for large `|t|` unless `q`
    /// vanishes.
    BoundaryEffect { l: f64, p: Shape, q: Shape },
}

fn periodic_jumps(origin: f64, period: f64, shape: &Shape, lo: f64, hi: f64, out: &mut Vec<f64>) {
    let inner = shape.jumps(period);
    let first = ((lo - origin) / period).floor() as i64;
    let last = ((hi - origin) / period).ceil() as i64;
    for k in first..=last {
        let base = origin + k as f64 * period;
        out.push(base);
        out.extend(inner.iter().map(|x| base + x));
    }
}

impl AdversarialFunction {
    pub fn name(&self) -> &'static str {
        match self {
            AdversarialFunction::Periodic { .. } => "periodic",
            AdversarialFunction::PeriodicAfterMatchedMean { .. } => "periodic_after_matched_mean",
            AdversarialFunction::ConstantAfter { .. } => "constant_after",
            AdversarialFunction::BoundaryEffect { .. } => "boundary_effect",
        }
    }

    pub fn domain(&self) -> FunctionDomain {
        match self {
            AdversarialFunction::Periodic { .. } | AdversarialFunction::BoundaryEffect { .. } => FunctionDomain::Real,
            _ => FunctionDomain::NonNegative,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            AdversarialFunction::Periodic { l, pattern } => pattern.eval(t.rem_euclid(*l), *l),
            AdversarialFunction::PeriodicAfterMatchedMean { a, l, head, tail } => {
                if t < *a {
                    head.eval(t, *a)
                } else {
                    tail.eval((t - a).rem_euclid(*l), *l)
                }
            }
            AdversarialFunction::ConstantAfter { a, head, c } => {
                if t < *a {
                    head.eval(t, *a)
                } else {
                    *c
                }
            }
            AdversarialFunction::BoundaryEffect { l, p, q } => {
                let x = t.rem_euclid(*l);
                p.eval(x, *l) + t * q.eval(x, *l)
            }
        }
    }

    /// Whether `f` may be discontinuous anywhere.
    pub fn has_jumps(&self) -> bool {
        match self {
            AdversarialFunction::Periodic { pattern, .. } => pattern.has_jumps(),
            AdversarialFunction::PeriodicAfterMatchedMean { .. } | AdversarialFunction::ConstantAfter { .. } => true,
            AdversarialFunction::BoundaryEffect { p, q, .. } => p.has_jumps() || q.has_jumps(),
        }
    }

    /// Sorted points in `(lo, hi)` where `f` may jump.
    fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        match self {
            AdversarialFunction::Periodic { l, pattern } => periodic_jumps(0.0, *l, pattern, lo, hi, &mut pts),
            AdversarialFunction::PeriodicAfterMatchedMean { a, l, head, tail } => {
                pts.extend(head.jumps(*a));
                pts.push(*a);
                if hi > *a {
                    periodic_jumps(*a, *l, tail, lo.max(*a), hi, &mut pts);
                }
            }
            AdversarialFunction::ConstantAfter { a, head, .. } => {
                pts.extend(head.jumps(*a));
                pts.push(*a);
            }
            AdversarialFunction::BoundaryEffect { l, p, q } => {
                periodic_jumps(0.0, *l, p, lo, hi, &mut pts);
                periodic_jumps(0.0, *l, q, lo, hi, &mut pts);
            }
        }
        pts.retain(|&x| x > lo && x < hi);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Check the family's defining constraints (matched means, mean-zero
    /// `q`, range of the non-boundary families).
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        let positive = |name: &str, x: f64| {
            if x.is_finite() && x > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be positive and finite")))
            }
        };
        let in_range = |shape: &Shape, len: f64| {
            let (lo, hi) = shape_range(shape, len);
            if lo >= -TOL && hi <= 1.0 + TOL {
                Ok(())
            } else {
                Err(Error::invalid(format!("shape {shape:?} leaves [0, 1]")))
            }
        };
        match self {
            AdversarialFunction::Periodic { l, pattern } => {
                positive("l", *l)?;
                pattern.validate()?;
                in_range(pattern, *l)
            }
            AdversarialFunction::PeriodicAfterMatchedMean { a, l, head, tail } => {
                positive("a", *a)?;
                positive("l", *l)?;
                head.validate()?;
                tail.validate()?;
                in_range(head, *a)?;
                in_range(tail, *l)?;
                if (head.mean() - tail.mean()).abs() > TOL {
                    return Err(Error::invalid(format!(
                        "head mean {} differs from tail mean {}",
                        head.mean(),
                        tail.mean()
                    )));
                }
                Ok(())
            }
            AdversarialFunction::ConstantAfter { a, head, c } => {
                positive("a", *a)?;
                head.validate()?;
                in_range(head, *a)?;
                if (head.mean() - c).abs() > TOL {
                    return Err(Error::invalid(format!(
                        "head mean {} differs from constant {c}",
                        head.mean()
                    )));
                }
                Ok(())
            }
            AdversarialFunction::BoundaryEffect { l, p, q } => {
                positive("l", *l)?;
                p.validate()?;
                q.validate()?;
                if q.mean().abs() > TOL {
                    return Err(Error::invalid(format!("q has mean {}", q.mean())));
                }
                Ok(())
            }
        }
    }
}

fn shape_range(shape: &Shape, _len: f64) -> (f64, f64) {
    match shape {
        Shape::Constant { value } => (*value, *value),
        Shape::Steps { values } => values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        }),
        Shape::Sine { offset, amplitude } => (offset - amplitude.abs(), offset + amplitude.abs()),
    }
}

/// Result of checking a profile function against a continuous scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitingReport {
    /// `max_t |mean_{W1} f - mean_{W2} f|`, i.e. the window-integral
    /// identity `|W2| int_{W1} f = |W1| int_{W2} f` divided by `|W1| |W2|`.
    pub max_violation: f64,
    /// Split time at which the maximum occurred.
    pub worst_t: f64,
    /// Whether `f` stayed in `[0, 1]` at every evaluated point.
    pub range_ok: bool,
    pub min_value: f64,
    pub max_value: f64,
    pub grid_points: usize,
}

struct Integrator<'a> {
    f: &'a AdversarialFunction,
    panels: usize,
    min_value: f64,
    max_value: f64,
}

impl Integrator<'_> {
    fn sample(&mut self, t: f64) -> f64 {
        let y = self.f.eval(t);
        self.min_value = self.min_value.min(y);
        self.max_value = self.max_value.max(y);
        y
    }

    /// Composite Simpson on a piece where `f` is smooth. Endpoints are
    /// nudged inside so one-sided limits are used at jumps.
    fn simpson(&mut self, lo: f64, hi: f64) -> f64 {
        let m = self.panels;
        let h = (hi - lo) / m as f64;
        let nudge = 1e-7 * h;
        let mut acc = self.sample(lo + nudge) + self.sample(hi - nudge);
        for j in 1..m {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.sample(lo + h * j as f64);
        }
        acc * h / 3.0
    }

    fn integrate(&mut self, lo: f64, hi: f64) -> f64 {
        let mut edges = vec![lo];
        edges.extend(self.f.breakpoints(lo, hi));
        edges.push(hi);
        edges.windows(2).map(|e| self.simpson(e[0], e[1])).sum()
    }
}

/// Check the window-integral identities of `scheme` for `f` at each split
/// time in `t_grid`, with `quad_points` Simpson panels per smooth piece.
pub fn verify_function_limiting(
    f: &AdversarialFunction,
    scheme: &ContinuousScheme,
    t_grid: &[f64],
    quad_points: usize,
) -> Result<LimitingReport> {
    scheme.validate()?;
    if f.has_jumps() && quad_points < MIN_PANELS_DISCONTINUOUS {
        return Err(Error::QuadratureUnstable {
            panels: quad_points,
            floor: MIN_PANELS_DISCONTINUOUS,
        });
    }
    if quad_points < 2 {
        return Err(Error::invalid("Simpson quadrature needs at least two panels"));
    }
    if t_grid.is_empty() {
        return Err(Error::invalid("empty time grid"));
    }
    let mut integrator = Integrator {
        f,
        panels: quad_points + quad_points % 2,
        min_value: f64::INFINITY,
        max_value: f64::NEG_INFINITY,
    };
    let mut max_violation = 0.0f64;
    let mut worst_t = t_grid[0];
    for &t in t_grid {
        let ((s1, e1), (s2, e2)) = scheme
            .windows(t)
            .ok_or_else(|| Error::invalid(format!("split time {t} is not admissible")))?;
        if f.domain() == FunctionDomain::NonNegative && s1.min(s2) < 0.0 {
            return Err(Error::invalid(format!(
                "windows at t = {t} leave the non-negative time domain"
            )));
        }
        let i1 = integrator.integrate(s1, e1);
        let i2 = integrator.integrate(s2, e2);
        let violation = (i1 / (e1 - s1) - i2 / (e2 - s2)).abs();
        if violation > max_violation || violation.is_nan() {
            max_violation = violation;
            worst_t = t;
        }
    }
    const RANGE_TOL: f64 = 1e-12;
    Ok(LimitingReport {
        max_violation,
        worst_t,
        range_ok: integrator.min_value >= -RANGE_TOL && integrator.max_value <= 1.0 + RANGE_TOL,
        min_value: integrator.min_value,
        max_value: integrator.max_value,
        grid_points: t_grid.len(),
    })
}

/// `count` equidistant points from `t0` to `t1` inclusive.
pub fn uniform_grid(t0: f64, t1: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..count)
            .map(|i| t0 + (t1 - t0) * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Sample `f` at `n` equidistant times spanning `t_span` inclusive.
pub fn sample_function_to_profile(
    f: &AdversarialFunction,
    n: usize,
    t_span: (f64, f64),
) -> Result<AdversarialProfile<f64>> {
    if n == 0 {
        return Err(Error::invalid("profile length must be positive"));
    }
    let (t0, t1) = t_span;
    if f.domain() == FunctionDomain::NonNegative && t0.min(t1) < 0.0 {
        return Err(Error::invalid("sampling span leaves the non-negative time domain"));
    }
    let times = uniform_grid(t0, t1, n);
    let mut v = Vec::with_capacity(n);
    for (index, t) in times.into_iter().enumerate() {
        let value = f.eval(t);
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::RangeViolation { index, t, value });
        }
        v.push(value);
    }
    AdversarialProfile::new(
        v,
        Provenance::SampledFunction {
            family: f.name().to_string(),
        },
    )
}
