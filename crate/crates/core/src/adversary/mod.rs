//! Adversarial profiles: construction and certification.
//!
//! A profile `v` in `[0,1]^n` assigns each stream position the probability
//! of drawing from `P` rather than `Q`. It is adversarial for a scheme when
//! it is not constant yet its mean over the reference window equals its mean
//! over the test window for every compared pair, i.e. every difference row
//! of the weight matrix annihilates it.

mod families;
mod limiting;
mod solve;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::windowing::{build_weight_matrix, WindowScheme};
use crate::Rational;

pub use families::{feasible_head_count, gen_periodic, gen_rand_const, gen_rand_periodic};
pub use limiting::{
    sample_function_to_profile, uniform_grid, verify_function_limiting, AdversarialFunction, FunctionDomain,
    LimitingReport, Shape, DEFAULT_GRID_POINTS, DEFAULT_QUAD_PANELS, MIN_PANELS_DISCONTINUOUS,
};
pub use solve::{binarize_profile, difference_nullspace, solve_nullspace, NullSpaceSummary, SOLVE_TOLERANCE};

/// Where a profile came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    /// Numerical null-space solve of a weight matrix.
    NullSpaceSolve,
    /// Closed-form family generator.
    FamilyGenerator {
        name: String,
        params: BTreeMap<String, f64>,
    },
    /// Binary repair of another profile.
    Binarized {
        from: Box<Provenance>,
        changed: usize,
    },
    /// Equidistant samples of a continuous-time profile function.
    SampledFunction {
        family: String,
    },
    UserSupplied,
}

impl Provenance {
    pub(crate) fn family(name: &str, params: &[(&str, f64)]) -> Self {
        Provenance::FamilyGenerator {
            name: name.to_string(),
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Whether a residual certificate for this provenance must hold exactly.
    fn claims_exactness(&self) -> bool {
        matches!(self, Provenance::FamilyGenerator { .. } | Provenance::Binarized { .. })
    }
}

/// Mixture weights, one per stream position, all in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialProfile<S> {
    v: Vec<S>,
    provenance: Provenance,
}

impl<S: Scalar> AdversarialProfile<S> {
    pub fn new(v: Vec<S>, provenance: Provenance) -> Result<Self> {
        for (i, x) in v.iter().enumerate() {
            if !(*x >= S::zero() && *x <= S::one()) {
                return Err(Error::RangeViolation {
                    index: i,
                    t: i as f64,
                    value: x.to_f64(),
                });
            }
        }
        Ok(AdversarialProfile { v, provenance })
    }

    pub fn user(v: Vec<S>) -> Result<Self> {
        Self::new(v, Provenance::UserSupplied)
    }

    pub fn n(&self) -> usize {
        self.v.len()
    }

    pub fn values(&self) -> &[S] {
        &self.v
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn into_values(self) -> Vec<S> {
        self.v
    }

    pub fn is_constant(&self) -> bool {
        let Some(first) = self.v.first() else {
            return true;
        };
        let (lo, hi) = self.v.iter().fold((first, first), |(lo, hi), x| {
            (if x < lo { x } else { lo }, if x > hi { x } else { hi })
        });
        (hi.clone() - lo.clone()).is_negligible(&S::one())
    }

    /// Whether every entry is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.v.iter().all(|x| x.is_zero() || x.is_one())
    }

    pub fn to_f64(&self) -> AdversarialProfile<f64> {
        AdversarialProfile {
            v: self.v.iter().map(Scalar::to_f64).collect(),
            provenance: self.provenance.clone(),
        }
    }

    /// Exact rational copy of the stored values.
    pub fn to_exact(&self) -> AdversarialProfile<Rational> {
        AdversarialProfile {
            v: self
                .v
                .iter()
                .map(|x| <Rational as Scalar>::from_f64(x.to_f64()).expect("profile values are finite by construction"))
                .collect(),
            provenance: self.provenance.clone(),
        }
    }

    pub fn to_record(&self, certificate: Option<VerifyReport>) -> ProfileRecord {
        ProfileRecord {
            n: self.n(),
            v: self.v.iter().map(Scalar::to_f64).collect(),
            provenance: self.provenance.clone(),
            exact: certificate.as_ref().map(|c| c.exact_zero),
            certificate,
        }
    }
}

impl AdversarialProfile<Rational> {
    /// Exact profile with values `num[i] / den`.
    pub fn from_ratios(num: &[i64], den: i64, provenance: Provenance) -> Result<Self> {
        Self::new(num.iter().map(|&x| Rational::from_ratio(x, den)).collect(), provenance)
    }
}

/// JSON form of a profile: `{"n", "v", "provenance", "exact", "certificate"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub n: usize,
    pub v: Vec<f64>,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<VerifyReport>,
}

impl ProfileRecord {
    pub fn into_profile(self) -> Result<AdversarialProfile<f64>> {
        if self.v.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: self.v.len(),
            });
        }
        AdversarialProfile::new(self.v, self.provenance)
    }
}

/// How a residual is judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateTier {
    /// Residual must vanish in rational arithmetic.
    Exact,
    /// Residual must be at most [`SOLVE_TOLERANCE`] in floating point.
    Numerical,
}

/// Outcome of checking a profile against a scheme.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub scheme: String,
    pub n: usize,
    pub pairs: usize,
    /// `max_r |W_diff . v|_r`, in floating point.
    pub max_residual: f64,
    /// The residual of the stored values is exactly zero.
    pub exact_zero: bool,
    pub tier: CertificateTier,
    pub is_nonconstant: bool,
    pub is_adversarial: bool,
}

/// Check whether `profile` hides its drift from `scheme` on `n` samples.
pub fn verify_profile<S: Scalar>(
    profile: &AdversarialProfile<S>,
    scheme: &WindowScheme,
    n: usize,
) -> Result<VerifyReport> {
    if profile.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: profile.n(),
        });
    }
    let w = build_weight_matrix::<S>(scheme, n)?;
    let max_residual = w.max_residual(profile.values())?.to_f64();

    let exact_zero = if S::EXACT {
        max_residual == 0.0
    } else {
        let exact = profile.to_exact();
        w.convert::<Rational>()
            .difference_residuals(exact.values())?
            .iter()
            .all(num_traits::Zero::is_zero)
    };

    let tier = if S::EXACT || profile.provenance().claims_exactness() {
        CertificateTier::Exact
    } else {
        CertificateTier::Numerical
    };
    let passes = match tier {
        CertificateTier::Exact => exact_zero,
        CertificateTier::Numerical => exact_zero || max_residual <= SOLVE_TOLERANCE,
    };
    let is_nonconstant = !profile.is_constant();

    Ok(VerifyReport {
        scheme: scheme.label(),
        n,
        pairs: w.row_count() - 1,
        max_residual,
        exact_zero,
        tier,
        is_nonconstant,
        is_adversarial: passes && is_nonconstant,
    })
}
