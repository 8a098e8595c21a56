//! Piecewise-constant vorticity distributions.
//!
//! A profile is given by breakpoints `p0 < p1 < ... < pN = 0` in the stream
//! coordinate and one constant vorticity per layer `(p_{i-1}, p_i)`. The
//! antiderivative `Γ(p) = ∫_0^p γ(s) ds` is evaluated in closed form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One layer `[lo, hi]` of constant vorticity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Layer {
    pub lo: f64,
    pub hi: f64,
    pub gamma: f64,
    /// `Γ(hi)`
    pub big_gamma_hi: f64,
}

impl Layer {
    /// `Γ(p)` using this layer's linear formula; valid on `[lo, hi]` and
    /// its analytic continuation outside.
    #[inline]
    pub fn big_gamma(&self, p: f64) -> f64 {
        self.big_gamma_hi + self.gamma * (p - self.hi)
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProfile {
    breakpoints: Vec<f64>,
    vorticities: Vec<f64>,
}

/// Step vorticity function together with its exact antiderivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProfile", into = "RawProfile")]
pub struct VorticityProfile {
    breakpoints: Vec<f64>,
    vorticities: Vec<f64>,
    layers: Vec<Layer>,
}

impl TryFrom<RawProfile> for VorticityProfile {
    type Error = Error;

    fn try_from(raw: RawProfile) -> Result<Self> {
        VorticityProfile::new(raw.breakpoints, raw.vorticities)
    }
}

impl From<VorticityProfile> for RawProfile {
    fn from(p: VorticityProfile) -> Self {
        RawProfile {
            breakpoints: p.breakpoints,
            vorticities: p.vorticities,
        }
    }
}

impl VorticityProfile {
    /// Builds a profile, validating the breakpoint ordering and lengths.
    /// Errors carry the index of the offending entry.
    pub fn new(breakpoints: Vec<f64>, vorticities: Vec<f64>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::InvalidProfile {
                index: breakpoints.len(),
                reason: "at least two breakpoints (one layer) are required".into(),
            });
        }
        if vorticities.len() != breakpoints.len() - 1 {
            return Err(Error::InvalidProfile {
                index: vorticities.len().min(breakpoints.len() - 1),
                reason: format!(
                    "expected {} vorticities for {} breakpoints, got {}",
                    breakpoints.len() - 1,
                    breakpoints.len(),
                    vorticities.len()
                ),
            });
        }
        for (i, &p) in breakpoints.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidProfile {
                    index: i,
                    reason: format!("breakpoint {p} is not finite"),
                });
            }
            if i > 0 && p <= breakpoints[i - 1] {
                return Err(Error::InvalidProfile {
                    index: i,
                    reason: format!(
                        "breakpoints must be strictly increasing ({} after {})",
                        p,
                        breakpoints[i - 1]
                    ),
                });
            }
        }
        let last = breakpoints.len() - 1;
        if breakpoints[last] != 0.0 {
            return Err(Error::InvalidProfile {
                index: last,
                reason: format!("last breakpoint must be exactly 0, got {}", breakpoints[last]),
            });
        }
        for (i, &g) in vorticities.iter().enumerate() {
            if !g.is_finite() {
                return Err(Error::InvalidProfile {
                    index: i,
                    reason: format!("vorticity {g} is not finite"),
                });
            }
        }

        // Γ is anchored at the surface, so build layers top-down.
        let n = vorticities.len();
        let mut layers = vec![
            Layer {
                lo: 0.0,
                hi: 0.0,
                gamma: 0.0,
                big_gamma_hi: 0.0,
            };
            n
        ];
        let mut g_hi = 0.0;
        for i in (0..n).rev() {
            let lo = breakpoints[i];
            let hi = breakpoints[i + 1];
            let gamma = vorticities[i];
            layers[i] = Layer {
                lo,
                hi,
                gamma,
                big_gamma_hi: g_hi,
            };
            g_hi += gamma * (lo - hi);
        }

        Ok(VorticityProfile {
            breakpoints,
            vorticities,
            layers,
        })
    }

    /// Single layer `[p0, 0]` of constant vorticity.
    pub fn constant(p0: f64, gamma: f64) -> Result<Self> {
        Self::new(vec![p0, 0.0], vec![gamma])
    }

    pub fn irrotational(p0: f64) -> Result<Self> {
        Self::constant(p0, 0.0)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn vorticities(&self) -> &[f64] {
        &self.vorticities
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn n_layers(&self) -> usize {
        self.layers.len()
    }

    /// Relative mass flux `p0 < 0`.
    pub fn p0(&self) -> f64 {
        self.breakpoints[0]
    }

    fn check_domain(&self, p: f64) -> Result<()> {
        if p.is_nan() || p < self.p0() || p > 0.0 {
            return Err(Error::domain("p", p, format!("[{}, 0]", self.p0())));
        }
        Ok(())
    }

    /// Index of the layer owning `p`. Interior breakpoints belong to the layer
    /// above (right-continuity); `p0` belongs to the bottom layer and `0` to
    /// the top one.
    pub fn layer_index(&self, p: f64) -> Result<usize> {
        self.check_domain(p)?;
        let n = self.layers.len();
        // first breakpoint strictly greater than p, among p1..pN
        let idx = self.breakpoints[1..].partition_point(|&b| b <= p);
        Ok(idx.min(n - 1))
    }

    /// `γ(p)`.
    pub fn gamma_at(&self, p: f64) -> Result<f64> {
        Ok(self.layers[self.layer_index(p)?].gamma)
    }

    /// `Γ(p) = ∫_0^p γ(s) ds`, exact.
    pub fn big_gamma(&self, p: f64) -> Result<f64> {
        Ok(self.layers[self.layer_index(p)?].big_gamma(p))
    }

    /// `Γ` at every breakpoint, bottom to top.
    pub fn big_gamma_at_breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.layers.iter().map(|l| l.big_gamma(l.lo)).collect();
        out.push(0.0);
        out
    }

    /// `max Γ` over `[p0, 0]`; attained at a breakpoint since `Γ` is piecewise linear.
    pub fn gamma_sup(&self) -> f64 {
        self.big_gamma_at_breakpoints()
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}


/// Gravity and surface tension, varied independently of the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConstants {
    pub gravity: f64,
    pub surface_tension: f64,
}

impl PhysicalConstants {
    pub fn new(gravity: f64, surface_tension: f64) -> Result<Self> {
        if !(gravity > 0.0 && gravity.is_finite()) {
            return Err(Error::param("gravity", format!("must be > 0, got {gravity}")));
        }
        if !(surface_tension >= 0.0 && surface_tension.is_finite()) {
            return Err(Error::param(
                "surface_tension",
                format!("must be >= 0, got {surface_tension}"),
            ));
        }
        Ok(PhysicalConstants {
            gravity,
            surface_tension,
        })
    }
}
