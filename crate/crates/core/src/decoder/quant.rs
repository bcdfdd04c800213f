//! Uniform saturating quantizer for fixed-point decoding.

use super::DecodeError;

/// Which saturation range a value belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantRange {
    /// γ, α and β.
    Message,
    /// γ̃.
    App,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantSpec {
    pub step: f64,
    pub msg_lo: f64,
    pub msg_hi: f64,
    pub app_lo: f64,
    pub app_hi: f64,
}

impl QuantSpec {
    pub fn new(step: f64, msg_lo: f64, msg_hi: f64, app_lo: f64, app_hi: f64) -> Result<Self, DecodeError> {
        let spec = Self {
            step,
            msg_lo,
            msg_hi,
            app_lo,
            app_hi,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Step 0.25 with γ, α, β in [-8, 8) and γ̃ in [-32, 32).
    pub fn fig4() -> Self {
        Self {
            step: 0.25,
            msg_lo: -8.0,
            msg_hi: 8.0,
            app_lo: -32.0,
            app_hi: 32.0,
        }
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        let bad = |msg: String| Err(DecodeError::InvalidConfig(msg));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad(format!("quantization step must be positive, got {}", self.step));
        }
        for (lo, hi) in [(self.msg_lo, self.msg_hi), (self.app_lo, self.app_hi)] {
            if !(lo < hi) {
                return bad(format!("empty quantization range [{lo}, {hi})"));
            }
            for bound in [lo, hi] {
                let k = bound / self.step;
                if (k - k.round()).abs() > 1e-9 {
                    return bad(format!("range bound {bound} is not a multiple of {}", self.step));
                }
            }
        }
        Ok(())
    }

    fn bounds(&self, range: QuantRange) -> (f64, f64) {
        match range {
            QuantRange::Message => (self.msg_lo, self.msg_hi - self.step),
            QuantRange::App => (self.app_lo, self.app_hi - self.step),
        }
    }

    /// Saturates to `[lo, hi - step]`, then rounds to the nearest multiple of
    /// `step`, ties away from zero.
    #[inline]
    pub fn quantize(&self, x: f64, range: QuantRange) -> f64 {
        let (lo, hi) = self.bounds(range);
        let q = (x.clamp(lo, hi) / self.step).round() * self.step;
        // keep +0.0 so quantized zeros compare bit-identically
        if q == 0.0 {
            0.0
        } else {
            q
        }
    }
}
