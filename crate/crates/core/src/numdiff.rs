//! Central finite differences with optional Richardson refinement.

/// Step and refinement used for every numerical derivative of a field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `O(h²)` error term.
    pub richardson: bool,
}

impl Stencil {
    pub fn new(step: f64) -> Self {
        Stencil { step, richardson: true }
    }

    /// `min(λ/200, w0/200)`: resolves the λ/2 standing-wave period.
    pub fn for_beam(wavelength: f64, waist: f64) -> Self {
        Stencil::new(wavelength.min(waist) / 200.0)
    }

    pub fn plain(self) -> Self {
        Stencil { richardson: false, ..self }
    }

    /// Derivative of `f` at 0 from symmetric samples `f(±h)`.
    ///
    /// `diff(h)` must return `f(+h) - f(-h)`; taking the difference directly
    /// lets callers compare phases through the argument of a ratio.
    pub fn derivative<F>(&self, mut diff: F) -> f64
    where
        F: FnMut(f64) -> f64,
    {
        let h = self.step;
        let d1 = diff(h) / (2.0 * h);
        if !self.richardson {
            return d1;
        }
        let d2 = diff(0.5 * h) / h;
        (4.0 * d2 - d1) / 3.0
    }

    /// Same as [`derivative`](Self::derivative) but propagates errors from the sampler.
    pub fn try_derivative<F, E>(&self, mut diff: F) -> Result<f64, E>
    where
        F: FnMut(f64) -> Result<f64, E>,
    {
        let h = self.step;
        let d1 = diff(h)? / (2.0 * h);
        if !self.richardson {
            return Ok(d1);
        }
        let d2 = diff(0.5 * h)? / h;
        Ok((4.0 * d2 - d1) / 3.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_is_fourth_order() {
        let f = |x: f64| (3.0 * x).sin();
        let exact = 3.0 * (3.0f64 * 0.4).cos();
        let err = |h: f64| {
            let s = Stencil::new(h);
            (s.derivative(|dh| f(0.4 + dh) - f(0.4 - dh)) - exact).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 16.0).abs() < 0.5, "ratio {ratio}");
    }

    #[test]
    fn plain_is_second_order() {
        let f = |x: f64| x.exp();
        let err = |h: f64| {
            let s = Stencil::new(h).plain();
            (s.derivative(|dh| f(1.0 + dh) - f(1.0 - dh)) - 1f64.exp()).abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((ratio - 4.0).abs() < 0.05, "ratio {ratio}");
    }
}
