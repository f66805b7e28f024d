use crate::mesh::Side;

/// Smooth bump `A exp(-1 / (w^2 - s^2))` for `|s| < w`, zero otherwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnd {
    pub amplitude: f64,
    pub width: f64,
    pub shift: f64,
}

impl PulseEnd {
    pub const OFF: PulseEnd = PulseEnd { amplitude: 0.0, width: 1.0, shift: 0.0 };

    pub fn bump(&self, s: f64) -> f64 {
        let d = self.width * self.width - s * s;
        if self.amplitude == 0.0 || d <= 0.0 {
            0.0
        } else {
            self.amplitude * (-1.0 / d).exp()
        }
    }
}

/// Normal traction `g_N(t) n` on the two short ends of the domain.
///
/// On the left end (reference `x1` minimal) the value is
/// `a_-(c_P t - S_-)`, on the right end `a_+(c_P t - S_+)`, and both vanish
/// for `t >= t_init`. Negative amplitudes are compressive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPulse {
    pub minus: PulseEnd,
    pub plus: PulseEnd,
    pub t_init: f64,
    /// Wave speed scaling the time argument.
    pub c_p: f64,
}

impl BoundaryPulse {
    pub fn off() -> Self {
        Self {
            minus: PulseEnd::OFF,
            plus: PulseEnd::OFF,
            t_init: 0.0,
            c_p: 1.0,
        }
    }

    pub fn traction(&self, side: Side, t: f64) -> f64 {
        if t >= self.t_init {
            return 0.0;
        }
        match side {
            Side::Left => self.minus.bump(self.c_p * t - self.minus.shift),
            Side::Right => self.plus.bump(self.c_p * t - self.plus.shift),
            Side::Bottom | Side::Top => 0.0,
        }
    }

    /// True if either end can be nonzero at some `t` in `[0, t_init)`.
    pub fn fires(&self) -> bool {
        [self.minus, self.plus].iter().any(|end| {
            if end.amplitude == 0.0 {
                return false;
            }
            // support of the argument c_p t - shift is (-w, w)
            let t_lo = (end.shift - end.width) / self.c_p;
            let t_hi = (end.shift + end.width) / self.c_p;
            t_hi > 0.0 && t_lo < self.t_init
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper_pulse(a_minus: f64) -> BoundaryPulse {
        BoundaryPulse {
            minus: PulseEnd { amplitude: a_minus, width: 0.3, shift: -1.03 },
            plus: PulseEnd { amplitude: 1.05 * a_minus, width: 0.3, shift: 1.25 },
            t_init: 0.24,
            c_p: 2.0,
        }
    }

    #[test]
    fn bump_shape() {
        let end = PulseEnd { amplitude: 2.0, width: 0.3, shift: 0.0 };
        assert_eq!(end.bump(0.0), 2.0 * (-1.0 / 0.09f64).exp());
        assert_eq!(end.bump(0.3), 0.0);
        assert_eq!(end.bump(-0.31), 0.0);
        assert_eq!(end.bump(0.1), end.bump(-0.1));
    }

    #[test]
    fn vanishes_after_t_init_and_outside_support() {
        let mut p = paper_pulse(-1.0);
        p.minus.shift = 0.24;
        assert!(p.traction(Side::Left, 0.12) < 0.0);
        assert_eq!(p.traction(Side::Left, 0.24), 0.0);
        assert_eq!(p.traction(Side::Left, 1.0), 0.0);
        assert_eq!(p.traction(Side::Top, 0.12), 0.0);
        // |c_P t - S| >= w: argument 2 * 0.1 - 1.25 is far outside the width
        assert_eq!(p.traction(Side::Right, 0.1), 0.0);
    }

    #[test]
    fn printed_shifts_never_fire_within_t_init() {
        let p = paper_pulse(-1.0);
        assert!(!p.fires());
        for i in 0..240 {
            let t = i as f64 * 1e-3;
            assert_eq!(p.traction(Side::Left, t), 0.0);
            assert_eq!(p.traction(Side::Right, t), 0.0);
        }
        assert_eq!(p.plus.amplitude, 1.05 * p.minus.amplitude);
    }
}
