//! Piecewise closed-loop phase schedule with smoothstep switching ramps.

use crate::error::Error;
use crate::scalar::{r, Real};

/// One schedule segment: the phase ramps towards `phi0` starting at `t_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment<T> {
    pub t_start: T,
    pub phi0: T,
}

/// Time-dependent closed-loop phase Φ0(t). The first segment sets the initial
/// value; each later segment ramps from the previous value to its own over
/// `t_ramp` with a smoothstep profile.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule<T> {
    segments: Vec<Segment<T>>,
    t_ramp: T,
}

impl<T: Real> PhaseSchedule<T> {
    /// Constant phase for all times.
    pub fn constant(phi0: T) -> Self {
        PhaseSchedule {
            segments: vec![Segment {
                t_start: T::zero(),
                phi0,
            }],
            t_ramp: T::zero(),
        }
    }

    /// Builds a schedule from time-ordered segments. Segments must leave room
    /// for the ramp before the next one starts, and phases must lie in
    /// (-π, π].
    pub fn new(segments: Vec<Segment<T>>, t_ramp: T) -> Result<Self, Error> {
        if segments.is_empty() {
            return Err(Error::InvalidSchedule("no segments".into()));
        }
        if !(t_ramp >= T::zero()) || !t_ramp.is_finite() {
            return Err(Error::InvalidSchedule(format!(
                "ramp duration must be finite and >= 0, got {t_ramp}"
            )));
        }
        for seg in &segments {
            if !(seg.phi0 > -T::PI()) || !(seg.phi0 <= T::PI()) {
                return Err(Error::InvalidSchedule(format!(
                    "phi0 = {} outside (-pi, pi]",
                    seg.phi0
                )));
            }
        }
        for pair in segments.windows(2) {
            if !(pair[1].t_start >= pair[0].t_start + t_ramp) {
                return Err(Error::InvalidSchedule(format!(
                    "segment at t = {} overlaps the ramp of the previous segment",
                    pair[1].t_start
                )));
            }
        }
        Ok(PhaseSchedule { segments, t_ramp })
    }

    pub fn segments(&self) -> &[Segment<T>] {
        &self.segments
    }

    pub fn t_ramp(&self) -> T {
        self.t_ramp
    }

    /// Φ0 at time `t`.
    pub fn value(&self, t: T) -> T {
        let mut value = self.segments[0].phi0;
        for seg in &self.segments[1..] {
            if t <= seg.t_start {
                break;
            }
            if self.t_ramp > T::zero() {
                let x = (t - seg.t_start) / self.t_ramp;
                value += (seg.phi0 - value) * smoothstep(x);
            } else {
                value = seg.phi0;
            }
        }
        value
    }
}

fn smoothstep<T: Real>(x: T) -> T {
    if x <= T::zero() {
        T::zero()
    } else if x >= T::one() {
        T::one()
    } else {
        x * x * (r::<T>(3.0) - r::<T>(2.0) * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn constant_schedule() {
        let s = PhaseSchedule::constant(0.7);
        assert_eq!(s.value(-100.0), 0.7);
        assert_eq!(s.value(1e6), 0.7);
    }

    #[test]
    fn ramp_midpoint_and_endpoints() {
        let s = PhaseSchedule::new(
            vec![
                Segment {
                    t_start: 0.0,
                    phi0: 1.0,
                },
                Segment {
                    t_start: 50.0,
                    phi0: 0.0,
                },
            ],
            10.0,
        )
        .unwrap();
        assert_eq!(s.value(49.9), 1.0);
        assert_relative_eq!(s.value(55.0), 0.5, max_relative = 1e-14);
        assert_eq!(s.value(60.0), 0.0);
        assert_eq!(s.value(1000.0), 0.0);
    }

    #[test]
    fn ramp_is_monotone() {
        let s = PhaseSchedule::new(
            vec![
                Segment {
                    t_start: 0.0,
                    phi0: -1.0,
                },
                Segment {
                    t_start: 5.0,
                    phi0: 2.0,
                },
            ],
            4.0,
        )
        .unwrap();
        let mut last = s.value(5.0);
        for k in 1..=100 {
            let v = s.value(5.0 + 4.0 * k as f64 / 100.0);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn rejects_overlapping_ramps() {
        let err = PhaseSchedule::new(
            vec![
                Segment {
                    t_start: 0.0,
                    phi0: 1.0,
                },
                Segment {
                    t_start: 3.0,
                    phi0: 0.0,
                },
            ],
            5.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn rejects_out_of_range_phase() {
        let err = PhaseSchedule::new(
            vec![Segment {
                t_start: 0.0,
                phi0: 4.0,
            }],
            1.0,
        );
        assert!(err.is_err());
    }

    #[test]
    fn zero_ramp_is_a_step() {
        let s = PhaseSchedule::new(
            vec![
                Segment {
                    t_start: 0.0,
                    phi0: 1.0,
                },
                Segment {
                    t_start: 10.0,
                    phi0: -1.0,
                },
            ],
            0.0,
        )
        .unwrap();
        assert_eq!(s.value(10.0), 1.0);
        assert_eq!(s.value(10.0001), -1.0);
    }
}
