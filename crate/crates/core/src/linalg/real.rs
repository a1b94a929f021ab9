use std::fmt::{self, Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign};

/// Floating-point width a kernel runs in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Width {
    F32,
    F64,
}

impl Display for Width {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Width::F32 => f.write_str("f32"),
            Width::F64 => f.write_str("f64"),
        }
    }
}

/// Scalar type every kernel is generic over. Implemented for `f32` and `f64`.
pub trait Real:
    Float + FromPrimitive + NumAssign + Sum + Default + Debug + Display + LowerExp + Send + Sync + 'static
{
    const WIDTH: Width;

    /// Diagonal Padé degrees usable at this width, each paired with the
    /// largest 1-norm for which its backward error stays below unit roundoff.
    const PADE_THETA: &'static [(usize, f64)];

    /// Converts an `f64` constant. Values outside the range become infinite.
    #[inline]
    fn of(x: f64) -> Self {
        Self::from_f64(x).unwrap_or_else(Self::nan)
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

// Published backward-error bounds, kept at full printed precision.
#[allow(clippy::excessive_precision)]
impl Real for f64 {
    const WIDTH: Width = Width::F64;
    const PADE_THETA: &'static [(usize, f64)] = &[
        (3, 1.495585217958292e-2),
        (5, 2.539398330063230e-1),
        (7, 9.504178996162932e-1),
        (9, 2.097847961257068e0),
        (13, 5.371920351148152e0),
    ];
}

#[allow(clippy::excessive_precision)]
impl Real for f32 {
    const WIDTH: Width = Width::F32;
    const PADE_THETA: &'static [(usize, f64)] =
        &[(3, 4.258730016922831e-1), (5, 1.880152677804762e0), (7, 3.925724783138660e0)];
}
