use std::fmt;
use std::str::FromStr;

use nalgebra::Vector3;

use crate::error::{Error, Result};
use crate::rotation::{angular_distance, AxisAngle, RotationMatrix};
use crate::text::{format_axis_angle, parse_rotations};

/// How per-term residuals are combined into the objective.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Aggregator {
    /// Largest residual.
    #[default]
    Linf,
    /// Sum of residuals.
    L1,
    /// Sum of squared residuals.
    L2Sq,
}

impl Aggregator {
    pub const ALL: [Aggregator; 3] = [Aggregator::Linf, Aggregator::L1, Aggregator::L2Sq];

    pub fn name(self) -> &'static str {
        match self {
            Aggregator::Linf => "linf",
            Aggregator::L1 => "l1",
            Aggregator::L2Sq => "l2sq",
        }
    }

    pub fn aggregate<I: IntoIterator<Item = f64>>(self, terms: I) -> f64 {
        let terms = terms.into_iter();
        match self {
            Aggregator::Linf => terms.fold(0.0, f64::max),
            Aggregator::L1 => terms.sum(),
            Aggregator::L2Sq => terms.map(|t| t * t).sum(),
        }
    }
}

impl fmt::Display for Aggregator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Aggregator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "linf" => Ok(Aggregator::Linf),
            "l1" => Ok(Aggregator::L1),
            "l2sq" => Ok(Aggregator::L2Sq),
            other => Err(Error::InvalidArgument(format!(
                "unknown cost {other:?}, expected linf, l1 or l2sq"
            ))),
        }
    }
}

/// Non-negative angular residuals of a candidate rotation.
///
/// Every residual must be 1-Lipschitz in the angular metric,
/// `|θᵢ(R) − θᵢ(S)| ≤ d(R, S)`. The solver's lower bounds are only sound
/// under this contract; it is not checked.
pub trait Residuals: Sync {
    fn residuals(&self, rotation: &RotationMatrix) -> Result<Vec<f64>>;
}

impl<F> Residuals for F
where
    F: Fn(&RotationMatrix) -> Result<Vec<f64>> + Sync,
{
    fn residuals(&self, rotation: &RotationMatrix) -> Result<Vec<f64>> {
        self(rotation)
    }
}

/// Residuals `θᵢ(R) = d(R, Rᵢ)` for rotation averaging.
#[derive(Clone, Debug, PartialEq)]
pub struct RotationAveraging {
    rotations: Vec<RotationMatrix>,
}

impl RotationAveraging {
    pub fn new(rotations: Vec<RotationMatrix>) -> Result<Self> {
        if rotations.is_empty() {
            return Err(Error::InvalidArgument(
                "rotation averaging needs at least one rotation".into(),
            ));
        }
        Ok(RotationAveraging { rotations })
    }

    pub fn rotations(&self) -> &[RotationMatrix] {
        &self.rotations
    }
}

impl Residuals for RotationAveraging {
    fn residuals(&self, rotation: &RotationMatrix) -> Result<Vec<f64>> {
        Ok(self
            .rotations
            .iter()
            .map(|r| angular_distance(rotation, r).radians())
            .collect())
    }
}

/// A residual model together with its aggregator.
#[derive(Clone, Debug)]
pub struct Problem<R> {
    pub residuals: R,
    pub aggregator: Aggregator,
}

impl<R: Residuals> Problem<R> {
    pub fn new(residuals: R, aggregator: Aggregator) -> Self {
        Problem {
            residuals,
            aggregator,
        }
    }

    pub fn objective(&self, rotation: &RotationMatrix) -> Result<f64> {
        Ok(self
            .aggregator
            .aggregate(self.residuals.residuals(rotation)?))
    }
}

/// Contents of a problem file: a rotation list with `# cost:` and optional
/// `# ground_truth:` header comments.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemFile {
    pub rotations: Vec<RotationMatrix>,
    pub cost: Option<Aggregator>,
    pub ground_truth: Option<AxisAngle>,
}

pub fn parse_problem(text: &str) -> Result<ProblemFile> {
    let list = parse_rotations(text)?;
    let mut cost = None;
    let mut ground_truth = None;
    // comment line numbers are not tracked by the rotation parser, so find them again
    for (idx, raw) in text.lines().enumerate() {
        let Some(comment) = raw.trim().strip_prefix('#') else {
            continue;
        };
        let line = idx + 1;
        let Some((key, value)) = comment.split_once(':') else {
            continue;
        };
        match key.trim() {
            "cost" => {
                let parsed = value.parse().map_err(|e: Error| Error::Parse {
                    line,
                    message: e.to_string(),
                })?;
                cost = Some(parsed);
            }
            "ground_truth" => {
                let v = value
                    .split_whitespace()
                    .map(str::parse::<f64>)
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .ok()
                    .filter(|v| v.len() == 3)
                    .ok_or_else(|| Error::Parse {
                        line,
                        message: "ground_truth needs 3 numbers".into(),
                    })?;
                let r =
                    AxisAngle::new(Vector3::new(v[0], v[1], v[2])).map_err(|e| Error::Parse {
                        line,
                        message: e.to_string(),
                    })?;
                ground_truth = Some(r);
            }
            _ => {}
        }
    }
    Ok(ProblemFile {
        rotations: list.rotations,
        cost,
        ground_truth,
    })
}

/// Renders a problem file with axis-angle rotation lines.
pub fn format_problem(
    cost: Aggregator,
    ground_truth: Option<&AxisAngle>,
    rotations: &[AxisAngle],
) -> String {
    let mut out = format!("# cost: {cost}\n");
    if let Some(gt) = ground_truth {
        out.push_str(&format!("# ground_truth: {}\n", format_axis_angle(gt)));
    }
    for r in rotations {
        out.push_str(&format_axis_angle(r));
        out.push('\n');
    }
    out
}
