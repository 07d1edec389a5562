//! Run configuration: JSON file values, flag overrides and shape specs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use dipolar_core::geometry::{make_disk, make_ellipse, make_stripe};
use dipolar_core::{KernelParams, LayerSeparation, ShapeConfig};

use crate::{CliError, EvaluatorArg, ParamArgs};

/// Every key is optional; a flag given on the command line wins.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub lambda: Option<f64>,
    pub delta: Option<f64>,
    pub ell: Option<LayerSeparation>,
    pub shape: Option<String>,
    pub evaluator: Option<EvaluatorArg>,
    pub nodes: Option<usize>,
    pub h: Option<f64>,
    pub max_mode: Option<usize>,
    pub max_steps: Option<usize>,
    pub dt0: Option<f64>,
    pub tol: Option<f64>,
    pub l_grid: Option<String>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
    }
}

/// The values a command actually ran with.
#[derive(Debug, Default, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell: Option<LayerSeparation>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shape: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nodes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_mode: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l_grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub outputs: Vec<PathBuf>,
}

pub const DEFAULT_LAMBDA: f64 = 1.0;

/// λ, δ and l after precedence; δ stays `None` when neither source sets it.
pub struct ResolvedParams {
    pub lambda: f64,
    pub delta: Option<f64>,
    pub ell: LayerSeparation,
}

impl ResolvedParams {
    pub fn resolve(args: &ParamArgs, file: &FileConfig) -> Result<Self, CliError> {
        let ell = match &args.ell {
            Some(s) => LayerSeparation::parse(s).map_err(|e| CliError::Usage(e.to_string()))?,
            None => file.ell.unwrap_or(LayerSeparation::Infinite),
        };
        Ok(Self {
            lambda: args.lambda.or(file.lambda).unwrap_or(DEFAULT_LAMBDA),
            delta: args.delta.or(file.delta),
            ell,
        })
    }

    /// Kernel parameters; a missing δ is a usage error naming `needed_by`.
    pub fn kernel(&self, needed_by: &str) -> Result<KernelParams, CliError> {
        let delta = self
            .delta
            .ok_or_else(|| CliError::Usage(format!("--delta is required for {needed_by}")))?;
        KernelParams::new(self.lambda, delta, self.ell).map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn numbers(spec: &str, body: &str, want: &[usize]) -> Result<Vec<f64>, CliError> {
    let vals: Result<Vec<f64>, _> = body.split(',').map(|t| t.trim().parse::<f64>()).collect();
    match vals {
        Ok(v) if want.contains(&v.len()) => Ok(v),
        _ => Err(CliError::Usage(format!("cannot parse shape `{spec}`"))),
    }
}

/// `disk:r`, `ellipse:aspect` (area π), `ellipse:a,b`, `stripe:a,m,rho`, or a
/// path to a shape JSON document.
pub fn parse_shape(spec: &str) -> Result<ShapeConfig, CliError> {
    let usage = |e: dipolar_core::Error| CliError::Usage(format!("shape `{spec}`: {e}"));
    if let Some((kind, body)) = spec.split_once(':') {
        let curve = match kind {
            "disk" => make_disk(numbers(spec, body, &[1])?[0]).map_err(usage)?,
            "ellipse" => {
                let v = numbers(spec, body, &[1, 2])?;
                if v.len() == 1 {
                    if !(v[0] > 0.0) {
                        return Err(CliError::Usage(format!("aspect must be positive in `{spec}`")));
                    }
                    make_ellipse(v[0].sqrt(), 1.0 / v[0].sqrt()).map_err(usage)?
                } else {
                    make_ellipse(v[0], v[1]).map_err(usage)?
                }
            }
            "stripe" => {
                let v = numbers(spec, body, &[3])?;
                make_stripe(v[0], v[1], v[2]).map_err(usage)?
            }
            _ if Path::new(spec).exists() => return load_shape_file(Path::new(spec)),
            _ => return Err(CliError::Usage(format!("unknown shape kind `{kind}`"))),
        };
        return ShapeConfig::single(curve).map_err(usage);
    }
    load_shape_file(Path::new(spec))
}

fn load_shape_file(path: &Path) -> Result<ShapeConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read shape file {}: {e}", path.display())))?;
    ShapeConfig::from_json(&text).map_err(|e| CliError::Usage(format!("shape file {}: {e}", path.display())))
}

/// Inclusive `start:stop:step` range or comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse l grid `{spec}`"));
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() == 3 {
        let v: Vec<f64> = parts.iter().map(|t| t.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
        let (start, stop, step) = (v[0], v[1], v[2]);
        if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
            return Err(bad());
        }
        // index-based so that rounding cannot drop or duplicate the endpoint
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        return Ok((0..=n).map(|i| start + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    if spec.trim().is_empty() {
        return Ok(Vec::new());
    }
    spec.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_range_includes_endpoint() {
        let g = parse_grid("0.275:0.5:0.005").unwrap();
        assert_eq!(g.len(), 46);
        assert!((g[45] - 0.5).abs() < 1e-12);
        assert_eq!(parse_grid("0.3, 0.5").unwrap(), vec![0.3, 0.5]);
        assert!(parse_grid("").unwrap().is_empty());
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn shape_specs() {
        assert!((parse_shape("disk:1").unwrap().mass() - std::f64::consts::PI).abs() < 1e-12);
        assert!((parse_shape("ellipse:1.5").unwrap().mass() - std::f64::consts::PI).abs() < 1e-12);
        assert!((parse_shape("stripe:1,4,0.1").unwrap().mass() - 4.0).abs() < 1e-8);
        assert!(matches!(parse_shape("disk:-1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_shape("hexagon:1"), Err(CliError::Usage(_))));
        assert!(matches!(parse_shape("stripe:1,4"), Err(CliError::Usage(_))));
    }

    #[test]
    fn flags_override_file() {
        let file = FileConfig { lambda: Some(0.3), delta: Some(0.01), ..FileConfig::default() };
        let args = ParamArgs { lambda: Some(0.7), delta: None, ell: Some("2".into()) };
        let r = ResolvedParams::resolve(&args, &file).unwrap();
        assert_eq!((r.lambda, r.delta, r.ell), (0.7, Some(0.01), LayerSeparation::Finite(2.0)));
        let none = ResolvedParams::resolve(&ParamArgs::default(), &FileConfig::default()).unwrap();
        assert_eq!(none.lambda, DEFAULT_LAMBDA);
        assert!(matches!(none.kernel("boundary"), Err(CliError::Usage(_))));
    }
}
