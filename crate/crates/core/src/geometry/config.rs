use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::curve::JordanCurve;
use super::sampled::{sample_arclength, SampledCurve};
use crate::error::{Error, Result};

/// Where a component sits: translated by a finite offset, or infinitely far
/// from every other component (all cross interactions dropped).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    At([f64; 2]),
    Far,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PlacementRepr {
    At([f64; 2]),
    Tag(String),
}

impl Serialize for Placement {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Placement::At(p) => PlacementRepr::At(*p),
            Placement::Far => PlacementRepr::Tag("far".into()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Placement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match PlacementRepr::deserialize(d)? {
            PlacementRepr::At(p) => Ok(Placement::At(p)),
            PlacementRepr::Tag(t) if t.eq_ignore_ascii_case("far") => Ok(Placement::Far),
            PlacementRepr::Tag(t) => Err(serde::de::Error::custom(format!("unknown placement `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    #[serde(flatten)]
    pub curve: JordanCurve,
    pub placement: Placement,
}

/// A finite union of smooth Jordan domains.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeConfig {
    pub components: Vec<Component>,
}

#[derive(Deserialize)]
struct RawConfig {
    components: Vec<Component>,
}

impl<'de> Deserialize<'de> for ShapeConfig {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawConfig::deserialize(d)?;
        ShapeConfig::new(raw.components).map_err(serde::de::Error::custom)
    }
}

impl ShapeConfig {
    /// Rejects negatively oriented components.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        for c in &components {
            c.curve.enclosed_area()?;
        }
        Ok(Self { components })
    }

    pub fn empty() -> Self {
        Self { components: Vec::new() }
    }

    /// One component at the origin.
    pub fn single(curve: JordanCurve) -> Result<Self> {
        Self::new(vec![Component { curve, placement: Placement::At([0.0, 0.0]) }])
    }

    /// `k` far-separated copies of `curve`.
    pub fn far_copies(curve: &JordanCurve, k: usize) -> Result<Self> {
        Self::new(
            (0..k)
                .map(|_| Component { curve: curve.clone(), placement: Placement::Far })
                .collect(),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Total enclosed area `m`.
    pub fn mass(&self) -> f64 {
        self.components.iter().map(|c| c.curve.signed_area()).sum()
    }

    /// Curve of each component with its finite translation applied.
    pub fn placed_curves(&self) -> Vec<(JordanCurve, bool)> {
        self.components
            .iter()
            .map(|c| match c.placement {
                Placement::At([x, y]) => (c.curve.translated(x, y), false),
                Placement::Far => (c.curve.clone(), true),
            })
            .collect()
    }

    /// Samples every component with `n` nodes.
    pub fn sample(&self, n: usize) -> Result<SampledShape> {
        let mut comps = Vec::with_capacity(self.components.len());
        for (curve, far) in self.placed_curves() {
            comps.push(SampledComponent { curve: sample_arclength(&curve, n)?, far });
        }
        let shape = SampledShape { components: comps };
        shape.validate()?;
        Ok(shape)
    }

    /// Samples each component at its [`recommended_nodes`] count.
    pub fn sample_auto(&self) -> Result<SampledShape> {
        let mut comps = Vec::with_capacity(self.components.len());
        for (curve, far) in self.placed_curves() {
            let n = recommended_nodes(&curve)?;
            comps.push(SampledComponent { curve: sample_arclength(&curve, n)?, far });
        }
        let shape = SampledShape { components: comps };
        shape.validate()?;
        Ok(shape)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("shape config serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))
    }
}

/// Smallest multiple of 16 (at least 64) with `P/n ≤ min(0.02, 0.1/max|κ|)`.
pub fn recommended_nodes(curve: &JordanCurve) -> Result<usize> {
    let probe = sample_arclength(curve, 256)?;
    let kmax = probe.max_abs_curvature().max(1e-12);
    let spacing = 0.02f64.min(0.1 / kmax);
    let n = (probe.perimeter / spacing).ceil() as usize;
    Ok(n.max(64).div_ceil(16) * 16)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledComponent {
    pub curve: SampledCurve,
    pub far: bool,
}

/// Sampled components of a [`ShapeConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledShape {
    pub components: Vec<SampledComponent>,
}

impl SampledShape {
    pub fn from_curves(curves: Vec<SampledCurve>, far: bool) -> Self {
        Self {
            components: curves.into_iter().map(|curve| SampledComponent { curve, far }).collect(),
        }
    }

    pub fn perimeter(&self) -> f64 {
        self.components.iter().map(|c| c.curve.perimeter).sum()
    }

    /// Components are simple, and finitely placed ones are pairwise disjoint.
    pub fn validate(&self) -> Result<()> {
        for c in &self.components {
            c.curve.check_simple()?;
        }
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                let (a, b) = (&self.components[i], &self.components[j]);
                if a.far || b.far {
                    continue;
                }
                if a.curve.intersects(&b.curve)
                    || a.curve.contains(b.curve.points[0])
                    || b.curve.contains(a.curve.points[0])
                {
                    return Err(Error::Overlap(i, j));
                }
            }
        }
        Ok(())
    }

    /// Indices `(i, j)`, `i < j`, of pairs that interact.
    pub fn interacting_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                if !self.components[i].far && !self.components[j].far {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::make_disk;
    use std::f64::consts::PI;

    #[test]
    fn mass_is_additive() {
        let d = make_disk(1.0).unwrap();
        let c = ShapeConfig::far_copies(&d, 2).unwrap();
        assert!((c.mass() - 2.0 * PI).abs() < 1e-12);
        assert!((ShapeConfig::single(d).unwrap().mass() - PI).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let d = make_disk(1.0).unwrap();
        let c = ShapeConfig::new(vec![
            Component { curve: d.clone(), placement: Placement::At([3.0, 0.0]) },
            Component { curve: d, placement: Placement::Far },
        ])
        .unwrap();
        let s = c.to_json();
        assert!(s.contains("\"far\""));
        assert_eq!(ShapeConfig::from_json(&s).unwrap(), c);
        let doc = r#"{"components":[{"cos_x":[0,1],"sin_x":[0,0],"cos_y":[0,0],"sin_y":[0,1],"placement":[0,0]}]}"#;
        let parsed = ShapeConfig::from_json(doc).unwrap();
        assert!((parsed.mass() - PI).abs() < 1e-12);
        let bad = r#"{"components":[{"cos_x":[0,1],"sin_x":[0,0],"cos_y":[0,0],"sin_y":[0,-1],"placement":[0,0]}]}"#;
        assert!(ShapeConfig::from_json(bad).is_err());
    }

    #[test]
    fn overlapping_components_rejected() {
        let d = make_disk(1.0).unwrap();
        let c = ShapeConfig::new(vec![
            Component { curve: d.clone(), placement: Placement::At([0.0, 0.0]) },
            Component { curve: d.clone(), placement: Placement::At([1.0, 0.0]) },
        ])
        .unwrap();
        assert!(matches!(c.sample(64), Err(Error::Overlap(0, 1))));
        let nested = ShapeConfig::new(vec![
            Component { curve: d.clone(), placement: Placement::At([0.0, 0.0]) },
            Component { curve: d.scaled(0.3), placement: Placement::At([0.0, 0.0]) },
        ])
        .unwrap();
        assert!(nested.sample(64).is_err());
    }

    #[test]
    fn node_rule() {
        let n = recommended_nodes(&make_disk(1.0).unwrap()).unwrap();
        assert!(2.0 * PI / n as f64 <= 0.02 && n % 16 == 0);
    }
}
