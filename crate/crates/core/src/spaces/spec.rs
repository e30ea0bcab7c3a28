use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::tree::{quantize, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpaceKind {
    Tree,
    Line,
    Plane,
    HyperbolicPlane,
    Product,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Tree => "tree",
            SpaceKind::Line => "line",
            SpaceKind::Plane => "plane",
            SpaceKind::HyperbolicPlane => "hyperbolic_plane",
            SpaceKind::Product => "product",
        }
    }
}

/// Declarative description of a model space, as read from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree_branching: Option<u32>,
    #[serde(
        default,
        skip_serializing_if = "Option::is_none",
        serialize_with = "ser_rational",
        deserialize_with = "de_rational"
    )]
    pub edge_length: Option<Rational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    /// Largest ray parameter for the continuous spaces.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<SpaceSpec>>,
}

impl SpaceSpec {
    fn bare(kind: SpaceKind) -> Self {
        SpaceSpec {
            kind,
            tree_branching: None,
            edge_length: None,
            truncation_depth: None,
            delta: None,
            horizon: None,
            factors: None,
        }
    }

    pub fn tree(branching: u32, truncation_depth: u32) -> Self {
        SpaceSpec {
            tree_branching: Some(branching),
            truncation_depth: Some(truncation_depth),
            ..Self::bare(SpaceKind::Tree)
        }
    }

    pub fn line() -> Self {
        Self::bare(SpaceKind::Line)
    }

    pub fn plane() -> Self {
        Self::bare(SpaceKind::Plane)
    }

    pub fn hyperbolic_plane() -> Self {
        Self::bare(SpaceKind::HyperbolicPlane)
    }

    pub fn product(first: SpaceSpec, second: SpaceSpec) -> Self {
        SpaceSpec { factors: Some(vec![first, second]), ..Self::bare(SpaceKind::Product) }
    }

    pub fn with_edge_length(mut self, edge: Rational) -> Self {
        self.edge_length = Some(edge);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }
}

fn ser_rational<S: Serializer>(v: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(r) if r.is_integer() => s.serialize_i64(*r.numer()),
        Some(r) => s.serialize_str(&format!("{}/{}", r.numer(), r.denom())),
        None => s.serialize_none(),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawRational {
    Int(i64),
    Float(f64),
    Text(String),
}

fn de_rational<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
    use serde::de::Error;
    let raw = Option::<RawRational>::deserialize(d)?;
    raw.map(|raw| match raw {
        RawRational::Int(i) => Ok(Rational::from_integer(i)),
        RawRational::Float(f) => Ok(quantize(f)),
        RawRational::Text(s) => parse_rational(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))),
    })
    .transpose()
}

/// Parses `"p/q"` or an integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            (q != 0).then(|| Rational::new(p, q))
        }
        None => s.parse().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_json_with_rational_edges() {
        let spec: SpaceSpec = serde_json::from_str(
            r#"{"kind":"tree","tree_branching":3,"edge_length":"1/2","truncation_depth":8}"#,
        )
        .unwrap();
        assert_eq!(spec.edge_length, Some(Rational::new(1, 2)));
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        let spec: SpaceSpec = serde_json::from_str(r#"{"kind":"tree","edge_length":0.25}"#).unwrap();
        assert_eq!(spec.edge_length, Some(Rational::new(1, 4)));
    }

    #[test]
    fn product_spec_nests() {
        let spec: SpaceSpec = serde_json::from_str(
            r#"{"kind":"product","factors":[{"kind":"tree","tree_branching":2,"truncation_depth":5},{"kind":"line"}]}"#,
        )
        .unwrap();
        assert_eq!(spec.factors.as_ref().unwrap().len(), 2);
        assert_eq!(spec.factors.unwrap()[1].kind, SpaceKind::Line);
    }
}
