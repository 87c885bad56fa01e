//! Versioned JSON input documents: algebra descriptions and compression
//! scenarios. Rationals are `"p/q"` strings, group elements exponent maps.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::AlgebraSpec;
use crate::amalg::scenario::CompressionScenario;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

fn default_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
struct Versioned<T> {
    #[serde(default = "default_version")]
    version: u32,
    #[serde(flatten)]
    body: T,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Algebra(AlgebraSpec),
    Scenario(CompressionScenario),
}

fn check_version(v: u32) -> Result<()> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(Error::Parse(format!(
            "schema version {v} is not supported (expected {SCHEMA_VERSION})"
        )))
    }
}

fn parse_as<T: for<'de> Deserialize<'de>>(value: Value) -> Result<T> {
    let doc: Versioned<T> =
        serde_json::from_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    check_version(doc.version)?;
    Ok(doc.body)
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// A document with an `indices` array is a scenario, anything else an
/// algebra description.
pub fn parse_document(text: &str) -> Result<Document> {
    let value = parse_value(text)?;
    if value.get("indices").is_some() {
        parse_as(value).map(Document::Scenario)
    } else {
        parse_as(value).map(Document::Algebra)
    }
}

pub fn parse_algebra(text: &str) -> Result<AlgebraSpec> {
    match parse_document(text)? {
        Document::Algebra(a) => Ok(a),
        Document::Scenario(_) => Err(Error::Parse(
            "expected an algebra description, found a scenario".into(),
        )),
    }
}

pub fn parse_scenario(text: &str) -> Result<CompressionScenario> {
    match parse_document(text)? {
        Document::Scenario(s) => Ok(s),
        Document::Algebra(_) => Err(Error::Parse(
            "expected a scenario (with an \"indices\" array)".into(),
        )),
    }
}

fn render<T: Serialize + Clone>(body: &T) -> String {
    let doc = Versioned {
        version: SCHEMA_VERSION,
        body: body.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("serialisable document")
}

pub fn algebra_to_json(spec: &AlgebraSpec) -> String {
    render(spec)
}

pub fn scenario_to_json(sc: &CompressionScenario) -> String {
    render(sc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Summand;
    use crate::amalg::scenario::ScenarioIndex;
    use crate::amalg::StructureExpr;
    use crate::exact::{q, MultGroup};

    #[test]
    fn algebra_round_trip() {
        let spec = AlgebraSpec::new(
            "A",
            vec![
                Summand::matrix(vec![q(1, 3), q(1, 6)]),
                Summand::full_iii(MultGroup::from_ratios(&[q(2, 1)]).unwrap(), q(1, 2)),
            ],
        );
        let text = algebra_to_json(&spec);
        assert!(text.contains("\"version\": 1"));
        assert_eq!(parse_algebra(&text).unwrap(), spec);
    }

    #[test]
    fn handwritten_algebra() {
        let text = r#"{"name": "B", "summands": [
            {"kind": "matrix", "size": 2, "weight": "1", "eigenvalues": ["2/3", "1/3"]}
        ]}"#;
        let spec = parse_algebra(text).unwrap();
        assert_eq!(spec.summands[0].weight, q(1, 1));
    }

    #[test]
    fn scenario_round_trip() {
        let sc = CompressionScenario::new(vec![
            ScenarioIndex::new("o", q(1, 2), StructureExpr::Scalar).with_atoms(vec![q(1, 2)]),
            ScenarioIndex::new("2", q(1, 2), StructureExpr::hyperfinite())
                .with_shared(vec![q(1, 4)]),
        ]);
        let text = scenario_to_json(&sc);
        assert_eq!(parse_scenario(&text).unwrap(), sc);
        assert!(parse_algebra(&text).is_err());
    }

    #[test]
    fn rejects_other_versions() {
        let text = r#"{"version": 2, "name": "B", "summands": []}"#;
        assert!(matches!(parse_algebra(text), Err(Error::Parse(_))));
        assert!(matches!(parse_algebra("{"), Err(Error::Parse(_))));
    }
}
