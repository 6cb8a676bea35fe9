//! JSON forms of instances and code tables.
//!
//! An instance file looks like
//!
//! ```json
//! { "x_symbols": ["0", "1"], "probs": [0.7, "3/10"], "y_symbols": ["0", "1"],
//!   "distortion": [[0, 1], [1, 0]], "D": 0, "epsilon": 0.2, "delta": "1/5" }
//! ```
//!
//! Probabilities and budgets may be numbers or `"p/q"` strings. Symbols may be strings or
//! numbers. Under [`Exact`](crate::prob::Exact), decimal numbers are read as the shortest
//! decimal that round-trips, so `0.3` is exactly `3/10`.

use std::path::Path;

use serde_json::{json, Map, Value};

use crate::dball_code::{CodeKind, CodeTable, Emission};
use crate::error::{LossyError, Result};
use crate::model::{CodewordIndex, DistortionSpec, FiniteSource, Instance, LossyProblem};
use crate::prob::Prob;

fn schema(msg: impl Into<String>) -> LossyError {
    LossyError::Schema(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key).ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(format!("{what} must be an array")))
}

fn symbol(v: &Value, what: &str) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(schema(format!("{what} must hold strings or numbers"))),
    }
}

fn probability<P: Prob>(v: &Value, what: &str) -> Result<P> {
    match v {
        Value::String(s) => P::parse(s).map_err(|_| schema(format!("{what}: cannot parse {s:?}"))),
        Value::Number(n) => n
            .as_f64()
            .filter(|f| f.is_finite())
            .map(P::from_f64)
            .ok_or_else(|| schema(format!("{what}: {n} is not a finite number"))),
        _ => Err(schema(format!("{what} must be a number or a \"p/q\" string"))),
    }
}

fn real(v: &Value, what: &str) -> Result<f64> {
    match v {
        Value::String(_) => probability::<f64>(v, what),
        Value::Number(n) => {
            n.as_f64().filter(|f| f.is_finite()).ok_or_else(|| schema(format!("{what}: {n} is not a finite number")))
        }
        _ => Err(schema(format!("{what} must be a number"))),
    }
}

/// Parses an instance from JSON text.
pub fn parse_instance<P: Prob>(text: &str) -> Result<Instance<P>> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| schema("instance must be a JSON object"))?;
    let x_symbols = array(field(obj, "x_symbols")?, "x_symbols")?
        .iter()
        .map(|v| symbol(v, "x_symbols"))
        .collect::<Result<Vec<_>>>()?;
    let probs = array(field(obj, "probs")?, "probs")?
        .iter()
        .map(|v| probability::<P>(v, "probs"))
        .collect::<Result<Vec<_>>>()?;
    let y_symbols = array(field(obj, "y_symbols")?, "y_symbols")?
        .iter()
        .map(|v| symbol(v, "y_symbols"))
        .collect::<Result<Vec<_>>>()?;
    let matrix = array(field(obj, "distortion")?, "distortion")?
        .iter()
        .map(|row| array(row, "distortion row")?.iter().map(|d| real(d, "distortion")).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let level = real(field(obj, "D")?, "D")?;
    let epsilon = probability::<P>(field(obj, "epsilon")?, "epsilon")?;
    let delta = probability::<P>(field(obj, "delta")?, "delta")?;
    Instance::new(FiniteSource::new(x_symbols, probs)?, y_symbols, DistortionSpec::new(matrix, level)?, epsilon, delta)
}

/// Reads and parses an instance file.
pub fn load_instance<P: Prob>(path: &Path) -> Result<Instance<P>> {
    parse_instance(&std::fs::read_to_string(path)?)
}

pub fn instance_to_json<P: Prob>(inst: &Instance<P>) -> Value {
    json!({
        "x_symbols": inst.source().symbols(),
        "probs": inst.source().probs().iter().map(Prob::to_json).collect::<Vec<_>>(),
        "y_symbols": inst.y_symbols(),
        "distortion": inst.distortion().matrix(),
        "D": inst.distortion().level(),
        "epsilon": inst.epsilon().to_json(),
        "delta": inst.delta().to_json(),
    })
}

pub fn code_to_json<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, code: &CodeTable<P>) -> Value {
    let encode: Vec<Value> = code
        .encode()
        .iter()
        .enumerate()
        .flat_map(|(x, row)| {
            row.iter()
                .map(move |e| json!({ "x": problem.x_label(x), "index": e.index.get(), "prob": e.prob.to_json() }))
        })
        .collect();
    json!({
        "kind": code.kind().as_str(),
        "decode": code.decode().iter().map(|&y| problem.y_label(y)).collect::<Vec<_>>(),
        "encode": encode,
        "rate": code.rate(),
    })
}

/// Reads a code table written by [`code_to_json`], resolving labels against `problem`.
pub fn code_from_json<P: Prob, L: LossyProblem<P> + ?Sized>(problem: &L, text: &str) -> Result<CodeTable<P>> {
    let root: Value = serde_json::from_str(text).map_err(|e| schema(format!("invalid JSON: {e}")))?;
    let obj = root.as_object().ok_or_else(|| schema("code table must be a JSON object"))?;
    let kind = match field(obj, "kind")?.as_str() {
        Some("stochastic") => CodeKind::Stochastic,
        Some("deterministic") => CodeKind::Deterministic,
        _ => return Err(schema("kind must be \"stochastic\" or \"deterministic\"")),
    };
    let y_index = |label: &str| (0..problem.y_count()).find(|&y| problem.y_label(y) == label);
    let x_index = |label: &str| (0..problem.x_count()).find(|&x| problem.x_label(x) == label);
    let decode = array(field(obj, "decode")?, "decode")?
        .iter()
        .map(|v| {
            let label = symbol(v, "decode")?;
            y_index(&label).ok_or_else(|| schema(format!("decoder emits unknown symbol {label:?}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut encode: Vec<Vec<Emission<P>>> = vec![Vec::new(); problem.x_count()];
    for entry in array(field(obj, "encode")?, "encode")? {
        let entry = entry.as_object().ok_or_else(|| schema("encode entries must be objects"))?;
        let label = symbol(field(entry, "x")?, "encode.x")?;
        let x = x_index(&label).ok_or_else(|| schema(format!("encoder maps unknown symbol {label:?}")))?;
        let index = field(entry, "index")?.as_u64().ok_or_else(|| schema("encode.index must be a positive integer"))?;
        let prob = probability::<P>(field(entry, "prob")?, "encode.prob")?;
        encode[x].push(Emission { index: CodewordIndex::new(index).map_err(|e| schema(e.to_string()))?, prob });
    }
    let rate = real(field(obj, "rate")?, "rate")?;
    CodeTable::new(kind, encode, decode, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dball_code::build_stochastic_code;
    use crate::prob::Exact;

    const BINARY: &str = r#"{ "x_symbols": ["a", "b"], "probs": [0.7, "3/10"], "y_symbols": ["a", "b"],
        "distortion": [[0, 1], [1, 0]], "D": 0, "epsilon": 0.2, "delta": "1/5" }"#;

    #[test]
    fn exact_parse_reads_decimals_as_decimals() {
        let inst: Instance<Exact> = parse_instance(BINARY).unwrap();
        assert_eq!(inst.source().probs()[0], Exact::from_ratio(7, 10));
        assert_eq!(*inst.delta(), Exact::from_ratio(1, 5));
        let back: Instance<Exact> = parse_instance(&instance_to_json(&inst).to_string()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn code_round_trip() {
        let inst: Instance<Exact> = parse_instance(BINARY).unwrap();
        let code = build_stochastic_code(&inst).unwrap();
        let text = code_to_json(&inst, &code).to_string();
        assert_eq!(code_from_json(&inst, &text).unwrap(), code);
    }

    #[test]
    fn schema_violations() {
        for bad in [
            "[]",
            "{",
            r#"{"x_symbols": ["a"], "probs": [1], "y_symbols": ["a"], "distortion": [[0]], "D": 0, "epsilon": 0.1}"#,
            r#"{"x_symbols": ["a"], "probs": ["x"], "y_symbols": ["a"], "distortion": [[0]], "D": 0, "epsilon": 0, "delta": 0}"#,
            r#"{"x_symbols": ["a", "b"], "probs": [0.5, 0.6], "y_symbols": ["a"], "distortion": [[0], [0]], "D": 0, "epsilon": 0, "delta": 0}"#,
        ] {
            assert!(matches!(parse_instance::<f64>(bad), Err(LossyError::Schema(_))), "{bad}");
        }
    }
}
