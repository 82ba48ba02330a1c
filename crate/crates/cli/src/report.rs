use serde::Serialize;
use serde_json::Value;

use crate::args::Command;

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u128>,
}

/// Command path (`"fpe sweep"`) and its arguments as JSON.
pub fn describe(command: &Command) -> (String, Value) {
    let mut path = Vec::new();
    let mut value = serde_json::to_value(command).expect("arguments serialize");
    let depth = match command {
        Command::Route(_) | Command::Selftest(_) => 1,
        _ => 2,
    };
    for _ in 0..depth {
        match value {
            Value::Object(map) if map.len() == 1 => {
                let (k, v) = map.into_iter().next().expect("one entry");
                path.push(k);
                value = v;
            }
            // Unit variants serialize as bare strings.
            Value::String(s) => {
                path.push(s);
                value = Value::Object(Default::default());
            }
            other => {
                value = other;
                break;
            }
        }
    }
    (path.join(" "), value)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

/// One `key: value` line per field; nested values stay compact JSON.
pub fn render_text(result: &Value) -> String {
    match result {
        Value::Object(map) => map.iter().map(|(k, v)| format!("{k}: {}\n", scalar(v))).collect(),
        other => format!("{}\n", scalar(other)),
    }
}
