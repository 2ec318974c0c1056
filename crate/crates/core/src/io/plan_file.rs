use super::{write_atomic, IoError};
use crate::plan::ScanPlan;
use std::path::Path;

/// Pretty JSON with a trailing newline. Field order follows the struct
/// definitions, so equal plans give equal text.
pub fn plan_to_string(plan: &ScanPlan) -> String {
    let mut s = serde_json::to_string_pretty(plan).expect("plan serializes");
    s.push('\n');
    s
}

pub fn save_plan(plan: &ScanPlan, path: &Path) -> Result<(), IoError> {
    write_atomic(path, plan_to_string(plan).as_bytes())
}

fn parse_plan(text: &str) -> Result<ScanPlan, IoError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        // A missing field is named only in the message.
        let named = msg
            .split('`')
            .nth(1)
            .filter(|_| msg.starts_with("missing field"));
        let key = match (path.as_str(), named) {
            (".", Some(k)) => k.to_string(),
            (p, Some(k)) => format!("{p}.{k}"),
            (p, None) => p.to_string(),
        };
        IoError::Schema { key, message: msg }
    })
}

pub fn load_plan(path: &Path) -> Result<ScanPlan, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_plan(&text)
}

/// Loads a plan and checks it was produced under the config with hash
/// `expected_hash`.
pub fn load_plan_verified(path: &Path, expected_hash: &str) -> Result<ScanPlan, IoError> {
    let plan = load_plan(path)?;
    if plan.config_hash != expected_hash {
        return Err(IoError::Schema {
            key: "config_hash".into(),
            message: format!("plan has {}, config has {expected_hash}", plan.config_hash),
        });
    }
    Ok(plan)
}
