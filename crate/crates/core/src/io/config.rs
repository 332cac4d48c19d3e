use std::path::Path;

use super::{read_file, to_json_pretty, write_file, FormatError};
use crate::error::ValidationError;
use crate::types::EnhancementConfig;

const FIELDS: &[&str] = &[
    "lambda_s",
    "lambda_p",
    "lambda_r",
    "beta",
    "mask_order",
    "tie_break",
    "single_seed_policy",
    "method",
    "mask_filtering",
];

/// Parses a config document. Omitted fields keep their defaults.
pub fn parse_config(bytes: &[u8]) -> Result<EnhancementConfig, FormatError> {
    let value: serde_json::Value = serde_json::from_slice(bytes)?;
    let Some(obj) = value.as_object() else {
        return Err(FormatError::Syntax("config must be a JSON object".into()));
    };
    if let Some(key) = obj.keys().find(|k| !FIELDS.contains(&k.as_str())) {
        return Err(FormatError::UnknownField(key.clone()));
    }
    let config: EnhancementConfig = serde_json::from_value(value)?;
    config.validate().map_err(|e| match e {
        ValidationError::OutOfRange(msg) => FormatError::OutOfRange(msg),
        other => FormatError::Invalid(other),
    })?;
    Ok(config)
}

pub fn read_config(path: &Path) -> Result<EnhancementConfig, FormatError> {
    parse_config(&read_file(path)?).map_err(|e| e.in_file(path))
}

pub fn write_config(path: &Path, config: &EnhancementConfig) -> Result<(), FormatError> {
    write_file(path, &to_json_pretty(config))
}
