use serde::{Deserialize, Serialize};

use super::{ChangeUnit, FunctionChanges};

/// JSON shape served to clients for one function's changes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireFunctionChanges {
    pub function: String,
    pub units: Vec<WireUnit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireUnit {
    pub kind: String,
    pub anchor: Vec<usize>,
    pub construct: String,
    pub before: Option<String>,
    pub after: Option<String>,
}

impl From<&ChangeUnit> for WireUnit {
    fn from(u: &ChangeUnit) -> Self {
        WireUnit {
            kind: u.kind.as_str().to_string(),
            anchor: u.anchor.clone(),
            construct: u.construct.as_str().to_string(),
            before: u.before.clone(),
            after: u.after.clone(),
        }
    }
}

impl From<&FunctionChanges> for WireFunctionChanges {
    fn from(f: &FunctionChanges) -> Self {
        WireFunctionChanges { function: f.function.to_string(), units: f.units.iter().map(WireUnit::from).collect() }
    }
}
