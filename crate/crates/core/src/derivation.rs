//! Audit trees recording which rule justified each judgment.

use serde::Serialize;

/// A derivation node. Serializes with fields in the order
/// `judgment`, `rule`, `premises`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub judgment: String,
    pub rule: String,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(judgment: impl Into<String>, rule: impl Into<String>) -> Self {
        Derivation { judgment: judgment.into(), rule: rule.into(), premises: vec![] }
    }

    pub fn node(
        judgment: impl Into<String>,
        rule: impl Into<String>,
        premises: Vec<Derivation>,
    ) -> Self {
        Derivation { judgment: judgment.into(), rule: rule.into(), premises }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("derivations always serialize")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_order_is_stable() {
        let d = Derivation::node(
            "(x : Ob) |-",
            "CE",
            vec![Derivation::leaf("() |-", "EC")],
        );
        let json = serde_json::to_string(&d).unwrap();
        assert_eq!(
            json,
            r#"{"judgment":"(x : Ob) |-","rule":"CE","premises":[{"judgment":"() |-","rule":"EC","premises":[]}]}"#
        );
    }
}
