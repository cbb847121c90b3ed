use braidseed::{Error, ErrorKind};
use serde::Serialize;
use serde_json::{json, Map, Value};

/// A structured failure: `{code, message, context}` on the wire plus an HTTP status.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    pub context: Value,
}

impl ApiError {
    pub fn new(status: u16, code: &str, message: String, context: Value) -> Self {
        ApiError { status, code: code.to_string(), message, context }
    }

    pub fn bad_request(code: &str, message: String, context: Value) -> Self {
        ApiError::new(400, code, message, context)
    }

    pub fn missing(field: &str, command: &str) -> Self {
        ApiError::bad_request(
            "missing_field",
            format!("{command} needs the field {field:?}"),
            json!({ "field": field, "command": command }),
        )
    }

    /// Records which payload field the error came from.
    pub fn with_field(mut self, field: &str) -> Self {
        if let Value::Object(map) = &mut self.context {
            map.entry("field").or_insert_with(|| json!(field));
        }
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error bodies always serialize")
    }
}

fn big(x: u128) -> Value {
    u64::try_from(x).map_or_else(|_| json!(x.to_string()), |x| json!(x))
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, kind) = match e.kind() {
            ErrorKind::Input => (400, "input"),
            ErrorKind::Domain => (422, "domain"),
            ErrorKind::Resource => (422, "resource"),
            ErrorKind::Invariant => (500, "invariant"),
        };
        let mut context = match &e {
            Error::UnsupportedType { series, rank } => json!({ "series": series, "rank": rank }),
            Error::LetterOutOfRange { position, letter, rank } => {
                json!({ "position": position, "letter": letter, "rank": rank })
            }
            Error::IndexOutOfRange { what, index, limit } => json!({ "what": what, "index": index, "limit": limit }),
            Error::NotReduced { word } => json!({ "word": word }),
            Error::NotSpellable { pattern, demazure } => json!({ "pattern": pattern, "demazure": demazure }),
            Error::FrozenVertex(vertex) => json!({ "vertex": vertex }),
            Error::NotEquivalent { from, to } => json!({ "from": from, "to": to }),
            Error::OutsideRecursion { vertex, reason } => json!({ "vertex": vertex, "reason": reason }),
            Error::SearchLimit { limit } => json!({ "limit": limit }),
            Error::BudgetExceeded { needed, budget } => json!({ "needed": big(*needed), "budget": big(*budget) }),
            Error::DimensionMismatch(_) | Error::Domain(_) | Error::Invariant(_) | Error::Overflow(_) => Value::Object(Map::new()),
        };
        context["kind"] = json!(kind);
        ApiError::new(status, e.code(), e.to_string(), context)
    }
}
