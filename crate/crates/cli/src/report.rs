use serde_json::{Map, Value};

/// Command output: text lines for people and a JSON object for tools.
#[derive(Debug, Default)]
pub struct Report {
    text: String,
    fields: Map<String, Value>,
    /// Process exit status; nonzero for failed checks such as a proptest failure.
    pub status: u8,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    /// Add a `key = value` line and the matching JSON field.
    pub fn kv(mut self, key: &str, value: impl Into<Value>) -> Self {
        let v = value.into();
        let shown = match &v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        self.text.push_str(&format!("{key} = {shown}\n"));
        self.fields.insert(key.to_string(), v);
        self
    }

    /// A JSON field with no text line.
    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    /// Text with no JSON field.
    pub fn text(mut self, s: &str) -> Self {
        self.text.push_str(s);
        if !s.ends_with('\n') {
            self.text.push('\n');
        }
        self
    }

    pub fn status(mut self, code: u8) -> Self {
        self.status = code;
        self
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            // serde_json's map is ordered by key, which keeps the output diffable.
            let mut s = serde_json::to_string_pretty(&Value::Object(self.fields.clone())).expect("a JSON value serializes");
            s.push('\n');
            s
        } else {
            self.text.clone()
        }
    }
}
