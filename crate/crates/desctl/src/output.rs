use std::io::IsTerminal;

use serde_json::Value;

/// Where results go: plain text (optionally coloured) or one JSON document.
pub struct Output {
    pub json: bool,
    color: bool,
}

impl Output {
    pub fn new(json: bool) -> Self {
        let disabled = std::env::var("DESCTL_COLOR").is_ok_and(|v| v == "0");
        Output { json, color: !json && !disabled && std::io::stdout().is_terminal() }
    }

    pub fn good(&self, text: &str) -> String {
        self.paint("32", text)
    }

    pub fn bad(&self, text: &str) -> String {
        self.paint("31", text)
    }

    fn paint(&self, code: &str, text: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{text}\x1b[0m")
        } else {
            text.to_string()
        }
    }

    pub fn emit_json(&self, value: &Value) {
        println!("{}", serde_json::to_string_pretty(value).expect("json value serializes"));
    }
}
