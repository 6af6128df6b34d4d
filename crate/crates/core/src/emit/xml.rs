//! Minimal streaming XML writer with deterministic output.

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            _ => out.push(c),
        }
    }
    out
}

pub fn escape_attr(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\n' => out.push_str("&#10;"),
            '\t' => out.push_str("&#9;"),
            '\r' => out.push_str("&#13;"),
            _ => out.push(c),
        }
    }
    out
}

/// Millimetre coordinate with at most three decimals and no trailing zeros.
pub fn num(v: f64) -> String {
    let s = format!("{:.3}", v);
    let s = if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

pub struct XmlWriter {
    out: String,
    stack: Vec<&'static str>,
    pretty: bool,
    /// Whether the innermost open element already has children.
    open_has_children: Vec<bool>,
}

pub type Attrs<'a> = &'a [(&'a str, String)];

impl XmlWriter {
    pub fn new(pretty: bool) -> Self {
        Self {
            out: String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>"),
            stack: Vec::new(),
            pretty,
            open_has_children: Vec::new(),
        }
    }

    fn newline(&mut self) {
        if self.pretty {
            self.out.push('\n');
            for _ in 0..self.stack.len() {
                self.out.push_str("  ");
            }
        }
    }

    fn start_tag(&mut self, name: &str, attrs: Attrs<'_>) {
        if let Some(last) = self.open_has_children.last_mut() {
            *last = true;
        }
        self.newline();
        self.out.push('<');
        self.out.push_str(name);
        for (k, v) in attrs {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            self.out.push_str(&escape_attr(v));
            self.out.push('"');
        }
    }

    pub fn open(&mut self, name: &'static str, attrs: Attrs<'_>) {
        self.start_tag(name, attrs);
        self.out.push('>');
        self.stack.push(name);
        self.open_has_children.push(false);
    }

    pub fn empty(&mut self, name: &str, attrs: Attrs<'_>) {
        self.start_tag(name, attrs);
        self.out.push_str("/>");
    }

    /// An element with only text content, on one line.
    pub fn text_element(&mut self, name: &str, attrs: Attrs<'_>, text: &str) {
        self.start_tag(name, attrs);
        self.out.push('>');
        self.out.push_str(&escape_text(text));
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push('>');
    }

    /// Character data inside the innermost open element.
    pub fn text(&mut self, text: &str) {
        if let Some(last) = self.open_has_children.last_mut() {
            *last = true;
        }
        self.newline();
        self.out.push_str(&escape_text(text));
    }

    pub fn close(&mut self) {
        let name = self.stack.pop().expect("close without open");
        if self.open_has_children.pop().unwrap_or(false) {
            self.newline();
        }
        self.out.push_str("</");
        self.out.push_str(name);
        self.out.push('>');
    }

    pub fn finish(mut self) -> String {
        while !self.stack.is_empty() {
            self.close();
        }
        self.out.push('\n');
        self.out
    }
}
