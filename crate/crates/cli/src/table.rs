use std::fmt::Write;

/// TSV writer with a `#`-prefixed header row.
pub struct Table {
    out: String,
    precision: usize,
}

impl Table {
    pub fn new(precision: u8, header: &[&str]) -> Self {
        let mut out = String::new();
        out.push_str("# ");
        out.push_str(&header.join("\t"));
        out.push('\n');
        Self {
            out,
            precision: precision as usize,
        }
    }

    /// Extra comment line; only valid before the first row.
    pub fn with_note(mut self, note: &str) -> Self {
        self.out.insert_str(0, &format!("# {note}\n"));
        self
    }

    pub fn rate(&self, x: f64) -> String {
        format!("{:.*}", self.precision, x)
    }

    pub fn row(&mut self, cells: &[String]) {
        let _ = writeln!(self.out, "{}", cells.join("\t"));
    }

    pub fn finish(self) -> String {
        self.out
    }
}

/// Shortest round-trip form; infinities as `-inf`/`+inf`.
pub fn threshold(x: f64) -> String {
    if x == f64::INFINITY {
        "+inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}
