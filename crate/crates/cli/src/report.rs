//! Command output: a human-readable section (title, aligned tables, check
//! verdicts, notes) followed by a machine-readable `key=value` block that
//! round-trips losslessly through [`parse_machine_block`].

/// Sentinel line separating the human-readable text from the machine block.
pub const MACHINE_SENTINEL: &str = "== machine ==";

#[derive(Clone, Debug)]
struct Table {
    title: String,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

/// Accumulates everything a command wants to say, then renders it once.
#[derive(Clone, Debug, Default)]
pub struct Report {
    title: String,
    tables: Vec<Table>,
    checks: Vec<(String, bool)>,
    notes: Vec<String>,
    machine: Vec<(String, String)>,
}

impl Report {
    pub fn new(title: impl Into<String>) -> Self {
        Report {
            title: title.into(),
            ..Report::default()
        }
    }

    pub fn push_table(
        &mut self,
        title: impl Into<String>,
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) {
        debug_assert!(rows.iter().all(|r| r.len() == header.len()));
        self.tables.push(Table {
            title: title.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows,
        });
    }

    pub fn push_check(&mut self, name: impl Into<String>, pass: bool) {
        self.checks.push((name.into(), pass));
    }

    pub fn push_note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Append a machine-block entry. Keys must be unique and free of `=`,
    /// whitespace, and newlines; values must be single-line.
    pub fn set_machine(&mut self, key: impl Into<String>, value: impl Into<String>) {
        let key = key.into();
        let value = value.into();
        debug_assert!(
            !key.is_empty()
                && !key.contains('=')
                && !key.chars().any(char::is_whitespace)
                && !value.contains('\n'),
            "malformed machine entry {key}={value}"
        );
        debug_assert!(
            self.machine.iter().all(|(k, _)| *k != key),
            "duplicate machine key {key}"
        );
        self.machine.push((key, value));
    }

    pub fn machine(&self) -> &[(String, String)] {
        &self.machine
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|(_, pass)| *pass)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.title);
        out.push('\n');
        for table in &self.tables {
            out.push('\n');
            out.push_str(&table.title);
            out.push('\n');
            render_table(&mut out, table);
        }
        if !self.checks.is_empty() {
            out.push_str("\nchecks\n");
            for (name, pass) in &self.checks {
                let verdict = if *pass { "pass" } else { "FAIL" };
                out.push_str(&format!("  [{verdict}] {name}\n"));
            }
        }
        if !self.notes.is_empty() {
            out.push_str("\nnotes\n");
            for note in &self.notes {
                out.push_str(&format!("  - {note}\n"));
            }
        }
        out.push('\n');
        out.push_str(MACHINE_SENTINEL);
        out.push('\n');
        for (k, v) in &self.machine {
            out.push_str(&format!("{k}={v}\n"));
        }
        out
    }
}

fn render_table(out: &mut String, table: &Table) {
    let columns = table.header.len();
    let mut widths: Vec<usize> = table.header.iter().map(|h| h.chars().count()).collect();
    for row in &table.rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    // Right-align columns whose every cell is numeric, left-align the rest.
    let numeric: Vec<bool> = (0..columns)
        .map(|i| {
            !table.rows.is_empty()
                && table
                    .rows
                    .iter()
                    .all(|r| r[i].parse::<f64>().is_ok())
        })
        .collect();
    let mut line = |cells: &[String]| {
        out.push_str("  ");
        for (i, cell) in cells.iter().enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            let pad = widths[i] - cell.chars().count();
            if numeric[i] {
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            } else {
                out.push_str(cell);
                if i + 1 < columns {
                    out.push_str(&" ".repeat(pad));
                }
            }
        }
        out.push('\n');
    };
    line(&table.header);
    for row in &table.rows {
        line(row);
    }
}

/// Extract the machine block from rendered output. Returns `None` when the
/// sentinel line is absent.
pub fn parse_machine_block(text: &str) -> Option<Vec<(String, String)>> {
    let mut lines = text.lines();
    lines.by_ref().find(|l| *l == MACHINE_SENTINEL)?;
    let mut pairs = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=')?;
        pairs.push((k.to_string(), v.to_string()));
    }
    Some(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn machine_block_round_trips() {
        let mut r = Report::new("demo");
        r.push_table(
            "homology",
            &["degree", "group"],
            vec![
                vec!["0".into(), "Z".into()],
                vec!["1".into(), "Z^2 + Z/2".into()],
            ],
        );
        r.push_check("boundary squares to zero", true);
        r.set_machine("command", "demo");
        r.set_machine("h.0", "Z");
        r.set_machine("h.1", "Z^2 + Z/2");
        let text = r.render();
        let parsed = parse_machine_block(&text).unwrap();
        assert_eq!(parsed, r.machine().to_vec());
    }

    #[test]
    fn failing_checks_are_visible() {
        let mut r = Report::new("demo");
        r.push_check("a", true);
        r.push_check("b", false);
        assert!(!r.all_checks_pass());
        assert!(r.render().contains("[FAIL] b"));
    }

    #[test]
    fn numeric_columns_right_align() {
        let mut r = Report::new("demo");
        r.push_table(
            "t",
            &["degree", "name"],
            vec![
                vec!["0".into(), "a".into()],
                vec!["10".into(), "bc".into()],
            ],
        );
        let text = r.render();
        assert!(text.contains("       0  a"));
        assert!(text.contains("      10  bc"));
    }
}
