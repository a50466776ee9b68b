use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Missing,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) if v.is_nan() => "nan".into(),
            Cell::Float(v) if v.is_infinite() => if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) => t.clone(),
            Cell::Missing => "none".into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}
impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

/// A CSV table with a fixed header. Floats carry 17 significant digits.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width differs from header");
        self.rows.push(row);
    }

    /// Header, rows, then the `# seed=… version=…` trailer.
    pub fn render(&self, seed: u64) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        let _ = writeln!(out, "# seed={seed} version={}", env!("CARGO_PKG_VERSION"));
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_with_trailer() {
        let mut t = Table::new(["alpha", "ok", "note"]);
        t.push(vec![0.25.into(), true.into(), Cell::from(None::<f64>)]);
        t.push(vec![(1.0 / 3.0).into(), false.into(), "x".into()]);
        let s = t.render(42);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "alpha,ok,note");
        assert_eq!(lines[1], "2.5000000000000000e-1,true,none");
        assert_eq!(lines[2], "3.3333333333333331e-1,false,x");
        assert!(lines[3].starts_with("# seed=42 version="));
        assert_eq!(t.column("ok").unwrap(), vec![&Cell::Bool(true), &Cell::Bool(false)]);
    }
}
