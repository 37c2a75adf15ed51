//! Fixed-format MPS export and a matching reader.
//!
//! The writer emits ROWS / COLUMNS (with integer markers) / RHS / RANGES /
//! BOUNDS sections. The reader accepts the same dialect so exported files can
//! be reloaded and re-solved as an independent round-trip check; it is also
//! the interchange point for external solvers.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::model::{MilpModel, Sense, VarId};
use crate::MilpError;

/// MPS field names must be whitespace-free; model names may not be.
fn sanitize(name: &str, prefix: &str, idx: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_whitespace() { '_' } else { c })
        .collect();
    if cleaned.is_empty() {
        format!("{prefix}{idx}")
    } else {
        cleaned
    }
}

pub fn write_mps(model: &MilpModel, path: &Path) -> Result<(), MilpError> {
    model.validate()?;
    let mut out = String::new();
    let _ = writeln!(out, "NAME          PSPS");
    let _ = writeln!(out, "ROWS");
    let _ = writeln!(out, " N  COST");
    let row_names: Vec<String> = model
        .constraints
        .iter()
        .enumerate()
        .map(|(i, c)| sanitize(&c.name, "R", i))
        .collect();
    for (c, rn) in model.constraints.iter().zip(&row_names) {
        let tag = match c.sense {
            Sense::Le => 'L',
            Sense::Eq => 'E',
            Sense::Ge => 'G',
        };
        let _ = writeln!(out, " {tag}  {rn}");
    }

    // Column-major view of the constraint matrix.
    let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.num_vars()];
    for (i, c) in model.constraints.iter().enumerate() {
        for &(v, coef) in &c.coeffs {
            cols[v.0].push((i, coef));
        }
    }
    let col_names: Vec<String> = model
        .variables
        .iter()
        .enumerate()
        .map(|(j, v)| sanitize(&v.name, "C", j))
        .collect();

    let _ = writeln!(out, "COLUMNS");
    let mut in_integer_block = false;
    let mut marker_count = 0usize;
    for (j, var) in model.variables.iter().enumerate() {
        if var.is_integer != in_integer_block {
            let kind = if var.is_integer { "INTORG" } else { "INTEND" };
            let _ = writeln!(
                out,
                "    MARKER{marker_count}                'MARKER'                 '{kind}'"
            );
            marker_count += 1;
            in_integer_block = var.is_integer;
        }
        let mut entries: Vec<(String, f64)> = Vec::new();
        if var.objective != 0.0 {
            entries.push(("COST".to_string(), var.objective));
        }
        for &(i, coef) in &cols[j] {
            entries.push((row_names[i].clone(), coef));
        }
        if entries.is_empty() {
            // Column must appear at least once to exist for readers.
            entries.push(("COST".to_string(), 0.0));
        }
        for pair in entries.chunks(2) {
            let mut line = format!("    {:<10}", col_names[j]);
            for (rn, coef) in pair {
                let _ = write!(line, "{:<10}{:<15.10e}  ", rn, coef);
            }
            let _ = writeln!(out, "{}", line.trim_end());
        }
    }
    if in_integer_block {
        let _ = writeln!(
            out,
            "    MARKER{marker_count}                'MARKER'                 'INTEND'"
        );
    }

    let _ = writeln!(out, "RHS");
    for (c, rn) in model.constraints.iter().zip(&row_names) {
        if c.rhs != 0.0 {
            let _ = writeln!(out, "    RHS       {:<10}{:<15.10e}", rn, c.rhs);
        }
    }

    // No ranged rows are produced by the formulation today, but readers expect
    // the section header to be legal; emit it only when needed (never, so far).
    let _ = writeln!(out, "BOUNDS");
    for (j, var) in model.variables.iter().enumerate() {
        let name = &col_names[j];
        let (lo, up) = (var.lower, var.upper);
        if var.is_integer && lo == 0.0 && up == 1.0 {
            let _ = writeln!(out, " BV BND       {name}");
            continue;
        }
        match (lo.is_finite(), up.is_finite()) {
            (true, true) if lo == up => {
                let _ = writeln!(out, " FX BND       {:<10}{:<15.10e}", name, lo);
            }
            (true, true) => {
                let _ = writeln!(out, " LO BND       {:<10}{:<15.10e}", name, lo);
                let _ = writeln!(out, " UP BND       {:<10}{:<15.10e}", name, up);
            }
            (true, false) => {
                if lo != 0.0 {
                    let _ = writeln!(out, " LO BND       {:<10}{:<15.10e}", name, lo);
                }
            }
            (false, true) => {
                let _ = writeln!(out, " MI BND       {name}");
                let _ = writeln!(out, " UP BND       {:<10}{:<15.10e}", name, up);
            }
            (false, false) => {
                let _ = writeln!(out, " FR BND       {name}");
            }
        }
    }
    let _ = writeln!(out, "ENDATA");

    fs::write(path, out).map_err(|e| MilpError::Io(format!("{}: {e}", path.display())))
}

/// Reads the MPS dialect produced by [`write_mps`] (plus RANGES, for files
/// coming from external tools).
pub fn read_mps(path: &Path) -> Result<MilpModel, MilpError> {
    let text =
        fs::read_to_string(path).map_err(|e| MilpError::Io(format!("{}: {e}", path.display())))?;
    parse_mps(&text)
}

pub fn parse_mps(text: &str) -> Result<MilpModel, MilpError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Section {
        None,
        Rows,
        Columns,
        Rhs,
        Ranges,
        Bounds,
        Done,
    }
    let bad = |line: &str, why: &str| MilpError::Parse(format!("MPS: {why}: {line:?}"));

    let mut model = MilpModel::new();
    let mut section = Section::None;
    let mut row_sense: HashMap<String, Sense> = HashMap::new();
    let mut row_order: Vec<String> = Vec::new();
    let mut obj_row: Option<String> = None;
    let mut col_ids: HashMap<String, VarId> = HashMap::new();
    // (row name -> sparse coefficients), built before constraints materialize.
    let mut row_coeffs: HashMap<String, Vec<(VarId, f64)>> = HashMap::new();
    let mut rhs: HashMap<String, f64> = HashMap::new();
    let mut ranges: HashMap<String, f64> = HashMap::new();
    let mut integer_mode = false;

    for raw in text.lines() {
        if raw.trim().is_empty() || raw.starts_with('*') {
            continue;
        }
        let is_header = !raw.starts_with(' ') && !raw.starts_with('\t');
        if is_header {
            let head = raw.split_whitespace().next().unwrap_or("");
            section = match head {
                "NAME" => section,
                "ROWS" => Section::Rows,
                "COLUMNS" => Section::Columns,
                "RHS" => Section::Rhs,
                "RANGES" => Section::Ranges,
                "BOUNDS" => Section::Bounds,
                "ENDATA" => Section::Done,
                other => return Err(bad(raw, &format!("unknown section {other}"))),
            };
            continue;
        }
        let fields: Vec<&str> = raw.split_whitespace().collect();
        match section {
            Section::None | Section::Done => {}
            Section::Rows => {
                if fields.len() != 2 {
                    return Err(bad(raw, "ROWS line needs sense and name"));
                }
                match fields[0] {
                    "N" => {
                        if obj_row.is_none() {
                            obj_row = Some(fields[1].to_string());
                        }
                    }
                    "L" => {
                        row_sense.insert(fields[1].to_string(), Sense::Le);
                        row_order.push(fields[1].to_string());
                    }
                    "G" => {
                        row_sense.insert(fields[1].to_string(), Sense::Ge);
                        row_order.push(fields[1].to_string());
                    }
                    "E" => {
                        row_sense.insert(fields[1].to_string(), Sense::Eq);
                        row_order.push(fields[1].to_string());
                    }
                    other => return Err(bad(raw, &format!("unknown row sense {other}"))),
                }
            }
            Section::Columns => {
                if fields.len() >= 3 && fields[1] == "'MARKER'" {
                    match fields[2] {
                        "'INTORG'" => integer_mode = true,
                        "'INTEND'" => integer_mode = false,
                        other => return Err(bad(raw, &format!("unknown marker {other}"))),
                    }
                    continue;
                }
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(bad(raw, "COLUMNS line needs name and row/value pairs"));
                }
                let col = fields[0];
                let id = *col_ids.entry(col.to_string()).or_insert_with(|| {
                    model.add_var(col, 0.0, f64::INFINITY, 0.0, integer_mode)
                });
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| bad(raw, "bad numeric value"))?;
                    if Some(pair[0]) == obj_row.as_deref() {
                        model.variables[id.0].objective += value;
                    } else if row_sense.contains_key(pair[0]) {
                        row_coeffs.entry(pair[0].to_string()).or_default().push((id, value));
                    } else {
                        return Err(bad(raw, &format!("unknown row {}", pair[0])));
                    }
                }
            }
            Section::Rhs => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(bad(raw, "RHS line needs set name and row/value pairs"));
                }
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| bad(raw, "bad numeric value"))?;
                    rhs.insert(pair[0].to_string(), value);
                }
            }
            Section::Ranges => {
                if fields.len() < 3 || fields.len() % 2 == 0 {
                    return Err(bad(raw, "RANGES line needs set name and row/value pairs"));
                }
                for pair in fields[1..].chunks(2) {
                    let value: f64 = pair[1]
                        .parse()
                        .map_err(|_| bad(raw, "bad numeric value"))?;
                    ranges.insert(pair[0].to_string(), value);
                }
            }
            Section::Bounds => {
                if fields.len() < 3 {
                    return Err(bad(raw, "BOUNDS line needs kind, set and column"));
                }
                let kind = fields[0];
                let col = fields[2];
                let id = *col_ids
                    .get(col)
                    .ok_or_else(|| bad(raw, &format!("bound on unknown column {col}")))?;
                let value = || -> Result<f64, MilpError> {
                    fields
                        .get(3)
                        .ok_or_else(|| bad(raw, "missing bound value"))?
                        .parse()
                        .map_err(|_| bad(raw, "bad numeric value"))
                };
                let var = &mut model.variables[id.0];
                match kind {
                    "LO" => var.lower = value()?,
                    "UP" => var.upper = value()?,
                    "FX" => {
                        let v = value()?;
                        var.lower = v;
                        var.upper = v;
                    }
                    "FR" => {
                        var.lower = f64::NEG_INFINITY;
                        var.upper = f64::INFINITY;
                    }
                    "MI" => var.lower = f64::NEG_INFINITY,
                    "PL" => var.upper = f64::INFINITY,
                    "BV" => {
                        var.lower = 0.0;
                        var.upper = 1.0;
                        var.is_integer = true;
                    }
                    "UI" => {
                        var.upper = value()?;
                        var.is_integer = true;
                    }
                    "LI" => {
                        var.lower = value()?;
                        var.is_integer = true;
                    }
                    other => return Err(bad(raw, &format!("unknown bound kind {other}"))),
                }
            }
        }
    }
    if section != Section::Done {
        return Err(MilpError::Parse("MPS: missing ENDATA".into()));
    }

    for name in row_order {
        let sense = row_sense[&name];
        let coeffs = row_coeffs.remove(&name).unwrap_or_default();
        let base = rhs.get(&name).copied().unwrap_or(0.0);
        match ranges.get(&name) {
            None => model.add_constraint(&name, coeffs, sense, base),
            Some(&r) => {
                // RANGES turns a row into an interval per the MPS convention.
                let (lo, hi) = match sense {
                    Sense::Le => (base - r.abs(), base),
                    Sense::Ge => (base, base + r.abs()),
                    Sense::Eq if r >= 0.0 => (base, base + r),
                    Sense::Eq => (base + r, base),
                };
                model.add_constraint(format!("{name}.lo"), coeffs.clone(), Sense::Ge, lo);
                model.add_constraint(format!("{name}.hi"), coeffs, Sense::Le, hi);
            }
        }
    }
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{solve, SolveOptions};

    #[test]
    fn knapsack_round_trips_with_binary_marks() {
        let mut m = MilpModel::new();
        let x1 = m.add_binary("x1", -3.0);
        let x2 = m.add_binary("x2", -4.0);
        m.add_constraint("w", vec![(x1, 2.0), (x2, 3.0)], Sense::Le, 4.0);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("knap.mps");
        write_mps(&m, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        for section in ["ROWS", "COLUMNS", "RHS", "BOUNDS", "ENDATA"] {
            assert!(text.contains(section), "missing {section} section");
        }
        assert!(text.contains(" BV "), "binaries must use BV bounds");

        let back = read_mps(&path).unwrap();
        let a = solve(&m, &SolveOptions::default()).unwrap();
        let b = solve(&back, &SolveOptions::default()).unwrap();
        assert!((a.objective - b.objective).abs() < 1e-9);
    }

    #[test]
    fn empty_model_writes_header_only_file_readers_accept() {
        let m = MilpModel::new();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("empty.mps");
        write_mps(&m, &path).unwrap();
        let back = read_mps(&path).unwrap();
        assert_eq!(back.num_vars(), 0);
        assert_eq!(back.num_constraints(), 0);
    }

    #[test]
    fn ranges_become_interval_rows() {
        let text = "NAME T\nROWS\n N COST\n L R1\nCOLUMNS\n    X  COST  1.0  R1  1.0\nRHS\n    RHS  R1  5.0\nRANGES\n    RNG  R1  2.0\nBOUNDS\n FR BND X\nENDATA\n";
        let m = parse_mps(text).unwrap();
        assert_eq!(m.num_constraints(), 2);
        // 3 <= x <= 5, minimize x -> 3.
        let sol = solve(&m, &SolveOptions::default()).unwrap();
        assert!((sol.objective - 3.0).abs() < 1e-9);
    }
}
