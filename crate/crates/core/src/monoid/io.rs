//! The monoid file format: a JSON object with `size`, `identity`, `table`
//! (rows of the multiplication table), `generators` (name → index) and an
//! optional `names` array.
//!
//! [`write_monoid`] emits one canonical layout, one table row per line, and
//! [`parse_monoid`] accepts any JSON with those fields, so canonical files
//! round-trip byte for byte.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;

use super::FiniteMonoid;
use crate::error::{Error, Result};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MonoidFile {
    size: usize,
    identity: usize,
    table: Vec<Vec<usize>>,
    generators: BTreeMap<String, usize>,
    #[serde(default)]
    names: Option<Vec<String>>,
}

pub fn parse_monoid(text: &str) -> Result<FiniteMonoid> {
    let f: MonoidFile = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    if f.table.len() != f.size {
        return Err(Error::Parse(format!("table has {} rows, size is {}", f.table.len(), f.size)));
    }
    if let Some(r) = f.table.iter().position(|row| row.len() != f.size) {
        return Err(Error::Parse(format!("table row {r} has {} entries, size is {}", f.table[r].len(), f.size)));
    }
    let flat = f.table.into_iter().flatten().collect();
    FiniteMonoid::new(f.size, flat, f.identity, f.generators, f.names)
}

pub fn read_monoid(path: &std::path::Path) -> Result<FiniteMonoid> {
    parse_monoid(&std::fs::read_to_string(path)?)
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn write_monoid(m: &FiniteMonoid) -> String {
    let n = m.size();
    let mut out = String::new();
    let _ = writeln!(out, "{{");
    let _ = writeln!(out, "  \"size\": {n},");
    let _ = writeln!(out, "  \"identity\": {},", m.identity());
    let _ = writeln!(out, "  \"table\": [");
    for a in 0..n {
        let row: Vec<String> = (0..n).map(|b| m.mul(a, b).to_string()).collect();
        let sep = if a + 1 < n { "," } else { "" };
        let _ = writeln!(out, "    [{}]{sep}", row.join(", "));
    }
    let _ = writeln!(out, "  ],");
    let gens: Vec<String> = m.generators().iter().map(|(k, v)| format!("{}: {v}", json_str(k))).collect();
    match m.names() {
        Some(names) => {
            let _ = writeln!(out, "  \"generators\": {{{}}},", gens.join(", "));
            let names: Vec<String> = names.iter().map(|s| json_str(s)).collect();
            let _ = writeln!(out, "  \"names\": [{}]", names.join(", "));
        }
        None => {
            let _ = writeln!(out, "  \"generators\": {{{}}}", gens.join(", "));
        }
    }
    out.push_str("}\n");
    out
}
