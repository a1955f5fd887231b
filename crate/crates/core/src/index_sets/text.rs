//! Line-oriented text format: a `d=<d>` header, then one multi-index per
//! line with space-separated entries. Blank lines and `#` comments are skipped.

use crate::error::{Error, Result};

use super::{IndexSet, MultiIndex};

pub fn write_index_set(set: &IndexSet) -> String {
    let mut out = format!("d={}\n", set.dim());
    for n in set {
        let line: Vec<String> = n.entries().iter().map(i32::to_string).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn parse_index_set(text: &str) -> Result<IndexSet> {
    let mut dim = None;
    let mut indices = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(d) = dim else {
            let d = line
                .strip_prefix("d=")
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&d| d >= 1)
                .ok_or_else(|| Error::Parse {
                    line: line_no,
                    msg: format!("expected header `d=<dimension>`, found `{line}`"),
                })?;
            dim = Some(d);
            continue;
        };
        let entries = line
            .split_whitespace()
            .map(|t| {
                t.parse::<i32>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("`{t}` is not an integer"),
                })
            })
            .collect::<Result<Vec<i32>>>()?;
        if entries.len() != d {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {d} entries, found {}", entries.len()),
            });
        }
        indices.push(MultiIndex::new(entries)?);
    }
    let dim = dim.ok_or(Error::Parse {
        line: 1,
        msg: "missing `d=<dimension>` header".into(),
    })?;
    IndexSet::new(dim, indices)
}
