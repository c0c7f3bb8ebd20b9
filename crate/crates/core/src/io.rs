//! File formats.
//!
//! Grid functions are stored as JSON `{dim, axes: [{lo, hi, n}], values}`
//! with `"+inf"` / `"-inf"` sentinels, or exported as CSV `x[,y],value` with
//! `inf` sentinels. JSON output prints every float with 17 significant
//! digits, so finite values round-trip bit for bit; CSV uses 9 digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::extreal::ExtReal;
use crate::grid::{Axis, Grid, GridFn};

/// JSON value for an extended real: a number, or a string sentinel.
pub fn ext_value(v: f64) -> Value {
    if v == f64::INFINITY {
        Value::String("+inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        Value::from(v)
    }
}

fn axes_value(grid: &Grid) -> Value {
    Value::Array(
        grid.axes()
            .iter()
            .map(|a| {
                let mut m = Map::new();
                m.insert("lo".into(), Value::from(a.lo));
                m.insert("hi".into(), Value::from(a.hi));
                m.insert("n".into(), Value::from(a.n));
                Value::Object(m)
            })
            .collect(),
    )
}

/// JSON object for a grid function.
pub fn gridfn_value(f: &GridFn) -> Value {
    let mut m = Map::new();
    m.insert("dim".into(), Value::from(f.dim()));
    m.insert("axes".into(), axes_value(f.grid()));
    m.insert("values".into(), Value::Array(f.values().iter().map(|&v| ext_value(v)).collect()));
    Value::Object(m)
}

/// Serializes a grid function to its JSON file format.
pub fn gridfn_to_json(f: &GridFn) -> String {
    to_json_string(&gridfn_value(f))
}

#[derive(Deserialize)]
struct GridFnFile {
    dim: usize,
    axes: Vec<Axis>,
    values: Vec<ExtReal>,
}

/// Parses the JSON file format.
pub fn gridfn_from_json(text: &str) -> Result<GridFn> {
    let file: GridFnFile = serde_json::from_str(text)?;
    if file.dim != file.axes.len() {
        return Err(Error::Format(format!(
            "dim = {} but {} axes given",
            file.dim,
            file.axes.len()
        )));
    }
    let axes = file
        .axes
        .iter()
        .map(|a| Axis::new(a.lo, a.hi, a.n))
        .collect::<Result<Vec<_>>>()?;
    let grid = Grid::new(axes)?;
    GridFn::new(grid, file.values.into_iter().map(f64::from).collect())
}

pub fn read_gridfn(path: &Path) -> Result<GridFn> {
    gridfn_from_json(&std::fs::read_to_string(path)?)
}

fn csv_number(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v:.8e}")
    }
}

/// CSV export: header `x,value` or `x,y,value`, one row per node.
pub fn gridfn_to_csv(f: &GridFn) -> String {
    let g = f.grid();
    let mut out = String::with_capacity(32 * g.len());
    out.push_str(if g.dim() == 1 { "x,value\n" } else { "x,y,value\n" });
    for (k, &v) in f.values().iter().enumerate() {
        let p = g.node2(k);
        if g.dim() == 1 {
            let _ = writeln!(out, "{},{}", csv_number(p[0]), csv_number(v));
        } else {
            let _ = writeln!(out, "{},{},{}", csv_number(p[0]), csv_number(p[1]), csv_number(v));
        }
    }
    out
}

/// Deterministic compact JSON with floats at 17 significant digits.
pub fn to_json_string(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                let x = n.as_f64().unwrap_or(f64::NAN);
                let _ = write!(out, "{x:.16e}");
            } else {
                let _ = write!(out, "{n}");
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Writes `contents` to `path` through a temporary file and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| Error::Io(format!("not a file path: {}", path.display())))?
        .to_string_lossy()
        .into_owned();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    {
        let mut file = std::fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn json_layout_and_sentinels() {
        let g = Grid::line(-1.0, 1.0, 3).unwrap();
        let f = GridFn::new(g, vec![f64::INFINITY, 0.5, f64::NEG_INFINITY]).unwrap();
        let s = gridfn_to_json(&f);
        assert!(s.contains(r#""values":["+inf",5.0000000000000000e-1,"-inf"]"#), "{s}");
        assert_eq!(gridfn_from_json(&s).unwrap(), f);
    }

    #[test]
    fn csv_layout() {
        let g = Grid::line(0.0, 1.0, 2).unwrap();
        let f = GridFn::new(g, vec![1.0, f64::INFINITY]).unwrap();
        let csv = gridfn_to_csv(&f);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,value");
        assert_eq!(lines[1], "0.00000000e0,1.00000000e0");
        assert_eq!(lines[2], "1.00000000e0,inf");

        let g2 = Grid::square(0.0, 1.0, 2).unwrap();
        let f2 = GridFn::from_fn(g2, |x| x[0] + x[1]).unwrap();
        assert!(gridfn_to_csv(&f2).starts_with("x,y,value\n"));
    }

    #[test]
    fn malformed_files_are_rejected() {
        assert!(gridfn_from_json(r#"{"dim":2,"axes":[{"lo":0,"hi":1,"n":2}],"values":[0,0]}"#).is_err());
        assert!(gridfn_from_json(r#"{"dim":1,"axes":[{"lo":0,"hi":1,"n":2}],"values":[0]}"#).is_err());
        assert!(gridfn_from_json(r#"{"dim":1,"axes":[{"lo":0,"hi":1,"n":2}],"values":[0,"x"]}"#).is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = std::env::temp_dir().join(format!("convan-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("out.json");
        write_atomic(&p, "a").unwrap();
        write_atomic(&p, "b").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "b");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    proptest! {
        #[test]
        fn finite_values_round_trip_bit_exact(vals in proptest::collection::vec(
            prop_oneof![any::<f64>().prop_filter("finite", |v| v.is_finite()), Just(f64::INFINITY)], 2..40)
        ) {
            let g = Grid::line(-1.0, 1.0, vals.len()).unwrap();
            let f = GridFn::new(g, vals.clone()).unwrap();
            let back = gridfn_from_json(&gridfn_to_json(&f)).unwrap();
            for (a, b) in vals.iter().zip(back.values()) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }
}
