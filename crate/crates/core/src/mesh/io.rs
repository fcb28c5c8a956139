//! Plain-text mesh format:
//!
//! ```text
//! vempoly 1
//! vertices N
//! x y          (N lines)
//! cells M
//! n id_1 ... id_n   (M lines, 0-based, counter-clockwise)
//! ```
//!
//! Edges and counts are derived on load and never stored.

use super::{Point2, PolyMesh};
use crate::{Error, Real, Result};
use std::fmt::Write as _;
use std::path::Path;

pub fn format_mesh<T: Real>(mesh: &PolyMesh<T>) -> String {
    let mut s = String::new();
    writeln!(s, "vempoly 1").unwrap();
    writeln!(s, "vertices {}", mesh.vertices().len()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{} {}", v.x, v.y).unwrap();
    }
    writeln!(s, "cells {}", mesh.n_cells()).unwrap();
    for c in mesh.cells() {
        write!(s, "{}", c.vertex_ids.len()).unwrap();
        for id in &c.vertex_ids {
            write!(s, " {id}").unwrap();
        }
        s.push('\n');
    }
    s
}

pub fn write_mesh<T: Real>(mesh: &PolyMesh<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, format_mesh(mesh))?;
    Ok(())
}

pub fn read_mesh<T: Real>(path: impl AsRef<Path>) -> Result<PolyMesh<T>> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-blank line with its 1-based number.
    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        for (i, l) in self.inner.by_ref() {
            self.last = i + 1;
            let l = l.trim();
            if !l.is_empty() {
                return Ok((i + 1, l));
            }
        }
        Err(Error::Parse { line: self.last + 1, msg: format!("unexpected end of file, expected {what}") })
    }
}

fn header(lines: &mut Lines<'_>, key: &str) -> Result<usize> {
    let (no, l) = lines.next(key)?;
    let mut it = l.split_whitespace();
    match (it.next(), it.next(), it.next()) {
        (Some(k), Some(n), None) if k == key => n
            .parse()
            .map_err(|_| Error::Parse { line: no, msg: format!("bad {key} count '{n}'") }),
        _ => Err(Error::Parse { line: no, msg: format!("expected '{key} <count>'") }),
    }
}

pub fn parse_mesh<T: Real>(text: &str) -> Result<PolyMesh<T>> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (no, first) = lines.next("header")?;
    if first.split_whitespace().collect::<Vec<_>>() != ["vempoly", "1"] {
        return Err(Error::Parse { line: no, msg: "expected header 'vempoly 1'".into() });
    }
    let nv = header(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (no, l) = lines.next("vertex coordinates")?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: no, msg: format!("bad coordinate: {e}") })?;
        if xy.len() != 2 || !xy.iter().all(|c| c.is_finite()) {
            return Err(Error::Parse { line: no, msg: "expected two finite coordinates".into() });
        }
        vertices.push(Point2::new(T::lit(xy[0]), T::lit(xy[1])));
    }
    let nc = header(&mut lines, "cells")?;
    let mut loops = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (no, l) = lines.next("cell")?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse { line: no, msg: format!("bad index: {e}") })?;
        let Some((&n, rest)) = ids.split_first() else {
            return Err(Error::Parse { line: no, msg: "empty cell line".into() });
        };
        if rest.len() != n {
            return Err(Error::Parse {
                line: no,
                msg: format!("cell declares {n} vertices but lists {}", rest.len()),
            });
        }
        if let Some(bad) = rest.iter().find(|&&v| v >= nv) {
            return Err(Error::Parse { line: no, msg: format!("missing vertex {bad}") });
        }
        loops.push(rest.to_vec());
    }
    if let Ok((no, _)) = lines.next("end of file") {
        return Err(Error::Parse { line: no, msg: "trailing content after cells".into() });
    }
    PolyMesh::new(vertices, loops)
}
