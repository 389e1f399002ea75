use super::{Graph, VertexId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct EdgeListOptions {
    /// Smallest vertex id in the file (0 or 1).
    pub indexing_base: u8,
    /// Weight for lines of the form `u v`.
    pub default_weight: f64,
    /// Declared vertex count; inferred from the largest id when `None`.
    pub num_vertices: Option<usize>,
}

impl Default for EdgeListOptions {
    fn default() -> Self {
        Self {
            indexing_base: 0,
            default_weight: 1.0,
            num_vertices: None,
        }
    }
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') || line.starts_with('%')
}

fn parse_id(tok: &str, base: u64, line: usize) -> Result<VertexId> {
    let raw: u64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid vertex id {tok:?}"),
    })?;
    if raw < base {
        return Err(Error::Parse {
            line,
            message: format!("vertex id {raw} is below the indexing base {base}"),
        });
    }
    VertexId::try_from(raw - base).map_err(|_| Error::Parse {
        line,
        message: format!("vertex id {raw} exceeds the 32-bit range"),
    })
}

fn parse_weight(tok: &str, line: usize) -> Result<f64> {
    let w: f64 = tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid weight {tok:?}"),
    })?;
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::Validation(format!(
            "line {line}: weight {w} is not positive"
        )));
    }
    Ok(w)
}

/// Reads a whitespace-separated edge list (`u v` or `u v w` per line, `#` or
/// `%` comments) into a symmetrized graph.
pub fn load_edge_list(text: &str, opts: &EdgeListOptions) -> Result<Graph> {
    if opts.indexing_base > 1 {
        return Err(Error::Config("indexing base must be 0 or 1".into()));
    }
    if !(opts.default_weight > 0.0) {
        return Err(Error::Validation("default weight must be positive".into()));
    }
    let base = opts.indexing_base as u64;
    let mut edges = Vec::new();
    let mut max_id: Option<VertexId> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || is_comment(line) {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 && toks.len() != 3 {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected \"u v\" or \"u v w\", found {} fields", toks.len()),
            });
        }
        let u = parse_id(toks[0], base, line_no)?;
        let v = parse_id(toks[1], base, line_no)?;
        let w = match toks.get(2) {
            Some(t) => parse_weight(t, line_no)?,
            None => opts.default_weight,
        };
        if let Some(n) = opts.num_vertices {
            if u as usize >= n || v as usize >= n {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("vertex outside the declared range of {n} vertices"),
                });
            }
        }
        max_id = Some(max_id.map_or(u.max(v), |m| m.max(u).max(v)));
        edges.push((u, v, w));
    }
    let n = opts
        .num_vertices
        .unwrap_or_else(|| max_id.map_or(0, |m| m as usize + 1));
    Graph::from_undirected_edges(n, edges)
}

/// Reads a MatrixMarket coordinate file (`pattern`, `real` or `integer`
/// field; `general` or `symmetric` symmetry). Every stored entry is treated
/// as an undirected edge, so a general file listing both `(i, j)` and
/// `(j, i)` yields their summed weight.
pub fn load_matrix_market(text: &str) -> Result<Graph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "empty file".into(),
    })?;
    let fields: Vec<String> = header
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if fields.len() != 5 || fields[0] != "%%matrixmarket" {
        return Err(Error::Parse {
            line: 1,
            message: "missing %%MatrixMarket header".into(),
        });
    }
    if fields[1] != "matrix" || fields[2] != "coordinate" {
        return Err(Error::UnsupportedFormat(format!(
            "{} {}",
            fields[1], fields[2]
        )));
    }
    let pattern = match fields[3].as_str() {
        "pattern" => true,
        "real" | "integer" => false,
        other => return Err(Error::UnsupportedFormat(format!("field {other}"))),
    };
    match fields[4].as_str() {
        "general" | "symmetric" => {}
        other => return Err(Error::UnsupportedFormat(format!("symmetry {other}"))),
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let Some((rows, cols, _)) = size else {
            if toks.len() != 3 {
                return Err(Error::Parse {
                    line: line_no,
                    message: "expected \"rows cols entries\" size line".into(),
                });
            }
            let parse = |t: &str| {
                t.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    message: format!("invalid size field {t:?}"),
                })
            };
            size = Some((parse(toks[0])?, parse(toks[1])?, parse(toks[2])?));
            continue;
        };
        let expected = if pattern { 2 } else { 3 };
        if toks.len() != expected {
            return Err(Error::Parse {
                line: line_no,
                message: format!("expected {expected} fields, found {}", toks.len()),
            });
        }
        let i = parse_id(toks[0], 1, line_no)?;
        let j = parse_id(toks[1], 1, line_no)?;
        if i as usize >= rows || j as usize >= cols {
            return Err(Error::Parse {
                line: line_no,
                message: format!("entry ({}, {}) outside {rows}x{cols}", i + 1, j + 1),
            });
        }
        let w = if pattern {
            1.0
        } else {
            parse_weight(toks[2], line_no)?
        };
        edges.push((i, j, w));
    }
    let (rows, cols, nnz) = size.ok_or(Error::Parse {
        line: 1,
        message: "missing size line".into(),
    })?;
    if edges.len() != nnz {
        return Err(Error::Validation(format!(
            "size line declares {nnz} entries but {} were read",
            edges.len()
        )));
    }
    Graph::from_undirected_edges(rows.max(cols), edges)
}
