//! Edge-list, Matrix Market and binary CSR cache I/O.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{DirectedGraph, Graph};
use crate::error::{Error, Result};

pub const CACHE_MAGIC: &[u8; 4] = b"CHRG";
pub const CACHE_VERSION: u32 = 1;

/// Raw parse result: dense 0-based endpoint pairs plus the external id of
/// every dense vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeList {
    pub original_ids: Vec<u64>,
    pub pairs: Vec<(usize, usize)>,
}

impl EdgeList {
    pub fn num_vertices(&self) -> usize {
        self.original_ids.len()
    }
}

/// Parses whitespace-separated `u v` pairs, one per line. Lines starting with
/// `#` or `%` are comments. External ids are compacted to `0..n` in order of
/// first appearance.
///
/// A leading `%%MatrixMarket matrix coordinate pattern ...` header switches to
/// Matrix Market coordinate input with 1-based indices; `symmetric` is
/// accepted always, `general` only when `directed` is set.
pub fn parse_edge_list<R: BufRead>(reader: R, directed: bool) -> Result<EdgeList> {
    let mut lines = reader.lines().enumerate().peekable();
    // Peek the first line for a Matrix Market banner.
    if let Some((_, Ok(first))) = lines.peek() {
        if first.trim_start().starts_with("%%MatrixMarket") {
            return parse_matrix_market(lines, directed);
        }
    }

    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut original_ids = Vec::new();
    let mut pairs = Vec::new();
    let mut dense = |raw: u64| {
        *ids.entry(raw).or_insert_with(|| {
            original_ids.push(raw);
            original_ids.len() - 1
        })
    };
    for (idx, line) in lines {
        let line = line?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') || text.starts_with('%') {
            continue;
        }
        let (u, v) = parse_pair(text, idx + 1)?;
        let u = dense(u);
        let v = dense(v);
        pairs.push((u, v));
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(EdgeList {
        original_ids,
        pairs,
    })
}

fn parse_pair(text: &str, line: usize) -> Result<(u64, u64)> {
    let mut tokens = text.split_whitespace();
    let mut next = |what: &str| -> Result<u64> {
        let tok = tokens.next().ok_or_else(|| Error::Parse {
            line,
            message: format!("missing {what} endpoint"),
        })?;
        tok.parse::<u64>().map_err(|_| Error::Parse {
            line,
            message: format!("invalid vertex id {tok:?}"),
        })
    };
    let u = next("first")?;
    let v = next("second")?;
    if let Some(extra) = tokens.next() {
        return Err(Error::Parse {
            line,
            message: format!("unexpected trailing token {extra:?}"),
        });
    }
    Ok((u, v))
}

fn parse_matrix_market<I>(lines: I, directed: bool) -> Result<EdgeList>
where
    I: Iterator<Item = (usize, std::io::Result<String>)>,
{
    let mut n = None;
    let mut pairs = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let lineno = idx + 1;
        let text = line.trim();
        if lineno == 1 {
            let fields: Vec<String> = text.split_whitespace().map(str::to_lowercase).collect();
            let ok = fields.len() == 5
                && fields[1] == "matrix"
                && fields[2] == "coordinate"
                && fields[3] == "pattern"
                && (fields[4] == "symmetric" || (directed && fields[4] == "general"));
            if !ok {
                return Err(Error::Parse {
                    line: 1,
                    message: format!("unsupported Matrix Market header {text:?}"),
                });
            }
            continue;
        }
        if text.is_empty() || text.starts_with('%') {
            continue;
        }
        match n {
            None => {
                let dims: Vec<&str> = text.split_whitespace().collect();
                let parsed: Option<Vec<usize>> = dims.iter().map(|d| d.parse().ok()).collect();
                match parsed.as_deref() {
                    Some([rows, cols, _nnz]) => n = Some((*rows).max(*cols)),
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("invalid size line {text:?}"),
                        })
                    }
                }
            }
            Some(size) => {
                let (i, j) = parse_pair(text, lineno)?;
                let in_range = |x: u64| x >= 1 && x as usize <= size;
                if !in_range(i) || !in_range(j) {
                    return Err(Error::Parse {
                        line: lineno,
                        message: format!("entry ({i},{j}) outside 1..={size}"),
                    });
                }
                pairs.push((i as usize - 1, j as usize - 1));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let size = n.unwrap_or(0);
    Ok(EdgeList {
        original_ids: (1..=size as u64).collect(),
        pairs,
    })
}

/// Loads an undirected graph from an edge-list or Matrix Market file.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Graph> {
    let list = parse_edge_list(BufReader::new(File::open(path)?), false)?;
    Ok(Graph::from_edges(list.num_vertices(), list.pairs))
}

/// Loads a directed graph; each line `u v` is the arc `u -> v`.
pub fn load_directed_edge_list(path: impl AsRef<Path>) -> Result<DirectedGraph> {
    let list = parse_edge_list(BufReader::new(File::open(path)?), true)?;
    Ok(DirectedGraph::from_arcs(list.num_vertices(), list.pairs))
}

/// Reads a binary CSR cache if the file starts with the cache magic,
/// otherwise an edge list.
pub fn read_graph(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let mut magic = [0u8; 4];
    let is_cache = {
        let mut f = File::open(path)?;
        f.read(&mut magic)? == 4 && &magic == CACHE_MAGIC
    };
    if is_cache {
        read_csr_cache(BufReader::new(File::open(path)?))
    } else {
        load_edge_list(path)
    }
}

pub fn write_edge_list<W: Write>(g: &Graph, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    for (u, v) in g.edges() {
        writeln!(w, "{u} {v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Little-endian layout: magic, version `u32`, `n: u64`, `m: u64` (stored
/// adjacency entries), `n + 1` offsets and `m` column indices as `u64`.
pub fn write_csr_cache<W: Write>(g: &Graph, writer: W) -> Result<()> {
    let mut w = BufWriter::new(writer);
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&CACHE_VERSION.to_le_bytes())?;
    w.write_all(&(g.num_vertices() as u64).to_le_bytes())?;
    w.write_all(&(g.col_indices().len() as u64).to_le_bytes())?;
    for &o in g.row_offsets() {
        w.write_all(&(o as u64).to_le_bytes())?;
    }
    for &c in g.col_indices() {
        w.write_all(&(c as u64).to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csr_cache<R: Read>(mut reader: R) -> Result<Graph> {
    let mut magic = [0u8; 4];
    reader.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(Error::InvalidCache(format!("bad magic {magic:?}")));
    }
    let mut word = [0u8; 4];
    reader.read_exact(&mut word)?;
    let version = u32::from_le_bytes(word);
    if version != CACHE_VERSION {
        return Err(Error::InvalidCache(format!(
            "unsupported version {version}"
        )));
    }
    let read_u64 = |r: &mut R| -> Result<u64> {
        let mut buf = [0u8; 8];
        r.read_exact(&mut buf)
            .map_err(|e| Error::InvalidCache(format!("truncated: {e}")))?;
        Ok(u64::from_le_bytes(buf))
    };
    let n = read_u64(&mut reader)? as usize;
    let m = read_u64(&mut reader)? as usize;
    let mut offsets = Vec::with_capacity(n.saturating_add(1).min(1 << 24));
    for _ in 0..=n {
        offsets.push(read_u64(&mut reader)? as usize);
    }
    let mut cols = Vec::with_capacity(m.min(1 << 24));
    for _ in 0..m {
        cols.push(read_u64(&mut reader)? as usize);
    }
    Graph::from_csr(offsets, cols).map_err(|e| Error::InvalidCache(e.to_string()))
}
