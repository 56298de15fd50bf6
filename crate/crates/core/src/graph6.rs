//! graph6 ingestion (short form, up to 62 vertices) and a few named graphs.
//!
//! Layout: one size byte `n + 63`, then the upper triangle of the adjacency
//! matrix read column by column (`x(0,1), x(0,2), x(1,2), x(0,3), …`),
//! packed six bits per byte with 63 added, zero-padded to a byte boundary.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;

const BIAS: u8 = 63;
const MAX_SHORT_ORDER: usize = 62;

/// A simple undirected graph as a 0/1 adjacency table with zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph6Record {
    n: usize,
    adjacency: Vec<Vec<bool>>,
}

impl Graph6Record {
    /// Graph on `n` vertices with the given undirected edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![vec![false; n]; n];
        for &(a, b) in edges {
            if a >= n || b >= n || a == b {
                return Err(Error::InvalidInput(format!(
                    "edge ({a}, {b}) invalid for {n} vertices"
                )));
            }
            adjacency[a][b] = true;
            adjacency[b][a] = true;
        }
        Ok(Self { n, adjacency })
    }

    pub fn cycle(n: usize) -> Self {
        let edges: Vec<_> = (0..n).map(|k| (k, (k + 1) % n)).collect();
        Self::from_edges(n, &edges).expect("cycle needs n >= 3")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|k| (k - 1, k)).collect();
        Self::from_edges(n, &edges).expect("valid path edges")
    }

    pub fn complete(n: usize) -> Self {
        let edges: Vec<_> = (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .collect();
        Self::from_edges(n, &edges).expect("valid complete edges")
    }

    /// Complete bipartite graph `K_{a,b}` with parts `0..a` and `a..a+b`.
    pub fn complete_bipartite(a: usize, b: usize) -> Self {
        let edges: Vec<_> = (0..a)
            .flat_map(|x| (a..a + b).map(move |y| (x, y)))
            .collect();
        Self::from_edges(a + b, &edges).expect("valid bipartite edges")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a][b]
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n)
            .map(|a| ((a + 1)..self.n).filter(|&b| self.adjacency[a][b]).count())
            .sum()
    }

    /// The adjacency matrix as a real symmetric matrix.
    pub fn adjacency_matrix(&self) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_upper_fn(self.n, |a, b| {
            if self.adjacency[a][b] {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Reads a 0/1 symmetric matrix with zero diagonal back into a graph.
    pub fn from_adjacency(m: &SymmetricMatrix) -> Result<Self> {
        let n = m.n();
        let mut adjacency = vec![vec![false; n]; n];
        for a in 0..n {
            for b in 0..n {
                let v = m.get(a, b);
                let bit = match v {
                    x if x == 0.0 => false,
                    x if x == 1.0 && a != b => true,
                    _ => {
                        return Err(Error::InvalidInput(format!(
                            "entry ({a}, {b}) = {v} is not a simple-graph adjacency value"
                        )))
                    }
                };
                adjacency[a][b] = bit;
            }
        }
        Ok(Self { n, adjacency })
    }
}

fn upper_triangle_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..n).flat_map(|j| (0..j).map(move |i| (i, j)))
}

/// Decodes one graph6 line. Surrounding whitespace is ignored; an optional
/// `>>graph6<<` header is accepted.
pub fn graph6_decode(text: &str) -> Result<Graph6Record> {
    let trimmed = text.trim_end_matches(['\n', '\r']);
    let (bytes, base) = match trimmed.strip_prefix(">>graph6<<") {
        Some(rest) => (rest.as_bytes(), ">>graph6<<".len()),
        None => (trimmed.as_bytes(), 0),
    };
    let parse_err = |offset: usize, message: String| Error::Parse {
        offset: base + offset,
        message,
    };

    let Some(&first) = bytes.first() else {
        return Err(parse_err(0, "empty record".into()));
    };
    if first == b'~' {
        return Err(parse_err(
            0,
            format!("long-form graph6 (more than {MAX_SHORT_ORDER} vertices) is not supported"),
        ));
    }
    if !(BIAS..=126).contains(&first) {
        return Err(parse_err(0, format!("invalid size byte 0x{first:02x}")));
    }
    let n = (first - BIAS) as usize;

    let bits_needed = n * n.saturating_sub(1) / 2;
    let bytes_needed = bits_needed.div_ceil(6);
    let body = &bytes[1..];
    for (k, &b) in body.iter().enumerate() {
        if !(BIAS..=126).contains(&b) {
            return Err(parse_err(1 + k, format!("invalid graph6 byte 0x{b:02x}")));
        }
    }
    if body.len() < bytes_needed {
        return Err(parse_err(
            bytes.len(),
            format!(
                "truncated bit field: {n} vertices need {bytes_needed} data bytes, found {}",
                body.len()
            ),
        ));
    }
    if body.len() > bytes_needed {
        return Err(parse_err(
            1 + bytes_needed,
            format!(
                "trailing data: {n} vertices need {bytes_needed} data bytes, found {}",
                body.len()
            ),
        ));
    }

    let bit = |k: usize| -> bool {
        let byte = body[k / 6] - BIAS;
        (byte >> (5 - k % 6)) & 1 == 1
    };
    for k in bits_needed..bytes_needed * 6 {
        if bit(k) {
            return Err(parse_err(1 + k / 6, "nonzero padding bits".into()));
        }
    }

    let mut adjacency = vec![vec![false; n]; n];
    for (k, (i, j)) in upper_triangle_pairs(n).enumerate() {
        if bit(k) {
            adjacency[i][j] = true;
            adjacency[j][i] = true;
        }
    }
    Ok(Graph6Record { n, adjacency })
}

/// Encodes a graph as a short-form graph6 string (no trailing newline).
pub fn graph6_encode(g: &Graph6Record) -> Result<String> {
    if g.n > MAX_SHORT_ORDER {
        return Err(Error::InvalidInput(format!(
            "graph with {} vertices needs long-form graph6",
            g.n
        )));
    }
    let mut out = vec![g.n as u8 + BIAS];
    let mut acc = 0u8;
    let mut filled = 0;
    for (i, j) in upper_triangle_pairs(g.n) {
        acc = (acc << 1) | u8::from(g.adjacency[i][j]);
        filled += 1;
        if filled == 6 {
            out.push(acc + BIAS);
            acc = 0;
            filled = 0;
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + BIAS);
    }
    Ok(String::from_utf8(out).expect("graph6 bytes are ASCII"))
}

/// Parses a multi-line graph6 document, skipping blank lines and lines that
/// start with `#`. Errors carry the 1-based line number.
pub fn graph6_decode_lines(text: &str) -> std::result::Result<Vec<(usize, Graph6Record)>, (usize, Error)> {
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        match graph6_decode(trimmed) {
            Ok(g) => out.push((line_no, g)),
            Err(e) => return Err((line_no, e)),
        }
    }
    Ok(out)
}
