use crate::error::{Error, Result};
use crate::hypergraph::{EdgeFamily, Vertex};

/// An edge list in which distinct labels may carry identical vertex sets.
///
/// Used for families that are counted by parameterization, such as d-cubes
/// indexed by `(x, h)` or arithmetic progressions indexed by `(a, d)`.
#[derive(Clone, Debug, Default)]
pub struct LabeledFamily {
    n: usize,
    offsets: Vec<usize>,
    vertices: Vec<Vertex>,
    labels: Vec<Vec<u32>>,
}

impl LabeledFamily {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            offsets: vec![0],
            vertices: Vec::new(),
            labels: Vec::new(),
        }
    }

    /// Appends one labeled edge; vertices are sorted and must be distinct and in range.
    pub fn push(&mut self, label: Vec<u32>, vertices: &[Vertex]) -> Result<()> {
        let start = self.vertices.len();
        self.vertices.extend_from_slice(vertices);
        let e = &mut self.vertices[start..];
        e.sort_unstable();
        let bad = e.is_empty()
            || e.windows(2).any(|w| w[0] == w[1])
            || e.last().is_some_and(|&v| v as usize >= self.n);
        if bad {
            self.vertices.truncate(start);
            return Err(Error::input(format!(
                "labeled edge {vertices:?} must be nonempty, distinct and inside [0, {})",
                self.n
            )));
        }
        self.offsets.push(self.vertices.len());
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge(&self, idx: usize) -> &[Vertex] {
        &self.vertices[self.offsets[idx]..self.offsets[idx + 1]]
    }

    pub fn label(&self, idx: usize) -> &[u32] {
        &self.labels[idx]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[u32], &[Vertex])> + '_ {
        (0..self.len()).map(move |i| (self.label(i), self.edge(i)))
    }

    /// Text form: `lf1 <N> <M>` followed by `label ids | vertex ids` lines.
    pub fn to_text(&self) -> String {
        let join = |xs: &[u32]| xs.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
        let mut out = format!("lf1 {} {}\n", self.n, self.len());
        for (label, edge) in self.iter() {
            out.push_str(&join(label));
            out.push_str(" | ");
            out.push_str(&join(edge));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::input("empty family file"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 || fields[0] != "lf1" {
            return Err(Error::input(format!("bad family header: {header:?}")));
        }
        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::input(format!("bad integer {s:?}")));
        let (n, m) = (num(fields[1])?, num(fields[2])?);
        let ids = |s: &str| {
            s.split_whitespace()
                .map(|t| t.parse::<u32>().map_err(|_| Error::input(format!("bad id {t:?}"))))
                .collect::<Result<Vec<_>>>()
        };
        let mut out = Self::new(n);
        for line in lines {
            let (label, edge) = line
                .split_once('|')
                .ok_or_else(|| Error::input(format!("family line {line:?} lacks '|'")))?;
            out.push(ids(label)?, &ids(edge)?)?;
        }
        if out.len() != m {
            return Err(Error::input(format!("header declares {m} edges but {} were read", out.len())));
        }
        Ok(out)
    }
}

impl EdgeFamily for LabeledFamily {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn family_len(&self) -> usize {
        self.len()
    }

    fn edge_at(&self, idx: usize) -> &[Vertex] {
        self.edge(idx)
    }

    fn is_labeled(&self) -> bool {
        true
    }

    fn label_at(&self, idx: usize) -> &[u32] {
        self.label(idx)
    }
}
