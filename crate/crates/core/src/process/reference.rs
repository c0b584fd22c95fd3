use crate::error::{Error, Result};
use crate::hypergraph::{is_sorted_subset, Hypergraph, Vertex};

/// Recomputes `(V(i), H(i))` from scratch after inserting `chosen` in order.
///
/// A vertex is open when it is outside `I` and completes no original edge
/// with `I`. The live family is the set of minimal residuals `e \ I` of
/// size at least 2 whose vertices are all open. Both are returned sorted.
pub fn reference_transition(h: &Hypergraph, chosen: &[Vertex]) -> Result<(Vec<Vertex>, Vec<Vec<Vertex>>)> {
    let n = h.vertex_count();
    let mut in_i = vec![false; n];
    for &v in chosen {
        h.check_vertex(v)?;
        if std::mem::replace(&mut in_i[v as usize], true) {
            return Err(Error::input(format!("vertex {v} repeated in the history")));
        }
    }
    if h.edges().any(|e| e.iter().all(|&w| in_i[w as usize])) {
        return Err(Error::input("history contains an edge of the hypergraph"));
    }
    let open: Vec<Vertex> = (0..n as Vertex)
        .filter(|&w| {
            !in_i[w as usize]
                && !h
                    .edges()
                    .any(|e| e.contains(&w) && e.iter().all(|&x| x == w || in_i[x as usize]))
        })
        .collect();
    let mut is_open = vec![false; n];
    for &w in &open {
        is_open[w as usize] = true;
    }
    let mut residuals: Vec<Vec<Vertex>> = h
        .edges()
        .map(|e| e.iter().copied().filter(|&w| !in_i[w as usize]).collect::<Vec<_>>())
        .filter(|res| res.len() >= 2 && res.iter().all(|&w| is_open[w as usize]))
        .collect();
    residuals.sort();
    residuals.dedup();
    let live = residuals
        .iter()
        .filter(|f| {
            !residuals
                .iter()
                .any(|g| g.len() < f.len() && is_sorted_subset(g, f))
        })
        .cloned()
        .collect();
    Ok((open, live))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unfolds_the_definition() {
        let h = Hypergraph::with_uniformity(4, 3, [[0u32, 1, 2]]).unwrap();
        let (open, live) = reference_transition(&h, &[0]).unwrap();
        assert_eq!(open, vec![1, 2, 3]);
        assert_eq!(live, vec![vec![1, 2]]);
        let (open, live) = reference_transition(&h, &[]).unwrap();
        assert_eq!(open, vec![0, 1, 2, 3]);
        assert_eq!(live, vec![vec![0, 1, 2]]);
    }

    #[test]
    fn closes_both_completions() {
        let h = Hypergraph::with_uniformity(5, 3, [[0u32, 1, 2], [0, 1, 3]]).unwrap();
        let (open, live) = reference_transition(&h, &[0, 1]).unwrap();
        assert_eq!(open, vec![4]);
        assert!(live.is_empty());
    }

    #[test]
    fn rejects_dependent_histories() {
        let h = Hypergraph::with_uniformity(4, 3, [[0u32, 1, 2]]).unwrap();
        assert!(reference_transition(&h, &[0, 1, 2]).is_err());
        assert!(reference_transition(&h, &[0, 0]).is_err());
    }
}
