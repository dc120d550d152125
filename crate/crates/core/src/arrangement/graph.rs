use serde::{Deserialize, Serialize};

/// Lines as nodes, joined when they cross (anywhere in the plane).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionGraph {
    adj: Vec<Vec<usize>>,
}

impl IntersectionGraph {
    pub fn new(n: usize) -> Self {
        IntersectionGraph {
            adj: vec![Vec::new(); n],
        }
    }

    /// Builds the graph from undirected pairs; loops and repeats are ignored.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = IntersectionGraph::new(n);
        for (a, b) in edges {
            if a != b {
                g.adj[a].push(b);
                g.adj[b].push(a);
            }
        }
        for list in g.adj.iter_mut() {
            list.sort_unstable();
            list.dedup();
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// All triangles `a < b < c`.
    pub fn triangles(&self) -> Vec<[usize; 3]> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for &b in self.adj[a].iter().filter(|&&b| b > a) {
                for &c in self.adj[b].iter().filter(|&&c| c > b) {
                    if self.has_edge(a, c) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    /// Some clique of size `k` (sorted), if one exists. Grows cliques by
    /// increasing node index, so every clique is met exactly once.
    pub fn find_clique(&self, k: usize) -> Option<Vec<usize>> {
        if k == 0 {
            return Some(Vec::new());
        }
        let mut current = Vec::with_capacity(k);
        for v in 0..self.len() {
            current.push(v);
            let candidates: Vec<usize> = self.adj[v].iter().copied().filter(|&w| w > v).collect();
            if self.extend(&mut current, &candidates, k) {
                return Some(current);
            }
            current.pop();
        }
        None
    }

    fn extend(&self, current: &mut Vec<usize>, candidates: &[usize], k: usize) -> bool {
        if current.len() == k {
            return true;
        }
        if current.len() + candidates.len() < k {
            return false;
        }
        for (i, &w) in candidates.iter().enumerate() {
            current.push(w);
            let next: Vec<usize> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|&u| self.has_edge(w, u))
                .collect();
            if self.extend(current, &next, k) {
                return true;
            }
            current.pop();
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KPlaneResult {
    pub k: usize,
    pub pass: bool,
    /// A `k`-clique: `k` lines that pairwise cross.
    pub witness: Option<Vec<usize>>,
}

/// The `k`-plane property: among any `k` lines some two are disjoint, i.e.
/// the graph has no `k`-clique.
pub fn check_k_plane(graph: &IntersectionGraph, k: usize) -> KPlaneResult {
    let witness = graph.find_clique(k.max(2));
    KPlaneResult {
        k,
        pass: witness.is_none(),
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn triangle_fails_three_plane() {
        let g = IntersectionGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let r = check_k_plane(&g, 3);
        assert!(!r.pass);
        assert_eq!(r.witness, Some(vec![0, 1, 2]));
        assert!(check_k_plane(&g, 4).pass);
    }

    #[test]
    fn single_node_passes() {
        let g = IntersectionGraph::new(1);
        for k in 2..6 {
            assert!(check_k_plane(&g, k).pass);
        }
    }

    #[test]
    fn loops_and_repeats_ignored() {
        let g = IntersectionGraph::from_edges(2, [(0, 0), (0, 1), (1, 0)]);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
    }

    fn brute_force_has_clique(g: &IntersectionGraph, k: usize) -> bool {
        let n = g.len();
        (0u32..1 << n).any(|mask| {
            let vs: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            vs.len() == k
                && vs
                    .iter()
                    .enumerate()
                    .all(|(i, &a)| vs[i + 1..].iter().all(|&b| g.has_edge(a, b)))
        })
    }

    proptest! {
        #[test]
        fn clique_search_matches_brute_force(
            edges in proptest::collection::vec((0usize..9, 0usize..9), 0..30),
            k in 2usize..6,
        ) {
            let g = IntersectionGraph::from_edges(9, edges);
            let found = g.find_clique(k);
            prop_assert_eq!(found.is_some(), brute_force_has_clique(&g, k));
            if let Some(c) = found {
                prop_assert_eq!(c.len(), k);
                for (i, &a) in c.iter().enumerate() {
                    for &b in &c[i + 1..] {
                        prop_assert!(g.has_edge(a, b));
                    }
                }
            }
        }

        #[test]
        fn symmetric(edges in proptest::collection::vec((0usize..12, 0usize..12), 0..40)) {
            let g = IntersectionGraph::from_edges(12, edges);
            for a in 0..12 {
                prop_assert!(!g.has_edge(a, a));
                for &b in g.neighbors(a) {
                    prop_assert!(g.has_edge(b, a));
                }
            }
        }
    }
}
