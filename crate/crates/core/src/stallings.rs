//! Stallings subgroup graphs: folding, membership, rank, completion to
//! finite covers, and the surjectivity oracle for endomorphisms.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::word::{Endomorphism, Word};

/// A directed graph with edges labeled by generators `1..=rank`.
///
/// Vertices are dense indices `0..vertex_count`. Edges are stored as a
/// sorted, deduplicated list of `(source, target, label)` triples.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LabeledGraph {
    rank: usize,
    vertex_count: usize,
    edges: Vec<(usize, usize, usize)>,
    basepoint: Option<usize>,
}

impl LabeledGraph {
    pub fn new(
        rank: usize,
        vertex_count: usize,
        mut edges: Vec<(usize, usize, usize)>,
        basepoint: Option<usize>,
    ) -> Self {
        edges.sort_unstable();
        edges.dedup();
        LabeledGraph {
            rank,
            vertex_count,
            edges,
            basepoint,
        }
    }

    /// The rose: one vertex, one loop per generator.
    pub fn rose(rank: usize) -> Self {
        LabeledGraph {
            rank,
            vertex_count: 1,
            edges: (1..=rank).map(|l| (0, 0, l)).collect(),
            basepoint: Some(0),
        }
    }

    pub fn rank_of_labels(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    pub fn basepoint(&self) -> Option<usize> {
        self.basepoint
    }

    /// Outgoing edge with the given label, if unique. `None` when absent;
    /// callers should check `is_folded` first if uniqueness matters.
    pub fn out_edge(&self, v: usize, label: usize) -> Option<usize> {
        self.edges
            .iter()
            .find(|&&(s, _, l)| s == v && l == label)
            .map(|&(_, t, _)| t)
    }

    pub fn in_edge(&self, v: usize, label: usize) -> Option<usize> {
        self.edges
            .iter()
            .find(|&&(_, t, l)| t == v && l == label)
            .map(|&(s, _, _)| s)
    }

    /// No vertex has two outgoing or two incoming edges with one label.
    pub fn is_folded(&self) -> bool {
        let mut out_seen = vec![false; self.vertex_count * self.rank];
        let mut in_seen = vec![false; self.vertex_count * self.rank];
        for &(s, t, l) in &self.edges {
            let o = s * self.rank + (l - 1);
            let i = t * self.rank + (l - 1);
            if out_seen[o] || in_seen[i] {
                return false;
            }
            out_seen[o] = true;
            in_seen[i] = true;
        }
        true
    }

    /// Every vertex has exactly one outgoing and one incoming edge per label.
    pub fn is_cover(&self) -> bool {
        if self.edges.len() != self.vertex_count * self.rank {
            return false;
        }
        self.is_folded()
    }

    /// Every vertex except possibly the basepoint has degree at least two.
    pub fn is_core(&self) -> bool {
        let mut degree = vec![0usize; self.vertex_count];
        for &(s, t, _) in &self.edges {
            degree[s] += 1;
            degree[t] += 1;
        }
        degree
            .iter()
            .enumerate()
            .all(|(v, &d)| d >= 2 || Some(v) == self.basepoint)
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut adj: Vec<Vec<usize>> = vec![Vec::new(); self.vertex_count];
        for &(s, t, _) in &self.edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// First Betti number `E - V + 1` of a connected graph.
    pub fn cycle_rank(&self) -> Result<usize> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(self.edges.len() + 1 - self.vertex_count)
    }

    /// Whether the graph is the rose on `rank` petals.
    pub fn is_rose(&self) -> bool {
        self.vertex_count == 1 && self.edges.len() == self.rank && self.is_folded()
    }

    /// Traces `w` from the basepoint; `true` iff it spells a closed path.
    pub fn contains(&self, w: &Word) -> Result<bool> {
        if !self.is_folded() {
            return Err(Error::NotFolded);
        }
        let base = self.basepoint.ok_or(Error::NoBasepoint)?;
        let mut at = base;
        for &l in w.letters() {
            let label = l.unsigned_abs() as usize;
            let next = if l > 0 {
                self.out_edge(at, label)
            } else {
                self.in_edge(at, label)
            };
            match next {
                Some(v) => at = v,
                None => return Ok(false),
            }
        }
        Ok(at == base)
    }

    /// Canonical form under based labeled-graph isomorphism: vertices are
    /// renumbered by BFS from the basepoint, exploring out- then in-edges
    /// per ascending label. Two folded connected based graphs are
    /// isomorphic iff their canonical forms are equal.
    pub fn canonical_form(&self) -> Result<LabeledGraph> {
        if !self.is_folded() {
            return Err(Error::NotFolded);
        }
        let base = self.basepoint.ok_or(Error::NoBasepoint)?;
        let mut order = vec![usize::MAX; self.vertex_count];
        let mut queue = std::collections::VecDeque::new();
        order[base] = 0;
        let mut next_id = 1usize;
        queue.push_back(base);
        while let Some(v) = queue.pop_front() {
            for label in 1..=self.rank {
                for w in [self.out_edge(v, label), self.in_edge(v, label)]
                    .into_iter()
                    .flatten()
                {
                    if order[w] == usize::MAX {
                        order[w] = next_id;
                        next_id += 1;
                        queue.push_back(w);
                    }
                }
            }
        }
        if order.iter().any(|&o| o == usize::MAX) {
            return Err(Error::Disconnected);
        }
        let edges = self
            .edges
            .iter()
            .map(|&(s, t, l)| (order[s], order[t], l))
            .collect();
        Ok(LabeledGraph::new(self.rank, self.vertex_count, edges, Some(0)))
    }

    /// Coordinates of a basepoint loop in the cycle space: a BFS spanning
    /// tree is grown from the basepoint (out- then in-edges, labels
    /// ascending) and the signed crossings of each non-tree edge are
    /// counted along the path of `w`.
    pub fn cycle_coordinates(&self, w: &Word) -> Result<Vec<i64>> {
        if !self.is_folded() {
            return Err(Error::NotFolded);
        }
        let base = self.basepoint.ok_or(Error::NoBasepoint)?;
        let mut in_tree: std::collections::BTreeSet<(usize, usize, usize)> =
            std::collections::BTreeSet::new();
        let mut seen = vec![false; self.vertex_count];
        seen[base] = true;
        let mut queue = std::collections::VecDeque::from([base]);
        while let Some(v) = queue.pop_front() {
            for label in 1..=self.rank {
                if let Some(t) = self.out_edge(v, label) {
                    if !seen[t] {
                        seen[t] = true;
                        in_tree.insert((v, t, label));
                        queue.push_back(t);
                    }
                }
                if let Some(s) = self.in_edge(v, label) {
                    if !seen[s] {
                        seen[s] = true;
                        in_tree.insert((s, v, label));
                        queue.push_back(s);
                    }
                }
            }
        }
        let nontree: Vec<(usize, usize, usize)> = self
            .edges
            .iter()
            .copied()
            .filter(|e| !in_tree.contains(e))
            .collect();
        let mut coords = vec![0i64; nontree.len()];
        let mut at = base;
        for &l in w.letters() {
            let label = l.unsigned_abs() as usize;
            let edge = if l > 0 {
                let t = self.out_edge(at, label).ok_or(Error::NotInSubgroup)?;
                let e = (at, t, label);
                at = t;
                e
            } else {
                let s = self.in_edge(at, label).ok_or(Error::NotInSubgroup)?;
                let e = (s, at, label);
                at = s;
                e
            };
            if let Some(j) = nontree.iter().position(|&f| f == edge) {
                coords[j] += l.signum() as i64;
            }
        }
        if at != base {
            return Err(Error::NotInSubgroup);
        }
        Ok(coords)
    }

    /// GraphViz rendering; the basepoint is double-circled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph stallings {\n");
        for v in 0..self.vertex_count {
            if Some(v) == self.basepoint {
                out.push_str(&format!("  {v} [shape=doublecircle];\n"));
            } else {
                out.push_str(&format!("  {v} [shape=circle];\n"));
            }
        }
        for &(s, t, l) in &self.edges {
            out.push_str(&format!("  {s} -> {t} [label=\"x{l}\"];\n"));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "rank": self.rank,
            "vertices": (0..self.vertex_count).collect::<Vec<_>>(),
            "edges": self.edges.iter().map(|&(s, t, l)| vec![s, t, l]).collect::<Vec<_>>(),
            "basepoint": self.basepoint,
        })
    }
}

/// Union-find with path compression.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra != rb {
            // keep the smaller id as representative for determinism
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Builds the folded core based graph for the subgroup generated by `gens`.
///
/// A wedge of loops spelling the generators is folded by iterated vertex
/// identification with union-find; label clashes are processed in
/// (vertex id, label) order. Dangling trees are pruned afterwards.
pub fn graph_from_generators(rank: usize, gens: &[Word]) -> Result<LabeledGraph> {
    for g in gens {
        if g.rank() != rank {
            return Err(Error::RankMismatch {
                left: rank,
                right: g.rank(),
            });
        }
    }
    // wedge of subdivided loops at vertex 0
    let mut vertex_count = 1usize;
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    for g in gens {
        let mut at = 0usize;
        let letters = g.letters();
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() {
                0
            } else {
                vertex_count += 1;
                vertex_count - 1
            };
            let label = l.unsigned_abs() as usize;
            if l > 0 {
                edges.push((at, next, label));
            } else {
                edges.push((next, at, label));
            }
            at = next;
        }
    }
    fold(rank, vertex_count, edges, 0)
}

/// Folds an arbitrary labeled graph and prunes it to its core.
fn fold(
    rank: usize,
    vertex_count: usize,
    edges: Vec<(usize, usize, usize)>,
    basepoint: usize,
) -> Result<LabeledGraph> {
    let mut uf = UnionFind::new(vertex_count);
    let mut edges = edges;
    loop {
        // normalize endpoints to representatives and dedupe
        for e in edges.iter_mut() {
            e.0 = uf.find(e.0);
            e.1 = uf.find(e.1);
        }
        edges.sort_unstable();
        edges.dedup();
        // find the first clash in (vertex, label) order
        let mut clash: Option<(usize, usize)> = None;
        let mut out_map: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        let mut in_map: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &(s, t, l) in &edges {
            if let Some(&t0) = out_map.get(&(s, l)) {
                clash = Some((t0, t));
                break;
            }
            out_map.insert((s, l), t);
            if let Some(&s0) = in_map.get(&(t, l)) {
                clash = Some((s0, s));
                break;
            }
            in_map.insert((t, l), s);
        }
        match clash {
            Some((a, b)) => uf.union(a, b),
            None => break,
        }
    }
    // compact vertex ids, basepoint first
    let mut alive: Vec<usize> = Vec::new();
    let mut new_id = vec![usize::MAX; vertex_count];
    let base_root = uf.find(basepoint);
    new_id[base_root] = 0;
    alive.push(base_root);
    for v in 0..vertex_count {
        let r = uf.find(v);
        if new_id[r] == usize::MAX {
            new_id[r] = alive.len();
            alive.push(r);
        }
    }
    let mut edges: Vec<(usize, usize, usize)> = edges
        .into_iter()
        .map(|(s, t, l)| (new_id[uf.find(s)], new_id[uf.find(t)], l))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    let mut count = alive.len();

    // prune valence-1 vertices other than the basepoint
    loop {
        let mut degree = vec![0usize; count];
        for &(s, t, _) in &edges {
            degree[s] += 1;
            degree[t] += 1;
        }
        let dangling: Vec<usize> = (0..count)
            .filter(|&v| degree[v] <= 1 && v != 0)
            .collect();
        if dangling.is_empty() {
            break;
        }
        let mut keep = vec![true; count];
        for &v in &dangling {
            keep[v] = false;
        }
        let mut remap = vec![usize::MAX; count];
        let mut next = 0usize;
        for v in 0..count {
            if keep[v] {
                remap[v] = next;
                next += 1;
            }
        }
        edges.retain(|&(s, t, _)| keep[s] && keep[t]);
        for e in edges.iter_mut() {
            e.0 = remap[e.0];
            e.1 = remap[e.1];
        }
        count = next;
    }
    Ok(LabeledGraph::new(rank, count, edges, Some(0)))
}

/// The fold oracle: an endomorphism is surjective iff the folded graph of
/// its images is the rose. Since free groups are Hopfian, `true` also
/// certifies that the endomorphism is an automorphism.
pub fn is_surjective(phi: &Endomorphism) -> bool {
    let graph = graph_from_generators(phi.rank(), phi.images()).expect("images share rank");
    graph.is_rose()
}

/// Completes a folded graph to a finite cover over the same vertex set:
/// for each label the partial permutation is extended by matching
/// unsaturated sources to unsaturated targets in ascending id order.
pub fn complete_to_cover(graph: &LabeledGraph) -> Result<LabeledGraph> {
    if !graph.is_folded() {
        return Err(Error::NotFolded);
    }
    let n = graph.vertex_count();
    let mut edges = graph.edges().to_vec();
    for label in 1..=graph.rank_of_labels() {
        let mut has_out = vec![false; n];
        let mut has_in = vec![false; n];
        for &(s, t, l) in graph.edges() {
            if l == label {
                has_out[s] = true;
                has_in[t] = true;
            }
        }
        let free_out: Vec<usize> = (0..n).filter(|&v| !has_out[v]).collect();
        let free_in: Vec<usize> = (0..n).filter(|&v| !has_in[v]).collect();
        debug_assert_eq!(free_out.len(), free_in.len());
        for (&s, &t) in free_out.iter().zip(free_in.iter()) {
            edges.push((s, t, label));
        }
    }
    Ok(LabeledGraph::new(
        graph.rank_of_labels(),
        n,
        edges,
        graph.basepoint(),
    ))
}
