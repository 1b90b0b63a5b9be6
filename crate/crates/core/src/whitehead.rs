//! Whitehead graphs, cut-vertex analysis, non-separability certificates,
//! and Whitehead length reduction as a primitivity oracle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::word::{Endomorphism, Word};

/// A signed generator symbol; `0..2n` with `2(i-1)` for `x_i` and
/// `2(i-1)+1` for its inverse.
pub type Symbol = usize;

fn symbol_of_letter(l: i32) -> Symbol {
    let i = l.unsigned_abs() as usize - 1;
    if l > 0 {
        2 * i
    } else {
        2 * i + 1
    }
}

fn letter_of_symbol(s: Symbol) -> i32 {
    let i = (s / 2) as i32 + 1;
    if s % 2 == 0 {
        i
    } else {
        -i
    }
}

pub fn symbol_name(s: Symbol) -> String {
    let i = s / 2 + 1;
    if s % 2 == 0 {
        format!("x{i}")
    } else {
        format!("x{i}^-1")
    }
}

/// The Whitehead graph of a cyclically reduced word: vertices are the `2n`
/// signed generator symbols, and each cyclic pair of successive letters
/// `s t` contributes the edge `{s, t^-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WhiteheadGraph {
    rank: usize,
    edges: Vec<(Symbol, Symbol)>,
}

impl WhiteheadGraph {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.rank
    }

    /// Edge multiset, each pair sorted.
    pub fn edges(&self) -> &[(Symbol, Symbol)] {
        &self.edges
    }

    pub fn contains_subgraph(&self, other: &WhiteheadGraph) -> bool {
        let mut pool = self.edges.clone();
        for e in &other.edges {
            match pool.iter().position(|f| f == e) {
                Some(i) => {
                    pool.swap_remove(i);
                }
                None => return false,
            }
        }
        true
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph whitehead {\n");
        for s in 0..self.vertex_count() {
            out.push_str(&format!("  v{s} [label=\"{}\"];\n", symbol_name(s)));
        }
        for &(a, b) in &self.edges {
            out.push_str(&format!("  v{a} -- v{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// Builds the Whitehead graph of the cyclic core of `w`.
pub fn whitehead_graph(w: &Word) -> Result<WhiteheadGraph> {
    let (core, _) = w.cyclic_reduce();
    if core.is_empty() {
        return Err(Error::TrivialWord);
    }
    let letters = core.letters();
    let mut edges: Vec<(Symbol, Symbol)> = Vec::with_capacity(letters.len());
    for i in 0..letters.len() {
        let s = letters[i];
        let t = letters[(i + 1) % letters.len()];
        let a = symbol_of_letter(s);
        let b = symbol_of_letter(-t);
        edges.push((a.min(b), a.max(b)));
    }
    edges.sort_unstable();
    Ok(WhiteheadGraph {
        rank: w.rank(),
        edges,
    })
}

/// Connectivity of a Whitehead graph under both vertex-set readings, with
/// its cut vertices.
#[derive(Clone, Debug, Serialize)]
pub struct ConnectivityReport {
    /// Connected over all 2n symbols; isolated symbols disconnect.
    pub connected_full: bool,
    /// Connected over the symbols that actually occur.
    pub connected_occurring: bool,
    pub cut_vertices: Vec<String>,
    pub isolated: Vec<String>,
}

/// Articulation points of the simple graph underlying the multigraph.
fn articulation_points(n: usize, adjacency: &[Vec<usize>]) -> Vec<usize> {
    // iterative Tarjan lowpoint search over every component
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut parent = vec![usize::MAX; n];
    let mut is_cut = vec![false; n];
    let mut timer = 0usize;
    for root in 0..n {
        if disc[root] != usize::MAX || adjacency[root].is_empty() {
            continue;
        }
        let mut root_children = 0usize;
        let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(&(v, idx)) = stack.last() {
            if idx < adjacency[v].len() {
                stack.last_mut().expect("nonempty").1 += 1;
                let to = adjacency[v][idx];
                if disc[to] == usize::MAX {
                    parent[to] = v;
                    if v == root {
                        root_children += 1;
                    }
                    disc[to] = timer;
                    low[to] = timer;
                    timer += 1;
                    stack.push((to, 0));
                } else if to != parent[v] {
                    low[v] = low[v].min(disc[to]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if p != root && low[v] >= disc[p] {
                        is_cut[p] = true;
                    }
                }
            }
        }
        if root_children > 1 {
            is_cut[root] = true;
        }
    }
    (0..n).filter(|&v| is_cut[v]).collect()
}

pub fn connectivity_report(g: &WhiteheadGraph) -> ConnectivityReport {
    let n = g.vertex_count();
    let mut simple: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(a, b) in g.edges() {
        if a != b && !simple[a].contains(&b) {
            simple[a].push(b);
            simple[b].push(a);
        }
    }
    for adj in simple.iter_mut() {
        adj.sort_unstable();
    }
    let mut occurs = vec![false; n];
    for &(a, b) in g.edges() {
        occurs[a] = true;
        occurs[b] = true;
    }
    // component count over occurring vertices
    let mut seen = vec![false; n];
    let mut components = 0usize;
    for v in 0..n {
        if !occurs[v] || seen[v] {
            continue;
        }
        components += 1;
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(u) = stack.pop() {
            for &w in &simple[u] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let isolated: Vec<Symbol> = (0..n).filter(|&v| !occurs[v]).collect();
    let connected_occurring = components <= 1;
    let connected_full = connected_occurring && isolated.is_empty();
    let cut_vertices = articulation_points(n, &simple);
    ConnectivityReport {
        connected_full,
        connected_occurring,
        cut_vertices: cut_vertices.into_iter().map(symbol_name).collect(),
        isolated: isolated.into_iter().map(symbol_name).collect(),
    }
}

/// Connectivity over the full symbol set plus the cut vertices.
pub fn is_connected_no_cut_vertex(g: &WhiteheadGraph) -> (bool, Vec<String>) {
    let report = connectivity_report(g);
    (report.connected_full, report.cut_vertices)
}

/// Certifies that a word is NOT separable (hence not primitive): its
/// Whitehead graph on all 2n symbols is connected with no cut vertex.
/// `false` means "no certificate", not "separable".
pub fn is_separable_certified_negative(w: &Word) -> Result<bool> {
    let g = whitehead_graph(w)?;
    let report = connectivity_report(&g);
    Ok(report.connected_full && report.cut_vertices.is_empty())
}

/// Outcome of Whitehead length reduction.
#[derive(Clone, Debug, Serialize)]
pub struct WhiteheadReduction {
    pub minimal_length: usize,
    pub reduced_word: String,
    pub moves_applied: usize,
}

/// A Whitehead automorphism of the second type, determined by a multiplier
/// symbol `a` and a symbol set `A` containing `a` but not `a^-1`: each
/// generator `x` outside `{a, a^-1}` maps to `a^-e x a^f` where `f = 1`
/// iff `x` is in `A` and `e = 1` iff `x^-1` is in `A`.
fn whitehead_move(rank: usize, a: Symbol, set_mask: u64, others: &[Symbol]) -> Endomorphism {
    let a_letter = letter_of_symbol(a);
    let a_word = Word::reduce(rank, &[a_letter]).unwrap();
    let mut in_set = vec![false; 2 * rank];
    in_set[a] = true;
    for (bit, &s) in others.iter().enumerate() {
        if set_mask >> bit & 1 == 1 {
            in_set[s] = true;
        }
    }
    let mut images = Vec::with_capacity(rank);
    for i in 1..=rank {
        let x = Word::generator(rank, i).unwrap();
        if i == a_letter.unsigned_abs() as usize {
            // the multiplier's own generator is fixed
            images.push(x);
            continue;
        }
        let pos = symbol_of_letter(i as i32);
        let neg = symbol_of_letter(-(i as i32));
        let mut img = Word::identity(rank);
        if in_set[neg] {
            img = img.multiply(&a_word.invert()).unwrap();
        }
        img = img.multiply(&x).unwrap();
        if in_set[pos] {
            img = img.multiply(&a_word).unwrap();
        }
        images.push(img);
    }
    Endomorphism::new(images).unwrap()
}

/// Repeatedly applies length-reducing Whitehead moves until none exists,
/// returning the minimal cyclic length. The word is primitive iff the
/// minimal length is 1. Basis permutations and inversions preserve cyclic
/// length, so only multiplier moves can strictly reduce and only those are
/// searched; the first reducer in (multiplier, subset-mask) order is taken.
pub fn whitehead_reduce(w: &Word) -> Result<WhiteheadReduction> {
    let rank = w.rank();
    let (core, _) = w.cyclic_reduce();
    if core.is_empty() {
        return Err(Error::TrivialWord);
    }
    if rank > 3 || core.len() > 20 {
        return Err(Error::CostGuard(format!(
            "whitehead reduction is limited to rank <= 3 and cyclic length <= 20 \
             (got rank {rank}, length {})",
            core.len()
        )));
    }
    let mut current = core;
    let mut moves_applied = 0usize;
    'outer: loop {
        for a in 0..2 * rank {
            let others: Vec<Symbol> = (0..2 * rank)
                .filter(|&s| s != a && s != a ^ 1)
                .collect();
            for mask in 0..(1u64 << others.len()) {
                let phi = whitehead_move(rank, a, mask, &others);
                let image = phi.apply(&current)?;
                let (reduced, _) = image.cyclic_reduce();
                if reduced.len() < current.len() {
                    current = reduced;
                    moves_applied += 1;
                    if current.len() <= 1 {
                        break 'outer;
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    Ok(WhiteheadReduction {
        minimal_length: current.len(),
        reduced_word: current.to_string(),
        moves_applied,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, rank: usize) -> Word {
        Word::parse(s, rank).unwrap()
    }

    fn edge(a: i32, b: i32) -> (Symbol, Symbol) {
        let x = symbol_of_letter(a);
        let y = symbol_of_letter(b);
        (x.min(y), x.max(y))
    }

    #[test]
    fn graph_of_ab() {
        let g = whitehead_graph(&w("ab", 2)).unwrap();
        let mut expect = vec![edge(1, -2), edge(2, -1)];
        expect.sort_unstable();
        assert_eq!(g.edges(), expect.as_slice());
    }

    #[test]
    fn graph_of_square_is_double_edge() {
        let g = whitehead_graph(&w("aa", 2)).unwrap();
        assert_eq!(g.edges(), vec![edge(1, -1), edge(1, -1)].as_slice());
    }

    #[test]
    fn graph_of_alpha_is_complete() {
        // x2 x1 x2^-2 x1^-2 has the complete graph on 4 symbols
        let g = whitehead_graph(&w("baBBAA", 2)).unwrap();
        assert_eq!(g.edges().len(), 6);
        let mut expect = vec![
            edge(1, 2),
            edge(1, -2),
            edge(1, -1),
            edge(2, -2),
            edge(2, -1),
            edge(-1, -2),
        ];
        expect.sort_unstable();
        assert_eq!(g.edges(), expect.as_slice());
        let (connected, cuts) = is_connected_no_cut_vertex(&g);
        assert!(connected);
        assert!(cuts.is_empty());
    }

    #[test]
    fn edge_count_equals_cyclic_length() {
        for text in ["ab", "aabb", "abAB", "baBBAA"] {
            let word = w(text, 2);
            let g = whitehead_graph(&word).unwrap();
            assert_eq!(g.edges().len(), word.cyclic_reduce().0.len());
        }
        // non-cyclically-reduced input contributes only its core
        let g = whitehead_graph(&w("abA", 2)).unwrap();
        assert_eq!(g.edges().len(), 1);
    }

    #[test]
    fn two_disjoint_edges_disconnect() {
        let g = whitehead_graph(&w("ab", 2)).unwrap();
        let report = connectivity_report(&g);
        assert!(!report.connected_full);
        assert!(!report.connected_occurring);
        assert!(report.cut_vertices.is_empty());
    }

    #[test]
    fn rank_4_figure_word_has_no_cut_vertex() {
        let alpha = w("dcbaDDCCBBAA", 4);
        let g = whitehead_graph(&alpha).unwrap();
        let (connected, cuts) = is_connected_no_cut_vertex(&g);
        assert!(connected);
        assert!(cuts.is_empty());
    }

    #[test]
    fn trivial_word_is_rejected() {
        assert!(whitehead_graph(&Word::identity(2)).is_err());
        assert!(whitehead_reduce(&Word::identity(2)).is_err());
    }

    #[test]
    fn articulation_point_example() {
        // wedge of two triangles sharing x1: x1 is a cut vertex
        // build directly: edges on symbols
        let g = WhiteheadGraph {
            rank: 3,
            edges: vec![(0, 2), (0, 3), (2, 3), (0, 4), (0, 5), (4, 5)],
        };
        let report = connectivity_report(&g);
        assert_eq!(report.cut_vertices, vec!["x1".to_string()]);
        // x1^-1 never occurs
        assert!(!report.connected_full);
        assert!(report.connected_occurring);
        assert_eq!(report.isolated, vec!["x1^-1".to_string()]);
    }

    #[test]
    fn separability_certificates() {
        // single generator: primitive, no certificate
        assert!(!is_separable_certified_negative(&w("a", 2)).unwrap());
        // the complete-graph word is certified non-separable
        assert!(is_separable_certified_negative(&w("baBBAA", 2)).unwrap());
        assert!(is_separable_certified_negative(&w("aabb", 2)).unwrap());
    }

    #[test]
    fn reduce_primitive_to_length_one() {
        let r = whitehead_reduce(&w("ab", 2)).unwrap();
        assert_eq!(r.minimal_length, 1);
        let r = whitehead_reduce(&w("abb", 2)).unwrap();
        assert_eq!(r.minimal_length, 1);
        // conjugates are handled by cyclic reduction
        let r = whitehead_reduce(&w("babAB", 2)).unwrap();
        assert_eq!(r.minimal_length, 1);
    }

    #[test]
    fn reduce_aabb_stops_at_four() {
        let r = whitehead_reduce(&w("aabb", 2)).unwrap();
        assert_eq!(r.minimal_length, 4);
    }

    #[test]
    fn reduce_commutator_stops_at_four() {
        let r = whitehead_reduce(&w("ABab", 2)).unwrap();
        assert_eq!(r.minimal_length, 4);
        // and the certificate agrees with non-primitivity
        assert!(is_separable_certified_negative(&w("ABab", 2)).unwrap());
    }

    #[test]
    fn cost_guard_rejects_big_inputs() {
        assert!(matches!(
            whitehead_reduce(&w("abcd", 4)),
            Err(Error::CostGuard(_))
        ));
        let long = Word::parse(&"ab".repeat(11), 2).unwrap();
        assert!(matches!(whitehead_reduce(&long), Err(Error::CostGuard(_))));
    }

    #[test]
    fn primitives_stay_primitive_under_automorphisms() {
        let autos = ["ab,b", "b,a", "A,b", "a,ba"];
        let mut psi = Endomorphism::identity(2);
        for text in autos {
            psi = psi.compose(&Endomorphism::parse(text).unwrap()).unwrap();
            let image = psi.apply(&w("a", 2)).unwrap();
            if image.cyclic_reduce().0.len() <= 20 {
                let r = whitehead_reduce(&image).unwrap();
                assert_eq!(r.minimal_length, 1, "image {image}");
            }
        }
    }

    #[test]
    fn certified_words_are_never_primitive() {
        for text in ["aabb", "ABab", "baBBAA", "abab"] {
            let word = w(text, 2);
            if is_separable_certified_negative(&word).unwrap() {
                let r = whitehead_reduce(&word).unwrap();
                assert!(r.minimal_length > 1, "{text}");
            }
        }
    }

    #[test]
    fn graph_is_inversion_invariant() {
        for text in ["ab", "aabb", "baBBAA", "abAbb", "aBaB"] {
            let word = w(text, 2);
            assert_eq!(
                whitehead_graph(&word).unwrap(),
                whitehead_graph(&word.invert()).unwrap(),
                "{text}"
            );
        }
    }

    #[test]
    fn dot_output_labels_symbols() {
        let g = whitehead_graph(&w("ab", 2)).unwrap();
        let dot = g.to_dot();
        assert!(dot.contains("x1^-1"));
        assert!(dot.contains(" -- "));
    }
}
