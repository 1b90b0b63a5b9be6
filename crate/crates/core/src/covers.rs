//! Finite characteristic quotients, mod-q homology covers, towers of
//! covers, deck actions, and lifts of endomorphisms to based covers.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::stallings::LabeledGraph;
use crate::word::{Endomorphism, Word};

/// Default cap on the number of vertices a single cover may have.
pub const DEFAULT_MAX_VERTICES: usize = 10_000;

#[derive(Clone, Debug)]
enum QuotientKind {
    /// Explicit multiplication table, `mul[g * order + h]`.
    Table { mul: Vec<usize>, inv: Vec<usize> },
    /// `(Z/q)^dims` with mixed-radix element encoding, most significant
    /// coordinate first.
    ModVector { q: usize, dims: usize },
}

/// A finite quotient of the free group of rank `rank`: an enumerated group
/// with identity at index 0 and the images of the generators.
#[derive(Clone, Debug)]
pub struct FiniteQuotient {
    rank: usize,
    order: usize,
    images: Vec<usize>,
    declared_modulus: Option<usize>,
    kind: QuotientKind,
}

impl FiniteQuotient {
    /// The mod-q homology quotient `(Z/q)^n` with `x_i` mapped to the i-th
    /// standard vector.
    pub fn mod_q(rank: usize, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidModulus(q));
        }
        Self::mod_vector(rank, q)
    }

    /// `(Z/q)^rank` with the generators mapped to the standard vectors.
    fn mod_vector(rank: usize, q: usize) -> Result<Self> {
        let order = q
            .checked_pow(rank as u32)
            .ok_or(Error::InvalidQuotient(format!("{q}^{rank} overflows")))?;
        let mut images = Vec::with_capacity(rank);
        let mut stride = order;
        for _ in 0..rank {
            stride /= q;
            images.push(stride);
        }
        Ok(FiniteQuotient {
            rank,
            order,
            images,
            declared_modulus: Some(q),
            kind: QuotientKind::ModVector { q, dims: rank },
        })
    }

    /// The trivial quotient (declared modulus 1: its kernel is the whole
    /// group, the verbal subgroup for q = 1).
    pub fn trivial(rank: usize) -> Self {
        FiniteQuotient {
            rank,
            order: 1,
            images: vec![0; rank],
            declared_modulus: Some(1),
            kind: QuotientKind::ModVector { q: 1, dims: rank },
        }
    }

    /// Builds a quotient from an explicit multiplication table and
    /// validates the group axioms and that the images generate.
    pub fn from_table(
        rank: usize,
        mul: Vec<Vec<usize>>,
        images: Vec<usize>,
        declared_modulus: Option<usize>,
    ) -> Result<Self> {
        let order = mul.len();
        if order == 0 {
            return Err(Error::InvalidQuotient("empty table".into()));
        }
        if images.len() != rank {
            return Err(Error::InvalidQuotient("one image per generator required".into()));
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in &mul {
            if row.len() != order {
                return Err(Error::InvalidQuotient("table is not square".into()));
            }
            for &x in row {
                if x >= order {
                    return Err(Error::InvalidQuotient("table entry out of range".into()));
                }
                flat.push(x);
            }
        }
        // identity at index 0
        for g in 0..order {
            if flat[g] != g || flat[g * order] != g {
                return Err(Error::InvalidQuotient("index 0 is not an identity".into()));
            }
        }
        // inverses
        let mut inv = vec![usize::MAX; order];
        for g in 0..order {
            for h in 0..order {
                if flat[g * order + h] == 0 {
                    inv[g] = h;
                }
            }
            if inv[g] == usize::MAX {
                return Err(Error::InvalidQuotient(format!("element {g} has no inverse")));
            }
        }
        // associativity: full check for small tables, sampled beyond
        let full = order <= 24;
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if full {
            Box::new((0..order).flat_map(move |a| {
                (0..order).flat_map(move |b| (0..order).map(move |c| (a, b, c)))
            }))
        } else {
            let mut state = 0x9e3779b97f4a7c15u64;
            Box::new((0..2000).map(move |_| {
                let mut next = || {
                    state = state
                        .wrapping_mul(6364136223846793005)
                        .wrapping_add(1442695040888963407);
                    (state >> 33) as usize % order
                };
                (next(), next(), next())
            }))
        };
        for (a, b, c) in triples {
            let left = flat[flat[a * order + b] * order + c];
            let right = flat[a * order + flat[b * order + c]];
            if left != right {
                return Err(Error::InvalidQuotient(format!(
                    "associativity fails on ({a},{b},{c})"
                )));
            }
        }
        for &img in &images {
            if img >= order {
                return Err(Error::InvalidQuotient("image out of range".into()));
            }
        }
        let q = FiniteQuotient {
            rank,
            order,
            images,
            declared_modulus,
            kind: QuotientKind::Table { mul: flat, inv },
        };
        // generated set must be everything
        let mut seen = vec![false; order];
        seen[0] = true;
        let mut stack = vec![0usize];
        while let Some(g) = stack.pop() {
            for i in 0..rank {
                for h in [q.mul(g, q.images[i]), q.mul(g, q.inv(q.images[i]))] {
                    if !seen[h] {
                        seen[h] = true;
                        stack.push(h);
                    }
                }
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::InvalidQuotient("images do not generate".into()));
        }
        Ok(q)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn declared_modulus(&self) -> Option<usize> {
        self.declared_modulus
    }

    pub fn generator_image(&self, index: usize) -> usize {
        self.images[index - 1]
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        match &self.kind {
            QuotientKind::Table { mul, .. } => mul[g * self.order + h],
            QuotientKind::ModVector { q, dims } => {
                let mut out = 0usize;
                let mut stride = self.order;
                let (mut g, mut h) = (g, h);
                for _ in 0..*dims {
                    stride /= q;
                    let dg = g / stride;
                    let dh = h / stride;
                    g %= stride;
                    h %= stride;
                    out += ((dg + dh) % q) * stride;
                }
                out
            }
        }
    }

    pub fn inv(&self, g: usize) -> usize {
        match &self.kind {
            QuotientKind::Table { inv, .. } => inv[g],
            QuotientKind::ModVector { q, dims } => {
                let mut out = 0usize;
                let mut stride = self.order;
                let mut g = g;
                for _ in 0..*dims {
                    stride /= q;
                    let d = g / stride;
                    g %= stride;
                    out += ((q - d) % q) * stride;
                }
                out
            }
        }
    }

    /// Evaluates a word of matching rank in the quotient.
    pub fn evaluate(&self, w: &Word) -> Result<usize> {
        if w.rank() != self.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: w.rank(),
            });
        }
        let mut acc = 0usize;
        for &l in w.letters() {
            let img = self.images[l.unsigned_abs() as usize - 1];
            let factor = if l > 0 { img } else { self.inv(img) };
            acc = self.mul(acc, factor);
        }
        Ok(acc)
    }

    pub fn is_abelian(&self) -> bool {
        match &self.kind {
            QuotientKind::ModVector { .. } => true,
            QuotientKind::Table { .. } => {
                for g in 0..self.order {
                    for h in 0..g {
                        if self.mul(g, h) != self.mul(h, g) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    pub fn element_order(&self, g: usize) -> usize {
        let mut acc = g;
        let mut k = 1usize;
        while acc != 0 {
            acc = self.mul(acc, g);
            k += 1;
        }
        k
    }

    /// Element name: coordinate digits for mod-vector groups (dot-separated
    /// when q > 10), otherwise the index.
    pub fn label(&self, g: usize) -> String {
        match &self.kind {
            QuotientKind::Table { .. } => g.to_string(),
            QuotientKind::ModVector { q, dims } => {
                let mut digits = Vec::with_capacity(*dims);
                let mut stride = self.order;
                let mut g = g;
                for _ in 0..*dims {
                    stride /= q;
                    digits.push((g / stride).to_string());
                    g %= stride;
                }
                if *q <= 10 {
                    digits.concat()
                } else {
                    digits.join(".")
                }
            }
        }
    }

    /// Inverse of `label`, used for CLI deck-element arguments.
    pub fn element_by_label(&self, text: &str) -> Result<usize> {
        for g in 0..self.order {
            if self.label(g) == text {
                return Ok(g);
            }
        }
        Err(Error::Parse(format!("no deck element {text:?}")))
    }
}

/// Certifies full characteristicity by the verbal-subgroup criterion: the
/// kernel equals the subgroup generated by all commutators and q-th powers
/// exactly when the quotient is abelian of exponent dividing q and of the
/// full order `q^rank`. Returns `false` for "not certified", which does
/// not assert the quotient is not fully characteristic.
pub fn is_fully_characteristic_verbal(q: &FiniteQuotient) -> bool {
    let Some(modulus) = q.declared_modulus else {
        return false;
    };
    if !q.is_abelian() {
        return false;
    }
    for g in 1..q.order() {
        if modulus % q.element_order(g) != 0 {
            return false;
        }
    }
    let expected = (modulus as u128).checked_pow(q.rank() as u32);
    expected == Some(q.order() as u128)
}

/// Certifies that the kernel is characteristic by checking invariance under
/// a finite generating set of the automorphism group: the generator swap,
/// the cycle of all generators, inversion of the first generator, and the
/// right multiplication x1 -> x1 x2.
pub fn is_characteristic_nielsen(cover: &BasedCover) -> bool {
    let n = cover.quotient().rank();
    let mut gens: Vec<Endomorphism> = Vec::new();
    let word = |s: &str| Word::parse(s, n).expect("valid generator word");
    if n >= 2 {
        // swap x1 <-> x2
        let mut images: Vec<Word> = (1..=n).map(|i| Word::generator(n, i).unwrap()).collect();
        images.swap(0, 1);
        gens.push(Endomorphism::new(images).unwrap());
        // cycle x1 -> x2 -> ... -> xn -> x1
        let images: Vec<Word> = (1..=n)
            .map(|i| Word::generator(n, if i == n { 1 } else { i + 1 }).unwrap())
            .collect();
        gens.push(Endomorphism::new(images).unwrap());
        // invert x1
        let mut images: Vec<Word> = (1..=n).map(|i| Word::generator(n, i).unwrap()).collect();
        images[0] = word("A");
        gens.push(Endomorphism::new(images).unwrap());
        // x1 -> x1 x2
        let mut images: Vec<Word> = (1..=n).map(|i| Word::generator(n, i).unwrap()).collect();
        images[0] = word("ab");
        gens.push(Endomorphism::new(images).unwrap());
    }
    gens.iter()
        .all(|psi| cover.induced_endomorphism(psi).is_ok())
}

/// Whether an out-edge of a cover lies in the spanning tree or is the
/// indexed cycle-basis edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum EdgeKind {
    Tree,
    Basis(usize),
}

/// One non-tree edge of a based cover together with its basepoint loop.
#[derive(Clone, Debug)]
pub struct CycleEdge {
    pub source: usize,
    pub target: usize,
    pub label: usize,
    pub loop_word: Word,
}

/// A finite based cover of the rose: the cover graph on the quotient's
/// elements, a BFS spanning tree from the identity vertex, and the cycle
/// basis of basepoint loops indexed by the non-tree edges.
#[derive(Clone, Debug)]
pub struct BasedCover {
    quotient: FiniteQuotient,
    graph: LabeledGraph,
    out: Vec<Vec<usize>>,
    edge_kind: Vec<Vec<EdgeKind>>,
    tree_edges: Vec<(usize, usize, usize)>,
    vertex_words: Vec<Word>,
    cycle_basis: Vec<CycleEdge>,
}

impl BasedCover {
    /// Builds the cover of the rose defined by a finite quotient. Vertices
    /// are the group elements; vertex `g` has an out-edge labeled `i` to
    /// `g * image(x_i)`. The spanning tree is grown breadth-first from the
    /// identity with labels ascending.
    pub fn build(quotient: FiniteQuotient) -> Self {
        let n = quotient.rank();
        let order = quotient.order();
        let mut out = vec![vec![0usize; n]; order];
        for (g, row) in out.iter_mut().enumerate() {
            for i in 1..=n {
                row[i - 1] = quotient.mul(g, quotient.generator_image(i));
            }
        }
        // BFS spanning tree from the identity, labels ascending
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; order]; // (vertex, label)
        let mut seen = vec![false; order];
        seen[0] = true;
        let mut queue = std::collections::VecDeque::from([0usize]);
        let mut tree_edges = Vec::new();
        let mut bfs_order = vec![0usize];
        while let Some(v) = queue.pop_front() {
            for label in 1..=n {
                let w = out[v][label - 1];
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, label));
                    tree_edges.push((v, w, label));
                    bfs_order.push(w);
                    queue.push_back(w);
                }
            }
        }
        debug_assert!(seen.iter().all(|&s| s), "generator images must generate");
        // tree-path words, built parent-first
        let mut vertex_words = vec![Word::identity(n); order];
        for &v in &bfs_order {
            if let Some((p, label)) = parent[v] {
                vertex_words[v] = vertex_words[p]
                    .multiply(&Word::generator(n, label).unwrap())
                    .unwrap();
            }
        }
        // cycle basis over non-tree edges in (source, label) order
        let tree_set: std::collections::BTreeSet<(usize, usize)> = tree_edges
            .iter()
            .map(|&(s, _, l)| (s, l))
            .collect();
        let mut edge_kind = vec![vec![EdgeKind::Tree; n]; order];
        let mut cycle_basis = Vec::new();
        for g in 0..order {
            for label in 1..=n {
                if tree_set.contains(&(g, label)) {
                    continue;
                }
                let target = out[g][label - 1];
                let loop_word = vertex_words[g]
                    .multiply(&Word::generator(n, label).unwrap())
                    .unwrap()
                    .multiply(&vertex_words[target].invert())
                    .unwrap();
                edge_kind[g][label - 1] = EdgeKind::Basis(cycle_basis.len());
                cycle_basis.push(CycleEdge {
                    source: g,
                    target,
                    label,
                    loop_word,
                });
            }
        }
        let edges: Vec<(usize, usize, usize)> = (0..order)
            .flat_map(|g| (1..=n).map(move |l| (g, l)))
            .map(|(g, l)| (g, out[g][l - 1], l))
            .collect();
        let graph = LabeledGraph::new(n, order, edges, Some(0));
        BasedCover {
            quotient,
            graph,
            out,
            edge_kind,
            tree_edges,
            vertex_words,
            cycle_basis,
        }
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.quotient
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }

    pub fn degree(&self) -> usize {
        self.quotient.order()
    }

    /// Rank of the first homology: `|deck|(n - 1) + 1`.
    pub fn homology_rank(&self) -> usize {
        self.cycle_basis.len()
    }

    pub fn cycle_basis(&self) -> &[CycleEdge] {
        &self.cycle_basis
    }

    pub fn tree_edges(&self) -> &[(usize, usize, usize)] {
        &self.tree_edges
    }

    /// Tree path word from the basepoint to vertex `g`.
    pub fn vertex_word(&self, g: usize) -> &Word {
        &self.vertex_words[g]
    }

    /// Neighbor along the out-edge labeled `label`.
    pub fn out_neighbor(&self, v: usize, label: usize) -> usize {
        self.out[v][label - 1]
    }

    /// Source of the unique in-edge labeled `label`.
    pub fn in_neighbor(&self, v: usize, label: usize) -> usize {
        self.quotient
            .mul(v, self.quotient.inv(self.quotient.generator_image(label)))
    }

    /// Cycle-basis index of the out-edge `(source, label)`, or `None` for
    /// tree edges.
    pub fn basis_index_of_edge(&self, source: usize, label: usize) -> Option<usize> {
        match self.edge_kind[source][label - 1] {
            EdgeKind::Tree => None,
            EdgeKind::Basis(j) => Some(j),
        }
    }

    /// Crosses one edge from `v`: returns the new vertex and, when the
    /// crossed edge is a non-tree edge, the signed cycle-basis letter.
    pub fn step_letter(&self, v: usize, letter: i32) -> (usize, Option<i32>) {
        let label = letter.unsigned_abs() as usize;
        if letter > 0 {
            let emitted = match self.edge_kind[v][label - 1] {
                EdgeKind::Tree => None,
                EdgeKind::Basis(j) => Some(j as i32 + 1),
            };
            (self.out[v][label - 1], emitted)
        } else {
            let src = self.in_neighbor(v, label);
            let emitted = match self.edge_kind[src][label - 1] {
                EdgeKind::Tree => None,
                EdgeKind::Basis(j) => Some(-(j as i32 + 1)),
            };
            (src, emitted)
        }
    }

    /// Endpoint of the path spelling `w` from `from`.
    pub fn trace(&self, w: &Word, from: usize) -> Result<usize> {
        if w.rank() != self.quotient.rank() {
            return Err(Error::RankMismatch {
                left: self.quotient.rank(),
                right: w.rank(),
            });
        }
        let mut at = from;
        for &l in w.letters() {
            let label = l.unsigned_abs() as usize;
            at = if l > 0 {
                self.out[at][label - 1]
            } else {
                // the unique in-edge with this label comes from at * img^-1
                self.quotient.mul(
                    at,
                    self.quotient.inv(self.quotient.generator_image(label)),
                )
            };
        }
        Ok(at)
    }

    /// Rewrites a basepoint loop in the cycle-basis letters: tracing the
    /// path of `w`, every crossing of the j-th non-tree edge emits the
    /// letter `±(j+1)`. Errors if `w` is not in the cover's subgroup.
    pub fn rewrite_in_basis(&self, w: &Word) -> Result<Word> {
        if w.rank() != self.quotient.rank() {
            return Err(Error::RankMismatch {
                left: self.quotient.rank(),
                right: w.rank(),
            });
        }
        let mut letters: Vec<i32> = Vec::new();
        let mut at = 0usize;
        for &l in w.letters() {
            let (next, emitted) = self.step_letter(at, l);
            if let Some(b) = emitted {
                letters.push(b);
            }
            at = next;
        }
        if at != 0 {
            return Err(Error::NotInSubgroup);
        }
        Word::reduce(self.cycle_basis.len(), &letters)
    }

    /// Signed count of non-tree edge crossings along the loop of `w`: the
    /// coordinates of its homology class in the cycle basis.
    pub fn cycle_class(&self, w: &Word) -> Result<Vec<BigInt>> {
        let rewritten = self.rewrite_in_basis(w)?;
        let mut v = vec![BigInt::zero(); self.cycle_basis.len()];
        for &l in rewritten.letters() {
            let j = l.unsigned_abs() as usize - 1;
            if l > 0 {
                v[j] += 1;
            } else {
                v[j] -= 1;
            }
        }
        Ok(v)
    }

    /// The map the endomorphism induces on the deck group, validated to be
    /// well defined by evaluating it on every cycle-basis loop (the free
    /// generators of the cover's subgroup).
    pub fn induced_endomorphism(&self, phi: &Endomorphism) -> Result<InducedMap> {
        if phi.rank() != self.quotient.rank() {
            return Err(Error::RankMismatch {
                left: self.quotient.rank(),
                right: phi.rank(),
            });
        }
        for edge in &self.cycle_basis {
            let image = phi.apply(&edge.loop_word)?;
            if self.quotient.evaluate(&image)? != 0 {
                return Err(Error::NotInvariant);
            }
        }
        let map: Vec<usize> = (0..self.quotient.order())
            .map(|g| {
                let image = phi.apply(&self.vertex_words[g]).expect("rank checked");
                self.quotient.evaluate(&image).expect("rank checked")
            })
            .collect();
        Ok(InducedMap { map })
    }

    /// JSON dump: quotient data, vertices, edges, tree edges, and the
    /// cycle-basis loop words in word-grammar text.
    pub fn to_json(&self) -> serde_json::Value {
        let q = &self.quotient;
        serde_json::json!({
            "quotient": {
                "rank": q.rank(),
                "order": q.order(),
                "modulus": q.declared_modulus(),
                "labels": (0..q.order()).map(|g| q.label(g)).collect::<Vec<_>>(),
                "generator_images": (1..=q.rank()).map(|i| q.label(q.generator_image(i))).collect::<Vec<_>>(),
            },
            "vertices": (0..q.order()).map(|g| q.label(g)).collect::<Vec<_>>(),
            "edges": self.graph.edges().iter().map(|&(s, t, l)| vec![s, t, l]).collect::<Vec<_>>(),
            "tree_edges": self.tree_edges.iter().map(|&(s, t, l)| vec![s, t, l]).collect::<Vec<_>>(),
            "cycle_basis": self.cycle_basis.iter().map(|e| e.loop_word.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// A well-defined endomorphism of the deck group, stored pointwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InducedMap {
    map: Vec<usize>,
}

/// Classification of an induced deck-group map.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InducedKind {
    Identity,
    Automorphism,
    ProperEndomorphism,
}

impl InducedMap {
    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(g, &fg)| g == fg)
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for &fg in &self.map {
            if seen[fg] {
                return false;
            }
            seen[fg] = true;
        }
        true
    }

    pub fn kind(&self) -> InducedKind {
        if self.is_identity() {
            InducedKind::Identity
        } else if self.is_bijective() {
            InducedKind::Automorphism
        } else {
            InducedKind::ProperEndomorphism
        }
    }

    pub fn compose(&self, other: &InducedMap) -> InducedMap {
        InducedMap {
            map: other.map.iter().map(|&g| self.map[g]).collect(),
        }
    }
}

/// One level of a tower: a mod-q cover of the rose whose petals are the
/// previous level's cycle-basis loops, plus the dictionary translating
/// petals back to words of the original rank.
#[derive(Clone, Debug)]
pub struct TowerLevel {
    pub cover: BasedCover,
    /// Petal j of this level's base rose, as a word of the original rank.
    pub dictionary: Vec<Word>,
    /// A word in the previous level's subgroup but not in this one.
    pub descent_witness: Word,
}

/// The tower of mod-q homology covers.
#[derive(Clone, Debug)]
pub struct CoverTower {
    rank: usize,
    q: usize,
    levels: Vec<TowerLevel>,
}

impl CoverTower {
    pub fn new(rank: usize, q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidModulus(q));
        }
        Ok(CoverTower {
            rank,
            q,
            levels: Vec::new(),
        })
    }

    /// Builds the tower to the requested depth, failing with the level
    /// reached when a cover would exceed the vertex budget.
    pub fn build(rank: usize, q: usize, depth: usize, max_vertices: usize) -> Result<Self> {
        let mut tower = CoverTower::new(rank, q)?;
        for _ in 0..depth {
            tower.extend(max_vertices)?;
        }
        Ok(tower)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn modulus(&self) -> usize {
        self.q
    }

    pub fn levels(&self) -> &[TowerLevel] {
        &self.levels
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Rank of the free group the next level's base rose would have.
    fn next_base_rank(&self) -> usize {
        match self.levels.last() {
            None => self.rank,
            Some(level) => level.cover.homology_rank(),
        }
    }

    /// Number of vertices the next level's cover would need.
    pub fn next_vertex_count(&self) -> u128 {
        let r = self.next_base_rank() as u32;
        (self.q as u128).checked_pow(r).unwrap_or(u128::MAX)
    }

    /// Adds one level, respecting the vertex budget.
    pub fn extend(&mut self, max_vertices: usize) -> Result<()> {
        let needed = self.next_vertex_count();
        if needed > max_vertices as u128 {
            return Err(Error::BudgetExceeded {
                level: self.levels.len(),
                needed,
                budget: max_vertices,
            });
        }
        let base_rank = self.next_base_rank();
        let dictionary: Vec<Word> = match self.levels.last() {
            None => (1..=self.rank)
                .map(|i| Word::generator(self.rank, i).unwrap())
                .collect(),
            Some(level) => level
                .cover
                .cycle_basis()
                .iter()
                .map(|e| substitute(&e.loop_word, &level.dictionary))
                .collect(),
        };
        let quotient = FiniteQuotient::mod_vector(base_rank, self.q)?;
        let cover = BasedCover::build(quotient);
        let descent_witness = dictionary[0].clone();
        self.levels.push(TowerLevel {
            cover,
            dictionary,
            descent_witness,
        });
        Ok(())
    }

    /// Total covering degree over the original rose.
    pub fn total_degree(&self) -> u128 {
        self.levels
            .iter()
            .map(|l| l.cover.degree() as u128)
            .product()
    }

    /// Rewrites a word of the original rank through levels `1..=level`,
    /// producing a word in the level's cycle-basis letters. `level = 0`
    /// returns the word unchanged. Errors if the word leaves the
    /// corresponding subgroup chain.
    pub fn express(&self, level: usize, w: &Word) -> Result<Word> {
        let mut current = w.clone();
        for k in 0..level {
            current = self.levels[k].cover.rewrite_in_basis(&current)?;
        }
        Ok(current)
    }

    /// The endomorphism of the level's base rose describing the action of
    /// `phi` on that level's subgroup: petal j maps to the rewrite of
    /// `phi(dictionary[j])`. Level 1 returns `phi` itself.
    pub fn lifted_endomorphism(&self, level: usize, phi: &Endomorphism) -> Result<Endomorphism> {
        assert!(level >= 1 && level <= self.levels.len());
        if level == 1 {
            return Ok(phi.clone());
        }
        let dictionary = &self.levels[level - 1].dictionary;
        let images = dictionary
            .iter()
            .map(|petal| self.express(level - 1, &phi.apply(petal)?))
            .collect::<Result<Vec<_>>>()?;
        Endomorphism::new(images)
    }

    /// Moves a composite-cover state (one vertex per level) across one
    /// edge of the original rose, cascading emitted basis letters down the
    /// tower.
    fn step_state(&self, state: &mut [usize], letter: i32) {
        let mut incoming = Some(letter);
        for (k, slot) in state.iter_mut().enumerate() {
            let Some(l) = incoming else { break };
            let (next, emitted) = self.levels[k].cover.step_letter(*slot, l);
            *slot = next;
            incoming = emitted;
        }
    }

    /// The deck group of the composite cover `X_level -> R_n` as an
    /// explicit quotient of the original free group. Tower subgroups are
    /// fully characteristic, hence normal, so the composite cover is
    /// regular and carries a simply transitive deck action.
    pub fn composite_quotient(&self, level: usize, max_vertices: usize) -> Result<FiniteQuotient> {
        assert!(level <= self.levels.len());
        if level == 0 {
            return Ok(FiniteQuotient::trivial(self.rank));
        }
        let degree: u128 = self.levels[..level]
            .iter()
            .map(|l| l.cover.degree() as u128)
            .product();
        if degree > max_vertices as u128 {
            return Err(Error::BudgetExceeded {
                level,
                needed: degree,
                budget: max_vertices,
            });
        }
        // enumerate states breadth-first; letters ascending, inverses after
        let start = vec![0usize; level];
        let mut ids: std::collections::BTreeMap<Vec<usize>, usize> = std::collections::BTreeMap::new();
        ids.insert(start.clone(), 0);
        let mut states = vec![start.clone()];
        let mut words: Vec<Word> = vec![Word::identity(self.rank)];
        let mut queue = std::collections::VecDeque::from([0usize]);
        while let Some(id) = queue.pop_front() {
            for i in 1..=self.rank as i32 {
                for l in [i, -i] {
                    let mut next = states[id].clone();
                    self.step_state(&mut next, l);
                    if !ids.contains_key(&next) {
                        let new_id = states.len();
                        ids.insert(next.clone(), new_id);
                        states.push(next);
                        let word = Word::reduce(
                            self.rank,
                            &[words[id].letters(), &[l][..]].concat(),
                        )?;
                        words.push(word);
                        queue.push_back(new_id);
                    }
                }
            }
        }
        let order = states.len();
        debug_assert_eq!(order as u128, degree);
        let trace_from = |from: usize, w: &Word| -> usize {
            let mut state = states[from].clone();
            for &l in w.letters() {
                self.step_state(&mut state, l);
            }
            ids[&state]
        };
        let mul: Vec<Vec<usize>> = (0..order)
            .map(|g| (0..order).map(|h| trace_from(g, &words[h])).collect())
            .collect();
        let images: Vec<usize> = (1..=self.rank)
            .map(|i| trace_from(0, &Word::generator(self.rank, i).unwrap()))
            .collect();
        FiniteQuotient::from_table(self.rank, mul, images, None)
    }

    /// Re-validates the strict-descent witnesses: each is in the previous
    /// subgroup and maps nontrivially into its level's deck group.
    pub fn validate_descent(&self) -> Result<()> {
        for (k, level) in self.levels.iter().enumerate() {
            let expressed = self.express(k, &level.descent_witness)?;
            let image = level.cover.quotient().evaluate(&expressed)?;
            if image == 0 {
                return Err(Error::InvalidQuotient(format!(
                    "descent witness at level {} is not separated",
                    k + 1
                )));
            }
        }
        Ok(())
    }
}

/// Replaces each letter of `w` by the corresponding dictionary word.
fn substitute(w: &Word, dictionary: &[Word]) -> Word {
    let rank = dictionary.first().map_or(0, Word::rank);
    let mut acc = Word::identity(rank);
    for &l in w.letters() {
        let entry = &dictionary[l.unsigned_abs() as usize - 1];
        let factor = if l > 0 { entry.clone() } else { entry.invert() };
        acc = acc.multiply(&factor).expect("dictionary ranks agree");
    }
    acc
}

/// Result of the bounded word-separation semi-decision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Separation {
    /// Smallest tower level whose deck group sees the word.
    Separated { level: usize },
    /// No level within reach separated it; reports how many were built.
    NotSeparated { levels_built: usize },
}

/// Finds the smallest level of the mod-q tower at which `w` maps
/// nontrivially into the deck group, up to `max_depth` levels and the
/// vertex budget.
pub fn separate_word(
    w: &Word,
    q: usize,
    max_depth: usize,
    max_vertices: usize,
) -> Result<Separation> {
    if w.is_empty() {
        return Err(Error::TrivialWord);
    }
    let mut tower = CoverTower::new(w.rank(), q)?;
    let mut current = w.clone();
    for k in 1..=max_depth {
        if tower.extend(max_vertices).is_err() {
            return Ok(Separation::NotSeparated {
                levels_built: k - 1,
            });
        }
        let level = tower.levels().last().expect("just extended");
        if level.cover.quotient().evaluate(&current)? != 0 {
            return Ok(Separation::Separated { level: k });
        }
        current = level.cover.rewrite_in_basis(&current)?;
    }
    Ok(Separation::NotSeparated {
        levels_built: max_depth,
    })
}
