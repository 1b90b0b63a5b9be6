//! Ribbon-graph surfaces carried by a rose, their finite covers, the
//! algebraic intersection pairing on closed-up homology, elevation
//! submodules, and the intersection-form-preservation evaluator.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::covers::{BasedCover, CoverTower, FiniteQuotient};
use crate::error::{Error, Result};
use crate::homology::{deck_matrix, lift_matrix};
use crate::matrix::{hermite_basis, invert_unimodular, smith_normal_form, IntMatrix};
use crate::stallings::is_surjective;
use crate::word::{Endomorphism, Word};

/// One end of an edge: where it leaves its source or enters its target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum End {
    Tail,
    Head,
}

/// A directed edge traversal: `(edge id, forward?)`.
pub type Dart = (usize, bool);

/// A graph with a rotation system: a cyclic order of incident half-edge
/// slots at every vertex. Faces (boundary walks) are read off by the
/// next-slot rule of the oriented thickening.
#[derive(Clone, Debug)]
struct RibbonGraph {
    /// edge -> (tail vertex, head vertex)
    ends: Vec<(usize, usize)>,
    /// rotation[v] = counterclockwise cyclic list of slots at v
    rotation: Vec<Vec<(usize, End)>>,
    /// slot -> (vertex, index in rotation[vertex])
    tail_pos: Vec<(usize, usize)>,
    head_pos: Vec<(usize, usize)>,
}

impl RibbonGraph {
    fn new(ends: Vec<(usize, usize)>, rotation: Vec<Vec<(usize, End)>>) -> Result<Self> {
        let e = ends.len();
        let mut tail_pos = vec![(usize::MAX, usize::MAX); e];
        let mut head_pos = vec![(usize::MAX, usize::MAX); e];
        for (v, slots) in rotation.iter().enumerate() {
            for (i, &(edge, end)) in slots.iter().enumerate() {
                let target = match end {
                    End::Tail => &mut tail_pos[edge],
                    End::Head => &mut head_pos[edge],
                };
                if *target != (usize::MAX, usize::MAX) {
                    return Err(Error::InvalidRotation(format!(
                        "slot for edge {edge} appears twice"
                    )));
                }
                *target = (v, i);
            }
        }
        for (edge, &(t, h)) in ends.iter().enumerate() {
            if tail_pos[edge].0 != t || head_pos[edge].0 != h {
                return Err(Error::InvalidRotation(format!(
                    "edge {edge} slots disagree with its endpoints"
                )));
            }
        }
        Ok(RibbonGraph {
            ends,
            rotation,
            tail_pos,
            head_pos,
        })
    }

    fn dart_target(&self, d: Dart) -> usize {
        if d.1 {
            self.ends[d.0].1
        } else {
            self.ends[d.0].0
        }
    }

    /// The slot a dart arrives through.
    fn arrival_slot(&self, d: Dart) -> (usize, usize) {
        if d.1 {
            self.head_pos[d.0]
        } else {
            self.tail_pos[d.0]
        }
    }

    /// The next dart of the face containing `d`: step to the slot after
    /// the arrival slot in the rotation and leave through it.
    fn next_face_dart(&self, d: Dart) -> Dart {
        let (v, i) = self.arrival_slot(d);
        let slots = &self.rotation[v];
        let (edge, end) = slots[(i + 1) % slots.len()];
        match end {
            End::Tail => (edge, true),
            End::Head => (edge, false),
        }
    }

    /// All faces, each a cyclic dart sequence; deterministic order by the
    /// smallest dart they contain.
    fn faces(&self) -> Vec<Vec<Dart>> {
        let mut seen: BTreeMap<Dart, bool> = BTreeMap::new();
        let mut out = Vec::new();
        for edge in 0..self.ends.len() {
            for fwd in [true, false] {
                let start = (edge, fwd);
                if seen.contains_key(&start) {
                    continue;
                }
                let mut walk = Vec::new();
                let mut d = start;
                loop {
                    walk.push(d);
                    seen.insert(d, true);
                    d = self.next_face_dart(d);
                    if d == start {
                        break;
                    }
                }
                out.push(walk);
            }
        }
        out
    }
}

/// A rotation system on the one-vertex rose, with its boundary walks and
/// the genus/boundary data of the thickened surface.
#[derive(Clone, Debug)]
pub struct RoseRibbon {
    rank: usize,
    rotation: Vec<(usize, End)>,
    boundary_words: Vec<Word>,
    genus: usize,
    boundary_count: usize,
}

impl RoseRibbon {
    /// Parses a cyclic order like `"a b A B"`: a lowercase letter is the
    /// outgoing end of that petal, an uppercase letter the incoming end.
    /// `x<i>` and `x<i>^-1` forms are accepted too.
    pub fn parse(rank: usize, spec: &str) -> Result<Self> {
        let mut rotation = Vec::new();
        for token in spec.split_whitespace() {
            let word = Word::parse(token, rank)?;
            let letters = word.letters();
            if letters.len() != 1 {
                return Err(Error::InvalidRotation(format!(
                    "token {token:?} is not a single half-edge symbol"
                )));
            }
            let l = letters[0];
            let petal = l.unsigned_abs() as usize - 1;
            rotation.push((petal, if l > 0 { End::Tail } else { End::Head }));
        }
        Self::new(rank, rotation)
    }

    /// The genus-1 default `a b A B c C d D ...`.
    pub fn default_rotation(rank: usize) -> Result<Self> {
        let mut rotation = vec![
            (0, End::Tail),
            (1, End::Tail),
            (0, End::Head),
            (1, End::Head),
        ];
        for petal in 2..rank {
            rotation.push((petal, End::Tail));
            rotation.push((petal, End::Head));
        }
        Self::new(rank, rotation)
    }

    pub fn new(rank: usize, rotation: Vec<(usize, End)>) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidRotation(format!(
                "rank must be at least 2, got {rank}"
            )));
        }
        if rotation.len() != 2 * rank {
            return Err(Error::InvalidRotation(format!(
                "expected {} half-edge symbols, got {}",
                2 * rank,
                rotation.len()
            )));
        }
        let ends = (0..rank).map(|_| (0usize, 0usize)).collect();
        let graph = RibbonGraph::new(ends, vec![rotation.clone()])?;
        let faces = graph.faces();
        let boundary_count = faces.len();
        // closed-up Euler characteristic: 1 - n + b = 2 - 2g
        let chi_closed = 1isize - rank as isize + boundary_count as isize;
        let genus2 = 2 - chi_closed;
        if genus2 < 0 || genus2 % 2 != 0 {
            return Err(Error::InvalidRotation(
                "rotation does not close up to an orientable surface".into(),
            ));
        }
        let boundary_words = faces
            .iter()
            .map(|walk| {
                let letters: Vec<i32> = walk
                    .iter()
                    .map(|&(e, fwd)| if fwd { e as i32 + 1 } else { -(e as i32 + 1) })
                    .collect();
                Word::reduce(rank, &letters).expect("letters in range")
            })
            .collect();
        Ok(RoseRibbon {
            rank,
            rotation,
            boundary_words,
            genus: (genus2 / 2) as usize,
            boundary_count,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    /// Boundary walks as words in the petals: the peripheral words.
    pub fn boundary_words(&self) -> &[Word] {
        &self.boundary_words
    }
}

/// A based cover of the rose with the lifted rotation system: boundary
/// walks, the (degenerate) intersection pairing on the cycle lattice, and
/// the quotient onto the closed surface's homology with its symplectic
/// pairing.
#[derive(Clone, Debug)]
pub struct RibbonCover {
    pub description: String,
    cover: BasedCover,
    boundary_walks: Vec<Vec<Dart>>,
    genus: usize,
    boundary_count: usize,
    /// pairing on the cycle basis of the open cover; boundary classes span
    /// its radical
    open_pairing: IntMatrix,
    /// rows map cycle coordinates onto the closed quotient
    projection: IntMatrix,
    /// columns lift the closed basis back into the cycle lattice
    lift: IntMatrix,
    /// unimodular antisymmetric pairing on the closed quotient
    closed_pairing: IntMatrix,
}

impl RibbonCover {
    /// Thickens a based cover by lifting the base rotation: the slots at
    /// every vertex copy the base order, with each incoming slot attached
    /// to that vertex's in-edge.
    pub fn build(rose: &RoseRibbon, cover: BasedCover, description: String) -> Result<Self> {
        let n = rose.rank();
        let order = cover.degree();
        let edge_id = |v: usize, petal: usize| v * n + petal;
        let mut ends = vec![(0usize, 0usize); n * order];
        for v in 0..order {
            for petal in 0..n {
                ends[edge_id(v, petal)] = (v, cover.out_neighbor(v, petal + 1));
            }
        }
        let rotation: Vec<Vec<(usize, End)>> = (0..order)
            .map(|v| {
                rose.rotation
                    .iter()
                    .map(|&(petal, end)| match end {
                        End::Tail => (edge_id(v, petal), End::Tail),
                        End::Head => (edge_id(cover.in_neighbor(v, petal + 1), petal), End::Head),
                    })
                    .collect()
            })
            .collect();
        let graph = RibbonGraph::new(ends, rotation)?;
        let boundary_walks = graph.faces();
        let boundary_count = boundary_walks.len();
        let chi = order as isize * (1 - n as isize);
        let genus2 = 2 - chi - boundary_count as isize;
        if genus2 < 0 || genus2 % 2 != 0 {
            return Err(Error::InvalidRotation(
                "lifted rotation does not close up orientably".into(),
            ));
        }
        let genus = (genus2 / 2) as usize;

        // basis cycles as dart walks of their reduced loop words
        let walks: Vec<Vec<Dart>> = cover
            .cycle_basis()
            .iter()
            .map(|e| word_darts(&cover, &e.loop_word))
            .collect();
        let open_pairing = strand_pairing(&graph, &walks);

        // closed homology: quotient by the span of the boundary classes
        let rank = cover.homology_rank();
        let boundary_classes: Vec<Vec<BigInt>> = boundary_walks
            .iter()
            .map(|walk| {
                let mut class = vec![BigInt::zero(); rank];
                for &(e, fwd) in walk {
                    let (v, petal) = (e / n, e % n);
                    if let Some(j) = cover.basis_index_of_edge(v, petal + 1) {
                        if fwd {
                            class[j] += 1;
                        } else {
                            class[j] -= 1;
                        }
                    }
                }
                class
            })
            .collect();
        let boundary_matrix = IntMatrix::from_columns(&boundary_classes);
        let snf = smith_normal_form(&boundary_matrix);
        let invariants = snf.diagonal();
        let pivots = invariants.iter().filter(|d| !d.is_zero()).count();
        if invariants.iter().any(|d| !d.is_zero() && !d.is_one()) {
            return Err(Error::DegeneratePairing(
                "boundary span has torsion quotient".into(),
            ));
        }
        let closed_rank = rank - pivots;
        if closed_rank != 2 * genus {
            return Err(Error::DegeneratePairing(format!(
                "closed rank {closed_rank} disagrees with genus {genus}"
            )));
        }
        let u_inv = invert_unimodular(&snf.u)?;
        let mut projection = IntMatrix::zeros(closed_rank, rank);
        for i in 0..closed_rank {
            for j in 0..rank {
                projection.set(i, j, snf.u.get(pivots + i, j).clone());
            }
        }
        let mut lift = IntMatrix::zeros(rank, closed_rank);
        for i in 0..rank {
            for j in 0..closed_rank {
                lift.set(i, j, u_inv.get(i, pivots + j).clone());
            }
        }
        let closed_pairing = lift.transpose().mul(&open_pairing)?.mul(&lift)?;
        // the closed form must be antisymmetric and unimodular
        for i in 0..closed_rank {
            for j in 0..closed_rank {
                if *closed_pairing.get(i, j) != -closed_pairing.get(j, i).clone() {
                    return Err(Error::DegeneratePairing(
                        "closed pairing is not antisymmetric".into(),
                    ));
                }
            }
        }
        if closed_rank > 0 && closed_pairing.determinant()?.abs() != BigInt::one() {
            return Err(Error::DegeneratePairing(
                "closed pairing is not unimodular".into(),
            ));
        }
        Ok(RibbonCover {
            description,
            cover,
            boundary_walks,
            genus,
            boundary_count,
            open_pairing,
            projection,
            lift,
            closed_pairing,
        })
    }

    pub fn cover(&self) -> &BasedCover {
        &self.cover
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_count(&self) -> usize {
        self.boundary_count
    }

    pub fn euler_characteristic(&self) -> isize {
        2 - 2 * self.genus as isize - self.boundary_count as isize
    }

    pub fn boundary_walks(&self) -> &[Vec<Dart>] {
        &self.boundary_walks
    }

    pub fn closed_rank(&self) -> usize {
        self.closed_pairing.rows()
    }

    /// The symplectic pairing on the closed surface's homology.
    pub fn closed_pairing(&self) -> &IntMatrix {
        &self.closed_pairing
    }

    /// The pairing on the open cover's cycle lattice (radical = boundary).
    pub fn open_pairing(&self) -> &IntMatrix {
        &self.open_pairing
    }

    /// Projects a cycle-lattice class to closed coordinates.
    pub fn project(&self, class: &[BigInt]) -> Vec<BigInt> {
        self.projection.mul_vector(class).expect("length checked")
    }

    /// Pairing value of two closed classes.
    pub fn pair(&self, a: &[BigInt], b: &[BigInt]) -> BigInt {
        let jb = self.closed_pairing.mul_vector(b).expect("length");
        a.iter().zip(&jb).map(|(x, y)| x * y).sum()
    }

    /// Deck action on closed homology.
    pub fn closed_deck_matrix(&self, g: usize) -> IntMatrix {
        let open = deck_matrix(&self.cover, g).matrix;
        self.projection
            .mul(&open)
            .and_then(|m| m.mul(&self.lift))
            .expect("dimensions agree")
    }

    /// Whether a matrix on the cycle lattice preserves the intersection
    /// pairing, `m^T P m = P`. For invertible `m` this is equivalent to
    /// descending to the closed quotient and preserving the symplectic
    /// form there.
    pub fn preserves_open_pairing(&self, m: &IntMatrix) -> bool {
        let mt = m.transpose();
        let product = mt
            .mul(&self.open_pairing)
            .and_then(|x| x.mul(m))
            .expect("square matrices");
        product == self.open_pairing
    }

    /// Elevation data of a base loop: the minimal closing power, the
    /// preferred elevation's class, the deck orbit, and a Hermite basis of
    /// the lattice they span in closed homology.
    pub fn elevations(&self, x: &Word) -> Result<ElevationSet> {
        if x.is_empty() {
            return Err(Error::TrivialWord);
        }
        let q = self.cover.quotient();
        let image = q.evaluate(x)?;
        let order = q.element_order(image);
        let preferred_open = self.cover.cycle_class(&x.power(order as i64))?;
        let orbit_closed: Vec<Vec<BigInt>> = (0..q.order())
            .map(|g| {
                let translated = deck_matrix(&self.cover, g)
                    .matrix
                    .mul_vector(&preferred_open)
                    .expect("length");
                self.project(&translated)
            })
            .collect();
        let basis = hermite_basis(&orbit_closed);
        Ok(ElevationSet {
            base_word: x.clone(),
            order,
            elevation_count: q.order() / order,
            preferred_closed: self.project(&preferred_open),
            orbit_closed,
            basis,
        })
    }

    /// Whether the pairing vanishes on the whole elevation lattice.
    pub fn is_isotropic(&self, set: &ElevationSet) -> bool {
        for a in &set.basis {
            for b in &set.basis {
                if !self.pair(a, b).is_zero() {
                    return false;
                }
            }
        }
        true
    }
}

/// The dart path of a reduced word from the basepoint.
fn word_darts(cover: &BasedCover, w: &Word) -> Vec<Dart> {
    let n = cover.quotient().rank();
    let mut at = 0usize;
    let mut darts = Vec::with_capacity(w.len());
    for &l in w.letters() {
        let petal = l.unsigned_abs() as usize - 1;
        if l > 0 {
            darts.push((at * n + petal, true));
            at = cover.out_neighbor(at, petal + 1);
        } else {
            let src = cover.in_neighbor(at, petal + 1);
            darts.push((src * n + petal, false));
            at = src;
        }
    }
    darts
}

/// Pairwise algebraic intersection numbers of closed walks on a ribbon
/// graph, by perturbing all walks into parallel strands: inside each edge
/// the strands are ordered by an arbitrary fixed depth, and at each vertex
/// two passages cross according to whether their strand-end chords
/// interleave in the boundary circle of the vertex disk.
fn strand_pairing(graph: &RibbonGraph, walks: &[Vec<Dart>]) -> IntMatrix {
    let edge_count = graph.ends.len();
    // depth of each (walk, step) within its edge
    let mut counts = vec![0usize; edge_count];
    let mut depth: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (w, walk) in walks.iter().enumerate() {
        for (s, &(e, _)) in walk.iter().enumerate() {
            depth.insert((w, s), counts[e]);
            counts[e] += 1;
        }
    }
    // circle positions of strand ends around each vertex:
    // key (edge, depth, end) -> (vertex, position)
    let mut position: BTreeMap<(usize, usize, End), usize> = BTreeMap::new();
    let mut circle_size = vec![0usize; graph.rotation.len()];
    for (v, slots) in graph.rotation.iter().enumerate() {
        let mut pos = 0usize;
        for &(e, end) in slots {
            match end {
                // looking out along the edge, counterclockwise sweeps the
                // strand ends from deepest to shallowest at the tail...
                End::Tail => {
                    for d in (0..counts[e]).rev() {
                        position.insert((e, d, End::Tail), pos);
                        pos += 1;
                    }
                }
                // ...and from shallowest to deepest at the head
                End::Head => {
                    for d in 0..counts[e] {
                        position.insert((e, d, End::Head), pos);
                        pos += 1;
                    }
                }
            }
        }
        circle_size[v] = pos;
    }
    // chords: one per walk passage through a vertex
    struct Chord {
        walk: usize,
        enter: usize,
        exit: usize,
    }
    let mut chords_at: Vec<Vec<Chord>> =
        std::iter::repeat_with(Vec::new).take(graph.rotation.len()).collect();
    for (w, walk) in walks.iter().enumerate() {
        let len = walk.len();
        for s in 0..len {
            let d_in = walk[s];
            let d_out = walk[(s + 1) % len];
            let v = graph.dart_target(d_in);
            let in_end = if d_in.1 { End::Head } else { End::Tail };
            let out_end = if d_out.1 { End::Tail } else { End::Head };
            let enter = position[&(d_in.0, depth[&(w, s)], in_end)];
            let exit = position[&(d_out.0, depth[&(w, (s + 1) % len)], out_end)];
            chords_at[v].push(Chord {
                walk: w,
                enter,
                exit,
            });
        }
    }
    let mut pairing = IntMatrix::zeros(walks.len(), walks.len());
    for (v, chords) in chords_at.iter().enumerate() {
        let circle = circle_size[v];
        for (i, p) in chords.iter().enumerate() {
            for q in chords.iter().skip(i + 1) {
                if p.walk == q.walk {
                    continue;
                }
                let rel = |x: usize| (x + circle - p.enter) % circle;
                let b = rel(p.exit);
                let c = rel(q.enter);
                let d = rel(q.exit);
                let c_inside = c < b;
                let d_inside = d < b;
                if c_inside == d_inside {
                    continue;
                }
                let sign = if c_inside { 1 } else { -1 };
                let cur = pairing.get(p.walk, q.walk) + sign;
                pairing.set(p.walk, q.walk, cur);
                let cur = pairing.get(q.walk, p.walk) - sign;
                pairing.set(q.walk, p.walk, cur);
            }
        }
    }
    pairing
}

/// The elevation lattice of a loop in a ribbon cover.
#[derive(Clone, Debug)]
pub struct ElevationSet {
    pub base_word: Word,
    /// Minimal power of the loop that closes up in the cover.
    pub order: usize,
    pub elevation_count: usize,
    pub preferred_closed: Vec<BigInt>,
    /// Closed classes of all deck translates, in deck enumeration order.
    pub orbit_closed: Vec<Vec<BigInt>>,
    /// Hermite basis of the lattice the orbit spans.
    pub basis: Vec<Vec<BigInt>>,
}

/// Builds the standard cover family over a rose ribbon: the trivial cover
/// followed by composite mod-q tower covers, q ascending then level
/// ascending, skipping levels that exceed the vertex budget.
pub fn ribbon_family(
    rose: &RoseRibbon,
    q_list: &[usize],
    depth: usize,
    max_vertices: usize,
) -> Result<Vec<RibbonCover>> {
    let n = rose.rank();
    let mut family = vec![RibbonCover::build(
        rose,
        BasedCover::build(FiniteQuotient::trivial(n)),
        "trivial".into(),
    )?];
    for &q in q_list {
        let mut tower = CoverTower::new(n, q)?;
        for level in 1..=depth {
            if tower.extend(max_vertices).is_err() {
                break;
            }
            let quotient = match tower.composite_quotient(level, max_vertices) {
                Ok(q) => q,
                Err(Error::BudgetExceeded { .. }) => break,
                Err(e) => return Err(e),
            };
            family.push(RibbonCover::build(
                rose,
                BasedCover::build(quotient),
                format!("q={q} level={level}"),
            )?);
        }
    }
    Ok(family)
}

/// Outcome of a disjointness search over a cover family.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DisjointnessVerdict {
    /// Some pair of elevation classes pairs nonzero in this cover.
    IntersectionWitnessed {
        cover: String,
        deck_pair: (String, String),
        value: String,
    },
    /// No cover in the family shows a nonzero pairing.
    NoWitnessInFamily,
}

/// Searches the family for a cover where elevations of `x` and `y` have
/// nonzero algebraic intersection.
pub fn disjointness_search(
    x: &Word,
    y: &Word,
    family: &[RibbonCover],
) -> Result<DisjointnessVerdict> {
    for rc in family {
        let ex = rc.elevations(x)?;
        let ey = rc.elevations(y)?;
        let labels = |g: usize| rc.cover().quotient().label(g);
        for (g, a) in ex.orbit_closed.iter().enumerate() {
            for (h, b) in ey.orbit_closed.iter().enumerate() {
                let value = rc.pair(a, b);
                if !value.is_zero() {
                    return Ok(DisjointnessVerdict::IntersectionWitnessed {
                        cover: rc.description.clone(),
                        deck_pair: (labels(g), labels(h)),
                        value: value.to_string(),
                    });
                }
            }
        }
    }
    Ok(DisjointnessVerdict::NoWitnessInFamily)
}

/// Per-cover outcome of the form-preservation evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct CoverFormReport {
    pub cover: String,
    pub degree: usize,
    pub genus: usize,
    pub boundary: usize,
    pub pairing: Vec<Vec<String>>,
    pub verdict: bool,
    /// Deck element whose composed lift preserves the pairing.
    pub deck_witness: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FormPreservationReport {
    pub endomorphism: String,
    pub all_covers_pass: bool,
    pub covers: Vec<CoverFormReport>,
}

/// Tests whether some deck-composed lift of the automorphism preserves
/// the intersection pairing on each cover of the family. Lifts are only
/// defined up to deck, so all compositions are tried in deck order.
pub fn preserves_intersection_form(
    psi: &Endomorphism,
    family: &[RibbonCover],
) -> Result<FormPreservationReport> {
    if !is_surjective(psi) {
        return Err(Error::NotAutomorphism);
    }
    let mut covers = Vec::new();
    let mut all = true;
    for rc in family {
        let base_lift = lift_matrix(rc.cover(), psi)?.matrix;
        let mut witness = None;
        for g in 0..rc.cover().degree() {
            let composed = deck_matrix(rc.cover(), g).matrix.mul(&base_lift)?;
            if rc.preserves_open_pairing(&composed) {
                witness = Some(rc.cover().quotient().label(g));
                break;
            }
        }
        let verdict = witness.is_some();
        all &= verdict;
        covers.push(CoverFormReport {
            cover: rc.description.clone(),
            degree: rc.cover().degree(),
            genus: rc.genus(),
            boundary: rc.boundary_count(),
            pairing: rc.closed_pairing().to_string_rows(),
            verdict,
            deck_witness: witness,
        });
    }
    Ok(FormPreservationReport {
        endomorphism: psi.to_string(),
        all_covers_pass: all,
        covers,
    })
}
