//! Closed bipartite edge-colored graphs encoded as permutation tuples.
//!
//! A graph with `c` colors and `2p` vertices is a `c`-tuple of permutations of
//! `{0..p-1}`: `perms[i]` sends white vertex `w` to the black vertex at the
//! other end of its color-`i` line. Every vertex then automatically has
//! exactly one incident line of each color, which is the defining regularity
//! of these graphs. Faces, connectivity and isomorphism all become statements
//! about the permutation tuple.
//!
//! Vertices are 0-indexed in memory and 1-indexed in the JSON file format.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{all_perms, Perm};

/// A closed bipartite colored graph: `p` white and `p` black vertices joined
/// by one line per color.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColoredGraph {
    perms: Vec<Perm>,
}

/// One bicolored cycle of a graph: the orbit of a white vertex under
/// `perms[j]⁻¹ ∘ perms[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    pub colors: (usize, usize),
    /// White vertices visited by the cycle, starting at the smallest.
    pub white_cycle: Vec<usize>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.white_cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.white_cycle.is_empty()
    }
}

/// Lexicographically minimal representative of an isomorphism class together
/// with the order of the color-fixing automorphism group.
///
/// Isomorphisms act as `perms[i] → π_b ∘ perms[i] ∘ π_w⁻¹` for a white
/// relabeling `π_w` and a black relabeling `π_b`, colors fixed. The canonical
/// representative always has `perms[0] = identity` (for any `π_w` the optimal
/// `π_b` forces the first block to the identity, the smallest possible value).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CanonicalForm {
    pub graph: ColoredGraph,
    pub aut_order: u64,
}

impl CanonicalForm {
    /// Stable text key, e.g. `c4p2:[[1,2],[2,1],[2,1],[1,2]]` (1-indexed).
    pub fn key(&self) -> String {
        self.graph.key()
    }
}

impl ColoredGraph {
    /// Validate and build a graph from 0-indexed image lists, one per color.
    pub fn new(num_colors: usize, images: Vec<Vec<usize>>) -> Result<Self> {
        if num_colors < 2 {
            return Err(Error::TooFewColors { got: num_colors });
        }
        if images.len() != num_colors {
            return Err(Error::InconsistentSize {
                detail: format!("num_colors = {} but {} image lists", num_colors, images.len()),
            });
        }
        let p = images[0].len();
        if p == 0 {
            return Err(Error::InconsistentSize {
                detail: "p must be at least 1".into(),
            });
        }
        let mut perms = Vec::with_capacity(num_colors);
        for (color, list) in images.into_iter().enumerate() {
            if list.len() != p {
                return Err(Error::InconsistentSize {
                    detail: format!("color {} has {} images, expected {}", color, list.len(), p),
                });
            }
            let bad = list.iter().copied().find(|&v| v >= p);
            let perm = match Perm::from_images(list.clone()) {
                Some(perm) => perm,
                None => {
                    let value = bad.unwrap_or_else(|| {
                        // duplicate image: report the first repeated value
                        let mut seen = vec![false; p];
                        let mut dup = 0;
                        for &v in &list {
                            if seen[v] {
                                dup = v;
                                break;
                            }
                            seen[v] = true;
                        }
                        dup
                    });
                    return Err(Error::NotAPermutation {
                        color,
                        p,
                        value: value + 1,
                    });
                }
            };
            perms.push(perm);
        }
        Ok(ColoredGraph { perms })
    }

    pub fn from_perms(perms: Vec<Perm>) -> Self {
        debug_assert!(perms.len() >= 2);
        debug_assert!(perms.iter().all(|q| q.len() == perms[0].len()));
        ColoredGraph { perms }
    }

    pub fn num_colors(&self) -> usize {
        self.perms.len()
    }

    /// Half the number of vertices: the count of white (equally, black)
    /// vertices.
    pub fn p(&self) -> usize {
        self.perms[0].len()
    }

    pub fn vertex_count(&self) -> usize {
        2 * self.p()
    }

    pub fn line_count(&self) -> usize {
        self.num_colors() * self.p()
    }

    pub fn perm(&self, color: usize) -> &Perm {
        &self.perms[color]
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    fn check_color(&self, color: usize) -> Result<()> {
        if color >= self.num_colors() {
            return Err(Error::BadColor {
                color,
                num_colors: self.num_colors(),
            });
        }
        Ok(())
    }

    /// The permutation `perms[j]⁻¹ ∘ perms[i]` on white vertices whose cycles
    /// are the faces with colors `{i, j}`.
    pub fn face_perm(&self, i: usize, j: usize) -> Result<Perm> {
        self.check_color(i)?;
        self.check_color(j)?;
        if i == j {
            return Err(Error::BadColor {
                color: j,
                num_colors: self.num_colors(),
            });
        }
        Ok(self.perms[j].inverse().compose(&self.perms[i]))
    }

    /// Faces with colors `{i, j}`.
    pub fn faces(&self, i: usize, j: usize) -> Result<Vec<Face>> {
        let perm = self.face_perm(i, j)?;
        Ok(perm
            .cycles()
            .into_iter()
            .map(|white_cycle| Face {
                colors: (i.min(j), i.max(j)),
                white_cycle,
            })
            .collect())
    }

    pub fn face_count(&self, i: usize, j: usize) -> Result<usize> {
        Ok(self.face_perm(i, j)?.cycle_count())
    }

    /// Total number of faces over all unordered color pairs.
    pub fn total_faces(&self) -> usize {
        let c = self.num_colors();
        let mut total = 0;
        for i in 0..c {
            for j in (i + 1)..c {
                total += self.face_count(i, j).expect("colors in range");
            }
        }
        total
    }

    /// True iff the graph, all colors together, is a single component.
    pub fn is_connected(&self) -> bool {
        let p = self.p();
        // BFS on white vertices via the products perms[j]⁻¹ ∘ perms[i];
        // generators with j = 0 suffice to generate the same group.
        let gens: Vec<Perm> = (1..self.num_colors())
            .map(|i| self.perms[0].inverse().compose(&self.perms[i]))
            .collect();
        let mut seen = vec![false; p];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(w) = queue.pop_front() {
            for gen in &gens {
                for next in [gen.apply(w), gen.inverse().apply(w)] {
                    if !seen[next] {
                        seen[next] = true;
                        count += 1;
                        queue.push_back(next);
                    }
                }
            }
        }
        count == p
    }

    /// Connected components as sets of white vertices, each sorted, ordered by
    /// smallest member.
    pub fn white_components(&self) -> Vec<Vec<usize>> {
        let p = self.p();
        let gens: Vec<Perm> = (1..self.num_colors())
            .map(|i| self.perms[0].inverse().compose(&self.perms[i]))
            .collect();
        let mut comp = vec![usize::MAX; p];
        let mut components = Vec::new();
        for start in 0..p {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = components.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut queue = VecDeque::from([start]);
            while let Some(w) = queue.pop_front() {
                for gen in &gens {
                    for next in [gen.apply(w), gen.inverse().apply(w)] {
                        if comp[next] == usize::MAX {
                            comp[next] = id;
                            members.push(next);
                            queue.push_back(next);
                        }
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }
        components
    }

    /// Restriction to a set of white vertices closed under every
    /// `perms[j]⁻¹ ∘ perms[i]` (a union of components); whites and blacks are
    /// renumbered in ascending order.
    pub fn restriction(&self, whites: &[usize]) -> ColoredGraph {
        let mut blacks: Vec<usize> = whites.iter().map(|&w| self.perm(0).apply(w)).collect();
        blacks.sort_unstable();
        let mut black_index = std::collections::HashMap::new();
        for (idx, &b) in blacks.iter().enumerate() {
            black_index.insert(b, idx);
        }
        let images: Vec<Vec<usize>> = (0..self.num_colors())
            .map(|color| {
                whites
                    .iter()
                    .map(|&w| black_index[&self.perm(color).apply(w)])
                    .collect()
            })
            .collect();
        ColoredGraph::new(self.num_colors(), images).expect("restriction of a valid graph")
    }

    /// Relabel by a white permutation `π_w` and black permutation `π_b`:
    /// `perms[i] → π_b ∘ perms[i] ∘ π_w⁻¹`.
    pub fn relabel(&self, white: &Perm, black: &Perm) -> ColoredGraph {
        let wi = white.inverse();
        ColoredGraph {
            perms: self
                .perms
                .iter()
                .map(|q| black.compose(&q.compose(&wi)))
                .collect(),
        }
    }

    /// Lexicographically minimal representative under simultaneous white and
    /// black relabeling, plus the automorphism count.
    ///
    /// For each `π_w` the black relabeling that minimizes the tuple is forced:
    /// it turns `perms[0]` into the identity, and the remaining blocks become
    /// `π_w ∘ (perms[0]⁻¹ ∘ perms[i]) ∘ π_w⁻¹`. Minimizing over `π_w` is a
    /// p!-sized search, fine at desk scale.
    pub fn canonical_form(&self) -> CanonicalForm {
        let p = self.p();
        let gens: Vec<Perm> = (1..self.num_colors())
            .map(|i| self.perms[0].inverse().compose(&self.perms[i]))
            .collect();
        let mut best: Option<Vec<Perm>> = None;
        let mut aut = 0u64;
        for pw in all_perms(p) {
            let candidate: Vec<Perm> = gens.iter().map(|g| g.conjugate(&pw)).collect();
            if candidate.iter().zip(gens.iter()).all(|(a, b)| a == b) {
                aut += 1;
            }
            match &best {
                None => best = Some(candidate),
                Some(b) => {
                    if candidate < *b {
                        best = Some(candidate);
                    }
                }
            }
        }
        let mut perms = vec![Perm::identity(p)];
        perms.extend(best.expect("p >= 1"));
        CanonicalForm {
            graph: ColoredGraph { perms },
            aut_order: aut,
        }
    }

    /// Order of the color-fixing automorphism group: the number of pairs
    /// `(π_w, π_b)` with `π_b ∘ perms[i] ∘ π_w⁻¹ = perms[i]` for every color.
    pub fn automorphism_order(&self) -> u64 {
        self.canonical_form().aut_order
    }

    /// Minimal representative when color permutations are also allowed.
    /// Reporting only: classes everywhere else keep colors fixed.
    pub fn canonical_form_up_to_colors(&self) -> ColoredGraph {
        let c = self.num_colors();
        let mut best: Option<ColoredGraph> = None;
        for order in all_perms(c) {
            let permuted = ColoredGraph {
                perms: (0..c).map(|i| self.perms[order.apply(i)].clone()).collect(),
            };
            let candidate = permuted.canonical_form().graph;
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
        best.expect("at least one color order")
    }

    /// Stable text key (1-indexed images), usable as a class identifier.
    pub fn key(&self) -> String {
        let blocks: Vec<String> = self
            .perms
            .iter()
            .map(|q| {
                let imgs: Vec<String> = q.images().iter().map(|&v| (v + 1).to_string()).collect();
                format!("[{}]", imgs.join(","))
            })
            .collect();
        format!("c{}p{}:[{}]", self.num_colors(), self.p(), blocks.join(","))
    }

    /// Serialize to the JSON document format (1-indexed image lists).
    pub fn encode(&self) -> String {
        serde_json::to_string(&GraphDoc::from(self)).expect("serializable")
    }

    /// Parse and validate a JSON document.
    pub fn decode(text: &str) -> Result<ColoredGraph> {
        let doc: GraphDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        doc.try_into()
    }
}

/// The on-disk JSON shape: `{"num_colors": 4, "p": 2, "perms": [[1,2],...]}`.
#[derive(Debug, Serialize, Deserialize)]
pub struct GraphDoc {
    pub num_colors: usize,
    pub p: usize,
    pub perms: Vec<Vec<usize>>,
}

impl From<&ColoredGraph> for GraphDoc {
    fn from(g: &ColoredGraph) -> Self {
        GraphDoc {
            num_colors: g.num_colors(),
            p: g.p(),
            perms: g
                .perms
                .iter()
                .map(|q| q.images().iter().map(|&v| v + 1).collect())
                .collect(),
        }
    }
}

impl TryFrom<GraphDoc> for ColoredGraph {
    type Error = Error;

    fn try_from(doc: GraphDoc) -> Result<ColoredGraph> {
        if doc.num_colors < 2 {
            return Err(Error::TooFewColors {
                got: doc.num_colors,
            });
        }
        if doc.perms.len() != doc.num_colors {
            return Err(Error::InconsistentSize {
                detail: format!(
                    "num_colors = {} but {} image lists",
                    doc.num_colors,
                    doc.perms.len()
                ),
            });
        }
        let mut shifted = Vec::with_capacity(doc.perms.len());
        for (color, list) in doc.perms.iter().enumerate() {
            if list.len() != doc.p {
                return Err(Error::InconsistentSize {
                    detail: format!(
                        "color {} has {} images, expected p = {}",
                        color,
                        list.len(),
                        doc.p
                    ),
                });
            }
            let mut images = Vec::with_capacity(list.len());
            for &v in list {
                if v == 0 || v > doc.p {
                    return Err(Error::NotAPermutation {
                        color,
                        p: doc.p,
                        value: v,
                    });
                }
                images.push(v - 1);
            }
            shifted.push(images);
        }
        ColoredGraph::new(doc.num_colors, shifted)
    }
}

/// The unique 2-vertex closed graph with `num_colors` colors (the
/// `num_colors`-dipole; for 4 colors, the (3+1)-dipole).
pub fn dipole(num_colors: usize) -> ColoredGraph {
    ColoredGraph {
        perms: vec![Perm::identity(1); num_colors],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::factorial;

    fn swap2() -> Vec<usize> {
        vec![1, 0]
    }

    fn id2() -> Vec<usize> {
        vec![0, 1]
    }

    #[test]
    fn builds_the_dipole() {
        let g = ColoredGraph::new(4, vec![vec![0]; 4]).unwrap();
        assert_eq!(g.p(), 1);
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.line_count(), 4);
        assert_eq!(g, dipole(4));
    }

    #[test]
    fn builds_the_six_vertex_bubble() {
        // the 6-vertex 3-colored invariant: perms ([1,3,2],[2,1,3],[3,2,1])
        let g = ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.line_count(), 9);
    }

    #[test]
    fn accepts_two_colors() {
        let g = ColoredGraph::new(2, vec![swap2(), swap2()]).unwrap();
        assert_eq!(g.face_count(0, 1).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            ColoredGraph::new(1, vec![vec![0]]),
            Err(Error::TooFewColors { .. })
        ));
        assert!(matches!(
            ColoredGraph::new(2, vec![vec![0, 1], vec![0]]),
            Err(Error::InconsistentSize { .. })
        ));
        assert!(matches!(
            ColoredGraph::new(2, vec![vec![0, 0], vec![0, 1]]),
            Err(Error::NotAPermutation { .. })
        ));
    }

    #[test]
    fn face_counts_of_fixtures() {
        // (3+1)-dipole: one face per pair, six pairs
        let d = dipole(4);
        assert_eq!(d.face_count(0, 1).unwrap(), 1);
        assert_eq!(d.total_faces(), 6);

        // six-vertex bubble: one face of length 3 per pair, F = 3
        let g = ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
        let faces01 = g.faces(0, 1).unwrap();
        assert_eq!(faces01.len(), 1);
        assert_eq!(faces01[0].len(), 3);
        assert_eq!(g.total_faces(), 3);

        // (id, s, s, id): per-pair counts and total F = 8
        let g = ColoredGraph::new(4, vec![id2(), swap2(), swap2(), id2()]).unwrap();
        let counts: Vec<usize> = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
            .iter()
            .map(|&(i, j)| g.face_count(i, j).unwrap())
            .collect();
        assert_eq!(counts.iter().sum::<usize>(), 8);
        assert_eq!(counts[0], 1);
        assert_eq!(counts[1], 1);
        assert_eq!(counts[2], 2);
        assert_eq!(g.total_faces(), 8);
    }

    #[test]
    fn faces_partition_whites() {
        let g = ColoredGraph::new(4, vec![id2(), swap2(), swap2(), id2()]).unwrap();
        for i in 0..4 {
            for j in (i + 1)..4 {
                let faces = g.faces(i, j).unwrap();
                let total: usize = faces.iter().map(Face::len).sum();
                assert_eq!(total, g.p());
            }
        }
    }

    #[test]
    fn bad_color_is_rejected() {
        let g = dipole(4);
        assert!(matches!(g.faces(0, 4), Err(Error::BadColor { .. })));
        assert!(matches!(g.faces(2, 2), Err(Error::BadColor { .. })));
    }

    #[test]
    fn connectivity_fixtures() {
        assert!(dipole(4).is_connected());
        // all four colors the same swap: two disjoint dipoles
        let g = ColoredGraph::new(4, vec![swap2(); 4]).unwrap();
        assert!(!g.is_connected());
        assert_eq!(g.white_components().len(), 2);
        // (id, id, id, s): the swap mixes the two whites
        let g = ColoredGraph::new(4, vec![id2(), id2(), id2(), swap2()]).unwrap();
        assert!(g.is_connected());
    }

    #[test]
    fn canonical_form_identifies_relabelings() {
        let a = ColoredGraph::new(4, vec![swap2(), id2(), id2(), swap2()]).unwrap();
        let b = ColoredGraph::new(4, vec![id2(), swap2(), swap2(), id2()]).unwrap();
        assert_eq!(a.canonical_form().graph, b.canonical_form().graph);
    }

    #[test]
    fn automorphism_orders() {
        assert_eq!(dipole(4).automorphism_order(), 1);
        let g = ColoredGraph::new(4, vec![id2(), id2(), id2(), swap2()]).unwrap();
        assert_eq!(g.automorphism_order(), 2);
        // two disjoint dipoles: the component swap
        let g = ColoredGraph::new(4, vec![id2(); 4]).unwrap();
        assert_eq!(g.automorphism_order(), 2);
        let g = ColoredGraph::new(4, vec![id2(), swap2(), swap2(), swap2()]).unwrap();
        assert_eq!(g.automorphism_order(), 2);
    }

    #[test]
    fn aut_order_matches_pairwise_brute_force() {
        // independent count over all (π_w, π_b) pairs, p up to 4
        for perms in [
            vec![id2(), swap2(), swap2(), id2()],
            vec![id2(), id2(), id2(), swap2()],
            vec![id2(), id2(), swap2()],
            vec![
                vec![0, 1, 2, 3],
                vec![1, 0, 3, 2],
                vec![2, 3, 0, 1],
                vec![3, 2, 1, 0],
            ],
            vec![
                vec![0, 1, 2, 3],
                vec![1, 2, 3, 0],
                vec![0, 1, 2, 3],
            ],
        ] {
            let g = ColoredGraph::new(perms.len(), perms).unwrap();
            let mut count = 0u64;
            for pw in all_perms(g.p()) {
                for pb in all_perms(g.p()) {
                    if g.relabel(&pw, &pb) == g {
                        count += 1;
                    }
                }
            }
            assert_eq!(count, g.automorphism_order());
            let pf = factorial(g.p());
            assert_eq!((pf * pf) % count, 0);
        }
    }

    #[test]
    fn encode_matches_documented_format() {
        let g = ColoredGraph::new(4, vec![id2(), swap2(), swap2(), id2()]).unwrap();
        assert_eq!(
            g.encode(),
            r#"{"num_colors":4,"p":2,"perms":[[1,2],[2,1],[2,1],[1,2]]}"#
        );
        let g = ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]]).unwrap();
        assert_eq!(
            g.encode(),
            r#"{"num_colors":3,"p":3,"perms":[[1,3,2],[2,1,3],[3,2,1]]}"#
        );
    }

    #[test]
    fn decode_round_trips() {
        let g = dipole(4);
        assert_eq!(ColoredGraph::decode(&g.encode()).unwrap(), g);
    }

    #[test]
    fn decode_rejects_invalid_documents() {
        let dup = r#"{"num_colors":2,"p":2,"perms":[[1,1],[1,2]]}"#;
        assert!(matches!(
            ColoredGraph::decode(dup),
            Err(Error::NotAPermutation { .. })
        ));
        let mismatch = r#"{"num_colors":3,"p":1,"perms":[[1],[1]]}"#;
        assert!(matches!(
            ColoredGraph::decode(mismatch),
            Err(Error::InconsistentSize { .. })
        ));
        let malformed = r#"{"num_colors":4,"p":1"#;
        assert!(matches!(ColoredGraph::decode(malformed), Err(Error::Parse(_))));
        let zero = r#"{"num_colors":2,"p":1,"perms":[[0],[1]]}"#;
        assert!(matches!(
            ColoredGraph::decode(zero),
            Err(Error::NotAPermutation { .. })
        ));
    }

    #[test]
    fn decode_encode_identity_exhaustive_small() {
        // every valid graph with p ≤ 3 and 2..=4 colors round-trips
        use itertools::Itertools;
        for c in 2..=4usize {
            for p in 1..=3usize {
                for tuple in (0..c)
                    .map(|_| all_perms(p).collect::<Vec<_>>())
                    .multi_cartesian_product()
                {
                    let g = ColoredGraph::from_perms(tuple);
                    assert_eq!(ColoredGraph::decode(&g.encode()).unwrap(), g);
                }
            }
        }
    }
}
