//! Melonic graphs: recognition by dipole reduction, the bijection with
//! colored trees, exhaustive counting by two independent generators, and the
//! critical point of the tree series.
//!
//! A melonic insertion splits a line of color `m` and grafts in a new
//! white/black pair joined by all the other colors. A graph is melonic iff
//! undoing such insertions (removing pairs joined by D of the D+1 colors)
//! reaches the 2-vertex dipole. The insertion genealogy is a rooted tree in
//! which every node owns one slot per color and each non-root node is labeled
//! by the color of the line it was inserted on.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::Ratio;
use num::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{dipole, ColoredGraph};
use crate::guard;

/// One dipole removal: a white/black pair joined by all colors but one.
/// Vertex numbers refer to the labels of the graph the reduction started
/// from, not to the shrinking intermediate graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionStep {
    pub removed_white: usize,
    pub removed_black: usize,
    pub shared_colors: Vec<usize>,
    pub missing_color: usize,
    /// Endpoints of the line of the missing color that gets rejoined.
    pub carrier_white: usize,
    pub carrier_black: usize,
}

/// Outcome of running the deterministic reduction to exhaustion.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub steps: Vec<ReductionStep>,
    /// What was left when no pair could be removed: the dipole exactly when
    /// the input is melonic.
    pub terminal: ColoredGraph,
    pub is_melonic: bool,
    /// Surviving pair (original labels), the root of the insertion genealogy.
    pub root_pair: (usize, usize),
}

/// Insertion genealogy of a melonic graph. Each node has at most one child
/// per color (chains of repeated insertions on one line nest as paths), so
/// the arity is bounded by the color count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MelonTree {
    pub num_colors: usize,
    pub root: MelonNode,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MelonNode {
    pub children: BTreeMap<usize, MelonNode>,
}

impl MelonNode {
    pub fn node_count(&self) -> usize {
        1 + self.children.values().map(MelonNode::node_count).sum::<usize>()
    }
}

impl MelonTree {
    pub fn node_count(&self) -> usize {
        self.root.node_count()
    }
}

fn require_rank(g: &ColoredGraph) -> Result<()> {
    let c = g.num_colors();
    if c < 4 {
        return Err(Error::UnsupportedRank {
            d: c.saturating_sub(1),
            why: "dipole reduction characterizes degree zero only for rank at least 3".into(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// Run the deterministic reduction: repeatedly remove the lexicographically
/// smallest pair joined by all colors but one, rejoining the freed line.
pub fn reduce(g: &ColoredGraph) -> Result<ReductionTrace> {
    require_rank(g)?;
    let c = g.num_colors();
    let mut images: Vec<Vec<usize>> = (0..c).map(|i| g.perm(i).images().to_vec()).collect();
    let mut white_labels: Vec<usize> = (0..g.p()).collect();
    let mut black_labels: Vec<usize> = (0..g.p()).collect();
    let mut steps = Vec::new();

    loop {
        let p = white_labels.len();
        if p == 1 {
            let terminal = dipole(c);
            return Ok(ReductionTrace {
                steps,
                terminal,
                is_melonic: true,
                root_pair: (white_labels[0], black_labels[0]),
            });
        }
        let mut found = None;
        'scan: for w in 0..p {
            for b in 0..p {
                let shared: Vec<usize> =
                    (0..c).filter(|&color| images[color][w] == b).collect();
                if shared.len() == c - 1 {
                    found = Some((w, b, shared));
                    break 'scan;
                }
            }
        }
        let Some((w, b, shared)) = found else {
            let terminal = ColoredGraph::new(c, images).expect("intermediate graph stays valid");
            return Ok(ReductionTrace {
                steps,
                terminal,
                is_melonic: false,
                root_pair: (white_labels[0], black_labels[0]),
            });
        };
        let missing = (0..c).find(|color| !shared.contains(color)).expect("one color missing");
        // the freed line of the missing color: from the white feeding b to
        // the black fed by w
        let carrier_black = images[missing][w];
        let carrier_white = (0..p).find(|&x| images[missing][x] == b).expect("bijection");
        steps.push(ReductionStep {
            removed_white: white_labels[w],
            removed_black: black_labels[b],
            shared_colors: shared,
            missing_color: missing,
            carrier_white: white_labels[carrier_white],
            carrier_black: black_labels[carrier_black],
        });
        images[missing][carrier_white] = carrier_black;
        for color_images in images.iter_mut() {
            color_images.remove(w);
            for v in color_images.iter_mut() {
                if *v > b {
                    *v -= 1;
                }
            }
        }
        white_labels.remove(w);
        black_labels.remove(b);
    }
}

/// True iff repeated dipole removal reaches the 2-vertex dipole; agrees with
/// degree zero.
pub fn is_melonic(g: &ColoredGraph) -> Result<bool> {
    Ok(reduce(g)?.is_melonic)
}

/// Insert a melon on the line of color `color` at white vertex `white`: the
/// new pair is joined by every other color, and the line is split through it.
pub fn insert_melon(g: &ColoredGraph, white: usize, color: usize) -> ColoredGraph {
    let c = g.num_colors();
    let p = g.p();
    debug_assert!(white < p && color < c);
    let mut images: Vec<Vec<usize>> = (0..c).map(|i| g.perm(i).images().to_vec()).collect();
    let new = p; // index of both the new white and the new black
    for (ci, color_images) in images.iter_mut().enumerate() {
        if ci == color {
            let old_target = color_images[white];
            color_images.push(old_target);
            color_images[white] = new;
        } else {
            color_images.push(new);
        }
    }
    ColoredGraph::new(c, images).expect("insertion preserves validity")
}

/// Extract the insertion genealogy of a melonic graph, computed on its
/// canonical representative so isomorphic graphs map to the same tree.
pub fn melon_to_tree(g: &ColoredGraph) -> Result<MelonTree> {
    let canon = g.canonical_form().graph;
    let trace = reduce(&canon)?;
    if !trace.is_melonic {
        return Err(Error::NotMelonic);
    }
    let p = canon.p();
    let c = canon.num_colors();
    // melon pairing: each reduction step pairs a white with a black
    let mut mate_of_white = vec![usize::MAX; p];
    for step in &trace.steps {
        mate_of_white[step.removed_white] = step.removed_black;
    }
    mate_of_white[trace.root_pair.0] = trace.root_pair.1;
    let mut pair_of_black = vec![usize::MAX; p];
    for (w, &b) in mate_of_white.iter().enumerate() {
        pair_of_black[b] = w;
    }

    // Walk the chain structure: from a pair's white, color m leads to the
    // next pair inserted on that line, closing back at the slot owner.
    let mut visited = vec![false; p];
    visited[trace.root_pair.0] = true;
    let mut visits = 1usize;
    let root = build_node(
        &canon,
        &pair_of_black,
        trace.root_pair.0,
        None,
        &mut visited,
        &mut visits,
    )?;
    if visits != p {
        return Err(Error::CheckFailed(format!(
            "melon decomposition visited {} of {} pairs",
            visits, p
        )));
    }
    Ok(MelonTree {
        num_colors: c,
        root,
    })
}

/// Children of the pair whose white vertex is `white`. `chain` is
/// `Some((m, owner_white))` when the pair sits on the color-`m` chain owned
/// by another pair; its own slot of color `m` then continues that chain.
fn build_node(
    g: &ColoredGraph,
    pair_of_black: &[usize],
    white: usize,
    chain: Option<(usize, usize)>,
    visited: &mut [bool],
    visits: &mut usize,
) -> Result<MelonNode> {
    let mut node = MelonNode::default();
    for color in 0..g.num_colors() {
        let next = pair_of_black[g.perm(color).apply(white)];
        let stop = match chain {
            Some((m, owner)) if m == color => next == owner,
            _ => next == white,
        };
        if stop {
            continue;
        }
        if visited[next] {
            return Err(Error::CheckFailed(
                "melon decomposition revisited a pair".into(),
            ));
        }
        visited[next] = true;
        *visits += 1;
        let child_chain = match chain {
            Some((m, owner)) if m == color => Some((m, owner)),
            _ => Some((color, white)),
        };
        let child = build_node(g, pair_of_black, next, child_chain, visited, visits)?;
        node.children.insert(color, child);
    }
    Ok(node)
}

/// Rebuild the melonic graph a tree describes, inverse to [`melon_to_tree`]
/// up to isomorphism.
pub fn tree_to_melon(tree: &MelonTree) -> Result<ColoredGraph> {
    let c = tree.num_colors;
    if c < 4 {
        return Err(Error::UnsupportedRank {
            d: c.saturating_sub(1),
            why: "melon trees describe graphs with at least 4 colors".into(),
        });
    }
    let mut images: Vec<Vec<usize>> = vec![vec![0]; c];
    grow(&mut images, &tree.root, 0)?;
    ColoredGraph::new(c, images)
}

fn grow(images: &mut [Vec<usize>], node: &MelonNode, white: usize) -> Result<()> {
    for (&color, child) in &node.children {
        if color >= images.len() {
            return Err(Error::BadColor {
                color,
                num_colors: images.len(),
            });
        }
        let new = images[0].len();
        for (ci, color_images) in images.iter_mut().enumerate() {
            if ci == color {
                let old_target = color_images[white];
                color_images.push(old_target);
                color_images[white] = new;
            } else {
                color_images.push(new);
            }
        }
        grow(images, child, new)?;
    }
    Ok(())
}

/// Count melonic classes (connected, degree 0) with `2p` vertices by
/// exhaustive class generation plus a degree filter.
pub fn count_melons_exhaustive(d: usize, p: usize) -> Result<u64> {
    let catalog = crate::enumeration::enumerate_bubbles(d + 1, p)?;
    Ok(catalog.classes.iter().filter(|e| e.omega == 0).count() as u64)
}

/// Generate all melonic classes with `2p` vertices by iterated insertion
/// starting from the dipole — the independent generator against which the
/// degree-filter count is checked.
pub fn melons_by_insertion(d: usize, p: usize) -> Result<Vec<ColoredGraph>> {
    let c = d + 1;
    guard::check("p", p, guard::enumeration_limit(c))?;
    let mut current = vec![dipole(c)];
    for size in 1..p {
        let mut next = std::collections::BTreeSet::new();
        for g in &current {
            debug_assert_eq!(g.p(), size);
            for white in 0..g.p() {
                for color in 0..c {
                    next.insert(insert_melon(g, white, color).canonical_form().graph);
                }
            }
        }
        current = next.into_iter().collect();
    }
    Ok(current)
}

/// Number of rooted trees with `p` nodes in which every node has one child
/// slot per color (`d + 1` slots): the generating function satisfies
/// `B = 1 + x·B^(d+1)`. Computed by the recurrence; the closed form
/// `C((d+1)p, p)/(dp + 1)` is the independent check, not the implementation.
pub fn count_colored_trees(d: usize, p: usize) -> BigUint {
    let terms = colored_tree_series(d, p);
    terms[p].clone()
}

/// The series `T[0..=max_p]` of colored-tree counts.
pub fn colored_tree_series(d: usize, max_p: usize) -> Vec<BigUint> {
    let mut t: Vec<BigUint> = vec![BigUint::from(1u32)];
    for n in 1..=max_p {
        // coefficient of x^(n-1) in (Σ_{k<n} T_k x^k)^(d+1)
        let mut power = vec![BigUint::from(1u32)]; // running product, truncated
        for _ in 0..=d {
            let mut next = vec![BigUint::ZERO; n];
            for (i, a) in power.iter().enumerate() {
                if a == &BigUint::ZERO {
                    continue;
                }
                for (j, b) in t.iter().enumerate() {
                    if i + j >= n {
                        break;
                    }
                    next[i + j] += a * b;
                }
            }
            power = next;
        }
        t.push(power[n - 1].clone());
    }
    t
}

/// Closed-form Fuss–Catalan value `C((d+1)p, p)/(dp + 1)`, used only as an
/// independent check on the recurrence.
pub fn fuss_catalan_closed_form(d: usize, p: usize) -> BigUint {
    let mut numer = BigUint::from(1u32);
    for i in 0..p {
        numer *= BigUint::from((d + 1) * p - i);
    }
    let mut denom = BigUint::from(1u32);
    for i in 1..=p {
        denom *= BigUint::from(i);
    }
    denom *= BigUint::from(d * p + 1);
    &numer / &denom
}

/// Ratio-test estimate of the radius of convergence of the tree series, with
/// one Richardson extrapolation step. Exact rational interval.
#[derive(Debug, Clone)]
pub struct CriticalEstimate {
    pub d: usize,
    pub max_p: usize,
    pub lower: Ratio<BigInt>,
    pub upper: Ratio<BigInt>,
}

impl CriticalEstimate {
    /// Midpoint of the interval; by construction this is the Richardson
    /// extrapolation of the last two ratios.
    pub fn estimate(&self) -> Ratio<BigInt> {
        (&self.lower + &self.upper) / BigInt::from(2)
    }

    pub fn contains(&self, value: &Ratio<BigInt>) -> bool {
        &self.lower <= value && value <= &self.upper
    }
}

/// Estimate the critical point of the colored-tree series for rank `d`.
///
/// The plain ratio `r_n = T(n)/T(n+1)` approaches the radius from above with
/// an O(1/n) error; the Richardson step cancels it. The interval is
/// `[2R - r, r]`, centered on the extrapolation.
pub fn estimate_critical_point(d: usize, max_p: usize) -> Result<CriticalEstimate> {
    if max_p < 10 {
        return Err(Error::InconsistentSize {
            detail: format!("max_p must be at least 10, got {}", max_p),
        });
    }
    let t = colored_tree_series(d, max_p);
    let ratio = |n: usize| -> Ratio<BigInt> {
        Ratio::new(BigInt::from(t[n].clone()), BigInt::from(t[n + 1].clone()))
    };
    let n = max_p - 1;
    let r_n = ratio(n);
    let r_prev = ratio(n - 1);
    let richardson = Ratio::from(BigInt::from(n as u64)) * &r_n
        - Ratio::from(BigInt::from((n - 1) as u64)) * &r_prev;
    let lower = &richardson + (&richardson - &r_n);
    Ok(CriticalEstimate {
        d,
        max_p,
        lower,
        upper: r_n,
    })
}
