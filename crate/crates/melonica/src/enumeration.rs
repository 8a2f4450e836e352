//! Exhaustive generation of connected colored-graph classes and of the
//! color-0 closures of bubble collections.
//!
//! Generation fixes `perms[0] = identity` (always reachable by a black
//! relabeling) and walks the remaining permutations, so the search space is
//! `(p!)^(c-1)` instead of `(p!)^c`. Classes are deduplicated by canonical
//! form and ordered by it, making catalogs reproducible byte for byte.

use std::collections::HashMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::degree::degree;
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphDoc};
use crate::guard;
use crate::perm::{all_perms, factorial, Perm};

/// One isomorphism class in a catalog.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CatalogEntry {
    /// Canonical representative.
    pub graph: ColoredGraph,
    pub aut_order: u64,
    pub omega: u64,
    /// Number of labeled graphs (all `(p!)^c` tuples counted) in the class.
    pub labeled_count: u64,
}

/// All connected classes with a fixed color count and size.
#[derive(Debug, Clone)]
pub struct BubbleCatalog {
    pub num_colors: usize,
    pub p: usize,
    pub classes: Vec<CatalogEntry>,
    /// Number of labeled tuples with `perms[0] = id` that are connected,
    /// including every class; disconnected tuples are excluded.
    pub connected_labeled_fixed0: u64,
    /// Total labeled tuples with `perms[0] = id`, connected or not.
    pub total_labeled_fixed0: u64,
}

/// One closure class: a (D+1)-colored graph reached by some pairing σ0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosureClass {
    pub graph: ColoredGraph,
    /// Number of labeled pairings σ0 producing this class.
    pub multiplicity: u64,
    pub connected: bool,
    /// Degree, for connected classes.
    pub omega: Option<u64>,
    pub aut_order: u64,
}

/// All closures of a fixed bubble collection.
#[derive(Debug, Clone)]
pub struct ClosureCatalog {
    pub num_colors: usize,
    pub total_whites: usize,
    pub connected_only: bool,
    pub classes: Vec<ClosureClass>,
}

/// Order of the color-fixing automorphism group.
pub fn automorphism_order(g: &ColoredGraph) -> u64 {
    g.automorphism_order()
}

/// Enumerate all connected classes of `num_colors`-colored graphs with `2p`
/// vertices, deterministically ordered by canonical form.
pub fn enumerate_bubbles(num_colors: usize, p: usize) -> Result<BubbleCatalog> {
    if num_colors < 2 {
        return Err(Error::TooFewColors { got: num_colors });
    }
    if p == 0 {
        return Err(Error::InconsistentSize {
            detail: "p must be at least 1".into(),
        });
    }
    guard::check("p", p, guard::enumeration_limit(num_colors))?;

    let perms: Vec<Perm> = all_perms(p).collect();
    let identity = Perm::identity(p);

    // split on the first free permutation so rayon has coarse chunks
    let maps: Vec<HashMap<ColoredGraph, (u64, bool)>> = perms
        .par_iter()
        .map(|first| {
            let mut local: HashMap<ColoredGraph, (u64, bool)> = HashMap::new();
            let rest_count = num_colors.saturating_sub(2);
            let tails: Box<dyn Iterator<Item = Vec<Perm>>> = if rest_count == 0 {
                Box::new(std::iter::once(Vec::new()))
            } else {
                Box::new(
                    (0..rest_count)
                        .map(|_| perms.clone())
                        .multi_cartesian_product(),
                )
            };
            for tail in tails {
                let mut tuple = Vec::with_capacity(num_colors);
                tuple.push(identity.clone());
                tuple.push(first.clone());
                tuple.extend(tail);
                let g = ColoredGraph::from_perms(tuple);
                let connected = g.is_connected();
                let rep = g.canonical_form().graph;
                let entry = local.entry(rep).or_insert((0, connected));
                entry.0 += 1;
            }
            local
        })
        .collect();

    let mut merged: HashMap<ColoredGraph, (u64, bool)> = HashMap::new();
    for map in maps {
        for (rep, (count, connected)) in map {
            let entry = merged.entry(rep).or_insert((0, connected));
            entry.0 += count;
        }
    }

    let total_labeled_fixed0: u64 = merged.values().map(|&(n, _)| n).sum();
    let connected_labeled_fixed0: u64 = merged
        .values()
        .filter(|&&(_, c)| c)
        .map(|&(n, _)| n)
        .sum();

    let mut classes: Vec<CatalogEntry> = merged
        .into_iter()
        .filter(|&(_, (_, connected))| connected)
        .map(|(graph, (fixed0, _))| {
            let aut_order = graph.automorphism_order();
            let omega = degree(&graph)?.omega;
            Ok(CatalogEntry {
                labeled_count: fixed0 * factorial(p),
                graph,
                aut_order,
                omega,
            })
        })
        .collect::<Result<_>>()?;
    classes.sort_by(|a, b| a.graph.cmp(&b.graph));

    Ok(BubbleCatalog {
        num_colors,
        p,
        classes,
        connected_labeled_fixed0,
        total_labeled_fixed0,
    })
}

/// Disjoint union of bubbles as the colors `1..=D` of a future closure:
/// block-diagonal permutations over the concatenated white sets.
fn bubble_union(bubbles: &[ColoredGraph]) -> Result<(usize, Vec<Vec<usize>>)> {
    if bubbles.is_empty() {
        return Err(Error::InconsistentSize {
            detail: "need at least one bubble".into(),
        });
    }
    let d = bubbles[0].num_colors();
    for b in bubbles {
        if b.num_colors() != d {
            return Err(Error::ColorCountMismatch {
                expected: d,
                got: b.num_colors(),
            });
        }
    }
    let total: usize = bubbles.iter().map(|b| b.p()).sum();
    let mut images = vec![Vec::with_capacity(total); d];
    let mut offset = 0;
    for b in bubbles {
        for (color, image_list) in images.iter_mut().enumerate() {
            image_list.extend(b.perm(color).images().iter().map(|&v| v + offset));
        }
        offset += b.p();
    }
    Ok((total, images))
}

/// Close a bubble collection with every pairing σ0 and group the resulting
/// (D+1)-colored graphs by isomorphism class with labeled multiplicities.
pub fn enumerate_closures(
    bubbles: &[ColoredGraph],
    connected_only: bool,
) -> Result<ClosureCatalog> {
    let (total, union_images) = bubble_union(bubbles)?;
    guard::check("total p", total, 6)?;
    let d = bubbles[0].num_colors();

    let mut merged: HashMap<ColoredGraph, (u64, bool)> = HashMap::new();
    for sigma in all_perms(total) {
        let mut images = Vec::with_capacity(d + 1);
        images.push(sigma.images().to_vec());
        images.extend(union_images.iter().cloned());
        let g = ColoredGraph::new(d + 1, images)?;
        let connected = g.is_connected();
        if connected_only && !connected {
            continue;
        }
        let rep = g.canonical_form().graph;
        let entry = merged.entry(rep).or_insert((0, connected));
        entry.0 += 1;
    }

    let mut classes: Vec<ClosureClass> = merged
        .into_iter()
        .map(|(graph, (multiplicity, connected))| {
            let omega = if connected {
                Some(degree(&graph)?.omega)
            } else {
                None
            };
            let aut_order = graph.automorphism_order();
            Ok(ClosureClass {
                graph,
                multiplicity,
                connected,
                omega,
                aut_order,
            })
        })
        .collect::<Result<_>>()?;
    classes.sort_by(|a, b| a.graph.cmp(&b.graph));

    Ok(ClosureCatalog {
        num_colors: d + 1,
        total_whites: total,
        connected_only,
        classes,
    })
}

// --- catalog files -----------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct CatalogEntryDoc {
    #[serde(flatten)]
    graph: GraphDoc,
    aut_order: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    omega: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    labeled_count: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplicity: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    connected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    color_class: Option<usize>,
}

impl BubbleCatalog {
    /// Group indices of the classes under the coarser equivalence that also
    /// permutes colors: `result[i]` is the index of the first catalog entry
    /// in the same color-permuting class as entry `i`. Reporting only.
    pub fn color_class_indices(&self) -> Vec<usize> {
        let mut seen: HashMap<ColoredGraph, usize> = HashMap::new();
        self.classes
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let rep = e.graph.canonical_form_up_to_colors();
                *seen.entry(rep).or_insert(i)
            })
            .collect()
    }

    /// Catalog file: a JSON array of graph documents with `aut_order` and
    /// `omega` fields. With `mod_colors`, each entry also carries the index
    /// of its class under color-permuting equivalence.
    pub fn to_json_opts(&self, mod_colors: bool) -> String {
        let color_classes = if mod_colors {
            Some(self.color_class_indices())
        } else {
            None
        };
        let docs: Vec<CatalogEntryDoc> = self
            .classes
            .iter()
            .enumerate()
            .map(|(i, e)| CatalogEntryDoc {
                graph: GraphDoc::from(&e.graph),
                aut_order: e.aut_order,
                omega: Some(e.omega),
                labeled_count: Some(e.labeled_count),
                multiplicity: None,
                connected: None,
                color_class: color_classes.as_ref().map(|cc| cc[i]),
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("serializable")
    }

    pub fn to_json(&self) -> String {
        self.to_json_opts(false)
    }

    /// Load the graphs of a catalog file (classes only; counts are not
    /// revalidated here).
    pub fn graphs_from_json(text: &str) -> Result<Vec<ColoredGraph>> {
        let docs: Vec<CatalogEntryDoc> =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        docs.into_iter().map(|d| d.graph.try_into()).collect()
    }
}

impl ClosureCatalog {
    pub fn to_json(&self) -> String {
        let docs: Vec<CatalogEntryDoc> = self
            .classes
            .iter()
            .map(|e| CatalogEntryDoc {
                graph: GraphDoc::from(&e.graph),
                aut_order: e.aut_order,
                omega: e.omega,
                labeled_count: None,
                multiplicity: Some(e.multiplicity),
                connected: Some(e.connected),
                color_class: None,
            })
            .collect();
        serde_json::to_string_pretty(&docs).expect("serializable")
    }
}
