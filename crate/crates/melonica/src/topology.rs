//! The dual gluing of tetrahedra behind a 4-colored graph.
//!
//! Each white vertex is a positively oriented tetrahedron, each black one a
//! negatively oriented tetrahedron, and a line of color `i` glues two of them
//! along their color-`i` triangles. The cellular dictionary reads off the
//! counts directly from the graph:
//!
//! - tetrahedra  = vertices (2p)
//! - triangles   = lines (4p)
//! - edges       = bicolored faces
//! - apices      = connected 3-colored subgraphs, over all four color triples
//!
//! Each connected 3-colored subgraph is also a surface (the link of the
//! corresponding apex); the gluing is a manifold exactly when every link is a
//! sphere. A non-zero link genus signals a conical singularity.

use serde::Serialize;

use crate::degree::degree;
use crate::error::{Error, Result};
use crate::graph::ColoredGraph;

/// Cell counts of the gluing dual to a connected 4-colored graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellComplexSummary {
    /// Triangulation vertices: connected 3-colored subgraphs over all triples.
    pub c0: usize,
    /// Edges: total bicolored faces.
    pub c1: usize,
    /// Triangles: lines.
    pub c2: usize,
    /// Tetrahedra: graph vertices.
    pub c3: usize,
    pub chi: i64,
}

/// Surface data of one connected 3-colored subgraph (one link).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkEntry {
    /// The three colors of the subgraph (the deleted color is the fourth).
    pub colors: [usize; 3],
    pub vertices: usize,
    pub lines: usize,
    pub faces: usize,
    pub genus: u64,
}

/// Link genera of every 3-colored subgraph of a 4-colored graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkReport {
    pub links: Vec<LinkEntry>,
    pub is_manifold: bool,
}

fn require_four_colors(g: &ColoredGraph) -> Result<()> {
    if g.num_colors() != 4 {
        return Err(Error::WrongRank {
            expected: 4,
            got: g.num_colors(),
        });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(())
}

/// The 3-colored subgraph obtained by deleting one color (keeps all
/// vertices), plus the kept colors in ascending order.
fn subgraph_without(g: &ColoredGraph, deleted: usize) -> ([usize; 3], ColoredGraph) {
    let kept: Vec<usize> = (0..g.num_colors()).filter(|&c| c != deleted).collect();
    let perms = kept.iter().map(|&c| g.perm(c).clone()).collect();
    ([kept[0], kept[1], kept[2]], ColoredGraph::from_perms(perms))
}

/// Cell counts and Euler characteristic of the gluing encoded by a connected
/// 4-colored graph.
pub fn cell_complex(g: &ColoredGraph) -> Result<CellComplexSummary> {
    require_four_colors(g)?;
    let c3 = g.vertex_count();
    let c2 = g.line_count();
    let c1 = g.total_faces();
    let mut c0 = 0;
    for deleted in 0..4 {
        let (_, sub) = subgraph_without(g, deleted);
        c0 += sub.white_components().len();
    }
    let chi = c0 as i64 - c1 as i64 + c2 as i64 - c3 as i64;
    Ok(CellComplexSummary { c0, c1, c2, c3, chi })
}

/// Surface data of a connected 3-colored graph: the associated surface has
/// one vertex per graph vertex, one edge per line and one disc per face, so
/// `χ = V - L + F = 2 - 2g`.
pub fn bubble_surfaces(b: &ColoredGraph) -> Result<LinkEntry> {
    if b.num_colors() != 3 {
        return Err(Error::WrongRank {
            expected: 3,
            got: b.num_colors(),
        });
    }
    let report = degree(b)?; // checks connectivity; ω of a 3-colored graph is its genus
    Ok(LinkEntry {
        colors: [0, 1, 2],
        vertices: b.vertex_count(),
        lines: b.line_count(),
        faces: report.face_total,
        genus: report.omega,
    })
}

/// Genus of every connected 3-colored subgraph of a connected 4-colored
/// graph; the gluing is a manifold iff all genera vanish.
pub fn is_manifold(g: &ColoredGraph) -> Result<LinkReport> {
    require_four_colors(g)?;
    let mut links = Vec::new();
    for deleted in 0..4 {
        let (colors, sub) = subgraph_without(g, deleted);
        for component in sub.white_components() {
            let piece = sub.restriction(&component);
            let mut entry = bubble_surfaces(&piece)?;
            entry.colors = colors;
            links.push(entry);
        }
    }
    let is_manifold = links.iter().all(|l| l.genus == 0);
    Ok(LinkReport { links, is_manifold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dipole;

    const ID: [usize; 2] = [0, 1];
    const SW: [usize; 2] = [1, 0];

    fn g4(a: [usize; 2], b: [usize; 2], c: [usize; 2], d: [usize; 2]) -> ColoredGraph {
        ColoredGraph::new(4, vec![a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec()]).unwrap()
    }

    #[test]
    fn dipole_cell_counts() {
        let s = cell_complex(&dipole(4)).unwrap();
        assert_eq!((s.c3, s.c2, s.c1, s.c0), (2, 4, 6, 4));
        assert_eq!(s.chi, 0);
    }

    #[test]
    fn twisted_graph_cell_counts() {
        let s = cell_complex(&g4(ID, SW, SW, ID)).unwrap();
        assert_eq!((s.c3, s.c2, s.c1, s.c0), (4, 8, 8, 4));
        assert_eq!(s.chi, 0);
    }

    #[test]
    fn wrong_rank_and_disconnected_are_rejected() {
        assert!(matches!(
            cell_complex(&dipole(3)),
            Err(Error::WrongRank { .. })
        ));
        let disconnected = ColoredGraph::new(4, vec![SW.to_vec(); 4]).unwrap();
        assert!(matches!(
            cell_complex(&disconnected),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn bubble_surface_fixtures() {
        let e = bubble_surfaces(&dipole(3)).unwrap();
        assert_eq!((e.vertices, e.lines, e.faces, e.genus), (2, 3, 3, 0));

        let torus = ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]])
            .unwrap();
        let e = bubble_surfaces(&torus).unwrap();
        assert_eq!(e.genus, 1);

        let pillow = ColoredGraph::new(3, vec![ID.to_vec(), ID.to_vec(), SW.to_vec()]).unwrap();
        let e = bubble_surfaces(&pillow).unwrap();
        assert_eq!((e.vertices, e.lines, e.faces, e.genus), (4, 6, 4, 0));
    }

    #[test]
    fn manifold_fixtures() {
        assert!(is_manifold(&dipole(4)).unwrap().is_manifold);
        // degree 1 yet still a manifold: the degree is not topological
        assert!(is_manifold(&g4(ID, SW, SW, ID)).unwrap().is_manifold);
    }

    #[test]
    fn torus_bubble_closure_is_singular() {
        // close the genus-1 bubble with σ0 = id on colors shifted up
        let g = ColoredGraph::new(
            4,
            vec![
                vec![0, 1, 2],
                vec![0, 2, 1],
                vec![1, 0, 2],
                vec![2, 1, 0],
            ],
        )
        .unwrap();
        let report = is_manifold(&g).unwrap();
        assert!(!report.is_manifold);
        let bad: Vec<&LinkEntry> = report.links.iter().filter(|l| l.genus > 0).collect();
        assert!(!bad.is_empty());
        // the offending link is the original bubble, colors {1,2,3}
        assert!(bad.iter().any(|l| l.colors == [1, 2, 3]));
    }

    #[test]
    fn link_count_matches_c0() {
        for g in [dipole(4), g4(ID, SW, SW, ID), g4(ID, ID, ID, SW)] {
            let cells = cell_complex(&g).unwrap();
            let report = is_manifold(&g).unwrap();
            assert_eq!(report.links.len(), cells.c0);
        }
    }
}
