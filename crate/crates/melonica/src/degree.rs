//! Jackets, the degree, and the two independent routes to the large-N
//! exponent of a closed connected colored graph.
//!
//! A jacket of a `c`-colored graph is the ribbon graph obtained by keeping
//! only the faces whose color pair is adjacent in a fixed cyclic order of the
//! colors; there are `(c-1)!/2` of them, one per cycle up to reversal. Each
//! jacket is an orientable surface with an integer genus, and the degree is
//! the sum of those genera. The degree in turn fixes the total face count:
//!
//! ```text
//! F = (c-1)(c-2)/2 · p + (c-1) - 2ω/(c-2)!
//! ```
//!
//! which for 3 colors collapses to the ribbon-graph relation `F = p + 2 - 2g`.

use itertools::Itertools;
use num::rational::Ratio;

use crate::error::{Error, Result};
use crate::graph::ColoredGraph;
use crate::perm::factorial;

/// One jacket: a cyclic order of the colors (stored with color 0 first and
/// second color < last, quotienting rotation and reversal) plus the face
/// count and genus of the associated ribbon graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Jacket {
    pub cycle: Vec<usize>,
    pub face_count: usize,
    pub genus: u64,
}

/// Degree of a graph together with the face-count cross-check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeReport {
    pub omega: u64,
    pub jacket_genera: Vec<u64>,
    pub face_total: usize,
    pub formula_face_total: usize,
}

/// An exact power of N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AmplitudeExponent(pub Ratio<i64>);

impl std::fmt::Display for AmplitudeExponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

/// All color cycles with color 0 first and second color < last color.
fn color_cycles(c: usize) -> Vec<Vec<usize>> {
    (1..c)
        .permutations(c - 1)
        .filter(|rest| rest.first() < rest.last())
        .map(|rest| {
            let mut cycle = Vec::with_capacity(c);
            cycle.push(0);
            cycle.extend(rest);
            cycle
        })
        .collect()
}

/// Jackets of a connected closed graph with at least 3 colors.
pub fn jackets(g: &ColoredGraph) -> Result<Vec<Jacket>> {
    let c = g.num_colors();
    if c < 3 {
        return Err(Error::TooFewColors { got: c });
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let v = g.vertex_count() as i64;
    let l = g.line_count() as i64;
    let mut out = Vec::new();
    for cycle in color_cycles(c) {
        let mut face_count = 0usize;
        for k in 0..c {
            let i = cycle[k];
            let j = cycle[(k + 1) % c];
            face_count += g.face_count(i, j)?;
        }
        let chi = v - l + face_count as i64;
        // bipartite colored graphs are orientable, so χ = 2 - 2g with g ≥ 0
        if chi % 2 != 0 || chi > 2 {
            return Err(Error::FormulaMismatch {
                counted: face_count,
                formula: format!("jacket {:?} has Euler characteristic {}", cycle, chi),
            });
        }
        let genus = ((2 - chi) / 2) as u64;
        out.push(Jacket {
            cycle,
            face_count,
            genus,
        });
    }
    Ok(out)
}

/// Degree ω = sum of jacket genera, plus the closed-form face count check.
///
/// For 2-colored graphs there are no jackets; a connected 2-colored graph is
/// a single alternating cycle with exactly one face, matching the formula
/// with ω = 0.
pub fn degree(g: &ColoredGraph) -> Result<DegreeReport> {
    let c = g.num_colors();
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let (omega, jacket_genera) = if c == 2 {
        (0u64, Vec::new())
    } else {
        let js = jackets(g)?;
        let genera: Vec<u64> = js.iter().map(|j| j.genus).collect();
        (genera.iter().sum(), genera)
    };
    let face_total = g.total_faces();
    let formula = face_formula(c, g.p(), omega)?;
    if formula != face_total {
        return Err(Error::FormulaMismatch {
            counted: face_total,
            formula: formula.to_string(),
        });
    }
    Ok(DegreeReport {
        omega,
        jacket_genera,
        face_total,
        formula_face_total: formula,
    })
}

/// `F = (c-1)(c-2)/2 · p + (c-1) - 2ω/(c-2)!` as an exact integer.
fn face_formula(c: usize, p: usize, omega: u64) -> Result<usize> {
    let base = (c - 1) * (c - 2) / 2 * p + (c - 1);
    let denom = factorial(c - 2);
    if (2 * omega) % denom != 0 {
        return Err(Error::FormulaMismatch {
            counted: 0,
            formula: format!("2ω = {} not divisible by (c-2)! = {}", 2 * omega, denom),
        });
    }
    let correction = (2 * omega / denom) as usize;
    if correction > base {
        return Err(Error::FormulaMismatch {
            counted: 0,
            formula: format!("negative face count from ω = {}", omega),
        });
    }
    Ok(base - correction)
}

/// Face count of a trivalent ribbon graph (a 3-colored graph, its own unique
/// jacket), asserting `F = p + 2 - 2g` for the claimed genus.
pub fn ribbon_face_check(g: &ColoredGraph, genus: u64) -> Result<usize> {
    if g.num_colors() != 3 {
        return Err(Error::NotRibbon {
            got: g.num_colors(),
        });
    }
    let report = degree(g)?;
    let expected = g.p() as i64 + 2 - 2 * genus as i64;
    if report.face_total as i64 != expected {
        return Err(Error::FormulaMismatch {
            counted: report.face_total,
            formula: format!("p + 2 - 2g = {}", expected),
        });
    }
    Ok(report.face_total)
}

/// Large-N exponent of a closed connected (D+1)-colored graph:
/// `D - 2ω/(D-1)!`, exact.
pub fn amplitude_exponent(g: &ColoredGraph, d: usize) -> Result<AmplitudeExponent> {
    if g.num_colors() != d + 1 {
        return Err(Error::ColorCountMismatch {
            expected: d + 1,
            got: g.num_colors(),
        });
    }
    let omega = degree(g)?.omega;
    Ok(exponent_from_degree(d, omega))
}

/// `D - 2ω/(D-1)!` for a given degree.
pub fn exponent_from_degree(d: usize, omega: u64) -> AmplitudeExponent {
    let value = Ratio::new(d as i64, 1)
        - Ratio::new(2 * omega as i64, factorial(d - 1) as i64);
    AmplitudeExponent(value)
}

/// The connected subgraphs with colors `1..=D` of a (D+1)-colored graph,
/// in order of their smallest white vertex: the effective vertices of the
/// Feynman expansion.
pub fn bubbles(g: &ColoredGraph) -> Result<Vec<ColoredGraph>> {
    let c = g.num_colors();
    if c < 3 {
        return Err(Error::TooFewColors { got: c });
    }
    let interaction = ColoredGraph::from_perms(g.perms()[1..].to_vec());
    let components = interaction.white_components();
    let mut out = Vec::with_capacity(components.len());
    for members in components {
        out.push(interaction.restriction(&members));
    }
    Ok(out)
}

/// Loop-counted exponent of a closed (D+1)-colored graph from its bubble
/// degrees: one factor of N per face with colors `{0,i}`, a factor
/// `N^{-(D-1)}` per color-0 line, and the bubble scaling
/// `N^{(D-1) - 2ω(B)/(D-2)!}` per effective vertex.
///
/// `bubble_degrees` must list ω(B) for the bubbles in `bubbles(g)` order.
/// This is the independent route against which the degree route is checked;
/// it also applies to disconnected graphs (the exponent is then additive over
/// components).
pub fn amplitude_exponent_bruteforce(
    g: &ColoredGraph,
    d: usize,
    bubble_degrees: &[u64],
) -> Result<AmplitudeExponent> {
    if g.num_colors() != d + 1 {
        return Err(Error::ColorCountMismatch {
            expected: d + 1,
            got: g.num_colors(),
        });
    }
    let n_bubbles = bubbles(g)?.len();
    if bubble_degrees.len() != n_bubbles {
        return Err(Error::InconsistentSize {
            detail: format!(
                "{} bubble degrees supplied for {} bubbles",
                bubble_degrees.len(),
                n_bubbles
            ),
        });
    }
    let mut free_sums = 0i64;
    for i in 1..=d {
        free_sums += g.face_count(0, i)? as i64;
    }
    let propagators = Ratio::new((d as i64 - 1) * g.p() as i64, 1);
    let mut vertex_scalings = Ratio::new(0i64, 1);
    let dm2_fact = factorial(d.saturating_sub(2)) as i64;
    for &omega_b in bubble_degrees {
        vertex_scalings +=
            Ratio::new(d as i64 - 1, 1) - Ratio::new(2 * omega_b as i64, dm2_fact);
    }
    Ok(AmplitudeExponent(
        Ratio::new(free_sums, 1) - propagators + vertex_scalings,
    ))
}

/// Convenience wrapper: compute the bubble degrees with [`degree`] and feed
/// them to the loop-counted route.
pub fn amplitude_exponent_via_bubbles(g: &ColoredGraph, d: usize) -> Result<AmplitudeExponent> {
    let degs: Vec<u64> = bubbles(g)?
        .iter()
        .map(|b| degree(b).map(|r| r.omega))
        .collect::<Result<_>>()?;
    amplitude_exponent_bruteforce(g, d, &degs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dipole;

    fn g4(a: [usize; 2], b: [usize; 2], c: [usize; 2], d: [usize; 2]) -> ColoredGraph {
        ColoredGraph::new(4, vec![a.to_vec(), b.to_vec(), c.to_vec(), d.to_vec()]).unwrap()
    }

    const ID: [usize; 2] = [0, 1];
    const SW: [usize; 2] = [1, 0];

    fn six_vertex_bubble() -> ColoredGraph {
        ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]]).unwrap()
    }

    #[test]
    fn jacket_count_and_order() {
        let cycles = color_cycles(4);
        assert_eq!(
            cycles,
            vec![vec![0, 1, 2, 3], vec![0, 1, 3, 2], vec![0, 2, 1, 3]]
        );
        assert_eq!(color_cycles(5).len(), 12);
    }

    #[test]
    fn dipole_jackets_are_planar() {
        let js = jackets(&dipole(4)).unwrap();
        assert_eq!(js.len(), 3);
        for j in &js {
            assert_eq!(j.face_count, 4);
            assert_eq!(j.genus, 0);
        }
    }

    #[test]
    fn three_color_graph_is_its_own_jacket() {
        let js = jackets(&six_vertex_bubble()).unwrap();
        assert_eq!(js.len(), 1);
        assert_eq!(js[0].face_count, 3);
        assert_eq!(js[0].genus, 1);
    }

    #[test]
    fn mixed_graph_jacket_genera() {
        let g = g4(ID, SW, SW, ID);
        let js = jackets(&g).unwrap();
        let genera: Vec<u64> = js.iter().map(|j| j.genus).collect();
        assert_eq!(genera, vec![0, 1, 0]);
        let sums: Vec<usize> = js.iter().map(|j| j.face_count).collect();
        assert_eq!(sums, vec![6, 4, 6]);
    }

    #[test]
    fn degree_fixtures() {
        assert_eq!(degree(&dipole(4)).unwrap().omega, 0);
        let r = degree(&six_vertex_bubble()).unwrap();
        assert_eq!(r.omega, 1);
        assert_eq!(r.face_total, 3); // p + 2 - 2ω = 3 + 2 - 2
        let r = degree(&g4(ID, SW, SW, ID)).unwrap();
        assert_eq!(r.omega, 1);
        assert_eq!(r.face_total, 8); // 3p + 3 - ω = 6 + 3 - 1
    }

    #[test]
    fn degree_requires_connectivity() {
        let g = ColoredGraph::new(4, vec![SW.to_vec(); 4]).unwrap();
        assert!(matches!(degree(&g), Err(Error::Disconnected)));
    }

    #[test]
    fn two_color_degree_is_zero() {
        let g = ColoredGraph::new(2, vec![SW.to_vec(), ID.to_vec()]).unwrap();
        let r = degree(&g).unwrap();
        assert_eq!(r.omega, 0);
        assert_eq!(r.face_total, 1);
    }

    #[test]
    fn ribbon_face_relation() {
        assert_eq!(ribbon_face_check(&dipole(3), 0).unwrap(), 3);
        assert_eq!(ribbon_face_check(&six_vertex_bubble(), 1).unwrap(), 3);
        let g = ColoredGraph::new(3, vec![ID.to_vec(), SW.to_vec(), SW.to_vec()]).unwrap();
        assert_eq!(ribbon_face_check(&g, 0).unwrap(), 4);
        assert!(matches!(
            ribbon_face_check(&dipole(4), 0),
            Err(Error::NotRibbon { .. })
        ));
        assert!(matches!(
            ribbon_face_check(&six_vertex_bubble(), 0),
            Err(Error::FormulaMismatch { .. })
        ));
    }

    #[test]
    fn amplitude_exponent_fixtures() {
        assert_eq!(
            amplitude_exponent(&dipole(4), 3).unwrap().0,
            Ratio::new(3, 1)
        );
        assert_eq!(
            amplitude_exponent(&g4(ID, SW, SW, ID), 3).unwrap().0,
            Ratio::new(2, 1)
        );
        // D = 2 ribbon case: exponent 2 - 2g
        let torus_like = ColoredGraph::new(
            3,
            vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]],
        )
        .unwrap();
        assert_eq!(
            amplitude_exponent(&torus_like, 2).unwrap().0,
            Ratio::new(0, 1)
        );
        assert!(matches!(
            amplitude_exponent(&dipole(4), 2),
            Err(Error::ColorCountMismatch { .. })
        ));
    }

    #[test]
    fn exponent_display_format() {
        assert_eq!(exponent_from_degree(3, 0).to_string(), "3/1");
        assert_eq!(exponent_from_degree(4, 1).to_string(), "11/3");
    }

    #[test]
    fn matrix_reduction_exhaustive() {
        // 3-colored graphs are the D = 2 case: the degree is the genus of
        // the unique jacket, F = p + 2 - 2g, and the exponent is 2 - 2g
        use itertools::Itertools;
        for p in 1..=3usize {
            for tuple in (0..3)
                .map(|_| crate::perm::all_perms(p).collect::<Vec<_>>())
                .multi_cartesian_product()
            {
                let g = ColoredGraph::from_perms(tuple);
                if !g.is_connected() {
                    continue;
                }
                let report = degree(&g).unwrap();
                assert_eq!(report.jacket_genera.len(), 1);
                assert_eq!(report.omega, report.jacket_genera[0]);
                assert_eq!(ribbon_face_check(&g, report.omega).unwrap(), report.face_total);
                let exponent = amplitude_exponent(&g, 2).unwrap().0;
                assert_eq!(exponent, Ratio::new(2 - 2 * report.omega as i64, 1));
            }
        }
    }

    #[test]
    fn bubble_decomposition() {
        // pillow closed by the identity: one bubble, the pillow itself
        let g = g4(ID, ID, ID, SW);
        let bs = bubbles(&g).unwrap();
        assert_eq!(bs.len(), 1);
        assert_eq!(bs[0].num_colors(), 3);
        assert_eq!(bs[0].p(), 2);
        // dipole: single quadratic bubble
        assert_eq!(bubbles(&dipole(4)).unwrap().len(), 1);
    }

    #[test]
    fn bruteforce_exponent_fixtures() {
        // pillow bubble (id, id, s) closed by σ0 = id: (2+2+1) - 4 + 2 = 3
        let g = g4(ID, ID, ID, SW);
        let e = amplitude_exponent_via_bubbles(&g, 3).unwrap();
        assert_eq!(e.0, Ratio::new(3, 1));
        // same bubble closed by σ0 = s: (1+1+2) - 4 + 2 = 2
        let g = g4(SW, ID, ID, SW);
        let e = amplitude_exponent_via_bubbles(&g, 3).unwrap();
        assert_eq!(e.0, Ratio::new(2, 1));
        // (3+1)-dipole as the closure of the quadratic bubble: (1+1+1) - 2 + 2 = 3
        let e = amplitude_exponent_via_bubbles(&dipole(4), 3).unwrap();
        assert_eq!(e.0, Ratio::new(3, 1));
    }

    #[test]
    fn bruteforce_rejects_wrong_degree_count() {
        assert!(matches!(
            amplitude_exponent_bruteforce(&dipole(4), 3, &[0, 0]),
            Err(Error::InconsistentSize { .. })
        ));
    }
}
