//! Named verification suites: the exhaustive and randomized property checks
//! behind the `verify` subcommand. Each suite returns one line per check and
//! fails with [`Error::CheckFailed`] on the first violated property.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigUint, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::degree::{amplitude_exponent, amplitude_exponent_via_bubbles, degree};
use crate::enumeration::enumerate_bubbles;
use crate::error::{Error, Result};
use crate::graph::{dipole, ColoredGraph};
use crate::melonic::{
    count_colored_trees, count_melons_exhaustive, estimate_critical_point,
    fuss_catalan_closed_form, is_melonic, melons_by_insertion,
};
use crate::perm::{all_perms, factorial};
use crate::series::{
    color_twisted_invariance_deviation, free_energy_series, gaussian_expectation,
    n1_integral_oracle, unitary_invariance_check, BigRational, Coupling, ModelSpec,
    NumericTensor,
};
use crate::topology::{cell_complex, is_manifold};

/// Tunable knobs shared by the suites.
#[derive(Debug, Clone, Copy)]
pub struct SuiteParams {
    pub max_p: usize,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            max_p: 3,
            samples: 200,
            seed: 7,
        }
    }
}

fn fail(msg: String) -> Error {
    Error::CheckFailed(msg)
}

/// All labeled connected 4-colored graphs with the given p, every tuple of
/// permutations enumerated (no quotient).
fn for_each_labeled_connected<F>(p: usize, mut f: F) -> Result<usize>
where
    F: FnMut(&ColoredGraph) -> Result<()>,
{
    use itertools::Itertools;
    let mut count = 0;
    for tuple in (0..4)
        .map(|_| all_perms(p).collect::<Vec<_>>())
        .multi_cartesian_product()
    {
        let g = ColoredGraph::from_perms(tuple);
        if !g.is_connected() {
            continue;
        }
        f(&g)?;
        count += 1;
    }
    Ok(count)
}

/// Degree formula: for every connected 4-colored graph with p ≤ max_p, the
/// direct face count equals `3p + 3 - ω` with ω the sum of jacket genera.
pub fn suite_degree_formula(params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for p in 1..=params.max_p {
        let n = for_each_labeled_connected(p, |g| {
            let report = degree(g)?;
            let expected = 3 * p + 3 - report.omega as usize;
            if report.face_total != expected {
                return Err(fail(format!(
                    "face count {} != 3p+3-ω = {} for {}",
                    report.face_total,
                    expected,
                    g.key()
                )));
            }
            Ok(())
        })?;
        lines.push(format!(
            "ok degree-formula p={}: {} labeled connected graphs, F = 3p + 3 - ω with ω ≥ 0",
            p, n
        ));
    }
    Ok(lines)
}

/// Amplitude theorem: degree route equals loop-counting route on every
/// connected 4-colored graph with p ≤ max_p, then on random graphs up to
/// p = 6.
pub fn suite_theorem2(params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for p in 1..=params.max_p {
        let n = for_each_labeled_connected(p, |g| {
            let via_degree = amplitude_exponent(g, 3)?;
            let via_loops = amplitude_exponent_via_bubbles(g, 3)?;
            if via_degree != via_loops {
                return Err(fail(format!(
                    "exponent mismatch {} vs {} for {}",
                    via_degree,
                    via_loops,
                    g.key()
                )));
            }
            Ok(())
        })?;
        lines.push(format!(
            "ok theorem2 p={}: {} labeled connected graphs, both exponent routes agree",
            p, n
        ));
    }

    // randomized spot checks at larger p
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut checked = 0;
    let mut graphs = Vec::new();
    while graphs.len() < params.samples {
        let p = 4 + (graphs.len() + checked) % 3; // cycle p = 4, 5, 6
        let mut images = Vec::with_capacity(4);
        for _ in 0..4 {
            let mut v: Vec<usize> = (0..p).collect();
            v.shuffle(&mut rng);
            images.push(v);
        }
        checked += 1;
        let g = ColoredGraph::new(4, images)?;
        if g.is_connected() {
            graphs.push(g);
        }
    }
    let failures: Vec<String> = graphs
        .par_iter()
        .filter_map(|g| {
            let a = amplitude_exponent(g, 3).ok()?;
            let b = amplitude_exponent_via_bubbles(g, 3).ok()?;
            if a != b {
                Some(g.key())
            } else {
                None
            }
        })
        .collect();
    if !failures.is_empty() {
        return Err(fail(format!(
            "random theorem2 mismatches: {}",
            failures.join(", ")
        )));
    }
    lines.push(format!(
        "ok theorem2 random: {} seeded graphs with p in 4..=6 agree",
        graphs.len()
    ));
    Ok(lines)
}

/// Pinned example values.
pub fn suite_fixtures(_params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();

    let report = degree(&dipole(4))?;
    let exponent = amplitude_exponent(&dipole(4), 3)?;
    if report.omega != 0 || exponent.0 != Ratio::new(3, 1) {
        return Err(fail("dipole must have ω = 0 and exponent 3".into()));
    }
    lines.push("ok fixture: (3+1)-dipole has ω = 0 and exponent 3/1".into());

    let bubble =
        ColoredGraph::new(3, vec![vec![0, 2, 1], vec![1, 0, 2], vec![2, 1, 0]])?;
    let report = degree(&bubble)?;
    let surface = crate::topology::bubble_surfaces(&bubble)?;
    if report.omega != 1 || surface.genus != 1 {
        return Err(fail("six-vertex bubble must have ω = 1 and genus 1".into()));
    }
    lines.push("ok fixture: six-vertex 3-colored bubble has ω = 1, surface genus 1".into());

    let catalog = enumerate_bubbles(4, 2)?;
    let mut degrees: Vec<u64> = catalog.classes.iter().map(|e| e.omega).collect();
    degrees.sort_unstable();
    if catalog.classes.len() != 7 || degrees != vec![0, 0, 0, 0, 1, 1, 1] {
        return Err(fail(format!(
            "p=2 census: got {} classes with degrees {:?}",
            catalog.classes.len(),
            degrees
        )));
    }
    lines.push("ok fixture: 7 connected 4-colored classes at p = 2, degrees {0,0,0,0,1,1,1}".into());
    Ok(lines)
}

/// Melonic equivalences and counts.
pub fn suite_melonic(params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for p in 1..=params.max_p {
        let catalog = enumerate_bubbles(4, p)?;
        let filtered: Vec<&ColoredGraph> = catalog
            .classes
            .iter()
            .filter(|e| e.omega == 0)
            .map(|e| &e.graph)
            .collect();
        for class in &catalog.classes {
            if is_melonic(&class.graph)? != (class.omega == 0) {
                return Err(fail(format!(
                    "melonic/degree disagreement on {}",
                    class.graph.key()
                )));
            }
        }
        let inserted = melons_by_insertion(3, p)?;
        let filtered_owned: Vec<ColoredGraph> = filtered.iter().map(|g| (*g).clone()).collect();
        if filtered_owned != inserted {
            return Err(fail(format!(
                "insertion closure differs from degree filter at p = {}",
                p
            )));
        }
        lines.push(format!(
            "ok melonic p={}: reduction ⇔ ω = 0 ⇔ insertion-reachable on {} classes ({} melonic)",
            p,
            catalog.classes.len(),
            filtered.len()
        ));
    }
    let m1 = count_melons_exhaustive(3, 1)?;
    let m2 = count_melons_exhaustive(3, 2)?;
    if m1 != 1 || m2 != 4 {
        return Err(fail(format!("melon counts p=1,2: got {}, {}", m1, m2)));
    }
    let m3 = count_melons_exhaustive(3, 3)?;
    let m3_insertion = melons_by_insertion(3, 3)?.len() as u64;
    if m3 != m3_insertion {
        return Err(fail(format!(
            "melon generators disagree at p=3: {} vs {}",
            m3, m3_insertion
        )));
    }
    lines.push(format!(
        "ok melon counts: p=1 → 1, p=2 → 4, p=3 → {} (both generators)",
        m3
    ));
    Ok(lines)
}

/// Spherical-topology witness: every degree-0 graph has χ = 0 and all link
/// genera zero; every manifold graph has χ = 0.
pub fn suite_topology(params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    for p in 1..=params.max_p {
        let catalog = enumerate_bubbles(4, p)?;
        let mut melonic_count = 0;
        for class in &catalog.classes {
            let cells = cell_complex(&class.graph)?;
            let report = is_manifold(&class.graph)?;
            if class.omega == 0 {
                melonic_count += 1;
                if cells.chi != 0 || !report.is_manifold {
                    return Err(fail(format!(
                        "degree-0 class {} has χ = {} manifold = {}",
                        class.graph.key(),
                        cells.chi,
                        report.is_manifold
                    )));
                }
            }
            if report.is_manifold && cells.chi != 0 {
                return Err(fail(format!(
                    "manifold class {} has χ = {}",
                    class.graph.key(),
                    cells.chi
                )));
            }
            if cells.c2 != 4 * p || cells.c3 != 2 * p {
                return Err(fail(format!("cell counts off for {}", class.graph.key())));
            }
        }
        lines.push(format!(
            "ok topology p={}: {} degree-0 classes all have χ = 0 and spherical links",
            p, melonic_count
        ));
    }
    Ok(lines)
}

/// Series coefficients against the independent oracles.
pub fn suite_series(_params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let pillow = ColoredGraph::new(3, vec![vec![0, 1], vec![0, 1], vec![1, 0]])?;
    let model = ModelSpec::new(
        3,
        vec![Coupling {
            bubble: pillow.clone(),
            label: "pillow".into(),
        }],
    )?;

    let table = free_energy_series(&model, 3, true)?;
    let symbolic = table.blocks[0].coefficient.to_string();
    if symbolic != "N^3 + N^2" {
        return Err(fail(format!("order-1 coefficient is {}", symbolic)));
    }
    lines.push("ok series: order-1 coefficient is N^3 + N^2".into());

    let n1: Vec<BigRational> = table
        .n1_coefficients()
        .into_iter()
        .map(|(_, v)| v)
        .collect();
    let oracle = n1_integral_oracle(&model, 3)?;
    let expected: Vec<BigRational> = vec![
        BigRational::from(BigInt::from(2)),
        BigRational::from(BigInt::from(-10)),
        BigRational::new(BigInt::from(296), BigInt::from(3)),
    ];
    if n1 != expected || oracle != expected {
        return Err(fail(format!(
            "N=1 coefficients: series {:?}, oracle {:?}",
            n1, oracle
        )));
    }
    lines.push("ok series: N=1 coefficients 2, -10, 296/3 match the integral oracle".into());

    let poly = gaussian_expectation(&pillow, 3)?;
    if poly.to_string() != "N + 1" {
        return Err(fail(format!("gaussian_expectation(pillow) = {}", poly)));
    }
    lines.push("ok gaussian: pillow expectation is N + 1".into());

    for p in 1..=4 {
        let catalog = enumerate_bubbles(3, p)?;
        for class in &catalog.classes {
            let value = gaussian_expectation(&class.graph, 3)?.eval_one();
            if value != BigRational::from(BigInt::from(factorial(p))) {
                return Err(fail(format!(
                    "gaussian at N=1 for {} is {}",
                    class.graph.key(),
                    value
                )));
            }
        }
    }
    lines.push("ok gaussian: N=1 expectation equals p! for every bubble with p ≤ 4".into());

    // Theorem 2 used end to end in the ledger
    for block in &table.blocks {
        for entry in &block.ledger {
            let theorem = amplitude_exponent(&entry.graph, 3)?.0;
            if entry.exponent != theorem {
                return Err(fail(format!(
                    "ledger exponent {} != theorem {} for {}",
                    entry.exponent, theorem, entry.class_key
                )));
            }
        }
        let leading = block
            .coefficient
            .leading_exponent()
            .ok_or_else(|| fail("empty coefficient".into()))?;
        for entry in &block.ledger {
            if entry.exponent == leading && entry.omega != Some(0) {
                return Err(fail(format!(
                    "leading order carried by non-melonic class {}",
                    entry.class_key
                )));
            }
        }
    }
    lines.push("ok series ledger: exponents match the amplitude theorem; leading order is melonic".into());
    Ok(lines)
}

/// Tree counts and the critical-point estimate.
pub fn suite_criticality(_params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let expected = [1u64, 4, 22, 140];
    for (p, &want) in (1..=4).zip(&expected) {
        let recurrence = count_colored_trees(3, p);
        let closed = fuss_catalan_closed_form(3, p);
        if recurrence != BigUint::from(want) || closed != recurrence {
            return Err(fail(format!(
                "tree count p={}: recurrence {} closed form {}",
                p, recurrence, closed
            )));
        }
    }
    lines.push("ok trees: counts 1, 4, 22, 140 for p = 1..4, recurrence = closed form".into());

    let est = estimate_critical_point(3, 40)?;
    let target = Ratio::new(BigInt::from(27), BigInt::from(256));
    let estimate = est.estimate();
    let relative = ((&estimate - &target) / &target).abs();
    if !est.contains(&target) || relative > Ratio::new(BigInt::from(1), BigInt::from(20)) {
        return Err(fail(format!(
            "critical estimate [{}, {}] vs 27/256",
            est.lower, est.upper
        )));
    }
    lines.push(format!(
        "ok criticality: estimate within 5% of 27/256 (interval width {})",
        (&est.upper - &est.lower)
    ));
    Ok(lines)
}

/// Unitary invariance of the numeric contraction plus its negative control.
pub fn suite_unitary(params: SuiteParams) -> Result<Vec<String>> {
    let mut lines = Vec::new();
    let t = NumericTensor::random(3, 2, params.seed);
    let pillow = ColoredGraph::new(3, vec![vec![0, 1], vec![0, 1], vec![1, 0]])?;
    for bubble in [dipole(3), pillow.clone()] {
        let dev = unitary_invariance_check(&bubble, &t, 10, params.seed + 1)?;
        if dev > 1e-10 {
            return Err(fail(format!(
                "invariance deviation {} for {}",
                dev,
                bubble.key()
            )));
        }
    }
    lines.push("ok unitary: invariant to 1e-10 over 10 Haar trials at N = 2".into());
    let dev = color_twisted_invariance_deviation(&pillow, &t, 10, params.seed + 1)?;
    if dev <= 1e-6 {
        return Err(fail(format!("negative control deviated only {}", dev)));
    }
    lines.push(format!(
        "ok unitary negative control: color-breaking contraction deviates by {:.3e}",
        dev
    ));
    Ok(lines)
}

/// Every suite in order.
pub fn run_suite(name: &str, params: SuiteParams) -> Result<Vec<String>> {
    match name {
        "degree-formula" => suite_degree_formula(params),
        "theorem2" => suite_theorem2(params),
        "fixtures" => suite_fixtures(params),
        "melonic" => suite_melonic(params),
        "topology" => suite_topology(params),
        "series" => suite_series(params),
        "criticality" => suite_criticality(params),
        "unitary" => suite_unitary(params),
        "all" => {
            let mut lines = Vec::new();
            for suite in SUITES {
                lines.extend(run_suite(suite, params)?);
            }
            Ok(lines)
        }
        other => Err(Error::Parse(format!(
            "unknown suite '{}'; available: {}, all",
            other,
            SUITES.join(", ")
        ))),
    }
}

/// The individual suite names, in `all` execution order.
pub const SUITES: &[&str] = &[
    "degree-formula",
    "theorem2",
    "fixtures",
    "melonic",
    "topology",
    "series",
    "criticality",
    "unitary",
];
