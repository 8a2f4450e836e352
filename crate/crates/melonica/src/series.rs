//! Exact perturbative series and their independent oracles.
//!
//! The free energy is computed from labeled Wick contractions: every pairing
//! σ0 of white to black vertices is enumerated, its power of N read off by
//! loop counting (one factor of N per face with colors {0,i}, `N^{-(D-1)}`
//! per pairing line, and the per-bubble scaling `N^{(D-1) - 2ω(B)/(D-2)!}`),
//! and only connected closures enter the free energy. Symmetry factors never
//! enter as inputs: the `1/n!` of the exponential and the labeled
//! multiplicities are exact by construction, and automorphism orders are
//! reported in the ledger for cross-checking only.
//!
//! Signs follow the labeled expansion of `exp(-Σ t_B N^{...} Tr_B)`: the
//! coefficient of `Π t_B^{n_B}` in F carries `(-1)^(order+1)`.

use std::collections::{BTreeMap, HashMap};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::Ratio;
use num::{One, Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Deserialize;

use crate::degree::{amplitude_exponent_bruteforce, degree};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, GraphDoc};
use crate::guard;
use crate::perm::{all_perms, factorial};

pub type BigRational = Ratio<BigInt>;

/// Exact polynomial in N with rational exponents: `terms[e]` is the
/// coefficient of `N^e`. Exponents may be negative.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NPolynomial {
    pub terms: BTreeMap<Ratio<i64>, BigRational>,
}

impl NPolynomial {
    pub fn zero() -> Self {
        NPolynomial::default()
    }

    pub fn add_term(&mut self, exponent: Ratio<i64>, coefficient: BigRational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self
            .terms
            .entry(exponent)
            .or_insert_with(BigRational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn add(&mut self, other: &NPolynomial) {
        for (&e, c) in &other.terms {
            self.add_term(e, c.clone());
        }
    }

    pub fn scaled(&self, factor: &BigRational) -> NPolynomial {
        let mut out = NPolynomial::zero();
        for (&e, c) in &self.terms {
            out.add_term(e, c * factor);
        }
        out
    }

    pub fn mul(&self, other: &NPolynomial) -> NPolynomial {
        let mut out = NPolynomial::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    /// Value at N = 1: the sum of all coefficients.
    pub fn eval_one(&self) -> BigRational {
        self.terms.values().cloned().sum()
    }

    /// Largest exponent present.
    pub fn leading_exponent(&self) -> Option<Ratio<i64>> {
        self.terms.keys().next_back().copied()
    }

    pub fn to_json_map(&self) -> BTreeMap<String, String> {
        self.terms
            .iter()
            .map(|(e, c)| (format!("{}/{}", e.numer(), e.denom()), c.to_string()))
            .collect()
    }
}

impl std::fmt::Display for NPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in self.terms.iter().rev() {
            let (sign, mag) = if c.is_negative() {
                ("-", -c.clone())
            } else {
                ("+", c.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
                first = false;
            } else {
                write!(f, " {} ", sign)?;
            }
            let coeff_is_one = mag.is_one();
            if e.is_zero() {
                write!(f, "{}", mag)?;
            } else {
                if !coeff_is_one {
                    write!(f, "{}*", mag)?;
                }
                if e.is_one() {
                    write!(f, "N")?;
                } else if e.is_integer() {
                    write!(f, "N^{}", e.numer())?;
                } else {
                    write!(f, "N^({}/{})", e.numer(), e.denom())?;
                }
            }
        }
        Ok(())
    }
}

/// One interaction term: a connected bubble and its coupling label.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub bubble: ColoredGraph,
    pub label: String,
}

/// A single-trace model: rank D plus coupling bubbles. The quadratic term is
/// implicit and must not be listed.
#[derive(Debug, Clone)]
pub struct ModelSpec {
    pub d: usize,
    pub couplings: Vec<Coupling>,
}

impl ModelSpec {
    pub fn new(d: usize, couplings: Vec<Coupling>) -> Result<Self> {
        if d < 2 {
            return Err(Error::UnsupportedRank {
                d,
                why: "models need rank at least 2".into(),
            });
        }
        for coupling in &couplings {
            if coupling.bubble.num_colors() != d {
                return Err(Error::ColorCountMismatch {
                    expected: d,
                    got: coupling.bubble.num_colors(),
                });
            }
            if !coupling.bubble.is_connected() {
                return Err(Error::Disconnected);
            }
            if coupling.bubble.p() == 1 {
                return Err(Error::InconsistentSize {
                    detail: format!(
                        "coupling '{}' is the quadratic bubble, which is implicit",
                        coupling.label
                    ),
                });
            }
        }
        Ok(ModelSpec { d, couplings })
    }

    /// Parse a model file. Couplings are either inline graph documents or
    /// `{"id": k}` references into the catalog file named at top level;
    /// `resolve` turns the catalog path into its contents.
    pub fn from_json(
        text: &str,
        resolve: impl Fn(&str) -> Result<String>,
    ) -> Result<ModelSpec> {
        #[derive(Deserialize)]
        struct CouplingDoc {
            id: Option<usize>,
            graph: Option<GraphDoc>,
            label: Option<String>,
        }
        #[derive(Deserialize)]
        struct ModelDoc {
            #[serde(rename = "D")]
            d: usize,
            catalog: Option<String>,
            couplings: Vec<CouplingDoc>,
        }
        let doc: ModelDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let catalog_graphs = match &doc.catalog {
            Some(path) => crate::enumeration::BubbleCatalog::graphs_from_json(&resolve(path)?)?,
            None => Vec::new(),
        };
        let mut couplings = Vec::new();
        for (idx, c) in doc.couplings.into_iter().enumerate() {
            let bubble = match (c.id, c.graph) {
                (Some(id), None) => catalog_graphs
                    .get(id)
                    .cloned()
                    .ok_or_else(|| Error::Parse(format!("catalog id {} out of range", id)))?,
                (None, Some(g)) => g.try_into()?,
                _ => {
                    return Err(Error::Parse(format!(
                        "coupling {} must have exactly one of 'id' or 'graph'",
                        idx
                    )))
                }
            };
            couplings.push(Coupling {
                bubble,
                label: c.label.unwrap_or_else(|| format!("t{}", idx)),
            });
        }
        ModelSpec::new(doc.d, couplings)
    }
}

/// Gaussian expectation of the invariant of a connected bubble: the sum over
/// all pairings σ0 of `N^(Σ_i F_{0i} - (D-1)p)`, exact in N.
pub fn gaussian_expectation(bubble: &ColoredGraph, d: usize) -> Result<NPolynomial> {
    if bubble.num_colors() != d {
        return Err(Error::ColorCountMismatch {
            expected: d,
            got: bubble.num_colors(),
        });
    }
    if !bubble.is_connected() {
        return Err(Error::Disconnected);
    }
    let p = bubble.p();
    guard::check("p", p, 5)?;
    let mut poly = NPolynomial::zero();
    for sigma in all_perms(p) {
        let mut images = Vec::with_capacity(d + 1);
        images.push(sigma.images().to_vec());
        for color in 0..d {
            images.push(bubble.perm(color).images().to_vec());
        }
        let g = ColoredGraph::new(d + 1, images)?;
        let mut exponent = -((d as i64 - 1) * p as i64);
        for i in 1..=d {
            exponent += g.face_count(0, i)? as i64;
        }
        poly.add_term(Ratio::from(exponent), BigRational::one());
    }
    Ok(poly)
}

/// One class contribution in a series block.
#[derive(Debug, Clone)]
pub struct LedgerEntry {
    /// Canonical representative of the closure class.
    pub graph: ColoredGraph,
    pub class_key: String,
    pub multiplicity: u64,
    /// `(-1)^order`, the sign attached to the product of couplings.
    pub sign: i64,
    pub exponent: Ratio<i64>,
    pub aut_order: u64,
    /// Degree of the class, present for connected closures.
    pub omega: Option<u64>,
    pub connected: bool,
}

/// All contributions at one multi-degree in the couplings.
#[derive(Debug, Clone)]
pub struct OrderBlock {
    /// Copies of each coupling bubble, in model order.
    pub multi_degree: Vec<usize>,
    /// Total number of effective vertices Σ multi_degree.
    pub order: usize,
    /// Coefficient of `Π t_B^{n_B}` as an exact polynomial in N.
    pub coefficient: NPolynomial,
    pub ledger: Vec<LedgerEntry>,
}

/// The series, order by order. With `connected_only` the table is the free
/// energy F; without it, the partition-function expansion Z (used by the
/// logarithm cross-check).
#[derive(Debug, Clone)]
pub struct SeriesTable {
    pub d: usize,
    pub connected_only: bool,
    pub blocks: Vec<OrderBlock>,
}

impl SeriesTable {
    /// CSV with one row per ledger entry:
    /// `order,N_exponent,coefficient,class_id,multiplicity`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("order,N_exponent,coefficient,class_id,multiplicity\n");
        for block in &self.blocks {
            for entry in &block.ledger {
                let prefactor = block_prefactor(block.order, &block.multi_degree, self.connected_only);
                let coeff = prefactor * BigRational::from(BigInt::from(entry.multiplicity));
                out.push_str(&format!(
                    "{},{}/{},{},\"{}\",{}\n",
                    block.order,
                    entry.exponent.numer(),
                    entry.exponent.denom(),
                    coeff,
                    entry.class_key,
                    entry.multiplicity
                ));
            }
        }
        out
    }

    /// Coefficients at N = 1 for single-coupling models, by order.
    pub fn n1_coefficients(&self) -> Vec<(usize, BigRational)> {
        self.blocks
            .iter()
            .map(|b| (b.order, b.coefficient.eval_one()))
            .collect()
    }
}

fn block_prefactor(order: usize, multi_degree: &[usize], connected_only: bool) -> BigRational {
    let mut denom = BigInt::one();
    for &n in multi_degree {
        denom *= BigInt::from(factorial(n));
    }
    let flips = if connected_only { order + 1 } else { order };
    let sign = if flips % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    };
    BigRational::new(sign, denom)
}

fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=total {
        for mut rest in compositions(total - first, parts - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Labeled perturbative series of the model up to `max_order` effective
/// vertices, with exact coefficients and a per-class ledger.
pub fn free_energy_series(
    model: &ModelSpec,
    max_order: usize,
    connected_only: bool,
) -> Result<SeriesTable> {
    if model.couplings.is_empty() {
        return Ok(SeriesTable {
            d: model.d,
            connected_only,
            blocks: Vec::new(),
        });
    }
    let coupling_degrees: Vec<u64> = model
        .couplings
        .iter()
        .map(|c| degree(&c.bubble).map(|r| r.omega))
        .collect::<Result<_>>()?;

    let mut blocks = Vec::new();
    for order in 1..=max_order {
        for multi_degree in compositions(order, model.couplings.len()) {
            let total_whites: usize = multi_degree
                .iter()
                .zip(&model.couplings)
                .map(|(&n, c)| n * c.bubble.p())
                .sum();
            guard::check("total vertices / 2", total_whites, 6)?;

            let mut expanded: Vec<&ColoredGraph> = Vec::new();
            let mut expanded_degrees: Vec<u64> = Vec::new();
            for (idx, &n) in multi_degree.iter().enumerate() {
                for _ in 0..n {
                    expanded.push(&model.couplings[idx].bubble);
                    expanded_degrees.push(coupling_degrees[idx]);
                }
            }
            let d = model.d;
            let mut union_images = vec![Vec::with_capacity(total_whites); d];
            let mut offset = 0;
            for b in &expanded {
                for (color, image_list) in union_images.iter_mut().enumerate() {
                    image_list.extend(b.perm(color).images().iter().map(|&v| v + offset));
                }
                offset += b.p();
            }

            let mut class_data: HashMap<ColoredGraph, (u64, Ratio<i64>, bool)> = HashMap::new();
            for sigma in all_perms(total_whites) {
                let mut images = Vec::with_capacity(d + 1);
                images.push(sigma.images().to_vec());
                images.extend(union_images.iter().cloned());
                let g = ColoredGraph::new(d + 1, images)?;
                let connected = g.is_connected();
                if connected_only && !connected {
                    continue;
                }
                let exponent = amplitude_exponent_bruteforce(&g, d, &expanded_degrees)?.0;
                let rep = g.canonical_form().graph;
                let entry = class_data.entry(rep).or_insert((0, exponent, connected));
                entry.0 += 1;
                debug_assert_eq!(entry.1, exponent, "exponent must be class-invariant");
            }

            let sign = if order % 2 == 0 { 1 } else { -1 };
            let mut ledger: Vec<(ColoredGraph, LedgerEntry)> = class_data
                .into_iter()
                .map(|(rep, (multiplicity, exponent, connected))| {
                    let omega = if connected {
                        Some(degree(&rep)?.omega)
                    } else {
                        None
                    };
                    let aut_order = rep.automorphism_order();
                    let entry = LedgerEntry {
                        class_key: rep.key(),
                        graph: rep.clone(),
                        multiplicity,
                        sign,
                        exponent,
                        aut_order,
                        omega,
                        connected,
                    };
                    Ok((rep, entry))
                })
                .collect::<Result<_>>()?;
            ledger.sort_by(|a, b| a.0.cmp(&b.0));
            let ledger: Vec<LedgerEntry> = ledger.into_iter().map(|(_, e)| e).collect();

            let prefactor = block_prefactor(order, &multi_degree, connected_only);
            let mut coefficient = NPolynomial::zero();
            for entry in &ledger {
                coefficient.add_term(
                    entry.exponent,
                    &prefactor * BigRational::from(BigInt::from(entry.multiplicity)),
                );
            }

            blocks.push(OrderBlock {
                multi_degree,
                order,
                coefficient,
                ledger,
            });
        }
    }
    Ok(SeriesTable {
        d: model.d,
        connected_only,
        blocks,
    })
}

/// Exact N=1 series of -ln Z for a single quartic coupling at rank 3, from
/// the one-dimensional integral `Z(t) = ∫ exp(-u - t u²) du`: the moments
/// give `Z = Σ_k (-t)^k (2k)!/k!`, and the formal logarithm is taken term by
/// term. This is the independent oracle for the labeled Wick expansion.
pub fn n1_integral_oracle(model: &ModelSpec, max_order: usize) -> Result<Vec<BigRational>> {
    if model.d != 3 || model.couplings.len() != 1 || model.couplings[0].bubble.p() != 2 {
        return Err(Error::UnsupportedRank {
            d: model.d,
            why: "the N=1 integral oracle covers a single quartic coupling at rank 3".into(),
        });
    }
    Ok(n1_log_moment_series(max_order))
}

/// Coefficients of `-ln Σ_k (-t)^k (2k)!/k!` for orders `1..=max_order`.
pub fn n1_log_moment_series(max_order: usize) -> Vec<BigRational> {
    // z[k] = (-1)^k (2k)!/k! for k ≥ 1
    let mut z = vec![BigRational::zero(); max_order + 1];
    for (k, slot) in z.iter_mut().enumerate().skip(1) {
        let mut v = BigInt::one();
        for i in (k + 1)..=(2 * k) {
            v *= BigInt::from(i);
        }
        let value = BigRational::from(v);
        *slot = if k % 2 == 0 { value } else { -value };
    }
    // -ln(1 + x) = Σ_{m≥1} (-1)^m x^m / m, truncated convolution powers
    let mut result = vec![BigRational::zero(); max_order + 1];
    let mut power = vec![BigRational::zero(); max_order + 1];
    power[0] = BigRational::one(); // x^0
    for m in 1..=max_order {
        // power ← power * x, truncated
        let mut next = vec![BigRational::zero(); max_order + 1];
        for (i, a) in power.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in z.iter().enumerate().skip(1) {
                if i + j > max_order {
                    break;
                }
                next[i + j] += a * b;
            }
        }
        power = next;
        let sign = if m % 2 == 0 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        let inv_m = BigRational::new(BigInt::one(), BigInt::from(m));
        for (slot, p) in result.iter_mut().zip(&power) {
            *slot += &sign * &inv_m * p;
        }
    }
    result.drain(1..).collect()
}

// --- numeric tensors ----------------------------------------------------

/// A dense complex tensor of rank `d` with every index running over `1..=n`.
#[derive(Debug, Clone)]
pub struct NumericTensor {
    pub d: usize,
    pub n: usize,
    pub entries: Vec<Complex64>,
}

impl NumericTensor {
    pub fn from_entries(d: usize, n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != n.pow(d as u32) {
            return Err(Error::InconsistentSize {
                detail: format!(
                    "rank-{} tensor with n = {} needs {} entries, got {}",
                    d,
                    n,
                    n.pow(d as u32),
                    entries.len()
                ),
            });
        }
        Ok(NumericTensor { d, n, entries })
    }

    /// Seeded standard complex Gaussian entries.
    pub fn random(d: usize, n: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = StandardNormal;
        let entries = (0..n.pow(d as u32))
            .map(|_| {
                let re: f64 = normal.sample(&mut rng);
                let im: f64 = normal.sample(&mut rng);
                Complex64::new(re, im)
            })
            .collect();
        NumericTensor { d, n, entries }
    }

    fn flat(&self, idx: &[usize]) -> usize {
        let mut f = 0;
        for &i in idx {
            f = f * self.n + i;
        }
        f
    }

    pub fn get(&self, idx: &[usize]) -> Complex64 {
        self.entries[self.flat(idx)]
    }

    /// Apply one unitary per color slot: `T'_a = Σ_n Π_i U[i][a_i][n_i] T_n`.
    pub fn transform(&self, unitaries: &[Vec<Vec<Complex64>>]) -> NumericTensor {
        assert_eq!(unitaries.len(), self.d);
        let size = self.entries.len();
        let mut out = vec![Complex64::new(0.0, 0.0); size];
        let mut a_idx = vec![0usize; self.d];
        for (a_flat, slot) in out.iter_mut().enumerate() {
            decompose(a_flat, self.n, &mut a_idx);
            let mut n_idx = vec![0usize; self.d];
            for n_flat in 0..size {
                decompose(n_flat, self.n, &mut n_idx);
                let mut factor = self.entries[n_flat];
                for (i, u) in unitaries.iter().enumerate() {
                    factor *= u[a_idx[i]][n_idx[i]];
                }
                *slot += factor;
            }
        }
        NumericTensor {
            d: self.d,
            n: self.n,
            entries: out,
        }
    }
}

fn decompose(mut flat: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = flat % n;
        flat /= n;
    }
}

/// Evaluate the invariant of `bubble` on `(T, conj T)` by summing over one
/// free index per line.
pub fn numeric_invariant_eval(bubble: &ColoredGraph, t: &NumericTensor) -> Result<Complex64> {
    eval_with_twist(bubble, t, false)
}

/// Same contraction but with the color-0 and color-1 index slots of black
/// vertex 0 exchanged: a deliberately color-breaking contraction used as the
/// negative control for the invariance check.
pub fn color_twisted_eval(bubble: &ColoredGraph, t: &NumericTensor) -> Result<Complex64> {
    eval_with_twist(bubble, t, true)
}

fn eval_with_twist(bubble: &ColoredGraph, t: &NumericTensor, twist: bool) -> Result<Complex64> {
    let d = bubble.num_colors();
    if d != t.d {
        return Err(Error::RankMismatch {
            bubble: d,
            tensor: t.d,
        });
    }
    let p = bubble.p();
    guard::check("p", p, 3)?;
    guard::check("N", t.n, 3)?;

    // one summation index per line (white, color)
    let lines = d * p;
    let line_idx = |w: usize, c: usize| w * d + c;
    let inverses: Vec<_> = (0..d).map(|c| bubble.perm(c).inverse()).collect();

    let mut total = Complex64::new(0.0, 0.0);
    let mut assignment = vec![0usize; lines];
    loop {
        let mut product = Complex64::new(1.0, 0.0);
        for w in 0..p {
            let idx: Vec<usize> = (0..d).map(|c| assignment[line_idx(w, c)]).collect();
            product *= t.get(&idx);
        }
        for b in 0..p {
            let mut idx: Vec<usize> = (0..d)
                .map(|c| assignment[line_idx(inverses[c].apply(b), c)])
                .collect();
            if twist && b == 0 {
                idx.swap(0, 1);
            }
            product *= t.get(&idx).conj();
        }
        total += product;

        // odometer over all line indices
        let mut pos = 0;
        loop {
            if pos == lines {
                return Ok(total);
            }
            assignment[pos] += 1;
            if assignment[pos] < t.n {
                break;
            }
            assignment[pos] = 0;
            pos += 1;
        }
    }
}

/// Draw a Haar-distributed `n × n` unitary via Gram-Schmidt on a complex
/// Gaussian matrix.
pub fn haar_unitary(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<Complex64>> {
    let normal = StandardNormal;
    let mut columns: Vec<Vec<Complex64>> = (0..n)
        .map(|_| {
            (0..n)
                .map(|_| {
                    let re: f64 = normal.sample(rng);
                    let im: f64 = normal.sample(rng);
                    Complex64::new(re, im)
                })
                .collect()
        })
        .collect();
    for k in 0..n {
        for j in 0..k {
            let proj: Complex64 = (0..n)
                .map(|i| columns[j][i].conj() * columns[k][i])
                .sum();
            for i in 0..n {
                let adjust = proj * columns[j][i];
                columns[k][i] -= adjust;
            }
        }
        let norm: f64 = columns[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in columns[k].iter_mut() {
            *z /= norm;
        }
    }
    // store as rows: U[a][b]
    (0..n)
        .map(|a| (0..n).map(|b| columns[b][a]).collect())
        .collect()
}

fn invariance_deviation(
    bubble: &ColoredGraph,
    t: &NumericTensor,
    trials: usize,
    seed: u64,
    twist: bool,
) -> Result<f64> {
    let base = eval_with_twist(bubble, t, twist)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_dev: f64 = 0.0;
    for _ in 0..trials {
        let unitaries: Vec<_> = (0..t.d).map(|_| haar_unitary(t.n, &mut rng)).collect();
        let transformed = t.transform(&unitaries);
        let value = eval_with_twist(bubble, &transformed, twist)?;
        max_dev = max_dev.max((value - base).norm());
    }
    Ok(max_dev)
}

/// Maximum deviation of the invariant under `trials` independent tuples of
/// Haar-random unitaries, one per color slot. Structurally zero; the check
/// certifies the contraction code to double precision.
pub fn unitary_invariance_check(
    bubble: &ColoredGraph,
    t: &NumericTensor,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    invariance_deviation(bubble, t, trials, seed, false)
}

/// Deviation of the color-breaking contraction under the same transformation:
/// the negative control, expected far from zero.
pub fn color_twisted_invariance_deviation(
    bubble: &ColoredGraph,
    t: &NumericTensor,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    invariance_deviation(bubble, t, trials, seed, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::dipole;

    fn pillow() -> ColoredGraph {
        ColoredGraph::new(3, vec![vec![0, 1], vec![0, 1], vec![1, 0]]).unwrap()
    }

    fn pillow_model() -> ModelSpec {
        ModelSpec::new(
            3,
            vec![Coupling {
                bubble: pillow(),
                label: "pillow".into(),
            }],
        )
        .unwrap()
    }

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn gaussian_expectation_fixtures() {
        // quadratic bubble: a single pairing worth N^(3-2) = N
        let poly = gaussian_expectation(&dipole(3), 3).unwrap();
        assert_eq!(poly.to_string(), "N");
        // pillow: N + 1
        let poly = gaussian_expectation(&pillow(), 3).unwrap();
        assert_eq!(poly.to_string(), "N + 1");
        assert_eq!(poly.eval_one(), ratio(2, 1));
    }

    #[test]
    fn gaussian_at_n1_is_p_factorial() {
        for p in 1..=4 {
            let catalog = crate::enumeration::enumerate_bubbles(3, p).unwrap();
            for class in &catalog.classes {
                let poly = gaussian_expectation(&class.graph, 3).unwrap();
                assert_eq!(
                    poly.eval_one(),
                    BigRational::from(BigInt::from(factorial(p))),
                    "bubble {}",
                    class.graph.key()
                );
            }
        }
    }

    #[test]
    fn gaussian_rejects_disconnected_and_mismatched() {
        let two_dipoles =
            ColoredGraph::new(3, vec![vec![0, 1], vec![0, 1], vec![0, 1]]).unwrap();
        assert!(matches!(
            gaussian_expectation(&two_dipoles, 3),
            Err(Error::Disconnected)
        ));
        assert!(matches!(
            gaussian_expectation(&pillow(), 4),
            Err(Error::ColorCountMismatch { .. })
        ));
    }

    #[test]
    fn pillow_series_order_one_symbolic() {
        let table = free_energy_series(&pillow_model(), 1, true).unwrap();
        assert_eq!(table.blocks.len(), 1);
        let block = &table.blocks[0];
        assert_eq!(block.order, 1);
        // closures σ0 = id and σ0 = s with exponents 3 and 2
        assert_eq!(block.coefficient.to_string(), "N^3 + N^2");
    }

    #[test]
    fn pillow_series_n1_matches_integral_oracle() {
        let model = pillow_model();
        let table = free_energy_series(&model, 3, true).unwrap();
        let coeffs = table.n1_coefficients();
        let expected = [ratio(2, 1), ratio(-10, 1), ratio(296, 3)];
        for ((order, value), want) in coeffs.iter().zip(&expected) {
            assert_eq!(value, want, "order {}", order);
        }
        let oracle = n1_integral_oracle(&model, 3).unwrap();
        assert_eq!(oracle, expected.to_vec());
    }

    #[test]
    fn oracle_values_by_hand() {
        // Z = 1 - 2t + 12t² - 120t³: -ln Z = 2t - 10t² + (296/3)t³
        let series = n1_log_moment_series(3);
        assert_eq!(series, vec![ratio(2, 1), ratio(-10, 1), ratio(296, 3)]);
    }

    #[test]
    fn moment_series_agrees_with_quadrature_at_small_t() {
        // Z(t) = ∫_0^∞ exp(-u - t u²) du by Simpson's rule vs the partial
        // moment sum; at t = 1e-3 the first omitted term bounds the
        // truncation error below 1e-9
        let t = 1e-3;
        let f = |u: f64| (-u - t * u * u).exp();
        let (a, b, steps) = (0.0f64, 60.0f64, 600_000usize);
        let h = (b - a) / steps as f64;
        let mut integral = f(a) + f(b);
        for k in 1..steps {
            let u = a + k as f64 * h;
            integral += f(u) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        integral *= h / 3.0;

        let mut partial = 0.0f64;
        let mut moment = 1.0f64; // (2k)!/k!
        let mut sign = 1.0f64;
        let mut tk = 1.0f64;
        for k in 0..=4usize {
            if k > 0 {
                moment *= ((2 * k - 1) * 2 * k) as f64 / k as f64;
                sign = -sign;
                tk *= t;
            }
            partial += sign * moment * tk;
        }
        assert!(
            (integral - partial).abs() <= 1e-9,
            "quadrature {} vs partial sum {}",
            integral,
            partial
        );
    }

    #[test]
    fn logarithm_cross_check_symbolic() {
        // F from connected closures equals the formal -ln of the all-closures
        // expansion, as polynomials in N, through order 3
        let model = pillow_model();
        let f = free_energy_series(&model, 3, true).unwrap();
        let z = free_energy_series(&model, 3, false).unwrap();
        let z1 = &z.blocks[0].coefficient;
        let z2 = &z.blocks[1].coefficient;
        let z3 = &z.blocks[2].coefficient;
        // -ln(1 + Σ z_k t^k): F1 = -z1; F2 = -z2 + z1²/2; F3 = -z3 + z1 z2 - z1³/3
        let mut f1 = NPolynomial::zero();
        f1.add(&z1.scaled(&ratio(-1, 1)));
        assert_eq!(&f1, &f.blocks[0].coefficient);
        let mut f2 = z1.mul(z1).scaled(&ratio(1, 2));
        f2.add(&z2.scaled(&ratio(-1, 1)));
        assert_eq!(&f2, &f.blocks[1].coefficient);
        let mut f3 = z1.mul(z2);
        f3.add(&z1.mul(z1).mul(z1).scaled(&ratio(-1, 3)));
        f3.add(&z3.scaled(&ratio(-1, 1)));
        assert_eq!(&f3, &f.blocks[2].coefficient);
    }

    #[test]
    fn ledger_exponents_match_degree_route() {
        use crate::degree::amplitude_exponent;
        let table = free_energy_series(&pillow_model(), 3, true).unwrap();
        for block in &table.blocks {
            for entry in &block.ledger {
                assert!(entry.connected);
                let theorem = amplitude_exponent(&entry.graph, table.d).unwrap().0;
                assert_eq!(entry.exponent, theorem, "class {}", entry.class_key);
            }
        }
    }

    #[test]
    fn ledger_multiplicity_times_aut_is_group_order() {
        // for n copies of one bubble: Σ over the class of labeled pairings
        // times the class automorphisms equals n! · aut(B)^n
        let model = pillow_model();
        let aut_b = pillow().automorphism_order();
        let table = free_energy_series(&model, 3, false).unwrap();
        for block in &table.blocks {
            let n = block.multi_degree[0];
            let group = factorial(n) * aut_b.pow(n as u32);
            for entry in &block.ledger {
                assert_eq!(
                    entry.multiplicity * entry.aut_order,
                    group,
                    "order {} class {}",
                    block.order,
                    entry.class_key
                );
            }
        }
    }

    #[test]
    fn leading_order_is_melonic() {
        let table = free_energy_series(&pillow_model(), 3, true).unwrap();
        for block in &table.blocks {
            let leading = block.coefficient.leading_exponent().unwrap();
            for entry in &block.ledger {
                if entry.exponent == leading {
                    assert_eq!(entry.omega, Some(0), "class {}", entry.class_key);
                }
            }
        }
    }

    #[test]
    fn series_guard_rejects_oversized_orders() {
        assert!(matches!(
            free_energy_series(&pillow_model(), 4, true),
            Err(Error::SizeLimitExceeded { .. })
        ));
    }

    #[test]
    fn two_coupling_blocks_recombine_binomially() {
        // listing the same bubble under two couplings t1, t2 must reproduce
        // the single-coupling series at t1 = t2 = t: the (a, b) block equals
        // C(a+b, a) times the single block of order a + b
        let double = ModelSpec::new(
            3,
            vec![
                Coupling {
                    bubble: pillow(),
                    label: "t1".into(),
                },
                Coupling {
                    bubble: pillow(),
                    label: "t2".into(),
                },
            ],
        )
        .unwrap();
        let table = free_energy_series(&double, 3, true).unwrap();
        let single = free_energy_series(&pillow_model(), 3, true).unwrap();
        let binomial = |n: usize, k: usize| {
            (factorial(n) / (factorial(k) * factorial(n - k))) as i64
        };
        for block in &table.blocks {
            let (a, b) = (block.multi_degree[0], block.multi_degree[1]);
            let reference = single
                .blocks
                .iter()
                .find(|s| s.order == a + b)
                .unwrap();
            let expected = reference
                .coefficient
                .scaled(&BigRational::from(BigInt::from(binomial(a + b, a))));
            assert_eq!(
                block.coefficient, expected,
                "block ({}, {}) vs single order {}",
                a,
                b,
                a + b
            );
        }
        // and at N = 1 the mixed t1·t2² block carries 3 × 296/3 = 296
        let mixed = table
            .blocks
            .iter()
            .find(|blk| blk.multi_degree == vec![1, 2])
            .unwrap();
        assert_eq!(mixed.coefficient.eval_one(), ratio(296, 1));
    }

    #[test]
    fn model_json_inline_and_catalog() {
        let inline = r#"{"D":3,"couplings":[{"graph":{"num_colors":3,"p":2,"perms":[[1,2],[1,2],[2,1]]},"label":"pillow"}]}"#;
        let model = ModelSpec::from_json(inline, |_| {
            Err(Error::Parse("no catalog".into()))
        })
        .unwrap();
        assert_eq!(model.couplings.len(), 1);
        assert_eq!(model.couplings[0].bubble, pillow());

        let catalog = crate::enumeration::enumerate_bubbles(3, 2).unwrap();
        let catalog_json = catalog.to_json();
        let by_ref = r#"{"D":3,"catalog":"cat.json","couplings":[{"id":0}]}"#;
        let model = ModelSpec::from_json(by_ref, |path| {
            assert_eq!(path, "cat.json");
            Ok(catalog_json.clone())
        })
        .unwrap();
        assert_eq!(model.couplings[0].bubble, catalog.classes[0].graph);
    }

    #[test]
    fn model_rejects_quadratic_coupling() {
        let doc = r#"{"D":3,"couplings":[{"graph":{"num_colors":3,"p":1,"perms":[[1],[1],[1]]}}]}"#;
        assert!(ModelSpec::from_json(doc, |_| Err(Error::Parse("x".into()))).is_err());
    }

    #[test]
    fn numeric_eval_fixtures() {
        // quadratic invariant at N = 1: |t|²
        let t = NumericTensor::from_entries(
            3,
            1,
            vec![Complex64::new(2.0, -1.0)],
        )
        .unwrap();
        let v = numeric_invariant_eval(&dipole(3), &t).unwrap();
        assert!((v - Complex64::new(5.0, 0.0)).norm() < 1e-12);
        // any invariant at N = 1 collapses to (|t|²)^p
        let v = numeric_invariant_eval(&pillow(), &t).unwrap();
        assert!((v - Complex64::new(25.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pillow_eval_matches_explicit_loop_oracle() {
        // fully independent contraction: loop over all twelve tensor slots
        // with explicit delta factors
        let t = NumericTensor::random(3, 2, 12345);
        let n = t.n;
        let mut expected = Complex64::new(0.0, 0.0);
        let idx = |a: usize, b: usize, c: usize| -> Vec<usize> { vec![a, b, c] };
        for a1 in 0..n {
            for a2 in 0..n {
                for a3 in 0..n {
                    for b1 in 0..n {
                        for b2 in 0..n {
                            for b3 in 0..n {
                                // whites: T_{a1a2a3} T_{b1b2b3}
                                // blacks: conj T_{a1a2b3} conj T_{b1b2a3}
                                // (colors 0,1 stay within a pair, color 2 swaps)
                                expected += t.get(&idx(a1, a2, a3))
                                    * t.get(&idx(b1, b2, b3))
                                    * t.get(&idx(a1, a2, b3)).conj()
                                    * t.get(&idx(b1, b2, a3)).conj();
                            }
                        }
                    }
                }
            }
        }
        let got = numeric_invariant_eval(&pillow(), &t).unwrap();
        assert!(
            (got - expected).norm() < 1e-9 * expected.norm().max(1.0),
            "got {} expected {}",
            got,
            expected
        );
    }

    #[test]
    fn eval_rejects_rank_mismatch() {
        let t = NumericTensor::random(4, 2, 7);
        assert!(matches!(
            numeric_invariant_eval(&pillow(), &t),
            Err(Error::RankMismatch { .. })
        ));
    }

    #[test]
    fn haar_matrices_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for n in 1..=3 {
            let u = haar_unitary(n, &mut rng);
            for i in 0..n {
                for j in 0..n {
                    let dot: Complex64 = (0..n).map(|k| u[k][i].conj() * u[k][j]).sum();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - expected).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn invariance_and_negative_control() {
        let t = NumericTensor::random(3, 2, 2024);
        for bubble in [dipole(3), pillow()] {
            let dev = unitary_invariance_check(&bubble, &t, 10, 11).unwrap();
            assert!(dev <= 1e-10, "bubble {} deviated {}", bubble.key(), dev);
        }
        let dev = color_twisted_invariance_deviation(&pillow(), &t, 10, 11).unwrap();
        assert!(dev > 1e-6, "twisted contraction deviated only {}", dev);
    }

    #[test]
    fn csv_has_documented_columns() {
        let table = free_energy_series(&pillow_model(), 2, true).unwrap();
        let csv = table.to_csv();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "order,N_exponent,coefficient,class_id,multiplicity"
        );
        assert!(lines.next().unwrap().starts_with("1,"));
    }
}
