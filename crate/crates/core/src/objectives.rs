//! Monotone submodular set functions.
//!
//! Every oracle is normalized (`f(∅) = 0`), monotone and submodular. Besides
//! plain evaluation, oracles expose [`SubmodularOracle::toggle_marginals`],
//! the batched quantity `f(R ∪ {j}) − f(R ∖ {j})` that drives both the
//! multilinear gradient and the curvature computations. The default is two
//! evaluations per target; the shipped objectives override it with an
//! incremental pass over the base set.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub trait SubmodularOracle: Send + Sync {
    /// Size `n` of the ground set the oracle is defined on.
    fn ground_size(&self) -> usize;

    /// Value of an arbitrary subset given as distinct indices in any order.
    fn eval(&self, set: &[usize]) -> f64;

    /// `f(set ∪ {element}) − f(set)`.
    fn gain(&self, set: &[usize], element: usize) -> f64 {
        if set.contains(&element) {
            return 0.0;
        }
        let mut with = set.to_vec();
        with.push(element);
        self.eval(&with) - self.eval(set)
    }

    /// Writes `f(base ∪ {t}) − f(base ∖ {t})` for every `t` in `targets`.
    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        let mut member = vec![false; self.ground_size()];
        for &q in base {
            member[q] = true;
        }
        let base_value = self.eval(base);
        let mut scratch = Vec::with_capacity(base.len() + 1);
        for (slot, &t) in out.iter_mut().zip(targets) {
            scratch.clear();
            if member[t] {
                scratch.extend(base.iter().copied().filter(|&q| q != t));
                *slot = base_value - self.eval(&scratch);
            } else {
                scratch.extend_from_slice(base);
                scratch.push(t);
                *slot = self.eval(&scratch) - base_value;
            }
        }
    }
}

impl<T: SubmodularOracle + ?Sized> SubmodularOracle for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn eval(&self, set: &[usize]) -> f64 {
        (**self).eval(set)
    }
    fn gain(&self, set: &[usize], element: usize) -> f64 {
        (**self).gain(set, element)
    }
    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        (**self).toggle_marginals(base, targets, out)
    }
}

/// `f(set ∪ {j}) − f(set)`.
pub fn marginal_gain<F: SubmodularOracle + ?Sized>(set: &[usize], j: usize, f: &F) -> f64 {
    f.gain(set, j)
}

/// Feature vectors, one row per element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embeddings {
    n: usize,
    dim: usize,
    data: Vec<f64>,
}

impl Embeddings {
    pub fn new(n: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Construction("embedding dimension must be positive".into()));
        }
        if data.len() != n * dim {
            return Err(Error::Dimension {
                expected: n * dim,
                got: data.len(),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Construction("embeddings must be finite".into()));
        }
        Ok(Self { n, dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Dimension {
                expected: dim,
                got: bad.len(),
            });
        }
        Self::new(rows.len(), dim, rows.concat())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, p: usize) -> &[f64] {
        &self.data[p * self.dim..(p + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    pub fn squared_distance(&self, p: usize, q: usize) -> f64 {
        self.row(p)
            .iter()
            .zip(self.row(q))
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

/// Nonnegative `clients × elements` similarity matrix with entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    clients: usize,
    elements: usize,
    // element-major: column j is data[j*clients..(j+1)*clients]
    data: Vec<f64>,
}

impl KernelMatrix {
    /// From row-major data (`row = client`).
    pub fn new(clients: usize, elements: usize, row_major: &[f64]) -> Result<Self> {
        if row_major.len() != clients * elements {
            return Err(Error::Dimension {
                expected: clients * elements,
                got: row_major.len(),
            });
        }
        if row_major
            .iter()
            .any(|v| !v.is_finite() || !(0.0..=1.0).contains(v))
        {
            return Err(Error::Construction("kernel entries must lie in [0, 1]".into()));
        }
        Ok(Self::from_row_major_unchecked(clients, elements, row_major))
    }

    fn from_row_major_unchecked(clients: usize, elements: usize, row_major: &[f64]) -> Self {
        let mut data = vec![0.0; clients * elements];
        for c in 0..clients {
            for j in 0..elements {
                data[j * clients + c] = row_major[c * elements + j];
            }
        }
        Self {
            clients,
            elements,
            data,
        }
    }

    pub fn clients(&self) -> usize {
        self.clients
    }

    pub fn elements(&self) -> usize {
        self.elements
    }

    pub fn get(&self, client: usize, element: usize) -> f64 {
        self.data[element * self.clients + client]
    }

    pub fn column(&self, element: usize) -> &[f64] {
        &self.data[element * self.clients..(element + 1) * self.clients]
    }
}

/// Self-similarity `K(p,q) = exp(−‖z_p − z_q‖² / (2σ²))`.
pub fn rbf_kernel(emb: &Embeddings, sigma: f64) -> Result<KernelMatrix> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param(format!("RBF bandwidth must be positive, got {sigma}")));
    }
    let n = emb.len();
    let denom = 2.0 * sigma * sigma;
    let mut data = vec![0.0; n * n];
    for p in 0..n {
        data[p * n + p] = 1.0;
        for q in 0..p {
            let k = (-emb.squared_distance(p, q) / denom).exp();
            data[p * n + q] = k;
            data[q * n + p] = k;
        }
    }
    Ok(KernelMatrix {
        clients: n,
        elements: n,
        data,
    })
}

/// Shared machinery for `Σ_clients max_{q∈S} M[client][q]`, scaled.
#[derive(Debug, Clone)]
struct BestResponse {
    matrix: KernelMatrix,
    scale: f64,
}

impl BestResponse {
    fn eval(&self, set: &[usize]) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        let mut best = vec![0.0f64; self.matrix.clients];
        for &q in set {
            for (b, &v) in best.iter_mut().zip(self.matrix.column(q)) {
                if v > *b {
                    *b = v;
                }
            }
        }
        self.scale * best.iter().sum::<f64>()
    }

    fn gain(&self, set: &[usize], element: usize) -> f64 {
        if set.contains(&element) {
            return 0.0;
        }
        let mut best = vec![0.0f64; self.matrix.clients];
        for &q in set {
            for (b, &v) in best.iter_mut().zip(self.matrix.column(q)) {
                if v > *b {
                    *b = v;
                }
            }
        }
        let g: f64 = self
            .matrix
            .column(element)
            .iter()
            .zip(&best)
            .map(|(&v, &b)| (v - b).max(0.0))
            .sum();
        self.scale * g
    }

    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        const NONE: usize = usize::MAX;
        let clients = self.matrix.clients;
        let mut best1 = vec![0.0f64; clients];
        let mut best2 = vec![0.0f64; clients];
        let mut owner = vec![NONE; clients];
        for (pos, &q) in base.iter().enumerate() {
            for (c, &v) in self.matrix.column(q).iter().enumerate() {
                if v > best1[c] {
                    best2[c] = best1[c];
                    best1[c] = v;
                    owner[c] = pos;
                } else if v > best2[c] {
                    best2[c] = v;
                }
            }
        }
        // loss of removing base[pos]: clients it uniquely serves fall back to best2
        let mut loss = vec![0.0f64; base.len()];
        for c in 0..clients {
            if owner[c] != NONE {
                loss[owner[c]] += best1[c] - best2[c];
            }
        }
        let mut position = vec![NONE; self.matrix.elements];
        for (pos, &q) in base.iter().enumerate() {
            position[q] = pos;
        }
        for (slot, &t) in out.iter_mut().zip(targets) {
            let g = if position[t] != NONE {
                loss[position[t]]
            } else {
                self.matrix
                    .column(t)
                    .iter()
                    .zip(&best1)
                    .map(|(&v, &b)| (v - b).max(0.0))
                    .sum()
            };
            *slot = self.scale * g;
        }
    }
}

/// `f(S) = Σ_p max_{q∈S} K(p,q)` over the client rows of a kernel matrix.
#[derive(Debug, Clone)]
pub struct FacilityLocation {
    inner: BestResponse,
}

impl FacilityLocation {
    pub fn new(kernel: KernelMatrix) -> Self {
        Self {
            inner: BestResponse {
                matrix: kernel,
                scale: 1.0,
            },
        }
    }

    /// Facility location over the RBF self-kernel of `emb`.
    pub fn from_embeddings(emb: &Embeddings, sigma: f64) -> Result<Self> {
        Ok(Self::new(rbf_kernel(emb, sigma)?))
    }

    pub fn kernel(&self) -> &KernelMatrix {
        &self.inner.matrix
    }
}

impl SubmodularOracle for FacilityLocation {
    fn ground_size(&self) -> usize {
        self.inner.matrix.elements
    }
    fn eval(&self, set: &[usize]) -> f64 {
        self.inner.eval(set)
    }
    fn gain(&self, set: &[usize], element: usize) -> f64 {
        self.inner.gain(set, element)
    }
    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        self.inner.toggle_marginals(base, targets, out)
    }
}

/// Average best rating: `f(S) = (1/|U|) Σ_u max_{j∈S} r_{u,j}`.
#[derive(Debug, Clone)]
pub struct RatingObjective {
    inner: BestResponse,
}

impl RatingObjective {
    /// `ratings` is row-major `users × items`; missing ratings are zero.
    pub fn new(users: usize, items: usize, ratings: &[f64]) -> Result<Self> {
        if users == 0 || items == 0 {
            return Err(Error::Construction("rating matrix must be nonempty".into()));
        }
        if ratings.len() != users * items {
            return Err(Error::Dimension {
                expected: users * items,
                got: ratings.len(),
            });
        }
        if ratings.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::Construction("ratings must be finite and nonnegative".into()));
        }
        Ok(Self {
            inner: BestResponse {
                matrix: KernelMatrix::from_row_major_unchecked(users, items, ratings),
                scale: 1.0 / users as f64,
            },
        })
    }

    pub fn users(&self) -> usize {
        self.inner.matrix.clients
    }

    pub fn items(&self) -> usize {
        self.inner.matrix.elements
    }

    pub fn rating(&self, user: usize, item: usize) -> f64 {
        self.inner.matrix.get(user, item)
    }
}

impl SubmodularOracle for RatingObjective {
    fn ground_size(&self) -> usize {
        self.inner.matrix.elements
    }
    fn eval(&self, set: &[usize]) -> f64 {
        self.inner.eval(set)
    }
    fn gain(&self, set: &[usize], element: usize) -> f64 {
        self.inner.gain(set, element)
    }
    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        self.inner.toggle_marginals(base, targets, out)
    }
}

/// Additive `f(S) = Σ_{j∈S} w_j`; total curvature zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularObjective {
    weights: Vec<f64>,
}

impl ModularObjective {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Construction("modular weights must be finite and nonnegative".into()));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl SubmodularOracle for ModularObjective {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }
    fn eval(&self, set: &[usize]) -> f64 {
        set.iter().map(|&j| self.weights[j]).sum()
    }
    fn gain(&self, set: &[usize], element: usize) -> f64 {
        if set.contains(&element) {
            0.0
        } else {
            self.weights[element]
        }
    }
    fn toggle_marginals(&self, _base: &[usize], targets: &[usize], out: &mut [f64]) {
        for (slot, &t) in out.iter_mut().zip(targets) {
            *slot = self.weights[t];
        }
    }
}

/// Weighted coverage: each element covers a set of items; `f(S)` is the
/// total weight of items covered by at least one member of `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCoverage {
    item_weights: Vec<f64>,
    covers: Vec<Vec<usize>>,
}

impl WeightedCoverage {
    pub fn new(item_weights: Vec<f64>, mut covers: Vec<Vec<usize>>) -> Result<Self> {
        if item_weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::Construction("item weights must be finite and nonnegative".into()));
        }
        for items in &mut covers {
            items.sort_unstable();
            items.dedup();
            if let Some(&bad) = items.iter().find(|&&i| i >= item_weights.len()) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    n: item_weights.len(),
                });
            }
        }
        Ok(Self {
            item_weights,
            covers,
        })
    }

    /// Element `q` covers every point within `radius` of it (itself included).
    pub fn from_embeddings(emb: &Embeddings, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius >= 0.0) {
            return Err(Error::param(format!("coverage radius must be nonnegative, got {radius}")));
        }
        let r2 = radius * radius;
        let covers = (0..emb.len())
            .map(|q| (0..emb.len()).filter(|&p| emb.squared_distance(p, q) <= r2).collect())
            .collect();
        Self::new(vec![1.0; emb.len()], covers)
    }

    pub fn covers(&self, element: usize) -> &[usize] {
        &self.covers[element]
    }

    fn counts(&self, set: &[usize]) -> Vec<u32> {
        let mut counts = vec![0u32; self.item_weights.len()];
        for &q in set {
            for &i in &self.covers[q] {
                counts[i] += 1;
            }
        }
        counts
    }
}

impl SubmodularOracle for WeightedCoverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }
    fn eval(&self, set: &[usize]) -> f64 {
        self.counts(set)
            .iter()
            .zip(&self.item_weights)
            .filter(|(&c, _)| c > 0)
            .map(|(_, &w)| w)
            .sum()
    }
    fn toggle_marginals(&self, base: &[usize], targets: &[usize], out: &mut [f64]) {
        let counts = self.counts(base);
        let mut member = vec![false; self.covers.len()];
        for &q in base {
            member[q] = true;
        }
        for (slot, &t) in out.iter_mut().zip(targets) {
            let uncovered_after = if member[t] { 1 } else { 0 };
            *slot = self.covers[t]
                .iter()
                .filter(|&&i| counts[i] == uncovered_after)
                .map(|&i| self.item_weights[i])
                .sum();
        }
    }
}
