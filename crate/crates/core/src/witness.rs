//! Explicit witness baths for which every bath operator of the expansion is
//! linearly independent, so that order conditions on the system integrals
//! cannot be satisfied by accident.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyson::{c_coefficient, enumerate_indices, MultiIndex};
use crate::error::{Error, Result};
use crate::linalg::{gram_rank, SparseOperator, DEFAULT_GRAM_TOLERANCE, I, ONE};
use crate::models::random_hermitian;

/// Largest Hilbert-space dimension the witness constructions will build.
pub const WITNESS_DIM_BUDGET: usize = 1 << 16;

fn budget(what: &'static str, needed: Option<usize>) -> Result<usize> {
    match needed {
        Some(d) if d <= WITNESS_DIM_BUDGET => Ok(d),
        Some(d) => Err(Error::BudgetExceeded {
            what,
            needed: d,
            budget: WITNESS_DIM_BUDGET,
        }),
        None => Err(Error::BudgetExceeded {
            what,
            needed: usize::MAX,
            budget: WITNESS_DIM_BUDGET,
        }),
    }
}

/// `K'` Hermitian operators `O_k = Σ_{l=0}^{K^R} |l⟩⟨Kl+k| + h.c.` on a
/// space of dimension `(K^R + 1) K`, `K = K' + 1`.
#[derive(Clone, Debug)]
pub struct LemmaFamily {
    k_prime: usize,
    r: usize,
    dim: usize,
    ops: Vec<SparseOperator>,
}

pub fn lemma_family(k_prime: usize, r: usize) -> Result<LemmaFamily> {
    if k_prime == 0 || r == 0 {
        return Err(Error::arg("lemma family needs K' >= 1 and R >= 1"));
    }
    let k = k_prime + 1;
    let top = k.checked_pow(r as u32);
    let dim = budget(
        "lemma family dimension",
        top.and_then(|t| t.checked_add(1)).and_then(|t| t.checked_mul(k)),
    )?;
    let top = top.unwrap();
    let ops = (1..=k_prime)
        .map(|digit| {
            SparseOperator::from_triplets(
                dim,
                (0..=top).flat_map(|l| [(l, k * l + digit, ONE), (k * l + digit, l, ONE)]),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(LemmaFamily {
        k_prime,
        r,
        dim,
        ops,
    })
}

impl LemmaFamily {
    pub fn k_prime(&self) -> usize {
        self.k_prime
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Base of the index code, `K' + 1`.
    pub fn k(&self) -> usize {
        self.k_prime + 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[SparseOperator] {
        &self.ops
    }

    /// `O_k` for a digit `1 ≤ k ≤ K'`.
    pub fn op(&self, k: usize) -> Result<&SparseOperator> {
        if k == 0 || k > self.k_prime {
            return Err(Error::arg(format!("lemma operator O_{k} outside 1..={}", self.k_prime)));
        }
        Ok(&self.ops[k - 1])
    }

    /// `O_{k_1} ⋯ O_{k_r}`.
    pub fn product(&self, ks: &[usize]) -> Result<SparseOperator> {
        let mut acc = SparseOperator::identity(self.dim);
        for &k in ks {
            acc = acc.matmul(self.op(k)?)?;
        }
        Ok(acc)
    }

    /// Every digit word of length `1..=R`, shortest first, lexicographic
    /// within a length.
    pub fn words(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..self.r {
            layer = layer
                .into_iter()
                .flat_map(|w| {
                    (1..=self.k_prime).map(move |k| {
                        let mut w = w.clone();
                        w.push(k);
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }
}

/// `(k_1 ⋯ k_r)_K = K^{r-1} k_1 + ⋯ + k_r` for digits in `1..K`.
pub fn base_k_index(ks: &[usize], k: usize) -> Result<usize> {
    if k < 2 {
        return Err(Error::arg(format!("base {k} must be at least 2")));
    }
    ks.iter().try_fold(0usize, |acc, &d| {
        if d == 0 || d >= k {
            return Err(Error::arg(format!("digit {d} outside 1..{k}")));
        }
        acc.checked_mul(k)
            .and_then(|v| v.checked_add(d))
            .ok_or_else(|| Error::arg("base-K code overflows"))
    })
}

fn code_length(mut code: usize, k: usize) -> Option<usize> {
    // length of the base-K expansion if every digit is nonzero
    let mut len = 0;
    while code > 0 {
        if code % k == 0 {
            return None;
        }
        code /= k;
        len += 1;
    }
    Some(len)
}

/// Outcome of checking a lemma family.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub k_prime: usize,
    pub r: usize,
    pub dim: usize,
    pub count: usize,
    pub rank: usize,
    pub gram_min_eigenvalue: f64,
    pub gram_max_eigenvalue: f64,
    /// Largest `|⟨0|O_{k_1}⋯O_{k_r}|(k_1⋯k_r)_K⟩ − 1|` over all products.
    pub max_code_deviation: f64,
    /// Products whose `⟨0|` row touches another code of the same length.
    pub same_length_collisions: usize,
}

impl LemmaReport {
    pub fn holds(&self) -> bool {
        self.rank == self.count && self.max_code_deviation == 0.0 && self.same_length_collisions == 0
    }
}

/// Gram rank of all products of length `≤ R` together with the code checks
/// on their `⟨0|` rows.
///
/// Each product has entry exactly 1 at its own code. Other codes reachable
/// from `⟨0|` are always strictly shorter: a step down the tree shortens the
/// code, so the row is unit upper triangular in code order, which is what
/// makes the products independent.
pub fn certify_lemma(family: &LemmaFamily) -> Result<LemmaReport> {
    let k = family.k();
    let words = family.words();
    let products: Vec<SparseOperator> = words
        .par_iter()
        .map(|w| family.product(w))
        .collect::<Result<_>>()?;
    let mut max_dev = 0.0f64;
    let mut collisions = 0;
    for (w, p) in words.iter().zip(&products) {
        let code = base_k_index(w, k)?;
        max_dev = max_dev.max((p.get(0, code) - ONE).norm());
        let (cols, vals) = p.row(0);
        let foreign = cols.iter().zip(vals).any(|(&c, v)| {
            c != code && v.norm() != 0.0 && code_length(c, k) == Some(w.len())
        });
        if foreign {
            collisions += 1;
        }
    }
    let g = gram_rank(&products, DEFAULT_GRAM_TOLERANCE)?;
    Ok(LemmaReport {
        k_prime: family.k_prime,
        r: family.r,
        dim: family.dim,
        count: products.len(),
        rank: g.rank,
        gram_min_eigenvalue: g.min_eigenvalue(),
        gram_max_eigenvalue: g.max_eigenvalue(),
        max_code_deviation: max_dev,
        same_length_collisions: collisions,
    })
}

/// Register-times-auxiliary bath with couplings
/// `B_α = Σ_r |r⟩⟨r| ⊗ h_r^{(α)}` and pure-bath term
/// `B_0 = Σ_r |r⟩⟨r+1| ⊗ I_h + h.c.` on a periodic register of length `N`.
#[derive(Clone, Debug)]
pub struct WitnessBath {
    n: usize,
    d: usize,
    h_dim: usize,
    /// `h[(α-1) N + r]`.
    h: Vec<SparseOperator>,
    b_plus: SparseOperator,
    b0: SparseOperator,
    /// Index 0 is `B_0`, then `B_1 .. B_{D-1}`.
    bath_ops: Vec<SparseOperator>,
    certifying: bool,
}

/// The witness bath for target order `N` with `D` couplings (counting
/// `α = 0`). `h_r^{(α)} = O_k` with `k = (α-1) N + r + 1`, taken from the
/// lemma family with `K' = N (D-1)` and `R = N`.
pub fn witness_bath(n: usize, d: usize) -> Result<WitnessBath> {
    check_nd(n, d)?;
    let k_prime = n * (d - 1);
    let k = k_prime + 1;
    let h_dim = k
        .checked_pow(n as u32)
        .and_then(|t| t.checked_add(1))
        .and_then(|t| t.checked_mul(k));
    budget("witness bath dimension", h_dim.and_then(|h| h.checked_mul(n)))?;
    let family = lemma_family(k_prime, n)?;
    WitnessBath::assemble(n, d, family.ops, true)
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if n == 0 || d < 2 {
        return Err(Error::arg(format!("witness bath needs N >= 1 and D >= 2, got N={n}, D={d}")));
    }
    Ok(())
}

impl WitnessBath {
    /// Same register structure with random Hermitian `h_r^{(α)}` of
    /// dimension `h_dim`. Full rank here is typical but proves nothing.
    pub fn random(n: usize, d: usize, h_dim: usize, seed: u64) -> Result<Self> {
        check_nd(n, d)?;
        if h_dim == 0 {
            return Err(Error::arg("auxiliary dimension must be positive"));
        }
        budget("witness bath dimension", h_dim.checked_mul(n))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = (0..n * (d - 1))
            .map(|_| SparseOperator::from_dense(&random_hermitian(&mut rng, h_dim, 1.0)))
            .collect();
        Self::assemble(n, d, h, false)
    }

    fn assemble(n: usize, d: usize, h: Vec<SparseOperator>, certifying: bool) -> Result<Self> {
        let h_dim = h[0].dim();
        let ident_h = SparseOperator::identity(h_dim);
        let shift = SparseOperator::from_triplets(n, (0..n).map(|r| (r, (r + 1) % n, ONE)))?;
        let b_plus = shift.kron(&ident_h);
        let b0 = b_plus.add(&b_plus.adjoint())?;
        let mut bath_ops = vec![b0.clone()];
        for alpha in 1..d {
            let mut acc = SparseOperator::zeros(n * h_dim);
            for r in 0..n {
                let proj = SparseOperator::from_triplets(n, [(r, r, ONE)])?;
                acc = acc.add(&proj.kron(&h[(alpha - 1) * n + r]))?;
            }
            bath_ops.push(acc);
        }
        Ok(Self {
            n,
            d,
            h_dim,
            h,
            b_plus,
            b0,
            bath_ops,
            certifying,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn h_dim(&self) -> usize {
        self.h_dim
    }

    pub fn dim(&self) -> usize {
        self.n * self.h_dim
    }

    /// Whether the auxiliary operators come from the lemma construction.
    pub fn is_certifying(&self) -> bool {
        self.certifying
    }

    /// `h_r^{(α)}` for `α ≥ 1`, register index taken mod `N`.
    pub fn h(&self, alpha: usize, r: usize) -> Result<&SparseOperator> {
        if alpha == 0 || alpha >= self.d {
            return Err(Error::arg(format!("coupling {alpha} outside 1..{}", self.d)));
        }
        Ok(&self.h[(alpha - 1) * self.n + r % self.n])
    }

    pub fn b0(&self) -> &SparseOperator {
        &self.b0
    }

    pub fn b_plus(&self) -> &SparseOperator {
        &self.b_plus
    }

    pub fn b_minus(&self) -> SparseOperator {
        self.b_plus.adjoint()
    }

    /// `[B_0, B_1, .., B_{D-1}]`.
    pub fn bath_ops(&self) -> &[SparseOperator] {
        &self.bath_ops
    }

    fn generator(&self, use_b_plus: bool) -> &SparseOperator {
        if use_b_plus {
            &self.b_plus
        } else {
            &self.b0
        }
    }

    /// `[iB, B_α]_p / p!` for `p = 0..=p_max` and every `α ≥ 1`, with `B`
    /// either `B_+` or `B_0`. Outer index `α - 1`.
    fn factors(&self, use_b_plus: bool, p_max: usize) -> Result<Vec<Vec<SparseOperator>>> {
        let gen = self.generator(use_b_plus);
        (1..self.d)
            .into_par_iter()
            .map(|alpha| {
                let mut out = vec![self.bath_ops[alpha].clone()];
                for p in 1..=p_max {
                    let next = gen.commutator(&out[p - 1])?.scale(I * (1.0 / p as f64));
                    out.push(next);
                }
                Ok(out)
            })
            .collect()
    }

    fn product(factors: &[Vec<SparseOperator>], index: &MultiIndex, dim: usize) -> Result<SparseOperator> {
        let mut acc = SparseOperator::identity(dim);
        for (&alpha, &p) in index.alphas().iter().zip(index.ps()) {
            acc = acc.matmul(&factors[alpha - 1][p])?;
        }
        Ok(acc)
    }

    /// `𝓑_n = Π_j [iB, B_{α_j}]_{p_j} / p_j!` with `B = B_+` or `B_0`.
    pub fn expansion_operator(&self, index: &MultiIndex, use_b_plus: bool) -> Result<SparseOperator> {
        self.check_index(index)?;
        let factors = self.factors(use_b_plus, index.ps().iter().copied().max().unwrap_or(0))?;
        Self::product(&factors, index, self.dim())
    }

    fn check_index(&self, index: &MultiIndex) -> Result<()> {
        if let Some(&a) = index.alphas().iter().find(|&&a| a == 0 || a >= self.d) {
            return Err(Error::arg(format!("coupling {a} outside 1..{}", self.d)));
        }
        Ok(())
    }

    /// Register block `⟨0| · |p⟩` of an operator, as an operator on the
    /// auxiliary space.
    fn register_block(&self, op: &SparseOperator, p: usize) -> Result<SparseOperator> {
        op.block(self.h_dim, 0, p % self.n)
    }
}

fn check_formula_index(wb: &WitnessBath, index: &MultiIndex) -> Result<()> {
    wb.check_index(index)?;
    if index.p_total() >= wb.n {
        return Err(Error::arg(format!(
            "|p| = {} must be below N = {}: the periodic register would alias the shift",
            index.p_total(),
            wb.n
        )));
    }
    if index.order() > wb.n {
        return Err(Error::arg(format!(
            "index order {} exceeds N = {}",
            index.order(),
            wb.n
        )));
    }
    Ok(())
}

/// Closed form `Π_j Σ_{k=0}^{p_j} c_{p_j}^{(k)} h^{(α_j)}_{P_j - k}` with
/// `P_j = p_1 + ⋯ + p_j`.
fn formula_element(wb: &WitnessBath, index: &MultiIndex) -> Result<SparseOperator> {
    let mut acc = SparseOperator::identity(wb.h_dim);
    let mut partial = 0;
    for (&alpha, &p) in index.alphas().iter().zip(index.ps()) {
        partial += p;
        let mut factor = SparseOperator::zeros(wb.h_dim);
        for k in 0..=p {
            factor = factor.add(&wb.h(alpha, partial - k)?.scale(c_coefficient(p, k)?))?;
        }
        acc = acc.matmul(&factor)?;
    }
    Ok(acc)
}

/// `⟨0| 𝓑_n ||p|⟩` from explicit sparse algebra with `B_+`, and the same
/// element from the closed-form product of `c`-weighted `h` sums.
pub fn matrix_element_formula(
    wb: &WitnessBath,
    index: &MultiIndex,
) -> Result<(SparseOperator, SparseOperator)> {
    check_formula_index(wb, index)?;
    let direct = wb.register_block(&wb.expansion_operator(index, true)?, index.p_total())?;
    Ok((direct, formula_element(wb, index)?))
}

/// Frobenius distance between the `⟨0|·||p|⟩` blocks built with the full
/// `B_0` and with `B_+` alone.
pub fn b0_b_plus_discrepancy(wb: &WitnessBath, index: &MultiIndex) -> Result<f64> {
    check_formula_index(wb, index)?;
    let full = wb.register_block(&wb.expansion_operator(index, false)?, index.p_total())?;
    let plus = wb.register_block(&wb.expansion_operator(index, true)?, index.p_total())?;
    full.frobenius_distance(&plus)
}

/// Count and Gram rank of `{𝓑_n}` over all indices with `n + |p| ≤ N`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IndependenceCertificate {
    pub n: usize,
    pub d: usize,
    pub use_b_plus: bool,
    /// False for random auxiliary operators: full rank there is evidence,
    /// not proof.
    pub certifying: bool,
    pub count: usize,
    pub rank: usize,
    pub gram_min_eigenvalue: f64,
    pub gram_max_eigenvalue: f64,
}

impl IndependenceCertificate {
    pub fn holds(&self) -> bool {
        self.rank == self.count
    }
}

pub fn independence_certificate(wb: &WitnessBath, use_b_plus: bool) -> Result<IndependenceCertificate> {
    let indices = enumerate_indices(wb.d, wb.n);
    let p_max = indices.iter().flat_map(|i| i.ps().iter().copied()).max().unwrap_or(0);
    let factors = wb.factors(use_b_plus, p_max)?;
    let ops: Vec<SparseOperator> = indices
        .par_iter()
        .map(|index| WitnessBath::product(&factors, index, wb.dim()))
        .collect::<Result<_>>()?;
    let g = gram_rank(&ops, DEFAULT_GRAM_TOLERANCE)?;
    Ok(IndependenceCertificate {
        n: wb.n,
        d: wb.d,
        use_b_plus,
        certifying: wb.certifying,
        count: ops.len(),
        rank: g.rank,
        gram_min_eigenvalue: g.min_eigenvalue(),
        gram_max_eigenvalue: g.max_eigenvalue(),
    })
}

/// Per-index agreement between `direct` and `formula`, and between the
/// full-`B_0` and `B_+` blocks, over every index with `n + |p| ≤ N` and
/// `|p| ≤ N - 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaCheck {
    pub index: String,
    pub formula_deviation: f64,
    pub b0_discrepancy: f64,
}

pub fn formula_checks(wb: &WitnessBath) -> Result<Vec<FormulaCheck>> {
    enumerate_indices(wb.d, wb.n)
        .into_par_iter()
        .filter(|i| i.p_total() < wb.n)
        .map(|index| {
            let (direct, formula) = matrix_element_formula(wb, &index)?;
            Ok(FormulaCheck {
                index: index.to_string(),
                formula_deviation: max_abs_diff(&direct, &formula)?,
                b0_discrepancy: b0_b_plus_discrepancy(wb, &index)?,
            })
        })
        .collect()
}

fn max_abs_diff(a: &SparseOperator, b: &SparseOperator) -> Result<f64> {
    Ok(a.sub(b)?
        .triplets()
        .map(|(_, _, v)| v.norm())
        .fold(0.0, f64::max))
}
