//! System-bath Hamiltonians `H = Σ_α S_α ⊗ B_α`.
//!
//! The static model has constant bath operators. The time-dependent model
//! carries, for each coupling, an exact polynomial
//! `B'_α(t) = Σ_p B'^{(α)}_p t^p / p!`. The first coupling always has
//! `S_0 = I_S`, so `B_0` is the bath's internal Hamiltonian.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, HermitianOperator, C64};

/// Tolerance for `S_0 = I_S`.
const IDENTITY_TOLERANCE: f64 = 1e-12;
/// Slack allowed above a declared bath norm bound.
const NORM_BOUND_SLACK: f64 = 1e-10;
/// Least-squares residual allowed when decomposing a drift in `span{S_α}`.
pub const DRIFT_RESIDUAL_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_BATH_DIM: usize = 4;
pub const DEFAULT_NORM_BOUND: f64 = 1.0;
pub const DEFAULT_BATH_DEGREE: usize = 3;

fn validate_system_ops(system_ops: &[ComplexOperator]) -> Result<Vec<HermitianOperator>> {
    let first = system_ops
        .first()
        .ok_or_else(|| Error::InvalidModel("no system operators".into()))?;
    let d_s = first.dim();
    if first.max_abs_diff(&ComplexOperator::identity(d_s)) > IDENTITY_TOLERANCE {
        return Err(Error::InvalidModel(
            "the first system operator must be the identity".into(),
        ));
    }
    system_ops
        .iter()
        .enumerate()
        .map(|(alpha, s)| {
            if s.dim() != d_s {
                return Err(Error::dims(format!(
                    "system operator {alpha} has dim {}, expected {d_s}",
                    s.dim()
                )));
            }
            HermitianOperator::new(s.clone())
                .map_err(|_| Error::InvalidModel(format!("system operator {alpha} is not Hermitian")))
        })
        .collect()
}

fn hash_operator(hasher: &mut Sha256, op: &ComplexOperator) {
    hasher.update((op.dim() as u64).to_le_bytes());
    for z in op.matrix().iter() {
        hasher.update(z.re.to_bits().to_le_bytes());
        hasher.update(z.im.to_bits().to_le_bytes());
    }
}

/// One coupling term `S_α ⊗ B_α` of a static model.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub system: HermitianOperator,
    pub bath: HermitianOperator,
}

/// Time-independent system-bath Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct StaticModel {
    d_s: usize,
    d_b: usize,
    couplings: Vec<Coupling>,
}

impl StaticModel {
    /// Validates `S_0 = I`, Hermiticity and dimensions. When `norm_bound`
    /// is given, every bath operator must respect it.
    pub fn new(
        system_ops: &[ComplexOperator],
        bath_ops: &[ComplexOperator],
        norm_bound: Option<f64>,
    ) -> Result<Self> {
        let systems = validate_system_ops(system_ops)?;
        if bath_ops.len() != systems.len() {
            return Err(Error::InvalidModel(format!(
                "{} system operators but {} bath operators",
                systems.len(),
                bath_ops.len()
            )));
        }
        let d_b = bath_ops[0].dim();
        let mut couplings = Vec::with_capacity(systems.len());
        for (alpha, (s, b)) in systems.into_iter().zip(bath_ops).enumerate() {
            if b.dim() != d_b {
                return Err(Error::dims(format!("bath operator {alpha}")));
            }
            let bath = HermitianOperator::new(b.clone())
                .map_err(|_| Error::InvalidModel(format!("bath operator {alpha} is not Hermitian")))?;
            if let Some(bound) = norm_bound {
                let norm = bath.spectral_norm();
                if norm > bound + NORM_BOUND_SLACK {
                    return Err(Error::InvalidModel(format!(
                        "bath operator {alpha} has norm {norm} above bound {bound}"
                    )));
                }
            }
            couplings.push(Coupling { system: s, bath });
        }
        Ok(Self {
            d_s: couplings[0].system.dim(),
            d_b,
            couplings,
        })
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// Number of couplings `D`, including the pure-bath term.
    pub fn num_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn system_ops(&self) -> Vec<ComplexOperator> {
        self.couplings.iter().map(|c| c.system.as_operator().clone()).collect()
    }

    pub fn bath_ops(&self) -> Vec<ComplexOperator> {
        self.couplings.iter().map(|c| c.bath.as_operator().clone()).collect()
    }

    pub fn hamiltonian(&self) -> HermitianOperator {
        let mut h = ComplexOperator::zeros(self.d_s * self.d_b);
        for c in &self.couplings {
            h += &c.system.kron(&c.bath);
        }
        HermitianOperator::new(h).expect("sum of Hermitian products")
    }

    /// The same model as a degree-0 time-dependent model.
    pub fn to_time_dependent(&self) -> TimeDependentModel {
        TimeDependentModel {
            d_s: self.d_s,
            d_b: self.d_b,
            couplings: self
                .couplings
                .iter()
                .map(|c| TimeCoupling {
                    system: c.system.clone(),
                    bath: PolyBathSeries::constant(c.bath.clone()),
                })
                .collect(),
        }
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"static");
        for c in &self.couplings {
            hash_operator(&mut h, &c.system);
            hash_operator(&mut h, &c.bath);
        }
        hex::encode(h.finalize())
    }
}

/// `B'(t) = Σ_p B'_p t^p / p!` with Hermitian coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyBathSeries {
    coefficients: Vec<HermitianOperator>,
}

impl PolyBathSeries {
    pub fn new(coefficients: Vec<HermitianOperator>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::InvalidModel("empty bath series".into()))?;
        let d = first.dim();
        if coefficients.iter().any(|c| c.dim() != d) {
            return Err(Error::dims("bath series coefficients"));
        }
        Ok(Self { coefficients })
    }

    pub fn constant(b: HermitianOperator) -> Self {
        Self {
            coefficients: vec![b],
        }
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.coefficients[0].dim()
    }

    /// Coefficients `B'_p` in the `t^p / p!` normalization.
    pub fn coefficients(&self) -> &[HermitianOperator] {
        &self.coefficients
    }

    pub fn evaluate(&self, t: f64) -> ComplexOperator {
        let mut acc = ComplexOperator::zeros(self.dim());
        let mut weight = 1.0;
        for (p, c) in self.coefficients.iter().enumerate() {
            if p > 0 {
                weight *= t / p as f64;
            }
            acc += &c.scale_real(weight);
        }
        acc
    }

    /// Adds `op` to the coefficient of `t^p / p!`, growing the degree if needed.
    fn add_to_coefficient(&mut self, p: usize, op: &ComplexOperator) -> Result<()> {
        let d = self.dim();
        while self.coefficients.len() <= p {
            self.coefficients.push(HermitianOperator::zeros(d));
        }
        let updated = self.coefficients[p].as_operator() + op;
        self.coefficients[p] = HermitianOperator::new(updated)?;
        Ok(())
    }
}

/// One coupling `S_α ⊗ B'_α(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeCoupling {
    pub system: HermitianOperator,
    pub bath: PolyBathSeries,
}

/// Analytically (here: polynomially) time-dependent system-bath Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeDependentModel {
    d_s: usize,
    d_b: usize,
    couplings: Vec<TimeCoupling>,
}

impl TimeDependentModel {
    pub fn new(system_ops: &[ComplexOperator], series: Vec<PolyBathSeries>) -> Result<Self> {
        let systems = validate_system_ops(system_ops)?;
        if series.len() != systems.len() {
            return Err(Error::InvalidModel(format!(
                "{} system operators but {} bath series",
                systems.len(),
                series.len()
            )));
        }
        let d_b = series[0].dim();
        if series.iter().any(|s| s.dim() != d_b) {
            return Err(Error::dims("bath series"));
        }
        Ok(Self {
            d_s: systems[0].dim(),
            d_b,
            couplings: systems
                .into_iter()
                .zip(series)
                .map(|(system, bath)| TimeCoupling { system, bath })
                .collect(),
        })
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    pub fn num_couplings(&self) -> usize {
        self.couplings.len()
    }

    pub fn couplings(&self) -> &[TimeCoupling] {
        &self.couplings
    }

    pub fn system_ops(&self) -> Vec<ComplexOperator> {
        self.couplings.iter().map(|c| c.system.as_operator().clone()).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.couplings.iter().map(|c| c.bath.degree()).max().unwrap_or(0)
    }

    /// The static model obtained by freezing every series at `t = 0`.
    pub fn constant_part(&self) -> StaticModel {
        StaticModel {
            d_s: self.d_s,
            d_b: self.d_b,
            couplings: self
                .couplings
                .iter()
                .map(|c| Coupling {
                    system: c.system.clone(),
                    bath: c.bath.coefficients()[0].clone(),
                })
                .collect(),
        }
    }

    /// Bath operators `B'_α(t)`.
    pub fn bath_at(&self, t: f64) -> Vec<ComplexOperator> {
        self.couplings.iter().map(|c| c.bath.evaluate(t)).collect()
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(b"time-dependent");
        for c in &self.couplings {
            hash_operator(&mut h, &c.system);
            h.update((c.bath.degree() as u64).to_le_bytes());
            for b in c.bath.coefficients() {
                hash_operator(&mut h, b);
            }
        }
        hex::encode(h.finalize())
    }
}

/// Borrowed view of either model kind.
#[derive(Clone, Copy, Debug)]
pub enum ModelRef<'a> {
    Static(&'a StaticModel),
    TimeDependent(&'a TimeDependentModel),
}

impl<'a> From<&'a StaticModel> for ModelRef<'a> {
    fn from(m: &'a StaticModel) -> Self {
        ModelRef::Static(m)
    }
}

impl<'a> From<&'a TimeDependentModel> for ModelRef<'a> {
    fn from(m: &'a TimeDependentModel) -> Self {
        ModelRef::TimeDependent(m)
    }
}

impl ModelRef<'_> {
    pub fn d_s(&self) -> usize {
        match self {
            ModelRef::Static(m) => m.d_s(),
            ModelRef::TimeDependent(m) => m.d_s(),
        }
    }

    pub fn d_b(&self) -> usize {
        match self {
            ModelRef::Static(m) => m.d_b(),
            ModelRef::TimeDependent(m) => m.d_b(),
        }
    }

    pub fn system_ops(&self) -> Vec<ComplexOperator> {
        match self {
            ModelRef::Static(m) => m.system_ops(),
            ModelRef::TimeDependent(m) => m.system_ops(),
        }
    }

    pub fn num_couplings(&self) -> usize {
        match self {
            ModelRef::Static(m) => m.num_couplings(),
            ModelRef::TimeDependent(m) => m.num_couplings(),
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self, ModelRef::Static(_))
    }

    /// Full Hamiltonian at time `t`.
    pub fn hamiltonian_at(&self, t: f64) -> ComplexOperator {
        match self {
            ModelRef::Static(m) => m.hamiltonian().into_operator(),
            ModelRef::TimeDependent(m) => evaluate_hamiltonian(m, t).into_operator(),
        }
    }

    /// Pure-bath term `B_0` (or `B'_0(t)`) at time `t`.
    pub fn bath_drift_at(&self, t: f64) -> ComplexOperator {
        match self {
            ModelRef::Static(m) => m.couplings()[0].bath.as_operator().clone(),
            ModelRef::TimeDependent(m) => m.couplings()[0].bath.evaluate(t),
        }
    }

    pub fn digest(&self) -> String {
        match self {
            ModelRef::Static(m) => m.digest(),
            ModelRef::TimeDependent(m) => m.digest(),
        }
    }
}

/// `H'(t) = Σ_α S_α ⊗ B'_α(t)`.
pub fn evaluate_hamiltonian(model: &TimeDependentModel, t: f64) -> HermitianOperator {
    let mut h = ComplexOperator::zeros(model.d_s * model.d_b);
    for c in &model.couplings {
        h += &c.system.kron(&c.bath.evaluate(t));
    }
    // Hermitian up to rounding: symmetrize to keep the invariant tight.
    let sym = (&h + &h.adjoint()).scale_real(0.5);
    HermitianOperator::new(sym).expect("symmetrized sum is Hermitian")
}

/// Gaussian Hermitian matrix (real diagonal, complex off-diagonal) rescaled
/// to the given spectral norm.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, norm: f64) -> HermitianOperator {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    for r in 0..dim {
        for c in r..dim {
            let re: f64 = StandardNormal.sample(rng);
            if r == c {
                m[(r, c)] = C64::new(re, 0.0);
            } else {
                let im: f64 = StandardNormal.sample(rng);
                let z = C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
                m[(r, c)] = z;
                m[(c, r)] = z.conj();
            }
        }
    }
    let raw = HermitianOperator::new(ComplexOperator::from_matrix_unchecked(m))
        .expect("constructed Hermitian");
    let current = raw.spectral_norm();
    if current == 0.0 {
        return raw;
    }
    HermitianOperator::new(raw.scale_real(norm / current)).expect("scaled Hermitian")
}

fn check_random_args(d_b: usize, norm_bound: f64) -> Result<()> {
    if d_b == 0 {
        return Err(Error::InvalidModel("bath dimension must be at least 1".into()));
    }
    if !(norm_bound > 0.0 && norm_bound.is_finite()) {
        return Err(Error::InvalidModel(format!("norm bound {norm_bound} must be positive")));
    }
    Ok(())
}

/// Random static model: every `B_α` is an independent Gaussian Hermitian
/// matrix with spectral norm exactly `norm_bound`.
pub fn random_static_model(
    d_s: usize,
    d_b: usize,
    system_ops: &[ComplexOperator],
    norm_bound: f64,
    seed: u64,
) -> Result<StaticModel> {
    check_random_args(d_b, norm_bound)?;
    let systems = validate_system_ops(system_ops)?;
    if systems[0].dim() != d_s {
        return Err(Error::dims(format!("system ops have dim {}, d_S = {d_s}", systems[0].dim())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let baths: Vec<ComplexOperator> = (0..system_ops.len())
        .map(|_| random_hermitian(&mut rng, d_b, norm_bound).into_operator())
        .collect();
    StaticModel::new(system_ops, &baths, Some(norm_bound))
}

/// Random time-dependent model of the given polynomial degree; every series
/// coefficient is an independent Gaussian Hermitian matrix with spectral
/// norm `norm_bound`. Coefficients are drawn coupling by coupling, `p`
/// innermost.
pub fn random_time_dependent_model(
    d_s: usize,
    d_b: usize,
    system_ops: &[ComplexOperator],
    degree: usize,
    norm_bound: f64,
    seed: u64,
) -> Result<TimeDependentModel> {
    check_random_args(d_b, norm_bound)?;
    let systems = validate_system_ops(system_ops)?;
    if systems[0].dim() != d_s {
        return Err(Error::dims(format!("system ops have dim {}, d_S = {d_s}", systems[0].dim())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let series = (0..system_ops.len())
        .map(|_| {
            PolyBathSeries::new(
                (0..=degree)
                    .map(|_| random_hermitian(&mut rng, d_b, norm_bound))
                    .collect(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    TimeDependentModel::new(system_ops, series)
}

/// Real coefficients `c_α` with `op = Σ_α c_α S_α`, by least squares on the
/// trace inner product. Fails when the residual exceeds
/// [`DRIFT_RESIDUAL_TOLERANCE`] (relative to `max(1, ‖op‖_F)`).
pub fn decompose_in_span(op: &ComplexOperator, basis: &[ComplexOperator]) -> Result<Vec<f64>> {
    let n = basis.len();
    if basis.iter().any(|b| b.dim() != op.dim()) {
        return Err(Error::dims("drift coefficient vs system operators"));
    }
    let inner = |a: &ComplexOperator, b: &ComplexOperator| -> C64 {
        a.matrix().iter().zip(b.matrix().iter()).map(|(x, y)| x.conj() * y).sum()
    };
    let gram = DMatrix::<C64>::from_fn(n, n, |i, j| inner(&basis[i], &basis[j]));
    let rhs = DVector::<C64>::from_fn(n, |i, _| inner(&basis[i], op));
    let pinv = gram
        .pseudo_inverse(1e-12)
        .map_err(|e| Error::arg(format!("drift decomposition failed: {e}")))?;
    let coeffs: Vec<f64> = (pinv * rhs).iter().map(|z| z.re).collect();
    let mut recon = ComplexOperator::zeros(op.dim());
    for (c, b) in coeffs.iter().zip(basis) {
        recon += &b.scale_real(*c);
    }
    let residual = recon.frobenius_distance(op);
    if residual > DRIFT_RESIDUAL_TOLERANCE * op.frobenius_norm().max(1.0) {
        return Err(Error::InvalidModel(format!(
            "drift term is outside span{{S_α}} (residual {residual:.3e})"
        )));
    }
    Ok(coeffs)
}

/// Folds a system drift `H_S(t) = Σ_p H_p t^p / p!` into the couplings:
/// each `H_p = Σ_α c_α S_α` adds `c_α I_B` to coefficient `p` of `B'_α`.
pub fn absorb_drift(
    model: &TimeDependentModel,
    drift: &[ComplexOperator],
) -> Result<TimeDependentModel> {
    let basis = model.system_ops();
    let ident_b = ComplexOperator::identity(model.d_b);
    let mut out = model.clone();
    for (p, h_p) in drift.iter().enumerate() {
        if !h_p.is_hermitian(1e-12) {
            return Err(Error::InvalidModel(format!("drift coefficient {p} is not Hermitian")));
        }
        let coeffs = decompose_in_span(h_p, &basis)?;
        for (alpha, c) in coeffs.into_iter().enumerate() {
            if c != 0.0 {
                out.couplings[alpha]
                    .bath
                    .add_to_coefficient(p, &ident_b.scale_real(c))?;
            }
        }
    }
    Ok(out)
}
