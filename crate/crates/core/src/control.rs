//! Instantaneous-pulse control sequences and their toggling frames.
//!
//! A sequence over the normalized interval `θ ∈ [0, 1]` applies pulse `P_j`
//! at `θ_j`. Scaling to duration `T` places the pulses at `θ_j T`; the
//! control propagator `U_c(θ)` is then the ordered product of all pulses
//! with `θ_j < θ`, piecewise constant between pulses.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::linalg::{ComplexOperator, HermitianOperator, C64, ONE, ZERO};

/// Unitarity tolerance for pulses and targets.
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Tolerance for a frame operator being a real multiple of the reference.
pub const PROPORTIONALITY_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Free,
    Periodic,
    Udd,
}

impl SequenceKind {
    pub const ALL: [SequenceKind; 3] = [SequenceKind::Free, SequenceKind::Periodic, SequenceKind::Udd];

    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Free => "free",
            SequenceKind::Periodic => "periodic",
            SequenceKind::Udd => "udd",
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SequenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" => Ok(SequenceKind::Free),
            "periodic" => Ok(SequenceKind::Periodic),
            "udd" => Ok(SequenceKind::Udd),
            other => Err(Error::arg(format!("unknown sequence kind `{other}`"))),
        }
    }
}

/// Pulse timings on `(0, 1]` for the built-in families.
pub fn pulse_fractions(kind: SequenceKind, n: usize) -> Vec<f64> {
    match kind {
        SequenceKind::Free => vec![],
        SequenceKind::Periodic => (1..=n).map(|j| (j as f64 - 0.5) / n as f64).collect(),
        SequenceKind::Udd => (1..=n)
            .map(|j| {
                let s = (j as f64 * PI / (2 * n + 2) as f64).sin();
                s * s
            })
            .collect(),
    }
}

/// An instantaneous unitary pulse at a fraction of the total duration.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseEvent {
    theta: f64,
    pulse: ComplexOperator,
}

impl PulseEvent {
    pub fn new(theta: f64, pulse: ComplexOperator) -> Result<Self> {
        if !(theta > 0.0 && theta <= 1.0) {
            return Err(Error::arg(format!("pulse fraction {theta} outside (0, 1]")));
        }
        let defect = pulse.unitarity_defect();
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { theta, pulse })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn pulse(&self) -> &ComplexOperator {
        &self.pulse
    }
}

/// System operators `Ω` that the error propagator must commute with.
#[derive(Clone, Debug, PartialEq)]
pub struct ProtectedSet {
    members: Vec<HermitianOperator>,
}

impl ProtectedSet {
    pub fn new(members: Vec<ComplexOperator>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::arg("protected set must be nonempty"))?;
        let d = first.dim();
        let members = members
            .into_iter()
            .map(|m| {
                if m.dim() != d {
                    return Err(Error::dims("protected set members"));
                }
                HermitianOperator::new(m)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { members })
    }

    /// Generalized Gell-Mann basis of `su(d)`; for a qubit this is
    /// `{σ_x, σ_y, σ_z}`. Commuting with all of them forces a pure-bath
    /// residual.
    pub fn full_algebra(d: usize) -> Self {
        let mut members = Vec::new();
        let unit = |r: usize, c: usize, v: C64| {
            let mut rows = vec![vec![ZERO; d]; d];
            rows[r][c] = v;
            rows
        };
        for j in 0..d {
            for k in j + 1..d {
                let mut sym = unit(j, k, ONE);
                sym[k][j] = ONE;
                members.push(ComplexOperator::from_rows(&sym).unwrap());
                let mut anti = unit(j, k, C64::new(0.0, -1.0));
                anti[k][j] = C64::new(0.0, 1.0);
                members.push(ComplexOperator::from_rows(&anti).unwrap());
            }
        }
        for l in 1..d {
            let norm = (2.0 / (l * (l + 1)) as f64).sqrt();
            let diag: Vec<C64> = (0..d)
                .map(|i| {
                    if i < l {
                        C64::new(norm, 0.0)
                    } else if i == l {
                        C64::new(-(l as f64) * norm, 0.0)
                    } else {
                        ZERO
                    }
                })
                .collect();
            members.push(ComplexOperator::diagonal(&diag));
        }
        if members.is_empty() {
            members.push(ComplexOperator::identity(d));
        }
        Self::new(members).expect("Gell-Mann matrices are Hermitian")
    }

    pub fn members(&self) -> &[HermitianOperator] {
        &self.members
    }

    pub fn dim(&self) -> usize {
        self.members[0].dim()
    }
}

/// Time-ordered instantaneous pulses, the declared target gate `Q` and the
/// protected set `Ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlSequence {
    d_s: usize,
    pulses: Vec<PulseEvent>,
    target: ComplexOperator,
    omega: ProtectedSet,
}

/// `P_m ⋯ P_1`, identity for an empty list.
fn ordered_product(d_s: usize, pulses: &[PulseEvent]) -> ComplexOperator {
    pulses
        .iter()
        .fold(ComplexOperator::identity(d_s), |acc, p| &p.pulse * &acc)
}

impl ControlSequence {
    /// Validates ordering, dimensions and that `Q` equals the pulse product
    /// up to a global phase.
    pub fn new(
        d_s: usize,
        pulses: Vec<PulseEvent>,
        target: ComplexOperator,
        omega: ProtectedSet,
    ) -> Result<Self> {
        if pulses.iter().any(|p| p.pulse.dim() != d_s) || target.dim() != d_s || omega.dim() != d_s {
            return Err(Error::dims(format!("control sequence on a {d_s}-dim system")));
        }
        if pulses.windows(2).any(|w| w[1].theta <= w[0].theta) {
            return Err(Error::arg("pulse fractions must be strictly increasing"));
        }
        let defect = target.unitarity_defect();
        if defect > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(defect));
        }
        let product = ordered_product(d_s, &pulses);
        let dev = product.distance_up_to_phase(&target);
        if dev > UNITARY_TOLERANCE {
            return Err(Error::arg(format!(
                "declared target differs from the pulse product by {dev:.3e} after phase alignment"
            )));
        }
        Ok(Self {
            d_s,
            pulses,
            target,
            omega,
        })
    }

    /// Sequence whose target is the ordered pulse product.
    pub fn from_pulses(d_s: usize, pulses: Vec<PulseEvent>, omega: ProtectedSet) -> Result<Self> {
        let target = ordered_product(d_s, &pulses);
        Self::new(d_s, pulses, target, omega)
    }

    pub fn d_s(&self) -> usize {
        self.d_s
    }

    pub fn pulses(&self) -> &[PulseEvent] {
        &self.pulses
    }

    pub fn thetas(&self) -> Vec<f64> {
        self.pulses.iter().map(|p| p.theta).collect()
    }

    pub fn target(&self) -> &ComplexOperator {
        &self.target
    }

    pub fn omega(&self) -> &ProtectedSet {
        &self.omega
    }

    pub fn with_omega(mut self, omega: ProtectedSet) -> Result<Self> {
        if omega.dim() != self.d_s {
            return Err(Error::dims("protected set vs sequence"));
        }
        self.omega = omega;
        Ok(self)
    }

    pub fn pulse_product(&self) -> ComplexOperator {
        ordered_product(self.d_s, &self.pulses)
    }

    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        let mut feed = |op: &ComplexOperator| {
            h.update((op.dim() as u64).to_le_bytes());
            for z in op.matrix().iter() {
                h.update(z.re.to_bits().to_le_bytes());
                h.update(z.im.to_bits().to_le_bytes());
            }
        };
        for p in &self.pulses {
            feed(&ComplexOperator::diagonal(&[C64::new(p.theta, 0.0)]));
            feed(&p.pulse);
        }
        feed(&self.target);
        for m in self.omega.members() {
            feed(m);
        }
        hex::encode(h.finalize())
    }
}

/// Builds a `free`, `periodic` or `udd` sequence of `n` identical pulses.
/// The target is the pulse product (`axis^n`) and `Ω` is the full algebra.
pub fn generate_sequence(
    kind: SequenceKind,
    n: usize,
    pulse_axis: &ComplexOperator,
) -> Result<ControlSequence> {
    let defect = pulse_axis.unitarity_defect();
    if defect > UNITARY_TOLERANCE {
        return Err(Error::NotUnitary(defect));
    }
    let d_s = pulse_axis.dim();
    let pulses = pulse_fractions(kind, n)
        .into_iter()
        .map(|theta| PulseEvent::new(theta, pulse_axis.clone()))
        .collect::<Result<Vec<_>>>()?;
    ControlSequence::from_pulses(d_s, pulses, ProtectedSet::full_algebra(d_s))
}

/// One interval of the toggling frame with constant conjugated operators.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameSegment {
    pub start: f64,
    pub end: f64,
    /// System operators conjugated by the control propagator, one per coupling.
    pub ops: Vec<ComplexOperator>,
    /// Control propagator `U_c(θ)` on this segment.
    pub control: ComplexOperator,
}

/// Piecewise-constant `Ŝ_α(θ) = U_c†(θ) S_α U_c(θ)` on a partition of `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TogglingFrame {
    segments: Vec<FrameSegment>,
}

impl TogglingFrame {
    /// Validates that segments partition `[0, 1]` and carry equal-length
    /// operator lists.
    pub fn from_segments(segments: Vec<FrameSegment>) -> Result<Self> {
        let first = segments.first().ok_or_else(|| Error::arg("frame has no segments"))?;
        if first.start != 0.0 || segments.last().unwrap().end != 1.0 {
            return Err(Error::arg("frame must start at 0 and end at 1"));
        }
        if segments.windows(2).any(|w| w[0].end != w[1].start) {
            return Err(Error::arg("frame segments are not contiguous"));
        }
        if segments.iter().any(|s| s.end <= s.start) {
            return Err(Error::arg("frame segment with non-positive length"));
        }
        let n_ops = first.ops.len();
        if segments.iter().any(|s| s.ops.len() != n_ops) {
            return Err(Error::arg("frame segments carry different operator counts"));
        }
        Ok(Self { segments })
    }

    pub fn segments(&self) -> &[FrameSegment] {
        &self.segments
    }

    pub fn num_ops(&self) -> usize {
        self.segments[0].ops.len()
    }

    pub fn d_s(&self) -> usize {
        self.segments[0].control.dim()
    }

    /// Segment containing `θ` (right-continuous; `θ = 1` maps to the last).
    pub fn segment_at(&self, theta: f64) -> &FrameSegment {
        self.segments
            .iter()
            .find(|s| theta < s.end)
            .unwrap_or_else(|| self.segments.last().unwrap())
    }
}

/// Conjugates each system operator by the control propagator on every
/// inter-pulse interval.
pub fn toggling_frame(seq: &ControlSequence, system_ops: &[ComplexOperator]) -> Result<TogglingFrame> {
    if system_ops.iter().any(|s| s.dim() != seq.d_s) {
        return Err(Error::dims("system operators vs control sequence"));
    }
    for p in &seq.pulses {
        let d = p.pulse.unitarity_defect();
        if d > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary(d));
        }
    }
    let mut segments = Vec::new();
    let mut u = ComplexOperator::identity(seq.d_s);
    let mut start = 0.0;
    let conj = |u: &ComplexOperator| -> Vec<ComplexOperator> {
        let ud = u.adjoint();
        system_ops.iter().map(|s| &(&ud * s) * u).collect()
    };
    for p in &seq.pulses {
        if p.theta > start {
            segments.push(FrameSegment {
                start,
                end: p.theta,
                ops: conj(&u),
                control: u.clone(),
            });
        }
        u = &p.pulse * &u;
        start = p.theta;
    }
    if start < 1.0 {
        segments.push(FrameSegment {
            start,
            end: 1.0,
            ops: conj(&u),
            control: u,
        });
    }
    TogglingFrame::from_segments(segments)
}

/// Real piecewise-constant multiplier `F(θ)` with `Ŝ(θ) = F(θ) S_ref`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModulationProfile {
    /// `(start, end, F)` for each segment.
    pub pieces: Vec<(f64, f64, f64)>,
}

impl ModulationProfile {
    pub fn value(&self, theta: f64) -> f64 {
        self.pieces
            .iter()
            .find(|p| theta < p.1)
            .or(self.pieces.last())
            .map(|p| p.2)
            .unwrap_or(0.0)
    }

    /// `∫_0^1 F(θ) θ^p dθ` in closed form.
    pub fn moment(&self, p: u32) -> f64 {
        let k = p as i32 + 1;
        self.pieces
            .iter()
            .map(|&(a, b, f)| f * (b.powi(k) - a.powi(k)) / k as f64)
            .sum()
    }

    pub fn signs(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.2.signum()).collect()
    }
}

/// Scalar shadow of coupling `alpha` in the frame, relative to `s_ref`.
pub fn modulation_profile(
    frame: &TogglingFrame,
    alpha: usize,
    s_ref: &ComplexOperator,
) -> Result<ModulationProfile> {
    if alpha >= frame.num_ops() {
        return Err(Error::arg(format!("coupling index {alpha} out of range")));
    }
    let ref_norm_sq: f64 = s_ref.matrix().iter().map(|z| z.norm_sqr()).sum();
    if ref_norm_sq == 0.0 {
        return Err(Error::arg("reference operator is zero"));
    }
    let mut pieces = Vec::with_capacity(frame.segments.len());
    for seg in &frame.segments {
        let op = &seg.ops[alpha];
        if op.dim() != s_ref.dim() {
            return Err(Error::dims("frame operator vs reference"));
        }
        let overlap: C64 = s_ref
            .matrix()
            .iter()
            .zip(op.matrix().iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let f = overlap.re / ref_norm_sq;
        let residual = op.frobenius_distance(&s_ref.scale_real(f));
        if residual > PROPORTIONALITY_TOLERANCE {
            return Err(Error::NotProportional(residual));
        }
        pieces.push((seg.start, seg.end, f));
    }
    Ok(ModulationProfile { pieces })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::pauli::*;

    fn dephasing() -> Vec<ComplexOperator> {
        vec![identity(), sigma_z()]
    }

    #[test]
    fn udd_timings() {
        let seq = generate_sequence(SequenceKind::Udd, 1, &sigma_x()).unwrap();
        assert_eq!(seq.thetas().len(), 1);
        assert!((seq.thetas()[0] - 0.5).abs() < 1e-15);
        assert!(seq.target().distance_up_to_phase(&sigma_x()) < 1e-15);

        let seq = generate_sequence(SequenceKind::Udd, 2, &sigma_x()).unwrap();
        let t = seq.thetas();
        assert!((t[0] - 0.25).abs() < 1e-15 && (t[1] - 0.75).abs() < 1e-15);
        assert!(seq.target().distance_up_to_phase(&identity()) < 1e-15);

        let t = pulse_fractions(SequenceKind::Udd, 3);
        for (got, want) in t.iter().zip([0.146447, 0.5, 0.853553]) {
            assert!((got - want).abs() < 1e-6);
        }
    }

    #[test]
    fn periodic_and_free() {
        let t = pulse_fractions(SequenceKind::Periodic, 4);
        assert_eq!(t, vec![0.125, 0.375, 0.625, 0.875]);
        let free = generate_sequence(SequenceKind::Free, 5, &sigma_x()).unwrap();
        assert!(free.pulses().is_empty());
        assert_eq!(free.target(), &identity());
    }

    #[test]
    fn full_algebra_qubit_is_pauli() {
        let omega = ProtectedSet::full_algebra(2);
        let m = omega.members();
        assert_eq!(m.len(), 3);
        assert_eq!(m[0].as_operator(), &sigma_x());
        assert_eq!(m[1].as_operator(), &sigma_y());
        assert_eq!(m[2].as_operator(), &sigma_z());
        assert_eq!(ProtectedSet::full_algebra(3).members().len(), 8);
    }

    #[test]
    fn rejects_invalid_sequences() {
        let half = ComplexOperator::identity(2).scale_real(0.5);
        assert!(matches!(
            generate_sequence(SequenceKind::Udd, 2, &half),
            Err(Error::NotUnitary(_))
        ));
        assert!(PulseEvent::new(0.0, sigma_x()).is_err());
        assert!(PulseEvent::new(1.5, sigma_x()).is_err());
        let p = vec![
            PulseEvent::new(0.6, sigma_x()).unwrap(),
            PulseEvent::new(0.4, sigma_x()).unwrap(),
        ];
        assert!(ControlSequence::from_pulses(2, p, ProtectedSet::full_algebra(2)).is_err());
        let p = vec![PulseEvent::new(0.5, sigma_x()).unwrap()];
        assert!(ControlSequence::new(2, p, identity(), ProtectedSet::full_algebra(2)).is_err());
        assert!(ProtectedSet::new(vec![]).is_err());
    }

    #[test]
    fn frames() {
        let free = generate_sequence(SequenceKind::Free, 0, &sigma_x()).unwrap();
        let f = toggling_frame(&free, &dephasing()).unwrap();
        assert_eq!(f.segments().len(), 1);
        assert_eq!(f.segments()[0].ops[1], sigma_z());

        let hahn = generate_sequence(SequenceKind::Udd, 1, &sigma_x()).unwrap();
        let f = toggling_frame(&hahn, &dephasing()).unwrap();
        let s = f.segments();
        assert_eq!(s.len(), 2);
        assert_eq!((s[0].start, s[1].end), (0.0, 1.0));
        assert!((s[0].end - 0.5).abs() < 1e-15 && s[1].start == s[0].end);
        assert_eq!(s[0].ops[1], sigma_z());
        assert_eq!(s[1].ops[1], sigma_z().scale_real(-1.0));
        assert_eq!(s[1].ops[0], identity());

        let udd2 = generate_sequence(SequenceKind::Udd, 2, &sigma_x()).unwrap();
        let f = toggling_frame(&udd2, &dephasing()).unwrap();
        let prof = modulation_profile(&f, 1, &sigma_z()).unwrap();
        assert_eq!(prof.signs(), vec![1.0, -1.0, 1.0]);
        let b: Vec<(f64, f64)> = prof.pieces.iter().map(|p| (p.0, p.1)).collect();
        assert!((b[0].1 - 0.25).abs() < 1e-15 && (b[2].0 - 0.75).abs() < 1e-15);
    }

    #[test]
    fn profiles() {
        let free = generate_sequence(SequenceKind::Free, 0, &sigma_x()).unwrap();
        let prof = modulation_profile(&toggling_frame(&free, &dephasing()).unwrap(), 1, &sigma_z()).unwrap();
        assert_eq!(prof.signs(), vec![1.0]);
        assert_eq!(prof.value(0.3), 1.0);

        let hahn = generate_sequence(SequenceKind::Udd, 1, &sigma_x()).unwrap();
        let prof = modulation_profile(&toggling_frame(&hahn, &dephasing()).unwrap(), 1, &sigma_z()).unwrap();
        assert_eq!(prof.signs(), vec![1.0, -1.0]);
        assert!((prof.pieces[0].1 - 0.5).abs() < 1e-15);
        assert!(prof.moment(0).abs() < 1e-15);
        assert!((prof.moment(1) + 0.25).abs() < 1e-15);

        let udd3 = generate_sequence(SequenceKind::Udd, 3, &sigma_x()).unwrap();
        let prof = modulation_profile(&toggling_frame(&udd3, &dephasing()).unwrap(), 1, &sigma_z()).unwrap();
        assert_eq!(prof.signs(), vec![1.0, -1.0, 1.0, -1.0]);
    }

    #[test]
    fn non_proportional_frame_is_rejected() {
        // a Y pulse maps σ_x to -σ_x but a Hadamard-like pulse mixes axes
        let h = (&sigma_x() + &sigma_z()).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let seq = ControlSequence::from_pulses(
            2,
            vec![PulseEvent::new(0.5, h).unwrap()],
            ProtectedSet::full_algebra(2),
        )
        .unwrap();
        let f = toggling_frame(&seq, &dephasing()).unwrap();
        assert!(matches!(
            modulation_profile(&f, 1, &sigma_z()),
            Err(Error::NotProportional(_))
        ));
    }

    #[test]
    fn pulse_at_one_closes_frame() {
        let seq = ControlSequence::from_pulses(
            2,
            vec![PulseEvent::new(1.0, sigma_x()).unwrap()],
            ProtectedSet::full_algebra(2),
        )
        .unwrap();
        let f = toggling_frame(&seq, &dephasing()).unwrap();
        assert_eq!(f.segments().len(), 1);
        assert_eq!(seq.target(), &sigma_x());
    }
}
