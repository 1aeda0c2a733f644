//! Polarization-mode model of the double-pass down-conversion source.
//!
//! States are polynomials in photon creation operators acting on the vacuum.
//! A [`PhotonTermSet`] maps each monomial (a sorted multiset of
//! [`ModeLabel`]s) to its coefficient. Linear optics acts on the creation
//! operators, so waveplates and beam splitters are linear substitutions that
//! get expanded term by term. The Fock-space amplitude of a monomial is its
//! coefficient times Π√(nₖ!), which only matters outside the
//! one-photon-per-mode sector.
//!
//! Pipeline: [`emit_pairs`] → [`retune_hwp`] on mode a → [`pbs`] →
//! [`postselect_fourfold`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::qstate::QuantumState;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PhotonicsError {
    #[error("term set mixes pre-PBS and post-PBS modes")]
    MixedNamespace,
    #[error("expected {expected} modes, found {found}")]
    WrongNamespace {
        expected: &'static str,
        found: &'static str,
    },
    #[error("no four-fold events survive post-selection")]
    NoFourfoldEvents,
    #[error("invalid source config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Polarization {
    H,
    V,
}

/// Spatial mode: `A`–`D` before the beam splitters, `Out1`–`Out4` after.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Port {
    A,
    B,
    C,
    D,
    Out1,
    Out2,
    Out3,
    Out4,
}

impl Port {
    pub fn is_output(self) -> bool {
        matches!(self, Port::Out1 | Port::Out2 | Port::Out3 | Port::Out4)
    }

    /// Detector index 0–3 for output ports.
    pub fn output_index(self) -> Option<usize> {
        match self {
            Port::Out1 => Some(0),
            Port::Out2 => Some(1),
            Port::Out3 => Some(2),
            Port::Out4 => Some(3),
            _ => None,
        }
    }

    pub fn output(index: usize) -> Port {
        [Port::Out1, Port::Out2, Port::Out3, Port::Out4][index]
    }
}

impl fmt::Display for Port {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Port::A => "a",
            Port::B => "b",
            Port::C => "c",
            Port::D => "d",
            Port::Out1 => "1",
            Port::Out2 => "2",
            Port::Out3 => "3",
            Port::Out4 => "4",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeLabel {
    pub port: Port,
    pub pol: Polarization,
}

impl ModeLabel {
    pub const fn new(port: Port, pol: Polarization) -> Self {
        Self { port, pol }
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{:?}", self.port, self.pol)
    }
}

/// Sorted multiset of occupied modes.
pub type Monomial = Vec<ModeLabel>;

/// Superposition of multi-photon terms, keyed by creation-operator monomial.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PhotonTermSet {
    terms: BTreeMap<Monomial, Complex64>,
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Π nₖ! over the occupation numbers of a sorted monomial.
fn occupation_weight(m: &[ModeLabel]) -> f64 {
    let mut w = 1.0;
    let mut run = 0;
    for (i, mode) in m.iter().enumerate() {
        run += 1;
        if i + 1 == m.len() || m[i + 1] != *mode {
            w *= factorial(run);
            run = 0;
        }
    }
    w
}

impl PhotonTermSet {
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Complex64::new(1.0, 0.0));
        Self { terms }
    }

    /// Builds a set from (modes, coefficient) pairs; modes need not be sorted
    /// and repeated monomials add up.
    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<ModeLabel>, Complex64)>) -> Self {
        let mut out = Self::default();
        for (mut m, c) in terms {
            m.sort_unstable();
            out.add_term(m, c);
        }
        out.prune();
        out
    }

    fn add_term(&mut self, m: Monomial, c: Complex64) {
        *self.terms.entry(m).or_insert(ZERO) += c;
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() > 1e-15);
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, modes: &[ModeLabel]) -> Complex64 {
        let mut m = modes.to_vec();
        m.sort_unstable();
        self.terms.get(&m).copied().unwrap_or(ZERO)
    }

    /// Fock amplitude: coefficient × Π√(nₖ!).
    pub fn fock_amplitude(&self, modes: &[ModeLabel]) -> Complex64 {
        let mut m = modes.to_vec();
        m.sort_unstable();
        self.coefficient(&m) * occupation_weight(&m).sqrt()
    }

    /// Photon numbers present, ascending.
    pub fn photon_numbers(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.terms.keys().map(Vec::len).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    /// Fock-space inner product ⟨self|other⟩.
    pub fn inner(&self, other: &PhotonTermSet) -> Complex64 {
        self.terms
            .iter()
            .filter_map(|(m, a)| {
                other
                    .terms
                    .get(m)
                    .map(|b| a.conj() * b * occupation_weight(m))
            })
            .sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &PhotonTermSet) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out.prune();
        out
    }

    /// Operator product: creation operators commute, so monomials merge.
    pub fn product(&self, other: &PhotonTermSet) -> Self {
        let mut out = Self::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let mut m: Monomial = m1.iter().chain(m2).copied().collect();
                m.sort_unstable();
                out.add_term(m, c1 * c2);
            }
        }
        out.prune();
        out
    }

    /// Substitutes every creation operator `a†ₘ → Σ cᵢ a†ᵢ` and expands.
    pub fn map_modes<F>(&self, f: F) -> Self
    where
        F: Fn(ModeLabel) -> Vec<(ModeLabel, Complex64)>,
    {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let mut partial: Vec<(Monomial, Complex64)> = vec![(Vec::new(), *c)];
            for &mode in m {
                let images = f(mode);
                partial = partial
                    .iter()
                    .flat_map(|(pm, pc)| {
                        images.iter().map(move |&(img, ic)| {
                            let mut nm = pm.clone();
                            nm.push(img);
                            (nm, pc * ic)
                        })
                    })
                    .collect();
            }
            for (mut nm, nc) in partial {
                nm.sort_unstable();
                out.add_term(nm, nc);
            }
        }
        out.prune();
        out
    }

    fn namespace(&self) -> Result<Option<bool>, PhotonicsError> {
        let mut seen = None;
        for m in self.terms.keys() {
            for mode in m {
                let out = mode.port.is_output();
                match seen {
                    None => seen = Some(out),
                    Some(s) if s != out => return Err(PhotonicsError::MixedNamespace),
                    _ => {}
                }
            }
        }
        Ok(seen)
    }
}

/// Jones matrix acting on the (H, V) creation operators of one spatial mode.
pub type Jones = [[Complex64; 2]; 2];

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Half-wave plate with optic axis at `deg`: [[cos2θ, sin2θ], [sin2θ, −cos2θ]].
pub fn hwp_jones(deg: f64) -> Jones {
    let t = 2.0 * deg.to_radians();
    [[re(t.cos()), re(t.sin())], [re(t.sin()), re(-t.cos())]]
}

/// Quarter-wave plate with fast axis at `deg`: R(θ)·diag(1, i)·R(−θ).
pub fn qwp_jones(deg: f64) -> Jones {
    let (s, c) = deg.to_radians().sin_cos();
    let i = Complex64::new(0.0, 1.0);
    [
        [re(c * c) + i * s * s, (re(1.0) - i) * c * s],
        [(re(1.0) - i) * c * s, re(s * s) + i * c * c],
    ]
}

/// Applies `jones` to every photon in `port`.
pub fn apply_jones(set: &PhotonTermSet, port: Port, jones: Jones) -> PhotonTermSet {
    set.map_modes(|m| {
        if m.port != port {
            return vec![(m, re(1.0))];
        }
        let col = match m.pol {
            Polarization::H => 0,
            Polarization::V => 1,
        };
        vec![
            (ModeLabel::new(port, Polarization::H), jones[0][col]),
            (ModeLabel::new(port, Polarization::V), jones[1][col]),
        ]
    })
}

pub fn hwp(set: &PhotonTermSet, port: Port, deg: f64) -> PhotonTermSet {
    apply_jones(set, port, hwp_jones(deg))
}

pub fn qwp(set: &PhotonTermSet, port: Port, deg: f64) -> PhotonTermSet {
    apply_jones(set, port, qwp_jones(deg))
}

/// Turns a half-wave plate already folded into `set` from `from_deg` to
/// `to_deg`. Net effect is a polarization rotation by 2·(to − from).
pub fn retune_hwp(set: &PhotonTermSet, port: Port, from_deg: f64, to_deg: f64) -> PhotonTermSet {
    hwp(&hwp(set, port, from_deg), port, to_deg)
}

/// Output port for a photon entering the beam splitters.
///
/// PBS₁ overlaps a and d (outputs 1, 4); PBS₂ overlaps b and c (outputs 2, 3).
/// H is transmitted, V reflected.
pub fn pbs_route(mode: ModeLabel) -> ModeLabel {
    use Polarization::{H, V};
    let port = match (mode.port, mode.pol) {
        (Port::A, H) | (Port::D, V) => Port::Out1,
        (Port::A, V) | (Port::D, H) => Port::Out4,
        (Port::B, H) | (Port::C, V) => Port::Out2,
        (Port::B, V) | (Port::C, H) => Port::Out3,
        (p, _) => p,
    };
    ModeLabel::new(port, mode.pol)
}

/// Both polarizing beam splitters.
pub fn pbs(set: &PhotonTermSet) -> Result<PhotonTermSet, PhotonicsError> {
    if set.namespace()? == Some(true) {
        return Err(PhotonicsError::WrongNamespace {
            expected: "pre-PBS (a-d)",
            found: "post-PBS (1-4)",
        });
    }
    Ok(set.map_modes(|m| vec![(pbs_route(m), re(1.0))]))
}

/// Four-fold coincidence result.
#[derive(Debug, Clone, PartialEq)]
pub struct PostSelected {
    pub state: QuantumState,
    /// Fraction of the input norm in the one-photon-per-output sector.
    pub probability: f64,
}

/// Unnormalized 16-entry polarization vector of the one-photon-per-output
/// sector. H ↦ 0, V ↦ 1, output 1 is the most significant bit.
pub fn fourfold_amplitudes(set: &PhotonTermSet) -> Result<Vec<Complex64>, PhotonicsError> {
    if set.namespace()? == Some(false) {
        return Err(PhotonicsError::WrongNamespace {
            expected: "post-PBS (1-4)",
            found: "pre-PBS (a-d)",
        });
    }
    let mut amps = vec![ZERO; 16];
    for (m, c) in set.terms() {
        if m.len() != 4 {
            continue;
        }
        let mut index = 0usize;
        let mut hit = [false; 4];
        let mut ok = true;
        for mode in m {
            let Some(q) = mode.port.output_index() else {
                ok = false;
                break;
            };
            if std::mem::replace(&mut hit[q], true) {
                ok = false;
                break;
            }
            if mode.pol == Polarization::V {
                index |= 1 << (3 - q);
            }
        }
        if ok {
            amps[index] += c;
        }
    }
    Ok(amps)
}

/// Keeps terms with exactly one photon in each of outputs 1–4.
pub fn postselect_fourfold(set: &PhotonTermSet) -> Result<PostSelected, PhotonicsError> {
    let amps = fourfold_amplitudes(set)?;
    let kept: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if kept < 1e-24 {
        return Err(PhotonicsError::NoFourfoldEvents);
    }
    let total = set.norm_sqr();
    let state = QuantumState::normalized(amps).expect("nonzero four-qubit vector");
    Ok(PostSelected {
        state,
        probability: kept / total,
    })
}

/// Source parameters. Amplitudes are relative; only ratios matter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SourceConfig {
    /// Polarization rotation (degrees) applied to mode a by turning its
    /// half-wave plate by half this angle from the nominal setting.
    pub hwp_a_angle: f64,
    /// Pair-creation amplitude on the forward pass (modes a, b).
    pub forward: f64,
    /// Pair-creation amplitude on the backward pass (modes c, d).
    pub backward: f64,
    /// Extra weight on the two-pairs-forward term (1 = same process strength).
    pub double_forward: f64,
    /// Extra weight on the two-pairs-backward term.
    pub double_backward: f64,
    /// Phases in radians for [one pair each way, two forward, two backward].
    pub phases: [f64; 3],
    /// Coherence between the three emission processes, in [0, 1].
    pub indistinguishability: f64,
}

impl Default for SourceConfig {
    fn default() -> Self {
        Self {
            hwp_a_angle: 0.0,
            forward: 1.0,
            backward: 1.0,
            double_forward: 1.0,
            double_backward: 1.0,
            phases: [0.0; 3],
            indistinguishability: 1.0,
        }
    }
}

/// Rotation angle that balances the four post-selected amplitudes: cos²θ = −cos 2θ.
pub fn balancing_angle_deg() -> f64 {
    (1.0 / 3f64.sqrt()).acos().to_degrees()
}

impl SourceConfig {
    /// Phase fix at [`balancing_angle_deg`] with the backward amplitude set
    /// to forward·cos θ, which yields four equal post-selected amplitudes.
    pub fn balanced() -> Self {
        let theta = balancing_angle_deg();
        Self {
            hwp_a_angle: theta,
            backward: theta.to_radians().cos(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), PhotonicsError> {
        let bad = |msg: String| Err(PhotonicsError::Config(msg));
        if !(0.0..90.0).contains(&self.hwp_a_angle) {
            return bad(format!("hwp_a_angle {} outside [0, 90)", self.hwp_a_angle));
        }
        for (name, w) in [
            ("forward", self.forward),
            ("backward", self.backward),
            ("double_forward", self.double_forward),
            ("double_backward", self.double_backward),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return bad(format!("{name} weight {w} must be finite and non-negative"));
            }
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return bad("phases must be finite".into());
        }
        if !(0.0..=1.0).contains(&self.indistinguishability) {
            return bad(format!(
                "indistinguishability {} outside [0, 1]",
                self.indistinguishability
            ));
        }
        Ok(())
    }
}

fn pair(port1: Port, port2: Port, vv_sign: f64) -> PhotonTermSet {
    use Polarization::{H, V};
    PhotonTermSet::from_terms([
        (
            vec![ModeLabel::new(port1, H), ModeLabel::new(port2, H)],
            re(FRAC_1_SQRT_2),
        ),
        (
            vec![ModeLabel::new(port1, V), ModeLabel::new(port2, V)],
            re(vv_sign * FRAC_1_SQRT_2),
        ),
    ])
}

/// φ⁻ pair creation operator in modes a, b.
pub fn forward_pair() -> PhotonTermSet {
    pair(Port::A, Port::B, -1.0)
}

/// φ⁺ pair creation operator in modes c, d.
pub fn backward_pair() -> PhotonTermSet {
    pair(Port::C, Port::D, 1.0)
}

/// Four-photon emission, split by process:
/// [one pair each way, two pairs forward, two pairs backward].
pub fn emission_processes(config: &SourceConfig) -> Result<[PhotonTermSet; 3], PhotonicsError> {
    config.validate()?;
    let (f, b) = (forward_pair(), backward_pair());
    let cis = |p: f64| Complex64::from_polar(1.0, p);
    let cross = f
        .product(&b)
        .scale(cis(config.phases[0]) * config.forward * config.backward);
    let double_f = f
        .product(&f)
        .scale(cis(config.phases[1]) * 0.5 * config.forward.powi(2) * config.double_forward);
    let double_b = b
        .product(&b)
        .scale(cis(config.phases[2]) * 0.5 * config.backward.powi(2) * config.double_backward);
    Ok([cross, double_f, double_b])
}

/// Coherent four-photon sector of the emission.
pub fn emit_pairs(config: &SourceConfig) -> Result<PhotonTermSet, PhotonicsError> {
    let [x, f, b] = emission_processes(config)?;
    Ok(x.add(&f).add(&b))
}

/// Optics after emission: mode-a waveplate adjustment, then the beam splitters.
pub fn propagate(
    set: &PhotonTermSet,
    config: &SourceConfig,
) -> Result<PhotonTermSet, PhotonicsError> {
    let tuned = retune_hwp(set, Port::A, 0.0, config.hwp_a_angle / 2.0);
    pbs(&tuned)
}

/// Post-selected source output. With partial indistinguishability the
/// coherences between processes are scaled down and the result is mixed.
#[derive(Debug, Clone, PartialEq)]
pub struct SourceOutcome {
    pub state: QuantumState,
    pub probability: f64,
    /// Unnormalized post-selected amplitudes of the coherent pipeline.
    pub amplitudes: Vec<Complex64>,
}

pub fn simulate_source(config: &SourceConfig) -> Result<SourceOutcome, PhotonicsError> {
    let processes = emission_processes(config)?;
    let outs = processes
        .iter()
        .map(|p| propagate(p, config))
        .collect::<Result<Vec<_>, _>>()?;
    let vecs = outs
        .iter()
        .map(fourfold_amplitudes)
        .collect::<Result<Vec<_>, _>>()?;
    let coherent: Vec<Complex64> = (0..16).map(|i| vecs.iter().map(|v| v[i]).sum()).collect();
    let total_set = outs
        .iter()
        .fold(PhotonTermSet::default(), |acc, s| acc.add(s));
    let d = config.indistinguishability;

    if d == 1.0 {
        let ps = postselect_fourfold(&total_set)?;
        return Ok(SourceOutcome {
            state: ps.state,
            probability: ps.probability,
            amplitudes: coherent,
        });
    }

    let outer = |v: &[Complex64]| nalgebra::DMatrix::from_fn(16, 16, |r, c| v[r] * v[c].conj());
    let mut rho = outer(&coherent) * re(d);
    for v in &vecs {
        rho += outer(v) * re(1.0 - d);
    }
    let kept = rho.trace().re;
    if kept < 1e-24 {
        return Err(PhotonicsError::NoFourfoldEvents);
    }
    let total =
        d * total_set.norm_sqr() + (1.0 - d) * outs.iter().map(|s| s.norm_sqr()).sum::<f64>();
    rho /= re(kept);
    let state = QuantumState::from_density(rho).expect("mixture of pure states");
    Ok(SourceOutcome {
        state,
        probability: kept / total,
        amplitudes: coherent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use Polarization::{H, V};

    fn ml(p: Port, pol: Polarization) -> ModeLabel {
        ModeLabel::new(p, pol)
    }

    fn single(p: Port, pol: Polarization) -> PhotonTermSet {
        PhotonTermSet::from_terms([(vec![ml(p, pol)], re(1.0))])
    }

    #[test]
    fn hwp_zero_and_45() {
        let h = hwp(&single(Port::A, H), Port::A, 0.0);
        assert_eq!(h, single(Port::A, H));
        let v = hwp(&single(Port::A, V), Port::A, 0.0);
        assert_eq!(v, single(Port::A, V).scale(re(-1.0)));
        let s = hwp(&single(Port::A, H), Port::A, 45.0);
        assert!((s.coefficient(&[ml(Port::A, V)]) - re(1.0)).norm() < 1e-15);
        assert!(s.coefficient(&[ml(Port::A, H)]).norm() < 1e-15);
    }

    #[test]
    fn waveplate_on_other_mode_is_identity() {
        let s = single(Port::B, V);
        assert_eq!(hwp(&s, Port::A, 30.0), s);
    }

    #[test]
    fn bosonic_weight() {
        let two = PhotonTermSet::from_terms([(vec![ml(Port::A, H), ml(Port::A, H)], re(1.0))]);
        assert!((two.norm_sqr() - 2.0).abs() < 1e-15);
        assert!(
            (two.fock_amplitude(&[ml(Port::A, H), ml(Port::A, H)]).re - 2f64.sqrt()).abs() < 1e-15
        );
    }

    #[test]
    fn pbs_single_photon() {
        let out = pbs(&single(Port::A, H)).unwrap();
        assert_eq!(out.coefficient(&[ml(Port::Out1, H)]), re(1.0));
    }

    #[test]
    fn pbs_opposite_ports() {
        // same polarization from opposite inputs: separate outputs
        let hh = PhotonTermSet::from_terms([(vec![ml(Port::A, H), ml(Port::D, H)], re(1.0))]);
        let out = pbs(&hh).unwrap();
        assert_eq!(
            out.coefficient(&[ml(Port::Out1, H), ml(Port::Out4, H)]),
            re(1.0)
        );
        // orthogonal polarizations from opposite inputs: same output
        let hv = PhotonTermSet::from_terms([(vec![ml(Port::A, H), ml(Port::D, V)], re(1.0))]);
        let out = pbs(&hv).unwrap();
        assert_eq!(
            out.coefficient(&[ml(Port::Out1, H), ml(Port::Out1, V)]),
            re(1.0)
        );
    }

    #[test]
    fn pbs_same_port() {
        // same input port: separate only if orthogonal
        let hv = PhotonTermSet::from_terms([(vec![ml(Port::A, H), ml(Port::A, V)], re(1.0))]);
        let out = pbs(&hv).unwrap();
        assert_eq!(
            out.coefficient(&[ml(Port::Out1, H), ml(Port::Out4, V)]),
            re(1.0)
        );
    }

    #[test]
    fn pbs_rejects_outputs() {
        assert!(matches!(
            pbs(&single(Port::Out2, H)),
            Err(PhotonicsError::WrongNamespace { .. })
        ));
        let mixed = PhotonTermSet::from_terms([(vec![ml(Port::A, H), ml(Port::Out1, H)], re(1.0))]);
        assert_eq!(pbs(&mixed), Err(PhotonicsError::MixedNamespace));
    }

    #[test]
    fn postselect_discards_double_occupation() {
        let t = PhotonTermSet::from_terms([(
            vec![
                ml(Port::Out1, H),
                ml(Port::Out1, V),
                ml(Port::Out2, H),
                ml(Port::Out3, H),
            ],
            re(1.0),
        )]);
        assert_eq!(
            postselect_fourfold(&t),
            Err(PhotonicsError::NoFourfoldEvents)
        );
        assert!(matches!(
            postselect_fourfold(&single(Port::A, H)),
            Err(PhotonicsError::WrongNamespace { .. })
        ));
    }

    #[test]
    fn default_emission_has_opposite_hhhh_vvvv() {
        let e = emit_pairs(&SourceConfig::default()).unwrap();
        assert_eq!(e.photon_numbers(), vec![4]);
        let hhhh = e.coefficient(&[
            ml(Port::A, H),
            ml(Port::B, H),
            ml(Port::C, H),
            ml(Port::D, H),
        ]);
        let vvvv = e.coefficient(&[
            ml(Port::A, V),
            ml(Port::B, V),
            ml(Port::C, V),
            ml(Port::D, V),
        ]);
        assert!(hhhh.norm() > 0.0);
        assert!((hhhh + vvvv).norm() < 1e-15);
    }

    #[test]
    fn config_validation() {
        for bad in [
            SourceConfig {
                hwp_a_angle: 90.0,
                ..Default::default()
            },
            SourceConfig {
                forward: -1.0,
                ..Default::default()
            },
            SourceConfig {
                indistinguishability: 1.5,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        assert!(SourceConfig::balanced().validate().is_ok());
    }

    #[test]
    fn config_json_defaults() {
        let c: SourceConfig = serde_json::from_str(r#"{"hwp_a_angle": 50.0}"#).unwrap();
        assert_eq!(c.forward, 1.0);
        assert_eq!(c.hwp_a_angle, 50.0);
        assert!(serde_json::from_str::<SourceConfig>(r#"{"hwp": 1}"#).is_err());
    }
}
