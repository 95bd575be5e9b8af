//! Transmission schemes: per-access-point encoder weights and the received
//! signal power they produce for the served user.
//!
//! Every scheme is expressed in one uniform representation — a power weight
//! and a phase rotation per cell member — so the simulator can evaluate both
//! the served signal and the interference leaked into foreign cells through
//! the same machinery. Power weights always sum to 1 on non-empty cells:
//! schemes are compared at equal radiated energy.

use crate::channel::Fading;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Transmission scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// Maximum ratio transmission: co-phased, channel-proportional weights.
    Mrt,
    /// Non-coherent joint transmission: equal weights, no phase alignment.
    Ncjt,
    /// Single-transmitter selection of the instantaneously strongest link.
    MaxSnr,
    /// Single-transmitter selection of the closest access point.
    Nearest,
}

impl Scheme {
    pub const ALL: [Scheme; 4] = [Scheme::Mrt, Scheme::Ncjt, Scheme::MaxSnr, Scheme::Nearest];

    /// Stable lowercase name used in CSV output and CLI flags.
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Mrt => "mrt",
            Scheme::Ncjt => "ncjt",
            Scheme::MaxSnr => "maxsnr",
            Scheme::Nearest => "nearest",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Scheme {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scheme::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| crate::error::Error::Parse(format!("unknown scheme name `{s}`")))
    }
}

/// Instantaneous channel state between one user and its cell members.
///
/// The three vectors are parallel: entry `i` describes the link to member
/// `i` (distance, path-loss gain consistent with that distance, and one
/// Rayleigh fading draw).
#[derive(Debug, Clone, Default)]
pub struct CellChannelState {
    pub distances_m: Vec<f64>,
    pub path_gains: Vec<f64>,
    pub fadings: Vec<Fading>,
}

impl CellChannelState {
    pub fn len(&self) -> usize {
        self.path_gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path_gains.is_empty()
    }

    /// Instantaneous link strength `l_i * g_i` of member `i`.
    #[inline]
    fn strength(&self, i: usize) -> f64 {
        self.path_gains[i] * self.fadings[i].power
    }
}

/// Encoder description shared by all schemes: how much power each member
/// radiates for this user and which phase rotation it applies.
#[derive(Debug, Clone)]
pub struct EncoderAssignment {
    pub scheme: Scheme,
    /// Per-member power weight; sums to 1 on non-empty cells.
    pub weights: Vec<f64>,
    /// Per-member phase rotation in radians (the rotation the transmitter
    /// applies on top of the channel phase).
    pub phase_rotations: Vec<f64>,
    /// Whether the members combine coherently at the receiver.
    pub coherent: bool,
}

/// Index of the largest value, smallest index winning ties. Returns `None`
/// on empty input.
pub(crate) fn argmax(values: impl Iterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

fn one_hot(scheme: Scheme, n: usize, index: usize) -> EncoderAssignment {
    let mut weights = vec![0.0; n];
    weights[index] = 1.0;
    EncoderAssignment { scheme, weights, phase_rotations: vec![0.0; n], coherent: true }
}

/// Maximum ratio transmission: `w_i = l_i g_i / sum_j l_j g_j`, phase
/// rotation `-theta_i` so the members add in phase at the receiver.
pub fn mrt_assignment(state: &CellChannelState) -> EncoderAssignment {
    let n = state.len();
    let total: f64 = (0..n).map(|i| state.strength(i)).sum();
    let weights = if total > 0.0 {
        (0..n).map(|i| state.strength(i) / total).collect()
    } else {
        // All links faded to exactly zero: any unit-sum split radiates zero
        // signal; use the uniform one to keep the normalization invariant.
        vec![1.0 / n.max(1) as f64; n]
    };
    EncoderAssignment {
        scheme: Scheme::Mrt,
        weights,
        phase_rotations: state.fadings.iter().map(|f| -f.phase).collect(),
        coherent: true,
    }
}

/// Non-coherent joint transmission: equal power split, no phase control.
pub fn noncoherent_assignment(state: &CellChannelState) -> EncoderAssignment {
    let n = state.len();
    EncoderAssignment {
        scheme: Scheme::Ncjt,
        weights: vec![1.0 / n.max(1) as f64; n],
        phase_rotations: vec![0.0; n],
        coherent: false,
    }
}

/// Selects the member with the strongest instantaneous link `l_i g_i`.
pub fn max_snr_assignment(state: &CellChannelState) -> EncoderAssignment {
    match argmax((0..state.len()).map(|i| state.strength(i))) {
        Some(i) => one_hot(Scheme::MaxSnr, state.len(), i),
        None => one_hot_empty(Scheme::MaxSnr),
    }
}

/// Selects the closest member, regardless of fading.
pub fn nearest_rap_assignment(state: &CellChannelState) -> EncoderAssignment {
    match argmax(state.distances_m.iter().map(|d| -d)) {
        Some(i) => one_hot(Scheme::Nearest, state.distances_m.len(), i),
        None => one_hot_empty(Scheme::Nearest),
    }
}

fn one_hot_empty(scheme: Scheme) -> EncoderAssignment {
    EncoderAssignment { scheme, weights: vec![], phase_rotations: vec![], coherent: true }
}

/// Computes the encoder for `scheme` on the given channel state.
pub fn assignment(scheme: Scheme, state: &CellChannelState) -> EncoderAssignment {
    match scheme {
        Scheme::Mrt => mrt_assignment(state),
        Scheme::Ncjt => noncoherent_assignment(state),
        Scheme::MaxSnr => max_snr_assignment(state),
        Scheme::Nearest => nearest_rap_assignment(state),
    }
}

/// Received signal power (normalized by transmit power) for `scheme` on the
/// given channel state. Empty cells receive zero.
///
/// Each scheme uses its exact reduced form rather than the generic complex
/// sum, so structural identities hold to the last bit: MRT is the plain sum
/// `sum_i l_i g_i`, the selection schemes pick a single term, and only the
/// non-coherent scheme needs phasor addition.
pub fn signal_power(scheme: Scheme, state: &CellChannelState) -> f64 {
    let n = state.len();
    if n == 0 {
        return 0.0;
    }
    match scheme {
        Scheme::Mrt => (0..n).map(|i| state.strength(i)).sum(),
        Scheme::MaxSnr => (0..n).map(|i| state.strength(i)).fold(0.0, f64::max),
        Scheme::Nearest => {
            let i = argmax(state.distances_m.iter().map(|d| -d)).expect("non-empty");
            state.strength(i)
        }
        Scheme::Ncjt => {
            let inv_n = 1.0 / n as f64;
            let mut re = 0.0;
            let mut im = 0.0;
            for i in 0..n {
                let amp = (state.strength(i) * inv_n).sqrt();
                let (sin, cos) = state.fadings[i].phase.sin_cos();
                re += amp * cos;
                im += amp * sin;
            }
            re * re + im * im
        }
    }
}

/// Generic received signal power for an arbitrary encoder assignment:
/// `|sum_i sqrt(w_i l_i g_i) e^{j(theta_i + rot_i)}|^2`.
///
/// This is the reference form the reduced expressions in [`signal_power`]
/// must agree with; it is used by tests and diagnostic tooling.
pub fn received_signal_power(state: &CellChannelState, enc: &EncoderAssignment) -> f64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for i in 0..state.len() {
        let amp = (enc.weights[i] * state.strength(i)).sqrt();
        let (sin, cos) = (state.fadings[i].phase + enc.phase_rotations[i]).sin_cos();
        re += amp * cos;
        im += amp * sin;
    }
    re * re + im * im
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Builds a state with explicit strengths by using unit path gains.
    fn state_from(lg: &[f64], phases: &[f64], distances: &[f64]) -> CellChannelState {
        CellChannelState {
            distances_m: distances.to_vec(),
            path_gains: vec![1.0; lg.len()],
            fadings: lg
                .iter()
                .zip(phases)
                .map(|(&power, &phase)| Fading { power, phase })
                .collect(),
        }
    }

    #[test]
    fn mrt_weights_are_channel_proportional() {
        let s = state_from(&[3.0, 1.0], &[0.3, 1.1], &[10.0, 20.0]);
        let enc = mrt_assignment(&s);
        assert_eq!(enc.weights, vec![0.75, 0.25]);
        assert_relative_eq!(signal_power(Scheme::Mrt, &s), 4.0);
        assert_eq!(enc.phase_rotations, vec![-0.3, -1.1]);
        assert!(enc.coherent);
    }

    #[test]
    fn mrt_single_member_gets_unit_weight() {
        let s = state_from(&[0.7], &[2.0], &[50.0]);
        assert_eq!(mrt_assignment(&s).weights, vec![1.0]);
        for scheme in Scheme::ALL {
            assert_relative_eq!(signal_power(scheme, &s), 0.7, max_relative = 1e-15);
        }
    }

    #[test]
    fn mrt_equal_links_split_evenly() {
        let s = state_from(&[2.0, 2.0], &[0.0, 1.0], &[5.0, 15.0]);
        assert_eq!(mrt_assignment(&s).weights, vec![0.5, 0.5]);
    }

    #[test]
    fn noncoherent_extremes_are_constructive_and_destructive() {
        // Same phase, equal strengths: fully constructive, power 2 * lg.
        let aligned = state_from(&[1.5, 1.5], &[0.4, 0.4], &[10.0, 20.0]);
        assert_relative_eq!(signal_power(Scheme::Ncjt, &aligned), 3.0, max_relative = 1e-12);
        // Opposite phases: perfect cancellation.
        let opposed = state_from(&[1.5, 1.5], &[0.4, 0.4 + PI], &[10.0, 20.0]);
        assert_relative_eq!(
            signal_power(Scheme::Ncjt, &opposed),
            0.0,
            epsilon = 1e-12
        );
        let enc = noncoherent_assignment(&aligned);
        assert_eq!(enc.weights, vec![0.5, 0.5]);
        assert!(!enc.coherent);
    }

    #[test]
    fn selection_schemes_pick_strongest_and_closest() {
        let s = state_from(&[3.0, 1.0], &[0.0, 0.0], &[200.0, 50.0]);
        let snr = max_snr_assignment(&s);
        assert_eq!(snr.weights, vec![1.0, 0.0]);
        assert_relative_eq!(signal_power(Scheme::MaxSnr, &s), 3.0);
        // Nearest ignores fading: member 1 is closer even though weaker.
        let near = nearest_rap_assignment(&s);
        assert_eq!(near.weights, vec![0.0, 1.0]);
        assert_relative_eq!(signal_power(Scheme::Nearest, &s), 1.0);
    }

    #[test]
    fn ties_break_toward_the_smallest_index() {
        let s = state_from(&[2.0, 2.0, 1.0], &[0.0; 3], &[30.0, 30.0, 30.0]);
        assert_eq!(max_snr_assignment(&s).weights, vec![1.0, 0.0, 0.0]);
        assert_eq!(nearest_rap_assignment(&s).weights, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn empty_cells_yield_zero_signal_and_empty_assignments() {
        let s = CellChannelState::default();
        for scheme in Scheme::ALL {
            assert_eq!(signal_power(scheme, &s), 0.0);
            let enc = assignment(scheme, &s);
            assert!(enc.weights.is_empty());
        }
    }

    #[test]
    fn scheme_names_round_trip() {
        for scheme in Scheme::ALL {
            let text = format!("x = \"{scheme}\"");
            #[derive(Deserialize)]
            struct Probe {
                x: Scheme,
            }
            let p: Probe = toml::from_str(&text).unwrap();
            assert_eq!(p.x, scheme);
        }
    }

    /// Random channel states: up to 16 members with exponential-ish powers
    /// spanning several decades, arbitrary phases and distances.
    fn arb_state() -> impl Strategy<Value = CellChannelState> {
        proptest::collection::vec(
            (1e-6f64..10.0, 0.0..std::f64::consts::TAU, 1.0f64..1000.0),
            1..16,
        )
        .prop_map(|links| CellChannelState {
            distances_m: links.iter().map(|l| l.2).collect(),
            path_gains: vec![1.0; links.len()],
            fadings: links
                .iter()
                .map(|l| Fading { power: l.0, phase: l.1 })
                .collect(),
        })
    }

    proptest! {
        #[test]
        fn weights_are_normalized_for_all_schemes(state in arb_state()) {
            for scheme in Scheme::ALL {
                let enc = assignment(scheme, &state);
                let sum: f64 = enc.weights.iter().sum();
                let eps = state.len() as f64 * f64::EPSILON;
                prop_assert!((sum - 1.0).abs() <= eps, "{scheme}: sum = {sum}");
                prop_assert!(enc.weights.iter().all(|&w| (0.0..=1.0).contains(&w)));
            }
        }

        #[test]
        fn dominance_chain_is_exact(state in arb_state()) {
            let mrt = signal_power(Scheme::Mrt, &state);
            let snr = signal_power(Scheme::MaxSnr, &state);
            let near = signal_power(Scheme::Nearest, &state);
            // Exact real-number inequalities: a floating sum of nonnegative
            // terms is >= each term, and the selected term is <= the max.
            prop_assert!(mrt >= snr);
            prop_assert!(snr >= near);
        }

        #[test]
        fn reduced_forms_match_generic_encoder_power(state in arb_state()) {
            for scheme in Scheme::ALL {
                let enc = assignment(scheme, &state);
                let generic = received_signal_power(&state, &enc);
                let direct = signal_power(scheme, &state);
                // The generic phasor sum accumulates rounding; the scale is
                // set by the total strength, not the (possibly cancelled)
                // result, so compare with an absolute floor.
                let scale: f64 = (0..state.len()).map(|i| state.path_gains[i] * state.fadings[i].power).sum();
                prop_assert!(
                    (generic - direct).abs() <= 1e-9 * scale.max(1e-300),
                    "{scheme}: generic {generic} vs direct {direct}"
                );
            }
        }

        #[test]
        fn noncoherent_never_exceeds_mrt(state in arb_state()) {
            // Cauchy-Schwarz: the phasor sum with equal weights cannot beat
            // coherent channel-proportional combining (allow rounding).
            let mrt = signal_power(Scheme::Mrt, &state);
            let ncjt = signal_power(Scheme::Ncjt, &state);
            prop_assert!(ncjt <= mrt * (1.0 + 1e-12) + 1e-300);
        }
    }
}
