//! Slot-level waveform simulator used as ground truth for the closed-form
//! conditional error rates.
//!
//! Time is discretized in half-slots (`T_s / 2`). A BPPM symbol spans four
//! half-slots; bit 1 puts the pulse in the first slot (half-slots 0 and 1),
//! bit 0 in the second (half-slots 2 and 3). In the space-time scheme
//! transmitter 2 starts one half-slot late. Each receiver integrates its own
//! transmitter's slot grid and picks the slot with more energy.

use rayon::prelude::*;

use crate::channel::ChannelDraw;
use crate::schemes::{Radiometry, Scheme};
use crate::specfun::{q_raw, RngStream};

/// Symbols per simulated frame, including the two edge symbols that are
/// simulated but not counted.
pub const FRAME_SYMBOLS: usize = 4096;

const HALF_SLOTS_PER_SYMBOL: usize = 4;

/// Pulse energy of one transmitter laid out on the half-slot grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotTimeline {
    pub half_slot_energies: Vec<f64>,
    pub offset_half_slots: usize,
}

impl SlotTimeline {
    /// Lays out `bits` with `energy` collected per half-slot of pulse,
    /// starting `offset` half-slots into a timeline of `len` half-slots.
    pub fn new(bits: &[bool], energy: f64, offset: usize, len: usize) -> Self {
        let mut half_slot_energies = vec![0.0; len];
        for (k, &bit) in bits.iter().enumerate() {
            let start = offset + HALF_SLOTS_PER_SYMBOL * k + if bit { 0 } else { 2 };
            for slot in half_slot_energies.iter_mut().skip(start).take(2) {
                *slot += energy;
            }
        }
        SlotTimeline {
            half_slot_energies,
            offset_half_slots: offset,
        }
    }

    /// Slot energies `(first, second)` of symbol `k` on a grid starting at
    /// half-slot `grid_offset`.
    pub fn slots(&self, grid_offset: usize, k: usize) -> (f64, f64) {
        slot_pair(&self.half_slot_energies, grid_offset, k)
    }
}

fn slot_pair(half_slots: &[f64], grid_offset: usize, k: usize) -> (f64, f64) {
    let s = grid_offset + HALF_SLOTS_PER_SYMBOL * k;
    let at = |i: usize| half_slots.get(i).copied().unwrap_or(0.0);
    (at(s) + at(s + 1), at(s + 2) + at(s + 3))
}

/// Slot statistics and hard decision for one symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorOutput {
    pub slot1_stat: f64,
    pub slot2_stat: f64,
    pub decision: bool,
}

impl DetectorOutput {
    /// Decides 1 when the first slot holds at least as much energy.
    pub fn decide(slot1_stat: f64, slot2_stat: f64) -> Self {
        DetectorOutput {
            slot1_stat,
            slot2_stat,
            decision: slot1_stat >= slot2_stat,
        }
    }
}

/// Bit error counts from a waveform run.
///
/// Multiplexing and space-time report one detector per receiver (receiver
/// `i` decodes transmitter `i`). Diversity reports a single detector that
/// sums the slot statistics of both receivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleOutcome {
    pub errors: Vec<u64>,
    pub bits: u64,
}

impl OracleOutcome {
    pub fn ber(&self, detector: usize) -> f64 {
        self.errors[detector] as f64 / self.bits as f64
    }

    /// Binomial standard error at the observed rate.
    pub fn stderr(&self, detector: usize) -> f64 {
        let p = self.ber(detector);
        (p * (1.0 - p) / self.bits as f64).sqrt()
    }

    fn absorb(&mut self, other: &OracleOutcome) {
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        self.bits += other.bits;
    }
}

fn detector_count(scheme: Scheme) -> usize {
    match scheme {
        Scheme::Diversity => 1,
        Scheme::Multiplexing | Scheme::SpaceTime => 2,
    }
}

fn tx_offsets(scheme: Scheme) -> [usize; 2] {
    match scheme {
        Scheme::SpaceTime => [0, 1],
        Scheme::Multiplexing | Scheme::Diversity => [0, 0],
    }
}

/// Simulates one frame of `symbols` BPPM symbols and counts errors on the
/// interior `symbols - 2` of them.
fn simulate_frame(scheme: Scheme, draw: &ChannelDraw, rad: &Radiometry, symbols: usize, rng: &mut RngStream) -> OracleOutcome {
    let offsets = tx_offsets(scheme);
    let len = HALF_SLOTS_PER_SYMBOL * symbols + 1;
    let half_slot_energy = 0.5 * rad.responsivity * rad.transmit_power * rad.slot_duration;
    let noise_sd = (0.25 * rad.noise_density * rad.slot_duration).sqrt();

    let bits0: Vec<bool> = (0..symbols).map(|_| rng.bit()).collect();
    let bits1: Vec<bool> = match scheme {
        Scheme::Diversity => bits0.clone(),
        _ => (0..symbols).map(|_| rng.bit()).collect(),
    };
    let tx = [
        SlotTimeline::new(&bits0, half_slot_energy, offsets[0], len),
        SlotTimeline::new(&bits1, half_slot_energy, offsets[1], len),
    ];

    let received: Vec<Vec<f64>> = (0..2)
        .map(|rx| {
            (0..len)
                .map(|t| {
                    draw.gain(0, rx) * tx[0].half_slot_energies[t]
                        + draw.gain(1, rx) * tx[1].half_slot_energies[t]
                        + noise_sd * rng.standard_normal()
                })
                .collect()
        })
        .collect();

    let bits = [&bits0, &bits1];
    let mut errors = vec![0u64; detector_count(scheme)];
    for k in 1..symbols - 1 {
        match scheme {
            Scheme::Diversity => {
                let (a1, a2) = slot_pair(&received[0], 0, k);
                let (b1, b2) = slot_pair(&received[1], 0, k);
                let out = DetectorOutput::decide(a1 + b1, a2 + b2);
                errors[0] += u64::from(out.decision != bits0[k]);
            }
            _ => {
                for rx in 0..2 {
                    let (s1, s2) = slot_pair(&received[rx], offsets[rx], k);
                    let out = DetectorOutput::decide(s1, s2);
                    errors[rx] += u64::from(out.decision != bits[rx][k]);
                }
            }
        }
    }
    OracleOutcome {
        errors,
        bits: (symbols - 2) as u64,
    }
}

/// Waveform-level BER for a fixed channel draw. Frames of
/// [`FRAME_SYMBOLS`] are simulated back to back from `rng` until at least
/// `n_bits` bits per detector have been counted.
pub fn simulate_frames(scheme: Scheme, draw: &ChannelDraw, rad: &Radiometry, n_bits: u64, rng: &mut RngStream) -> OracleOutcome {
    let mut total = OracleOutcome {
        errors: vec![0; detector_count(scheme)],
        bits: 0,
    };
    while total.bits < n_bits {
        let remaining = (n_bits - total.bits) as usize;
        let symbols = (remaining + 2).clamp(3, FRAME_SYMBOLS);
        total.absorb(&simulate_frame(scheme, draw, rad, symbols, rng));
    }
    total
}

/// Like [`simulate_frames`], but frame `f` draws from
/// `RngStream::new(seed, f)` and frames run in parallel. The result depends
/// only on `(seed, n_bits)`.
pub fn simulate_frames_parallel(scheme: Scheme, draw: &ChannelDraw, rad: &Radiometry, n_bits: u64, seed: u64) -> OracleOutcome {
    let per_frame = (FRAME_SYMBOLS - 2) as u64;
    let frames = n_bits.div_ceil(per_frame).max(1);
    let parts: Vec<OracleOutcome> = (0..frames)
        .into_par_iter()
        .map(|f| {
            let counted = per_frame.min(n_bits - (f * per_frame).min(n_bits)).max(1);
            let mut rng = RngStream::new(seed, f);
            simulate_frame(scheme, draw, rad, counted as usize + 2, &mut rng)
        })
        .collect();
    let mut total = OracleOutcome {
        errors: vec![0; detector_count(scheme)],
        bits: 0,
    };
    for p in &parts {
        total.absorb(p);
    }
    total
}

/// Noiseless interference from transmitter 2 in transmitter 1's slots for
/// one neighbourhood of transmitter 2 bits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferencePattern {
    /// Transmitter 2 bits for symbols `k - 1`, `k`, `k + 1`.
    pub tx2_bits: [bool; 3],
    /// Interference in slot 1 and slot 2, in units of `R g21 h21 P_t T_s`.
    pub slot1: f64,
    pub slot2: f64,
    pub probability: f64,
}

/// Result of enumerating transmitter 2 bit patterns for the space-time scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct StEnumeration {
    pub patterns: Vec<InterferencePattern>,
    /// Distinct slot-1-minus-slot-2 interference values (same units as the
    /// patterns) with their total probability, ascending.
    pub weights: Vec<(f64, f64)>,
    /// Conditional BER at receiver 1 averaged over the patterns and both
    /// values of transmitter 1's bit.
    pub ber: f64,
}

/// Exact conditional BER of the half-slot space-time scheme at receiver 1,
/// obtained by laying out every 3-bit neighbourhood of transmitter 2 on the
/// half-slot grid and reading off the noiseless interference in the slots of
/// transmitter 1's middle symbol. Each pattern then contributes a `Q` term.
pub fn enumerate_st_weights(draw: &ChannelDraw, rad: &Radiometry) -> StEnumeration {
    let offsets = tx_offsets(Scheme::SpaceTime);
    let len = HALF_SLOTS_PER_SYMBOL * 3 + offsets[1];
    // tx1's middle symbol (index 1) is probed; its own pulse is added below.
    let mut patterns = Vec::with_capacity(8);
    for code in 0..8u8 {
        let bits = [code & 4 != 0, code & 2 != 0, code & 1 != 0];
        let tl = SlotTimeline::new(&bits, 0.5, offsets[1], len);
        let (slot1, slot2) = tl.slots(offsets[0], 1);
        patterns.push(InterferencePattern {
            tx2_bits: bits,
            slot1,
            slot2,
            probability: 1.0 / 8.0,
        });
    }

    let mut weights: Vec<(f64, f64)> = Vec::new();
    for p in &patterns {
        let diff = p.slot1 - p.slot2;
        match weights.iter_mut().find(|(d, _)| (*d - diff).abs() < 1e-12) {
            Some((_, w)) => *w += p.probability,
            None => weights.push((diff, p.probability)),
        }
    }
    weights.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Decision statistic slot1 - slot2 has signal +-E for bit 1/0 and
    // noise variance N_0 T_s; E / sqrt(N_0 T_s) = c g11 h11.
    let c = rad.q_scale();
    let own = c * draw.gain(0, 0);
    let cross = c * draw.gain(1, 0);
    let ber = weights
        .iter()
        .map(|&(diff, w)| w * 0.5 * (q_raw(own + diff * cross) + q_raw(own - diff * cross)))
        .sum();

    StEnumeration { patterns, weights, ber }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schemes::cond_ber_spacetime;

    fn draw(own: f64, cross: f64) -> ChannelDraw {
        ChannelDraw {
            fading: [[1.0; 2]; 2],
            x_p: 0.0,
            y_p: 0.0,
            collection: [[own, cross], [cross, own]],
        }
    }

    #[test]
    fn energy_is_conserved_across_half_slot_offsets() {
        let bits = [true, false, false, true, true, false];
        for offset in 0..4 {
            let tl = SlotTimeline::new(&bits, 0.5, offset, 4 * bits.len() + offset);
            let total: f64 = tl.half_slot_energies.iter().sum();
            assert_eq!(total, bits.len() as f64);
        }
    }

    #[test]
    fn ties_decide_one() {
        assert!(DetectorOutput::decide(1.0, 1.0).decision);
        assert!(!DetectorOutput::decide(0.9, 1.0).decision);
    }

    #[test]
    fn clean_single_link_has_no_errors() {
        let rad = Radiometry::default().with_snr_db(60.0);
        let out = simulate_frames(Scheme::Multiplexing, &draw(1.0, 0.0), &rad, 20_000, &mut RngStream::new(1, 0));
        assert_eq!(out.errors, vec![0, 0]);
        assert!(out.bits >= 20_000);
    }

    #[test]
    fn enumeration_without_interference_is_single_link() {
        let rad = Radiometry::default().with_snr_db(0.0);
        let e = enumerate_st_weights(&draw(2.0, 0.0), &rad);
        assert!((e.ber - q_raw(2.0)).abs() < 1e-16);
        let total: f64 = e.weights.iter().map(|w| w.1).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bit_one_from_tx2_splits_evenly_when_preceded_by_one() {
        let rad = Radiometry::default();
        let e = enumerate_st_weights(&draw(1.0, 1.0), &rad);
        for p in &e.patterns {
            if p.tx2_bits[0] && p.tx2_bits[1] {
                assert_eq!((p.slot1, p.slot2), (0.5, 0.5));
            }
        }
    }

    #[test]
    fn enumerated_weights_are_half_quarter_quarter() {
        let rad = Radiometry::default();
        let e = enumerate_st_weights(&draw(1.0, 1.0), &rad);
        assert_eq!(e.weights, vec![(-0.5, 0.25), (0.0, 0.5), (0.5, 0.25)]);
    }

    #[test]
    fn enumeration_matches_closed_form_without_interference() {
        let rad = Radiometry::default().with_snr_db(0.0);
        for a in [0.0, 0.5, 1.0, 3.0] {
            let e = enumerate_st_weights(&draw(a, 0.0), &rad);
            assert!((e.ber - cond_ber_spacetime(&rad, a, 0.0).get()).abs() < 1e-15);
        }
    }

    #[test]
    fn parallel_runs_are_reproducible() {
        let rad = Radiometry::default().with_snr_db(0.0);
        let d = draw(2.0, 1.0);
        let a = simulate_frames_parallel(Scheme::SpaceTime, &d, &rad, 30_000, 4);
        let b = simulate_frames_parallel(Scheme::SpaceTime, &d, &rad, 30_000, 4);
        assert_eq!(a, b);
        assert_eq!(a.bits, 30_000);
    }
}
