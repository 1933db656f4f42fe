//! Clocked model of the bit-serial XNOR unit feeding a ripple TFF counter.
//!
//! Cycle `i < N` latches `XNOR(w_i, x_i)` into the unit's output register; that
//! pulse reaches the counter one cycle later. Cycle `N + 1` fires Readout, which
//! copies the counter MSB through the DFF. A run therefore takes `N + 2` cycles.
//!
//! The counter is preloaded to `2^(k-1) - T`, so its MSB rises exactly when the
//! pulse count reaches `T`. The MSB falls again after `2^(k-1)` further pulses
//! and the counter wraps at `2^k`, hence the precondition
//! `T <= 2^(k-1)` and `N - T < 2^(k-1)`.

use crate::NpuError;

/// Deliberate defects, used as negative controls for the verification harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Readout on the last operand cycle, before the final delayed XNOR pulse
    /// reaches the counter.
    EarlyReadout,
    /// Preload one below the correct value.
    PreloadOffByOne,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NpuState {
    pub xnor_pipeline_bit: bool,
    /// TFF outputs `B_0..B_{k-1}`, least significant first.
    pub counter: Vec<bool>,
    pub readout_dff: bool,
}

impl NpuState {
    /// Counter loaded with `value mod 2^k`.
    pub fn preloaded(k: u32, value: i64) -> Self {
        let m = value.rem_euclid(1i64 << k) as u64;
        Self {
            xnor_pipeline_bit: false,
            counter: (0..k).map(|b| m >> b & 1 == 1).collect(),
            readout_dff: false,
        }
    }

    pub fn counter_value(&self) -> u64 {
        self.counter.iter().rev().fold(0, |v, &b| v << 1 | b as u64)
    }

    pub fn msb(&self) -> bool {
        *self.counter.last().expect("counter has at least one bit")
    }

    /// One pulse into `B_0`. Each TFF toggles and passes a carry on its 1 -> 0
    /// transition. Returns the carry out of the MSB.
    fn pulse(&mut self) -> bool {
        for b in self.counter.iter_mut() {
            *b = !*b;
            if *b {
                return false;
            }
        }
        true
    }

    /// Advance one clock. `operands` are this cycle's weight and input bits;
    /// `readout` fires the DFF after the counter has settled. Returns whether
    /// the counter wrapped.
    pub fn clock(&mut self, operands: Option<(bool, bool)>, readout: bool) -> bool {
        let wrapped = self.xnor_pipeline_bit && self.pulse();
        self.xnor_pipeline_bit = operands.is_some_and(|(w, x)| w == x);
        if readout {
            self.readout_dff = self.msb();
        }
        wrapped
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NpuRun {
    pub activation: bool,
    pub cycles: usize,
}

/// Software reference: at least `t` positions where weight and input agree.
pub fn popcount_oracle(weights: &[bool], inputs: &[bool], t: usize) -> bool {
    weights.iter().zip(inputs).filter(|(w, x)| w == x).count() >= t
}

/// Smallest counter width that satisfies the preload precondition for `(n, t)`.
pub fn min_counter_bits(n: usize, t: usize) -> u32 {
    let need = t.max(n - t.min(n) + 1).max(1);
    (need as u64).next_power_of_two().trailing_zeros() + 1
}

pub fn check_args(n: usize, inputs: usize, t: usize, k: u32) -> Result<(), NpuError> {
    if inputs != n {
        return Err(NpuError::StreamLength { weights: n, inputs });
    }
    if t > n {
        return Err(NpuError::ThresholdAboveFanin { t, n });
    }
    if !(1..=62).contains(&k) {
        return Err(NpuError::CounterWidth(k));
    }
    let half = 1u64 << (k - 1);
    if (1u64 << k) <= n as u64 || t as u64 > half || (n - t) as u64 >= half {
        return Err(NpuError::CounterTooSmall { k, n, t });
    }
    Ok(())
}

pub fn npu_simulate(weights: &[bool], inputs: &[bool], t: usize, k: u32) -> Result<NpuRun, NpuError> {
    npu_simulate_with_fault(weights, inputs, t, k, Fault::None)
}

pub fn npu_simulate_with_fault(
    weights: &[bool],
    inputs: &[bool],
    t: usize,
    k: u32,
    fault: Fault,
) -> Result<NpuRun, NpuError> {
    let n = weights.len();
    check_args(n, inputs.len(), t, k)?;
    let preload = (1i64 << (k - 1)) - t as i64 - (fault == Fault::PreloadOffByOne) as i64;
    let mut s = NpuState::preloaded(k, preload);
    let readout_at = if fault == Fault::EarlyReadout { n.saturating_sub(1) } else { n + 1 };
    let mut cycles = 0;
    for c in 0..=readout_at {
        let ops = (c < n).then(|| (weights[c], inputs[c]));
        let wrapped = s.clock(ops, c == readout_at);
        // the precondition rules this out; a planted fault may not
        assert!(!wrapped || fault != Fault::None, "counter wrapped past 2^k");
        cycles += 1;
    }
    Ok(NpuRun {
        activation: s.readout_dff,
        cycles,
    })
}
