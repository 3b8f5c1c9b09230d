//! Working-space accounting.
//!
//! Algorithms register their live buffers with [`charge`]; the returned
//! guard releases the charge when dropped. Charges go to the meter
//! installed on the current thread (none by default, in which case
//! charging is a no-op). Sizes are in bits of information: a residue mod p
//! costs `bits(p)`, a big integer its bit length, a float its mantissa plus
//! one exponent word.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq)]
pub struct LabelStat {
    pub current: u64,
    pub peak: u64,
}

#[derive(Debug, Default)]
struct State {
    current: u64,
    peak: u64,
    labels: BTreeMap<&'static str, LabelStat>,
}

#[derive(Debug, Default)]
pub struct WorkspaceMeter {
    state: Mutex<State>,
}

impl WorkspaceMeter {
    pub fn new() -> Arc<Self> {
        Arc::new(Self::default())
    }

    fn add(&self, label: &'static str, bits: u64) {
        let mut s = self.state.lock().unwrap();
        s.current += bits;
        s.peak = s.peak.max(s.current);
        let l = s.labels.entry(label).or_default();
        l.current += bits;
        l.peak = l.peak.max(l.current);
    }

    fn sub(&self, label: &'static str, bits: u64) {
        let mut s = self.state.lock().unwrap();
        s.current -= bits;
        if let Some(l) = s.labels.get_mut(label) {
            l.current -= bits;
        }
    }

    pub fn current_bits(&self) -> u64 {
        self.state.lock().unwrap().current
    }

    pub fn peak_bits(&self) -> u64 {
        self.state.lock().unwrap().peak
    }

    pub fn current_bytes(&self) -> u64 {
        self.current_bits().div_ceil(8)
    }

    pub fn peak_bytes(&self) -> u64 {
        self.peak_bits().div_ceil(8)
    }

    /// Per-label statistics, sorted by label.
    pub fn breakdown(&self) -> Vec<(&'static str, LabelStat)> {
        let s = self.state.lock().unwrap();
        s.labels.iter().map(|(k, v)| (*k, *v)).collect()
    }

    pub fn label_peak(&self, label: &str) -> u64 {
        let s = self.state.lock().unwrap();
        s.labels.get(label).map_or(0, |l| l.peak)
    }

    pub fn reset_peak(&self) {
        let mut s = self.state.lock().unwrap();
        s.peak = s.current;
        for l in s.labels.values_mut() {
            l.peak = l.current;
        }
    }
}

thread_local! {
    static CURRENT: RefCell<Option<Arc<WorkspaceMeter>>> = const { RefCell::new(None) };
}

/// Runs `f` with `meter` installed on this thread, restoring the previous
/// meter afterwards.
pub fn with_meter<R>(meter: &Arc<WorkspaceMeter>, f: impl FnOnce() -> R) -> R {
    let prev = CURRENT.with(|c| c.replace(Some(meter.clone())));
    struct Restore(Option<Arc<WorkspaceMeter>>);
    impl Drop for Restore {
        fn drop(&mut self) {
            let prev = self.0.take();
            CURRENT.with(|c| *c.borrow_mut() = prev);
        }
    }
    let _restore = Restore(prev);
    f()
}

pub fn current() -> Option<Arc<WorkspaceMeter>> {
    CURRENT.with(|c| c.borrow().clone())
}

/// A live registration. Dropping it releases the bits.
#[must_use = "the charge is released as soon as the guard is dropped"]
#[derive(Debug)]
pub struct Charge {
    meter: Option<Arc<WorkspaceMeter>>,
    label: &'static str,
    bits: u64,
}

pub fn charge(label: &'static str, bits: u64) -> Charge {
    let meter = current();
    if let Some(m) = &meter {
        m.add(label, bits);
    }
    Charge { meter, label, bits }
}

impl Charge {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn resize(&mut self, bits: u64) {
        if let Some(m) = &self.meter {
            if bits > self.bits {
                m.add(self.label, bits - self.bits);
            } else {
                m.sub(self.label, self.bits - bits);
            }
        }
        self.bits = bits;
    }

    /// Grows the charge to `bits` if that is larger. Used for buffers whose
    /// entries only grow during a phase.
    pub fn at_least(&mut self, bits: u64) {
        if bits > self.bits {
            self.resize(bits);
        }
    }
}

impl Drop for Charge {
    fn drop(&mut self) {
        if let Some(m) = &self.meter {
            m.sub(self.label, self.bits);
        }
    }
}

/// Bits of a slice of big integers (sign bit included per entry).
pub fn bigint_bits<'a>(v: impl IntoIterator<Item = &'a num_bigint::BigInt>) -> u64 {
    v.into_iter().map(|x| x.bits() + 1).sum()
}
