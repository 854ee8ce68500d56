//! The transcendental scaling constant and certified enclosures of it.

use core::sync::atomic::{AtomicU8, Ordering};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::digits::{E_HEX, PI_HEX, TABLE_BITS};

/// Which real number the symbol `r` stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum RhoConstant {
    #[default]
    Pi,
    E,
}

static ACTIVE: AtomicU8 = AtomicU8::new(0);

impl RhoConstant {
    /// The process-wide constant used by `Ord` on [`super::RhoRational`].
    pub fn active() -> RhoConstant {
        match ACTIVE.load(Ordering::Relaxed) {
            1 => RhoConstant::E,
            _ => RhoConstant::Pi,
        }
    }

    /// Selects the process-wide constant. Must happen before any ordered
    /// structure (Hahn series, complexes) is built.
    pub fn set_active(self) {
        ACTIVE.store(self as u8, Ordering::Relaxed);
    }

    pub fn name(self) -> &'static str {
        match self {
            RhoConstant::Pi => "pi",
            RhoConstant::E => "e",
        }
    }

    pub fn from_name(s: &str) -> Option<RhoConstant> {
        match s {
            "pi" => Some(RhoConstant::Pi),
            "e" => Some(RhoConstant::E),
            _ => None,
        }
    }

    pub(crate) fn index(self) -> usize {
        self as usize
    }

    pub fn to_f64(self) -> f64 {
        match self {
            RhoConstant::Pi => core::f64::consts::PI,
            RhoConstant::E => core::f64::consts::E,
        }
    }

    /// Integers `(lo, hi)` with `lo <= c * 2^bits <= hi` and `hi - lo <= 2`.
    pub fn enclosure(self, bits: u32) -> (BigInt, BigInt) {
        if bits <= TABLE_BITS {
            let hex = match self {
                RhoConstant::Pi => PI_HEX,
                RhoConstant::E => E_HEX,
            };
            let full = BigInt::parse_bytes(hex.as_bytes(), 16).expect("valid digit table");
            let lo = full >> (TABLE_BITS - bits);
            let hi = &lo + 1;
            (lo, hi)
        } else {
            let guard = 32;
            let (v, err) = match self {
                RhoConstant::Pi => pi_fixed(bits + guard),
                RhoConstant::E => e_fixed(bits + guard),
            };
            // v approximates c * 2^(bits+guard) within err units.
            let lo = (&v - &err) >> guard;
            let hi = ((&v + &err) >> guard) + 1;
            (lo, hi)
        }
    }
}

/// `atan(1/x) * 2^prec` by the alternating series; returns (value, error bound).
fn atan_inv(x: u32, prec: u32) -> (BigInt, u64) {
    let one = BigInt::one() << prec;
    let x2 = BigInt::from(x) * BigInt::from(x);
    let mut power = one / BigInt::from(x);
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * k + 1);
        if k.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &x2;
        k += 1;
    }
    // each truncating division loses < 1 unit
    (sum, 2 * k + 2)
}

fn pi_fixed(prec: u32) -> (BigInt, BigInt) {
    let (a, ea) = atan_inv(5, prec);
    let (b, eb) = atan_inv(239, prec);
    let v = BigInt::from(16) * a - BigInt::from(4) * b;
    (v, BigInt::from(16 * ea + 4 * eb))
}

fn e_fixed(prec: u32) -> (BigInt, BigInt) {
    let mut term = BigInt::one() << prec;
    let mut sum = BigInt::zero();
    let mut k: u64 = 0;
    while !term.is_zero() {
        sum += &term;
        k += 1;
        term /= BigInt::from(k);
    }
    (sum, BigInt::from(2 * k + 2))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_and_series_agree() {
        for c in [RhoConstant::Pi, RhoConstant::E] {
            let (lo, hi) = c.enclosure(4000);
            let guard = 32;
            let (v, err) = match c {
                RhoConstant::Pi => pi_fixed(4000 + guard),
                RhoConstant::E => e_fixed(4000 + guard),
            };
            let slo = (&v - &err) >> guard;
            let shi = ((&v + &err) >> guard) + 1;
            assert!(slo <= hi && lo <= shi, "enclosures of {c:?} are disjoint");
        }
    }

    #[test]
    fn enclosures_are_nested() {
        for c in [RhoConstant::Pi, RhoConstant::E] {
            let (lo1, hi1) = c.enclosure(64);
            let (lo2, hi2) = c.enclosure(128);
            assert!(lo2 >= (&lo1 << 64u32) && hi2 <= (&hi1 << 64u32));
            let (lo3, hi3) = c.enclosure(5000);
            assert!(lo3 >= (lo2 << (5000 - 128)) && hi3 <= (hi2 << (5000 - 128)));
        }
    }

    #[test]
    fn pi_is_between_three_and_four() {
        let (lo, hi) = RhoConstant::Pi.enclosure(8);
        assert!(lo >= BigInt::from(3 * 256) && hi <= BigInt::from(4 * 256));
    }
}
