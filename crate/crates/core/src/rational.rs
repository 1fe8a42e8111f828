//! Exact rational arithmetic: parsing, the extended non-negative line with a
//! single +∞, and outward-rounded rational enclosures of the natural logarithm.
//!
//! Every objective value, cost, and bound in this crate is an exact
//! `BigRational`; floats appear only in human-readable output.

use std::cmp::Ordering;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

pub type Rat = BigRational;

/// Shorthand for small rational literals in tests and constructions.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses "p/q" or a plain integer.
pub fn parse_rat(s: &str) -> Result<Rat, String> {
    s.trim()
        .parse::<Rat>()
        .map_err(|e| format!("cannot parse {s:?} as a rational: {e}"))
}

/// Renders as "p/q", or "p" when the denominator is one.
pub fn format_rat(r: &Rat) -> String {
    r.to_string()
}

/// A non-negative rational extended with a single +∞.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ext {
    Finite(Rat),
    Infinite,
}

impl Ext {
    pub fn zero() -> Self {
        Ext::Finite(Rat::zero())
    }

    pub fn one() -> Self {
        Ext::Finite(Rat::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Ext::Infinite)
    }

    pub fn as_finite(&self) -> Option<&Rat> {
        match self {
            Ext::Finite(r) => Some(r),
            Ext::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            Ext::Infinite => f64::INFINITY,
        }
    }
}

impl From<Rat> for Ext {
    fn from(r: Rat) -> Self {
        Ext::Finite(r)
    }
}

impl PartialOrd for Ext {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ext {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Ext::Infinite, Ext::Infinite) => Ordering::Equal,
            (Ext::Infinite, Ext::Finite(_)) => Ordering::Greater,
            (Ext::Finite(_), Ext::Infinite) => Ordering::Less,
            (Ext::Finite(a), Ext::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(r) => write!(f, "{r}"),
            Ext::Infinite => write!(f, "inf"),
        }
    }
}

/// Ratio arithmetic for cost-derived quantities: p/0 := +∞ for p > 0, and
/// 0/0 := 1 so an all-zero action contributes neutrally to a max.
pub fn cost_ratio(num: &Rat, den: &Rat) -> Ext {
    if den.is_zero() {
        if num.is_zero() {
            Ext::one()
        } else {
            Ext::Infinite
        }
    } else {
        Ext::Finite(num / den)
    }
}

/// Ratio arithmetic for utilities: a zero marginal scores 0 regardless of the
/// cost (so 0/0 actions are not infinitely attractive), and a positive
/// marginal at zero cost scores +∞.
pub fn utility_ratio(delta: &Rat, cost: &Rat) -> Ext {
    if delta.is_zero() {
        Ext::zero()
    } else if cost.is_zero() {
        Ext::Infinite
    } else {
        Ext::Finite(delta / cost)
    }
}

/// Number of atanh-series terms; the tail is below 3^-97 at z <= 1/3.
const LN_TERMS: u32 = 48;

/// 2*atanh(z) enclosure from the odd series, valid for 0 <= z < 1.
/// Lower endpoint is the partial sum, upper adds the geometric tail bound
/// 2 z^(2N+1) / ((2N+1)(1-z^2)).
fn two_atanh_interval(z: &Rat) -> (Rat, Rat) {
    debug_assert!(!z.is_negative() && z < &Rat::one());
    if z.is_zero() {
        return (Rat::zero(), Rat::zero());
    }
    let z2 = z * z;
    let mut sum = Rat::zero();
    let mut pow = z.clone(); // z^(2j+1)
    for j in 0..LN_TERMS {
        sum += &pow / rat_int(2 * i64::from(j) + 1);
        pow *= &z2;
    }
    let lo = rat_int(2) * &sum;
    let tail = rat_int(2) * &pow / (rat_int(2 * i64::from(LN_TERMS) + 1) * (Rat::one() - &z2));
    let hi = &lo + tail;
    (lo, hi)
}

fn ln2_interval() -> (Rat, Rat) {
    // ln 2 = 2 atanh(1/3)
    two_atanh_interval(&rat(1, 3))
}

/// Outward-rounded rational enclosure of ln(x) for x > 0.
///
/// Reduces x = 2^k * m with m in [1,2), encloses ln m by the atanh series at
/// z = (m-1)/(m+1) <= 1/3, and adds k exact copies of an ln 2 enclosure.
pub fn ln_interval(x: &Rat) -> (Rat, Rat) {
    assert!(x.is_positive(), "ln_interval requires a positive argument");
    if x.is_one() {
        return (Rat::zero(), Rat::zero());
    }
    if x < &Rat::one() {
        let (lo, hi) = ln_interval(&x.recip());
        return (-hi, -lo);
    }
    // x >= 1: k = bit length of floor(x) minus one, so m = x / 2^k in [1, 2).
    let floor = x.to_integer();
    let k = floor.bits() - 1;
    let m = x / Rat::from_integer(BigInt::one() << k);
    debug_assert!(m >= Rat::one() && m < rat_int(2));
    let z = (&m - Rat::one()) / (&m + Rat::one());
    let (m_lo, m_hi) = two_atanh_interval(&z);
    let (l2_lo, l2_hi) = ln2_interval();
    let k = rat_int(k as i64);
    (&k * l2_lo + m_lo, &k * l2_hi + m_hi)
}

/// Outward-rounded enclosure of log2(x) for x >= 1.
pub fn log2_interval(x: &Rat) -> (Rat, Rat) {
    assert!(x >= &Rat::one());
    if x.is_one() {
        return (Rat::zero(), Rat::zero());
    }
    let (ln_lo, ln_hi) = ln_interval(x);
    let (l2_lo, l2_hi) = ln2_interval();
    (ln_lo / l2_hi, ln_hi / l2_lo)
}

/// Exact ceil(log2 n) for n >= 1.
pub fn ceil_log2(n: u64) -> u32 {
    assert!(n >= 1);
    if n == 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        assert_eq!(parse_rat("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_rat("5").unwrap(), rat_int(5));
        assert_eq!(parse_rat("-7/2").unwrap(), rat(-7, 2));
        assert!(parse_rat("x").is_err());
        assert!(parse_rat("1/0").is_err());
        assert_eq!(format_rat(&rat(6, 8)), "3/4");
        assert_eq!(format_rat(&rat_int(5)), "5");
    }

    #[test]
    fn ext_ordering() {
        assert!(Ext::Infinite > Ext::Finite(rat_int(1_000_000)));
        assert!(Ext::Finite(rat(1, 2)) < Ext::Finite(rat(2, 3)));
        assert_eq!(Ext::Infinite, Ext::Infinite);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(cost_ratio(&rat_int(3), &Rat::zero()), Ext::Infinite);
        assert_eq!(cost_ratio(&Rat::zero(), &Rat::zero()), Ext::one());
        assert_eq!(cost_ratio(&rat_int(6), &rat_int(3)), Ext::Finite(rat_int(2)));
        assert_eq!(utility_ratio(&Rat::zero(), &Rat::zero()), Ext::zero());
        assert_eq!(utility_ratio(&Rat::zero(), &rat_int(5)), Ext::zero());
        assert_eq!(utility_ratio(&rat(1, 2), &Rat::zero()), Ext::Infinite);
        assert_eq!(
            utility_ratio(&rat(1, 2), &rat(1, 4)),
            Ext::Finite(rat_int(2))
        );
    }

    // 40 digits of ln 2 and ln 10; the enclosure must bracket them.
    #[test]
    fn ln_encloses_known_constants() {
        let ln2_ref = parse_rat(
            "6931471805599453094172321214581765680755/10000000000000000000000000000000000000000",
        )
        .unwrap();
        let (lo, hi) = ln_interval(&rat_int(2));
        assert!(lo <= ln2_ref && ln2_ref <= hi);
        assert!(&hi - &lo < rat(1, 1_000_000_000_000_000_000));

        let ln10_ref = parse_rat(
            "2302585092994045684017991454684364207601/1000000000000000000000000000000000000000",
        )
        .unwrap();
        let (lo, hi) = ln_interval(&rat_int(10));
        assert!(lo <= ln10_ref && ln10_ref <= hi);
    }

    #[test]
    fn ln_is_consistent_across_reductions() {
        // ln 4 = 2 ln 2 must hold up to interval width.
        let (lo4, hi4) = ln_interval(&rat_int(4));
        let (lo2, hi2) = ln_interval(&rat_int(2));
        assert!(lo4 <= rat_int(2) * &hi2);
        assert!(hi4 >= rat_int(2) * &lo2);
        // ln(1/3) = -ln 3.
        let (lo, hi) = ln_interval(&rat(1, 3));
        let (lo3, hi3) = ln_interval(&rat_int(3));
        assert!(lo <= -&lo3 && -&hi3 <= hi);
        assert_eq!(ln_interval(&Rat::one()), (Rat::zero(), Rat::zero()));
    }

    #[test]
    fn log2_of_powers_is_tight() {
        let (lo, hi) = log2_interval(&rat_int(8));
        assert!(lo <= rat_int(3) && rat_int(3) <= hi);
        assert!(&hi - &lo < rat(1, 1_000_000_000));
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(3), 2);
        assert_eq!(ceil_log2(8), 3);
        assert_eq!(ceil_log2(9), 4);
    }
}
