//! Closed-form bounds: Gröbner degree, division and Buchberger coefficient
//! growth, the characteristic threshold and the field-degree horizon.
//!
//! Values explode quickly, so each result comes in one of three tiers:
//! the exact integer, the exact integer `log2` of a power of two, or a
//! floating approximation of `log2(log2(value))`.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::sos::SosType;

/// Default bit-length cap for exact payloads.
pub const DEFAULT_BIT_CAP: u64 = 1_000_000;

/// Intermediate quantities (`q`, `m`, degrees) are kept exact up to this many bits.
const EXACT_LIMIT_BITS: f64 = (1u64 << 22) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundConfig {
    pub bit_cap: u64,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            bit_cap: DEFAULT_BIT_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BoundValue {
    Exact(BigUint),
    /// The bound is `2^payload`.
    Log2Exact(BigUint),
    /// `log2(log2(bound))`, possibly `inf` when even that overflows `f64`.
    LogLog2Approx(f64),
}

impl BoundValue {
    pub fn tier_name(&self) -> &'static str {
        match self {
            BoundValue::Exact(_) => "exact",
            BoundValue::Log2Exact(_) => "log2-exact",
            BoundValue::LogLog2Approx(_) => "loglog2-approx",
        }
    }

    /// Exact `log2` when the bound is a known power of two.
    pub fn log2_exact(&self) -> Option<BigUint> {
        match self {
            BoundValue::Exact(x) if is_power_of_two(x) => Some(BigUint::from(x.bits() - 1)),
            BoundValue::Log2Exact(l) => Some(l.clone()),
            _ => None,
        }
    }

    /// Approximate `log2(log2(bound))`.
    pub fn loglog2(&self) -> f64 {
        match self {
            BoundValue::Exact(x) => log2_big(x).log2(),
            BoundValue::Log2Exact(l) => log2_big(l),
            BoundValue::LogLog2Approx(v) => *v,
        }
    }

    /// Whether `log2(bound) >= observed_log2`.
    pub fn log2_at_least(&self, observed_log2: f64) -> bool {
        if observed_log2 <= 0.0 {
            return true;
        }
        match self {
            BoundValue::Exact(x) => log2_big(x) >= observed_log2,
            BoundValue::Log2Exact(l) => log2_big(l) >= observed_log2,
            BoundValue::LogLog2Approx(v) => *v >= observed_log2.log2(),
        }
    }
}

pub fn is_power_of_two(x: &BigUint) -> bool {
    !x.is_zero() && x.trailing_zeros() == Some(x.bits() - 1)
}

/// Floating `log2` of a big integer; `-inf` for zero.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().log2();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().unwrap().log2() + shift as f64
}

/// A nonnegative quantity known exactly when small enough, always by its `log2`.
#[derive(Clone, Debug, PartialEq)]
pub struct Magnitude {
    pub exact: Option<BigUint>,
    pub log2: f64,
}

impl Magnitude {
    pub fn exact(x: BigUint) -> Self {
        let log2 = log2_big(&x);
        Magnitude {
            exact: Some(x),
            log2,
        }
    }

    /// `2^e`, exact when `e` is small enough.
    fn pow2(e: &Magnitude) -> Self {
        match &e.exact {
            Some(ex) if (ex.to_f64().unwrap()) <= EXACT_LIMIT_BITS => {
                Magnitude::exact(BigUint::one() << ex.to_u64().unwrap())
            }
            _ => Magnitude {
                exact: None,
                log2: e.value_f64(),
            },
        }
    }

    fn value_f64(&self) -> f64 {
        match self.exact.as_ref().and_then(|x| x.to_f64()) {
            Some(v) if v.is_finite() => v,
            _ => self.log2.exp2(),
        }
    }

    /// Bound value with tier decided by `cfg`.
    pub fn to_bound(&self, cfg: &BoundConfig) -> BoundValue {
        match &self.exact {
            Some(x) => tier_from_exact(x.clone(), cfg),
            None => BoundValue::LogLog2Approx(self.log2.log2()),
        }
    }
}

fn tier_from_exact(x: BigUint, cfg: &BoundConfig) -> BoundValue {
    if x.bits() <= cfg.bit_cap {
        BoundValue::Exact(x)
    } else if is_power_of_two(&x) {
        tier_from_log2(&Magnitude::exact(BigUint::from(x.bits() - 1)), cfg)
    } else {
        BoundValue::LogLog2Approx(log2_big(&x).log2())
    }
}

/// Tier for the bound `2^l`.
fn tier_from_log2(l: &Magnitude, cfg: &BoundConfig) -> BoundValue {
    if let Some(le) = &l.exact {
        if le.to_u64().is_some_and(|v| v < cfg.bit_cap) {
            return BoundValue::Exact(BigUint::one() << le.to_u64().unwrap());
        }
        if le.bits() <= cfg.bit_cap {
            return BoundValue::Log2Exact(le.clone());
        }
    }
    BoundValue::LogLog2Approx(l.log2)
}

/// `log2(2^a + 2^b)` without overflow.
fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `C(n + k, k)` for small `k` and `n` given as a magnitude.
pub fn binomial_plus(n: &Magnitude, k: u64) -> Magnitude {
    if let Some(ne) = &n.exact {
        let mut c = BigUint::one();
        for i in 1..=k {
            c = c * (ne + BigUint::from(i)) / BigUint::from(i);
        }
        return Magnitude::exact(c);
    }
    // n far exceeds k here, so log2(n + i) is log2(n) to f64 precision.
    let log_fact: f64 = (1..=k).map(|i| (i as f64).log2()).sum();
    Magnitude {
        exact: None,
        log2: k as f64 * n.log2 - log_fact,
    }
}

/// `2 (d^2/2 + d)^(2^(v-1))`, floored when `d` is odd.
pub fn dube_bound(d: u64, v: u64, cfg: &BoundConfig) -> BoundValue {
    assert!(d >= 1 && v >= 1);
    let b = BigUint::from(d * d + 2 * d);
    // value = b^E / 2^(E-1) with E = 2^(v-1)
    let e = Magnitude::pow2(&Magnitude::exact(BigUint::from(v - 1)));
    let lb = log2_big(&b);
    // log2(log2(value)) = log2(1 + E (log2 b - 1))
    let loglog = log2_add(0.0, e.log2 + (lb - 1.0).log2());
    if d.is_multiple_of(2) {
        let base = &b >> 1u32;
        if is_power_of_two(&base) {
            let t = base.bits() - 1;
            let l = match &e.exact {
                Some(ex) => Magnitude::exact(BigUint::one() + ex * t),
                None => Magnitude {
                    exact: None,
                    log2: loglog,
                },
            };
            return tier_from_log2(&l, cfg);
        }
    }
    match &e.exact {
        Some(ex) if (ex.to_f64().unwrap() * lb) <= cfg.bit_cap as f64 + 64.0 => {
            let ex = ex.to_u32().unwrap();
            let value = if d.is_multiple_of(2) {
                (&b >> 1u32).pow(ex) * 2u32
            } else {
                b.pow(ex) >> (ex - 1)
            };
            tier_from_exact(value, cfg)
        }
        _ => BoundValue::LogLog2Approx(loglog),
    }
}

/// `2^(3*2^p - 2) * M^(5*2^p - 3)` with `p = C(v + d, d)`.
pub fn division_p_bound(m: &BigUint, v: u64, d: u64, cfg: &BoundConfig) -> BoundValue {
    assert!(!m.is_zero());
    let p = binomial_plus(&Magnitude::exact(BigUint::from(d)), v);
    division_bound_for_p(m, &p, cfg)
}

fn division_bound_for_p(m: &BigUint, p: &Magnitude, cfg: &BoundConfig) -> BoundValue {
    let two_p = Magnitude::pow2(p);
    let lm = log2_big(m);
    if let Some(tp) = &two_p.exact {
        let c = tp * 3u32 - 2u32;
        let a = tp * 5u32 - 3u32;
        if is_power_of_two(m) {
            return tier_from_log2(&Magnitude::exact(c + a * (m.bits() - 1)), cfg);
        }
        let est = tp.to_f64().unwrap() * (3.0 + 5.0 * lm);
        if est <= cfg.bit_cap as f64 + 64.0 {
            let value = m.pow(a.to_u32().unwrap()) << c.to_u64().unwrap();
            return tier_from_exact(value, cfg);
        }
    }
    // log2(bound) = 2^p (3 + 5 log2 M) - 2 - 3 log2 M
    BoundValue::LogLog2Approx(two_p.log2 + (3.0 + 5.0 * lm).log2())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExponentMode {
    /// Exponent variable `e = n`.
    AsStated,
    /// Exponent variable `e = rsn`, the number of variables of the ideal.
    DubeConsistent,
}

impl ExponentMode {
    pub fn name(&self) -> &'static str {
        match self {
            ExponentMode::AsStated => "as-stated",
            ExponentMode::DubeConsistent => "dube-consistent",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundParams {
    pub sos_type: SosType,
    pub mode: ExponentMode,
}

impl BoundParams {
    pub fn new(sos_type: SosType, mode: ExponentMode) -> Self {
        BoundParams { sos_type, mode }
    }

    pub fn v(&self) -> u64 {
        self.sos_type.nvars() as u64
    }

    pub fn e(&self) -> u64 {
        match self.mode {
            ExponentMode::AsStated => self.sos_type.n as u64,
            ExponentMode::DubeConsistent => self.v(),
        }
    }

    /// `2^(e-1)`
    fn half_power(&self) -> Magnitude {
        Magnitude::pow2(&Magnitude::exact(BigUint::from(self.e() - 1)))
    }

    /// `4^(2^(e-1) + 1)`, the degree parameter behind `q`.
    pub fn q_degree(&self) -> Magnitude {
        let h = self.half_power();
        let exp = match &h.exact {
            Some(x) => Magnitude::exact((x + 1u32) * 2u32),
            None => Magnitude {
                exact: None,
                log2: h.log2 + 1.0,
            },
        };
        Magnitude::pow2(&exp)
    }

    /// `2 * 4^(2^(e-1))`, the Gröbner degree bound for quadratic generators.
    pub fn dube_degree(&self) -> Magnitude {
        let h = self.half_power();
        let exp = match &h.exact {
            Some(x) => Magnitude::exact(x * 2u32 + 1u32),
            None => Magnitude {
                exact: None,
                log2: h.log2 + 1.0,
            },
        };
        Magnitude::pow2(&exp)
    }

    /// `q = C(v + 4^(2^(e-1)+1), 4^(2^(e-1)+1))`
    pub fn q(&self) -> Magnitude {
        binomial_plus(&self.q_degree(), self.v())
    }

    /// `C(v + D, D)` with `D` the Dubé degree.
    pub fn step_bound(&self) -> Magnitude {
        binomial_plus(&self.dube_degree(), self.v())
    }
}

pub fn buchberger_step_bound(params: &BoundParams, cfg: &BoundConfig) -> BoundValue {
    params.step_bound().to_bound(cfg)
}

/// `log2` of the growth bound: `(3*2^q - 2) * sum_{i=0}^m (5*2^q - 3)^i`.
fn growth_log2(q: &Magnitude, m: &Magnitude, cfg: &BoundConfig) -> Magnitude {
    if let (Some(qe), Some(me)) = (&q.exact, &m.exact) {
        if let (Some(qf), Some(mf)) = (qe.to_f64(), me.to_f64()) {
            let lower_bits = qf + 1.0 + mf * (qf + 2.0);
            if lower_bits <= cfg.bit_cap as f64 + 64.0 {
                let two_q = BigUint::one() << qe.to_u64().unwrap();
                let c = &two_q * 3u32 - 2u32;
                let a = &two_q * 5u32 - 3u32;
                let m = me.to_u64().unwrap();
                let mut sum = BigUint::zero();
                let mut power = BigUint::one();
                for _ in 0..=m {
                    sum += &power;
                    power *= &a;
                }
                return Magnitude::exact(c * sum);
            }
        }
    }
    let (log2_c, log2_a) = match q.exact.as_ref().and_then(|x| x.to_u32()) {
        Some(qs) if qs <= 900 => {
            let t = 2f64.powi(qs as i32);
            ((3.0 * t - 2.0).log2(), (5.0 * t - 3.0).log2())
        }
        _ => {
            let qf = q.value_f64();
            (qf + 3f64.log2(), qf + 5f64.log2())
        }
    };
    // S = (a^(m+1) - 1) / (a - 1), dominated by a^m
    let mf = m.value_f64();
    let log2_s = if mf == 0.0 {
        0.0
    } else {
        (mf + 1.0) * log2_a - (log2_a.exp2() - 1.0).log2().min(log2_a)
    };
    Magnitude {
        exact: None,
        log2: log2_c.log2() + log2_s,
    }
}

/// Growth bound at step `m`.
pub fn growth_bound(params: &BoundParams, m: &BigUint, cfg: &BoundConfig) -> BoundValue {
    tier_from_log2(&growth_log2(&params.q(), &Magnitude::exact(m.clone()), cfg), cfg)
}

/// Growth bound with the parameter `q` given directly.
pub fn growth_bound_with_q(q: &BigUint, m: &BigUint, cfg: &BoundConfig) -> BoundValue {
    tier_from_log2(
        &growth_log2(&Magnitude::exact(q.clone()), &Magnitude::exact(m.clone()), cfg),
        cfg,
    )
}

/// `log2 a_m` by iterating `a_m = 2^(3*2^q-2) * a_{m-1}^(5*2^q-3)` from `a_{-1} = 1`.
pub fn growth_log2_by_recursion(q: u32, m: u32) -> BigUint {
    let two_q = BigUint::one() << q;
    let c = &two_q * 3u32 - 2u32;
    let a = &two_q * 5u32 - 3u32;
    let mut log = BigUint::zero();
    for _ in 0..=m {
        log = &c + &a * log;
    }
    log
}

/// Growth bound evaluated at the Buchberger step bound; primes above it are safe.
pub fn charp_threshold(params: &BoundParams, cfg: &BoundConfig) -> BoundValue {
    tier_from_log2(&growth_log2(&params.q(), &params.step_bound(), cfg), cfg)
}

/// `2 * 17^(rsn + r^2 s^2)`.
pub fn field_degree_bound(t: SosType, cfg: &BoundConfig) -> BoundValue {
    let rs = (t.r * t.s) as u64;
    let exp = t.nvars() as u64 + rs * rs;
    let lb = 17f64.log2();
    if exp as f64 * lb <= cfg.bit_cap as f64 + 64.0 {
        tier_from_exact(BigUint::from(17u32).pow(exp as u32) * 2u32, cfg)
    } else {
        BoundValue::LogLog2Approx((1.0 + exp as f64 * lb).log2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> BoundConfig {
        BoundConfig::default()
    }

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn params(r: usize, s: usize, n: usize, mode: ExponentMode) -> BoundParams {
        BoundParams::new(SosType::new(r, s, n).unwrap(), mode)
    }

    #[test]
    fn dube_examples() {
        assert_eq!(dube_bound(2, 1, &cfg()), BoundValue::Exact(big(8)));
        assert_eq!(dube_bound(2, 2, &cfg()), BoundValue::Exact(big(32)));
        let v = dube_bound(2, 8, &cfg());
        assert_eq!(v, BoundValue::Exact(BigUint::from(4u32).pow(128) * 2u32));
        if let BoundValue::Exact(x) = v {
            assert_eq!(x.bits(), 258);
        }
        // d = 1: 2 * (3/2)^1 = 3; v = 2: 2 * (3/2)^2 = 4.5 -> 4
        assert_eq!(dube_bound(1, 1, &cfg()), BoundValue::Exact(big(3)));
        assert_eq!(dube_bound(1, 2, &cfg()), BoundValue::Exact(big(4)));
        // d = 4: 2 * 12^2
        assert_eq!(dube_bound(4, 2, &cfg()), BoundValue::Exact(big(288)));
    }

    #[test]
    fn dube_tiers() {
        let v = dube_bound(2, 30, &cfg());
        assert_eq!(v, BoundValue::Log2Exact(BigUint::from((1u64 << 30) + 1)));
        match dube_bound(3, 40, &cfg()) {
            BoundValue::LogLog2Approx(x) => assert!((x - (39.0 + 7.5f64.log2().log2())).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn division_examples() {
        assert_eq!(division_p_bound(&big(1), 1, 2, &cfg()), BoundValue::Exact(BigUint::one() << 22));
        assert_eq!(division_p_bound(&big(1), 1, 1, &cfg()), BoundValue::Exact(BigUint::one() << 10));
        assert_eq!(division_p_bound(&big(2), 1, 1, &cfg()), BoundValue::Exact(BigUint::one() << 27));
        assert_eq!(
            division_p_bound(&big(3), 1, 1, &cfg()),
            BoundValue::Exact(BigUint::from(3u32).pow(17) << 10)
        );
    }

    #[test]
    fn step_bound_examples() {
        let c = cfg();
        assert_eq!(buchberger_step_bound(&params(1, 1, 1, ExponentMode::AsStated), &c), BoundValue::Exact(big(9)));
        assert_eq!(buchberger_step_bound(&params(1, 1, 2, ExponentMode::AsStated), &c), BoundValue::Exact(big(561)));
        assert_eq!(buchberger_step_bound(&params(1, 2, 1, ExponentMode::AsStated), &c), BoundValue::Exact(big(45)));
        assert_eq!(params(1, 1, 1, ExponentMode::AsStated).q().exact, Some(big(17)));
        assert_eq!(params(1, 1, 2, ExponentMode::AsStated).q().exact, Some(big(2145)));
    }

    #[test]
    fn growth_examples() {
        assert_eq!(growth_bound_with_q(&big(1), &big(0), &cfg()), BoundValue::Exact(big(16)));
        for q in [2u64, 5, 17] {
            let expected = (1u64 << q) * 3 - 2;
            assert_eq!(
                growth_bound_with_q(&big(q), &big(0), &cfg()).log2_exact(),
                Some(big(expected))
            );
        }
    }

    #[test]
    fn charp_examples() {
        let p = params(1, 1, 1, ExponentMode::AsStated);
        let v = charp_threshold(&p, &cfg());
        let BoundValue::Log2Exact(l) = &v else { panic!("{v:?}") };
        assert_eq!(l.bits(), 193);
        assert_eq!(l, &growth_log2_by_recursion(17, 9));
        assert_eq!(charp_threshold(&params(1, 1, 1, ExponentMode::DubeConsistent), &cfg()), v);

        let v = charp_threshold(&params(1, 1, 2, ExponentMode::AsStated), &cfg());
        let BoundValue::LogLog2Approx(x) = v else { panic!("{v:?}") };
        // log2 L ~ log2(log2(3 * 2^2145)) + 561 * log2(5 * 2^2145)
        let expected = (2145.0 + 3f64.log2()).log2() + 561.0 * (2145.0 + 5f64.log2());
        assert!((x - expected).abs() < 1e-6, "{x} vs {expected}");
    }

    #[test]
    fn field_degree_examples() {
        let t = |r, s, n| SosType::new(r, s, n).unwrap();
        assert_eq!(field_degree_bound(t(1, 1, 1), &cfg()), BoundValue::Exact(big(578)));
        assert_eq!(
            field_degree_bound(t(2, 2, 2), &cfg()),
            BoundValue::Exact(BigUint::from(17u32).pow(24) * 2u32)
        );
        assert_eq!(
            field_degree_bound(t(1, 2, 1), &cfg()),
            BoundValue::Exact(BigUint::from(17u32).pow(6) * 2u32)
        );
    }

    #[test]
    fn cap_escalates() {
        let small = BoundConfig { bit_cap: 16 };
        assert_eq!(growth_bound_with_q(&big(2), &big(0), &small), BoundValue::Exact(big(1 << 10)));
        assert_eq!(growth_bound_with_q(&big(3), &big(0), &small), BoundValue::Log2Exact(big(22)));
        assert!(matches!(field_degree_bound(SosType::new(2, 2, 2).unwrap(), &small), BoundValue::LogLog2Approx(_)));
    }

    #[test]
    fn astronomical_parameters_stay_finite_or_inf() {
        let v = charp_threshold(&params(2, 2, 2, ExponentMode::AsStated), &cfg());
        assert!(matches!(v, BoundValue::LogLog2Approx(x) if x.is_finite() && x > 50.0));
        let v = charp_threshold(&params(1, 1, 3, ExponentMode::AsStated), &cfg());
        assert!(matches!(v, BoundValue::LogLog2Approx(_)));
    }
}
