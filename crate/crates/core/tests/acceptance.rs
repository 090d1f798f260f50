//! Acceptance suite. Runs without the libtest harness and prints one
//! `PASS`/`FAIL` line per criterion; exits non-zero if any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use sosfield::bounds::{
    charp_threshold, dube_bound, field_degree_bound, growth_bound, log2_big, BoundConfig, BoundParams, BoundValue,
    ExponentMode,
};
use sosfield::fields::{Field, FieldError, FieldElement, Rational};
use sosfield::groebner::{buchberger, divide, remainder, satisfies_criterion, BuchbergerConfig};
use sosfield::poly::{Monomial, Polynomial};
use sosfield::search::{search_backtracking, search_naive, SearchConfig, SearchStatus};
use sosfield::sos::{
    catalog, exists_over, gen_sos_ideal, reduce_formula_mod_p, verify_formula, Existence, SosError, SosFormula,
    SosType,
};
use sosfield::zeta::{bombieri_bound, count_all, predict_counts, reduce_system, reconstruct_zeta, series_from_counts, ZetaFunction};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    ensure(took < limit, || format!("{what} took {took:?}, limit {limit:?}"))
}

fn sos(r: usize, s: usize, n: usize) -> SosType {
    SosType::new(r, s, n).unwrap()
}

fn odd_primes_up_to(n: u64) -> Vec<u64> {
    (3..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

fn criterion_1() -> Check {
    let mut checks = 0;
    let mut fields = vec![Field::Rational];
    for p in [3, 5, 7, 11, 13] {
        fields.push(Field::prime(p).unwrap());
    }
    for field in &fields {
        for n in [1, 2, 4, 8] {
            let start = Instant::now();
            let f = catalog(n, field).map_err(|e| e.to_string())?;
            let ok = verify_formula(&f).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{n}-square identity fails over {field}"))?;
            within(start, Duration::from_secs(1), &format!("{n}-square over {field}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} catalog identities verified"))
}

fn criterion_2() -> Check {
    let cfg = BuchbergerConfig {
        normalize_monic: true,
        ..Default::default()
    };
    let mut runs = 0;
    for t in [sos(1, 2, 1), sos(2, 2, 1)] {
        for field in [Field::Rational, Field::prime(3).unwrap(), Field::prime(5).unwrap(), Field::prime(7).unwrap()] {
            let start = Instant::now();
            let e = exists_over(t, &field, &cfg).map_err(|e| e.to_string())?;
            ensure(e == Existence::DoesNotExist, || format!("{t} over {field}: {e:?}"))?;
            within(start, Duration::from_secs(1), &format!("{t} over {field}"))?;
            runs += 1;
        }
    }
    Ok(format!("{runs} runs reached the unit ideal"))
}

fn naive_instances() -> Vec<(SosType, Field)> {
    let mut out = Vec::new();
    for (p, k) in [(3u64, 1usize), (5, 1), (7, 1), (3, 2)] {
        let q = p.pow(k as u32);
        for r in 1..=3 {
            for s in r..=3 {
                for n in 1..=3 {
                    let tensors = (q as f64).powi((r * s * n) as i32);
                    if tensors <= 1e6 {
                        out.push((sos(r, s, n), Field::finite(p, k).unwrap()));
                    }
                }
            }
        }
    }
    out
}

fn criterion_3() -> Check {
    let q = exists_over(sos(1, 1, 1), &Field::Rational, &BuchbergerConfig::default()).map_err(|e| e.to_string())?;
    ensure(q == Existence::Exists, || format!("[1,1,1] over Q: {q:?}"))?;

    let start = Instant::now();
    let cfg = BuchbergerConfig {
        normalize_monic: true,
        ..Default::default()
    };
    let f101 = exists_over(sos(2, 2, 2), &Field::prime(101).unwrap(), &cfg).map_err(|e| e.to_string())?;
    ensure(f101 == Existence::Exists, || format!("[2,2,2] over F_101: {f101:?}"))?;
    let f101_time = start.elapsed();

    let mut cfg3 = SearchConfig::new(sos(2, 2, 2), Field::prime(3).unwrap());
    cfg3.emit = sosfield::search::Emit::First;
    let found = search_backtracking(&cfg3).map_err(|e| e.to_string())?;
    ensure(found.status == SearchStatus::Found, || "no [2,2,2] formula over F_3".into())?;
    let ok = verify_formula(&found.formulas[0]).map_err(|e| e.to_string())?;
    ensure(ok, || "found [2,2,2] formula fails verification".into())?;

    let instances = naive_instances();
    for (t, field) in &instances {
        let cfg = SearchConfig::new(*t, field.clone());
        let naive = search_naive(&cfg).map_err(|e| e.to_string())?;
        let bt = search_backtracking(&cfg).map_err(|e| e.to_string())?;
        ensure(naive.status == bt.status && naive.formulas == bt.formulas, || {
            format!("naive and backtracking disagree on {t} over {field}")
        })?;
    }
    Ok(format!(
        "[2,2,2] proper over F_101 in {f101_time:?}; naive = backtracking on {} instances",
        instances.len()
    ))
}

fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

fn criterion_4() -> Check {
    let x = Polynomial::var(1, 0, Rational::one());
    let x2m1 = &(&x * &x) - &Polynomial::constant(1, Rational::one());
    let system = reduce_system(&[x2m1], 5).map_err(|e| e.to_string())?;
    let counted = count_all(&system, 5, 6, 1 << 20).map_err(|e| e.to_string())?;
    // x = 1 and x = -1 in every field of odd characteristic.
    let counts: Vec<BigUint> = vec![BigUint::from(2u32); 6];
    ensure(counted.counts == counts, || format!("counts {:?}", counted.counts))?;

    let series = series_from_counts(&counts, 6).map_err(|e| e.to_string())?;
    let zf = reconstruct_zeta(&series, 0, 2, true).map_err(|e| e.to_string())?;
    let expected = ZetaFunction::new(vec![big(1)], vec![big(1), big(-2), big(1)]).unwrap();
    ensure(zf == expected, || format!("reconstructed {zf:?}"))?;
    let predicted = predict_counts(&zf, 6).map_err(|e| e.to_string())?;
    ensure(predicted == vec![big(2); 6], || format!("predicted {predicted:?}"))?;
    let bb = bombieri_bound(2, 1, 1);
    ensure(bb == BigUint::from(289u32), || format!("bombieri_bound(2,1,1) = {bb}"))?;
    let degree = zf.deg_r1() + zf.deg_r2();
    ensure(degree == 2 && BigUint::from(degree) < bb, || format!("degree sum {degree}"))?;

    let zeros = vec![BigUint::zero(); 5];
    let zs = series_from_counts(&zeros, 5).map_err(|e| e.to_string())?;
    let zz = reconstruct_zeta(&zs, 1, 1, true).map_err(|e| e.to_string())?;
    for horizon in [1, 5, 20, 50] {
        let pred = predict_counts(&zz, horizon).map_err(|e| e.to_string())?;
        ensure(pred.len() == horizon && pred.iter().all(|c| c.is_zero()), || {
            format!("zero counts predict {pred:?}")
        })?;
    }
    Ok("R1 = 1, R2 = (1-T)^2, six counts reproduced, 2 < 289".into())
}

fn exact_of(v: &BoundValue) -> Option<&BigUint> {
    match v {
        BoundValue::Exact(x) => Some(x),
        _ => None,
    }
}

fn criterion_5() -> Check {
    let cfg = BoundConfig::default();
    let timed = |what: &str, f: &dyn Fn() -> Result<(), String>| -> Result<(), String> {
        let start = Instant::now();
        f()?;
        within(start, Duration::from_secs(1), what)
    };
    timed("bombieri", &|| {
        ensure(bombieri_bound(2, 1, 1) == BigUint::from(289u32), || "bombieri_bound(2,1,1)".into())
    })?;
    timed("dube(2,1)", &|| {
        let v = dube_bound(2, 1, &cfg);
        ensure(exact_of(&v) == Some(&BigUint::from(8u32)), || format!("dube_bound(2,1) = {v:?}"))
    })?;
    timed("dube(2,8)", &|| {
        let v = dube_bound(2, 8, &cfg);
        let want = BigUint::from(2u32) * BigUint::from(4u32).pow(128);
        ensure(exact_of(&v) == Some(&want) && want.bits() == 258, || format!("dube_bound(2,8) = {v:?}"))
    })?;
    timed("field degree", &|| {
        let a = field_degree_bound(sos(1, 1, 1), &cfg);
        ensure(exact_of(&a) == Some(&BigUint::from(578u32)), || format!("[1,1,1] field degree {a:?}"))?;
        let b = field_degree_bound(sos(2, 2, 2), &cfg);
        let want = BigUint::from(2u32) * BigUint::from(17u32).pow(24);
        ensure(exact_of(&b) == Some(&want), || format!("[2,2,2] field degree {b:?}"))
    })?;
    timed("charp", &|| {
        let params = BoundParams::new(sos(1, 1, 1), ExponentMode::AsStated);
        let v = charp_threshold(&params, &cfg);
        // Straight-line oracle: (3*2^17 - 2) * sum_{i=0}^{9} (5*2^17 - 3)^i.
        let two17 = BigUint::from(131072u32);
        let c = BigUint::from(3u32) * &two17 - BigUint::from(2u32);
        let b = BigUint::from(5u32) * &two17 - BigUint::from(3u32);
        let mut sum = BigUint::zero();
        let mut power = BigUint::one();
        for _ in 0..=9 {
            sum += &power;
            power *= &b;
        }
        let oracle = c * sum;
        match &v {
            BoundValue::Log2Exact(x) => ensure(*x == oracle && x.bits() == 193, || {
                format!("charp log2 payload {x} ({} bits), oracle {oracle}", x.bits())
            }),
            other => Err(format!("charp tier {}", other.tier_name())),
        }
    })?;
    Ok("bombieri 289, dube 8 and 2*4^128, field degree 578 and 2*17^24, charp 193-bit".into())
}

fn random_poly(rng: &mut StdRng, nvars: usize) -> Polynomial<Rational> {
    let nterms = rng.gen_range(1..=4);
    let terms = (0..nterms).map(|_| {
        let deg = rng.gen_range(0..=2u32);
        let mut exps = vec![0u32; nvars];
        for _ in 0..deg {
            exps[rng.gen_range(0..nvars)] += 1;
        }
        let c = loop {
            let c = rng.gen_range(-3..=3i64);
            if c != 0 {
                break c;
            }
        };
        (Rational::from_integer(c), Monomial::new(exps))
    });
    Polynomial::from_terms(nvars, terms)
}

fn check_division(f: &Polynomial<Rational>, gens: &[Polynomial<Rational>]) -> Result<(), String> {
    let se = divide(f, gens).map_err(|e| e.to_string())?;
    ensure(&se.reconstruct(gens) == f, || format!("reconstruction fails for {f:?}"))?;
    for t in se.remainder.terms() {
        ensure(
            gens.iter().all(|g| !g.leading_monomial().unwrap().divides(&t.mono)),
            || format!("remainder term {:?} is divisible", t.mono),
        )?;
    }
    if let Some(lead) = f.leading_monomial() {
        for q in &se.quotients {
            let m = q.term.mono.mul(gens[q.index].leading_monomial().unwrap());
            ensure(m <= *lead, || format!("in(m_u g_u) = {m:?} exceeds in(f) = {lead:?}"))?;
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    let target = 500;
    let mut done = 0;
    let mut unit = 0;
    let cfg = BuchbergerConfig::default();
    while done < target {
        let nvars = rng.gen_range(1..=4);
        let ngens = rng.gen_range(1..=3);
        let gens: Vec<_> = (0..ngens)
            .map(|_| random_poly(&mut rng, nvars))
            .filter(|g| !g.is_zero())
            .collect();
        if gens.is_empty() {
            continue;
        }
        for _ in 0..3 {
            let f = random_poly(&mut rng, nvars);
            check_division(&f, &gens)?;
        }
        let gb = buchberger(&gens, &cfg).map_err(|e| e.to_string())?;
        if gb.contains_unit() {
            unit += 1;
        } else {
            let ok = satisfies_criterion(&gb.basis).map_err(|e| e.to_string())?;
            ensure(ok, || format!("S-pairs of the basis of {gens:?} do not all reduce to 0"))?;
        }
        for g in &gens {
            let r = remainder(g, &gb.basis).map_err(|e| e.to_string())?;
            ensure(r.is_zero(), || format!("generator {g:?} does not reduce to 0"))?;
        }
        done += 1;
    }
    within(start, Duration::from_secs(60), "property suite")?;
    Ok(format!("{done} random ideals ({unit} unit) in {:?}", start.elapsed()))
}

fn random_rational(rng: &mut StdRng) -> Rational {
    let bits = rng.gen_range(1..=96u32);
    let bound = 1i128 << bits.min(62);
    let num = rng.gen_range(-bound..=bound);
    let den = rng.gen_range(1..=bound);
    Rational::new(num, den).unwrap()
}

fn criterion_7() -> Check {
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let samples = 10_000;
    for _ in 0..samples {
        let x = random_rational(&mut rng);
        let y = random_rational(&mut rng);
        let (px, py) = (x.p_measure().0, y.p_measure().0);
        let pxy = (&x * &y).p_measure().0;
        let psum = (&x + &y).p_measure().0;
        ensure(pxy <= &px * &py, || format!("P({x} * {y}) = {pxy}"))?;
        ensure(psum <= BigUint::from(2u32) * &px * &py, || format!("P({x} + {y}) = {psum}"))?;
    }

    let cfg = BoundConfig::default();
    let mut steps = 0;
    let mut worst = 0f64;
    for t in [sos(1, 1, 1), sos(1, 1, 2), sos(1, 2, 1), sos(1, 2, 2), sos(2, 2, 1), sos(2, 2, 2), sos(1, 3, 2), sos(1, 2, 3), sos(1, 1, 3)] {
        let gb = buchberger(&gen_sos_ideal(t).generators, &BuchbergerConfig::default()).map_err(|e| e.to_string())?;
        let heights = gb.trace.max_p_by_extension().map_err(|e| e.to_string())?;
        let params = BoundParams::new(t, ExponentMode::AsStated);
        for (m, p) in heights.iter().enumerate() {
            let observed = log2_big(p);
            worst = worst.max(observed);
            let bound = growth_bound(&params, &BigUint::from(m), &cfg);
            ensure(bound.log2_at_least(observed), || {
                format!("{t} step {m}: log2 max P = {observed} above {bound:?}")
            })?;
            steps += 1;
        }
    }
    Ok(format!(
        "{samples} rational pairs; {steps} Groebner steps within the growth bound (max log2 P = {worst:.2})"
    ))
}

fn criterion_8() -> Check {
    let primes = odd_primes_up_to(100);
    let mut checks = 0;
    for n in [1, 2, 4, 8] {
        let f = catalog(n, &Field::Rational).map_err(|e| e.to_string())?;
        for &p in &primes {
            let g = reduce_formula_mod_p(&f, p).map_err(|e| e.to_string())?;
            let ok = verify_formula(&g).map_err(|e| e.to_string())?;
            ensure(ok, || format!("{n}-square mod {p} fails"))?;
            checks += 1;
        }
    }
    let half = Rational::new(1, 3).unwrap();
    let t = sos(1, 1, 1);
    let f = SosFormula::new(t, Field::Rational, vec![FieldElement::Rational(half)]).map_err(|e| e.to_string())?;
    match reduce_formula_mod_p(&f, 3) {
        Err(SosError::Field(FieldError::DenominatorDivisibleByP { p: 3, .. })) => {}
        other => return Err(format!("denominator divisible by p gave {other:?}")),
    }
    Ok(format!("{checks} reductions verified over {} primes; denominator error raised", primes.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 8] = [
        ("catalog verification", criterion_1),
        ("non-existence at tiny scale", criterion_2),
        ("existence at tiny scale", criterion_3),
        ("zeta round trip", criterion_4),
        ("bound calculators", criterion_5),
        ("division/Buchberger properties", criterion_6),
        ("P-measure inequalities", criterion_7),
        ("reduction mod p", criterion_8),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {} ({name})", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let took = start.elapsed();
        match result {
            Ok(detail) => println!("{label}: PASS [{took:.2?}] {detail}"),
            Err(why) => {
                failed += 1;
                println!("{label}: FAIL [{took:.2?}] {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
