use std::process::ExitCode;
use std::time::{Duration, Instant};

use hotplug_cc::analysis::DEFAULT_ALPHA_STEP;
use hotplug_cc::combin::{binomial, power_set, subsets};
use hotplug_cc::designs::design_3_8_4_1;
use hotplug_cc::engine::format_ratio;
use hotplug_cc::gf::GfField;
use hotplug_cc::mds::SymbolBlock;
use hotplug_cc::{
    converse_bound, find_zeta, man_hppda, proposed_point, tdesign_hppda, theorem1_point, verify_hppda,
    HpPda, RsCodec, Simulator, VerifyMode,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

const EX1_P: &str = "\
*,*,-,-,-,-
*,-,*,-,-,-
*,-,-,*,-,-
*,-,-,-,*,-
*,-,-,-,-,*
-,*,*,-,-,-
-,*,-,*,-,-
-,*,-,-,*,-
-,*,-,-,-,*
-,-,*,*,-,-
-,-,*,-,*,-
-,-,*,-,-,*
-,-,-,*,*,-
-,-,-,*,-,*
-,-,-,-,*,*
";

const EX1_B: &str = "\
*,*,1,2
*,1,*,3
*,2,3,*
1,*,*,4
2,*,4,*
3,4,*,*
";

const EX2_P: &str = "\
*,*,-,-,*,*,-,-
-,-,*,*,-,-,*,*
-,*,-,*,-,*,-,*
*,-,*,-,*,-,*,-
*,-,-,*,*,-,-,*
-,*,*,-,-,*,*,-
*,*,*,*,-,-,-,-
-,-,-,-,*,*,*,*
*,*,-,-,-,-,*,*
-,-,*,*,*,*,-,-
*,-,*,-,-,*,-,*
-,*,-,*,*,-,*,-
*,-,-,*,-,*,*,-
-,*,*,-,*,-,-,*
";

const EX2_B: &str = "\
*,*,1
*,1,*
1,*,*
*,*,2
*,2,*
2,*,*
*,3,4
3,*,5
4,5,*
";

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

fn sorted_terms(terms: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut v = terms.to_vec();
    v.sort_unstable();
    v
}

struct Example<'a> {
    h: HpPda,
    p: &'a str,
    b: &'a str,
    tau: &'a [usize],
    demands: &'a [usize],
    zeta: &'a [usize],
    /// (file, row) terms of X_1, X_2, ...
    sums: &'a [&'a [(usize, usize)]],
    rate: (i64, i64),
}

fn check_example(ex: Example) -> Check {
    ensure!(ex.h.p().to_string() == ex.p, "P differs:\n{}", ex.h.p());
    ensure!(ex.h.b().to_string() == ex.b, "B differs:\n{}", ex.h.b());
    let v = verify_hppda(&ex.h, VerifyMode::Exhaustive);
    ensure!(v.valid, "not an HpPDA: {:?}", v.problems);
    let m = find_zeta(&ex.h, ex.tau).map_err(|e| e.to_string())?;
    ensure!(m.zeta == ex.zeta, "zeta {:?}", m.zeta);

    let sim = Simulator::with_random_files(ex.h.clone(), 6, 7).map_err(|e| e.to_string())?;
    let d = sim.deliver(ex.tau, ex.demands).map_err(|e| e.to_string())?;
    ensure!(d.transmissions.len() == ex.sums.len(), "{} transmissions", d.transmissions.len());
    for (x, want) in d.transmissions.iter().zip(ex.sums) {
        let got: Vec<(usize, usize)> = x.terms.iter().map(|t| (t.file, t.row)).collect();
        ensure!(
            sorted_terms(&got) == sorted_terms(want),
            "X_{} = {:?}, expected {:?}",
            x.label,
            got,
            want
        );
    }
    let r = sim.report(&d).map_err(|e| e.to_string())?;
    ensure!(r.all_success(), "decoding failed: {:?}", r.users);
    ensure!(
        r.users.iter().map(|u| u.user).collect::<Vec<_>>() == ex.tau,
        "users {:?}",
        r.users
    );
    ensure!(r.rate == ratio(ex.rate.0, ex.rate.1), "rate {}", format_ratio(&r.rate));
    Ok(())
}

fn criterion_1() -> Check {
    let h = man_hppda(6, 4, 2).map_err(|e| e.to_string())?;
    check_example(Example {
        h,
        p: EX1_P,
        b: EX1_B,
        tau: &[1, 4, 5, 6],
        demands: &[2, 3, 1, 5],
        zeta: &[3, 4, 5, 13, 14, 15],
        sums: &[
            &[(2, 13), (3, 4), (1, 3)],
            &[(2, 14), (3, 5), (5, 3)],
            &[(2, 15), (1, 5), (5, 4)],
            &[(3, 15), (1, 14), (5, 13)],
        ],
        rate: (1, 2),
    })
}

fn criterion_2() -> Check {
    let h = tdesign_hppda(&design_3_8_4_1(), &[1, 2]).map_err(|e| e.to_string())?;
    ensure!(h.params().to_string() == "8 3 14 9 7 5 5", "params {}", h.params());
    check_example(Example {
        h,
        p: EX2_P,
        b: EX2_B,
        tau: &[2, 6, 8],
        demands: &[1, 3, 4],
        zeta: &[1, 9, 8, 6, 14, 11, 7, 10, 2],
        sums: &[
            &[(1, 8), (3, 9), (4, 1)],
            &[(1, 11), (3, 14), (4, 6)],
            &[(1, 10), (3, 7)],
            &[(1, 2), (4, 7)],
            &[(3, 2), (4, 10)],
        ],
        rate: (5, 11),
    })
}

fn exhaustive(h: HpPda, n: usize, seed: u64) -> Result<usize, String> {
    let (k, kp) = (h.params().k, h.params().k_active);
    let sim = Simulator::with_random_files(h, n, seed).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = 0;
    for tau in subsets(k, kp) {
        let mut vectors: Vec<Vec<usize>> = (0..20)
            .map(|_| (0..kp).map(|_| rng.random_range(1..=n)).collect())
            .collect();
        vectors.push(vec![1; kp]);
        vectors.push((1..=kp).collect());
        for d in &vectors {
            let r = sim.run(&tau, d).map_err(|e| format!("tau {tau:?} demands {d:?}: {e}"))?;
            ensure!(r.all_success(), "tau {tau:?} demands {d:?} failed");
            runs += 1;
        }
    }
    Ok(runs)
}

fn criterion_3() -> Check {
    let r1 = exhaustive(man_hppda(6, 4, 2).map_err(|e| e.to_string())?, 6, 1)?;
    ensure!(r1 == 15 * 22, "example 1 ran {r1}");
    let r2 = exhaustive(tdesign_hppda(&design_3_8_4_1(), &[1, 2]).map_err(|e| e.to_string())?, 6, 2)?;
    ensure!(r2 == 56 * 22, "example 2 ran {r2}");
    Ok(())
}

fn criterion_4() -> Check {
    let ex2 = tdesign_hppda(&design_3_8_4_1(), &[1, 2]).map_err(|e| e.to_string())?;
    let ex2b = tdesign_hppda(&design_3_8_4_1(), &[2, 2]).map_err(|e| e.to_string())?;
    let cases = [
        (proposed_point(&ex2), (7, 11), (5, 11)),
        (proposed_point(&ex2b), (7, 13), (8, 13)),
        (theorem1_point(&ex2), (7, 9), (5, 9)),
        (theorem1_point(&ex2b), (7, 12), (8, 12)),
    ];
    for (point, m, r) in cases {
        let p = point.map_err(|e| e.to_string())?;
        ensure!(
            p.m_over_n == ratio(m.0, m.1) && p.rate == ratio(r.0, r.1),
            "{} point ({}, {}), expected ({}/{}, {}/{})",
            p.scheme,
            format_ratio(&p.m_over_n),
            format_ratio(&p.rate),
            m.0,
            m.1,
            r.0,
            r.1
        );
    }
    Ok(())
}

fn criterion_5() -> Check {
    let (k, kp, n) = (20u64, 15u64, 20usize);
    for t in 1..=kp {
        let h = man_hppda(k as usize, kp as usize, t as usize).map_err(|e| e.to_string())?;
        let p = proposed_point(&h).map_err(|e| e.to_string())?;
        let denom = binomial(kp, t) - binomial(kp - 1, t - 1) + binomial(k - 1, t - 1);
        let mn = BigRational::new(binomial(k - 1, t - 1).into(), denom.into());
        let r = BigRational::new(binomial(kp, t + 1).into(), denom.into());
        ensure!(p.m_over_n == mn, "t={t}: M/N {}", format_ratio(&p.m_over_n));
        ensure!(p.rate == r, "t={t}: R {}", format_ratio(&p.rate));
        let m = n as f64 * ratio_f64(&p.m_over_n);
        let bound = converse_bound(n, kp as usize, m, DEFAULT_ALPHA_STEP).map_err(|e| e.to_string())?;
        let rate = ratio_f64(&p.rate);
        ensure!(rate >= bound - 1e-9, "t={t}: rate {rate} below bound {bound}");
    }
    Ok(())
}

fn ratio_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

fn random_message(codec: &RsCodec, rng: &mut ChaCha8Rng, len: usize) -> Vec<SymbolBlock> {
    let q = codec.field().size() as u32;
    (0..codec.k())
        .map(|_| (0..len).map(|_| rng.random_range(0..q) as u16).collect())
        .collect()
}

fn round_trip(codec: &RsCodec, coded: &[SymbolBlock], msg: &[SymbolBlock], coords: &[usize]) -> Check {
    let values: Vec<SymbolBlock> = coords.iter().map(|&c| coded[c - 1].clone()).collect();
    let back = codec.decode_from(coords, &values).map_err(|e| e.to_string())?;
    ensure!(back == msg, "[{},{}] subset {coords:?} decoded wrongly", codec.n(), codec.k());
    Ok(())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let c14 = RsCodec::new(14, 11).map_err(|e| e.to_string())?;
    let msg = random_message(&c14, &mut rng, 16);
    let coded = c14.encode(&msg).map_err(|e| e.to_string())?;
    let mut count = 0;
    for coords in subsets(14, 11) {
        round_trip(&c14, &coded, &msg, &coords)?;
        count += 1;
    }
    ensure!(count == 364, "[14,11] checked {count} subsets");

    let c15 = RsCodec::new(15, 8).map_err(|e| e.to_string())?;
    let msg = random_message(&c15, &mut rng, 16);
    let coded = c15.encode(&msg).map_err(|e| e.to_string())?;
    for _ in 0..5000 {
        let mut coords: Vec<usize> = sample(&mut rng, 15, 8).into_iter().map(|i| i + 1).collect();
        coords.sort_unstable();
        round_trip(&c15, &coded, &msg, &coords)?;
    }

    for f in [GfField::gf256(), GfField::gf65536()] {
        let q = f.size() as u32;
        for _ in 0..10_000 {
            let [a, b, c]: [u16; 3] = std::array::from_fn(|_| rng.random_range(0..q) as u16);
            ensure!(f.add(a, b) == f.add(b, a) && f.mul(a, b) == f.mul(b, a), "commutativity {a} {b}");
            ensure!(f.add(f.add(a, b), c) == f.add(a, f.add(b, c)), "additive associativity");
            ensure!(f.mul(f.mul(a, b), c) == f.mul(a, f.mul(b, c)), "multiplicative associativity");
            ensure!(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)), "distributivity");
            ensure!(f.add(a, 0) == a && f.mul(a, 1) == a && f.add(a, a) == 0, "identities");
            if a != 0 {
                ensure!(f.inv(a).map(|i| f.mul(a, i)) == Some(1), "inverse of {a}");
            }
        }
    }
    Ok(())
}

fn criterion_7() -> Check {
    let d = design_3_8_4_1();
    let report = d.verify();
    ensure!(report.valid, "design invalid: {:?}", report.violations);
    ensure!(d.num_blocks() == 14, "b = {}", d.num_blocks());
    for (s, want) in [(0, 14), (1, 7), (2, 3), (3, 1)] {
        let formula = d.lambda_s(s).map_err(|e| e.to_string())?;
        ensure!(formula == want, "lambda_{s} formula {formula}");
        for set in subsets(8, s) {
            let counted = d.blocks().iter().filter(|b| set.iter().all(|p| b.contains(p))).count();
            ensure!(counted == want, "lambda_{s} enumeration {counted} for {set:?}");
        }
    }
    let mut checks = 0;
    for tset in subsets(8, 3) {
        for y in power_set(&tset) {
            let formula = d.lambda_exact(y.len()).map_err(|e| e.to_string())?;
            let counted = d
                .blocks()
                .iter()
                .filter(|b| tset.iter().all(|p| b.contains(p) == y.contains(p)))
                .count();
            let matched = d.blocks_matching(&tset, &y).map_err(|e| e.to_string())?.len();
            ensure!(
                formula == counted && matched == counted,
                "T={tset:?} Y={y:?}: formula {formula}, enumeration {counted}, matching {matched}"
            );
            checks += 1;
        }
    }
    ensure!(checks == 56 * 8, "{checks} (T, Y) checks");
    Ok(())
}

fn criterion_8() -> Check {
    let at0 = converse_bound(8, 3, 0.0, DEFAULT_ALPHA_STEP).map_err(|e| e.to_string())?;
    ensure!((at0 - 3.0).abs() <= 1e-3, "bound(8,3,0) = {at0}");
    for (n, kp) in [(8, 3), (12, 3), (12, 5), (20, 15)] {
        let at_n = converse_bound(n, kp, n as f64, DEFAULT_ALPHA_STEP).map_err(|e| e.to_string())?;
        ensure!(at_n == 0.0, "bound({n},{kp},{n}) = {at_n}");
        let mut prev = f64::INFINITY;
        for i in 0..100 {
            let m = n as f64 * i as f64 / 99.0;
            let r = converse_bound(n, kp, m, DEFAULT_ALPHA_STEP).map_err(|e| e.to_string())?;
            ensure!(r <= prev, "({n},{kp}) increases at M={m}: {prev} -> {r}");
            prev = r;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("example 1 reproduction", criterion_1, Duration::from_secs(1)),
        ("example 2 reproduction", criterion_2, Duration::from_secs(1)),
        ("exhaustive decodability", criterion_3, Duration::from_secs(60)),
        ("exact rate-memory points", criterion_4, Duration::MAX),
        ("MAN (20,15,20) sweep", criterion_5, Duration::from_secs(30)),
        ("MDS property suite", criterion_6, Duration::MAX),
        ("design oracle suite", criterion_7, Duration::MAX),
        ("converse bound properties", criterion_8, Duration::MAX),
    ];
    let mut failed = 0;
    for (i, (name, check, limit)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let took = start.elapsed();
        if result.is_ok() && took > limit {
            result = Err(format!("took {took:?}, limit {limit:?}"));
        }
        match result {
            Ok(()) => println!("criterion {}: PASS {name} ({:.2?})", i + 1, took),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
