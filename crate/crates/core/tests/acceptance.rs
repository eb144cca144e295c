//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use ghz_bqt::bqt::{
    check_published_rows, check_worked_factorization, enumerate_branches, enumerate_step3,
    noncooperation_fidelity, published_rule, step4_measure, Drive, EprInput, Step3, Step4,
    Withheld, ALICE_TARGET, BOB_TARGET, RECOVERED_ORDER,
};
use ghz_bqt::ghz::{entanglement_swap, GhzIndex};
use ghz_bqt::parties::{ownership_check, run_session, trial_seed, Cooperation};
use ghz_bqt::qsim::{Basis, Gate1, Label};
use ghz_bqt::{Complex64, Register64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXACT: f64 = 1e-12;
const FLOOR: f64 = 1.0 - 1e-10;
const SEED: u64 = 0xACCE;

type Check = Result<String, String>;
/// Name, runtime budget in seconds, check.
type Criterion = (&'static str, Option<f64>, fn() -> Check);

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn inputs(rng: &mut ChaCha8Rng, n: usize) -> Vec<(EprInput<f64>, EprInput<f64>)> {
    (0..n)
        .map(|_| (EprInput::random(rng), EprInput::random(rng)))
        .collect()
}

/// `(|lead⟩ ± |complement⟩)/√2` written out by hand.
fn ghz_by_hand(i: usize, labels: [&str; 3]) -> Register64 {
    let leads = ["000", "100", "010", "110"];
    let lead = leads[i / 2];
    let comp: String = lead
        .chars()
        .map(|b| if b == '0' { '1' } else { '0' })
        .collect();
    let sign = if i.is_multiple_of(2) { 1.0 } else { -1.0 };
    Register64::make(&[(lead, c(1.0)), (&comp, c(sign))], labels).unwrap()
}

fn swap_identical() -> Check {
    let out = entanglement_swap::<f64>(GhzIndex::new(0).unwrap(), GhzIndex::new(0).unwrap())
        .map_err(|e| e.to_string())?;
    let want = [(0, 0), (1, 1), (6, 2), (7, 3)];
    let mut ok = out.len() == 4;
    for (o, (outcome, rem)) in out.iter().zip(want) {
        ok &= o.outcome.get() == outcome;
        ok &= (o.probability - 0.25).abs() <= EXACT;
        ok &= o
            .remainder
            .equal_up_to_global_phase(&ghz_by_hand(rem, ["2", "4", "6"]), EXACT)
            .unwrap();
    }
    ensure(ok, "{0->0, 1->1, 6->2, 7->3} at 1/4 each".into())
}

fn swap_all_pairs() -> Check {
    let basis: Vec<Register64> = (0..8).map(|g| ghz_by_hand(g, ["2", "4", "6"])).collect();
    let mut ok = true;
    for i in GhzIndex::all() {
        for j in GhzIndex::all() {
            let out = entanglement_swap::<f64>(i, j).map_err(|e| e.to_string())?;
            ok &= out.len() == 4;
            for o in &out {
                ok &= (o.probability - 0.25).abs() <= EXACT;
                ok &= basis
                    .iter()
                    .any(|g| (g.inner(&o.remainder).unwrap().norm_sqr() - 1.0).abs() <= EXACT);
            }
        }
    }
    ensure(
        ok,
        "64 pairs, 4 outcomes each at 1/4, GHZ remainders".into(),
    )
}

fn step3_uniform() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for (a, b) in inputs(&mut rng, 100) {
        let branches = enumerate_step3(&a, &b).map_err(|e| e.to_string())?;
        if branches.len() != 16 {
            return Err(format!("{} branches", branches.len()));
        }
        for s in branches {
            worst = worst.max((s.probability - 1.0 / 16.0).abs());
        }
    }
    ensure(
        worst <= EXACT,
        format!("100 inputs, max |p-1/16| = {worst:.1e}"),
    )
}

fn published_collapse() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let recovered: Vec<Label> = RECOVERED_ORDER.iter().map(|&l| l.into()).collect();
    let mut worst = 0.0f64;
    let mut ok = true;
    for (a, b) in inputs(&mut rng, 3) {
        let rep = check_published_rows(&a, &b, EXACT).map_err(|e| e.to_string())?;
        ok &= rep.matching_orders.contains(&recovered);
        worst = worst.max(rep.max_error);
        worst = worst.max(check_worked_factorization(&a, &b).map_err(|e| e.to_string())?);
    }
    ensure(
        ok && worst <= EXACT,
        format!(
            "positions ({}), max error {worst:.1e}",
            RECOVERED_ORDER.join(",")
        ),
    )
}

/// `α_{b1b2} ⊗ β_{a2a3}` over (b1,b2,a2,a3).
fn target(a: &EprInput<f64>, b: &EprInput<f64>) -> Register64 {
    Register64::make(
        &[
            ("0000", a.c0 * b.c0),
            ("0011", a.c0 * b.c1),
            ("1100", a.c1 * b.c0),
            ("1111", a.c1 * b.c1),
        ],
        ["b1", "b2", "a2", "a3"],
    )
    .unwrap()
}

fn reconstruction() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let mut worst = 1.0f64;
    let mut mismatched = 0;
    for (a, b) in inputs(&mut rng, 100) {
        let want = target(&a, &b);
        for leaf in enumerate_branches(&a, &b).map_err(|e| e.to_string())? {
            worst = worst.min(leaf.fidelity_to_bob).min(leaf.fidelity_to_alice);
            if !leaf
                .corrected
                .equal_up_to_global_phase(&want, 1e-10)
                .unwrap()
            {
                mismatched += 1;
            }
        }
    }
    ensure(
        worst >= FLOOR && mismatched == 0,
        format!("6400 leaves, min fidelity {worst:.12}, {mismatched} off target"),
    )
}

fn published_rules() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 6);
    let mut worst = 1.0f64;
    for (a, b) in inputs(&mut rng, 10) {
        let worked = enumerate_step3(&a, &b)
            .unwrap()
            .into_iter()
            .find(|s| s.outcomes == Step3::WORKED)
            .unwrap();
        for s4 in Step4::all() {
            let mut p = step4_measure(&worked.remainder, Drive::Force(s4))
                .unwrap()
                .payload;
            published_rule(s4).apply(&mut p).unwrap();
            worst = worst
                .min(p.fidelity_on(&a.register(BOB_TARGET).unwrap()).unwrap())
                .min(p.fidelity_on(&b.register(ALICE_TARGET).unwrap()).unwrap());
        }
    }
    let mut zz = 0.0f64;
    for _ in 0..1000 {
        let e = EprInput::<f64>::random(&mut rng);
        let before = e.register(["x", "y"]).unwrap();
        let after = before
            .clone()
            .gate1("x", Gate1::Z)
            .unwrap()
            .gate1("y", Gate1::Z)
            .unwrap();
        zz = zz.max(distance(&before, &after));
    }
    ensure(
        worst >= FLOOR && zz <= EXACT,
        format!("min fidelity {worst:.12}, Z(x)Z deviation {zz:.1e}"),
    )
}

fn noncooperation() -> Check {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let bal =
        noncooperation_fidelity(&EprInput::<f64>::real(h, h).unwrap(), Withheld::AliceA1).unwrap();
    let skew =
        noncooperation_fidelity(&EprInput::<f64>::real(0.6, 0.8).unwrap(), Withheld::AliceA1)
            .unwrap();
    let mut worst = (bal - 0.5).abs().max((skew - 0.5392).abs());
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 7);
    for _ in 0..10 {
        let e = EprInput::<f64>::random(&mut rng);
        let (p0, p1) = (e.c0.norm_sqr(), e.c1.norm_sqr());
        let f = noncooperation_fidelity(&e, Withheld::AliceA1).unwrap();
        worst = worst.max((f - (p0 * p0 + p1 * p1)).abs());
    }
    ensure(
        worst <= EXACT,
        format!("balanced {bal:.12}, (0.6,0.8) {skew:.12}, max error {worst:.1e}"),
    )
}

fn sampling() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let (a, b) = (EprInput::random(&mut rng), EprInput::random(&mut rng));
    let n = 4096;
    let mut counts = [0usize; 64];
    let mut local = true;
    for i in 0..n {
        let s = run_session(a, b, trial_seed(SEED, i), Cooperation::Full).unwrap();
        counts[s.leaf.index()] += 1;
        local &= ownership_check(&s.transcript);
    }
    let p = 1.0 / 64.0;
    let sigma = (p * (1.0 - p) / n as f64).sqrt();
    let dev = counts
        .iter()
        .map(|&k| (k as f64 / n as f64 - p).abs() / sigma)
        .fold(0.0, f64::max);
    let x = run_session(a, b, 99, Cooperation::Full)
        .unwrap()
        .transcript
        .to_json();
    let y = run_session(a, b, 99, Cooperation::Full)
        .unwrap()
        .transcript
        .to_json();
    ensure(
        dev <= 4.0 && x == y && local,
        format!(
            "4096 sessions, max deviation {dev:.2} sigma, identical transcripts {}",
            x == y
        ),
    )
}

fn distance(a: &Register64, b: &Register64) -> f64 {
    a.amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

fn random_register(rng: &mut ChaCha8Rng, names: &[String]) -> Register64 {
    let amps = (0..1usize << names.len())
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Register64::from_amplitudes(names.iter().map(String::as_str), amps).unwrap()
}

fn engine() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let (mut inv, mut norm, mut born, mut pure) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=6);
        let names: Vec<String> = (0..n).map(|i| format!("q{i}")).collect();
        let r = random_register(&mut rng, &names);
        let q = names[rng.gen_range(0..n)].as_str();
        for g in [Gate1::X, Gate1::Z, Gate1::H] {
            let once = r.clone().gate1(q, g).unwrap();
            norm = norm.max((once.norm_sqr() - 1.0).abs());
            inv = inv.max(distance(&once.gate1(q, g).unwrap(), &r));
        }
        let t = names.iter().find(|x| x.as_str() != q).unwrap().as_str();
        let once = r.clone().cnot(q, t).unwrap();
        norm = norm.max((once.norm_sqr() - 1.0).abs());
        inv = inv.max(distance(&once.cnot(q, t).unwrap(), &r));
        for basis in [Basis::Z, Basis::X] {
            let p = r.outcome_probabilities(&q.into(), basis).unwrap();
            born = born.max((p[0] + p[1] - 1.0).abs());
        }
        let other = random_register(&mut rng, &["extra".to_owned()]);
        let rho = r
            .tensor(&other)
            .unwrap()
            .reduced_density(names.iter().map(String::as_str))
            .unwrap();
        pure = pure.max((rho.purity() - 1.0).abs());
    }
    ensure(
        inv.max(norm).max(born).max(pure) <= EXACT,
        format!(
            "1000 cases: involution {inv:.1e}, norm {norm:.1e}, Born {born:.1e}, purity {pure:.1e}"
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "swap of two identical GHZ states",
            Some(1.0),
            swap_identical,
        ),
        (
            "swap property for all channel pairs",
            Some(5.0),
            swap_all_pairs,
        ),
        ("first-round branch uniformity", Some(10.0), step3_uniform),
        (
            "collapsed states vs published table",
            None,
            published_collapse,
        ),
        (
            "perfect bidirectional reconstruction",
            Some(60.0),
            reconstruction,
        ),
        ("published correction rules", None, published_rules),
        ("non-cooperation fidelity", None, noncooperation),
        ("sampling consistency and determinism", None, sampling),
        ("engine properties", Some(30.0), engine),
    ];
    let mut all = true;
    for (i, (name, budget, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let secs = start.elapsed().as_secs_f64();
        let in_time = budget.is_none_or(|b| secs < b);
        let (ok, detail) = match res {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        all &= ok;
        println!(
            "criterion {}: {} {name} ({secs:.2}s): {detail}",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
