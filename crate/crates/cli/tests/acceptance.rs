//! The eight acceptance criteria, each timed against a pinned limit. Runs
//! without the libtest harness so every criterion prints one PASS/FAIL line;
//! the process exits nonzero if any of them fails.

#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use hamel_cli::envelope::{write_json, CertificateFile};
use hamel_core::jprobe::{Check, SampleRange};
use hamel_core::linmap::{kernel_decomposition, range_basis};
use hamel_core::qspace::{bundled::prime_root_space, greedy_extract};
use hamel_core::{BasisList, Enumeration, Evaluator, FormalVector, JOperator, LinearMap, ProbeCertificate, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20240611;

const LIMIT_NORM_BOUND: Duration = Duration::from_secs(5);
const LIMIT_ABS_ABS: Duration = Duration::from_secs(1);
const LIMIT_INNER_ABS: Duration = Duration::from_secs(60);
const LIMIT_ABS_INNER: Duration = Duration::from_secs(1);
const LIMIT_RATIONAL: Duration = Duration::from_secs(1);
const LIMIT_ORACLES: Duration = Duration::from_secs(30);
const LIMIT_LINEARITY: Duration = Duration::from_secs(2);

const NORM_SAMPLES: usize = 1000;
const NORM_SYMBOLS: usize = 16;
const DECAY_TERMS: usize = 32;
const DECAY_BITS: u32 = 256;
const INNER_ABS_BOUNDS: [i64; 4] = [0, 1, 10, 100];
const RATIONAL_SAMPLES: usize = 100;
const ORACLE_INSTANCES: usize = 200;
const LINEARITY_TRIPLES: usize = 1000;
const FLIPS_PER_CERTIFICATE: usize = 6;

type Outcome = Result<String, String>;

fn operator(symbols: usize, chain: usize) -> JOperator {
    let space = prime_root_space(symbols);
    let basis = greedy_extract(&space.units());
    JOperator::build(&Evaluator::new(&space), &basis, 0..chain).expect("operator builds")
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let detail = f()?;
    let elapsed = start.elapsed();
    if elapsed > limit {
        return Err(format!("{detail}; took {elapsed:.2?}, limit {limit:.0?}"));
    }
    Ok(format!("{detail}; {elapsed:.2?} (limit {limit:.0?})"))
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(cert: &ProbeCertificate) -> Result<(), String> {
    ensure(cert.verdict.passed() && cert.all_witnesses_hold(), || {
        format!("{} certificate did not pass", cert.claim)
    })
}

/// Squared range-frame norm of `J(x)`, recomputed from `j_apply`.
fn image_norm_sq(j: &JOperator, x: &FormalVector) -> Rational {
    let r0 = j.range_frame().basis().vectors()[0]
        .coeff(j.space().one())
        .cloned()
        .expect("range frame starts with a multiple of one");
    (&j.j_apply(x).unwrap() / &r0).square()
}

fn norm_bound(certs: &mut Vec<ProbeCertificate>) -> Outcome {
    let j = operator(NORM_SYMBOLS, NORM_SYMBOLS);
    let samples = j.sample_vectors(NORM_SAMPLES, SEED, SampleRange::default());
    let cert = j.probe_inner_inner(&samples, Some(SEED)).map_err(|e| e.to_string())?;
    passed(&cert)?;
    let mut equalities = 0;
    for x in &samples {
        let coords = j.kernel_frame().basis().coordinates(x).map_err(|e| e.to_string())?;
        let norm: Rational = coords.iter().map(Rational::square).sum();
        let image = image_norm_sq(&j, x);
        let kernel_zero = coords[1..].iter().all(Rational::is_zero);
        ensure(image <= norm, || format!("|Jx|^2 = {image} > {norm}"))?;
        ensure((image == norm) == kernel_zero, || format!("equality mismatch at {}", j.space().display(x)))?;
        equalities += usize::from(kernel_zero);
    }
    certs.push(cert);
    Ok(format!("{NORM_SAMPLES} samples on {NORM_SYMBOLS} symbols, {equalities} equality cases"))
}

fn decay_checks(cert: &ProbeCertificate, j: &JOperator) -> Result<(usize, usize), String> {
    let (mut decays, mut values) = (0, 0);
    for w in &cert.witnesses {
        match &w.check {
            Check::AbsLess { precision_bits, .. } => {
                ensure(*precision_bits <= DECAY_BITS, || format!("{}: {precision_bits} bits", w.clause))?;
                decays += 1;
            }
            Check::JValue { value, .. } => {
                ensure(*value == Rational::one(), || format!("{}: J = {value}", w.clause))?;
                values += 1;
            }
            _ => {}
        }
    }
    for z in &j.j_chain()[..DECAY_TERMS] {
        ensure(j.j_apply(z).unwrap() == Rational::one(), || "j_apply(z_n) != 1".into())?;
    }
    ensure(decays == DECAY_TERMS - 1 && values == DECAY_TERMS, || {
        format!("{decays} decay and {values} value witnesses")
    })?;
    Ok((decays, values))
}

fn abs_abs(certs: &mut Vec<ProbeCertificate>) -> Outcome {
    let j = operator(DECAY_TERMS, DECAY_TERMS);
    let cert = j.probe_abs_abs(DECAY_TERMS, DECAY_BITS).map_err(|e| e.to_string())?;
    passed(&cert)?;
    let (decays, values) = decay_checks(&cert, &j)?;
    certs.push(cert);
    Ok(format!("N = {DECAY_TERMS}: {decays} decay enclosures within {DECAY_BITS} bits, {values} x J(z_n) = 1"))
}

fn inner_abs(certs: &mut Vec<ProbeCertificate>) -> Outcome {
    let mut found = Vec::new();
    for a in INNER_ABS_BOUNDS {
        let a = Rational::from(a);
        let n = (a.square().floor() + 1u32).to_string().parse::<usize>().unwrap();
        let j = operator(n.max(2) + 1, n);
        let cert = j.probe_inner_abs(&a).map_err(|e| e.to_string())?;
        passed(&cert)?;
        let recorded = cert.parameters.get("n").cloned().unwrap_or_default();
        ensure(recorded == n.to_string(), || format!("a = {a}: n = {recorded}, expected {n}"))?;
        let nq = Rational::from(n as i64);
        let exact = cert.witnesses.iter().any(|w| match &w.check {
            Check::Exact { lhs, rhs, .. } => *lhs == nq.square() && *rhs == &a.square() * &nq && lhs > rhs,
            _ => false,
        });
        ensure(exact, || format!("a = {a}: missing n^2 > a^2 n"))?;
        found.push(format!("a={a}: n={n}"));
        certs.push(cert);
    }
    Ok(found.join(", "))
}

fn abs_inner(certs: &mut Vec<ProbeCertificate>) -> Outcome {
    let j = operator(DECAY_TERMS, DECAY_TERMS);
    let cert = j.probe_abs_inner(DECAY_TERMS, DECAY_BITS).map_err(|e| e.to_string())?;
    passed(&cert)?;
    decay_checks(&cert, &j)?;
    for w in &cert.witnesses {
        if let Check::JValue { image_norm_sq, .. } = &w.check {
            ensure(image_norm_sq.is_integer() && *image_norm_sq == Rational::one(), || {
                format!("{}: image norm {image_norm_sq}", w.clause)
            })?;
        }
    }
    for z in &j.j_chain()[..DECAY_TERMS] {
        ensure(image_norm_sq(&j, z) == Rational::one(), || "image norm differs from 1".into())?;
    }
    certs.push(cert);
    Ok(format!("{DECAY_TERMS} images of squared norm 1"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.gen_range(-1000i64..=1000), rng.gen_range(1i64..=97)).unwrap()
}

fn rational(certs: &mut Vec<ProbeCertificate>) -> Outcome {
    let space = prime_root_space(4);
    let ev = Evaluator::new(&space);
    let one = space.unit("one").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for j1_value in [Rational::one(), Rational::from(2)] {
        let rest = space.units().items()[1..].to_vec();
        let basis = BasisList::from_independent(std::iter::once(one.scale(&j1_value)).chain(rest)).unwrap();
        let j = JOperator::build(&ev, &basis, 0..basis.len()).map_err(|e| e.to_string())?;
        for i in 0..RATIONAL_SAMPLES {
            let q = random_rational(&mut rng);
            let cert = j.probe_rational_restriction(&q).map_err(|e| e.to_string())?;
            passed(&cert)?;
            let a = &q / &j1_value;
            let b = j1_value.abs();
            let jq = j.j_apply(&one.scale(&q)).unwrap();
            ensure(jq == a, || format!("J({q}) = {jq}, expected {a}"))?;
            ensure(q.abs() == &b * &jq.abs(), || format!("|q| != b |J(q)| for q = {q}"))?;
            for w in &cert.witnesses {
                if let Check::NormBound { norm_sq, image_norm_sq, .. } = &w.check {
                    ensure(*norm_sq == a.square() && *image_norm_sq == a.square(), || {
                        format!("q = {q}: norms {norm_sq}, {image_norm_sq}, a^2 = {}", a.square())
                    })?;
                }
            }
            if i == 0 {
                certs.push(cert);
            }
        }
    }
    Ok(format!("{RATIONAL_SAMPLES} rationals for each of j_1 = one, 2 one"))
}

fn oracles() -> Outcome {
    for (space, items) in support::greedy_instances(SEED, ORACLE_INSTANCES) {
        let basis = greedy_extract(&Enumeration::new(items.clone()));
        let expected: Vec<FormalVector> = support::lex_first_basis(&items).into_iter().map(|i| items[i].clone()).collect();
        ensure(basis.vectors() == &expected[..], || format!("greedy differs on {} symbols", space.len()))?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..ORACLE_INSTANCES {
        let space = support::small_space(7);
        let dim = rng.gen_range(1..=6);
        let domain = BasisList::from_independent(space.units().iter().take(dim).cloned()).unwrap();
        let images: Vec<FormalVector> = (0..dim).map(|_| support::random_vector(&mut rng, &space, 3, 1)).collect();
        let map = LinearMap::new(domain.clone(), images.clone()).unwrap();
        let k = kernel_decomposition(&map, &Enumeration::new(domain.vectors().to_vec())).map_err(|e| e.to_string())?;
        let r = support::rank(&images.iter().collect::<Vec<_>>());
        ensure(k.kernel_basis().len() + k.complement_basis().len() == dim, || "kernel + complement != dim".into())?;
        ensure(k.complement_basis().len() == r && range_basis(&k).vectors.len() == r, || "rank mismatch".into())?;
    }
    Ok(format!("{ORACLE_INSTANCES} greedy instances, {ORACLE_INSTANCES} random maps"))
}

fn linearity() -> Outcome {
    let j = operator(NORM_SYMBOLS, NORM_SYMBOLS);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..LINEARITY_TRIPLES {
        let x = support::random_vector(&mut rng, j.space(), NORM_SYMBOLS, 50);
        let y = support::random_vector(&mut rng, j.space(), NORM_SYMBOLS, 50);
        let alpha = random_rational(&mut rng);
        let lhs = j.j_apply(&(&x + &y.scale(&alpha))).unwrap();
        let rhs = &j.j_apply(&x).unwrap() + &(&alpha * &j.j_apply(&y).unwrap());
        ensure(lhs == rhs, || format!("{lhs} != {rhs}"))?;
    }
    Ok(format!("{LINEARITY_TRIPLES} triples"))
}

fn hamel(args: &[&std::ffi::OsStr]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hamel"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .unwrap_or(-1)
}

/// Byte offsets of field content inside the witnesses array.
fn witness_positions(text: &[u8]) -> Vec<usize> {
    let find = |needle: &str, from: usize| {
        text[from..].windows(needle.len()).position(|w| w == needle.as_bytes()).map(|p| p + from)
    };
    let start = find("\"witnesses\": [", 0).expect("witnesses present");
    let end = find("\"conclusion\"", start).expect("conclusion present");
    (start + 14..end)
        .filter(|&i| text[i].is_ascii_alphanumeric() || text[i] == b'/' || text[i] == b'-')
        .collect()
}

fn round_trip(certs: Vec<ProbeCertificate>) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut paths: Vec<PathBuf> = Vec::new();
    for (i, cert) in certs.into_iter().enumerate() {
        let path = dir.path().join(format!("{i:02}-{}.json", cert.claim));
        write_json(&path, &CertificateFile::new(cert, "acceptance")).map_err(|e| e.to_string())?;
        paths.push(path);
    }
    let mut flips = 0;
    for path in &paths {
        let code = hamel(&["verify".as_ref(), path.as_os_str()]);
        ensure(code == 0, || format!("{} verifies with exit {code}", path.display()))?;
        let original = std::fs::read(path).unwrap();
        let positions = witness_positions(&original);
        for _ in 0..FLIPS_PER_CERTIFICATE {
            let pos = positions[rng.gen_range(0..positions.len())];
            let bit = rng.gen_range(0..8);
            let mut corrupted = original.clone();
            corrupted[pos] ^= 1 << bit;
            let bad: &Path = &dir.path().join("corrupted.json");
            std::fs::write(bad, &corrupted).unwrap();
            let code = hamel(&["verify".as_ref(), bad.as_os_str()]);
            ensure(code == 4, || {
                format!("flip of bit {bit} at byte {pos} of {} gave exit {code}", path.display())
            })?;
            flips += 1;
        }
    }
    Ok(format!("{} certificates verify; {flips} single-bit corruptions rejected", paths.len()))
}

fn main() {
    let mut certs = Vec::new();
    let results: Vec<(&str, Outcome)> = vec![
        ("1 norm-1 bound", timed(LIMIT_NORM_BOUND, || norm_bound(&mut certs))),
        ("2 abs-abs discontinuity", timed(LIMIT_ABS_ABS, || abs_abs(&mut certs))),
        ("3 inner-abs unboundedness", timed(LIMIT_INNER_ABS, || inner_abs(&mut certs))),
        ("4 abs-inner discontinuity", timed(LIMIT_ABS_INNER, || abs_inner(&mut certs))),
        ("5 rational restriction", timed(LIMIT_RATIONAL, || rational(&mut certs))),
        ("6 construction oracles", timed(LIMIT_ORACLES, oracles)),
        ("7 Q-linearity", timed(LIMIT_LINEARITY, linearity)),
        ("8 certificate round trip", round_trip(certs)),
    ];
    let mut failed = Vec::new();
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(reason) => {
                println!("FAIL criterion {name}: {reason}");
                failed.push(*name);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
