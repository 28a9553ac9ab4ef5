//! Acceptance suite: one test per criterion, each printing a PASS line and
//! enforcing its runtime budget. Everything is exact; no tolerances beyond
//! the wall-clock bounds stated per criterion.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatglue::arith::{CoeffRing, FieldParams, Fq, Witt2Elem, W2};
use flatglue::cover::{
    di_hom, random_patch, random_poly, triple_overlap_tag, verify_di_cocycle, verify_di_derivative,
};
use flatglue::forms::Mat;
use flatglue::higgs::{nilpotency_brute_force, random_higgs, validate_higgs, RandomHiggsParams};
use flatglue::laurent::RingTag;
use flatglue::report::{CheckKind, CheckRecord};
use flatglue::twist::{
    build_atlas, local_connection, truncated_exp, verify_local_flat, AtlasOptions,
};

use flatglue_cli::corpus;
use flatglue_cli::manifest::{Inputs, Manifest};

fn finish(criterion: usize, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its budget: {elapsed:?} > {budget:?}"
    );
    println!("ACCEPTANCE {criterion} {name}: PASS ({elapsed:?})");
}

fn corpus_inputs() -> Vec<Inputs> {
    corpus::EXAMPLES
        .iter()
        .map(|e| Manifest::parse(e.text).unwrap().to_inputs().unwrap())
        .collect()
}

fn fq_tag(p: u64, nvars: usize, inverted: &[usize]) -> RingTag<Fq> {
    RingTag::new(
        Fq::new(FieldParams::prime_field(p).unwrap()),
        nvars,
        inverted.iter().copied().collect::<BTreeSet<_>>(),
    )
}

/// Ghost-coordinate oracle for prime fields, in plain u64 arithmetic:
/// `(a0, a1) -> a0^p + p*a1 mod p^2`.
fn ghost(p: u64, a: &Witt2Elem) -> u64 {
    let p2 = p * p;
    let mut pow = 1u64;
    for _ in 0..p {
        pow = pow * a.a0.coeffs()[0] % p2;
    }
    (pow + p * a.a1.coeffs()[0]) % p2
}

#[test]
fn criterion_1_witt_ring_exactness() {
    let started = Instant::now();

    // W2(F_3) against Z/9, all 81 pairs, with ring axioms on all triples
    let w = W2::new(FieldParams::prime_field(3).unwrap());
    let k = w.field().clone();
    let mut elems = Vec::new();
    for a0 in 0..3 {
        for a1 in 0..3 {
            elems.push(Witt2Elem {
                a0: k.from_u64(a0),
                a1: k.from_u64(a1),
            });
        }
    }
    let mut images: Vec<u64> = elems.iter().map(|a| ghost(3, a)).collect();
    images.sort_unstable();
    assert_eq!(
        images,
        (0..9).collect::<Vec<_>>(),
        "ghost map is a bijection"
    );
    for a in &elems {
        for b in &elems {
            assert_eq!(ghost(3, &w.add(a, b)), (ghost(3, a) + ghost(3, b)) % 9);
            assert_eq!(ghost(3, &w.mul(a, b)), ghost(3, a) * ghost(3, b) % 9);
            assert_eq!(w.add(a, b), w.add(b, a));
            assert_eq!(w.mul(a, b), w.mul(b, a));
            for c in &elems {
                assert_eq!(w.add(&w.add(a, b), c), w.add(a, &w.add(b, c)));
                assert_eq!(w.mul(&w.mul(a, b), c), w.mul(a, &w.mul(b, c)));
                assert_eq!(w.mul(a, &w.add(b, c)), w.add(&w.mul(a, b), &w.mul(a, c)));
            }
        }
        assert_eq!(w.add(a, &w.zero()), *a);
        assert_eq!(w.mul(a, &w.one()), *a);
        assert!(w.is_zero(&w.add(a, &w.neg(a))));
    }

    // random agreement with Z/p^2 for p = 5, 7
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for p in [5u64, 7] {
        let w = W2::new(FieldParams::prime_field(p).unwrap());
        let k = w.field().clone();
        for _ in 0..1000 {
            let a = Witt2Elem {
                a0: k.from_u64(rng.gen_range(0..p)),
                a1: k.from_u64(rng.gen_range(0..p)),
            };
            let b = Witt2Elem {
                a0: k.from_u64(rng.gen_range(0..p)),
                a1: k.from_u64(rng.gen_range(0..p)),
            };
            assert_eq!(
                ghost(p, &w.add(&a, &b)),
                (ghost(p, &a) + ghost(p, &b)) % (p * p)
            );
            assert_eq!(
                ghost(p, &w.mul(&a, &b)),
                ghost(p, &a) * ghost(p, &b) % (p * p)
            );
        }
    }

    finish(1, "witt-ring-exactness", started, Duration::from_secs(1));
}

#[test]
fn criterion_2_local_flatness_replay() {
    let started = Instant::now();

    // every corpus example
    for inputs in corpus_inputs() {
        for patch in &inputs.patches {
            let local = local_connection(patch, &inputs.higgs).unwrap();
            let records = verify_local_flat(&local);
            assert!(
                records.iter().all(CheckRecord::passed),
                "{}/{}: {records:?}",
                inputs.title,
                patch.name()
            );
        }
    }

    // >= 500 random instances across the parameter grid
    let mut rng = ChaCha8Rng::seed_from_u64(2025);
    let mut count = 0usize;
    for p in [3u64, 5, 7] {
        for d in [1usize, 2] {
            for rank in [2usize, 3, 4] {
                for inverted in [vec![], vec![0usize]] {
                    let tag = fq_tag(p, d, &inverted);
                    for seed in 0..15u64 {
                        let patch = random_patch("r", &tag, 4, &mut rng);
                        let exponent = rng.gen_range(1..=(rank - 1).min(p as usize - 1).min(3));
                        let higgs = random_higgs(
                            std::slice::from_ref(&patch),
                            &RandomHiggsParams {
                                rank,
                                exponent,
                                max_degree: 4,
                            },
                            seed,
                        )
                        .unwrap();
                        let local = local_connection(&patch, &higgs).unwrap();
                        let records = verify_local_flat(&local);
                        // curvature, wedge-square and d-closed each hold
                        assert_eq!(records.len(), 3);
                        assert!(
                            records.iter().all(CheckRecord::passed),
                            "p={p} d={d} rank={rank} seed={seed}: {records:?}"
                        );
                        count += 1;
                    }
                }
            }
        }
    }
    assert!(count >= 500, "only {count} random instances");

    finish(2, "local-flatness-replay", started, Duration::from_secs(10));
}

#[test]
fn criterion_3_difference_of_lifts_replay() {
    let started = Instant::now();

    // all corpus pairs and triples
    for inputs in corpus_inputs() {
        let patches = &inputs.patches;
        for a in patches {
            for b in patches {
                if a.name() == b.name() {
                    continue;
                }
                let h = di_hom(a, b).unwrap();
                assert!(verify_di_derivative(a, b, &h).passed(), "{}", inputs.title);
            }
        }
        for a in patches {
            for b in patches {
                for c in patches {
                    if a.name() == b.name() || b.name() == c.name() || a.name() == c.name() {
                        continue;
                    }
                    let h_ab = di_hom(a, b).unwrap();
                    let h_bc = di_hom(b, c).unwrap();
                    let h_ac = di_hom(a, c).unwrap();
                    let tag = triple_overlap_tag(a, b, c);
                    assert!(verify_di_cocycle(&h_ab, &h_bc, &h_ac, &tag).passed());
                }
            }
        }
    }

    // 200 random three-lift families per prime
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for p in [3u64, 5, 7] {
        let tag = fq_tag(p, 2, &[0]);
        for _ in 0..200 {
            let a = random_patch("a", &tag, 3, &mut rng);
            let b = random_patch("b", &tag, 3, &mut rng);
            let c = random_patch("c", &tag, 3, &mut rng);
            let h_ab = di_hom(&a, &b).unwrap();
            let h_bc = di_hom(&b, &c).unwrap();
            let h_ac = di_hom(&a, &c).unwrap();
            assert!(verify_di_derivative(&a, &b, &h_ab).passed());
            let triple = triple_overlap_tag(&a, &b, &c);
            assert!(verify_di_cocycle(&h_ab, &h_bc, &h_ac, &triple).passed());
        }
    }

    finish(
        3,
        "difference-of-lifts-replay",
        started,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_4_gluing_replay() {
    let started = Instant::now();

    let mut seen = BTreeSet::new();
    for inputs in corpus_inputs() {
        seen.insert(inputs.title.clone());
        let atlas = build_atlas(&inputs.patches, &inputs.higgs, &AtlasOptions::default());
        assert!(
            atlas.verified(),
            "{}:\n{}",
            inputs.title,
            atlas.report.render_text()
        );
        let step1: Vec<&CheckRecord> = atlas
            .report
            .records
            .iter()
            .filter(|r| r.kind == CheckKind::GluingCocycle)
            .collect();
        let step2: Vec<&CheckRecord> = atlas
            .report
            .records
            .iter()
            .filter(|r| r.kind == CheckKind::ConnectionGluing)
            .collect();
        if inputs.patches.len() > 1 {
            assert!(!step1.is_empty() && !step2.is_empty());
        }
        assert!(step1.iter().all(|r| r.passed()));
        assert!(step2.iter().all(|r| r.passed()));
        // inverse identity comes from the (a, b, a) triples
        if inputs.patches.len() > 1 {
            assert!(atlas
                .report
                .records
                .iter()
                .any(|r| r.kind == CheckKind::GluingCocycle
                    && r.subject.split('|').count() == 3
                    && r.passed()));
        }
    }
    assert!(seen.contains("nontrivial-transitions"));
    assert!(seen.contains("fq-base"));

    finish(4, "gluing-replay", started, Duration::from_secs(10));
}

#[test]
fn criterion_5_exp_equals_multinomial() {
    let started = Instant::now();

    let mut multi_index_case = false;
    for inputs in corpus_inputs() {
        let atlas = build_atlas(&inputs.patches, &inputs.higgs, &AtlasOptions::default());
        let records: Vec<&CheckRecord> = atlas
            .report
            .records
            .iter()
            .filter(|r| r.kind == CheckKind::ExpTaylor)
            .collect();
        assert!(records.iter().all(|r| r.passed()), "{}", inputs.title);
        if inputs.higgs.dim() == 2 && inputs.higgs.exponent == 2 && inputs.higgs.rank == 3 {
            assert!(!records.is_empty());
            multi_index_case = true;
        }
    }
    assert!(multi_index_case, "corpus covers the d=2, n=2, rank-3 case");

    finish(5, "exp-equals-multinomial", started, Duration::from_secs(5));
}

#[test]
fn criterion_6_mutation_sensitivity() {
    let started = Instant::now();

    // per check kind: an example and a hook that flips exactly that kind
    let cases = [
        ("a2-rank2", "Prop1:0", "Prop1"),
        ("a1-two-lifts", "Lemma2i:0", "Lemma2i"),
        ("a1-three-lifts", "Lemma2ii:0", "Lemma2ii"),
        ("a1-two-lifts", "G:0", "ThmStep1"),
        ("a1-two-lifts", "ThmStep2:0", "ThmStep2"),
        ("a2-rank3-taylor", "Prop4:0", "Prop4"),
    ];
    for (example, hook, label) in cases {
        let out = Command::new(env!("CARGO_BIN_EXE_flatglue"))
            .args(["verify", "--example", example, "--corrupt", hook])
            .output()
            .expect("binary runs");
        assert_eq!(out.status.code(), Some(1), "{example} {hook}");
        let text = String::from_utf8_lossy(&out.stdout);
        let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("[FAIL]")).collect();
        assert!(!failing.is_empty(), "{example} {hook} produced no failure");
        for line in failing {
            assert!(
                line.starts_with(&format!("[FAIL] {label} ")),
                "{example} {hook}: unexpected collateral failure {line}"
            );
        }
    }

    finish(6, "mutation-sensitivity", started, Duration::from_secs(5));
}

#[test]
fn criterion_7_oracle_cross_checks() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2027);

    // Frobenius pullback equals p-fold self-multiplication
    for p in [3u64, 5] {
        let tag = fq_tag(p, 2, &[0]);
        for _ in 0..50 {
            let f = random_poly(&tag, 3, 4, &mut rng);
            assert_eq!(f.frobenius_pullback(), f.pow(p as u32));
        }
    }

    // nilpotency shortcut equals the all-words brute force at rank <= 3
    let tag = fq_tag(5, 2, &[]);
    for seed in 0..30u64 {
        let patch = random_patch("a", &tag, 3, &mut rng);
        let h = random_higgs(
            std::slice::from_ref(&patch),
            &RandomHiggsParams {
                rank: 3,
                exponent: (seed % 2 + 1) as usize,
                max_degree: 3,
            },
            seed,
        )
        .unwrap();
        let shortcut = validate_higgs(&h)
            .iter()
            .filter(|r| r.subject.ends_with("nilpotency"))
            .all(CheckRecord::passed);
        assert_eq!(
            shortcut,
            nilpotency_brute_force(h.theta_of("a"), h.exponent)
        );
        assert!(shortcut);
    }
    // negative control: a 3-chain is not nilpotent of order 2, both routes agree
    {
        use flatglue::laurent::Laurent;
        let mut j = Mat::zero(&tag, 3, 3);
        j.set(0, 1, Laurent::one(&tag));
        j.set(1, 2, Laurent::one(&tag));
        assert!(!nilpotency_brute_force(&[j.clone()], 1));
        assert!(nilpotency_brute_force(&[j], 2));
    }

    // truncated_exp(X) * truncated_exp(-X) = identity
    for _ in 0..30 {
        let mut x = Mat::zero(&tag, 4, 4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                x.set(i, j, random_poly(&tag, 2, 2, &mut rng));
            }
        }
        let e = truncated_exp(&x, 3).unwrap();
        let e_inv = truncated_exp(&x.neg(), 3).unwrap();
        assert!(e.mul(&e_inv).is_identity());
    }

    finish(7, "oracle-cross-checks", started, Duration::from_secs(5));
}

#[test]
fn criterion_8_end_to_end_determinism() {
    let started = Instant::now();

    for example in &corpus::EXAMPLES {
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_flatglue"))
                .args(["verify", "--example", example.name])
                .output()
                .expect("binary runs")
        };
        let first = run();
        let second = run();
        assert_eq!(first.status.code(), Some(0), "{}", example.name);
        assert_eq!(
            first.stdout, second.stdout,
            "{}: reports differ across runs",
            example.name
        );
    }

    finish(
        8,
        "end-to-end-determinism",
        started,
        Duration::from_secs(30),
    );
}
