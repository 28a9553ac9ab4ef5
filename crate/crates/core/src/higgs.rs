//! Nilpotent Higgs bundles in Čech form: per-patch field matrices and
//! pair-indexed transition matrices, with validation of integrability,
//! the nilpotency exponent, the transition cocycle and overlap
//! compatibility, plus a seeded generator for test corpora.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::Fq;
use crate::cover::{random_poly, PatchLift};
use crate::forms::Mat;
use crate::laurent::{Laurent, RingTag};
use crate::report::{CheckKind, CheckRecord};
use crate::Error;

/// A rank-`r` Higgs bundle of declared exponent `n`, presented on a patch
/// list: `theta[patch][l]` is the matrix paired against `dt_{l+1}` over the
/// patch ring, `transitions[(a, b)]` the change of basis `e_a = M_ab e_b`
/// over the pair overlap. Every ordered pair of distinct patches must have
/// a transition entry.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HiggsData {
    pub rank: usize,
    pub exponent: usize,
    pub patches: Vec<String>,
    pub theta: BTreeMap<String, Vec<Mat<Fq>>>,
    pub transitions: BTreeMap<(String, String), Mat<Fq>>,
}

impl HiggsData {
    /// Trivial-bundle constructor: identity transitions on all pairs.
    pub fn with_trivial_transitions(
        rank: usize,
        exponent: usize,
        theta: BTreeMap<String, Vec<Mat<Fq>>>,
        pair_tags: &BTreeMap<(String, String), RingTag<Fq>>,
    ) -> HiggsData {
        let patches: Vec<String> = theta.keys().cloned().collect();
        let transitions = pair_tags
            .iter()
            .map(|(pair, tag)| (pair.clone(), Mat::identity(tag, rank)))
            .collect();
        HiggsData {
            rank,
            exponent,
            patches,
            theta,
            transitions,
        }
    }

    pub fn dim(&self) -> usize {
        self.theta.values().next().map(|v| v.len()).unwrap_or(0)
    }

    pub fn theta_of(&self, patch: &str) -> &[Mat<Fq>] {
        &self.theta[patch]
    }

    /// Transition matrix extended into `target`; the identity on the
    /// diagonal pairs.
    pub fn transition(&self, a: &str, b: &str, target: &RingTag<Fq>) -> Mat<Fq> {
        if a == b {
            return Mat::identity(target, self.rank);
        }
        self.transitions[&(a.to_string(), b.to_string())].extend_tag(target)
    }
}

/// Entrywise Frobenius pullback of a matrix of functions; the result has
/// vanishing entrywise differential.
pub fn frobenius_pullback_mat(m: &Mat<Fq>) -> Mat<Fq> {
    m.map(|e| e.frobenius_pullback())
}

/// Multi-indices `(j_1..j_d)` with total weight exactly `total`.
pub fn compositions(d: usize, total: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; d];
    fn rec(current: &mut Vec<usize>, pos: usize, left: usize, out: &mut Vec<Vec<usize>>) {
        if pos + 1 == current.len() {
            current[pos] = left;
            out.push(current.clone());
            return;
        }
        for take in 0..=left {
            current[pos] = take;
            rec(current, pos + 1, left - take, out);
        }
    }
    rec(&mut current, 0, total, &mut out);
    out
}

/// Checks the five bundle invariants and the structural consistency of the
/// Čech presentation; returns one record per check, failures localized.
pub fn validate_higgs(h: &HiggsData) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let kind = CheckKind::InputValidation;

    // shape consistency first; later checks assume it
    let mut shape_issues = Vec::new();
    let names: BTreeSet<&String> = h.patches.iter().collect();
    if names.len() != h.patches.len() {
        shape_issues.push("duplicate patch names".to_string());
    }
    if h.patches.is_empty() {
        shape_issues.push("no patches".to_string());
    }
    let theta_names: BTreeSet<&String> = h.theta.keys().collect();
    if theta_names != names {
        shape_issues.push("theta entries do not match the patch list".to_string());
    }
    let d = h.dim();
    for (name, mats) in &h.theta {
        if mats.len() != d {
            shape_issues.push(format!("patch {name}: expected {d} field matrices"));
        }
        for m in mats {
            if m.rows() != h.rank || m.cols() != h.rank {
                shape_issues.push(format!("patch {name}: field matrix is not {0}x{0}", h.rank));
            }
        }
    }
    for a in &h.patches {
        for b in &h.patches {
            if a != b && !h.transitions.contains_key(&(a.clone(), b.clone())) {
                shape_issues.push(format!("missing transition {a}|{b}"));
            }
        }
    }
    for ((a, b), m) in &h.transitions {
        if !names.contains(a) || !names.contains(b) || a == b {
            shape_issues.push(format!("transition {a}|{b} does not name a patch pair"));
        } else if m.rows() != h.rank || m.cols() != h.rank {
            shape_issues.push(format!("transition {a}|{b} is not {0}x{0}", h.rank));
        }
    }
    if let Some(first) = shape_issues.first() {
        records.push(CheckRecord::fail(kind, "bundle/shape", first.clone()));
        return records;
    }
    records.push(CheckRecord::pass(kind, "bundle/shape"));

    // exponent bound n <= p - 1
    let p = h
        .theta
        .values()
        .next()
        .and_then(|m| m.first())
        .map(|m| m.tag().ring().p())
        .unwrap_or(3);
    if (h.exponent as u64) > p - 1 {
        records.push(CheckRecord::fail(
            kind,
            "bundle/exponent-bound",
            format!("exponent {} exceeds p-1 = {}", h.exponent, p - 1),
        ));
        return records;
    }
    records.push(CheckRecord::pass(kind, "bundle/exponent-bound"));

    // per-patch integrability and nilpotency
    for name in &h.patches {
        let mats = h.theta_of(name);
        let mut commuting = true;
        let subject = format!("patch:{name}/integrability");
        let mut integ = CheckRecord::pass(kind, &subject);
        'outer: for i in 0..d {
            for j in (i + 1)..d {
                let comm = mats[i].mul(&mats[j]).sub(&mats[j].mul(&mats[i]));
                if !comm.is_zero() {
                    commuting = false;
                    integ = CheckRecord::fail(
                        kind,
                        &subject,
                        format!("[theta_{}, theta_{}] = {}", i + 1, j + 1, comm),
                    );
                    break 'outer;
                }
            }
        }
        records.push(integ);

        let subject = format!("patch:{name}/nilpotency");
        if !commuting {
            records.push(CheckRecord::fail(
                kind,
                &subject,
                "not checked: integrability failed".to_string(),
            ));
            continue;
        }
        // commutativity makes sorted monomials exhaustive for words
        let mut nil = CheckRecord::pass(kind, &subject);
        for combo in compositions(d, h.exponent + 1) {
            let tag = mats[0].tag().clone();
            let mut prod = Mat::identity(&tag, h.rank);
            for (l, &e) in combo.iter().enumerate() {
                for _ in 0..e {
                    prod = prod.mul(&mats[l]);
                }
            }
            if !prod.is_zero() {
                let combo_text: Vec<String> = combo.iter().map(usize::to_string).collect();
                nil = CheckRecord::fail(
                    kind,
                    &subject,
                    format!(
                        "monomial ({}) of weight {} is {}",
                        combo_text.join(","),
                        h.exponent + 1,
                        prod
                    ),
                );
                break;
            }
        }
        records.push(nil);
    }

    // transition cocycle on ordered triples (not all equal)
    for a in &h.patches {
        for b in &h.patches {
            for c in &h.patches {
                if a == b && b == c {
                    continue;
                }
                let tag = h
                    .transition_tag(a, b)
                    .union(&h.transition_tag(b, c))
                    .union(&h.transition_tag(a, c));
                let lhs = h.transition(a, b, &tag).mul(&h.transition(b, c, &tag));
                let rhs = h.transition(a, c, &tag);
                let subject = format!("triple:{a}|{b}|{c}/transition-cocycle");
                if lhs == rhs {
                    records.push(CheckRecord::pass(kind, subject));
                } else {
                    records.push(CheckRecord::fail(kind, subject, format!("{lhs} != {rhs}")));
                }
            }
        }
    }

    // field compatibility on ordered pairs
    for a in &h.patches {
        for b in &h.patches {
            if a == b {
                continue;
            }
            let tag = h.transition_tag(a, b);
            let m = h.transition(a, b, &tag);
            let subject = format!("pair:{a}|{b}/compatibility");
            let m_inv = match m.inverse() {
                Ok(inv) => inv,
                Err(e) => {
                    records.push(CheckRecord::fail(
                        kind,
                        subject,
                        format!("transition not invertible: {e}"),
                    ));
                    continue;
                }
            };
            let mut rec = CheckRecord::pass(kind, &subject);
            for l in 0..d {
                let lhs = h.theta_of(a)[l].extend_tag(&tag);
                let rhs = m.mul(&h.theta_of(b)[l].extend_tag(&tag)).mul(&m_inv);
                if lhs != rhs {
                    rec = CheckRecord::fail(
                        kind,
                        &subject,
                        format!("coordinate t{}: {} != {}", l + 1, lhs, rhs),
                    );
                    break;
                }
            }
            records.push(rec);
        }
    }

    records
}

impl HiggsData {
    /// The smallest localization containing both patches' field matrices
    /// and the stored transition for the pair.
    fn transition_tag(&self, a: &str, b: &str) -> RingTag<Fq> {
        let ta = self.theta_of(a)[0].tag();
        let tb = self.theta_of(b)[0].tag();
        let mut tag = ta.union(tb);
        if a != b {
            if let Some(m) = self.transitions.get(&(a.to_string(), b.to_string())) {
                tag = tag.union(m.tag());
            }
        }
        tag
    }
}

/// Brute-force nilpotency oracle: every word of length `n + 1` in the field
/// matrices vanishes. Exponential in the word length; used by tests to
/// validate the sorted-monomial shortcut at small rank.
pub fn nilpotency_brute_force(mats: &[Mat<Fq>], n: usize) -> bool {
    let d = mats.len();
    let len = n + 1;
    let tag = mats[0].tag().clone();
    let rank = mats[0].rows();
    let mut word = vec![0usize; len];
    loop {
        let mut prod = Mat::identity(&tag, rank);
        for &w in &word {
            prod = prod.mul(&mats[w]);
        }
        if !prod.is_zero() {
            return false;
        }
        // next word in base d
        let mut i = 0;
        loop {
            if i == len {
                return true;
            }
            word[i] += 1;
            if word[i] < d {
                break;
            }
            word[i] = 0;
            i += 1;
        }
    }
}

/// Generation parameters for [`random_higgs`].
#[derive(Clone, Debug)]
pub struct RandomHiggsParams {
    pub rank: usize,
    pub exponent: usize,
    pub max_degree: i32,
}

/// Seeded random Higgs data over the given patches.
///
/// Field matrices are polynomial multiples of powers of one fixed nilpotent
/// (powers of a single matrix always commute, and total weight `n + 1`
/// forces the product to vanish); transitions come from per-patch unipotent
/// matrices `B`, as `M_ab = B_a B_b^-1`, so the cocycle holds by
/// construction, and the other patches' fields are defined by conjugation.
pub fn random_higgs(
    patches: &[PatchLift],
    params: &RandomHiggsParams,
    seed: u64,
) -> Result<HiggsData, Error> {
    let RandomHiggsParams {
        rank,
        exponent,
        max_degree,
    } = *params;
    if patches.is_empty() {
        return Err(Error::BadParams(
            "random bundle needs at least one patch".into(),
        ));
    }
    if rank == 0 || rank > 4 {
        return Err(Error::BadParams(format!("rank {rank} outside 1..=4")));
    }
    let base_fq = patches[0].fq_tag();
    let p = base_fq.ring().p() as usize;
    if exponent + 1 > rank || exponent > p - 1 {
        return Err(Error::BadParams(format!(
            "exponent {exponent} needs exponent+1 <= rank and exponent <= p-1"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = base_fq.nvars();

    // everything is generated over the plain polynomial ring and extended
    // into the patch localizations afterwards
    let global = RingTag::new(base_fq.ring().clone(), d, BTreeSet::new());

    // one nilpotent chain of exponent `exponent`
    let mut n_mat = Mat::zero(&global, rank, rank);
    for i in 0..exponent {
        n_mat.set(i, i + 1, Laurent::one(&global));
    }

    let base_theta: Vec<Mat<Fq>> = (0..d)
        .map(|_| {
            if exponent == 0 {
                return Mat::zero(&global, rank, rank);
            }
            let s = rng.gen_range(1..=exponent);
            let c = random_poly(&global, max_degree, 3, &mut rng);
            n_mat.pow(s).scale(&c)
        })
        .collect();

    let unipotents: BTreeMap<String, Mat<Fq>> = patches
        .iter()
        .map(|patch| {
            let mut b = Mat::identity(&global, rank);
            for i in 0..rank {
                for j in (i + 1)..rank {
                    b.set(i, j, random_poly(&global, max_degree, 2, &mut rng));
                }
            }
            (patch.name().to_string(), b)
        })
        .collect();

    let base_name = patches[0].name().to_string();
    let mut theta = BTreeMap::new();
    let mut transitions = BTreeMap::new();
    for patch in patches {
        // theta_b = M_b,base theta_base M_b,base^-1 with M_b,base = B_b B_base^-1
        let b_mat = &unipotents[patch.name()];
        let m = b_mat.mul(&unipotents[&base_name].inverse().expect("unipotent"));
        let m_inv = m.inverse().expect("unipotent");
        let mats: Vec<Mat<Fq>> = base_theta
            .iter()
            .map(|t| m.mul(t).mul(&m_inv).extend_tag(&patch.fq_tag()))
            .collect();
        theta.insert(patch.name().to_string(), mats);
    }
    for a in patches {
        for b in patches {
            if a.name() == b.name() {
                continue;
            }
            let pair_tag = a.fq_tag().union(&b.fq_tag());
            let m = unipotents[a.name()]
                .mul(&unipotents[b.name()].inverse().expect("unipotent"))
                .extend_tag(&pair_tag);
            transitions.insert((a.name().to_string(), b.name().to_string()), m);
        }
    }

    Ok(HiggsData {
        rank,
        exponent,
        patches: patches.iter().map(|p| p.name().to_string()).collect(),
        theta,
        transitions,
    })
}
