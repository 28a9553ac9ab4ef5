//! The exponential gluing construction and its executable verification:
//! local flat connections from the descended operator, truncated
//! exponentials of the difference-of-lifts matrices, gluing matrices, and
//! the full replay of the flatness, cocycle, connection-gluing and
//! exponential-vs-multinomial identities.
//!
//! [`build_atlas`] drives everything: it validates the inputs, constructs
//! all local connections and gluing matrices, runs every check on every
//! patch, ordered pair and ordered triple (in sorted order, so reports are
//! byte-stable) and aggregates the outcomes instead of stopping at the
//! first failure. Corruption hooks perturb a private copy of one check's
//! input to prove each verifier can fail.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use crate::arith::{CoeffRing, Fq};
use crate::cover::{df_over_p, di_hom, validate_patch, DIHom, Overlap, PatchLift};
use crate::forms::{curvature, mat_d, mat_d1, wedge11, Form1, Mat, MatForm1};
use crate::higgs::{compositions, frobenius_pullback_mat, validate_higgs, HiggsData};
use crate::laurent::Laurent;
use crate::report::{CheckKind, CheckRecord, Report};
use crate::Error;

/// A local flat bundle: the connection form of `d + A` on a patch.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LocalFlat {
    pub patch: String,
    pub conn: MatForm1<Fq>,
}

/// The assembled global object: local connections, difference-of-lifts
/// data, exponential factors and gluing matrices per ordered pair, plus the
/// verification report.
#[derive(Clone, Debug)]
pub struct FlatBundleAtlas {
    pub locals: BTreeMap<String, LocalFlat>,
    pub hom: BTreeMap<(String, String), DIHom>,
    /// The exponential factor of each gluing matrix.
    pub exp_part: BTreeMap<(String, String), Mat<Fq>>,
    /// Full gluing matrices (exponential factor times pulled-back
    /// transition).
    pub gluing: BTreeMap<(String, String), Mat<Fq>>,
    pub report: Report,
}

impl FlatBundleAtlas {
    pub fn verified(&self) -> bool {
        self.report.is_verified()
    }

    fn empty(report: Report) -> FlatBundleAtlas {
        FlatBundleAtlas {
            locals: BTreeMap::new(),
            hom: BTreeMap::new(),
            exp_part: BTreeMap::new(),
            gluing: BTreeMap::new(),
            report,
        }
    }
}

/// Truncated exponential `sum_{i=0}^n X^i / i!` of a matrix that is
/// nilpotent of order `n + 1`; requires `n <= p - 1` so the factorials are
/// invertible. The inverse is the truncated exponential of `-X`.
pub fn truncated_exp(x: &Mat<Fq>, n: usize) -> Result<Mat<Fq>, Error> {
    assert_eq!(x.rows(), x.cols(), "exponential of a non-square matrix");
    let ring = x.tag().ring().clone();
    let p = ring.p() as usize;
    if n >= p {
        return Err(Error::ExponentTooLarge { n, max: p - 1 });
    }
    if !x.pow(n + 1).is_zero() {
        return Err(Error::NotNilpotentToOrder { order: n + 1 });
    }
    let tag = x.tag().clone();
    let mut acc = Mat::identity(&tag, x.rows());
    let mut term = Mat::identity(&tag, x.rows());
    for i in 1..=n {
        let inv_i = ring.inv(&ring.from_u64(i as u64)).expect("i < p");
        term = term.mul(x).scale(&Laurent::constant(&tag, inv_i));
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `sum_l theta_pb[l] * z[l]`: a pulled-back field matrix paired against
/// function values, the matrix the exponential factor is built from.
pub fn hom_applied(theta_pb: &[Mat<Fq>], z: &[Laurent<Fq>]) -> Mat<Fq> {
    let mut acc = Mat::zero(theta_pb[0].tag(), theta_pb[0].rows(), theta_pb[0].cols());
    for (tp, zl) in theta_pb.iter().zip(z) {
        acc = acc.add(&tp.scale(zl));
    }
    acc
}

/// The local connection form `A = sum_l F0*(theta_l) xi[l]` of a patch.
pub fn local_connection(patch: &PatchLift, higgs: &HiggsData) -> Result<LocalFlat, Error> {
    let fq_tag = patch.fq_tag();
    let xi = df_over_p(patch)?;
    let theta = higgs.theta_of(patch.name());
    let d = fq_tag.nvars();
    let r = higgs.rank;
    let mut comps = vec![Mat::zero(&fq_tag, r, r); d];
    for l in 0..d {
        let tp = frobenius_pullback_mat(&theta[l]);
        for (i, comp) in comps.iter_mut().enumerate() {
            *comp = comp.add(&tp.scale(xi[l].component(i)));
        }
    }
    Ok(LocalFlat {
        patch: patch.name().to_string(),
        conn: MatForm1::new(comps),
    })
}

/// Flatness of a local connection, with the two mechanisms asserted
/// separately: the wedge square vanishes and the form is closed.
pub fn verify_local_flat(local: &LocalFlat) -> Vec<CheckRecord> {
    let kind = CheckKind::LocalFlatness;
    let name = &local.patch;
    let mut records = Vec::new();

    let k = curvature(&local.conn);
    records.push(if k.is_zero() {
        CheckRecord::pass(kind, format!("patch:{name}/curvature"))
    } else {
        CheckRecord::fail(kind, format!("patch:{name}/curvature"), k.render())
    });

    let w = wedge11(&local.conn, &local.conn);
    records.push(if w.is_zero() {
        CheckRecord::pass(kind, format!("patch:{name}/wedge-square"))
    } else {
        CheckRecord::fail(kind, format!("patch:{name}/wedge-square"), w.render())
    });

    let da = mat_d1(&local.conn);
    records.push(if da.is_zero() {
        CheckRecord::pass(kind, format!("patch:{name}/d-closed"))
    } else {
        CheckRecord::fail(kind, format!("patch:{name}/d-closed"), da.render())
    });

    records
}

/// The gluing matrix of an ordered pair: the truncated exponential of the
/// applied difference-of-lifts matrix times the pulled-back transition.
/// Returns `(exponential factor, full gluing matrix)`.
pub fn gluing_matrix(
    a: &PatchLift,
    b: &PatchLift,
    higgs: &HiggsData,
) -> Result<(Mat<Fq>, Mat<Fq>), Error> {
    let overlap_fq = Overlap::of(a, b).fq_tag();
    let h = di_hom(a, b)?;
    let theta_pb: Vec<Mat<Fq>> = higgs
        .theta_of(a.name())
        .iter()
        .map(|t| frobenius_pullback_mat(t).extend_tag(&overlap_fq))
        .collect();
    let applied = hom_applied(&theta_pb, &h.extend_z(&overlap_fq));
    let g = truncated_exp(&applied, higgs.exponent)?;
    let m_pb = frobenius_pullback_mat(&higgs.transition(a.name(), b.name(), &overlap_fq));
    Ok((g.clone(), g.mul(&m_pb)))
}

/// The multinomial form of the exponential factor:
/// `1 + sum_{1 <= |j| <= n} F0*(theta^j) z^j / j!` over multi-indices `j`.
pub fn taylor_gluing(a: &PatchLift, b: &PatchLift, higgs: &HiggsData) -> Result<Mat<Fq>, Error> {
    let overlap_fq = Overlap::of(a, b).fq_tag();
    let ring = overlap_fq.ring().clone();
    let p = ring.p() as usize;
    let n = higgs.exponent;
    if n >= p {
        return Err(Error::ExponentTooLarge { n, max: p - 1 });
    }
    let h = di_hom(a, b)?;
    let z = h.extend_z(&overlap_fq);
    let theta_pb: Vec<Mat<Fq>> = higgs
        .theta_of(a.name())
        .iter()
        .map(|t| frobenius_pullback_mat(t).extend_tag(&overlap_fq))
        .collect();
    let d = overlap_fq.nvars();
    let r = higgs.rank;
    let mut acc = Mat::identity(&overlap_fq, r);
    for weight in 1..=n {
        for j in compositions(d, weight) {
            let mut mat_part = Mat::identity(&overlap_fq, r);
            let mut z_part = Laurent::one(&overlap_fq);
            let mut factorial = 1u64;
            for (l, &jl) in j.iter().enumerate() {
                mat_part = mat_part.mul(&theta_pb[l].pow(jl));
                z_part = z_part.mul(&z[l].pow(jl as u32));
                for i in 1..=jl as u64 {
                    factorial *= i;
                }
            }
            let inv_fact = ring.inv(&ring.from_u64(factorial)).expect("j! < p factors");
            let coeff = Laurent::constant(&overlap_fq, inv_fact).mul(&z_part);
            acc = acc.add(&mat_part.scale(&coeff));
        }
    }
    Ok(acc)
}

/// `G_ab G_bc = G_ac` over the triple overlap; inputs already extended.
pub fn verify_g_cocycle(
    subject: &str,
    g_ab: &Mat<Fq>,
    g_bc: &Mat<Fq>,
    g_ac: &Mat<Fq>,
) -> CheckRecord {
    let lhs = g_ab.mul(g_bc);
    if &lhs == g_ac {
        CheckRecord::pass(CheckKind::GluingCocycle, subject)
    } else {
        CheckRecord::fail(
            CheckKind::GluingCocycle,
            subject,
            format!("{lhs} != {g_ac}"),
        )
    }
}

/// `exp(x) exp(y) = exp(x + y)` for the commuting applied matrices; the
/// mechanism behind the gluing cocycle.
pub fn verify_exp_additivity(subject: &str, x: &Mat<Fq>, y: &Mat<Fq>, n: usize) -> CheckRecord {
    let kind = CheckKind::GluingCocycle;
    let run = || -> Result<(Mat<Fq>, Mat<Fq>), Error> {
        let lhs = truncated_exp(x, n)?.mul(&truncated_exp(y, n)?);
        let rhs = truncated_exp(&x.add(y), n)?;
        Ok((lhs, rhs))
    };
    match run() {
        Ok((lhs, rhs)) if lhs == rhs => CheckRecord::pass(kind, subject),
        Ok((lhs, rhs)) => CheckRecord::fail(kind, subject, format!("{lhs} != {rhs}")),
        Err(e) => CheckRecord::fail(kind, subject, format!("internal: {e}")),
    }
}

/// Connection gluing `A_a = dG G^-1 + G A_b G^-1` over the pair overlap;
/// inputs already extended.
pub fn verify_connection_glue(
    subject: &str,
    a_conn: &MatForm1<Fq>,
    b_conn: &MatForm1<Fq>,
    g: &Mat<Fq>,
) -> CheckRecord {
    let kind = CheckKind::ConnectionGluing;
    let g_inv = match g.inverse() {
        Ok(inv) => inv,
        Err(e) => {
            return CheckRecord::fail(kind, subject, format!("gluing matrix not invertible: {e}"))
        }
    };
    let rhs = mat_d(g)
        .right_mul(&g_inv)
        .add(&b_conn.left_mul(g).right_mul(&g_inv));
    if a_conn == &rhs {
        CheckRecord::pass(kind, subject)
    } else {
        let residual = a_conn.sub(&rhs);
        CheckRecord::fail(kind, subject, format!("residual {}", residual.render()))
    }
}

/// The exponential factor commutes with the other patch's descended
/// operator applied to this patch's field; the mechanism behind Step 2.
pub fn verify_glue_commutation(
    subject: &str,
    g_exp: &Mat<Fq>,
    other_applied: &MatForm1<Fq>,
) -> CheckRecord {
    let kind = CheckKind::ConnectionGluing;
    for i in 0..other_applied.tag().nvars() {
        let ci = other_applied.component(i);
        if !g_exp.commutes_with(ci) {
            return CheckRecord::fail(
                kind,
                subject,
                format!("dt{} component does not commute: {}", i + 1, ci),
            );
        }
    }
    CheckRecord::pass(kind, subject)
}

/// Exponential equals its multinomial expansion, exactly.
pub fn verify_exp_equals_taylor(subject: &str, g_exp: &Mat<Fq>, taylor: &Mat<Fq>) -> CheckRecord {
    if g_exp == taylor {
        CheckRecord::pass(CheckKind::ExpTaylor, subject)
    } else {
        CheckRecord::fail(
            CheckKind::ExpTaylor,
            subject,
            format!("{g_exp} != {taylor}"),
        )
    }
}

/// A seeded perturbation: corrupts the input of the `index`-th subject of
/// the given check kind (in deterministic order), and nothing else.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Corruption {
    pub kind: CheckKind,
    pub index: usize,
}

#[derive(Clone, Debug, Default)]
pub struct AtlasOptions {
    /// Restrict the replayed identity kinds (input validation always runs).
    pub checks: Option<BTreeSet<CheckKind>>,
    /// Mutation-testing hook; see [`Corruption`].
    pub corrupt: Option<Corruption>,
}

struct CorruptionCounter {
    target: Option<Corruption>,
    seen: BTreeMap<CheckKind, usize>,
}

impl CorruptionCounter {
    fn new(target: Option<Corruption>) -> CorruptionCounter {
        CorruptionCounter {
            target,
            seen: BTreeMap::new(),
        }
    }

    /// True when the current subject of `kind` is the corruption target.
    fn hits(&mut self, kind: CheckKind) -> bool {
        let count = self.seen.entry(kind).or_insert(0);
        let index = *count;
        *count += 1;
        matches!(self.target, Some(c) if c.kind == kind && c.index == index)
    }
}

fn add_const(m: &Mat<Fq>, row: usize, col: usize) -> Mat<Fq> {
    let mut out = m.clone();
    let tag = m.tag().clone();
    out.set(row, col, m.at(row, col).add(&Laurent::one(&tag)));
    out
}

fn add_var(m: &Mat<Fq>, row: usize, col: usize, var: usize) -> Mat<Fq> {
    let mut out = m.clone();
    let tag = m.tag().clone();
    out.set(row, col, m.at(row, col).add(&Laurent::var(&tag, var)));
    out
}

/// Builds the full atlas and replays every check. Validation failures stop
/// construction and come back as a FAILED report; identity failures are
/// aggregated with witnesses.
pub fn build_atlas(
    patches: &[PatchLift],
    higgs: &HiggsData,
    opts: &AtlasOptions,
) -> FlatBundleAtlas {
    let mut report = Report::new();

    // deterministic patch order
    let mut sorted: Vec<&PatchLift> = patches.iter().collect();
    sorted.sort_by(|a, b| a.name().cmp(b.name()));

    // structural cross-checks between the cover and the bundle data
    let mut names = BTreeSet::new();
    let mut cover_issues = Vec::new();
    for p in &sorted {
        if !names.insert(p.name().to_string()) {
            cover_issues.push(format!("duplicate patch name {}", p.name()));
        }
        if p.tag().ring() != sorted[0].tag().ring() || p.tag().nvars() != sorted[0].tag().nvars() {
            cover_issues.push(format!("patch {} uses different base parameters", p.name()));
        }
    }
    if sorted.is_empty() {
        cover_issues.push("empty cover".to_string());
    }
    let higgs_names: BTreeSet<String> = higgs.patches.iter().cloned().collect();
    if !cover_issues.is_empty() {
        // fall through with the first issue; nothing else is meaningful
    } else if higgs_names != names {
        cover_issues.push("bundle patch list does not match the cover".to_string());
    } else {
        for p in &sorted {
            for mat in higgs.theta_of(p.name()) {
                if mat.tag() != &p.fq_tag() {
                    cover_issues.push(format!(
                        "field matrix on patch {} lives in the wrong localization",
                        p.name()
                    ));
                    break;
                }
            }
        }
    }
    report.push(match cover_issues.first() {
        None => CheckRecord::pass(CheckKind::InputValidation, "cover/shape"),
        Some(issue) => CheckRecord::fail(CheckKind::InputValidation, "cover/shape", issue.clone()),
    });

    if report.validation_failed() {
        return FlatBundleAtlas::empty(report);
    }

    for p in &sorted {
        report.extend(validate_patch(p));
    }
    report.extend(validate_higgs(higgs));

    if report.validation_failed() {
        return FlatBundleAtlas::empty(report);
    }

    let runs = |kind: CheckKind| match &opts.checks {
        None => true,
        Some(set) => set.contains(&kind),
    };
    let mut counter = CorruptionCounter::new(opts.corrupt);
    let d = sorted[0].tag().nvars();
    let r = higgs.rank;

    // construction: descended operators, pullbacks, connections, gluing data
    let mut xi: BTreeMap<String, Vec<Form1<Fq>>> = BTreeMap::new();
    let mut theta_pb: BTreeMap<String, Vec<Mat<Fq>>> = BTreeMap::new();
    let mut locals: BTreeMap<String, LocalFlat> = BTreeMap::new();
    for p in &sorted {
        let x = match df_over_p(p) {
            Ok(x) => x,
            Err(e) => {
                report.push(CheckRecord::fail(
                    CheckKind::InputValidation,
                    format!("patch:{}/descend", p.name()),
                    format!("internal: {e}"),
                ));
                return FlatBundleAtlas::empty(report);
            }
        };
        xi.insert(p.name().to_string(), x);
        theta_pb.insert(
            p.name().to_string(),
            higgs
                .theta_of(p.name())
                .iter()
                .map(frobenius_pullback_mat)
                .collect(),
        );
        match local_connection(p, higgs) {
            Ok(l) => {
                locals.insert(p.name().to_string(), l);
            }
            Err(e) => {
                report.push(CheckRecord::fail(
                    CheckKind::InputValidation,
                    format!("patch:{}/connection", p.name()),
                    format!("internal: {e}"),
                ));
                return FlatBundleAtlas::empty(report);
            }
        }
    }

    let mut hom: BTreeMap<(String, String), DIHom> = BTreeMap::new();
    let mut exp_part: BTreeMap<(String, String), Mat<Fq>> = BTreeMap::new();
    let mut gluing: BTreeMap<(String, String), Mat<Fq>> = BTreeMap::new();
    for a in &sorted {
        for b in &sorted {
            if a.name() == b.name() {
                continue;
            }
            let key = (a.name().to_string(), b.name().to_string());
            match (di_hom(a, b), gluing_matrix(a, b, higgs)) {
                (Ok(h), Ok((g, full))) => {
                    hom.insert(key.clone(), h);
                    exp_part.insert(key.clone(), g);
                    gluing.insert(key, full);
                }
                (Err(e), _) | (_, Err(e)) => {
                    report.push(CheckRecord::fail(
                        CheckKind::InputValidation,
                        format!("pair:{}|{}/gluing", a.name(), b.name()),
                        format!("internal: {e}"),
                    ));
                    return FlatBundleAtlas::empty(report);
                }
            }
        }
    }

    // local flatness per patch
    if runs(CheckKind::LocalFlatness) {
        for p in &sorted {
            let mut local = locals[p.name()].clone();
            if counter.hits(CheckKind::LocalFlatness) {
                let comp = add_var(local.conn.component(0), 0, r - 1, d - 1);
                *local.conn.component_mut(0) = comp;
            }
            report.extend(verify_local_flat(&local));
        }
    }

    // derivative identity per ordered pair
    if runs(CheckKind::DiDerivative) {
        for a in &sorted {
            for b in &sorted {
                if a.name() == b.name() {
                    continue;
                }
                let mut h = hom[&(a.name().to_string(), b.name().to_string())].clone();
                if counter.hits(CheckKind::DiDerivative) {
                    h.z[0] = h.z[0].add(&Laurent::var(h.z[0].tag(), 0));
                }
                report.push(crate::cover::verify_di_derivative(a, b, &h));
            }
        }
    }

    // z-cocycle per ordered triple
    if runs(CheckKind::DiCocycle) {
        for a in &sorted {
            for b in &sorted {
                for c in &sorted {
                    if a.name() == b.name() && b.name() == c.name() {
                        continue;
                    }
                    let triple_tag = crate::cover::triple_overlap_tag(a, b, c);
                    let zero_hom = |x: &PatchLift, y: &PatchLift| DIHom {
                        pair: (x.name().to_string(), y.name().to_string()),
                        z: vec![Laurent::zero(&x.fq_tag().union(&y.fq_tag())); d],
                    };
                    let get = |x: &PatchLift, y: &PatchLift| -> DIHom {
                        if x.name() == y.name() {
                            zero_hom(x, y)
                        } else {
                            hom[&(x.name().to_string(), y.name().to_string())].clone()
                        }
                    };
                    let h_ab = get(a, b);
                    let h_bc = get(b, c);
                    let mut h_ac = get(a, c);
                    if counter.hits(CheckKind::DiCocycle) {
                        h_ac.z[0] = h_ac.z[0].add(&Laurent::one(h_ac.z[0].tag()));
                    }
                    report.push(crate::cover::verify_di_cocycle(
                        &h_ab,
                        &h_bc,
                        &h_ac,
                        &triple_tag,
                    ));
                }
            }
        }
    }

    // gluing cocycle and exponential additivity per ordered triple
    if runs(CheckKind::GluingCocycle) {
        for a in &sorted {
            for b in &sorted {
                for c in &sorted {
                    if a.name() == b.name() && b.name() == c.name() {
                        continue;
                    }
                    let triple_tag = crate::cover::triple_overlap_tag(a, b, c);
                    let get_g = |x: &PatchLift, y: &PatchLift| -> Mat<Fq> {
                        if x.name() == y.name() {
                            Mat::identity(&triple_tag, r)
                        } else {
                            gluing[&(x.name().to_string(), y.name().to_string())]
                                .extend_tag(&triple_tag)
                        }
                    };
                    let mut g_ab = get_g(a, b);
                    let g_bc = get_g(b, c);
                    let g_ac = get_g(a, c);
                    let subject = format!("triple:{}|{}|{}/cocycle", a.name(), b.name(), c.name());
                    if counter.hits(CheckKind::GluingCocycle) {
                        g_ab = add_const(&g_ab, 0, r - 1);
                    }
                    report.push(verify_g_cocycle(&subject, &g_ab, &g_bc, &g_ac));

                    // the mechanism: the two applied matrices commute and
                    // their exponentials multiply additively
                    let tp_a: Vec<Mat<Fq>> = theta_pb[a.name()]
                        .iter()
                        .map(|m| m.extend_tag(&triple_tag))
                        .collect();
                    let zero_z = vec![Laurent::zero(&triple_tag); d];
                    let z_of = |x: &PatchLift, y: &PatchLift| -> Vec<Laurent<Fq>> {
                        if x.name() == y.name() {
                            zero_z.clone()
                        } else {
                            hom[&(x.name().to_string(), y.name().to_string())].extend_z(&triple_tag)
                        }
                    };
                    let x_mat = hom_applied(&tp_a, &z_of(a, b));
                    let y_mat = hom_applied(&tp_a, &z_of(b, c));
                    let subject = format!(
                        "triple:{}|{}|{}/exp-additivity",
                        a.name(),
                        b.name(),
                        c.name()
                    );
                    report.push(verify_exp_additivity(
                        &subject,
                        &x_mat,
                        &y_mat,
                        higgs.exponent,
                    ));
                }
            }
        }
    }

    // connection gluing and commutation per ordered pair
    if runs(CheckKind::ConnectionGluing) {
        for a in &sorted {
            for b in &sorted {
                if a.name() == b.name() {
                    continue;
                }
                let pair_tag = Overlap::of(a, b).fq_tag();
                let key = (a.name().to_string(), b.name().to_string());
                let a_conn = locals[a.name()].conn.extend_tag(&pair_tag);
                let b_conn = locals[b.name()].conn.extend_tag(&pair_tag);
                let mut g = gluing[&key].extend_tag(&pair_tag);
                let subject = format!("pair:{}|{}/glue", a.name(), b.name());
                if counter.hits(CheckKind::ConnectionGluing) {
                    g = add_var(&g, 0, r - 1, 0);
                }
                report.push(verify_connection_glue(&subject, &a_conn, &b_conn, &g));

                // g_exp commutes with the other lift's operator applied to
                // this patch's field
                let tp_a: Vec<Mat<Fq>> = theta_pb[a.name()]
                    .iter()
                    .map(|m| m.extend_tag(&pair_tag))
                    .collect();
                let xi_b: Vec<Form1<Fq>> = xi[b.name()]
                    .iter()
                    .map(|f| f.extend_tag(&pair_tag))
                    .collect();
                let mut comps = vec![Mat::zero(&pair_tag, r, r); d];
                for l in 0..d {
                    for (i, comp) in comps.iter_mut().enumerate() {
                        *comp = comp.add(&tp_a[l].scale(xi_b[l].component(i)));
                    }
                }
                let other_applied = MatForm1::new(comps);
                let subject = format!("pair:{}|{}/commutation", a.name(), b.name());
                report.push(verify_glue_commutation(
                    &subject,
                    &exp_part[&key].extend_tag(&pair_tag),
                    &other_applied,
                ));
            }
        }
    }

    // exponential vs multinomial per ordered pair
    if runs(CheckKind::ExpTaylor) {
        for a in &sorted {
            for b in &sorted {
                if a.name() == b.name() {
                    continue;
                }
                let key = (a.name().to_string(), b.name().to_string());
                let subject = format!("pair:{}|{}/exp-taylor", a.name(), b.name());
                match taylor_gluing(a, b, higgs) {
                    Ok(mut taylor) => {
                        if counter.hits(CheckKind::ExpTaylor) {
                            taylor = add_const(&taylor, 0, r - 1);
                        }
                        report.push(verify_exp_equals_taylor(&subject, &exp_part[&key], &taylor));
                    }
                    Err(e) => {
                        report.push(CheckRecord::fail(
                            CheckKind::ExpTaylor,
                            subject,
                            format!("internal: {e}"),
                        ));
                    }
                }
            }
        }
    }

    FlatBundleAtlas {
        locals,
        hom,
        exp_part,
        gluing,
        report,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::FieldParams;
    use crate::laurent::{parse_poly, RingTag};
    use std::collections::BTreeMap;

    fn fq_tag(p: u64, nvars: usize) -> RingTag<Fq> {
        RingTag::new(
            Fq::new(FieldParams::prime_field(p).unwrap()),
            nvars,
            BTreeSet::new(),
        )
    }

    fn patch(name: &str, tag: &RingTag<Fq>, images: &[&str]) -> PatchLift {
        let w = tag.lift_level();
        PatchLift::new(
            name,
            &w,
            images.iter().map(|s| parse_poly(&w, s).unwrap()).collect(),
        )
        .unwrap()
    }

    fn pmat(t: &RingTag<Fq>, rows: &[&[&str]]) -> Mat<Fq> {
        Mat::from_rows(
            t,
            rows.iter()
                .map(|r| r.iter().map(|s| parse_poly(t, s).unwrap()).collect())
                .collect(),
        )
    }

    fn e12_bundle(tag: &RingTag<Fq>, patches: &[&str]) -> HiggsData {
        let n = pmat(tag, &[&["0", "1"], &["0", "0"]]);
        let mut theta = BTreeMap::new();
        for p in patches {
            theta.insert(p.to_string(), vec![n.clone()]);
        }
        let mut transitions = BTreeMap::new();
        for a in patches {
            for b in patches {
                if a != b {
                    transitions.insert((a.to_string(), b.to_string()), Mat::identity(tag, 2));
                }
            }
        }
        HiggsData {
            rank: 2,
            exponent: 1,
            patches: patches.iter().map(|s| s.to_string()).collect(),
            theta,
            transitions,
        }
    }

    #[test]
    fn local_connection_examples() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a"]);
        let a = patch("a", &t, &["t1^5"]);
        let local = local_connection(&a, &h).unwrap();
        assert_eq!(
            local.conn.component(0),
            &pmat(&t, &[&["0", "t1^4"], &["0", "0"]])
        );

        let b = patch("a", &t, &["t1^5 + 5*t1^2"]);
        let local = local_connection(&b, &h).unwrap();
        assert_eq!(
            local.conn.component(0),
            &pmat(&t, &[&["0", "t1^4 + 2*t1"], &["0", "0"]])
        );

        // zero field gives the trivial connection
        let mut h0 = h.clone();
        h0.theta.insert("a".into(), vec![Mat::zero(&t, 2, 2)]);
        assert!(local_connection(&a, &h0).unwrap().conn.is_zero());
    }

    #[test]
    fn local_flatness_subclaims() {
        // d = 2, p = 3 worked instance
        let t = fq_tag(3, 2);
        let mut theta = BTreeMap::new();
        theta.insert(
            "a".to_string(),
            vec![
                pmat(&t, &[&["0", "1"], &["0", "0"]]),
                pmat(&t, &[&["0", "t1"], &["0", "0"]]),
            ],
        );
        let h = HiggsData {
            rank: 2,
            exponent: 1,
            patches: vec!["a".to_string()],
            theta,
            transitions: BTreeMap::new(),
        };
        let a = patch("a", &t, &["t1^3", "t2^3"]);
        let local = local_connection(&a, &h).unwrap();
        let expected = MatForm1::new(vec![
            pmat(&t, &[&["0", "t1^2"], &["0", "0"]]),
            pmat(&t, &[&["0", "t1^3*t2^2"], &["0", "0"]]),
        ]);
        assert_eq!(local.conn, expected);
        assert!(verify_local_flat(&local).iter().all(CheckRecord::passed));

        // corrupt the dt1 component by t2*E12: d-closedness breaks
        let mut broken = local.clone();
        let comp = add_var(broken.conn.component(0), 0, 1, 1);
        *broken.conn.component_mut(0) = comp;
        let records = verify_local_flat(&broken);
        assert!(records
            .iter()
            .any(|r| !r.passed() && r.subject.ends_with("d-closed")));
    }

    #[test]
    fn truncated_exp_examples() {
        let t = fq_tag(5, 1);
        assert!(truncated_exp(&Mat::zero(&t, 3, 3), 2)
            .unwrap()
            .is_identity());

        // 3x3 chain times a variable: I + zJ + 3 z^2 J^2 at p = 5
        let j = pmat(&t, &[&["0", "1", "0"], &["0", "0", "1"], &["0", "0", "0"]]);
        let z = Laurent::var(&t, 0);
        let x = j.scale(&z);
        let e = truncated_exp(&x, 2).unwrap();
        let expected = Mat::identity(&t, 3)
            .add(&x)
            .add(&j.pow(2).scale(&z.pow(2).scale(&t.ring().from_u64(3))));
        assert_eq!(e, expected);

        // inverse is the exponential of the negative
        let e_inv = truncated_exp(&x.neg(), 2).unwrap();
        assert!(e.mul(&e_inv).is_identity());

        // order bound and nilpotency check
        let t3 = fq_tag(3, 1);
        let j3 = pmat(&t3, &[&["0", "1"], &["0", "0"]]);
        assert!(matches!(
            truncated_exp(&j3, 3),
            Err(Error::ExponentTooLarge { .. })
        ));
        let not_nil = pmat(&t, &[&["1", "0"], &["0", "1"]]);
        assert!(matches!(
            truncated_exp(&not_nil, 1),
            Err(Error::NotNilpotentToOrder { .. })
        ));
    }

    #[test]
    fn gluing_matrix_worked_example() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a", "b"]);
        let a = patch("a", &t, &["t1^5"]);
        let b = patch("b", &t, &["t1^5 + 5*t1^2"]);
        let (g_exp, g) = gluing_matrix(&a, &b, &h).unwrap();
        assert_eq!(g, pmat(&t, &[&["1", "4*t1^2"], &["0", "1"]]));
        assert_eq!(g_exp, g); // trivial transitions

        // diagonal pair gives the identity
        let (g_exp, g) = gluing_matrix(&a, &a, &h).unwrap();
        assert!(g_exp.is_identity() && g.is_identity());

        // zero field: G is the pulled-back transition
        let mut h0 = h.clone();
        h0.theta.insert("a".into(), vec![Mat::zero(&t, 2, 2)]);
        h0.theta.insert("b".into(), vec![Mat::zero(&t, 2, 2)]);
        let m = pmat(&t, &[&["1", "t1"], &["0", "1"]]);
        h0.transitions.insert(("a".into(), "b".into()), m.clone());
        h0.transitions
            .insert(("b".into(), "a".into()), m.inverse().unwrap());
        let (g_exp, g) = gluing_matrix(&a, &b, &h0).unwrap();
        assert!(g_exp.is_identity());
        assert_eq!(g, frobenius_pullback_mat(&m));
    }

    #[test]
    fn taylor_matches_exp_on_multi_index_case() {
        // d = 2, n = 2, rank 3, z = (t1, t2^2)
        let t = fq_tag(5, 2);
        let j = pmat(&t, &[&["0", "1", "0"], &["0", "0", "1"], &["0", "0", "0"]]);
        let mut theta = BTreeMap::new();
        theta.insert("a".to_string(), vec![j.clone(), j.pow(2)]);
        theta.insert("b".to_string(), vec![j.clone(), j.pow(2)]);
        let mut transitions = BTreeMap::new();
        transitions.insert(("a".to_string(), "b".to_string()), Mat::identity(&t, 3));
        transitions.insert(("b".to_string(), "a".to_string()), Mat::identity(&t, 3));
        let h = HiggsData {
            rank: 3,
            exponent: 2,
            patches: vec!["a".to_string(), "b".to_string()],
            theta,
            transitions,
        };
        let a = patch("a", &t, &["t1^5", "t2^5"]);
        let b = patch("b", &t, &["t1^5 + 20*t1", "t2^5 + 20*t2^2"]);

        // oracle: hand-expanded multinomial sum, 1 + J t1 + 4 J^2 t2^2-free...
        // with z = (t1, t2^2): 1 + J*t1 + J^2*t2^2 + (1/2)J^2 t1^2 + J^3(...) = 0
        let z1 = Laurent::var(&t, 0);
        let z2 = Laurent::var(&t, 1).pow(2);
        let expected = Mat::identity(&t, 3)
            .add(&j.scale(&z1))
            .add(&j.pow(2).scale(&z2))
            .add(&j.pow(2).scale(&z1.pow(2).scale(&t.ring().from_u64(3))));
        let taylor = taylor_gluing(&a, &b, &h).unwrap();
        assert_eq!(taylor, expected);

        let (g_exp, _) = gluing_matrix(&a, &b, &h).unwrap();
        assert_eq!(g_exp, taylor);
        assert!(verify_exp_equals_taylor("t", &g_exp, &taylor).passed());
    }

    #[test]
    fn atlas_on_worked_two_lift_scenario() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a", "b"]);
        let patches = vec![
            patch("a", &t, &["t1^5"]),
            patch("b", &t, &["t1^5 + 5*t1^2"]),
        ];
        let atlas = build_atlas(&patches, &h, &AtlasOptions::default());
        assert!(atlas.verified(), "report:\n{}", atlas.report.render_text());
        assert_eq!(
            atlas.gluing[&("a".to_string(), "b".to_string())],
            pmat(&t, &[&["1", "4*t1^2"], &["0", "1"]])
        );
        // G_ab G_ba = 1 is covered by the (a, b, a) triple
        assert!(atlas
            .report
            .records
            .iter()
            .any(|r| r.subject == "triple:a|b|a/cocycle" && r.passed()));
    }

    #[test]
    fn atlas_three_lifts_cocycle() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a", "b", "c"]);
        let patches = vec![
            patch("a", &t, &["t1^5"]),
            patch("b", &t, &["t1^5 + 5*t1^2"]),
            patch("c", &t, &["t1^5 + 5*t1^2 + 5*t1^3"]),
        ];
        let atlas = build_atlas(&patches, &h, &AtlasOptions::default());
        assert!(atlas.verified(), "report:\n{}", atlas.report.render_text());
        assert_eq!(
            atlas.gluing[&("a".to_string(), "c".to_string())],
            pmat(&t, &[&["1", "4*t1^2 + 4*t1^3"], &["0", "1"]])
        );
    }

    #[test]
    fn single_patch_atlas_is_trivially_verified() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a"]);
        let patches = vec![patch("a", &t, &["t1^5"])];
        let atlas = build_atlas(&patches, &h, &AtlasOptions::default());
        assert!(atlas.verified());
        assert!(atlas.gluing.is_empty());
        assert!(!atlas
            .report
            .records
            .iter()
            .any(|r| r.subject.starts_with("pair:")));
    }

    #[test]
    fn invalid_lift_fails_before_construction() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a", "b"]);
        let patches = vec![patch("a", &t, &["t1^5"]), patch("b", &t, &["t1^5 + t1"])];
        let atlas = build_atlas(&patches, &h, &AtlasOptions::default());
        assert!(!atlas.verified());
        assert!(atlas.report.validation_failed());
        assert!(atlas.locals.is_empty());
    }

    #[test]
    fn connection_glue_worked_example() {
        let t = fq_tag(5, 1);
        let h = e12_bundle(&t, &["a", "b"]);
        let a = patch("a", &t, &["t1^5"]);
        let b = patch("b", &t, &["t1^5 + 5*t1^2"]);
        let a_conn = local_connection(&a, &h).unwrap().conn;
        let b_conn = local_connection(&b, &h).unwrap().conn;
        let (_, g) = gluing_matrix(&a, &b, &h).unwrap();
        assert!(verify_connection_glue("t", &a_conn, &b_conn, &g).passed());
        // dG G^-1 is 3t E12 dt and G A_b G^-1 keeps (t^4 + 2t) E12 dt
        let dg = mat_d(&g).right_mul(&g.inverse().unwrap());
        assert_eq!(dg.component(0), &pmat(&t, &[&["0", "3*t1"], &["0", "0"]]));
        // swapping roles without inverting G breaks the identity
        assert!(!verify_connection_glue("t", &b_conn, &a_conn, &g).passed());

        // equal lifts give G = 1 and the identity collapses to A_a = A_b
        let b_same = patch("b", &t, &["t1^5"]);
        let (_, g_same) = gluing_matrix(&a, &b_same, &h).unwrap();
        assert!(g_same.is_identity());
        assert!(verify_connection_glue("t", &a_conn, &a_conn, &g_same).passed());
    }

    #[test]
    fn corruption_flips_exactly_one_kind() {
        let t = fq_tag(3, 2);
        let mut theta = BTreeMap::new();
        for name in ["a", "b"] {
            theta.insert(
                name.to_string(),
                vec![
                    pmat(&t, &[&["0", "1"], &["0", "0"]]),
                    pmat(&t, &[&["0", "t1"], &["0", "0"]]),
                ],
            );
        }
        let mut transitions = BTreeMap::new();
        transitions.insert(("a".to_string(), "b".to_string()), Mat::identity(&t, 2));
        transitions.insert(("b".to_string(), "a".to_string()), Mat::identity(&t, 2));
        let h = HiggsData {
            rank: 2,
            exponent: 1,
            patches: vec!["a".to_string(), "b".to_string()],
            theta,
            transitions,
        };
        let patches = vec![
            patch("a", &t, &["t1^3", "t2^3"]),
            patch("b", &t, &["t1^3 + 3*t2", "t2^3 + 3*t1*t2"]),
        ];

        let clean = build_atlas(&patches, &h, &AtlasOptions::default());
        assert!(clean.verified(), "report:\n{}", clean.report.render_text());

        for kind in [
            CheckKind::LocalFlatness,
            CheckKind::DiDerivative,
            CheckKind::DiCocycle,
            CheckKind::GluingCocycle,
            CheckKind::ConnectionGluing,
            CheckKind::ExpTaylor,
        ] {
            let opts = AtlasOptions {
                checks: None,
                corrupt: Some(Corruption { kind, index: 0 }),
            };
            let atlas = build_atlas(&patches, &h, &opts);
            assert!(!atlas.verified(), "{kind} corruption went unnoticed");
            for record in atlas.report.failures() {
                assert_eq!(record.kind, kind, "collateral failure: {record:?}");
            }
        }
    }
}
