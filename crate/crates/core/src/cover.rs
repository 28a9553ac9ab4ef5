//! Affine patches with Frobenius liftings over the Witt thickening, the
//! descended operator `dF/[p]`, and the difference-of-lifts homomorphisms
//! on overlaps with their two defining properties.
//!
//! Every patch shares the global coordinates `t_1..t_d`; a patch is a
//! Laurent localization (its inverted set) together with the lift images
//! `F(t_i)`. Overlaps are localizations at the union of the inverted sets
//! and restriction is inclusion, so varying the lifts is what produces
//! nontrivial gluing data.

use rand::Rng;

use crate::arith::{Fq, W2};
use crate::forms::{d0, Form1};
use crate::laurent::{Laurent, RingTag};
use crate::report::{CheckKind, CheckRecord};
use crate::Error;

/// An affine patch: a name, a localization, and a Frobenius lifting given
/// by its coordinate images at the Witt level.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PatchLift {
    name: String,
    tag: RingTag<W2>,
    lift_images: Vec<Laurent<W2>>,
}

impl PatchLift {
    /// Shape-validates and stores the patch. The lifting conditions
    /// (reduction is the p-th power map, units on inverted coordinates)
    /// are checked by [`validate_patch`], which reports instead of failing.
    pub fn new(
        name: impl Into<String>,
        tag: &RingTag<W2>,
        lift_images: Vec<Laurent<W2>>,
    ) -> Result<PatchLift, Error> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::BadParams("patch name must not be empty".into()));
        }
        if lift_images.len() != tag.nvars() {
            return Err(Error::BadParams(format!(
                "patch {name}: expected {} lift images, got {}",
                tag.nvars(),
                lift_images.len()
            )));
        }
        for img in &lift_images {
            if img.tag() != tag {
                return Err(Error::BadParams(format!(
                    "patch {name}: lift image in a foreign ring"
                )));
            }
        }
        Ok(PatchLift {
            name,
            tag: tag.clone(),
            lift_images,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tag(&self) -> &RingTag<W2> {
        &self.tag
    }

    pub fn fq_tag(&self) -> RingTag<Fq> {
        self.tag.reduce_level()
    }

    pub fn lift_images(&self) -> &[Laurent<W2>] {
        &self.lift_images
    }
}

/// Checks the two lifting invariants coordinate by coordinate: the image
/// reduces to `t_i^p`, and inverted coordinates stay invertible.
pub fn validate_patch(patch: &PatchLift) -> Vec<CheckRecord> {
    let mut records = Vec::new();
    let tag = patch.tag();
    let fq_tag = patch.fq_tag();
    let p = tag.ring().p() as u32;
    for (i, img) in patch.lift_images().iter().enumerate() {
        let subject = format!("patch:{}/lift-t{}", patch.name(), i + 1);
        let expected = Laurent::var(&fq_tag, i).pow(p);
        let reduced = img.reduce();
        if reduced != expected {
            records.push(CheckRecord::fail(
                CheckKind::InputValidation,
                subject,
                format!(
                    "reduction is {} instead of {}",
                    reduced.render(),
                    expected.render()
                ),
            ));
            continue;
        }
        if tag.is_inverted(i) {
            if let Err(e) = img.invert() {
                records.push(CheckRecord::fail(
                    CheckKind::InputValidation,
                    subject,
                    format!("image of inverted coordinate is not a unit: {e}"),
                ));
                continue;
            }
        }
        records.push(CheckRecord::pass(CheckKind::InputValidation, subject));
    }
    records
}

/// The overlap of two patches: the localization at the union of their
/// inverted sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Overlap {
    pub left: String,
    pub right: String,
    pub tag: RingTag<W2>,
}

impl Overlap {
    pub fn of(a: &PatchLift, b: &PatchLift) -> Overlap {
        Overlap {
            left: a.name().to_string(),
            right: b.name().to_string(),
            tag: a.tag().union(b.tag()),
        }
    }

    pub fn fq_tag(&self) -> RingTag<Fq> {
        self.tag.reduce_level()
    }
}

/// Localization tag of a triple overlap, at the residue-field level.
pub fn triple_overlap_tag(a: &PatchLift, b: &PatchLift, c: &PatchLift) -> RingTag<Fq> {
    a.tag().union(b.tag()).union(c.tag()).reduce_level()
}

/// The difference-of-lifts homomorphism of a patch pair: `z[l]` is the
/// divided difference `(F_a(t_l) - F_b(t_l)) / p` over the overlap.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DIHom {
    pub pair: (String, String),
    pub z: Vec<Laurent<Fq>>,
}

impl DIHom {
    /// `z` reinterpreted in a larger localization (triple overlaps).
    pub fn extend_z(&self, target: &RingTag<Fq>) -> Vec<Laurent<Fq>> {
        self.z.iter().map(|f| f.extend_tag(target)).collect()
    }
}

/// The descended operator of a patch, coordinate by coordinate:
/// `xi[l] = d(F(t_l)) / p`, a one-form over the patch at the residue level.
/// On a pulled-back form `sum f_l dt_l` the operator acts as
/// `sum f_l^p * xi[l]`.
pub fn df_over_p(patch: &PatchLift) -> Result<Vec<Form1<Fq>>, Error> {
    let fq_tag = patch.fq_tag();
    patch
        .lift_images()
        .iter()
        .map(|img| {
            let dw = d0(img);
            let comps = dw
                .components()
                .iter()
                .map(|c| c.div_p())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Form1::new(&fq_tag, comps))
        })
        .collect()
}

/// Applies [`df_over_p`] through the definition instead: pick any Witt-level
/// lift of the one-form, pull it back along the lifting, differentiate and
/// divide by p. Used as the independent route in tests; must agree with
/// `sum f_l^p * xi[l]` for every choice of lift.
pub fn descend_via_lift(
    patch: &PatchLift,
    omega: &Form1<Fq>,
    lift_of_omega: &Form1<W2>,
) -> Result<Form1<Fq>, Error> {
    assert_eq!(omega.tag(), &patch.fq_tag(), "form must live on the patch");
    let fq_tag = patch.fq_tag();
    let images = patch.lift_images();
    let mut acc = Form1::zero(&fq_tag);
    for (l, w) in lift_of_omega.components().iter().enumerate() {
        // F^*(w dt_l) = (w o F) d(F(t_l))
        let pulled_coeff = w.substitute(images)?;
        let d_img = d0(&images[l]);
        let comps = d_img
            .components()
            .iter()
            .map(|c| pulled_coeff.mul(c).div_p())
            .collect::<Result<Vec<_>, _>>()?;
        acc = acc.add(&Form1::new(&fq_tag, comps));
    }
    Ok(acc)
}

/// Builds the difference-of-lifts homomorphism for an ordered patch pair.
pub fn di_hom(a: &PatchLift, b: &PatchLift) -> Result<DIHom, Error> {
    let overlap = Overlap::of(a, b);
    let z = a
        .lift_images()
        .iter()
        .zip(b.lift_images())
        .map(|(fa, fb)| {
            fa.extend_tag(&overlap.tag)
                .sub(&fb.extend_tag(&overlap.tag))
                .div_p()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DIHom {
        pair: (overlap.left, overlap.right),
        z,
    })
}

/// Derivative identity: `xi_a[l] - xi_b[l] = d(z[l])` for every coordinate,
/// exactly over the overlap ring.
pub fn verify_di_derivative(a: &PatchLift, b: &PatchLift, h: &DIHom) -> CheckRecord {
    let subject = format!("pair:{}|{}", a.name(), b.name());
    let overlap_fq = Overlap::of(a, b).fq_tag();
    let (xi_a, xi_b) = match (df_over_p(a), df_over_p(b)) {
        (Ok(xa), Ok(xb)) => (xa, xb),
        (Err(e), _) | (_, Err(e)) => {
            return CheckRecord::fail(CheckKind::DiDerivative, subject, format!("internal: {e}"));
        }
    };
    for l in 0..a.tag().nvars() {
        let lhs = xi_a[l]
            .extend_tag(&overlap_fq)
            .sub(&xi_b[l].extend_tag(&overlap_fq));
        let rhs = d0(&h.z[l]);
        if lhs != rhs {
            let diff = lhs.sub(&rhs);
            return CheckRecord::fail(
                CheckKind::DiDerivative,
                subject,
                format!("coordinate t{}: difference {}", l + 1, diff.render()),
            );
        }
    }
    CheckRecord::pass(CheckKind::DiDerivative, subject)
}

/// Additive cocycle: `z_ab[l] + z_bc[l] = z_ac[l]` over the triple overlap.
pub fn verify_di_cocycle(
    h_ab: &DIHom,
    h_bc: &DIHom,
    h_ac: &DIHom,
    triple_tag: &RingTag<Fq>,
) -> CheckRecord {
    let subject = format!("triple:{}|{}|{}", h_ab.pair.0, h_bc.pair.0, h_bc.pair.1);
    let zab = h_ab.extend_z(triple_tag);
    let zbc = h_bc.extend_z(triple_tag);
    let zac = h_ac.extend_z(triple_tag);
    for l in 0..zab.len() {
        let lhs = zab[l].add(&zbc[l]);
        if lhs != zac[l] {
            return CheckRecord::fail(
                CheckKind::DiCocycle,
                subject,
                format!(
                    "coordinate t{}: {} + {} != {}",
                    l + 1,
                    zab[l].render(),
                    zbc[l].render(),
                    zac[l].render()
                ),
            );
        }
    }
    CheckRecord::pass(CheckKind::DiCocycle, subject)
}

/// A random Frobenius lifting on the given localization: coordinate images
/// `t_i^p + p * (random Laurent polynomial)`, valid by construction.
pub fn random_patch(
    name: impl Into<String>,
    fq_tag: &RingTag<Fq>,
    max_degree: i32,
    rng: &mut impl Rng,
) -> PatchLift {
    let w_tag = fq_tag.lift_level();
    let p = fq_tag.ring().p() as u32;
    let images = (0..fq_tag.nvars())
        .map(|i| {
            let base = Laurent::var(&w_tag, i).pow(p);
            let noise = random_poly(fq_tag, max_degree, 3, rng);
            base.add(&noise.times_p())
        })
        .collect();
    PatchLift::new(name, &w_tag, images).expect("generated patch is well formed")
}

/// A small random Laurent polynomial over the localization: up to
/// `max_terms` terms with exponents in `[lo, max_degree]`, where `lo` is
/// negative only on inverted coordinates.
pub fn random_poly(
    tag: &RingTag<Fq>,
    max_degree: i32,
    max_terms: usize,
    rng: &mut impl Rng,
) -> Laurent<Fq> {
    let mut out = Laurent::zero(tag);
    let terms = rng.gen_range(0..=max_terms);
    for _ in 0..terms {
        let exps: Vec<i32> = (0..tag.nvars())
            .map(|i| {
                let lo = if tag.is_inverted(i) { -2 } else { 0 };
                rng.gen_range(lo..=max_degree.max(lo))
            })
            .collect();
        let coeff = random_scalar(tag.ring(), rng);
        out = out.add(&Laurent::term(tag, &exps, coeff));
    }
    out
}

pub fn random_scalar(ring: &Fq, rng: &mut impl Rng) -> crate::arith::FieldElem {
    let p = ring.p();
    let coeffs: Vec<u64> = (0..ring.e()).map(|_| rng.gen_range(0..p)).collect();
    ring.elem(&coeffs)
}
