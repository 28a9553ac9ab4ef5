//! The manifest document: a JSON description of a cover with Frobenius
//! liftings and a Higgs bundle in Čech form, with polynomials as strings in
//! the canonical rendering.
//!
//! Matrices are nested row-major arrays of polynomial strings. Transition
//! matrices may be given in one direction only; the reverse is derived by
//! inversion and missing pairs default to the identity. `parse` +
//! `emit` round-trip: emitting a parsed manifest and parsing it again
//! yields the same document.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use flatglue::arith::{FieldParams, Fq, W2};
use flatglue::cover::PatchLift;
use flatglue::forms::Mat;
use flatglue::higgs::HiggsData;
use flatglue::laurent::{parse_poly, Laurent, PolyInvert, RingTag};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub prime: u64,
    #[serde(default = "default_degree")]
    pub degree: usize,
    /// Ascending coefficients of the irreducible modulus; required when
    /// `degree > 1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    pub dim: usize,
    pub exponent: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub patches: Vec<PatchDoc>,
    pub bundle: BundleDoc,
}

fn default_degree() -> usize {
    1
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatchDoc {
    pub name: String,
    /// 1-based indices of inverted coordinates.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inverted: Vec<usize>,
    /// Lift images `F(t_1), ..., F(t_d)` at the Witt level.
    pub lift: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleDoc {
    pub rank: usize,
    /// Per patch, one rank x rank matrix per coordinate.
    pub theta: BTreeMap<String, Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub pair: (String, String),
    pub matrix: Vec<Vec<String>>,
}

/// Everything the verifier needs, plus display metadata.
pub struct Inputs {
    pub params: Arc<FieldParams>,
    pub patches: Vec<PatchLift>,
    pub higgs: HiggsData,
    pub title: String,
}

impl Manifest {
    pub fn parse(text: &str) -> Result<Manifest> {
        let manifest: Manifest =
            serde_json::from_str(text).map_err(|e| anyhow!("manifest syntax: {e}"))?;
        Ok(manifest)
    }

    /// Canonical serialization (stable field order, sorted maps and
    /// transitions, 2-space indent).
    pub fn emit(&self) -> String {
        let mut doc = self.clone();
        doc.patches.sort_by(|a, b| a.name.cmp(&b.name));
        doc.bundle.transitions.sort_by(|a, b| a.pair.cmp(&b.pair));
        let mut out = serde_json::to_string_pretty(&doc).expect("manifest serializes");
        out.push('\n');
        out
    }

    /// Semantic translation into verifier inputs, with field-path error
    /// context. The mathematical invariants (lift reduction, integrability,
    /// nilpotency, cocycles) are the verifier's input-validation records,
    /// not parse errors.
    pub fn to_inputs(&self) -> Result<Inputs> {
        let params = FieldParams::new(
            self.prime,
            self.degree,
            self.modulus.as_deref().unwrap_or(&[]),
        )
        .map_err(|e| anyhow!("field parameters: {e}"))?;
        if self.degree > 1 && self.modulus.is_none() {
            bail!("field parameters: degree {} needs a modulus", self.degree);
        }
        if self.dim == 0 {
            bail!("dim must be at least 1");
        }
        if self.patches.is_empty() {
            bail!("at least one patch is required");
        }

        let fq = Fq::new(params.clone());
        let mut patches = Vec::new();
        let mut fq_tags: BTreeMap<String, RingTag<Fq>> = BTreeMap::new();
        let mut seen = BTreeSet::new();
        for patch in &self.patches {
            if !seen.insert(patch.name.clone()) {
                bail!("patches: duplicate name {}", patch.name);
            }
            let mut inverted = BTreeSet::new();
            for &idx in &patch.inverted {
                if idx == 0 || idx > self.dim {
                    bail!(
                        "patches.{}.inverted: coordinate {idx} outside 1..={}",
                        patch.name,
                        self.dim
                    );
                }
                inverted.insert(idx - 1);
            }
            let fq_tag = RingTag::new(fq.clone(), self.dim, inverted);
            let w_tag = fq_tag.lift_level();
            if patch.lift.len() != self.dim {
                bail!(
                    "patches.{}.lift: expected {} images, got {}",
                    patch.name,
                    self.dim,
                    patch.lift.len()
                );
            }
            let images = patch
                .lift
                .iter()
                .enumerate()
                .map(|(i, src)| {
                    parse_field_poly(&w_tag, src)
                        .with_context(|| format!("patches.{}.lift[{i}]", patch.name))
                })
                .collect::<Result<Vec<_>>>()?;
            let lift = PatchLift::new(patch.name.clone(), &w_tag, images)
                .map_err(|e| anyhow!("patches.{}: {e}", patch.name))?;
            fq_tags.insert(patch.name.clone(), fq_tag);
            patches.push(lift);
        }

        // field matrices over each patch ring
        let rank = self.bundle.rank;
        if rank == 0 {
            bail!("bundle.rank must be at least 1");
        }
        let mut theta = BTreeMap::new();
        for patch in &self.patches {
            let mats_doc =
                self.bundle.theta.get(&patch.name).ok_or_else(|| {
                    anyhow!("bundle.theta: missing entry for patch {}", patch.name)
                })?;
            if mats_doc.len() != self.dim {
                bail!(
                    "bundle.theta.{}: expected {} matrices, got {}",
                    patch.name,
                    self.dim,
                    mats_doc.len()
                );
            }
            let tag = &fq_tags[&patch.name];
            let mats = mats_doc
                .iter()
                .enumerate()
                .map(|(l, rows)| {
                    parse_matrix(tag, rank, rows)
                        .with_context(|| format!("bundle.theta.{}[{l}]", patch.name))
                })
                .collect::<Result<Vec<_>>>()?;
            theta.insert(patch.name.clone(), mats);
        }
        for name in self.bundle.theta.keys() {
            if !fq_tags.contains_key(name) {
                bail!("bundle.theta: unknown patch {name}");
            }
        }

        // transitions: given pairs, then derived reversals, identity fill
        let mut transitions: BTreeMap<(String, String), Mat<Fq>> = BTreeMap::new();
        for tr in &self.bundle.transitions {
            let (a, b) = &tr.pair;
            let (ta, tb) = match (fq_tags.get(a), fq_tags.get(b)) {
                (Some(ta), Some(tb)) if a != b => (ta, tb),
                _ => bail!("bundle.transitions: {a}|{b} does not name two distinct patches"),
            };
            let pair_tag = ta.union(tb);
            let m = parse_matrix(&pair_tag, rank, &tr.matrix)
                .with_context(|| format!("bundle.transitions {a}|{b}"))?;
            if transitions.insert((a.clone(), b.clone()), m).is_some() {
                bail!("bundle.transitions: duplicate pair {a}|{b}");
            }
        }
        let names: Vec<String> = self.patches.iter().map(|p| p.name.clone()).collect();
        for a in &names {
            for b in &names {
                if a == b || transitions.contains_key(&(a.clone(), b.clone())) {
                    continue;
                }
                let pair_tag = fq_tags[a].union(&fq_tags[b]);
                let m = match transitions.get(&(b.clone(), a.clone())) {
                    Some(reverse) => reverse.inverse().map_err(|e| {
                        anyhow!("bundle.transitions: cannot invert {b}|{a} for {a}|{b}: {e}")
                    })?,
                    None => Mat::identity(&pair_tag, rank),
                };
                transitions.insert((a.clone(), b.clone()), m);
            }
        }

        let higgs = HiggsData {
            rank,
            exponent: self.exponent,
            patches: names,
            theta,
            transitions,
        };
        let title = self.title.clone().unwrap_or_else(|| "untitled".to_string());
        Ok(Inputs {
            params,
            patches,
            higgs,
            title,
        })
    }
}

fn parse_field_poly(tag: &RingTag<W2>, src: &str) -> Result<Laurent<W2>> {
    parse_poly(tag, src).map_err(|e| anyhow!("{e}"))
}

fn parse_matrix<R: PolyInvert>(
    tag: &RingTag<R>,
    rank: usize,
    rows: &[Vec<String>],
) -> Result<Mat<R>> {
    if rows.len() != rank || rows.iter().any(|r| r.len() != rank) {
        bail!("matrix is not {rank}x{rank}");
    }
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, src)| parse_poly(tag, src).map_err(|e| anyhow!("entry ({i},{j}): {e}")))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Mat::from_rows(tag, parsed))
}
