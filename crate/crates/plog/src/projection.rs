//! Projections from segments of Ignatiev's frame onto finite J-lines, with
//! per-world closed defining formulas.
//!
//! Given a J-line T the construction produces an ordinal ι and a map
//! π: Ig_ι → T by recursion on the shape: a singleton maps Ig₀; a frame
//! without `<_0` edges lifts the construction of its single plane by an
//! index shift onto Ig_{ω^ι}; a frame with several planes tiles Ig_ι as an
//! ordered sum of the planes' segments, delimited by axis-defining
//! formulas at the partial-sum offsets. Every construction verifies its own
//! postconditions with the cell engine before returning: the defining
//! formulas' truth sets partition Ig_ι and the root's is exactly {δ_ι}.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::cells::{Cell, CellSet};
use crate::formula::{m_plus, substitute_closed, Formula};
use crate::ignatiev::{axis_defining_formula, closed_truthset, IgError, IgPoint};
use crate::jline::{JLineError, JLineShape};
use crate::kripke::{KripkeError, Valuation};
use crate::ordinal::Ordinal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProjectionError {
    #[error(transparent)]
    Shape(#[from] JLineError),
    #[error(transparent)]
    Ig(#[from] IgError),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
    #[error("defining formulas of {0} and {1} overlap")]
    Overlap(String, String),
    #[error("defining formulas do not cover the segment")]
    Cover,
    #[error("root formula does not define the axis point")]
    RootSingleton,
    #[error("point {0} lies outside the segment")]
    OutsideSegment(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

/// The case analysis used to build a projection, mirrored per recursion
/// level; `Sum` parts are ordered bottom band first (farthest from the
/// root), each band spanning first coordinates `[lower, lower + alpha]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CaseTree {
    Singleton,
    Shift {
        iota_hat: Ordinal,
        inner: Box<CaseTree>,
    },
    Sum {
        parts: Vec<SumPart>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SumPart {
    /// Index of the corresponding child plane of the shape (0 = root side).
    pub child: usize,
    /// Least first coordinate of the band.
    pub lower: Ordinal,
    /// Segment ordinal of the plane; the band is `[lower, lower + alpha]`.
    pub alpha: Ordinal,
    pub body: SumPartBody,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SumPartBody {
    SingletonPlane,
    Inner(Box<CaseTree>),
}

/// A verified projection: `iota`, the shape, one closed defining formula per
/// world, and the case tree used to build them.
#[derive(Clone, Debug)]
pub struct ProjectionSpec {
    pub iota: Ordinal,
    pub shape: JLineShape,
    pub defs: BTreeMap<String, Formula>,
    pub structure: CaseTree,
}

impl ProjectionSpec {
    /// The segment `Ig_ι = {x : x₀ ≤ ι}` as a cell set.
    pub fn segment(&self) -> CellSet {
        segment_cellset(&self.iota)
    }

    /// Maps a point of the segment to its world by recursive descent.
    pub fn project_point(&self, p: &IgPoint) -> Result<String, ProjectionError> {
        if p.coord(0) > self.iota {
            return Err(ProjectionError::OutsideSegment(p.to_string()));
        }
        let depth = self.shape.depth()?;
        let tuple = descend(&self.structure, p, 0, depth)?;
        Ok(JLineShape::world_name(&tuple))
    }

    pub fn to_json(&self) -> Value {
        let mut defs = Map::new();
        for (w, f) in &self.defs {
            defs.insert(w.clone(), Value::String(f.to_string()));
        }
        json!({
            "iota": self.iota.to_string(),
            "defs": Value::Object(defs),
            "case_tree": case_tree_json(&self.structure),
        })
    }
}

fn case_tree_json(ct: &CaseTree) -> Value {
    match ct {
        CaseTree::Singleton => json!({"case": "singleton"}),
        CaseTree::Shift { iota_hat, inner } => json!({
            "case": "shift",
            "iota_hat": iota_hat.to_string(),
            "inner": case_tree_json(inner),
        }),
        CaseTree::Sum { parts } => json!({
            "case": "sum",
            "parts": parts
                .iter()
                .map(|p| {
                    json!({
                        "child": p.child,
                        "lower": p.lower.to_string(),
                        "alpha": p.alpha.to_string(),
                        "body": match &p.body {
                            SumPartBody::SingletonPlane => json!("singleton-plane"),
                            SumPartBody::Inner(ct) => case_tree_json(ct),
                        },
                    })
                })
                .collect::<Vec<_>>(),
        }),
    }
}

fn segment_cellset(iota: &Ordinal) -> CellSet {
    CellSet::from_cells(vec![
        Cell::new(vec![(Ordinal::zero(), Some(iota.succ()))]).expect("nonempty segment")
    ])
}

fn descend(
    ct: &CaseTree,
    p: &IgPoint,
    shift: usize,
    depth: u32,
) -> Result<Vec<u32>, ProjectionError> {
    match ct {
        CaseTree::Singleton => Ok(vec![0; depth as usize]),
        CaseTree::Shift { inner, .. } => {
            let mut tuple = vec![0];
            tuple.extend(descend(inner, p, shift + 1, depth - 1)?);
            Ok(tuple)
        }
        CaseTree::Sum { parts } => {
            let x0 = p.coord(shift);
            for part in parts {
                let top = part.lower.add(&part.alpha);
                if x0 <= top {
                    let mut tuple = vec![part.child as u32];
                    match &part.body {
                        SumPartBody::SingletonPlane => {
                            tuple.extend(vec![0; depth as usize - 1]);
                        }
                        SumPartBody::Inner(inner) => {
                            tuple.extend(descend(inner, p, shift + 1, depth - 1)?);
                        }
                    }
                    return Ok(tuple);
                }
            }
            Err(ProjectionError::OutsideSegment(p.to_string()))
        }
    }
}

/// Builds the projection for a J-line shape and verifies the partition and
/// root-singleton invariants with the cell engine.
pub fn build_projection(shape: &JLineShape) -> Result<ProjectionSpec, ProjectionError> {
    shape.depth()?;
    let (iota, defs_by_tuple, structure) = build(shape)?;
    let defs: BTreeMap<String, Formula> = defs_by_tuple
        .into_iter()
        .map(|(t, f)| (JLineShape::world_name(&t), f))
        .collect();
    let spec = ProjectionSpec {
        iota,
        shape: shape.clone(),
        defs,
        structure,
    };
    verify(&spec)?;
    Ok(spec)
}

fn verify(spec: &ProjectionSpec) -> Result<(), ProjectionError> {
    let sets: BTreeMap<&String, CellSet> = spec
        .defs
        .iter()
        .map(|(w, f)| Ok((w, closed_truthset(f)?)))
        .collect::<Result<_, IgError>>()?;
    let worlds: Vec<&&String> = sets.keys().collect();
    for (i, a) in worlds.iter().enumerate() {
        for b in &worlds[i + 1..] {
            if !sets[**a].intersect(&sets[**b]).is_empty() {
                return Err(ProjectionError::Overlap((***a).clone(), (***b).clone()));
            }
        }
    }
    let union = sets
        .values()
        .fold(CellSet::empty(), |acc, s| acc.union(s));
    if !union.equals(&spec.segment()) {
        return Err(ProjectionError::Cover);
    }
    let root = spec.shape.root_name()?;
    let root_set = &sets[&root];
    if !root_set.equals(&IgPoint::delta(&spec.iota).singleton()) {
        return Err(ProjectionError::RootSingleton);
    }
    Ok(())
}

type Defs = BTreeMap<Vec<u32>, Formula>;

fn build(shape: &JLineShape) -> Result<(Ordinal, Defs, CaseTree), ProjectionError> {
    let depth = shape.depth()?;
    // Case I: a single world is projected from Ig₀ = {δ₀}
    if shape.world_count() == 1 {
        let mut defs = Defs::new();
        defs.insert(
            vec![0; depth as usize],
            Formula::boxed(0, Formula::bot()),
        );
        return Ok((Ordinal::zero(), defs, CaseTree::Singleton));
    }
    let children = shape.children();
    if children.len() == 1 {
        // Case II: no <_0 edges; lift the single plane by an index shift
        let (inner_iota, inner_defs, inner_ct) = build(&children[0])?;
        let iota_hat = inner_iota.omega_pow();
        let guard = Formula::boxed(
            0,
            Formula::not(axis_defining_formula(&iota_hat)?),
        );
        let mut defs = Defs::new();
        for (tuple, f) in inner_defs {
            let mut outer = vec![0];
            outer.extend(tuple);
            defs.insert(outer, Formula::and(f.shift_indices(1), guard.clone()));
        }
        let structure = CaseTree::Shift {
            iota_hat: iota_hat.clone(),
            inner: Box::new(inner_ct),
        };
        return Ok((iota_hat, defs, structure));
    }
    // Case III: ordered sum of the 1-planes; the shape lists planes root
    // side first, the sum is built bottom band (farthest plane) first
    let count = children.len();
    let mut parts = Vec::with_capacity(count);
    let mut part_defs: Vec<Defs> = Vec::with_capacity(count);
    let mut sigma = Ordinal::zero();
    for i in 0..count {
        let child = count - 1 - i;
        let plane = &children[child];
        let lower = if i == 0 { Ordinal::zero() } else { sigma.succ() };
        let (alpha, defs, body) = if plane.world_count() == 1 {
            let mut defs = Defs::new();
            defs.insert(vec![0; depth as usize - 1], Formula::Top);
            (Ordinal::zero(), defs, SumPartBody::SingletonPlane)
        } else {
            let (inner_iota, inner_defs, inner_ct) = build(plane)?;
            let alpha = inner_iota.omega_pow();
            let defs = inner_defs
                .into_iter()
                .map(|(t, f)| (t, f.shift_indices(1)))
                .collect();
            (alpha, defs, SumPartBody::Inner(Box::new(inner_ct)))
        };
        sigma = lower.add(&alpha);
        parts.push(SumPart {
            child,
            lower,
            alpha,
            body,
        });
        part_defs.push(defs);
    }
    let iota = sigma;
    // band guards: χ₀ = ⊥, χ_{i+1} = ¬<0>(defining formula of δ at the
    // partial sum σ_i); band i is ¬χ_i ∧ χ_{i+1}
    let mut chis = vec![Formula::bot()];
    for part in &parts {
        let sigma_i = part.lower.add(&part.alpha);
        chis.push(Formula::not(Formula::dia(
            0,
            axis_defining_formula(&sigma_i)?,
        )));
    }
    let mut defs = Defs::new();
    for (i, part) in parts.iter().enumerate() {
        let band = Formula::and(
            Formula::not(chis[i].clone()),
            chis[i + 1].clone(),
        );
        for (tuple, f) in &part_defs[i] {
            let mut outer = vec![part.child as u32];
            outer.extend(tuple.clone());
            let def = match part.body {
                SumPartBody::SingletonPlane => band.clone(),
                SumPartBody::Inner(_) => Formula::and(f.clone(), band.clone()),
            };
            defs.insert(outer, def);
        }
    }
    Ok((iota, defs, CaseTree::Sum { parts }))
}

/// The closed substitution transporting a rooted satisfaction fact into the
/// frame: each variable becomes the disjunction of the defining formulas of
/// the worlds where it holds. The root must satisfy `f ∧ M⁺(f)` under `v`,
/// and `δ_ι` is checked to satisfy the result before it is returned.
pub fn closed_substitution_witness(
    shape: &JLineShape,
    v: &Valuation,
    f: &Formula,
) -> Result<Formula, ProjectionError> {
    let n = shape.depth()?;
    let frame = shape.materialize()?;
    let root = shape.root_name()?;
    let guard = m_plus(f, n).map_err(|e| ProjectionError::Precondition(e.to_string()))?;
    let pre = Formula::and(f.clone(), guard);
    if !frame.eval_at(v, &root, &pre)? {
        return Err(ProjectionError::Precondition(format!(
            "root does not satisfy {} ∧ M⁺",
            f
        )));
    }
    let spec = build_projection(shape)?;
    let mut subst = BTreeMap::new();
    for var in f.variables() {
        let worlds: Vec<Formula> = spec
            .defs
            .iter()
            .filter(|(w, _)| v.is_true(&var, w))
            .map(|(_, d)| d.clone())
            .collect();
        subst.insert(var, Formula::disj(worlds));
    }
    let witness = substitute_closed(f, &subst)
        .map_err(|e| ProjectionError::Precondition(e.to_string()))?;
    let delta = IgPoint::delta(&spec.iota);
    if !closed_truthset(&witness)?.contains_coords(delta.coords()) {
        return Err(ProjectionError::Precondition(format!(
            "δ_{} does not satisfy the substituted formula",
            spec.iota
        )));
    }
    Ok(witness)
}
