//! Ignatiev's universal frame for the closed fragment.
//!
//! Points are finite sequences of ordinals below ε₀ bounded by the iterated
//! logarithm; accessibility is normalized ordinal-decreasing, `u R_m v` iff
//! the coordinates agree below m and `v_m < u_m`, which makes `δ_ι` the root
//! of the segment `Ig_ι` and keeps the relations converse wellfounded.
//! Truth sets of closed formulas are computed exactly as cell sets, which
//! yields a decision procedure for the closed fragment of GLP, ordinal/worm
//! conversion, and verified axis-defining formulas.

use std::fmt;

use thiserror::Error;

use crate::cells::{Cell, CellSet};
use crate::decide::Status;
use crate::formula::{Formula, Worm};
use crate::ordinal::Ordinal;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IgError {
    #[error("formula is not closed (contains variable '{0}')")]
    NotClosed(String),
    #[error("log-chain violation at index {index}: coordinate exceeds log of its predecessor")]
    LogChain { index: usize },
    #[error("formula is inconsistent with GLP")]
    Inconsistent,
    #[error("formula signature {sig} exceeds n = {n}")]
    SignatureTooLarge { sig: u32, n: u32 },
    #[error("construction failed verification: {0}")]
    Verification(String),
}

/// A point of Ignatiev's frame in canonical form (no trailing zeros).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IgPoint {
    coords: Vec<Ordinal>,
}

impl IgPoint {
    /// Validates the log-chain condition `coords[i+1] ≤ log(coords[i])` and
    /// canonicalizes.
    pub fn validate(coords: Vec<Ordinal>) -> Result<IgPoint, IgError> {
        for i in 1..coords.len() {
            if coords[i] > coords[i - 1].log() {
                return Err(IgError::LogChain { index: i });
            }
        }
        let mut coords = coords;
        while coords.last().is_some_and(Ordinal::is_zero) {
            coords.pop();
        }
        Ok(IgPoint { coords })
    }

    /// The main-axis point `δ_ι`: first coordinate ι, then iterated logs.
    pub fn delta(iota: &Ordinal) -> IgPoint {
        let mut coords = Vec::new();
        let mut cur = iota.clone();
        while !cur.is_zero() {
            coords.push(cur.clone());
            cur = cur.log();
        }
        IgPoint { coords }
    }

    pub fn coords(&self) -> &[Ordinal] {
        &self.coords
    }

    /// Coordinate access with the implicit zero tail.
    pub fn coord(&self, i: usize) -> Ordinal {
        self.coords.get(i).cloned().unwrap_or_else(Ordinal::zero)
    }

    /// The singleton `{self}` as a cell set: each coordinate pinned, and the
    /// first implicit coordinate pinned to zero.
    pub fn singleton(&self) -> CellSet {
        let mut cs: Vec<(Ordinal, Option<Ordinal>)> = self
            .coords
            .iter()
            .map(|c| (c.clone(), Some(c.succ())))
            .collect();
        cs.push((Ordinal::zero(), Some(Ordinal::one())));
        CellSet::from_cells(vec![Cell::new(cs).expect("pinned intervals are nonempty")])
    }
}

impl fmt::Display for IgPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl fmt::Debug for IgPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IgPoint{}", self)
    }
}

/// The exact truth set of a closed formula over the whole frame.
pub fn closed_truthset(f: &Formula) -> Result<CellSet, IgError> {
    match f {
        Formula::Top => Ok(CellSet::whole()),
        Formula::Var(p) => Err(IgError::NotClosed(p.clone())),
        Formula::Not(a) => Ok(closed_truthset(a)?.complement()),
        Formula::And(a, b) => Ok(closed_truthset(a)?.intersect(&closed_truthset(b)?)),
        Formula::Or(a, b) => Ok(closed_truthset(a)?.union(&closed_truthset(b)?)),
        Formula::Imp(a, b) => Ok(closed_truthset(a)?
            .complement()
            .union(&closed_truthset(b)?)),
        Formula::Dia(m, a) => Ok(dia_image(*m as usize, &closed_truthset(a)?)),
        Formula::Box(m, a) => {
            // [m]a = ~<m>~a
            let neg = closed_truthset(a)?.complement();
            Ok(dia_image(*m as usize, &neg).complement())
        }
    }
}

fn dia_image(m: usize, set: &CellSet) -> CellSet {
    CellSet::from_cells(
        set.cells()
            .iter()
            .filter_map(|c| c.dia_project(m))
            .collect(),
    )
}

/// Verdict of the closed-fragment prover; refutations carry a witness point
/// satisfying the negation (the minimal point of the first nonempty cell).
#[derive(Clone, Debug)]
pub struct ClosedVerdict {
    pub status: Status,
    pub witness: Option<IgPoint>,
}

/// Decides GLP theoremhood for closed formulas: a theorem iff the truth set
/// of the negation is empty.
pub fn glp_closed_decide(f: &Formula) -> Result<ClosedVerdict, IgError> {
    let counter = closed_truthset(&Formula::not(f.clone()))?;
    match counter.min_point() {
        None => Ok(ClosedVerdict {
            status: Status::Theorem,
            witness: None,
        }),
        Some(coords) => {
            let point = IgPoint::validate(coords)
                .expect("minimal cell points satisfy the log chain");
            Ok(ClosedVerdict {
                status: Status::Refuted,
                witness: Some(point),
            })
        }
    }
}

/// The least `ι` such that `δ_ι` satisfies `f`, if any main-axis point does.
/// By Ignatiev's theorem a satisfiable closed formula always has one.
pub fn axis_witness(f: &Formula) -> Result<Option<Ordinal>, IgError> {
    Ok(closed_truthset(f)?.min_axis_index())
}

/// The ordinal of a worm: the least main-axis index satisfying it.
pub fn worm_ordinal(w: &Worm) -> Ordinal {
    closed_truthset(&w.to_formula())
        .expect("worms are closed")
        .min_axis_index()
        .expect("worms are consistent with GLP")
}

/// A worm denoting `ι`: `worm_ordinal(ordinal_worm(ι)) = ι`, checked before
/// returning. Successors prepend `<0>`; a final term `w^γ` contributes the
/// index-shifted worm of γ.
pub fn ordinal_worm(iota: &Ordinal) -> Result<Worm, IgError> {
    let worm = ordinal_worm_unchecked(iota);
    let back = worm_ordinal(&worm);
    if &back != iota {
        return Err(IgError::Verification(format!(
            "worm {} denotes {}, expected {}",
            worm, back, iota
        )));
    }
    Ok(worm)
}

fn ordinal_worm_unchecked(iota: &Ordinal) -> Worm {
    let Some((rest, gamma)) = iota.split_last_power() else {
        return Worm::top();
    };
    if gamma.is_zero() {
        // successor: ι = rest + 1
        let mut indices = vec![0];
        indices.extend(ordinal_worm_unchecked(&rest).0);
        Worm(indices)
    } else {
        let head = ordinal_worm_unchecked(&gamma).shift(1);
        if rest.is_zero() {
            head
        } else {
            let mut indices = head.0;
            indices.push(0);
            indices.extend(ordinal_worm_unchecked(&rest).0);
            Worm(indices)
        }
    }
}

/// A closed formula whose truth set is exactly `{δ_ι}`, verified by the cell
/// engine before returning. `[0]⊥` defines δ₀; otherwise the worm A of ι
/// pinned from above by `[0]¬A`.
pub fn axis_defining_formula(iota: &Ordinal) -> Result<Formula, IgError> {
    let candidate = if iota.is_zero() {
        Formula::boxed(0, Formula::bot())
    } else {
        let worm = ordinal_worm(iota)?.to_formula();
        Formula::and(
            worm.clone(),
            Formula::boxed(0, Formula::not(worm)),
        )
    };
    let truth = closed_truthset(&candidate)?;
    let singleton = IgPoint::delta(iota).singleton();
    if !truth.equals(&singleton) {
        return Err(IgError::Verification(format!(
            "defining formula for delta_{} has the wrong truth set",
            iota
        )));
    }
    Ok(candidate)
}

/// The least `k` with `GLP ⊢ <n-1>^k T -> <0>f`, for `f` closed, of
/// signature at most `n`, and consistent with GLP (all checked). Finite by
/// the covering lemma; without the signature bound no k need exist.
pub fn cover_k(f: &Formula, n: u32) -> Result<u64, IgError> {
    if let Some(var) = f.variables().into_iter().next() {
        return Err(IgError::NotClosed(var));
    }
    let sig = f.modal_signature();
    if sig > n {
        return Err(IgError::SignatureTooLarge { sig, n });
    }
    if glp_closed_decide(&Formula::not(f.clone()))?.status == Status::Theorem {
        return Err(IgError::Inconsistent);
    }
    let dia_f = Formula::dia(0, f.clone());
    for k in 0..100_000u64 {
        let mut antecedent = Formula::Top;
        for _ in 0..k {
            antecedent = Formula::dia(n - 1, antecedent);
        }
        let implication = Formula::imp(antecedent, dia_f.clone());
        if glp_closed_decide(&implication)?.status == Status::Theorem {
            return Ok(k);
        }
    }
    unreachable!("the covering lemma bounds k");
}
