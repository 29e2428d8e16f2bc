//! Satisfiability over J-lines and GLP.3 theoremhood.
//!
//! The contract is bounded countermodel search: a formula is searched over
//! all J-line shapes up to the completeness size bound and all valuations.
//! Enumerating shapes literally is hopeless for theorem verdicts (the shape
//! count is exponential in the bound), so the search is run as an exact
//! fixpoint over plane summaries instead: a structure is processed plane by
//! plane from the far end, and only the finitely many distinct summaries
//! (which formulas hold at the root, at all points, at some point) are
//! tracked, together with the minimal world count realizing each summary.
//! This decides exactly the same question as the literal enumeration and
//! additionally yields the minimal countermodel size, at which the explicit
//! enumeration is then replayed to extract the first witness in canonical
//! order.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::rc::Rc;

use thiserror::Error;

use crate::formula::{m_plus, Formula};
use crate::jline::{jline_size_bound, shapes_exact, JLineShape};
use crate::kripke::Valuation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecideError {
    #[error("n = {n} is below max(1, modal signature) = {required}")]
    SignatureTooSmall { n: u32, required: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Theorem,
    Refuted,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Theorem => "theorem",
            Status::Refuted => "refuted",
            Status::Inconclusive => "inconclusive",
        }
    }
}

/// A J-line countermodel: the witnessing world is the root for
/// `glp3_decide` and any satisfying world for `jlin_satisfy`.
#[derive(Clone, Debug)]
pub struct Countermodel {
    pub shape: JLineShape,
    pub valuation: Valuation,
    pub world: String,
}

#[derive(Clone, Debug)]
pub struct Verdict {
    pub status: Status,
    pub countermodel: Option<Countermodel>,
    pub bound_used: u64,
}

impl Verdict {
    fn bare(status: Status, bound_used: u64) -> Self {
        Verdict {
            status,
            countermodel: None,
            bound_used,
        }
    }
}

/// Searches for any world of any J-line satisfying `f`, over J-lines of up
/// to `min(jline_size_bound(f, n), cap)` worlds and all valuations of the
/// variables of `f`. `Refuted` means satisfiable (witness attached);
/// `Theorem` means unsatisfiable within the bound and hence that `f` is
/// inconsistent with the J.lin axioms; `Inconclusive` is returned exactly
/// when the bound exceeds `cap` and no witness was found within `cap`.
pub fn jlin_satisfy(f: &Formula, n: u32, cap: u64) -> Result<Verdict, DecideError> {
    let required = f.modal_signature().max(1);
    if n < required {
        return Err(DecideError::SignatureTooSmall { n, required });
    }
    let bound = jline_size_bound(f, n);
    Ok(decide(f, n, bound, cap, SearchMode::Anywhere))
}

/// Decides GLP.3 theoremhood: `f` is a theorem iff no J-line has a root
/// satisfying `¬f ∧ M⁺(¬f)`. Countermodels witness the root.
pub fn glp3_decide(f: &Formula, cap: u64) -> Verdict {
    let n = f.modal_signature().max(1);
    let nf = Formula::not(f.clone()).box_normalize();
    let guard = m_plus(&nf, n).expect("n covers the signature");
    let psi = Formula::and(nf, guard);
    let bound = jline_size_bound(&psi, n);
    decide(&psi, n, bound, cap, SearchMode::Root)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum SearchMode {
    Root,
    Anywhere,
}

fn decide(target: &Formula, n: u32, bound: u64, cap: u64, mode: SearchMode) -> Verdict {
    let eff = bound.min(cap);
    let mut engine = Engine::new(target, n);
    match engine.min_sat_size(mode) {
        Some(size) if size <= eff => {
            let witness = extract_witness(target, n, size, mode)
                .expect("summary search and explicit enumeration disagree");
            Verdict {
                status: Status::Refuted,
                countermodel: Some(witness),
                bound_used: eff,
            }
        }
        Some(_) => Verdict::bare(Status::Inconclusive, eff),
        None => {
            if bound <= cap {
                Verdict::bare(Status::Theorem, eff)
            } else {
                Verdict::bare(Status::Inconclusive, eff)
            }
        }
    }
}

// Replays the explicit enumeration at the known minimal size and returns the
// first witness: shapes in canonical order, valuations in lexicographic mask
// order over sorted variables, worlds in lexicographic order.
fn extract_witness(
    target: &Formula,
    n: u32,
    size: u64,
    mode: SearchMode,
) -> Option<Countermodel> {
    let vars: Vec<String> = target.variables().into_iter().collect();
    for shape in shapes_exact(n, size) {
        let frame = shape.materialize().expect("enumerated shapes are uniform");
        let worlds = frame.worlds().to_vec();
        assert!(
            vars.is_empty() || worlds.len() < 64,
            "valuation masks support at most 63 worlds"
        );
        let root = shape.root_name().unwrap();
        let mut masks = vec![0u64; vars.len()];
        loop {
            let mut valuation = Valuation::empty();
            for (vi, var) in vars.iter().enumerate() {
                let worlds_true: Vec<String> = worlds
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| masks[vi] >> i & 1 == 1)
                    .map(|(_, w)| w.clone())
                    .collect();
                valuation.set(var, worlds_true);
            }
            let witness_world = match mode {
                SearchMode::Root => frame
                    .eval_at(&valuation, &root, target)
                    .unwrap()
                    .then(|| root.clone()),
                SearchMode::Anywhere => worlds
                    .iter()
                    .find(|w| frame.eval_at(&valuation, w, target).unwrap())
                    .cloned(),
            };
            if let Some(world) = witness_world {
                return Some(Countermodel {
                    shape,
                    valuation,
                    world,
                });
            }
            // odometer over masks, last variable fastest
            let mut carry = true;
            for vi in (0..vars.len()).rev() {
                masks[vi] += 1;
                if masks[vi] < (1u64 << worlds.len()) {
                    carry = false;
                    break;
                }
                masks[vi] = 0;
            }
            if carry {
                break;
            }
        }
    }
    None
}

/// Returns true iff `f` is satisfiable at some world (or at the root, with
/// `root_mode`) of some finite J-line with `n` modalities, of any size.
/// Exposed for differential testing against the explicit enumeration.
pub fn summary_search_satisfiable(f: &Formula, n: u32, root_mode: bool) -> Option<u64> {
    let mode = if root_mode {
        SearchMode::Root
    } else {
        SearchMode::Anywhere
    };
    Engine::new(f, n).min_sat_size(mode)
}

// ---------------------------------------------------------------------------
// plane-summary engine

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(words: usize) -> Self {
        Bits(vec![0; words])
    }

    fn get(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    fn set(&mut self, i: usize, v: bool) {
        if v {
            self.0[i / 64] |= 1 << (i % 64);
        } else {
            self.0[i / 64] &= !(1 << (i % 64));
        }
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }
}

// subformulas compiled to index form; children precede parents
enum CSub {
    Top,
    Var(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Imp(usize, usize),
    Modal,
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Summary {
    root_has_target: bool,
    all: Bits,
    some: Bits,
    size: u64,
}

struct Engine {
    compiled: Vec<CSub>,
    n: u32,
    var_count: usize,
    target: usize,
    // per modality index: (formula id, body id, is_box)
    modal_at: Vec<Vec<(usize, usize, bool)>>,
    // mask for summaries exported by realizable(j, ·): bodies of modal
    // formulas with index < j, plus the target bit
    export_mask: Vec<Bits>,
    // mask selecting modal-formula ids with index < j (context key)
    ctx_mask: Vec<Bits>,
    memo: HashMap<(u32, Bits), Rc<Vec<Summary>>>,
    words: usize,
}

impl Engine {
    fn new(target: &Formula, n: u32) -> Engine {
        let mut subs: Vec<Formula> = crate::formula::subformulas(target).into_iter().collect();
        subs.sort_by_key(|f| f.ast_size());
        let index: HashMap<&Formula, usize> =
            subs.iter().enumerate().map(|(i, f)| (f, i)).collect();
        let vars: Vec<String> = target.variables().into_iter().collect();
        let var_index: HashMap<&str, usize> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.as_str(), i))
            .collect();
        let words = subs.len().div_ceil(64);
        let mut modal_at = vec![Vec::new(); n as usize];
        let mut compiled = Vec::with_capacity(subs.len());
        for f in &subs {
            compiled.push(match f {
                Formula::Top => CSub::Top,
                Formula::Var(p) => CSub::Var(var_index[p.as_str()]),
                Formula::Not(a) => CSub::Not(index[a.as_ref()]),
                Formula::And(a, b) => CSub::And(index[a.as_ref()], index[b.as_ref()]),
                Formula::Or(a, b) => CSub::Or(index[a.as_ref()], index[b.as_ref()]),
                Formula::Imp(a, b) => CSub::Imp(index[a.as_ref()], index[b.as_ref()]),
                Formula::Box(_, _) | Formula::Dia(_, _) => CSub::Modal,
            });
        }
        for (i, f) in subs.iter().enumerate() {
            if let Formula::Box(k, body) | Formula::Dia(k, body) = f {
                modal_at[*k as usize].push((i, index[body.as_ref()], matches!(f, Formula::Box(..))));
            }
        }
        assert!(vars.len() < 64, "at most 63 distinct variables supported");
        let target_id = index[target];
        let mut export_mask = Vec::with_capacity(n as usize + 1);
        let mut ctx_mask = Vec::with_capacity(n as usize + 1);
        for j in 0..=n as usize {
            let mut em = Bits::empty(words);
            em.set(target_id, true);
            let mut cm = Bits::empty(words);
            for level in modal_at.iter().take(j.min(n as usize)) {
                for &(id, body, _) in level {
                    em.set(body, true);
                    cm.set(id, true);
                }
            }
            export_mask.push(em);
            ctx_mask.push(cm);
        }
        Engine {
            compiled,
            n,
            var_count: vars.len(),
            target: target_id,
            modal_at,
            export_mask,
            ctx_mask,
            memo: HashMap::new(),
            words,
        }
    }

    fn min_sat_size(&mut self, mode: SearchMode) -> Option<u64> {
        let empty = Bits::empty(self.words);
        let top = self.realizable(0, &empty);
        top.iter()
            .filter(|s| match mode {
                SearchMode::Root => s.root_has_target,
                SearchMode::Anywhere => s.some.get(self.target),
            })
            .map(|s| s.size)
            .min()
    }

    fn leaf_type(&self, assignment: u64, ctx: &Bits) -> Bits {
        let mut bits = Bits::empty(self.words);
        for (i, c) in self.compiled.iter().enumerate() {
            let v = match c {
                CSub::Top => true,
                CSub::Var(vi) => assignment >> vi & 1 == 1,
                CSub::Not(a) => !bits.get(*a),
                CSub::And(a, b) => bits.get(*a) && bits.get(*b),
                CSub::Or(a, b) => bits.get(*a) || bits.get(*b),
                CSub::Imp(a, b) => !bits.get(*a) || bits.get(*b),
                CSub::Modal => ctx.get(i),
            };
            bits.set(i, v);
        }
        bits
    }

    fn realizable(&mut self, j: u32, ctx: &Bits) -> Rc<Vec<Summary>> {
        let key = ctx.and(&self.ctx_mask[j as usize]);
        if let Some(hit) = self.memo.get(&(j, key.clone())) {
            return Rc::clone(hit);
        }
        let result = if j == self.n {
            self.leaf_summaries(&key)
        } else {
            self.compose_level(j, &key)
        };
        let rc = Rc::new(result);
        self.memo.insert((j, key), Rc::clone(&rc));
        rc
    }

    fn leaf_summaries(&self, ctx: &Bits) -> Vec<Summary> {
        let mask = &self.export_mask[self.n as usize];
        let mut best: BTreeMap<(bool, Bits, Bits), u64> = BTreeMap::new();
        for assignment in 0..1u64 << self.var_count {
            let t = self.leaf_type(assignment, ctx);
            let masked = t.and(mask);
            let key = (t.get(self.target), masked.clone(), masked);
            best.entry(key).or_insert(1);
        }
        best.into_iter()
            .map(|((root_has_target, all, some), size)| Summary {
                root_has_target,
                all,
                some,
                size,
            })
            .collect()
    }

    // Level-j structures are nonempty sequences of level-(j+1) planes, built
    // far end first: the running state (all, some) summarizes the suffix; the
    // [j]-boxes and <j>-diamonds of a freshly prepended plane read it.
    fn compose_level(&mut self, j: u32, ctx: &Bits) -> Vec<Summary> {
        let state_mask = self.export_mask[j as usize + 1].clone();
        let out_mask = self.export_mask[j as usize].clone();
        let modal_here = self.modal_at[j as usize].clone();

        let mut results: BTreeMap<(bool, Bits, Bits), u64> = BTreeMap::new();
        let mut dist: HashMap<(Bits, Bits), u64> = HashMap::new();
        let mut heap: BinaryHeap<Reverse<(u64, Bits, Bits)>> = BinaryHeap::new();
        let init = (state_mask.clone(), Bits::empty(self.words));
        dist.insert(init.clone(), 0);
        heap.push(Reverse((0, init.0, init.1)));

        while let Some(Reverse((size, all, some))) = heap.pop() {
            if dist.get(&(all.clone(), some.clone())) != Some(&size) {
                continue;
            }
            let mut inner_ctx = ctx.clone();
            for &(id, body, is_box) in &modal_here {
                let bit = if is_box { all.get(body) } else { some.get(body) };
                inner_ctx.set(id, bit);
            }
            let planes = self.realizable(j + 1, &inner_ctx);
            for p in planes.iter() {
                let new_all = all.and(&p.all);
                let new_some = some.or(&p.some);
                let new_size = size + p.size;
                let res_key = (
                    p.root_has_target,
                    new_all.and(&out_mask),
                    new_some.and(&out_mask),
                );
                let entry = results.entry(res_key).or_insert(new_size);
                if new_size < *entry {
                    *entry = new_size;
                }
                let state_key = (new_all.clone(), new_some.clone());
                if dist.get(&state_key).is_none_or(|&d| new_size < d) {
                    dist.insert(state_key, new_size);
                    heap.push(Reverse((new_size, new_all, new_some)));
                }
            }
        }

        results
            .into_iter()
            .map(|((root_has_target, all, some), size)| Summary {
                root_has_target,
                all,
                some,
                size,
            })
            .collect()
    }
}
