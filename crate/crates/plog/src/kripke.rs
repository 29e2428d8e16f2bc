//! Explicit finite multimodal Kripke frames: evaluation and the structural
//! predicates for J-frames, stratification, hereditary linearity, and
//! k-planes. All predicates are checks returning reports, so arbitrary
//! relational structures can be probed, not just well-formed frames.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KripkeError {
    #[error("frame must have at least one world")]
    EmptyFrame,
    #[error("duplicate world '{0}'")]
    DuplicateWorld(String),
    #[error("unknown world '{0}'")]
    UnknownWorld(String),
    #[error("formula signature {sig} exceeds frame arity {n}")]
    SignatureOverflow { sig: u32, n: u32 },
    #[error("relation index {0} out of range")]
    RelationIndex(u32),
    #[error("not a J-frame: {0}")]
    NotAJFrame(String),
    #[error("schema violation at {pointer}: {msg}")]
    Schema { pointer: String, msg: String },
}

/// A finite frame with `n` accessibility relations. `(u, v) ∈ rel[k]` means
/// `v` is k-accessible from `u`; `<k>φ` holds at `u` iff some k-successor
/// satisfies φ. Worlds are opaque strings kept in lexicographic order.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteFrame {
    n: u32,
    worlds: Vec<String>,
    rel: Vec<BTreeSet<(usize, usize)>>,
    succ: Vec<Vec<Vec<usize>>>,
}

impl fmt::Debug for FiniteFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FiniteFrame(n={}, |W|={})", self.n, self.worlds.len())
    }
}

impl FiniteFrame {
    pub fn new(
        n: u32,
        worlds: Vec<String>,
        rel: Vec<Vec<(String, String)>>,
    ) -> Result<Self, KripkeError> {
        if worlds.is_empty() {
            return Err(KripkeError::EmptyFrame);
        }
        let mut sorted = worlds;
        sorted.sort();
        for pair in sorted.windows(2) {
            if pair[0] == pair[1] {
                return Err(KripkeError::DuplicateWorld(pair[0].clone()));
            }
        }
        let index: BTreeMap<&str, usize> = sorted
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_str(), i))
            .collect();
        let mut rel_sets = vec![BTreeSet::new(); n as usize];
        for (k, pairs) in rel.into_iter().enumerate() {
            if k >= n as usize {
                return Err(KripkeError::RelationIndex(k as u32));
            }
            for (u, v) in pairs {
                let ui = *index
                    .get(u.as_str())
                    .ok_or_else(|| KripkeError::UnknownWorld(u.clone()))?;
                let vi = *index
                    .get(v.as_str())
                    .ok_or_else(|| KripkeError::UnknownWorld(v.clone()))?;
                rel_sets[k].insert((ui, vi));
            }
        }
        let succ = (0..n as usize)
            .map(|k| {
                let mut lists = vec![Vec::new(); sorted.len()];
                for &(u, v) in &rel_sets[k] {
                    lists[u].push(v);
                }
                lists
            })
            .collect();
        Ok(FiniteFrame {
            n,
            worlds: sorted,
            rel: rel_sets,
            succ,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn worlds(&self) -> &[String] {
        &self.worlds
    }

    pub fn world_index(&self, name: &str) -> Option<usize> {
        self.worlds.binary_search_by(|w| w.as_str().cmp(name)).ok()
    }

    pub fn has_edge(&self, k: u32, u: &str, v: &str) -> bool {
        match (self.world_index(u), self.world_index(v)) {
            (Some(ui), Some(vi)) => self.rel[k as usize].contains(&(ui, vi)),
            _ => false,
        }
    }

    pub fn edges(&self, k: u32) -> impl Iterator<Item = (&str, &str)> {
        self.rel[k as usize]
            .iter()
            .map(|&(u, v)| (self.worlds[u].as_str(), self.worlds[v].as_str()))
    }

    pub fn successors(&self, k: u32, world: usize) -> &[usize] {
        &self.succ[k as usize][world]
    }

    /// Standard Kripke truth at a world.
    pub fn eval_at(
        &self,
        val: &Valuation,
        world: &str,
        f: &Formula,
    ) -> Result<bool, KripkeError> {
        let sig = f.modal_signature();
        if sig > self.n {
            return Err(KripkeError::SignatureOverflow { sig, n: self.n });
        }
        let w = self
            .world_index(world)
            .ok_or_else(|| KripkeError::UnknownWorld(world.to_string()))?;
        Ok(self.eval(val, w, f))
    }

    fn eval(&self, val: &Valuation, w: usize, f: &Formula) -> bool {
        match f {
            Formula::Top => true,
            Formula::Var(p) => val.is_true(p, &self.worlds[w]),
            Formula::Not(a) => !self.eval(val, w, a),
            Formula::And(a, b) => self.eval(val, w, a) && self.eval(val, w, b),
            Formula::Or(a, b) => self.eval(val, w, a) || self.eval(val, w, b),
            Formula::Imp(a, b) => !self.eval(val, w, a) || self.eval(val, w, b),
            Formula::Box(k, a) => self.succ[*k as usize][w]
                .iter()
                .all(|&v| self.eval(val, v, a)),
            Formula::Dia(k, a) => self.succ[*k as usize][w]
                .iter()
                .any(|&v| self.eval(val, v, a)),
        }
    }

    fn named(&self, ids: &[usize]) -> Vec<String> {
        ids.iter().map(|&i| self.worlds[i].clone()).collect()
    }

    /// Checks irreflexivity, acyclicity (converse wellfoundedness on finite
    /// frames), transitivity, and the three J-frame interaction conditions.
    pub fn check_j_frame(&self) -> FrameReport {
        let size = self.worlds.len();
        for k in 0..self.n as usize {
            for w in 0..size {
                if self.rel[k].contains(&(w, w)) {
                    return FrameReport::violation(
                        FrameProperty::JFrame,
                        format!("relation {} is not irreflexive", k),
                        self.named(&[w]),
                    );
                }
            }
            if let Some(cycle_world) = self.find_cycle(k) {
                return FrameReport::violation(
                    FrameProperty::JFrame,
                    format!("relation {} has a cycle (not converse wellfounded)", k),
                    self.named(&[cycle_world]),
                );
            }
            for &(u, v) in &self.rel[k] {
                for &w in &self.succ[k][v] {
                    if !self.rel[k].contains(&(u, w)) {
                        return FrameReport::violation(
                            FrameProperty::JFrame,
                            format!("relation {} is not transitive", k),
                            self.named(&[u, v, w]),
                        );
                    }
                }
            }
        }
        for k in 0..self.n as usize {
            for m in k + 1..self.n as usize {
                // (1) x <_m y <_k z implies x <_k z
                for &(x, y) in &self.rel[m] {
                    for &z in &self.succ[k][y] {
                        if !self.rel[k].contains(&(x, z)) {
                            return FrameReport::violation(
                                FrameProperty::JFrame,
                                format!("x <_{} y <_{} z without x <_{} z", m, k, k),
                                self.named(&[x, y, z]),
                            );
                        }
                    }
                }
                // (2) x <_k y <_m z implies x <_k z
                for &(x, y) in &self.rel[k] {
                    for &z in &self.succ[m][y] {
                        if !self.rel[k].contains(&(x, z)) {
                            return FrameReport::violation(
                                FrameProperty::JFrame,
                                format!("x <_{} y <_{} z without x <_{} z", k, m, k),
                                self.named(&[x, y, z]),
                            );
                        }
                    }
                }
                // (3) x <_k z and y <_m z imply x <_k y
                for &(x, z) in &self.rel[k] {
                    for &(y, z2) in &self.rel[m] {
                        if z == z2 && !self.rel[k].contains(&(x, y)) {
                            return FrameReport::violation(
                                FrameProperty::JFrame,
                                format!("x <_{} z and y <_{} z without x <_{} y", k, m, k),
                                self.named(&[x, y, z]),
                            );
                        }
                    }
                }
            }
        }
        FrameReport::ok(FrameProperty::JFrame)
    }

    fn find_cycle(&self, k: usize) -> Option<usize> {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.worlds.len()];
        fn dfs(succ: &[Vec<usize>], state: &mut [u8], w: usize) -> Option<usize> {
            state[w] = 1;
            for &v in &succ[w] {
                match state[v] {
                    1 => return Some(v),
                    0 => {
                        if let Some(c) = dfs(succ, state, v) {
                            return Some(c);
                        }
                    }
                    _ => {}
                }
            }
            state[w] = 2;
            None
        }
        (0..self.worlds.len()).find_map(|w| {
            if state[w] == 0 {
                dfs(&self.succ[k], &mut state, w)
            } else {
                None
            }
        })
    }

    /// Stratification: `x <_m y` and `z <_k y` imply `z <_k x`, for `k < m`
    /// (a k-edge into a world transfers to its m-relatives; this is the
    /// statement the stratification lemma actually proves, and the one that
    /// holds on hereditarily linear frames).
    pub fn check_stratified(&self) -> FrameReport {
        for k in 0..self.n as usize {
            for m in k + 1..self.n as usize {
                for &(x, y) in &self.rel[m] {
                    for &(z, y2) in &self.rel[k] {
                        if y == y2 && !self.rel[k].contains(&(z, x)) {
                            return FrameReport::violation(
                                FrameProperty::Stratified,
                                format!("x <_{} y and z <_{} y without z <_{} x", m, k, k),
                                self.named(&[x, y, z]),
                            );
                        }
                    }
                }
            }
        }
        FrameReport::ok(FrameProperty::Stratified)
    }

    /// Hereditary linearity, direct form: any two distinct worlds are related
    /// by some relation. Requires the frame to be a J-frame.
    pub fn check_hl_direct(&self) -> Result<FrameReport, KripkeError> {
        let j = self.check_j_frame();
        if !j.holds {
            return Err(KripkeError::NotAJFrame(j.detail));
        }
        let size = self.worlds.len();
        for x in 0..size {
            for y in x + 1..size {
                let related = (0..self.n as usize)
                    .any(|k| self.rel[k].contains(&(x, y)) || self.rel[k].contains(&(y, x)));
                if !related {
                    return Ok(FrameReport::violation(
                        FrameProperty::HlDirect,
                        "distinct worlds related by no relation".to_string(),
                        self.named(&[x, y]),
                    ));
                }
            }
        }
        Ok(FrameReport::ok(FrameProperty::HlDirect))
    }

    /// The k-planes: equivalence classes of ≡_k, the closure of the union of
    /// `<_j` for all `j ≥ k` (≡_n is identity). Classes and their members are
    /// in lexicographic order.
    pub fn planes_partition(&self, k: u32) -> Vec<Vec<String>> {
        let classes = self.plane_ids(k);
        let mut by_class: BTreeMap<usize, Vec<String>> = BTreeMap::new();
        for (w, c) in classes.iter().enumerate() {
            by_class.entry(*c).or_default().push(self.worlds[w].clone());
        }
        let mut out: Vec<Vec<String>> = by_class.into_values().collect();
        out.sort();
        out
    }

    // union-find; returns the class representative id per world
    fn plane_ids(&self, k: u32) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.worlds.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for j in k as usize..self.n as usize {
            for &(u, v) in &self.rel[j] {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru.max(rv)] = ru.min(rv);
                }
            }
        }
        (0..self.worlds.len())
            .map(|w| find(&mut parent, w))
            .collect()
    }

    /// Hereditary linearity via the plane characterization: a single 0-plane;
    /// each `<_k` compatible with ≡_{k+1}; and `<_k` restricted to any k-plane
    /// a strict linear order on its (k+1)-planes.
    pub fn check_hl_planes(&self) -> FrameReport {
        let prop = FrameProperty::HlPlanes;
        let zero = self.plane_ids(0);
        if let Some(w) = (1..self.worlds.len()).find(|&w| zero[w] != zero[0]) {
            return FrameReport::violation(
                prop,
                "worlds split into more than one 0-plane".to_string(),
                self.named(&[0, w]),
            );
        }
        for k in 0..self.n {
            let fine = self.plane_ids(k + 1);
            // compatibility: u <_k v relates all ≡_{k+1}-equivalents
            for &(u, v) in &self.rel[k as usize] {
                for u2 in 0..self.worlds.len() {
                    if fine[u2] != fine[u] {
                        continue;
                    }
                    for v2 in 0..self.worlds.len() {
                        if fine[v2] == fine[v] && !self.rel[k as usize].contains(&(u2, v2)) {
                            return FrameReport::violation(
                                prop,
                                format!("<_{} is not compatible with the {}-planes", k, k + 1),
                                self.named(&[u, v, u2, v2]),
                            );
                        }
                    }
                }
            }
            // strict linear order on (k+1)-planes within each k-plane
            let coarse = self.plane_ids(k);
            let reps: BTreeSet<usize> = fine.iter().copied().collect();
            let plane_lt = |a: usize, b: usize| {
                self.rel[k as usize]
                    .iter()
                    .any(|&(u, v)| fine[u] == a && fine[v] == b)
            };
            for &a in &reps {
                if plane_lt(a, a) {
                    return FrameReport::violation(
                        prop,
                        format!("a {}-plane is <_{}-related to itself", k + 1, k),
                        self.named(&[a]),
                    );
                }
                for &b in &reps {
                    if a == b || coarse[a] != coarse[b] {
                        continue;
                    }
                    let (ab, ba) = (plane_lt(a, b), plane_lt(b, a));
                    if ab == ba {
                        let msg = if ab {
                            format!("{}-planes <_{}-related in both directions", k + 1, k)
                        } else {
                            format!("{}-planes in one {}-plane are <_{}-incomparable", k + 1, k, k)
                        };
                        return FrameReport::violation(prop, msg, self.named(&[a, b]));
                    }
                    for &c in &reps {
                        if c != a && c != b && plane_lt(a, b) && plane_lt(b, c) && !plane_lt(a, c)
                        {
                            return FrameReport::violation(
                                prop,
                                format!("<_{} on {}-planes is not transitive", k, k + 1),
                                self.named(&[a, b, c]),
                            );
                        }
                    }
                }
            }
        }
        FrameReport::ok(prop)
    }

    /// The unique world from which every other world is k-accessible for some
    /// k, if one exists.
    pub fn find_root(&self) -> Option<String> {
        let size = self.worlds.len();
        let mut candidates = (0..size).filter(|&w| {
            (0..size).all(|v| {
                v == w || (0..self.n as usize).any(|k| self.rel[k].contains(&(w, v)))
            })
        });
        let first = candidates.next()?;
        if candidates.next().is_some() {
            return None;
        }
        Some(self.worlds[first].clone())
    }

    /// Frame + valuation as the interchange JSON object.
    pub fn to_json(&self, val: &Valuation) -> Value {
        let mut rel = Map::new();
        for k in 0..self.n {
            let pairs: Vec<Value> = self
                .edges(k)
                .map(|(u, v)| json!([u, v]))
                .collect();
            rel.insert(k.to_string(), Value::Array(pairs));
        }
        let mut vmap = Map::new();
        for (p, worlds) in &val.vars {
            vmap.insert(
                p.clone(),
                Value::Array(worlds.iter().map(|w| Value::String(w.clone())).collect()),
            );
        }
        json!({
            "n": self.n,
            "worlds": self.worlds,
            "rel": Value::Object(rel),
            "val": Value::Object(vmap),
        })
    }

    /// Parses the interchange JSON; errors carry a JSON pointer.
    pub fn from_json(value: &Value) -> Result<(FiniteFrame, Valuation), KripkeError> {
        let schema = |pointer: &str, msg: &str| KripkeError::Schema {
            pointer: pointer.to_string(),
            msg: msg.to_string(),
        };
        let obj = value
            .as_object()
            .ok_or_else(|| schema("", "expected an object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| schema("/n", "expected a natural number"))?;
        let worlds_val = obj
            .get("worlds")
            .and_then(Value::as_array)
            .ok_or_else(|| schema("/worlds", "expected an array"))?;
        let mut worlds = Vec::new();
        for (i, w) in worlds_val.iter().enumerate() {
            worlds.push(
                w.as_str()
                    .ok_or_else(|| schema(&format!("/worlds/{}", i), "expected a string"))?
                    .to_string(),
            );
        }
        let mut rel = vec![Vec::new(); n as usize];
        if let Some(rel_val) = obj.get("rel") {
            let rel_obj = rel_val
                .as_object()
                .ok_or_else(|| schema("/rel", "expected an object"))?;
            for (key, pairs_val) in rel_obj {
                let k: usize = key
                    .parse()
                    .map_err(|_| schema(&format!("/rel/{}", key), "expected a numeric key"))?;
                if k >= n as usize {
                    return Err(schema(
                        &format!("/rel/{}", key),
                        "relation index out of range",
                    ));
                }
                let pairs = pairs_val
                    .as_array()
                    .ok_or_else(|| schema(&format!("/rel/{}", key), "expected an array"))?;
                for (i, pair) in pairs.iter().enumerate() {
                    let ptr = format!("/rel/{}/{}", key, i);
                    let arr = pair
                        .as_array()
                        .filter(|a| a.len() == 2)
                        .ok_or_else(|| schema(&ptr, "expected a [from, to] pair"))?;
                    let u = arr[0]
                        .as_str()
                        .ok_or_else(|| schema(&format!("{}/0", ptr), "expected a string"))?;
                    let v = arr[1]
                        .as_str()
                        .ok_or_else(|| schema(&format!("{}/1", ptr), "expected a string"))?;
                    rel[k].push((u.to_string(), v.to_string()));
                }
            }
        }
        let mut vars = BTreeMap::new();
        if let Some(val_val) = obj.get("val") {
            let val_obj = val_val
                .as_object()
                .ok_or_else(|| schema("/val", "expected an object"))?;
            for (p, arr_val) in val_obj {
                let arr = arr_val
                    .as_array()
                    .ok_or_else(|| schema(&format!("/val/{}", p), "expected an array"))?;
                let mut set = BTreeSet::new();
                for (i, w) in arr.iter().enumerate() {
                    set.insert(
                        w.as_str()
                            .ok_or_else(|| {
                                schema(&format!("/val/{}/{}", p, i), "expected a string")
                            })?
                            .to_string(),
                    );
                }
                vars.insert(p.clone(), set);
            }
        }
        let frame =
            FiniteFrame::new(n as u32, worlds, rel).map_err(|e| KripkeError::Schema {
                pointer: "/".to_string(),
                msg: e.to_string(),
            })?;
        let valuation = Valuation::new(vars);
        valuation.validate(&frame)?;
        Ok((frame, valuation))
    }

    /// Graphviz rendering with one labeled edge per relation pair. The root,
    /// when given, is drawn with a double border.
    pub fn to_dot(&self, root: Option<&str>) -> String {
        let mut out = String::from("digraph frame {\n");
        for w in &self.worlds {
            if Some(w.as_str()) == root {
                out.push_str(&format!("  \"{}\" [peripheries=2];\n", w));
            } else {
                out.push_str(&format!("  \"{}\";\n", w));
            }
        }
        for k in 0..self.n {
            for (u, v) in self.edges(k) {
                out.push_str(&format!("  \"{}\" -> \"{}\" [label=\"{}\"];\n", u, v, k));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// A valuation: for each propositional variable the set of worlds where it
/// holds. Variables not listed are false everywhere.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Valuation {
    vars: BTreeMap<String, BTreeSet<String>>,
}

impl Valuation {
    pub fn empty() -> Self {
        Valuation::default()
    }

    pub fn new(vars: BTreeMap<String, BTreeSet<String>>) -> Self {
        Valuation { vars }
    }

    pub fn set(&mut self, var: &str, worlds: impl IntoIterator<Item = String>) {
        self.vars.insert(var.to_string(), worlds.into_iter().collect());
    }

    pub fn is_true(&self, var: &str, world: &str) -> bool {
        self.vars.get(var).is_some_and(|s| s.contains(world))
    }

    pub fn vars(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.vars
    }

    /// Checks that every listed world belongs to the frame.
    pub fn validate(&self, frame: &FiniteFrame) -> Result<(), KripkeError> {
        for worlds in self.vars.values() {
            for w in worlds {
                if frame.world_index(w).is_none() {
                    return Err(KripkeError::UnknownWorld(w.clone()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameProperty {
    JFrame,
    Stratified,
    HlDirect,
    HlPlanes,
}

impl fmt::Display for FrameProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            FrameProperty::JFrame => "j-frame",
            FrameProperty::Stratified => "stratified",
            FrameProperty::HlDirect => "hereditarily-linear",
            FrameProperty::HlPlanes => "hereditarily-linear-planes",
        };
        write!(f, "{}", name)
    }
}

/// Result of a structural check; `witness` names the worlds of the first
/// violation found and is present exactly when the property fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrameReport {
    pub property: FrameProperty,
    pub holds: bool,
    pub detail: String,
    pub witness: Option<Vec<String>>,
}

impl FrameReport {
    fn ok(property: FrameProperty) -> Self {
        FrameReport {
            property,
            holds: true,
            detail: String::new(),
            witness: None,
        }
    }

    fn violation(property: FrameProperty, detail: String, witness: Vec<String>) -> Self {
        FrameReport {
            property,
            holds: false,
            detail,
            witness: Some(witness),
        }
    }
}
