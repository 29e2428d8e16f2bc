//! Canonical finite hereditarily linear J-frames ("J-lines"): nested ordered
//! planes. A shape of depth n is a nonempty sequence of shapes of depth n-1
//! (the 1-planes in `<_0`-order, root side first); worlds are root-to-leaf
//! index tuples and `x R_k y` holds iff the tuples agree below k and
//! `y_k > x_k`. The all-zero tuple is the root.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::Formula;
use crate::kripke::{FiniteFrame, KripkeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum JLineError {
    #[error("shape has ragged depth")]
    RaggedDepth,
    #[error("shape node has no children")]
    EmptyNode,
    #[error("frame is not a hereditarily linear J-frame: {0}")]
    NotAJLine(String),
    #[error(transparent)]
    Kripke(#[from] KripkeError),
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum JLineShape {
    Leaf,
    Node(Vec<JLineShape>),
}

impl fmt::Debug for JLineShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl JLineShape {
    pub fn leaf() -> Self {
        JLineShape::Leaf
    }

    pub fn node(children: Vec<JLineShape>) -> Self {
        JLineShape::Node(children)
    }

    /// Chain of `len` worlds under a single modality.
    pub fn chain(len: usize) -> Self {
        JLineShape::Node(vec![JLineShape::Leaf; len])
    }

    /// Uniform depth (= number of modalities); errors on ragged shapes.
    pub fn depth(&self) -> Result<u32, JLineError> {
        match self {
            JLineShape::Leaf => Ok(0),
            JLineShape::Node(children) => {
                let first = children.first().ok_or(JLineError::EmptyNode)?.depth()?;
                for c in &children[1..] {
                    if c.depth()? != first {
                        return Err(JLineError::RaggedDepth);
                    }
                }
                Ok(first + 1)
            }
        }
    }

    pub fn world_count(&self) -> u64 {
        match self {
            JLineShape::Leaf => 1,
            JLineShape::Node(children) => children.iter().map(|c| c.world_count()).sum(),
        }
    }

    pub fn children(&self) -> &[JLineShape] {
        match self {
            JLineShape::Leaf => &[],
            JLineShape::Node(children) => children,
        }
    }

    /// All worlds as index tuples, in tuple order.
    pub fn world_tuples(&self) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_tuples(&mut prefix, &mut out);
        out
    }

    fn collect_tuples(&self, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        match self {
            JLineShape::Leaf => out.push(prefix.clone()),
            JLineShape::Node(children) => {
                for (i, c) in children.iter().enumerate() {
                    prefix.push(i as u32);
                    c.collect_tuples(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    pub fn world_name(tuple: &[u32]) -> String {
        let inner: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
        format!("({})", inner.join(","))
    }

    pub fn root_name(&self) -> Result<String, JLineError> {
        let n = self.depth()?;
        Ok(Self::world_name(&vec![0; n as usize]))
    }

    /// Compact text form: a leaf is `.`, a node lists its children.
    pub fn render(&self) -> String {
        match self {
            JLineShape::Leaf => ".".to_string(),
            JLineShape::Node(children) => {
                let inner: Vec<String> = children.iter().map(|c| c.render()).collect();
                format!("[{}]", inner.join(","))
            }
        }
    }

    /// The induced finite frame. The result is a hereditarily linear J-frame
    /// by construction.
    pub fn materialize(&self) -> Result<FiniteFrame, JLineError> {
        let n = self.depth()?;
        let tuples = self.world_tuples();
        let worlds: Vec<String> = tuples.iter().map(|t| Self::world_name(t)).collect();
        let mut rel = vec![Vec::new(); n as usize];
        for (i, x) in tuples.iter().enumerate() {
            for (j, y) in tuples.iter().enumerate() {
                if i == j {
                    continue;
                }
                let k = (0..n as usize).find(|&k| x[k] != y[k]).unwrap();
                if y[k] > x[k] {
                    rel[k].push((worlds[i].clone(), worlds[j].clone()));
                }
            }
        }
        Ok(FiniteFrame::new(n, worlds, rel)?)
    }

    /// Reconstructs the shape of a hereditarily linear J-frame, together with
    /// the world-to-tuple assignment. Errors if the frame is not a J-line.
    pub fn from_frame(frame: &FiniteFrame) -> Result<(JLineShape, BTreeMap<String, Vec<u32>>), JLineError> {
        let hl = frame
            .check_hl_direct()
            .map_err(|e| JLineError::NotAJLine(e.to_string()))?;
        if !hl.holds {
            return Err(JLineError::NotAJLine(hl.detail));
        }
        let all: Vec<usize> = (0..frame.worlds().len()).collect();
        let mut assignment = BTreeMap::new();
        let shape = build_shape(frame, &all, 0, &mut Vec::new(), &mut assignment)?;
        Ok((shape, assignment))
    }
}

fn build_shape(
    frame: &FiniteFrame,
    subset: &[usize],
    k: u32,
    prefix: &mut Vec<u32>,
    assignment: &mut BTreeMap<String, Vec<u32>>,
) -> Result<JLineShape, JLineError> {
    if k == frame.n() {
        if subset.len() != 1 {
            return Err(JLineError::NotAJLine(
                "worlds not separated by the relations".to_string(),
            ));
        }
        assignment.insert(frame.worlds()[subset[0]].clone(), prefix.clone());
        return Ok(JLineShape::Leaf);
    }
    // group the subset into (k+1)-planes: the classes of mutual
    // <_k-incomparability (within a k-plane those are the ≡_{k+1} classes)
    let mut planes: Vec<Vec<usize>> = Vec::new();
    'outer: for &w in subset {
        for plane in planes.iter_mut() {
            let rep = plane[0];
            let related = frame
                .successors(k, rep)
                .contains(&w)
                || frame.successors(k, w).contains(&rep);
            if !related {
                plane.push(w);
                continue 'outer;
            }
        }
        planes.push(vec![w]);
    }
    // order planes root side first: a plane precedes those it reaches
    planes.sort_by_key(|plane| {
        let rep = plane[0];
        std::cmp::Reverse(frame.successors(k, rep).len())
    });
    let mut children = Vec::new();
    for (i, plane) in planes.iter().enumerate() {
        prefix.push(i as u32);
        children.push(build_shape(frame, plane, k + 1, prefix, assignment)?);
        prefix.pop();
    }
    Ok(JLineShape::Node(children))
}

/// One representative per isomorphism class of J-lines for `n` modalities
/// with at most `max_worlds` worlds, by increasing world count.
pub fn enumerate_jlines(n: u32, max_worlds: u64) -> impl Iterator<Item = JLineShape> {
    assert!(n >= 1, "enumerate_jlines requires n >= 1");
    (1..=max_worlds).flat_map(move |s| shapes_exact(n, s))
}

/// All shapes of depth `depth` with exactly `size` worlds, in canonical order.
pub fn shapes_exact(depth: u32, size: u64) -> Vec<JLineShape> {
    if depth == 0 {
        return if size == 1 {
            vec![JLineShape::Leaf]
        } else {
            Vec::new()
        };
    }
    sequences(depth, size).into_iter().map(JLineShape::Node).collect()
}

// nonempty sequences of (depth-1)-shapes with world counts summing to size
fn sequences(depth: u32, size: u64) -> Vec<Vec<JLineShape>> {
    let mut out = Vec::new();
    if size == 0 {
        return out;
    }
    for first_size in 1..=size {
        for first in shapes_exact(depth - 1, first_size) {
            if first_size == size {
                out.push(vec![first]);
            } else {
                for tail in sequences(depth, size - first_size) {
                    let mut seq = Vec::with_capacity(tail.len() + 1);
                    seq.push(first.clone());
                    seq.extend(tail);
                    out.push(seq);
                }
            }
        }
    }
    out
}

/// The completeness size bound `(k+1)·k^(n-1)` with `k` the number of modal
/// operators in `f`, clamped below by 1.
pub fn jline_size_bound(f: &Formula, n: u32) -> u64 {
    let k = f.modal_count();
    if k == 0 {
        return 1;
    }
    let pow = k.saturating_pow(n.saturating_sub(1));
    (k + 1).saturating_mul(pow).max(1)
}
