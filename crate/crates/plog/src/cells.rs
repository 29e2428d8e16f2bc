//! Symbolic definable subsets of Ignatiev's frame.
//!
//! A `Cell` constrains finitely many coordinates to ordinal intervals
//! `[lo, hi)` (upper bound possibly ∞); later coordinates are unconstrained.
//! A `CellSet` is a finite union of cells. Emptiness is decidable against
//! the log-chain constraint of the frame, and equality is decided
//! semantically via emptiness of the two differences.

use std::cmp::Ordering;

use crate::ordinal::Ordinal;

/// A single interval cell `{x : ∀i<d, lo_i ≤ x_i < hi_i}`; `hi = None`
/// means unbounded. Trailing unconstrained coordinates are stripped, and
/// `lo < hi` holds for every stored constraint.
#[derive(Clone, PartialEq, Eq)]
pub struct Cell {
    constraints: Vec<(Ordinal, Option<Ordinal>)>,
}

impl Cell {
    /// The whole frame.
    pub fn whole() -> Cell {
        Cell {
            constraints: Vec::new(),
        }
    }

    /// Builds a cell; returns `None` when some interval is vacuous.
    pub fn new(constraints: Vec<(Ordinal, Option<Ordinal>)>) -> Option<Cell> {
        let mut cs = constraints;
        for (lo, hi) in &cs {
            if let Some(h) = hi {
                if lo >= h {
                    return None;
                }
            }
        }
        while cs
            .last()
            .is_some_and(|(lo, hi)| lo.is_zero() && hi.is_none())
        {
            cs.pop();
        }
        Some(Cell { constraints: cs })
    }

    pub fn dim(&self) -> usize {
        self.constraints.len()
    }

    /// The interval at coordinate `i` (`[0, ∞)` beyond the stored prefix).
    pub fn interval(&self, i: usize) -> (Ordinal, Option<Ordinal>) {
        self.constraints
            .get(i)
            .cloned()
            .unwrap_or((Ordinal::zero(), None))
    }

    pub fn intersect(&self, other: &Cell) -> Option<Cell> {
        let d = self.dim().max(other.dim());
        let mut cs = Vec::with_capacity(d);
        for i in 0..d {
            let (lo_a, hi_a) = self.interval(i);
            let (lo_b, hi_b) = other.interval(i);
            let lo = lo_a.max(lo_b);
            let hi = match (hi_a, hi_b) {
                (None, h) | (h, None) => h,
                (Some(a), Some(b)) => Some(a.min(b)),
            };
            cs.push((lo, hi));
        }
        Cell::new(cs)
    }

    /// Interval-wise containment; sufficient for set containment.
    fn contained_in(&self, other: &Cell) -> bool {
        (0..self.dim().max(other.dim())).all(|i| {
            let (lo_a, hi_a) = self.interval(i);
            let (lo_b, hi_b) = other.interval(i);
            lo_b <= lo_a
                && match (hi_a, hi_b) {
                    (_, None) => true,
                    (None, Some(_)) => false,
                    (Some(a), Some(b)) => a <= b,
                }
        })
    }

    /// Complement within the whole frame: one cell per violated bound.
    fn complement_cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (i, (lo, hi)) in self.constraints.iter().enumerate() {
            if !lo.is_zero() {
                let mut cs = vec![(Ordinal::zero(), None); i];
                cs.push((Ordinal::zero(), Some(lo.clone())));
                out.extend(Cell::new(cs));
            }
            if let Some(h) = hi {
                let mut cs = vec![(Ordinal::zero(), None); i];
                cs.push((h.clone(), None));
                out.extend(Cell::new(cs));
            }
        }
        out
    }

    /// Interval membership of a point given by its coordinates (zero-padded).
    pub fn contains_coords(&self, coords: &[Ordinal]) -> bool {
        let zero = Ordinal::zero();
        self.constraints.iter().enumerate().all(|(i, (lo, hi))| {
            let c = coords.get(i).unwrap_or(&zero);
            c >= lo && hi.as_ref().is_none_or(|h| c < h)
        })
    }

    /// The coordinate-wise minimal frame point in the cell, or `None` when
    /// the cell is empty: a backward pass computes at each coordinate the
    /// least value above `lo` whose logarithm supports the tail requirement.
    pub fn min_point(&self) -> Option<Vec<Ordinal>> {
        self.min_point_from(0)
    }

    /// Minimal feasible values for the coordinates from `start` on.
    pub fn min_point_from(&self, start: usize) -> Option<Vec<Ordinal>> {
        let d = self.dim();
        if start >= d {
            return Some(Vec::new());
        }
        let mut coords = vec![Ordinal::zero(); d - start];
        let mut required = Ordinal::zero();
        for i in (start..d).rev() {
            let (lo, hi) = self.interval(i);
            let mu = Ordinal::least_with_log_at_least(&lo, &required);
            if hi.is_some_and(|h| mu >= h) {
                return None;
            }
            coords[i - start] = mu.clone();
            required = mu;
        }
        Some(coords)
    }

    pub fn is_empty(&self) -> bool {
        self.min_point().is_none()
    }

    /// The truth cell of `<m>self`: prefix constraints are kept, coordinate
    /// m becomes everything strictly above the least coordinate-m value
    /// supporting the tail, later constraints are dropped. `None` when the
    /// tail is infeasible.
    pub fn dia_project(&self, m: usize) -> Option<Cell> {
        let tail_min = self.min_point_from(m)?;
        let mu = tail_min.into_iter().next().unwrap_or_else(Ordinal::zero);
        let mut cs: Vec<(Ordinal, Option<Ordinal>)> =
            (0..m).map(|i| self.interval(i)).collect();
        cs.push((mu.succ(), None));
        Cell::new(cs)
    }

    /// The least `ι` with `δ_ι` in the cell, where `δ` iterates the
    /// logarithm. Backward over the coordinates: at each step either the
    /// current lower bound already chains into the suffix, or the least
    /// value whose logarithm is exactly the suffix minimum is forced.
    pub fn min_axis_index(&self) -> Option<Ordinal> {
        let d = self.dim();
        let mut min: Option<Ordinal> = Some(Ordinal::zero());
        for i in (0..d).rev() {
            let (lo, hi) = self.interval(i);
            let candidate = if self.axis_tail_admits(i + 1, &lo.log()) {
                lo.clone()
            } else {
                let target = min?;
                Ordinal::least_with_log_exact(&lo, &target)
            };
            if hi.is_some_and(|h| candidate >= h) {
                return None;
            }
            min = Some(candidate);
        }
        min
    }

    // whether an axis point with coordinate `i` equal to `value` meets the
    // constraints from `i` on
    fn axis_tail_admits(&self, i: usize, value: &Ordinal) -> bool {
        if i >= self.dim() {
            return true;
        }
        let (lo, hi) = self.interval(i);
        value >= &lo
            && hi.as_ref().is_none_or(|h| value < h)
            && self.axis_tail_admits(i + 1, &value.log())
    }

    pub fn render(&self) -> String {
        let d = self.dim().max(1);
        let parts: Vec<String> = (0..d)
            .map(|i| {
                let (lo, hi) = self.interval(i);
                let hi_text = hi.map_or("∞".to_string(), |h| h.to_string());
                format!("x{} in [{},{})", i, lo, hi_text)
            })
            .collect();
        parts.join(" ; ")
    }
}

impl std::fmt::Debug for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Cell({})", self.render())
    }
}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> Ordering {
        self.render().cmp(&other.render())
    }
}

/// A finite union of cells, kept sorted (by rendered constraints), free of
/// empty cells, and pruned of interval-wise subsumed cells.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    cells: Vec<Cell>,
}

impl CellSet {
    pub fn empty() -> CellSet {
        CellSet { cells: Vec::new() }
    }

    pub fn whole() -> CellSet {
        CellSet::from_cells(vec![Cell::whole()])
    }

    pub fn from_cells(cells: Vec<Cell>) -> CellSet {
        let mut kept: Vec<Cell> = cells.into_iter().filter(|c| !c.is_empty()).collect();
        kept.sort();
        kept.dedup();
        // distinct cells cannot contain each other mutually, so this keeps
        // exactly the maximal ones
        let mut pruned: Vec<Cell> = Vec::new();
        for (i, c) in kept.iter().enumerate() {
            let subsumed = kept
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && c.contained_in(other));
            if !subsumed {
                pruned.push(c.clone());
            }
        }
        CellSet { cells: pruned }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn union(&self, other: &CellSet) -> CellSet {
        let mut cells = self.cells.clone();
        cells.extend(other.cells.iter().cloned());
        CellSet::from_cells(cells)
    }

    pub fn intersect(&self, other: &CellSet) -> CellSet {
        let mut cells = Vec::new();
        for a in &self.cells {
            for b in &other.cells {
                if let Some(c) = a.intersect(b) {
                    cells.push(c);
                }
            }
        }
        CellSet::from_cells(cells)
    }

    pub fn complement(&self) -> CellSet {
        let mut acc = CellSet::whole();
        for cell in &self.cells {
            let parts = CellSet::from_cells(cell.complement_cells());
            acc = acc.intersect(&parts);
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn difference(&self, other: &CellSet) -> CellSet {
        self.intersect(&other.complement())
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn equals(&self, other: &CellSet) -> bool {
        self.difference(other).is_empty() && other.difference(self).is_empty()
    }

    pub fn contains_coords(&self, coords: &[Ordinal]) -> bool {
        self.cells.iter().any(|c| c.contains_coords(coords))
    }

    /// The minimal point of the first nonempty cell in cell order.
    pub fn min_point(&self) -> Option<Vec<Ordinal>> {
        self.cells.iter().find_map(|c| c.min_point())
    }

    /// The least main-axis index in the set, taken over all cells.
    pub fn min_axis_index(&self) -> Option<Ordinal> {
        self.cells.iter().filter_map(|c| c.min_axis_index()).min()
    }

    pub fn render_lines(&self) -> Vec<String> {
        self.cells.iter().map(|c| c.render()).collect()
    }
}
