//! Convergence of interval evaluation on shrinking boxes, and range
//! enclosure by subdivision.
//!
//! Box monotonicity makes the evaluated intervals of a nested box sequence
//! nested; continuity of every operation at the target makes their widths go
//! to zero. [`check_convergence`] observes both on a finite prefix of such a
//! sequence. [`subdivide_enclosure`] uses the same monotonicity to tighten a
//! range enclosure by bisection.

use thiserror::Error;

use crate::interval::{Interval, IntervalBox};
use crate::semantics::{Compiled, EvalError, Interpretation, RealResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("target point is not inside the box")]
    TargetOutsideBox,
    #[error("box must be bounded")]
    Unbounded,
    #[error("box must be non-empty")]
    EmptyBox,
    #[error("coordinate {0} cannot be bisected (empty, unbounded or degenerate)")]
    NotBisectable(usize),
    #[error("coordinate {0} out of range")]
    NoSuchCoordinate(usize),
    #[error("expression is undefined at the target point")]
    UndefinedAtTarget,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Nested boxes shrinking onto `target`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementSequence {
    boxes: Vec<IntervalBox>,
    target: Vec<f64>,
}

impl RefinementSequence {
    pub fn boxes(&self) -> &[IntervalBox] {
        &self.boxes
    }

    pub fn target(&self) -> &[f64] {
        &self.target
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnclosureReport {
    /// Last evaluated interval (refinement) or hull over leaves (subdivision).
    pub enclosure: Interval,
    pub widths: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// False when some evaluated interval was not inside its predecessor.
    pub nested: bool,
}

/// Halve one coordinate around `a`, clamped so that `a` stays inside and the
/// result stays inside `[lo, hi]`.
fn halve_toward(lo: f64, hi: f64, a: f64) -> (f64, f64) {
    let w = hi / 2.0 - lo / 2.0;
    let new_lo = (a - w / 2.0).max(lo).min(hi - w).max(lo).min(a);
    let new_hi = (new_lo + w).min(hi).max(a);
    (new_lo, new_hi)
}

/// Builds `steps + 1` nested boxes starting at `box0`, each halving every
/// coordinate toward `a`.
pub fn refine_toward(box0: &IntervalBox, a: &[f64], steps: usize) -> Result<RefinementSequence, AnalysisError> {
    if box0.is_empty() {
        return Err(AnalysisError::EmptyBox);
    }
    if !box0.is_bounded() {
        return Err(AnalysisError::Unbounded);
    }
    if !box0.contains(a) {
        return Err(AnalysisError::TargetOutsideBox);
    }
    let mut boxes = Vec::with_capacity(steps + 1);
    boxes.push(box0.clone());
    for _ in 0..steps {
        let last = boxes.last().expect("non-empty");
        let next = last
            .dims()
            .iter()
            .zip(a)
            .map(|(iv, &x)| {
                let (lo, hi) = iv.bounds().expect("non-empty");
                let (nl, nh) = halve_toward(lo, hi, x);
                Interval::new(nl, nh).expect("ordered bounds")
            })
            .collect();
        boxes.push(next);
    }
    Ok(RefinementSequence { boxes, target: a.to_vec() })
}

/// Evaluates `compiled` on every box of `seq` and reports widths,
/// nestedness, and whether the point value stays inside every interval.
///
/// `converged` holds iff the final width is at most `tol`, the real value at
/// the target lies in every evaluated interval, and the intervals are nested.
pub fn check_convergence(
    compiled: &Compiled,
    interp: &Interpretation,
    seq: &RefinementSequence,
    tol: f64,
) -> Result<EnclosureReport, AnalysisError> {
    let value = match compiled.eval_real(interp, &seq.target)? {
        RealResult::Defined(v) => v,
        RealResult::Undefined => return Err(AnalysisError::UndefinedAtTarget),
    };
    let mut widths = Vec::with_capacity(seq.boxes.len());
    let mut nested = true;
    let mut contains_value = true;
    let mut prev: Option<Interval> = None;
    for b in &seq.boxes {
        let iv = compiled.eval_interval(interp, b)?;
        widths.push(iv.width());
        contains_value &= iv.contains(value);
        if let Some(p) = prev {
            nested &= iv.is_subset(&p);
        }
        prev = Some(iv);
    }
    let enclosure = prev.expect("sequence holds box0");
    let final_width = *widths.last().expect("non-empty");
    Ok(EnclosureReport {
        enclosure,
        iterations: seq.boxes.len() - 1,
        converged: final_width <= tol && contains_value && nested,
        nested,
        widths,
    })
}

/// Splits coordinate `coord` at its rounded midpoint.
pub fn bisect(b: &IntervalBox, coord: usize) -> Result<(IntervalBox, IntervalBox), AnalysisError> {
    let iv = *b.dims().get(coord).ok_or(AnalysisError::NoSuchCoordinate(coord))?;
    if b.is_empty() {
        return Err(AnalysisError::EmptyBox);
    }
    let (lo, hi) = iv.bounds().ok_or(AnalysisError::NotBisectable(coord))?;
    if lo == hi {
        return Err(AnalysisError::NotBisectable(coord));
    }
    let mid = iv.midpoint().map_err(|_| AnalysisError::NotBisectable(coord))?;
    let mut left = b.dims().to_vec();
    let mut right = left.clone();
    left[coord] = Interval::new(lo, mid).expect("lo <= mid");
    right[coord] = Interval::new(mid, hi).expect("mid <= hi");
    Ok((IntervalBox::new(left), IntervalBox::new(right)))
}

#[derive(Clone, Debug)]
struct Leaf {
    bx: IntervalBox,
    value: Interval,
    /// Real value at the box midpoint, when defined.
    sample: Option<f64>,
    splittable: bool,
}

impl Leaf {
    fn new(compiled: &Compiled, interp: &Interpretation, bx: IntervalBox) -> Result<Leaf, AnalysisError> {
        let value = compiled.eval_interval(interp, &bx)?;
        let mid: Vec<f64> = bx.dims().iter().map(|d| d.midpoint().unwrap_or(0.0)).collect();
        let sample = compiled.eval_real(interp, &mid)?.value();
        let splittable = bx.widest().is_some_and(|i| {
            let (lo, hi) = bx[i].bounds().unwrap_or((0.0, 0.0));
            let m = 0.5 * lo + 0.5 * hi;
            lo < m && m < hi
        });
        Ok(Leaf { bx, value, sample, splittable })
    }
}

/// Upper estimate of how much `enclosure` overshoots the true range:
/// the gap between each bound and the nearest sampled real value.
fn overshoot(leaves: &[Leaf], enclosure: &Interval) -> f64 {
    let Some((lo, hi)) = enclosure.bounds() else {
        return 0.0;
    };
    let samples = leaves.iter().filter_map(|l| l.sample);
    let (smin, smax) = samples.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), s| (a.min(s), b.max(s)));
    if smin > smax {
        return f64::INFINITY;
    }
    let gap_lo = if lo == f64::NEG_INFINITY { f64::INFINITY } else { smin - lo };
    let gap_hi = if hi == f64::INFINITY { f64::INFINITY } else { hi - smax };
    gap_lo.max(0.0) + gap_hi.max(0.0)
}

fn hull_of(leaves: &[Leaf]) -> Interval {
    leaves.iter().fold(Interval::EMPTY, |acc, l| acc.hull_union(&l.value))
}

/// Range enclosure of `compiled` over `box0` by repeated bisection.
///
/// The enclosure is the hull of the interval values of the current leaves.
/// While its overshoot (distance from each bound to the nearest sampled
/// midpoint value) exceeds `tol` and fewer than `max_boxes` leaves exist, the
/// leaf that determines the worse bound is bisected along its widest
/// coordinate. Ties go to the earliest leaf, so results are deterministic.
/// `widths` records the enclosure width after every step.
pub fn subdivide_enclosure(
    compiled: &Compiled,
    interp: &Interpretation,
    box0: &IntervalBox,
    tol: f64,
    max_boxes: usize,
) -> Result<EnclosureReport, AnalysisError> {
    if box0.is_empty() {
        return Err(AnalysisError::EmptyBox);
    }
    if !box0.is_bounded() {
        return Err(AnalysisError::Unbounded);
    }
    let mut leaves = vec![Leaf::new(compiled, interp, box0.clone())?];
    let mut enclosure = hull_of(&leaves);
    let mut widths = vec![enclosure.width()];
    let mut iterations = 0;
    let mut converged = overshoot(&leaves, &enclosure) <= tol;
    while !converged && leaves.len() < max_boxes.max(1) {
        let Some((lo, hi)) = enclosure.bounds() else {
            converged = true;
            break;
        };
        let sample_lo = leaves.iter().filter_map(|l| l.sample).fold(f64::INFINITY, f64::min);
        let sample_hi = leaves.iter().filter_map(|l| l.sample).fold(f64::NEG_INFINITY, f64::max);
        let lower_first = (sample_lo - lo) >= (hi - sample_hi);
        let pick = |lower: bool| {
            leaves.iter().position(|l| {
                l.splittable
                    && match l.value.bounds() {
                        Some((a, b)) => (lower && a == lo) || (!lower && b == hi),
                        None => false,
                    }
            })
        };
        let Some(idx) = pick(lower_first).or_else(|| pick(!lower_first)) else {
            break;
        };
        let leaf = leaves.remove(idx);
        let coord = leaf.bx.widest().expect("splittable leaf has a coordinate");
        let (a, b) = bisect(&leaf.bx, coord)?;
        let la = Leaf::new(compiled, interp, a)?;
        let lb = Leaf::new(compiled, interp, b)?;
        // keep a leaf's children where the leaf was, in order
        leaves.insert(idx, lb);
        leaves.insert(idx, la);
        leaves.retain(|l| !l.value.is_empty());
        iterations += 1;
        enclosure = hull_of(&leaves);
        widths.push(enclosure.width());
        converged = overshoot(&leaves, &enclosure) <= tol;
    }
    Ok(EnclosureReport { enclosure, widths, iterations, converged, nested: true })
}
