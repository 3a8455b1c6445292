//! Brute-force certification: discretized search over bang-singular control
//! words, independent of the planner's closed-form solvers.
//!
//! Optimal controls only take values in `{-U_max, 0, U_max}`, so the search
//! space is words over `{L, R, G}`. The oracle deliberately searches a
//! strictly larger family than the planner returns (up to three segments, so
//! turn-arc-turn and turn-turn-turn words are included): a defect in the
//! solvers would show up as the oracle beating the planner by more than the
//! grid resolution bound.
//!
//! For a word of `k` segments the first `k-1` angles run over a uniform
//! lattice; the last angle is the exact minimum-length feasible angle on the
//! final segment's circle (a closed-form arc intersection), which dominates
//! every lattice choice of that angle. Feasible minima are then refined by
//! per-coordinate minimum-feasible-angle sweeps. The reported length is
//! within `max_segments * angle_step * max(1, r)` of the true optimum over
//! the searched word family.
//!
//! Grid blocks are embarrassingly parallel; with the `parallel` feature they
//! run on the rayon pool. Selection reduces with a total order (length, then
//! lexicographic word, then angles), so the result is bit-identical to the
//! sequential implementation regardless of schedule.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::TAU;
use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::geometry::{rotation_for, Configuration, Segment, SegmentType, TurnRadius};
use crate::tolerances::TOL;
use crate::{Error, Result};

/// Discretization of the oracle search.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    /// Longest control word searched (1 to 3).
    pub max_segments: usize,
    /// Lattice spacing for segment angles, radians.
    pub angle_step: f64,
    /// Refinement sweeps stop when no angle moves by more than this.
    pub refine_tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            max_segments: 3,
            angle_step: TAU / 2000.0,
            refine_tol: 1e-10,
        }
    }
}

impl GridSpec {
    /// Certified optimality gap of the reported length relative to the true
    /// optimum over the searched word family.
    pub fn resolution_bound(&self, r: TurnRadius) -> f64 {
        self.max_segments as f64 * self.angle_step * r.get().max(1.0)
    }

    /// Largest endpoint mismatch accepted as "reaching" the target, implied
    /// by the lattice spacing: snapping the first `max_segments - 1` angles
    /// of a true optimum onto the lattice displaces the endpoint by at most
    /// half a step each (the final angle is solved exactly, not snapped).
    pub fn chord_tolerance(&self, r: TurnRadius) -> f64 {
        0.5 * (self.max_segments - 1).max(1) as f64 * self.angle_step * r.get().max(1.0)
    }

    fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.max_segments) {
            return Err(Error::InvalidParameter(format!(
                "max_segments must be in 1..=3: got {}",
                self.max_segments
            )));
        }
        if !(self.angle_step.is_finite() && self.angle_step > 0.0 && self.angle_step < TAU) {
            return Err(Error::InvalidParameter(format!(
                "angle_step must be in (0, 2*pi): got {}",
                self.angle_step
            )));
        }
        if !(self.refine_tol.is_finite() && self.refine_tol > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "refine_tol must be > 0: got {}",
                self.refine_tol
            )));
        }
        Ok(())
    }

    fn lattice_steps(&self) -> usize {
        (TAU / self.angle_step).ceil() as usize
    }
}

/// Best discretized path found by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct OraclePath {
    pub word: Vec<SegmentType>,
    pub angles: Vec<f64>,
    pub length: f64,
    /// Endpoint mismatch; never exceeds the chord tolerance.
    pub residual: f64,
    /// Length of the best raw lattice point, before refinement.
    pub grid_length: f64,
}

impl OraclePath {
    /// The path as validated segments (zero angles dropped).
    pub fn segments(&self) -> Vec<Segment> {
        self.word
            .iter()
            .zip(&self.angles)
            .filter(|(_, &a)| a > 0.0)
            .map(|(&ty, &a)| Segment::new(ty, a).expect("oracle angles are in range"))
            .collect()
    }
}

/// Outcome of an oracle search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    /// `None` means no word reaches the target at this resolution (distinct
    /// from an error).
    pub best: Option<OraclePath>,
    pub resolution_bound: f64,
    pub chord_tolerance: f64,
}

const TYPE_COUNT: usize = 3;

fn type_index(ty: SegmentType) -> usize {
    match ty {
        SegmentType::L => 0,
        SegmentType::R => 1,
        SegmentType::G => 2,
    }
}

struct SearchContext {
    target: Vector3<f64>,
    r: TurnRadius,
    /// Feasibility gate in inner-product form: unit endpoint `y` reaches the
    /// unit target `t` within the chord tolerance iff `<y, t> >= cos_gate`.
    cos_gate: f64,
    steps: usize,
    step: f64,
    /// Transposed segment rotations at every lattice angle, per type.
    transposed: [Vec<Matrix3<f64>>; TYPE_COUNT],
    radius: [f64; TYPE_COUNT],
    axis: [Vector3<f64>; TYPE_COUNT],
    /// Decomposition of e1 relative to each axis: e1 = axis*<axis,e1> +
    /// radial, with tangential = axis x e1 completing the circle frame.
    radial: [Vector3<f64>; TYPE_COUNT],
    tangential: [Vector3<f64>; TYPE_COUNT],
    axial_component: [f64; TYPE_COUNT],
}

impl SearchContext {
    fn new(target: Vector3<f64>, r: TurnRadius, grid: &GridSpec) -> Self {
        let steps = grid.lattice_steps();
        let step = grid.angle_step;
        // The internal gate sits fractionally inside the reported chord
        // tolerance so boundary solutions still satisfy it after rounding.
        let chord = grid.chord_tolerance(r) * (1.0 - 1e-9);
        let e1 = Vector3::x();

        let mut transposed: [Vec<Matrix3<f64>>; TYPE_COUNT] = Default::default();
        let mut radius = [0.0; TYPE_COUNT];
        let mut axis = [Vector3::zeros(); TYPE_COUNT];
        let mut radial = [Vector3::zeros(); TYPE_COUNT];
        let mut tangential = [Vector3::zeros(); TYPE_COUNT];
        let mut axial_component = [0.0; TYPE_COUNT];
        for ty in SegmentType::ALL {
            let i = type_index(ty);
            transposed[i] = (0..steps)
                .map(|k| rotation_for(ty, r, k as f64 * step).transpose())
                .collect();
            radius[i] = ty.radius(r);
            let k = ty.unit_axis(r);
            axis[i] = k;
            axial_component[i] = k.dot(&e1);
            radial[i] = e1 - k * axial_component[i];
            tangential[i] = k.cross(&e1);
        }

        SearchContext {
            target,
            r,
            cos_gate: 1.0 - 0.5 * chord * chord,
            steps,
            step,
            transposed,
            radius,
            axis,
            radial,
            tangential,
            axial_component,
        }
    }
}

/// Minimum angle in [0, 2*pi) for which `a cos + b sin + c0 >= cos_gate`;
/// `None` when the whole circle misses the gate.
#[inline]
fn min_angle_on_arc(a: f64, b: f64, c0: f64, cos_gate: f64) -> Option<f64> {
    let h = cos_gate - c0;
    let m2 = a * a + b * b;
    // Squared comparisons keep the common infeasible case sqrt-free.
    if h > 0.0 && h * h > m2 {
        return None;
    }
    if h <= 0.0 && h * h >= m2 {
        return Some(0.0);
    }
    let m = m2.sqrt();
    let delta = (h / m).clamp(-1.0, 1.0).acos();
    let mut lo = (b.atan2(a) - delta) % TAU;
    if lo < 0.0 {
        lo += TAU;
    }
    if lo + 2.0 * delta >= TAU {
        // The feasible arc wraps through zero.
        Some(0.0)
    } else {
        Some(lo)
    }
}

/// Minimum-length feasible final angle: the final segment starts at the
/// frame reached by the prefix, so its endpoint circle is the type's circle
/// through e1 and the target pulled back by the prefix is `t`.
#[inline]
fn final_angle(ctx: &SearchContext, ty: usize, t: &Vector3<f64>) -> Option<f64> {
    let a = ctx.radial[ty].dot(t);
    let b = ctx.tangential[ty].dot(t);
    let c0 = ctx.axial_component[ty] * ctx.axis[ty].dot(t);
    min_angle_on_arc(a, b, c0, ctx.cos_gate)
}

/// A lattice candidate: fixed-size angle storage (unused entries zero).
#[derive(Debug, Clone, Copy, PartialEq)]
struct GridCandidate {
    angles: [f64; 3],
    length: f64,
}

fn better(a: &GridCandidate, b: &GridCandidate) -> bool {
    (a.length, a.angles) < (b.length, b.angles)
}

fn merge(slot: &mut Option<GridCandidate>, candidate: Option<GridCandidate>) {
    if let Some(c) = candidate {
        match slot {
            Some(cur) if !better(&c, cur) => {}
            _ => *slot = Some(c),
        }
    }
}

/// Scans one block of the prefix lattice for one word. Pruning only consults
/// block-local state, so the per-block result is independent of scheduling.
fn scan_block(ctx: &SearchContext, word: &[SegmentType], block: Range<usize>) -> Option<GridCandidate> {
    let mut best: Option<GridCandidate> = None;
    match word.len() {
        1 => {
            let ty = type_index(word[0]);
            if let Some(phi) = final_angle(ctx, ty, &ctx.target) {
                merge(
                    &mut best,
                    Some(GridCandidate {
                        angles: [phi, 0.0, 0.0],
                        length: ctx.radius[ty] * phi,
                    }),
                );
            }
        }
        2 => {
            let (t0, t1) = (type_index(word[0]), type_index(word[1]));
            for i1 in block {
                let phi1 = i1 as f64 * ctx.step;
                let prefix = ctx.radius[t0] * phi1;
                if best.is_some_and(|b| prefix >= b.length) {
                    break;
                }
                let v1 = ctx.transposed[t0][i1] * ctx.target;
                if let Some(phi2) = final_angle(ctx, t1, &v1) {
                    merge(
                        &mut best,
                        Some(GridCandidate {
                            angles: [phi1, phi2, 0.0],
                            length: prefix + ctx.radius[t1] * phi2,
                        }),
                    );
                }
            }
        }
        3 => {
            let (t0, t1, t2) = (
                type_index(word[0]),
                type_index(word[1]),
                type_index(word[2]),
            );
            for i1 in block {
                let phi1 = i1 as f64 * ctx.step;
                let len1 = ctx.radius[t0] * phi1;
                if best.is_some_and(|b| len1 >= b.length) {
                    break;
                }
                let v1 = ctx.transposed[t0][i1] * ctx.target;
                for i2 in 0..ctx.steps {
                    let phi2 = i2 as f64 * ctx.step;
                    let prefix = len1 + ctx.radius[t1] * phi2;
                    if best.is_some_and(|b| prefix >= b.length) {
                        break;
                    }
                    let v2 = ctx.transposed[t1][i2] * v1;
                    if let Some(phi3) = final_angle(ctx, t2, &v2) {
                        merge(
                            &mut best,
                            Some(GridCandidate {
                                angles: [phi1, phi2, phi3],
                                length: prefix + ctx.radius[t2] * phi3,
                            }),
                        );
                    }
                }
            }
        }
        _ => unreachable!("words are 1..=3 segments"),
    }
    best
}

/// Per-coordinate minimum-feasible-angle sweeps. Each step can only shrink
/// an angle (the current value is feasible), so the refined length never
/// exceeds the lattice length.
fn refine(ctx: &SearchContext, word: &[SegmentType], start: [f64; 3], refine_tol: f64) -> ([f64; 3], f64) {
    let k = word.len();
    let mut angles = start;
    for _ in 0..100 {
        let mut max_delta: f64 = 0.0;
        for i in 0..k {
            let mut before = Matrix3::identity();
            for j in 0..i {
                before *= rotation_for(word[j], ctx.r, angles[j]);
            }
            let mut after = Matrix3::identity();
            for j in (i + 1)..k {
                after *= rotation_for(word[j], ctx.r, angles[j]);
            }
            let w = after.column(0).into_owned();
            let t = before.transpose() * ctx.target;
            let axis = ctx.axis[type_index(word[i])];
            let axial = axis.dot(&w);
            let radial = w - axis * axial;
            let tangential = axis.cross(&w);
            if let Some(new_angle) = min_angle_on_arc(
                radial.dot(&t),
                tangential.dot(&t),
                axial * axis.dot(&t),
                ctx.cos_gate,
            ) {
                let clamped = new_angle.min(angles[i]);
                max_delta = max_delta.max(angles[i] - clamped);
                angles[i] = clamped;
            }
        }
        if max_delta < refine_tol {
            break;
        }
    }
    let length = (0..k)
        .map(|i| ctx.radius[type_index(word[i])] * angles[i])
        .sum();
    (angles, length)
}

/// All control words of 1..=max segments with no immediate repetition, in
/// deterministic order (length-major, then lexicographic).
fn control_words(max_segments: usize) -> Vec<Vec<SegmentType>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<SegmentType>> = vec![Vec::new()];
    for _ in 0..max_segments {
        let mut next = Vec::new();
        for word in &frontier {
            for ty in SegmentType::ALL {
                if word.last() == Some(&ty) {
                    continue;
                }
                let mut w = word.clone();
                w.push(ty);
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[derive(Debug, Clone)]
struct Task {
    word_idx: usize,
    block: Range<usize>,
}

fn build_tasks(words: &[Vec<SegmentType>], steps: usize) -> Vec<Task> {
    // Block sizes chosen so three-segment words split into many tasks (they
    // dominate the work) while short words stay single tasks.
    let mut tasks = Vec::new();
    for (word_idx, word) in words.iter().enumerate() {
        let block_size = match word.len() {
            1 => steps.max(1),
            2 => 512,
            _ => 16,
        };
        let mut start = 0;
        while start < steps {
            let end = (start + block_size).min(steps);
            tasks.push(Task {
                word_idx,
                block: start..end,
            });
            start = end;
        }
    }
    tasks
}

fn endpoint_of(ctx: &SearchContext, word: &[SegmentType], angles: &[f64; 3]) -> Vector3<f64> {
    let mut m = Matrix3::identity();
    for (i, &ty) in word.iter().enumerate() {
        m *= rotation_for(ty, ctx.r, angles[i]);
    }
    m.column(0).into_owned()
}

fn finalize(
    ctx: &SearchContext,
    grid: &GridSpec,
    words: &[Vec<SegmentType>],
    word_bests: Vec<Option<GridCandidate>>,
) -> OracleResult {
    let chord = grid.chord_tolerance(ctx.r);

    // (length, word, angles) totally orders candidates; the empty word wins
    // exactly when the target is already within the chord tolerance.
    let mut best: Option<(f64, Vec<SegmentType>, [f64; 3], f64)> = None;
    if (ctx.target - Vector3::x()).norm() <= chord {
        best = Some((0.0, Vec::new(), [0.0; 3], 0.0));
    }

    for (word_idx, slot) in word_bests.iter().enumerate() {
        let Some(grid_best) = slot else { continue };
        let word = &words[word_idx];
        let (angles, length) = refine(ctx, word, grid_best.angles, grid.refine_tol);
        let replace = match &best {
            None => true,
            Some((blen, bword, bangles, _)) => (length, word, &angles) < (*blen, bword, bangles),
        };
        if replace {
            best = Some((length, word.clone(), angles, grid_best.length));
        }
    }

    let best = best.map(|(length, word, angles, grid_length)| {
        let residual = (endpoint_of(ctx, &word, &angles) - ctx.target).norm();
        let angles = word.iter().enumerate().map(|(i, _)| angles[i]).collect();
        OraclePath {
            word,
            angles,
            length,
            residual,
            grid_length,
        }
    });

    OracleResult {
        best,
        resolution_bound: grid.resolution_bound(ctx.r),
        chord_tolerance: chord,
    }
}

fn prepare(
    r0: &Configuration,
    x_f: &Vector3<f64>,
    r: TurnRadius,
    grid: &GridSpec,
) -> Result<(SearchContext, Vec<Vec<SegmentType>>, Vec<Task>)> {
    grid.validate()?;
    let norm = x_f.norm();
    if (norm - 1.0).abs() > TOL.unit_vector {
        return Err(Error::NotUnit {
            norm,
            tol: TOL.unit_vector,
        });
    }
    let target = (r0.matrix().transpose() * x_f).normalize();
    let ctx = SearchContext::new(target, r, grid);
    let words = control_words(grid.max_segments);
    let tasks = build_tasks(&words, ctx.steps);
    Ok((ctx, words, tasks))
}

/// Sequential oracle search; always available and bit-identical to the
/// parallel implementation.
pub fn search_sequential(
    r0: &Configuration,
    x_f: &Vector3<f64>,
    r: TurnRadius,
    grid: &GridSpec,
) -> Result<OracleResult> {
    let (ctx, words, tasks) = prepare(r0, x_f, r, grid)?;
    let mut word_bests: Vec<Option<GridCandidate>> = vec![None; words.len()];
    for task in &tasks {
        let found = scan_block(&ctx, &words[task.word_idx], task.block.clone());
        merge(&mut word_bests[task.word_idx], found);
    }
    Ok(finalize(&ctx, grid, &words, word_bests))
}

/// Parallel oracle search over the rayon pool. The grid blocks are pure and
/// the reduction is a total-order minimum, so the result does not depend on
/// the schedule.
#[cfg(feature = "parallel")]
pub fn search_parallel(
    r0: &Configuration,
    x_f: &Vector3<f64>,
    r: TurnRadius,
    grid: &GridSpec,
) -> Result<OracleResult> {
    let (ctx, words, tasks) = prepare(r0, x_f, r, grid)?;
    let found: Vec<(usize, Option<GridCandidate>)> = tasks
        .par_iter()
        .map(|task| {
            (
                task.word_idx,
                scan_block(&ctx, &words[task.word_idx], task.block.clone()),
            )
        })
        .collect();
    let mut word_bests: Vec<Option<GridCandidate>> = vec![None; words.len()];
    for (word_idx, candidate) in found {
        merge(&mut word_bests[word_idx], candidate);
    }
    Ok(finalize(&ctx, grid, &words, word_bests))
}

/// Oracle search: grid search over control words of up to
/// `grid.max_segments` segments, then local refinement of feasible minima.
///
/// Uses the rayon pool when the `parallel` feature is enabled (default).
pub fn search(
    r0: &Configuration,
    x_f: &Vector3<f64>,
    r: TurnRadius,
    grid: &GridSpec,
) -> Result<OracleResult> {
    #[cfg(feature = "parallel")]
    {
        search_parallel(r0, x_f, r, grid)
    }
    #[cfg(not(feature = "parallel"))]
    {
        search_sequential(r0, x_f, r, grid)
    }
}
