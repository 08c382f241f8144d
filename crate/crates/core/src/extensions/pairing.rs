//! Path-pairing states for constant signed jumps.
//!
//! A legal cover of the path `0..n` (edges `i -> i + s` that do not wrap) is
//! a union of closed cycles and open paths whose endpoints sit in the
//! boundary windows. The state keeps each open path as a `(start, end)` slot
//! pair, which is enough to tell when a later edge closes a cycle.
//!
//! Slots: `Left(i)` is vertex `i`, `Right(j)` is vertex `n - 1 - j`. With
//! `s⁺` the largest nonnegative jump and `s⁻` the largest magnitude of a
//! negative one, `Left(i)` may lack an in-edge iff `i < s⁺` and an out-edge
//! iff `i < s⁻`; `Right(j)` may lack an out-edge iff `j < s⁺` and an in-edge
//! iff `j < s⁻`.

use std::fmt;

use crate::error::{Error, Result};
use crate::spec::{CirculantSpec, Mode as SpecMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Left(u8),
    Right(u8),
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Left(i) => write!(f, "L{i}"),
            Slot::Right(j) => write!(f, "R{j}"),
        }
    }
}

/// What the walk is counting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Walk {
    /// Every cycle cover; closed cycles are tallied.
    Covers,
    /// Legal tours only: no closed cycle while paths remain open.
    Tours,
}

/// Open paths as sorted `(start, end)` pairs. `done` marks a tour that
/// already closed into a single cycle through every vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairingState {
    pub paths: Vec<(Slot, Slot)>,
    pub done: bool,
}

impl PairingState {
    pub fn new(mut paths: Vec<(Slot, Slot)>) -> Self {
        paths.sort();
        PairingState { paths, done: false }
    }

    pub fn finished() -> Self {
        PairingState {
            paths: Vec::new(),
            done: true,
        }
    }
}

impl fmt::Display for PairingState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.done {
            return f.write_str("{done}");
        }
        let parts: Vec<String> = self.paths.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Jump layout of a signed constant family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub jumps: Vec<i64>,
    pub s_plus: usize,
    pub s_minus: usize,
    /// Slots tracked on each side, `max(s⁺, s⁻)`.
    pub window: usize,
    pub n0: i64,
    /// Whether the jumps were negated because none was positive or zero.
    pub mirrored: bool,
}

impl Frame {
    /// Raw constant jumps; cycle statistics are not shift invariant, so no
    /// normalization happens here.
    pub fn new(spec: &CirculantSpec) -> Result<Self> {
        if spec.mode() != SpecMode::Constant {
            return Err(Error::Unsupported(
                "cycle statistics are implemented for constant jumps only".into(),
            ));
        }
        let mut jumps: Vec<i64> = spec.jumps().iter().map(|j| j.offset).collect();
        let mirrored = jumps.iter().all(|&s| s < 0);
        if mirrored {
            jumps.iter_mut().for_each(|s| *s = -*s);
        }
        jumps.sort_unstable();
        let s_plus = jumps.iter().filter(|&&s| s >= 0).max().copied().unwrap_or(0) as usize;
        let s_minus = jumps.iter().filter(|&&s| s < 0).map(|s| -s).max().unwrap_or(0) as usize;
        if s_plus.max(s_minus) > 60 {
            return Err(Error::Unsupported("jump magnitudes above 60".into()));
        }
        Ok(Frame {
            window: s_plus.max(s_minus),
            n0: (2 * (s_plus + s_minus) as i64).max(1),
            jumps,
            s_plus,
            s_minus,
            mirrored,
        })
    }

    pub fn may_lack_in(&self, slot: Slot) -> bool {
        match slot {
            Slot::Left(i) => (i as usize) < self.s_plus,
            Slot::Right(j) => (j as usize) < self.s_minus,
        }
    }

    pub fn may_lack_out(&self, slot: Slot) -> bool {
        match slot {
            Slot::Left(i) => (i as usize) < self.s_minus,
            Slot::Right(j) => (j as usize) < self.s_plus,
        }
    }

    /// Slot of vertex `v` in the path `0..n`, if it is a boundary vertex.
    pub fn slot_of(&self, v: usize, n: usize) -> Option<Slot> {
        if v < self.window {
            Some(Slot::Left(v as u8))
        } else if v + self.window >= n {
            Some(Slot::Right((n - 1 - v) as u8))
        } else {
            None
        }
    }

    /// Wrap-around edges as `(tail, head)` slot pairs.
    pub fn hook_edges(&self) -> Vec<(Slot, Slot)> {
        let mut out = Vec::new();
        for &s in &self.jumps {
            if s > 0 {
                for j in 1..=s as u8 {
                    out.push((Slot::Right(j - 1), Slot::Left(s as u8 - j)));
                }
            } else if s < 0 {
                let t = (-s) as u8;
                for i in 0..t {
                    out.push((Slot::Left(i), Slot::Right(t - 1 - i)));
                }
            }
        }
        out
    }
}

/// Result of growing a state by one vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub to: PairingState,
    /// Cycles closed by this step.
    pub closed: u32,
}

fn valid(frame: &Frame, paths: &[(Slot, Slot)]) -> bool {
    paths
        .iter()
        .all(|&(a, b)| frame.may_lack_in(a) && frame.may_lack_out(b))
}

/// All legal ways to add vertex `n` to a cover of `0..n` in state `state`.
///
/// Existing right slots move one step inward and the new vertex becomes
/// `Right(0)`; after the move, jump `s > 0` is an edge `Right(s) -> Right(0)`
/// and jump `-t` an edge `Right(0) -> Right(t)`.
pub fn step(frame: &Frame, state: &PairingState, walk: Walk) -> Vec<Move> {
    if state.done {
        return Vec::new();
    }
    let shifted: Vec<(Slot, Slot)> = state
        .paths
        .iter()
        .map(|&(a, b)| (shift(a), shift(b)))
        .collect();
    let new = Slot::Right(0);
    let mut ins: Vec<Option<u8>> = Vec::new();
    let mut outs: Vec<Option<u8>> = Vec::new();
    if frame.s_minus >= 1 {
        ins.push(None);
    }
    if frame.s_plus >= 1 {
        outs.push(None);
    }
    for &s in &frame.jumps {
        if s > 0 {
            ins.push(Some(s as u8));
        } else if s < 0 {
            outs.push(Some((-s) as u8));
        }
    }
    let mut moves = Vec::new();
    let mut emit = |paths: Vec<(Slot, Slot)>, closed: u32| {
        if !valid(frame, &paths) {
            return;
        }
        if walk == Walk::Tours && closed > 0 {
            if !paths.is_empty() {
                return;
            }
            moves.push(Move {
                to: PairingState::finished(),
                closed,
            });
            return;
        }
        moves.push(Move {
            to: PairingState::new(paths),
            closed,
        });
    };
    if frame.jumps.contains(&0) {
        emit(shifted.clone(), 1);
    }
    for &i in &ins {
        for &o in &outs {
            let mut paths = shifted.clone();
            paths.push((new, new));
            if let Some(s) = i {
                let Some(p) = paths.iter().position(|&(_, b)| b == Slot::Right(s)) else {
                    continue;
                };
                let start = paths[p].0;
                paths.retain(|&(_, b)| b != Slot::Right(s) && b != new);
                paths.push((start, new));
            }
            let mut closed = 0;
            if let Some(t) = o {
                let target = Slot::Right(t);
                let Some(q) = paths.iter().position(|&(a, _)| a == target) else {
                    continue;
                };
                let tail = paths.iter().position(|&(_, b)| b == new).expect("new vertex ends a path");
                if q == tail {
                    paths.remove(q);
                    closed = 1;
                } else {
                    let (start, _) = paths[tail];
                    let (_, end) = paths[q];
                    let (hi, lo) = if q > tail { (q, tail) } else { (tail, q) };
                    paths.remove(hi);
                    paths.remove(lo);
                    paths.push((start, end));
                }
            }
            emit(paths, closed);
        }
    }
    moves
}

fn shift(slot: Slot) -> Slot {
    match slot {
        Slot::Right(j) => Slot::Right(j + 1),
        left => left,
    }
}

/// Orbit counts of every way to close the open paths with hook edges.
pub fn completions(frame: &Frame, state: &PairingState) -> Vec<usize> {
    if state.done {
        return vec![0];
    }
    let hooks = frame.hook_edges();
    let paths = &state.paths;
    let k = paths.len();
    // successor[p] = path whose start receives the hook edge leaving p's end
    let mut succ = vec![usize::MAX; k];
    let mut taken = vec![false; k];
    let mut out = Vec::new();
    fn rec(
        p: usize,
        paths: &[(Slot, Slot)],
        hooks: &[(Slot, Slot)],
        succ: &mut Vec<usize>,
        taken: &mut Vec<bool>,
        out: &mut Vec<usize>,
    ) {
        if p == paths.len() {
            out.push(orbit_count(succ));
            return;
        }
        let end = paths[p].1;
        for &(tail, head) in hooks {
            if tail != end {
                continue;
            }
            if let Some(q) = paths.iter().position(|&(a, _)| a == head) {
                if !taken[q] {
                    taken[q] = true;
                    succ[p] = q;
                    rec(p + 1, paths, hooks, succ, taken, out);
                    taken[q] = false;
                }
            }
        }
    }
    rec(0, paths, &hooks, &mut succ, &mut taken, &mut out);
    out
}

fn orbit_count(succ: &[usize]) -> usize {
    let mut seen = vec![false; succ.len()];
    let mut count = 0;
    for s in 0..succ.len() {
        if seen[s] {
            continue;
        }
        count += 1;
        let mut v = s;
        while !seen[v] {
            seen[v] = true;
            v = succ[v];
        }
    }
    count
}

/// A legal cover of `0..n`, described by its state and closed cycles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snapshot {
    pub state: PairingState,
    pub closed: u32,
}

/// State of the cover given by `succ` (out-neighbour of each vertex, if any)
/// on the path `0..n`, or `None` if the cover is not legal.
pub fn snapshot(frame: &Frame, succ: &[Option<usize>]) -> Option<Snapshot> {
    let n = succ.len();
    let mut pred = vec![None; n];
    for (v, s) in succ.iter().enumerate() {
        if let Some(h) = *s {
            if pred[h].is_some() {
                return None;
            }
            pred[h] = Some(v);
        }
    }
    let mut seen = vec![false; n];
    let mut paths = Vec::new();
    for v in 0..n {
        if pred[v].is_some() {
            continue;
        }
        let mut end = v;
        seen[v] = true;
        while let Some(h) = succ[end] {
            end = h;
            seen[h] = true;
        }
        let (a, b) = (frame.slot_of(v, n)?, frame.slot_of(end, n)?);
        if !frame.may_lack_in(a) || !frame.may_lack_out(b) {
            return None;
        }
        paths.push((a, b));
    }
    let mut closed = 0;
    for v in 0..n {
        if seen[v] {
            continue;
        }
        closed += 1;
        let mut w = v;
        while !seen[w] {
            seen[w] = true;
            w = succ[w]?;
        }
    }
    Some(Snapshot {
        state: PairingState::new(paths),
        closed,
    })
}

/// Every legal cover of the path `0..n`.
pub fn legal_covers(frame: &Frame, n: usize, mut visit: impl FnMut(Snapshot)) {
    let mut succ: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn rec(
        frame: &Frame,
        v: usize,
        succ: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(Snapshot),
    ) {
        let n = succ.len();
        if v == n {
            if let Some(s) = snapshot(frame, succ) {
                visit(s);
            }
            return;
        }
        let lack_ok = frame.slot_of(v, n).is_some_and(|s| frame.may_lack_out(s));
        if lack_ok {
            succ[v] = None;
            rec(frame, v + 1, succ, used, visit);
        }
        for &s in &frame.jumps {
            let h = v as i64 + s;
            if h < 0 || h >= n as i64 || used[h as usize] {
                continue;
            }
            used[h as usize] = true;
            succ[v] = Some(h as usize);
            rec(frame, v + 1, succ, used, visit);
            used[h as usize] = false;
        }
        succ[v] = None;
    }
    rec(frame, 0, &mut succ, &mut used, &mut visit);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(j: &[i64]) -> Frame {
        Frame::new(&CirculantSpec::constant(j).unwrap()).unwrap()
    }

    #[test]
    fn windows_and_hooks() {
        let f = frame(&[-1, 0, 1]);
        assert_eq!((f.s_plus, f.s_minus, f.window, f.n0), (1, 1, 1, 4));
        assert_eq!(
            f.hook_edges(),
            vec![(Slot::Left(0), Slot::Right(0)), (Slot::Right(0), Slot::Left(0))]
        );
        let g = frame(&[0, 1, 2]);
        assert_eq!(g.hook_edges().len(), 3);
        assert!(frame(&[-2, -1]).mirrored);
    }

    #[test]
    fn step_never_grows_without_in_edge() {
        // no negative jump: the new vertex must take an in-edge
        let f = frame(&[1, 2]);
        let st = PairingState::new(vec![]);
        assert!(step(&f, &st, Walk::Covers).is_empty());
    }

    #[test]
    fn tours_reject_early_cycles() {
        let f = frame(&[0, 1, 2]);
        let st = PairingState::new(vec![(Slot::Left(0), Slot::Right(0))]);
        for m in step(&f, &st, Walk::Tours) {
            assert_eq!(m.closed, 0);
        }
        assert!(step(&f, &st, Walk::Covers).iter().any(|m| m.closed == 1));
    }

    #[test]
    fn completion_orbits() {
        let f = frame(&[-1, 0, 1]);
        let st = PairingState::new(vec![(Slot::Left(0), Slot::Left(0)), (Slot::Right(0), Slot::Right(0))]);
        assert_eq!(completions(&f, &st), vec![1]);
        assert_eq!(completions(&f, &PairingState::new(vec![])), vec![0]);
    }
}
