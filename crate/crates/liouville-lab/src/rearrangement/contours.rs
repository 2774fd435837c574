//! Level-curve extraction: marching squares with linear edge interpolation,
//! chained into closed polylines via canonical edge keys.

use std::collections::{HashMap, HashSet};

use crate::geom::Point;
use crate::grid::GridField;

/// Closed level curves of a field at one level.
#[derive(Debug, Clone)]
pub struct ContourSet {
    /// Closed loops (first vertex repeated at the end), interior of the
    /// superlevel set on the left. Chains that leave the valid grid region
    /// do not close and are not reported.
    pub polylines: Vec<Vec<Point>>,
    /// True when the requested level lies outside the field's value range,
    /// in which case `polylines` is empty.
    pub out_of_range: bool,
}

/// Canonical key for a grid edge: (ix, iy, horizontal?) identifies the edge
/// from node (ix,iy) to node (ix+1,iy) when horizontal, to (ix,iy+1) when
/// vertical. Both cells adjacent to an edge address it by the same key.
type EdgeKey = (u32, u32, bool);

/// A directed level-curve chord across one cell, keyed by the edge it leaves
/// from; the superlevel region lies on its left.
struct Chord {
    end_key: EdgeKey,
    start: Point,
    end: Point,
}

/// Extract the level curves {u = t} as closed polylines, counterclockwise
/// around the superlevel set {u > t}. Saddle cells are resolved by the sign
/// of the corner average, matching the fractional-coverage measure geometry.
/// Levels outside the field range yield an empty set with `out_of_range` set.
pub fn superlevel_contours(field: &GridField, t: f64) -> ContourSet {
    let (lo, hi) = field.min_max();
    if !(t > lo && t < hi) {
        return ContourSet { polylines: Vec::new(), out_of_range: true };
    }

    // Nudge the level off any exact corner hit so every edge carries at most
    // one crossing and the cell-case logic stays unambiguous.
    let osc = hi - lo;
    let mut level = t;
    for attempt in 1..=8 {
        let guard = 1e-12 * osc;
        let hit = field
            .values()
            .iter()
            .zip(field.mask().iter())
            .any(|(v, m)| *m && (*v - level).abs() <= guard);
        if !hit {
            break;
        }
        level = t + attempt as f64 * 3e-12 * osc;
    }

    let n = field.n();
    let mut chords: HashMap<EdgeKey, Chord> = HashMap::new();
    for iy in 0..n - 1 {
        for ix in 0..n - 1 {
            if !(field.masked_in(ix, iy)
                && field.masked_in(ix + 1, iy)
                && field.masked_in(ix + 1, iy + 1)
                && field.masked_in(ix, iy + 1))
            {
                continue;
            }
            let v = [
                field.value(ix, iy),
                field.value(ix + 1, iy),
                field.value(ix + 1, iy + 1),
                field.value(ix, iy + 1),
            ];
            let inside = [v[0] > level, v[1] > level, v[2] > level, v[3] > level];
            let count = inside.iter().filter(|&&b| b).count();
            if count == 0 || count == 4 {
                continue;
            }
            let h = field.h();
            let p0 = field.node_point(ix, iy);
            let pts = [
                p0,
                Point::new(p0.x + h, p0.y),
                Point::new(p0.x + h, p0.y + h),
                Point::new(p0.x, p0.y + h),
            ];
            // Walk-order edge keys: bottom, right, top, left.
            let keys: [EdgeKey; 4] = [
                (ix as u32, iy as u32, true),
                (ix as u32 + 1, iy as u32, false),
                (ix as u32, iy as u32 + 1, true),
                (ix as u32, iy as u32, false),
            ];
            // Crossing events in counterclockwise walk order.
            let mut events: Vec<(usize, bool, Point)> = Vec::with_capacity(4);
            for i in 0..4 {
                let j = (i + 1) % 4;
                if inside[i] != inside[j] {
                    let w = (level - v[i]) / (v[j] - v[i]);
                    let p = pts[i] + (pts[j] - pts[i]) * w.clamp(0.0, 1.0);
                    events.push((i, inside[i], p));
                }
            }
            let saddle = count == 2 && inside[0] == inside[2];
            let connected = 0.25 * (v[0] + v[1] + v[2] + v[3]) > level;
            let m = events.len();
            for (e, &(edge, exiting, p)) in events.iter().enumerate() {
                if !exiting {
                    continue;
                }
                // Each exit chord runs to an entering crossing: the next one
                // around the walk, except across a split saddle, where it
                // stays with its own corner and takes the previous one.
                let partner = if saddle && !connected {
                    (e + m - 1) % m
                } else {
                    (e + 1) % m
                };
                let (pedge, _, q) = events[partner];
                chords.insert(keys[edge], Chord { end_key: keys[pedge], start: p, end: q });
            }
        }
    }

    // Chain chords into loops: follow end-edge keys until returning to the
    // starting edge. Chains that dead-end (the curve left the valid region)
    // are discarded. Keys are walked in sorted order so the loop order — and
    // every float sum taken over it downstream — is reproducible.
    let mut polylines = Vec::new();
    let mut keys: Vec<EdgeKey> = chords.keys().copied().collect();
    keys.sort_unstable();
    let mut visited: HashSet<EdgeKey> = HashSet::new();
    for start_key in keys {
        if visited.contains(&start_key) {
            continue;
        }
        let mut loop_pts: Vec<Point> = Vec::new();
        let mut key = start_key;
        let mut closed = false;
        loop {
            if visited.contains(&key) {
                break;
            }
            let Some(chord) = chords.get(&key) else { break };
            visited.insert(key);
            loop_pts.push(chord.start);
            if chord.end_key == start_key {
                closed = true;
                break;
            }
            key = chord.end_key;
        }
        if closed && loop_pts.len() >= 3 {
            loop_pts.push(loop_pts[0]);
            polylines.push(loop_pts);
        }
    }

    ContourSet { polylines, out_of_range: false }
}
