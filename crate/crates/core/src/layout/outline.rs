//! Outer boundary of a union of disks, and polygon predicates.

use std::f64::consts::TAU;

use super::pack::Circle;

pub type Point = [f64; 2];

fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a >= TAU {
        0.0
    } else {
        a
    }
}

#[derive(Debug, Clone, Copy)]
struct Arc {
    disk: usize,
    start: f64,
    /// Always greater than `start`; may exceed `TAU`.
    end: f64,
}

fn arc_point(d: &Circle, angle: f64) -> Point {
    [d.x + d.r * angle.cos(), d.y + d.r * angle.sin()]
}

/// Uncovered arcs of every disk, walking each circle counter-clockwise.
fn free_arcs(disks: &[Circle]) -> Vec<Arc> {
    let mut arcs = Vec::new();
    for (i, d) in disks.iter().enumerate() {
        let mut covered: Vec<(f64, f64)> = Vec::new();
        let mut fully = false;
        for (j, o) in disks.iter().enumerate() {
            if i == j {
                continue;
            }
            let dist = d.distance_to(o);
            if dist >= d.r + o.r {
                continue;
            }
            if dist + d.r <= o.r {
                fully = true;
                break;
            }
            if dist + o.r <= d.r {
                continue;
            }
            let cos = ((d.r * d.r + dist * dist - o.r * o.r) / (2.0 * d.r * dist)).clamp(-1.0, 1.0);
            let half = cos.acos();
            let mid = (o.y - d.y).atan2(o.x - d.x);
            covered.push((wrap(mid - half), 2.0 * half));
        }
        if fully {
            continue;
        }
        if covered.is_empty() {
            arcs.push(Arc {
                disk: i,
                start: 0.0,
                end: TAU,
            });
            continue;
        }
        covered.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for &(s, w) in &covered {
            match merged.last_mut() {
                Some(last) if s <= last.1 => last.1 = last.1.max(s + w),
                _ => merged.push((s, s + w)),
            }
        }
        // Fold intervals swallowed by the one wrapping past TAU.
        while merged.len() > 1 {
            let reach = merged[merged.len() - 1].1 - TAU;
            if merged[0].0 > reach {
                break;
            }
            let first = merged.remove(0);
            let last = merged.last_mut().expect("nonempty");
            last.1 = last.1.max(first.1 + TAU);
        }
        if merged.len() == 1 && merged[0].1 - merged[0].0 >= TAU {
            continue;
        }
        let n = merged.len();
        for k in 0..n {
            let gap_start = merged[k].1;
            let gap_end = if k + 1 < n {
                merged[k + 1].0
            } else {
                merged[0].0 + TAU
            };
            if gap_end - gap_start > 1e-12 {
                arcs.push(Arc {
                    disk: i,
                    start: gap_start,
                    end: gap_end,
                });
            }
        }
    }
    arcs
}

fn signed_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    (0..n)
        .map(|i| {
            let [x0, y0] = poly[i];
            let [x1, y1] = poly[(i + 1) % n];
            x0 * y1 - x1 * y0
        })
        .sum::<f64>()
        / 2.0
}

fn sample_arc(d: &Circle, arc: &Arc, tolerance: f64, out: &mut Vec<Point>) {
    // Chord sagitta r(1 - cos(step/2)) stays below the tolerance.
    let max_step = if tolerance < d.r {
        (2.0 * (1.0 - tolerance / d.r).acos()).min(TAU / 64.0)
    } else {
        TAU / 64.0
    };
    let span = arc.end - arc.start;
    let steps = (span / max_step).ceil().max(1.0) as usize;
    for s in 0..steps {
        out.push(arc_point(d, arc.start + span * s as f64 / steps as f64));
    }
}

/// Counter-clockwise outer boundary of the union of `disks`, with holes
/// filled. Consecutive vertices deviate from the true arcs by at most
/// `tolerance`. Disconnected unions fall back to their convex hull.
pub fn union_outline(disks: &[Circle], tolerance: f64) -> Vec<Point> {
    let arcs = free_arcs(disks);
    if arcs.is_empty() {
        return Vec::new();
    }
    let mut used = vec![false; arcs.len()];
    let mut loops: Vec<Vec<Point>> = Vec::new();
    for first in 0..arcs.len() {
        if used[first] {
            continue;
        }
        let mut poly = Vec::new();
        let mut cur = first;
        loop {
            used[cur] = true;
            let arc = arcs[cur];
            let disk = &disks[arc.disk];
            sample_arc(disk, &arc, tolerance, &mut poly);
            let end = arc_point(disk, arc.end);
            // The next arc starts where this one ends, on another circle.
            let next = (0..arcs.len())
                .filter(|&k| k == first || !used[k])
                .min_by(|&a, &b| {
                    let da = dist2(arc_point(&disks[arcs[a].disk], arcs[a].start), end);
                    let db = dist2(arc_point(&disks[arcs[b].disk], arcs[b].start), end);
                    da.total_cmp(&db)
                });
            match next {
                Some(k) if k != first => cur = k,
                _ => break,
            }
        }
        loops.push(poly);
    }
    let outer: Vec<&Vec<Point>> = loops.iter().filter(|l| signed_area(l) > 0.0).collect();
    if outer.len() == 1 {
        return dedup(outer[0].clone());
    }
    convex_hull(loops.into_iter().flatten().collect())
}

fn dist2(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn dedup(mut poly: Vec<Point>) -> Vec<Point> {
    poly.dedup_by(|a, b| dist2(*a, *b) < 1e-18);
    while poly.len() > 1 && dist2(poly[0], *poly.last().expect("nonempty")) < 1e-18 {
        poly.pop();
    }
    poly
}

/// Andrew's monotone chain, counter-clockwise.
pub fn convex_hull(mut pts: Vec<Point>) -> Vec<Point> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: Point, a: Point, b: Point| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() * 2);
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Point>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

/// Winding number of `poly` around `p`; nonzero means inside.
pub fn winding_number(poly: &[Point], p: Point) -> i32 {
    let n = poly.len();
    let mut wn = 0;
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let is_left = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
        if a[1] <= p[1] {
            if b[1] > p[1] && is_left > 0.0 {
                wn += 1;
            }
        } else if b[1] <= p[1] && is_left < 0.0 {
            wn -= 1;
        }
    }
    wn
}

pub fn contains(poly: &[Point], p: Point) -> bool {
    winding_number(poly, p) != 0
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let orient = |p: Point, q: Point, r: Point| {
        let v = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0]);
        if v > 0.0 {
            1
        } else if v < 0.0 {
            -1
        } else {
            0
        }
    };
    let (o1, o2, o3, o4) = (
        orient(a, b, c),
        orient(a, b, d),
        orient(c, d, a),
        orient(c, d, b),
    );
    if o1 != o2 && o3 != o4 {
        return true;
    }
    let on = |p: Point, q: Point, r: Point| {
        r[0] >= p[0].min(q[0])
            && r[0] <= p[0].max(q[0])
            && r[1] >= p[1].min(q[1])
            && r[1] <= p[1].max(q[1])
    };
    (o1 == 0 && on(a, b, c))
        || (o2 == 0 && on(a, b, d))
        || (o3 == 0 && on(c, d, a))
        || (o4 == 0 && on(c, d, b))
}

/// True when no two non-adjacent edges of the closed polygon meet.
pub fn is_simple(poly: &[Point]) -> bool {
    let n = poly.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        for j in i + 1..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (poly[j], poly[(j + 1) % n]);
            if segments_cross(a, b, c, d) {
                return false;
            }
        }
    }
    true
}
