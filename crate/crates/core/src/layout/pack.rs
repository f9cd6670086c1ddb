//! Front-chain circle packing and smallest enclosing circles.
//!
//! The sibling packer follows the front-chain scheme of Wang et al. as
//! popularized by d3-hierarchy: each circle is placed tangent to a pair of
//! circles on the current front chain, the pair closest to the centroid is
//! tried first, and intersecting chain members are spliced out. Enclosing
//! circles use Welzl's move-to-front algorithm over a shuffle driven by a
//! fixed-seed LCG, so results are deterministic.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub x: f64,
    pub y: f64,
    pub r: f64,
}

impl Circle {
    pub fn new(x: f64, y: f64, r: f64) -> Circle {
        Circle { x, y, r }
    }

    pub fn distance_to(&self, other: &Circle) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

fn place(b: &Circle, a: &Circle, c: &mut Circle) {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let d2 = dx * dx + dy * dy;
    if d2 > 0.0 {
        let a2 = (a.r + c.r).powi(2);
        let b2 = (b.r + c.r).powi(2);
        if a2 > b2 {
            let x = (d2 + b2 - a2) / (2.0 * d2);
            let y = (b2 / d2 - x * x).max(0.0).sqrt();
            c.x = b.x - x * dx - y * dy;
            c.y = b.y - x * dy + y * dx;
        } else {
            let x = (d2 + a2 - b2) / (2.0 * d2);
            let y = (a2 / d2 - x * x).max(0.0).sqrt();
            c.x = a.x + x * dx - y * dy;
            c.y = a.y + x * dy + y * dx;
        }
    } else {
        c.x = a.x + c.r;
        c.y = a.y;
    }
}

fn intersects(a: &Circle, b: &Circle) -> bool {
    let dr = a.r + b.r - 1e-6;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr > 0.0 && dr * dr > dx * dx + dy * dy
}

fn score(a: &Circle, b: &Circle) -> f64 {
    let ab = a.r + b.r;
    let dx = (a.x * b.r + b.x * a.r) / ab;
    let dy = (a.y * b.r + b.y * a.r) / ab;
    dx * dx + dy * dy
}

/// Packs circles (radii given, positions overwritten) without overlap,
/// centred so their enclosing circle sits at the origin. Returns the
/// enclosing radius.
pub fn pack_siblings(circles: &mut [Circle]) -> f64 {
    let n = circles.len();
    if n == 0 {
        return 0.0;
    }
    circles[0].x = 0.0;
    circles[0].y = 0.0;
    if n == 1 {
        return circles[0].r;
    }
    circles[0].x = -circles[1].r;
    circles[1].x = circles[0].r;
    circles[1].y = 0.0;
    if n == 2 {
        return circles[0].r + circles[1].r;
    }
    let (first, rest) = circles.split_at_mut(2);
    place(&first[1], &first[0], &mut rest[0]);

    // Front chain as a doubly linked ring over circle indices.
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];
    let (mut a, mut b) = (0usize, 1usize);
    next[0] = 1;
    prev[1] = 0;
    next[1] = 2;
    prev[2] = 1;
    next[2] = 0;
    prev[0] = 2;

    let mut i = 3;
    'pack: while i < n {
        let (ca, cb) = (circles[a], circles[b]);
        place(&ca, &cb, &mut circles[i]);
        let c = circles[i];

        let mut j = next[b];
        let mut k = prev[a];
        let mut sj = circles[b].r;
        let mut sk = circles[a].r;
        loop {
            if sj <= sk {
                if intersects(&circles[j], &c) {
                    b = j;
                    next[a] = b;
                    prev[b] = a;
                    continue 'pack;
                }
                sj += circles[j].r;
                j = next[j];
            } else {
                if intersects(&circles[k], &c) {
                    a = k;
                    next[a] = b;
                    prev[b] = a;
                    continue 'pack;
                }
                sk += circles[k].r;
                k = prev[k];
            }
            if j == next[k] {
                break;
            }
        }

        prev[i] = a;
        next[i] = b;
        next[a] = i;
        prev[b] = i;
        b = i;

        let mut best = score(&circles[a], &circles[next[a]]);
        let mut cur = next[b];
        while cur != b {
            let s = score(&circles[cur], &circles[next[cur]]);
            if s < best {
                a = cur;
                best = s;
            }
            cur = next[cur];
        }
        b = next[a];
        i += 1;
    }

    let mut chain = vec![circles[b]];
    let mut cur = next[b];
    while cur != b {
        chain.push(circles[cur]);
        cur = next[cur];
    }
    let e = enclose(&chain);
    for c in circles.iter_mut() {
        c.x -= e.x;
        c.y -= e.y;
    }
    e.r
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        const A: u64 = 1_664_525;
        const C: u64 = 1_013_904_223;
        const M: u64 = 1 << 32;
        self.0 = (A * self.0 + C) % M;
        self.0 as f64 / M as f64
    }
}

fn encloses_not(a: &Circle, b: &Circle) -> bool {
    let dr = a.r - b.r;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr < 0.0 || dr * dr < dx * dx + dy * dy
}

fn encloses_weak(a: &Circle, b: &Circle) -> bool {
    let dr = a.r - b.r + a.r.max(b.r).max(1.0) * 1e-9;
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    dr > 0.0 && dr * dr > dx * dx + dy * dy
}

fn encloses_weak_all(a: &Circle, basis: &[Circle]) -> bool {
    basis.iter().all(|b| encloses_weak(a, b))
}

fn enclose_basis2(a: &Circle, b: &Circle) -> Circle {
    let x21 = b.x - a.x;
    let y21 = b.y - a.y;
    let r21 = b.r - a.r;
    let l = x21.hypot(y21);
    Circle {
        x: (a.x + b.x + x21 / l * r21) / 2.0,
        y: (a.y + b.y + y21 / l * r21) / 2.0,
        r: (l + a.r + b.r) / 2.0,
    }
}

fn enclose_basis3(a: &Circle, b: &Circle, c: &Circle) -> Circle {
    let (x1, y1, r1) = (a.x, a.y, a.r);
    let (x2, y2, r2) = (b.x, b.y, b.r);
    let (x3, y3, r3) = (c.x, c.y, c.r);
    let a2 = x1 - x2;
    let a3 = x1 - x3;
    let b2 = y1 - y2;
    let b3 = y1 - y3;
    let c2 = r2 - r1;
    let c3 = r3 - r1;
    let d1 = x1 * x1 + y1 * y1 - r1 * r1;
    let d2 = d1 - x2 * x2 - y2 * y2 + r2 * r2;
    let d3 = d1 - x3 * x3 - y3 * y3 + r3 * r3;
    let ab = a3 * b2 - a2 * b3;
    let xa = (b2 * d3 - b3 * d2) / (ab * 2.0) - x1;
    let xb = (b3 * c2 - b2 * c3) / ab;
    let ya = (a3 * d2 - a2 * d3) / (ab * 2.0) - y1;
    let yb = (a2 * c3 - a3 * c2) / ab;
    let qa = xb * xb + yb * yb - 1.0;
    let qb = 2.0 * (r1 + xa * xb + ya * yb);
    let qc = xa * xa + ya * ya - r1 * r1;
    let r = -(if qa.abs() > 1e-6 {
        (qb + (qb * qb - 4.0 * qa * qc).sqrt()) / (2.0 * qa)
    } else {
        qc / qb
    });
    Circle {
        x: x1 + xa + xb * r,
        y: y1 + ya + yb * r,
        r,
    }
}

fn enclose_basis(basis: &[Circle]) -> Circle {
    match basis {
        [a] => *a,
        [a, b] => enclose_basis2(a, b),
        [a, b, c] => enclose_basis3(a, b, c),
        _ => unreachable!("basis has one to three circles"),
    }
}

fn extend_basis(basis: &[Circle], p: &Circle) -> Vec<Circle> {
    if encloses_weak_all(p, basis) {
        return vec![*p];
    }
    for bi in basis {
        if encloses_not(p, bi) && encloses_weak_all(&enclose_basis2(bi, p), basis) {
            return vec![*bi, *p];
        }
    }
    for i in 0..basis.len().saturating_sub(1) {
        for j in i + 1..basis.len() {
            let (bi, bj) = (&basis[i], &basis[j]);
            if encloses_not(&enclose_basis2(bi, bj), p)
                && encloses_not(&enclose_basis2(bi, p), bj)
                && encloses_not(&enclose_basis2(bj, p), bi)
                && encloses_weak_all(&enclose_basis3(bi, bj, p), basis)
            {
                return vec![*bi, *bj, *p];
            }
        }
    }
    // Only reachable through rounding; restart the basis from `p` and rely
    // on the final widening in `enclose`.
    vec![*p]
}

/// Smallest circle enclosing all given circles, widened if rounding left
/// any circle sticking out.
pub fn enclose(circles: &[Circle]) -> Circle {
    if circles.is_empty() {
        return Circle::new(0.0, 0.0, 0.0);
    }
    let mut items = circles.to_vec();
    let mut rng = Lcg(1);
    let mut m = items.len();
    while m > 0 {
        let i = (rng.next() * m as f64) as usize;
        m -= 1;
        items.swap(m, i);
    }
    let mut basis: Vec<Circle> = Vec::new();
    let mut e: Option<Circle> = None;
    let mut i = 0;
    let mut guard = 0usize;
    while i < items.len() {
        let p = items[i];
        if e.is_some_and(|e| encloses_weak(&e, &p)) {
            i += 1;
        } else {
            basis = extend_basis(&basis, &p);
            e = Some(enclose_basis(&basis));
            i = 0;
            guard += 1;
            if guard > 64 * items.len() * items.len() + 64 {
                break;
            }
        }
    }
    let mut e = e.expect("at least one circle");
    let reach = circles
        .iter()
        .map(|c| e.distance_to(c) + c.r)
        .fold(0.0, f64::max);
    if reach > e.r {
        e.r = reach;
    }
    e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_packed(circles: &[Circle], r: f64) {
        for (i, a) in circles.iter().enumerate() {
            assert!(
                a.x.hypot(a.y) + a.r <= r + 1e-6,
                "{i} escapes enclosing circle"
            );
            for b in &circles[i + 1..] {
                assert!(a.distance_to(b) >= a.r + b.r - 1e-6);
            }
        }
    }

    #[test]
    fn small_cases() {
        let mut one = [Circle::new(5.0, 5.0, 3.0)];
        assert_eq!(pack_siblings(&mut one), 3.0);
        assert_eq!((one[0].x, one[0].y), (0.0, 0.0));
        let mut two = [Circle::new(0.0, 0.0, 1.0), Circle::new(0.0, 0.0, 2.0)];
        assert_eq!(pack_siblings(&mut two), 3.0);
        assert_eq!(two[0].distance_to(&two[1]), 3.0);
    }

    #[test]
    fn many_circles_do_not_overlap() {
        let mut cs: Vec<Circle> = (0..40)
            .map(|i| Circle::new(0.0, 0.0, 1.0 + ((i * 37) % 11) as f64))
            .collect();
        let r = pack_siblings(&mut cs);
        assert_packed(&cs, r);
        let total: f64 = cs.iter().map(|c| c.r * c.r).sum();
        // Reasonably tight: at least a third of the enclosing area is used.
        assert!(total / (r * r) > 0.33, "{}", total / (r * r));
    }

    #[test]
    fn enclose_matches_simple_cases() {
        let e = enclose(&[Circle::new(-1.0, 0.0, 1.0), Circle::new(1.0, 0.0, 1.0)]);
        assert!((e.x).abs() < 1e-12 && (e.r - 2.0).abs() < 1e-12);
        let e = enclose(&[Circle::new(0.0, 0.0, 5.0), Circle::new(1.0, 0.0, 1.0)]);
        assert_eq!(e, Circle::new(0.0, 0.0, 5.0));
    }

    #[test]
    fn packing_is_deterministic() {
        let make = || -> Vec<Circle> { (1..20).map(|i| Circle::new(0.0, 0.0, i as f64)).collect() };
        let (mut a, mut b) = (make(), make());
        pack_siblings(&mut a);
        pack_siblings(&mut b);
        assert_eq!(a, b);
    }
}
