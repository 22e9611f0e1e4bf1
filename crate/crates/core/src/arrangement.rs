//! Exact arrangements of rational segments and rays on lines with primitive
//! integer directions.
//!
//! Every non-degenerate piece of an image lies on a line `base + tau * dir`
//! where `dir` is primitive with its first nonzero entry positive and `base`
//! has a zero in that coordinate. `tau` then measures lattice length.

use std::collections::BTreeMap;

use crate::rational::{int, to_f64, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Line {
    pub dir: Vec<i64>,
    pub base: Vec<Rational>,
    pivot: usize,
}

impl Line {
    /// Line through `p` with direction `w` (any nonzero integer vector, not
    /// necessarily primitive). Returns the line and whether `w` points along
    /// increasing `tau`.
    pub fn through(p: &[Rational], w: &[i64]) -> (Line, bool) {
        let pivot = w.iter().position(|&x| x != 0).expect("nonzero direction");
        let forward = w[pivot] > 0;
        let g = crate::rational::content(w);
        let dir: Vec<i64> = w.iter().map(|x| if forward { x / g } else { -x / g }).collect();
        let tau = &p[pivot] / int(dir[pivot]);
        let base = p.iter().zip(&dir).map(|(x, d)| x - &tau * int(*d)).collect();
        (Line { dir, base, pivot }, forward)
    }

    pub fn tau(&self, p: &[Rational]) -> Rational {
        &p[self.pivot] / int(self.dir[self.pivot])
    }

    pub fn at(&self, tau: &Rational) -> Vec<Rational> {
        self.base.iter().zip(&self.dir).map(|(b, d)| b + tau * int(*d)).collect()
    }

    pub fn key(&self) -> (Vec<i64>, Vec<Rational>) {
        (self.dir.clone(), self.base.clone())
    }

    /// Parameters `(t, u)` of the unique common point with `other`, if the
    /// lines meet in exactly one point.
    pub fn meet(&self, other: &Line) -> Option<(Rational, Rational)> {
        let n = self.dir.len();
        let (d1, d2) = (&self.dir, &other.dir);
        let mut pair = None;
        'outer: for i in 0..n {
            if d1[i] == 0 && d2[i] == 0 {
                continue;
            }
            for j in i + 1..n {
                let det = d1[i] * d2[j] - d1[j] * d2[i];
                if det != 0 {
                    pair = Some((i, j, det));
                    break 'outer;
                }
            }
        }
        let (i, j, det) = pair?;
        let ri = &other.base[i] - &self.base[i];
        let rj = &other.base[j] - &self.base[j];
        let det = int(det);
        let t = (&ri * int(d2[j]) - &rj * int(d2[i])) / &det;
        let u = (&ri * int(d1[j]) - &rj * int(d1[i])) / &det;
        let ok = (0..n).all(|k| &self.base[k] + &t * int(d1[k]) == &other.base[k] + &u * int(d2[k]));
        ok.then_some((t, u))
    }
}

/// Closed interval of a line; `None` ends are infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Option<Rational>,
    pub hi: Option<Rational>,
}

impl Interval {
    pub fn contains(&self, t: &Rational) -> bool {
        self.lo.as_ref().is_none_or(|lo| lo <= t) && self.hi.as_ref().is_none_or(|hi| t <= hi)
    }

    /// Whether `self` contains all of `other`.
    pub fn covers(&self, other: &Interval) -> bool {
        let lo_ok = match (&self.lo, &other.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        lo_ok && hi_ok
    }

    /// Intersection, if nonempty.
    pub fn meet(&self, other: &Interval) -> Option<Interval> {
        let lo = match (&self.lo, &other.lo) {
            (None, x) | (x, None) => x.clone(),
            (Some(a), Some(b)) => Some(a.max(b).clone()),
        };
        let hi = match (&self.hi, &other.hi) {
            (None, x) | (x, None) => x.clone(),
            (Some(a), Some(b)) => Some(a.min(b).clone()),
        };
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a > b {
                return None;
            }
        }
        Some(Interval { lo, hi })
    }

    pub fn is_point(&self) -> bool {
        matches!((&self.lo, &self.hi), (Some(a), Some(b)) if a == b)
    }
}

/// Pieces grouped by line, with the crossings between distinct lines.
#[derive(Debug, Clone)]
pub struct Arrangement {
    pub lines: Vec<Line>,
    /// Per line: indices of the items on it.
    pub members: Vec<Vec<usize>>,
    /// Per item: its line and interval.
    pub items: Vec<(usize, Interval)>,
    /// `(line a, line b, tau on a, tau on b)` for lines meeting inside the
    /// hull of their items.
    pub crossings: Vec<(usize, usize, Rational, Rational)>,
}

type Bbox = Vec<(f64, f64)>;

fn bbox(line: &Line, span: &Interval) -> Bbox {
    let lo = span.lo.as_ref().map_or(f64::NEG_INFINITY, to_f64);
    let hi = span.hi.as_ref().map_or(f64::INFINITY, to_f64);
    line.base
        .iter()
        .zip(&line.dir)
        .map(|(b, &d)| {
            let b = to_f64(b);
            if d == 0 {
                return (b, b);
            }
            let d = d as f64;
            let (x, y) = (b + lo * d, b + hi * d);
            let (x, y) = if x <= y { (x, y) } else { (y, x) };
            let x = if x.is_nan() { f64::NEG_INFINITY } else { x };
            let y = if y.is_nan() { f64::INFINITY } else { y };
            let slack = 1e-7 * (1.0 + x.abs().min(y.abs()).min(1e12));
            (x - slack, y + slack)
        })
        .collect()
}

fn overlap(a: &Bbox, b: &Bbox) -> bool {
    a.iter().zip(b).all(|(x, y)| x.0 <= y.1 && y.0 <= x.1)
}

impl Arrangement {
    pub fn build(items: Vec<(Line, Interval)>) -> Arrangement {
        let mut index: BTreeMap<(Vec<i64>, Vec<Rational>), usize> = BTreeMap::new();
        let mut lines = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        let mut placed = Vec::with_capacity(items.len());
        for (i, (line, iv)) in items.into_iter().enumerate() {
            let l = *index.entry(line.key()).or_insert_with(|| {
                lines.push(line.clone());
                members.push(Vec::new());
                lines.len() - 1
            });
            members[l].push(i);
            placed.push((l, iv));
        }
        let hulls: Vec<Interval> = members
            .iter()
            .map(|m| {
                let mut lo: Option<Option<Rational>> = None;
                let mut hi: Option<Option<Rational>> = None;
                for &i in m {
                    let iv = &placed[i].1;
                    lo = Some(match (lo, &iv.lo) {
                        (None, x) => x.clone(),
                        (Some(None), _) | (Some(_), None) => None,
                        (Some(Some(a)), Some(b)) => Some(a.min(b.clone())),
                    });
                    hi = Some(match (hi, &iv.hi) {
                        (None, x) => x.clone(),
                        (Some(None), _) | (Some(_), None) => None,
                        (Some(Some(a)), Some(b)) => Some(a.max(b.clone())),
                    });
                }
                Interval { lo: lo.flatten(), hi: hi.flatten() }
            })
            .collect();
        let boxes: Vec<Bbox> = lines.iter().zip(&hulls).map(|(l, h)| bbox(l, h)).collect();
        let mut crossings = Vec::new();
        for a in 0..lines.len() {
            for b in a + 1..lines.len() {
                if !overlap(&boxes[a], &boxes[b]) {
                    continue;
                }
                let Some((t, u)) = lines[a].meet(&lines[b]) else { continue };
                if !hulls[a].contains(&t) || !hulls[b].contains(&u) {
                    continue;
                }
                let on_a = members[a].iter().any(|&i| placed[i].1.contains(&t));
                let on_b = members[b].iter().any(|&i| placed[i].1.contains(&u));
                if on_a && on_b {
                    crossings.push((a, b, t, u));
                }
            }
        }
        Arrangement { lines, members, items: placed, crossings }
    }
}

/// Splits a line into elementary intervals at `cuts` and sums item weights on
/// each. Returns `(interval, weight)` for the positive-weight pieces in order.
pub fn elementary(items: &[(Interval, u64)], cuts: &[Rational]) -> Vec<(Interval, u64)> {
    let mut deltas: BTreeMap<Rational, i128> = BTreeMap::new();
    let mut start: i128 = 0;
    for (iv, w) in items {
        let w = *w as i128;
        match &iv.lo {
            None => start += w,
            Some(lo) => *deltas.entry(lo.clone()).or_insert(0) += w,
        }
        if let Some(hi) = &iv.hi {
            *deltas.entry(hi.clone()).or_insert(0) -= w;
        }
    }
    for c in cuts {
        deltas.entry(c.clone()).or_insert(0);
    }
    let mut out = Vec::new();
    let mut weight = start;
    let mut prev: Option<Rational> = None;
    for (c, d) in deltas {
        if weight > 0 {
            out.push((Interval { lo: prev.clone(), hi: Some(c.clone()) }, weight as u64));
        }
        weight += d;
        prev = Some(c);
    }
    if weight > 0 {
        out.push((Interval { lo: prev, hi: None }, weight as u64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn pt(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn line_normalization() {
        let (l, fwd) = Line::through(&pt(&[3, 5]), &[-2, -4]);
        assert_eq!(l.dir, vec![1, 2]);
        assert!(!fwd);
        assert_eq!(l.base, pt(&[0, -1]));
        assert_eq!(l.tau(&pt(&[3, 5])), int(3));
        let (m, _) = Line::through(&pt(&[1, 1]), &[1, 2]);
        assert_eq!(l.key(), m.key());
    }

    #[test]
    fn crossing_lines() {
        let (a, _) = Line::through(&pt(&[0, 0]), &[1, 1]);
        let (b, _) = Line::through(&pt(&[0, 1]), &[1, -1]);
        let (t, u) = a.meet(&b).unwrap();
        assert_eq!(a.at(&t), vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(b.at(&u), a.at(&t));
        let (c, _) = Line::through(&pt(&[0, 0, 1]), &[1, 0, 0]);
        let (d, _) = Line::through(&pt(&[0, 0, 0]), &[0, 1, 0]);
        assert!(c.meet(&d).is_none());
    }

    #[test]
    fn elementary_weights() {
        let items = vec![
            (Interval { lo: Some(int(0)), hi: Some(int(2)) }, 1),
            (Interval { lo: Some(int(1)), hi: None }, 1),
        ];
        let e = elementary(&items, &[]);
        assert_eq!(e.len(), 3);
        assert_eq!(e[1].1, 2);
        assert_eq!(e[2].0.hi, None);
    }
}
