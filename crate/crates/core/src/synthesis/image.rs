//! Exact images of skeleton stretches, used to test pillar intervals against
//! the image of an edge.

use num_traits::{Signed, Zero};

use crate::error::Result;
use crate::graph::EdgeId;
use crate::pl::Segment;
use crate::rational::{int, Rational};
use crate::tropicalize::Embedding;

/// `start + t * dir` for `t` in `[0, len]`, or `[0, inf)` without a length.
#[derive(Debug, Clone)]
pub(crate) struct ImagePiece {
    pub start: Vec<Rational>,
    pub dir: Vec<i64>,
    pub len: Option<Rational>,
}

fn at(segs: &[Segment], x: &Rational) -> (Rational, i64) {
    let seg = segs.iter().find(|s| x < &s.end).unwrap_or_else(|| segs.last().unwrap());
    (&seg.value + int(seg.slope) * (x - &seg.start), seg.slope)
}

/// Linear pieces of the image of `[a, b]` on a finite edge.
pub(crate) fn edge_image(emb: &Embedding, e: &EdgeId, a: &Rational, b: &Rational) -> Vec<ImagePiece> {
    let segs: Vec<Vec<Segment>> = emb.coords().iter().map(|f| f.segments(e)).collect();
    let mut cuts = vec![a.clone(), b.clone()];
    for s in &segs {
        cuts.extend(s.iter().map(|x| x.start.clone()).filter(|x| x > a && x < b));
    }
    cuts.sort();
    cuts.dedup();
    cuts.windows(2)
        .map(|w| {
            let (start, dir) = segs.iter().map(|s| at(s, &w[0])).unzip();
            ImagePiece { start, dir, len: Some(&w[1] - &w[0]) }
        })
        .collect()
}

/// Image of a whole finite edge or ray of the skeleton.
pub(crate) fn full_image(emb: &Embedding, e: &EdgeId) -> Result<Vec<ImagePiece>> {
    let sk = emb.skeleton();
    if sk.is_ray(e) {
        let (start, dir) = emb
            .coords()
            .iter()
            .map(|f| f.ray(e).map(|r| (r.anchor.clone(), r.slope)).unwrap_or((Rational::zero(), 0)))
            .unzip();
        return Ok(vec![ImagePiece { start, dir, len: None }]);
    }
    let mut out = Vec::new();
    for (piece, _) in sk.finite().pieces_of(e)? {
        let len = sk.finite().edge(&piece)?.length.clone();
        out.extend(edge_image(emb, &piece, &Rational::zero(), &len));
    }
    Ok(out)
}

type Bound = Option<Rational>;

/// Range of `c * t` for `t` in `[0, len]`.
fn scaled(c: &Rational, len: &Option<Rational>) -> (Bound, Bound) {
    let zero = Rational::zero();
    match len {
        Some(l) => {
            let x = c * l;
            (Some(x.clone().min(zero.clone())), Some(x.max(zero)))
        }
        None if c.is_positive() => (Some(zero), None),
        None if c.is_negative() => (None, Some(zero)),
        None => (Some(zero.clone()), Some(zero)),
    }
}

fn add(a: Bound, b: Bound) -> Bound {
    Some(a? + b?)
}

/// Whether two image pieces share a point.
pub(crate) fn meet(a: &ImagePiece, b: &ImagePiece) -> bool {
    let n = a.start.len();
    let r: Vec<Rational> = (0..n).map(|k| &b.start[k] - &a.start[k]).collect();
    let u: Vec<Rational> = a.dir.iter().map(|&x| int(x)).collect();
    let v: Vec<Rational> = b.dir.iter().map(|&x| -int(x)).collect();
    let in_range = |x: &Rational, len: &Option<Rational>| !x.is_negative() && len.as_ref().is_none_or(|l| x <= l);
    // full rank: unique solution of s u + t v = r
    for i in 0..n {
        for j in i + 1..n {
            let det = &u[i] * &v[j] - &u[j] * &v[i];
            if det.is_zero() {
                continue;
            }
            let s = (&r[i] * &v[j] - &r[j] * &v[i]) / &det;
            let t = (&u[i] * &r[j] - &u[j] * &r[i]) / &det;
            let fits = (0..n).all(|k| &s * &u[k] + &t * &v[k] == r[k]);
            return fits && in_range(&s, &a.len) && in_range(&t, &b.len);
        }
    }
    let w = if u.iter().any(|x| !x.is_zero()) { &u } else { &v };
    let Some(k) = w.iter().position(|x| !x.is_zero()) else {
        return r.iter().all(|x| x.is_zero());
    };
    let lambda = &r[k] / &w[k];
    if (0..n).any(|m| r[m] != &lambda * &w[m]) {
        return false;
    }
    let (alo, ahi) = scaled(&(&u[k] / &w[k]), &a.len);
    let (blo, bhi) = scaled(&(&v[k] / &w[k]), &b.len);
    let lo = add(alo, blo);
    let hi = add(ahi, bhi);
    lo.is_none_or(|l| l <= lambda) && hi.is_none_or(|h| lambda <= h)
}

pub(crate) fn any_meet(a: &[ImagePiece], b: &[ImagePiece]) -> bool {
    a.iter().any(|x| b.iter().any(|y| meet(x, y)))
}
