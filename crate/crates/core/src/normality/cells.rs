use std::fmt::Write as _;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{admissible_blocks, block_product, block_value, format_block};
use crate::error::{Error, Result};
use crate::generators::GeneratorSpec;
use crate::rational::{self, Exact, Rational};

/// A finite union of disjoint half-open intervals in `[0,1)`, sorted.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct IntervalSet(pub Vec<(Rational, Rational)>);

impl IntervalSet {
    pub fn unit() -> Self {
        IntervalSet(vec![(Rational::zero(), Rational::one())])
    }

    pub fn single(lo: Rational, hi: Rational) -> Self {
        if lo < hi {
            IntervalSet(vec![(lo, hi)])
        } else {
            IntervalSet(Vec::new())
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.0.iter().map(|(a, b)| b - a).sum()
    }

    pub fn contains(&self, x: &Rational) -> bool {
        self.0.iter().any(|(a, b)| a <= x && x < b)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a0, a1) = &self.0[i];
            let (b0, b1) = &other.0[j];
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo < hi {
                out.push((lo.clone(), hi.clone()));
            }
            if a1 < b1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalSet(out)
    }

    /// `{x − t mod 1 : x ∈ self}` for `t ∈ [0,1)`.
    pub fn shift_back(&self, t: &Rational) -> Self {
        let one = Rational::one();
        let mut parts = Vec::new();
        for (a, b) in &self.0 {
            let lo = a - t;
            let hi = b - t;
            if lo >= Rational::zero() {
                parts.push((lo, hi));
            } else if hi <= Rational::zero() {
                parts.push((lo + &one, hi + &one));
            } else {
                parts.push((Rational::zero(), hi));
                parts.push((lo + &one, one.clone()));
            }
        }
        parts.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(parts.len());
        for (a, b) in parts {
            match merged.last_mut() {
                Some(last) if last.1 >= a => {
                    if b > last.1 {
                        last.1 = b;
                    }
                }
                _ => merged.push((a, b)),
            }
        }
        IntervalSet(merged)
    }
}

/// A model whose base cylinders `E_B` are computable unions of intervals.
#[derive(Clone, Debug, PartialEq)]
pub enum CellModel {
    /// `x ↦ 2x mod 1` with `f = low` on `[0, ½)` and `f = high` on `[½, 1)`.
    Doubling { low: u64, high: u64 },
    /// `x ↦ x + α mod 1` with `f` constant on each cell.
    Rotation { alpha: Rational, cells: Vec<(Rational, Rational, u64)> },
}

impl CellModel {
    pub fn doubling() -> Self {
        CellModel::Doubling { low: 2, high: 3 }
    }

    pub fn from_spec(spec: &GeneratorSpec) -> Result<Self> {
        match spec {
            GeneratorSpec::RotationCoding { alpha, cells, .. } => {
                spec.validate()?;
                Ok(CellModel::Rotation {
                    alpha: alpha.to_rational()?,
                    cells: cells.iter().map(|c| (c.lo.clone(), c.hi.clone(), c.base)).collect(),
                })
            }
            other => Err(Error::UnsupportedModel(format!(
                "cell geometry needs an interval-coded model, got {}",
                serde_json::to_value(other).ok().and_then(|v| v["kind"].as_str().map(String::from)).unwrap_or_default()
            ))),
        }
    }

    fn alphabet(&self) -> Vec<u64> {
        let mut v: Vec<u64> = match self {
            CellModel::Doubling { low, high } => vec![*low, *high],
            CellModel::Rotation { cells, .. } => cells.iter().map(|c| c.2).collect(),
        };
        v.sort();
        v.dedup();
        v
    }

    /// `E_B`: points whose next `ℓ` bases read `B`.
    pub fn cylinder(&self, b: &[u64]) -> IntervalSet {
        match self {
            CellModel::Doubling { low, high } => {
                let ell = b.len() as u32;
                let mut a = num_bigint::BigInt::zero();
                for &x in b {
                    let bit = if x == *low {
                        0u8
                    } else if x == *high {
                        1
                    } else {
                        return IntervalSet::default();
                    };
                    a = a * 2u8 + bit;
                }
                let den = num_bigint::BigInt::one() << ell;
                IntervalSet::single(Rational::new(a.clone(), den.clone()), Rational::new(a + 1u8, den))
            }
            CellModel::Rotation { alpha, cells } => {
                let mut acc = IntervalSet::unit();
                let mut shift = Rational::zero();
                for &bi in b {
                    let mut cell = IntervalSet(
                        cells.iter().filter(|c| c.2 == bi).map(|c| (c.0.clone(), c.1.clone())).collect(),
                    );
                    cell.0.sort();
                    acc = acc.intersect(&cell.shift_back(&shift));
                    if acc.is_empty() {
                        break;
                    }
                    shift = rational::frac(&(shift + alpha));
                }
                acc
            }
        }
    }

    /// Base blocks of length `ℓ` with nonempty cylinder, in lexicographic order.
    pub fn base_blocks(&self, ell: usize) -> Vec<Vec<u64>> {
        let alphabet = self.alphabet();
        let mut blocks = vec![Vec::new()];
        for _ in 0..ell {
            let mut next = Vec::new();
            for p in &blocks {
                for &x in &alphabet {
                    let mut v: Vec<u64> = p.clone();
                    v.push(x);
                    if !self.cylinder(&v).is_empty() {
                        next.push(v);
                    }
                }
            }
            blocks = next;
        }
        blocks
    }
}

/// `E_B × I_{D,B}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRectangle {
    pub b: Vec<u64>,
    pub d: Vec<u64>,
    pub x: IntervalSet,
    pub y0: Rational,
    pub y1: Rational,
}

#[derive(Serialize, Deserialize)]
struct RectRow {
    b: Vec<u64>,
    d: Vec<u64>,
    x: Vec<(Exact, Exact)>,
    y0: Exact,
    y1: Exact,
}

impl Serialize for CellRectangle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RectRow {
            b: self.b.clone(),
            d: self.d.clone(),
            x: self.x.0.iter().map(|(a, b)| (a.into(), b.into())).collect(),
            y0: (&self.y0).into(),
            y1: (&self.y1).into(),
        }
        .serialize(s)
    }
}

/// All rectangles `E_B × I_{D,B}` with `|B| = ℓ` and `D < B`.
pub fn cell_rectangles(model: &CellModel, ell: usize) -> Result<Vec<CellRectangle>> {
    if ell == 0 {
        return Err(Error::BadParams("block length must be at least 1".into()));
    }
    let mut out = Vec::new();
    for b in model.base_blocks(ell) {
        let x = model.cylinder(&b);
        let width = Rational::new(1.into(), block_product(&b));
        for d in admissible_blocks(&b) {
            let y0 = block_value(&d, &b);
            let y1 = &y0 + &width;
            out.push(CellRectangle { b: b.clone(), d, x: x.clone(), y0, y1 });
        }
    }
    Ok(out)
}

/// One row per interval component: `B,D,x0,x1,y0,y1` as exact rationals.
pub fn rectangles_csv(rects: &[CellRectangle]) -> String {
    let mut s = String::from("B,D,x0,x1,y0,y1\n");
    for r in rects {
        for (x0, x1) in &r.x.0 {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{}",
                format_block(&r.b),
                format_block(&r.d),
                rational::format_rational(x0),
                rational::format_rational(x1),
                rational::format_rational(&r.y0),
                rational::format_rational(&r.y1)
            );
        }
    }
    s
}

/// Draws the rectangles on the unit square; `only` keeps a single digit block.
pub fn rectangles_svg(rects: &[CellRectangle], only: Option<&[u64]>) -> String {
    const SIZE: f64 = 720.0;
    const PAD: f64 = 40.0;
    let px = |v: &Rational| PAD + rational::to_f64(v) * SIZE;
    let py = |v: &Rational| PAD + (1.0 - rational::to_f64(v)) * SIZE;
    let mut s = String::new();
    let total = SIZE + 2.0 * PAD;
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{total}" viewBox="0 0 {total} {total}" font-family="sans-serif">"#
    );
    let _ = writeln!(s, r#"<rect x="{PAD}" y="{PAD}" width="{SIZE}" height="{SIZE}" fill="white" stroke="black"/>"#);
    let mut labelled: Vec<(&Vec<u64>, &Rational, &Rational)> = Vec::new();
    for r in rects {
        if only.is_some_and(|d| d != r.d.as_slice()) {
            continue;
        }
        for (x0, x1) in &r.x.0 {
            let (left, right) = (px(x0), px(x1));
            let (top, bottom) = (py(&r.y1), py(&r.y0));
            let fill = if only.is_some() { "#9ecae1" } else { "none" };
            let _ = writeln!(
                s,
                r#"<rect x="{left:.3}" y="{top:.3}" width="{:.3}" height="{:.3}" fill="{fill}" stroke="black" stroke-width="0.6"/>"#,
                right - left,
                bottom - top
            );
            let (w, h) = (right - left, bottom - top);
            if w > 14.0 && h > 9.0 {
                let size = (h * 0.6).min(w / (2.0 + r.d.len() as f64 * 1.2)).clamp(5.0, 14.0);
                let _ = writeln!(
                    s,
                    r#"<text x="{:.3}" y="{:.3}" font-size="{size:.1}" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
                    left + w / 2.0,
                    top + h / 2.0,
                    format_block(&r.d)
                );
            }
            if !labelled.iter().any(|l| l.0 == &r.b && l.1 == x0) {
                labelled.push((&r.b, x0, x1));
            }
        }
    }
    for (b, x0, x1) in labelled {
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-size="10" text-anchor="middle">{}</text>"#,
            (px(x0) + px(x1)) / 2.0,
            PAD + SIZE + 16.0,
            format_block(b)
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn figure_one_layout() {
        let rects = cell_rectangles(&CellModel::doubling(), 1).unwrap();
        assert_eq!(rects.len(), 5);
        let e2: Vec<_> = rects.iter().filter(|r| r.b == vec![2]).collect();
        assert_eq!(e2.len(), 2);
        assert_eq!(e2[0].x, IntervalSet::single(rat(0, 1), rat(1, 2)));
        assert_eq!((e2[1].y0.clone(), e2[1].y1.clone()), (rat(1, 2), rat(1, 1)));
        let e3: Vec<_> = rects.iter().filter(|r| r.b == vec![3]).collect();
        assert_eq!(e3[2].y0, rat(2, 3));
        assert_eq!(e3[0].x, IntervalSet::single(rat(1, 2), rat(1, 1)));
    }

    #[test]
    fn rectangle_counts() {
        for ell in 1..=3u32 {
            let n = cell_rectangles(&CellModel::doubling(), ell as usize).unwrap().len();
            assert_eq!(n, 5usize.pow(ell));
        }
    }

    #[test]
    fn rotation_cylinders_partition() {
        let spec = GeneratorSpec::sturmian_golden();
        let m = CellModel::from_spec(&spec).unwrap();
        for ell in 1..=4 {
            let blocks = m.base_blocks(ell);
            // Sturmian: ℓ + 1 factors
            assert_eq!(blocks.len(), ell + 1);
            let total: Rational = blocks.iter().map(|b| m.cylinder(b).measure()).sum();
            assert_eq!(total, rat(1, 1));
        }
    }

    #[test]
    fn unsupported_model() {
        let spec = GeneratorSpec::Periodic { pattern: vec![2, 3] };
        assert!(matches!(CellModel::from_spec(&spec), Err(Error::UnsupportedModel(_))));
    }

    #[test]
    fn outputs_render() {
        let rects = cell_rectangles(&CellModel::doubling(), 2).unwrap();
        let csv = rectangles_csv(&rects);
        assert_eq!(csv.lines().count(), 1 + 25);
        assert!(csv.contains("2-3,1-2,1/4,1/2,5/6,1/1"));
        let svg = rectangles_svg(&rects, None);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        let only = rectangles_svg(&rects, Some(&[0, 0]));
        assert_eq!(only.matches("<rect").count(), 1 + 4);
    }
}
