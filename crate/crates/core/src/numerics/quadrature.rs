//! Adaptive Gauss–Kronrod (7/15) quadrature for vector-valued integrands.
//!
//! All components share one interval subdivision. The interval with the
//! largest scaled error is bisected until every component meets
//! `max(atol, rtol * max(|I|, ∫|g|))`.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub atol: f64,
    pub rtol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            atol: 1e-10,
            rtol: 1e-10,
            max_intervals: 4000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    pub intervals: usize,
}

struct Segment {
    a: f64,
    b: f64,
    val: Vec<f64>,
    abs: Vec<f64>,
    err: Vec<f64>,
    priority: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.priority == other.priority
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.priority.total_cmp(&other.priority)
    }
}

fn rule<F>(g: &mut F, a: f64, b: f64, dim: usize, buf: &mut [f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>)
where
    F: FnMut(f64, &mut [f64]),
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = vec![0.0; dim];
    let mut gauss = vec![0.0; dim];
    let mut abs = vec![0.0; dim];
    for (j, (&x, &w)) in XGK.iter().zip(&WGK).enumerate() {
        let pts: &[f64] = if x == 0.0 { &[0.0] } else { &[-1.0, 1.0] };
        for &s in pts {
            g(mid + s * half * x, buf);
            for i in 0..dim {
                kron[i] += w * buf[i];
                abs[i] += w * buf[i].abs();
                if j % 2 == 1 {
                    gauss[i] += WG[j / 2] * buf[i];
                }
            }
        }
    }
    let mut err = vec![0.0; dim];
    for i in 0..dim {
        kron[i] *= half;
        abs[i] *= half.abs();
        err[i] = (kron[i] - gauss[i] * half).abs();
    }
    (kron, abs, err)
}

/// Integrates the `dim`-component integrand `g(x, out)` over `[a, b]`.
pub fn integrate<F>(mut g: F, a: f64, b: f64, dim: usize, opts: QuadOptions) -> Result<QuadResult>
where
    F: FnMut(f64, &mut [f64]),
{
    let mut buf = vec![0.0; dim];
    let mut heap = BinaryHeap::new();
    let mut total = vec![0.0; dim];
    let mut total_abs = vec![0.0; dim];
    let mut total_err = vec![0.0; dim];

    let push = |heap: &mut BinaryHeap<Segment>, a: f64, b: f64, v: Vec<f64>, s: Vec<f64>, e: Vec<f64>| {
        let priority = e.iter().cloned().fold(0.0, f64::max);
        heap.push(Segment { a, b, val: v, abs: s, err: e, priority });
    };

    let (v, s, e) = rule(&mut g, a, b, dim, &mut buf);
    for i in 0..dim {
        total[i] = v[i];
        total_abs[i] = s[i];
        total_err[i] = e[i];
    }
    push(&mut heap, a, b, v, s, e);

    let converged = |total: &[f64], abs: &[f64], err: &[f64]| {
        (0..dim).all(|i| err[i] <= opts.atol.max(opts.rtol * total[i].abs().max(abs[i])))
    };

    while !converged(&total, &total_abs, &total_err) {
        if heap.len() >= opts.max_intervals {
            return Err(Error::QuadratureFailure(format!(
                "subdivision limit {} reached, error {:?}",
                opts.max_intervals, total_err
            )));
        }
        let seg = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (seg.a + seg.b);
        if mid <= seg.a.min(seg.b) || mid >= seg.a.max(seg.b) {
            return Err(Error::QuadratureFailure("interval collapsed below machine resolution".into()));
        }
        let (v1, s1, e1) = rule(&mut g, seg.a, mid, dim, &mut buf);
        let (v2, s2, e2) = rule(&mut g, mid, seg.b, dim, &mut buf);
        for i in 0..dim {
            total[i] += v1[i] + v2[i] - seg.val[i];
            total_abs[i] += s1[i] + s2[i] - seg.abs[i];
            total_err[i] += e1[i] + e2[i] - seg.err[i];
        }
        if total.iter().any(|v| !v.is_finite()) {
            return Err(Error::QuadratureFailure("non-finite integrand".into()));
        }
        push(&mut heap, seg.a, mid, v1, s1, e1);
        push(&mut heap, mid, seg.b, v2, s2, e2);
    }

    // Re-sum from the leaves to shed accumulated update roundoff.
    let mut values = vec![0.0; dim];
    let mut errors = vec![0.0; dim];
    let intervals = heap.len();
    for seg in heap.into_vec() {
        for i in 0..dim {
            values[i] += seg.val[i];
            errors[i] += seg.err[i];
        }
    }
    Ok(QuadResult { values, errors, intervals })
}
