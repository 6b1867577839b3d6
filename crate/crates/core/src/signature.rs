//! Exact truncated signatures of piecewise-linear paths.
//!
//! A linear segment with increment `v` has signature `exp(v)`, whose level-`k`
//! part is `v^{⊗k} / k!`. Signatures of piecewise-linear paths are products of
//! segment exponentials (Chen's identity), so everything here is exact up to
//! floating point; quadrature appears only in tests.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{arg, Error, Result};
use crate::paths::Path;
use crate::words::Word;

/// Highest supported truncation level.
pub const MAX_LEVEL: usize = 5;

/// Truncated signature: dense coefficients for every word of length `<= level`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignatureTensor {
    dim: usize,
    level: usize,
    coeffs: Vec<f64>,
    interval: (f64, f64),
}

/// Level and alphabet size of a truncated signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureParams {
    pub level: usize,
    pub dim: usize,
}

impl SignatureParams {
    pub fn new(level: usize, dim: usize) -> Result<Self> {
        if level == 0 || level > MAX_LEVEL {
            return arg(format!("signature level must be in 1..={MAX_LEVEL}, got {level}"));
        }
        if dim == 0 {
            return arg("signature dimension must be at least 1");
        }
        Ok(Self { level, dim })
    }
}

fn level_offset(dim: usize, k: usize) -> usize {
    (0..k).map(|j| dim.pow(j as u32)).sum()
}

fn check_level(level: usize) -> Result<()> {
    if level > MAX_LEVEL {
        return arg(format!("signature level {level} exceeds the cap {MAX_LEVEL}"));
    }
    Ok(())
}

impl SignatureTensor {
    /// The unit `1 + 0 + ... + 0`, the signature of a constant path.
    pub fn identity(dim: usize, level: usize) -> Self {
        let mut coeffs = vec![0.0; level_offset(dim, level + 1)];
        coeffs[0] = 1.0;
        Self { dim, level, coeffs, interval: (0.0, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn interval(&self) -> (f64, f64) {
        self.interval
    }

    pub fn with_interval(mut self, s: f64, t: f64) -> Self {
        self.interval = (s, t);
        self
    }

    /// Coefficients of words of length exactly `k`, in [`Word::all_of_length`] order.
    pub fn level_slice(&self, k: usize) -> &[f64] {
        let o = level_offset(self.dim, k);
        &self.coeffs[o..o + self.dim.pow(k as u32)]
    }

    fn level_slice_mut(&mut self, k: usize) -> &mut [f64] {
        let o = level_offset(self.dim, k);
        let n = self.dim.pow(k as u32);
        &mut self.coeffs[o..o + n]
    }

    fn word_index(&self, w: &Word) -> Result<usize> {
        if w.len() > self.level {
            return arg(format!("word {w} longer than truncation level {}", self.level));
        }
        w.check_alphabet(self.dim)?;
        let local = w
            .letters()
            .iter()
            .fold(0usize, |acc, &l| acc * self.dim + (l as usize - 1));
        Ok(level_offset(self.dim, w.len()) + local)
    }

    /// `<S, w>`.
    pub fn coefficient(&self, w: &Word) -> Result<f64> {
        Ok(self.coeffs[self.word_index(w)?])
    }

    /// All `(word, coefficient)` pairs, shortest words first.
    pub fn iter(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        Word::all_up_to(self.dim, self.level).into_iter().zip(self.coeffs.iter().copied())
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Right-multiplies in place by the segment exponential `exp(v)`.
    pub fn mul_segment(&mut self, v: &[f64]) {
        let mut scratch = Scratch::default();
        self.mul_segment_with(v, &mut scratch);
    }

    /// As [`mul_segment`](Self::mul_segment) with caller-provided buffers.
    pub fn mul_segment_with(&mut self, v: &[f64], scratch: &mut Scratch) {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        // new_k = sum_j a_j ⊗ v^{k-j}/(k-j)!, evaluated by Horner from the top
        // level down so that lower levels are still the old ones.
        for k in (1..=self.level).rev() {
            let (acc, tmp) = (&mut scratch.a, &mut scratch.b);
            acc.clear();
            acc.push(self.coeffs[0]);
            for r in 1..=k {
                let c = 1.0 / (k - r + 1) as f64;
                tmp.clear();
                for &b in acc.iter() {
                    let bc = b * c;
                    tmp.extend(v.iter().map(|&x| bc * x));
                }
                let a_r = self.level_slice(r);
                if r < k {
                    for (t, a) in tmp.iter_mut().zip(a_r) {
                        *t += a;
                    }
                }
                std::mem::swap(acc, tmp);
            }
            for (dst, add) in self.level_slice_mut(k).iter_mut().zip(acc.iter()) {
                *dst += add;
            }
        }
    }

    /// Inverse in the truncated tensor algebra (for group-like elements this is
    /// the signature of the reversed path).
    pub fn inverse(&self) -> SignatureTensor {
        // (1 + a)^{-1} = sum_k (-a)^k with a the part above level 0.
        let mut nil = self.clone();
        nil.coeffs[0] = 0.0;
        let mut result = SignatureTensor::identity(self.dim, self.level);
        let mut power = SignatureTensor::identity(self.dim, self.level);
        for k in 1..=self.level {
            power = tensor_mul(&power, &nil);
            let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
            for (r, p) in result.coeffs.iter_mut().zip(&power.coeffs) {
                *r += sign * p;
            }
        }
        result.interval = (self.interval.1, self.interval.0);
        result
    }

    /// Writes `word,value` rows; the empty word is written as `e`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["word", "value"])?;
        for (word, value) in self.iter() {
            w.write_record([word.to_string(), value.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format of [`write_csv`](Self::write_csv) for alphabet size `dim`.
    pub fn read_csv<R: Read>(input: R, dim: usize) -> Result<SignatureTensor> {
        let mut r = csv::Reader::from_reader(input);
        let mut entries = Vec::new();
        for record in r.records() {
            let record = record?;
            let word: Word = record
                .get(0)
                .ok_or_else(|| Error::Parse("missing word column".into()))?
                .parse()?;
            let value: f64 = record
                .get(1)
                .ok_or_else(|| Error::Parse("missing value column".into()))?
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bad value: {e}")))?;
            entries.push((word, value));
        }
        let level = entries.iter().map(|(w, _)| w.len()).max().unwrap_or(0);
        check_level(level)?;
        let mut sig = SignatureTensor::identity(dim, level);
        sig.coeffs.iter_mut().for_each(|c| *c = f64::NAN);
        for (w, v) in entries {
            let i = sig.word_index(&w)?;
            sig.coeffs[i] = v;
        }
        if sig.coeffs.iter().any(|c| c.is_nan()) {
            return Err(Error::Parse("signature CSV is missing words".into()));
        }
        Ok(sig)
    }
}

/// Reusable buffers for [`SignatureTensor::mul_segment_with`].
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    a: Vec<f64>,
    b: Vec<f64>,
}

fn tensor_mul(a: &SignatureTensor, b: &SignatureTensor) -> SignatureTensor {
    let d = a.dim;
    let mut out = SignatureTensor::identity(d, a.level);
    out.coeffs[0] = 0.0;
    for k in 0..=a.level {
        let dst = level_offset(d, k);
        for j in 0..=k {
            let (x, y) = (a.level_slice(j), b.level_slice(k - j));
            let ny = y.len();
            for (ix, &xv) in x.iter().enumerate() {
                if xv == 0.0 {
                    continue;
                }
                let base = dst + ix * ny;
                for (iy, &yv) in y.iter().enumerate() {
                    out.coeffs[base + iy] += xv * yv;
                }
            }
        }
    }
    out
}

/// Signature of the linear path with increment `v`: `<S, w> = prod v_{i_l} / |w|!`.
pub fn segment_signature(v: &[f64], level: usize) -> Result<SignatureTensor> {
    check_level(level)?;
    if v.is_empty() {
        return arg("increment must have at least one component");
    }
    let mut s = SignatureTensor::identity(v.len(), level);
    s.mul_segment(v);
    Ok(s.with_interval(0.0, 1.0))
}

/// Chen product: `<ab, w> = sum_{uv = w} <a, u><b, v>`.
pub fn chen_product(a: &SignatureTensor, b: &SignatureTensor) -> Result<SignatureTensor> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim, found: b.dim });
    }
    if a.level != b.level {
        return arg(format!("truncation levels differ: {} vs {}", a.level, b.level));
    }
    Ok(tensor_mul(a, b).with_interval(a.interval.0, b.interval.1))
}

/// Exact level-`n` signature of the piecewise-linear path `x` over `[s, t]`.
pub fn path_signature(x: &Path, s: f64, t: f64, level: usize) -> Result<SignatureTensor> {
    check_level(level)?;
    if s > t {
        return arg(format!("path_signature needs s <= t, got s = {s}, t = {t}"));
    }
    let mut sig = SignatureTensor::identity(x.dim(), level);
    if s == t {
        if !x.grid().contains(s) {
            return Err(Error::Domain(format!("time {s} outside the path domain")));
        }
        return Ok(sig.with_interval(s, t));
    }
    let piece = x.restrict(s, t)?;
    let mut scratch = Scratch::default();
    let mut v = vec![0.0; x.dim()];
    for i in 0..piece.segments() {
        piece.increment(i, &mut v);
        sig.mul_segment_with(&v, &mut scratch);
    }
    Ok(sig.with_interval(s, t))
}

/// `<S(x)_{s,t}, w>` computed from the level-`|w|` signature.
pub fn signature_coefficient(x: &Path, w: &Word, s: f64, t: f64) -> Result<f64> {
    w.check_alphabet(x.dim())?;
    if w.is_empty() {
        return Ok(1.0);
    }
    path_signature(x, s, t, w.len())?.coefficient(w)
}

/// Iterated integral of a single word over a piecewise-linear path given by
/// its segment increments (`stride` channels per segment). Position `l` of the
/// word integrates channel `channels[l]`.
///
/// Runs the Chen recursion restricted to the prefixes of the word, so the cost
/// is `O(segments * k^2)` instead of `O(segments * d^k)`.
pub fn word_integral(increments: &[f64], stride: usize, channels: &[usize]) -> f64 {
    let k = channels.len();
    if k == 0 {
        return 1.0;
    }
    let mut prefix = vec![0.0; k + 1];
    prefix[0] = 1.0;
    for seg in increments.chunks_exact(stride) {
        // prefix[l] <- sum_{m <= l} prefix[m] * prod_{m < r <= l} v_{c_r} / (l - m)!
        for l in (1..=k).rev() {
            let mut prod = 1.0;
            let mut add = 0.0;
            for m in (0..l).rev() {
                prod *= seg[channels[m]] / (l - m) as f64;
                add += prefix[m] * prod;
            }
            prefix[l] += add;
        }
    }
    prefix[k]
}

/// `∫_{s<r_1<...<r_k<t} dx^{i_1} ... dh^{i_j} ... dx^{i_k}` for piecewise-linear
/// `x` and `h`, with `j` one-based. Both paths are refined to their union grid
/// first, which keeps the value exact.
pub fn mixed_iterated_integral(
    x: &Path,
    h: &Path,
    w: &Word,
    j: usize,
    s: f64,
    t: f64,
) -> Result<f64> {
    if w.is_empty() || j == 0 || j > w.len() {
        return arg(format!("position {j} is not a letter position of word {w}"));
    }
    w.check_alphabet(x.dim())?;
    w.check_alphabet(h.dim())?;
    if s > t {
        return arg(format!("mixed integral needs s <= t, got s = {s}, t = {t}"));
    }
    let z = x.stack(h)?;
    if s == t {
        return Ok(0.0);
    }
    let z = z.restrict(s, t)?;
    let channels: Vec<usize> = w
        .letters()
        .iter()
        .enumerate()
        .map(|(pos, &l)| {
            let c = l as usize - 1;
            if pos + 1 == j {
                x.dim() + c
            } else {
                c
            }
        })
        .collect();
    Ok(word_integral(&z.increments(), z.dim(), &channels))
}

/// Empirical constant of the Young translation bound on `[s, t]`:
///
/// `|∫ dx..dh..dx| / [(1 + |||x|||_{α,k-1}^{k-1}) (t-s)^{α(k-1)} ||h||_{q-var;[s,t]}]`
///
/// where `k = |w|` counts the `h` letter, so `k - 1` letters integrate `x`. The
/// Hölder norm of `x` is taken over the grid pairs of `x` restricted to
/// `[s, t]`. A vanishing denominator yields `0`.
#[allow(clippy::too_many_arguments)]
pub fn young_translation_ratio(
    x: &Path,
    h: &Path,
    w: &Word,
    j: usize,
    s: f64,
    t: f64,
    alpha: f64,
    q: f64,
) -> Result<f64> {
    let numer = mixed_iterated_integral(x, h, w, j, s, t)?.abs();
    if s == t {
        return Ok(0.0);
    }
    let xl = w.len() - 1;
    let x_norm = if xl == 0 {
        0.0
    } else {
        let params = crate::norms::HolderNormParams::new(alpha, xl, PairSet::AllGridPairs)?;
        crate::norms::holder_signature_norm(&x.restrict(s, t)?, &params)?
    };
    let h_var = crate::norms::p_variation(h, q, s, t)?;
    let denom = (1.0 + x_norm.powi(xl as i32)) * (t - s).powf(alpha * xl as f64) * h_var;
    if denom == 0.0 {
        return Ok(0.0);
    }
    Ok(numer / denom)
}

/// Which `(s, t)` pairs of grid points a supremum ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSet {
    /// Every pair `t_i < t_j` of grid points.
    #[default]
    AllGridPairs,
    /// Pairs `(t_i, t_{i + 2^l})` plus the full interval: `O(m log m)` pairs.
    Dyadic,
}

impl PairSet {
    /// Index pairs `(i, j)` with `i < j <= segments`.
    pub fn pairs(&self, segments: usize) -> Vec<(usize, usize)> {
        match self {
            PairSet::AllGridPairs => (0..segments)
                .flat_map(|i| (i + 1..=segments).map(move |j| (i, j)))
                .collect(),
            PairSet::Dyadic => {
                let mut out = Vec::new();
                let mut step = 1;
                while step <= segments {
                    out.extend((0..=segments - step).map(|i| (i, i + step)));
                    step *= 2;
                }
                if !out.contains(&(0, segments)) {
                    out.push((0, segments));
                }
                out
            }
        }
    }
}

/// Prefix signatures `S_{0,t_j}` and their inverses.
fn prefix_signatures(x: &Path, level: usize) -> (Vec<SignatureTensor>, Vec<SignatureTensor>) {
    let d = x.dim();
    let mut fwd = Vec::with_capacity(x.len());
    let mut inv = Vec::with_capacity(x.len());
    let mut s = SignatureTensor::identity(d, level);
    let mut r = SignatureTensor::identity(d, level);
    let mut v = vec![0.0; d];
    let mut scratch = Scratch::default();
    fwd.push(s.clone());
    inv.push(r.clone());
    for i in 0..x.segments() {
        x.increment(i, &mut v);
        s.mul_segment_with(&v, &mut scratch);
        // S_{0,t}^{-1} = exp(-v) ⊗ S_{0,t_prev}^{-1}
        let neg: Vec<f64> = v.iter().map(|a| -a).collect();
        let mut e = SignatureTensor::identity(d, level);
        e.mul_segment_with(&neg, &mut scratch);
        r = tensor_mul(&e, &r);
        fwd.push(s.clone());
        inv.push(r.clone());
    }
    (fwd, inv)
}

/// Maximum of `score(i, j, S(x)_{t_i,t_j}, S(y)_{t_i,t_j})` over a pair set, for
/// paths on one grid. Runs in parallel; the result is independent of thread
/// count.
pub(crate) fn max_over_pairs_joint<F>(
    x: &Path,
    y: Option<&Path>,
    level: usize,
    set: PairSet,
    score: F,
) -> f64
where
    F: Fn(usize, usize, &SignatureTensor, Option<&SignatureTensor>) -> f64 + Sync,
{
    let m = x.segments();
    let d = x.dim();
    match set {
        PairSet::AllGridPairs => {
            let xi = x.increments();
            let yi = y.map(Path::increments);
            (0..m)
                .into_par_iter()
                .map(|i| {
                    let mut sx = SignatureTensor::identity(d, level);
                    let mut sy = y.map(|_| SignatureTensor::identity(d, level));
                    let mut scratch = Scratch::default();
                    let mut best = 0.0f64;
                    for j in i + 1..=m {
                        sx.mul_segment_with(&xi[(j - 1) * d..j * d], &mut scratch);
                        if let (Some(sy), Some(yi)) = (sy.as_mut(), yi.as_ref()) {
                            sy.mul_segment_with(&yi[(j - 1) * d..j * d], &mut scratch);
                        }
                        best = best.max(score(i, j, &sx, sy.as_ref()));
                    }
                    best
                })
                .reduce(|| 0.0, f64::max)
        }
        PairSet::Dyadic => {
            let (xf, xr) = prefix_signatures(x, level);
            let yp = y.map(|y| prefix_signatures(y, level));
            PairSet::Dyadic
                .pairs(m)
                .into_par_iter()
                .map(|(i, j)| {
                    let sx = tensor_mul(&xr[i], &xf[j]);
                    let sy = yp.as_ref().map(|(f, r)| tensor_mul(&r[i], &f[j]));
                    score(i, j, &sx, sy.as_ref())
                })
                .reduce(|| 0.0, f64::max)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths::TimeGrid;

    fn zigzag() -> Path {
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        Path::from_rows(
            grid,
            &[
                vec![0.0, 0.0],
                vec![0.3, -0.1],
                vec![0.1, 0.4],
                vec![-0.2, 0.2],
                vec![0.5, 0.6],
            ],
        )
        .unwrap()
    }

    #[test]
    fn zero_increment_gives_identity() {
        let s = segment_signature(&[0.0, 0.0], 3).unwrap();
        assert_eq!(s.coefficients()[0], 1.0);
        assert!(s.coefficients()[1..].iter().all(|&c| c == 0.0));
    }

    #[test]
    fn one_dimensional_segment_is_power_over_factorial() {
        let s = segment_signature(&[2.0], 2).unwrap();
        assert_eq!(s.coefficient(&Word::from([1])).unwrap(), 2.0);
        assert_eq!(s.coefficient(&Word::from([1, 1])).unwrap(), 2.0);
    }

    #[test]
    fn diagonal_segment_is_symmetric() {
        let s = segment_signature(&[1.0, 1.0], 2).unwrap();
        assert_eq!(s.coefficient(&Word::from([1, 2])).unwrap(), 0.5);
        assert_eq!(s.coefficient(&Word::from([2, 1])).unwrap(), 0.5);
    }

    #[test]
    fn segment_matches_closed_form_at_level_five() {
        let v = [0.7, -1.3, 0.4];
        let s = segment_signature(&v, 5).unwrap();
        for (w, c) in s.iter() {
            let prod: f64 = w.letters().iter().map(|&l| v[l as usize - 1]).product();
            let fact: f64 = (1..=w.len()).map(|k| k as f64).product();
            assert!((c - prod / fact).abs() < 1e-15, "{w}");
        }
    }

    #[test]
    fn chen_unit_and_collinear_concatenation() {
        let v = [0.4, -0.9];
        let a = segment_signature(&v, 4).unwrap();
        let id = SignatureTensor::identity(2, 4);
        assert_eq!(chen_product(&a, &id).unwrap().coefficients(), a.coefficients());
        let twice = chen_product(&a, &a).unwrap();
        let direct = segment_signature(&[0.8, -1.8], 4).unwrap();
        for (x, y) in twice.coefficients().iter().zip(direct.coefficients()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn chen_rejects_mismatches() {
        let a = segment_signature(&[1.0, 2.0], 2).unwrap();
        let b = segment_signature(&[1.0, 2.0, 3.0], 2).unwrap();
        let c = segment_signature(&[1.0, 2.0], 3).unwrap();
        assert!(matches!(chen_product(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(chen_product(&a, &c).is_err());
    }

    #[test]
    fn level_cap_enforced() {
        assert!(segment_signature(&[1.0], 6).is_err());
        assert!(SignatureParams::new(6, 2).is_err());
        assert!(SignatureParams::new(0, 2).is_err());
    }

    #[test]
    fn path_signature_is_multiplicative() {
        let x = zigzag();
        let whole = path_signature(&x, 0.1, 0.9, 4).unwrap();
        let left = path_signature(&x, 0.1, 0.37, 4).unwrap();
        let right = path_signature(&x, 0.37, 0.9, 4).unwrap();
        let prod = chen_product(&left, &right).unwrap();
        for (a, b) in whole.coefficients().iter().zip(prod.coefficients()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(path_signature(&x, 0.5, 0.5, 3).unwrap(), SignatureTensor::identity(2, 3).with_interval(0.5, 0.5));
        assert!(path_signature(&x, 0.6, 0.5, 3).is_err());
    }

    #[test]
    fn single_segment_path_matches_segment_signature() {
        let grid = TimeGrid::uniform(1.0, 1).unwrap();
        let x = Path::from_rows(grid, &[vec![0.0, 0.0, 0.0], vec![0.5, -0.25, 2.0]]).unwrap();
        let a = path_signature(&x, 0.0, 1.0, 5).unwrap();
        let b = segment_signature(&[0.5, -0.25, 2.0], 5).unwrap();
        assert_eq!(a.coefficients(), b.coefficients());
    }

    #[test]
    fn coefficient_accessor_closed_forms() {
        let x = zigzag();
        let (s, t) = (0.2, 0.8);
        let (a, b) = (x.eval(s), x.eval(t));
        let inc = b[1] - a[1];
        let c1 = signature_coefficient(&x, &Word::from([2]), s, t).unwrap();
        assert!((c1 - inc).abs() < 1e-15);
        let c2 = signature_coefficient(&x, &Word::from([2, 2]), s, t).unwrap();
        assert!((c2 - 0.5 * inc * inc).abs() < 1e-14);
        assert_eq!(signature_coefficient(&x, &Word::from([1, 2]), 0.4, 0.4).unwrap(), 0.0);
    }

    #[test]
    fn inverse_is_reverse_path() {
        let x = zigzag();
        let s = path_signature(&x, 0.0, 1.0, 3).unwrap();
        let prod = chen_product(&s, &s.inverse()).unwrap();
        assert!((prod.coefficients()[0] - 1.0).abs() < 1e-15);
        assert!(prod.coefficients()[1..].iter().all(|c| c.abs() < 1e-14));
    }

    #[test]
    fn word_integral_matches_dense_signature() {
        let x = zigzag();
        let full = path_signature(&x, 0.0, 1.0, 4).unwrap();
        let inc = x.increments();
        for (w, c) in full.iter() {
            let ch: Vec<usize> = w.letters().iter().map(|&l| l as usize - 1).collect();
            assert!((word_integral(&inc, 2, &ch) - c).abs() < 1e-14, "{w}");
        }
    }

    #[test]
    fn mixed_integral_special_cases() {
        let x = zigzag();
        let h = Path::from_fn(TimeGrid::uniform(1.0, 3).unwrap(), 2, |t| vec![t * t, (4.0 * t).sin()])
            .unwrap();
        let (s, t) = (0.15, 0.85);
        let w1 = Word::from([2]);
        let m = mixed_iterated_integral(&x, &h, &w1, 1, s, t).unwrap();
        assert!((m - (h.eval(t)[1] - h.eval(s)[1])).abs() < 1e-14);
        let w = Word::from([1, 2, 1]);
        for j in 1..=3 {
            let same = mixed_iterated_integral(&x, &x, &w, j, s, t).unwrap();
            let sig = signature_coefficient(&x, &w, s, t).unwrap();
            assert!((same - sig).abs() < 1e-14);
        }
        assert!(mixed_iterated_integral(&x, &h, &w, 4, s, t).is_err());
        assert!(mixed_iterated_integral(&x, &h, &w, 0, s, t).is_err());
    }

    #[test]
    fn signature_csv_round_trip() {
        let s = segment_signature(&[0.1, 0.2], 3).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("word,value\ne,1\n1,0.1\n"));
        let back = SignatureTensor::read_csv(buf.as_slice(), 2).unwrap();
        assert_eq!(back.coefficients(), s.coefficients());
    }

    #[test]
    fn dyadic_pairs_cover_all_scales() {
        let pairs = PairSet::Dyadic.pairs(6);
        assert!(pairs.contains(&(0, 1)));
        assert!(pairs.contains(&(2, 6)));
        assert!(pairs.contains(&(0, 6)));
        assert!(!pairs.contains(&(0, 3)));
        assert_eq!(PairSet::AllGridPairs.pairs(4).len(), 10);
    }
}
