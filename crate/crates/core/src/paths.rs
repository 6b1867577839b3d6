//! Time grids and piecewise-linear sampled paths.

use std::io::{Read, Write};

use crate::error::{arg, Error, Result};

/// Relative slack used when deciding whether a time lies inside a grid's span.
const SPAN_TOL: f64 = 1e-12;

/// A strictly increasing set of sample times `t_0 < ... < t_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    points: Vec<f64>,
}

impl TimeGrid {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return arg("a time grid needs at least two points");
        }
        if points.iter().any(|t| !t.is_finite()) {
            return arg("time grid contains non-finite values");
        }
        if points[0] < 0.0 {
            return arg("time grid must start at a non-negative time");
        }
        if points.windows(2).any(|w| w[1] <= w[0]) {
            return arg("time grid must be strictly increasing");
        }
        Ok(Self { points })
    }

    /// `segments + 1` equally spaced points on `[0, horizon]`.
    pub fn uniform(horizon: f64, segments: usize) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return arg("horizon must be positive and finite");
        }
        if segments == 0 {
            return arg("a uniform grid needs at least one segment");
        }
        let h = horizon / segments as f64;
        let mut points: Vec<f64> = (0..=segments).map(|i| i as f64 * h).collect();
        points[segments] = horizon;
        Self::new(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segments(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.points[0]
    }

    pub fn end(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Length of the covered interval.
    pub fn horizon(&self) -> f64 {
        self.end() - self.start()
    }

    /// `|D|`, the largest spacing.
    pub fn mesh(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// True when all spacings agree to within `1e-9` relative.
    pub fn is_uniform(&self) -> bool {
        let h = self.horizon() / self.segments() as f64;
        self.points
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h)
    }

    fn span_tol(&self) -> f64 {
        SPAN_TOL * self.end().abs().max(1.0)
    }

    pub fn contains(&self, t: f64) -> bool {
        let tol = self.span_tol();
        t >= self.start() - tol && t <= self.end() + tol
    }

    /// Index `i` of the cell `[t_i, t_{i+1}]` containing `t` (clamped).
    pub fn locate(&self, t: f64) -> usize {
        let last = self.segments() - 1;
        match self.points.partition_point(|&p| p <= t) {
            0 => 0,
            k => (k - 1).min(last),
        }
    }

    /// Index of a grid point equal to `t` within span tolerance.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = self.span_tol();
        let i = self.locate(t);
        [i, i + 1]
            .into_iter()
            .find(|&j| (self.points[j] - t).abs() <= tol)
    }

    /// Sorted union of two grids, merging points closer than the span tolerance.
    pub fn union(&self, other: &TimeGrid) -> TimeGrid {
        let tol = self.span_tol().max(other.span_tol());
        let mut merged: Vec<f64> = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.points.iter().peekable(), other.points.iter().peekable());
        loop {
            let next = match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x <= y {
                        a.next();
                        x
                    } else {
                        b.next();
                        y
                    }
                }
                (Some(&&x), None) => {
                    a.next();
                    x
                }
                (None, Some(&&y)) => {
                    b.next();
                    y
                }
                (None, None) => break,
            };
            if merged.last().is_none_or(|&l| next - l > tol) {
                merged.push(next);
            }
        }
        TimeGrid { points: merged }
    }
}

/// A `d`-dimensional path sampled on a [`TimeGrid`] and interpolated linearly
/// between grid points.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    grid: TimeGrid,
    dim: usize,
    /// Row-major, one row of `dim` values per grid point.
    values: Vec<f64>,
}

impl Path {
    pub fn new(grid: TimeGrid, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return arg("path dimension must be at least 1");
        }
        if values.len() != grid.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: grid.len() * dim,
                found: values.len(),
            });
        }
        Ok(Self { grid, dim, values })
    }

    pub fn from_rows(grid: TimeGrid, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return arg("ragged path rows");
        }
        Self::new(grid, dim, rows.concat())
    }

    /// Samples `f` at each grid point.
    pub fn from_fn(grid: TimeGrid, dim: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Result<Self> {
        let mut values = Vec::with_capacity(grid.len() * dim);
        for &t in grid.points() {
            let row = f(t);
            if row.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: row.len() });
            }
            values.extend(row);
        }
        Self::new(grid, dim, values)
    }

    pub fn constant(grid: TimeGrid, value: &[f64]) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, value.len(), value.repeat(n))
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn times(&self) -> &[f64] {
        self.grid.points()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn segments(&self) -> usize {
        self.grid.segments()
    }

    /// Value at the `i`-th grid point.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    /// Increment over the `i`-th segment.
    pub fn increment(&self, i: usize, out: &mut [f64]) {
        let (a, b) = (self.point(i), self.point(i + 1));
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = y - x;
        }
    }

    /// All segment increments, row-major.
    pub fn increments(&self) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; self.segments() * d];
        for (i, chunk) in out.chunks_mut(d).enumerate() {
            self.increment(i, chunk);
        }
        out
    }

    /// Linear interpolation at time `t` (clamped to the grid span).
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let i = self.grid.locate(t);
        let (t0, t1) = (self.grid.points[i], self.grid.points[i + 1]);
        let lambda = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
        let (a, b) = (self.point(i), self.point(i + 1));
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = if lambda == 0.0 {
                *x
            } else if lambda == 1.0 {
                *y
            } else {
                x + lambda * (y - x)
            };
        }
    }

    /// Values at increasing times `ts`, all inside the grid span.
    fn eval_sorted(&self, ts: &[f64]) -> Vec<f64> {
        let mut values = vec![0.0; ts.len() * self.dim];
        for (t, row) in ts.iter().zip(values.chunks_mut(self.dim)) {
            match self.grid.index_of(*t) {
                Some(j) => row.copy_from_slice(self.point(j)),
                None => self.eval_into(*t, row),
            }
        }
        values
    }

    /// The piecewise-linear interpolant of `self` on the partition `grid`.
    ///
    /// The returned path lives on `grid` extended by this path's endpoints and
    /// agrees with `self` at every one of those points.
    pub fn pl_interpolate(&self, grid: &TimeGrid) -> Result<Path> {
        if !self.grid.contains(grid.start()) || !self.grid.contains(grid.end()) {
            return Err(Error::Domain(format!(
                "partition [{}, {}] is not inside the path domain [{}, {}]",
                grid.start(),
                grid.end(),
                self.grid.start(),
                self.grid.end()
            )));
        }
        let ends = TimeGrid { points: vec![self.grid.start(), self.grid.end()] };
        let target = grid.union(&ends);
        let values = self.eval_sorted(target.points());
        Path::new(target, self.dim, values)
    }

    /// The path on `[s, t]`, inserting interpolated endpoints when off-grid.
    pub fn restrict(&self, s: f64, t: f64) -> Result<Path> {
        if !(s < t) {
            return arg(format!("restrict needs s < t, got s = {s}, t = {t}"));
        }
        if !self.grid.contains(s) || !self.grid.contains(t) {
            return Err(Error::Domain(format!(
                "[{s}, {t}] is not inside [{}, {}]",
                self.grid.start(),
                self.grid.end()
            )));
        }
        let tol = self.grid.span_tol();
        let mut times = vec![s];
        times.extend(
            self.grid
                .points()
                .iter()
                .copied()
                .filter(|&p| p > s + tol && p < t - tol),
        );
        times.push(t);
        let values = self.eval_sorted(&times);
        Path::new(TimeGrid::new(times)?, self.dim, values)
    }

    /// Component `i` (zero-based) as a one-dimensional path.
    pub fn component(&self, i: usize) -> Path {
        let values = self.values.chunks(self.dim).map(|r| r[i]).collect();
        Path { grid: self.grid.clone(), dim: 1, values }
    }

    /// Channels of `self` followed by channels of `other`, on the union grid.
    pub fn stack(&self, other: &Path) -> Result<Path> {
        if (self.grid.start() - other.grid.start()).abs() > self.grid.span_tol()
            || (self.grid.end() - other.grid.end()).abs() > self.grid.span_tol()
        {
            return Err(Error::Domain("stacked paths must share their time span".into()));
        }
        let grid = self.grid.union(&other.grid);
        let a = self.eval_sorted(grid.points());
        let b = other.eval_sorted(grid.points());
        let dim = self.dim + other.dim;
        let values = a
            .chunks(self.dim)
            .zip(b.chunks(other.dim))
            .flat_map(|(x, y)| x.iter().chain(y).copied())
            .collect();
        Path::new(grid, dim, values)
    }

    pub fn scaled(&self, factor: f64) -> Path {
        Path {
            grid: self.grid.clone(),
            dim: self.dim,
            values: self.values.iter().map(|v| v * factor).collect(),
        }
    }

    /// Pointwise `self - other` on a shared grid.
    pub fn sub(&self, other: &Path) -> Result<Path> {
        if self.grid != other.grid || self.dim != other.dim {
            return arg("pointwise difference needs identical grids and dimensions");
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Path { grid: self.grid.clone(), dim: self.dim, values })
    }

    /// Largest Euclidean norm of a path value.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .chunks(self.dim)
            .map(|r| r.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    /// Writes `t,x1,...,xd` CSV with round-trip precision.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["t".to_string()];
        header.extend((1..=self.dim).map(|i| format!("x{i}")));
        w.write_record(&header)?;
        for (i, &t) in self.times().iter().enumerate() {
            let mut row = vec![t.to_string()];
            row.extend(self.point(i).iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Path> {
        let mut r = csv::Reader::from_reader(input);
        let header = r.headers()?.clone();
        if header.get(0).map(str::trim) != Some("t") || header.len() < 2 {
            return Err(Error::Parse("path CSV header must be `t,x1,...,xd`".into()));
        }
        let dim = header.len() - 1;
        let mut times = Vec::new();
        let mut values = Vec::new();
        for record in r.records() {
            let record = record?;
            let mut fields = record.iter().map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad number {f:?}: {e}")))
            });
            times.push(fields.next().transpose()?.unwrap_or(f64::NAN));
            for _ in 0..dim {
                values.push(
                    fields
                        .next()
                        .transpose()?
                        .ok_or_else(|| Error::Parse("short path CSV row".into()))?,
                );
            }
        }
        Path::new(TimeGrid::new(times)?, dim, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> Path {
        let grid = TimeGrid::new(vec![0.0, 0.5, 1.0]).unwrap();
        Path::new(grid, 1, vec![0.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![0.0]).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.5, 0.5]).is_err());
        assert!(TimeGrid::new(vec![-1.0, 0.5]).is_err());
        let g = TimeGrid::uniform(2.0, 4).unwrap();
        assert_eq!(g.points(), &[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(g.mesh(), 0.5);
        assert!(g.is_uniform());
        assert_eq!(g.locate(2.0), 3);
        assert_eq!(g.locate(0.7), 1);
    }

    #[test]
    fn interpolate_on_same_grid_is_identity() {
        let x = tent();
        let y = x.pl_interpolate(x.grid()).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn two_point_interpolation_drops_the_bump() {
        let x = tent();
        let d = TimeGrid::new(vec![0.0, 1.0]).unwrap();
        let y = x.pl_interpolate(&d).unwrap();
        assert_eq!(y.len(), 2);
        assert_eq!(y.eval(0.5), vec![0.0]);
    }

    #[test]
    fn interpolation_adds_missing_endpoints() {
        let x = tent();
        let d = TimeGrid::new(vec![0.25, 0.5]).unwrap();
        let y = x.pl_interpolate(&d).unwrap();
        assert_eq!(y.times(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(y.eval(0.25), vec![0.5]);
    }

    #[test]
    fn interpolation_outside_domain_fails() {
        let x = tent();
        let d = TimeGrid::new(vec![0.0, 2.0]).unwrap();
        assert!(matches!(x.pl_interpolate(&d), Err(Error::Domain(_))));
    }

    #[test]
    fn restrict_keeps_linearity() {
        let grid = TimeGrid::uniform(1.0, 4).unwrap();
        let x = Path::from_fn(grid, 1, |t| vec![3.0 * t]).unwrap();
        let r = x.restrict(0.3, 0.75).unwrap();
        assert_eq!(r.times(), &[0.3, 0.5, 0.75]);
        let slope = (r.point(2)[0] - r.point(0)[0]) / 0.45;
        assert!((slope - 3.0).abs() < 1e-12);
        assert!(x.restrict(0.5, 0.5).is_err());
        assert_eq!(x.restrict(0.0, 1.0).unwrap(), x);
    }

    #[test]
    fn csv_round_trip() {
        let grid = TimeGrid::uniform(1.0, 3).unwrap();
        let x = Path::from_fn(grid, 2, |t| vec![t.sin(), (3.0 * t).exp() / 7.0]).unwrap();
        let mut buf = Vec::new();
        x.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,x1,x2\n"));
        assert_eq!(Path::read_csv(buf.as_slice()).unwrap(), x);
    }

    #[test]
    fn stack_uses_union_grid() {
        let a = tent();
        let b = Path::new(TimeGrid::new(vec![0.0, 0.25, 1.0]).unwrap(), 1, vec![0.0, 1.0, 1.0]).unwrap();
        let z = a.stack(&b).unwrap();
        assert_eq!(z.times(), &[0.0, 0.25, 0.5, 1.0]);
        assert_eq!(z.point(1), &[0.5, 1.0]);
    }
}
