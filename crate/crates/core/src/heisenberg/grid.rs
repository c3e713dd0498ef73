//! Sampled functions on ℝᵖ × ℤ^q.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes −L, −L+h, …, L on each continuous axis and the box [−K, K]^q.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub p: usize,
    pub q: usize,
    pub extent: f64,
    pub step: f64,
    pub box_radius: usize,
}

impl Grid {
    pub fn new(p: usize, q: usize, extent: f64, step: f64, box_radius: usize) -> Result<Self> {
        if !(extent > 0.0 && step > 0.0 && extent.is_finite() && step.is_finite()) {
            return Err(Error::InvalidGrid(format!("extent {extent} and step {step} must be positive")));
        }
        let cells = 2.0 * extent / step;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) {
            return Err(Error::InvalidGrid(format!("2L/h = {cells} is not an integer")));
        }
        if p == 0 {
            return Err(Error::InvalidGrid("at least one continuous axis".into()));
        }
        Ok(Grid { p, q, extent, step, box_radius })
    }

    /// Points per continuous axis.
    pub fn axis_len(&self) -> usize {
        (2.0 * self.extent / self.step).round() as usize + 1
    }

    pub fn box_len(&self) -> usize {
        2 * self.box_radius + 1
    }

    pub fn continuous_len(&self) -> usize {
        self.axis_len().pow(self.p as u32)
    }

    pub fn discrete_len(&self) -> usize {
        self.box_len().pow(self.q as u32)
    }

    pub fn len(&self) -> usize {
        self.continuous_len() * self.discrete_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.step
    }

    /// Continuous multi-index of a flat continuous index, first axis slowest.
    pub fn continuous_index(&self, mut c: usize) -> Vec<usize> {
        let m = self.axis_len();
        let mut idx = vec![0; self.p];
        for a in (0..self.p).rev() {
            idx[a] = c % m;
            c /= m;
        }
        idx
    }

    pub fn continuous_point(&self, c: usize) -> Vec<f64> {
        self.continuous_index(c).into_iter().map(|k| self.node(k)).collect()
    }

    pub fn discrete_point(&self, mut d: usize) -> Vec<i64> {
        let m = self.box_len();
        let mut v = vec![0; self.q];
        for a in (0..self.q).rev() {
            v[a] = (d % m) as i64 - self.box_radius as i64;
            d /= m;
        }
        v
    }

    /// Flat discrete index of a lattice point, if inside the box.
    pub fn discrete_flat(&self, v: &[i64]) -> Option<usize> {
        let r = self.box_radius as i64;
        let mut d = 0usize;
        for &x in v {
            if x < -r || x > r {
                return None;
            }
            d = d * self.box_len() + (x + r) as usize;
        }
        Some(d)
    }

    pub fn continuous_flat(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &k| acc * self.axis_len() + k)
    }

    /// Trapezoid weight of a continuous node (without the hᵖ factor).
    pub fn weight(&self, c: usize) -> f64 {
        let last = self.axis_len() - 1;
        self.continuous_index(c).iter().map(|&k| if k == 0 || k == last { 0.5 } else { 1.0 }).product()
    }
}

/// Values indexed by (continuous node, lattice point), continuous-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn zeros(grid: Grid) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("{} values for {} grid points", values.len(), grid.len())));
        }
        if values.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidGrid("non-finite value".into()));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(&[f64], &[i64]) -> Complex64) -> Self {
        let dl = grid.discrete_len();
        let mut values = Vec::with_capacity(grid.len());
        for c in 0..grid.continuous_len() {
            let x = grid.continuous_point(c);
            for d in 0..dl {
                values.push(f(&x, &grid.discrete_point(d)));
            }
        }
        GridFunction { grid, values }
    }

    /// exp(−π|x − center|²) times the indicator of the lattice origin.
    pub fn gaussian(grid: Grid, center: &[f64]) -> Self {
        GridFunction::from_fn(grid, |x, m| {
            if m.iter().any(|&v| v != 0) {
                return Complex64::new(0.0, 0.0);
            }
            let r2: f64 = x.iter().zip(center).map(|(a, b)| (a - b) * (a - b)).sum();
            Complex64::new((-std::f64::consts::PI * r2).exp(), 0.0)
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn get(&self, c: usize, d: usize) -> Complex64 {
        self.values[c * self.grid.discrete_len() + d]
    }

    pub(crate) fn set(&mut self, c: usize, d: usize, z: Complex64) {
        let dl = self.grid.discrete_len();
        self.values[c * dl + d] = z;
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::InvalidGrid("functions live on different grids".into()));
        }
        Ok(())
    }

    /// ∫ f ḡ: trapezoid on the continuous axes, plain sum on the lattice.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let dl = self.grid.discrete_len();
        let hp = self.grid.step.powi(self.grid.p as i32);
        let mut acc = Complex64::new(0.0, 0.0);
        for c in 0..self.grid.continuous_len() {
            let w = self.grid.weight(c) * hp;
            let mut row = Complex64::new(0.0, 0.0);
            for d in 0..dl {
                row += self.values[c * dl + d] * other.values[c * dl + d].conj();
            }
            acc += row * w;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(|z| z.re.max(0.0).sqrt()).unwrap_or(f64::NAN)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(GridFunction { grid: self.grid, values })
    }

    pub fn scale(&self, z: Complex64) -> GridFunction {
        GridFunction { grid: self.grid, values: self.values.iter().map(|v| v * z).collect() }
    }

    /// x ↦ f(x − s, m − t), with multilinear interpolation when s is off the
    /// grid and zero outside the sampled region.
    pub fn translate(&self, s: &[f64], t: &[i64]) -> Result<GridFunction> {
        let g = self.grid;
        if s.len() != g.p || t.len() != g.q {
            return Err(Error::DimensionMismatch("translation does not match the grid".into()));
        }
        if let Some(a) = s.iter().position(|x| x.abs() > g.extent + 1e-12) {
            return Err(Error::OutOfGrid(format!("continuous shift {} exceeds the grid", s[a])));
        }
        if let Some(a) = t.iter().position(|x| x.unsigned_abs() as usize > 2 * g.box_radius) {
            return Err(Error::OutOfGrid(format!("lattice shift {} exceeds the box", t[a])));
        }
        let m = g.axis_len() as i64;
        // per axis: integer offset and fractional weight in units of h
        let parts: Vec<(i64, f64)> = s
            .iter()
            .map(|&x| {
                let u = x / g.step;
                let r = u.round();
                if (u - r).abs() < 1e-9 {
                    (r as i64, 0.0)
                } else {
                    let fl = u.floor();
                    (fl as i64, u - fl)
                }
            })
            .collect();
        let dl = g.discrete_len();
        let mut out = GridFunction::zeros(g);
        let corners = 1usize << g.p;
        for c in 0..g.continuous_len() {
            let idx = g.continuous_index(c);
            for d in 0..dl {
                let mv = g.discrete_point(d);
                let src: Vec<i64> = mv.iter().zip(t).map(|(a, b)| a - b).collect();
                let Some(sd) = g.discrete_flat(&src) else { continue };
                let mut acc = Complex64::new(0.0, 0.0);
                for corner in 0..corners {
                    let mut w = 1.0;
                    let mut ci = Vec::with_capacity(g.p);
                    let mut inside = true;
                    for a in 0..g.p {
                        let (off, frac) = parts[a];
                        let up = corner >> a & 1 == 1;
                        if frac == 0.0 && up {
                            w = 0.0;
                            break;
                        }
                        // sample at node idx − (off + frac): between idx−off−1 and idx−off
                        let (k, wa) = if up { (idx[a] as i64 - off - 1, frac) } else { (idx[a] as i64 - off, 1.0 - frac) };
                        if k < 0 || k >= m {
                            inside = false;
                        }
                        w *= wa;
                        ci.push(k);
                    }
                    if w == 0.0 || !inside {
                        continue;
                    }
                    let flat = g.continuous_flat(&ci.iter().map(|&k| k as usize).collect::<Vec<_>>());
                    acc += self.get(flat, sd) * w;
                }
                out.set(c, d, acc);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_shape() {
        let g = Grid::new(1, 1, 8.0, 1.0 / 64.0, 3).unwrap();
        assert_eq!(g.axis_len(), 1025);
        assert_eq!(g.box_len(), 7);
        assert_eq!(g.discrete_point(0), vec![-3]);
        assert_eq!(g.discrete_flat(&[3]), Some(6));
        assert!(Grid::new(1, 0, 1.0, 0.3, 0).is_err());
        assert!(Grid::new(1, 0, -1.0, 0.25, 0).is_err());
    }

    #[test]
    fn gaussian_norm() {
        let g = Grid::new(1, 0, 8.0, 1.0 / 64.0, 0).unwrap();
        let f = GridFunction::gaussian(g, &[0.0]);
        // ∫ exp(−2πx²) dx = 1/√2
        assert!((f.norm().powi(2) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn aligned_and_interpolated_shifts() {
        let g = Grid::new(1, 0, 8.0, 1.0 / 64.0, 0).unwrap();
        let f = GridFunction::gaussian(g, &[0.0]);
        let shifted = f.translate(&[0.25], &[]).unwrap();
        let expected = GridFunction::gaussian(g, &[0.25]);
        assert!(shifted.sub(&expected).unwrap().norm() < 1e-12);
        let off = f.translate(&[0.3], &[]).unwrap();
        let expected = GridFunction::gaussian(g, &[0.3]);
        assert!(off.sub(&expected).unwrap().norm() < 1e-3);
        assert!(matches!(f.translate(&[17.0], &[]), Err(Error::OutOfGrid(_))));
    }

    #[test]
    fn lattice_shift() {
        let g = Grid::new(1, 1, 4.0, 0.5, 2).unwrap();
        let f = GridFunction::gaussian(g, &[0.0]);
        let moved = f.translate(&[0.0], &[1]).unwrap();
        let c = g.continuous_flat(&[8]);
        assert_eq!(moved.get(c, g.discrete_flat(&[1]).unwrap()).re, 1.0);
        assert_eq!(moved.get(c, g.discrete_flat(&[0]).unwrap()).re, 0.0);
    }
}
