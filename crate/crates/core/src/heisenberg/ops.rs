//! The right action of the generators U_l, the A-valued inner product, and
//! metaplectic lifts of block-diagonal symmetries.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};

use super::geometry::{j0, ModuleGeometry};
use super::grid::{Grid, GridFunction};
use crate::action::CyclicAction;
use crate::error::{Error, Result};
use crate::linalg::{IntMatrix, ScalarMatrix};

/// e(t) = exp(2πit).
pub fn e(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (t - t.round()))
}

/// T(l) split into the translation part T′ and the modulation part T″.
fn split_t(geom: &ModuleGeometry, l: &[i64]) -> Result<(Vec<f64>, Vec<i64>, Vec<f64>)> {
    let (p, q) = (geom.p(), geom.q());
    let tl = geom.t_of(l)?;
    let fl: Vec<f64> = tl.iter().map(|x| x.to_f64()).collect::<Result<_>>()?;
    let shift: Vec<f64> = fl[..p].to_vec();
    let lattice: Vec<i64> = tl[2 * p..2 * p + q]
        .iter()
        .map(|x| x.as_integer().and_then(|v| v.to_i64()).ok_or_else(|| Error::InvariantViolation("lattice part of T(l) is not integral".into())))
        .collect::<Result<_>>()?;
    let mut modulation: Vec<f64> = fl[p..2 * p].to_vec();
    modulation.extend_from_slice(&fl[2 * p + q..]);
    Ok((shift, lattice, modulation))
}

fn check_grid(f: &GridFunction, geom: &ModuleGeometry) -> Result<()> {
    let g = f.grid();
    if g.p != geom.p() || g.q != geom.q() {
        return Err(Error::DimensionMismatch(format!(
            "grid is over ℝ^{} × ℤ^{}, module needs ℝ^{} × ℤ^{}",
            g.p,
            g.q,
            geom.p(),
            geom.q()
        )));
    }
    Ok(())
}

/// Multiplies by x ↦ c·e(sign·⟨x, ξ⟩), pairing ℝᵖ × ℤ^q with ξ.
fn modulate(f: &GridFunction, xi: &[f64], sign: f64, c: Complex64) -> GridFunction {
    let g = *f.grid();
    let mut out = GridFunction::zeros(g);
    let dl = g.discrete_len();
    let disc: Vec<f64> = (0..dl)
        .map(|d| g.discrete_point(d).iter().zip(&xi[g.p..]).map(|(&m, x)| m as f64 * x).sum())
        .collect();
    for c_idx in 0..g.continuous_len() {
        let x = g.continuous_point(c_idx);
        let cont: f64 = x.iter().zip(&xi[..g.p]).map(|(a, b)| a * b).sum();
        for (d, dv) in disc.iter().enumerate() {
            out.set(c_idx, d, f.get(c_idx, d) * c * e(sign * (cont + dv)));
        }
    }
    out
}

/// (fU_l)(x) = e(−T′·T″/2) e(⟨x, T″⟩) f(x − T′).
pub fn act_u(f: &GridFunction, l: &[i64], geom: &ModuleGeometry) -> Result<GridFunction> {
    check_grid(f, geom)?;
    let (shift, lattice, modulation) = split_t(geom, l)?;
    let moved = f.translate(&shift, &lattice)?;
    let prime: Vec<f64> = shift.iter().copied().chain(lattice.iter().map(|&m| m as f64)).collect();
    let dot: f64 = prime.iter().zip(&modulation).map(|(a, b)| a * b).sum();
    Ok(modulate(&moved, &modulation, 1.0, e(-dot / 2.0)))
}

/// ⟨f, g⟩_A(l) = e(−T′·T″/2) ∫ e(−⟨x, T″⟩) g(x + T′) f̄(x) dx.
pub fn inner_a(f: &GridFunction, g: &GridFunction, l: &[i64], geom: &ModuleGeometry) -> Result<Complex64> {
    check_grid(f, geom)?;
    check_grid(g, geom)?;
    let (shift, lattice, modulation) = split_t(geom, l)?;
    let neg_shift: Vec<f64> = shift.iter().map(|x| -x).collect();
    let neg_lattice: Vec<i64> = lattice.iter().map(|x| -x).collect();
    let moved = g.translate(&neg_shift, &neg_lattice)?;
    let prime: Vec<f64> = shift.iter().copied().chain(lattice.iter().map(|&m| m as f64)).collect();
    let dot: f64 = prime.iter().zip(&modulation).map(|(a, b)| a * b).sum();
    modulate(&moved, &modulation, -1.0, e(-dot / 2.0)).inner(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaplecticKind {
    Identity,
    Parity,
    /// f ↦ ∫ f(x) e(−xξ) dx, for p = 1.
    Fourier,
    /// f ↦ ∫ f(x) e(xξ) dx, for p = 1.
    InverseFourier,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetaplecticOp {
    pub kind: MetaplecticKind,
    pub phase: Complex64,
}

impl MetaplecticOp {
    pub fn new(kind: MetaplecticKind) -> Self {
        MetaplecticOp { kind, phase: Complex64::new(1.0, 0.0) }
    }

    pub fn with_phase(kind: MetaplecticKind, phase: Complex64) -> Result<Self> {
        if (phase.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvariantViolation(format!("phase {phase} is not a unit scalar")));
        }
        Ok(MetaplecticOp { kind, phase })
    }

    /// Reads off the operator from T₁₁W₁T₁₁⁻¹, which is W₁ in the
    /// coordinates where the module acts on ℝᵖ.
    pub fn for_action(act: &CyclicAction, geom: &ModuleGeometry) -> Result<Self> {
        let (w1, _) = split_w(act.w(), geom)?;
        let t11 = geom.t11();
        let m = t11.mul(&ScalarMatrix::from_int(&w1))?.mul(&t11.inverse()?)?;
        let k = 2 * geom.p();
        let id = ScalarMatrix::identity(k);
        let j = ScalarMatrix::from_int(&j0(geom.p()));
        let kind = if m == id {
            MetaplecticKind::Identity
        } else if m == id.neg() {
            MetaplecticKind::Parity
        } else if geom.p() == 1 && m == j.neg() {
            MetaplecticKind::Fourier
        } else if geom.p() == 1 && m == j {
            MetaplecticKind::InverseFourier
        } else {
            return Err(Error::UnsupportedW1(format!("{:?}", w1.to_i64_rows())));
        };
        Ok(MetaplecticOp::new(kind))
    }

    fn inverse_kind(&self) -> MetaplecticKind {
        match self.kind {
            MetaplecticKind::Fourier => MetaplecticKind::InverseFourier,
            MetaplecticKind::InverseFourier => MetaplecticKind::Fourier,
            k => k,
        }
    }
}

/// W₁ and W₄ of a W that is block diagonal for the split n = 2p + q.
fn split_w(w: &IntMatrix, geom: &ModuleGeometry) -> Result<(IntMatrix, IntMatrix)> {
    let (n, k) = (geom.n(), 2 * geom.p());
    if w.rows() != n || w.cols() != n {
        return Err(Error::DimensionMismatch(format!("W is {}×{}, n = {n}", w.rows(), w.cols())));
    }
    if !w.block(0, k, k, n).is_zero() || !w.block(k, n, 0, k).is_zero() {
        return Err(Error::NotBlockDiagonal(k));
    }
    Ok((w.block(0, k, 0, k), w.block(k, n, k, n)))
}

/// W₄ as (image index, sign) per column, if it is a signed permutation.
fn signed_permutation(w4: &IntMatrix) -> Result<Vec<(usize, i64)>> {
    let q = w4.rows();
    let mut cols = Vec::with_capacity(q);
    let mut used = vec![false; q];
    for c in 0..q {
        let nz: Vec<usize> = (0..q).filter(|&r| !w4[(r, c)].is_zero()).collect();
        let ok = nz.len() == 1 && !used[nz[0]] && (w4[(nz[0], c)] == BigInt::from(1) || w4[(nz[0], c)] == BigInt::from(-1));
        if !ok {
            return Err(Error::InvariantViolation("W₄ must be a signed permutation".into()));
        }
        used[nz[0]] = true;
        cols.push((nz[0], w4[(nz[0], c)].to_i64().unwrap_or(1)));
    }
    Ok(cols)
}

/// √det W₄ on the principal branch: 1 or i.
fn sqrt_det(w4: &IntMatrix) -> Complex64 {
    if w4.rows() > 0 && w4.det() < BigInt::zero() {
        Complex64::new(0.0, 1.0)
    } else {
        Complex64::new(1.0, 0.0)
    }
}

/// (x′, m) ↦ f(x′, W₄m); signed permutations keep the box in place.
fn pull_lattice(f: &GridFunction, w4: &[(usize, i64)], inverse: bool) -> GridFunction {
    let g = *f.grid();
    let mut out = GridFunction::zeros(g);
    for d in 0..g.discrete_len() {
        let m = g.discrete_point(d);
        let mut img = vec![0i64; g.q];
        for (c, &(r, s)) in w4.iter().enumerate() {
            if inverse {
                // (W₄⁻¹m)_c = s·m_r
                img[c] = s * m[r];
            } else {
                img[r] += s * m[c];
            }
        }
        let src = g.discrete_flat(&img).expect("signed permutation preserves the box");
        for c in 0..g.continuous_len() {
            out.set(c, d, f.get(c, src));
        }
    }
    out
}

fn fourier(f: &GridFunction, sign: f64) -> GridFunction {
    let g: Grid = *f.grid();
    let m = g.axis_len();
    let h = g.step;
    let nodes: Vec<f64> = (0..m).map(|k| g.node(k)).collect();
    let weights: Vec<f64> = (0..m).map(|k| g.weight(k) * h).collect();
    let mut out = GridFunction::zeros(g);
    let mut kernel = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..m {
        for (k, slot) in kernel.iter_mut().enumerate() {
            *slot = e(sign * nodes[j] * nodes[k]) * weights[k];
        }
        for d in 0..g.discrete_len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, w) in kernel.iter().enumerate() {
                acc += f.get(k, d) * w;
            }
            out.set(j, d, acc);
        }
    }
    out
}

fn apply_kind(f: &GridFunction, kind: MetaplecticKind) -> GridFunction {
    let g = *f.grid();
    match kind {
        MetaplecticKind::Identity => f.clone(),
        MetaplecticKind::Parity => {
            let last = g.axis_len() - 1;
            let mut out = GridFunction::zeros(g);
            for c in 0..g.continuous_len() {
                let mirrored: Vec<usize> = g.continuous_index(c).iter().map(|&k| last - k).collect();
                let src = g.continuous_flat(&mirrored);
                for d in 0..g.discrete_len() {
                    out.set(c, d, f.get(src, d));
                }
            }
            out
        }
        MetaplecticKind::Fourier => fourier(f, -1.0),
        MetaplecticKind::InverseFourier => fourier(f, 1.0),
    }
}

fn check_op(op: &MetaplecticOp, f: &GridFunction) -> Result<()> {
    if matches!(op.kind, MetaplecticKind::Fourier | MetaplecticKind::InverseFourier) && f.grid().p != 1 {
        return Err(Error::UnsupportedW1("the Fourier operator needs p = 1".into()));
    }
    Ok(())
}

/// (fW)(x₁, x₂) = phase·√det W₄·(𝓜f♯)(x₁) with f♯(x′) = f(x′, W₄x₂).
pub fn act_w(f: &GridFunction, act: &CyclicAction, geom: &ModuleGeometry, op: &MetaplecticOp) -> Result<GridFunction> {
    check_grid(f, geom)?;
    check_op(op, f)?;
    let (_, w4) = split_w(act.w(), geom)?;
    let perm = signed_permutation(&w4)?;
    let sharp = pull_lattice(f, &perm, false);
    Ok(apply_kind(&sharp, op.kind).scale(op.phase * sqrt_det(&w4)))
}

/// The inverse of [`act_w`], i.e. the lift of W⁻¹ paired with it.
pub fn act_w_inverse(
    f: &GridFunction,
    act: &CyclicAction,
    geom: &ModuleGeometry,
    op: &MetaplecticOp,
) -> Result<GridFunction> {
    check_grid(f, geom)?;
    check_op(op, f)?;
    let (_, w4) = split_w(act.w(), geom)?;
    let perm = signed_permutation(&w4)?;
    let c = (op.phase * sqrt_det(&w4)).conj();
    let undone = apply_kind(f, op.inverse_kind()).scale(c);
    Ok(pull_lattice(&undone, &perm, true))
}

fn w_times(act: &CyclicAction, l: &[i64]) -> Result<Vec<i64>> {
    let v: Vec<BigInt> = l.iter().map(|&x| BigInt::from(x)).collect();
    act.w()
        .mul_vec(&v)
        .iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::InvariantViolation("W·l overflows".into())))
        .collect()
}

/// ‖(fW)U_l − (fU_{Wl})W‖ / ‖f‖.
pub fn verify_covariance(
    f: &GridFunction,
    act: &CyclicAction,
    l: &[i64],
    geom: &ModuleGeometry,
    op: &MetaplecticOp,
) -> Result<f64> {
    let lhs = act_u(&act_w(f, act, geom, op)?, l, geom)?;
    let rhs = act_w(&act_u(f, &w_times(act, l)?, geom)?, act, geom, op)?;
    Ok(lhs.sub(&rhs)?.norm() / f.norm())
}

/// |⟨fW, g⟩ − ⟨f, gW⁻¹⟩| / (‖f‖‖g‖).
pub fn verify_unitarity(
    f: &GridFunction,
    g: &GridFunction,
    act: &CyclicAction,
    geom: &ModuleGeometry,
    op: &MetaplecticOp,
) -> Result<f64> {
    let lhs = act_w(f, act, geom, op)?.inner(g)?;
    let rhs = f.inner(&act_w_inverse(g, act, geom, op)?)?;
    Ok((lhs - rhs).norm() / (f.norm() * g.norm()))
}

/// max over `ls` of |⟨f, gW⟩_A(l) − ⟨fW⁻¹, g⟩_A(Wl)| / (‖f‖‖g‖).
pub fn verify_inner_compat(
    f: &GridFunction,
    g: &GridFunction,
    act: &CyclicAction,
    ls: &[Vec<i64>],
    geom: &ModuleGeometry,
    op: &MetaplecticOp,
) -> Result<f64> {
    let gw = act_w(g, act, geom, op)?;
    let f_inv = act_w_inverse(f, act, geom, op)?;
    let scale = f.norm() * g.norm();
    let mut worst: f64 = 0.0;
    for l in ls {
        let lhs = inner_a(f, &gw, l, geom)?;
        let rhs = inner_a(&f_inv, g, &w_times(act, l)?, geom)?;
        worst = worst.max((lhs - rhs).norm() / scale);
    }
    Ok(worst)
}

/// ‖(fU_j)U_k − e(θ_jk)(fU_k)U_j‖ / ‖f‖ for 0-based generators j, k.
pub fn verify_commutation(f: &GridFunction, j: usize, k: usize, geom: &ModuleGeometry) -> Result<f64> {
    let n = geom.n();
    if j >= n || k >= n {
        return Err(Error::DimensionMismatch(format!("generator index out of range for n = {n}")));
    }
    let unit = |i: usize| -> Vec<i64> { (0..n).map(|a| i64::from(a == i)).collect() };
    let theta_jk = geom.theta().get(j, k).to_f64()?;
    let lhs = act_u(&act_u(f, &unit(j), geom)?, &unit(k), geom)?;
    let rhs = act_u(&act_u(f, &unit(k), geom)?, &unit(j), geom)?.scale(e(theta_jk));
    Ok(lhs.sub(&rhs)?.norm() / f.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::standard_w;
    use crate::arith::{Rational, Scalar};
    use crate::heisenberg::build_geometry;
    use crate::skew::SkewMatrix;

    fn quarter() -> SkewMatrix {
        SkewMatrix::from_upper(2, [((1, 2), Scalar::ratio(1, 4))]).unwrap()
    }

    fn grid(q: usize, step: f64) -> Grid {
        Grid::new(1, q, 8.0, step, 2).unwrap()
    }

    #[test]
    fn zero_shift_is_identity() {
        let geom = build_geometry(&quarter(), 1).unwrap();
        let f = GridFunction::gaussian(grid(0, 1.0 / 16.0), &[0.3]);
        assert_eq!(act_u(&f, &[0, 0], &geom).unwrap(), f);
    }

    #[test]
    fn first_generator_translates() {
        let geom = build_geometry(&quarter(), 1).unwrap();
        let g = grid(0, 1.0 / 16.0);
        let f = GridFunction::gaussian(g, &[0.0]);
        // T(e₁) = (1/4, 0): a pure translation
        let moved = act_u(&f, &[1, 0], &geom).unwrap();
        assert!(moved.sub(&GridFunction::gaussian(g, &[0.25])).unwrap().norm() < 1e-14);
    }

    #[test]
    fn generators_commute_up_to_theta() {
        let geom = build_geometry(&quarter(), 1).unwrap();
        let f = GridFunction::gaussian(grid(0, 1.0 / 16.0), &[0.0]);
        assert!(verify_commutation(&f, 0, 1, &geom).unwrap() < 1e-12);
        assert!(verify_commutation(&f, 1, 0, &geom).unwrap() < 1e-12);
    }

    #[test]
    fn inner_product_identities() {
        let geom = build_geometry(&quarter(), 1).unwrap();
        let g = grid(0, 1.0 / 16.0);
        let f = GridFunction::gaussian(g, &[0.1]);
        let h = GridFunction::gaussian(g, &[-0.2]);
        let at0 = inner_a(&f, &f, &[0, 0], &geom).unwrap();
        assert!((at0.re - f.norm().powi(2)).abs() < 1e-12 && at0.im.abs() < 1e-12);
        for l in [[1, 0], [0, 1], [1, -1], [-2, 1]] {
            let neg = [-l[0], -l[1]];
            let a = inner_a(&f, &h, &l, &geom).unwrap();
            let b = act_u(&h, &neg, &geom).unwrap().inner(&f).unwrap();
            assert!((a - b).norm() < 1e-12);
            let c = inner_a(&h, &f, &neg, &geom).unwrap().conj();
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn flip_is_parity() {
        let theta = quarter();
        let geom = build_geometry(&theta, 1).unwrap();
        let act = CyclicAction::new(standard_w(2).unwrap(), theta, 24).unwrap();
        let op = MetaplecticOp::for_action(&act, &geom).unwrap();
        assert_eq!(op.kind, MetaplecticKind::Parity);
        let g = grid(0, 1.0 / 16.0);
        let f = GridFunction::gaussian(g, &[0.5]);
        assert_eq!(act_w(&f, &act, &geom, &op).unwrap(), GridFunction::gaussian(g, &[-0.5]));
        for l in [[1, 0], [0, 1], [1, 1]] {
            assert!(verify_covariance(&f, &act, &l, &geom, &op).unwrap() < 1e-12);
        }
    }

    #[test]
    fn flip_twice_is_phase_squared() {
        let theta = quarter();
        let geom = build_geometry(&theta, 1).unwrap();
        let act = CyclicAction::new(standard_w(2).unwrap(), theta, 24).unwrap();
        let phase = e(0.1);
        let op = MetaplecticOp::with_phase(MetaplecticKind::Parity, phase).unwrap();
        let f = GridFunction::gaussian(grid(0, 1.0 / 16.0), &[0.7]);
        let twice = act_w(&act_w(&f, &act, &geom, &op).unwrap(), &act, &geom, &op).unwrap();
        assert!(twice.sub(&f.scale(phase * phase)).unwrap().norm() < 1e-14);
    }

    #[test]
    fn covariance_ignores_global_phase() {
        let theta = SkewMatrix::from_upper(3, [((1, 2), Scalar::ratio(1, 4)), ((1, 3), Scalar::ratio(1, 3)), ((2, 3), Scalar::ratio(1, 5))])
            .unwrap();
        let geom = build_geometry(&theta, 1).unwrap();
        let act = CyclicAction::new(IntMatrix::identity(3).neg(), theta, 24).unwrap();
        let g = grid(1, 1.0 / 16.0);
        let f = GridFunction::gaussian(g, &[0.2]);
        for phase in [Complex64::new(1.0, 0.0), e(0.37)] {
            let op = MetaplecticOp::with_phase(MetaplecticKind::Parity, phase).unwrap();
            for l in [[1, 0, 0], [0, 1, 1], [1, -1, -1]] {
                assert!(verify_covariance(&f, &act, &l, &geom, &op).unwrap() < 1e-12);
            }
            let h = GridFunction::gaussian(g, &[-0.4]);
            assert!(verify_unitarity(&f, &h, &act, &geom, &op).unwrap() < 1e-12);
        }
        assert!(MetaplecticOp::with_phase(MetaplecticKind::Parity, Complex64::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn gaussian_is_fourier_fixed() {
        let theta = quarter();
        let half = ScalarMatrix::identity(2).scale(&Rational::new(1.into(), 2.into()));
        let geom = ModuleGeometry::with_t11(&theta, 1, half).unwrap();
        let act = CyclicAction::new(standard_w(4).unwrap(), theta, 24).unwrap();
        let op = MetaplecticOp::for_action(&act, &geom).unwrap();
        assert_eq!(op.kind, MetaplecticKind::Fourier);
        let f = GridFunction::gaussian(grid(0, 1.0 / 16.0), &[0.0]);
        assert!(act_w(&f, &act, &geom, &op).unwrap().sub(&f).unwrap().norm() < 1e-3);
        let back = act_w_inverse(&act_w(&f, &act, &geom, &op).unwrap(), &act, &geom, &op).unwrap();
        assert!(back.sub(&f).unwrap().norm() < 1e-10);
    }

    #[test]
    fn unsupported_block_rejected() {
        let theta = SkewMatrix::from_upper(2, [((1, 2), Scalar::ratio(1, 3))]).unwrap();
        let geom = build_geometry(&theta, 1).unwrap();
        let act = CyclicAction::new(standard_w(3).unwrap(), theta, 24).unwrap();
        assert!(matches!(MetaplecticOp::for_action(&act, &geom), Err(Error::UnsupportedW1(_))));
    }
}
