//! Orbit representations: exact matrices of `λ_x(f)` on `ℓ²(H_x)`, the
//! point-orbit representation on `ℓ²(orbit of x)`, and numeric norms.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::groupoid::{Arrow, GermSystem};
use crate::scalar::Scalar;
use crate::section::{j_eval, normal_form, Section};
use crate::topology::{Space, UPPoint};

/// Iteration cap of [`operator_norm`] per starting vector.
pub const NORM_ITERATION_CAP: usize = 100_000;

/// The arrows with source `x`, one per germ class, unit germ first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitBasis {
    pub base: UPPoint,
    pub arrows: Vec<Arrow>,
    /// The composition bound when the label set was truncated.
    pub truncated: Option<usize>,
}

pub fn orbit_basis(gs: &GermSystem, x: &UPPoint, bound: usize) -> OrbitBasis {
    OrbitBasis {
        base: x.clone(),
        arrows: gs.arrows_from(x, bound),
        truncated: (!gs.is_exact()).then_some(bound),
    }
}

/// A square matrix of exact scalars.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    pub rows: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Matrix {
        Matrix {
            rows: vec![vec![Scalar::zero(); n]; n],
        }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Matrix {
        Matrix {
            rows: rows.iter().map(|r| r.iter().map(|&v| Scalar::from_int(v)).collect()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().flatten().all(Scalar::is_zero)
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.dim();
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.rows[i][j] = (0..n).map(|k| &self.rows[i][k] * &other.rows[k][j]).sum();
            }
        }
        out
    }

    pub fn conj_transpose(&self) -> Matrix {
        let n = self.dim();
        Matrix {
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i].conj()).collect()).collect(),
        }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(|v| v.to_string()).collect()).collect();
        let width = cells.iter().flatten().map(|s| s.chars().count()).max().unwrap_or(1);
        for (i, row) in cells.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "[")?;
            for (j, c) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{c:>width$}")?;
            }
            write!(f, "]")?;
        }
        Ok(())
    }
}

/// `λ_x(f)` with entry `(a, b) = j(f)(a·b⁻¹)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMatrix {
    pub basis: OrbitBasis,
    pub matrix: Matrix,
}

pub fn lambda_matrix(gs: &GermSystem, f: &Section, x: &UPPoint, bound: usize) -> Result<OrbitMatrix> {
    let basis = orbit_basis(gs, x, bound);
    let inverses: Vec<Arrow> = basis.arrows.iter().map(|b| gs.arrow_inv(b)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(basis.arrows.len());
    for a in &basis.arrows {
        let mut row = Vec::with_capacity(inverses.len());
        for b_inv in &inverses {
            row.push(j_eval(gs, f, &gs.arrow_mul(a, b_inv)?));
        }
        rows.push(row);
    }
    Ok(OrbitMatrix {
        basis,
        matrix: Matrix { rows },
    })
}

/// The representation on `ℓ²` of the orbit of `x`:
/// entry `(y', y) = Σ { j(f)(γ) : s(γ) = y, r(γ) = y' }`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointOrbitMatrix {
    pub base: UPPoint,
    pub points: Vec<UPPoint>,
    pub matrix: Matrix,
    pub truncated: Option<usize>,
}

pub fn point_orbit_matrix(gs: &GermSystem, f: &Section, x: &UPPoint, bound: usize) -> Result<PointOrbitMatrix> {
    let basis = orbit_basis(gs, x, bound);
    let ranges: Vec<UPPoint> = basis.arrows.iter().map(|a| gs.range(a)).collect();
    let mut points: Vec<UPPoint> = Vec::new();
    let mut to_point: Vec<Arrow> = Vec::new();
    for (a, y) in basis.arrows.iter().zip(&ranges) {
        if !points.contains(y) {
            points.push(y.clone());
            to_point.push(a.clone());
        }
    }
    let n = points.len();
    let mut matrix = Matrix::zeros(n);
    for (col, a_y) in to_point.iter().enumerate() {
        let back = gs.arrow_inv(a_y)?;
        for (c, y2) in basis.arrows.iter().zip(&ranges) {
            let row = points.iter().position(|p| p == y2).expect("range recorded");
            let v = j_eval(gs, f, &gs.arrow_mul(c, &back)?);
            matrix.rows[row][col] += &v;
        }
    }
    Ok(PointOrbitMatrix {
        base: x.clone(),
        points,
        matrix,
        truncated: basis.truncated,
    })
}

/// Largest singular value of `m`, by power iteration on `m* m` from every
/// standard basis vector until the relative change drops below `tol`.
pub fn operator_norm(m: &Matrix, tol: f64) -> Result<f64> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parse(format!("tolerance must be positive, got {tol}")));
    }
    let n = m.dim();
    let a: Vec<Vec<Complex64>> = m.rows.iter().map(|r| r.iter().map(Scalar::to_c64).collect()).collect();
    let apply = |v: &[Complex64]| -> Vec<Complex64> {
        let mv: Vec<Complex64> = (0..n).map(|i| (0..n).map(|k| a[i][k] * v[k]).sum()).collect();
        (0..n).map(|i| (0..n).map(|k| a[k][i].conj() * mv[k]).sum()).collect()
    };
    let norm = |v: &[Complex64]| v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let mut best = 0.0f64;
    for start in 0..n {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[start] = Complex64::new(1.0, 0.0);
        let mut lambda = 0.0;
        let mut converged = false;
        for _ in 0..NORM_ITERATION_CAP {
            let w = apply(&v);
            let next = norm(&w);
            if next == 0.0 {
                lambda = 0.0;
                converged = true;
                break;
            }
            v = w.into_iter().map(|z| z / next).collect();
            let done = (next - lambda).abs() <= tol * next;
            lambda = next;
            if done {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations: NORM_ITERATION_CAP,
            });
        }
        best = best.max(lambda);
    }
    Ok(best.sqrt())
}

/// `max_x ‖λ_x(f)‖` over probe points, with whether it equals `‖f‖_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormProbe {
    pub value: f64,
    /// True when the label set is finite and the probes meet every orbit of
    /// a finite space; otherwise `value` is a lower bound.
    pub exact: bool,
    pub per_point: Vec<(UPPoint, f64)>,
}

/// Default probe points: every point of a finite space, otherwise one
/// sample per refinement atom of the normal form of `f`.
pub fn default_probe_points(gs: &GermSystem, f: &Section) -> Vec<UPPoint> {
    match gs.space() {
        Space::Finite(_) => gs.space().points().expect("finite space"),
        Space::Cantor(_) => normal_form(gs, f).atom_samples,
    }
}

pub fn reduced_norm_probe(
    gs: &GermSystem,
    f: &Section,
    points: &[UPPoint],
    bound: usize,
    tol: f64,
) -> Result<NormProbe> {
    let mut per_point = Vec::with_capacity(points.len());
    let mut covered: Vec<UPPoint> = Vec::new();
    for x in points {
        let m = lambda_matrix(gs, f, x, bound)?;
        covered.extend(m.basis.arrows.iter().map(|a| gs.range(a)));
        per_point.push((x.clone(), operator_norm(&m.matrix, tol)?));
    }
    let exact = gs.is_exact()
        && gs
            .space()
            .points()
            .is_some_and(|all| all.iter().all(|p| covered.contains(p)));
    Ok(NormProbe {
        value: per_point.iter().map(|(_, v)| *v).fold(0.0, f64::max),
        exact,
        per_point,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::Label;
    use crate::partial_map::PartialMap;
    use crate::section::parse_section;
    use crate::semigroup::{InverseSemigroup, MapMonoid};
    use crate::topology::OpenSet;

    fn cantor() -> Space {
        Space::cantor("01").unwrap()
    }

    fn pt(text: &str) -> UPPoint {
        UPPoint::parse(&cantor(), text).unwrap()
    }

    fn dbl() -> GermSystem {
        let s = cantor();
        GermSystem::regime_c(
            &s,
            vec!["1".into(), "g".into()],
            vec![vec![0, 1], vec![1, 0]],
            None,
            vec![PartialMap::identity(&s), PartialMap::identity(&s)],
            vec![((1, 0), OpenSet::from_regex(&s, "0*1").unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn doubled_point_orbits() {
        let gs = dbl();
        assert_eq!(orbit_basis(&gs, &pt("0(1)"), 1).arrows.len(), 1);
        assert_eq!(orbit_basis(&gs, &pt("(0)"), 1).arrows.len(), 2);
        let g = Section::delta(&gs, Label::Index(1)).unwrap();
        let m = lambda_matrix(&gs, &g, &pt("(0)"), 1).unwrap();
        assert_eq!(m.matrix, Matrix::from_ints(&[&[0, 1], &[1, 0]]));
        let f = parse_section(&gs, "(g, X) - (1, X)").unwrap();
        let m = lambda_matrix(&gs, &f, &pt("(0)"), 1).unwrap();
        assert_eq!(m.matrix, Matrix::from_ints(&[&[-1, 1], &[1, -1]]));
        let probe = reduced_norm_probe(&gs, &f, &default_probe_points(&gs, &f), 1, 1e-12).unwrap();
        assert!((probe.value - 2.0).abs() < 1e-9);
        assert!(!probe.exact);
    }

    #[test]
    fn point_orbit_kernel_on_a_point() {
        let s = Space::finite(1).unwrap();
        let z2 = InverseSemigroup::new(vec!["1".into(), "g".into()], &[vec![0, 1], vec![1, 0]], 0, None).unwrap();
        let id = PartialMap::identity(&s);
        let gs = GermSystem::regime_a(&s, z2, vec![id.clone(), id]).unwrap();
        let f = parse_section(&gs, "(1, X) - (g, X)").unwrap();
        let p = point_orbit_matrix(&gs, &f, &UPPoint::Index(0), 1).unwrap();
        assert_eq!(p.matrix, Matrix::from_ints(&[&[0]]));
        let l = lambda_matrix(&gs, &f, &UPPoint::Index(0), 1).unwrap();
        assert_eq!(l.matrix, Matrix::from_ints(&[&[1, -1], &[-1, 1]]));
    }

    #[test]
    fn swap_has_norm_one() {
        let gs = GermSystem::from_monoid(MapMonoid::symmetric(2).unwrap()).unwrap();
        let swap = gs.parse_label("[10]").unwrap();
        let f = Section::delta(&gs, swap).unwrap();
        let pts = default_probe_points(&gs, &f);
        let probe = reduced_norm_probe(&gs, &f, &pts, 1, 1e-9).unwrap();
        assert!((probe.value - 1.0).abs() < 1e-9);
        assert!(probe.exact);
        assert_eq!(operator_norm(&Matrix::zeros(3), 1e-9).unwrap(), 0.0);
        let diag = Matrix::from_ints(&[&[0, 0], &[0, 3]]);
        assert!((operator_norm(&diag, 1e-12).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn cuntz_basis_is_truncated() {
        let s = cantor();
        let v0 = PartialMap::parse(&s, &["ε -> 0".into()]).unwrap();
        let v1 = PartialMap::parse(&s, &["ε -> 1".into()]).unwrap();
        let gs = GermSystem::regime_b(&s, vec![("v0".into(), v0), ("v1".into(), v1)], 2).unwrap();
        let b = orbit_basis(&gs, &pt("(0)"), 2);
        assert_eq!(b.truncated, Some(2));
        assert_eq!(b.arrows[0], gs.unit_arrow(&pt("(0)")).unwrap());
        assert!(b.arrows.len() > 4);
    }
}
