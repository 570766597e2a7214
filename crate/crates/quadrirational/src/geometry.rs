//! Conic geometry in the projective plane: the intersection map on a pair of
//! conics, pencil incidence, the type I and V parametrizations, and the
//! free-point and matrix generalizations on affine spaces.
//!
//! Everything is exact. Intersections with a conic use the known-root
//! factorization: for p on q and any other point r of the line,
//! q(s·p + t·r) = 2st·B(p,r) + t²·q(r), so the second point is q(r)·p − 2B(p,r)·r.

use std::fmt;

use serde::Serialize;

use crate::bimoebius::{BiMoebiusMap, MapError, Quad};
use crate::catalog::{family, CatalogError, Family};
use crate::consistency::grid_vanishes;
use crate::exactnum::{fmt_q, qi, Field, UPoly, Q};
use crate::projline::P1;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GeometryError {
    #[error("point is not on the conic")]
    PointNotOnConic,
    #[error("line is contained in the conic")]
    LineOnConic,
    #[error("point is not on the given line")]
    PointNotOnLine,
    #[error("coincident points do not span a line")]
    CoincidentPoints,
    #[error("singular point: X = Y lies on both conics")]
    SingularPoint,
    #[error("parameter is a pole of the parametrization")]
    PoleParameter,
    #[error("degenerate position: {0}")]
    DegeneratePosition(String),
    #[error("isotropic direction: the quadratic form vanishes on X - Y")]
    IsotropicDirection,
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch")]
    DimensionMismatch,
    #[error("zero homogeneous triple")]
    ZeroPoint,
    #[error("parameter must be nonzero")]
    ZeroParameter,
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error(transparent)]
    Map(#[from] MapError),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

/// Point of the projective plane, scaled so that its last nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PlanePoint([Q; 3]);

impl PlanePoint {
    pub fn new(c: [Q; 3]) -> Result<Self> {
        let k = c.iter().rev().find(|v| !v.is_zero()).cloned().ok_or(GeometryError::ZeroPoint)?;
        Ok(PlanePoint(c.map(|v| v / &k)))
    }

    pub fn affine(w1: Q, w2: Q) -> Self {
        PlanePoint([w1, w2, qi(1)])
    }

    pub fn coords(&self) -> &[Q; 3] {
        &self.0
    }

    /// (W1, W2) when the point is finite.
    pub fn to_affine(&self) -> Option<(Q, Q)> {
        (!self.0[2].is_zero()).then(|| (self.0[0].clone(), self.0[1].clone()))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(self.0.iter().map(|v| fmt_q(v).into()).collect())
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.to_affine() {
            Some((a, b)) => write!(f, "({}, {})", fmt_q(&a), fmt_q(&b)),
            None => write!(f, "[{}:{}:{}]", fmt_q(&self.0[0]), fmt_q(&self.0[1]), fmt_q(&self.0[2])),
        }
    }
}

fn cross(a: &[Q; 3], b: &[Q; 3]) -> [Q; 3] {
    [
        &a[1] * &b[2] - &a[2] * &b[1],
        &a[2] * &b[0] - &a[0] * &b[2],
        &a[0] * &b[1] - &a[1] * &b[0],
    ]
}

fn dot(a: &[Q; 3], b: &[Q; 3]) -> Q {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn is_zero3(a: &[Q; 3]) -> bool {
    a.iter().all(|v| v.is_zero())
}

/// Line through two points, as a coefficient triple.
pub fn line_through(a: &PlanePoint, b: &PlanePoint) -> Result<[Q; 3]> {
    let l = cross(&a.0, &b.0);
    if is_zero3(&l) {
        return Err(GeometryError::CoincidentPoints);
    }
    Ok(l)
}

/// Intersection of two distinct lines.
pub fn meet(l1: &[Q; 3], l2: &[Q; 3]) -> Result<PlanePoint> {
    PlanePoint::new(cross(l1, l2)).map_err(|_| GeometryError::DegeneratePosition("lines coincide".into()))
}

/// Symmetric 3×3 matrix of a homogeneous quadratic form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Conic {
    m: [[Q; 3]; 3],
}

impl Conic {
    /// Fails unless `m` is symmetric.
    pub fn from_matrix(m: [[Q; 3]; 3]) -> Option<Self> {
        (0..3).all(|i| (0..3).all(|j| m[i][j] == m[j][i])).then_some(Conic { m })
    }

    /// c11·W1² + c12·W1W2 + c22·W2² + c1·W1 + c2·W2 + c0.
    pub fn from_affine(c11: Q, c12: Q, c22: Q, c1: Q, c2: Q, c0: Q) -> Self {
        let h = |v: Q| v / qi(2);
        let (c12, c1, c2) = (h(c12), h(c1), h(c2));
        Conic {
            m: [[c11, c12.clone(), c1.clone()], [c12, c22, c2.clone()], [c1, c2, c0]],
        }
    }

    pub fn matrix(&self) -> &[[Q; 3]; 3] {
        &self.m
    }

    pub fn bilinear_raw(&self, p: &[Q; 3], r: &[Q; 3]) -> Q {
        let mut acc = qi(0);
        for i in 0..3 {
            for j in 0..3 {
                acc += &p[i] * &self.m[i][j] * &r[j];
            }
        }
        acc
    }

    pub fn bilinear(&self, p: &PlanePoint, r: &PlanePoint) -> Q {
        self.bilinear_raw(&p.0, &r.0)
    }

    pub fn eval(&self, p: &PlanePoint) -> Q {
        self.bilinear(p, p)
    }

    pub fn contains(&self, p: &PlanePoint) -> bool {
        self.eval(p).is_zero()
    }

    pub fn det(&self) -> Q {
        let m = &self.m;
        dot(&m[0], &cross(&m[1], &m[2]))
    }

    /// Line pairs and double lines.
    pub fn is_degenerate(&self) -> bool {
        self.det().is_zero()
    }

    /// a·self + b·other.
    pub fn combine(&self, a: &Q, other: &Conic, b: &Q) -> Conic {
        Conic {
            m: std::array::from_fn(|i| std::array::from_fn(|j| a * &self.m[i][j] + b * &other.m[i][j])),
        }
    }
}

/// Projective pencil: member(λ) = λ·first + second.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConicPencil {
    pub first: Conic,
    pub second: Conic,
}

impl ConicPencil {
    pub fn member(&self, lambda: &Q) -> Conic {
        self.first.combine(lambda, &self.second, &qi(1))
    }

    /// W2(W2 − 1) = λ·W1(W1 − 1): conics through (0,0), (1,0), (0,1), (1,1).
    pub fn type_i() -> Self {
        let z = || qi(0);
        ConicPencil {
            first: Conic::from_affine(qi(-1), z(), z(), qi(1), z(), z()),
            second: Conic::from_affine(z(), z(), qi(1), z(), qi(-1), z()),
        }
    }

    /// W2 = W1² + λ: parabolas with fourfold contact at the point at infinity of the W2 axis.
    pub fn type_v() -> Self {
        let z = || qi(0);
        ConicPencil {
            first: Conic::from_affine(z(), z(), z(), z(), z(), qi(-1)),
            second: Conic::from_affine(qi(-1), z(), z(), z(), qi(1), z()),
        }
    }
}

/// Second point where the line through `p` (spanned by `line`) meets `q`;
/// `p` itself when the line is tangent.
pub fn second_intersection(q: &Conic, p: &PlanePoint, line: (&PlanePoint, &PlanePoint)) -> Result<PlanePoint> {
    if !q.contains(p) {
        return Err(GeometryError::PointNotOnConic);
    }
    let l = line_through(line.0, line.1)?;
    if !dot(&l, &p.0).is_zero() {
        return Err(GeometryError::PointNotOnLine);
    }
    let r = if is_zero3(&cross(&p.0, &line.0 .0)) { line.1 } else { line.0 };
    second_from_raw(q, &p.0, &r.0)
        .map(|c| PlanePoint::new(c).expect("nonzero by construction"))
}

// q(r)·p − 2B(p,r)·r; both terms vanish exactly when the line lies on q.
fn second_from_raw(q: &Conic, p: &[Q; 3], r: &[Q; 3]) -> Result<[Q; 3]> {
    let c = second_raw(q, p, r);
    if is_zero3(&c) {
        return Err(GeometryError::LineOnConic);
    }
    Ok(c)
}

fn second_raw(q: &Conic, p: &[Q; 3], r: &[Q; 3]) -> [Q; 3] {
    let qr = q.bilinear_raw(r, r);
    let b2 = q.bilinear_raw(p, r) * qi(2);
    std::array::from_fn(|i| &qr * &p[i] - &b2 * &r[i])
}

/// (X, Y) -> (U, V): U and V are the second intersections of the line XY with q1 and q2.
pub fn conic_map(q1: &Conic, q2: &Conic, x: &PlanePoint, y: &PlanePoint) -> Result<(PlanePoint, PlanePoint)> {
    if x == y {
        return Err(if q1.contains(x) && q2.contains(y) {
            GeometryError::SingularPoint
        } else {
            GeometryError::CoincidentPoints
        });
    }
    if !q1.contains(x) || !q2.contains(y) {
        return Err(GeometryError::PointNotOnConic);
    }
    let u = second_intersection(q1, x, (x, y))?;
    let v = second_intersection(q2, y, (x, y))?;
    Ok((u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum PencilType {
    I,
    V,
}

impl PencilType {
    pub fn pencil(self) -> ConicPencil {
        match self {
            PencilType::I => ConicPencil::type_i(),
            PencilType::V => ConicPencil::type_v(),
        }
    }

    pub fn family(self) -> Family {
        match self {
            PencilType::I => Family::FI,
            PencilType::V => Family::FV,
        }
    }
}

// Homogeneous parametrization, quadratic in (x : w).
fn param_raw(ty: PencilType, alpha: &Q, x: &Q, w: &Q) -> [Q; 3] {
    match ty {
        // ((x − α)/(x² − α), x(x − α)/(x² − α)): line of slope x through the origin
        PencilType::I => {
            let xa = x - alpha * w;
            [&xa * w, x * &xa, x * x - alpha * w * w]
        }
        // (x, x² + α)
        PencilType::V => [x * w, x * x + alpha * w * w, w * w],
    }
}

/// Point X(x) of the member Q(α). Homogeneous, so the affine poles map to
/// points at infinity; only parameters where all three coordinates vanish fail.
pub fn parametrize(ty: PencilType, alpha: &Q, x: &P1<Q>) -> Result<PlanePoint> {
    let (n, d) = x.hom();
    PlanePoint::new(param_raw(ty, alpha, &n, &d)).map_err(|_| GeometryError::PoleParameter)
}

/// Inverse of `parametrize` on Q(α).
pub fn parameter_of(ty: PencilType, alpha: &Q, p: &PlanePoint) -> Result<P1<Q>> {
    if !ty.pencil().member(alpha).contains(p) {
        return Err(GeometryError::PointNotOnConic);
    }
    let c = &p.0;
    Ok(match ty {
        PencilType::I if c[0].is_zero() && c[1].is_zero() => P1::finite(alpha.clone()),
        PencilType::I => P1::from_hom(c[1].clone(), c[0].clone()).expect("nonzero"),
        PencilType::V if c[2].is_zero() => P1::infinity(),
        PencilType::V => P1::finite(&c[0] / &c[2]),
    })
}

fn param_of_raw(ty: PencilType, c: &[Q; 3]) -> (Q, Q) {
    match ty {
        PencilType::I => (c[1].clone(), c[0].clone()),
        PencilType::V => (c[0].clone(), c[2].clone()),
    }
}

/// conic_map on Q(α) × Q(β) read through the parametrizations.
pub fn conic_map_params(ty: PencilType, alpha: &Q, beta: &Q, x: &P1<Q>, y: &P1<Q>) -> Result<(P1<Q>, P1<Q>)> {
    let pen = ty.pencil();
    let (q1, q2) = (pen.member(alpha), pen.member(beta));
    let (u, v) = conic_map(&q1, &q2, &parametrize(ty, alpha, x)?, &parametrize(ty, beta, y)?)?;
    Ok((parameter_of(ty, alpha, &u)?, parameter_of(ty, beta, &v)?))
}

/// Proves that conic_map pulled back through the parametrizations of Q(α),
/// Q(β) is F_I resp. F_V. The cross-multiplied differences are polynomials of
/// bidegree at most (4, 6) and (6, 4), so vanishing on the grid is a proof.
pub fn pullback_matches_family(ty: PencilType, alpha: &Q, beta: &Q) -> Result<bool> {
    let f = family(ty.family(), alpha, beta)?;
    let pen = ty.pencil();
    let (q1, q2) = (pen.member(alpha), pen.member(beta));
    let one = qi(1);
    let comps = |pt: &[Q]| {
        let xr = param_raw(ty, alpha, &pt[0], &one);
        let yr = param_raw(ty, beta, &pt[1], &one);
        let u = param_of_raw(ty, &second_raw(&q1, &xr, &yr));
        let v = param_of_raw(ty, &second_raw(&q2, &yr, &xr));
        let (fu, fv) = f.eval_hom(&(pt[0].clone(), one.clone()), &(pt[1].clone(), one.clone()));
        (u, v, fu, fv)
    };
    let u_ok = grid_vanishes(&[4, 6], |pt| {
        let (u, _, fu, _) = comps(pt);
        &u.0 * &fu.1 - &u.1 * &fu.0
    });
    let v_ok = grid_vanishes(&[6, 4], |pt| {
        let (_, v, _, fv) = comps(pt);
        &v.0 * &fv.1 - &v.1 * &fv.0
    });
    Ok(u_ok.is_ok() && v_ok.is_ok())
}

#[derive(Clone, Debug, Serialize)]
pub struct IncidenceReport {
    pub holds: bool,
    /// X2, Y1, X3, Z1, Y3, Z2.
    #[serde(skip)]
    pub constructed: [PlanePoint; 6],
    #[serde(skip)]
    pub x23: PlanePoint,
    #[serde(skip)]
    pub y13: PlanePoint,
    #[serde(skip)]
    pub z12: PlanePoint,
}

/// Builds the six points by pairwise conic maps and checks that
/// X3Y3 ∩ X2Z2 ∈ Q1, X3Y3 ∩ Y1Z1 ∈ Q2 and Y1Z1 ∩ X2Z2 ∈ Q3.
pub fn check_pencil_incidence(
    pencil: &ConicPencil,
    params: [&Q; 3],
    x: &PlanePoint,
    y: &PlanePoint,
    z: &PlanePoint,
) -> Result<IncidenceReport> {
    let q = params.map(|a| pencil.member(a));
    let (x2, y1) = conic_map(&q[0], &q[1], x, y).map_err(degen("X, Y"))?;
    let (x3, z1) = conic_map(&q[0], &q[2], x, z).map_err(degen("X, Z"))?;
    let (y3, z2) = conic_map(&q[1], &q[2], y, z).map_err(degen("Y, Z"))?;
    let l1 = line_through(&x3, &y3).map_err(degen("X3 Y3"))?;
    let l2 = line_through(&x2, &z2).map_err(degen("X2 Z2"))?;
    let l3 = line_through(&y1, &z1).map_err(degen("Y1 Z1"))?;
    let x23 = meet(&l1, &l2)?;
    let y13 = meet(&l1, &l3)?;
    let z12 = meet(&l3, &l2)?;
    let holds = q[0].contains(&x23) && q[1].contains(&y13) && q[2].contains(&z12);
    Ok(IncidenceReport { holds, constructed: [x2, y1, x3, z1, y3, z2], x23, y13, z12 })
}

fn degen(what: &'static str) -> impl Fn(GeometryError) -> GeometryError {
    move |e| match e {
        GeometryError::CoincidentPoints | GeometryError::SingularPoint | GeometryError::LineOnConic => {
            GeometryError::DegeneratePosition(format!("{what}: {e}"))
        }
        other => other,
    }
}

pub type Matrix = Vec<Vec<Q>>;

fn quad_form(m: &Matrix, a: &[Q], b: &[Q]) -> Q {
    let mut acc = qi(0);
    for (i, row) in m.iter().enumerate() {
        for (j, c) in row.iter().enumerate() {
            acc += &a[i] * c * &b[j];
        }
    }
    acc
}

/// Affine pencil Q(X, λ) = ⟨X, (λS + T)X⟩ + ⟨λs + t, X⟩ + λσ + τ on n-space.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AffinePencil {
    pub s_mat: Matrix,
    pub t_mat: Matrix,
    pub s: Vec<Q>,
    pub t: Vec<Q>,
    pub sigma: Q,
    pub tau: Q,
}

impl AffinePencil {
    pub fn dim(&self) -> usize {
        self.s.len()
    }

    fn check(&self) -> Result<()> {
        let n = self.dim();
        let square = |m: &Matrix| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&self.s_mat) || !square(&self.t_mat) || self.t.len() != n {
            return Err(GeometryError::DimensionMismatch);
        }
        Ok(())
    }

    pub fn eval(&self, lambda: &Q, x: &[Q]) -> Q {
        let lin: Q = self.s.iter().zip(&self.t).zip(x).map(|((s, t), xi)| (lambda * s + t) * xi).sum();
        lambda * quad_form(&self.s_mat, x, x) + quad_form(&self.t_mat, x, x) + lin + lambda * &self.sigma + &self.tau
    }

    /// The plane member as a conic (n = 2 only).
    pub fn member_conic(&self, lambda: &Q) -> Result<Conic> {
        self.check()?;
        if self.dim() != 2 {
            return Err(GeometryError::DimensionMismatch);
        }
        let a = |i: usize, j: usize| lambda * &self.s_mat[i][j] + &self.t_mat[i][j];
        let b = |i: usize| (lambda * &self.s[i] + &self.t[i]) / qi(2);
        let c = lambda * &self.sigma + &self.tau;
        let sym = |i: usize, j: usize| (a(i, j) + a(j, i)) / qi(2);
        Ok(Conic { m: [[sym(0, 0), sym(0, 1), b(0)], [sym(1, 0), sym(1, 1), b(1)], [b(0), b(1), c]] })
    }
}

/// Free-point map (X, Y) -> (X2, Y1) on n-space:
/// X2 = Y + (α−β)(⟨Y,SY⟩ + ⟨s,Y⟩ + σ)/⟨X−Y, (αS+T)(X−Y)⟩ · (X−Y), Y1 symmetric with β.
pub fn multifield_map(p: &AffinePencil, alpha: &Q, beta: &Q, x: &[Q], y: &[Q]) -> Result<(Vec<Q>, Vec<Q>)> {
    p.check()?;
    let n = p.dim();
    if x.len() != n || y.len() != n {
        return Err(GeometryError::DimensionMismatch);
    }
    let d: Vec<Q> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let form = |lam: &Q| -> Matrix {
        (0..n).map(|i| (0..n).map(|j| lam * &p.s_mat[i][j] + &p.t_mat[i][j]).collect()).collect()
    };
    let den_a = quad_form(&form(alpha), &d, &d);
    let den_b = quad_form(&form(beta), &d, &d);
    if den_a.is_zero() || den_b.is_zero() {
        return Err(GeometryError::IsotropicDirection);
    }
    let base = |z: &[Q]| quad_form(&p.s_mat, z, z) + p.s.iter().zip(z).map(|(a, b)| a * b).sum::<Q>() + &p.sigma;
    let ab = alpha - beta;
    let kx = &ab * base(y) / den_a;
    let ky = &ab * base(x) / den_b;
    let x2 = y.iter().zip(&d).map(|(yi, di)| yi + &kx * di).collect();
    let y1 = x.iter().zip(&d).map(|(xi, di)| xi + &ky * di).collect();
    Ok((x2, y1))
}

/// The n = 1 free-point map as a bi-Möbius map on CP1 × CP1.
pub fn multifield_scalar_map(p: &AffinePencil, alpha: &Q, beta: &Q) -> Result<BiMoebiusMap> {
    p.check()?;
    if p.dim() != 1 {
        return Err(GeometryError::DimensionMismatch);
    }
    let (s2, s1, s0) = (&p.s_mat[0][0], &p.s[0], &p.sigma);
    let ka = alpha * s2 + &p.t_mat[0][0];
    let kb = beta * s2 + &p.t_mat[0][0];
    let ab = alpha - beta;
    let z = || qi(0);
    let pol = |c: Vec<Q>| UPoly::new(c);
    // u = (ka·y·x − ka·y² + (α−β)(S y² + s y + σ)) / (ka·x − ka·y)
    let m: Quad = [
        pol(vec![z(), ka.clone()]),
        pol(vec![&ab * s0, &ab * s1, &ab * s2 - &ka]),
        pol(vec![ka.clone()]),
        pol(vec![z(), -ka.clone()]),
    ];
    // v = (−kb·x·y + kb·x² + (α−β)(S x² + s x + σ)) / (−kb·y + kb·x)
    let l: Quad = [
        pol(vec![z(), -kb.clone()]),
        pol(vec![&ab * s0, &ab * s1, &ab * s2 + &kb]),
        pol(vec![-kb.clone()]),
        pol(vec![z(), kb.clone()]),
    ];
    Ok(BiMoebiusMap::new(m, l)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InverseConvention {
    /// Ordinary matrix inverse of a square matrix.
    Matrix,
    /// X⁻¹ = −X/|X|² with |X|² the sum of squared entries.
    Vector,
}

fn mat_dims(a: &Matrix) -> (usize, usize) {
    (a.len(), a.first().map_or(0, |r| r.len()))
}

fn mat_lin(a: &Q, x: &Matrix, b: &Q, y: &Matrix) -> Matrix {
    x.iter().zip(y).map(|(r, s)| r.iter().zip(s).map(|(u, v)| a * u + b * v).collect()).collect()
}

/// Exact Gauss-Jordan inverse.
pub fn mat_inverse(a: &Matrix) -> Result<Matrix> {
    let (n, m) = mat_dims(a);
    if n != m || a.iter().any(|r| r.len() != n) {
        return Err(GeometryError::DimensionMismatch);
    }
    let mut rows: Vec<Vec<Q>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| r.iter().cloned().chain((0..n).map(|j| if i == j { qi(1) } else { qi(0) })).collect())
        .collect();
    let piv = crate::exactnum::rref(&mut rows);
    if piv.len() < n || piv[n - 1] >= n {
        return Err(GeometryError::SingularMatrix);
    }
    Ok(rows.into_iter().map(|r| r[n..].to_vec()).collect())
}

fn conv_inverse(x: &Matrix, conv: InverseConvention) -> Result<Matrix> {
    match conv {
        InverseConvention::Matrix => mat_inverse(x),
        InverseConvention::Vector => {
            let n2: Q = x.iter().flatten().map(|v| v * v).sum();
            if n2.is_zero() {
                return Err(GeometryError::SingularMatrix);
            }
            Ok(x.iter().map(|r| r.iter().map(|v| -v / &n2).collect()).collect())
        }
    }
}

/// X2 = −(β/α)Y + ((α−β)/α)(X⁻¹ − Y⁻¹)⁻¹, Y1 = −(α/β)X + ((α−β)/β)(X⁻¹ − Y⁻¹)⁻¹.
/// Vectors are passed as single columns.
pub fn matrix_map(alpha: &Q, beta: &Q, x: &Matrix, y: &Matrix, conv: InverseConvention) -> Result<(Matrix, Matrix)> {
    if alpha.is_zero() || beta.is_zero() {
        return Err(GeometryError::ZeroParameter);
    }
    if mat_dims(x) != mat_dims(y) {
        return Err(GeometryError::DimensionMismatch);
    }
    let diff = mat_lin(&qi(1), &conv_inverse(x, conv)?, &qi(-1), &conv_inverse(y, conv)?);
    let h = conv_inverse(&diff, conv)?;
    let ab = alpha - beta;
    let x2 = mat_lin(&(-(beta / alpha)), y, &(&ab / alpha), &h);
    let y1 = mat_lin(&(-(alpha / beta)), x, &(&ab / beta), &h);
    Ok((x2, y1))
}

/// Values on a cube for maps F_ij acting on fields attached to parameters α_i.
#[derive(Clone, Debug)]
pub struct CubeValues<V> {
    pub consistent: bool,
    /// X2, Y1, X3, Z1, Y3, Z2.
    pub first: [V; 6],
    /// X23 from the 13 face, X23 from the 12 face; likewise Y13 (12, 23) and Z12 (13, 23).
    pub x23: [V; 2],
    pub y13: [V; 2],
    pub z12: [V; 2],
}

/// Brute-force 3D consistency at one point for F(α_i, α_j)(X_i, X_j).
pub fn cube_check<V: Clone + PartialEq>(
    f: impl Fn(&Q, &Q, &V, &V) -> Result<(V, V)>,
    params: [&Q; 3],
    x: &V,
    y: &V,
    z: &V,
) -> Result<CubeValues<V>> {
    let [a1, a2, a3] = params;
    let (x2, y1) = f(a1, a2, x, y)?;
    let (x3, z1) = f(a1, a3, x, z)?;
    let (y3, z2) = f(a2, a3, y, z)?;
    let (x32, y31) = f(a1, a2, &x3, &y3)?;
    let (x23, z21) = f(a1, a3, &x2, &z2)?;
    let (y13, z12) = f(a2, a3, &y1, &z1)?;
    let consistent = x32 == x23 && y31 == y13 && z21 == z12;
    Ok(CubeValues {
        consistent,
        first: [x2, y1, x3, z1, y3, z2],
        x23: [x23, x32],
        y13: [y31, y13],
        z12: [z21, z12],
    })
}

/// Whether every point lies in the affine plane through x, y, z.
pub fn coplanar(x: &[Q], y: &[Q], z: &[Q], points: &[&[Q]]) -> bool {
    let diff = |p: &[Q]| p.iter().zip(x).map(|(a, b)| a - b).collect::<Vec<Q>>();
    let mut rows = vec![diff(y), diff(z)];
    let base = crate::exactnum::rref(&mut rows.clone()).len();
    rows.extend(points.iter().map(|p| diff(p)));
    crate::exactnum::rref(&mut rows).len() <= base.max(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ScalarRelation {
    Equal,
    /// (X2, Y1) = (−u, −v).
    NegatedOutputs,
    Other,
}

/// Compares the 1×1 matrix map with F_III(α, β) on a grid of rational points.
pub fn scalar_reduction(alpha: &Q, beta: &Q, conv: InverseConvention) -> Result<ScalarRelation> {
    let f3 = family(Family::FIII, alpha, beta)?;
    let (mut eq, mut neg, mut seen) = (true, true, 0);
    for i in 1..8i64 {
        for j in 1..8i64 {
            let (x, y) = (Q::new(i.into(), 3.into()), Q::new((-2 * j).into(), 5.into()));
            let one = |v: &Q| vec![vec![v.clone()]];
            let Ok((x2, y1)) = matrix_map(alpha, beta, &one(&x), &one(&y), conv) else { continue };
            let Ok((u, v)) = f3.eval(&P1::finite(x), &P1::finite(y)) else { continue };
            let (Some(u), Some(v)) = (u.value(), v.value()) else { continue };
            seen += 1;
            eq &= x2[0][0] == *u && y1[0][0] == *v;
            neg &= x2[0][0] == -u && y1[0][0] == -v;
        }
    }
    if seen == 0 {
        return Err(GeometryError::DegeneratePosition("no usable sample".into()));
    }
    Ok(if eq {
        ScalarRelation::Equal
    } else if neg {
        ScalarRelation::NegatedOutputs
    } else {
        ScalarRelation::Other
    })
}

/// Points and read-off parameters of the line-pair construction for the map
/// G(α, β) on L × Q_α -> M × Q_β, with base points O1 = (0,0), O2 = (1,0).
#[derive(Clone, Debug)]
pub struct LinePairConstruction {
    pub x: PlanePoint,
    pub y: PlanePoint,
    pub v_prime: PlanePoint,
    pub v: PlanePoint,
    pub y_prime: PlanePoint,
    pub u: PlanePoint,
    /// u read from U ∈ M through (1/(1+u), 1/(1+u)).
    pub u_param: Q,
    /// v read from V ∈ Q_β through ((v−β)/(v²−β), β(v−1)/(v²−β)).
    pub v_param: Q,
}

pub fn line_pair_construction(alpha: &Q, beta: &Q, x: &Q, y: &Q) -> Result<LinePairConstruction> {
    let pen = ConicPencil::type_i();
    let (qa, qb) = (pen.member(alpha), pen.member(beta));
    let o1 = PlanePoint::affine(qi(0), qi(0));
    let o2 = PlanePoint::affine(qi(1), qi(0));
    let xp = PlanePoint::new([qi(1), x.clone(), x + qi(1)]).map_err(|_| GeometryError::PoleParameter)?;
    let yp = parametrize(PencilType::I, alpha, &P1::finite(y.clone()))?;
    let v_prime = second_intersection(&qa, &yp, (&xp, &yp))?;
    let v = second_intersection(&qb, &o2, (&o2, &v_prime))?;
    let y_prime = second_intersection(&qb, &o1, (&o1, &yp))?;
    let m_line = [qi(1), qi(-1), qi(0)];
    let u = meet(&m_line, &line_through(&v, &y_prime)?)?;
    let c = u.coords();
    if c[0].is_zero() {
        return Err(GeometryError::PoleParameter);
    }
    let u_param = (&c[2] - &c[0]) / &c[0];
    let w = v.coords();
    if w[1].is_zero() {
        return Err(GeometryError::PoleParameter);
    }
    let v_param = beta * (&w[2] - &w[0]) / &w[1];
    Ok(LinePairConstruction { x: xp, y: yp, v_prime, v, y_prime, u, u_param, v_param })
}

#[derive(Clone, Debug, Serialize)]
pub struct LinePairReport {
    pub checked: usize,
    pub skipped: usize,
    /// Every checked point satisfies (u, v) = (β/α)·G(α, β)(x, y).
    pub matches_scaled: bool,
    /// Every checked point satisfies (u, v) = G(α, β)(x, y).
    pub matches_stated: bool,
}

/// Runs the construction on a rational grid and compares with G(α, β).
pub fn line_pair_check(alpha: &Q, beta: &Q, grid: usize) -> Result<LinePairReport> {
    if alpha.is_zero() {
        return Err(GeometryError::ZeroParameter);
    }
    let g = family(Family::G12, alpha, beta)?;
    let k = beta / alpha;
    let mut rep = LinePairReport { checked: 0, skipped: 0, matches_scaled: true, matches_stated: true };
    for i in 0..grid {
        for j in 0..grid {
            let x = Q::new((2 * i as i64 + 3).into(), 7.into());
            let y = Q::new((-3 * j as i64 - 2).into(), 5.into());
            let (Ok(c), Ok((gu, gv))) = (line_pair_construction(alpha, beta, &x, &y), g.eval(&P1::finite(x), &P1::finite(y))) else {
                rep.skipped += 1;
                continue;
            };
            let (Some(gu), Some(gv)) = (gu.value(), gv.value()) else {
                rep.skipped += 1;
                continue;
            };
            rep.checked += 1;
            rep.matches_stated &= c.u_param == *gu && c.v_param == *gv;
            rep.matches_scaled &= c.u_param == &k * gu && c.v_param == &k * gv;
        }
    }
    Ok(rep)
}

/// Rational with numerator in [-30, 30] and denominator in [1, 7].
pub fn random_rational(rng: &mut impl rand::Rng) -> Q {
    Q::new(rng.gen_range(-30i64..=30).into(), rng.gen_range(1i64..=7).into())
}

fn transform_conic(c: &Conic, a: &[[Q; 3]; 3]) -> Conic {
    let m = c.matrix();
    let mut out: [[Q; 3]; 3] = Default::default();
    for (i, row) in out.iter_mut().enumerate() {
        for (j, e) in row.iter_mut().enumerate() {
            for k in 0..3 {
                for l in 0..3 {
                    *e += &a[k][i] * &m[k][l] * &a[l][j];
                }
            }
        }
    }
    Conic { m: out }
}

/// A projective image AᵀQA of the type I or V pencil with three random
/// parameters and one rational point on each of the three members.
/// `None` if the draw is degenerate (singular A or a pole of the parametrization).
pub fn random_incidence_case(ty: PencilType, rng: &mut impl rand::Rng) -> Option<(ConicPencil, [Q; 3], [PlanePoint; 3])> {
    let a: [[Q; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| qi(rng.gen_range(-4..=4))));
    let params: [Q; 3] = std::array::from_fn(|_| random_rational(rng));
    let slopes: [Q; 3] = std::array::from_fn(|_| random_rational(rng));
    let mut rows: Vec<Vec<Q>> = a.iter().map(|r| r.to_vec()).collect();
    if crate::exactnum::rref(&mut rows).len() < 3 {
        return None;
    }
    let base = ty.pencil();
    let pencil = ConicPencil { first: transform_conic(&base.first, &a), second: transform_conic(&base.second, &a) };
    let mut pts = Vec::new();
    for (al, s) in params.iter().zip(&slopes) {
        let p = parametrize(ty, al, &P1::finite(s.clone())).ok()?;
        // solve A·p' = p
        let mut rows: Vec<Vec<Q>> = (0..3).map(|i| a[i].iter().cloned().chain([p.coords()[i].clone()]).collect()).collect();
        crate::exactnum::rref(&mut rows);
        pts.push(PlanePoint::new([rows[0][3].clone(), rows[1][3].clone(), rows[2][3].clone()]).ok()?);
    }
    let pts: [PlanePoint; 3] = pts.try_into().ok()?;
    Some((pencil, params, pts))
}

/// Affine pencil on n-space with random symmetric S, T (entries in [-3, 3]),
/// random s and σ, and t = 0, τ = 0.
pub fn random_affine_pencil(n: usize, rng: &mut impl rand::Rng) -> AffinePencil {
    let mut sym = || {
        let mut m = vec![vec![qi(0); n]; n];
        for i in 0..n {
            for j in i..n {
                let v = qi(rng.gen_range(-3..=3));
                m[i][j] = v.clone();
                m[j][i] = v;
            }
        }
        m
    };
    let (s_mat, t_mat) = (sym(), sym());
    AffinePencil { s_mat, t_mat, s: (0..n).map(|_| random_rational(rng)).collect(), t: vec![qi(0); n], sigma: random_rational(rng), tau: qi(0) }
}

/// SVG picture of Q(α), Q(β), the line XY and the points X, Y, U, V for a
/// type I or V pencil, sampled in the real affine plane.
pub fn svg_demo(ty: PencilType, alpha: &Q, beta: &Q, x: &Q, y: &Q) -> Result<String> {
    use num_traits::ToPrimitive;
    let pen = ty.pencil();
    let (q1, q2) = (pen.member(alpha), pen.member(beta));
    let xp = parametrize(ty, alpha, &P1::finite(x.clone()))?;
    let yp = parametrize(ty, beta, &P1::finite(y.clone()))?;
    let (up, vp) = conic_map(&q1, &q2, &xp, &yp)?;
    let (lo, hi, scale) = match ty {
        PencilType::I => (-1.5f64, 2.5f64, 100.0),
        PencilType::V => (-5.0, 5.0, 40.0),
    };
    let size = (hi - lo) * scale;
    let to_px = |a: f64, b: f64| ((a - lo) * scale, size - (b - lo) * scale);
    let f = |v: &Q| v.to_f64().unwrap_or(f64::NAN);
    let curve = |a: &Q, color: &str| {
        let mut path = String::new();
        let mut pen_down = false;
        for k in 0..=2000 {
            let t = -20.0 + 40.0 * k as f64 / 2000.0;
            let a = f(a);
            let (w1, w2) = match ty {
                PencilType::I => ((t - a) / (t * t - a), t * (t - a) / (t * t - a)),
                PencilType::V => (t, t * t + a),
            };
            let inside = w1.is_finite() && w2.is_finite() && (lo..=hi).contains(&w1) && (lo..=hi).contains(&w2);
            if inside {
                let (px, py) = to_px(w1, w2);
                path.push_str(&format!("{}{px:.2},{py:.2} ", if pen_down { "L" } else { "M" }));
            }
            pen_down = inside;
        }
        format!("<path d=\"{path}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n")
    };
    let dot = |p: &PlanePoint, label: &str| match p.to_affine() {
        Some((a, b)) => {
            let (px, py) = to_px(f(&a), f(&b));
            format!("<circle cx=\"{px:.2}\" cy=\"{py:.2}\" r=\"3\"/><text x=\"{:.2}\" y=\"{:.2}\">{label}</text>\n", px + 5.0, py - 5.0)
        }
        None => String::new(),
    };
    let mut out = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{size:.0}\" height=\"{size:.0}\">\n");
    out += &curve(alpha, "steelblue");
    out += &curve(beta, "darkorange");
    if let (Some((a1, b1)), Some((a2, b2))) = (xp.to_affine(), yp.to_affine()) {
        let (p1, p2) = (to_px(f(&a1), f(&b1)), to_px(f(&a2), f(&b2)));
        let (dx, dy) = (p2.0 - p1.0, p2.1 - p1.1);
        out += &format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"gray\"/>\n",
            p1.0 - 10.0 * dx,
            p1.1 - 10.0 * dy,
            p1.0 + 10.0 * dx,
            p1.1 + 10.0 * dy
        );
    }
    for (p, l) in [(&xp, "X"), (&yp, "Y"), (&up, "U"), (&vp, "V")] {
        out += &dot(p, l);
    }
    out += "</svg>\n";
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::qf;

    #[test]
    fn parabola_second_point() {
        let q = ConicPencil::type_v().member(&qi(3));
        let p = PlanePoint::affine(qi(2), qi(7));
        let r = second_intersection(&q, &p, (&p, &PlanePoint::affine(qi(1), qi(2)))).unwrap();
        assert_eq!(r, PlanePoint::affine(qi(3), qi(12)));
    }

    #[test]
    fn parametrizations() {
        let p = parametrize(PencilType::I, &qi(2), &P1::finite(qi(3))).unwrap();
        assert_eq!(p, PlanePoint::affine(qf(1, 7), qf(3, 7)));
        let p = parametrize(PencilType::V, &qi(3), &P1::finite(qi(2))).unwrap();
        assert_eq!(p, PlanePoint::affine(qi(2), qi(7)));
    }

    #[test]
    fn inverse_of_two_by_two() {
        let a = vec![vec![qi(1), qi(2)], vec![qi(3), qi(4)]];
        let inv = mat_inverse(&a).unwrap();
        assert_eq!(inv, vec![vec![qi(-2), qi(1)], vec![qf(3, 2), qf(-1, 2)]]);
        assert_eq!(mat_inverse(&vec![vec![qi(1), qi(2)], vec![qi(2), qi(4)]]), Err(GeometryError::SingularMatrix));
    }
}
