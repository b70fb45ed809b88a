//! Lifts of conformal maps of C^3 u {oo} to 8x8 matrices acting on
//! [xi, W] in the 4-vector coordinates.

use nalgebra::{DMatrix, SMatrix};
use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};

use crate::clifford6::{self as cl, M4};
use crate::error::{Error, Result};
use crate::linalg::{self, RMat};
use crate::spinor::SpinorEven;
use crate::twistor::{self, TwistorPoint};

pub type M8 = SMatrix<C64, 8, 8>;

/// Boundary map on C^3 u {oo}.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Mobius {
    /// xi' = A xi, z' = R(conj A) z.
    Rotation { su4: Vec<Vec<C64>> },
    /// z' = r^2 z.
    Dilation { r: f64 },
    /// z' = z - c.
    Translation { c: [C64; 3] },
    /// z' = -conj(z) / |z|^2.
    Inversion,
    /// Applied first to last.
    Composite { steps: Vec<Mobius> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConformalLift {
    pub x: M8,
    pub mobius: Mobius,
}

impl Serialize for ConformalLift {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Out<'a> {
            matrix: Vec<Vec<[f64; 2]>>,
            mobius: &'a Mobius,
        }
        let matrix = (0..8).map(|i| (0..8).map(|j| [self.x[(i, j)].re, self.x[(i, j)].im]).collect()).collect();
        Out { matrix, mobius: &self.mobius }.serialize(ser)
    }
}

fn m4_from_vec(v: &[Vec<C64>]) -> M4 {
    M4::from_fn(|i, j| v[i][j])
}

fn from_blocks(a: &M4, b: &M4, c: &M4, d: &M4) -> M8 {
    let mut x = M8::zeros();
    x.fixed_view_mut::<4, 4>(0, 0).copy_from(a);
    x.fixed_view_mut::<4, 4>(0, 4).copy_from(b);
    x.fixed_view_mut::<4, 4>(4, 0).copy_from(c);
    x.fixed_view_mut::<4, 4>(4, 4).copy_from(d);
    x
}

fn check_su4(m: &M4) -> Result<()> {
    let u = (m * m.adjoint() - M4::identity()).norm();
    let d = (m.determinant() - C64::new(1.0, 0.0)).norm();
    if u > 1e-10 || d > 1e-10 {
        return Err(Error::NotSpecialUnitary(format!("unitarity {u:.2e}, det {d:.2e}")));
    }
    Ok(())
}

/// R in SO(6) with M(R z) = D M(z) D^T.
pub fn rotation_from_su4(d: &M4) -> Result<RMat> {
    check_su4(d)?;
    let mut r = RMat::zeros(6, 6);
    for k in 0..6 {
        let mut e = [0.0; 6];
        e[k] = 1.0;
        let img = d * cl::m_matrix(&cl::point_from_real(&e)).m * d.transpose();
        let z = cl::extract_z(&img).ok_or(Error::PatternViolation)?;
        for (i, v) in linalg::point_to_real(&z).into_iter().enumerate() {
            r[(i, k)] = v;
        }
    }
    Ok(r)
}

fn apply_rotation(r: &RMat, z: &[C64; 3]) -> [C64; 3] {
    let x = linalg::point_to_real(z);
    let y: Vec<f64> = (0..6).map(|i| (0..6).map(|k| r[(i, k)] * x[k]).sum()).collect();
    cl::point_from_real(&y)
}

pub fn lift_rotation(a: &M4) -> Result<ConformalLift> {
    check_su4(a)?;
    let z = M4::zeros();
    let su4 = (0..4).map(|i| (0..4).map(|j| a[(i, j)]).collect()).collect();
    Ok(ConformalLift { x: from_blocks(a, &z, &z, &a.map(|c| c.conj())), mobius: Mobius::Rotation { su4 } })
}

pub fn lift_dilation(r: f64) -> Result<ConformalLift> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidScale(r));
    }
    let z = M4::zeros();
    let id = M4::identity();
    let x = from_blocks(&(id * C64::new(1.0 / r, 0.0)), &z, &z, &(id * C64::new(r, 0.0)));
    Ok(ConformalLift { x, mobius: Mobius::Dilation { r } })
}

pub fn lift_translation(c: &[C64; 3]) -> ConformalLift {
    let z = M4::zeros();
    let id = M4::identity();
    let x = from_blocks(&id, &z, &(-cl::m_matrix(c).m), &id);
    ConformalLift { x, mobius: Mobius::Translation { c: *c } }
}

pub fn lift_inversion() -> ConformalLift {
    let z = M4::zeros();
    let id = M4::identity();
    ConformalLift { x: from_blocks(&z, &id, &id, &z), mobius: Mobius::Inversion }
}

impl ConformalLift {
    pub fn identity() -> Self {
        lift_dilation(1.0).expect("r = 1")
    }

    pub fn blocks(&self) -> (M4, M4, M4, M4) {
        (
            self.x.fixed_view::<4, 4>(0, 0).into_owned(),
            self.x.fixed_view::<4, 4>(0, 4).into_owned(),
            self.x.fixed_view::<4, 4>(4, 0).into_owned(),
            self.x.fixed_view::<4, 4>(4, 4).into_owned(),
        )
    }

    /// Max entry of A^T C + C^T A, B^T D + D^T B and A^T D + C^T B - I.
    pub fn membership_residual(&self) -> f64 {
        let (a, b, c, d) = self.blocks();
        let r1 = a.transpose() * c + c.transpose() * a;
        let r2 = b.transpose() * d + d.transpose() * b;
        let r3 = a.transpose() * d + c.transpose() * b - M4::identity();
        [r1, r2, r3].iter().flat_map(|m| m.iter().map(|v| v.norm())).fold(0.0, f64::max)
    }

    /// `self` after `first`.
    pub fn after(&self, first: &ConformalLift) -> ConformalLift {
        let mut steps = match &first.mobius {
            Mobius::Composite { steps } => steps.clone(),
            m => vec![m.clone()],
        };
        match &self.mobius {
            Mobius::Composite { steps: s } => steps.extend(s.iter().cloned()),
            m => steps.push(m.clone()),
        }
        ConformalLift { x: self.x * first.x, mobius: Mobius::Composite { steps } }
    }
}

impl Mobius {
    pub fn map(&self, z: &[C64; 3]) -> Result<[C64; 3]> {
        Ok(self.map_spinor(None, z)?.1)
    }

    /// Image of (spinor, point); the spinor is ignored when `None`.
    fn map_spinor(&self, xi: Option<[C64; 4]>, z: &[C64; 3]) -> Result<(Option<[C64; 4]>, [C64; 3])> {
        match self {
            Mobius::Rotation { su4 } => {
                let a = m4_from_vec(su4);
                let r = rotation_from_su4(&a.map(|c| c.conj()))?;
                Ok((xi.map(|v| cl::mul(&a, &v)), apply_rotation(&r, z)))
            }
            Mobius::Dilation { r } => Ok((xi, z.map(|c| c * (r * r)))),
            Mobius::Translation { c } => Ok((xi, [z[0] - c[0], z[1] - c[1], z[2] - c[2]])),
            Mobius::Inversion => {
                let n2 = cl::norm2(z);
                if n2 < 1e-300 {
                    return Err(Error::PoleOfMobius);
                }
                let w = xi.map(|v| cl::mul(&cl::m_matrix(z).m, &v));
                Ok((w, z.map(|c| -c.conj() / n2)))
            }
            Mobius::Composite { steps } => {
                let mut cur = (xi, *z);
                for s in steps {
                    cur = s.map_spinor(cur.0, &cur.1)?;
                }
                Ok(cur)
            }
        }
    }

    /// Transformed spinor and point.
    pub fn transform(&self, s: &SpinorEven, z: &[C64; 3]) -> Result<(SpinorEven, [C64; 3])> {
        let (xi, w) = self.map_spinor(Some(cl::xi_to_4vec(s.components())), z)?;
        Ok((SpinorEven::new(3, cl::xi_from_4vec(&xi.unwrap()))?, w))
    }
}

fn to8(p: &TwistorPoint) -> [C64; 8] {
    let (a, b) = (cl::xi_to_4vec(&p.xi), cl::w_to_4vec(&p.w));
    [a[0], a[1], a[2], a[3], b[0], b[1], b[2], b[3]]
}

fn from8(v: &[C64; 8]) -> Result<TwistorPoint> {
    let xi = cl::xi_from_4vec(&[v[0], v[1], v[2], v[3]]);
    let w = cl::w_from_4vec(&[v[4], v[5], v[6], v[7]]);
    TwistorPoint::new(3, xi, w)
}

/// Applies the lift through the 4-vector bridge. A vanishing xi-half in the
/// output marks the fiber at infinity.
pub fn apply(l: &ConformalLift, p: &TwistorPoint) -> Result<TwistorPoint> {
    let v = to8(p);
    let mut out = [C64::new(0.0, 0.0); 8];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, x) in v.iter().enumerate() {
            *o += l.x[(i, j)] * x;
        }
    }
    let q = from8(&out)?;
    let r = q.quadric_residual();
    if r > 1e-8 {
        return Err(Error::OffQuadricOutput(r));
    }
    Ok(q)
}

pub fn equivariance_residual(l: &ConformalLift, s: &SpinorEven, z: &[C64; 3]) -> Result<f64> {
    let (s2, z2) = l.mobius.transform(s, z)?;
    let lhs = apply(l, &twistor::embed(s, z)?)?;
    let rhs = twistor::embed(&s2, &z2)?;
    Ok(linalg::chordal(&lhs.to_vec(), &rhs.to_vec()))
}

pub fn as_dmatrix(x: &M8) -> DMatrix<C64> {
    DMatrix::from_fn(8, 8, |i, j| x[(i, j)])
}
