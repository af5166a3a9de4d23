//! Reference model built from scratch: explicit Pauli algebra, Unruh lift with
//! region II traced out, Kraus matrices written out by hand, and kernels from
//! the spin vector in the m-ordered basis (|m=-1/2>, |m=+1/2>).

use qpd_core::algebra::{c, kron, partial_trace, re};
use qpd_core::ComplexMatrix;

fn m2(a: [[(f64, f64); 2]; 2]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [c(a[0][0].0, a[0][0].1), c(a[0][1].0, a[0][1].1)],
        [c(a[1][0].0, a[1][0].1), c(a[1][1].0, a[1][1].1)],
    ])
    .unwrap()
}

pub fn sx() -> ComplexMatrix {
    m2([[(0., 0.), (1., 0.)], [(1., 0.), (0., 0.)]])
}

pub fn sy() -> ComplexMatrix {
    m2([[(0., 0.), (0., -1.)], [(0., 1.), (0., 0.)]])
}

pub fn sz() -> ComplexMatrix {
    m2([[(1., 0.), (0., 0.)], [(0., 0.), (-1., 0.)]])
}

fn add(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let data = a.entries().iter().zip(b.entries()).map(|(x, y)| x + y).collect();
    ComplexMatrix::from_vec(a.rows(), a.cols(), data).unwrap()
}

fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b).unwrap()
}

pub fn x_state(c1: f64, c2: f64, c3: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    for (ci, s) in [(c1, sx()), (c2, sy()), (c3, sz())] {
        m = add(&m, &kron(&s, &s).scale_real(ci));
    }
    m.scale_real(0.25)
}

/// Single-mode Unruh map: |0> -> cos r |0,0> + sin r |1,1>, |1> -> |1,0>,
/// with the second factor the region-II mode.
fn unruh_isometry(r: f64) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(4, 2);
    let set = |m: &mut ComplexMatrix, i: usize, j: usize, x: f64| {
        let mut data = m.entries().to_vec();
        data[i * 2 + j] = re(x);
        *m = ComplexMatrix::from_vec(4, 2, data).unwrap();
    };
    set(&mut v, 0, 0, r.cos());
    set(&mut v, 3, 0, r.sin());
    set(&mut v, 2, 1, 1.0);
    v
}

/// Both modes seen from region I.
pub fn accelerate(rho: &ComplexMatrix, r: f64) -> ComplexMatrix {
    let v = unruh_isometry(r);
    let w = kron(&v, &v);
    let lifted = mul(&mul(&w, rho), &w.adjoint());
    let once = partial_trace(&lifted, 3, &[2, 2, 2, 2]).unwrap();
    partial_trace(&once, 1, &[2, 2, 2]).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Ad,
    Bf,
    Bpf,
    Pf,
}

pub fn kraus(noise: Noise, p: f64) -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    let keep = (1.0 - p / 2.0).sqrt();
    let flip = (p / 2.0).sqrt();
    match noise {
        Noise::Ad => vec![
            m2([[(1., 0.), (0., 0.)], [(0., 0.), ((1.0 - p).sqrt(), 0.)]]),
            m2([[(0., 0.), (p.sqrt(), 0.)], [(0., 0.), (0., 0.)]]),
        ],
        Noise::Bf => vec![id.scale_real(keep), sx().scale_real(flip)],
        Noise::Bpf => vec![id.scale_real(keep), sy().scale_real(flip)],
        Noise::Pf => vec![id.scale_real(keep), sz().scale_real(flip)],
    }
}

pub fn on_qubit_a(rho: &ComplexMatrix, ops: &[ComplexMatrix]) -> ComplexMatrix {
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::zeros(4, 4);
    for k in ops {
        let big = kron(k, &id);
        out = add(&out, &mul(&mul(&big, rho), &big.adjoint()));
    }
    out
}

pub fn pipeline(c: [f64; 3], r: f64, noise: Option<(Noise, f64)>) -> ComplexMatrix {
    let acc = accelerate(&x_state(c[0], c[1], c[2]), r);
    match noise {
        Some((n, p)) => on_qubit_a(&acc, &kraus(n, p)),
        None => acc,
    }
}

/// Kernel (1 + k n.S')/2 where S' = 2S = (sx, -sy, -sz) in the m-ordered basis
/// and k = 3^((s+1)/2).
pub fn kernel(s: f64, theta: f64, phi: f64) -> ComplexMatrix {
    let k = 3f64.powf((s + 1.0) / 2.0);
    let n = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
    let spin = add(
        &add(&sx().scale_real(n[0]), &sy().scale_real(-n[1])),
        &sz().scale_real(-n[2]),
    );
    add(&ComplexMatrix::identity(2), &spin.scale_real(k)).scale_real(0.5)
}

pub struct Kernels {
    a: ComplexMatrix,
    b: ComplexMatrix,
}

impl Kernels {
    pub fn new(s: f64, a: (f64, f64), b: (f64, f64)) -> Self {
        Self {
            a: kernel(s, a.0, a.1),
            b: kernel(s, b.0, b.1),
        }
    }

    pub fn eval(&self, rho: &ComplexMatrix) -> f64 {
        let k = kron(&self.a, &self.b);
        mul(rho, &k).trace().re
    }
}

pub fn distribution(rho: &ComplexMatrix, s: f64, theta: f64, phi: f64) -> f64 {
    Kernels::new(s, (theta, phi), (theta, phi)).eval(rho)
}

pub fn entry(rho: &ComplexMatrix, i: usize, j: usize) -> f64 {
    rho.entries()[i * 4 + j].re
}
