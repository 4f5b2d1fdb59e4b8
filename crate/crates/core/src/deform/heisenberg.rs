//! The Heisenberg group acting by translation, modulation and a central phase:
//! `U_{a,b,c} f(x) = e^{ic} e^{i<b,x>} f(x - a)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridFunction, SpaceTag, TorusGrid, MAX_DIM};

/// Relative slack when snapping a physical vector to the lattice.
const LATTICE_TOL: f64 = 1e-9;

/// A group element `(a, b, c)` with `a` translations, `b` modulations and `c`
/// the central phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergElement {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl HeisenbergElement {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: f64) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() || a.len() > MAX_DIM {
            return Err(Error::InvalidArgument(format!(
                "translation and modulation must have equal dimension in 1..={MAX_DIM}, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        if !a.iter().chain(&b).all(|v| v.is_finite()) || !c.is_finite() {
            return Err(Error::InvalidArgument("non-finite Heisenberg parameter".into()));
        }
        Ok(HeisenbergElement { a, b, c })
    }

    pub fn identity(dim: usize) -> Self {
        HeisenbergElement {
            a: vec![0.0; dim],
            b: vec![0.0; dim],
            c: 0.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Product in the group: `U_g U_h = U_{g.compose(h)}`.
    pub fn compose(&self, other: &HeisenbergElement) -> HeisenbergElement {
        let cross: f64 = self.a.iter().zip(&other.b).map(|(x, y)| x * y).sum();
        HeisenbergElement {
            a: self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect(),
            b: self.b.iter().zip(&other.b).map(|(x, y)| x + y).collect(),
            c: self.c + other.c - cross,
        }
    }

    pub fn inverse(&self) -> HeisenbergElement {
        let ab: f64 = self.a.iter().zip(&self.b).map(|(x, y)| x * y).sum();
        HeisenbergElement {
            a: self.a.iter().map(|x| -x).collect(),
            b: self.b.iter().map(|x| -x).collect(),
            c: -self.c - ab,
        }
    }
}

/// Integer lattice steps of an element on a particular grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct LatticeSteps {
    pub shift: [i64; MAX_DIM],
    pub modulation: [i64; MAX_DIM],
}

pub(crate) fn snap(what: &'static str, value: &[f64], spacing: f64) -> Result<[i64; MAX_DIM]> {
    let mut out = [0i64; MAX_DIM];
    for (o, &v) in out.iter_mut().zip(value) {
        let steps = v / spacing;
        let r = steps.round();
        if (steps - r).abs() > LATTICE_TOL * r.abs().max(1.0) {
            return Err(Error::OffLattice {
                what,
                value: value.to_vec(),
                spacing,
            });
        }
        *o = r as i64;
    }
    Ok(out)
}

impl LatticeSteps {
    pub fn of(grid: &TorusGrid, e: &HeisenbergElement) -> Result<Self> {
        if e.dim() != grid.dim() {
            return Err(Error::InvalidArgument(format!(
                "Heisenberg element of dimension {} on a {}-dimensional grid",
                e.dim(),
                grid.dim()
            )));
        }
        Ok(LatticeSteps {
            shift: snap("translation", &e.a, grid.spacing())?,
            modulation: snap("modulation", &e.b, grid.frequency_spacing())?,
        })
    }
}

/// Applies `U` in whichever representation `g` is stored.
pub(crate) fn act(e: &HeisenbergElement, steps: &LatticeSteps, g: &GridFunction) -> GridFunction {
    let grid = g.grid();
    let dim = grid.dim();
    // h * dxi = 2 pi / N, so every lattice pairing is an exact root of unity
    let unit = 2.0 * std::f64::consts::PI / grid.points() as f64;
    let mut out = GridFunction::zeros(grid, g.k(), g.tag());
    let central = Complex64::from_polar(1.0, e.c);
    let mut src = [0i64; MAX_DIM];
    for p in 0..grid.len() {
        let l = grid.labels(p);
        let t = match g.tag() {
            SpaceTag::Position => {
                for a in 0..dim {
                    src[a] = l[a] - steps.shift[a];
                }
                (0..dim).map(|a| (steps.modulation[a] * l[a]) as f64).sum::<f64>()
            }
            SpaceTag::Frequency => {
                for a in 0..dim {
                    src[a] = wrap(l[a] - steps.modulation[a], grid.points() as i64);
                }
                -(0..dim).map(|a| (src[a] * steps.shift[a]) as f64).sum::<f64>()
            }
        };
        let z = central * Complex64::from_polar(1.0, unit * t);
        let s = grid.index_of_labels(&src);
        for (o, v) in out.block_mut(p).iter_mut().zip(g.block(s)) {
            *o = v * z;
        }
    }
    out
}

fn wrap(label: i64, n: i64) -> i64 {
    (label + n / 2).rem_euclid(n) - n / 2
}
