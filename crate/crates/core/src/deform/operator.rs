use std::sync::Arc;

use num_complex::Complex64;

use super::heisenberg::{self, HeisenbergElement, LatticeSteps};
use super::product::{check_form, twisted_convolution};
use crate::error::{Error, Result};
use crate::fourier::{fourier, reflected_index, to_space};
use crate::grid::{inner_product, GridFunction, SkewForm, SpaceTag, TorusGrid};

/// Square complex matrix over the `N^n * k^2` raw coordinates of a
/// position-space [`GridFunction`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    size: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(size: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(Error::InvalidArgument(format!(
                "dense matrix of size {size} needs {} entries, got {}",
                size * size,
                data.len()
            )));
        }
        Ok(DenseMatrix { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.size + col]
    }

    pub fn conjugate_transpose(&self) -> DenseMatrix {
        let n = self.size;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for r in 0..n {
            for c in 0..n {
                data[c * n + r] = self.data[r * n + c].conj();
            }
        }
        DenseMatrix { size: n, data }
    }

    fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.data
            .chunks(self.size)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// A symbol stored by its spectrum together with the twist it multiplies under.
#[derive(Clone, Debug)]
pub struct Multiplier {
    pub spectrum: GridFunction,
    pub form: SkewForm,
}

#[derive(Clone, Debug)]
pub enum OperatorKind {
    Identity,
    /// `g -> f x_J g`
    LeftMult(Arc<Multiplier>),
    /// `g -> g x_J f`
    RightMult(Arc<Multiplier>),
    Heisenberg(HeisenbergElement),
    /// `h -> w <v, h>`
    RankOne { v: Arc<GridFunction>, w: Arc<GridFunction> },
    Dense(Arc<DenseMatrix>),
    /// `[A, B, C]` is `A o B o C`.
    Composition(Vec<GridOperator>),
    /// `sum c_i A_i`; the empty sum is the zero operator.
    Combination(Vec<(Complex64, GridOperator)>),
}

/// A right-linear operator on `M_k(C)`-valued functions on a torus grid.
/// Operators are immutable and cheap to clone.
#[derive(Clone, Debug)]
pub struct GridOperator {
    grid: TorusGrid,
    k: usize,
    kind: OperatorKind,
}

impl GridOperator {
    pub fn identity(grid: &TorusGrid, k: usize) -> Self {
        Self::raw(grid, k, OperatorKind::Identity)
    }

    pub fn zero(grid: &TorusGrid, k: usize) -> Self {
        Self::raw(grid, k, OperatorKind::Combination(Vec::new()))
    }

    fn raw(grid: &TorusGrid, k: usize, kind: OperatorKind) -> Self {
        GridOperator {
            grid: grid.clone(),
            k,
            kind,
        }
    }

    /// `L_f` for a position-space symbol `f`.
    pub fn left_mult(f: &GridFunction, form: &SkewForm) -> Result<Self> {
        f.expect_tag(SpaceTag::Position)?;
        Self::left_mult_spectral(fourier(f)?, form)
    }

    /// `L_f` from the spectrum of `f`.
    pub fn left_mult_spectral(spectrum: GridFunction, form: &SkewForm) -> Result<Self> {
        spectrum.expect_tag(SpaceTag::Frequency)?;
        check_form(spectrum.grid(), form)?;
        let (grid, k) = (spectrum.grid().clone(), spectrum.k());
        let m = Multiplier {
            spectrum,
            form: form.clone(),
        };
        Ok(Self::raw(&grid, k, OperatorKind::LeftMult(Arc::new(m))))
    }

    /// `R_g` for a position-space `g`.
    pub fn right_mult(g: &GridFunction, form: &SkewForm) -> Result<Self> {
        g.expect_tag(SpaceTag::Position)?;
        Self::right_mult_spectral(fourier(g)?, form)
    }

    pub fn right_mult_spectral(spectrum: GridFunction, form: &SkewForm) -> Result<Self> {
        spectrum.expect_tag(SpaceTag::Frequency)?;
        check_form(spectrum.grid(), form)?;
        let (grid, k) = (spectrum.grid().clone(), spectrum.k());
        let m = Multiplier {
            spectrum,
            form: form.clone(),
        };
        Ok(Self::raw(&grid, k, OperatorKind::RightMult(Arc::new(m))))
    }

    /// `U_{a,b,c}`; translations and modulations must be lattice steps.
    pub fn heisenberg(grid: &TorusGrid, k: usize, element: HeisenbergElement) -> Result<Self> {
        LatticeSteps::of(grid, &element)?;
        Ok(Self::raw(grid, k, OperatorKind::Heisenberg(element)))
    }

    /// `h -> w <v, h>`.
    pub fn rank_one(v: &GridFunction, w: &GridFunction) -> Result<Self> {
        v.expect_tag(SpaceTag::Position)?;
        v.check_compatible(w)?;
        Ok(Self::raw(
            v.grid(),
            v.k(),
            OperatorKind::RankOne {
                v: Arc::new(v.clone()),
                w: Arc::new(w.clone()),
            },
        ))
    }

    pub fn dense(grid: &TorusGrid, k: usize, matrix: DenseMatrix) -> Result<Self> {
        if matrix.size() != grid.len() * k * k {
            return Err(Error::InvalidArgument(format!(
                "dense matrix of size {} does not act on {} coordinates",
                matrix.size(),
                grid.len() * k * k
            )));
        }
        Ok(Self::raw(grid, k, OperatorKind::Dense(Arc::new(matrix))))
    }

    /// `ops[0] o ops[1] o ...`
    pub fn compose(ops: Vec<GridOperator>) -> Result<Self> {
        let first = ops
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty composition".into()))?;
        let (grid, k) = (first.grid.clone(), first.k);
        for op in &ops {
            op.check_domain(&grid, k)?;
        }
        Ok(Self::raw(&grid, k, OperatorKind::Composition(ops)))
    }

    pub fn combination(grid: &TorusGrid, k: usize, terms: Vec<(Complex64, GridOperator)>) -> Result<Self> {
        for (_, op) in &terms {
            op.check_domain(grid, k)?;
        }
        Ok(Self::raw(grid, k, OperatorKind::Combination(terms)))
    }

    /// `self o inner`
    pub fn then_after(&self, inner: &GridOperator) -> Result<Self> {
        Self::compose(vec![self.clone(), inner.clone()])
    }

    pub fn scaled(&self, z: Complex64) -> Self {
        Self::raw(&self.grid, self.k, OperatorKind::Combination(vec![(z, self.clone())]))
    }

    pub fn plus(&self, other: &GridOperator) -> Result<Self> {
        let one = Complex64::new(1.0, 0.0);
        Self::combination(&self.grid, self.k, vec![(one, self.clone()), (one, other.clone())])
    }

    pub fn minus(&self, other: &GridOperator) -> Result<Self> {
        Self::combination(
            &self.grid,
            self.k,
            vec![(Complex64::new(1.0, 0.0), self.clone()), (Complex64::new(-1.0, 0.0), other.clone())],
        )
    }

    /// `[self, other] = self o other - other o self`
    pub fn commutator(&self, other: &GridOperator) -> Result<Self> {
        Self::compose(vec![self.clone(), other.clone()])?.minus(&Self::compose(vec![other.clone(), self.clone()])?)
    }

    pub fn grid(&self) -> &TorusGrid {
        &self.grid
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Spectrum of the symbol when the operator is a left multiplication.
    pub fn left_symbol_spectrum(&self) -> Option<&GridFunction> {
        match &self.kind {
            OperatorKind::LeftMult(m) => Some(&m.spectrum),
            _ => None,
        }
    }

    fn check_domain(&self, grid: &TorusGrid, k: usize) -> Result<()> {
        self.grid.check_same(grid)?;
        if self.k != k {
            return Err(Error::AlgebraMismatch {
                expected: k,
                found: self.k,
            });
        }
        Ok(())
    }

    /// Position-space action.
    pub fn apply(&self, g: &GridFunction) -> Result<GridFunction> {
        to_space(self.act(g)?, SpaceTag::Position)
    }

    /// Action returning the spectrum of the image.
    pub fn apply_spectrum(&self, g: &GridFunction) -> Result<GridFunction> {
        to_space(self.act(g)?, SpaceTag::Frequency)
    }

    /// Action in whichever representation is cheapest; the tag of the result
    /// says which one was used.
    pub fn act(&self, g: &GridFunction) -> Result<GridFunction> {
        g.grid().check_same(&self.grid)?;
        if g.k() != self.k {
            return Err(Error::AlgebraMismatch {
                expected: self.k,
                found: g.k(),
            });
        }
        match &self.kind {
            OperatorKind::Identity => Ok(g.clone()),
            OperatorKind::LeftMult(m) => {
                let gh = to_space(g.clone(), SpaceTag::Frequency)?;
                twisted_convolution(&m.spectrum, &gh, &m.form)
            }
            OperatorKind::RightMult(m) => {
                let gh = to_space(g.clone(), SpaceTag::Frequency)?;
                twisted_convolution(&gh, &m.spectrum, &m.form)
            }
            OperatorKind::Heisenberg(e) => {
                let steps = LatticeSteps::of(&self.grid, e)?;
                Ok(heisenberg::act(e, &steps, g))
            }
            OperatorKind::RankOne { v, w } => {
                let gp = to_space(g.clone(), SpaceTag::Position)?;
                let ip = inner_product(v, &gp)?;
                w.right_mul(&ip)
            }
            OperatorKind::Dense(m) => {
                let gp = to_space(g.clone(), SpaceTag::Position)?;
                GridFunction::from_raw(&self.grid, self.k, SpaceTag::Position, m.mul_vec(gp.data()))
            }
            OperatorKind::Composition(ops) => {
                let mut cur = g.clone();
                for op in ops.iter().rev() {
                    cur = op.act(&cur)?;
                }
                Ok(cur)
            }
            OperatorKind::Combination(terms) => {
                let mut acc: Option<GridFunction> = None;
                for (z, op) in terms {
                    let img = op.act(g)?;
                    match acc.as_mut() {
                        None => acc = Some(img.scale(*z)),
                        Some(a) => {
                            let img = to_space(img, a.tag())?;
                            a.axpy(*z, &img)?;
                        }
                    }
                }
                Ok(acc.unwrap_or_else(|| GridFunction::zeros(&self.grid, self.k, g.tag())))
            }
        }
    }

    /// The adjoint for the module inner product. For right multiplication by a
    /// non-scalar `g` this is the adjoint for the trace pairing only.
    pub fn adjoint(&self) -> GridOperator {
        let kind = match &self.kind {
            OperatorKind::Identity => OperatorKind::Identity,
            OperatorKind::LeftMult(m) => OperatorKind::LeftMult(Arc::new(Multiplier {
                spectrum: adjoint_spectrum(&m.spectrum),
                form: m.form.clone(),
            })),
            OperatorKind::RightMult(m) => OperatorKind::RightMult(Arc::new(Multiplier {
                spectrum: adjoint_spectrum(&m.spectrum),
                form: m.form.clone(),
            })),
            OperatorKind::Heisenberg(e) => OperatorKind::Heisenberg(e.inverse()),
            OperatorKind::RankOne { v, w } => OperatorKind::RankOne {
                v: w.clone(),
                w: v.clone(),
            },
            OperatorKind::Dense(m) => OperatorKind::Dense(Arc::new(m.conjugate_transpose())),
            OperatorKind::Composition(ops) => OperatorKind::Composition(ops.iter().rev().map(|o| o.adjoint()).collect()),
            OperatorKind::Combination(terms) => {
                OperatorKind::Combination(terms.iter().map(|(z, o)| (z.conj(), o.adjoint())).collect())
            }
        };
        Self::raw(&self.grid, self.k, kind)
    }
}

/// Spectrum of `f*` from the spectrum of `f`: `F(f*)(xi) = F(f)(-xi)^*`, exact on
/// the lattice because `-xi` wraps onto a lattice mode.
pub(crate) fn adjoint_spectrum(spectrum: &GridFunction) -> GridFunction {
    let grid = spectrum.grid();
    let k = spectrum.k();
    let mut out = GridFunction::zeros(grid, k, SpaceTag::Frequency);
    for c in 0..grid.len() {
        let src = spectrum.block(reflected_index(grid, c));
        let dst = out.block_mut(c);
        for i in 0..k {
            for j in 0..k {
                dst[i * k + j] = src[j * k + i].conj();
            }
        }
    }
    out
}
