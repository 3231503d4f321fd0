use rayon::prelude::*;

use super::{Exchange, LinearOperator};
use crate::error::Result;
use crate::fields::Fields;
use crate::linalg::{self, Block, SparseMatrix};
use crate::local::{assemble_chdg_local, local_scatter, ElementSystem};
use crate::problem::Problem;
use crate::C64;

/// The CHDG system `(I - ΠS) g = b + ΠS₀`, applied matrix-free.
///
/// `S` is block diagonal with one dense `3N_f × 3N_f` block per element,
/// computed once from unit-datum local solves. `S₀` is the outgoing data of
/// the source-only local solves, so the operator itself is source-free.
#[derive(Debug)]
pub struct ChdgSystem<'a> {
    pub problem: &'a Problem,
    systems: Vec<ElementSystem>,
    blocks: Vec<Block>,
    exchange: Exchange,
    rhs: Vec<C64>,
}

pub fn chdg_operator(problem: &Problem) -> Result<ChdgSystem<'_>> {
    ChdgSystem::new(problem)
}

impl<'a> ChdgSystem<'a> {
    pub fn new(problem: &'a Problem) -> Result<Self> {
        let systems = (0..problem.num_elements())
            .into_par_iter()
            .map(|k| assemble_chdg_local(problem, k))
            .collect::<Result<Vec<_>>>()?;
        let blocks: Vec<Block> = systems.par_iter().map(|s| s.transfer_block()).collect();
        let exchange = Exchange::new(problem);
        let n = problem.transmission_dim();
        let mut rhs = exchange.rhs().to_vec();
        if problem.has_volume_source() {
            let bs = 3 * problem.nf();
            let mut s0 = linalg::zeros(n);
            s0.par_chunks_mut(bs)
                .zip(&systems)
                .for_each(|(chunk, sys)| chunk.copy_from_slice(&sys.source_outputs()));
            let mut pis0 = linalg::zeros(n);
            exchange.apply(&s0, &mut pis0);
            linalg::axpy(C64::new(1.0, 0.0), &pis0, &mut rhs);
        }
        Ok(ChdgSystem {
            problem,
            systems,
            blocks,
            exchange,
            rhs,
        })
    }

    pub fn exchange(&self) -> &Exchange {
        &self.exchange
    }

    /// `b + ΠS₀`
    pub fn rhs(&self) -> &[C64] {
        &self.rhs
    }

    pub fn element_system(&self, k: usize) -> &ElementSystem {
        &self.systems[k]
    }

    fn block_size(&self) -> usize {
        3 * self.problem.nf()
    }

    pub fn apply_scatter(&self, g: &[C64], out: &mut [C64]) {
        let bs = self.block_size();
        out.par_chunks_mut(bs)
            .zip(g.par_chunks(bs))
            .zip(&self.blocks)
            .for_each(|((o, x), b)| b.apply(x, o));
    }

    pub fn apply_scatter_adjoint(&self, g: &[C64], out: &mut [C64]) {
        let bs = self.block_size();
        out.par_chunks_mut(bs)
            .zip(g.par_chunks(bs))
            .zip(&self.blocks)
            .for_each(|((o, x), b)| b.apply_adjoint(x, o));
    }

    /// `ΠS g`
    pub fn apply_pi_s(&self, g: &[C64], out: &mut [C64]) {
        let mut s = linalg::zeros(g.len());
        self.apply_scatter(g, &mut s);
        self.exchange.apply(&s, out);
    }

    pub fn pi_s(&self) -> PiS<'_, 'a> {
        PiS(self)
    }

    /// `Σ_{K,F} ⟨A_F g, g⟩_F` (plain `L²` for upwind).
    pub fn a_norm(&self, g: &[C64]) -> f64 {
        let nf = self.problem.nf();
        (0..self.problem.num_elements())
            .map(|k| {
                (0..3)
                    .map(|j| {
                        let off = (3 * k + j) * nf;
                        self.problem.face_op(k, j).a_norm_sqr(&g[off..off + nf])
                    })
                    .sum::<f64>()
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Assembled `I - ΠS`.
    pub fn sparse_matrix(&self) -> SparseMatrix {
        let bs = self.block_size();
        let n = self.dim();
        let mut trip: Vec<(usize, usize, C64)> = (0..n).map(|i| (i, i, C64::new(1.0, 0.0))).collect();
        // (ΠS)[r, c] = Σ_m Π[r, m] S[m, c], and S is block diagonal
        for (r, m, v) in self.exchange.entries() {
            let k = m / bs;
            let local = m % bs;
            let block = &self.blocks[k];
            for c in 0..bs {
                let s = block.get(local, c);
                if s != C64::new(0.0, 0.0) {
                    trip.push((r, k * bs + c, -s * v));
                }
            }
        }
        SparseMatrix::from_triplets(n, n, trip)
    }

    /// Direct sparse solve of the CHDG system.
    pub fn solve_direct(&self) -> Result<Vec<C64>> {
        self.sparse_matrix().solve(&self.rhs)
    }

    /// Element fields from the incoming transmission variables.
    pub fn reconstruct(&self, g: &[C64]) -> Fields {
        let bs = self.block_size();
        self.systems
            .par_iter()
            .enumerate()
            .map(|(k, sys)| local_scatter(self.problem, sys, &g[k * bs..(k + 1) * bs], true).0)
            .collect()
    }
}

impl LinearOperator for ChdgSystem<'_> {
    fn dim(&self) -> usize {
        self.problem.transmission_dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.apply_pi_s(x, y);
        y.par_iter_mut().zip(x).for_each(|(yi, xi)| *yi = xi - *yi);
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let mut t = linalg::zeros(x.len());
        self.exchange.apply_transpose(x, &mut t);
        self.apply_scatter_adjoint(&t, y);
        y.par_iter_mut().zip(x).for_each(|(yi, xi)| *yi = xi - *yi);
    }
}

/// `ΠS` as an operator, for spectra.
pub struct PiS<'s, 'a>(&'s ChdgSystem<'a>);

impl LinearOperator for PiS<'_, '_> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn apply(&self, x: &[C64], y: &mut [C64]) {
        self.0.apply_pi_s(x, y)
    }

    fn apply_adjoint(&self, x: &[C64], y: &mut [C64]) {
        let mut t = linalg::zeros(x.len());
        self.0.exchange.apply_transpose(x, &mut t);
        self.0.apply_scatter_adjoint(&t, y);
    }
}
