//! Seeded random states and channels for tests.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::channel::QuantumChannel;
use crate::qmat::{Complex64, ComplexMatrix, DensityMatrix, Factorization};

/// Ginibre-style random full-rank state.
pub(crate) fn random_state(fact: &Factorization, rng: &mut ChaCha8Rng) -> DensityMatrix {
    let d = fact.total_dim();
    let mut g = ComplexMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            g.set(
                i,
                j,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::new(m.scale_re(1.0 / tr), fact.clone()).unwrap()
}

/// Random CPTP channel from a Stinespring isometry built by Gram-Schmidt on
/// Gaussian columns; environment dimension equals the output dimension.
pub(crate) fn random_channel(
    in_fact: &Factorization,
    out_fact: &Factorization,
    rng: &mut ChaCha8Rng,
) -> QuantumChannel {
    let d_in = in_fact.total_dim();
    let d_out = out_fact.total_dim();
    let dim = d_in * d_out;
    let mut g = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g.set(
                i,
                j,
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
        }
    }
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    for j in 0..d_in {
        let mut v = g.column(j);
        for c in &cols {
            let ip: Complex64 = c.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
            for (vi, ci) in v.iter_mut().zip(c.iter()) {
                *vi -= ip * ci;
            }
        }
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for vi in v.iter_mut() {
            *vi = vi.unscale(norm);
        }
        cols.push(v);
    }
    let mut kraus = Vec::new();
    for e in 0..d_out {
        let mut k = ComplexMatrix::zeros(d_out, d_in);
        for a in 0..d_out {
            for (i, col) in cols.iter().enumerate() {
                k.set(a, i, col[a * d_out + e]);
            }
        }
        kraus.push(k);
    }
    QuantumChannel::new(kraus, in_fact.clone(), out_fact.clone()).unwrap()
}
