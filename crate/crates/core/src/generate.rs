//! Seeded random generation of valid gluing data.
//!
//! Each nearby-cycle component is a direct sum of Tate-twisted Jordan blocks
//! carried by a random unimodular change of basis. The vanishing cycles are
//! wired through one of three factorizations of `-N_0`, optionally extended
//! by lines on which `c` and `v` vanish, then moved by another change of
//! basis. Case `i` draws from its own ChaCha stream, so cases can be
//! generated in any order and in parallel.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::nilp_block;
use crate::error::{Error, Result};
use crate::filtration::FiltrationPair;
use crate::gluing::{GluingDatum, PsiComponent, PsiDatum};
use crate::linalg::{int, rat, Matrix, Rational};
use crate::mhm::zero;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub seed: u64,
    /// Bound on the total dimension of the glued module.
    pub max_dim: usize,
    /// Denominators allowed for the labels `α = -j/d`.
    pub eigen_denominators: BTreeSet<u64>,
    /// Tate twists of the blocks are drawn from `[-s, s]`.
    pub max_weight_span: u32,
    pub case_count: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            seed: 0,
            max_dim: 5,
            eigen_denominators: (1..=6).collect(),
            max_weight_span: 1,
            case_count: 100,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eigen_denominators.is_empty() {
            return Err(Error::Config("eigen_denominators is empty".to_string()));
        }
        if self.eigen_denominators.contains(&0) {
            return Err(Error::Config("eigen_denominators must be positive".to_string()));
        }
        if self.eigen_denominators.iter().any(|d| *d > 1_000_000) {
            return Err(Error::Config("eigen denominators above 10^6 are not supported".to_string()));
        }
        if self.max_weight_span == 0 {
            return Err(Error::Config("max_weight_span must be positive".to_string()));
        }
        Ok(())
    }
}

/// `n × n` integer matrix of determinant 1 from random row operations.
pub fn unimodular<R: Rng>(rng: &mut R, n: usize) -> Matrix {
    let mut m = Matrix::identity(n);
    if n < 2 {
        return m;
    }
    for _ in 0..2 * n {
        let i = rng.gen_range(0..n as u32) as usize;
        let j = rng.gen_range(0..n as u32 - 1) as usize;
        let j = if j >= i { j + 1 } else { j };
        let k = int(rng.gen_range(-2i64..=2));
        for col in 0..n {
            let v = m.get(i, col) + &(&k * m.get(j, col));
            m.set(i, col, v);
        }
    }
    m
}

fn below<R: Rng>(rng: &mut R, inclusive_max: usize) -> usize {
    rng.gen_range(0..=inclusive_max as u32) as usize
}

/// Like [`below`] but skewed upward: the larger of two draws.
fn below_high<R: Rng>(rng: &mut R, inclusive_max: usize) -> usize {
    below(rng, inclusive_max).max(below(rng, inclusive_max))
}

/// A component of dimension `d` built from twisted Jordan blocks.
pub fn random_component<R: Rng>(rng: &mut R, d: usize, span: u32) -> PsiComponent {
    let mut comp = PsiComponent::zero();
    let mut left = d;
    let s = i64::from(span);
    while left > 0 {
        let r = 1 + below_high(rng, left - 1);
        let l = rng.gen_range(-s..=s);
        comp = comp.direct_sum(&nilp_block(r).twist(l));
        left -= r;
    }
    let g = unimodular(rng, d);
    comp.transport(&g)
}

/// Vanishing-cycle choices satisfying `v·c = -N_0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PhiMode {
    /// `φ = Im N_0` with the induced filtrations of `ψ_0(-1)`.
    Image,
    /// `φ = ψ_0(-1)`, `c = -N_0`, `v = 1`.
    Twisted,
    /// `φ = ψ_0`, `c = 1`, `v = -N_0`.
    Identity,
}

fn wire_phi(psi0: &PsiComponent, mode: PhiMode) -> (FiltrationPair, Matrix, Matrix) {
    let d0 = psi0.dim();
    let neg_n = -&psi0.n;
    match mode {
        PhiMode::Image => {
            let im = psi0.n.image();
            let basis = im.basis().clone();
            let filt = psi0.filt.twist(-1).pullback(&basis).expect("a basis is injective");
            let cols: Vec<Vec<Rational>> = neg_n
                .columns()
                .iter()
                .map(|col| im.coordinates(col).expect("column of N lies in its image"))
                .collect();
            (filt, Matrix::from_columns(im.dim(), &cols), basis)
        }
        PhiMode::Twisted => (psi0.filt.twist(-1), neg_n, Matrix::identity(d0)),
        PhiMode::Identity => (psi0.filt.clone(), Matrix::identity(d0), neg_n),
    }
}

/// Nonzero labels `-j/d`, `0 < j < d`, for the allowed denominators.
fn nonzero_labels(denominators: &BTreeSet<u64>) -> Vec<Rational> {
    let mut out: Vec<Rational> = denominators
        .iter()
        .flat_map(|&d| (1..d).map(move |j| rat(-(j as i64), d as i64)))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// The `index`-th case of the configured stream.
pub fn generate_case(cfg: &GeneratorConfig, index: u64) -> GluingDatum {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    if cfg.max_dim == 0 {
        return GluingDatum::zero();
    }
    let span = cfg.max_weight_span;
    // a few empty cases, the rest spread over 1..=max_dim
    let total = if rng.gen_ratio(1, 20) {
        0
    } else {
        1 + below(&mut rng, cfg.max_dim - 1)
    };
    let mode = match rng.gen_range(0..3u32) {
        0 => PhiMode::Image,
        1 => PhiMode::Twisted,
        _ => PhiMode::Identity,
    };
    // ψ_0 and the part of φ wired to it must fit in the budget
    let max_d0 = match mode {
        PhiMode::Image => total.div_ceil(2),
        _ => total / 2,
    };
    let d0 = below_high(&mut rng, max_d0);
    let psi0 = random_component(&mut rng, d0, span);
    let (phi_main, c_main, v_main) = wire_phi(&psi0, mode);
    let mut left = total - d0 - phi_main.ambient();

    let mut psi = PsiDatum::default();
    psi.components.insert(zero(), psi0);
    let labels = nonzero_labels(&cfg.eigen_denominators);
    let mut picked = BTreeSet::new();
    if !labels.is_empty() {
        for _ in 0..2 {
            let a = labels[below(&mut rng, labels.len() - 1)].clone();
            if picked.contains(&a) {
                continue;
            }
            let d = below(&mut rng, left);
            left -= d;
            psi.components.insert(a.clone(), random_component(&mut rng, d, span));
            picked.insert(a);
        }
    }

    // lines on φ that neither c nor v sees
    let extra = below(&mut rng, left.min(2));
    let s = i64::from(span);
    let mut phi = phi_main;
    for _ in 0..extra {
        let l = rng.gen_range(-s..=s);
        phi = phi.direct_sum(&nilp_block(1).filt.twist(l));
    }
    let p = phi.ambient();
    let c = Matrix::vstack(&c_main, &Matrix::zeros(extra, d0));
    let v = Matrix::hstack(&v_main, &Matrix::zeros(d0, extra));
    let h = unimodular(&mut rng, p);
    let h_inv = h.inverse().expect("unimodular");
    GluingDatum {
        psi: PsiDatum::new(psi.components),
        phi: phi.pushforward(&h).expect("square change of basis"),
        c: &h * &c,
        v: &v * &h_inv,
        polarizable: true,
    }
}

/// `cfg.case_count` cases; deterministic for a given seed.
pub fn generate_random(cfg: &GeneratorConfig) -> Result<Vec<GluingDatum>> {
    cfg.validate()?;
    Ok((0..cfg.case_count as u64).map(|i| generate_case(cfg, i)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gluing::validate_gluing;

    #[test]
    fn generated_data_are_valid() {
        let cfg = GeneratorConfig {
            case_count: 300,
            ..GeneratorConfig::default()
        };
        for (i, g) in generate_random(&cfg).unwrap().iter().enumerate() {
            let problems = validate_gluing(g);
            assert!(problems.is_empty(), "case {i}: {problems:?}");
            let total = g.psi.total_dim() + g.phi_dim();
            assert!(total <= cfg.max_dim, "case {i} has dimension {total}");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = GeneratorConfig {
            seed: 7,
            case_count: 20,
            ..GeneratorConfig::default()
        };
        assert_eq!(generate_random(&cfg).unwrap(), generate_random(&cfg).unwrap());
        assert_eq!(generate_case(&cfg, 5), generate_random(&cfg).unwrap()[5]);
        let other = GeneratorConfig { seed: 8, ..cfg.clone() };
        assert_ne!(generate_random(&cfg).unwrap(), generate_random(&other).unwrap());
    }

    #[test]
    fn max_dim_zero_gives_zero_data() {
        let cfg = GeneratorConfig {
            max_dim: 0,
            case_count: 5,
            ..GeneratorConfig::default()
        };
        assert!(generate_random(&cfg).unwrap().iter().all(|g| *g == GluingDatum::zero()));
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = GeneratorConfig {
            eigen_denominators: BTreeSet::new(),
            ..GeneratorConfig::default()
        };
        assert!(matches!(generate_random(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn unimodular_is_invertible() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..6 {
            let m = unimodular(&mut rng, n);
            assert!(m.is_invertible());
        }
    }
}
