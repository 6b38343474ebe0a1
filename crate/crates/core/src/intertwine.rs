//! Solving linear systems in several matrix unknowns, used to search for
//! isomorphisms between structured objects.

use rand::Rng;

use crate::linalg::{int, Matrix, Rational};

/// A homogeneous system `Σ L · X_b · R = 0` in unknown matrices `X_b`.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    shapes: Vec<(usize, usize)>,
    offsets: Vec<usize>,
    equations: Vec<Vec<Rational>>,
}

impl LinearSystem {
    pub fn new(shapes: &[(usize, usize)]) -> Self {
        let mut offsets = Vec::with_capacity(shapes.len());
        let mut acc = 0;
        for (r, c) in shapes {
            offsets.push(acc);
            acc += r * c;
        }
        LinearSystem {
            shapes: shapes.to_vec(),
            offsets,
            equations: Vec::new(),
        }
    }

    fn unknowns(&self) -> usize {
        self.shapes.iter().map(|(r, c)| r * c).sum()
    }

    /// Adds the matrix equation `Σ_t L_t · X_{b_t} · R_t = 0`.
    pub fn add(&mut self, terms: &[(&Matrix, usize, &Matrix)]) {
        let Some((l0, _, r0)) = terms.first() else {
            return;
        };
        let (rows, cols) = (l0.rows(), r0.cols());
        let n = self.unknowns();
        let mut eqs = vec![vec![Rational::default(); n]; rows * cols];
        for (l, b, r) in terms {
            let (br, bc) = self.shapes[*b];
            assert_eq!(l.cols(), br, "left factor does not match unknown");
            assert_eq!(r.rows(), bc, "right factor does not match unknown");
            assert_eq!((l.rows(), r.cols()), (rows, cols), "terms of different shapes");
            let off = self.offsets[*b];
            for i in 0..rows {
                for j in 0..cols {
                    let eq = &mut eqs[i * cols + j];
                    for k in 0..br {
                        let lik = l.get(i, k);
                        if lik == &Rational::default() {
                            continue;
                        }
                        for m in 0..bc {
                            let rmj = r.get(m, j);
                            if rmj != &Rational::default() {
                                eq[off + k * bc + m] += lik * rmj;
                            }
                        }
                    }
                }
            }
        }
        self.equations.extend(eqs);
    }

    /// Basis of the solution space, each solution split into its blocks.
    pub fn solutions(&self) -> Vec<Vec<Matrix>> {
        let n = self.unknowns();
        let a = Matrix::from_rows(self.equations.clone(), n).expect("rows have uniform length");
        let kernel = if self.equations.is_empty() {
            crate::linalg::Subspace::full(n)
        } else {
            a.kernel()
        };
        kernel
            .basis_vectors()
            .into_iter()
            .map(|v| self.split(&v))
            .collect()
    }

    fn split(&self, v: &[Rational]) -> Vec<Matrix> {
        self.shapes
            .iter()
            .zip(&self.offsets)
            .map(|(&(r, c), &off)| {
                Matrix::new(r, c, v[off..off + r * c].to_vec()).expect("block size matches")
            })
            .collect()
    }

    /// Random small-integer combinations of solutions until every block is
    /// invertible and `accept` holds.
    pub fn find_invertible<R: Rng>(
        &self,
        rng: &mut R,
        attempts: usize,
        accept: impl Fn(&[Matrix]) -> bool,
    ) -> Option<Vec<Matrix>> {
        if self.shapes.iter().any(|(r, c)| r != c) {
            return None;
        }
        let basis = self.solutions();
        if self.unknowns() == 0 {
            let empty: Vec<Matrix> = self.shapes.iter().map(|_| Matrix::zeros(0, 0)).collect();
            return accept(&empty).then_some(empty);
        }
        if basis.is_empty() {
            return None;
        }
        for _ in 0..attempts {
            let coeffs: Vec<Rational> = basis.iter().map(|_| int(rng.gen_range(-3..=3))).collect();
            let candidate: Vec<Matrix> = (0..self.shapes.len())
                .map(|b| {
                    let (r, c) = self.shapes[b];
                    basis
                        .iter()
                        .zip(&coeffs)
                        .fold(Matrix::zeros(r, c), |acc, (sol, k)| &acc + &sol[b].scale(k))
                })
                .collect();
            if candidate.iter().all(Matrix::is_invertible) && accept(&candidate) {
                return Some(candidate);
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn conjugating_nilpotent_to_its_negative() {
        let n = Matrix::jordan_block(3);
        let neg = -&n;
        let id = Matrix::identity(3);
        let mut sys = LinearSystem::new(&[(3, 3)]);
        // X N - (-N) X = 0
        sys.add(&[(&id, 0, &n), (&n, 0, &id)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = sys.find_invertible(&mut rng, 50, |_| true).unwrap();
        assert_eq!(&x[0] * &n, &neg * &x[0]);
    }

    #[test]
    fn no_isomorphism_between_different_ranks() {
        let a = Matrix::jordan_block(2);
        let b = Matrix::zeros(2, 2);
        let id = Matrix::identity(2);
        let mut sys = LinearSystem::new(&[(2, 2)]);
        sys.add(&[(&id, 0, &a), (&(-&b), 0, &id)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sys.find_invertible(&mut rng, 50, |_| true).is_none());
    }
}
