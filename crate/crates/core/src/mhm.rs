//! Monodromic mixed Hodge modules in the rational split model: core data
//! with a Hodge filtration `F` and a weight filtration `W` on each component.
//!
//! Stored filtrations are in module coordinates. The nearby-cycle side sees
//! `W_k ψ = W_{k+1} M^α`, the vanishing-cycle side sees `F_p φ = F_{p+1} M^{-1}`.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::dmod::{expand, CoreData, WindowModule};
use crate::error::{Error, Result};
use crate::filtration::{check_strict, FiltrationPair, IncreasingFiltration};
use crate::linalg::{Matrix, Rational};

/// A linear map between mixed Hodge structures with declared shifts:
/// `f(F_p) ⊆ F_{p+f_shift}` and `f(W_k) ⊆ W_{k+w_shift}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MhsMorphism {
    pub matrix: Matrix,
    pub f_shift: i64,
    pub w_shift: i64,
}

impl MhsMorphism {
    pub fn new(matrix: Matrix, f_shift: i64, w_shift: i64) -> Self {
        MhsMorphism {
            matrix,
            f_shift,
            w_shift,
        }
    }

    /// Strict for both filtrations with the declared shifts.
    pub fn is_strict(&self, src: &FiltrationPair, tgt: &FiltrationPair) -> bool {
        check_strict(&self.matrix, &src.f, &tgt.f, self.f_shift)
            && check_strict(&self.matrix, &src.w, &tgt.w, self.w_shift)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonodromicMhm {
    pub core: CoreData,
    /// Per-component `(F, W)` in module coordinates.
    pub filtrations: BTreeMap<Rational, FiltrationPair>,
    /// Set by constructors that produce graded-polarizable objects; never
    /// verified against a bilinear form.
    pub polarizable: bool,
}

pub(crate) fn zero() -> Rational {
    Rational::zero()
}

pub(crate) fn minus_one() -> Rational {
    -Rational::one()
}

/// Module weight filtration on `M^α` → weight filtration on `ψ_α`.
pub fn psi_from_module(p: &FiltrationPair) -> FiltrationPair {
    FiltrationPair {
        f: p.f.clone(),
        w: p.w.shift(-1),
    }
}

pub fn module_from_psi(p: &FiltrationPair) -> FiltrationPair {
    FiltrationPair {
        f: p.f.clone(),
        w: p.w.shift(1),
    }
}

/// Module filtrations on `M^{-1}` → filtrations on `φ`.
pub fn phi_from_module(p: &FiltrationPair) -> FiltrationPair {
    FiltrationPair {
        f: p.f.shift(-1),
        w: p.w.clone(),
    }
}

pub fn module_from_phi(p: &FiltrationPair) -> FiltrationPair {
    FiltrationPair {
        f: p.f.shift(1),
        w: p.w.clone(),
    }
}

impl MonodromicMhm {
    pub fn new(core: CoreData, filtrations: BTreeMap<Rational, FiltrationPair>, polarizable: bool) -> Self {
        let filtrations = filtrations
            .into_iter()
            .filter(|(a, _)| core.dim(a) > 0)
            .collect();
        MonodromicMhm {
            core,
            filtrations,
            polarizable,
        }
    }

    pub fn zero() -> Self {
        MonodromicMhm::new(CoreData::zero(), BTreeMap::new(), true)
    }

    /// Filtrations at `alpha`; trivial ones on an absent component.
    pub fn filtration(&self, alpha: &Rational) -> FiltrationPair {
        self.filtrations
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| FiltrationPair::trivial(self.core.dim(alpha), 0, 0))
    }

    /// Applies the Tate twist `(l)` to every component.
    pub fn tate_twist(&self, l: i64) -> Self {
        MonodromicMhm {
            core: self.core.clone(),
            filtrations: self
                .filtrations
                .iter()
                .map(|(a, p)| (a.clone(), p.twist(l)))
                .collect(),
            polarizable: self.polarizable,
        }
    }

    /// Named violations of every invariant, checked in nearby/vanishing
    /// cycle coordinates.
    pub fn validate(&self) -> Vec<String> {
        let mut out = self.core.validate();
        if !out.is_empty() {
            return out;
        }
        for a in self.core.alphas() {
            match self.filtrations.get(&a) {
                None => out.push(format!("missing filtrations at alpha {a}")),
                Some(p) if p.ambient() != self.core.dim(&a) => {
                    out.push(format!("filtrations at alpha {a} live on the wrong space"))
                }
                _ => {}
            }
        }
        for a in self.filtrations.keys() {
            if self.core.dim(a) == 0 {
                out.push(format!("filtrations given at absent alpha {a}"));
            }
        }
        if !out.is_empty() {
            return out;
        }
        crate::gluing::validate_gluing(&crate::gluing::cycles_datum(self))
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Expands the window and carries `F` to every component:
    /// `F_p M^{α+l} = t^l F_p M^α` for `α ∈ (-1, 0]` and
    /// `F_p M^{α-l} = ∂^l F_{p-l} M^α` for `α ∈ [-1, 0)`.
    pub fn propagate_filtration(&self, k: u32) -> Result<FilteredWindow> {
        let problems = self.validate();
        if !problems.is_empty() {
            return Err(Error::InvalidMmhm(problems));
        }
        let win = expand(&self.core, k)?;
        let one = Rational::one();
        let mut hodge = BTreeMap::new();
        for beta in win.betas() {
            let d = win.dim(&beta);
            // nearest core label in the same class, and the distance to it
            let frac = &beta - Rational::from_integer(beta.floor().to_integer());
            let f = if frac.is_zero() {
                if beta >= zero() {
                    self.filtration(&zero()).f
                } else {
                    let l = (-(&beta) - &one).to_integer();
                    let l = i64::try_from(l).expect("window index fits in i64");
                    self.filtration(&minus_one()).f.shift(l)
                }
            } else {
                let alpha = &frac - &one;
                if beta >= alpha {
                    self.filtration(&alpha).f
                } else {
                    let l = (&alpha - &beta).to_integer();
                    let l = i64::try_from(l).expect("window index fits in i64");
                    self.filtration(&alpha).f.shift(l)
                }
            };
            debug_assert_eq!(f.ambient(), d);
            hodge.insert(beta, f);
        }
        Ok(FilteredWindow { win, hodge })
    }
}

/// A window with a Hodge filtration on every component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredWindow {
    pub win: WindowModule,
    pub hodge: BTreeMap<Rational, IncreasingFiltration>,
}

impl FilteredWindow {
    /// Indices at which some component filtration changes, widened by one.
    fn index_range(&self) -> Option<(i64, i64)> {
        let mut lo = i64::MAX;
        let mut hi = i64::MIN;
        for f in self.hodge.values() {
            if let Some((a, b)) = f.range() {
                lo = lo.min(a);
                hi = hi.max(b);
            }
        }
        (lo <= hi).then_some((lo - 2, hi + 2))
    }

    /// Surjectivity of `t: F_p M^β → F_p M^{β+1}` for `β > -1` and of
    /// `∂_t: F_p M^β → F_{p+1} M^{β-1}` for `β < 0`, at every `p`.
    pub fn check_specializable(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some((lo, hi)) = self.index_range() else {
            return out;
        };
        let one = Rational::one();
        for (beta, f) in &self.hodge {
            for p in lo..=hi {
                if beta > &minus_one() {
                    if let (Some(t), Some(g)) = (self.win.t_at(beta), self.hodge.get(&(beta + &one))) {
                        if t.map_subspace(&f.step(p)) != g.step(p) {
                            out.push(format!("t: F_{p} M^{beta} → F_{p} M^{} is not onto", beta + &one));
                        }
                    }
                }
                if beta < &zero() {
                    if let (Some(d), Some(g)) = (self.win.d_at(beta), self.hodge.get(&(beta - &one))) {
                        if d.map_subspace(&f.step(p)) != g.step(p + 1) {
                            out.push(format!(
                                "∂: F_{p} M^{beta} → F_{} M^{} is not onto",
                                p + 1,
                                beta - &one
                            ));
                        }
                    }
                }
            }
        }
        out
    }

    /// Recomputes every propagated step by composing the window maps,
    /// `t^l F_p M^α` upward and `∂^l F_{p-l} M^α` downward, and compares.
    pub fn check_decomposition(&self, m: &MonodromicMhm) -> Vec<String> {
        let mut out = Vec::new();
        let Some((lo, hi)) = self.index_range() else {
            return out;
        };
        let one = Rational::one();
        for alpha in m.core.alphas() {
            let base = m.filtration(&alpha).f;
            if alpha > minus_one() {
                let mut beta = alpha.clone();
                let mut acc = Matrix::identity(m.core.dim(&alpha));
                while let Some(t) = self.win.t_at(&beta) {
                    acc = t * &acc;
                    beta += &one;
                    for p in lo..=hi {
                        if acc.map_subspace(&base.step(p)) != self.hodge[&beta].step(p) {
                            out.push(format!("F_{p} M^{beta} ≠ t^l F_{p} M^{alpha}"));
                        }
                    }
                }
            }
            if alpha < zero() {
                let mut beta = alpha.clone();
                let mut acc = Matrix::identity(m.core.dim(&alpha));
                let mut l = 0i64;
                while let Some(d) = self.win.d_at(&beta) {
                    acc = d * &acc;
                    beta -= &one;
                    l += 1;
                    for p in lo..=hi {
                        if acc.map_subspace(&base.step(p - l)) != self.hodge[&beta].step(p) {
                            out.push(format!("F_{p} M^{beta} ≠ ∂^{l} F_{} M^{alpha}", p - l));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Convenience for tests and generators: `(F, W)` with single jumps.
pub fn pure_pair(dim: usize, f_at: i64, w_at: i64) -> FiltrationPair {
    FiltrationPair::trivial(dim, f_at, w_at)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{int, rat};

    fn half_line() -> MonodromicMhm {
        MonodromicMhm::new(
            CoreData::single(rat(-1, 2), Matrix::zeros(1, 1)),
            BTreeMap::from([(rat(-1, 2), pure_pair(1, 0, 1))]),
            true,
        )
    }

    fn delta() -> MonodromicMhm {
        MonodromicMhm::new(
            CoreData::delta_module(),
            BTreeMap::from([(minus_one(), pure_pair(1, 0, 0))]),
            true,
        )
    }

    #[test]
    fn zero_object_is_valid() {
        assert!(MonodromicMhm::zero().is_valid());
        let fw = MonodromicMhm::zero().propagate_filtration(2).unwrap();
        assert!(fw.win.is_empty());
    }

    #[test]
    fn weight_not_dropping_is_reported() {
        let m = MonodromicMhm::new(
            CoreData::single(rat(-1, 2), Matrix::jordan_block(2)),
            BTreeMap::from([(
                rat(-1, 2),
                FiltrationPair::new(
                    crate::filtration::IncreasingFiltration::new(
                        2,
                        vec![(0, crate::linalg::Subspace::coordinate(2, &[1])), (1, crate::linalg::Subspace::full(2))],
                    )
                    .unwrap(),
                    crate::filtration::IncreasingFiltration::trivial(2, 0),
                )
                .unwrap(),
            )]),
            true,
        );
        let problems = m.validate();
        assert!(problems.iter().any(|p| p.contains("N W_k ⊄ W_{k-2}")), "{problems:?}");
    }

    #[test]
    fn propagation_examples() {
        let fw = half_line().propagate_filtration(1).unwrap();
        assert!(fw.hodge[&rat(1, 2)].step(0).is_full());
        assert!(fw.check_specializable().is_empty());
        assert!(fw.check_decomposition(&half_line()).is_empty());

        let fw = delta().propagate_filtration(3).unwrap();
        for l in 0..=3i64 {
            assert_eq!(fw.hodge[&int(-1 - l)].jump_indices(), vec![l]);
        }
        assert!(fw.check_specializable().is_empty());
        assert!(fw.check_decomposition(&delta()).is_empty());
    }

    #[test]
    fn twist_roundtrip() {
        let m = half_line();
        assert_eq!(m.tate_twist(0), m);
        assert_eq!(m.tate_twist(2).tate_twist(-2), m);
        assert!(m.tate_twist(3).is_valid());
    }
}
