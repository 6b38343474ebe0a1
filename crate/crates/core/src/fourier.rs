//! Fourier–Laplace transform of monodromic data.
//!
//! On components the transform relabels `β ↦ -β-1`. On gluing data it swaps
//! the roles of `φ` and `ψ_0`: the new `ψ_0` is the old `φ` with
//! `N' = c·v`, the new `φ` is the old `ψ_0(-1)`, and `(c', v') = (-v, c)`.

use std::collections::BTreeMap;

use num_traits::One;

use crate::dmod::{expand, find_core_isomorphism, CoreData, CoreMorphism, WindowModule};
use crate::error::{Error, Result};
use crate::gluing::{functor_f, functor_g, GluingDatum, PsiComponent, PsiDatum};
use crate::linalg::{int, is_integer, Rational};
use crate::mhm::{minus_one, zero, MonodromicMhm};

/// How many times the transform has been applied. Each pair of applications
/// negates `u` and `w`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct FourierLabel {
    pub applied: u32,
}

impl FourierLabel {
    pub fn next(self) -> Self {
        FourierLabel { applied: self.applied + 1 }
    }

    /// Sign picked up by `u` and `w` after an even number of applications;
    /// `None` after an odd number, where `ψ_0` and `φ` trade places.
    pub fn junction_sign(self) -> Option<i64> {
        self.applied.is_multiple_of(2).then_some(if self.applied.is_multiple_of(4) { 1 } else { -1 })
    }
}

/// The swap on gluing data. Does not validate.
pub fn fourier_gluing(g: &GluingDatum) -> GluingDatum {
    let one = Rational::one();
    let mut components = BTreeMap::new();
    for (a, c) in &g.psi.components {
        if !is_integer(a) {
            components.insert(-a - &one, c.clone());
        }
    }
    let new_psi0 = PsiComponent {
        n: &g.c * &g.v,
        filt: g.phi.clone(),
    };
    components.insert(zero(), new_psi0);
    let old_psi0 = g.psi.get(&zero());
    GluingDatum {
        psi: PsiDatum::new(components),
        phi: old_psi0.filt.twist(-1),
        c: -&g.v,
        v: g.c.clone(),
        polarizable: g.polarizable,
    }
}

/// `G ∘ swap ∘ F`.
pub fn fourier(m: &MonodromicMhm) -> Result<MonodromicMhm> {
    functor_g(&fourier_gluing(&functor_f(m)?))
}

/// The transform on core data alone.
pub fn fourier_core(core: &CoreData) -> Result<CoreData> {
    let problems = core.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidCore(problems));
    }
    let one = Rational::one();
    let mut components = BTreeMap::new();
    for (a, n) in core.components() {
        if !is_integer(a) {
            components.insert(-a - &one, n.clone());
        }
    }
    components.insert(zero(), -&core.n(&minus_one()));
    components.insert(minus_one(), -&core.n(&zero()));
    Ok(CoreData::new(components, core.w().clone(), -core.u()))
}

/// Violations of the Hodge shift identities between `m` and its transform:
/// `F_p FOU^0 = F_{p+1} M^{-1}`, `F_p FOU^α = F_p M^{-α-1}` for
/// `α ∈ (-1, 0)`, and `F_p FOU^{-1} = F_p M^0`.
pub fn check_hodge_shifts(m: &MonodromicMhm, fm: &MonodromicMhm) -> Vec<String> {
    let one = Rational::one();
    let mut out = Vec::new();
    let mut labels: Vec<Rational> = fm.core.alphas();
    labels.extend(m.core.alphas().iter().map(|a| -a - &one));
    labels.sort();
    labels.dedup();
    for a in labels {
        let (expected, rule) = if a == zero() {
            (m.filtration(&minus_one()).f.shift(-1), "F_p FOU^0 = F_{p+1} M^{-1}")
        } else if a == minus_one() {
            (m.filtration(&zero()).f, "F_p FOU^{-1} = F_p M^0")
        } else {
            (m.filtration(&(-&a - &one)).f, "F_p FOU^α = F_p M^{-α-1}")
        };
        if fm.filtration(&a).f != expected {
            out.push(format!("{rule} fails at alpha {a}"));
        }
    }
    out
}

/// Violations of `dim FOU^β = dim M^{-β-1}` across the window `[-1-K, K]`.
pub fn check_dimension_pairing(core: &CoreData, fcore: &CoreData, k: u32) -> Result<Vec<String>> {
    let one = Rational::one();
    let w = expand(core, k)?;
    let fw = expand(fcore, k)?;
    let mut out = Vec::new();
    let mut betas = w.betas();
    betas.extend(fw.betas());
    betas.sort();
    betas.dedup();
    for b in betas {
        let mirror = -&b - &one;
        if fw.dim(&b) != w.dim(&mirror) {
            out.push(format!(
                "dim FOU^{b} = {} but dim M^{mirror} = {}",
                fw.dim(&b),
                w.dim(&mirror)
            ));
        }
    }
    Ok(out)
}

/// Regrades a window by `τ ↦ -∂_t`, `∂_τ ↦ t`: the new piece at `β` is the
/// old piece at `-β-1`, with new `t = -∂` and new `∂ = t`.
pub fn fourier_window(win: &WindowModule) -> WindowModule {
    let one = Rational::one();
    let mut graded = BTreeMap::new();
    let mut t_maps = BTreeMap::new();
    let mut d_maps = BTreeMap::new();
    for (b, d) in win.graded() {
        let beta = -b - &one;
        graded.insert(beta.clone(), *d);
        if let Some(old_d) = win.d_at(b) {
            t_maps.insert(beta.clone(), -old_d);
        }
        if let Some(old_t) = win.t_at(b) {
            d_maps.insert(beta, old_t.clone());
        }
    }
    WindowModule::new(win.lo().clone(), win.hi().clone(), graded, t_maps, d_maps)
}

/// Expands the core, regrades the window and returns it.
pub fn fourier_window_oracle(core: &CoreData, k: u32) -> Result<WindowModule> {
    if k < 1 {
        return Err(Error::WindowTooSmall(
            "the Fourier window needs K ≥ 1".to_string(),
        ));
    }
    Ok(fourier_window(&expand(core, k)?))
}

/// Compares the core-level transform with the window regrading; returns the
/// isomorphism found between them.
pub fn compare_with_window(core: &CoreData, k: u32, seed: u64) -> Result<Option<CoreMorphism>> {
    let direct = fourier_core(core)?;
    let from_window = fourier_window_oracle(core, k)?.to_core()?;
    Ok(find_core_isomorphism(&from_window, &direct, seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DoubleFourierReport {
    /// Core data of the double transform equals the input with `u`, `w`
    /// negated.
    pub core_matches: bool,
    /// Labels whose filtrations changed, with what happened to them.
    pub filtration_notes: Vec<String>,
}

impl DoubleFourierReport {
    pub fn passed(&self) -> bool {
        self.core_matches
    }
}

/// Applies the transform twice and reports the outcome. Only the core data
/// comparison counts as a pass or fail; filtration changes are recorded.
pub fn double_fourier_check(m: &MonodromicMhm) -> Result<DoubleFourierReport> {
    let ff = fourier(&fourier(m)?)?;
    let core_matches = ff.core == m.core.negate_junction();
    let mut filtration_notes = Vec::new();
    let mut labels = m.core.alphas();
    labels.extend(ff.core.alphas());
    labels.sort();
    labels.dedup();
    for a in labels {
        let (before, after) = (m.filtration(&a), ff.filtration(&a));
        if before == after {
            continue;
        }
        let note = if after == before.twist(-1) {
            "Tate twisted by -1"
        } else {
            "changed"
        };
        filtration_notes.push(format!("alpha {a}: {note}"));
    }
    Ok(DoubleFourierReport {
        core_matches,
        filtration_notes,
    })
}

/// Every Fourier check on one module: validity of the output, dimension
/// pairing, Hodge shifts, agreement with the window regrading and the double
/// transform.
pub fn fourier_oracle(m: &MonodromicMhm, k: u32, seed: u64) -> Result<Vec<String>> {
    let fm = fourier(m)?;
    let mut out: Vec<String> = fm.validate().into_iter().map(|v| format!("output invalid: {v}")).collect();
    out.extend(check_dimension_pairing(&m.core, &fm.core, k)?);
    out.extend(check_hodge_shifts(m, &fm));
    if fourier_core(&m.core)? != fm.core {
        out.push("core-level transform disagrees with the gluing-level one".to_string());
    }
    if compare_with_window(&m.core, k, seed)?.is_none() {
        out.push("window regrading is not isomorphic to the transform".to_string());
    }
    if !double_fourier_check(m)?.passed() {
        out.push("double transform is not the input with u, w negated".to_string());
    }
    Ok(out)
}

/// The label `-β-1` paired with `β` by the transform.
pub fn mirror(beta: &Rational) -> Rational {
    -beta - &int(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::FiltrationPair;
    use crate::linalg::{rat, Matrix};

    fn line(alpha: Rational) -> MonodromicMhm {
        MonodromicMhm::new(
            CoreData::single(alpha.clone(), Matrix::zeros(1, 1)),
            BTreeMap::from([(alpha, FiltrationPair::trivial(1, 0, 1))]),
            true,
        )
    }

    fn structure_sheaf() -> MonodromicMhm {
        line(zero())
    }

    #[test]
    fn half_line_is_fixed() {
        let m = line(rat(-1, 2));
        assert!(m.is_valid(), "{:?}", m.validate());
        let fm = fourier(&m).unwrap();
        assert_eq!(fm.core.alphas(), vec![rat(-1, 2)]);
        assert_eq!(fm.filtration(&rat(-1, 2)).f.jump_indices(), vec![0]);
        assert!(fourier_oracle(&m, 2, 0).unwrap().is_empty());
    }

    #[test]
    fn structure_sheaf_goes_to_delta() {
        let m = structure_sheaf();
        assert!(m.is_valid(), "{:?}", m.validate());
        let fm = fourier(&m).unwrap();
        assert_eq!(fm.core.dim(&minus_one()), 1);
        assert_eq!(fm.core.dim(&zero()), 0);
        assert_eq!(fm.filtration(&minus_one()).f, m.filtration(&zero()).f);
        assert!(check_hodge_shifts(&m, &fm).is_empty());
        let win = fourier_window_oracle(&m.core, 2).unwrap();
        for b in win.betas() {
            assert_eq!(win.dim(&b), usize::from(b < zero()), "beta {b}");
        }
        assert!(fourier_oracle(&m, 2, 0).unwrap().is_empty());
    }

    #[test]
    fn delta_goes_to_structure_sheaf() {
        let fm = fourier(&structure_sheaf()).unwrap();
        let ffm = fourier(&fm).unwrap();
        assert_eq!(ffm.core.dim(&zero()), 1);
        assert_eq!(
            ffm.filtration(&zero()).f,
            fm.filtration(&minus_one()).f.shift(-1)
        );
        assert!(fourier_oracle(&fm, 2, 0).unwrap().is_empty());
        let report = double_fourier_check(&fm).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn zero_object_matches() {
        let report = double_fourier_check(&MonodromicMhm::zero()).unwrap();
        assert!(report.passed());
        assert!(report.filtration_notes.is_empty());
    }

    #[test]
    fn double_window_negates_both_maps() {
        let core = CoreData::single(rat(-1, 2), Matrix::zeros(1, 1));
        let w = expand(&core, 2).unwrap();
        let ww = fourier_window(&fourier_window(&w));
        for (b, t) in w.t_maps() {
            assert_eq!(ww.t_at(b), Some(&-t));
        }
        for (b, d) in w.d_maps() {
            assert_eq!(ww.d_at(b), Some(&-d));
        }
    }

    #[test]
    fn small_window_is_rejected() {
        assert!(matches!(
            fourier_window_oracle(&CoreData::structure_sheaf(), 0),
            Err(Error::WindowTooSmall(_))
        ));
    }

    #[test]
    fn labels_track_the_junction_sign() {
        let l = FourierLabel::default();
        assert_eq!(l.junction_sign(), Some(1));
        assert_eq!(l.next().junction_sign(), None);
        assert_eq!(l.next().next().junction_sign(), Some(-1));
        assert_eq!(mirror(&rat(-1, 3)), rat(-2, 3));
    }
}
