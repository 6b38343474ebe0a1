//! Gluing data `((ψ, N), φ, c, v)` and the functors between them and
//! monodromic mixed Hodge modules.

use std::collections::BTreeMap;

use crate::dmod::{CoreData, CoreMorphism};
use crate::filtration::{check_relative_monodromy, FiltrationPair, IncreasingFiltration};
use crate::linalg::{is_nilpotent, Matrix, Rational};
use crate::mhm::{
    minus_one, module_from_phi, module_from_psi, phi_from_module, psi_from_module, zero, MhsMorphism,
    MonodromicMhm,
};

/// One nearby-cycle component: a mixed Hodge structure with its nilpotent `N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PsiComponent {
    pub n: Matrix,
    pub filt: FiltrationPair,
}

impl PsiComponent {
    pub fn dim(&self) -> usize {
        self.n.rows()
    }

    pub fn twist(&self, l: i64) -> Self {
        PsiComponent {
            n: self.n.clone(),
            filt: self.filt.twist(l),
        }
    }

    /// Transport along an invertible change of basis `g`.
    pub fn transport(&self, g: &Matrix) -> Self {
        let inv = g.inverse().expect("transport along an invertible matrix");
        PsiComponent {
            n: &(g * &self.n) * &inv,
            filt: self.filt.pushforward(g).expect("square change of basis"),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        PsiComponent {
            n: Matrix::block_diag(&[&self.n, &other.n]),
            filt: self.filt.direct_sum(&other.filt),
        }
    }

    pub fn zero() -> Self {
        PsiComponent {
            n: Matrix::zeros(0, 0),
            filt: FiltrationPair::trivial(0, 0, 0),
        }
    }
}

/// The nearby-cycle part alone, graded by `α ∈ (-1, 0]`: objects without
/// vanishing cycles, on which the zero component may carry any `N`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PsiDatum {
    pub components: BTreeMap<Rational, PsiComponent>,
}

impl PsiDatum {
    pub fn new(components: BTreeMap<Rational, PsiComponent>) -> Self {
        PsiDatum {
            components: components.into_iter().filter(|(_, c)| c.dim() > 0).collect(),
        }
    }

    pub fn dim(&self, alpha: &Rational) -> usize {
        self.components.get(alpha).map_or(0, PsiComponent::dim)
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(PsiComponent::dim).sum()
    }

    pub fn get(&self, alpha: &Rational) -> PsiComponent {
        self.components.get(alpha).cloned().unwrap_or_else(PsiComponent::zero)
    }

    pub fn twist(&self, l: i64) -> Self {
        PsiDatum {
            components: self
                .components
                .iter()
                .map(|(a, c)| (a.clone(), c.twist(l)))
                .collect(),
        }
    }

    /// Largest nilpotency index over all components (at least 1).
    pub fn nilpotency_index(&self) -> usize {
        self.components
            .values()
            .map(|c| crate::linalg::nilpotency_index(&c.n).unwrap_or(0))
            .max()
            .unwrap_or(0)
            .max(1)
    }
}

fn check_component(label: &str, n: &Matrix, filt: &FiltrationPair, out: &mut Vec<String>) {
    if !n.is_square() {
        out.push(format!("N on {label} is not square"));
        return;
    }
    if filt.ambient() != n.rows() {
        out.push(format!("filtrations on {label} live on the wrong space"));
        return;
    }
    if !is_nilpotent(n) {
        out.push(format!("NotNilpotent: N on {label}"));
        return;
    }
    if !IncreasingFiltration::is_filtered(n, &filt.f, &filt.f, 1) {
        out.push(format!("N F_p ⊄ F_{{p+1}} on {label}"));
    }
    if !IncreasingFiltration::is_filtered(n, &filt.w, &filt.w, -2) {
        out.push(format!("N W_k ⊄ W_{{k-2}} on {label}"));
    } else if !MhsMorphism::new(n.clone(), 1, -2).is_strict(filt, filt) {
        out.push(format!("N is not strict on {label}"));
    }
    match check_relative_monodromy(n, &filt.w, &filt.w) {
        Ok(r) if r.ok => {}
        Ok(r) => out.push(format!(
            "relative monodromy filtration differs from W on {label} at {:?}",
            r.failure
        )),
        Err(e) => out.push(format!("{e} on {label}")),
    }
}

/// Violations for the nearby-cycle part alone.
pub fn validate_psi(p: &PsiDatum) -> Vec<String> {
    let mut out = Vec::new();
    for (alpha, c) in &p.components {
        if alpha <= &minus_one() || alpha > &zero() {
            out.push(format!("alpha {alpha} out of range (-1, 0]"));
        }
        check_component(&format!("psi at alpha {alpha}"), &c.n, &c.filt, &mut out);
    }
    out
}

/// An object of the gluing category.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GluingDatum {
    pub psi: PsiDatum,
    pub phi: FiltrationPair,
    /// `c: ψ_0 → φ`, filtered with shifts `(0, 0)`.
    pub c: Matrix,
    /// `v: φ → ψ_0(-1)`, filtered with shifts `(+1, -2)` into `ψ_0`.
    pub v: Matrix,
    pub polarizable: bool,
}

impl GluingDatum {
    pub fn zero() -> Self {
        GluingDatum {
            psi: PsiDatum::default(),
            phi: FiltrationPair::trivial(0, 0, 0),
            c: Matrix::zeros(0, 0),
            v: Matrix::zeros(0, 0),
            polarizable: true,
        }
    }

    /// A datum with no vanishing cycles.
    pub fn from_psi(psi: PsiDatum) -> Self {
        let d0 = psi.dim(&zero());
        GluingDatum {
            psi,
            phi: FiltrationPair::trivial(0, 0, 0),
            c: Matrix::zeros(0, d0),
            v: Matrix::zeros(d0, 0),
            polarizable: true,
        }
    }

    pub fn phi_dim(&self) -> usize {
        self.phi.ambient()
    }

    /// `N` on `φ`, determined by `c·v = -N_φ`.
    pub fn phi_n(&self) -> Matrix {
        -&(&self.c * &self.v)
    }

    pub fn twist(&self, l: i64) -> Self {
        GluingDatum {
            psi: self.psi.twist(l),
            phi: self.phi.twist(l),
            c: self.c.clone(),
            v: self.v.clone(),
            polarizable: self.polarizable,
        }
    }
}

pub fn validate_gluing(g: &GluingDatum) -> Vec<String> {
    let mut out = validate_psi(&g.psi);
    let d0 = g.psi.dim(&zero());
    let dp = g.phi_dim();
    if (g.c.rows(), g.c.cols()) != (dp, d0) {
        out.push(format!("c has shape {}x{}, expected {dp}x{d0}", g.c.rows(), g.c.cols()));
    }
    if (g.v.rows(), g.v.cols()) != (d0, dp) {
        out.push(format!("v has shape {}x{}, expected {d0}x{dp}", g.v.rows(), g.v.cols()));
    }
    if !out.is_empty() {
        return out;
    }
    let psi0 = g.psi.get(&zero());
    if &g.v * &g.c != -&psi0.n {
        out.push("v·c ≠ −N_0".to_string());
    }
    if !MhsMorphism::new(g.c.clone(), 0, 0).is_strict(&psi0.filt, &g.phi) {
        out.push("c is not a strict morphism ψ_0 → φ".to_string());
    }
    if !MhsMorphism::new(g.v.clone(), 1, -2).is_strict(&g.phi, &psi0.filt) {
        out.push("v is not a strict morphism φ → ψ_0(−1)".to_string());
    }
    if out.is_empty() {
        check_component("phi", &g.phi_n(), &g.phi, &mut out);
    }
    out
}

/// The datum of nearby and vanishing cycles of a module, without validation.
pub fn cycles_datum(m: &MonodromicMhm) -> GluingDatum {
    let psi = m
        .core
        .components()
        .iter()
        .filter(|(a, _)| *a > &minus_one())
        .map(|(a, n)| {
            (
                a.clone(),
                PsiComponent {
                    n: n.clone(),
                    filt: psi_from_module(&m.filtration(a)),
                },
            )
        })
        .collect();
    GluingDatum {
        psi: PsiDatum::new(psi),
        phi: phi_from_module(&m.filtration(&minus_one())),
        c: -m.core.u(),
        v: m.core.w().clone(),
        polarizable: m.polarizable,
    }
}

/// Nearby and vanishing cycles: `can = -u`, `var = w`.
pub fn functor_f(m: &MonodromicMhm) -> crate::Result<GluingDatum> {
    let problems = m.validate();
    if !problems.is_empty() {
        return Err(crate::Error::InvalidMmhm(problems));
    }
    Ok(cycles_datum(m))
}

/// Glues a datum into a module: `M^α = ψ_α`, `M^{-1} = φ`, `u = -c`, `w = v`.
pub fn functor_g(g: &GluingDatum) -> crate::Result<MonodromicMhm> {
    let problems = validate_gluing(g);
    if !problems.is_empty() {
        return Err(crate::Error::InvalidGluing(problems));
    }
    let mut components = BTreeMap::new();
    let mut filtrations = BTreeMap::new();
    for (a, c) in &g.psi.components {
        components.insert(a.clone(), c.n.clone());
        filtrations.insert(a.clone(), module_from_psi(&c.filt));
    }
    let u = -&g.c;
    let w = g.v.clone();
    if g.phi_dim() > 0 {
        components.insert(minus_one(), &u * &w);
        filtrations.insert(minus_one(), module_from_phi(&g.phi));
    }
    Ok(MonodromicMhm::new(CoreData::new(components, u, w), filtrations, g.polarizable))
}

/// A morphism of gluing data: matrices on each `ψ_α` and on `φ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingMorphism {
    pub psi: BTreeMap<Rational, Matrix>,
    pub phi: Matrix,
}

impl GluingMorphism {
    pub fn identity(g: &GluingDatum) -> Self {
        GluingMorphism {
            psi: g
                .psi
                .components
                .iter()
                .map(|(a, c)| (a.clone(), Matrix::identity(c.dim())))
                .collect(),
            phi: Matrix::identity(g.phi_dim()),
        }
    }

    fn at(&self, a: &Rational, src: &GluingDatum, tgt: &GluingDatum) -> Matrix {
        self.psi
            .get(a)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(tgt.psi.dim(a), src.psi.dim(a)))
    }

    /// Violations of the morphism conditions: commuting with `N`, `c`, `v`
    /// and strict filtered maps with shifts `(0, 0)`.
    pub fn check(&self, src: &GluingDatum, tgt: &GluingDatum) -> Vec<String> {
        let mut out = Vec::new();
        let mut alphas: Vec<Rational> = src.psi.components.keys().cloned().collect();
        alphas.extend(tgt.psi.components.keys().cloned());
        alphas.sort();
        alphas.dedup();
        for a in &alphas {
            let f = self.at(a, src, tgt);
            let (s, t) = (src.psi.get(a), tgt.psi.get(a));
            if (f.rows(), f.cols()) != (t.dim(), s.dim()) {
                out.push(format!("map at alpha {a} has the wrong shape"));
                continue;
            }
            if &f * &s.n != &t.n * &f {
                out.push(format!("does not commute with N at alpha {a}"));
            }
            if !MhsMorphism::new(f, 0, 0).is_strict(&s.filt, &t.filt) {
                out.push(format!("not strict at alpha {a}"));
            }
        }
        if (self.phi.rows(), self.phi.cols()) != (tgt.phi_dim(), src.phi_dim()) {
            out.push("map on phi has the wrong shape".to_string());
            return out;
        }
        let f0 = self.at(&zero(), src, tgt);
        if &self.phi * &src.c != &tgt.c * &f0 {
            out.push("does not commute with c".to_string());
        }
        if &f0 * &src.v != &tgt.v * &self.phi {
            out.push("does not commute with v".to_string());
        }
        if !MhsMorphism::new(self.phi.clone(), 0, 0).is_strict(&src.phi, &tgt.phi) {
            out.push("not strict on phi".to_string());
        }
        out
    }

    /// The induced morphism of glued modules: the same matrices.
    pub fn glue(&self) -> CoreMorphism {
        let mut maps = self.psi.clone();
        if self.phi.rows() > 0 || self.phi.cols() > 0 {
            maps.insert(minus_one(), self.phi.clone());
        }
        CoreMorphism { maps }
    }
}

/// Identity witnesses produced by a round trip, one matrix per component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoundtripWitness {
    pub maps: BTreeMap<Rational, Matrix>,
}

/// Checks that an identity-on-components map is an isomorphism of modules
/// carrying `F` and `W` exactly onto each other.
fn check_identity_witness(a: &MonodromicMhm, b: &MonodromicMhm) -> Result<RoundtripWitness, String> {
    let witness = CoreMorphism::identity(&a.core);
    if !witness.is_isomorphism(&a.core, &b.core) {
        return Err("identity is not an isomorphism of the underlying modules".to_string());
    }
    for (alpha, m) in &witness.maps {
        let (fa, fb) = (a.filtration(alpha), b.filtration(alpha));
        if fa.f.pushforward(m).ok() != Some(fb.f.clone()) {
            return Err(format!("F differs at alpha {alpha}"));
        }
        if fa.w.pushforward(m).ok() != Some(fb.w.clone()) {
            return Err(format!("W differs at alpha {alpha}"));
        }
    }
    Ok(RoundtripWitness { maps: witness.maps })
}

/// `F∘G = id` exactly and `G∘F ≅ id` with identity witnesses.
pub fn roundtrip_gluing(g: &GluingDatum) -> Result<RoundtripWitness, String> {
    let m = functor_g(g).map_err(|e| e.to_string())?;
    let back = functor_f(&m).map_err(|e| e.to_string())?;
    if &back != g {
        return Err(first_gluing_mismatch(g, &back));
    }
    roundtrip_module(&m)
}

/// `G∘F ≅ id` with identity witnesses, and `F∘G∘F = F`.
pub fn roundtrip_module(m: &MonodromicMhm) -> Result<RoundtripWitness, String> {
    let g = functor_f(m).map_err(|e| e.to_string())?;
    let back = functor_g(&g).map_err(|e| e.to_string())?;
    let witness = check_identity_witness(m, &back)?;
    if functor_f(&back).map_err(|e| e.to_string())? != g {
        return Err("F∘G∘F differs from F".to_string());
    }
    Ok(witness)
}

fn first_gluing_mismatch(a: &GluingDatum, b: &GluingDatum) -> String {
    let alphas: Vec<&Rational> = a.psi.components.keys().chain(b.psi.components.keys()).collect();
    for alpha in alphas {
        let (x, y) = (a.psi.get(alpha), b.psi.get(alpha));
        if x.n != y.n {
            return format!("N differs at alpha {alpha}");
        }
        if x.filt.f != y.filt.f {
            return format!("F differs at alpha {alpha}");
        }
        if x.filt.w != y.filt.w {
            return format!("W differs at alpha {alpha}");
        }
    }
    if a.phi != b.phi {
        return "filtrations on phi differ".to_string();
    }
    if a.c != b.c {
        return "c differs".to_string();
    }
    if a.v != b.v {
        return "v differs".to_string();
    }
    "data differ".to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;
    use crate::mhm::pure_pair;

    fn line_psi(alpha: Rational, f: i64, w: i64) -> PsiDatum {
        PsiDatum::new(BTreeMap::from([(
            alpha,
            PsiComponent {
                n: Matrix::zeros(1, 1),
                filt: pure_pair(1, f, w),
            },
        )]))
    }

    fn jordan2() -> PsiComponent {
        let filt = FiltrationPair::new(
            IncreasingFiltration::new(
                2,
                vec![(0, crate::linalg::Subspace::coordinate(2, &[1])), (1, crate::linalg::Subspace::full(2))],
            )
            .unwrap(),
            crate::filtration::monodromy_weight_filtration(&Matrix::jordan_block(2), -1).unwrap(),
        )
        .unwrap();
        PsiComponent {
            n: Matrix::jordan_block(2),
            filt,
        }
    }

    #[test]
    fn validate_examples() {
        let bad = GluingDatum::from_psi(PsiDatum::new(BTreeMap::from([(zero(), jordan2())])));
        assert!(validate_gluing(&bad).contains(&"v·c ≠ −N_0".to_string()));
        let ok = GluingDatum::from_psi(PsiDatum::new(BTreeMap::from([(rat(-1, 2), jordan2())])));
        assert!(validate_gluing(&ok).is_empty());
        assert!(validate_gluing(&GluingDatum::zero()).is_empty());
    }

    #[test]
    fn structure_sheaf_and_delta() {
        let g = GluingDatum::from_psi(line_psi(zero(), 0, 0));
        let m = functor_g(&g).unwrap();
        assert_eq!(m.core, CoreData::structure_sheaf());
        assert_eq!(functor_f(&m).unwrap(), g);

        let d = GluingDatum {
            psi: PsiDatum::default(),
            phi: pure_pair(1, 0, 0),
            c: Matrix::zeros(1, 0),
            v: Matrix::zeros(0, 1),
            polarizable: true,
        };
        let m = functor_g(&d).unwrap();
        assert_eq!(m.core, CoreData::delta_module());
        assert_eq!(m.filtration(&minus_one()).f.jump_indices(), vec![1]);
        assert_eq!(functor_f(&m).unwrap(), d);
    }

    #[test]
    fn open_extension() {
        let g = GluingDatum {
            psi: line_psi(zero(), 0, 0),
            phi: pure_pair(1, 0, 0),
            c: Matrix::identity(1),
            v: Matrix::zeros(1, 1),
            polarizable: true,
        };
        let m = functor_g(&g).unwrap();
        let back = functor_f(&m).unwrap();
        assert_eq!(back.c, Matrix::identity(1));
        assert_eq!(back.v, Matrix::zeros(1, 1));
        assert!(roundtrip_gluing(&g).is_ok());
    }

    #[test]
    fn roundtrip_zero_and_jordan() {
        assert!(roundtrip_gluing(&GluingDatum::zero()).unwrap().maps.is_empty());
        let g = GluingDatum::from_psi(PsiDatum::new(BTreeMap::from([(rat(-1, 3), jordan2())])));
        let w = roundtrip_gluing(&g).unwrap();
        assert_eq!(w.maps[&rat(-1, 3)], Matrix::identity(2));
    }

    #[test]
    fn glued_morphism_commutes() {
        let g = GluingDatum {
            psi: line_psi(zero(), 0, 0),
            phi: pure_pair(1, 0, 0),
            c: Matrix::identity(1),
            v: Matrix::zeros(1, 1),
            polarizable: true,
        };
        let scale = GluingMorphism {
            psi: BTreeMap::from([(zero(), Matrix::from_i64(&[&[3]]))]),
            phi: Matrix::from_i64(&[&[3]]),
        };
        assert!(scale.check(&g, &g).is_empty());
        let m = functor_g(&g).unwrap();
        assert!(scale.glue().check(&m.core, &m.core).is_ok());
    }
}
