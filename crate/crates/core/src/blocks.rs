//! Building blocks `V^nilp_r`, `S_m`, `L_r` and the tensor kernel/cokernel
//! construction that rebuilds a nearby-cycle datum from them.
//!
//! The construction tensors each component `ψ_α` with `V_r`, takes the kernel
//! or cokernel of `D = N⊗1 − 1⊗N`, and keeps the components whose eigenvalue
//! matches a line of `S_m`. For `r` at least the nilpotency index both
//! variants are isomorphic to the input; explicit witnesses are
//! `m ↦ Σ_j N^j m ⊗ e_{j+1}` into the kernel and `m ↦ [m ⊗ e_r]` into the
//! cokernel.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::filtration::{FiltrationPair, IncreasingFiltration};
use crate::gluing::{PsiComponent, PsiDatum};
use crate::linalg::{int, nilpotency_index, rat, unit_vector, InduceMode, Matrix, Rational, Subspace};
use crate::mhm::MhsMorphism;

/// `V^nilp_r`: `N e_i = e_{i-1}`, `F_i = span(e_{r-i}, …, e_r)`, and
/// `W_{-2i} = W_{-2i+1} = span(e_1, …, e_{r-i})` (basis indexed from 1).
pub fn nilp_block(r: usize) -> PsiComponent {
    PsiComponent {
        n: Matrix::jordan_block(r),
        filt: FiltrationPair {
            f: nilp_hodge(r),
            w: nilp_weight(r),
        },
    }
}

pub fn nilp_hodge(r: usize) -> IncreasingFiltration {
    let r = r as i64;
    IncreasingFiltration::from_fn(r as usize, -1, r - 1, |i| {
        // e_{r-i} .. e_r, zero-based (r-i-1) .. (r-1)
        let idx: Vec<usize> = ((r - i - 1).max(0)..r).map(|j| j as usize).collect();
        Subspace::coordinate(r as usize, &idx)
    })
    .expect("explicit flag")
}

pub fn nilp_weight(r: usize) -> IncreasingFiltration {
    let r = r as i64;
    IncreasingFiltration::from_fn(r as usize, -2 * r, 1, |k| {
        // W_{-2i} = W_{-2i+1} = span(e_1 .. e_{r-i})
        let i = (-k).div_euclid(2) + if k.rem_euclid(2) == 1 { 1 } else { 0 };
        let top = (r - i).clamp(0, r) as usize;
        Subspace::coordinate(r as usize, &(0..top).collect::<Vec<_>>())
    })
    .expect("explicit flag")
}

/// `L_r`: one component at `α = 0` carrying `V^nilp_r`.
pub fn l_block(r: usize) -> PsiDatum {
    PsiDatum::new(BTreeMap::from([(Rational::zero(), nilp_block(r))]))
}

/// `S_m`: a line at each `α ∈ {0, -1/m, …, -(m-1)/m}` with `N = 0`, Hodge
/// filtration jumping at 0 and nearby-cycle weight 0 (module weight 1).
pub fn s_block(m: u64) -> PsiDatum {
    PsiDatum::new(
        (0..m as i64)
            .map(|j| {
                (
                    rat(-j, m as i64),
                    PsiComponent {
                        n: Matrix::zeros(1, 1),
                        filt: FiltrationPair::trivial(1, 0, 0),
                    },
                )
            })
            .collect(),
    )
}

pub fn make_blocks(r: usize, m: u64) -> (PsiDatum, PsiDatum) {
    (l_block(r), s_block(m))
}

/// A morphism of nearby-cycle data, one matrix per label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsiMorphism {
    pub maps: BTreeMap<Rational, Matrix>,
}

impl PsiMorphism {
    pub fn at(&self, alpha: &Rational, src: &PsiDatum, tgt: &PsiDatum) -> Matrix {
        self.maps
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(tgt.dim(alpha), src.dim(alpha)))
    }

    fn labels(&self, src: &PsiDatum, tgt: &PsiDatum) -> Vec<Rational> {
        let mut a: Vec<Rational> = src.components.keys().cloned().collect();
        a.extend(tgt.components.keys().cloned());
        a.extend(self.maps.keys().cloned());
        a.sort();
        a.dedup();
        a
    }

    /// Violations of: commuting with `N`, strict for `F` and `W` unshifted.
    pub fn check(&self, src: &PsiDatum, tgt: &PsiDatum) -> Vec<String> {
        let mut out = Vec::new();
        for a in self.labels(src, tgt) {
            let f = self.at(&a, src, tgt);
            let (s, t) = (src.get(&a), tgt.get(&a));
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
        out
    }

    /// An isomorphism carrying `F` and `W` exactly onto each other.
    pub fn check_isomorphism(&self, src: &PsiDatum, tgt: &PsiDatum) -> Vec<String> {
        let mut out = self.check(src, tgt);
        for a in self.labels(src, tgt) {
            let f = self.at(&a, src, tgt);
            if !f.is_invertible() {
                out.push(format!("not invertible at alpha {a}"));
                continue;
            }
            let (s, t) = (src.get(&a), tgt.get(&a));
            if s.filt.f.pushforward(&f).ok().as_ref() != Some(&t.filt.f) {
                out.push(format!("F not carried onto F at alpha {a}"));
            }
            if s.filt.w.pushforward(&f).ok().as_ref() != Some(&t.filt.w) {
                out.push(format!("W not carried onto W at alpha {a}"));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.maps.values().all(Matrix::is_zero)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BlockMorphism {
    /// `S_m → S_{am}`, the lines with matching labels.
    SIncl { m: u64, a: u64 },
    /// `L_{r+l} → L_r`, `e_i ↦ e_{i-l}`.
    LProj { r: usize, l: usize },
    /// `L_r → L_{r+l}(-l)`, `e_i ↦ e_i`.
    LTwistIncl { r: usize, l: usize },
}

/// Source, target and matrices of a natural block morphism.
pub fn block_morphism(kind: BlockMorphism) -> (PsiDatum, PsiDatum, PsiMorphism) {
    match kind {
        BlockMorphism::SIncl { m, a } => {
            let src = s_block(m);
            let tgt = s_block(a * m);
            let maps = src
                .components
                .keys()
                .map(|k| (k.clone(), Matrix::identity(1)))
                .collect();
            (src, tgt, PsiMorphism { maps })
        }
        BlockMorphism::LProj { r, l } => {
            let n = r + l;
            let f = Matrix::from_fn(r, n, |i, j| if j == i + l { int(1) } else { int(0) });
            (l_block(n), l_block(r), PsiMorphism { maps: BTreeMap::from([(Rational::zero(), f)]) })
        }
        BlockMorphism::LTwistIncl { r, l } => {
            let n = r + l;
            let f = Matrix::from_fn(n, r, |i, j| if i == j { int(1) } else { int(0) });
            (
                l_block(r),
                l_block(n).twist(-(l as i64)),
                PsiMorphism { maps: BTreeMap::from([(Rational::zero(), f)]) },
            )
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChakoVariant {
    /// Kernel of `D`, then kernel of the eigenvalue matching map.
    KK,
    /// Kernel of `D`, then cokernel of the eigenvalue matching map.
    KC,
    /// Cokernel of `D`, then kernel of the eigenvalue matching map.
    CK,
    /// Cokernel of `D`, then cokernel of the eigenvalue matching map.
    CC,
}

impl ChakoVariant {
    pub const ALL: [ChakoVariant; 4] = [ChakoVariant::KK, ChakoVariant::KC, ChakoVariant::CK, ChakoVariant::CC];

    fn kernel_first(self) -> bool {
        matches!(self, ChakoVariant::KK | ChakoVariant::KC)
    }
}

/// One component of the tensor `ψ_α ⊗ V_r` and the subspace or quotient cut
/// out by `D`.
struct TensorPiece {
    /// `N⊗1 − 1⊗N` on `ψ_α ⊗ V_r`.
    d: Matrix,
    /// `1⊗N`.
    n: Matrix,
    filt: FiltrationPair,
}

fn tensor_piece(c: &PsiComponent, r: usize) -> TensorPiece {
    let v = nilp_block(r);
    let d = &c.n.kron(&Matrix::identity(r)) - &Matrix::identity(c.dim()).kron(&v.n);
    TensorPiece {
        d,
        n: Matrix::identity(c.dim()).kron(&v.n),
        filt: c.filt.tensor(&v.filt),
    }
}

fn kernel_component(c: &PsiComponent, r: usize) -> (PsiComponent, Subspace) {
    let piece = tensor_piece(c, r);
    let k = piece.d.kernel();
    let n = crate::linalg::induce(&piece.n, &k, &k, InduceMode::Restrict).expect("D and 1⊗N commute");
    let filt = piece.filt.pullback(k.basis()).expect("basis is injective");
    (PsiComponent { n, filt }.twist(-(r as i64 - 1)), k)
}

fn cokernel_component(c: &PsiComponent, r: usize) -> (PsiComponent, Subspace) {
    let piece = tensor_piece(c, r);
    let im = piece.d.image();
    let n = crate::linalg::induce(&piece.n, &im, &im, InduceMode::Descend).expect("D and 1⊗N commute");
    let filt = piece.filt.pushforward(&im.quotient_map()).expect("quotient map is onto");
    (PsiComponent { n, filt }, im)
}

/// Labels of `g` paired with the matching lines of `S_m`; fails when some
/// label has no partner.
fn matched_lines(g: &PsiDatum, m: u64) -> Result<BTreeMap<Rational, PsiComponent>> {
    let s = s_block(m);
    g.components
        .keys()
        .map(|a| {
            s.components
                .get(a)
                .cloned()
                .map(|line| (a.clone(), line))
                .ok_or_else(|| Error::EigenvalueDenominatorMismatch {
                    alpha: a.to_string(),
                    m,
                })
        })
        .collect()
}

/// Tensor with a line of `S_m` (trivial filtrations, `N = 0`).
fn with_line(c: &PsiComponent, line: &PsiComponent) -> PsiComponent {
    PsiComponent {
        n: &c.n.kron(&Matrix::identity(line.dim())) + &Matrix::identity(c.dim()).kron(&line.n),
        filt: c.filt.tensor(&line.filt),
    }
}

/// The kernel/cokernel construction on a nearby-cycle datum.
pub fn chako_construct(g: &PsiDatum, r: usize, m: u64, variant: ChakoVariant) -> Result<PsiDatum> {
    if r == 0 || m == 0 {
        return Err(Error::DimensionMismatch("r and m must be positive".to_string()));
    }
    let lines = matched_lines(g, m)?;
    // the eigenvalue matching map vanishes exactly on pairs with equal labels,
    // so its kernel and cokernel both keep those pairs
    let mut out = BTreeMap::new();
    for (a, c) in &g.components {
        let paired = with_line(c, &lines[a]);
        let comp = if variant.kernel_first() {
            kernel_component(&paired, r).0
        } else {
            cokernel_component(&paired, r).0
        };
        out.insert(a.clone(), comp);
    }
    Ok(PsiDatum::new(out))
}

/// `m ↦ Σ_j N^j m ⊗ e_{j+1}` into the kernel variant; `None` when `r` is
/// below the nilpotency index.
pub fn kernel_witness(g: &PsiDatum, r: usize) -> Option<PsiMorphism> {
    let mut maps = BTreeMap::new();
    for (a, c) in &g.components {
        let (_, k) = kernel_component(c, r);
        let d = c.dim();
        let mut cols = Vec::with_capacity(d);
        for i in 0..d {
            let mut x = vec![Rational::zero(); d * r];
            let mut v = unit_vector(d, i);
            for j in 0..r {
                for (p, vp) in v.iter().enumerate() {
                    x[p * r + j] += vp;
                }
                v = c.n.apply(&v);
            }
            cols.push(k.coordinates(&x)?);
        }
        maps.insert(a.clone(), Matrix::from_columns(k.dim(), &cols));
    }
    Some(PsiMorphism { maps })
}

/// `m ↦ [m ⊗ e_r]` into the cokernel variant.
pub fn cokernel_witness(g: &PsiDatum, r: usize) -> PsiMorphism {
    let mut maps = BTreeMap::new();
    for (a, c) in &g.components {
        let (_, im) = cokernel_component(c, r);
        let d = c.dim();
        let cols: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                let mut x = vec![Rational::zero(); d * r];
                x[i * r + r - 1] = Rational::one();
                im.quotient_coords(&x)
            })
            .collect();
        maps.insert(a.clone(), Matrix::from_columns(d * r - im.dim(), &cols));
    }
    PsiMorphism { maps }
}

/// The comparison map from the kernel variant to the cokernel variant,
/// `x ↦ −[x_1 ⊗ e_r]` where `x_1` is the `e_1` coefficient of `x`.
pub fn comparison_map(g: &PsiDatum, r: usize) -> PsiMorphism {
    let mut maps = BTreeMap::new();
    for (a, c) in &g.components {
        let d = c.dim();
        let (_, k) = kernel_component(c, r);
        let (_, im) = cokernel_component(c, r);
        let cols: Vec<Vec<Rational>> = k
            .basis_vectors()
            .iter()
            .map(|x| {
                let mut y = vec![Rational::zero(); d * r];
                for p in 0..d {
                    y[p * r + r - 1] = -x[p * r].clone();
                }
                im.quotient_coords(&y)
            })
            .collect();
        maps.insert(a.clone(), Matrix::from_columns(d * r - im.dim(), &cols));
    }
    PsiMorphism { maps }
}

/// `Ker_{r+l} → Ker_r(-l)` induced by `1 ⊗ (e_i ↦ e_{i-l})`.
pub fn kernel_transition(g: &PsiDatum, r: usize, l: usize) -> PsiMorphism {
    let mut maps = BTreeMap::new();
    for (a, c) in &g.components {
        let d = c.dim();
        let (_, big) = kernel_component(c, r + l);
        let (_, small) = kernel_component(c, r);
        let proj = Matrix::from_fn(r, r + l, |i, j| if j == i + l { int(1) } else { int(0) });
        let f = Matrix::identity(d).kron(&proj);
        let m = crate::linalg::induce(&f, &big, &small, InduceMode::Restrict).expect("commutes with D");
        maps.insert(a.clone(), m);
    }
    PsiMorphism { maps }
}

/// `Coker_r → Coker_{r+l}(-l)` induced by `1 ⊗ (e_i ↦ e_i)`.
pub fn cokernel_transition(g: &PsiDatum, r: usize, l: usize) -> PsiMorphism {
    let mut maps = BTreeMap::new();
    for (a, c) in &g.components {
        let d = c.dim();
        let (_, small) = cokernel_component(c, r);
        let (_, big) = cokernel_component(c, r + l);
        let incl = Matrix::from_fn(r + l, r, |i, j| if i == j { int(1) } else { int(0) });
        let f = Matrix::identity(d).kron(&incl);
        let m = crate::linalg::induce(&f, &small, &big, InduceMode::Descend).expect("commutes with D");
        maps.insert(a.clone(), m);
    }
    PsiMorphism { maps }
}

fn compose(f: &PsiMorphism, g: &PsiMorphism) -> PsiMorphism {
    // f ∘ g
    PsiMorphism {
        maps: g
            .maps
            .iter()
            .map(|(a, gm)| (a.clone(), f.maps.get(a).map_or_else(|| gm.clone(), |fm| fm * gm)))
            .collect(),
    }
}

fn invert(f: &PsiMorphism) -> Option<PsiMorphism> {
    Some(PsiMorphism {
        maps: f
            .maps
            .iter()
            .map(|(a, m)| m.inverse().map(|i| (a.clone(), i)))
            .collect::<Option<_>>()?,
    })
}

/// Findings of the stabilization analysis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizationReport {
    /// Largest nilpotency index of the datum.
    pub nilpotency_index: usize,
    /// Smallest `r` from which every stabilization check passes.
    pub stable_from: Option<usize>,
    /// `(r, dim of kernel variant, dim of cokernel variant, comparison is iso)`.
    pub rows: Vec<(usize, usize, usize, bool)>,
    pub failures: Vec<String>,
}

/// Checks at each `r` up to `max_r`: the comparison map is an isomorphism,
/// the kernel and cokernel variants at `r` and `r + 1` agree through explicit
/// filtered isomorphisms, and the transition maps vanish for `l ≥ l_0`.
pub fn stabilization_check(g: &PsiDatum, max_r: usize) -> StabilizationReport {
    let l0 = g.nilpotency_index();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut stable_from = None;
    for r in 1..=max_r {
        let ker = chako_construct_unmatched(g, r, true);
        let coker = chako_construct_unmatched(g, r, false);
        let delta = comparison_map(g, r);
        let iso = delta.check_isomorphism(&ker, &coker).is_empty();
        rows.push((r, ker.total_dim(), coker.total_dim(), iso));
        let mut ok = iso;
        if ok {
            let next_ker = chako_construct_unmatched(g, r + 1, true);
            let next_coker = chako_construct_unmatched(g, r + 1, false);
            match (kernel_witness(g, r), kernel_witness(g, r + 1)) {
                (Some(a), Some(b)) => {
                    let step = compose(&b, &invert(&a).expect("witness is invertible"));
                    if !step.check_isomorphism(&ker, &next_ker).is_empty() {
                        ok = false;
                        failures.push(format!("kernel variants at r={r} and r+1 differ"));
                    }
                }
                _ => ok = false,
            }
            let a = cokernel_witness(g, r);
            let b = cokernel_witness(g, r + 1);
            match invert(&a) {
                Some(ai) => {
                    let step = compose(&b, &ai);
                    if !step.check_isomorphism(&coker, &next_coker).is_empty() {
                        ok = false;
                        failures.push(format!("cokernel variants at r={r} and r+1 differ"));
                    }
                }
                None => ok = false,
            }
            for l in 1..=l0 + 1 {
                let kt = kernel_transition(g, r, l);
                let ct = cokernel_transition(g, r, l);
                let vanish = kt.is_zero() && ct.is_zero();
                if vanish != (l >= l0) {
                    ok = false;
                    failures.push(format!("transition maps at r={r}, l={l}: zero = {vanish}"));
                }
            }
        }
        if ok {
            stable_from.get_or_insert(r);
        } else {
            stable_from = None;
        }
    }
    StabilizationReport {
        nilpotency_index: l0,
        stable_from,
        rows,
        failures,
    }
}

/// The kernel or cokernel of `D` alone, before eigenvalue matching.
fn chako_construct_unmatched(g: &PsiDatum, r: usize, kernel: bool) -> PsiDatum {
    PsiDatum::new(
        g.components
            .iter()
            .map(|(a, c)| {
                let comp = if kernel {
                    kernel_component(c, r).0
                } else {
                    cokernel_component(c, r).0
                };
                (a.clone(), comp)
            })
            .collect(),
    )
}

/// The module built directly from a nearby-cycle datum: the same components
/// with `t∂_t − α = N`, `F` copied and module weight `W_k = W_{k-1} ψ`.
pub fn direct_construction(g: &PsiDatum) -> PsiDatum {
    PsiDatum::new(
        g.components
            .iter()
            .map(|(a, c)| {
                (
                    a.clone(),
                    PsiComponent {
                        n: c.n.clone(),
                        filt: crate::mhm::module_from_psi(&c.filt),
                    },
                )
            })
            .collect(),
    )
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectComparison {
    pub isomorphic: bool,
    /// Matrices from the direct construction to the cokernel variant.
    pub witness: Option<PsiMorphism>,
    pub mismatch: Vec<String>,
}

/// Compares the cokernel variant, in module coordinates, with the direct
/// construction, and checks that its nearby cycles recover `g`.
pub fn compare_with_direct(g: &PsiDatum, r: usize, m: u64) -> Result<DirectComparison> {
    let cc = chako_construct(g, r, m, ChakoVariant::CC)?;
    let witness = cokernel_witness(g, r);
    let direct = direct_construction(g);
    let mut mismatch = witness.check_isomorphism(&direct, &direct_construction(&cc));
    mismatch.extend(witness.check_isomorphism(g, &cc));
    Ok(DirectComparison {
        isomorphic: mismatch.is_empty(),
        witness: mismatch.is_empty().then_some(witness),
        mismatch,
    })
}

/// Full oracle run at `r = l_0`: stabilization from `l_0`, the four
/// variants pairwise isomorphic, agreement with the direct construction and
/// independence of `m` (compared against `2m`).
pub fn block_oracle(g: &PsiDatum, m: u64) -> Result<Vec<String>> {
    let l0 = g.nilpotency_index();
    let mut problems = Vec::new();
    let report = stabilization_check(g, l0 + 1);
    if report.stable_from != Some(l0) && !(g.total_dim() == 0 && report.stable_from == Some(1)) {
        problems.push(format!(
            "stabilizes from {:?}, expected {l0}",
            report.stable_from
        ));
    }
    problems.extend(report.failures);
    let variants: Vec<PsiDatum> = ChakoVariant::ALL
        .iter()
        .map(|v| chako_construct(g, l0, m, *v))
        .collect::<Result<_>>()?;
    if variants[0] != variants[1] || variants[2] != variants[3] {
        problems.push("eigenvalue matching depends on kernel versus cokernel".to_string());
    }
    let delta = comparison_map(g, l0);
    let issues = delta.check_isomorphism(&variants[0], &variants[3]);
    if !issues.is_empty() {
        problems.push(format!("kernel and cokernel variants differ: {}", issues.join("; ")));
    }
    let cmp = compare_with_direct(g, l0, m)?;
    problems.extend(cmp.mismatch);
    match kernel_witness(g, l0) {
        Some(k) => {
            let issues = k.check_isomorphism(g, &variants[0]);
            if !issues.is_empty() {
                problems.push(format!("nearby cycles of the kernel variant: {}", issues.join("; ")));
            }
        }
        None => problems.push("kernel witness undefined at r = l_0".to_string()),
    }
    if chako_construct(g, l0, 2 * m, ChakoVariant::CC)? != variants[3] {
        problems.push("result depends on m".to_string());
    }
    Ok(problems)
}

/// Smallest `m` that clears every eigenvalue denominator of `g`.
pub fn minimal_m(g: &PsiDatum) -> u64 {
    g.components.keys().fold(1u64, |acc, a| {
        let d: u64 = a.denom().try_into().expect("small denominator");
        num_integer::lcm(acc, d)
    })
}

/// `true` when the nilpotent parts have index at most `r`.
pub fn fits(g: &PsiDatum, r: usize) -> bool {
    g.components
        .values()
        .all(|c| nilpotency_index(&c.n).is_ok_and(|k| k <= r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::monodromy_weight_filtration;

    #[test]
    fn nilp_block_tables() {
        let b = nilp_block(2);
        assert_eq!(b.filt.f.graded_dims(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(b.filt.w.graded_dims(), BTreeMap::from([(-2, 1), (0, 1)]));
        for r in 1..=8 {
            let b = nilp_block(r);
            assert_eq!(
                b.filt.w,
                monodromy_weight_filtration(&b.n, -(r as i64 - 1)).unwrap()
            );
            assert!(crate::gluing::validate_psi(&l_block(r)).is_empty());
        }
    }

    #[test]
    fn blocks_examples() {
        let (l1, s2) = make_blocks(1, 2);
        assert_eq!(l1.get(&Rational::zero()).n, Matrix::zeros(1, 1));
        assert_eq!(s2.components.keys().cloned().collect::<Vec<_>>(), vec![rat(-1, 2), int(0)]);
        assert!(crate::gluing::validate_psi(&s2).is_empty());
    }

    #[test]
    fn block_morphisms_are_strict() {
        for kind in [
            BlockMorphism::SIncl { m: 1, a: 2 },
            BlockMorphism::LProj { r: 1, l: 1 },
            BlockMorphism::LProj { r: 3, l: 2 },
            BlockMorphism::LTwistIncl { r: 1, l: 1 },
            BlockMorphism::LTwistIncl { r: 2, l: 3 },
        ] {
            let (s, t, f) = block_morphism(kind);
            assert!(f.check(&s, &t).is_empty(), "{kind:?}: {:?}", f.check(&s, &t));
        }
        let (_, _, f) = block_morphism(BlockMorphism::LProj { r: 1, l: 1 });
        assert_eq!(f.maps[&Rational::zero()], Matrix::from_i64(&[&[0, 1]]));
    }

    #[test]
    fn constant_object_is_reproduced() {
        let g = l_block(1);
        for v in ChakoVariant::ALL {
            assert_eq!(chako_construct(&g, 1, 1, v).unwrap(), g);
        }
        assert!(block_oracle(&g, 1).unwrap().is_empty());
    }

    #[test]
    fn jordan_examples() {
        let g = l_block(2);
        let cmp = compare_with_direct(&g, 2, 2).unwrap();
        assert!(cmp.isomorphic, "{:?}", cmp.mismatch);

        let g3 = PsiDatum::new(BTreeMap::from([(rat(-1, 2), nilp_block(3))]));
        let report = stabilization_check(&g3, 4);
        assert_eq!(report.stable_from, Some(3), "{report:?}");
        assert!(block_oracle(&g3, 2).unwrap().is_empty());
        assert!(matches!(
            chako_construct(&g3, 3, 3, ChakoVariant::CC),
            Err(Error::EigenvalueDenominatorMismatch { .. })
        ));
    }

    #[test]
    fn below_threshold_the_comparison_fails() {
        let g = l_block(3);
        let ker = chako_construct(&g, 2, 1, ChakoVariant::KK).unwrap();
        let coker = chako_construct(&g, 2, 1, ChakoVariant::CC).unwrap();
        assert!(ker.total_dim() < g.total_dim());
        assert!(!comparison_map(&g, 2).check_isomorphism(&ker, &coker).is_empty());
    }

    #[test]
    fn construction_commutes_with_twist() {
        let g = l_block(2);
        for v in ChakoVariant::ALL {
            assert_eq!(
                chako_construct(&g.twist(2), 2, 1, v).unwrap(),
                chako_construct(&g, 2, 1, v).unwrap().twist(2)
            );
        }
    }
}
