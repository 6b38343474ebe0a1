//! Monodromic D-modules on the affine line over a point.
//!
//! A module is determined by its components `M^α` for `α ∈ [-1, 0]` with the
//! nilpotent parts `N_α = t∂_t − α`, together with `u = ∂_t: M^0 → M^{-1}` and
//! `w = t: M^{-1} → M^0`. Every other component is a copy of one of these,
//! materialized on demand by [`expand`].

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::intertwine::LinearSystem;
use crate::linalg::{
    characteristic_polynomial, int, is_integer, is_nilpotent, kernel_image, rational_roots, InduceMode,
    Matrix, Rational, Subspace,
};

/// Core data of a monodromic D-module. Components of dimension zero are not
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CoreData {
    components: BTreeMap<Rational, Matrix>,
    u: Matrix,
    w: Matrix,
}

fn zero() -> Rational {
    Rational::zero()
}

fn minus_one() -> Rational {
    -Rational::one()
}

impl CoreData {
    /// Assembles core data without validating it; see [`CoreData::validate`].
    pub fn new(components: BTreeMap<Rational, Matrix>, u: Matrix, w: Matrix) -> Self {
        let components: BTreeMap<Rational, Matrix> =
            components.into_iter().filter(|(_, n)| n.rows() > 0 || n.cols() > 0).collect();
        // junction maps with no entries take the shape the components dictate
        let dim = |a: &Rational| components.get(a).map_or(0, Matrix::rows);
        let (d0, d1) = (dim(&zero()), dim(&minus_one()));
        let u = if u.rows() * u.cols() == 0 { Matrix::zeros(d1, d0) } else { u };
        let w = if w.rows() * w.cols() == 0 { Matrix::zeros(d0, d1) } else { w };
        CoreData { components, u, w }
    }

    /// Assembles and validates.
    pub fn checked(components: BTreeMap<Rational, Matrix>, u: Matrix, w: Matrix) -> Result<Self> {
        let core = Self::new(components, u, w);
        let problems = core.validate();
        if problems.is_empty() {
            Ok(core)
        } else {
            Err(Error::InvalidCore(problems))
        }
    }

    pub fn zero() -> Self {
        CoreData::new(BTreeMap::new(), Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    }

    /// The structure sheaf `ℚ[t]`: `M^0 = ℚ`, nothing at `-1`.
    pub fn structure_sheaf() -> Self {
        CoreData::new(
            BTreeMap::from([(zero(), Matrix::zeros(1, 1))]),
            Matrix::zeros(0, 1),
            Matrix::zeros(1, 0),
        )
    }

    /// The delta module `ℚ[∂_t]δ`: `M^{-1} = ℚ`, nothing at `0`.
    pub fn delta_module() -> Self {
        CoreData::new(
            BTreeMap::from([(minus_one(), Matrix::zeros(1, 1))]),
            Matrix::zeros(1, 0),
            Matrix::zeros(0, 1),
        )
    }

    /// A single component at `alpha ∈ (-1, 0)` with the given nilpotent part.
    pub fn single(alpha: Rational, n: Matrix) -> Self {
        CoreData::new(BTreeMap::from([(alpha, n)]), Matrix::zeros(0, 0), Matrix::zeros(0, 0))
    }

    pub fn components(&self) -> &BTreeMap<Rational, Matrix> {
        &self.components
    }

    pub fn alphas(&self) -> Vec<Rational> {
        self.components.keys().cloned().collect()
    }

    pub fn dim(&self, alpha: &Rational) -> usize {
        self.components.get(alpha).map_or(0, Matrix::rows)
    }

    /// `N_α`, the zero-size matrix when the component is absent.
    pub fn n(&self, alpha: &Rational) -> Matrix {
        self.components
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(0, 0))
    }

    pub fn u(&self) -> &Matrix {
        &self.u
    }

    pub fn w(&self) -> &Matrix {
        &self.w
    }

    pub fn total_dim(&self) -> usize {
        self.components.values().map(Matrix::rows).sum()
    }

    /// Named violations of the core-data invariants; empty when valid.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (alpha, n) in &self.components {
            if alpha < &minus_one() || alpha > &zero() {
                out.push(format!("alpha {alpha} outside [-1, 0]"));
            }
            if !n.is_square() {
                out.push(format!("N at alpha {alpha} is not square"));
            } else if !is_nilpotent(n) {
                out.push(format!("NotNilpotent: N at alpha {alpha}"));
            }
        }
        let d0 = self.dim(&zero());
        let d1 = self.dim(&minus_one());
        if (self.u.rows(), self.u.cols()) != (d1, d0) {
            out.push(format!(
                "u has shape {}x{}, expected {d1}x{d0}",
                self.u.rows(),
                self.u.cols()
            ));
        }
        if (self.w.rows(), self.w.cols()) != (d0, d1) {
            out.push(format!(
                "w has shape {}x{}, expected {d0}x{d1}",
                self.w.rows(),
                self.w.cols()
            ));
        }
        if !out.is_empty() {
            return out;
        }
        let wu = &self.w * &self.u;
        let uw = &self.u * &self.w;
        if wu != self.n(&zero()) {
            out.push("w·u ≠ N_0".to_string());
        }
        if uw != self.n(&minus_one()) {
            out.push("u·w ≠ N_{-1}".to_string());
        }
        if !is_nilpotent(&wu) {
            out.push("NotNilpotent: w·u".to_string());
        }
        if !is_nilpotent(&uw) {
            out.push("NotNilpotent: u·w".to_string());
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// The same module with `u` and `w` replaced by `-u` and `-w`.
    pub fn negate_junction(&self) -> Self {
        CoreData::new(self.components.clone(), -&self.u, -&self.w)
    }
}

/// A morphism of core data: one matrix per component of the source, mapping
/// into the component with the same label in the target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreMorphism {
    pub maps: BTreeMap<Rational, Matrix>,
}

impl CoreMorphism {
    pub fn identity(core: &CoreData) -> Self {
        CoreMorphism {
            maps: core
                .components
                .iter()
                .map(|(a, n)| (a.clone(), Matrix::identity(n.rows())))
                .collect(),
        }
    }

    pub fn zero(src: &CoreData, tgt: &CoreData) -> Self {
        let mut alphas: Vec<Rational> = src.alphas();
        alphas.extend(tgt.alphas());
        alphas.sort();
        alphas.dedup();
        CoreMorphism {
            maps: alphas
                .into_iter()
                .map(|a| {
                    let m = Matrix::zeros(tgt.dim(&a), src.dim(&a));
                    (a, m)
                })
                .collect(),
        }
    }

    /// The map at `alpha`, the zero map when not stored.
    pub fn at(&self, alpha: &Rational, src: &CoreData, tgt: &CoreData) -> Matrix {
        self.maps
            .get(alpha)
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(tgt.dim(alpha), src.dim(alpha)))
    }

    /// Checks shapes and all commutation squares.
    pub fn check(&self, src: &CoreData, tgt: &CoreData) -> Result<()> {
        let mut alphas = src.alphas();
        alphas.extend(tgt.alphas());
        alphas.extend(self.maps.keys().cloned());
        alphas.sort();
        alphas.dedup();
        for a in &alphas {
            let f = self.at(a, src, tgt);
            if (f.rows(), f.cols()) != (tgt.dim(a), src.dim(a)) {
                return Err(Error::NotAMorphism(format!("map at alpha {a} has the wrong shape")));
            }
            if &f * &src.n(a) != &tgt.n(a) * &f {
                return Err(Error::NotAMorphism(format!("does not commute with N at alpha {a}")));
            }
        }
        let f0 = self.at(&zero(), src, tgt);
        let f1 = self.at(&minus_one(), src, tgt);
        if &f1 * &src.u != &tgt.u * &f0 {
            return Err(Error::NotAMorphism("does not commute with u".to_string()));
        }
        if &f0 * &src.w != &tgt.w * &f1 {
            return Err(Error::NotAMorphism("does not commute with w".to_string()));
        }
        Ok(())
    }

    pub fn is_isomorphism(&self, src: &CoreData, tgt: &CoreData) -> bool {
        self.check(src, tgt).is_ok()
            && src
                .alphas()
                .iter()
                .chain(tgt.alphas().iter())
                .all(|a| self.at(a, src, tgt).is_invertible())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KerCoker {
    Kernel,
    Cokernel,
    Image,
}

/// Componentwise kernel, cokernel or image of a morphism, with induced maps.
pub fn ker_coker(f: &CoreMorphism, src: &CoreData, tgt: &CoreData, which: KerCoker) -> Result<CoreData> {
    f.check(src, tgt)?;
    let mut alphas = src.alphas();
    alphas.extend(tgt.alphas());
    alphas.sort();
    alphas.dedup();
    // (subspace, ambient core) for each alpha
    let (base, subs): (&CoreData, BTreeMap<Rational, Subspace>) = match which {
        KerCoker::Kernel => (
            src,
            alphas.iter().map(|a| (a.clone(), kernel_image(&f.at(a, src, tgt)).0)).collect(),
        ),
        KerCoker::Cokernel | KerCoker::Image => (
            tgt,
            alphas.iter().map(|a| (a.clone(), kernel_image(&f.at(a, src, tgt)).1)).collect(),
        ),
    };
    let mode = match which {
        KerCoker::Cokernel => InduceMode::Descend,
        _ => InduceMode::Restrict,
    };
    let mut components = BTreeMap::new();
    for a in &alphas {
        let s = &subs[a];
        components.insert(a.clone(), crate::linalg::induce(&base.n(a), s, s, mode)?);
    }
    let sub_or_zero = |a: &Rational| {
        subs.get(a).cloned().unwrap_or_else(|| Subspace::zero(base.dim(a)))
    };
    let s0 = sub_or_zero(&zero());
    let s1 = sub_or_zero(&minus_one());
    let u = crate::linalg::induce(&base.u, &s0, &s1, mode)?;
    let w = crate::linalg::induce(&base.w, &s1, &s0, mode)?;
    Ok(CoreData::new(components, u, w))
}

/// A finite window `[lo, hi]` of the graded module `⊕ M^β`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowModule {
    lo: Rational,
    hi: Rational,
    /// `β → dim M^β` for every `β` in the window whose class mod 1 occurs;
    /// integer `β` are always present.
    graded: BTreeMap<Rational, usize>,
    /// `t: M^β → M^{β+1}`, for `β + 1 ≤ hi`.
    t_maps: BTreeMap<Rational, Matrix>,
    /// `∂_t: M^β → M^{β-1}`, for `β - 1 ≥ lo`.
    d_maps: BTreeMap<Rational, Matrix>,
}

impl WindowModule {
    pub fn new(
        lo: Rational,
        hi: Rational,
        graded: BTreeMap<Rational, usize>,
        t_maps: BTreeMap<Rational, Matrix>,
        d_maps: BTreeMap<Rational, Matrix>,
    ) -> Self {
        WindowModule {
            lo,
            hi,
            graded,
            t_maps,
            d_maps,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn graded(&self) -> &BTreeMap<Rational, usize> {
        &self.graded
    }

    pub fn betas(&self) -> Vec<Rational> {
        self.graded.keys().cloned().collect()
    }

    pub fn dim(&self, beta: &Rational) -> usize {
        self.graded.get(beta).copied().unwrap_or(0)
    }

    pub fn t_at(&self, beta: &Rational) -> Option<&Matrix> {
        self.t_maps.get(beta)
    }

    pub fn d_at(&self, beta: &Rational) -> Option<&Matrix> {
        self.d_maps.get(beta)
    }

    pub fn t_maps(&self) -> &BTreeMap<Rational, Matrix> {
        &self.t_maps
    }

    pub fn d_maps(&self) -> &BTreeMap<Rational, Matrix> {
        &self.d_maps
    }

    pub fn is_empty(&self) -> bool {
        self.graded.values().all(|d| *d == 0)
    }

    /// `t∂_t` on `M^β`, through `M^{β-1}` when available and as `∂_t t − 1`
    /// at the bottom of the window.
    pub fn tdt(&self, beta: &Rational) -> Option<Matrix> {
        let one = Rational::one();
        if let (Some(d), Some(t)) = (self.d_at(beta), self.t_maps.get(&(beta - &one))) {
            return Some(t * d);
        }
        let (t, d) = (self.t_at(beta)?, self.d_maps.get(&(beta + &one))?);
        Some(&(d * t) - &Matrix::identity(self.dim(beta)))
    }

    /// Violations of the window invariants; empty when all hold.
    pub fn check(&self) -> Vec<String> {
        let one = Rational::one();
        let mut out = Vec::new();
        for beta in self.graded.keys() {
            let n = self.dim(beta);
            if let Some(t) = self.t_at(beta) {
                if beta != &minus_one() && !t.is_invertible() {
                    out.push(format!("t at {beta} is not an isomorphism"));
                }
            }
            if let Some(d) = self.d_at(beta) {
                if beta != &zero() && !d.is_invertible() {
                    out.push(format!("∂ at {beta} is not an isomorphism"));
                }
            }
            let up = self.t_at(beta).zip(self.d_maps.get(&(beta + &one)));
            let down = self.d_at(beta).zip(self.t_maps.get(&(beta - &one)));
            if let (Some((t, d1)), Some((d, t1))) = (up, down) {
                if &(d1 * t) - &(t1 * d) != Matrix::identity(n) {
                    out.push(format!("∂t − t∂ ≠ 1 on M^{beta}"));
                }
            }
            if let Some(tdt) = self.tdt(beta) {
                if !is_nilpotent(&(&tdt - &Matrix::scalar(n, beta))) {
                    out.push(format!("t∂ − {beta} is not nilpotent on M^{beta}"));
                }
            }
        }
        out
    }

    /// Block-diagonal `t∂_t` on the whole window, pieces in increasing `β`.
    pub fn total_tdt(&self) -> Option<Matrix> {
        let blocks: Vec<Matrix> = self
            .graded
            .keys()
            .map(|b| self.tdt(b))
            .collect::<Option<Vec<_>>>()?;
        let refs: Vec<&Matrix> = blocks.iter().collect();
        Some(Matrix::block_diag(&refs))
    }

    /// Offsets of each piece in the block layout of [`WindowModule::total_tdt`].
    pub fn offsets(&self) -> BTreeMap<Rational, usize> {
        let mut acc = 0;
        self.graded
            .iter()
            .map(|(b, d)| {
                let o = acc;
                acc += d;
                (b.clone(), o)
            })
            .collect()
    }

    /// Recovers core data from the pieces at `-1`, `0` and the non-integer
    /// pieces in `(-1, 0)`.
    pub fn to_core(&self) -> Result<CoreData> {
        let mut components = BTreeMap::new();
        for beta in self.graded.keys() {
            if beta < &minus_one() || beta > &zero() || self.dim(beta) == 0 {
                continue;
            }
            let tdt = self
                .tdt(beta)
                .ok_or_else(|| Error::WindowTooSmall(format!("no t∂ available at {beta}")))?;
            let n = &tdt - &Matrix::scalar(self.dim(beta), beta);
            components.insert(beta.clone(), n);
        }
        let d0 = self.dim(&zero());
        let d1 = self.dim(&minus_one());
        let u = self
            .d_at(&zero())
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(d1, d0));
        let w = self
            .t_at(&minus_one())
            .cloned()
            .unwrap_or_else(|| Matrix::zeros(d0, d1));
        Ok(CoreData::new(components, u, w))
    }
}

/// Materializes `M^β` for `β ∈ [-1-K, K]`.
pub fn expand(core: &CoreData, k: u32) -> Result<WindowModule> {
    let problems = core.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidCore(problems));
    }
    let k = k as i64;
    let lo = int(-1 - k);
    let hi = int(k);
    let one = Rational::one();
    let mut classes: Vec<Rational> = core.alphas().into_iter().filter(|a| !is_integer(a)).collect();
    classes.push(zero());
    classes.sort();
    classes.dedup();

    let mut graded = BTreeMap::new();
    let mut t_maps = BTreeMap::new();
    let mut d_maps = BTreeMap::new();

    for class in &classes {
        if is_integer(class) {
            let d0 = core.dim(&zero());
            let d1 = core.dim(&minus_one());
            let n0 = core.n(&zero());
            let n1 = core.n(&minus_one());
            for l in 0..=k {
                graded.insert(int(l), d0);
                graded.insert(int(-1 - l), d1);
            }
            for l in 0..k {
                // upward from 0: t = 1, ∂ = N_0 + (l+1)
                t_maps.insert(int(l), Matrix::identity(d0));
                d_maps.insert(int(l + 1), &n0 + &Matrix::scalar(d0, &int(l + 1)));
                // downward from -1: ∂ = 1, t = N_{-1} + (-1-l)
                d_maps.insert(int(-1 - l), Matrix::identity(d1));
                t_maps.insert(int(-2 - l), &n1 + &Matrix::scalar(d1, &int(-1 - l)));
            }
            t_maps.insert(int(-1), core.w.clone());
            d_maps.insert(int(0), core.u.clone());
        } else {
            let alpha = class;
            let d = core.dim(alpha);
            let n = core.n(alpha);
            let mut beta = alpha.clone();
            while beta <= hi {
                graded.insert(beta.clone(), d);
                if &beta + &one <= hi {
                    t_maps.insert(beta.clone(), Matrix::identity(d));
                    let next = &beta + &one;
                    d_maps.insert(next.clone(), &n + &Matrix::scalar(d, &next));
                }
                beta += &one;
            }
            let mut beta = alpha.clone();
            while beta >= lo {
                graded.insert(beta.clone(), d);
                if &beta - &one >= lo {
                    d_maps.insert(beta.clone(), Matrix::identity(d));
                    t_maps.insert(&beta - &one, &n + &Matrix::scalar(d, &beta));
                }
                beta -= &one;
            }
        }
    }
    Ok(WindowModule::new(lo, hi, graded, t_maps, d_maps))
}

/// Generalized eigenspaces of a square matrix with rational spectrum.
pub fn eigen_decompose(a: &Matrix) -> Result<BTreeMap<Rational, Subspace>> {
    let poly = characteristic_polynomial(a)?;
    let roots = rational_roots(&poly).ok_or(Error::IrrationalEigenvalue)?;
    let n = a.rows();
    Ok(roots
        .into_iter()
        .map(|(beta, mult)| {
            let shifted = a - &Matrix::scalar(n, &beta);
            (beta, shifted.pow(mult as u32).kernel())
        })
        .collect())
}

/// `V^γ = ⊕_{β ≥ γ} M^β`, as one subspace per window piece.
pub fn v_filtration(win: &WindowModule, gamma: &Rational) -> BTreeMap<Rational, Subspace> {
    win.graded
        .iter()
        .map(|(b, d)| {
            let s = if b >= gamma { Subspace::full(*d) } else { Subspace::zero(*d) };
            (b.clone(), s)
        })
        .collect()
}

/// A decreasing filtration of a window indexed by its own `β` values:
/// `steps[γ][β] ⊆ M^β`.
pub type GradedFiltration = BTreeMap<Rational, BTreeMap<Rational, Subspace>>;

/// The formula filtration at every window index.
pub fn v_filtration_formula(win: &WindowModule) -> GradedFiltration {
    win.betas()
        .into_iter()
        .map(|g| {
            let f = v_filtration(win, &g);
            (g, f)
        })
        .collect()
}

/// `dim Gr^γ_V` of the formula filtration.
pub fn v_graded_dim(win: &WindowModule, gamma: &Rational) -> usize {
    let here: usize = v_filtration(win, gamma).values().map(Subspace::dim).sum();
    let above: usize = win
        .graded
        .iter()
        .filter(|(b, _)| *b > gamma)
        .map(|(_, d)| d)
        .sum();
    here - above
}

/// Searches the window for every decreasing filtration built from the
/// `t∂_t`-stable candidate subspaces `Ker (t∂_t − β)^j` of each piece that
/// satisfies the characterizing axioms, and returns it when it is unique.
pub fn v_filtration_oracle(win: &WindowModule) -> Result<GradedFiltration> {
    if win.hi < Rational::one() {
        return Err(Error::WindowTooSmall("window must reach at least 1".to_string()));
    }
    let gammas = win.betas();
    let g = gammas.len();
    let one = Rational::one();

    // candidate chains per piece: Ker(t∂−β)^j for j = 0..=dim
    let mut levels: BTreeMap<Rational, Vec<Subspace>> = BTreeMap::new();
    let mut tdts: BTreeMap<Rational, Matrix> = BTreeMap::new();
    for beta in &gammas {
        let d = win.dim(beta);
        let tdt = win
            .tdt(beta)
            .ok_or_else(|| Error::WindowTooSmall(format!("no t∂ at {beta}")))?;
        let shifted = &tdt - &Matrix::scalar(d, beta);
        let mut chain = vec![Subspace::zero(d)];
        for j in 1..=d {
            let k = shifted.pow(j as u32).kernel();
            if chain.last() != Some(&k) {
                chain.push(k);
            }
        }
        if !chain.last().is_some_and(Subspace::is_full) {
            chain.push(Subspace::full(d));
        }
        levels.insert(beta.clone(), chain);
        tdts.insert(beta.clone(), tdt);
    }

    // unary search: monotone level sequences along the γ axis
    let mut per_piece: BTreeMap<Rational, Vec<Vec<usize>>> = BTreeMap::new();
    for beta in &gammas {
        let chain = &levels[beta];
        let top = chain.len() - 1;
        let tdt = &tdts[beta];
        let mut found = Vec::new();
        let mut current = Vec::with_capacity(g);
        piece_chains(chain, top, tdt, &gammas, &mut current, &mut found);
        if found.is_empty() {
            return Err(Error::WindowTooSmall(format!("no admissible chain on M^{beta}")));
        }
        per_piece.insert(beta.clone(), found);
    }

    // binary constraints by backtracking over pieces in increasing β
    let index_of: BTreeMap<Rational, usize> =
        gammas.iter().enumerate().map(|(i, b)| (b.clone(), i)).collect();
    let mut solutions: Vec<BTreeMap<Rational, Vec<usize>>> = Vec::new();
    let mut chosen: BTreeMap<Rational, Vec<usize>> = BTreeMap::new();
    let ctx = Search {
        win,
        gammas: &gammas,
        index_of: &index_of,
        levels: &levels,
        one: &one,
    };
    ctx.backtrack(0, &per_piece, &mut chosen, &mut solutions);
    if solutions.len() != 1 {
        return Err(Error::WindowTooSmall(format!(
            "{} filtrations satisfy the axioms in this window",
            solutions.len()
        )));
    }
    let sol = &solutions[0];
    Ok(gammas
        .iter()
        .enumerate()
        .map(|(gi, gamma)| {
            let steps = gammas
                .iter()
                .map(|b| (b.clone(), levels[b][sol[b][gi]].clone()))
                .collect();
            (gamma.clone(), steps)
        })
        .collect())
}

/// Enumerates non-increasing level sequences for one piece whose graded
/// quotients carry `t∂ − γ` nilpotently; the sequence starts at the top
/// (exhaustive) and everything above the last index is zero (separated).
fn piece_chains(
    chain: &[Subspace],
    top: usize,
    tdt: &Matrix,
    gammas: &[Rational],
    current: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    let i = current.len();
    if i == gammas.len() {
        found.push(current.clone());
        return;
    }
    let max = if i == 0 { top } else { current[i - 1] };
    let min = if i == 0 { top } else { 0 };
    for lvl in (min..=max).rev() {
        if i > 0 && !graded_ok(&chain[current[i - 1]], &chain[lvl], tdt, &gammas[i - 1]) {
            continue;
        }
        if i + 1 == gammas.len() && !graded_ok(&chain[lvl], &Subspace::zero(chain[0].ambient()), tdt, &gammas[i]) {
            continue;
        }
        current.push(lvl);
        piece_chains(chain, top, tdt, gammas, current, found);
        current.pop();
    }
}

/// Whether `t∂ − γ` is nilpotent on `big / small`.
fn graded_ok(big: &Subspace, small: &Subspace, tdt: &Matrix, gamma: &Rational) -> bool {
    if big.dim() == small.dim() {
        return true;
    }
    let d = tdt.rows();
    let shifted = tdt - &Matrix::scalar(d, gamma);
    // restrict to big, then descend modulo small
    let restricted = match crate::linalg::induce(&shifted, big, big, InduceMode::Restrict) {
        Ok(m) => m,
        Err(_) => return false,
    };
    let small_in_big = Subspace::span(
        big.dim(),
        small
            .basis_vectors()
            .iter()
            .map(|v| big.coordinates(v).expect("nested subspaces")),
    );
    match crate::linalg::induce(&restricted, &small_in_big, &small_in_big, InduceMode::Descend) {
        Ok(m) => is_nilpotent(&m),
        Err(_) => false,
    }
}

struct Search<'a> {
    win: &'a WindowModule,
    gammas: &'a [Rational],
    index_of: &'a BTreeMap<Rational, usize>,
    levels: &'a BTreeMap<Rational, Vec<Subspace>>,
    one: &'a Rational,
}

impl Search<'_> {
    fn step(&self, chosen: &BTreeMap<Rational, Vec<usize>>, beta: &Rational, gamma: &Rational) -> Option<Subspace> {
        let gi = *self.index_of.get(gamma)?;
        Some(self.levels[beta][chosen.get(beta)?[gi]].clone())
    }

    fn backtrack(
        &self,
        pos: usize,
        per_piece: &BTreeMap<Rational, Vec<Vec<usize>>>,
        chosen: &mut BTreeMap<Rational, Vec<usize>>,
        solutions: &mut Vec<BTreeMap<Rational, Vec<usize>>>,
    ) {
        if solutions.len() > 1 {
            return;
        }
        if pos == self.gammas.len() {
            solutions.push(chosen.clone());
            return;
        }
        let beta = &self.gammas[pos];
        for cand in &per_piece[beta] {
            chosen.insert(beta.clone(), cand.clone());
            if self.consistent(beta, chosen) {
                self.backtrack(pos + 1, per_piece, chosen, solutions);
            }
            chosen.remove(beta);
        }
    }

    /// Checks constraints between `beta` and the already chosen piece `beta - 1`.
    fn consistent(&self, beta: &Rational, chosen: &BTreeMap<Rational, Vec<usize>>) -> bool {
        let below = beta - self.one;
        if !chosen.contains_key(&below) {
            return true;
        }
        let t = self.win.t_at(&below);
        let d = self.win.d_at(beta);
        for gamma in self.gammas {
            let src = self.step(chosen, &below, gamma).expect("chosen");
            let up = gamma + self.one;
            if let (Some(t), Some(tgt)) = (t, self.step(chosen, beta, &up)) {
                let image = t.map_subspace(&src);
                let ok = if gamma > &minus_one() {
                    image == tgt
                } else {
                    tgt.contains(&image).unwrap_or(false)
                };
                if !ok {
                    return false;
                }
            }
            let src = self.step(chosen, beta, gamma).expect("chosen");
            let down = gamma - self.one;
            if let (Some(d), Some(tgt)) = (d, self.step(chosen, &below, &down)) {
                if !tgt.contains(&d.map_subspace(&src)).unwrap_or(false) {
                    return false;
                }
            }
        }
        true
    }
}

/// Nearby and vanishing cycles of a core.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cycles {
    /// `ψ_α = M^α` with `N_α`, for `α ∈ (-1, 0]`.
    pub psi: BTreeMap<Rational, Matrix>,
    /// `φ = M^{-1}` with `N_{-1}`.
    pub phi: Matrix,
    /// `can = -u: ψ_0 → φ`.
    pub can: Matrix,
    /// `var = w: φ → ψ_0`.
    pub var: Matrix,
}

pub fn cycles(core: &CoreData) -> Result<Cycles> {
    let problems = core.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidCore(problems));
    }
    let psi = core
        .components
        .iter()
        .filter(|(a, _)| *a > &minus_one())
        .map(|(a, n)| (a.clone(), n.clone()))
        .collect();
    let out = Cycles {
        psi,
        phi: core.n(&minus_one()),
        can: -&core.u,
        var: core.w.clone(),
    };
    debug_assert_eq!(&out.can * &out.var, -&out.phi);
    Ok(out)
}

/// The dual module: `(DM)^α = (M^{-1-α})^*` with transposed `N` off the
/// integers, `(DM)^0 = (M^0)^*`, `(DM)^{-1} = (M^{-1})^*`, new `w = -uᵀ` and
/// new `u = wᵀ`.
pub fn dual(core: &CoreData) -> Result<CoreData> {
    let problems = core.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidCore(problems));
    }
    let mut components = BTreeMap::new();
    for (a, n) in &core.components {
        if is_integer(a) {
            continue;
        }
        components.insert(-a - Rational::one(), n.transpose());
    }
    let new_u = core.w.transpose();
    let new_w = -&core.u.transpose();
    let n0 = &new_w * &new_u;
    let n1 = &new_u * &new_w;
    if core.dim(&zero()) > 0 {
        components.insert(zero(), n0);
    }
    if core.dim(&minus_one()) > 0 {
        components.insert(minus_one(), n1);
    }
    let out = CoreData::new(components, new_u, new_w);
    let problems = out.validate();
    if !problems.is_empty() {
        return Err(Error::InvalidCore(problems));
    }
    Ok(out)
}

/// The natural isomorphism `D(D(M)) → M`: identity on every component except
/// `-id` on `M^{-1}`.
pub fn double_dual_witness(core: &CoreData) -> CoreMorphism {
    let mut f = CoreMorphism::identity(core);
    if let Some(m) = f.maps.get_mut(&minus_one()) {
        *m = -&*m;
    }
    f
}

/// Dual computed directly on the window by transposing its maps: the piece
/// at a non-integer `β` is `(M^{-1-β})^*` with `t = -tᵀ`, `∂ = ∂ᵀ`; at an
/// integer `k` it is `(M^k)^*` with `t = -∂ᵀ`, `∂ = -tᵀ`.
pub fn dual_window(win: &WindowModule) -> WindowModule {
    let one = Rational::one();
    let mut graded = BTreeMap::new();
    let mut t_maps = BTreeMap::new();
    let mut d_maps = BTreeMap::new();
    for beta in win.graded.keys() {
        if is_integer(beta) {
            graded.insert(beta.clone(), win.dim(beta));
            if let Some(d) = win.d_at(&(beta + &one)) {
                t_maps.insert(beta.clone(), -&d.transpose());
            }
            if let Some(t) = win.t_at(&(beta - &one)) {
                d_maps.insert(beta.clone(), -&t.transpose());
            }
        } else {
            // the dual piece sits at the mirror of this one
            let mirror = beta.clone();
            let beta = &(-beta - &one);
            graded.insert(beta.clone(), win.dim(&mirror));
            // t_D: (M^{-1-β})^* → (M^{-2-β})^* transposes t: M^{-2-β} → M^{-1-β}
            if let Some(t) = win.t_at(&(&mirror - &one)) {
                t_maps.insert(beta.clone(), -&t.transpose());
            }
            // ∂_D: (M^{-1-β})^* → (M^{-β})^* transposes ∂: M^{-β} → M^{-1-β}
            if let Some(d) = win.d_at(&(&mirror + &one)) {
                d_maps.insert(beta.clone(), d.transpose());
            }
        }
    }
    WindowModule::new(win.lo.clone(), win.hi.clone(), graded, t_maps, d_maps)
}

/// Searches for an isomorphism of core data by solving the intertwining
/// equations and trying seeded random combinations of the solutions.
pub fn find_core_isomorphism(a: &CoreData, b: &CoreData, seed: u64) -> Option<CoreMorphism> {
    let mut alphas = a.alphas();
    alphas.extend(b.alphas());
    alphas.sort();
    alphas.dedup();
    if alphas.iter().any(|x| a.dim(x) != b.dim(x)) {
        return None;
    }
    let shapes: Vec<(usize, usize)> = alphas.iter().map(|x| (b.dim(x), a.dim(x))).collect();
    let idx = |x: &Rational| alphas.iter().position(|y| y == x);
    let mut sys = LinearSystem::new(&shapes);
    for (i, x) in alphas.iter().enumerate() {
        let da = a.dim(x);
        let db = b.dim(x);
        // X N_a − N_b X = 0
        sys.add(&[
            (&Matrix::identity(db), i, &a.n(x)),
            (&-&b.n(x), i, &Matrix::identity(da)),
        ]);
    }
    let (i0, i1) = (idx(&zero()), idx(&minus_one()));
    if let (Some(i0), Some(i1)) = (i0, i1) {
        // X_{-1} u_a − u_b X_0 = 0 and X_0 w_a − w_b X_{-1} = 0
        sys.add(&[
            (&Matrix::identity(b.dim(&minus_one())), i1, &a.u),
            (&-&b.u, i0, &Matrix::identity(a.dim(&zero()))),
        ]);
        sys.add(&[
            (&Matrix::identity(b.dim(&zero())), i0, &a.w),
            (&-&b.w, i1, &Matrix::identity(a.dim(&minus_one()))),
        ]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let found = sys.find_invertible(&mut rng, 40, |_| true)?;
    let f = CoreMorphism {
        maps: alphas.into_iter().zip(found).collect(),
    };
    f.is_isomorphism(a, b).then_some(f)
}

/// The module restricted to `t = 1`: one summand `(α, N_α)` per
/// `α ∈ (-1, 0]`, standing for the monodromy with semisimple part labeled by
/// `α` and unipotent part determined by `N_α`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionAtOne {
    pub dim: usize,
    pub summands: Vec<(Rational, Matrix)>,
}

pub fn restrict_to_one(core: &CoreData) -> Result<RestrictionAtOne> {
    let c = cycles(core)?;
    Ok(RestrictionAtOne {
        dim: c.psi.values().map(Matrix::rows).sum(),
        summands: c.psi.into_iter().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    #[test]
    fn expand_half_line() {
        let core = CoreData::single(rat(-1, 2), Matrix::zeros(1, 1));
        let win = expand(&core, 1).unwrap();
        for b in [rat(-3, 2), rat(-1, 2), rat(1, 2)] {
            assert_eq!(win.dim(&b), 1);
        }
        assert!(win.check().is_empty());
        assert!(win.t_maps().values().all(Matrix::is_invertible));
        assert!(win.d_maps().values().all(Matrix::is_invertible));
    }

    #[test]
    fn expand_structure_sheaf() {
        let win = expand(&CoreData::structure_sheaf(), 1).unwrap();
        assert_eq!(win.dim(&int(0)), 1);
        assert_eq!(win.dim(&int(1)), 1);
        assert_eq!(win.dim(&int(-1)), 0);
        assert_eq!(win.dim(&int(-2)), 0);
        assert_eq!(win.d_at(&int(0)).unwrap(), &Matrix::zeros(0, 1));
        assert!(win.check().is_empty());
    }

    #[test]
    fn expand_empty_core() {
        let win = expand(&CoreData::zero(), 2).unwrap();
        assert!(win.is_empty());
    }

    #[test]
    fn validate_examples() {
        let bad = CoreData::new(
            BTreeMap::from([(zero(), Matrix::jordan_block(2))]),
            Matrix::zeros(0, 2),
            Matrix::zeros(2, 0),
        );
        assert!(bad.validate().contains(&"w·u ≠ N_0".to_string()));
        assert!(CoreData::single(rat(-1, 2), Matrix::jordan_block(3)).is_valid());
        let nonnil = CoreData::single(rat(-1, 2), Matrix::identity(1));
        assert!(nonnil.validate().iter().any(|p| p.starts_with("NotNilpotent")));
    }

    #[test]
    fn eigen_examples() {
        let e = eigen_decompose(&Matrix::zeros(2, 2)).unwrap();
        assert_eq!(e.len(), 1);
        assert!(e[&zero()].is_full());
        let e = eigen_decompose(&Matrix::diagonal(&[rat(-1, 2), rat(1, 2)])).unwrap();
        assert_eq!(e.len(), 2);
        assert!(e.values().all(|s| s.dim() == 1));
        assert_eq!(
            eigen_decompose(&Matrix::from_i64(&[&[0, -1], &[1, 0]])),
            Err(Error::IrrationalEigenvalue)
        );
    }

    #[test]
    fn v_filtration_examples() {
        let core = CoreData::single(rat(-1, 2), Matrix::zeros(1, 1));
        let win = expand(&core, 1).unwrap();
        let v = v_filtration(&win, &rat(-1, 2));
        assert_eq!(v[&rat(-1, 2)].dim(), 1);
        assert_eq!(v[&rat(1, 2)].dim(), 1);
        assert_eq!(v[&rat(-3, 2)].dim(), 0);
        let all = v_filtration(&win, &int(-5));
        assert!(all.iter().all(|(b, s)| s.dim() == win.dim(b)));
        assert_eq!(v_graded_dim(&win, &rat(-1, 2)), 1);
        assert_eq!(v_graded_dim(&win, &zero()), 0);
    }

    #[test]
    fn oracle_matches_formula_on_small_cores() {
        let cores = [
            CoreData::single(rat(-1, 2), Matrix::jordan_block(2)),
            CoreData::structure_sheaf(),
            CoreData::delta_module(),
            CoreData::new(
                BTreeMap::from([(zero(), Matrix::zeros(1, 1)), (minus_one(), Matrix::zeros(1, 1))]),
                Matrix::identity(1),
                Matrix::zeros(1, 1),
            ),
        ];
        for core in cores {
            let win = expand(&core, 2).unwrap();
            assert_eq!(v_filtration_oracle(&win).unwrap(), v_filtration_formula(&win));
        }
        let win = expand(&CoreData::structure_sheaf(), 0).unwrap();
        assert!(matches!(v_filtration_oracle(&win), Err(Error::WindowTooSmall(_))));
    }

    #[test]
    fn cycles_examples() {
        let c = cycles(&CoreData::structure_sheaf()).unwrap();
        assert_eq!(c.psi.len(), 1);
        assert_eq!(c.phi.rows(), 0);
        let c = cycles(&CoreData::delta_module()).unwrap();
        assert!(c.psi.is_empty());
        assert_eq!(c.phi.rows(), 1);
    }

    #[test]
    fn dual_examples() {
        let d = dual(&CoreData::single(rat(-1, 3), Matrix::zeros(1, 1))).unwrap();
        assert_eq!(d.alphas(), vec![rat(-2, 3)]);
        assert_eq!(dual(&CoreData::structure_sheaf()).unwrap(), CoreData::structure_sheaf());

        let core = CoreData::new(
            BTreeMap::from([(zero(), Matrix::zeros(1, 1)), (minus_one(), Matrix::zeros(1, 1))]),
            Matrix::identity(1),
            Matrix::zeros(1, 1),
        );
        let dd = dual(&dual(&core).unwrap()).unwrap();
        assert!(double_dual_witness(&core).is_isomorphism(&dd, &core));
    }

    #[test]
    fn dual_window_agrees_up_to_isomorphism() {
        let core = CoreData::single(rat(-1, 3), Matrix::jordan_block(2));
        let win = dual_window(&expand(&core, 2).unwrap());
        assert!(win.check().is_empty());
        let from_window = win.to_core().unwrap();
        assert!(find_core_isomorphism(&from_window, &dual(&core).unwrap(), 0).is_some());
    }

    #[test]
    fn ker_coker_examples() {
        let core = CoreData::single(rat(-1, 2), Matrix::jordan_block(2));
        let id = CoreMorphism::identity(&core);
        assert_eq!(ker_coker(&id, &core, &core, KerCoker::Kernel).unwrap().total_dim(), 0);
        let z = CoreMorphism::zero(&core, &core);
        assert_eq!(ker_coker(&z, &core, &core, KerCoker::Kernel).unwrap(), core);

        let line = CoreData::single(rat(-1, 2), Matrix::zeros(1, 1));
        let incl = CoreMorphism {
            maps: BTreeMap::from([(rat(-1, 2), Matrix::from_i64(&[&[1], &[0]]))]),
        };
        let q = ker_coker(&incl, &line, &core, KerCoker::Cokernel).unwrap();
        assert_eq!(q, CoreData::single(rat(-1, 2), Matrix::zeros(1, 1)));
        assert!(q.is_valid());
    }

    #[test]
    fn restriction_examples() {
        assert_eq!(restrict_to_one(&CoreData::structure_sheaf()).unwrap().dim, 1);
        assert_eq!(restrict_to_one(&CoreData::delta_module()).unwrap().dim, 0);
        let r = restrict_to_one(&CoreData::single(rat(-1, 2), Matrix::jordan_block(2))).unwrap();
        assert_eq!(r.summands, vec![(rat(-1, 2), Matrix::jordan_block(2))]);
    }
}
