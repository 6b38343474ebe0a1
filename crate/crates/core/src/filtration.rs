//! Increasing filtrations by subspaces, stored as jump lists.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{nilpotency_index, Matrix, Subspace};

/// An exhaustive, separated increasing filtration. Below the first jump the
/// step is zero, from the last jump on it is the whole space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IncreasingFiltration {
    ambient: usize,
    jumps: Vec<(i64, Subspace)>,
}

impl IncreasingFiltration {
    /// Builds a filtration from `(index, step)` pairs. Steps must be nested
    /// in index order and the top step must be the whole space; repeated
    /// steps are dropped so the stored jumps strictly increase.
    pub fn new(ambient: usize, steps: Vec<(i64, Subspace)>) -> Result<Self> {
        let mut steps = steps;
        steps.sort_by_key(|(i, _)| *i);
        let mut jumps: Vec<(i64, Subspace)> = Vec::new();
        let mut prev = Subspace::zero(ambient);
        for (i, s) in steps {
            if s.ambient() != ambient {
                return Err(Error::AmbientMismatch {
                    left: ambient,
                    right: s.ambient(),
                });
            }
            if !s.contains(&prev)? {
                return Err(Error::DimensionMismatch(format!(
                    "filtration step at index {i} does not contain the previous step"
                )));
            }
            if s.dim() > prev.dim() {
                if jumps.last().is_some_and(|(j, _)| *j == i) {
                    jumps.pop();
                }
                prev = s.clone();
                jumps.push((i, s));
            }
        }
        if prev.dim() != ambient {
            return Err(Error::DimensionMismatch(
                "filtration is not exhaustive".to_string(),
            ));
        }
        Ok(IncreasingFiltration { ambient, jumps })
    }

    /// The filtration with a single jump from zero to everything at `at`.
    pub fn trivial(ambient: usize, at: i64) -> Self {
        let jumps = if ambient == 0 {
            Vec::new()
        } else {
            vec![(at, Subspace::full(ambient))]
        };
        IncreasingFiltration { ambient, jumps }
    }

    /// Builds from `step(p)` evaluated on `lo..=hi`; `step(hi)` must be full.
    pub fn from_fn(
        ambient: usize,
        lo: i64,
        hi: i64,
        mut step: impl FnMut(i64) -> Subspace,
    ) -> Result<Self> {
        let steps = (lo..=hi).map(|p| (p, step(p))).collect();
        Self::new(ambient, steps)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn jumps(&self) -> &[(i64, Subspace)] {
        &self.jumps
    }

    pub fn jump_indices(&self) -> Vec<i64> {
        self.jumps.iter().map(|(i, _)| *i).collect()
    }

    /// Lowest and highest jump indices; `None` on the zero space.
    pub fn range(&self) -> Option<(i64, i64)> {
        Some((self.jumps.first()?.0, self.jumps.last()?.0))
    }

    pub fn step(&self, p: i64) -> Subspace {
        match self.jumps.iter().rev().find(|(i, _)| *i <= p) {
            Some((_, s)) => s.clone(),
            None => Subspace::zero(self.ambient),
        }
    }

    pub fn graded_dim(&self, p: i64) -> usize {
        self.step(p).dim() - self.step(p - 1).dim()
    }

    /// `index → dim Gr_index`, listing only nonzero pieces.
    pub fn graded_dims(&self) -> BTreeMap<i64, usize> {
        let mut out = BTreeMap::new();
        let mut prev = 0;
        for (i, s) in &self.jumps {
            out.insert(*i, s.dim() - prev);
            prev = s.dim();
        }
        out
    }

    /// The filtration `G` with `G_{p+d} = F_p`.
    pub fn shift(&self, d: i64) -> Self {
        IncreasingFiltration {
            ambient: self.ambient,
            jumps: self.jumps.iter().map(|(i, s)| (i + d, s.clone())).collect(),
        }
    }

    /// Image of each step under an injective map or a surjection.
    pub fn pushforward(&self, f: &Matrix) -> Result<Self> {
        if f.cols() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map with {} columns on a filtration of a {}-dimensional space",
                f.cols(),
                self.ambient
            )));
        }
        let steps = self.jumps.iter().map(|(i, s)| (*i, f.map_subspace(s))).collect();
        Self::new(f.rows(), with_top(steps, f.rows()))
    }

    /// Preimage of each step under an injective map: the induced filtration
    /// on a subspace, expressed in that subspace's coordinates.
    pub fn pullback(&self, f: &Matrix) -> Result<Self> {
        if f.rows() != self.ambient {
            return Err(Error::DimensionMismatch(format!(
                "map with {} rows into a {}-dimensional space",
                f.rows(),
                self.ambient
            )));
        }
        if !f.kernel().is_zero() {
            return Err(Error::DimensionMismatch(
                "pullback along a non-injective map".to_string(),
            ));
        }
        let steps = self.jumps.iter().map(|(i, s)| (*i, f.preimage(s))).collect();
        Self::new(f.cols(), steps)
    }

    /// Induced filtration on a subspace, in its canonical basis.
    pub fn on_subspace(&self, sub: &Subspace) -> Result<Self> {
        self.pullback(sub.basis())
    }

    /// Induced filtration on the quotient by a subspace, in the complement
    /// basis.
    pub fn on_quotient(&self, sub: &Subspace) -> Result<Self> {
        self.pushforward(&sub.quotient_map())
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        let n = self.ambient + other.ambient;
        let mut idx: Vec<i64> = self.jump_indices();
        idx.extend(other.jump_indices());
        idx.sort_unstable();
        idx.dedup();
        let steps = idx
            .into_iter()
            .map(|p| {
                let a = self.step(p).basis().clone();
                let b = other.step(p).basis().clone();
                (p, Subspace::column_span(&Matrix::block_diag(&[&a, &b])))
            })
            .collect();
        Self::new(n, with_top(steps, n)).expect("direct sum of filtrations is a filtration")
    }

    /// Convolution on the tensor product: `Σ_{s+t=p} a_s ⊗ b_t`.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.ambient * other.ambient;
        let (Some((alo, ahi)), Some((blo, bhi))) = (self.range(), other.range()) else {
            return IncreasingFiltration::trivial(n, 0);
        };
        let steps = (alo + blo..=ahi + bhi)
            .map(|p| {
                let vectors = self.jumps.iter().flat_map(|(s, a)| {
                    a.tensor(&other.step(p - s)).basis_vectors()
                });
                (p, Subspace::span(n, vectors))
            })
            .collect();
        Self::new(n, steps).expect("tensor of filtrations is a filtration")
    }

    /// Whether `f(F_p) ⊆ G_{p+shift}` for all `p`.
    pub fn is_filtered(f: &Matrix, src: &Self, tgt: &Self, shift: i64) -> bool {
        src.jumps.iter().all(|(p, s)| {
            tgt.step(p + shift)
                .contains(&f.map_subspace(s))
                .unwrap_or(false)
        })
    }

    /// Indices at which the step of either filtration may change, after
    /// moving `tgt` by `-shift`.
    fn critical_indices(src: &Self, tgt: &Self, shift: i64) -> Vec<i64> {
        let mut idx: Vec<i64> = src.jump_indices();
        idx.extend(tgt.jump_indices().into_iter().map(|i| i - shift));
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

fn with_top(mut steps: Vec<(i64, Subspace)>, n: usize) -> Vec<(i64, Subspace)> {
    if n > 0 && steps.is_empty() {
        steps.push((0, Subspace::full(n)));
    }
    steps
}

/// Hodge and weight filtrations on one space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiltrationPair {
    pub f: IncreasingFiltration,
    pub w: IncreasingFiltration,
}

impl FiltrationPair {
    pub fn new(f: IncreasingFiltration, w: IncreasingFiltration) -> Result<Self> {
        if f.ambient() != w.ambient() {
            return Err(Error::AmbientMismatch {
                left: f.ambient(),
                right: w.ambient(),
            });
        }
        Ok(FiltrationPair { f, w })
    }

    pub fn trivial(ambient: usize, f_at: i64, w_at: i64) -> Self {
        FiltrationPair {
            f: IncreasingFiltration::trivial(ambient, f_at),
            w: IncreasingFiltration::trivial(ambient, w_at),
        }
    }

    pub fn ambient(&self) -> usize {
        self.f.ambient()
    }

    /// Tate twist by `l`: `F'_p = F_{p-l}` and `W'_k = W_{k+2l}`.
    pub fn twist(&self, l: i64) -> Self {
        FiltrationPair {
            f: self.f.shift(l),
            w: self.w.shift(-2 * l),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        FiltrationPair {
            f: self.f.tensor(&other.f),
            w: self.w.tensor(&other.w),
        }
    }

    pub fn direct_sum(&self, other: &Self) -> Self {
        FiltrationPair {
            f: self.f.direct_sum(&other.f),
            w: self.w.direct_sum(&other.w),
        }
    }

    pub fn pushforward(&self, g: &Matrix) -> Result<Self> {
        Ok(FiltrationPair {
            f: self.f.pushforward(g)?,
            w: self.w.pushforward(g)?,
        })
    }

    pub fn pullback(&self, g: &Matrix) -> Result<Self> {
        Ok(FiltrationPair {
            f: self.f.pullback(g)?,
            w: self.w.pullback(g)?,
        })
    }
}

/// The monodromy weight filtration of a nilpotent `n` centered at `center`:
/// `W_{center+k} = Σ_{j ≥ max(k,0)} Ker n^{j+1} ∩ Im n^{j-k}`.
pub fn monodromy_weight_filtration(n: &Matrix, center: i64) -> Result<IncreasingFiltration> {
    let nil = nilpotency_index(n)? as i64;
    let dim = n.rows();
    if dim == 0 {
        return Ok(IncreasingFiltration::trivial(0, center));
    }
    let powers: Vec<Matrix> = (0..=nil + 1).map(|j| n.pow(j as u32)).collect();
    let kernels: Vec<Subspace> = powers.iter().map(Matrix::kernel).collect();
    let images: Vec<Subspace> = powers.iter().map(Matrix::image).collect();
    let ker = |j: i64| kernels[(j.min(nil + 1)) as usize].clone();
    let im = |j: i64| images[(j.min(nil + 1)) as usize].clone();
    IncreasingFiltration::from_fn(dim, center - nil, center + nil, |p| {
        let k = p - center;
        let mut acc = Subspace::zero(dim);
        for j in k.max(0)..k + nil {
            let piece = ker(j + 1).intersect(&im(j - k)).expect("same ambient");
            acc = acc.sum(&piece).expect("same ambient");
        }
        acc
    })
}

/// Which relative monodromy axiom failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonodromyAxiom {
    /// `N` does not preserve `L`.
    PreservesL,
    /// `N W_k ⊄ W_{k-2}`.
    DropsWeight,
    /// `N^l: Gr^W_{k+l} Gr^L_k → Gr^W_{k-l} Gr^L_k` is not an isomorphism.
    HardLefschetz,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelativeMonodromyReport {
    pub ok: bool,
    /// First failure as `(k, l, axiom)`. Weight-drop failures carry `l = 1`.
    pub failure: Option<(i64, i64, MonodromyAxiom)>,
}

impl RelativeMonodromyReport {
    fn pass() -> Self {
        RelativeMonodromyReport {
            ok: true,
            failure: None,
        }
    }

    fn fail(k: i64, l: i64, axiom: MonodromyAxiom) -> Self {
        RelativeMonodromyReport {
            ok: false,
            failure: Some((k, l, axiom)),
        }
    }
}

/// Checks that `w` is the relative monodromy filtration of `n` with respect
/// to `l_filt`.
pub fn check_relative_monodromy(
    n: &Matrix,
    l_filt: &IncreasingFiltration,
    w: &IncreasingFiltration,
) -> Result<RelativeMonodromyReport> {
    let nil = nilpotency_index(n)? as i64;
    let dim = n.rows();
    if l_filt.ambient() != dim || w.ambient() != dim {
        return Err(Error::AmbientMismatch {
            left: dim,
            right: l_filt.ambient().max(w.ambient()),
        });
    }
    if dim == 0 {
        return Ok(RelativeMonodromyReport::pass());
    }
    let (llo, lhi) = l_filt.range().expect("nonzero space");
    let (wlo, whi) = w.range().expect("nonzero space");
    let lo = llo.min(wlo) - nil - 1;
    let hi = lhi.max(whi) + nil + 1;

    for k in lo..=hi {
        let lk = l_filt.step(k);
        if !lk.contains(&n.map_subspace(&lk))? {
            return Ok(RelativeMonodromyReport::fail(k, 0, MonodromyAxiom::PreservesL));
        }
    }
    for k in lo..=hi {
        if !w.step(k - 2).contains(&n.map_subspace(&w.step(k)))? {
            return Ok(RelativeMonodromyReport::fail(k, 1, MonodromyAxiom::DropsWeight));
        }
    }
    for k in llo..=lhi {
        let lk = l_filt.step(k);
        let lk1 = l_filt.step(k - 1);
        // W_j induced on L_k, taken modulo L_{k-1}
        let piece = |j: i64| -> Subspace {
            w.step(j).intersect(&lk).expect("same ambient").sum(&lk1).expect("same ambient")
        };
        for l in 1..=nil.max(1) {
            let np = n.pow(l as u32);
            let (a, a1) = (piece(k + l), piece(k + l - 1));
            let (b, b1) = (piece(k - l), piece(k - l - 1));
            let src_dim = a.dim() - a1.dim();
            let tgt_dim = b.dim() - b1.dim();
            let images: Vec<_> = complement_vectors(&a, &a1)
                .iter()
                .map(|v| np.apply(v))
                .collect();
            let lands = images.iter().all(|v| b.contains_vector(v));
            let rank = Subspace::span(dim, images.iter().map(|v| b1.reduce(v))).dim();
            if !lands || src_dim != tgt_dim || rank != src_dim {
                return Ok(RelativeMonodromyReport::fail(k, l, MonodromyAxiom::HardLefschetz));
            }
        }
    }
    Ok(RelativeMonodromyReport::pass())
}

/// Vectors of `big` completing a basis of `small ⊆ big`.
fn complement_vectors(big: &Subspace, small: &Subspace) -> Vec<Vec<crate::linalg::Rational>> {
    let mut acc = small.clone();
    let mut out = Vec::new();
    for v in big.basis_vectors() {
        if !acc.contains_vector(&v) {
            acc = acc
                .sum(&Subspace::span(big.ambient(), vec![v.clone()]))
                .expect("same ambient");
            out.push(v);
        }
    }
    out
}

/// Whether `f(F_p) = Im f ∩ G_{p+shift}` for every `p`.
pub fn check_strict(
    f: &Matrix,
    src: &IncreasingFiltration,
    tgt: &IncreasingFiltration,
    shift: i64,
) -> bool {
    if f.cols() != src.ambient() || f.rows() != tgt.ambient() {
        return false;
    }
    let image = f.image();
    IncreasingFiltration::critical_indices(src, tgt, shift)
        .into_iter()
        .all(|p| {
            let lhs = f.map_subspace(&src.step(p));
            let rhs = image.intersect(&tgt.step(p + shift)).expect("same ambient");
            lhs == rhs
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;

    fn coord(n: usize, idx: &[usize]) -> Subspace {
        Subspace::coordinate(n, idx)
    }

    #[test]
    fn graded_dims_examples() {
        assert_eq!(
            IncreasingFiltration::trivial(3, 0).graded_dims(),
            BTreeMap::from([(0, 3)])
        );
        let f = IncreasingFiltration::new(2, vec![(0, coord(2, &[1])), (1, Subspace::full(2))]).unwrap();
        assert_eq!(f.graded_dims(), BTreeMap::from([(0, 1), (1, 1)]));
    }

    #[test]
    fn twist_moves_jumps() {
        let p = FiltrationPair::trivial(1, 0, 0);
        assert_eq!(p.twist(0), p);
        let t = p.twist(1);
        assert_eq!(t.f.jump_indices(), vec![1]);
        assert_eq!(t.w.jump_indices(), vec![-2]);
        assert_eq!(p.twist(3).twist(-3), p);
    }

    #[test]
    fn tensor_examples() {
        let a = IncreasingFiltration::trivial(1, 0);
        assert_eq!(a.tensor(&a), IncreasingFiltration::trivial(1, 0));
        let b = IncreasingFiltration::new(2, vec![(0, coord(2, &[1])), (1, Subspace::full(2))]).unwrap();
        assert_eq!(a.tensor(&b).graded_dims(), BTreeMap::from([(0, 1), (1, 1)]));
        assert_eq!(
            b.tensor(&b).graded_dims(),
            BTreeMap::from([(0, 1), (1, 2), (2, 1)])
        );
    }

    #[test]
    fn weight_filtration_examples() {
        assert_eq!(
            monodromy_weight_filtration(&Matrix::zeros(2, 2), 3).unwrap(),
            IncreasingFiltration::trivial(2, 3)
        );
        let w = monodromy_weight_filtration(&Matrix::jordan_block(2), -1).unwrap();
        assert!(w.step(-3).is_zero());
        assert_eq!(w.step(-2), coord(2, &[0]));
        assert_eq!(w.step(-1), coord(2, &[0]));
        assert!(w.step(0).is_full());

        let w = monodromy_weight_filtration(&Matrix::jordan_block(3), 0).unwrap();
        assert!(w.step(-3).is_zero());
        assert_eq!(w.step(-2), coord(3, &[0]));
        assert_eq!(w.step(-1), coord(3, &[0]));
        assert_eq!(w.step(0), coord(3, &[0, 1]));
        assert_eq!(w.step(1), coord(3, &[0, 1]));
        assert!(w.step(2).is_full());
    }

    #[test]
    fn relative_monodromy_examples() {
        let z = Matrix::zeros(2, 2);
        let l = IncreasingFiltration::trivial(2, 0);
        assert!(check_relative_monodromy(&z, &l, &l).unwrap().ok);

        let j3 = Matrix::jordan_block(3);
        let l3 = IncreasingFiltration::trivial(3, 0);
        let w3 = monodromy_weight_filtration(&j3, 0).unwrap();
        assert!(check_relative_monodromy(&j3, &l3, &w3).unwrap().ok);

        let j2 = Matrix::jordan_block(2);
        let report = check_relative_monodromy(&j2, &l, &l).unwrap();
        assert!(!report.ok);
        assert_eq!(report.failure, Some((0, 1, MonodromyAxiom::DropsWeight)));
    }

    #[test]
    fn strictness_examples() {
        let f = IncreasingFiltration::new(2, vec![(0, coord(2, &[0])), (1, Subspace::full(2))]).unwrap();
        assert!(check_strict(&Matrix::zeros(2, 2), &f, &f, 0));
        assert!(check_strict(&Matrix::identity(2), &f, &f, 0));
        // projection onto the second coordinate: F_0 = e1 maps to 0, but the
        // target filtration already has everything at 0
        let proj = Matrix::from_i64(&[&[0, 1]]);
        let g = IncreasingFiltration::trivial(1, 0);
        assert!(!check_strict(&proj, &f, &g, 0));
        assert!(check_strict(&proj, &f, &IncreasingFiltration::trivial(1, 1), 0));
    }
}
