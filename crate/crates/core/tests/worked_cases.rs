use std::collections::BTreeMap;

use monodromic::blocks::{chako_construct, compare_with_direct, l_block, ChakoVariant};
use monodromic::dmod::{double_dual_witness, v_filtration_formula, v_filtration_oracle};
use monodromic::format::{emit, parse, Document};
use monodromic::fourier::{double_fourier_check, fourier};
use monodromic::{
    cycles, dual, expand, functor_f, functor_g, int, rat, CoreData, Error, FiltrationPair,
    GluingDatum, Matrix, MonodromicMhm, PsiComponent, PsiDatum,
};

#[test]
fn zero_gluing_matches_golden_text() {
    let golden = include_str!("golden/zero_gluing.json");
    assert_eq!(emit(&Document::Gluing(GluingDatum::zero())), golden);
    assert_eq!(parse(golden).unwrap(), Document::Gluing(GluingDatum::zero()));
}

#[test]
fn structure_sheaf_cycles_and_window() {
    let core = CoreData::structure_sheaf();
    let c = cycles(&core).unwrap();
    assert_eq!(c.psi[&int(0)], Matrix::zeros(1, 1));
    assert_eq!(c.phi.rows(), 0);
    let w = expand(&core, 2).unwrap();
    for b in w.betas() {
        assert_eq!(w.dim(&b), usize::from(b >= int(0)), "beta {b}");
    }
    assert_eq!(v_filtration_oracle(&w).unwrap(), v_filtration_formula(&w));
}

#[test]
fn delta_module_duality() {
    let core = CoreData::delta_module();
    let d = dual(&core).unwrap();
    let dd = dual(&d).unwrap();
    assert!(double_dual_witness(&core).is_isomorphism(&core, &dd));
}

#[test]
fn one_window_is_too_small_for_the_oracle() {
    let w = expand(&CoreData::structure_sheaf(), 0).unwrap();
    assert!(matches!(v_filtration_oracle(&w), Err(Error::WindowTooSmall(_))));
}

#[test]
fn glued_jordan_pair() {
    // ψ_0 = V_2, φ = ψ_0(-1), c = -N, v = 1
    let psi0 = monodromic::nilp_block(2);
    let g = GluingDatum {
        psi: PsiDatum::new(BTreeMap::from([(int(0), psi0.clone())])),
        phi: psi0.filt.twist(-1),
        c: -&psi0.n,
        v: Matrix::identity(2),
        polarizable: true,
    };
    let m = functor_g(&g).unwrap();
    assert!(m.is_valid(), "{:?}", m.validate());
    assert_eq!(functor_f(&m).unwrap(), g);
    let fm = fourier(&m).unwrap();
    assert!(fm.is_valid());
    assert!(double_fourier_check(&m).unwrap().passed());
}

#[test]
fn half_line_fourier_keeps_label() {
    let a = rat(-1, 2);
    let m = MonodromicMhm::new(
        CoreData::single(a.clone(), Matrix::zeros(1, 1)),
        BTreeMap::from([(a.clone(), FiltrationPair::trivial(1, 0, 1))]),
        true,
    );
    let fm = fourier(&m).unwrap();
    assert_eq!(fm.core.alphas(), vec![a.clone()]);
    assert_eq!(fm.filtration(&a).f, m.filtration(&a).f);
}

#[test]
fn blocks_rebuild_jordan_data() {
    let g = l_block(2);
    assert!(compare_with_direct(&g, 2, 2).unwrap().isomorphic);
    let third = PsiDatum::new(BTreeMap::from([(
        rat(-1, 3),
        PsiComponent {
            n: Matrix::zeros(1, 1),
            filt: FiltrationPair::trivial(1, 0, 0),
        },
    )]));
    assert!(matches!(
        chako_construct(&third, 1, 2, ChakoVariant::CK),
        Err(Error::EigenvalueDenominatorMismatch { .. })
    ));
    assert_eq!(chako_construct(&third, 1, 6, ChakoVariant::KC).unwrap(), third);
}
