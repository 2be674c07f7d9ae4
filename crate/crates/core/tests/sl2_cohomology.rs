use tetra_core::cohomology::finite_group_cohomology;
use tetra_core::group::{enumerate_sl2, sl2_generators};
use tetra_core::rep::{ad0_a4, build_ad0};

#[test]
fn sl2_f3_adjoint_has_no_h2() {
    let sl = enumerate_sl2(1).unwrap();
    let ad = build_ad0(&sl2_generators(1)).unwrap();
    let r = finite_group_cohomology(&sl, &ad, 2).unwrap();
    assert_eq!(r.h0, 0);
    assert_eq!(r.h1, 0);
    assert_eq!(r.h2, Some(0));
}

#[test]
fn sl2_z9_adjoint_h1_through_generators() {
    // the level-2 group acts on Ad0 through its reduction mod 3
    let sl9 = enumerate_sl2(2).unwrap();
    let images: Vec<_> = sl2_generators(2).iter().map(|g| g.reduce(1)).collect();
    let ad = build_ad0(&images).unwrap();
    let r = finite_group_cohomology(&sl9, &ad, 1).unwrap();
    assert_eq!(r.h0, 0);
    // restriction to the congruence kernel gives Hom_{SL(2,F3)}(Ad0, Ad0), one-dimensional
    assert_eq!(r.h1, 1);
    assert_eq!(ad, ad0_a4());
}
