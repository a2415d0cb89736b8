use super::*;
use crate::fixtures::m1;

fn ctx0() -> EvalContext {
    EvalContext::new(&m1(), 0, &TypeIOracle::Trivial).unwrap()
}

#[test]
fn points_move_like_the_table() {
    let ctx = ctx0();
    let m = ctx.monoid();
    for r in 0..ctx.points() {
        for (x, &g) in m.generators() {
            let p = SetPartition::point(ctx.points(), r);
            let got = ctx.act_word(&p, &[x]).unwrap();
            let want = match ctx.point_act(r, g) {
                Some(s) => SetPartition::point(ctx.points(), s),
                None => SetPartition::bottom(ctx.points()),
            };
            assert_eq!(got, WordAction::Image(want));
        }
    }
}

#[test]
fn bottom_and_one_block_elements_are_stable() {
    let ctx = ctx0();
    let n = ctx.points();
    assert!(ctx.fn_stabilize(&SetPartition::bottom(n)).is_bottom());
    for y in 1..1u64 << n {
        let l = SetPartition::one_block(n, y);
        assert_eq!(ctx.fn_stabilize(&l), l);
    }
}

#[test]
fn epsilon_acts_trivially() {
    let ctx = ctx0();
    let n = ctx.points();
    let l = ctx.fn_stabilize(&SetPartition::discrete(n, 0b0101));
    assert_eq!(ctx.act_term(&l, &FlowTerm::Epsilon).unwrap().state, l);
}

#[test]
fn stars_above_level_zero_need_a_certificate() {
    let ctx = EvalContext::new(&m1(), 1, &TypeIOracle::Trivial).unwrap();
    let t = FlowTerm::parse("(a)^w*").unwrap();
    let p = SetPartition::point(ctx.points(), 0);
    assert!(matches!(ctx.act_term(&p, &t), Err(Error::NotLoopable(_))));
    assert!(ctx.vacuum_terms().is_empty());
}

#[test]
fn lambda_of_words_is_a_singleton() {
    let ctx = ctx0();
    let w = FlowTerm::parse("a b a").unwrap();
    let v = ctx.word_value(&["a", "b", "a"]).unwrap();
    assert_eq!(ctx.interp_lambda(&w).unwrap(), BTreeSet::from([v]));
    assert_eq!(ctx.interp_lambda(&FlowTerm::Epsilon).unwrap(), BTreeSet::from([ctx.monoid().identity()]));
}
