use std::sync::OnceLock;

use krflow_core::explicit::{FlowSystem, NFlowMonoid};
use krflow_core::fixtures::m1;
use krflow_core::loopable::TypeIOracle;
use krflow_core::monoid::{check_group_mapping, rees_coordinatize};
use krflow_core::sp::{bit, points_of};
use krflow_core::states::{exact_states, generate_states, Budgets};
use krflow_core::symbolic::WordAction;
use krflow_core::{EvalContext, FlowTerm, PartialAction, SetPartition};
use proptest::prelude::*;

const X: [&str; 3] = ["a", "b", "z"];

fn words(max: usize) -> Vec<Vec<&'static str>> {
    let mut out: Vec<Vec<&str>> = vec![vec![]];
    let mut last = out.clone();
    for _ in 0..max {
        last = last.iter().flat_map(|w| X.iter().map(move |x| [w.clone(), vec![*x]].concat())).collect();
        out.extend(last.iter().cloned());
    }
    out
}

/// ε, every word, and u (v)^w* u' with |u v u'| ≤ 4 and v primitive.
fn small_terms() -> Vec<FlowTerm> {
    let ws = words(4);
    let mut terms: Vec<FlowTerm> = ws.iter().map(|w| FlowTerm::word(w)).collect();
    for u in &ws {
        for v in &ws {
            for u2 in &ws {
                let body = FlowTerm::word(v);
                if v.is_empty() || u.len() + v.len() + u2.len() > 4 || body.is_proper_power() {
                    continue;
                }
                terms.push(FlowTerm::concat(vec![FlowTerm::word(u), FlowTerm::omega_star(body), FlowTerm::word(u2)]));
            }
        }
    }
    terms
}

#[test]
fn points_move_like_the_action_table() {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    let act = PartialAction::right_on(&m, &cert.distinguished_r);
    let ctx = EvalContext::new(&m, 0, &TypeIOracle::Trivial).unwrap();
    let mut checked = 0;
    for w in words(4) {
        let z = m.eval_word(&w).unwrap();
        for r in 0..4 {
            let expect = match act.act(r, z) {
                Some(t) => SetPartition::point(4, t),
                None => SetPartition::bottom(4),
            };
            let p = SetPartition::point(4, r);
            assert_eq!(ctx.act_word(&p, &w).unwrap(), WordAction::Image(expect.clone()), "{r}·{w:?}");
            assert_eq!(ctx.act_term(&p, &FlowTerm::word(&w)).unwrap().state, expect, "{r}·{w:?}");
            checked += 1;
        }
    }
    assert_eq!(checked, 4 * (1 + 3 + 9 + 27 + 81));
}

#[test]
fn tie_your_shoes() {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    let rc = rees_coordinatize(&m, &cert).unwrap();
    let ctx = EvalContext::new(&m, 0, &TypeIOracle::Trivial).unwrap();
    let (a, _, _) = rc.triple(cert.distinguished_r[0]).unwrap();
    let g_n = rc.group.size();
    let mut instances = 0;
    for a0 in 0..rc.rows.len() {
        for b1 in 0..rc.cols.len() {
            for b2 in 0..rc.cols.len() {
                let (Some(c1), Some(c2)) = (rc.sandwich[b1][a0], rc.sandwich[b2][a0]) else { continue };
                if b1 == b2 {
                    continue;
                }
                for g in 0..g_n {
                    let x = rc.element(a, rc.group.mul(g, rc.inverse(c1)), b1);
                    let y = rc.element(a, rc.group.mul(g, rc.inverse(c2)), b2);
                    let (px, py) = (cert.point_of(x).unwrap(), cert.point_of(y).unwrap());
                    // x and y alone, in separate blocks
                    let apart = SetPartition::discrete(4, bit(px) | bit(py));
                    let c = ctx.fn_stabilize(&apart);
                    assert!(c.same_block(px, py), "{} and {}", m.name(x), m.name(y));
                    instances += 1;
                }
            }
        }
    }
    // two rows, one ordered pair of distinct columns each way, two group elements
    assert_eq!(instances, 2 * 2 * 2);
}

#[test]
fn symbolic_matches_explicit_on_small_terms() {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    let (sys, nflow, _) = exact_states(&m, &cert, 0, &TypeIOracle::Trivial).unwrap();
    let ctx = EvalContext::new(&m, 0, &TypeIOracle::Trivial).unwrap();
    let lat = sys.lattice();
    let terms = small_terms();
    let (mut equal, mut below) = (0, 0);
    for &a in &nflow.stable {
        let l = lat.elem(a);
        for t in &terms {
            let ours = ctx.act_term(l, t).unwrap().state;
            let exact = lat.elem(sys.interpret(t, &nflow.vacuum).unwrap().forward(a));
            if t.stars() == 0 {
                assert_eq!(&ours, exact, "{t} at {l:?}");
                equal += 1;
            } else {
                assert!(ours.leq(exact), "{t} at {l:?}: {ours:?} vs {exact:?}");
                below += 1;
            }
        }
    }
    assert!(equal > 0 && below > 0);
}

#[test]
fn generated_states_replay() {
    let m = m1();
    for level in [0, 1] {
        let ctx = EvalContext::new(&m, level, &TypeIOracle::Trivial).unwrap();
        let gen = generate_states(&ctx, &Budgets::default()).unwrap();
        assert!(!gen.states.is_empty());
        for t in &gen.states {
            assert_eq!(t.replay(&ctx).unwrap(), t.state, "level {level}");
            assert_eq!(ctx.fn_stabilize(&t.state), t.state, "generated states are stable");
        }
    }
}

#[test]
fn symbolic_state_counts_match_exact() {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    for (level, expect) in [(0, 7), (1, 5)] {
        let (_, _, ex) = exact_states(&m, &cert, level, &TypeIOracle::Trivial).unwrap();
        let ctx = EvalContext::new(&m, level, &TypeIOracle::Trivial).unwrap();
        let gen = generate_states(&ctx, &Budgets { exhaustive: true, ..Budgets::default() }).unwrap();
        assert_eq!(ex.states.len(), expect);
        assert_eq!(gen.states.len(), expect, "level {level}");
    }
}

#[test]
fn higher_levels_generate_fewer_states() {
    let m = m1();
    let st = |level| {
        let ctx = EvalContext::new(&m, level, &TypeIOracle::Trivial).unwrap();
        let b = Budgets { exhaustive: true, ..Budgets::default() };
        generate_states(&ctx, &b).unwrap().states.into_iter().map(|t| t.state).collect::<Vec<_>>()
    };
    let (zero, one) = (st(0), st(1));
    for l in &one {
        assert!(zero.iter().any(|k| l.leq(k)), "{l:?} escapes level 0");
    }
}

#[test]
fn carriers_follow_the_monoid() {
    let m = m1();
    let cert = check_group_mapping(&m).unwrap();
    let act = PartialAction::right_on(&m, &cert.distinguished_r);
    let ctx = EvalContext::new(&m, 0, &TypeIOracle::Trivial).unwrap();
    let image = |y: u64, z: usize| points_of(y).filter_map(|r| act.act(r, z)).fold(0u64, |a, t| a | bit(t));
    for t in small_terms() {
        let lambda = ctx.interp_lambda(&t).unwrap();
        for r in 0..4 {
            let out = ctx.act_term(&SetPartition::point(4, r), &t).unwrap();
            let expect = lambda.iter().fold(0u64, |a, &z| a | image(out.source.carrier(), z));
            assert_eq!(out.state.carrier(), expect, "{t} from point {r}");
        }
    }
}

fn partition() -> impl Strategy<Value = SetPartition> {
    // each point: absent, or in one of four blocks
    proptest::collection::vec(proptest::option::of(0u8..4), 4).prop_map(|ids| {
        let blocks = (0..4u8)
            .map(|b| ids.iter().enumerate().filter(|(_, i)| **i == Some(b)).fold(0u64, |m, (r, _)| m | bit(r)))
            .filter(|&m| m != 0)
            .collect();
        SetPartition::from_blocks(4, blocks).unwrap()
    })
}

proptest! {
    #[test]
    fn stabilize_is_a_closure(a in partition(), b in partition()) {
        let ctx = EvalContext::new(&m1(), 0, &TypeIOracle::Trivial).unwrap();
        let ca = ctx.fn_stabilize(&a);
        prop_assert!(a.leq(&ca));
        prop_assert_eq!(ctx.fn_stabilize(&ca), ca.clone());
        let ab = a.meet(&b);
        prop_assert!(ctx.fn_stabilize(&ab).leq(&ca));
    }

    #[test]
    fn stabilize_matches_the_explicit_vacuum(a in partition()) {
        let (sys, nflow, ctx) = exact_m1();
        let lat = sys.lattice();
        let exact = nflow.vacuum.back(lat.index_of(&a));
        prop_assert_eq!(&ctx.fn_stabilize(&a), lat.elem(exact));
    }
}

fn exact_m1() -> &'static (FlowSystem, NFlowMonoid, EvalContext) {
    static CELL: OnceLock<(FlowSystem, NFlowMonoid, EvalContext)> = OnceLock::new();
    CELL.get_or_init(|| {
        let m = m1();
        let cert = check_group_mapping(&m).unwrap();
        let (sys, nflow, _) = exact_states(&m, &cert, 0, &TypeIOracle::Trivial).unwrap();
        (sys, nflow, EvalContext::new(&m, 0, &TypeIOracle::Trivial).unwrap())
    })
}
