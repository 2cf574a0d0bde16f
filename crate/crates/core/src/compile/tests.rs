use super::*;
use crate::boolfn::{Assignment, BoolFunc, VarId, VarSet};
use crate::vtree::Vtree;

fn x() -> BoolFunc {
    BoolFunc::var(VarId(0))
}
fn y() -> BoolFunc {
    BoolFunc::var(VarId(1))
}
fn implication() -> BoolFunc {
    x().not().or(&y()).unwrap()
}
fn linear_xy() -> Vtree {
    Vtree::linear(&[VarId(0), VarId(1)]).unwrap()
}
fn parity(n: u32) -> BoolFunc {
    BoolFunc::from_index_fn(VarSet::range(n), |i| i.count_ones() % 2 == 1).unwrap()
}

#[test]
fn dsnnf_of_implication() {
    let f = implication();
    let form = compile_dsnnf(&f, &linear_xy()).unwrap();
    let g = form.to_function().unwrap();
    assert_eq!(g, f);
    assert_eq!(g.model_count(), 3);
    let k = structured_width(&form).width;
    assert!(form.size() <= 2 * 2 + 1 + 3 * k);
}

#[test]
fn sdd_of_implication_is_a_single_decision() {
    let f = implication();
    let form = compile_sdd(&f, &linear_xy()).unwrap();
    assert_eq!(form.to_function().unwrap(), f);
    let Node::Or { children, .. } = form.node(form.root()) else {
        panic!("root should be a decision");
    };
    let mut elems: Vec<(BoolFunc, BoolFunc)> = Vec::new();
    let tables = form.gate_tables().unwrap();
    for &c in children {
        let Node::And { parts, .. } = form.node(c) else {
            panic!()
        };
        let f = |g: usize| BoolFunc::from_table(form.vars().clone(), tables[g].clone()).unwrap();
        elems.push((f(parts[0]), f(parts[1])));
    }
    let full = VarSet::range(2);
    let xe = x().extend(&full).unwrap();
    let ye = y().extend(&full).unwrap();
    let top = BoolFunc::constant(full.clone(), true).unwrap();
    assert_eq!(elems.len(), 2);
    assert!(elems.contains(&(xe.clone(), ye)));
    assert!(elems.contains(&(xe.not(), top)));
}

#[test]
fn unsatisfiable_and_valid_functions() {
    let bot = BoolFunc::constant(VarSet::singleton(VarId(0)), false).unwrap();
    let t = Vtree::leaf(VarId(0));
    let form = compile_dsnnf(&bot, &t).unwrap();
    assert_eq!(form.nodes(), &[Node::Const(false)]);
    let top = BoolFunc::constant(VarSet::range(2), true).unwrap();
    let form = compile_sdd(&top, &linear_xy()).unwrap();
    assert_eq!(form.nodes(), &[Node::Const(true)]);
}

#[test]
fn single_variable_functions() {
    let t = Vtree::leaf(VarId(0));
    for f in [x(), x().not()] {
        assert_eq!(compile_dsnnf(&f, &t).unwrap().to_function().unwrap(), f);
        assert_eq!(compile_sdd(&f, &t).unwrap().to_function().unwrap(), f);
    }
}

#[test]
fn unpruned_vtree_is_rejected() {
    let t = Vtree::linear(&[VarId(0), VarId(1), VarId(2)]).unwrap();
    assert!(compile_dsnnf(&implication(), &t).is_err());
    assert!(compile_sdd(&implication(), &t).is_err());
}

#[test]
fn implicants_of_conjunction() {
    let f = x().and(&y()).unwrap();
    let h = f.clone();
    let pairs = implicants(
        &f,
        &h,
        &VarSet::singleton(VarId(0)),
        &VarSet::singleton(VarId(1)),
    )
    .unwrap();
    assert_eq!(pairs, vec![(x(), y())]);
    let not_factor = x();
    assert!(matches!(
        implicants(
            &f,
            &not_factor,
            &VarSet::singleton(VarId(0)),
            &VarSet::singleton(VarId(1))
        ),
        Err(crate::Error::NotAFactor(_))
    ));
}

#[test]
fn every_pair_lands_in_exactly_one_factor() {
    let f = BoolFunc::from_index_fn(VarSet::range(5), |i| (0x9e37_79b9u64 >> (i % 32)) & 1 == 1)
        .unwrap();
    let y1: VarSet = [VarId(0), VarId(3)].into_iter().collect();
    let y2: VarSet = [VarId(1), VarId(4)].into_iter().collect();
    let whole = crate::boolfn::FactorPartition::compute(&f, &y1.union(&y2)).unwrap();
    let n1 = crate::boolfn::FactorPartition::compute(&f, &y1)
        .unwrap()
        .len();
    let n2 = crate::boolfn::FactorPartition::compute(&f, &y2)
        .unwrap()
        .len();
    let mut total = 0;
    for c in 0..whole.len() {
        let h = whole.characteristic(c);
        let pairs = implicants(&f, &h, &y1, &y2).unwrap();
        // the rectangles cover h disjointly
        let mut covered = 0;
        for (g1, g2) in &pairs {
            let rect = g1.and(g2).unwrap();
            assert!(rect.implies(&h).unwrap());
            covered += rect.model_count();
        }
        assert_eq!(covered, h.model_count());
        total += pairs.len();
    }
    assert_eq!(total, n1 * n2);
}

#[test]
fn recompilation_is_identical() {
    let f = parity(4);
    let t = Vtree::balanced(&[VarId(0), VarId(1), VarId(2), VarId(3)]).unwrap();
    let a = compile_sdd(&f, &t).unwrap();
    let b = compile_sdd(&f, &t).unwrap();
    assert_eq!(a.nodes(), b.nodes());
    assert_eq!(write_form(&a), write_form(&b));
}

#[test]
fn width_inequalities_on_parity() {
    let f = parity(4);
    let t = Vtree::balanced(&[VarId(0), VarId(1), VarId(2), VarId(3)]).unwrap();
    let fw = factor_width(&f, &t).unwrap().width;
    assert!(fiw(&f, &t).unwrap().width <= fw * fw);
    assert!(sdw(&f, &t).unwrap().width <= 1 << (2 * fw + 1));
}

#[test]
fn parity_obdd_has_width_two() {
    let f = parity(3);
    let t = Vtree::linear(&[VarId(0), VarId(1), VarId(2)]).unwrap();
    let o = obdd_export(&compile_sdd(&f, &t).unwrap()).unwrap();
    assert_eq!(o.level_widths(), vec![1, 2, 2]);
    for i in 0..8 {
        let a = Assignment::from_index(f.vars(), i);
        assert_eq!(o.eval(&a).unwrap(), f.eval(&a).unwrap());
    }
}

#[test]
fn implication_obdd() {
    let f = implication();
    let o = obdd_export(&compile_dsnnf(&f, &linear_xy()).unwrap()).unwrap();
    assert_eq!(o.level_widths(), vec![1, 1]);
    let t = Vtree::balanced(&[VarId(0), VarId(1), VarId(2), VarId(3)]).unwrap();
    assert!(obdd_export(&compile_sdd(&parity(4), &t).unwrap()).is_err());
}

#[test]
fn form_text_round_trip() {
    let f = parity(4);
    let t = Vtree::balanced(&[VarId(2), VarId(0), VarId(3), VarId(1)]).unwrap();
    for form in [compile_dsnnf(&f, &t).unwrap(), compile_sdd(&f, &t).unwrap()] {
        let text = write_form(&form);
        let back = parse_form(&text).unwrap();
        assert_eq!(back.nodes(), form.nodes());
        assert_eq!(back.kind(), form.kind());
        assert_eq!(back.to_function().unwrap(), f);
        assert_eq!(write_form(&back), text);
    }
}

#[test]
fn form_parse_errors() {
    assert!(parse_form("").unwrap_err().is_parse());
    assert!(parse_form("f sdd 1 0\nA 0 0 0 0\n").unwrap_err().is_parse());
    assert!(parse_form("f weird 1 0\nT 0\n").unwrap_err().is_parse());
    assert!(parse_form("f sdd 2 1\nT 0\nN 1 5\n")
        .unwrap_err()
        .is_parse());
    assert!(parse_form("f sdd 1 0\nV 0 3\n").unwrap_err().is_parse());
}
