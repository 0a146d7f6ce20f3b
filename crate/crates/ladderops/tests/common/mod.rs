//! Shared proptest strategies for random expressions.

use ladderops::{Complex64, ModeIndex, NormalTerm, OperatorExpr, ShiftWord, XMonomial};
use proptest::prelude::*;

pub fn arb_term(
    max_mode: u32,
    max_xdeg: u32,
    max_shift: i32,
) -> impl Strategy<Value = NormalTerm> {
    let coeff = (-2.0f64..2.0, -2.0f64..2.0);
    let xparts = prop::collection::vec((1..=max_mode, 0..=max_xdeg), 0..3);
    let shifts = prop::collection::vec((1..=max_mode, -max_shift..=max_shift), 0..3);
    (coeff, xparts, shifts).prop_map(|((re, im), xs, ws)| {
        let mut mono = XMonomial::one();
        for (j, n) in xs {
            mono = mono.mul(&XMonomial::single(ModeIndex(j), n));
        }
        let word = ShiftWord::from_exponents(ws.into_iter().map(|(j, m)| (ModeIndex(j), m)));
        NormalTerm::new(Complex64::new(re, im), mono, word)
    })
}

pub fn arb_expr(
    max_mode: u32,
    max_xdeg: u32,
    max_shift: i32,
    max_terms: usize,
) -> impl Strategy<Value = OperatorExpr> {
    prop::collection::vec(arb_term(max_mode, max_xdeg, max_shift), 0..=max_terms)
        .prop_map(OperatorExpr::from_terms)
}
