//! Shared fixtures for the benchmarks.

use fuzzy_core::{BasisLabel, ParamPoint, PsiElement, WElement};

/// `(Xi(l1), Xi(l2))` for every label pair with `n <= n2_max / 2` in both slots.
pub fn label_pairs(n2_max: i32) -> Vec<(PsiElement, PsiElement)> {
    let ls = BasisLabel::all_up_to(n2_max);
    ls.iter().flat_map(|a| ls.iter().map(move |b| (PsiElement::basis(*a), PsiElement::basis(*b)))).collect()
}

/// Level `k = 3/2` at `eps = 1`.
pub fn level_point() -> ParamPoint {
    ParamPoint::at_level(fuzzy_core::int(1), 3).expect("valid level")
}

/// `(ap am)^k`, a dense element for the normal-ordering benchmark.
pub fn number_power(k: usize) -> WElement {
    let n = WElement::ap().mul(&WElement::am());
    (1..k).fold(n.clone(), |acc, _| acc.mul(&n))
}
