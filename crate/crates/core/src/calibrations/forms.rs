use crate::exterior::Form;
use crate::scalar::int;
use crate::Result;

fn form(n: usize, k: usize, terms: &[(&[usize], i64)]) -> Form {
    Form::from_terms(n, k, terms.iter().map(|(i, c)| (i.to_vec(), int(*c)))).expect("catalog form")
}

/// `Σ` of the given `e^i∧e^j`, in whatever index order they are written.
fn two(n: usize, pairs: &[[usize; 2]]) -> Form {
    form(n, 2, &pairs.iter().map(|p| (&p[..], 1)).collect::<Vec<_>>())
}

fn wedge(a: &Form, b: &Form) -> Form {
    a.wedge(b).expect("degrees fit")
}

/// The associative 3-form on `R⁷`:
/// `e¹²³ - e¹∧(e⁴⁵ + e⁶⁷) - e²∧(e⁴⁶ + e⁷⁵) - e³∧(e⁴⁷ + e⁵⁶)`.
pub fn phi() -> Form {
    let e = |i: usize| form(7, 1, &[(&[i], 1)]);
    form(7, 3, &[(&[1, 2, 3], 1)])
        .sub(&wedge(&e(1), &two(7, &[[4, 5], [6, 7]])))
        .and_then(|f| f.sub(&wedge(&e(2), &two(7, &[[4, 6], [7, 5]]))))
        .and_then(|f| f.sub(&wedge(&e(3), &two(7, &[[4, 7], [5, 6]]))))
        .expect("same shape")
}

/// The coassociative 4-form on `R⁷`, written out term by term:
/// `e⁴⁵⁶⁷ - e²³∧(e⁴⁵ + e⁶⁷) - e³¹∧(e⁴⁶ + e⁷⁵) - e¹²∧(e⁴⁷ + e⁵⁶)`.
pub fn psi() -> Form {
    form(7, 4, &[(&[4, 5, 6, 7], 1)])
        .sub(&wedge(&two(7, &[[2, 3]]), &two(7, &[[4, 5], [6, 7]])))
        .and_then(|f| f.sub(&wedge(&two(7, &[[3, 1]]), &two(7, &[[4, 6], [7, 5]]))))
        .and_then(|f| f.sub(&wedge(&two(7, &[[1, 2]]), &two(7, &[[4, 7], [5, 6]]))))
        .expect("same shape")
}

/// The Cayley 4-form on `R⁸` written out term by term, with `x⁰, …, x⁷`
/// stored as indices `1, …, 8`.
pub fn cayley_form() -> Form {
    let s = |i: usize| i + 1;
    let pair = |a: usize, b: usize, c: usize, d: usize| two(8, &[[s(a), s(b)], [s(c), s(d)]]);
    form(8, 4, &[(&[s(0), s(1), s(2), s(3)], 1), (&[s(4), s(5), s(6), s(7)], 1)])
        .sub(&wedge(&pair(0, 1, 2, 3), &pair(4, 5, 6, 7)))
        .and_then(|f| f.sub(&wedge(&pair(0, 2, 3, 1), &pair(4, 6, 7, 5))))
        .and_then(|f| f.sub(&wedge(&pair(0, 3, 1, 2), &pair(4, 7, 5, 6))))
        .expect("same shape")
}

/// `ω = Σ_j e^{2j-1}∧e^{2j}` on `R^{2m}` (interleaved coordinates).
pub fn kahler_omega(m: usize) -> Result<Form> {
    Form::from_terms(2 * m, 2, (1..=m).map(|j| (vec![2 * j - 1, 2 * j], int(1))))
}

/// `ω = Σ_j e^j∧e^{m+j}` on `R^{2m}` (block coordinates).
pub fn slag_omega(m: usize) -> Result<Form> {
    Form::from_terms(2 * m, 2, (1..=m).map(|j| (vec![j, m + j], int(1))))
}

/// Real and imaginary parts of `Υ = (e¹ + i e^{m+1})∧…∧(e^m + i e^{2m})`
/// in block coordinates.
pub fn upsilon(m: usize) -> Result<(Form, Form)> {
    let mut re = Vec::new();
    let mut im = Vec::new();
    for mask in 0u32..(1 << m) {
        // Slot j takes dy^j when bit j is set, contributing a factor i.
        let index: Vec<usize> = (0..m)
            .map(|j| if mask & (1 << j) != 0 { m + j + 1 } else { j + 1 })
            .collect();
        match mask.count_ones() % 4 {
            0 => re.push((index, int(1))),
            1 => im.push((index, int(1))),
            2 => re.push((index, int(-1))),
            _ => im.push((index, int(-1))),
        }
    }
    Ok((Form::from_terms(2 * m, m, re)?, Form::from_terms(2 * m, m, im)?))
}

/// `π*(e¹²³ + e⁴⁵⁶)` on `R⁷`, where `π` forgets the last coordinate.
pub fn double_point_form() -> Form {
    form(7, 3, &[(&[1, 2, 3], 1), (&[4, 5, 6], 1)])
}
