//! Text form of elements of U^-: sums of terms like `2*f1*f2`, `(q - q^-1)*f2*f1`, `-f1`.
//! An argument starting with `@` names a JSON element file.

use qcell_core::{NCElement, Scalar};

pub fn parse_element(s: &str, rank: usize) -> Result<NCElement, String> {
    if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))?;
        return NCElement::from_json(&v, rank).map_err(|e| e.to_string());
    }
    let mut x = NCElement::zero();
    for (negative, term) in split_terms(s)? {
        let (word, mut coeff) = parse_term(term, rank)?;
        if negative {
            coeff = -coeff;
        }
        x = &x + &NCElement::monomial(word, coeff);
    }
    Ok(x)
}

/// Splits at `+` and `-` outside parentheses.
fn split_terms(s: &str) -> Result<Vec<(bool, &str)>, String> {
    let mut out = Vec::new();
    let (mut depth, mut start, mut negative) = (0i32, 0, false);
    for (k, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev = s[start..k].trim();
                // a sign right after `^` belongs to an exponent
                if !s[..k].trim_end().ends_with('^') {
                    if !prev.is_empty() {
                        out.push((negative, prev));
                    } else if !out.is_empty() || start != 0 {
                        return Err(format!("dangling operator in {s:?}"));
                    }
                    negative = ch == '-';
                    start = k + 1;
                }
            }
            _ => {}
        }
        if depth < 0 {
            return Err(format!("unbalanced parentheses in {s:?}"));
        }
    }
    if depth != 0 {
        return Err(format!("unbalanced parentheses in {s:?}"));
    }
    let last = s[start..].trim();
    if last.is_empty() {
        return Err(format!("empty term in {s:?}"));
    }
    out.push((negative, last));
    Ok(out)
}

fn parse_term(term: &str, rank: usize) -> Result<(Vec<u8>, Scalar), String> {
    let mut word = Vec::new();
    let mut coeff = Scalar::one();
    let mut depth = 0;
    let mut start = 0;
    let mut factors = Vec::new();
    for (k, ch) in term.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '*' if depth == 0 => {
                factors.push(&term[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    factors.push(&term[start..]);
    for f in factors {
        let f = f.trim();
        if let Some(i) = f.strip_prefix('f').and_then(|d| d.parse::<usize>().ok()) {
            if i == 0 || i > rank {
                return Err(format!("generator {f} out of range for rank {rank}"));
            }
            word.push((i - 1) as u8);
        } else {
            let inner = f.strip_prefix('(').and_then(|g| g.strip_suffix(')')).unwrap_or(f);
            let c = Scalar::parse(inner).map_err(|e| format!("{f:?}: {e}"))?;
            coeff = &coeff * &c;
        }
    }
    Ok((word, coeff))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sums_and_coefficients() {
        let x = parse_element("f1*f2 - (q)*f2*f1 + 2", 2).unwrap();
        let want = &(&NCElement::word(vec![0, 1]) + &NCElement::monomial(vec![1, 0], -Scalar::q_pow(1)))
            + &NCElement::monomial(vec![], Scalar::from_int(2));
        assert_eq!(x, want);
    }

    #[test]
    fn display_form_round_trips() {
        let x = &NCElement::monomial(vec![0, 1], Scalar::parse("(1 - q^2)/(q)").unwrap()) + &NCElement::word(vec![1]);
        assert_eq!(parse_element(&x.to_string(), 2).unwrap(), x);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_element("f3", 2).is_err());
        assert!(parse_element("f1 +", 2).is_err());
        assert!(parse_element("(f1", 2).is_err());
    }
}
