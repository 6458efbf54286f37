//! Surface syntax for elements and sets.
//!
//! An element expression is a whitespace-separated product of tokens
//! `a`, `b`, `z`, `1`, each with an optional signed integer exponent after
//! `^` (e.g. `"a^3 b"`, `"a^-1 b^2"`, `"z a"`). A set is `;`-separated
//! element expressions inside one argument: `"b ; a"`.

use crate::error::{Error, Result};
use crate::group::{Element, Group};

fn base_element(g: &Group, token: &str, position: usize) -> Result<Element> {
    match token {
        "a" => Ok(g.gen_a()),
        "b" => Ok(g.gen_b()),
        "1" => Ok(g.identity()),
        "z" => g.central_z().ok_or_else(|| Error::TokenNotInFamily {
            token: position,
            message: format!(
                "z denotes the central a-power of a modular group, not defined for {}",
                g.spec().family
            ),
        }),
        other => Err(Error::SyntaxError {
            token: position,
            message: format!("unknown generator {other:?}; expected a, b, z or 1"),
        }),
    }
}

/// Evaluates an element expression left-to-right in `g`.
pub fn parse_element(text: &str, g: &Group) -> Result<Element> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    if tokens.is_empty() {
        return Err(Error::SyntaxError {
            token: 1,
            message: "empty element expression".to_string(),
        });
    }
    let mut acc = g.identity();
    for (k, token) in tokens.iter().enumerate() {
        let position = k + 1;
        let (base, exp) = match token.split_once('^') {
            None => (*token, 1i64),
            Some((base, exp_text)) => {
                let exp = exp_text.parse::<i64>().map_err(|_| Error::SyntaxError {
                    token: position,
                    message: format!("invalid exponent {exp_text:?}"),
                })?;
                (base, exp)
            }
        };
        let e = base_element(g, base, position)?;
        acc = g.multiply(acc, g.power(e, exp));
    }
    Ok(acc)
}

/// Parses a `;`-separated list of element expressions.
pub fn parse_set(text: &str, g: &Group) -> Result<Vec<Element>> {
    text.split(';').map(|part| parse_element(part, g)).collect()
}
