//! Loop paths such as `0,1,2` or `~0,~1`.

use std::fmt;

use linkloop::linkspace::{LoopSpec, LoopStep};

/// Parse failure with the 0-based character offset it refers to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at character {}: {}", self.offset, self.message)
    }
}

impl std::error::Error for ParseError {}

fn err(offset: usize, message: impl Into<String>) -> ParseError {
    ParseError {
        offset,
        message: message.into(),
    }
}

pub fn parse_path(s: &str, n_sites: usize) -> Result<LoopSpec, ParseError> {
    let mut steps: Vec<LoopStep> = Vec::new();
    let mut offsets = Vec::new();
    let mut start = 0;
    for token in s.split(',') {
        let lead = token.chars().take_while(|c| c.is_whitespace()).count();
        let body = token.trim();
        let at = start + lead;
        start += token.chars().count() + 1;

        let (flipped, digits, digits_at) = match body.strip_prefix('~') {
            Some(rest) => (true, rest, at + 1),
            None => (false, body, at),
        };
        if digits.is_empty() {
            return Err(err(digits_at, "expected a site number"));
        }
        if let Some((i, c)) = digits.chars().enumerate().find(|(_, c)| !c.is_ascii_digit()) {
            return Err(err(digits_at + i, format!("unexpected character '{c}'")));
        }
        let site: usize = digits.parse().map_err(|_| err(digits_at, "site number too large"))?;
        if site >= n_sites {
            return Err(err(digits_at, format!("site {site} out of range for a {n_sites}-site state")));
        }
        if steps.last().is_some_and(|p| p.site == site) {
            return Err(err(at, format!("site {site} repeats the previous site")));
        }
        steps.push(LoopStep::new(site, flipped));
        offsets.push(at);
    }
    if steps.len() < 2 {
        return Err(err(0, "a loop needs at least two sites"));
    }
    if steps[0].site == steps[steps.len() - 1].site {
        return Err(err(
            offsets[offsets.len() - 1],
            "last site equals the first, the closing link would be a self-link",
        ));
    }
    LoopSpec::new(steps).map_err(|e| err(0, e.to_string()))
}
