//! Tokenizers shared by gazetteer detection and vocabulary building.
//!
//! Two deliberately different token definitions are used:
//!
//! * *detection tokens* are maximal runs of Unicode alphabetic characters
//!   with case preserved. Gazetteer matching is case-sensitive and operates
//!   on whole tokens, so "Ewe" the language does not match "ewe" the noun.
//! * *vocab tokens* are maximal runs of alphanumeric characters, lowercased.
//!   These feed the embedding vocabulary, where case carries little signal
//!   and digit-bearing tokens ("bert2", "mt5") are worth keeping.

/// Splits `text` into maximal runs of alphabetic characters, preserving case.
pub fn detection_tokens(text: &str) -> Vec<&str> {
    split_runs(text, |c| c.is_alphabetic())
}

/// Splits `text` into maximal alphanumeric runs and lowercases each.
pub fn vocab_tokens(text: &str) -> Vec<String> {
    split_runs(text, |c| c.is_alphanumeric())
        .into_iter()
        .map(|t| t.to_lowercase())
        .collect()
}

fn split_runs(text: &str, keep: impl Fn(char) -> bool) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in text.char_indices() {
        if keep(c) {
            if start.is_none() {
                start = Some(i);
            }
        } else if let Some(s) = start.take() {
            out.push(&text[s..i]);
        }
    }
    if let Some(s) = start {
        out.push(&text[s..]);
    }
    out
}
