//! Text and JSON forms of a word specification such as `A3:3,2,1,2,3,1,3,2 / v=3,2,3,1,2`.

use std::sync::Arc;

use braidseed::rootdata::{DynkinData, Series};
use braidseed::words::Word;
use serde::Deserialize;
use serde_json::json;

use crate::error::ApiError;

/// Largest rank accepted from external input.
pub const MAX_RANK: usize = 12;
/// Longest word accepted from external input.
pub const MAX_WORD_LEN: usize = 128;

/// A list of non-negative integers given either as a JSON array, a single number, or text
/// like `"3,2,1"`, `"(3 2 1)"` or `"e"` for the empty list.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum NumList {
    List(Vec<u64>),
    Single(u64),
    Text(String),
}

impl NumList {
    pub fn values(&self, field: &str) -> Result<Vec<u64>, ApiError> {
        match self {
            NumList::List(v) => Ok(v.clone()),
            NumList::Single(x) => Ok(vec![*x]),
            NumList::Text(t) => parse_list(t, 0).map_err(|e| e.with_field(field)),
        }
    }
}

#[derive(Debug, Clone)]
pub struct WordSpec {
    pub dynkin: Arc<DynkinData>,
    pub word: Word,
    pub v_word: Option<Vec<usize>>,
}

/// Parses a comma or whitespace separated list, optionally wrapped in parentheses or
/// brackets. `offset` is the byte offset of `text` in the original input, so errors can
/// report a 1-based column.
fn parse_list(text: &str, offset: usize) -> Result<Vec<u64>, ApiError> {
    let trimmed = text.trim();
    let lead = offset + (text.len() - text.trim_start().len());
    let (body, lead) = match (trimmed.chars().next(), trimmed.chars().last()) {
        (Some('('), Some(')')) | (Some('['), Some(']')) => (&trimmed[1..trimmed.len() - 1], lead + 1),
        _ => (trimmed, lead),
    };
    if body.trim().is_empty() || body.trim() == "e" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut start = None;
    let bytes: Vec<(usize, char)> = body.char_indices().chain(std::iter::once((body.len(), ','))).collect();
    let mut separated = true;
    for &(i, c) in &bytes {
        if c == ',' || c.is_whitespace() {
            if let Some(s) = start.take() {
                let token = &body[s..i];
                let value = token.parse::<u64>().map_err(|_| parse_error(format!("expected a number, found {token:?}"), lead + s))?;
                out.push(value);
                separated = false;
            }
            if c == ',' && i < body.len() {
                if separated {
                    return Err(parse_error("empty entry in list".into(), lead + i));
                }
                separated = true;
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if separated {
        return Err(parse_error("list ends with a separator".into(), lead + body.len()));
    }
    Ok(out)
}

fn parse_error(message: String, byte_offset: usize) -> ApiError {
    ApiError::bad_request("parse_error", message, json!({ "column": byte_offset + 1 }))
}

fn dynkin(series: &str, rank: usize) -> Result<Arc<DynkinData>, ApiError> {
    if rank > MAX_RANK {
        return Err(ApiError::bad_request(
            "rank_too_large",
            format!("rank {rank} exceeds the limit {MAX_RANK}"),
            json!({ "rank": rank, "limit": MAX_RANK }),
        ));
    }
    let series: Series = series.parse().map_err(ApiError::from)?;
    DynkinData::new(series, rank).map_err(ApiError::from)
}

pub(crate) fn to_letters(values: Vec<u64>) -> Vec<usize> {
    values.into_iter().map(|x| usize::try_from(x).unwrap_or(usize::MAX)).collect()
}

fn make_word(dynkin: &Arc<DynkinData>, letters: Vec<usize>, field: &str) -> Result<Word, ApiError> {
    if letters.len() > MAX_WORD_LEN {
        return Err(ApiError::bad_request(
            "word_too_long",
            format!("{field} has {} letters, the limit is {MAX_WORD_LEN}", letters.len()),
            json!({ "field": field, "length": letters.len(), "limit": MAX_WORD_LEN }),
        ));
    }
    Word::new(dynkin, letters).map_err(|e| ApiError::from(e).with_field(field))
}

/// Parses `<series><rank>:<letters>[ / v=<letters>]`; letters are 1-based colors.
pub fn parse_word_spec(text: &str) -> Result<WordSpec, ApiError> {
    let (head, tail) = match text.find('/') {
        Some(i) => (&text[..i], Some((&text[i + 1..], i + 1))),
        None => (text, None),
    };
    let colon = head.find(':').ok_or_else(|| parse_error("expected ':' after the Dynkin type".into(), head.len()))?;
    let type_text = head[..colon].trim();
    let type_start = head.len() - head.trim_start().len();
    let split = type_text.find(|c: char| c.is_ascii_digit()).ok_or_else(|| parse_error("expected a rank after the series".into(), type_start + type_text.len()))?;
    let rank: usize = type_text[split..]
        .parse()
        .map_err(|_| parse_error(format!("invalid rank {:?}", &type_text[split..]), type_start + split))?;
    let dynkin = dynkin(&type_text[..split], rank)?;
    let letters = to_letters(parse_list(&head[colon + 1..], colon + 1)?);
    let word = make_word(&dynkin, letters, "word")?;
    let v_word = match tail {
        None => None,
        Some((rest, offset)) => {
            let lead = rest.len() - rest.trim_start().len();
            let body = rest.trim_start().strip_prefix("v=").ok_or_else(|| parse_error("expected 'v=' after '/'".into(), offset + lead))?;
            let letters = to_letters(parse_list(body, offset + lead + 2)?);
            dynkin.check_word(&letters).map_err(|e| ApiError::from(e).with_field("v"))?;
            Some(letters)
        }
    };
    Ok(WordSpec { dynkin, word, v_word })
}

/// Builds a spec from separate JSON fields.
pub fn word_spec_from_fields(series: &str, rank: usize, word: &NumList, v: Option<&NumList>) -> Result<WordSpec, ApiError> {
    let dynkin = dynkin(series, rank)?;
    let word = make_word(&dynkin, to_letters(word.values("word")?), "word")?;
    let v_word = match v {
        None => None,
        Some(v) => {
            let letters = to_letters(v.values("v")?);
            dynkin.check_word(&letters).map_err(|e| ApiError::from(e).with_field("v"))?;
            Some(letters)
        }
    };
    Ok(WordSpec { dynkin, word, v_word })
}

/// A second word of the same type, as used by `moves` and `transport`.
pub fn second_word(dynkin: &Arc<DynkinData>, letters: &NumList, field: &str) -> Result<Word, ApiError> {
    make_word(dynkin, to_letters(letters.values(field)?), field)
}
