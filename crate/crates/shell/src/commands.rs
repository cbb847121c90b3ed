//! Dispatch of named commands over JSON payloads.

use braidseed::clusterengine::{ClassicalState, QuantumState};
use braidseed::flagnum::{braid_points, dim_fit, twisted_points, DEFAULT_BUDGET};
use braidseed::lusztig::{
    applicable_moves, find_move_path, staircase_failures, track_construction, transport, verify_vanishing, ParamVector,
    MOVE_SEARCH_LIMIT,
};
use braidseed::rootdata::WeylElement;
use braidseed::seedcore::{construct_seed, ConstructionTrace, Seed};
use braidseed::words::{leftmost_for_element, leftmost_subexpression, Subexpression, Word};
use braidseed::Error;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::ApiError;
use crate::spec::{parse_word_spec, second_word, to_letters, word_spec_from_fields, NumList, WordSpec};

pub const COMMANDS: [&str; 10] =
    ["demazure", "leftmost", "seed", "construct", "mutate", "track", "verify", "count", "moves", "transport"];

/// Longest mutation sequence accepted.
pub const MAX_MUTATIONS: usize = 10_000;

/// Longest mutation sequence for which cluster variables are computed.
pub const MAX_VARIABLE_STEPS: usize = 16;

/// Primes at which counts are sampled for the dimension fit.
pub const FIT_PRIMES: [u64; 4] = [2, 3, 5, 7];

/// Process-wide settings resolved once at startup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Config {
    /// Tuple budget used when a payload does not set one.
    pub budget: u128,
}

impl Default for Config {
    fn default() -> Self {
        Config { budget: DEFAULT_BUDGET }
    }
}

impl Config {
    /// Reads `BRAIDSEED_BUDGET`, falling back to the library default.
    pub fn from_env() -> Result<Self, ApiError> {
        match std::env::var("BRAIDSEED_BUDGET") {
            Err(_) => Ok(Config::default()),
            Ok(text) => text.trim().parse().map(|budget| Config { budget }).map_err(|_| {
                ApiError::bad_request(
                    "invalid_budget",
                    format!("BRAIDSEED_BUDGET={text:?} is not a non-negative integer"),
                    json!({ "variable": "BRAIDSEED_BUDGET" }),
                )
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `v` is a fixed reduced word matched greedily.
    #[default]
    Pattern,
    /// `v` names an element; the smallest spelling over all its reduced words is used.
    Element,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variables {
    None,
    Classical,
    Quantum,
}

/// Request payload. Every command reads the fields it needs and rejects unknown ones.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    pub spec: Option<String>,
    pub series: Option<String>,
    pub rank: Option<usize>,
    pub word: Option<NumList>,
    pub v: Option<NumList>,
    pub mode: Option<Mode>,
    pub k: Option<NumList>,
    pub variables: Option<Variables>,
    pub q: Option<u64>,
    pub budget: Option<u64>,
    pub word2: Option<NumList>,
    pub a: Option<NumList>,
}

/// Successful response. Fields are declared in key order so the body matches its own
/// re-serialization as a JSON map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Envelope {
    pub command: String,
    pub diagnostics: Vec<String>,
    pub output: Value,
}

impl Envelope {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("envelopes always serialize")
    }
}

struct Ctx<'a> {
    command: &'a str,
    payload: &'a Payload,
    config: Config,
    diagnostics: Vec<String>,
}

fn value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("library types serialize to JSON")
}

fn one_based(v: &[usize]) -> Vec<usize> {
    v.iter().map(|x| x + 1).collect()
}

impl Ctx<'_> {
    fn spec(&self) -> Result<WordSpec, ApiError> {
        let p = self.payload;
        if p.spec.is_some() && (p.series.is_some() || p.rank.is_some() || p.word.is_some()) {
            return Err(ApiError::bad_request(
                "conflicting_fields",
                "give either \"spec\" or \"series\"/\"rank\"/\"word\", not both".into(),
                json!({ "fields": ["spec", "series", "rank", "word"] }),
            ));
        }
        match (&p.spec, &p.word) {
            (Some(text), _) => {
                let mut spec = parse_word_spec(text)?;
                if let Some(v) = &p.v {
                    if spec.v_word.is_some() {
                        return Err(ApiError::bad_request(
                            "conflicting_fields",
                            "v is given both inside \"spec\" and as a field".into(),
                            json!({ "fields": ["spec", "v"] }),
                        ));
                    }
                    let letters = to_letters(v.values("v")?);
                    spec.dynkin.check_word(&letters).map_err(|e| ApiError::from(e).with_field("v"))?;
                    spec.v_word = Some(letters);
                }
                Ok(spec)
            }
            (None, Some(word)) => {
                let series = p.series.as_deref().ok_or_else(|| ApiError::missing("series", self.command))?;
                let rank = p.rank.ok_or_else(|| ApiError::missing("rank", self.command))?;
                word_spec_from_fields(series, rank, word, p.v.as_ref())
            }
            (None, None) => Err(ApiError::missing("word", self.command)),
        }
    }

    fn subexpression(&self, spec: &WordSpec) -> Result<Subexpression, ApiError> {
        let v_word = spec.v_word.as_ref().ok_or_else(|| ApiError::missing("v", self.command))?;
        let sub = match self.payload.mode.unwrap_or_default() {
            Mode::Pattern => leftmost_subexpression(&spec.word, v_word),
            Mode::Element => WeylElement::from_word(&spec.dynkin, v_word).and_then(|v| leftmost_for_element(&spec.word, &v)),
        };
        sub.map_err(|e| ApiError::from(e).with_field("v"))
    }

    fn budget(&self) -> u128 {
        self.payload.budget.map_or(self.config.budget, u128::from)
    }

    fn note(&mut self, line: String) {
        self.diagnostics.push(line);
    }
}

/// Runs `command` on a parsed payload.
pub fn run(command: &str, payload: &Payload, config: Config) -> Result<Envelope, ApiError> {
    let mut ctx = Ctx { command, payload, config, diagnostics: Vec::new() };
    let output = match command {
        "demazure" => demazure(&mut ctx),
        "leftmost" => leftmost(&mut ctx),
        "seed" => seed(&mut ctx),
        "construct" => construct(&mut ctx),
        "mutate" => mutate(&mut ctx),
        "track" => track(&mut ctx),
        "verify" => verify(&mut ctx),
        "count" => count(&mut ctx),
        "moves" => moves(&mut ctx),
        "transport" => transport_command(&mut ctx),
        other => Err(ApiError::new(
            404,
            "unknown_command",
            format!("unknown command {other:?}"),
            json!({ "command": other, "known": COMMANDS }),
        )),
    }?;
    Ok(Envelope { command: command.to_string(), output, diagnostics: ctx.diagnostics })
}

/// Parses a raw JSON body and runs `command` on it. An empty body is an empty payload.
pub fn run_json(command: &str, body: &str, config: Config) -> Result<Envelope, ApiError> {
    if !COMMANDS.contains(&command) {
        return run(command, &Payload::default(), config);
    }
    let payload: Payload = if body.trim().is_empty() {
        Payload::default()
    } else {
        serde_json::from_str(body).map_err(|e| {
            ApiError::bad_request("invalid_json", e.to_string(), json!({ "line": e.line(), "column": e.column() }))
        })?
    };
    run(command, &payload, config)
}

fn demazure(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let (delta, reduced_word) = spec.word.demazure();
    let mut out = json!({
        "word": spec.word.letters(),
        "demazure": reduced_word,
        "length": delta.length(),
        "reduced": delta.length() == spec.word.len(),
    });
    if let Some(v_word) = &spec.v_word {
        let v = WeylElement::from_word(&spec.dynkin, v_word)?;
        out["v_below_demazure"] = json!(v.bruhat_leq(&delta));
    }
    Ok(out)
}

fn leftmost(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let sub = ctx.subexpression(&spec)?;
    let word = &spec.word;
    let labels = (0..word.len()).map(|k| word.occurrence(k)).collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<(String, usize)> = labels.into_iter().map(|(c, n)| (c.to_string(), n)).collect();
    let plus: Vec<Option<usize>> = (0..word.len()).map(|k| word.next_same(k).map(|p| p + 1)).collect();
    let minus: Vec<Option<usize>> = (0..word.len()).map(|k| word.prev_same(k).map(|p| p + 1)).collect();
    Ok(json!({
        "mode": ctx.payload.mode.unwrap_or_default(),
        "subexpression": sub,
        "labels": labels,
        "next_same": plus,
        "prev_same": minus,
    }))
}

fn seed_json(seed: &Seed, ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let failures = seed.check_compatible()?;
    if !failures.is_empty() {
        ctx.note(format!("compatibility fails at entries {:?}", failures.iter().map(|&(i, j)| (i + 1, j + 1)).collect::<Vec<_>>()));
    }
    let arrows: Vec<(usize, usize)> = seed.arrows().into_iter().map(|(i, j)| (i + 1, j + 1)).collect();
    Ok(json!({
        "seed": seed,
        "arrows": arrows,
        "exchangeable": one_based(&seed.exchangeable()),
        "compatible": seed.lambda.is_some() && failures.is_empty(),
    }))
}

fn seed(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let seed = Seed::from_word(&spec.word)?;
    seed_json(&seed, ctx)
}

/// `μ̃_l = μ_a ∘ μ_b` with the first mutation rightmost, or `Id`.
pub fn stage_strings(trace: &ConstructionTrace) -> Vec<String> {
    trace
        .stages
        .iter()
        .enumerate()
        .map(|(l, stage)| {
            let factors: Vec<String> = stage.mutations.iter().rev().map(|p| format!("μ_{}", p + 1)).collect();
            let body = if factors.is_empty() { "Id".to_string() } else { factors.join(" ∘ ") };
            format!("μ̃_{} = {body}", l + 1)
        })
        .collect()
}

fn construct(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let sub = ctx.subexpression(&spec)?;
    let (seed, trace) = construct_seed(&spec.word, &sub)?;
    let mut out = seed_json(&seed, ctx)?;
    out["trace"] = value(&trace);
    out["stages"] = json!(stage_strings(&trace));
    out["vertices"] = json!(seed.labels.iter().map(|l| l.position + 1).collect::<Vec<_>>());
    Ok(out)
}

/// Maps 0-based vertex indices in core errors back to the 1-based external numbering.
fn external_vertex(e: Error) -> Error {
    match e {
        Error::FrozenVertex(k) => Error::FrozenVertex(k + 1),
        Error::IndexOutOfRange { what: "vertex", index, limit } => Error::IndexOutOfRange { what: "vertex", index: index + 1, limit },
        other => other,
    }
}

fn mutate(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let mut seed = match spec.v_word {
        Some(_) => construct_seed(&spec.word, &ctx.subexpression(&spec)?)?.0,
        None => Seed::from_word(&spec.word)?,
    };
    let sequence = ctx.payload.k.as_ref().ok_or_else(|| ApiError::missing("k", ctx.command))?.values("k")?;
    let zero_based: Vec<usize> = sequence
        .iter()
        .map(|&k| match usize::try_from(k) {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(ApiError::from(Error::IndexOutOfRange { what: "vertex", index: k as usize, limit: seed.len() }).with_field("k")),
        })
        .collect::<Result<_, _>>()?;
    let variables = ctx.payload.variables.unwrap_or(Variables::None);
    let limit = if variables == Variables::None { MAX_MUTATIONS } else { MAX_VARIABLE_STEPS };
    if zero_based.len() > limit {
        return Err(ApiError::new(
            422,
            "too_many_steps",
            format!("at most {limit} mutations are accepted{}", if variables == Variables::None { "" } else { " with cluster variables" }),
            json!({ "steps": zero_based.len(), "limit": limit }),
        ));
    }
    let step_error = |e: Error| ApiError::from(external_vertex(e)).with_field("k");
    let cluster = match variables {
        Variables::None => {
            for &k in &zero_based {
                seed.mutate_in_place(k).map_err(step_error)?;
            }
            None
        }
        Variables::Classical => {
            let mut state = ClassicalState::initial(seed);
            for &k in &zero_based {
                state = state.mutate(k).map_err(step_error)?;
            }
            seed = state.seed;
            Some(value(&state.variables))
        }
        Variables::Quantum => {
            let mut state = QuantumState::initial(seed)?;
            for &k in &zero_based {
                state = state.mutate(k).map_err(step_error)?;
            }
            let bad = state.variables.iter().filter(|x| !x.is_bar_invariant()).count();
            if bad > 0 {
                return Err(ApiError::from(Error::Invariant(format!("{bad} quantum cluster variables are not bar-invariant"))));
            }
            seed = state.seed;
            Some(value(&state.variables))
        }
    };
    let mut out = seed_json(&seed, ctx)?;
    out["sequence"] = json!(sequence);
    if let Some(cluster) = cluster {
        out["variables"] = cluster;
    }
    Ok(out)
}

fn track(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let sub = ctx.subexpression(&spec)?;
    let table = track_construction(&spec.word, &sub)?;
    let failures = staircase_failures(&spec.word, &sub, &table)?;
    let mut out = value(&table);
    out["staircase_failures"] = json!(failures.iter().map(|&(l, p)| (l, p + 1)).collect::<Vec<_>>());
    Ok(out)
}

fn verify(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let sub = ctx.subexpression(&spec)?;
    let report = verify_vanishing(&spec.word, &sub);
    let [confirmed, equal, incomparable, reversed] = report.dominance;
    ctx.note(format!(
        "dominance of the tracked exchange term: {confirmed} confirmed, {equal} equal, {incomparable} incomparable, {reversed} reversed"
    ));
    Ok(value(&report))
}

fn count(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let q = ctx.payload.q.ok_or_else(|| ApiError::missing("q", ctx.command))?;
    let budget = ctx.budget();
    let v = spec.v_word.as_ref().map(|w| WeylElement::from_word(&spec.dynkin, w)).transpose()?;
    let count_at = |q: u64| -> Result<u64, Error> {
        Ok(match &v {
            Some(v) => twisted_points(&spec.word, v, q, budget)?.count,
            None => braid_points(&spec.word, q, budget)?.count,
        })
    };
    let count = count_at(q)?;
    let r = spec.word.len() as u32;
    let largest = u128::from(FIT_PRIMES[FIT_PRIMES.len() - 1]).checked_pow(r);
    let fit = if largest.is_some_and(|n| n <= budget) {
        let samples = FIT_PRIMES
            .iter()
            .map(|&p| if p == q { Ok((p, count)) } else { count_at(p).map(|c| (p, c)) })
            .collect::<Result<Vec<_>, _>>()?;
        let expected = match &v {
            Some(v) => spec.word.len() as i64 - v.length() as i64,
            None => spec.word.len() as i64 - spec.word.demazure().0.length() as i64,
        };
        ctx.note(format!("expected dimension {expected}"));
        value(&dim_fit(&samples))
    } else {
        ctx.note(format!("dim_fit skipped: sampling q = 7 needs 7^{r} tuples, budget is {budget}"));
        Value::Null
    };
    Ok(json!({ "q": q, "count": count, "dim_fit": fit }))
}

fn moves(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let applicable = applicable_moves(&spec.dynkin, spec.word.letters());
    let path = match &ctx.payload.word2 {
        Some(letters) => {
            let target = second_word(&spec.dynkin, letters, "word2")?;
            value(&find_move_path(&spec.word, &target, MOVE_SEARCH_LIMIT)?)
        }
        None => Value::Null,
    };
    Ok(json!({ "word": spec.word.letters(), "applicable": value(&applicable), "path": path }))
}

fn transport_command(ctx: &mut Ctx<'_>) -> Result<Value, ApiError> {
    let spec = ctx.spec()?;
    let target: Word = second_word(
        &spec.dynkin,
        ctx.payload.word2.as_ref().ok_or_else(|| ApiError::missing("word2", ctx.command))?,
        "word2",
    )?;
    let a = ParamVector(ctx.payload.a.as_ref().ok_or_else(|| ApiError::missing("a", ctx.command))?.values("a")?);
    let result = transport(&spec.word, &target, &a)?;
    Ok(json!({ "from": spec.word.letters(), "to": target.letters(), "a": a, "result": result }))
}
