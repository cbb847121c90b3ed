use std::collections::BTreeSet;
use std::process::Command;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use braidseed_shell::server::{respond, router};
use braidseed_shell::{parse_word_spec, Config, COMMANDS};
use http_body_util::BodyExt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

const EXAMPLE: &str = "A3:3,2,1,2,3,1,3,2 / v=3,2,3,1,2";

async fn post(path: &str, body: &str) -> (StatusCode, String) {
    let request = Request::post(path).header("content-type", "application/json").body(Body::from(body.to_string())).unwrap();
    let response = router(Config::default()).oneshot(request).await.unwrap();
    let status = response.status();
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    (status, String::from_utf8(bytes.to_vec()).unwrap())
}

fn parse(body: &str) -> Value {
    serde_json::from_str(body).unwrap_or_else(|e| panic!("not JSON ({e}): {body}"))
}

#[test]
fn word_specs() {
    let spec = parse_word_spec(EXAMPLE).unwrap();
    assert_eq!(spec.word.letters(), &[3, 2, 1, 2, 3, 1, 3, 2]);
    assert_eq!(spec.v_word, Some(vec![3, 2, 3, 1, 2]));
    assert_eq!(spec.dynkin.rank(), 3);

    let trivial = parse_word_spec("A1:1").unwrap();
    assert_eq!(trivial.word.letters(), &[1]);
    assert_eq!(trivial.v_word, None);

    let err = parse_word_spec("A3:9,1").unwrap_err();
    assert_eq!(err.status, 400);
    assert_eq!(err.code, "letter_out_of_range");
    assert_eq!(err.context["letter"], 9);
    assert_eq!(err.context["position"], 1);

    let err = parse_word_spec("A3:1,2 / w=1").unwrap_err();
    assert_eq!(err.code, "parse_error");
    assert_eq!(err.context["column"], 10);
    assert_eq!(parse_word_spec("A3 1,2").unwrap_err().code, "parse_error");
    assert_eq!(parse_word_spec("B3:1").unwrap_err().code, "unsupported_type");
    assert_eq!(parse_word_spec("A99:1").unwrap_err().code, "rank_too_large");
}

#[tokio::test]
async fn health() {
    let request = Request::get("/api/health").body(Body::empty()).unwrap();
    let response = router(Config::default()).oneshot(request).await.unwrap();
    assert_eq!(response.status(), StatusCode::OK);
    let bytes = response.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(parse(std::str::from_utf8(&bytes).unwrap()), json!({ "status": "ok" }));
}

#[tokio::test]
async fn seed_has_the_example_arrows() {
    let (status, body) = post("/api/seed", &json!({ "spec": "A3:3,2,1,2,3,1,3,2" }).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let out = parse(&body);
    let arrows: BTreeSet<(u64, u64)> = out["output"]["arrows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a[0].as_u64().unwrap(), a[1].as_u64().unwrap()))
        .collect();
    let expected: BTreeSet<(u64, u64)> =
        [(1, 5), (5, 7), (2, 4), (4, 8), (3, 6), (3, 2), (4, 3), (6, 4), (4, 1), (7, 4)].into_iter().collect();
    assert_eq!(arrows, expected);
    assert_eq!(out["output"]["arrows"].as_array().unwrap().len(), 10);
    assert_eq!(out["output"]["compatible"], true);
    assert_eq!(out["command"], "seed");
}

#[tokio::test]
async fn construct_reports_the_stage_factors() {
    let (status, body) = post("/api/construct", &json!({ "spec": EXAMPLE }).to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let out = parse(&body)["output"].clone();
    assert_eq!(out["stages"], json!(["μ̃_1 = μ_5 ∘ μ_1", "μ̃_2 = μ_4 ∘ μ_2", "μ̃_3 = μ_1", "μ̃_4 = Id", "μ̃_5 = Id"]));
    assert_eq!(out["vertices"], json!([1, 2, 3]));
    assert_eq!(out["trace"]["stages"][4]["frozen_after"], json!([4, 5, 6, 7, 8]));
}

#[tokio::test]
async fn leftmost_and_verify_on_the_example() {
    let (_, body) = post("/api/leftmost", &json!({ "spec": EXAMPLE }).to_string()).await;
    let out = parse(&body)["output"].clone();
    assert_eq!(out["subexpression"]["positions"], json!([1, 2, 5, 6, 8]));
    assert_eq!(out["subexpression"]["a"], json!([1, 1, 2, 1, 2]));
    assert_eq!(out["subexpression"]["b"], json!([0, 0, 0, 1, 1]));
    assert_eq!(out["labels"][7], json!(["2", 3]));
    assert_eq!(out["next_same"][4], 7);
    assert_eq!(out["prev_same"][4], 1);

    let (status, body) = post("/api/verify", &json!({ "spec": EXAMPLE }).to_string()).await;
    assert_eq!(status, StatusCode::OK);
    let out = parse(&body)["output"].clone();
    assert_eq!(out["pass"], true);
    assert_eq!(out["witnesses"], json!([]));
}

#[tokio::test]
async fn counts() {
    let (_, body) = post("/api/count", &json!({ "series": "A", "rank": 1, "word": [1, 1], "q": 5 }).to_string()).await;
    assert_eq!(parse(&body)["output"], json!({ "q": 5, "count": 4, "dim_fit": 1 }));
    let (_, body) = post("/api/count", &json!({ "series": "A", "rank": 1, "word": [1], "q": 7 }).to_string()).await;
    assert_eq!(parse(&body)["output"], json!({ "q": 7, "count": 1, "dim_fit": 0 }));
    let (status, body) = post("/api/count", &json!({ "spec": "A1:1,1", "q": 4 }).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(parse(&body)["code"], "domain");
}

#[tokio::test]
async fn budget_precedence() {
    let body = json!({ "spec": "A2:1,2,1", "q": 3, "budget": 5 }).to_string();
    let (status, text) = post("/api/count", &body).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(parse(&text)["code"], "budget_exceeded");
    assert_eq!(parse(&text)["context"]["budget"], 5);

    let tight = Config { budget: 5 };
    let (status, text) = respond("count", &json!({ "spec": "A2:1,2,1", "q": 3 }).to_string(), tight);
    assert_eq!((status, parse(&text)["code"].clone()), (422, json!("budget_exceeded")));
    let (status, _) = respond("count", &json!({ "spec": "A2:1,2,1", "q": 3, "budget": 1000 }).to_string(), tight);
    assert_eq!(status, 200);

    // Sampling q = 7 needs 343 tuples, so the fit is skipped but the count is not.
    let (status, text) = respond("count", &json!({ "spec": "A2:1,2,1", "q": 3, "budget": 100 }).to_string(), tight);
    assert_eq!(status, 200);
    assert_eq!(parse(&text)["output"]["dim_fit"], Value::Null);
}

#[tokio::test]
async fn mutate_at_a_frozen_vertex_is_a_domain_error() {
    let (status, body) = post("/api/mutate", &json!({ "spec": "A3:3,2,1,2,3,1,3,2", "k": [8] }).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    let err = parse(&body);
    assert_eq!(err["code"], "frozen_vertex");
    assert_eq!(err["context"]["vertex"], 8);
    assert!(err["message"].is_string());

    let (status, body) = post("/api/mutate", &json!({ "spec": "A3:3,2,1,2,3,1,3,2", "k": [0] }).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST, "{body}");
}

#[tokio::test]
async fn mutation_twice_restores_the_arrows() {
    let (_, start) = post("/api/seed", &json!({ "spec": "A3:3,2,1,2,3,1,3,2" }).to_string()).await;
    let (_, twice) = post("/api/mutate", &json!({ "spec": "A3:3,2,1,2,3,1,3,2", "k": "1,1" }).to_string()).await;
    assert_eq!(parse(&start)["output"]["arrows"], parse(&twice)["output"]["arrows"]);
    let (_, once) = post("/api/mutate", &json!({ "spec": "A3:3,2,1,2,3,1,3,2", "k": 1 }).to_string()).await;
    let arrows = parse(&once)["output"]["arrows"].clone();
    assert!(arrows.as_array().unwrap().contains(&json!([5, 1])));
    assert!(!arrows.as_array().unwrap().contains(&json!([1, 5])));
}

#[tokio::test]
async fn quantum_variables_specialize_to_classical() {
    let payload = |variables: &str| json!({ "spec": "A2:1,2,1,2,1", "k": [1, 2, 1], "variables": variables }).to_string();
    let (status, classical) = post("/api/mutate", &payload("classical")).await;
    assert_eq!(status, StatusCode::OK, "{classical}");
    let (status, quantum) = post("/api/mutate", &payload("quantum")).await;
    assert_eq!(status, StatusCode::OK, "{quantum}");
    let classical = parse(&classical)["output"]["variables"].clone();
    let quantum = parse(&quantum)["output"]["variables"].clone();
    assert_eq!(classical.as_array().unwrap().len(), 5);
    // Coefficients are positive, so setting q = 1 cannot merge or cancel terms.
    assert_eq!(classical[0].as_array().unwrap().len(), quantum[0].as_array().unwrap().len());
}

#[tokio::test]
async fn moves_and_transport() {
    let (_, body) = post("/api/moves", &json!({ "spec": "A2:1,2,1", "word2": [2, 1, 2] }).to_string()).await;
    assert_eq!(parse(&body)["output"]["path"]["moves"], json!([["three", 2]]));
    let (_, body) = post("/api/transport", &json!({ "spec": "A2:1,2,1", "word2": "2,1,2", "a": [1, 0, 2] }).to_string()).await;
    assert_eq!(parse(&body)["output"]["result"], json!([1, 1, 0]));
    let (status, body) = post("/api/moves", &json!({ "spec": "A2:1,2,1", "word2": [1, 1, 2] }).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(parse(&body)["code"], "not_equivalent");
}

#[tokio::test]
async fn structured_request_errors() {
    let (status, body) = post("/api/frobnicate", "{}").await;
    assert_eq!(status, StatusCode::NOT_FOUND);
    assert_eq!(parse(&body)["code"], "unknown_command");

    let (status, body) = post("/api/seed", "{\"spec\": ").await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["code"], "invalid_json");

    let (status, body) = post("/api/seed", &json!({ "spec": "A1:1", "colour": 3 }).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["code"], "invalid_json");

    let (status, body) = post("/api/construct", &json!({ "spec": "A1:1" }).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["context"]["field"], "v");

    let (status, body) = post("/api/seed", &json!({ "spec": "A1:1", "word": [1] }).to_string()).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert_eq!(parse(&body)["code"], "conflicting_fields");

    let (status, body) = post("/api/leftmost", &json!({ "spec": "A2:1,2 / v=2,1" }).to_string()).await;
    assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY);
    assert_eq!(parse(&body)["code"], "not_spellable");
}

#[tokio::test]
async fn responses_round_trip_through_json() {
    for command in ["demazure", "leftmost", "seed", "construct", "track", "verify"] {
        let (status, body) = post(&format!("/api/{command}"), &json!({ "spec": EXAMPLE }).to_string()).await;
        assert_eq!(status, StatusCode::OK, "{command}: {body}");
        assert_eq!(parse(&body).to_string(), body, "{command}");
    }
}

#[tokio::test]
async fn concurrent_requests_are_independent() {
    let app = router(Config::default());
    let specs: Vec<String> = (1..=12).map(|n| format!("A2:{}", vec!["1,2"; n].join(","))).collect();
    let handles: Vec<_> = specs
        .iter()
        .map(|spec| {
            let app = app.clone();
            let body = json!({ "spec": spec }).to_string();
            tokio::spawn(async move {
                let request = Request::post("/api/demazure").body(Body::from(body)).unwrap();
                let response = app.oneshot(request).await.unwrap();
                response.into_body().collect().await.unwrap().to_bytes()
            })
        })
        .collect();
    for (spec, handle) in specs.iter().zip(handles) {
        let bytes = handle.await.unwrap();
        let expected = respond("demazure", &json!({ "spec": spec }).to_string(), Config::default()).1;
        assert_eq!(std::str::from_utf8(&bytes).unwrap(), expected);
    }
}

fn cli(args: &[&str], env_budget: Option<&str>) -> (bool, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_braidseed"));
    cmd.args(args);
    match env_budget {
        Some(b) => cmd.env("BRAIDSEED_BUDGET", b),
        None => cmd.env_remove("BRAIDSEED_BUDGET"),
    };
    let out = cmd.output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let body = stdout.strip_suffix('\n').unwrap_or(&stdout).to_string();
    (out.status.success(), body)
}

#[tokio::test]
async fn cli_and_http_bodies_are_identical() {
    let cases: Vec<(Vec<&str>, Value)> = vec![
        (vec!["seed", "--spec", "A3:3,2,1,2,3,1,3,2"], json!({ "spec": "A3:3,2,1,2,3,1,3,2" })),
        (vec!["construct", "--spec", EXAMPLE], json!({ "spec": EXAMPLE })),
        (vec!["verify", "--spec", EXAMPLE], json!({ "spec": EXAMPLE })),
        (vec!["track", "--spec", EXAMPLE], json!({ "spec": EXAMPLE })),
        (
            vec!["count", "--series", "A", "--rank", "3", "--word", "3,2,1,2", "--v", "3,2", "--q", "3"],
            json!({ "series": "A", "rank": 3, "word": "3,2,1,2", "v": "3,2", "q": 3 }),
        ),
        (
            vec!["mutate", "--spec", "A2:1,2,1,2", "--k", "1,2", "--variables", "quantum"],
            json!({ "spec": "A2:1,2,1,2", "k": "1,2", "variables": "quantum" }),
        ),
        (vec!["mutate", "--spec", "A3:3,2,1,2,3,1,3,2", "--k", "8"], json!({ "spec": "A3:3,2,1,2,3,1,3,2", "k": "8" })),
        (vec!["demazure", "--spec", "A3:9,1"], json!({ "spec": "A3:9,1" })),
        (
            vec!["transport", "--spec", "A2:1,2,1", "--word2", "2,1,2", "--a", "1,0,2"],
            json!({ "spec": "A2:1,2,1", "word2": "2,1,2", "a": "1,0,2" }),
        ),
        (vec!["moves", "--payload", r#"{"spec":"A2:1,2,1"}"#], json!({ "spec": "A2:1,2,1" })),
    ];
    for (args, payload) in cases {
        let (ok, cli_body) = cli(&args, None);
        let (status, http_body) = post(&format!("/api/{}", args[0]), &payload.to_string()).await;
        assert_eq!(cli_body, http_body, "{args:?}");
        assert_eq!(ok, status == StatusCode::OK, "{args:?}");
    }
}

#[test]
fn cli_budget_flag_beats_environment() {
    let args = ["count", "--spec", "A2:1,2,1", "--q", "3"];
    let (ok, body) = cli(&args, Some("5"));
    assert!(!ok);
    assert_eq!(parse(&body)["code"], "budget_exceeded");
    let (ok, body) = cli(&[&args[..], &["--budget", "1000"]].concat(), Some("5"));
    assert!(ok, "{body}");
    let (ok, body) = cli(&args, Some("lots"));
    assert!(!ok);
    assert_eq!(parse(&body)["code"], "invalid_budget");
}

fn random_list(rng: &mut ChaCha8Rng, max_len: usize, max_value: u64) -> Value {
    let len = rng.gen_range(0..=max_len);
    let values: Vec<u64> = (0..len).map(|_| rng.gen_range(0..=max_value)).collect();
    match rng.gen_range(0..3) {
        0 => json!(values),
        1 => json!(values.iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        _ => json!(values.first().copied().unwrap_or(0)),
    }
}

/// A letter of rank `rank`, occasionally out of range.
fn random_letter(rng: &mut ChaCha8Rng, rank: u64) -> u64 {
    if rng.gen_ratio(1, 25) {
        [0, rank + 1][rng.gen_range(0..2)]
    } else {
        rng.gen_range(1..=rank.max(1))
    }
}

fn random_junk(rng: &mut ChaCha8Rng) -> Value {
    match rng.gen_range(0..7) {
        0 => Value::Null,
        1 => json!(rng.gen::<bool>()),
        2 => json!(rng.gen_range(-5i64..100)),
        3 => json!(-1.5),
        4 => json!("1,,2"),
        5 => json!({ "nested": [1, 2] }),
        _ => json!("(3 2 x)"),
    }
}

type FieldGen = fn(&mut ChaCha8Rng) -> Value;

fn random_payload(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_ratio(1, 20) {
        let garbage = ["", "[]", "null", "{", "{\"spec\":", "\u{0}", "42", "{\"spec\":\"A2:1\"}}"];
        return garbage[rng.gen_range(0..garbage.len())].to_string();
    }
    let mut map = serde_json::Map::new();
    let series = ["A", "A", "A", "A", "A", "a", "D", "B"][rng.gen_range(0..8)];
    let rank: u64 = if rng.gen_ratio(1, 20) { 0 } else { rng.gen_range(1..=4) };
    if rng.gen_bool(0.5) {
        let word: Vec<String> = (0..rng.gen_range(0..7)).map(|_| random_letter(rng, rank).to_string()).collect();
        let mut spec = format!("{series}{rank}:{}", word.join(","));
        if rng.gen_bool(0.5) {
            let v: Vec<String> = (0..rng.gen_range(0..4)).map(|_| random_letter(rng, rank).to_string()).collect();
            spec.push_str(&format!(" / v={}", v.join(",")));
        }
        if rng.gen_ratio(1, 10) {
            let cut = rng.gen_range(0..=spec.len());
            spec.truncate(cut);
        }
        map.insert("spec".into(), json!(spec));
    } else {
        map.insert("series".into(), json!(series));
        map.insert("rank".into(), json!(rank));
        let word: Vec<u64> = (0..rng.gen_range(0..7)).map(|_| random_letter(rng, rank)).collect();
        map.insert("word".into(), if rng.gen_bool(0.5) { json!(word) } else { json!(word.iter().map(u64::to_string).collect::<Vec<_>>().join(" ")) });
        if rng.gen_bool(0.5) {
            map.insert("v".into(), random_list(rng, 3, rank));
        }
    }
    let optional: [(&str, FieldGen); 7] = [
        ("mode", |r| json!(["pattern", "element", "pattern", "element", "other"][r.gen_range(0..5)])),
        ("k", |r| random_list(r, 5, 7)),
        ("variables", |r| json!(["none", "classical", "quantum", "classical", "quantum", "complex"][r.gen_range(0..6)])),
        ("q", |r| json!([0u64, 1, 2, 3, 4, 5, 97][r.gen_range(0..7)])),
        ("budget", |r| json!(r.gen_range(0u64..100_000))),
        ("word2", |r| random_list(r, 6, 4)),
        ("a", |r| random_list(r, 6, u64::MAX)),
    ];
    for (key, gen) in optional {
        if rng.gen_bool(0.3) {
            let value = if rng.gen_ratio(1, 20) { random_junk(rng) } else { gen(rng) };
            map.insert(key.into(), value);
        }
    }
    if rng.gen_ratio(1, 20) {
        map.insert("extra".into(), random_junk(rng));
    }
    for key in ["rank", "word", "spec"] {
        if rng.gen_ratio(1, 30) {
            map.insert(key.into(), random_junk(rng));
        }
    }
    Value::Object(map).to_string()
}

#[tokio::test]
async fn random_payloads_get_structured_responses() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut statuses = std::collections::BTreeMap::new();
    let mut codes = std::collections::BTreeMap::new();
    for _ in 0..1000 {
        let command = if rng.gen_ratio(1, 25) { "unknown" } else { COMMANDS[rng.gen_range(0..COMMANDS.len())] };
        let payload = random_payload(&mut rng);
        let (status, body) = post(&format!("/api/{command}"), &payload).await;
        let out: Value = serde_json::from_str(&body).unwrap_or_else(|e| panic!("{command} {payload}: {e}: {body}"));
        if status == StatusCode::OK {
            assert_eq!(out["command"], command);
            assert!(out["diagnostics"].is_array());
        } else {
            assert!(out["code"].is_string() && out["message"].is_string() && out["context"].is_object(), "{body}");
        }
        assert!(status.as_u16() < 500, "{command} {payload} -> {status}: {body}");
        *statuses.entry(status.as_u16()).or_insert(0usize) += 1;
        *codes.entry(out["code"].as_str().unwrap_or("ok").to_string()).or_insert(0usize) += 1;
    }
    println!("{codes:?}");
    assert!(statuses.get(&200).copied().unwrap_or(0) > 50, "{statuses:?}");
    assert!(statuses.get(&400).copied().unwrap_or(0) > 50, "{statuses:?}");
}
