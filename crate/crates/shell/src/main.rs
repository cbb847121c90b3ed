use std::process::ExitCode;

use braidseed_shell::server::{respond, serve};
use braidseed_shell::{ApiError, Config};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

/// Braid varieties, their seeds and Lusztig parameters from the command line.
///
/// Every command prints one line of JSON, identical to the body of the matching
/// `POST /api/{command}` response.
#[derive(Parser)]
#[command(name = "braidseed", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Demazure product of the word
    Demazure(Input),
    /// Leftmost subexpression for v
    Leftmost(Input),
    /// Initial seed of the word
    Seed(Input),
    /// Seed s(v, word) with its construction trace
    Construct(Input),
    /// Mutation sequence --k on the initial seed, or on s(v, word) when --v is given
    Mutate(Input),
    /// Lusztig parameters through the construction
    Track(Input),
    /// Vanishing check for s(v, word)
    Verify(Input),
    /// Point count over F_q with a dimension fit
    Count(Input),
    /// Braid moves, and a move path to --word2
    Moves(Input),
    /// Transport of --a from --word to --word2
    Transport(Input),
    /// Run the HTTP API
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Default tuple budget; overrides BRAIDSEED_BUDGET
        #[arg(long)]
        budget: Option<u64>,
    },
}

#[derive(Args)]
struct Input {
    /// Whole word spec, e.g. "A3:3,2,1,2,3,1,3,2 / v=3,2,3,1,2"
    #[arg(long)]
    spec: Option<String>,
    /// Dynkin series: A, D or E
    #[arg(long)]
    series: Option<String>,
    #[arg(long)]
    rank: Option<usize>,
    /// Letters, e.g. 3,2,1,2
    #[arg(long)]
    word: Option<String>,
    /// Reduced word of v
    #[arg(long)]
    v: Option<String>,
    /// How v is matched: pattern or element
    #[arg(long)]
    mode: Option<String>,
    /// Vertices to mutate, in order
    #[arg(long)]
    k: Option<String>,
    /// Cluster variables to compute: none, classical or quantum
    #[arg(long)]
    variables: Option<String>,
    #[arg(long)]
    q: Option<u64>,
    /// Largest number of tuples to enumerate; overrides BRAIDSEED_BUDGET
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long)]
    word2: Option<String>,
    /// Parameter vector, e.g. 1,0,2
    #[arg(long)]
    a: Option<String>,
    /// Raw JSON payload instead of the flags above
    #[arg(long, conflicts_with_all = ["spec", "series", "rank", "word", "v", "mode", "k", "variables", "q", "budget", "word2", "a"])]
    payload: Option<String>,
}

impl Input {
    fn body(self) -> String {
        if let Some(raw) = self.payload {
            return raw;
        }
        let mut map = Map::new();
        let strings = [
            ("spec", self.spec),
            ("series", self.series),
            ("word", self.word),
            ("v", self.v),
            ("mode", self.mode),
            ("k", self.k),
            ("variables", self.variables),
            ("word2", self.word2),
            ("a", self.a),
        ];
        for (key, val) in strings {
            if let Some(val) = val {
                map.insert(key.into(), json!(val));
            }
        }
        let numbers = [("rank", self.rank.map(|r| r as u64)), ("q", self.q), ("budget", self.budget)];
        for (key, val) in numbers {
            if let Some(val) = val {
                map.insert(key.into(), json!(val));
            }
        }
        Value::Object(map).to_string()
    }
}

fn fail(e: &ApiError) -> ExitCode {
    println!("{}", e.to_json());
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match Config::from_env() {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let (name, input) = match cli.command {
        Command::Serve { port, host, budget } => {
            let config = Config { budget: budget.map_or(config.budget, u128::from) };
            let runtime = tokio::runtime::Runtime::new().expect("tokio runtime starts");
            eprintln!("listening on http://{host}:{port}");
            return match runtime.block_on(serve(&host, port, config)) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("cannot serve on {host}:{port}: {e}");
                    ExitCode::FAILURE
                }
            };
        }
        Command::Demazure(i) => ("demazure", i),
        Command::Leftmost(i) => ("leftmost", i),
        Command::Seed(i) => ("seed", i),
        Command::Construct(i) => ("construct", i),
        Command::Mutate(i) => ("mutate", i),
        Command::Track(i) => ("track", i),
        Command::Verify(i) => ("verify", i),
        Command::Count(i) => ("count", i),
        Command::Moves(i) => ("moves", i),
        Command::Transport(i) => ("transport", i),
    };
    let (status, body) = respond(name, &input.body(), config);
    println!("{body}");
    if status == 200 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
