//! Command-line front end. All file I/O lives here; [`run`] returns the exit
//! status: 0 on success, 1 when a check or verification fails, 2 on usage or
//! parse errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::{predict_by_simulation, step_with_threads};
use crate::circuit::{evaluate_circuit, normalize_fanout, parse_circuit, print_circuit, random_circuit};
use crate::compile::{
    check_compiled, compile, load_gadget_set, verify_gadget_set, Contract, GadgetSet, NeighborhoodFamily,
};
use crate::error::Error;
use crate::grid::{Cell, Configuration, LNeighborhood, State};
use crate::predict::{
    fast_schedule, matrix_power_changed, matrix_power_flip_times, predict_fast, FlipEntry, MATRIX_CAP,
};

#[derive(Debug, Parser)]
#[command(
    name = "lfmca",
    version,
    about = "Freezing majority cellular automata on the torus"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the automaton on a grid file.
    Simulate(SimulateArgs),
    /// Decide whether a cell differs at time t from its initial state.
    Predict(PredictArgs),
    /// Compile a monotone circuit netlist into an initial configuration.
    Compile(CompileArgs),
    /// Check every tile of a gadget set against its truth table.
    VerifyGadgets(VerifyArgs),
    /// Write a seeded random monotone circuit.
    GenCircuit(GenArgs),
    /// Time predictors against each other on long-chain configurations.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct NeighborhoodArgs {
    /// North offsets, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub north: Vec<usize>,
    /// East offsets, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub east: Vec<usize>,
}

impl NeighborhoodArgs {
    fn build(&self) -> Result<LNeighborhood, Error> {
        LNeighborhood::new(&self.north, &self.east)
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("duration").required(true).args(["steps", "to_fixed_point"]))]
pub struct SimulateArgs {
    pub grid: PathBuf,
    #[command(flatten)]
    pub nb: NeighborhoodArgs,
    /// Number of steps (clamped to n²).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Run until nothing changes and report the step count.
    #[arg(long)]
    pub to_fixed_point: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write the grid after every K steps.
    #[arg(long, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    pub emit_every: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Sim,
    Graph,
    Matrix,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    pub grid: PathBuf,
    #[command(flatten)]
    pub nb: NeighborhoodArgs,
    /// Cell as `i,j`, 0-based, `i` east and `j` north.
    #[arg(long, value_parser = parse_cell)]
    pub cell: Cell,
    #[arg(long, alias = "steps")]
    pub time: usize,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// One of contiguous, periodic, sparse2.
    #[arg(long)]
    pub family: String,
    /// Family parameters: `KE,KN`, `P,PN,SE,SN` or `IE,JE,IN,JN`.
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<usize>,
}

impl FamilyArgs {
    fn build(&self) -> Result<NeighborhoodFamily, String> {
        let nums: Vec<String> = self.params.iter().map(|p| p.to_string()).collect();
        let mut words = vec![self.family.as_str()];
        words.extend(nums.iter().map(String::as_str));
        let f = NeighborhoodFamily::parse_words(&words)?;
        f.validate().map_err(|e| e.to_string())?;
        Ok(f)
    }
}

#[derive(Debug, Args)]
pub struct CompileArgs {
    pub circuit: PathBuf,
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run the instance to its fixed point and compare with the circuit value.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["family", "gadgets"]))]
pub struct VerifyArgs {
    #[arg(long, requires = "params")]
    pub family: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub params: Vec<usize>,
    /// A gadget-set file to verify instead of a shipped family.
    #[arg(long)]
    pub gadgets: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub inputs: u64,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub gates: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Insert duplicators so no node feeds more than two consumers.
    #[arg(long)]
    pub normalize: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "128,256,512")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "sim,graph")]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_cell(s: &str) -> Result<Cell, String> {
    let (i, j) = s.split_once(',').ok_or("expected i,j")?;
    let num = |w: &str| {
        w.trim()
            .parse::<usize>()
            .map_err(|_| format!("bad coordinate {w:?}"))
    };
    Ok(Cell::new(num(i)?, num(j)?))
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl ToString) -> Failure {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn check(message: impl ToString) -> Failure {
        Failure {
            code: 1,
            message: message.to_string(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::GadgetConstructionFailed(_) | Error::LayoutOverflow { .. } => Failure::check(e),
            _ => Failure::usage(e),
        }
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses the arguments (program name first) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Compile(a) => cmd_compile(a),
        Command::VerifyGadgets(a) => cmd_verify_gadgets(a),
        Command::GenCircuit(a) => cmd_gen_circuit(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn read_grid(path: &Path) -> Result<Configuration, Failure> {
    Configuration::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_out(out: Option<&Path>, data: &str) -> Result<(), Failure> {
    let res = match out {
        Some(p) => fs::write(p, data),
        None => io::stdout().lock().write_all(data.as_bytes()),
    };
    res.map_err(|e| Failure::usage(format!("write failed: {e}")))
}

fn cmd_simulate(a: &SimulateArgs) -> CmdResult {
    let nb = a.nb.build()?;
    let x = read_grid(&a.grid)?;
    let n = x.n();
    nb.check_for(n)?;
    let threads = a.threads as usize;
    let emit = a.emit_every.map(|k| k as usize);
    let mut text = String::new();
    let mut cur = x;
    if a.to_fixed_point {
        let mut t = 0;
        loop {
            let next = step_with_threads(&cur, &nb, threads)?;
            if next == cur {
                break;
            }
            cur = next;
            t += 1;
            assert!(t <= n * n, "convergence bound exceeded");
            if emit.is_some_and(|k| t % k == 0) {
                text.push_str(&cur.to_text());
            }
        }
        text.push_str(&cur.to_text());
        write_out(a.out.as_deref(), &text)?;
        eprintln!("steps {t}");
    } else {
        let total = a.steps.unwrap_or(0).min(n * n);
        let mut stable = false;
        for t in 1..=total {
            if !stable {
                let next = step_with_threads(&cur, &nb, threads)?;
                stable = next == cur;
                cur = next;
            }
            if t < total && emit.is_some_and(|k| t % k == 0) {
                text.push_str(&cur.to_text());
            }
        }
        text.push_str(&cur.to_text());
        write_out(a.out.as_deref(), &text)?;
    }
    Ok(0)
}

fn cmd_predict(a: &PredictArgs) -> CmdResult {
    let nb = a.nb.build()?;
    let size1 = nb.north().len() == 1 && nb.east().len() == 1;
    let method = match a.method {
        Method::Auto if size1 => Method::Graph,
        Method::Auto => Method::Sim,
        m => m,
    };
    if matches!(method, Method::Graph | Method::Matrix) && !size1 {
        return Err(Failure::usage(format!(
            "method {method:?} needs one north and one east offset, got {nb}"
        )));
    }
    let x = read_grid(&a.grid)?;
    nb.check_for(x.n())?;
    a.cell.check(x.n())?;
    if method == Method::Matrix && x.n() > MATRIX_CAP {
        return Err(Error::InstanceTooLarge {
            n: x.n(),
            cap: MATRIX_CAP,
        }
        .into());
    }
    let changed = match method {
        Method::Sim => predict_by_simulation(&x, &nb, a.time, a.cell)?,
        Method::Graph => predict_fast(&x, &nb, a.time, a.cell)?,
        Method::Matrix => matrix_power_changed(&x, &nb, a.time, a.cell)?,
        Method::Auto => unreachable!(),
    };
    println!("{}", if changed { "CHANGED" } else { "UNCHANGED" });
    Ok(0)
}

fn cmd_compile(a: &CompileArgs) -> CmdResult {
    let family = a.family.build().map_err(Failure::usage)?;
    let text = read(&a.circuit)?;
    let c = parse_circuit(&text).map_err(|e| Failure::usage(format!("{}: {e}", a.circuit.display())))?;
    let inst = compile(&c, &family)?;
    write_out(a.out.as_deref(), &inst.to_text())?;
    if a.check {
        let expected = evaluate_circuit(&c);
        let word = |v: bool| if v { "CHANGED" } else { "UNCHANGED" };
        if !check_compiled(&inst, expected) {
            return Err(Failure::check(format!(
                "check failed: circuit value {expected} but output cell not {}",
                word(expected)
            )));
        }
        eprintln!("check passed: output {}", word(expected));
    }
    Ok(0)
}

fn cmd_verify_gadgets(a: &VerifyArgs) -> CmdResult {
    let gs: GadgetSet = match (&a.gadgets, &a.family) {
        (Some(path), _) => {
            GadgetSet::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
        }
        (None, Some(kind)) => {
            let fam = FamilyArgs {
                family: kind.clone(),
                params: a.params.clone(),
            }
            .build()
            .map_err(Failure::usage)?;
            load_gadget_set(&fam)?
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut ok = true;
    let mut out = format!(
        "family {}  tile {}x{}  {}\n",
        gs.family, gs.width, gs.height, gs.neighborhood
    );
    if let Err(e) = gs.check_composable() {
        ok = false;
        out.push_str(&format!("composability: FAIL ({e})\n"));
    }
    out.push_str("tile   N E  south west contain steps\n");
    let mark = |b: bool| if b { "ok" } else { "FAIL" };
    for r in verify_gadget_set(&gs) {
        ok &= r.passed();
        for (k, inputs) in [(false, false), (false, true), (true, false), (true, true)]
            .into_iter()
            .enumerate()
        {
            out.push_str(&format!(
                "{:<6} {} {}  {:<5} {:<4} {:<7} {}\n",
                r.tile,
                inputs.0 as u8,
                inputs.1 as u8,
                mark(r.holds(inputs, Contract::SouthOutput)),
                mark(r.holds(inputs, Contract::WestOutput)),
                mark(r.holds(inputs, Contract::Containment)),
                r.steps[k]
            ));
        }
    }
    write_out(None, &out)?;
    if ok {
        Ok(0)
    } else {
        Err(Failure::check("gadget verification failed"))
    }
}

fn cmd_gen_circuit(a: &GenArgs) -> CmdResult {
    let mut c = random_circuit(a.inputs as usize, a.gates as usize, a.seed);
    if a.normalize {
        c = normalize_fanout(&c);
    }
    write_out(a.out.as_deref(), &print_circuit(&c))?;
    Ok(0)
}

/// Mostly `+1` torus crossed by seeded monotone staircases of `-1` cells,
/// each stepping north or east and shorter than `n`. The cell at the tail of
/// a staircase flips only after the whole staircase ahead of it has.
pub fn long_chain_config(n: usize, seed: u64) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = Configuration::new(n, State::Plus);
    let chains = (n / 8).max(1);
    for _ in 0..chains {
        let (mut i, mut j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let len = rng.gen_range(n / 2..n.max(2));
        for _ in 0..len {
            x.set(Cell::new(i, j), State::Minus);
            if rng.gen_bool(0.5) {
                i = (i + 1) % n;
            } else {
                j = (j + 1) % n;
            }
        }
    }
    x
}

/// Flip time of every cell (row-major), `u64::MAX` for cells that never flip.
/// This answers every Pred query on `x` at once.
pub fn flip_answers(
    x: &Configuration,
    nb: &LNeighborhood,
    method: Method,
    threads: usize,
) -> crate::Result<Vec<u64>> {
    let n = x.n();
    let mut ans: Vec<u64> = (0..n * n)
        .map(|k| if x.is_plus(k % n, k / n) { 0 } else { u64::MAX })
        .collect();
    match method {
        Method::Sim | Method::Auto => {
            let mut cur = x.clone();
            let mut t = 0u64;
            loop {
                let next = step_with_threads(&cur, nb, threads)?;
                if next == cur {
                    break;
                }
                t += 1;
                for j in 0..n {
                    for (w, (&a, &b)) in cur.row(j).iter().zip(next.row(j)).enumerate() {
                        let mut fresh = b & !a;
                        while fresh != 0 {
                            let i = w * 64 + fresh.trailing_zeros() as usize;
                            debug_assert!(i < n);
                            ans[j * n + i] = t;
                            fresh &= fresh - 1;
                        }
                    }
                }
                cur = next;
            }
        }
        Method::Graph => {
            let s = fast_schedule(x, nb)?;
            for c in x.cells() {
                if let FlipEntry::FlipsAt(t) = s.get(c) {
                    ans[c.j * n + c.i] = t as u64;
                }
            }
        }
        Method::Matrix => {
            for (slot, t) in ans.iter_mut().zip(matrix_power_flip_times(x, nb)?) {
                if let Some(t) = t {
                    *slot = t as u64;
                }
            }
        }
    }
    Ok(ans)
}

/// FNV-1a over the little-endian bytes of the answers.
pub fn answer_hash(ans: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in ans.iter().flat_map(|v| v.to_le_bytes()) {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

fn cmd_bench(a: &BenchArgs) -> CmdResult {
    if a.methods.is_empty() {
        return Err(Failure::usage("no methods given"));
    }
    if let Some(&n) = a.sizes.iter().find(|&&n| n < 2) {
        return Err(Failure::usage(format!("grid size {n} too small")));
    }
    if a.methods.contains(&Method::Matrix) {
        if let Some(&n) = a.sizes.iter().find(|&&n| n > MATRIX_CAP) {
            return Err(Error::InstanceTooLarge { n, cap: MATRIX_CAP }.into());
        }
    }
    let nb = LNeighborhood::toom();
    let mut csv = String::from("n,method,wall_ms,answer_hash\n");
    let mut agree = true;
    for &n in &a.sizes {
        let x = long_chain_config(n, a.seed ^ n as u64);
        let mut hashes = Vec::new();
        for &m in &a.methods {
            let start = Instant::now();
            let ans = flip_answers(&x, &nb, m, a.threads as usize)?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            let h = answer_hash(&ans);
            csv.push_str(&format!("{n},{},{ms:.3},{h:016x}\n", method_name(m)));
            hashes.push(h);
        }
        if hashes.windows(2).any(|w| w[0] != w[1]) {
            eprintln!("n={n}: methods disagree");
            agree = false;
        }
    }
    write_out(a.out.as_deref(), &csv)?;
    if agree {
        Ok(0)
    } else {
        Err(Failure::check("answer hashes differ"))
    }
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::Auto | Method::Sim => "sim",
        Method::Graph => "graph",
        Method::Matrix => "matrix",
    }
}
