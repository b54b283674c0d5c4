//! SMT-LIB2 serialization, the solver subprocess driver and model read-back.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::encoder::{assemble, Constraint, ConstraintSystem, EncodeError, EncodeOptions, EncodingMeta, IntExpr};
use crate::formula::{Formula, Rel};
use crate::trace::{Trace, VarValues};

pub const DEFAULT_LOGIC: &str = "QF_UFLIA";
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);
const GET_MODEL: &str = "(get-model)";

fn int_sexp(e: &IntExpr, out: &mut String) {
    match e {
        IntExpr::Lit(v) if *v < 0 => write!(out, "(- {})", v.unsigned_abs()).unwrap(),
        IntExpr::Lit(v) => write!(out, "{v}").unwrap(),
        IntExpr::Const(c) => out.push_str(c),
        IntExpr::App(f, a) => {
            write!(out, "({f} ").unwrap();
            int_sexp(a, out);
            out.push(')');
        }
        IntExpr::Add(e, c) => {
            out.push_str(if *c < 0 { "(- " } else { "(+ " });
            int_sexp(e, out);
            write!(out, " {})", c.unsigned_abs()).unwrap();
        }
    }
}

fn rel_sexp(r: Rel) -> &'static str {
    match r {
        Rel::Lt => "<",
        Rel::Le => "<=",
        Rel::Eq => "=",
        Rel::Ge => ">=",
        Rel::Gt => ">",
    }
}

fn constraint_sexp(c: &Constraint, out: &mut String) {
    let nary = |op: &str, xs: &[&Constraint], out: &mut String| {
        write!(out, "({op}").unwrap();
        for x in xs {
            out.push(' ');
            constraint_sexp(x, out);
        }
        out.push(')');
    };
    match c {
        Constraint::True => out.push_str("true"),
        Constraint::False => out.push_str("false"),
        Constraint::Pred(p, e) => {
            write!(out, "({p} ").unwrap();
            int_sexp(e, out);
            out.push(')');
        }
        Constraint::Cmp(l, r, e) => {
            write!(out, "({} ", rel_sexp(*r)).unwrap();
            int_sexp(l, out);
            out.push(' ');
            int_sexp(e, out);
            out.push(')');
        }
        Constraint::Not(a) => nary("not", &[a], out),
        Constraint::And(xs) => nary("and", &xs.iter().collect::<Vec<_>>(), out),
        Constraint::Or(xs) => nary("or", &xs.iter().collect::<Vec<_>>(), out),
        Constraint::Implies(a, b) => nary("=>", &[a, b], out),
        Constraint::Iff(a, b) => nary("=", &[a, b], out),
    }
}

/// Renders `cs` as an SMT-LIB2 script. Identical systems give identical text.
pub fn emit_smtlib(cs: &ConstraintSystem, logic: &str) -> String {
    let empty = cs.int_consts.is_empty() && cs.int_funs.is_empty() && cs.predicates.is_empty();
    let mut out = String::new();
    if !empty {
        out.push_str("(set-option :produce-models true)\n");
    }
    writeln!(out, "(set-logic {logic})").unwrap();
    for c in &cs.int_consts {
        writeln!(out, "(declare-fun {c} () Int)").unwrap();
    }
    for f in &cs.int_funs {
        writeln!(out, "(declare-fun {} (Int) Int)", f.name).unwrap();
    }
    for p in &cs.predicates {
        writeln!(out, "(declare-fun {p} (Int) Bool)").unwrap();
    }
    for a in &cs.assertions {
        out.push_str("(assert ");
        constraint_sexp(a, &mut out);
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n");
    if !empty {
        out.push_str(GET_MODEL);
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    /// Executable followed by its arguments.
    pub command: Vec<String>,
    pub logic: String,
    pub timeout: Duration,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { command: vec!["z3".into(), "-in".into()], logic: DEFAULT_LOGIC.into(), timeout: DEFAULT_TIMEOUT }
    }
}

impl SolverConfig {
    /// Defaults overridden by `CLTLB_SOLVER` (a whitespace-separated command
    /// line), `CLTLB_LOGIC` and `CLTLB_TIMEOUT` (seconds).
    pub fn from_env() -> Self {
        let mut cfg = SolverConfig::default();
        if let Ok(cmd) = std::env::var("CLTLB_SOLVER") {
            cfg = cfg.with_command(&cmd);
        }
        if let Ok(logic) = std::env::var("CLTLB_LOGIC") {
            cfg.logic = logic;
        }
        if let Some(secs) = std::env::var("CLTLB_TIMEOUT").ok().and_then(|s| s.trim().parse::<f64>().ok()) {
            cfg.timeout = Duration::from_secs_f64(secs.max(0.0));
        }
        cfg
    }

    /// A bare `z3` gets the flag that makes it read the script from stdin.
    pub fn with_command(mut self, cmd: &str) -> Self {
        let mut parts: Vec<String> = cmd.split_whitespace().map(String::from).collect();
        let is_z3 = parts.first().is_some_and(|p| p.rsplit('/').next() == Some("z3"));
        if parts.len() == 1 && is_z3 {
            parts.push("-in".into());
        }
        if !parts.is_empty() {
            self.command = parts;
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown,
    SolverError,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Unknown => "unknown",
            Status::SolverError => "solver-error",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw outcome of one solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverRun {
    pub status: Status,
    /// Model text, present on `sat` when the script asked for one.
    pub model: Option<String>,
    pub diagnostics: String,
}

impl SolverRun {
    fn error(msg: impl Into<String>) -> Self {
        SolverRun { status: Status::SolverError, model: None, diagnostics: msg.into() }
    }
}

fn spawn_reader<R: Read + Send + 'static>(r: R) -> mpsc::Receiver<String> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        for line in BufReader::new(r).lines() {
            let Ok(line) = line else { break };
            if tx.send(line).is_err() {
                break;
            }
        }
    });
    rx
}

/// Runs `script` through the configured solver.
///
/// The model request at the end of the script is only sent once the solver
/// has answered `sat`, so no solver is asked for a model it does not have.
pub fn run_solver(script: &str, cfg: &SolverConfig) -> SolverRun {
    let Some((exe, args)) = cfg.command.split_first() else {
        return SolverRun::error("empty solver command");
    };
    let trimmed = script.trim_end();
    let (body, wants_model) = match trimmed.strip_suffix(GET_MODEL) {
        Some(body) => (body, true),
        None => (trimmed, false),
    };
    let mut child = match Command::new(exe)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return SolverRun::error(format!("cannot start `{exe}`: {e}")),
    };
    let mut stdin = child.stdin.take().expect("piped stdin");
    let lines = spawn_reader(child.stdout.take().expect("piped stdout"));
    let mut stderr = child.stderr.take().expect("piped stderr");
    let stderr_text = thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });
    let deadline = Instant::now() + cfg.timeout;
    let kill = |child: &mut std::process::Child| {
        let _ = child.kill();
        let _ = child.wait();
    };

    if let Err(e) = stdin.write_all(body.as_bytes()).and_then(|_| stdin.write_all(b"\n")).and_then(|_| stdin.flush()) {
        kill(&mut child);
        return SolverRun::error(format!("cannot write script: {e}"));
    }

    let mut transcript = String::new();
    let status = loop {
        let left = deadline.saturating_duration_since(Instant::now());
        match lines.recv_timeout(left) {
            Ok(line) => {
                let word = line.trim();
                if word.is_empty() {
                    continue;
                }
                transcript.push_str(&line);
                transcript.push('\n');
                break match word {
                    "sat" => Status::Sat,
                    "unsat" => Status::Unsat,
                    "unknown" => Status::Unknown,
                    _ => Status::SolverError,
                };
            }
            Err(mpsc::RecvTimeoutError::Timeout) => {
                kill(&mut child);
                return SolverRun {
                    status: Status::Unknown,
                    model: None,
                    diagnostics: format!("timeout after {:.1}s", cfg.timeout.as_secs_f64()),
                };
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => break Status::SolverError,
        }
    };

    let follow_up = if status == Status::Sat && wants_model { "(get-model)\n(exit)\n" } else { "(exit)\n" };
    let _ = stdin.write_all(follow_up.as_bytes());
    drop(stdin);

    let mut rest = String::new();
    loop {
        let left = deadline.saturating_duration_since(Instant::now());
        match lines.recv_timeout(left) {
            Ok(line) => {
                rest.push_str(&line);
                rest.push('\n');
            }
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
            Err(mpsc::RecvTimeoutError::Timeout) => {
                kill(&mut child);
                return SolverRun {
                    status: Status::Unknown,
                    model: None,
                    diagnostics: format!("timeout after {:.1}s while reading the model", cfg.timeout.as_secs_f64()),
                };
            }
        }
    }
    let exit = child.wait();
    let err_text = stderr_text.join().unwrap_or_default();
    let diagnostics = format!("{transcript}{rest}{err_text}").trim_end().to_string();
    match exit {
        Ok(code) if !code.success() => {
            return SolverRun {
                status: Status::SolverError,
                model: None,
                diagnostics: format!("{diagnostics}\nexit status: {code}"),
            };
        }
        Err(e) => return SolverRun::error(format!("{diagnostics}\n{e}")),
        Ok(_) => {}
    }
    if status == Status::SolverError {
        return SolverRun { status, model: None, diagnostics };
    }
    let model = (status == Status::Sat && wants_model).then(|| rest.clone());
    if model.as_deref().is_some_and(|m| m.contains("(error")) {
        return SolverRun { status: Status::SolverError, model: None, diagnostics };
    }
    SolverRun { status, model, diagnostics }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed model: {0}")]
    Syntax(String),
    #[error("model lacks `{0}`")]
    Missing(String),
    #[error("cannot evaluate `{name}` at {at}: {msg}")]
    Eval { name: String, at: i64, msg: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn tokenize(text: &str) -> Vec<String> {
    let mut toks = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '(' | ')' => {
                toks.push(c.to_string());
                chars.next();
            }
            ';' => while chars.next().is_some_and(|c| c != '\n') {},
            c if c.is_whitespace() => {
                chars.next();
            }
            '|' => {
                let mut s = String::new();
                chars.next();
                for c in chars.by_ref() {
                    if c == '|' {
                        break;
                    }
                    s.push(c);
                }
                toks.push(s);
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c == '(' || c == ')' || c.is_whitespace() {
                        break;
                    }
                    s.push(c);
                    chars.next();
                }
                toks.push(s);
            }
        }
    }
    toks
}

fn parse_sexps(text: &str) -> Result<Vec<Sexp>, ModelError> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    for t in tokenize(text) {
        match t.as_str() {
            "(" => stack.push(Vec::new()),
            ")" => {
                let done = stack
                    .pop()
                    .filter(|_| !stack.is_empty())
                    .ok_or_else(|| ModelError::Syntax("unbalanced `)`".into()))?;
                stack.last_mut().unwrap().push(Sexp::List(done));
            }
            _ => stack.last_mut().unwrap().push(Sexp::Atom(t)),
        }
    }
    if stack.len() != 1 {
        return Err(ModelError::Syntax("unbalanced `(`".into()));
    }
    Ok(stack.pop().unwrap())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Val {
    Int(i64),
    Bool(bool),
}

#[derive(Debug, Clone)]
struct Definition {
    params: Vec<String>,
    body: Sexp,
}

/// Function and constant definitions read from a `get-model` answer.
#[derive(Debug, Clone, Default)]
pub struct Model {
    defs: BTreeMap<String, Definition>,
}

impl Model {
    pub fn parse(text: &str) -> Result<Model, ModelError> {
        let mut items = parse_sexps(text)?;
        // Either a bare list of definitions or one wrapped in `(model ...)`.
        if items.len() == 1 {
            if let Sexp::List(inner) = &items[0] {
                if inner.iter().all(|s| matches!(s, Sexp::List(_)))
                    || matches!(inner.first(), Some(Sexp::Atom(a)) if a == "model")
                {
                    items = inner.clone();
                }
            }
        }
        let mut defs = BTreeMap::new();
        for item in items {
            let Sexp::List(parts) = item else {
                if item == Sexp::Atom("model".into()) {
                    continue;
                }
                return Err(ModelError::Syntax(format!("unexpected {item:?}")));
            };
            match parts.first() {
                Some(Sexp::Atom(head)) if head == "define-fun" => {}
                _ => continue,
            }
            let [_, Sexp::Atom(name), Sexp::List(params), _sort, body] = parts.as_slice() else {
                return Err(ModelError::Syntax("bad define-fun".into()));
            };
            let params = params
                .iter()
                .map(|p| match p {
                    Sexp::List(pair) => match pair.first() {
                        Some(Sexp::Atom(n)) => Ok(n.clone()),
                        _ => Err(ModelError::Syntax("bad parameter".into())),
                    },
                    _ => Err(ModelError::Syntax("bad parameter".into())),
                })
                .collect::<Result<_, _>>()?;
            defs.insert(name.clone(), Definition { params, body: body.clone() });
        }
        Ok(Model { defs })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.defs.contains_key(name)
    }

    fn call(&self, name: &str, args: &[Val], depth: usize) -> Result<Val, String> {
        let def = self.defs.get(name).ok_or_else(|| format!("unknown symbol `{name}`"))?;
        if def.params.len() != args.len() {
            return Err(format!("`{name}` expects {} arguments", def.params.len()));
        }
        let env: BTreeMap<String, Val> = def.params.iter().cloned().zip(args.iter().copied()).collect();
        self.eval(&def.body, &env, depth + 1)
    }

    fn eval(&self, e: &Sexp, env: &BTreeMap<String, Val>, depth: usize) -> Result<Val, String> {
        if depth > 10_000 {
            return Err("evaluation too deep".into());
        }
        match e {
            Sexp::Atom(a) => {
                if let Some(v) = env.get(a) {
                    return Ok(*v);
                }
                match a.as_str() {
                    "true" => Ok(Val::Bool(true)),
                    "false" => Ok(Val::Bool(false)),
                    _ => match a.parse::<i64>() {
                        Ok(n) => Ok(Val::Int(n)),
                        Err(_) => self.call(a, &[], depth),
                    },
                }
            }
            Sexp::List(items) => {
                let Some((Sexp::Atom(head), args)) = items.split_first() else {
                    return Err("unsupported expression".into());
                };
                let int = |s: &Sexp| -> Result<i64, String> {
                    match self.eval(s, env, depth + 1)? {
                        Val::Int(n) => Ok(n),
                        Val::Bool(_) => Err("expected an integer".into()),
                    }
                };
                let boolean = |s: &Sexp| -> Result<bool, String> {
                    match self.eval(s, env, depth + 1)? {
                        Val::Bool(b) => Ok(b),
                        Val::Int(_) => Err("expected a Boolean".into()),
                    }
                };
                match head.as_str() {
                    "ite" => {
                        let [c, t, f] = args else { return Err("bad ite".into()) };
                        if boolean(c)? {
                            self.eval(t, env, depth + 1)
                        } else {
                            self.eval(f, env, depth + 1)
                        }
                    }
                    "let" => {
                        let [Sexp::List(binds), body] = args else { return Err("bad let".into()) };
                        let mut inner = env.clone();
                        for b in binds {
                            let Sexp::List(pair) = b else { return Err("bad let binding".into()) };
                            let [Sexp::Atom(n), v] = pair.as_slice() else { return Err("bad let binding".into()) };
                            inner.insert(n.clone(), self.eval(v, env, depth + 1)?);
                        }
                        self.eval(body, &inner, depth + 1)
                    }
                    "not" => Ok(Val::Bool(!boolean(args.first().ok_or("bad not")?)?)),
                    "and" => args.iter().try_fold(true, |acc, a| Ok(acc & boolean(a)?)).map(Val::Bool),
                    "or" => args.iter().try_fold(false, |acc, a| Ok(acc | boolean(a)?)).map(Val::Bool),
                    "=>" => {
                        let [a, b] = args else { return Err("bad =>".into()) };
                        Ok(Val::Bool(!boolean(a)? || boolean(b)?))
                    }
                    "=" | "distinct" => {
                        let vals = args.iter().map(|a| self.eval(a, env, depth + 1)).collect::<Result<Vec<_>, _>>()?;
                        let all_eq = vals.windows(2).all(|w| w[0] == w[1]);
                        Ok(Val::Bool(if head == "=" { all_eq } else { vals.len() == 2 && !all_eq }))
                    }
                    "<" | "<=" | ">" | ">=" => {
                        let [a, b] = args else { return Err(format!("bad {head}")) };
                        let (a, b) = (int(a)?, int(b)?);
                        Ok(Val::Bool(match head.as_str() {
                            "<" => a < b,
                            "<=" => a <= b,
                            ">" => a > b,
                            _ => a >= b,
                        }))
                    }
                    "-" if args.len() == 1 => Ok(Val::Int(-int(&args[0])?)),
                    "+" | "-" | "*" => {
                        let (first, rest) = args.split_first().ok_or("empty arithmetic")?;
                        let mut acc = int(first)?;
                        for a in rest {
                            let v = int(a)?;
                            acc = match head.as_str() {
                                "+" => acc + v,
                                "-" => acc - v,
                                _ => acc * v,
                            };
                        }
                        Ok(Val::Int(acc))
                    }
                    name => {
                        let vals = args.iter().map(|a| self.eval(a, env, depth + 1)).collect::<Result<Vec<_>, _>>()?;
                        self.call(name, &vals, depth)
                    }
                }
            }
        }
    }

    pub fn int_const(&self, name: &str) -> Result<i64, ModelError> {
        self.get(name, &[]).and_then(|v| match v {
            Val::Int(n) => Ok(n),
            Val::Bool(_) => Err(ModelError::Eval { name: name.into(), at: 0, msg: "not an integer".into() }),
        })
    }

    pub fn int_at(&self, name: &str, at: i64) -> Result<i64, ModelError> {
        match self.get(name, &[Val::Int(at)])? {
            Val::Int(n) => Ok(n),
            Val::Bool(_) => Err(ModelError::Eval { name: name.into(), at, msg: "not an integer".into() }),
        }
    }

    pub fn bool_at(&self, name: &str, at: i64) -> Result<bool, ModelError> {
        match self.get(name, &[Val::Int(at)])? {
            Val::Bool(b) => Ok(b),
            Val::Int(_) => Err(ModelError::Eval { name: name.into(), at, msg: "not a Boolean".into() }),
        }
    }

    fn get(&self, name: &str, args: &[Val]) -> Result<Val, ModelError> {
        if !self.contains(name) {
            return Err(ModelError::Missing(name.into()));
        }
        let at = match args.first() {
            Some(Val::Int(n)) => *n,
            _ => 0,
        };
        self.call(name, args, 0).map_err(|msg| ModelError::Eval { name: name.into(), at, msg })
    }
}

/// Reads the loop position, the proposition predicates and the base
/// variable functions back into a trace. Variables whose function the
/// solver left out are filled with 0.
pub fn extract_trace(model_text: &str, meta: &EncodingMeta) -> Result<Trace, ModelError> {
    let model = Model::parse(model_text)?;
    let k = meta.k;
    let loop_at = model.int_const(&meta.loop_name)?;
    let loop_at = usize::try_from(loop_at).ok().filter(|&l| l <= k).ok_or_else(|| ModelError::Eval {
        name: meta.loop_name.clone(),
        at: 0,
        msg: format!("value {loop_at} outside 0..={k}"),
    })?;
    let mut trace = Trace::new(k, loop_at);
    for p in &meta.propositions {
        let pred = meta.prop_predicate(p).ok_or_else(|| ModelError::Missing(p.clone()))?;
        let values = (0..=k as i64 + 1).map(|i| model.bool_at(pred, i)).collect::<Result<Vec<_>, _>>()?;
        trace.props.insert(p.clone(), values);
    }
    for v in &meta.variables {
        let fun = meta.base_fun(v).ok_or_else(|| ModelError::Missing(v.clone()))?;
        let (lo, hi) = meta.window;
        let values = if model.contains(fun) {
            (lo..=hi).map(|i| model.int_at(fun, i)).collect::<Result<Vec<_>, _>>()?
        } else {
            vec![0; (hi - lo + 1) as usize]
        };
        trace.vars.insert(v.clone(), VarValues { start: lo, values });
    }
    Ok(trace)
}

/// Outcome of a bounded satisfiability check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverVerdict {
    pub status: Status,
    pub trace: Option<Trace>,
    pub diagnostics: String,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

/// Encodes, solves and reads back a witness.
pub fn check_sat(f: &Formula, k: usize, opts: &EncodeOptions, cfg: &SolverConfig) -> Result<SolverVerdict, CheckError> {
    let (cs, meta) = assemble(f, k, opts)?;
    let script = emit_smtlib(&cs, &cfg.logic);
    Ok(solve_script(&script, &meta, cfg))
}

/// Runs an already emitted script and reads back the witness on `sat`.
pub fn solve_script(script: &str, meta: &EncodingMeta, cfg: &SolverConfig) -> SolverVerdict {
    let run = run_solver(script, cfg);
    let mut verdict = SolverVerdict { status: run.status, trace: None, diagnostics: run.diagnostics };
    if run.status == Status::Sat {
        match run.model.as_deref().map(|m| extract_trace(m, meta)) {
            Some(Ok(t)) => verdict.trace = Some(t),
            Some(Err(e)) => {
                verdict.status = Status::SolverError;
                verdict.diagnostics = format!("{}\n{e}", verdict.diagnostics);
            }
            None => {
                verdict.status = Status::SolverError;
                verdict.diagnostics = format!("{}\nno model returned", verdict.diagnostics);
            }
        }
    }
    verdict
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, to_pnf};

    fn pnf(src: &str) -> Formula {
        to_pnf(&parse(src).unwrap())
    }

    #[test]
    fn empty_system_script() {
        let s = emit_smtlib(&ConstraintSystem::default(), DEFAULT_LOGIC);
        assert_eq!(s, "(set-logic QF_UFLIA)\n(check-sat)\n");
    }

    #[test]
    fn script_shape_is_stable() {
        let (cs, _) = assemble(&pnf("var x; Y x < x - 2"), 1, &EncodeOptions::default()).unwrap();
        let s = emit_smtlib(&cs, "QF_UFIDL");
        assert_eq!(s, emit_smtlib(&cs, "QF_UFIDL"));
        assert!(s.contains("(set-logic QF_UFIDL)"));
        assert!(s.contains("(declare-fun loop () Int)"));
        assert!(s.contains("(declare-fun Fx_o-1 (Int) Int)"));
        assert!(s.contains("(declare-fun P0 (Int) Bool)"));
        assert!(s.contains("(assert (= (Fx_o-1 0) (Fx_o0 (- 1))))"));
        assert!(s.contains("(< (Fx_o-1 1) (- (Fx_o0 1) 2))"));
        assert!(s.ends_with("(check-sat)\n(get-model)\n"));
    }

    #[test]
    fn model_parsing() {
        let text = "(\n  (define-fun loop () Int\n    2)\n  (define-fun P0 ((x!0 Int)) Bool\n    (ite (= x!0 0) false true))\n  (define-fun Fx_o0 ((x!0 Int)) Int\n    (ite (= x!0 (- 1)) 7 (ite (= x!0 4) (- 5) (Fx_o0!3 x!0))))\n  (define-fun Fx_o0!3 ((x!0 Int)) Int (let ((a!1 (+ x!0 1))) (* a!1 2)))\n)\n";
        let m = Model::parse(text).unwrap();
        assert_eq!(m.int_const("loop").unwrap(), 2);
        assert!(!m.bool_at("P0", 0).unwrap());
        assert!(m.bool_at("P0", 3).unwrap());
        assert_eq!(m.int_at("Fx_o0", -1).unwrap(), 7);
        assert_eq!(m.int_at("Fx_o0", 4).unwrap(), -5);
        assert_eq!(m.int_at("Fx_o0", 2).unwrap(), 6);
        assert_eq!(m.int_const("J0"), Err(ModelError::Missing("J0".into())));
        let wrapped = Model::parse("(model (define-fun loop () Int 0))").unwrap();
        assert_eq!(wrapped.int_const("loop").unwrap(), 0);
        assert!(Model::parse("((define-fun loop () Int 0)").is_err());
    }

    #[test]
    fn missing_solver_is_reported() {
        let cfg = SolverConfig::default().with_command("/nonexistent/solver-binary");
        let run = run_solver("(check-sat)\n", &cfg);
        assert_eq!(run.status, Status::SolverError);
        assert!(run.diagnostics.contains("cannot start"), "{}", run.diagnostics);
    }

    #[test]
    fn config_command_line() {
        assert_eq!(SolverConfig::default().with_command("z3").command, vec!["z3", "-in"]);
        assert_eq!(SolverConfig::default().with_command("/opt/z3").command, vec!["/opt/z3", "-in"]);
        assert_eq!(SolverConfig::default().with_command("cvc5 --lang smt2").command, vec!["cvc5", "--lang", "smt2"]);
    }
}
