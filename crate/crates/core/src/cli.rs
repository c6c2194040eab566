//! Command-line front end.
//!
//! Each subcommand reads generator files, runs one operation and writes its
//! results. [`run_command`] never touches the process state beyond the file
//! system, so tests can drive it directly.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::automata::{self, Alphabet, Equivalence, EventId, Generator};
use crate::error::Error;
use crate::fixtures::{TransferLine, TRANSFER_LINE_FILES};
use crate::format::{emit_generator, parse_generator};
use crate::localization::{
    check_joint_equivalence, event_reduction_report, localize_all, rsup_event_count, AgentSpec,
};
use crate::oracle::oracle_equal;
use crate::reduction::supreduce;
use crate::synthesis::{check_normal, condat_table, control_data, supcon};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CommandResult {
    pub exit_code: i32,
    pub stdout_report: String,
    /// Error text meant for stderr.
    pub diagnostics: String,
    pub output_files: Vec<PathBuf>,
}

#[derive(Parser, Debug)]
#[command(
    name = "desloc",
    version,
    about = "Supervisory control of discrete-event systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synchronous product of one or more generators.
    Sync {
        out: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Product in which every event must be defined in both generators.
    Meet {
        out: PathBuf,
        a: PathBuf,
        b: PathBuf,
    },
    /// Keep only reachable and coreachable states.
    Trim { out: PathBuf, input: PathBuf },
    /// Exit 0 if the generator is nonblocking, 1 otherwise.
    Nonblocking { input: PathBuf },
    /// Add self-loops on the given events at every state.
    Selfloop {
        out: PathBuf,
        input: PathBuf,
        events: String,
    },
    /// Natural projection onto the kept events.
    Project {
        out: PathBuf,
        input: PathBuf,
        #[arg(long)]
        keep: String,
    },
    /// Supremal controllable sublanguage of the specification.
    Supcon {
        out: PathBuf,
        plant: PathBuf,
        spec: PathBuf,
    },
    /// States of SUP where events are disabled.
    Condat {
        plant: PathBuf,
        sup: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduced supervisor, control equivalent to SUP.
    Supreduce {
        out: PathBuf,
        plant: PathBuf,
        sup: PathBuf,
    },
    /// One local controller per agent, written as OUTDIR/NAME.gen with
    /// everywhere-self-looped events removed and OUTDIR/full/NAME.gen over
    /// the full alphabet.
    Localize {
        outdir: PathBuf,
        plant: PathBuf,
        sup: PathBuf,
        /// NAME=ids, e.g. M1=1,2
        #[arg(long = "agent", required = true)]
        agents: Vec<String>,
    },
    /// Exit 0 iff the controllers jointly act on the plant exactly as SUP.
    Checkeq {
        plant: PathBuf,
        sup: PathBuf,
        #[arg(required = true)]
        controllers: Vec<PathBuf>,
    },
    /// Exit 0 iff L(K) is normal w.r.t. L(PLANT) and the observable events.
    Checknormal {
        plant: PathBuf,
        k: PathBuf,
        #[arg(long)]
        observable: String,
    },
    /// Compare two generators by bounded string enumeration.
    OracleEq {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 10)]
        maxlen: usize,
    },
    /// Compare controller state and event counts against a reduced
    /// supervisor.
    EventReport {
        rsup: PathBuf,
        #[arg(required = true)]
        controllers: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the bundled transfer-line model, plant and specification.
    Fixture { outdir: PathBuf },
}

/// Failure of a subcommand, already classified by exit code.
struct Failure {
    code: i32,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_RESOURCE,
            Error::Construction(_) => EXIT_NEGATIVE,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

fn input_failure(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        msg: msg.into(),
    }
}

#[derive(Default)]
struct Session {
    report: String,
    written: Vec<PathBuf>,
    code: i32,
}

type Step = std::result::Result<(), Failure>;

impl Session {
    fn read(&self, path: &Path) -> std::result::Result<Generator, Failure> {
        let text = fs::read_to_string(path)
            .map_err(|e| input_failure(format!("{}: {e}", path.display())))?;
        parse_generator(&text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
    }

    fn write(&mut self, path: &Path, contents: &str) -> Step {
        write_atomic(path, contents)
            .map_err(|e| input_failure(format!("{}: {e}", path.display())))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }

    fn write_gen(&mut self, path: &Path, g: &Generator) -> Step {
        self.write(path, &emit_generator(g))?;
        writeln!(
            self.report,
            "{}: {} states, {} transitions",
            path.display(),
            g.state_count(),
            g.transition_count()
        )
        .unwrap();
        Ok(())
    }

    fn verdict(&mut self, ok: bool, line: String) {
        self.report.push_str(&line);
        self.report.push('\n');
        if !ok {
            self.code = EXIT_NEGATIVE;
        }
    }

    fn equivalence(&mut self, what: &str, eq: &Equivalence) {
        match eq {
            Equivalence::Equal => self.verdict(true, format!("{what}: equal")),
            Equivalence::Differ(w) => self.verdict(false, format!("{what}: differ at {w}")),
        }
    }
}

/// Write to a sibling temporary file, then rename over `path`.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::other("output path has no file name"))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)
}

fn parse_ids(text: &str) -> std::result::Result<BTreeSet<EventId>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map(EventId)
                .map_err(|_| input_failure(format!("invalid event id '{t}'")))
        })
        .collect()
}

fn parse_agent(text: &str, plant: &Alphabet) -> std::result::Result<AgentSpec, Failure> {
    let (name, ids) = text
        .split_once('=')
        .ok_or_else(|| input_failure(format!("agent '{text}' is not NAME=ids")))?;
    if name.is_empty() {
        return Err(input_failure(format!("agent '{text}' has no name")));
    }
    Ok(AgentSpec::new(name, parse_ids(ids)?, plant))
}

/// Alphabet for `events`, keeping the controllability `g` already declares
/// and defaulting the rest.
fn alphabet_for(
    g: &Generator,
    events: BTreeSet<EventId>,
) -> std::result::Result<Alphabet, Failure> {
    let controllable = events
        .iter()
        .copied()
        .filter(|&e| {
            if g.alphabet().contains(e) {
                g.alphabet().is_controllable(e)
            } else {
                e.default_controllable()
            }
        })
        .collect();
    Ok(Alphabet::new(events, controllable)?)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

fn execute(cmd: Command, s: &mut Session) -> Step {
    match cmd {
        Command::Sync { out, inputs } => {
            let gens = inputs
                .iter()
                .map(|p| s.read(p))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Generator> = gens.iter().collect();
            let g = automata::sync(&refs)?.with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Meet { out, a, b } => {
            let g = automata::meet(&s.read(&a)?, &s.read(&b)?)?.with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Trim { out, input } => {
            let g = automata::trim(&s.read(&input)?).with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Nonblocking { input } => {
            let g = s.read(&input)?;
            let ok = automata::is_nonblocking(&g);
            s.verdict(
                ok,
                format!(
                    "{}: {}",
                    g.name(),
                    if ok { "nonblocking" } else { "blocking" }
                ),
            );
            Ok(())
        }
        Command::Selfloop { out, input, events } => {
            let g = s.read(&input)?;
            let alphabet = alphabet_for(&g, parse_ids(&events)?)?;
            let g = automata::selfloop(&g, &alphabet)?.with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Project { out, input, keep } => {
            let g = automata::project(&s.read(&input)?, &parse_ids(&keep)?).with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Supcon { out, plant, spec } => {
            let g = supcon(&s.read(&plant)?, &s.read(&spec)?)?.with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Condat { plant, sup, out } => {
            let sup = s.read(&sup)?;
            let table = condat_table(sup.name(), &control_data(&s.read(&plant)?, &sup)?);
            match out {
                Some(out) => s.write(&out, &table)?,
                None => s.report.push_str(&table),
            }
            Ok(())
        }
        Command::Supreduce { out, plant, sup } => {
            let g = supreduce(&s.read(&plant)?, &s.read(&sup)?)?.with_name(stem(&out));
            s.write_gen(&out, &g)
        }
        Command::Localize {
            outdir,
            plant,
            sup,
            agents,
        } => {
            let plant = s.read(&plant)?;
            let sup = s.read(&sup)?;
            let agents = agents
                .iter()
                .map(|a| parse_agent(a, plant.alphabet()))
                .collect::<Result<Vec<_>, _>>()?;
            let locs = localize_all(&plant, &sup, &agents)?;
            for c in &locs.controllers {
                let file = format!("{}.gen", c.agent.name);
                s.write_gen(&outdir.join(&file), &c.stripped)?;
                s.write(
                    &outdir.join("full").join(&file),
                    &emit_generator(&c.generator),
                )?;
            }
            let rsup = supreduce(&plant, &sup)?;
            s.report.push_str(&event_reduction_report(&locs, &rsup));
            Ok(())
        }
        Command::Checkeq {
            plant,
            sup,
            controllers,
        } => {
            let plant = s.read(&plant)?;
            let sup = s.read(&sup)?;
            let locs = controllers
                .iter()
                .map(|p| s.read(p))
                .collect::<Result<Vec<_>, _>>()?;
            let refs: Vec<&Generator> = locs.iter().collect();
            let (closed, marked) = check_joint_equivalence(&plant, &sup, &refs)?;
            s.equivalence("closed behaviour", &closed);
            s.equivalence("marked behaviour", &marked);
            Ok(())
        }
        Command::Checknormal {
            plant,
            k,
            observable,
        } => {
            let plant = s.read(&plant)?;
            let k = s.read(&k)?;
            match check_normal(&plant, &k, &parse_ids(&observable)?)? {
                Equivalence::Equal => s.verdict(true, format!("{}: normal", k.name())),
                Equivalence::Differ(w) => {
                    s.verdict(false, format!("{}: not normal, differs at {w}", k.name()))
                }
            }
            Ok(())
        }
        Command::OracleEq { a, b, maxlen } => {
            let eq = oracle_equal(&s.read(&a)?, &s.read(&b)?, maxlen)?;
            s.equivalence(&format!("languages up to length {maxlen}"), &eq);
            Ok(())
        }
        Command::EventReport {
            rsup,
            controllers,
            out,
        } => {
            let rsup = s.read(&rsup)?;
            let rsup_events = rsup_event_count(&rsup);
            let mut table =
                String::from("controller\tloc_states\trsup_states\tloc_events\trsup_events\tlocalizable\tevent_reduced\n");
            let mut all_ok = true;
            for p in &controllers {
                let g = s.read(p)?;
                let events = g.used_events().len();
                let localizable = g.state_count() < rsup.state_count();
                let reduced = events < rsup_events;
                all_ok &= localizable && reduced;
                writeln!(
                    table,
                    "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                    g.name(),
                    g.state_count(),
                    rsup.state_count(),
                    events,
                    rsup_events,
                    if localizable { "yes" } else { "no" },
                    if reduced { "yes" } else { "no" },
                )
                .unwrap();
            }
            match out {
                Some(out) => s.write(&out, &table)?,
                None => s.report.push_str(&table),
            }
            if !all_ok {
                s.code = EXIT_NEGATIVE;
            }
            Ok(())
        }
        Command::Fixture { outdir } => {
            for (name, text) in TRANSFER_LINE_FILES {
                s.write(&outdir.join(name), text)?;
            }
            let tl = TransferLine::load()?;
            s.write_gen(&outdir.join("TL.gen"), &tl.plant)?;
            s.write_gen(&outdir.join("BUF.gen"), &tl.spec)?;
            Ok(())
        }
    }
}

/// Parse `argv` (including the program name) and run the subcommand.
pub fn run_command<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CommandResult {
                    exit_code: code,
                    stdout_report: text,
                    ..Default::default()
                }
            } else {
                CommandResult {
                    exit_code: code,
                    diagnostics: text,
                    ..Default::default()
                }
            };
        }
    };
    let mut session = Session::default();
    let outcome = execute(cli.command, &mut session);
    let mut result = CommandResult {
        exit_code: session.code,
        stdout_report: session.report,
        diagnostics: String::new(),
        output_files: session.written,
    };
    if let Err(f) = outcome {
        result.exit_code = f.code;
        result.diagnostics = format!("error: {}\n", f.msg);
    }
    result
}
