//! Line-oriented session over one growing program.
//!
//! `decl`, `fact` and `axiom` lines extend the program (an item may span
//! several lines and ends at a line ending in `.`). Every change re-parses
//! and re-validates the whole program, so a rejected line leaves the session
//! as it was.

use theoria_core::dsl::parse_query_body;

use crate::{
    load, parse_trace_target, write_trace, CliError, CliResult, Inputs, Io, Loaded, EXIT_OK,
};

const HELP: &str = "\
commands:
  decl ... . | fact ... . | axiom ... .   extend the program
  query <body>                            answer a conjunctive query
  trace <atom> @ <situation>              print a proof tree
  situations                              list known situations
  help                                    this text
  quit                                    leave the session";

struct Session {
    inputs: Inputs,
    added: Vec<(String, String)>,
    loaded: Option<Loaded>,
}

impl Session {
    fn new(inputs: Inputs) -> CliResult<Self> {
        let loaded = if has_sources(&inputs) {
            Some(load(&inputs, &[])?)
        } else {
            None
        };
        Ok(Session {
            inputs,
            added: Vec::new(),
            loaded,
        })
    }

    fn loaded(&self) -> CliResult<&Loaded> {
        self.loaded
            .as_ref()
            .ok_or_else(|| CliError::Usage("the program is empty".into()))
    }

    fn add(&mut self, label: String, text: String) -> CliResult<()> {
        self.added.push((label, text));
        match load(&self.inputs, &self.added) {
            Ok(l) => {
                self.loaded = Some(l);
                Ok(())
            }
            Err(e) => {
                self.added.pop();
                Err(e)
            }
        }
    }

    fn query(&self, text: &str, io: &mut Io<'_>) -> CliResult<()> {
        let loaded = self.loaded()?;
        let body = parse_query_body(text)?;
        let answers = loaded.model()?.query(&body)?;
        if answers.is_empty() {
            writeln!(io.stdout, "no answers")?;
        }
        for a in answers {
            writeln!(io.stdout, "{a}")?;
        }
        Ok(())
    }

    fn trace(&self, text: &str, io: &mut Io<'_>) -> CliResult<()> {
        let loaded = self.loaded()?;
        let fact = parse_trace_target(loaded, text)?;
        let proof = loaded.model()?.prove(&fact);
        write_trace(proof.as_ref(), false, io)?;
        Ok(())
    }

    fn situations(&self, io: &mut Io<'_>) -> CliResult<()> {
        let loaded = self.loaded()?;
        for s in loaded.store.situations() {
            writeln!(io.stdout, "{}\t{}", s.id(), s.term())?;
        }
        Ok(())
    }
}

fn has_sources(inputs: &Inputs) -> bool {
    !inputs.programs.is_empty() || !inputs.builtin.is_empty() || inputs.scenario.is_some()
}

fn is_program_item(line: &str) -> bool {
    ["decl ", "fact ", "axiom "]
        .iter()
        .any(|k| line.starts_with(k))
}

pub(crate) fn run(inputs: Inputs, io: &mut Io<'_>) -> CliResult {
    let mut session = Session::new(inputs)?;
    let mut pending = String::new();
    let mut line_no = 0usize;
    let mut item_start = 0usize;
    loop {
        if io.interactive {
            let prompt = if pending.is_empty() { "> " } else { ". " };
            write!(io.stdout, "{prompt}")?;
            io.stdout.flush()?;
        }
        let mut line = String::new();
        if io.stdin.read_line(&mut line)? == 0 {
            break;
        }
        line_no += 1;
        let trimmed = line.trim();

        if !pending.is_empty() || is_program_item(trimmed) {
            if pending.is_empty() {
                item_start = line_no;
            }
            pending.push_str(&line);
            if !trimmed.ends_with('.') {
                continue;
            }
            let text = std::mem::take(&mut pending);
            // Pad with blank lines so diagnostics carry session line numbers.
            let padded = "\n".repeat(item_start - 1) + &text;
            match session.add("repl".to_string(), padded) {
                Ok(()) => writeln!(io.stdout, "ok")?,
                Err(e) => io.diagnostic(&e),
            }
            continue;
        }

        let (command, rest) = trimmed
            .split_once(char::is_whitespace)
            .map_or((trimmed, ""), |(c, r)| (c, r.trim()));
        let result = match command {
            "" => Ok(()),
            c if c.starts_with('%') => Ok(()),
            "quit" | "exit" => break,
            "help" => writeln!(io.stdout, "{HELP}").map_err(CliError::from),
            "query" => session.query(rest, io),
            "trace" => session.trace(rest, io),
            "situations" => session.situations(io),
            other => Err(CliError::Usage(format!(
                "unknown command `{other}` (try `help`)"
            ))),
        };
        if let Err(e) = result {
            io.diagnostic(&e);
        }
    }
    if !pending.trim().is_empty() {
        io.diagnostic(&CliError::Usage("incomplete item at end of input".into()));
    }
    Ok(EXIT_OK)
}
