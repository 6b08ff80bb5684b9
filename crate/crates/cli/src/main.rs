use std::io::IsTerminal;

use clap::Parser;

use omega_experiments::{execute, Flags};

fn styled(text: &str, code: &str) -> String {
    let plain = std::env::var_os("NO_COLOR").is_some() || !std::io::stdout().is_terminal();
    if plain {
        text.to_string()
    } else {
        format!("\x1b[{code}m{text}\x1b[0m")
    }
}

fn main() {
    let flags = Flags::parse();
    match execute(&flags) {
        Ok((report, written)) => {
            for row in &report.rows {
                let exact = match (&row.exact_num, &row.exact_den) {
                    (Some(a), Some(b)) => format!("{a}/{b}"),
                    _ => "-".into(),
                };
                println!(
                    "{} p={} n={} exact={} empirical={} {}",
                    styled(&row.mode, "1"),
                    row.p,
                    row.n,
                    exact,
                    row.empirical.as_deref().unwrap_or("-"),
                    row.extra
                );
            }
            for path in written {
                println!("{} {}", styled("wrote", "32"), path.display());
            }
        }
        Err(e) => {
            eprintln!("{}: {e}", styled("error", "31"));
            std::process::exit(e.exit_code());
        }
    }
}
