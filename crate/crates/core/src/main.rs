use std::process::ExitCode;

use clap::Parser;
use weavelab::cli::{run, Cli, EXIT_INTERNAL};

/// Worker count from `WEAVELAB_THREADS`; rayon's default when unset.
fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("WEAVELAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| format!("WEAVELAB_THREADS must be a positive integer, got {raw:?}"))?;
    if n == 0 {
        return Err("WEAVELAB_THREADS must be positive".into());
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code as u8)
        }
        Err(_) => ExitCode::from(EXIT_INTERNAL as u8),
    }
}
