use hls_cli::{parse_args, run, CliError, EXIT_USAGE};
use hls_core::parallel::{threads_from_env, with_threads};

fn main() {
    let code = match parse_args(std::env::args_os()) {
        Ok(cfg) => match with_threads(threads_from_env(), || run(&cfg)) {
            Ok(outcome) => outcome.exit_code,
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_USAGE
            }
        },
        Err(CliError::Args(e)) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    };
    std::process::exit(code);
}
