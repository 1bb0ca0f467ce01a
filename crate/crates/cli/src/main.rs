use std::process::ExitCode;

fn main() -> ExitCode {
    let seed_env = std::env::var(nisq_modal_cli::SEED_ENV).ok();
    let code = nisq_modal_cli::run_with(
        std::env::args_os(),
        seed_env.as_deref(),
        &mut std::io::stdout().lock(),
        &mut std::io::stderr().lock(),
    );
    ExitCode::from(code)
}
