use std::process::ExitCode;

use resiliency_core::engine::check_resiliency_with;

fn main() -> ExitCode {
    let code = resiliency_cli::main_with_engine(std::env::args().collect(), &check_resiliency_with);
    ExitCode::from(code as u8)
}
