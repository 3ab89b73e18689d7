use std::process::ExitCode;

fn main() -> ExitCode {
    upslope::app::main()
}
