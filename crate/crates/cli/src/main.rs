fn main() -> std::process::ExitCode {
    mrtnet::app::main_with_exit_code()
}
