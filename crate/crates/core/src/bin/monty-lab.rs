fn main() -> std::process::ExitCode {
    monty_lab::cli::run()
}
