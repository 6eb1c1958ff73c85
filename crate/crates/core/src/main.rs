fn main() -> std::process::ExitCode {
    daspec::cli::run()
}
