fn main() -> std::process::ExitCode {
    cmguard::cli::main()
}
