fn main() -> std::process::ExitCode {
    toposnake::cli::main()
}
