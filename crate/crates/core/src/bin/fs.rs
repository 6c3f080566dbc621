fn main() -> std::process::ExitCode {
    finstruct::cli::main()
}
