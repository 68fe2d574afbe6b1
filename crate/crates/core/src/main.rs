fn main() -> std::process::ExitCode {
    prepay_core::cli::main_entry()
}
