fn main() {
    std::process::exit(laurent_sieve_cli::run(std::env::args_os()));
}
