fn main() {
    syssamp::cli::configure_threads();
    std::process::exit(syssamp::cli::run(std::env::args_os()));
}
