fn main() {
    std::process::exit(phasecov::cli::run(std::env::args_os()));
}
