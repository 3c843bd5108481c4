fn main() {
    std::process::exit(aap::cli::run(std::env::args_os()));
}
