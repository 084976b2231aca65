fn main() {
    std::process::exit(legfact::cli::run(std::env::args_os()));
}
