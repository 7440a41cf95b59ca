fn main() {
    std::process::exit(dctk::cli::run(std::env::args_os()));
}
