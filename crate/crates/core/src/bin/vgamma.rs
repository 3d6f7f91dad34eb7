fn main() {
    std::process::exit(vgamma::cli::run(std::env::args_os()));
}
