fn main() {
    std::process::exit(aniso_gn::cli::run(std::env::args_os()));
}
