fn main() {
    std::process::exit(cat0_boundary::cli::parse_and_dispatch(std::env::args_os()));
}
