fn main() {
    std::process::exit(projhull::cli::run(std::env::args_os()));
}
