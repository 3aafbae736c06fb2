fn main() {
    std::process::exit(mlab::cli::run(std::env::args_os()));
}
