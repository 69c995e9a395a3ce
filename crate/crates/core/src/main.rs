fn main() {
    std::process::exit(poset_ramsey::cli::run(std::env::args_os()));
}
