fn main() {
    std::process::exit(splitrad::cli::run_main());
}
