fn main() {
    std::process::exit(prgain::cli::run());
}
