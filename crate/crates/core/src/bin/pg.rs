fn main() {
    std::process::exit(pachner::cli::run());
}
