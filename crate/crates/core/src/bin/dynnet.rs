fn main() {
    std::process::exit(dynnet::cli::run());
}
