fn main() {
    std::process::exit(degenlab::run());
}
