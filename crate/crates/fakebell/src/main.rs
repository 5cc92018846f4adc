fn main() {
    std::process::exit(fakebell::cli::run());
}
