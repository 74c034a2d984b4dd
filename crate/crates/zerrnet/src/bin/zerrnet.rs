fn main() {
    std::process::exit(zerrnet::cli::run(std::env::args()));
}
