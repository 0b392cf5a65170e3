fn main() {
    std::process::exit(tcf::cli::run());
}
