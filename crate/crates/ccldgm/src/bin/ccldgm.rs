fn main() {
    std::process::exit(ccldgm::cli::main());
}
