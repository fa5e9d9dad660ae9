fn main() {
    std::process::exit(qmono::cli::main());
}
