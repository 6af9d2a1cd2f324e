fn main() {
    std::process::exit(rdr::cli::main());
}
