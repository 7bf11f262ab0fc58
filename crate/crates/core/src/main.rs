fn main() {
    std::process::exit(fragmix::cli::main());
}
