fn main() {
    std::process::exit(tpsforge_cli::run_cli());
}
