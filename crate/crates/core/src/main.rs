fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(topoband::cli::run(&args));
}
