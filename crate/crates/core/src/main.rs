fn main() {
    std::process::exit(disentangle::cli::run(std::env::args_os()));
}
