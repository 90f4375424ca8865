fn main() {
    std::process::exit(fdenoise::cli::run(std::env::args_os()));
}
