fn main() {
    std::process::exit(segnoise::cli::run(std::env::args_os()));
}
