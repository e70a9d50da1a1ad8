fn main() {
    std::process::exit(pie_cli::run(std::env::args_os()));
}
