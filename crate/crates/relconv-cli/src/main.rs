fn main() {
    std::process::exit(relconv_cli::commands::run());
}
