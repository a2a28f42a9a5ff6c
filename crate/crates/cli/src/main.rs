fn main() {
    std::process::exit(micromacro_cli::cli_main(std::env::args_os()));
}
