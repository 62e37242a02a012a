fn main() {
    std::process::exit(regrobust::cli::main_with(std::env::args_os()));
}
