fn main() {
    std::process::exit(freelin::cli::main_with_args(std::env::args_os()));
}
