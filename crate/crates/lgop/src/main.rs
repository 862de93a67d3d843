fn main() {
    std::process::exit(lgop::main_with_args(std::env::args_os()));
}
