fn main() {
    std::process::exit(qwldp::main_with_args(std::env::args_os()));
}
