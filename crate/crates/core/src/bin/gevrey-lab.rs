fn main() {
    std::process::exit(gevrey_lab::cli::main_with_args(std::env::args_os()));
}
