fn main() {
    let args: Vec<_> = std::env::args_os().collect();
    let code = shapes::eval::with_big_stack(move || shapes::cli::run_cli(args));
    std::process::exit(code);
}
