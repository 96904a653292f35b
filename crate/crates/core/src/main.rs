fn main() {
    let outcome = nabla::cli::run(std::env::args_os());
    print!("{}", outcome.output);
    std::process::exit(outcome.code);
}
