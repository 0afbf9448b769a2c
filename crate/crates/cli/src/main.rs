fn main() {
    let args: Vec<String> = std::env::args().collect();
    let code = rankforge_cli::run_command(&args, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
