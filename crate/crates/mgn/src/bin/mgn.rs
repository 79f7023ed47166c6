use mgn::cli;

fn main() {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let result = cli::execute_command(&argv);
    if !result.payload.is_empty() {
        println!("{}", result.payload);
    }
    std::process::exit(result.status.exit_code());
}
