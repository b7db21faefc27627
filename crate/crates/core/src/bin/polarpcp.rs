fn main() { std::process::exit(polarpcp::cli::run(std::env::args_os())); }
