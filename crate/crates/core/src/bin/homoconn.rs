fn main() {
    std::process::exit(homoconn::report_cli::run(std::env::args_os()));
}
