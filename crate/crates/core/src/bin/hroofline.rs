fn main() {
    std::process::exit(hroofline::report::cli_main(std::env::args_os()));
}
