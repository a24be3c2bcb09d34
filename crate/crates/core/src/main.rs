fn main() {
    std::process::exit(moving_box::cli::main());
}
