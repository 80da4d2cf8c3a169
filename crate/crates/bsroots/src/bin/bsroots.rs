use bsroots::cli;

fn main() {
    std::process::exit(cli::run());
}
