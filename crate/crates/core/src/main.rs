fn main() {
    std::process::exit(movoid::run());
}
