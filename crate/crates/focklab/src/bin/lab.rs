fn main() {
    eprintln!("lab: CLI not yet wired");
    std::process::exit(2);
}
