fn main() {
    eprintln!("heatkernel: not yet wired up");
    std::process::exit(2);
}
