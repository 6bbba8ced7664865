//! `wrsp` command-line entry point.

fn main() {
    let code = wrsp_core::cli::run(
        std::env::args_os(),
        &mut std::io::stdout(),
        &mut std::io::stderr(),
    );
    std::process::exit(code);
}
