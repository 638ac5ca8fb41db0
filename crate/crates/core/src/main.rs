use std::io::Write;

fn main() {
    let out = lfree::cli::run(std::env::args_os());
    // Output is assembled in full before anything is written.
    std::io::stdout().write_all(out.stdout.as_bytes()).ok();
    std::io::stderr().write_all(out.stderr.as_bytes()).ok();
    std::process::exit(out.code);
}
