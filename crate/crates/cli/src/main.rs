use std::io::Write;

fn main() {
    let out = latsum::run(std::env::args_os());
    if out.diagnostic {
        eprint!("{}", out.text);
    } else {
        let mut stdout = std::io::stdout().lock();
        // a closed pipe is not worth a panic
        let _ = stdout.write_all(out.text.as_bytes()).and_then(|()| stdout.flush());
    }
    std::process::exit(out.code);
}
