use clap::Parser;

use setclass_cli::args::Cli;

fn main() {
    let cli = Cli::parse();
    match setclass_cli::run(&cli) {
        Ok(Some(text)) => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("setclass: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
