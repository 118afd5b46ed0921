use selfbound_cli::{exit, parse_config, run, CliError};

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let code = match parse_config(std::env::args_os(), None).and_then(|cfg| run(&cfg)) {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            for f in &report.files {
                log::info!("wrote {}", f.display());
            }
            report.code
        }
        Err(CliError::Usage(msg)) => {
            // help and version requests render through the same path
            let is_info = msg.starts_with("Self-bound") || msg.starts_with("Usage") || msg.starts_with("selfbound ");
            if is_info {
                print!("{msg}");
                exit::SUCCESS
            } else {
                eprint!("{msg}");
                exit::VALIDATION
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
