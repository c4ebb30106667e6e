use hyperheat_cli::{parse_cli, run_experiment, write_report, CliError};

fn main() {
    if let Ok(threads) = std::env::var("HYPERHEAT_THREADS") {
        match threads.parse::<usize>() {
            Ok(k) if k >= 1 => {
                rayon::ThreadPoolBuilder::new().num_threads(k).build_global().ok();
            }
            _ => {
                eprintln!("error: HYPERHEAT_THREADS must be a positive integer, got {threads:?}");
                std::process::exit(2);
            }
        }
    }

    let argv: Vec<String> = std::env::args().collect();
    let (name, config) = match parse_cli(&argv) {
        Ok(parsed) => parsed,
        Err(CliError::Clap(e)) => {
            // clap renders help/usage itself; exit code 0 for help, 2 else
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            e.print().ok();
            std::process::exit(code);
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };

    let report = match run_experiment(&name, &config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    };

    match write_report(&report, &config.out_dir) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
