use std::process::ExitCode;

use clap::Parser;
use ssim_eghs::cli::{run, Args, RunConfig};

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = RunConfig::from_args(args).and_then(|config| run(&config));
    match outcome {
        Ok(result) => {
            println!(
                "seed SSIM {:.6}, final SSIM {:.6}, {} iterations, stop: {}",
                result.initial_ssim,
                result.final_ssim,
                result.trace.len(),
                result
                    .trace
                    .stop_reason()
                    .map_or("none", |reason| reason.as_str())
            );
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
