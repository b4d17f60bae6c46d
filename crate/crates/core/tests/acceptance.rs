use std::process::ExitCode;

use conharm::verify;

fn main() -> ExitCode {
    let results = verify::run_all();
    for r in &results {
        println!("{} ({:.2} s)", r.line(), r.elapsed.as_secs_f64());
    }
    let failed: Vec<u8> = results.iter().filter(|r| !r.pass).map(|r| r.id).collect();
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", results.len(), results.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
