//! Acceptance criteria, one line each.

use std::process::ExitCode;

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, ..) in vorlab::suite::CRITERIA {
        let o = vorlab::suite::run(id).expect("listed criterion");
        println!("{o}");
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria passed", vorlab::suite::CRITERIA.len() - failed, vorlab::suite::CRITERIA.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
