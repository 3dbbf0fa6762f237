//! Driving the command-line front end from code: prepare a state, save it,
//! and ask the witness about it.

use framedrag::cli;

pub fn run_example() -> framedrag::Result<i32> {
    let dir = std::env::temp_dir().join(format!("framedrag-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let state = dir.join("m0.txt");
    let no_env: [(&str, &str); 0] = [];
    let mut out = Vec::new();
    let mut err = std::io::stderr();

    let code =
        cli::run(["framedrag", "prepare-state", "--prep", "m0", "--t", "10", "--out", state.to_str().unwrap()], no_env, &mut out, &mut err);
    assert_eq!(code, cli::EXIT_OK);
    let text = std::fs::read_to_string(&state)?;
    println!("{}", text.lines().take(9).collect::<Vec<_>>().join("\n"));

    let code = cli::run(["framedrag", "witness", "--state-file", state.to_str().unwrap()], no_env, &mut out, &mut err);
    print!("{}", String::from_utf8_lossy(&out));
    println!("witness exit code {code}");
    std::fs::remove_dir_all(&dir)?;
    Ok(code)
}

fn main() -> framedrag::Result<()> {
    run_example().map(|_| ())
}
