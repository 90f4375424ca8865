//! Drive the command-line interface in-process: simulate a sample, denoise it, and
//! read the JSON summary.

use fdenoise::cli::run;

fn main() {
    let dir = std::env::temp_dir().join("fdenoise-cli");
    let sim = dir.join("sim");
    let out = dir.join("denoised");
    let code = run(["fdenoise", "simulate", "--n", "400", "--seed", "2", "--output-dir", sim.to_str().unwrap()]);
    assert_eq!(code, 0);
    let input = sim.join("y.csv");
    let code = run([
        "fdenoise", "denoise", "--input", input.to_str().unwrap(), "--pin-d", "2", "--seed", "3",
        "--output-dir", out.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    println!("{}", std::fs::read_to_string(out.join("summary.json")).unwrap());
}
