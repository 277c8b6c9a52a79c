//! Round-trips a matrix through the JSON format and parses the plain-text one.

use specrad::ensemble::{generate, EnsembleKind, EnsembleSpec};
use specrad::io::{parse_matrix, read_matrix, write_matrix};

fn main() -> specrad::error::Result<()> {
    let t = generate(&EnsembleSpec::new(EnsembleKind::Ginibre, 3, 1))?;
    let path = std::env::temp_dir().join("specrad_example_matrix.json");
    write_matrix(&path, &t)?;
    let back = read_matrix(&path)?;
    println!("json round trip exact: {}", back == t);
    std::fs::remove_file(&path)?;

    // dimension, then one `re im` entry per line in row-major order
    let text = "2\n0 0\n1 0\n0 0\n0 0\n";
    let j = parse_matrix(text)?;
    println!("plain text: {:?}", j.row_major());

    match parse_matrix("2\n0 0\n1 0\nx 0\n0 0\n") {
        Err(e) => println!("malformed input rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
