//! Write an assembled matrix to disk and read it back.

use std::fs::File;
use std::io::BufWriter;

use lovecap::kernel::{assemble, KernelMatrix, Separation};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = assemble(Separation::new(0.1)?, 20)?;
    let path = std::env::temp_dir().join("lovecap-kernel.bin");
    k.write_to(BufWriter::new(File::create(&path)?))?;
    let back = KernelMatrix::read_from(File::open(&path)?)?;
    println!(
        "{}: kappa = {}, N = {}, {} stored entries, {} bytes",
        path.display(),
        back.kappa(),
        back.trunc(),
        back.lower_triangle().len(),
        std::fs::metadata(&path)?.len()
    );
    assert_eq!(back, k);
    std::fs::remove_file(path)?;
    Ok(())
}
