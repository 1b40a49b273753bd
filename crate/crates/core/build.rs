fn main() {
    // Reference LAPACK/BLAS from the system; dgges/dggev back the pencil solvers.
    println!("cargo:rustc-link-lib=lapack");
    println!("cargo:rustc-link-lib=blas");
}
