pub use num_complex::Complex64 as C64;
