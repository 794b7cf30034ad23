//! Correlation kernels built from the condensate solution and the
//! scattering profiles (placeholder; filled in below).
