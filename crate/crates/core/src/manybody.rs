//! Truncated many-body Hamiltonian and propagation (placeholder).
