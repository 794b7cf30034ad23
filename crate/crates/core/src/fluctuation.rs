//! Fluctuation dynamics and generator (placeholder).
