//! Scenario runners (placeholder).
