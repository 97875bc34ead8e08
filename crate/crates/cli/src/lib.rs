//! Configuration-driven verification of reflection-transmission models.

pub mod amplitude;
pub mod config;
pub mod expr;
pub mod report;
pub mod suite;

pub use amplitude::{amplitude_command, AmplitudeQuery, AmplitudeReport};
pub use config::{parse_config, ConfigError, ModelConfig};
pub use report::{emit_report, Format, VerificationReport};
pub use suite::{run_suite, CheckId};

/// Built-in bulk S-matrices, defects and check identifiers, one per line.
pub fn catalog_text() -> String {
    let mut out = String::from("bulk:\n");
    for line in [
        "identity:n=<dim>            S = I (default n=1)",
        "permutation:n=<dim>         S = P",
        "rational:n=<dim>,c=<c>      S = (k I + i c P)/(k + i c)",
    ] {
        out.push_str(&format!("  {line}\n"));
    }
    out.push_str("defect:\n");
    for line in [
        "delta:eta=<eta>             T = k/(k + i eta), R = -i eta/(k + i eta), lifted to the bulk dimension",
        "pure-transmission           T = I, R = 0",
        "pure-reflection             T = 0, R = I",
        "custom                      entries from the [custom_defect] table",
    ] {
        out.push_str(&format!("  {line}\n"));
    }
    out.push_str("checks:\n");
    for id in CheckId::catalog() {
        out.push_str(&format!("  {id}\n"));
    }
    out
}
