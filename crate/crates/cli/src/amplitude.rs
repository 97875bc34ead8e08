//! The `amplitude` query: engine term list evaluated at physical components.

use serde::{Deserialize, Serialize};

use rtcheck_core::fock::{amplitude_substitution, check_ordering, in_component, n_particle_amplitude, out_component};
use rtcheck_core::Error as CoreError;

use crate::config::{ConfigError, ModelConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairingEntry {
    pub annihilator: String,
    pub creator: String,
    /// `+1` for `δ(p − k)`, `−1` for `δ(p + k)`.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeTerm {
    pub pairing: Vec<PairingEntry>,
    /// Whether every δ of the pairing has support at the queried momenta.
    pub supported: bool,
    /// Coefficient `[re, im]` with each outgoing momentum, and its component, moved onto
    /// the support of the pairing.
    pub value: [f64; 2],
    /// Power of 2π carried by `value`.
    pub delta_normalization: i32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeReport {
    pub n: usize,
    pub in_momenta: Vec<f64>,
    pub out_momenta: Vec<f64>,
    pub in_components: Vec<usize>,
    pub out_components: Vec<usize>,
    pub physical: bool,
    pub terms: Vec<AmplitudeTerm>,
}

#[derive(Clone, Debug, Default)]
pub struct AmplitudeQuery {
    pub n: usize,
    pub in_momenta: Vec<f64>,
    pub out_momenta: Vec<f64>,
    /// Iso-spin index per incoming particle; zeros when empty.
    pub in_iso: Vec<usize>,
    pub out_iso: Vec<usize>,
    pub allow_nonphysical: bool,
}

fn iso_or_default(iso: &[usize], n: usize, what: &str) -> Result<Vec<usize>, ConfigError> {
    match iso.len() {
        0 => Ok(vec![0; n]),
        len if len == n => Ok(iso.to_vec()),
        len => Err(ConfigError::Invalid(format!("{what} lists {len} iso-spin indices for {n} particles"))),
    }
}

pub fn amplitude_command(config: &ModelConfig, q: &AmplitudeQuery) -> Result<AmplitudeReport, ConfigError> {
    let n = q.n;
    for (what, list) in [("--in", &q.in_momenta), ("--out", &q.out_momenta)] {
        if list.len() != n {
            return Err(ConfigError::Invalid(format!("{what} lists {} momenta for n = {n}", list.len())));
        }
    }
    let physical = check_ordering(&q.in_momenta, &q.out_momenta);
    if let Err(e) = &physical {
        if !q.allow_nonphysical || matches!(e, CoreError::ZeroMomentum(_)) {
            return Err(ConfigError::Model(physical.unwrap_err()));
        }
    }
    let model = config.build()?;
    let nb = model.bulk_dim();
    let in_iso = iso_or_default(&q.in_iso, n, "--in-iso")?;
    let out_iso = iso_or_default(&q.out_iso, n, "--out-iso")?;
    let in_components =
        q.in_momenta.iter().zip(&in_iso).map(|(&k, &i)| in_component(k, i, nb)).collect::<Result<Vec<_>, _>>()?;
    let out_components =
        q.out_momenta.iter().zip(&out_iso).map(|(&p, &i)| out_component(p, i, nb)).collect::<Result<Vec<_>, _>>()?;

    let expr = n_particle_amplitude(&model, &q.in_momenta, &q.out_momenta)?.with_two_pi();
    let mut subst = amplitude_substitution(&q.in_momenta, &q.out_momenta);
    for i in 0..n {
        subst = subst.component(format!("k{}", i + 1), in_components[i]);
        subst = subst.component(format!("p{}", i + 1), out_components[i]);
    }

    let mut terms = Vec::with_capacity(expr.terms().len());
    for t in expr.terms() {
        let supported = t.check_substitution(&subst).is_ok();
        let mut on_support = subst.clone().on_pairing(&t.pairing)?;
        for (j, &iso) in out_iso.iter().enumerate() {
            let label = format!("p{}", j + 1);
            let p = on_support.momentum_of(&label)?;
            on_support = on_support.component(label, out_component(p, iso, nb)?);
        }
        let value = t.value(&on_support)?;
        terms.push(AmplitudeTerm {
            pairing: t
                .pairing
                .iter()
                .map(|c| PairingEntry { annihilator: c.annihilator.clone(), creator: c.creator.clone(), sign: c.sign })
                .collect(),
            supported,
            value: [value.re, value.im],
            delta_normalization: t.delta_normalization,
        });
    }

    Ok(AmplitudeReport {
        n,
        in_momenta: q.in_momenta.clone(),
        out_momenta: q.out_momenta.clone(),
        in_components,
        out_components,
        physical: expr.physical,
        terms,
    })
}

pub fn emit_amplitude_text(r: &AmplitudeReport) -> String {
    let mut out = format!(
        "n={} in={:?} out={:?} components in={:?} out={:?}{}\n",
        r.n,
        r.in_momenta,
        r.out_momenta,
        r.in_components,
        r.out_components,
        if r.physical { "" } else { " (non-physical ordering)" }
    );
    for t in &r.terms {
        let deltas: Vec<String> = t
            .pairing
            .iter()
            .map(|c| format!("δ({} {} {})", c.annihilator, if c.sign > 0 { "-" } else { "+" }, c.creator))
            .collect();
        let deltas = if deltas.is_empty() { "1".to_string() } else { deltas.join(" ") };
        out.push_str(&format!(
            "{:<9} ({:+.12e} {:+.12e}i) {deltas}\n",
            if t.supported { "supported" } else { "off-shell" },
            t.value[0],
            t.value[1]
        ));
    }
    out
}
