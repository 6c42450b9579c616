use fso_core::engine::{OutageMethod, SweepRow};
use fso_core::Fading;

use crate::config::RunConfig;

/// Column order of every CSV this crate writes.
pub const CSV_HEADER: [&str; 25] = [
    "axis",
    "axis_value",
    "scheme",
    "metric",
    "mean",
    "stderr",
    "samples",
    "seed",
    "r_a",
    "w_z",
    "d",
    "wavelength",
    "link_length",
    "fading",
    "alpha",
    "beta",
    "sigma_x",
    "sigma_y",
    "responsivity",
    "transmit_power",
    "slot_duration",
    "noise_density",
    "snr_db",
    "target",
    "outage_method",
];

/// Shortest round-trip text, switching to exponent form outside [1e-4, 1e6).
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e6).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

/// Renders sweep rows with a full parameter echo of the grid point each row
/// was computed at. Floats use the shortest round-trip representation, so
/// equal inputs give equal bytes.
pub fn render_csv(cfg: &RunConfig, rows: &[SweepRow]) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let base = cfg.resolved_scenario();
    let (metric, target, method) = if cfg.outage {
        let method = match cfg.outage_method {
            OutageMethod::Threshold => "threshold",
            OutageMethod::Direct => "direct",
        };
        ("outage", fmt_f64(cfg.target.get()), method)
    } else {
        ("ber", String::new(), "")
    };
    for row in rows {
        let s = row.axis.apply(&base, row.axis_value);
        let g = &s.geometry;
        let r = &s.radiometry;
        let (fading, alpha, beta) = match s.fading {
            Fading::GammaGamma(t) => ("gamma-gamma", fmt_f64(t.alpha), fmt_f64(t.beta)),
            Fading::Unit => ("none", String::new(), String::new()),
        };
        w.write_record([
            row.axis.as_str().to_string(),
            fmt_f64(row.axis_value),
            row.scheme.as_str().to_string(),
            metric.to_string(),
            fmt_f64(row.mean),
            fmt_f64(row.stderr),
            row.samples.to_string(),
            cfg.mc.master_seed.to_string(),
            fmt_f64(g.aperture_radius),
            fmt_f64(g.beam_waist),
            fmt_f64(g.receiver_separation),
            fmt_f64(g.wavelength),
            fmt_f64(g.link_length),
            fading.to_string(),
            alpha,
            beta,
            fmt_f64(s.pointing.sigma_x),
            fmt_f64(s.pointing.sigma_y),
            fmt_f64(r.responsivity),
            fmt_f64(r.transmit_power),
            fmt_f64(r.slot_duration),
            fmt_f64(r.noise_density),
            fmt_f64(r.snr_db()),
            target.clone(),
            method.to_string(),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
