//! Published-figure presets: each preset is a set of scenario variants whose
//! metric sweeps are emitted into one CSV, series distinguished through the
//! `meta` column.

use rislink::Error;

use crate::runner::{run_ber, run_outage, Row, RunMethod};
use crate::scenario::Settings;

/// A named scenario variant inside one figure.
struct Series {
    label: &'static str,
    settings: Settings,
    methods: Vec<RunMethod>,
}

fn variant(base: &Settings, label: &'static str, f: impl FnOnce(&mut Settings)) -> Series {
    let mut s = base.clone();
    f(&mut s);
    Series { label, settings: s, methods: vec![RunMethod::Mc] }
}

fn with_bound(mut s: Series) -> Series {
    s.methods.push(RunMethod::Bound);
    s
}

/// Figure number → (metric kind, series list).
enum Kind {
    Outage,
    Ber,
}

pub fn reproduce(figure: u8, base: &Settings) -> Result<(Vec<Row>, Vec<String>), Error> {
    let (kind, series): (Kind, Vec<Series>) = match figure {
        // Outage vs transmit power across mobility models, N = 10, L = 1.
        2 => (
            Kind::Outage,
            vec![
                variant(base, "1d_L1", |s| {
                    s.topology = "1d".into();
                    s.phase_bits = 1;
                }),
                variant(base, "3d_L1", |s| {
                    s.topology = "3d".into();
                    s.phase_bits = 1;
                }),
                variant(base, "static_L1", |s| {
                    s.topology = "static".into();
                    s.phase_bits = 1;
                }),
                variant(base, "1d_perfect", |s| {
                    s.topology = "1d".into();
                    s.phase_bits = 0;
                }),
                variant(base, "1d_L1_N20", |s| {
                    s.topology = "1d".into();
                    s.phase_bits = 1;
                    s.n = 20;
                }),
            ],
        ),
        // Average BER vs transmit power across path-loss exponents, N = 10, L = 1, 1-D.
        3 => (
            Kind::Ber,
            vec![
                variant(base, "a2.0", |s| s.path_exponent = 2.0),
                variant(base, "a2.5", |s| s.path_exponent = 2.5),
                variant(base, "a3.0", |s| s.path_exponent = 3.0),
                variant(base, "a2.0_static", |s| {
                    s.path_exponent = 2.0;
                    s.topology = "static".into();
                }),
            ],
        ),
        // Outage vs transmit power across phase quantization levels and N.
        4 => (
            Kind::Outage,
            vec![
                with_bound(variant(base, "N10_L1", |s| {
                    s.n = 10;
                    s.phase_bits = 1;
                })),
                variant(base, "N10_L2", |s| {
                    s.n = 10;
                    s.phase_bits = 2;
                }),
                variant(base, "N10_perfect", |s| {
                    s.n = 10;
                    s.phase_bits = 0;
                }),
                variant(base, "N20_L1", |s| {
                    s.n = 20;
                    s.phase_bits = 1;
                }),
            ],
        ),
        // Average BER vs transmit power across phase quantization levels and N.
        5 => (
            Kind::Ber,
            vec![
                with_bound(variant(base, "N10_L2", |s| {
                    s.n = 10;
                    s.phase_bits = 2;
                })),
                variant(base, "N20_L1", |s| {
                    s.n = 20;
                    s.phase_bits = 1;
                }),
                variant(base, "N50_L1", |s| {
                    s.n = 50;
                    s.phase_bits = 1;
                }),
                variant(base, "N10_perfect", |s| {
                    s.n = 10;
                    s.phase_bits = 0;
                }),
            ],
        ),
        // Outage vs transmit power with the direct link combined.
        6 => (
            Kind::Outage,
            vec![
                variant(base, "direct_only", |s| {
                    s.direct_enabled = true;
                    s.n = 1;
                    s.ris_cal_db = -300.0; // RIS branch suppressed
                    s.phase_bits = 0;
                }),
                variant(base, "N10_omega0", |s| {
                    s.n = 10;
                    s.direct_enabled = false;
                    s.phase_bits = 0;
                }),
                variant(base, "N10_omega1", |s| {
                    s.n = 10;
                    s.direct_enabled = true;
                    s.phase_bits = 0;
                }),
                variant(base, "N20_omega1", |s| {
                    s.n = 20;
                    s.direct_enabled = true;
                    s.phase_bits = 0;
                }),
            ],
        ),
        // Average BER vs transmit power with the direct link combined.
        7 => (
            Kind::Ber,
            vec![
                variant(base, "direct_only", |s| {
                    s.direct_enabled = true;
                    s.n = 1;
                    s.ris_cal_db = -300.0;
                    s.phase_bits = 0;
                }),
                variant(base, "N10_omega0", |s| {
                    s.n = 10;
                    s.direct_enabled = false;
                    s.phase_bits = 0;
                }),
                variant(base, "N10_omega1", |s| {
                    s.n = 10;
                    s.direct_enabled = true;
                    s.phase_bits = 0;
                }),
                variant(base, "N20_omega1", |s| {
                    s.n = 20;
                    s.direct_enabled = true;
                    s.phase_bits = 0;
                }),
            ],
        ),
        other => {
            return Err(Error::Domain(format!(
                "reproduce-figure takes a figure number in 2..=7 (got {other})"
            )))
        }
    };

    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for sr in series {
        let (mut part, mut ns) = match kind {
            Kind::Outage => run_outage(&sr.settings, &sr.methods)?,
            Kind::Ber => run_ber(&sr.settings, &sr.methods)?,
        };
        for row in &mut part {
            row.meta.insert(0, ("series".into(), sr.label.into()));
        }
        rows.append(&mut part);
        notes.append(&mut ns);
    }
    Ok((rows, notes))
}
