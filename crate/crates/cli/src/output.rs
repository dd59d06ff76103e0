//! CSV and JSON rendering of a job's results.
//!
//! Floats are written with 17 significant digits in CSV and in shortest
//! round-trip form in JSON, so both parse back to the identical `f64`.

use std::io::Write;

use cavity_tmm::job::JobOutput;
use cavity_tmm::tmm::Region;
use serde::Serialize;

/// One CSV table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra `# key: value` lines written after the common header.
    pub notes: Vec<(String, String)>,
}

impl Table {
    fn new(name: &'static str, columns: &[&str]) -> Self {
        Table {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }
}

pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Serialized name of a unit enum variant.
fn tag<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn region_name(r: Region) -> (String, String) {
    match r {
        Region::LeftOuter => ("left_outer".into(), String::new()),
        Region::Gap(i) => ("gap".into(), i.to_string()),
        Region::RightOuter => ("right_outer".into(), String::new()),
    }
}

/// Every table present in `out`, in a fixed order.
pub fn tables(out: &JobOutput) -> Vec<Table> {
    let r = &out.results;
    let mut tables = Vec::new();

    if let Some(spectrum) = &r.spectrum {
        let mut t = Table::new("spectrum", &["k", "transmission", "denominator"]);
        t.rows = spectrum.iter().map(|s| vec![num(s.k), num(s.transmission), num(s.denominator)]).collect();
        tables.push(t);
    }

    if let Some(resonances) = &r.resonances {
        let mut t = Table::new(
            "resonances",
            &["k0", "transmission_peak", "kappa_curvature", "kappa_halfmax", "overlap_flag", "neighbor_spacing"],
        );
        t.rows = resonances
            .iter()
            .map(|res| {
                vec![
                    num(res.k0),
                    num(res.transmission_peak),
                    num(res.kappa_curvature),
                    opt(res.kappa_halfmax),
                    tag(&res.overlap_flag),
                    num(res.neighbor_spacing),
                ]
            })
            .collect();
        if let Some(c) = &r.overlap_criterion {
            t.notes.push(("overlap_criterion".into(), serde_json::to_string(c).unwrap_or_default()));
        }
        tables.push(t);
    }

    if let Some(fields) = &r.fields {
        let mut t = Table::new(
            "fields",
            &[
                "k",
                "incidence",
                "region",
                "gap_index",
                "c_plus_re",
                "c_plus_im",
                "c_minus_re",
                "c_minus_im",
                "mean_intensity",
            ],
        );
        for map in fields {
            for s in &map.segments {
                let (region, gap) = region_name(s.region);
                t.rows.push(vec![
                    num(map.k),
                    tag(&map.incidence),
                    region,
                    gap,
                    num(s.c_plus.re),
                    num(s.c_plus.im),
                    num(s.c_minus.re),
                    num(s.c_minus.im),
                    num(s.mean_intensity),
                ]);
            }
        }
        tables.push(t);
    }

    if let Some(entries) = &r.couplings {
        tables.push(couplings_table(out, entries));
    }

    if let Some(points) = &r.sweep {
        let mut t = Table::new(
            "sweep",
            &[
                "zeta_prime",
                "short_request",
                "short",
                "long",
                "k0",
                "transmission_peak",
                "kappa",
                "overlap_flag",
                "om_coupling",
                "om_reference",
                "om_ratio",
                "c_om",
                "error",
            ],
        );
        t.rows = points
            .iter()
            .map(|p| {
                vec![
                    num(p.zeta_prime),
                    num(p.short_request),
                    opt(p.short),
                    opt(p.long),
                    opt(p.k0),
                    opt(p.transmission_peak),
                    opt(p.kappa),
                    p.overlap_flag.as_ref().map(tag).unwrap_or_default(),
                    opt(p.om_coupling),
                    opt(p.om_reference),
                    opt(p.om_ratio()),
                    opt(p.c_om),
                    p.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        tables.push(t);
    }

    tables
}

fn couplings_table(out: &JobOutput, entries: &[cavity_tmm::job::CouplingEntry]) -> Table {
    let gaps = out.meta.elements.len().saturating_sub(1);
    let has_emitter = out.meta.config.emitter.is_some();
    let mut labels: Vec<String> = Vec::new();
    for rep in entries.iter().filter_map(|e| e.report.as_ref()) {
        for r in &rep.references {
            if !labels.contains(&r.label) {
                labels.push(r.label.clone());
            }
        }
    }

    let mut columns: Vec<String> = [
        "k0",
        "kappa",
        "transmission_peak",
        "overlap_flag",
        "om_element",
        "om_coupling",
        "om_delta_x",
        "om_linearity_deviation",
        "c_om",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if has_emitter {
        columns.extend((0..gaps).map(|i| format!("g_{i}")));
        columns.extend((0..gaps).map(|i| format!("c_jc_{i}")));
    }
    columns.extend(labels.iter().map(|l| format!("c_om_over_{l}")));
    if has_emitter {
        columns.extend(labels.iter().map(|l| format!("g_over_{l}")));
    }
    columns.push("warnings".into());
    columns.push("error".into());

    let mut t = Table::new("couplings", &[]);
    t.columns = columns;
    for e in entries {
        let Some(rep) = &e.report else {
            let mut row = vec![String::new(); t.columns.len()];
            row[0] = num(e.k0);
            *row.last_mut().unwrap() = e.error.clone().unwrap_or_default();
            t.rows.push(row);
            continue;
        };
        let res = &rep.resonance;
        let mut row = vec![
            num(res.k0),
            num(res.kappa_curvature),
            num(res.transmission_peak),
            tag(&res.overlap_flag),
            rep.om.map(|o| o.element.to_string()).unwrap_or_default(),
            opt(rep.om.map(|o| o.value)),
            opt(rep.om.map(|o| o.delta_x)),
            opt(rep.om.map(|o| o.linearity_deviation)),
            opt(rep.c_om),
        ];
        if has_emitter {
            row.extend((0..gaps).map(|i| opt(rep.jc.get(i).map(|j| j.g))));
            row.extend((0..gaps).map(|i| opt(rep.c_jc_per_gap.get(i).copied())));
        }
        for l in &labels {
            let ratio = rep.reference(l).zip(rep.c_om).map(|(r, c)| c / r.c_om);
            row.push(opt(ratio));
        }
        if has_emitter {
            // Ratio of the largest per-gap g to the reference g.
            let g_max = rep.jc.iter().map(|j| j.g.abs()).reduce(f64::max);
            for l in &labels {
                let ratio = rep.reference(l).and_then(|r| r.g).zip(g_max).map(|(r, g)| g / r);
                row.push(opt(ratio));
            }
        }
        row.push(rep.warnings.join("; "));
        row.push(String::new());
        t.rows.push(row);
    }
    t
}

/// Writes `# key: value` header lines shared by every CSV table.
fn write_header(w: &mut impl Write, out: &JobOutput, table: &Table) -> std::io::Result<()> {
    writeln!(w, "# tool: {} {}", out.meta.tool, out.meta.version)?;
    writeln!(w, "# table: {}", table.name)?;
    writeln!(w, "# config: {}", serde_json::to_string(&out.meta.config)?)?;
    writeln!(w, "# elements: {}", serde_json::to_string(&out.meta.elements)?)?;
    for (k, v) in &table.notes {
        writeln!(w, "# {k}: {v}")?;
    }
    Ok(())
}

pub fn write_csv_table(w: &mut impl Write, out: &JobOutput, table: &Table) -> std::io::Result<()> {
    write_header(w, out, table)?;
    let mut csv = csv::Writer::from_writer(w);
    csv.write_record(&table.columns)?;
    for row in &table.rows {
        csv.write_record(row)?;
    }
    csv.flush()?;
    Ok(())
}

pub fn render_json(out: &JobOutput) -> String {
    let mut s = serde_json::to_string_pretty(out).expect("output serializes");
    s.push('\n');
    s
}
