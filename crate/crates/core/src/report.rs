//! Deterministic plain-text rendering of SFTs, certificates and analyses.
//! All output is a pure function of the inputs: no timestamps, no hashes of
//! addresses, no environment reads.

use std::fmt::Write as _;

use crate::error::Result;
use crate::group::{Backend, GroupContext, GroupElement};
use crate::shift::{PartialConfiguration, PeriodicConfiguration, SftDescription};
use crate::solvers::{Certificate, CertificateBody, TransferOutcome, VerifyReport, ZAnalysis};

pub fn render_sft(sft: &SftDescription) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "sft over {}", sft.group().name());
    let _ = writeln!(out, "  alphabet: {}", sft.alphabet().letters().join(" "));
    let _ = writeln!(out, "  forbidden patterns: {}", sft.forbidden().len());
    let mut sizes: Vec<usize> = sft.forbidden().iter().map(|p| p.len()).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let sizes: Vec<String> = sizes.iter().map(|s| s.to_string()).collect();
    if !sizes.is_empty() {
        let _ = writeln!(out, "  support sizes: {}", sizes.join(" "));
    }
    let _ = writeln!(out, "  digest: {}", sft.digest());
    out
}

fn render_grid_z(
    group: &GroupContext,
    lookup: &dyn Fn(&GroupElement) -> Option<String>,
    radius: i64,
) -> String {
    let mut cells = Vec::new();
    for x in -radius..=radius {
        let g = GroupElement::Vector(vec![x]);
        cells.push(lookup(&g).unwrap_or_else(|| ".".into()));
    }
    let _ = group;
    format!("  {}\n", cells.join(" "))
}

fn render_grid_z2(
    lookup: &dyn Fn(&GroupElement) -> Option<String>,
    x_range: (i64, i64),
    y_range: (i64, i64),
) -> String {
    let mut out = String::new();
    let mut y = y_range.1;
    while y >= y_range.0 {
        let mut row = Vec::new();
        for x in x_range.0..=x_range.1 {
            let g = GroupElement::Vector(vec![x, y]);
            row.push(lookup(&g).unwrap_or_else(|| ".".into()));
        }
        let _ = writeln!(out, "  {}", row.join(" "));
        y -= 1;
    }
    out
}

fn render_partial(group: &GroupContext, partial: &PartialConfiguration, names: &dyn Fn(u32) -> String, radius: usize) -> String {
    let lookup = |g: &GroupElement| partial.get(g).map(&names);
    match group.backend() {
        Backend::FreeAbelian { rank: 1 } => render_grid_z(group, &lookup, radius as i64),
        Backend::FreeAbelian { rank: 2 } => {
            let r = radius as i64;
            render_grid_z2(&lookup, (-r, r), (-r, r))
        }
        _ => {
            let mut out = String::new();
            for (g, &l) in partial.domain().iter().zip(partial.letters()) {
                let _ = writeln!(out, "  {} -> {}", group.render(g), names(l));
            }
            out
        }
    }
}

fn render_periodic(config: &PeriodicConfiguration) -> Result<String> {
    let mut out = String::new();
    let group = config.group();
    let names = |l: u32| config.alphabet().name(l).to_string();
    match group.backend() {
        Backend::FreeAbelian { rank: 1 } => {
            let kernel = config.quotient().kernel_lattice()?;
            let period = kernel[0][0];
            let _ = writeln!(out, "  period lattice: [[{period}]]");
            let mut cells = Vec::new();
            for x in 0..period.max(1) {
                cells.push(names(config.at(&GroupElement::Vector(vec![x]))?));
            }
            let _ = writeln!(out, "  repeating word: {}", cells.join(" "));
            let window = (2 * period).max(4);
            let lookup = |g: &GroupElement| config.at(g).ok().map(names);
            out.push_str(&render_grid_z(group, &lookup, window));
        }
        Backend::FreeAbelian { rank: 2 } => {
            let kernel = config.quotient().kernel_lattice()?;
            let rows: Vec<String> = kernel
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            let _ = writeln!(out, "  period lattice: [{}]", rows.join(","));
            let w = kernel[0][0].max(4);
            let h = kernel[1][1].max(4);
            let lookup = |g: &GroupElement| config.at(g).ok().map(names);
            out.push_str(&render_grid_z2(&lookup, (0, w - 1), (0, h - 1)));
        }
        _ => {
            let _ = writeln!(out, "  quotient order: {}", config.labeling().len());
            for (i, &l) in config.labeling().iter().enumerate() {
                let cell = GroupElement::Index(i);
                let rendered = config
                    .quotient()
                    .lift(&cell)
                    .map(|g| group.render(&g))
                    .unwrap_or_else(|_| format!("cell {i}"));
                let _ = writeln!(out, "  {} -> {}", rendered, names(l));
            }
        }
    }
    Ok(out)
}

/// Renders a certificate; the SFT supplies the group and letter names that
/// ball certificates do not carry themselves.
pub fn render_certificate_for(sft: &SftDescription, cert: &Certificate) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "certificate: {}", cert.kind());
    let _ = writeln!(out, "  sft digest: {}", cert.sft_digest);
    let group = sft.group();
    let names = {
        let alphabet = sft.alphabet().clone();
        move |l: u32| alphabet.name(l).to_string()
    };
    match &cert.body {
        CertificateBody::PeriodicPoint { config, stabilizer_index } => {
            let _ = writeln!(out, "  stabilizer index: {stabilizer_index}");
            out.push_str(&render_periodic(config)?);
        }
        CertificateBody::EmptyAtRadius { radius, nodes_searched } => {
            let _ = writeln!(
                out,
                "  no legal labeling of the radius-{radius} ball exists ({nodes_searched} nodes searched)"
            );
            let _ = writeln!(out, "  the shift is empty");
        }
        CertificateBody::LegalBall { radius, partial } => {
            let _ = writeln!(out, "  legal labeling of the radius-{radius} ball:");
            out.push_str(&render_partial(group, partial, &names, *radius));
        }
        CertificateBody::GInvariantBall { radius, invariant, partial } => {
            let _ = writeln!(
                out,
                "  legal labeling of the radius-{radius} ball invariant under {}:",
                group.render(invariant)
            );
            out.push_str(&render_partial(group, partial, &names, *radius));
        }
    }
    let _ = writeln!(out, "  pipeline: {}", cert.provenance.pipeline);
    for (k, v) in &cert.provenance.params {
        let _ = writeln!(out, "    {k}: {v}");
    }
    Ok(out)
}

pub fn render_analysis(analysis: &ZAnalysis) -> Result<String> {
    let mut out = String::new();
    let _ = writeln!(out, "one-dimensional analysis");
    let _ = writeln!(out, "  window length: {}", analysis.window);
    let _ = writeln!(
        out,
        "  word graph: {} vertices, {} alive after trimming",
        analysis.vertices_total, analysis.vertices_live
    );
    if analysis.empty {
        let _ = writeln!(out, "  the shift is empty");
    } else {
        let _ = writeln!(
            out,
            "  minimal period: {}",
            analysis.minimal_period.expect("nonempty analyses carry a period")
        );
        if let Some(point) = &analysis.point {
            out.push_str(&render_periodic(point)?);
        }
    }
    Ok(out)
}

pub fn render_verify(report: &VerifyReport) -> String {
    let status = if report.ok { "ACCEPTED" } else { "REJECTED" };
    format!("{status}: {}\n", report.detail)
}

pub fn render_transfer(sft: &SftDescription, outcome: &TransferOutcome) -> Result<String> {
    match outcome {
        TransferOutcome::Found(cert) => render_certificate_for(sft, cert),
        TransferOutcome::Inconclusive { reason } => Ok(format!("inconclusive: {reason}\n")),
    }
}
