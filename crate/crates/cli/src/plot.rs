//! Matplotlib scripts that render sweep CSVs. The CSV stays the source of
//! truth; the script only reads it.

use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    Psuc,
    Ase,
    PdfG,
    QuotientPdf,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown plot mode `{0}` (expected psuc, ase, pdf_g or rayleigh_quotient_pdf)")]
pub struct UnknownPlotMode(pub String);

impl std::str::FromStr for PlotMode {
    type Err = UnknownPlotMode;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "psuc" | "psuc_vs_threshold" => Ok(PlotMode::Psuc),
            "ase" | "ase_vs_density" => Ok(PlotMode::Ase),
            "pdf_g" => Ok(PlotMode::PdfG),
            "rayleigh_quotient_pdf" | "pdf_r" => Ok(PlotMode::QuotientPdf),
            _ => Err(UnknownPlotMode(s.to_string())),
        }
    }
}

struct Axes {
    xlabel: &'static str,
    ylabel: &'static str,
    logx: bool,
}

fn axes(mode: PlotMode) -> Axes {
    match mode {
        PlotMode::Psuc => Axes {
            xlabel: "SINR threshold (dB)",
            ylabel: "Success probability",
            logx: false,
        },
        PlotMode::Ase => Axes {
            xlabel: "BS density (per unit area)",
            ylabel: "ASE (bit/s/Hz per unit area)",
            logx: true,
        },
        PlotMode::PdfG => Axes {
            xlabel: "x",
            ylabel: "PDF of |g|^2",
            logx: false,
        },
        PlotMode::QuotientPdf => Axes {
            xlabel: "y",
            ylabel: "PDF of the Rayleigh quotient",
            logx: false,
        },
    }
}

fn py_str(s: &str) -> String {
    let escaped = s.replace('\\', "\\\\").replace('\'', "\\'");
    format!("'{escaped}'")
}

/// Standalone script drawing analytic columns as lines and simulated means
/// as markers with ±2 SE error bars.
pub fn emit_plot_script(csv_path: &Path, mode: &str) -> Result<String, UnknownPlotMode> {
    let mode: PlotMode = mode.parse()?;
    let a = axes(mode);
    let csv = py_str(&csv_path.display().to_string());
    let png = py_str(&csv_path.with_extension("png").display().to_string());
    Ok(format!(
        r#"#!/usr/bin/env python3
import csv
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

CSV = {csv}
with open(CSV, newline="") as fh:
    rows = list(csv.reader(fh))
header, body = rows[0], rows[1:]
x = [float(r[0]) for r in body]

def column(i):
    return [float(r[i]) if r[i] else float("nan") for r in body]

fig, ax = plt.subplots(figsize=(6, 4.5))
for i, name in enumerate(header[1:], start=1):
    if "_mc_se[" in name:
        continue
    if "_mc_mean[" in name:
        se = column(i + 1)
        ax.errorbar(x, column(i), yerr=[2 * s for s in se], fmt="o", ms=3, label=name)
    else:
        ax.plot(x, column(i), "-", label=name)
{logx}ax.set_xlabel({xlabel})
ax.set_ylabel({ylabel})
ax.grid(True, alpha=0.3)
ax.legend(fontsize="small")
fig.tight_layout()
fig.savefig({png}, dpi=150)
"#,
        logx = if a.logx { "ax.set_xscale(\"log\")\n" } else { "" },
        xlabel = py_str(a.xlabel),
        ylabel = py_str(a.ylabel),
    ))
}
