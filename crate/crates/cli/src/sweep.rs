//! Parameter sweeps: one analytic curve per variant, optionally paired with
//! Monte Carlo estimates, rendered as CSV.

use rayon::prelude::*;

use mrtnet_core::fading::{self, FadingDistribution, SignalPowerLaw, TabulatedCdf};
use mrtnet_core::mcsim::{self, ChannelModel, EstimateWithCI, MonteCarloSettings};
use mrtnet_core::network::{self, ExponentialArray, MomentSource, NetworkConfig, Nt2Weights, XiCache, XiParameter};

use crate::config::{Campaign, McSpec, Scale, SweepSpec, Variable, Variant, WindowChoice};

/// Smallest window the automatic sizing rule will return.
pub const MIN_AUTO_WINDOW: f64 = 10.0;

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Numerical(#[from] mrtnet_core::Error),
}

/// How a variant's analytic curve is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Closed forms for two antennas.
    Exact,
    /// Exponential approximation of the interference fading.
    Approx,
    /// Two-antenna closed form with the weights exactly as typeset (both
    /// positive). Only for demonstrating that they are wrong.
    Literal,
}

impl Route {
    pub fn name(self) -> &'static str {
        match self {
            Route::Exact => "exact",
            Route::Approx => "approx",
            Route::Literal => "literal",
        }
    }
}

pub fn route_for(spec: &SweepSpec, variant: Variant) -> Route {
    let two = variant.n_t == 2;
    match spec.campaign() {
        Campaign::PsucVsThreshold | Campaign::AseVsDensity if two && spec.literal_nt2_weights => Route::Literal,
        Campaign::RayleighQuotientPdf => Route::Exact,
        _ if two && !spec.force_approx => Route::Exact,
        _ => Route::Approx,
    }
}

fn quantity(campaign: Campaign) -> &'static str {
    match campaign {
        Campaign::PsucVsThreshold => "psuc",
        Campaign::AseVsDensity => "ase",
        Campaign::PdfG => "pdf_g",
        Campaign::RayleighQuotientPdf => "pdf_r",
    }
}

/// Everything computed for one variant. Values are in base units
/// (probabilities or densities); `factor` converts to the displayed quantity.
#[derive(Debug, Clone)]
pub struct VariantResult {
    pub variant: Variant,
    pub route: Route,
    pub analytic: Vec<Result<f64, String>>,
    pub factor: Vec<f64>,
    pub mc: Option<Vec<EstimateWithCI>>,
    /// Raw draws for the density campaigns, sorted ascending.
    pub samples: Option<Vec<f64>>,
    /// Simulation window per swept point, when interferers are simulated.
    pub windows: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub swept: f64,
    pub cells: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub header: Vec<String>,
    pub rows: Vec<ResultRow>,
    /// One message per analytic cell that could not be computed.
    pub failures: Vec<String>,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            let mut record = vec![row.swept.to_string()];
            record.extend(row.cells.iter().map(|c| c.map(|v| v.to_string()).unwrap_or_default()));
            w.write_record(&record).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

pub fn swept_column(spec: &SweepSpec) -> &'static str {
    match (spec.range.variable, spec.range.scale) {
        (Variable::GammaTh, Scale::Db) => "gamma_th_db",
        (v, _) => v.name(),
    }
}

/// Runs the whole sweep and renders it as a table.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepTable, SweepError> {
    let results = evaluate(spec)?;
    Ok(tabulate(spec, &results))
}

pub fn tabulate(spec: &SweepSpec, results: &[VariantResult]) -> SweepTable {
    let q = quantity(spec.campaign());
    let mut header = vec![swept_column(spec).to_string()];
    for r in results {
        header.push(format!("{q}_{}[{}]", r.route.name(), r.variant));
        if r.mc.is_some() {
            header.push(format!("{q}_mc_mean[{}]", r.variant));
            header.push(format!("{q}_mc_se[{}]", r.variant));
        }
    }
    let mut failures = Vec::new();
    let rows = spec
        .points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut cells = Vec::new();
            for r in results {
                match &r.analytic[i] {
                    Ok(v) => cells.push(Some(v * r.factor[i])),
                    Err(e) => {
                        failures.push(format!("{}={}: {}: {e}", swept_column(spec), p.display, r.variant));
                        cells.push(None);
                    }
                }
                if let Some(mc) = &r.mc {
                    cells.push(Some(mc[i].mean * r.factor[i]));
                    cells.push(Some(mc[i].std_error * r.factor[i]));
                }
            }
            ResultRow {
                swept: p.display,
                cells,
            }
        })
        .collect();
    SweepTable { header, rows, failures }
}

enum PsucEval {
    Exact { rho: f64 },
    Literal { rho: f64, xi: XiParameter },
    Approx { law: SignalPowerLaw, xi: XiParameter },
}

impl PsucEval {
    fn new(array: &ExponentialArray, route: Route, alpha: f64, cache: &XiCache) -> mrtnet_core::Result<Self> {
        Ok(match route {
            Route::Exact => PsucEval::Exact { rho: array.rho() },
            Route::Literal => PsucEval::Literal {
                rho: array.rho(),
                xi: cache.get(array, alpha, MomentSource::Exact)?,
            },
            Route::Approx => PsucEval::Approx {
                law: array.signal_law()?,
                xi: cache.get(array, alpha, MomentSource::Approximate)?,
            },
        })
    }

    fn eval(&self, cfg: &NetworkConfig) -> mrtnet_core::Result<f64> {
        match self {
            PsucEval::Exact { rho } => network::psuc_exact_nt2(cfg, *rho),
            PsucEval::Literal { rho, xi } => network::psuc_nt2_with_weights(cfg, *rho, *xi, Nt2Weights::AsTypeset),
            PsucEval::Approx { law, xi } => network::psuc_with_xi(cfg, law, *xi),
        }
    }
}

fn config_at(spec: &SweepSpec, linear: f64) -> NetworkConfig {
    let base = spec.network_config();
    match spec.range.variable {
        Variable::GammaTh => base.with_gamma_th(linear),
        Variable::Lambda => base.with_lambda(linear),
        _ => base,
    }
}

/// Window for simulating a network with correlation matrix `array` at the
/// largest threshold `gamma_max`.
pub fn window_for(mc: &McSpec, cfg: &NetworkConfig, array: &ExponentialArray, gamma_max: f64) -> f64 {
    match mc.window {
        WindowChoice::Fixed(r) => r,
        WindowChoice::Auto => {
            let spectrum = array.spectrum();
            let mu_min = *spectrum.eigenvalues().last().expect("non-empty spectrum");
            let s_max = cfg.r00.powf(cfg.alpha) * gamma_max / mu_min;
            mcsim::sized_window_radius(
                cfg.lambda,
                cfg.alpha,
                fading::sigma_g(spectrum),
                s_max,
                mc.truncation_tolerance,
                MIN_AUTO_WINDOW,
            )
        }
    }
}

fn settings(mc: &McSpec, window: f64) -> MonteCarloSettings {
    MonteCarloSettings {
        trials: mc.trials,
        window_radius: window,
        master_seed: mc.seed,
        truncation_tolerance: mc.truncation_tolerance,
    }
}

/// Histogram density at each point: bin of width `step` centred on the
/// point, truncated at zero.
fn histogram(sorted: &[f64], centres: &[f64], step: f64) -> Vec<EstimateWithCI> {
    let n = sorted.len();
    centres
        .iter()
        .map(|&c| {
            let lo = (c - step / 2.0).max(0.0);
            let hi = c + step / 2.0;
            let width = hi - lo;
            let count = sorted.partition_point(|&v| v < hi) - sorted.partition_point(|&v| v < lo);
            let p = EstimateWithCI::from_count(count, n);
            EstimateWithCI {
                mean: p.mean / width,
                std_error: p.std_error / width,
                trials: n,
            }
        })
        .collect()
}

/// Evaluates every variant at every swept point.
pub fn evaluate(spec: &SweepSpec) -> Result<Vec<VariantResult>, SweepError> {
    if spec.variants.is_empty() {
        return Err(SweepError::Config("no variants to evaluate (set `variants`)".into()));
    }
    if spec.campaign() == Campaign::RayleighQuotientPdf {
        if let Some(v) = spec.variants.iter().find(|v| v.n_t != 2 || v.rho == 0.0) {
            return Err(SweepError::Config(format!(
                "the quotient density is only available for two correlated antennas (got {v})"
            )));
        }
    }
    spec.network_config().validate()?;
    let cache = XiCache::new();
    spec.variants
        .iter()
        .map(|&variant| evaluate_variant(spec, variant, &cache))
        .collect()
}

fn evaluate_variant(spec: &SweepSpec, variant: Variant, cache: &XiCache) -> Result<VariantResult, SweepError> {
    let route = route_for(spec, variant);
    let array = ExponentialArray::new(variant.n_t, variant.rho)?;
    let alpha = spec.network.alpha;
    let n = spec.points.len();
    let linear: Vec<f64> = spec.points.iter().map(|p| p.linear).collect();
    let mut factor = vec![1.0; n];
    let mut windows = Vec::new();
    let mut samples = None;

    let analytic: Vec<Result<f64, String>> = match spec.campaign() {
        Campaign::PsucVsThreshold | Campaign::AseVsDensity => match PsucEval::new(&array, route, alpha, cache) {
            Ok(eval) => linear
                .par_iter()
                .map(|&x| eval.eval(&config_at(spec, x)).map_err(|e| e.to_string()))
                .collect(),
            Err(e) => vec![Err(e.to_string()); n],
        },
        Campaign::PdfG => {
            let dist = FadingDistribution::new(array.spectrum().clone());
            linear
                .par_iter()
                .map(|&x| {
                    match route {
                        Route::Approx => fading::approx_pdf_g(&dist, x),
                        _ => fading::exact_pdf_g(variant.rho, x),
                    }
                    .map_err(|e| e.to_string())
                })
                .collect()
        }
        Campaign::RayleighQuotientPdf => linear
            .par_iter()
            .map(|&y| fading::rayleigh_quotient_pdf(variant.rho, y).map_err(|e| e.to_string()))
            .collect(),
    };

    if spec.campaign() == Campaign::AseVsDensity {
        let cfg = spec.network_config();
        for (f, &lambda) in factor.iter_mut().zip(&linear) {
            *f = lambda * (1.0 + cfg.gamma_th).log2();
        }
    }

    let mc = match &spec.mc {
        None => None,
        Some(mc) => {
            let model = ChannelModel::new(array.matrix().clone())?;
            Some(match spec.campaign() {
                Campaign::PsucVsThreshold => {
                    let cfg = spec.network_config();
                    let gamma_max = linear.iter().copied().fold(0.0, f64::max);
                    let window = window_for(mc, &cfg, &array, gamma_max);
                    windows = vec![window; n];
                    mcsim::estimate_psuc_curve(&cfg, &model, &linear, &settings(mc, window))?
                }
                Campaign::AseVsDensity => {
                    let mut out = Vec::with_capacity(n);
                    for &lambda in &linear {
                        let cfg = spec.network_config().with_lambda(lambda);
                        let window = window_for(mc, &cfg, &array, cfg.gamma_th);
                        windows.push(window);
                        out.push(mcsim::estimate_psuc(&cfg, &model, &settings(mc, window))?);
                    }
                    out
                }
                Campaign::PdfG | Campaign::RayleighQuotientPdf => {
                    let mut draws = if spec.campaign() == Campaign::PdfG {
                        mcsim::sample_g_squared_batch(&model, mc.trials, mc.seed)?
                    } else {
                        mcsim::sample_rayleigh_quotient_batch(array.matrix(), mc.trials, mc.seed)?
                    };
                    draws.sort_by(f64::total_cmp);
                    let h = histogram(&draws, &linear, spec.range.step);
                    samples = Some(draws);
                    h
                }
            })
        }
    };

    Ok(VariantResult {
        variant,
        route,
        analytic,
        factor,
        mc,
        samples,
        windows,
    })
}

/// Reference CDF of the simulated quantity in a density campaign.
pub fn reference_cdf(campaign: Campaign, route: Route, variant: Variant) -> mrtnet_core::Result<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
    let rho = variant.rho;
    match (campaign, route) {
        (Campaign::RayleighQuotientPdf, _) => {
            fading::rayleigh_quotient_cdf(rho, 1.0)?;
            Ok(Box::new(move |y| fading::rayleigh_quotient_cdf(rho, y).expect("rho checked")))
        }
        (Campaign::PdfG, Route::Approx) => {
            let array = ExponentialArray::new(variant.n_t, rho)?;
            let sigma = fading::sigma_g(array.spectrum());
            Ok(Box::new(move |x: f64| if x <= 0.0 { 0.0 } else { -(-x / sigma).exp_m1() }))
        }
        (Campaign::PdfG, _) => {
            let upper = 50.0 * (1.0 + rho);
            let table = TabulatedCdf::from_density(|x| fading::exact_pdf_g(rho, x), upper, 20_000)?;
            Ok(Box::new(move |x| table.eval(x)))
        }
        _ => Err(mrtnet_core::Error::InvalidParameter {
            name: "campaign",
            value: f64::NAN,
            reason: "reference CDF exists only for density campaigns",
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn empty_variants_rejected() {
        let spec = parse_config_str("mode = psuc_vs_threshold\nsweep.start=0\nsweep.stop=1\nsweep.step=1\n").unwrap();
        assert!(matches!(run_sweep(&spec), Err(SweepError::Config(_))));
    }

    #[test]
    fn header_and_column_count() {
        let spec = parse_config_str(
            "mode = psuc_vs_threshold\nsweep.start=-10\nsweep.stop=20\nsweep.step=5\nvariants = 2:0.7, 5:0.7\nmc.trials = 200\nmc.window_radius = 50\n",
        )
        .unwrap();
        let t = run_sweep(&spec).unwrap();
        assert_eq!(
            t.header,
            vec![
                "gamma_th_db",
                "psuc_exact[nT=2,rho=0.7]",
                "psuc_mc_mean[nT=2,rho=0.7]",
                "psuc_mc_se[nT=2,rho=0.7]",
                "psuc_approx[nT=5,rho=0.7]",
                "psuc_mc_mean[nT=5,rho=0.7]",
                "psuc_mc_se[nT=5,rho=0.7]",
            ]
        );
        assert_eq!(t.rows.len(), 7);
        assert!(t.rows.iter().all(|r| r.cells.len() == 6));
        assert!(t.failures.is_empty());
        let csv = t.to_csv();
        assert!(csv.starts_with("gamma_th_db,\"psuc_exact[nT=2,rho=0.7]\""));
    }

    #[test]
    fn literal_weights_fail_per_row_in_ase() {
        let spec = parse_config_str(
            "mode = ase_vs_density\ngamma_th_db = -30\nsweep.start=1e-5\nsweep.stop=1e-4\nsweep.step=1\nvariants = 2:0.7\nanalytic.literal_nt2_weights = true\n",
        )
        .unwrap();
        let t = run_sweep(&spec).unwrap();
        assert_eq!(t.header[1], "ase_literal[nT=2,rho=0.7]");
        // The literal weights are never clamped: the implied success
        // probability exceeds one.
        assert!(t.failures.is_empty());
        let gain = (1.0 + 1e-3f64).log2();
        assert!(t.rows[0].cells[0].unwrap() > 1e-5 * gain);
    }

    #[test]
    fn quotient_requires_two_correlated_antennas() {
        let spec = parse_config_str("mode = rayleigh_quotient_pdf\nsweep.start=0\nsweep.stop=2\nsweep.step=0.1\nvariants = 3:0.5\n").unwrap();
        assert!(matches!(run_sweep(&spec), Err(SweepError::Config(_))));
    }

    #[test]
    fn histogram_of_uniform_grid() {
        let draws: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let h = histogram(&draws, &[0.0, 0.5], 0.1);
        assert!((h[0].mean - 1.0).abs() < 1e-12);
        assert!((h[1].mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn auto_window_grows_with_correlation() {
        let mc = McSpec {
            trials: 1,
            seed: 0,
            window: WindowChoice::Auto,
            truncation_tolerance: 1e-3,
        };
        let cfg = NetworkConfig::new(1e-4, 3.5, 1.0, 1.0, 1.0).unwrap();
        let low = window_for(&mc, &cfg, &ExponentialArray::new(2, 0.01).unwrap(), 100.0);
        let high = window_for(&mc, &cfg, &ExponentialArray::new(2, 0.95).unwrap(), 100.0);
        assert!(low >= MIN_AUTO_WINDOW && high > low);
    }
}
