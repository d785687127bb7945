//! Central finite-difference verification of every analytic gradient.
//!
//! Each check perturbs one input (a raw output y_k, a projected value v_k,
//! or a network parameter) by ±h, re-evaluates the scalar loss through the
//! full forward path, and compares (f(x+h) − f(x−h)) / 2h against the
//! analytic gradient. The finite-difference side never touches the analytic
//! gradient code.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::losses::{self, sigmoid, LossConfig, LossResult};
use crate::matrix::Matrix;
use crate::network::{init_params, Arch};
use crate::rng::{rng_from, subseed};
use crate::stats::{class_means, class_variances, stats_with_gradients, ProjectedBatch};

pub const STEP: f64 = 1e-6;
pub const LOSS_TOLERANCE: f64 = 1e-6;
pub const NETWORK_TOLERANCE: f64 = 1e-5;

/// Relative error with an absolute fallback when both sides are tiny.
pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale < 1e-8 {
        (a - b).abs()
    } else {
        (a - b).abs() / scale
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Component {
    Stats,
    Product,
    DdaLog,
    DdaDelta,
    Focal,
    Pdda,
    Network,
}

impl Component {
    pub const ALL: [Component; 7] = [
        Component::Stats,
        Component::Product,
        Component::DdaLog,
        Component::DdaDelta,
        Component::Focal,
        Component::Pdda,
        Component::Network,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Component::Stats => "stats",
            Component::Product => "product",
            Component::DdaLog => "dda_log",
            Component::DdaDelta => "dda_delta",
            Component::Focal => "focal",
            Component::Pdda => "pdda",
            Component::Network => "network",
        }
    }

    pub fn parse(s: &str) -> Option<Component> {
        Component::ALL.iter().copied().find(|c| c.name() == s)
    }

    pub fn tolerance(self) -> f64 {
        match self {
            Component::Network => NETWORK_TOLERANCE,
            _ => LOSS_TOLERANCE,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComponentReport {
    pub component: Component,
    pub max_rel_err: f64,
    pub checks: usize,
    pub tolerance: f64,
}

impl ComponentReport {
    pub fn passed(&self) -> bool {
        self.max_rel_err <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Random batches per loss component.
    pub batches: usize,
    pub min_size: usize,
    pub max_size: usize,
    /// Batches per loss kind for the end-to-end network check.
    pub network_batches: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 20240901,
            batches: 100,
            min_size: 2,
            max_size: 64,
            network_batches: 5,
        }
    }
}

/// Raw outputs and labels with both classes present.
fn random_raw_batch(rng: &mut ChaCha8Rng, n: usize) -> (Vec<f64>, Vec<bool>) {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
    labels[0] = false;
    labels[n - 1] = true;
    (raw, labels)
}

fn batch_from_raw(raw: &[f64], labels: &[bool]) -> ProjectedBatch {
    let values = raw.iter().map(|&y| sigmoid(y)).collect();
    ProjectedBatch::new(values, labels.to_vec()).expect("sigmoid values are valid")
}

/// Loss value and analytic gradient as a function of raw outputs.
type LossFn = dyn Fn(&[f64], &[bool]) -> LossResult;

fn loss_fn(component: Component, cfg: LossConfig) -> Box<LossFn> {
    match component {
        Component::Product => Box::new(move |raw, labels| {
            losses::product_loss(&batch_from_raw(raw, labels), &cfg)
        }),
        Component::DdaLog => {
            Box::new(move |raw, labels| losses::dda_log(&batch_from_raw(raw, labels), &cfg))
        }
        Component::DdaDelta => {
            Box::new(move |raw, labels| losses::dda_delta(&batch_from_raw(raw, labels), &cfg))
        }
        Component::Focal => Box::new(move |raw, labels| losses::focal(raw, labels, &cfg)),
        Component::Pdda => Box::new(move |raw, labels| losses::pdda(raw, labels, &cfg)),
        Component::Stats | Component::Network => unreachable!("handled separately"),
    }
}

fn check_loss_component(component: Component, cfg: &SuiteConfig) -> ComponentReport {
    let loss_cfg = match component {
        Component::DdaLog => LossConfig::logarithmic(),
        _ => LossConfig::delta(),
    };
    let f = loss_fn(component, loss_cfg);
    let mut rng = rng_from(subseed(cfg.seed, component.name()));
    let mut max_err: f64 = 0.0;
    let mut checks = 0;
    for _ in 0..cfg.batches {
        let n = rng.gen_range(cfg.min_size..=cfg.max_size);
        let (raw, labels) = random_raw_batch(&mut rng, n);
        let analytic = f(&raw, &labels);
        for k in 0..n {
            let mut plus = raw.clone();
            plus[k] += STEP;
            let mut minus = raw.clone();
            minus[k] -= STEP;
            let fd = (f(&plus, &labels).value - f(&minus, &labels).value) / (2.0 * STEP);
            max_err = max_err.max(rel_err(analytic.grad_y[k], fd));
            checks += 1;
        }
    }
    ComponentReport {
        component,
        max_rel_err: max_err,
        checks,
        tolerance: component.tolerance(),
    }
}

/// dmean/dvar against finite differences of class_means/class_variances.
fn check_stats(cfg: &SuiteConfig) -> ComponentReport {
    let mut rng = rng_from(subseed(cfg.seed, "stats"));
    let mut max_err: f64 = 0.0;
    let mut checks = 0;
    let eval = |values: &[f64], labels: &[bool]| -> ([f64; 2], [f64; 2]) {
        let b = ProjectedBatch::new(values.to_vec(), labels.to_vec()).unwrap();
        let means = class_means(&b);
        let vars = class_variances(&b, means);
        (
            [means.0.unwrap_or(0.0), means.1.unwrap_or(0.0)],
            [vars.0, vars.1],
        )
    };
    for _ in 0..cfg.batches {
        let n = rng.gen_range(cfg.min_size..=cfg.max_size);
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.99)).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        labels[0] = false;
        labels[n - 1] = true;
        let b = ProjectedBatch::new(values.clone(), labels.clone()).unwrap();
        let st = stats_with_gradients(&b);
        for k in 0..n {
            let mut plus = values.clone();
            plus[k] += STEP;
            let mut minus = values.clone();
            minus[k] -= STEP;
            let (mp, vp) = eval(&plus, &labels);
            let (mm, vm) = eval(&minus, &labels);
            for i in 0..2 {
                let fd_mean = (mp[i] - mm[i]) / (2.0 * STEP);
                let fd_var = (vp[i] - vm[i]) / (2.0 * STEP);
                max_err = max_err.max(rel_err(st.dmean[i][k], fd_mean));
                max_err = max_err.max(rel_err(st.dvar[i][k], fd_var));
                checks += 2;
            }
        }
    }
    ComponentReport {
        component: Component::Stats,
        max_rel_err: max_err,
        checks,
        tolerance: Component::Stats.tolerance(),
    }
}

/// Every loss composed with a 2-16-16-1 network: parameter gradients against
/// finite differences of loss ∘ forward.
fn check_network(cfg: &SuiteConfig) -> ComponentReport {
    let mut rng = rng_from(subseed(cfg.seed, "network"));
    let arch = Arch::Mlp {
        layers: vec![2, 16, 16, 1],
    };
    let mut max_err: f64 = 0.0;
    let mut checks = 0;
    let kinds = [
        Component::Product,
        Component::DdaLog,
        Component::DdaDelta,
        Component::Focal,
        Component::Pdda,
    ];
    for kind in kinds {
        let loss_cfg = match kind {
            Component::DdaLog => LossConfig::logarithmic(),
            _ => LossConfig::delta(),
        };
        let f = loss_fn(kind, loss_cfg);
        for b in 0..cfg.network_batches {
            let params = init_params(&arch, subseed(cfg.seed, kind.name()) ^ b as u64).unwrap();
            let n = rng.gen_range(4..=12);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)])
                .collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
            labels[0] = false;
            labels[n - 1] = true;
            let x = Matrix::from_rows(&rows);

            let fwd = params.forward(&x).unwrap();
            let loss = f(&fwd.raw, &labels);
            let analytic = params.backward(&fwd.cache, &loss.grad_y).unwrap();

            let objective = |p: &crate::network::ModelParams| -> f64 {
                let fwd = p.forward(&x).unwrap();
                f(&fwd.raw, &labels).value
            };
            for k in 0..params.params.len() {
                let mut pp = params.clone();
                pp.params[k] += STEP;
                let mut pm = params.clone();
                pm.params[k] -= STEP;
                let fd = (objective(&pp) - objective(&pm)) / (2.0 * STEP);
                max_err = max_err.max(rel_err(analytic[k], fd));
                checks += 1;
            }
        }
    }
    ComponentReport {
        component: Component::Network,
        max_rel_err: max_err,
        checks,
        tolerance: Component::Network.tolerance(),
    }
}

pub fn run_component(component: Component, cfg: &SuiteConfig) -> ComponentReport {
    match component {
        Component::Stats => check_stats(cfg),
        Component::Network => check_network(cfg),
        _ => check_loss_component(component, cfg),
    }
}

/// Run the requested components (all when `components` is empty).
pub fn run_suite(cfg: &SuiteConfig, components: &[Component]) -> Vec<ComponentReport> {
    let selected: Vec<Component> = if components.is_empty() {
        Component::ALL.to_vec()
    } else {
        components.to_vec()
    };
    selected.into_iter().map(|c| run_component(c, cfg)).collect()
}
