use crate::config::Params;

pub struct ExperimentInfo {
    pub name: &'static str,
    pub description: &'static str,
    grid_steps: usize,
    n_paths: usize,
    theta: f64,
    sde: Option<&'static str>,
    h_norm_sq: Option<f64>,
    inner_paths: usize,
}

impl ExperimentInfo {
    pub fn defaults(&self) -> Params {
        Params {
            experiment: self.name.to_string(),
            horizon: 1.0,
            grid_steps: self.grid_steps,
            n_paths: self.n_paths,
            master_seed: 20_240_601,
            theta: self.theta,
            order: None,
            sde: self.sde.map(str::to_string),
            sigma: 0.3,
            b: 0.1,
            x0: 1.0,
            h_norm_sq: self.h_norm_sq,
            inner_paths: self.inner_paths,
        }
    }
}

const fn info(
    name: &'static str,
    description: &'static str,
    grid_steps: usize,
    n_paths: usize,
    theta: f64,
) -> ExperimentInfo {
    ExperimentInfo {
        name,
        description,
        grid_steps,
        n_paths,
        theta,
        sde: None,
        h_norm_sq: None,
        inner_paths: 2,
    }
}

pub const REGISTRY: [ExperimentInfo; 11] = [
    info(
        "isometry",
        "E[I_n(f_n)^2] = n! |f_n|^2 for orders 1-3 on B, N, M and Y^theta",
        1000,
        100_000,
        0.7,
    ),
    info(
        "covariance-decay",
        "E[I_n^phi I_n^0] / n!|f_n|^2 = cos^n(phi) at five lags",
        1000,
        100_000,
        1e-4,
    ),
    ExperimentInfo {
        h_norm_sq: None,
        ..info(
            "bessel",
            "Spectral weights c_n^2: total mass and Fourier transform",
            1,
            2,
            1e-4,
        )
    },
    ExperimentInfo {
        h_norm_sq: Some(1.0),
        ..info(
            "exp-vector-covariance",
            "E[E^phi E^0] = exp(|h|^2 cos phi) for an exponential vector",
            100,
            100_000,
            1e-4,
        )
    },
    info(
        "chaos-energy",
        "E[((F^theta - F^-theta) / 2 theta)^2] = sum n n! |f_n|^2 for both jump drivers",
        1000,
        100_000,
        1e-3,
    ),
    info(
        "sde-lent-particle",
        "Jump-difference D_u X_t against the flow oracle on a 5x5 (u, t) grid",
        10_000,
        1_000,
        1e-4,
    ),
    info(
        "sde-poisson-lent-particle",
        "Rotation toward a symmetric compound Poisson driver on single-jump paths",
        10_000,
        10_000,
        1e-4,
    ),
    info(
        "integration-by-parts",
        "E[F int G dB] = E[int D_u F G_u du] for the registered pairs",
        500,
        100_000,
        1e-4,
    ),
    ExperimentInfo {
        inner_paths: 500,
        ..info(
            "mehler",
            "Carre du champ, OU eigenvalues and the semigroup bracket limit via a Brownian copy",
            100,
            1_000,
            1e-4,
        )
    },
    info(
        "supremum",
        "Lent-jump gradient of sup(B + K): exactly 0 or 1, mean 1/2 at u = 1/2",
        1000,
        100_000,
        1e-4,
    ),
    info(
        "reproducibility",
        "Every experiment at reduced size: identical bytes across runs and worker counts",
        1,
        2,
        1e-4,
    ),
];

pub fn find(name: &str) -> Option<&'static ExperimentInfo> {
    REGISTRY.iter().find(|e| e.name == name)
}

/// One line per experiment whose name contains `filter`.
pub fn list_experiments(filter: Option<&str>) -> String {
    let mut out = String::new();
    for e in REGISTRY.iter().filter(|e| filter.is_none_or(|f| e.name.contains(f))) {
        let d = e.defaults();
        out.push_str(&format!(
            "{:<27} {}\n{:<27} defaults: n_paths={} grid_steps={} theta={}{}{}\n",
            e.name,
            e.description,
            "",
            d.n_paths,
            d.grid_steps,
            d.theta,
            d.h_norm_sq.map(|h| format!(" h_norm_sq={h}")).unwrap_or_default(),
            if d.inner_paths > 2 {
                format!(" inner_paths={}", d.inner_paths)
            } else {
                String::new()
            },
        ));
    }
    out
}
