//! Job configs, one per command, and their execution.

use std::f64::consts::PI;

use holocomp_core::analytic::{bergman_norm, dirichlet_energy_integral, dirichlet_norm_coeff};
use holocomp_core::capacity::{
    capacity, capacity_condition_check, CapacityFamily, KernelKind, KernelOperator, Rect, RectUnion, SolverConfig,
    TorusGrid, VolumeSource,
};
use holocomp_core::carleson::{
    box_volume, kernel_integral_test, one_box_sufficient_check, psi_admissibility, union_volume, BidiscKernel,
    BoxMeasure, BoxUnion, OneBoxConfig, ProbeGrid, PsiConfig, PsiSpec, PullbackMeasure, BOX_ORDER,
};
use holocomp_core::criteria::{
    kernel_ratio_sup, verify_change_of_variables, verify_separated_norm_expansion, BwIntegrator, BwParams,
    KernelGrid, KernelRatioQuery, TestIntegrand, BW_RESOLUTION, IDENTITY_RESOLUTION,
};
use holocomp_core::nevanlinna::{aleman_diagnostic, separated_verdict, RatioGrid};
use holocomp_core::quadrature::{sample_dvbeta, SampleCloud};
use holocomp_core::report::{GridField, Verdict};
use holocomp_core::symbols::BidiscSpec;
use holocomp_core::{
    BergmanWeight, BidiscSymbol, Complex64, DiscSymbol, Error, Resolution, TaylorGrid1D, TaylorGrid2D, WeightPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::Result;

/// Outcome of a check as it appears in reports and exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    /// A quantity was computed; there is nothing to pass or fail.
    Computed,
    Pass,
    Fail,
    FiniteEvidence,
    GrowthDetected,
    Inconclusive,
}

impl Status {
    /// Only positive evidence counts as success.
    pub fn success(self) -> bool {
        matches!(self, Status::Computed | Status::Pass | Status::FiniteEvidence)
    }

    fn from_pass(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

impl From<Verdict> for Status {
    fn from(v: Verdict) -> Self {
        match v {
            Verdict::FiniteEvidence => Status::FiniteEvidence,
            Verdict::GrowthDetected => Status::GrowthDetected,
            Verdict::Inconclusive => Status::Inconclusive,
        }
    }
}

/// Everything a job hands back to the report writer.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub warnings: Vec<String>,
    pub field: Option<GridField>,
    /// Replaces the field's CSV as `grid.csv` when set.
    pub csv: Option<String>,
}

impl Outcome {
    fn new(status: Status, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            status,
            result: to_value(result)?,
            warnings: Vec::new(),
            field: None,
            csv: None,
        })
    }
}

fn to_value(v: impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Unsupported(format!("report serialisation failed: {e}")).into())
}

/// Run-wide settings after command-line overrides.
#[derive(Debug, Clone, Copy)]
pub struct Context {
    pub seed: u64,
    pub resolution: Option<usize>,
}

impl Context {
    /// Radial order `n` with `2n` angles.
    fn quadrature(&self, default: Resolution) -> Resolution {
        self.resolution.map_or(default, |n| Resolution::new(n, 2 * n))
    }

    fn or(&self, default: usize) -> usize {
        self.resolution.unwrap_or(default)
    }
}

pub trait Job: Serialize {
    /// What `--resolution` controls for this command.
    const RESOLUTION: &'static str;
    fn command(&self) -> Option<&str>;
    fn seed(&self) -> Option<u64>;
    fn resolution(&self) -> Option<usize>;
    fn out(&self) -> Option<&std::path::Path>;
    fn execute(&self, ctx: Context) -> Result<Outcome>;
}

/// Declares a job struct with the fields shared by every config.
macro_rules! job {
    ($(#[$m:meta])* $name:ident, $res:literal { $($(#[$fm:meta])* $field:ident : $ty:ty),* $(,)? }) => {
        $(#[$m])*
        #[derive(Debug, Clone, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct $name {
            #[serde(default, skip_serializing)]
            pub command: Option<String>,
            #[serde(default, skip_serializing)]
            pub seed: Option<u64>,
            #[serde(default, skip_serializing)]
            pub resolution: Option<usize>,
            #[serde(default, skip_serializing)]
            pub out: Option<std::path::PathBuf>,
            $($(#[$fm])* pub $field: $ty,)*
        }

        impl Job for $name {
            const RESOLUTION: &'static str = $res;
            fn command(&self) -> Option<&str> {
                self.command.as_deref()
            }
            fn seed(&self) -> Option<u64> {
                self.seed
            }
            fn resolution(&self) -> Option<usize> {
                self.resolution
            }
            fn out(&self) -> Option<&std::path::Path> {
                self.out.as_deref()
            }
            fn execute(&self, ctx: Context) -> Result<Outcome> {
                self.run(ctx)
            }
        }
    };
}

fn identity() -> BidiscSymbol {
    BidiscSymbol::identity()
}

fn beta_zero() -> BergmanWeight {
    BergmanWeight::new(0.0).expect("0 is a valid exponent")
}

fn is_identity(s: &BidiscSymbol) -> bool {
    matches!(s.spec(), BidiscSpec::Separated { phi1, phi2 } if phi1.is_identity() && phi2.is_identity())
}

fn identity_only(s: &BidiscSymbol, what: &str) -> Result<()> {
    if is_identity(s) {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("{what} are available for the identity symbol only")).into())
    }
}

/// How box volumes are obtained by sweep-type commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Volumes {
    #[default]
    Samples,
    /// Closed-form volumes; identity symbol only.
    Exact,
}

fn default_tol() -> f64 {
    1e-3
}

fn default_samples() -> usize {
    200_000
}

fn default_sweep_samples() -> usize {
    1_000_000
}

fn default_psi() -> PsiSpec {
    PsiSpec::Power {
        exponent: 1.0,
        scale: 1.0,
    }
}

fn pullback_cloud(symbol: &BidiscSymbol, beta: BergmanWeight, samples: usize, seed: u64) -> Result<SampleCloud> {
    Ok(PullbackMeasure::new(symbol.clone(), beta, samples, seed)?.cloud()?)
}

job!(
    /// Coefficient and integral forms of the Dirichlet-type norm.
    NormJob, "quadrature radial order n (2n angles)" {
        f: TaylorGrid2D,
        a: WeightPair,
        #[serde(default)]
        beta: Option<BergmanWeight>,
        #[serde(default = "default_norm_tol")]
        tol: f64,
    }
);

fn default_norm_tol() -> f64 {
    1e-8
}

impl NormJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let res = ctx.quadrature(Resolution::new(32, 64));
        let coefficient = dirichlet_norm_coeff(&self.f, self.a);
        let integral = dirichlet_energy_integral(&self.f, self.a, res, self.tol)?;
        let bergman = self.beta.map(|b| bergman_norm(&self.f, b, res, self.tol)).transpose()?;
        let ratio = if integral.value > 0.0 { coefficient / integral.value } else { f64::NAN };
        Outcome::new(
            Status::Computed,
            json!({
                "coefficient_norm": coefficient,
                "energy_integral": integral,
                "coefficient_to_integral": ratio,
                "bergman_norm": bergman,
                "resolution": res,
            }),
        )
    }
}

job!(
    /// `||C_Phi f||^2` directly and through the counting-function expansion.
    EnergyJob, "quadrature radial order n (2n angles)" {
        phi1: DiscSymbol,
        phi2: DiscSymbol,
        a: WeightPair,
        f: TaylorGrid2D,
        #[serde(default = "default_tol")]
        tol: f64,
    }
);

impl EnergyJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let phi = BidiscSymbol::separated(self.phi1.clone(), self.phi2.clone());
        let r = verify_separated_norm_expansion(&phi, self.a, &self.f, ctx.quadrature(IDENTITY_RESOLUTION), self.tol)?;
        let ok = r.total.gap < self.tol && r.term_gaps.iter().all(|g| *g < self.tol);
        Outcome::new(Status::from_pass(ok), r)
    }
}

job!(
    /// Change-of-variables identity for a separated symbol.
    CovJob, "quadrature radial order n (2n angles)" {
        phi1: DiscSymbol,
        phi2: DiscSymbol,
        a: WeightPair,
        g: TestIntegrand,
        #[serde(default = "default_tol")]
        tol: f64,
    }
);

impl CovJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let r = verify_change_of_variables(&self.phi1, &self.phi2, self.a, &self.g, ctx.quadrature(IDENTITY_RESOLUTION))?;
        let ok = r.gap < self.tol && r.gap_halved();
        let mut out = Outcome::new(Status::from_pass(ok), &r)?;
        if !r.gap_halved() {
            out.warnings.push(format!("gap did not halve under doubling: {:e} -> {:e}", r.gap, r.gap_doubled));
        }
        Ok(out)
    }
}

job!(
    /// Counting-function sup profiles of both coordinate maps.
    SeparatedJob, "angles per radius of the ratio grid" {
        phi1: DiscSymbol,
        phi2: DiscSymbol,
        a: WeightPair,
        #[serde(default)]
        grid: Option<RatioGrid>,
    }
);

impl SeparatedJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let mut grid = self.grid.clone().unwrap_or_default();
        grid.angles = ctx.or(grid.angles);
        let phi = BidiscSymbol::separated(self.phi1.clone(), self.phi2.clone());
        let v = separated_verdict(&phi, self.a, &grid)?;
        // the heatmap shows the coordinate that decides the verdict
        let second = v.growth2 && !v.growth1 || (v.growth1 == v.growth2 && v.sup2 > v.sup1);
        let field = if second { v.report2.field.clone() } else { v.report1.field.clone() };
        let mut out = Outcome::new(v.verdict.into(), &v)?;
        out.result["field_coordinate"] = json!(if second { 2 } else { 1 });
        for (i, r) in [&v.report1, &v.report2].into_iter().enumerate() {
            if !r.flagged.is_empty() {
                out.warnings.push(format!("coordinate {}: {} grid points flagged and excluded", i + 1, r.flagged.len()));
            }
        }
        out.field = Some(field);
        Ok(out)
    }
}

job!(
    /// Kernel-ratio necessary condition over a polar grid of pairs.
    KernelRatioJob, "angles per radius of the kernel grid" {
        phi: DiscSymbol,
        beta: f64,
        #[serde(default)]
        sigma: Option<f64>,
        #[serde(default)]
        epsilon: Option<f64>,
        #[serde(default)]
        grid: Option<KernelGrid>,
    }
);

impl KernelRatioJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let mut q = KernelRatioQuery::new(self.beta);
        q.sigma = self.sigma;
        if let Some(e) = self.epsilon {
            q.epsilon = e;
        }
        if let Some(g) = &self.grid {
            q.grid = g.clone();
        }
        q.grid.angles = ctx.or(q.grid.angles);
        let r = kernel_ratio_sup(&self.phi, &q)?;
        let mut out = Outcome::new(r.verdict().into(), &r)?;
        out.result["profile"] = to_value(r.profile())?;
        if !r.critical_points.is_empty() {
            out.warnings.push(format!("{} critical grid points excluded", r.critical_points.len()));
        }
        out.field = Some(r.field);
        Ok(out)
    }
}

/// Random polynomial family with coefficients uniform in the unit square.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomFamily {
    pub count: usize,
    pub max_degree: usize,
}

job!(
    /// Double-integral norm against the coefficient norm over a family.
    BaloochWuJob, "quadrature radial order n (2n angles)" {
        sigma: f64,
        tau: f64,
        beta: f64,
        #[serde(default)]
        family: Option<Vec<Vec<Complex64>>>,
        #[serde(default)]
        random: Option<RandomFamily>,
        /// Allowed relative change of the band under doubling.
        #[serde(default = "default_band_tol")]
        band_tol: f64,
    }
);

fn default_band_tol() -> f64 {
    0.1
}

impl BaloochWuJob {
    fn family(&self, seed: u64) -> Result<Vec<TaylorGrid1D>> {
        match (&self.family, self.random) {
            (Some(f), None) => Ok(f.iter().map(|c| TaylorGrid1D::new(c.clone())).collect()),
            (None, Some(r)) => {
                if r.count == 0 || r.max_degree == 0 {
                    return Err(Error::Domain("random family needs count and max_degree >= 1".into()).into());
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Ok((0..r.count)
                    .map(|_| {
                        let d = rng.random_range(1..=r.max_degree);
                        TaylorGrid1D::new(
                            (0..=d)
                                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                                .collect(),
                        )
                    })
                    .collect())
            }
            _ => Err(Error::Domain("give exactly one of `family` and `random`".into()).into()),
        }
    }

    fn run(&self, ctx: Context) -> Result<Outcome> {
        let params = BwParams::new(self.sigma, self.tau, self.beta)?;
        let family = self.family(ctx.seed)?;
        let res = ctx.quadrature(BW_RESOLUTION);
        let coarse = BwIntegrator::new(params, res)?.report(&family);
        let fine = BwIntegrator::new(params, res.doubled())?.report(&family);
        let change = (fine.band() / coarse.band() - 1.0).abs();
        let ok = change <= self.band_tol && coarse.band().is_finite();
        let mut out = Outcome::new(
            Status::from_pass(ok),
            json!({
                "band": coarse.band(),
                "band_doubled": fine.band(),
                "band_change": change,
                "report": coarse,
                "report_doubled": fine,
            }),
        )?;
        out.warnings = coarse.warnings;
        Ok(out)
    }
}

job!(
    /// `V_beta` of Carleson boxes, optionally cross-checked by sampling.
    BoxVolumeJob, "samples of the Monte Carlo cross-check" {
        beta: BergmanWeight,
        boxes: BoxUnion,
        #[serde(default)]
        samples: Option<usize>,
    }
);

impl BoxVolumeJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        if self.boxes.is_empty() {
            return Err(Error::Domain("no boxes given".into()).into());
        }
        let samples = ctx.resolution.or(self.samples);
        let cloud = samples.map(|n| sample_dvbeta(self.beta.beta(), n, ctx.seed)).transpose()?;
        let volumes = self
            .boxes
            .0
            .iter()
            .map(|b| box_volume(b, self.beta, cloud.as_ref()))
            .collect::<holocomp_core::Result<Vec<_>>>()?;
        Outcome::new(Status::Computed, json!({ "volumes": volumes, "samples": samples }))
    }
}

job!(
    /// `V_beta(Phi^{-1}(union of boxes))` by sampling.
    PullbackVolumeJob, "number of samples" {
        #[serde(default = "identity")]
        symbol: BidiscSymbol,
        #[serde(default = "beta_zero")]
        beta: BergmanWeight,
        #[serde(default = "default_samples")]
        samples: usize,
        boxes: BoxUnion,
    }
);

impl PullbackVolumeJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let cloud = pullback_cloud(&self.symbol, self.beta, ctx.or(self.samples), ctx.seed)?;
        let v = union_volume(&cloud, &self.boxes);
        let mut out = Outcome::new(Status::Computed, &v)?;
        out.warnings.extend(v.warning.clone());
        Ok(out)
    }
}

job!(
    /// Integrability of `psi(|I x J|)/(|I||J|)` near the origin.
    PsiJob, "Gauss-Legendre points per octave cell" {
        psi: PsiSpec,
        #[serde(default)]
        settings: PsiConfig,
    }
);

impl PsiJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let mut cfg = self.settings;
        cfg.cell_order = ctx.or(cfg.cell_order);
        let psi = self.psi;
        let r = psi_admissibility(move |t| psi.eval(t), cfg)?;
        Outcome::new(r.verdict.into(), json!({ "admissible": r.admissible(), "report": r }))
    }
}

job!(
    /// Dyadic one-box sweep of `mu(S) / psi(|I x J|)`.
    OneBoxJob, "number of samples" {
        #[serde(default = "identity")]
        symbol: BidiscSymbol,
        #[serde(default = "beta_zero")]
        beta: BergmanWeight,
        #[serde(default = "default_psi")]
        psi: PsiSpec,
        #[serde(default = "default_sweep_samples")]
        samples: usize,
        #[serde(default)]
        volumes: Volumes,
        #[serde(default)]
        sweep: OneBoxConfig,
    }
);

impl OneBoxJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let psi = self.psi;
        let cloud;
        let measure = match self.volumes {
            Volumes::Exact => {
                identity_only(&self.symbol, "exact volumes")?;
                BoxMeasure::Quadrature {
                    beta: self.beta,
                    order: BOX_ORDER,
                }
            }
            Volumes::Samples => {
                cloud = pullback_cloud(&self.symbol, self.beta, ctx.or(self.samples), ctx.seed)?;
                BoxMeasure::Samples(&cloud)
            }
        };
        let r = one_box_sufficient_check(measure, move |t| psi.eval(t), self.sweep)?;
        let mut status: Status = r.verdict.into();
        if r.within_threshold == Some(false) {
            status = Status::Fail;
        }
        let mut out = Outcome::new(status, &r)?;
        out.warnings = r.warnings.clone();
        out.csv = Some(r.to_csv());
        out.field = Some(r.field);
        Ok(out)
    }
}

job!(
    /// Kernel-integral sufficient condition over a probe grid.
    KernelIntegralJob, "number of samples" {
        #[serde(default = "identity")]
        symbol: BidiscSymbol,
        #[serde(default = "beta_zero")]
        beta: BergmanWeight,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        kernel: BidiscKernel,
        #[serde(default)]
        probes: ProbeGrid,
    }
);

impl KernelIntegralJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        self.kernel.validate()?;
        let cloud = pullback_cloud(&self.symbol, self.beta, ctx.or(self.samples), ctx.seed)?;
        let r = kernel_integral_test(&cloud, self.kernel, &self.probes)?;
        let mut out = Outcome::new(Status::Computed, &r)?;
        out.field = Some(r.field);
        Ok(out)
    }
}

fn default_kernel() -> KernelKind {
    KernelKind::Bessel
}

job!(
    /// Discrete capacity of a rectangle union on the torus.
    CapacityJob, "grid size M" {
        #[serde(rename = "E")]
        e: RectUnion,
        #[serde(rename = "M")]
        m: TorusGrid,
        #[serde(default = "default_kernel")]
        kernel: KernelKind,
        #[serde(default)]
        solver: SolverConfig,
    }
);

impl CapacityJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let grid = TorusGrid::new(ctx.or(self.m.m()))?;
        let op = KernelOperator::new(grid, self.kernel)?;
        let r = capacity(&op, &self.e, self.solver)?;
        let mut out = Outcome::new(Status::Computed, &r)?;
        if !r.converged {
            out.warnings
                .push(format!("solver stopped after {} iterations; value is a feasible upper bound", r.iterations));
        }
        out.field = Some(r.field(&op));
        Ok(out)
    }
}

/// Square rectangles of side `2 pi / 2^j` centred at one point, `j = first..first+levels`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicFamilies {
    pub centre: [f64; 2],
    #[serde(default = "one")]
    pub first: u32,
    pub levels: u32,
}

fn one() -> u32 {
    1
}

impl DyadicFamilies {
    fn families(&self) -> Result<Vec<CapacityFamily>> {
        (self.first..self.first + self.levels)
            .map(|j| {
                let h = PI / f64::from(1u32 << j);
                let [c1, c2] = self.centre;
                Ok(CapacityFamily {
                    rects: RectUnion(vec![Rect::new([c1 - h, c2 - h], [c1 + h, c2 + h])?]),
                    boxes: None,
                })
            })
            .collect()
    }
}

job!(
    /// Pull-back volume of box unions against capacities of matching rectangles.
    CapacityConditionJob, "grid size M" {
        #[serde(default = "identity")]
        symbol: BidiscSymbol,
        #[serde(default = "beta_zero")]
        beta: BergmanWeight,
        #[serde(rename = "M")]
        m: TorusGrid,
        #[serde(default = "default_kernel")]
        kernel: KernelKind,
        #[serde(default)]
        volumes: Volumes,
        #[serde(default = "default_sweep_samples")]
        samples: usize,
        #[serde(default)]
        families: Option<Vec<CapacityFamily>>,
        #[serde(default)]
        dyadic: Option<DyadicFamilies>,
        #[serde(default)]
        solver: SolverConfig,
    }
);

impl CapacityConditionJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let families = match (&self.families, &self.dyadic) {
            (Some(f), None) => f.clone(),
            (None, Some(d)) => d.families()?,
            _ => return Err(Error::Domain("give exactly one of `families` and `dyadic`".into()).into()),
        };
        let op = KernelOperator::new(TorusGrid::new(ctx.or(self.m.m()))?, self.kernel)?;
        let cloud;
        let source = match self.volumes {
            Volumes::Exact => {
                identity_only(&self.symbol, "exact volumes")?;
                VolumeSource::ExactIdentity(self.beta)
            }
            Volumes::Samples => {
                cloud = pullback_cloud(&self.symbol, self.beta, self.samples, ctx.seed)?;
                VolumeSource::Samples(&cloud)
            }
        };
        let r = capacity_condition_check(source, &families, &op, self.solver)?;
        let mut out = Outcome::new(r.verdict.into(), &r)?;
        out.warnings = r.warnings.clone();
        Ok(out)
    }
}

job!(
    /// Sub-mean-value diagnostic of the counting function.
    AlemanJob, "quadrature radial order n (2n angles)" {
        phi: DiscSymbol,
        a: f64,
        omega: Complex64,
    }
);

impl AlemanJob {
    fn run(&self, ctx: Context) -> Result<Outcome> {
        let r = aleman_diagnostic(&self.phi, self.a, self.omega, ctx.quadrature(Resolution::new(32, 64)))?;
        Outcome::new(Status::Computed, r)
    }
}
