use cvtele_core::quadrature::DEFAULT_RADIUS_EXPONENT;
use cvtele_core::sampler::{run_shots, PhotonCount};
use cvtele_core::statistics::{
    conditional_beta_density, crossing_radius, photon_statistics_closed_form,
    photon_statistics_quadrature, sweep_q, QuadratureCheck, SweepQuantity,
};
use cvtele_core::teleport::beta_density;
use cvtele_core::{
    fock::number_state, MeasurementOutcome, PhotonCategory, QuadratureGrid, SamplerConfig,
};

use crate::args::{BetaDensityArgs, ConditionalArgs, PhotonStatsArgs, SampleArgs, SweepArgs};
use crate::table::OutputTable;
use crate::CliError;

fn table<S: Into<String>>(
    command: &str,
    columns: impl IntoIterator<Item = S>,
) -> Result<OutputTable, CliError> {
    let mut t = OutputTable::new(columns);
    t.set_meta("tool", "cvtele")?;
    t.set_meta("tool_version", env!("CARGO_PKG_VERSION"))?;
    t.set_meta("command", command)?;
    Ok(t)
}

fn grid_meta(t: &mut OutputTable, grid: &QuadratureGrid) -> Result<(), CliError> {
    t.set_meta("radial_nodes", grid.radial_len())?;
    t.set_meta("angular_nodes", grid.angular_nodes())?;
    t.set_meta("radius", grid.radius())?;
    Ok(())
}

pub fn beta_density_table(args: &BetaDensityArgs) -> Result<OutputTable, CliError> {
    let xr = args.x_range.unwrap_or(args.range);
    let yr = args.y_range.unwrap_or(args.range);
    let cutoff = args.cutoff.cutoff;
    let input = args.input.state(cutoff)?;
    let mut t = table("beta-density", ["x_minus", "y_plus", "density"])?;
    t.set_meta("q", args.q)?;
    t.set_meta("input", args.input)?;
    t.set_meta("cutoff", cutoff)?;
    t.set_meta("x_range", xr)?;
    t.set_meta("y_range", yr)?;
    let ys = yr.values();
    for x in xr.values() {
        for &y in &ys {
            let d = beta_density(&input, args.q, MeasurementOutcome::new(x, y));
            t.push_row(vec![x, y, d])?;
        }
    }
    Ok(t)
}

pub fn photon_stats_table(args: &PhotonStatsArgs) -> Result<OutputTable, CliError> {
    let cutoff = args.cutoff.cutoff;
    if args.max_n > cutoff.n_max() {
        return Err(CliError::Usage(format!(
            "--max-n {} exceeds the cutoff {cutoff}",
            args.max_n
        )));
    }
    let grid = QuadratureGrid::for_q(args.q);
    let dist = photon_statistics_quadrature(&number_state(1, cutoff)?, args.q, &grid)?;
    let mut t = table("photon-stats", ["n", "p_closed", "p_quad"])?;
    t.set_meta("q", args.q)?;
    t.set_meta("cutoff", cutoff)?;
    grid_meta(&mut t, &grid)?;
    let (mut closed_sum, mut quad_sum) = (0.0, 0.0);
    for n in 0..=args.max_n {
        let closed = photon_statistics_closed_form(args.q, n);
        let quad = dist.probability(n);
        closed_sum += closed;
        quad_sum += quad;
        t.push_row(vec![n as f64, closed, quad])?;
    }
    // everything above max_n, including what the cutoff misses
    t.set_meta("residual_closed", 1.0 - closed_sum)?;
    t.set_meta("residual_quad", 1.0 - quad_sum)?;
    Ok(t)
}

fn sweep_table(
    command: &str,
    quantity: SweepQuantity,
    args: &SweepArgs,
) -> Result<OutputTable, CliError> {
    let check = args.quadrature.then(|| QuadratureCheck {
        cutoff: args.cutoff.cutoff,
        ..QuadratureCheck::default()
    });
    let sweep = sweep_q(quantity, &args.q_range, check.as_ref())?;
    let mut t = table(
        command,
        std::iter::once("q".to_owned()).chain(sweep.columns.iter().cloned()),
    )?;
    t.set_meta("q_range", args.q_range)?;
    t.set_meta("quadrature", args.quadrature)?;
    if let Some(check) = &check {
        t.set_meta("cutoff", check.cutoff)?;
        t.set_meta("quadrature_tolerance", check.tolerance)?;
        t.set_meta(
            "radial_nodes",
            cvtele_core::quadrature::DEFAULT_RADIAL_NODES,
        )?;
        t.set_meta(
            "angular_nodes",
            cvtele_core::quadrature::DEFAULT_ANGULAR_NODES,
        )?;
        t.set_meta("radius", format!("sqrt({DEFAULT_RADIUS_EXPONENT}/(1-q^2))"))?;
        t.set_meta("quadrature_disagreement", sweep.any_disagreement())?;
    }
    for row in &sweep.rows {
        let mut values = Vec::with_capacity(row.values.len() + 1);
        values.push(row.q);
        values.extend_from_slice(&row.values);
        t.push_row(values)?;
    }
    Ok(t)
}

pub fn loss_gain_table(args: &SweepArgs) -> Result<OutputTable, CliError> {
    sweep_table("loss-gain", SweepQuantity::LossGain, args)
}

pub fn polarization_table(args: &SweepArgs) -> Result<OutputTable, CliError> {
    sweep_table("polarization", SweepQuantity::Polarization, args)
}

pub fn conditional_table(args: &ConditionalArgs) -> Result<OutputTable, CliError> {
    let mut t = table(
        "conditional",
        ["r", "p_total", "p_success", "p_loss", "p_gain"],
    )?;
    t.set_meta("q", args.q)?;
    t.set_meta("r_range", args.r_range)?;
    match crossing_radius(args.q) {
        Ok(r) => t.set_meta("crossing_radius", r)?,
        Err(_) => t.set_meta("crossing_radius", "none")?,
    }
    for r in args.r_range.values() {
        let beta = MeasurementOutcome::new(r, 0.0);
        let p = |c| conditional_beta_density(c, args.q, beta);
        let (success, loss, gain) = (
            p(PhotonCategory::Success),
            p(PhotonCategory::Loss),
            p(PhotonCategory::Gain),
        );
        t.push_row(vec![r, loss + success + gain, success, loss, gain])?;
    }
    Ok(t)
}

pub fn sample_table(args: &SampleArgs) -> Result<OutputTable, CliError> {
    let config = SamplerConfig {
        master_seed: args.seed,
        shots: args.shots,
        q: args.q,
        input: args.input,
        cutoff: args.cutoff.cutoff,
    };
    let run = run_shots(&config)?;
    let mut t = table(
        "sample",
        [
            "shot",
            "x_minus",
            "y_plus",
            "photon_count",
            "overflow",
            "category",
        ],
    )?;
    t.set_meta("seed", args.seed)?;
    t.set_meta("shots", args.shots)?;
    t.set_meta("q", args.q)?;
    t.set_meta("input", args.input)?;
    t.set_meta("cutoff", config.cutoff)?;
    t.set_meta("rng", "chacha8, key = seed, stream = shot")?;
    t.set_meta("category_codes", "0 = loss, 1 = success, 2 = gain")?;
    let s = &run.summary;
    t.set_meta("count_loss", s.categories[PhotonCategory::Loss.index()])?;
    t.set_meta(
        "count_success",
        s.categories[PhotonCategory::Success.index()],
    )?;
    t.set_meta("count_gain", s.categories[PhotonCategory::Gain.index()])?;
    t.set_meta("count_overflow", s.overflow)?;
    t.set_meta("mean_overflow_mass", format!("{:e}", s.mean_overflow_mass))?;
    let overflow_count = (config.cutoff.n_max() + 1) as f64;
    for r in &run.records {
        let (count, overflow) = match r.photon_count {
            PhotonCount::Count(n) => (n as f64, 0.0),
            // reported as n_max + 1, flagged in the overflow column
            PhotonCount::Overflow => (overflow_count, 1.0),
        };
        t.push_row(vec![
            r.seed_lineage.shot_index as f64,
            r.beta.re,
            r.beta.im,
            count,
            overflow,
            r.category.index() as f64,
        ])?;
    }
    Ok(t)
}
