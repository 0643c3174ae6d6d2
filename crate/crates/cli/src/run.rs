//! Subcommand implementations.

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex;

use bornsim_core::atomphoton::{build_atom_photon, certify_born_equivalence};
use bornsim_core::branching::{run_history_experiment, EventMode};
use bornsim_core::cascade::{run_cascade_prepared, CascadeError};
use bornsim_core::fock::{strip as strip_state, strip_normalized};
use bornsim_core::formats::{parse_fock_fixture, parse_process_table, parse_projector_set};
use bornsim_core::rng::substream;
use bornsim_core::scattering::{
    born_probabilities, builtin_process, rayleigh_oracle, run_trials, BuiltinProcess, QubitState,
    ScatteringProcess,
};
use bornsim_core::statespace::StateVector;
use bornsim_core::stats::{binomial_stderr, chi_square_gof};

use crate::config::Config;
use crate::output::{num, OutputFormat, Sink};
use crate::{AtomArgs, BranchesArgs, CascadeArgs, CommonArgs, OracleArgs, ScatterArgs, StripArgs};

/// Exit code for violated statistical bounds and invalid loaded data.
const EXIT_VIOLATION: i32 = 2;

struct Resolved {
    config: Config,
    seed: u64,
    out: Option<std::path::PathBuf>,
    format: OutputFormat,
    assert_bounds: bool,
}

fn resolve_common(common: &CommonArgs) -> Result<Resolved> {
    let config = match &common.config {
        Some(path) => Config::load(path)?,
        None => Config::empty(),
    };
    let seed = config
        .resolve(&common.seed, "seed")?
        .ok_or_else(|| anyhow!("--seed is required (there is no wall-clock default)"))?;
    let format = config
        .resolve(&common.format, "format")?
        .unwrap_or(OutputFormat::Report);
    let assert_bounds = config.resolve_switch(common.assert, "assert")?;
    let out = config.resolve_path(&common.out, "out");
    Ok(Resolved {
        config,
        seed,
        out,
        format,
        assert_bounds,
    })
}

fn parse_qubit_spec(spec: &str) -> Result<QubitState<f64>> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("cannot parse qubit '{spec}' (need are,aim,bre,bim)"))?;
    if parts.len() != 4 {
        bail!("qubit '{spec}' must have four components are,aim,bre,bim");
    }
    QubitState::new(
        Complex::new(parts[0], parts[1]),
        Complex::new(parts[2], parts[3]),
    )
    .map_err(|e| anyhow!("invalid qubit: {e}"))
}

fn resolve_qubit(
    config: &Config,
    a2: &Option<f64>,
    qubit: &Option<String>,
    default_a2: Option<f64>,
) -> Result<(QubitState<f64>, f64)> {
    if let Some(spec) = config.resolve(qubit, "qubit")? {
        let q = parse_qubit_spec(&spec)?;
        let (p0, _) = born_probabilities(&q);
        return Ok((q, p0));
    }
    let a2 = config
        .resolve(a2, "a2")?
        .or(default_a2)
        .ok_or_else(|| anyhow!("either --a2 or --qubit is required"))?;
    if !(0.0..=1.0).contains(&a2) {
        bail!("--a2 must lie in [0, 1], got {a2}");
    }
    Ok((
        QubitState::from_reals(a2.sqrt(), (1.0 - a2).sqrt())
            .map_err(|e| anyhow!("invalid qubit: {e}"))?,
        a2,
    ))
}

fn parse_psi_spec(spec: &str) -> Result<StateVector<f64>> {
    let mut amplitudes = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let (re, im) = match part.split_once(':') {
            Some((re, im)) => (
                re.parse::<f64>()
                    .with_context(|| format!("bad real part in '{part}'"))?,
                im.parse::<f64>()
                    .with_context(|| format!("bad imaginary part in '{part}'"))?,
            ),
            None => (
                part.parse::<f64>()
                    .with_context(|| format!("bad component '{part}'"))?,
                0.0,
            ),
        };
        amplitudes.push(Complex::new(re, im));
    }
    StateVector::new(amplitudes).map_err(|e| anyhow!("invalid state: {e}"))
}

pub fn scatter(args: ScatterArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let config = &resolved.config;

    let table_path = config.resolve_path(&args.table, "table");
    let process_name = config.resolve(&args.process, "process")?;
    let (process, builtin): (ScatteringProcess<f64>, Option<BuiltinProcess>) =
        match (&table_path, process_name.as_deref()) {
            (Some(path), _) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                (
                    parse_process_table(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?,
                    None,
                )
            }
            (None, Some("uniform")) => (
                builtin_process(BuiltinProcess::Uniform),
                Some(BuiltinProcess::Uniform),
            ),
            (None, Some("maximum")) => (
                builtin_process(BuiltinProcess::Maximum),
                Some(BuiltinProcess::Maximum),
            ),
            (None, Some("born")) => (
                builtin_process(BuiltinProcess::Born),
                Some(BuiltinProcess::Born),
            ),
            (None, Some(other)) => bail!("unknown process '{other}' (uniform|maximum|born)"),
            (None, None) => bail!("either --process or --table is required"),
        };

    let (qubit, a2) = resolve_qubit(config, &args.a2, &args.qubit, None)?;
    let trials = config.resolve(&args.trials, "trials")?.unwrap_or(100_000);
    if trials < 1 {
        bail!("--trials must be at least 1");
    }

    let stats = run_trials(&process, &qubit, trials, resolved.seed);
    let (born_p0, _) = born_probabilities(&qubit);
    let expected = match builtin {
        Some(BuiltinProcess::Uniform) => Some(0.5),
        Some(BuiltinProcess::Born) => Some(born_p0),
        Some(BuiltinProcess::Maximum) => {
            if (born_p0 - 0.5).abs() < 1e-15 {
                None
            } else if born_p0 > 0.5 {
                Some(1.0)
            } else {
                Some(0.0)
            }
        }
        None => None,
    };

    let mut sink = Sink::new(resolved.format);
    sink.note("scatter report");
    sink.note(format!("process: {}", process.name()));
    match builtin {
        Some(BuiltinProcess::Uniform) => {
            sink.note("claim: both outcomes equally likely, independent of the qubit")
        }
        Some(BuiltinProcess::Maximum) => {
            sink.note("claim: outcome is argmax(|a|, |b|) for every photon")
        }
        Some(BuiltinProcess::Born) => {
            sink.note("claim: freq(zero) -> |a|^2 / (|a|^2 + |b|^2) over unknown photons")
        }
        None => sink.note("claim: none (user-supplied table; empirical frequencies only)"),
    }
    sink.note(format!("seed: {}  trials: {trials}", resolved.seed));
    sink.note(format!("qubit weight |a|^2/(|a|^2+|b|^2): {a2:.6}"));
    sink.note(format!(
        "outcome zero: count = {}  freq = {:.6}",
        stats.count_zero, stats.freq_zero
    ));
    sink.note(format!(
        "outcome one:  count = {}  freq = {:.6}",
        stats.count_one, stats.freq_one
    ));
    sink.note(format!("ties (excluded): {}", stats.ties));

    let mut violated = false;
    if let Some(p0) = expected {
        let sigma = binomial_stderr(p0, stats.count_zero + stats.count_one);
        let deviation = (stats.freq_zero - p0).abs();
        let within = if sigma > 0.0 {
            deviation <= 4.0 * sigma
        } else {
            deviation == 0.0
        };
        violated = !within;
        sink.note(format!("expected freq(zero): {p0:.6}"));
        sink.note(format!(
            "|freq - expected| = {deviation:.6}  four-sigma band: {:.6}  within: {}",
            4.0 * sigma,
            if within { "yes" } else { "NO" }
        ));
    }

    sink.row("outcome,count,frequency,expected,stderr");
    let expected_num = expected.unwrap_or(f64::NAN);
    sink.row(format!(
        "0,{},{},{},{}",
        stats.count_zero,
        num(stats.freq_zero),
        num(expected_num),
        num(stats.standard_error)
    ));
    sink.row(format!(
        "1,{},{},{},{}",
        stats.count_one,
        num(stats.freq_one),
        num(1.0 - expected_num),
        num(stats.standard_error)
    ));
    sink.row(format!("-1,{},nan,nan,nan", stats.ties));
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds {
        if expected.is_none() {
            bail!("--assert needs a builtin process with an analytic expectation");
        }
        if violated {
            return Ok(EXIT_VIOLATION);
        }
    }
    Ok(0)
}

pub fn cascade(args: CascadeArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let config = &resolved.config;

    let set_path = config
        .resolve_path(&args.set, "set")
        .ok_or_else(|| anyhow!("--set <projector file> is required"))?;
    let text = std::fs::read_to_string(&set_path)
        .with_context(|| format!("cannot read {}", set_path.display()))?;
    let set = parse_projector_set(&text).map_err(|e| anyhow!("{}: {e}", set_path.display()))?;

    let psi_spec = config
        .resolve(&args.psi, "psi")?
        .ok_or_else(|| anyhow!("--psi is required"))?;
    let psi = parse_psi_spec(&psi_spec)?;
    if psi.dim() != set.dim() {
        bail!(
            "state has dimension {} but the projector set acts on dimension {}",
            psi.dim(),
            set.dim()
        );
    }
    if psi.norm_sqr() <= 0.0 {
        bail!("--psi must be nonzero");
    }
    let runs = config.resolve(&args.runs, "runs")?.unwrap_or(10_000);
    if runs < 1 {
        bail!("--runs must be at least 1");
    }
    let order: Vec<usize> = match config.resolve(&args.order, "order")? {
        Some(spec) => spec
            .split(',')
            .map(|t| t.trim().parse::<usize>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("cannot parse order '{spec}'"))?,
        None => (0..set.len()).collect(),
    };

    let mut sink = Sink::new(resolved.format);
    sink.note("cascade report");
    sink.note("claim: outcome k occurs with weight |<k|psi>|^2 / <psi|psi>");
    sink.note(format!(
        "seed: {}  runs: {runs}  projectors: {}  dim: {}",
        resolved.seed,
        set.len(),
        set.dim()
    ));

    let report = match set.validate() {
        Ok(report) => report,
        Err(err) => {
            sink.note(format!("validation failed: {err}"));
            sink.row("error");
            sink.row(format!("\"{err}\""));
            sink.finish(resolved.out.as_deref())?;
            eprintln!("projector set rejected: {err}");
            return Ok(EXIT_VIOLATION);
        }
    };
    sink.note(format!(
        "complete: {}  independent: {}  joint eigenspace dims: {:?}",
        report.complete, report.independent, report.joint_dimensions
    ));
    if !report.complete {
        sink.note(
            "cascade aborted: the set does not resolve every joint eigenspace to dimension 1",
        );
        sink.row("error");
        sink.row(format!(
            "\"incomplete set; joint eigenspace dimensions {:?}\"",
            report.joint_dimensions
        ));
        sink.finish(resolved.out.as_deref())?;
        eprintln!(
            "projector set incomplete: joint eigenspace dimensions {:?}",
            report.joint_dimensions
        );
        return Ok(EXIT_VIOLATION);
    }

    let basis = report.special_basis.as_ref().expect("complete");
    let mut counts = vec![0u64; basis.len()];
    let mut ties = 0u64;
    for run in 0..runs {
        let mut rng = substream(resolved.seed, run);
        match run_cascade_prepared(&set, &report, &order, &psi, &mut rng) {
            Ok(outcome) => counts[outcome.basis_index] += 1,
            Err(CascadeError::Tie(_)) => ties += 1,
            Err(other) => bail!("cascade failed: {other}"),
        }
    }
    let norm = psi.norm_sqr();
    let expected_weights: Vec<f64> = basis
        .iter()
        .map(|k| k.inner(&psi).expect("dims agree").norm_sqr() / norm)
        .collect();
    let completed = (runs - ties) as f64;

    let mut observed = Vec::new();
    let mut expected_counts = Vec::new();
    for (k, &w) in expected_weights.iter().enumerate() {
        if w > 1e-15 {
            observed.push(counts[k]);
            expected_counts.push(w * completed);
        }
    }
    if completed <= 0.0 {
        sink.note("all runs tied; no statistics to report");
        sink.finish(resolved.out.as_deref())?;
        return Ok(EXIT_VIOLATION);
    }
    let chi = chi_square_gof(&observed, &expected_counts);

    sink.row("k,count,frequency,expected");
    for (k, &count) in counts.iter().enumerate() {
        let freq = count as f64 / completed.max(1.0);
        sink.note(format!(
            "outcome {k}: count = {count}  freq = {freq:.6}  expected = {:.6}",
            expected_weights[k]
        ));
        sink.row(format!(
            "{k},{count},{},{}",
            num(freq),
            num(expected_weights[k])
        ));
    }
    sink.note(format!("ties (excluded): {ties}"));
    sink.note(format!(
        "chi-square: statistic = {:.4}  dof = {}  p = {:.4}",
        chi.statistic, chi.degrees_of_freedom, chi.p_value
    ));
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds && chi.p_value <= 0.001 {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

pub fn branches(args: BranchesArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let config = &resolved.config;

    let (qubit, a2) = resolve_qubit(config, &args.a2, &args.qubit, Some(0.5))?;
    let events = config.resolve(&args.events, "events")?.unwrap_or(3);
    let runs = config.resolve(&args.runs, "runs")?.unwrap_or(10_000);
    if runs < 1 {
        bail!("--runs must be at least 1");
    }
    let rescatter = config.resolve_switch(args.rescatter, "rescatter")?;
    let mode = if rescatter {
        EventMode::RescatterPrior
    } else {
        EventMode::FreshPreparation
    };

    let stats = run_history_experiment(&qubit, events, runs, resolved.seed, mode)
        .map_err(|e| anyhow!("{e}"))?;

    let mut sink = Sink::new(resolved.format);
    sink.note("branches report");
    match mode {
        EventMode::FreshPreparation => sink.note(
            "claim: final dominant records follow the per-event product of squared amplitudes",
        ),
        EventMode::RescatterPrior => sink.note(
            "mode: rescattering the prior outcome; record statistics are an empirical finding and history rewrites are expected",
        ),
    }
    sink.note(format!(
        "seed: {}  runs: {runs}  events: {events}  |a|^2: {a2:.6}",
        resolved.seed
    ));
    sink.row("record,count,frequency,expected");
    let completed = (stats.runs - stats.degenerate_runs).max(1) as f64;
    for (record, &p) in &stats.expected_probabilities {
        let label: String = record.iter().map(|b| b.to_string()).collect();
        let count = stats.record_counts.get(record).copied().unwrap_or(0);
        let freq = count as f64 / completed;
        sink.note(format!(
            "record {label}: count = {count}  freq = {freq:.6}  expected = {p:.6}"
        ));
        sink.row(format!("{label},{count},{},{}", num(freq), num(p)));
    }
    sink.note(format!(
        "degenerate runs (excluded): {}",
        stats.degenerate_runs
    ));
    sink.note(format!(
        "chi-square: statistic = {:.4}  dof = {}  p = {:.4}",
        stats.chi_square.statistic, stats.chi_square.degrees_of_freedom, stats.chi_square.p_value
    ));
    let total_switches: u64 = stats.switch_counts.iter().sum();
    sink.note(format!(
        "history rewrites: {total_switches} total; per event index: {:?}",
        stats.switch_counts
    ));
    if total_switches > 0 {
        sink.note(format!(
            "rewrite lookback histogram (events reached back): {:?}",
            stats.switch_lookback_counts
        ));
    }
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds && stats.chi_square.p_value <= 0.001 {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

pub fn atom(args: AtomArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let config = &resolved.config;

    let amp = config.resolve(&args.amp, "amp")?.unwrap_or(0.5f64.sqrt());
    let trials = config.resolve(&args.trials, "trials")?.unwrap_or(100_000);
    if trials < 1 {
        bail!("--trials must be at least 1");
    }
    let process = build_atom_photon(amp).map_err(|e| anyhow!("{e}"))?;

    let grid: Vec<QubitState<f64>> = (1..=9)
        .map(|i| {
            let a2 = i as f64 / 10.0;
            QubitState::from_reals(a2.sqrt(), (1.0 - a2).sqrt()).expect("grid qubit valid")
        })
        .collect();
    let report = certify_born_equivalence(&process, &grid, trials, resolved.seed);

    let mut sink = Sink::new(resolved.format);
    sink.note("atom-photon report");
    sink.note("claim: the atom-photon table reproduces freq(zero) = |a|^2/(|a|^2+|b|^2)");
    sink.note(format!(
        "seed: {}  trials/point: {trials}  branch amplitude: {amp:.9}",
        resolved.seed
    ));
    sink.row("a2,expected,frequency,sigma,pass");
    for (i, point) in report.points.iter().enumerate() {
        let a2 = (i + 1) as f64 / 10.0;
        sink.note(format!(
            "|a|^2 = {a2:.1}: expected = {:.4}  freq = {:.4}  sigma = {:.5}  ties = {}  {}",
            point.expected,
            point.frequency,
            point.sigma,
            point.ties,
            if point.pass { "ok" } else { "DEVIATES" }
        ));
        sink.row(format!(
            "{},{},{},{},{}",
            num(a2),
            num(point.expected),
            num(point.frequency),
            num(point.sigma),
            u8::from(point.pass)
        ));
    }
    sink.note(format!(
        "verdict: {}",
        if report.passed {
            "all points within four sigma"
        } else {
            "at least one point deviates beyond four sigma"
        }
    ));
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds && !report.passed {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

pub fn oracle(args: OracleArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let ratio = resolved
        .config
        .resolve(&args.ratio, "ratio")?
        .ok_or_else(|| anyhow!("--ratio is required"))?;
    if !(ratio.is_finite() && ratio > 0.0) {
        bail!("--ratio must be a finite positive number");
    }

    let value = rayleigh_oracle(ratio).map_err(|e| anyhow!("{e}"))?;
    let closed = ratio * ratio / (1.0 + ratio * ratio);
    let diff = (value - closed).abs();

    let mut sink = Sink::new(resolved.format);
    sink.note("rayleigh oracle report");
    sink.note(
        "claim: p(|a||alpha| > |b||beta|) = r^2 / (1 + r^2) for independent Rayleigh magnitudes",
    );
    sink.note(format!("ratio r = |a|/|b|: {ratio}"));
    sink.note(format!("quadrature value: {value:.12}"));
    sink.note(format!("closed form:      {closed:.12}"));
    sink.note(format!("absolute difference: {diff:.3e}"));
    sink.row("ratio,quadrature,closed_form,abs_diff");
    sink.row(format!(
        "{},{},{},{}",
        num(ratio),
        num(value),
        num(closed),
        num(diff)
    ));
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds && diff > 1e-7 {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

pub fn strip(args: StripArgs) -> Result<i32> {
    let resolved = resolve_common(&args.common)?;
    let config = &resolved.config;

    let fixture = config
        .resolve_path(&args.fixture, "fixture")
        .ok_or_else(|| anyhow!("--fixture <file> is required"))?;
    let tie_tolerance = config
        .resolve(&args.tie_tolerance, "tie_tolerance")?
        .unwrap_or(bornsim_core::tol::TIE_RELATIVE);
    let text = std::fs::read_to_string(&fixture)
        .with_context(|| format!("cannot read {}", fixture.display()))?;
    let psi = parse_fock_fixture(&text).map_err(|e| anyhow!("{}: {e}", fixture.display()))?;

    let stripped = strip_state(&psi);
    let reconstruction = strip_normalized(&psi, tie_tolerance);

    let mut sink = Sink::new(resolved.format);
    sink.note("strip report");
    sink.note("claim: the stripped operator's trace equals the squared norm, and its dominant eigenvector is the locally reconstructed pure state");
    sink.note(format!(
        "modes: {} ({} accessible)  max total: {}  terms: {}",
        psi.space().single_particle_dim(),
        psi.space().partition().accessible_modes().len(),
        psi.space().max_total(),
        psi.term_count()
    ));
    sink.note(format!(
        "squared norm: {:.12}  stripped trace: {:.12}",
        psi.norm_sqr(),
        stripped.trace()
    ));

    let amplitudes = reconstruction.as_ref().ok().map(|s| s.amplitudes());
    sink.row("basis_index,weight,reconstructed_re,reconstructed_im");
    for (index, occ) in stripped.basis().iter().enumerate() {
        let weight = stripped.operator().matrix()[(index, index)].re;
        let (re, im) = amplitudes
            .map(|a| (a[index].re, a[index].im))
            .unwrap_or((f64::NAN, f64::NAN));
        let occ_label: Vec<String> = occ.iter().map(|n| n.to_string()).collect();
        sink.note(format!(
            "accessible occupation [{}]: weight = {:.9}",
            occ_label.join(" "),
            weight
        ));
        sink.row(format!("{index},{},{},{}", num(weight), num(re), num(im)));
    }
    match &reconstruction {
        Ok(state) => {
            sink.note(format!(
                "reconstructed pure state (canonical phase): dim {}",
                state.dim()
            ));
        }
        Err(err) => sink.note(format!("no pure-state reconstruction: {err}")),
    }
    sink.finish(resolved.out.as_deref())?;

    if resolved.assert_bounds && reconstruction.is_err() {
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}
