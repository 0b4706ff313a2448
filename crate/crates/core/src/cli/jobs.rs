//! The five jobs and the checks they run.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ModelConfig, RunConfig};
use super::report::{Check, RunReport};
use crate::error::Result;
use crate::evolution::{
    convergence_study, fit_order, full_spectrum, physical_spectrum, EffectiveHamiltonian, LadderPoint, Propagator,
    Spectrum,
};
use crate::fock::{
    binomial, kernel_eval, ladder_operators, matmul, max_abs, scalar_product_quadrature_oracle, CMatrix, CoherentPoint,
    FockOperator, FockVector, MAX_ORACLE_MODES,
};
use crate::models::{constraint_operators, hamiltonian, GaugeGroup, GaugeModel, Hamiltonian, PotentialSpec};
use crate::projector::{
    kernel_closed_form_son, kernel_closed_form_son_partial, physical_basis_son_on, projector_matrix,
    random_rotation, son_truncation_tail, ym_closed_form_audit, ProjectorBundle, ProjectorMethodKind,
};
use crate::sampling::{random_pair_uv_bounded, random_point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Fock and physical dimensions per degree block.
    Basis,
    /// Projector construction, laws, method agreement and kernel checks.
    Projector,
    /// Physical and full spectra on the certified band.
    Spectrum,
    /// Projected evolution and sliced convergence study.
    Evolve,
    /// Every check applicable to the configured model.
    Verify,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis => "basis",
            Command::Projector => "projector",
            Command::Spectrum => "spectrum",
            Command::Evolve => "evolve",
            Command::Verify => "verify",
        }
    }
}

/// Lazily built shared objects for one run.
struct Session<'a> {
    cfg: &'a RunConfig,
    model: GaugeModel,
    constraints: Vec<FockOperator>,
    hamiltonian: Option<Hamiltonian>,
    nullspace: Option<ProjectorBundle>,
    selected: Option<ProjectorBundle>,
    timings: BTreeMap<String, f64>,
}

impl<'a> Session<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        let model = cfg.build_model()?;
        Ok(Self {
            cfg,
            constraints: constraint_operators(&model),
            model,
            hamiltonian: None,
            nullspace: None,
            selected: None,
            timings: BTreeMap::new(),
        })
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.cfg.seed);
        rng.set_stream(stream);
        rng
    }

    fn num_modes(&self) -> usize {
        self.model.modes().num_modes()
    }

    fn hamiltonian(&mut self) -> Result<Hamiltonian> {
        if self.hamiltonian.is_none() {
            self.hamiltonian = Some(hamiltonian(&self.model)?);
        }
        Ok(self.hamiltonian.clone().expect("set above"))
    }

    fn nullspace(&mut self) -> Result<ProjectorBundle> {
        if self.nullspace.is_none() {
            let start = Instant::now();
            let method = self.cfg.projector_method(ProjectorMethodKind::Nullspace, &self.model)?;
            self.nullspace = Some(projector_matrix(&self.model, &method)?);
            self.timings
                .insert("projector.nullspace".into(), start.elapsed().as_secs_f64());
        }
        Ok(self.nullspace.clone().expect("set above"))
    }

    fn build(&mut self, kind: ProjectorMethodKind) -> Result<ProjectorBundle> {
        if kind == ProjectorMethodKind::Nullspace {
            return self.nullspace();
        }
        let start = Instant::now();
        let method = self.cfg.projector_method(kind, &self.model)?;
        let q = projector_matrix(&self.model, &method)?;
        self.timings
            .insert(format!("projector.{}", kind_name(kind)), start.elapsed().as_secs_f64());
        Ok(q)
    }

    fn selected(&mut self) -> Result<ProjectorBundle> {
        if self.selected.is_none() {
            self.selected = Some(self.build(self.cfg.projector.method)?);
        }
        Ok(self.selected.clone().expect("set above"))
    }

    fn is_harmonic_vector(&self) -> bool {
        matches!(
            self.cfg.model,
            ModelConfig::SoNVector {
                potential: PotentialSpec::Harmonic,
                ..
            }
        )
    }

    fn random_group_elements(&self, stream: u64, count: usize) -> Vec<nalgebra::DMatrix<f64>> {
        let GaugeGroup::SO(n) = self.model.group();
        let mut rng = self.rng(stream);
        (0..count)
            .map(|_| self.model.lift_rotation(&random_rotation(n, &mut rng)))
            .collect()
    }

    fn random_points(&self, stream: u64, count: usize) -> Vec<(CoherentPoint, CoherentPoint)> {
        let mut rng = self.rng(stream);
        let n = self.num_modes();
        let scale = self.cfg.sampling.point_scale;
        (0..count)
            .map(|_| (random_point(n, scale, &mut rng), random_point(n, scale, &mut rng)))
            .collect()
    }
}

fn kind_name(kind: ProjectorMethodKind) -> &'static str {
    match kind {
        ProjectorMethodKind::Nullspace => "nullspace",
        ProjectorMethodKind::GroupAverage => "group_average",
        ProjectorMethodKind::ClosedFormBasis => "closed_form_basis",
    }
}

/// Runs a job, turning a library error into a failed check.
fn guarded(report: &mut RunReport, name: &str, job: impl FnOnce(&mut RunReport) -> Result<()>) {
    if let Err(e) = job(report) {
        report.check(Check::failed(name, &e));
    }
}

pub fn run(command: Command, cfg: &RunConfig, timings: bool) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(command.name(), cfg.clone());
    match Session::new(cfg) {
        Err(e) => report.check(Check::failed("model.construction", &e)),
        Ok(mut session) => {
            let s = &mut session;
            let jobs: &[fn(&mut Session, &mut RunReport)] = match command {
                Command::Basis => &[job_basis],
                Command::Projector => &[job_projector],
                Command::Spectrum => &[job_spectrum],
                Command::Evolve => &[job_evolve],
                Command::Verify => &[job_model, job_fock, job_basis, job_projector, job_spectrum, job_evolve],
            };
            for job in jobs {
                job(s, &mut report);
            }
            if timings {
                let mut t = std::mem::take(&mut s.timings);
                t.insert("total".into(), start.elapsed().as_secs_f64());
                report.timings = Some(t);
            }
        }
    }
    report.finish();
    report
}

fn timed<T>(s: &mut Session, name: &str, f: impl FnOnce(&mut Session) -> T) -> T {
    let start = Instant::now();
    let out = f(s);
    s.timings.insert(name.to_string(), start.elapsed().as_secs_f64());
    out
}

#[derive(Serialize)]
struct ModelSummary {
    group: String,
    num_modes: usize,
    cutoff: usize,
    dimension: usize,
    num_generators: usize,
    hamiltonian_degree: usize,
    certified_band: usize,
}

fn job_model(s: &mut Session, report: &mut RunReport) {
    timed(s, "model", |s| {
        let t = &s.cfg.tolerances;
        let g = s.model.generators();
        report.check(Check::at_most("generators.antisymmetry", g.antisymmetry_defect(), t.generator_algebra));
        report.check(Check::at_most("generators.closure", g.algebra_defect(), t.generator_algebra));
        report.check(Check::at_most(
            "generators.structure_constant_antisymmetry",
            g.structure_antisymmetry_defect(),
            t.generator_algebra,
        ));
        let anti = s
            .constraints
            .iter()
            .map(|c| max_abs(&(c.matrix().adjoint() + c.matrix())))
            .fold(0.0, f64::max);
        report.check(Check::at_most("constraints.anti_hermitian", anti, t.hermiticity));
        let mut closure = 0.0f64;
        let len = s.constraints.len();
        for a in 0..len {
            for b in 0..len {
                let ga = s.constraints[a].matrix();
                let gb = s.constraints[b].matrix();
                let mut d = matmul(ga, gb) - matmul(gb, ga);
                for c in 0..len {
                    d -= s.constraints[c].matrix() * Complex64::new(g.f(a, b, c), 0.0);
                }
                closure = closure.max(max_abs(&d));
            }
        }
        report.check(Check::at_most("constraints.closure", closure, t.gauge_commutator));
        guarded(report, "hamiltonian.construction", |report| {
            let h = s.hamiltonian()?;
            report.check(Check::at_most(
                "hamiltonian.hermiticity",
                h.operator.hermiticity_defect(),
                t.hermiticity,
            ));
            let comm = s
                .constraints
                .iter()
                .map(|c| max_abs(&(matmul(h.operator.matrix(), c.matrix()) - matmul(c.matrix(), h.operator.matrix()))))
                .fold(0.0, f64::max);
            report.check(Check::at_most("hamiltonian.gauge_commutator", comm, t.gauge_commutator));
            report.insert(
                "model",
                ModelSummary {
                    group: s.model.group().to_string(),
                    num_modes: s.num_modes(),
                    cutoff: s.model.cutoff(),
                    dimension: s.model.modes().dim(),
                    num_generators: len,
                    hamiltonian_degree: h.potential_degree,
                    certified_band: h.certified_band(),
                },
            );
            Ok(())
        });
    })
}

fn job_fock(s: &mut Session, report: &mut RunReport) {
    timed(s, "fock", |s| {
        let t = &s.cfg.tolerances;
        let modes = s.model.modes().clone();
        let (ann, cre) = ladder_operators(&modes);
        let below = modes.cutoff().saturating_sub(1);
        let mut worst = 0.0f64;
        for (a, ad) in ann.iter().zip(&cre) {
            let comm = a.commutator(ad).expect("same mode set");
            let id = FockOperator::identity(modes.clone());
            worst = worst.max(comm.sub(&id).expect("same mode set").max_norm_within(below));
        }
        report.check(Check::at_most("fock.canonical_commutator", worst, t.fock_algebra));
        if modes.num_modes() > MAX_ORACLE_MODES {
            report.check(
                Check::completed("fock.scalar_product_oracle", None)
                    .with_note(format!("skipped: oracle supports at most {MAX_ORACLE_MODES} modes")),
            );
            return;
        }
        guarded(report, "fock.scalar_product_oracle", |report| {
            let top = modes.cutoff().min(2);
            let states: Vec<FockVector> = (0..modes.block(top).end)
                .map(|i| FockVector::basis_state(modes.clone(), i))
                .collect();
            let order = top + 1;
            let mut defect = 0.0f64;
            for (i, p) in states.iter().enumerate() {
                for (j, q) in states.iter().enumerate().skip(i) {
                    let v = scalar_product_quadrature_oracle(p, q, order)?;
                    let expected = if i == j { 1.0 } else { 0.0 };
                    defect = defect.max((v - expected).norm());
                }
            }
            report.check(Check::at_most("fock.scalar_product_oracle", defect, t.scalar_product));
            Ok(())
        });
    })
}

#[derive(Serialize)]
struct BasisSummary {
    num_modes: usize,
    cutoff: usize,
    dimension: usize,
    block_sizes: Vec<usize>,
    physical_dimensions: Vec<usize>,
    physical_total: usize,
    /// Closed-form invariant-monomial basis sizes, vector model only.
    closed_form_dimensions: Option<Vec<usize>>,
    null_space_gaps: Vec<crate::projector::BlockSpectrumGap>,
}

fn job_basis(s: &mut Session, report: &mut RunReport) {
    timed(s, "basis", |s| {
        guarded(report, "basis", |report| {
            let t = s.cfg.tolerances.clone();
            let modes = s.model.modes().clone();
            let n = modes.num_modes();
            let block_sizes: Vec<usize> = (0..=modes.cutoff()).map(|k| modes.block_size(k)).collect();
            let mismatched = block_sizes
                .iter()
                .enumerate()
                .filter(|(k, &b)| b != binomial((k + n - 1) as u64, (n - 1) as u64) as usize)
                .count();
            report.check(Check::equals("basis.block_size_mismatches", mismatched, 0));
            report.check(Check::equals(
                "basis.dimension",
                modes.dim(),
                binomial((n + modes.cutoff()) as u64, modes.cutoff() as u64) as usize,
            ));
            let q = s.nullspace()?;
            let physical = q.block_dimensions();
            let closed = if matches!(s.cfg.model, ModelConfig::SoNVector { .. }) {
                let basis = physical_basis_son_on(&modes)?;
                let mut dims = vec![0; modes.cutoff() + 1];
                for v in &basis.vectors {
                    if let Some(i) = v.coeffs().iter().position(|z| z.norm() > 0.0) {
                        dims[modes.degree_of(i)] += 1;
                    }
                }
                let mismatched = dims.iter().zip(&physical).filter(|(a, b)| a != b).count();
                report.check(Check::equals("basis.closed_form_dimension_mismatches", mismatched, 0));
                report.check(Check::at_most(
                    "basis.closed_form_constraint_residual",
                    basis.max_constraint_residual(&s.constraints)?,
                    t.projector_law,
                ));
                report.check(Check::at_most("basis.closed_form_gram", basis.gram_defect(), t.projector_law));
                Some(dims)
            } else {
                None
            };
            report.insert(
                "basis",
                BasisSummary {
                    num_modes: n,
                    cutoff: modes.cutoff(),
                    dimension: modes.dim(),
                    block_sizes,
                    physical_total: physical.iter().sum(),
                    physical_dimensions: physical,
                    closed_form_dimensions: closed,
                    null_space_gaps: q.gaps.clone(),
                },
            );
            Ok(())
        })
    })
}

#[derive(Serialize)]
struct Agreement {
    method: &'static str,
    max_abs_diff: f64,
    tolerance: Option<f64>,
}

#[derive(Serialize)]
struct ClosedFormComparison {
    points: usize,
    max_uv: f64,
    /// Against the series cut at the same degree as the Fock space.
    max_abs_diff_partial: f64,
    /// Against the full series.
    max_abs_diff_full: f64,
    /// Bound on the series tail beyond the cutoff for `|uv| ≤ max_uv`.
    truncation_tail: f64,
    tolerance: f64,
}

fn job_projector(s: &mut Session, report: &mut RunReport) {
    timed(s, "projector", |s| {
        guarded(report, "projector.construction", |report| projector_checks(s, report));
    })
}

fn projector_checks(s: &mut Session, report: &mut RunReport) -> Result<()> {
    let t = s.cfg.tolerances.clone();
    let q = s.selected()?;
    let laws = q.laws(&s.constraints);
    report.check(Check::at_most("projector.idempotency", laws.idempotency, t.projector_law));
    report.check(Check::at_most("projector.hermiticity", laws.hermiticity, t.projector_law));
    report.check(Check::at_most(
        "projector.constraint_annihilation",
        laws.annihilation_left.max(laws.annihilation_right),
        t.projector_law,
    ));
    report.check(Check::at_most("projector.degree_preservation", laws.off_block, t.projector_law));
    report.insert("projector_laws", laws);
    report.insert("projector_block_dimensions", q.block_dimensions());

    let reference = s.nullspace()?;
    let mismatched = q
        .block_dimensions()
        .iter()
        .zip(reference.block_dimensions())
        .filter(|(a, b)| **a != *b)
        .count();
    report.check(Check::equals("projector.block_dimension_mismatches", mismatched, 0));

    if s.cfg.projector.compare {
        let is_vector = matches!(s.cfg.model, ModelConfig::SoNVector { .. });
        let mut agreements = Vec::new();
        let others: Vec<ProjectorMethodKind> = [ProjectorMethodKind::GroupAverage, ProjectorMethodKind::ClosedFormBasis]
            .into_iter()
            .filter(|k| *k != ProjectorMethodKind::ClosedFormBasis || is_vector)
            .collect();
        for kind in others {
            let other = if kind == s.cfg.projector.method { q.clone() } else { s.build(kind)? };
            let diff = other.operator.max_diff(&reference.operator)?;
            let name = format!("projector.agreement.nullspace_vs_{}", kind_name(kind));
            let tolerance = match kind {
                ProjectorMethodKind::GroupAverage if s.cfg.quadrature_rule(&s.model)?.is_monte_carlo() => None,
                ProjectorMethodKind::GroupAverage => Some(t.method_agreement),
                _ => Some(t.basis_agreement),
            };
            report.check(match tolerance {
                Some(tol) => Check::at_most(name, diff, tol),
                None => Check::informational(name, diff).with_note("Monte Carlo rule: statistical, not exact"),
            });
            agreements.push(Agreement {
                method: kind_name(kind),
                max_abs_diff: diff,
                tolerance,
            });
        }
        report.insert("projector_agreement", agreements);
    }

    // invariance of the kernel under simultaneous rotation of both arguments
    let group = s.random_group_elements(1, s.cfg.sampling.group_elements);
    let points = s.random_points(2, s.cfg.sampling.points);
    let mut worst = 0.0f64;
    for (astar, a) in &points {
        let base = kernel_eval(&q.operator, astar, a)?;
        for g in &group {
            let moved = kernel_eval(&q.operator, &astar.rotated(g), &a.rotated(g))?;
            worst = worst.max((moved - base).norm());
        }
    }
    report.check(Check::at_most("projector.kernel_invariance", worst, t.invariance));

    if let ModelConfig::SoNVector { n, .. } = s.cfg.model {
        let mut rng = s.rng(3);
        let bound = s.cfg.sampling.max_uv;
        let cutoff = s.model.cutoff();
        let mut partial_diff = 0.0f64;
        let mut full_diff = 0.0f64;
        for _ in 0..s.cfg.sampling.closed_form_points {
            let (astar, a) = random_pair_uv_bounded(n, bound, &mut rng);
            let direct = kernel_eval(&q.operator, &astar, &a)?;
            partial_diff = partial_diff.max((kernel_closed_form_son_partial(&astar, &a, n, cutoff)? - direct).norm());
            full_diff = full_diff.max((kernel_closed_form_son(&astar, &a, n)? - direct).norm());
        }
        let tail = son_truncation_tail(n, cutoff, bound)?;
        report.check(Check::at_most("projector.closed_form_partial_series", partial_diff, t.closed_form));
        let full = if tail <= t.closed_form / 10.0 {
            Check::at_most("projector.closed_form_full_series", full_diff, t.closed_form)
        } else {
            Check::informational("projector.closed_form_full_series", full_diff).with_note(format!(
                "series tail beyond the cutoff is up to {tail:.3e}; raise the cutoff to certify"
            ))
        };
        report.check(full);
        report.insert(
            "closed_form_kernel",
            ClosedFormComparison {
                points: s.cfg.sampling.closed_form_points,
                max_uv: bound,
                max_abs_diff_partial: partial_diff,
                max_abs_diff_full: full_diff,
                truncation_tail: tail,
                tolerance: t.closed_form,
            },
        );
    }

    if let ModelConfig::Su2Ym { .. } = s.cfg.model {
        let quad = s.cfg.quadrature_rule(&s.model)?;
        let points = s.random_points(4, s.cfg.sampling.audit_points);
        let audit = ym_closed_form_audit(&s.model, &q, &quad, &points, t.ym_agreement)?;
        report.check(
            Check::completed("projector.ym_closed_form_audit", Some(audit.max_rel_diff)).with_note(format!(
                "closed form {} the group average to {:.0e}; value at origin {:.6} vs {:.6}",
                if audit.agrees { "matches" } else { "does not match" },
                audit.agreement_tolerance,
                audit.origin_closed_form,
                audit.origin_group_average
            )),
        );
        report.insert("ym_audit", audit);
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepPoint {
    cutoff: usize,
    dimension: usize,
    physical_dimension: usize,
    ground_energy: f64,
}

#[derive(Serialize)]
struct SpectrumSummary {
    band: usize,
    physical_levels: Vec<crate::evolution::EnergyLevel>,
    full_levels: Vec<crate::evolution::EnergyLevel>,
    tolerance: f64,
}

/// Certified levels against `(energy, degeneracy)` expectations.
fn compare_levels(name: &str, spectrum: &Spectrum, expected: &[(f64, usize)], tol: f64, report: &mut RunReport) {
    let got: Vec<_> = spectrum.certified_levels().collect();
    report.check(Check::equals(format!("{name}.certified_level_count"), got.len(), expected.len()));
    let energy = got
        .iter()
        .zip(expected)
        .map(|(l, (e, _))| (l.energy - e).abs())
        .fold(0.0, f64::max);
    report.check(Check::at_most(format!("{name}.energies"), energy, tol));
    let degeneracy = got
        .iter()
        .zip(expected)
        .filter(|(l, (_, d))| l.degeneracy != *d)
        .count();
    report.check(Check::equals(format!("{name}.degeneracy_mismatches"), degeneracy, 0));
}

fn job_spectrum(s: &mut Session, report: &mut RunReport) {
    timed(s, "spectrum", |s| {
        guarded(report, "spectrum", |report| spectrum_checks(s, report));
    })
}

fn spectrum_checks(s: &mut Session, report: &mut RunReport) -> Result<()> {
    let t = s.cfg.tolerances.clone();
    let h = s.hamiltonian()?;
    let q = s.selected()?;
    let physical = physical_spectrum(&h, &q)?;
    let full = full_spectrum(&h)?;
    let band = h.certified_band();
    if s.is_harmonic_vector() {
        let n = s.num_modes();
        let zero_point = n as f64 / 2.0;
        let dims = s.nullspace()?.block_dimensions();
        let expected_physical: Vec<(f64, usize)> = (0..=band)
            .filter(|&k| dims[k] > 0)
            .map(|k| (k as f64 + zero_point, dims[k]))
            .collect();
        compare_levels("spectrum.physical", &physical, &expected_physical, t.spectrum, report);
        let expected_full: Vec<(f64, usize)> = (0..=band)
            .map(|k| (k as f64 + zero_point, binomial((k + n - 1) as u64, (n - 1) as u64) as usize))
            .collect();
        compare_levels("spectrum.full", &full, &expected_full, t.spectrum, report);
    } else if let Some(e) = physical.ground_energy() {
        report.check(Check::informational("spectrum.physical_ground_energy", e));
    }
    report.insert(
        "spectrum",
        SpectrumSummary {
            band,
            physical_levels: physical.levels.clone(),
            full_levels: full.levels.clone(),
            tolerance: t.spectrum,
        },
    );

    if !s.cfg.spectrum.sweep.is_empty() {
        let mut cutoffs = s.cfg.spectrum.sweep.clone();
        cutoffs.sort_unstable();
        cutoffs.dedup();
        let mut sweep = Vec::new();
        for &c in &cutoffs {
            let model = s.cfg.build_model_at(c)?;
            let h = hamiltonian(&model)?;
            let method = s.cfg.projector_method(ProjectorMethodKind::Nullspace, &model)?;
            let q = projector_matrix(&model, &method)?;
            let spectrum = physical_spectrum(&h, &q)?;
            sweep.push(SweepPoint {
                cutoff: c,
                dimension: model.modes().dim(),
                physical_dimension: q.physical_dimension(),
                ground_energy: spectrum.ground_energy().unwrap_or(f64::NAN),
            });
        }
        let rise = sweep
            .windows(2)
            .map(|w| w[1].ground_energy - w[0].ground_energy)
            .fold(0.0, f64::max);
        report.check(
            Check::at_most("spectrum.sweep_ground_energy_rise", rise, t.sweep_monotonicity)
                .with_note("the physical ground energy may not increase with the cutoff"),
        );
        report.insert("spectrum_sweep", sweep);
    }
    Ok(())
}

#[derive(Serialize)]
struct PointwiseSlice {
    epsilons: Vec<f64>,
    /// `|K_ε(a*,a) − Q(a*,a) exp(−iε H_ef(a*,a))|` per point and slice length.
    defects: Vec<Vec<f64>>,
    orders: Vec<f64>,
    skipped_kernel_zeros: usize,
}

#[derive(Serialize)]
struct EffectiveHamiltonianSummary {
    at_origin: Complex64,
    expected_at_origin: Option<f64>,
    max_invariance_defect: f64,
    evaluated: usize,
    skipped_kernel_zeros: usize,
    tolerance: f64,
}

#[derive(Serialize)]
struct EvolutionDefects {
    time: f64,
    initial_minus_projector: f64,
    projection_commutation: f64,
    unphysical_removal: f64,
    physical_unitarity: f64,
    full_unitarity: f64,
    spectral_reconstruction: f64,
    tolerance: f64,
}

fn job_evolve(s: &mut Session, report: &mut RunReport) {
    timed(s, "evolve", |s| {
        guarded(report, "evolution", |report| evolution_checks(s, report));
    })
}

fn evolution_checks(s: &mut Session, report: &mut RunReport) -> Result<()> {
    let t = s.cfg.tolerances.clone();
    let e = s.cfg.evolution.clone();
    let h = s.hamiltonian()?;
    let q = s.selected()?;
    let prop = Propagator::new(&h)?;
    let qm = q.operator.matrix();
    let dim = qm.nrows();
    let id = CMatrix::identity(dim, dim);

    let u0 = prop.physical(&q, 0.0)?;
    let initial = u0.operator.max_diff(&q.operator)?;
    let u_full = prop.matrix(e.time);
    let uph = prop.physical(&q, e.time)?.operator;
    let um = uph.matrix();
    let commutation = max_abs(&(um - matmul(qm, um)));
    let removal = max_abs(&matmul(um, &(&id - qm)));
    let unitarity = max_abs(&(matmul(&um.adjoint(), um) - qm));
    let full_unitarity = max_abs(&(matmul(&u_full.adjoint(), &u_full) - &id));
    let spectrum = physical_spectrum(&h, &q)?;
    let reconstruction = max_abs(&(spectrum.evolution(e.time) - um));
    report.check(Check::at_most("evolution.initial_equals_projector", initial, t.evolution_projection));
    report.check(Check::at_most("evolution.projection_commutation", commutation, t.evolution_projection));
    report.check(Check::at_most("evolution.unphysical_removal", removal, t.evolution_projection));
    report.check(Check::at_most("evolution.physical_unitarity", unitarity, t.evolution_projection));
    report.check(Check::at_most("evolution.full_unitarity", full_unitarity, t.evolution_projection));
    report.check(Check::at_most(
        "evolution.spectral_reconstruction",
        reconstruction,
        t.spectral_reconstruction,
    ));
    report.insert(
        "evolution",
        EvolutionDefects {
            time: e.time,
            initial_minus_projector: initial,
            projection_commutation: commutation,
            unphysical_removal: removal,
            physical_unitarity: unitarity,
            full_unitarity,
            spectral_reconstruction: reconstruction,
            tolerance: t.evolution_projection,
        },
    );

    let study = timed(s, "evolve.convergence", |_| convergence_study(&h, &q, e.time, &e.slices))?;
    report.check(Check::within(
        "evolution.sliced_global_order",
        study.global_fit.order,
        t.global_order_min,
        t.global_order_max,
    ));
    report.check(Check::within(
        "evolution.sliced_local_order",
        study.local_fit.order,
        t.local_order_min,
        t.local_order_max,
    ));
    report.insert("convergence", &study);

    let heff = EffectiveHamiltonian::new(&h, &q)?;
    let n = s.num_modes();
    let origin = heff.eval(&CoherentPoint::zeros(n), &CoherentPoint::zeros(n))?;
    let expected = s.is_harmonic_vector().then(|| n as f64 / 2.0);
    match expected {
        Some(v) => report.check(Check::at_most(
            "effective_hamiltonian.origin",
            (origin - v).norm(),
            t.h_ef_origin,
        )),
        None => report.check(Check::informational("effective_hamiltonian.origin", origin.re)),
    }
    let group = s.random_group_elements(5, s.cfg.sampling.group_elements);
    let points = s.random_points(6, s.cfg.sampling.points);
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    let mut zeros = 0;
    for (astar, a) in &points {
        let base = match heff.eval(astar, a) {
            Ok(v) => v,
            Err(crate::Error::KernelZero { .. }) => {
                zeros += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        for g in &group {
            match heff.eval(&astar.rotated(g), &a.rotated(g)) {
                Ok(v) => {
                    worst = worst.max((v - base).norm());
                    evaluated += 1;
                }
                Err(crate::Error::KernelZero { .. }) => zeros += 1,
                Err(e) => return Err(e),
            }
        }
    }
    report.check(Check::at_most("effective_hamiltonian.invariance", worst, t.h_ef_invariance));
    report.insert(
        "effective_hamiltonian",
        EffectiveHamiltonianSummary {
            at_origin: origin,
            expected_at_origin: expected,
            max_invariance_defect: worst,
            evaluated,
            skipped_kernel_zeros: zeros,
            tolerance: t.h_ef_invariance,
        },
    );

    let points = s.random_points(7, e.pointwise_points);
    let mut defects = Vec::new();
    let mut orders = Vec::new();
    let mut skipped = 0;
    for (astar, a) in &points {
        let mut row = Vec::new();
        let mut ladder = Vec::new();
        let mut zero = false;
        for &eps in &e.pointwise_epsilons {
            match heff.single_slice(eps, astar, a) {
                Ok((lhs, rhs)) => {
                    let d = (lhs - rhs).norm();
                    row.push(d);
                    ladder.push(LadderPoint {
                        slices: 1,
                        epsilon: eps,
                        defect: d,
                    });
                }
                Err(crate::Error::KernelZero { .. }) => {
                    zero = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if zero {
            skipped += 1;
            continue;
        }
        orders.push(fit_order(&ladder)?.order);
        defects.push(row);
    }
    let (lo, hi) = orders
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &o| (lo.min(o), hi.max(o)));
    report.check(Check::within("effective_hamiltonian.single_slice_order_min", lo, t.local_order_min, t.local_order_max));
    report.check(Check::within("effective_hamiltonian.single_slice_order_max", hi, t.local_order_min, t.local_order_max));
    report.insert(
        "single_slice",
        PointwiseSlice {
            epsilons: e.pointwise_epsilons.clone(),
            defects,
            orders,
            skipped_kernel_zeros: skipped,
        },
    );
    Ok(())
}
