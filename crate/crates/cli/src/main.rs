//! Command-line front end: instance generation, the verification pipeline,
//! and report emission.
//!
//! Every subcommand prints one line per check and, with `--out`, writes the
//! full machine-readable report. The process exits nonzero exactly when a
//! checked record failed. All sampling is seeded; identical configuration
//! and seed give byte-identical reports.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hypact_core::action::{enumerate_elements, Action};
use hypact_core::annulus::{Annulus, AnnulusSystem};
use hypact_core::condition::{check_condition_c, BoundarySpace, TorusSpace};
use hypact_core::dynamics::{
    classify_element, detect_north_south, proper_discontinuity_counts, DynamicsKind, ElementKind,
};
use hypact_core::graph::SampleMode;
use hypact_core::io::{self, SpaceKind};
use hypact_core::lemmas::verify_constant_lemmas;
use hypact_core::rat::rat;
use hypact_core::report::{Record, Report};
use hypact_core::triples::{
    build_triple_graph, certify_loxodromic, certify_wpd, verify_axioms, SigmaConfig,
};
use hypact_core::{gen, BoundaryModel, ClopenSet, FreeWord, MetricGraph};
use std::path::{Path, PathBuf};

#[derive(Parser)]
#[command(name = "hypact", version, about = "finite-scale verification of boundary dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write instance files (graphs, boundary models, actions).
    Gen(GenArgs),
    /// Run the constant-estimate suite on a graph instance.
    VerifyLemmas(VerifyLemmasArgs),
    /// Fixed points, push-in bounds and classification of one element.
    Dynamics(DynamicsArgs),
    /// Diagonal-separation checks around a pair of points.
    ConditionC(ConditionCArgs),
    /// Annulus axioms, the triple-space graph and the certificates.
    Annulus(AnnulusArgs),
    /// The whole pipeline on the standard free-group instance.
    Full(FullArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Instance kind: f2-tree, f2-boundary, cycle, grid, z2-action.
    kind: String,
    /// Tree or boundary depth.
    #[arg(long, default_value_t = 4)]
    depth: usize,
    /// Representative length for boundary models; defaults to depth + words.
    #[arg(long)]
    buffer: Option<usize>,
    /// Word window the instance should support.
    #[arg(long, default_value_t = 6)]
    words: usize,
    /// Cycle length or grid/torus side.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct VerifyLemmasArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Optional boundary model whose metric records are appended.
    #[arg(long)]
    boundary: Option<PathBuf>,
    /// exhaustive or sampled
    #[arg(long, default_value = "sampled")]
    mode: String,
    #[arg(long, default_value_t = 800)]
    samples: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct DynamicsArgs {
    #[arg(long)]
    boundary: PathBuf,
    #[arg(long)]
    action: PathBuf,
    /// The element, as a word over the action's generators.
    #[arg(long, default_value = "a")]
    g: String,
    /// Cylinder depths for the push-in bounds, comma separated.
    #[arg(long, default_value = "1,2,3")]
    depths: String,
    #[arg(long, default_value_t = 12)]
    n_max: u32,
    /// Word window for the triple-space probe.
    #[arg(long, default_value_t = 6)]
    words: usize,
    /// Pairwise prefix bound of the probe's compact triple set.
    #[arg(long, default_value_t = 1)]
    separation: usize,
    /// Slack for the word-metric displacement probe.
    #[arg(long, default_value_t = 2)]
    epsilon: i64,
    /// Comparison power for the word-metric displacement probe.
    #[arg(long = "K", default_value_t = 4)]
    k_power: u32,
    #[arg(long, default_value_t = 3)]
    tail_window: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConditionCArgs {
    #[arg(long)]
    boundary: Option<PathBuf>,
    #[arg(long)]
    graph: Option<PathBuf>,
    #[arg(long)]
    action: PathBuf,
    /// First point: a word (boundary spaces) or a vertex id (graph spaces).
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, default_value_t = 50)]
    tuples: usize,
    #[arg(long, default_value_t = 6)]
    words: usize,
    #[arg(long, default_value_t = 3)]
    tail_window: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnnulusArgs {
    #[arg(long)]
    boundary: PathBuf,
    #[arg(long)]
    action: PathBuf,
    /// Annulus spec file; defaults to the standard generator annulus.
    #[arg(long)]
    annulus: Option<PathBuf>,
    /// Minus-side prefixes when no file is given.
    #[arg(long, default_value = "A")]
    minus: String,
    /// Plus-side prefixes when no file is given.
    #[arg(long, default_value = "a")]
    plus: String,
    #[arg(long, default_value_t = 6)]
    words: usize,
    /// Element for the certificates.
    #[arg(long, default_value = "a")]
    g: String,
    /// Witness point away from both annulus sides.
    #[arg(long, default_value = "b")]
    z: String,
    #[arg(long, default_value_t = 1)]
    epsilon: u32,
    #[arg(long, default_value_t = 6)]
    n_max: u32,
    /// Edge threshold for the triple graph; measured when omitted.
    #[arg(long)]
    s: Option<u32>,
    /// Build the triple-space graph (quadratic in the point count).
    #[arg(long, default_value_t = false)]
    sigma: bool,
    /// Word window used for the triple-space graph's system.
    #[arg(long, default_value_t = 4)]
    sigma_words: usize,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    tail_window: usize,
    /// Write the triple manifest and edge list here (prefix path).
    #[arg(long)]
    export_sigma: Option<PathBuf>,
    #[arg(long, default_value_t = 2_000_000)]
    max_edges: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FullArgs {
    #[arg(long, default_value_t = 3)]
    depth: usize,
    #[arg(long, default_value_t = 6)]
    words: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    tail_window: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::VerifyLemmas(args) => cmd_verify_lemmas(args),
        Command::Dynamics(args) => cmd_dynamics(args),
        Command::ConditionC(args) => cmd_condition_c(args),
        Command::Annulus(args) => cmd_annulus(args),
        Command::Full(args) => cmd_full(args),
    }
}

fn finish(report: Report, out: Option<&Path>) -> Result<i32> {
    for line in report.summary_lines() {
        println!("{line}");
    }
    if let Some(path) = out {
        std::fs::write(path, report.render())
            .with_context(|| format!("writing report to {}", path.display()))?;
    }
    Ok(if report.any_fail() { 1 } else { 0 })
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    std::fs::create_dir_all(&args.out_dir)?;
    let write = |name: &str, text: String| -> Result<()> {
        let path = args.out_dir.join(name);
        std::fs::write(&path, text)?;
        println!("wrote {}", path.display());
        Ok(())
    };
    match args.kind.as_str() {
        "f2-tree" => {
            let g = gen::f2_tree(args.depth);
            write(&format!("f2-tree-{}.graph", args.depth), io::write_graph(&g))?;
        }
        "cycle" => {
            let g = gen::cycle(args.n);
            write(&format!("cycle-{}.graph", args.n), io::write_graph(&g))?;
        }
        "grid" => {
            let g = gen::grid(args.n);
            write(&format!("grid-{}.graph", args.n), io::write_graph(&g))?;
        }
        "f2-boundary" => {
            let buffer = args.buffer.unwrap_or(args.depth + args.words);
            let text = io::write_boundary(args.depth, buffer, &hypact_core::Zeta::Ln2);
            write(&format!("f2-boundary-{}.bnd", args.depth), text)?;
            let gens = vec![
                ("a".to_string(), FreeWord::parse_f2("a")?),
                ("b".to_string(), FreeWord::parse_f2("b")?),
            ];
            write("f2.action", io::write_boundary_action(&gens))?;
        }
        "z2-action" => {
            let (graph, perms) = gen::z2_torus_parts(args.n);
            write(&format!("z2-torus-{}.graph", args.n), io::write_graph(&graph))?;
            write(
                &format!("z2-torus-{}.action", args.n),
                io::write_torus_action(args.n, &perms),
            )?;
        }
        other => bail!("unknown instance kind `{other}`"),
    }
    Ok(0)
}

fn load_graph(path: &Path) -> Result<MetricGraph> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(io::parse_graph(&text, &path.display().to_string())?)
}

fn load_boundary(path: &Path) -> Result<BoundaryModel> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(io::parse_boundary(&text, &path.display().to_string())?)
}

fn load_action(path: &Path, graph: Option<&MetricGraph>) -> Result<io::ActionSpec> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    Ok(io::parse_action_spec(
        &text,
        &path.display().to_string(),
        graph,
    )?)
}

fn lemma_records(report: &hypact_core::lemmas::LemmaReport) -> Vec<Record> {
    let mut out = Vec::new();
    out.push(
        Record::measured(
            "delta-slim",
            "max slimness defect over canonical triangles",
            report.delta.delta_slim,
        )
        .with_detail("samples", report.delta.slim_samples),
    );
    out.push(
        Record::measured(
            "delta-four-point",
            "max four-point defect",
            report.delta.delta_4pt,
        )
        .with_detail("samples", report.delta.four_point_samples),
    );
    for r in &report.records {
        out.push(
            Record::pass_fail(r.id, r.claim, r.measured, r.bound)
                .with_detail("instances", r.instances),
        );
    }
    out
}

fn cmd_verify_lemmas(args: VerifyLemmasArgs) -> Result<i32> {
    let graph = load_graph(&args.graph)?;
    let boundary = args.boundary.as_deref().map(load_boundary).transpose()?;
    let mode = match args.mode.as_str() {
        "exhaustive" => SampleMode::Exhaustive,
        "sampled" => SampleMode::Sampled {
            samples: args.samples,
            seed: args.seed,
        },
        other => bail!("unknown mode `{other}`"),
    };
    let report = verify_constant_lemmas(&graph, mode, boundary.as_ref());
    let mut out = Report::new();
    out.set("command", "verify-lemmas");
    out.set("graph", args.graph.display());
    out.set("vertices", graph.vertex_count());
    out.set("mode", &args.mode);
    out.set("samples", args.samples);
    out.set("seed", args.seed);
    out.extend(lemma_records(&report));
    finish(out, args.out.as_deref())
}

fn cmd_dynamics(args: DynamicsArgs) -> Result<i32> {
    let model = load_boundary(&args.boundary)?;
    let spec = load_action(&args.action, None)?;
    let boundary_action = spec
        .action
        .as_boundary()
        .ok_or_else(|| anyhow!("dynamics needs a boundary action"))?
        .clone();
    let g = FreeWord::parse_f2(&args.g)?;
    let depths: Vec<usize> = args
        .depths
        .split(',')
        .map(|t| t.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!("bad depth list"))?;

    let mut out = Report::new();
    out.set("command", "dynamics");
    out.set("boundary", args.boundary.display());
    out.set("depth", model.depth());
    out.set("buffer", model.buffer());
    out.set("g", &args.g);
    out.set("n-max", args.n_max);
    out.set("words", args.words);
    out.set("tail-window", args.tail_window);

    let cert = detect_north_south(&model, &boundary_action, &g, &depths, args.n_max)?;
    let mut rec = Record::boolean(
        "north-south",
        "the element fixes exactly two points and pushes everything between them",
        cert.kind == DynamicsKind::NorthSouth,
    )
    .with_detail("fixed-points", cert.fixed_points.len());
    if let (Some(att), Some(rep)) = (&cert.attracting, &cert.repelling) {
        rec = rec
            .with_detail("attracting", att)
            .with_detail("repelling", rep);
        for p in &cert.pushes {
            rec = rec.with_detail(
                &format!("least-n-depth-{}", p.depth),
                p.least_n.map_or("none".to_string(), |n| n.to_string()),
            );
        }
    }
    out.push(rec);

    let class = classify_element(&spec.action, Some(&model), &g);
    out.push(
        Record::boolean("classification", "element kind resolved", class.kind != ElementKind::Unresolved)
            .with_detail("kind", format!("{:?}", class.kind))
            .with_detail("fixed-points", class.fixed_points)
            .with_detail(
                "order",
                class.order.map_or("infinite".to_string(), |o| o.to_string()),
            ),
    );

    let elements = enumerate_elements(&spec.action, args.words);
    let probe = proper_discontinuity_counts(&model, &elements, args.separation, args.tail_window)?;
    out.push(
        Record::boolean(
            "proper-discontinuity",
            "the returner count for the separated triple set stabilizes",
            probe.stabilized,
        )
        .with_detail("counts", format!("{:?}", probe.counts))
        .with_detail("separation", args.separation),
    );

    // Word-metric displacement probe on the group's own tree, with the
    // single-basepoint transfer check.
    let cayley = hypact_core::CayleyAction::rank2();
    let cayley_action = Action::Cayley(cayley.clone());
    let celements = enumerate_elements(&cayley_action, args.words);
    let g_elem = celements
        .iter()
        .find(|e| e.word == g)
        .cloned()
        .ok_or_else(|| anyhow!("the element must lie inside the word window"))?;
    let s0 = FreeWord::identity();
    let wpd = hypact_core::action::wpd_probe(
        &cayley,
        &celements,
        &g_elem,
        &s0,
        rat(args.epsilon),
        args.k_power,
        args.tail_window,
    );
    let mut rec = Record::boolean(
        "word-displacement",
        "the double displacement count stabilizes at the base point",
        wpd.stabilized,
    )
    .with_detail("epsilon", args.epsilon)
    .with_detail("K", args.k_power)
    .with_detail("counts", format!("{:?}", wpd.counts));
    let s1 = FreeWord::parse_f2("b")?;
    if let Some(t) = hypact_core::action::wpd_star_transfer(
        &cayley,
        &celements,
        &g_elem,
        &s0,
        &s1,
        rat(args.epsilon),
        args.k_power,
        args.tail_window,
    ) {
        rec = rec.with_detail(
            "transfer",
            format!(
                "count {} at shifted slack {} <= count {}: {}",
                t.count_s1,
                hypact_core::rat::fmt_rat(t.eps_shifted),
                t.count_s0,
                t.holds
            ),
        );
        if !t.holds {
            rec.status = hypact_core::Status::Fail;
        }
    }
    out.push(rec);

    finish(out, args.out.as_deref())
}

fn summarize_condition(
    out: &mut Report,
    summary: &hypact_core::condition::ConditionSummary,
) {
    out.push(
        Record::boolean(
            "condition-witness",
            "one basis pair around (x,y) serves every sampled tuple",
            summary.all_pass,
        )
        .with_detail("x", &summary.x)
        .with_detail("y", &summary.y)
        .with_detail("uv-depth", summary.uv_depth)
        .with_detail("tuples", summary.outcomes.len()),
    );
    for (i, o) in summary.outcomes.iter().enumerate() {
        out.push(
            Record::boolean(
                &format!("tuple-{i:03}"),
                "violator count stabilized over the tail window",
                o.stabilized,
            )
            .with_detail("kind", o.kind.as_str())
            .with_detail("targets", o.targets.join(","))
            .with_detail("target-depth", o.target_depth)
            .with_detail("counts", format!("{:?}", o.counts)),
        );
    }
    if summary.budget_exhausted {
        out.push(Record::boolean(
            "tuple-budget",
            "sampling filled the requested budget",
            false,
        ));
    }
}

fn cmd_condition_c(args: ConditionCArgs) -> Result<i32> {
    let mut out = Report::new();
    out.set("command", "condition-c");
    out.set("x", &args.x);
    out.set("y", &args.y);
    out.set("tuples", args.tuples);
    out.set("words", args.words);
    out.set("seed", args.seed);
    out.set("tail-window", args.tail_window);

    match (&args.boundary, &args.graph) {
        (Some(bpath), None) => {
            let model = load_boundary(bpath)?;
            let spec = load_action(&args.action, None)?;
            if spec.kind != SpaceKind::Boundary {
                bail!("expected a boundary action");
            }
            model.check_buffer(args.words)?;
            let elements = enumerate_elements(&spec.action, args.words);
            let space = BoundarySpace { model: &model };
            let x = model.point_from_word(&FreeWord::parse_f2(&args.x)?)?;
            let y = model.point_from_word(&FreeWord::parse_f2(&args.y)?)?;
            out.set("depth", model.depth());
            let summary = check_condition_c(
                &space,
                &elements,
                &x,
                &y,
                args.tuples,
                args.seed,
                args.tail_window,
            )?;
            summarize_condition(&mut out, &summary);
        }
        (None, Some(gpath)) => {
            let graph = load_graph(gpath)?;
            let spec = load_action(&args.action, Some(&graph))?;
            let side = match spec.kind {
                SpaceKind::Torus { side } => side,
                _ => bail!("graph condition checks need a torus action"),
            };
            let elements = enumerate_elements(&spec.action, args.words);
            let space = TorusSpace {
                graph: &graph,
                side,
            };
            let x = graph.id(&args.x)?;
            let y = graph.id(&args.y)?;
            out.set("side", side);
            let summary = check_condition_c(
                &space,
                &elements,
                &x,
                &y,
                args.tuples,
                args.seed,
                args.tail_window,
            )?;
            summarize_condition(&mut out, &summary);
            // Negative control: wrap-around translations never fix exactly
            // two points, so separation holds with no north-south element.
            let mut two_fixed = 0u64;
            for e in elements.iter() {
                let c = hypact_core::dynamics::classify_element(&spec.action, None, &e.word);
                if c.fixed_points == 2 {
                    two_fixed += 1;
                }
            }
            out.push(
                Record::boolean(
                    "no-two-fixed-points",
                    "no enumerated element fixes exactly two points",
                    two_fixed == 0,
                )
                .with_detail("elements", elements.cumulative_counts().last().copied().unwrap_or(0)),
            );
        }
        _ => bail!("give exactly one of --boundary or --graph"),
    }
    finish(out, args.out.as_deref())
}

fn cmd_annulus(args: AnnulusArgs) -> Result<i32> {
    let model = load_boundary(&args.boundary)?;
    let spec = load_action(&args.action, None)?;
    let boundary_action = spec
        .action
        .as_boundary()
        .ok_or_else(|| anyhow!("annulus systems need a boundary action"))?
        .clone();
    let base = match &args.annulus {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            io::parse_annulus(&text, &path.display().to_string())?
        }
        None => {
            let minus = parse_prefix_list(&args.minus)?;
            let plus = parse_prefix_list(&args.plus)?;
            Annulus::new(minus, plus)?
        }
    };

    let mut out = Report::new();
    out.set("command", "annulus");
    out.set("depth", model.depth());
    out.set("buffer", model.buffer());
    out.set("words", args.words);
    out.set("g", &args.g);
    out.set("z", &args.z);
    out.set("epsilon", args.epsilon);
    out.set("n-max", args.n_max);
    out.set("seed", args.seed);
    out.set("tail-window", args.tail_window);

    let system = AnnulusSystem::build(base.clone(), &boundary_action, args.words);
    out.set("annuli", system.len());

    let axioms = verify_axioms(&model, &system, args.samples, args.seed, args.tail_window);
    out.push(
        Record::boolean(
            "axiom-finite-stable",
            "sampled crossratios are finite and stable in the word window",
            axioms.infinite == 0 && axioms.stable == axioms.samples,
        )
        .with_detail("samples", axioms.samples)
        .with_detail("stable", axioms.stable)
        .with_detail("infinite", axioms.infinite)
        .with_detail("max-value", axioms.max_value),
    );
    out.push(
        Record::measured(
            "axiom-crossing-constant",
            "largest min of crossed crossratios over sampled quadruples",
            rat(axioms.crossing_k as i64),
        )
        .with_detail("samples", axioms.samples),
    );

    let g = FreeWord::parse_f2(&args.g)?;
    let z = FreeWord::parse_f2(&args.z)?;
    let lox = certify_loxodromic(&model, &system, &boundary_action, &g, &z, args.n_max, 32)?;
    let mut rec = Record::boolean(
        "loxodromic-certificate",
        "chain facts hold and displacement grows at least linearly",
        lox.all_pass,
    )
    .with_detail("push-power", lox.push_power);
    for row in &lox.rows {
        rec = rec.with_detail(
            &format!("n-{}", row.n),
            format!(
                "chain={} crossratio={} rho={} bound={}",
                row.chain_ok, row.crossratio, row.rho, row.bound
            ),
        );
    }
    rec = rec.with_detail("chain-witness", lox.chain_witness.join(" < "));
    out.push(rec);

    let elements = enumerate_elements(&spec.action, args.words);
    let wpd = certify_wpd(
        &model,
        &system,
        &boundary_action,
        &elements,
        &lox,
        &g,
        args.epsilon,
        40,
        args.seed,
        args.tail_window,
    )?;
    out.push(
        Record::boolean(
            "wpd-certificate",
            "ladder facts hold, membership implication holds, displacement count stabilizes",
            wpd.chain_ok && wpd.membership_failures == 0 && wpd.probe.stabilized,
        )
        .with_detail("ladder", wpd.ladder)
        .with_detail("comparison-power", wpd.k_power)
        .with_detail("membership-checked", wpd.membership_checked)
        .with_detail("membership-failures", wpd.membership_failures)
        .with_detail("counts", format!("{:?}", wpd.probe.counts)),
    );

    if args.sigma {
        let sigma_system = if args.sigma_words == args.words {
            system
        } else {
            AnnulusSystem::build(base, &boundary_action, args.sigma_words)
        };
        let cfg = SigmaConfig {
            seed: args.seed,
            s_override: args.s,
            ..Default::default()
        };
        let (graph, report) = build_triple_graph(&model, &sigma_system, &cfg)?;
        out.push(
            Record::boolean(
                "sigma-exactness",
                "diagonal zero, symmetry and sampled invariance are exact",
                report.diagonal_zero_ok
                    && report.symmetry_ok
                    && report.equivariance_checked == report.equivariance_exact,
            )
            .with_detail("triples", report.triple_count)
            .with_detail("invariance-pairs", report.equivariance_checked),
        );
        out.push(
            Record::measured(
                "sigma-quasimetric-defect",
                "additive triangle defect of the quasimetric",
                rat(report.r_defect as i64),
            )
            .with_detail("s", report.s)
            .with_detail(
                "coverage",
                format!("{}/{}", report.coverage.0, report.coverage.1),
            ),
        );
        out.push(
            Record::measured(
                "sigma-four-point",
                "four-point constant of the unit-edge path metric",
                report.delta_4pt,
            )
            .with_detail(
                "components",
                report
                    .components
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        );
        if let Some(prefix) = &args.export_sigma {
            let (manifest, edges, truncated) = graph.export(args.max_edges);
            std::fs::write(prefix.with_extension("vertices"), manifest)?;
            std::fs::write(prefix.with_extension("edges"), edges)?;
            out.push(
                Record::measured(
                    "sigma-export",
                    "edges written (the graph is dense; the cap truncates)",
                    rat(args.max_edges.min(i64::MAX as u64) as i64),
                )
                .with_detail("truncated", truncated),
            );
        }
    }

    finish(out, args.out.as_deref())
}

fn parse_prefix_list(text: &str) -> Result<ClopenSet> {
    let mut prefixes = Vec::new();
    for tok in text.split(',') {
        prefixes.push(FreeWord::parse_f2(tok.trim())?);
    }
    Ok(ClopenSet::from_prefixes(prefixes))
}

fn cmd_full(args: FullArgs) -> Result<i32> {
    let depth = args.depth;
    let words = args.words;
    let mut out = Report::new();
    out.set("command", "full");
    out.set("depth", depth);
    out.set("words", words);
    out.set("seed", args.seed);
    out.set("tail-window", args.tail_window);

    // Metric suite on the ball of the same radius.
    let tree = gen::f2_tree(depth.max(3));
    let lemma_report = verify_constant_lemmas(
        &tree,
        SampleMode::Sampled {
            samples: 400,
            seed: args.seed,
        },
        None,
    );
    out.extend(lemma_records(&lemma_report));

    // Boundary sandwich.
    let model = gen::f2_boundary(depth, depth + words + args.n_max_slack());
    let sandwich = model.verify_sandwich();
    out.push(
        Record::boolean(
            "boundary-sandwich",
            "d'/2 <= rho <= d' on every visible pair",
            sandwich.violations.is_empty(),
        )
        .with_detail("pairs", sandwich.pairs),
    );

    // Dynamics of the generator.
    let action = hypact_core::BoundaryAction::standard_f2();
    let g = FreeWord::parse_f2("a")?;
    let cert = detect_north_south(&model, &action, &g, &[1, 2], 10)?;
    out.push(Record::boolean(
        "north-south",
        "the generator has exactly two fixed points and finite push-in bounds",
        cert.kind == DynamicsKind::NorthSouth,
    ));

    // Diagonal separation at the axis of the generator.
    let action_enum = Action::Boundary(action.clone());
    let elements = enumerate_elements(&action_enum, words);
    let space = BoundarySpace { model: &model };
    let x = model.point_from_word(&FreeWord::parse_f2("a")?)?;
    let y = model.point_from_word(&FreeWord::parse_f2("A")?)?;
    let summary = check_condition_c(
        &space,
        &elements,
        &x,
        &y,
        20,
        args.seed,
        args.tail_window,
    )?;
    summarize_condition(&mut out, &summary);

    // Annulus axioms and the certificates.
    let base = Annulus::new(
        ClopenSet::cylinder(FreeWord::parse_f2("A")?),
        ClopenSet::cylinder(FreeWord::parse_f2("a")?),
    )?;
    let system = AnnulusSystem::build(base, &action, words);
    let axioms = verify_axioms(&model, &system, 100, args.seed, args.tail_window);
    out.push(
        Record::boolean(
            "axiom-finite-stable",
            "sampled crossratios are finite and stable in the word window",
            axioms.infinite == 0 && axioms.stable == axioms.samples,
        )
        .with_detail("max-value", axioms.max_value)
        .with_detail("crossing-constant", axioms.crossing_k),
    );
    let lox = certify_loxodromic(&model, &system, &action, &g, &FreeWord::parse_f2("b")?, 4, 16)?;
    out.push(Record::boolean(
        "loxodromic-certificate",
        "chain facts hold and displacement grows at least linearly",
        lox.all_pass,
    ));
    let wpd = certify_wpd(
        &model, &system, &action, &elements, &lox, &g, 1, 30, args.seed, args.tail_window,
    )?;
    out.push(Record::boolean(
        "wpd-certificate",
        "ladder facts hold, membership implication holds, displacement count stabilizes",
        wpd.chain_ok && wpd.membership_failures == 0 && wpd.probe.stabilized,
    ));

    finish(out, args.out.as_deref())
}

impl FullArgs {
    fn n_max_slack(&self) -> usize {
        // The full pipeline raises the generator to at most (2L+1) with
        // eps = 1, ladder 4, so K = 9; keep the representative that long.
        9
    }
}
