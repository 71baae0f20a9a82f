use std::fs;
use std::path::Path;

use armforge::arm_model::{gruebler_dof, validate_arm, ArmSpec};
use armforge::control_sim::{self, CycleSummary, CycleTrace, Rubric, Scene, SimConfig};
use armforge::economics::{bom_total, budget_check, desk_arm_bom, margin_from_f64, unit_price, Bom, Usd};
use armforge::gripper::{center_distance, pitch_diameter, vacuum_chain, ForceMode, GearSpec, VacuumSpec};
use armforge::kinematics::{forward_kinematics, inverse_kinematics, IkOptions, JointState, Pose, Workspace};
use armforge::sensors::{run_ranging_experiment, sweep_distances, write_rows_csv, UltrasonicSpec};
use armforge::structural::torque_chain;
use armforge::trade_study::{self, evaluate, sensitivity, DecisionMatrix, QfdMatrix};
use armforge::{presets, Error, Result};
use serde::Serialize;
use serde_json::json;

use crate::io::{csv_string, parse_list, parse_point, read_json, to_json, write_atomic};
use crate::{
    ArmArg, BomArgs, Cli, Command, DofArgs, FkArgs, Format, GripperCommand, IkArgs, MatrixCommand, ScoreArgs,
    SenseCommand, SimulateArgs, StaticsArgs, WorkspaceArgs,
};

pub fn dispatch(cli: &Cli) -> Result<String> {
    let fmt = |default: Format| cli.format.unwrap_or(default);
    match &cli.command {
        Command::Dof(a) => dof(a),
        Command::Fk(a) => fk(a, fmt(Format::Json)),
        Command::Ik(a) => ik(a, fmt(Format::Json)),
        Command::Statics(a) => statics(a, fmt(Format::Json)),
        Command::Gripper(GripperCommand::Vacuum(a)) => {
            let spec = VacuumSpec {
                cup_radius: 0.5 * a.cup_d,
                syringe_radius: 0.5 * a.syringe_d,
                plunger_travel: a.travel,
                ambient_pressure: a.ambient,
            };
            let mode = if a.physical { ForceMode::Physical } else { ForceMode::Absolute };
            let r = vacuum_chain(&spec, mode)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&r),
                Format::Csv => key_value_csv(&[
                    ("v1", r.v1),
                    ("v2", r.v2),
                    ("vf", r.vf),
                    ("p1", r.p1),
                    ("p2", r.p2),
                    ("area", r.area),
                    ("force", r.force),
                    ("payload_capacity", r.payload_capacity),
                ]),
            }
        }
        Command::Gripper(GripperCommand::Gears(a)) => {
            let g1 = GearSpec { teeth: a.n1, circular_pitch: a.p1 };
            let g2 = GearSpec { teeth: a.n2, circular_pitch: a.p2 };
            let (pd1, pd2, cd) = (pitch_diameter(&g1)?, pitch_diameter(&g2)?, center_distance(&g1, &g2)?);
            match fmt(Format::Json) {
                Format::Json => to_json(&json!({ "pd1": pd1, "pd2": pd2, "center_distance": cd })),
                Format::Csv => key_value_csv(&[("pd1", pd1), ("pd2", pd2), ("center_distance", cd)]),
            }
        }
        Command::Sense(SenseCommand::Sweep(a)) => {
            let spec: UltrasonicSpec = match &a.sensor {
                Some(p) => read_json(p)?,
                None => UltrasonicSpec::default(),
            };
            let rows = run_ranging_experiment(&spec, &sweep_distances(a.from, a.to, a.step)?, &a.material, a.seed)?;
            match fmt(Format::Csv) {
                Format::Csv => csv_string(|buf| write_rows_csv(&rows, buf)),
                Format::Json => to_json(&rows),
            }
        }
        Command::Simulate(a) => simulate(a, fmt(Format::Json)),
        Command::Score(a) => score(a),
        Command::Matrix(MatrixCommand::Eval(a)) => {
            let m = load_matrix(&a.file)?;
            let r = evaluate(&m)?;
            match fmt(Format::Json) {
                Format::Json => to_json(&r),
                Format::Csv => csv_string(|buf| r.write_csv(&m.criteria, buf)),
            }
        }
        Command::Matrix(MatrixCommand::Sensitivity(a)) => to_json(&sensitivity(&load_matrix(&a.matrix.file)?, &a.criterion)?),
        Command::Matrix(MatrixCommand::Qfd(a)) => {
            let q: QfdMatrix = read_json(&a.file)?;
            let ranked: Vec<_> = q
                .ranked()?
                .into_iter()
                .map(|(name, score)| json!({ "requirement": name, "score": score }))
                .collect();
            to_json(&ranked)
        }
        Command::Bom(a) => bom(a, fmt(Format::Json)),
        Command::Workspace(a) => workspace(a),
    }
}

fn key_value_csv(rows: &[(&str, f64)]) -> Result<String> {
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        out.push_str(&format!("{k},{v}\n"));
    }
    Ok(out)
}

fn load_arm(arg: &ArmArg) -> Result<ArmSpec> {
    let spec = match &arg.config {
        Some(p) => read_json(p)?,
        None => presets::desk_arm(),
    };
    validate_arm(&spec).into_result()?;
    Ok(spec)
}

fn load_matrix(file: &str) -> Result<DecisionMatrix> {
    if trade_study::builtin_names().contains(&file) && !Path::new(file).exists() {
        return trade_study::builtin(file);
    }
    read_json(Path::new(file))
}

fn dof(a: &DofArgs) -> Result<String> {
    let n = match (&a.config, a.links, a.full_joints, a.half_joints) {
        (_, Some(l), Some(j1), Some(j2)) => gruebler_dof(l, j1, j2),
        (Some(_), ..) => load_arm(&ArmArg { config: a.config.clone() })?.mobility(),
        (None, None, None, None) => presets::desk_arm().mobility(),
        _ => return Err(Error::Configuration("give --links, --full-joints and --half-joints together".into())),
    };
    Ok(format!("{n}\n"))
}

fn pose_row(p: &Pose) -> Vec<f64> {
    let q = p.quaternion_wxyz();
    vec![p.position.x, p.position.y, p.position.z, q[0], q[1], q[2], q[3]]
}

fn fk(a: &FkArgs, format: Format) -> Result<String> {
    let spec = load_arm(&a.arm)?;
    let q = JointState::new(&spec, parse_list(&a.angles)?)?;
    let pose = forward_kinematics(&spec, &q)?;
    match format {
        Format::Json => to_json(&pose),
        Format::Csv => Ok(format!("x,y,z,qw,qx,qy,qz\n{}\n", join(&pose_row(&pose)))),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Serialize)]
struct IkOutput {
    position: [f64; 3],
    orientation: [f64; 4],
    angles: Vec<f64>,
    residual: f64,
    iters: usize,
}

fn ik(a: &IkArgs, format: Format) -> Result<String> {
    let spec = load_arm(&a.arm)?;
    let target = Pose::from_position(parse_point(&a.target)?.into());
    let start = match &a.start {
        Some(s) => JointState::new(&spec, parse_list(s)?)?,
        None => JointState::mid_range(&spec),
    };
    let opts = IkOptions { restart_seed: a.seed, ..IkOptions::default() };
    let sol = inverse_kinematics(&spec, &target, &start, &opts)?;
    let pose = forward_kinematics(&spec, &sol.state)?;
    let out = IkOutput {
        position: pose.position.into(),
        orientation: pose.quaternion_wxyz(),
        angles: sol.state.angles.clone(),
        residual: sol.residual,
        iters: sol.iters,
    };
    match format {
        Format::Json => to_json(&out),
        Format::Csv => {
            let header: Vec<String> = (0..out.angles.len()).map(|i| format!("q{i}")).collect();
            Ok(format!(
                "{},x,y,z,residual,iters\n{},{},{},{}\n",
                header.join(","),
                join(&out.angles),
                join(&out.position),
                out.residual,
                out.iters
            ))
        }
    }
}

fn statics(a: &StaticsArgs, format: Format) -> Result<String> {
    let spec = load_arm(&a.arm)?;
    let q = JointState::new(&spec, parse_list(&a.angles)?)?;
    let report = torque_chain(&spec, &q, a.payload.unwrap_or(spec.payload_mass))?;
    match format {
        Format::Json => to_json(&report),
        Format::Csv => csv_string(|buf| report.write_joint_csv(buf)),
    }
}

fn sim_config(a: &SimulateArgs) -> Result<SimConfig> {
    let mut cfg: SimConfig = match &a.sim {
        Some(p) => read_json(p)?,
        None => SimConfig::default(),
    };
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(dt) = a.dt {
        cfg.dt = dt;
    }
    if a.estop_at.is_some() {
        cfg.estop_at = a.estop_at;
    }
    Ok(cfg)
}

fn write_trace(dir: &Path, trace: &CycleTrace) -> Result<()> {
    let stem = format!("{}-seed{}", trace.object_id, trace.seed);
    let csv = csv_string(|buf| trace.write_csv(buf))?;
    write_atomic(&dir.join(format!("trace-{stem}.csv")), csv.as_bytes())?;
    write_atomic(&dir.join(format!("summary-{stem}.json")), to_json(&trace.summary())?.as_bytes())
}

fn simulate(a: &SimulateArgs, format: Format) -> Result<String> {
    let spec = load_arm(&a.arm)?;
    let scene: Scene = match &a.scene {
        Some(p) => read_json(p)?,
        None => control_sim::desk_scene(),
    };
    let cfg = sim_config(a)?;
    if let Some(dir) = &a.out {
        fs::create_dir_all(dir)
            .map_err(|e| Error::Configuration(format!("cannot create '{}': {e}", dir.display())))?;
    }

    if let Some(n) = a.sweep {
        let dir = a.out.as_deref().expect("clap requires --out with --sweep");
        let seeds: Vec<u64> = (0..n as u64).map(|i| cfg.seed.wrapping_add(i)).collect();
        let results = armforge::batch::map(&seeds, |&seed| {
            let t = control_sim::run_cycle(&spec, &scene, &SimConfig { seed, ..cfg.clone() })?;
            write_trace(dir, &t)?;
            Ok(t.summary())
        });
        let summaries = results.into_iter().collect::<Result<Vec<CycleSummary>>>()?;
        return to_json(&summaries);
    }

    let trace = control_sim::run_cycle(&spec, &scene, &cfg)?;
    if let Some(dir) = &a.out {
        write_trace(dir, &trace)?;
    }
    match format {
        Format::Json => to_json(&trace.summary()),
        Format::Csv => csv_string(|buf| trace.write_csv(buf)),
    }
}

fn score(a: &ScoreArgs) -> Result<String> {
    let rubric: Rubric = match &a.rubric {
        Some(p) => read_json(p)?,
        None => Rubric::default(),
    };
    let read_dir = |e: std::io::Error| Error::Configuration(format!("cannot list '{}': {e}", a.traces.display()));
    let mut paths: Vec<_> = fs::read_dir(&a.traces)
        .map_err(read_dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let summaries = paths.iter().map(|p| read_json::<CycleSummary>(p)).collect::<Result<Vec<_>>>()?;
    if summaries.is_empty() {
        return Err(Error::Domain(format!("no summary files in '{}'", a.traces.display())));
    }
    to_json(&control_sim::score_run(&summaries, &rubric)?)
}

#[derive(Serialize)]
struct BomOutput {
    total: Usd,
    budget: Usd,
    passes: bool,
    headroom: Usd,
    margin: String,
    unit_price: Usd,
}

fn bom(a: &BomArgs, format: Format) -> Result<String> {
    let bom: Bom = match &a.file {
        Some(p) => read_json(p)?,
        None => desk_arm_bom(),
    };
    bom.validate()?;
    let total = bom_total(&bom.items);
    let budget = Usd::parse(&a.budget)?;
    let check = budget_check(total, budget)?;
    let margin = a
        .margin
        .parse::<f64>()
        .map_err(|_| Error::Configuration(format!("invalid margin '{}'", a.margin)))
        .and_then(margin_from_f64)?;
    let out = BomOutput {
        total,
        budget,
        passes: check.passes,
        headroom: check.headroom,
        margin: margin.to_string(),
        unit_price: unit_price(total, margin)?,
    };
    match format {
        Format::Json => to_json(&out),
        Format::Csv => Ok(format!(
            "total,budget,passes,headroom,unit_price\n{},{},{},{},{}\n",
            out.total, out.budget, out.passes, out.headroom, out.unit_price
        )),
    }
}

fn workspace(a: &WorkspaceArgs) -> Result<String> {
    let ws: Workspace = match &a.config {
        Some(p) => read_json(p)?,
        None => presets::desk_workspace(),
    };
    ws.validate()?;
    let Some(point) = &a.point else {
        return to_json(&ws);
    };
    let p = parse_point(point)?.into();
    to_json(&json!({
        "point": parse_point(point)?,
        "reach_radius": ws.reach_radius,
        "in_workspace": ws.contains(&p),
        "in_annulus": ws.annulus_contains(&p),
        "in_base_exclusion": ws.in_base_exclusion(&p),
        "serviceable": ws.serviceable(&p),
    }))
}
