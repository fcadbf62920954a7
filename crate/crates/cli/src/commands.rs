use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};

use grassfoil::blade::{export_wireframe, perturb_blade, AffineKnob, BladeDesignSpace, Wireframe};
use grassfoil::geometry::{
    affine_apply, cst_bounding_box, cst_sweep, gen_dataset, synthetic_baselines, validate_shape, AffineMap, CstParams,
    LandmarkMatrix, PerturbationPlan, ShapeDiagnostics,
};
use grassfoil::grassmann::{la_standardize, GrassmannPoint, LaDecomposition};
use grassfoil::io;
use grassfoil::pga::{
    corner_sweep, domain_contains, karcher_mean, mean_affine, pga_fit, random_corner_pairs, sweep_diagnostics,
    synthesize, KarcherMean, PgaModel, DEFAULT_KARCHER_TOL, DEFAULT_MAX_ITER,
};

use crate::args::*;
use crate::svg;

pub const ENV_KARCHER_TOL: &str = "GRASSFOIL_KARCHER_TOL";
pub const ENV_KARCHER_MAX_ITER: &str = "GRASSFOIL_KARCHER_MAX_ITER";

const DATASET_INDEX: &str = "dataset.json";
const DATASET_FORMAT_VERSION: u64 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetIndex {
    format_version: u64,
    n: usize,
    seed: u64,
    fraction: f64,
    rejections: usize,
    entries: Vec<IndexEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IndexEntry {
    file: String,
    baseline: usize,
    perturbation: Option<usize>,
    params: CstParams,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    config: &'a Command,
    resolved: BTreeMap<&'static str, serde_json::Value>,
    outputs: Vec<String>,
}

/// Output files of one run, recorded in its manifest.
struct Run<'a> {
    command: &'a Command,
    dir: PathBuf,
    resolved: BTreeMap<&'static str, serde_json::Value>,
    outputs: Vec<String>,
}

impl<'a> Run<'a> {
    fn new(command: &'a Command, dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self {
            command,
            dir: dir.to_path_buf(),
            resolved: BTreeMap::new(),
            outputs: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.outputs.push(name.to_string());
        self.dir.join(name)
    }

    fn resolve(&mut self, key: &'static str, value: impl Serialize) {
        self.resolved
            .insert(key, serde_json::to_value(value).expect("serializable setting"));
    }

    fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        io::write_atomic(&p, body.as_bytes())?;
        Ok(())
    }

    fn finish(self, manifest_name: &str) -> Result<()> {
        let m = Manifest {
            tool: "grassfoil",
            version: env!("CARGO_PKG_VERSION"),
            config: self.command,
            resolved: self.resolved,
            outputs: self.outputs,
        };
        let mut body = serde_json::to_string_pretty(&m)?;
        body.push('\n');
        io::write_atomic(&self.dir.join(manifest_name), body.as_bytes())?;
        Ok(())
    }
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::GenDataset(a) => gen(command, a),
        Command::Standardize(a) => standardize(command, a),
        Command::Mean(a) => mean(command, a),
        Command::PgaFit(a) => fit(command, a),
        Command::Synth(a) => synth(command, a),
        Command::Sweep(a) => sweep(command, a),
        Command::BladeInterp(a) => blade_interp(command, a),
        Command::BladePerturb(a) => blade_perturb(command, a),
        Command::Render(a) => render(command, a),
    }
}

fn env_or<T: std::str::FromStr>(name: &str, default: T) -> Result<T> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| anyhow::anyhow!("environment variable {name}=`{v}` is not a valid value")),
        Err(_) => Ok(default),
    }
}

fn karcher_settings(o: &KarcherOptions) -> Result<(f64, usize)> {
    let tol = match o.tol {
        Some(t) => t,
        None => env_or(ENV_KARCHER_TOL, DEFAULT_KARCHER_TOL)?,
    };
    let max_iter = match o.max_iter {
        Some(m) => m,
        None => env_or(ENV_KARCHER_MAX_ITER, DEFAULT_MAX_ITER)?,
    };
    ensure!(
        tol > 0.0 && tol.is_finite(),
        "Karcher tolerance must be positive (got {tol})"
    );
    ensure!(max_iter > 0, "Karcher iteration cap must be positive");
    Ok((tol, max_iter))
}

fn rows(x: &LandmarkMatrix) -> Vec<[f64; 2]> {
    x.rows().collect()
}

fn gen(command: &Command, a: &GenDatasetArgs) -> Result<()> {
    ensure!((0.0..=1.0).contains(&a.fraction), "--fraction must lie in [0, 1]");
    ensure!(a.n >= 7 && a.n % 2 == 1, "--n must be odd and at least 7");
    let plan = match (a.total, a.per_baseline) {
        (_, Some(k)) => PerturbationPlan::PerBaseline(k),
        (t, None) => PerturbationPlan::Total(t.unwrap_or(1000)),
    };
    let baselines = synthetic_baselines()[..a.baselines as usize].to_vec();
    let data = gen_dataset(&baselines, plan, a.fraction, a.seed, a.n)?;
    let blade = grassfoil::blade::synthetic_blade(a.n)?;

    let mut run = Run::new(command, &a.out)?;
    run.resolve("plan", format!("{plan:?}"));
    run.resolve("seed", a.seed);
    std::fs::create_dir_all(a.out.join("shapes"))?;
    let mut entries = Vec::with_capacity(data.len());
    for (i, e) in data.entries.iter().enumerate() {
        let file = format!("shapes/{i:04}.dat");
        let name = match e.perturbation {
            None => format!("baseline {}", e.baseline),
            Some(p) => format!("baseline {} perturbation {p}", e.baseline),
        };
        let path = run.path(&file);
        io::write_coordinates(&path, &e.shape, &name)?;
        entries.push(IndexEntry {
            file,
            baseline: e.baseline,
            perturbation: e.perturbation,
            params: e.params.clone(),
        });
    }
    let index = DatasetIndex {
        format_version: DATASET_FORMAT_VERSION,
        n: a.n,
        seed: a.seed,
        fraction: a.fraction,
        rejections: data.rejections,
        entries,
    };
    let mut body = serde_json::to_string_pretty(&index)?;
    body.push('\n');
    run.text(DATASET_INDEX, &body)?;
    let blade_path = run.path("blade.json");
    io::write_blade(&blade_path, &blade)?;
    println!(
        "wrote {} shapes ({} baselines, {} rejected draws) to {}",
        data.len(),
        baselines.len(),
        data.rejections,
        a.out.display()
    );
    run.finish("manifest.json")
}

fn read_index(dir: &Path) -> Result<DatasetIndex> {
    let p = dir.join(DATASET_INDEX);
    let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
    let index: DatasetIndex = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
    ensure!(
        index.format_version == DATASET_FORMAT_VERSION,
        "{}: unsupported format_version {}",
        p.display(),
        index.format_version
    );
    Ok(index)
}

struct Loaded {
    names: Vec<String>,
    groups: Vec<usize>,
    shapes: Vec<LandmarkMatrix>,
}

fn load(source: &DatasetInput) -> Result<Loaded> {
    let (files, groups): (Vec<PathBuf>, Vec<usize>) = match &source.dataset {
        Some(dir) => {
            let index = read_index(dir)?;
            index.entries.iter().map(|e| (dir.join(&e.file), e.baseline)).unzip()
        }
        None => (source.input.clone(), vec![0; source.input.len()]),
    };
    ensure!(!files.is_empty(), "no input shapes");
    let mut names = Vec::with_capacity(files.len());
    let mut shapes = Vec::with_capacity(files.len());
    for f in &files {
        let c = io::read_coordinates(f).with_context(|| format!("reading {}", f.display()))?;
        if let Some(first) = shapes.first() {
            let first: &LandmarkMatrix = first;
            ensure!(
                c.shape.n() == first.n(),
                "{} has {} landmarks, expected {}",
                f.display(),
                c.shape.n(),
                first.n()
            );
        }
        names.push(
            f.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
        );
        shapes.push(c.shape);
    }
    Ok(Loaded { names, groups, shapes })
}

fn decompose(loaded: &Loaded) -> Result<Vec<LaDecomposition>> {
    loaded
        .shapes
        .iter()
        .zip(&loaded.names)
        .map(|(x, name)| la_standardize(x).with_context(|| format!("standardizing {name}")))
        .collect()
}

fn standardize(command: &Command, a: &StandardizeArgs) -> Result<()> {
    let loaded = load(&a.source)?;
    let decomps = decompose(&loaded)?;
    let mut run = Run::new(command, &a.out)?;
    std::fs::create_dir_all(a.out.join("representatives"))?;
    let mut table = Vec::with_capacity(decomps.len());
    for (k, (d, name)) in decomps.iter().zip(&loaded.names).enumerate() {
        let p = run.path(&format!("representatives/{name}.dat"));
        io::write_coordinates(&p, &LandmarkMatrix::new(d.point.rep().clone())?, name)?;
        let mut row = vec![k as f64];
        row.extend(d.affine.components());
        table.push(row);
    }
    let p = run.path("affine.csv");
    io::write_table_csv(&p, &["shape", "m11", "m12", "m21", "m22", "b1", "b2"], &table)?;
    println!("standardized {} shapes", decomps.len());
    run.finish("manifest.json")
}

fn karcher(points: &[GrassmannPoint], o: &KarcherOptions, run: &mut Run) -> Result<KarcherMean> {
    let (tol, max_iter) = karcher_settings(o)?;
    run.resolve("karcher_tol", tol);
    run.resolve("karcher_max_iter", max_iter);
    Ok(karcher_mean(points, tol, max_iter)?)
}

#[derive(Serialize)]
struct KarcherReport {
    shapes: usize,
    iterations: usize,
    residual: f64,
}

fn mean(command: &Command, a: &MeanArgs) -> Result<()> {
    let loaded = load(&a.source)?;
    karcher_settings(&a.karcher)?;
    let points: Vec<GrassmannPoint> = decompose(&loaded)?.into_iter().map(|d| d.point).collect();
    let mut run = Run::new(command, &a.out)?;
    let km = karcher(&points, &a.karcher, &mut run)?;
    let p = run.path("mean.dat");
    io::write_coordinates(&p, &LandmarkMatrix::new(km.point.rep().clone())?, "karcher mean")?;
    let report = KarcherReport {
        shapes: points.len(),
        iterations: km.iterations,
        residual: km.residual,
    };
    run.text("karcher.json", &(serde_json::to_string_pretty(&report)? + "\n"))?;
    println!("karcher mean: {} iterations, residual {:e}", km.iterations, km.residual);
    run.finish("manifest.json")
}

fn fit(command: &Command, a: &PgaFitArgs) -> Result<()> {
    ensure!(a.r >= 1, "--r must be at least 1");
    karcher_settings(&a.karcher)?;
    let loaded = load(&a.source)?;
    let decomps = decompose(&loaded)?;
    let points: Vec<GrassmannPoint> = decomps.iter().map(|d| d.point.clone()).collect();
    let mut run = Run::new(command, &a.out)?;
    let km = karcher(&points, &a.karcher, &mut run)?;
    let mut model = pga_fit(&points, &km.point, a.r)?;
    model.reference_affine = Some(mean_affine(&decomps, &km.point)?);
    run.resolve("karcher_iterations", km.iterations);
    run.resolve("karcher_residual", km.residual);

    let p = run.path("model.json");
    io::write_model(&p, &model)?;

    let mut header: Vec<String> = vec!["shape".into(), "baseline".into()];
    header.extend((1..=a.r).map(|j| format!("t{j}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let coords: Vec<Vec<f64>> = (0..points.len())
        .map(|i| {
            let mut row = vec![i as f64, loaded.groups[i] as f64];
            row.extend(model.training_coords.row(i).iter());
            row
        })
        .collect();
    let p = run.path("coords.csv");
    io::write_table_csv(&p, &header_refs, &coords)?;

    let ratios = model.decay_ratios();
    let spectrum: Vec<Vec<f64>> = model
        .spectrum
        .iter()
        .enumerate()
        .map(|(k, l)| vec![(k + 1) as f64, *l, ratios.get(k).copied().unwrap_or(f64::NAN)])
        .collect();
    let p = run.path("spectrum.csv");
    io::write_table_csv(&p, &["k", "eigenvalue", "next_ratio"], &spectrum)?;
    println!(
        "pga: {} shapes, r = {}, eigenvalues {:?}",
        points.len(),
        a.r,
        model.eigenvalues
    );
    run.finish("manifest.json")
}

fn render_affine(model: &PgaModel) -> AffineMap {
    model.reference_affine.unwrap_or_else(AffineMap::identity)
}

fn synth(command: &Command, a: &SynthArgs) -> Result<()> {
    let model = io::read_model(&a.model)?;
    ensure!(
        a.t.len() == model.r(),
        "--t has {} values, the model has r = {}",
        a.t.len(),
        model.r()
    );
    if !domain_contains(&model, &a.t) {
        log::warn!("coordinates {:?} lie outside the model's ellipsoidal domain", a.t);
    }
    let point = synthesize(&model, &a.t)?;
    let rep = LandmarkMatrix::new(point.rep().clone())?;
    let shape = if a.representative {
        rep
    } else {
        affine_apply(&rep, &render_affine(&model))
    };
    let mut run = Run::new(command, &a.out)?;
    let p = run.path("synth.dat");
    io::write_coordinates(&p, &shape, &format!("synthesized t = {:?}", a.t))?;
    let d = validate_shape(&shape);
    println!("synthesized shape: valid = {}", d.is_valid());
    run.finish("manifest.json")
}

fn diag_row(sweep: usize, step: usize, d: &ShapeDiagnostics) -> Vec<f64> {
    let b = |v: bool| if v { 1.0 } else { 0.0 };
    vec![
        sweep as f64,
        step as f64,
        b(d.is_valid()),
        b(d.full_rank),
        b(d.simple),
        b(d.ordering_ok),
        d.rank_ratio,
    ]
}

fn sweep(command: &Command, a: &SweepArgs) -> Result<()> {
    ensure!(a.count >= 1, "--count must be at least 1");
    ensure!(a.steps >= 2, "--steps must be at least 2");
    let sweeps: Vec<Vec<(LandmarkMatrix, ShapeDiagnostics)>> = match a.space {
        SweepSpace::Pga => {
            let path = a.model.as_ref().context("--space pga requires --model")?;
            let model = io::read_model(path)?;
            let affine = render_affine(&model);
            random_corner_pairs(&model.domain.lower, &model.domain.upper, a.count, a.seed)
                .iter()
                .map(|(lo, hi)| Ok(sweep_diagnostics(&corner_sweep(&model, lo, hi, a.steps)?, &affine)?))
                .collect::<Result<_>>()?
        }
        SweepSpace::Cst => {
            let dir = a.dataset.as_ref().context("--space cst requires --dataset")?;
            let index = read_index(dir)?;
            let params: Vec<CstParams> = index.entries.iter().map(|e| e.params.clone()).collect();
            let te = params.first().map_or(0.0, |p| p.te_thickness);
            let (lo, hi) = cst_bounding_box(&params);
            random_corner_pairs(&lo, &hi, a.count, a.seed)
                .iter()
                .map(|(ca, cb)| {
                    Ok(cst_sweep(ca, cb, te, a.steps, index.n)?
                        .into_iter()
                        .map(|x| {
                            let d = validate_shape(&x);
                            (x, d)
                        })
                        .collect())
                })
                .collect::<Result<_>>()?
        }
    };

    let mut run = Run::new(command, &a.out)?;
    run.resolve("seed", a.seed);
    let mut summary = Vec::new();
    let mut valid = 0;
    for (k, sw) in sweeps.iter().enumerate() {
        let shapes: Vec<&LandmarkMatrix> = sw.iter().map(|s| &s.0).collect();
        let p = run.path(&format!("sweep_{k}.csv"));
        io::write_shape_csv(&p, &shapes)?;
        let outlines: Vec<Vec<[f64; 2]>> = shapes.iter().map(|x| rows(x)).collect();
        let labels: Vec<String> = sw
            .iter()
            .enumerate()
            .map(|(j, (_, d))| format!("{j}{}", if d.is_valid() { "" } else { " invalid" }))
            .collect();
        run.text(&format!("sweep_{k}.svg"), &svg::shapes_strip(&outlines, &labels, 10))?;
        for (j, (_, d)) in sw.iter().enumerate() {
            valid += usize::from(d.is_valid());
            summary.push(diag_row(k, j, d));
        }
    }
    let p = run.path("summary.csv");
    io::write_table_csv(
        &p,
        &[
            "sweep",
            "step",
            "valid",
            "full_rank",
            "simple",
            "ordering_ok",
            "rank_ratio",
        ],
        &summary,
    )?;
    println!("{valid}/{} swept shapes valid", summary.len());
    run.finish("manifest.json")
}

fn wireframe_sections(w: &Wireframe) -> Vec<(f64, Vec<[f64; 2]>)> {
    (0..w.spans)
        .map(|i| {
            let eta = w.get(i, 0)[2];
            (
                eta,
                (0..w.n)
                    .map(|j| {
                        let p = w.get(i, j);
                        [p[0], p[1]]
                    })
                    .collect(),
            )
        })
        .collect()
}

fn write_wireframe(run: &mut Run, w: &Wireframe) -> Result<usize> {
    let p = run.path("wireframe.csv");
    io::write_wireframe_csv(&p, w)?;
    let sections = wireframe_sections(w);
    run.text("wireframe.svg", &svg::wireframe(&sections))?;
    let mut table = Vec::with_capacity(sections.len());
    let mut invalid = 0;
    for (i, (eta, pts)) in sections.iter().enumerate() {
        let flat: Vec<f64> = pts.iter().flatten().copied().collect();
        let x = LandmarkMatrix::new(nalgebra::DMatrix::from_row_slice(pts.len(), 2, &flat))?;
        let d = validate_shape(&x);
        invalid += usize::from(!d.is_valid());
        let mut row = diag_row(0, i, &d);
        row[0] = *eta;
        table.push(row);
    }
    let p = run.path("sections.csv");
    io::write_table_csv(
        &p,
        &[
            "eta",
            "span",
            "valid",
            "full_rank",
            "simple",
            "ordering_ok",
            "rank_ratio",
        ],
        &table,
    )?;
    Ok(invalid)
}

fn blade_interp(command: &Command, a: &BladeInterpArgs) -> Result<()> {
    ensure!(a.spans >= 2, "--spans must be at least 2");
    let blade = io::read_blade(&a.blade)?;
    let w = export_wireframe(&blade, a.spans)?;
    let mut run = Run::new(command, &a.out)?;
    let invalid = write_wireframe(&mut run, &w)?;
    println!("{} sections interpolated, {invalid} invalid", a.spans);
    run.finish("manifest.json")
}

fn blade_perturb(command: &Command, a: &BladePerturbArgs) -> Result<()> {
    ensure!(a.spans >= 2, "--spans must be at least 2");
    ensure!(
        a.knobs.len() == a.knob_values.len(),
        "--knobs has {} entries but --knob-values has {}",
        a.knobs.len(),
        a.knob_values.len()
    );
    let knobs: Vec<AffineKnob> = a.knobs.iter().map(|k| k.parse()).collect::<Result<_, _>>()?;
    let blade = io::read_blade(&a.blade)?;
    let model = io::read_model(&a.model)?;
    ensure!(
        a.t.len() == model.r(),
        "--t has {} values, the model has r = {}",
        a.t.len(),
        model.r()
    );
    let (perturbed, report) = if knobs.is_empty() {
        perturb_blade(&blade, &model, &a.t)?
    } else {
        let space = BladeDesignSpace::new(model.r(), knobs)?;
        let params: Vec<f64> = a.t.iter().chain(&a.knob_values).copied().collect();
        space.apply(&blade, &model, &params)?
    };
    let w = export_wireframe(&perturbed, a.spans)?;

    let mut run = Run::new(command, &a.out)?;
    let p = run.path("blade.json");
    io::write_blade(&p, &perturbed)?;
    let mut header: Vec<String> = vec!["station".into(), "eta".into(), "norm".into()];
    header.extend((1..=model.r()).map(|j| format!("t{j}")));
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let table: Vec<Vec<f64>> = report
        .norms
        .iter()
        .zip(&report.coords)
        .enumerate()
        .map(|(k, (n, c))| {
            let mut row = vec![k as f64, perturbed.stations[k].eta, *n];
            row.extend(c);
            row
        })
        .collect();
    let p = run.path("report.csv");
    io::write_table_csv(&p, &header_refs, &table)?;
    let invalid = write_wireframe(&mut run, &w)?;
    let reference = model.tangent(&a.t)?.norm();
    println!(
        "perturbed {} stations: norm spread {:e}, {invalid} invalid wireframe sections",
        perturbed.len(),
        report.norm_spread(reference)
    );
    run.finish("manifest.json")
}

fn read_scatter(path: &Path, x: usize, y: usize) -> Result<(Vec<[f64; 2]>, Vec<usize>)> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header = rdr.headers()?.clone();
    let col = |name: &str| header.iter().position(|h| h == name);
    let (cx, cy) = (format!("t{x}"), format!("t{y}"));
    let ix = col(&cx).with_context(|| format!("{}: no column {cx}", path.display()))?;
    let iy = col(&cy).with_context(|| format!("{}: no column {cy}", path.display()))?;
    let ig = col("baseline");
    let mut points = Vec::new();
    let mut groups = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let num = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|v| v.parse().ok())
                .with_context(|| format!("{}: line {}: bad value in column {}", path.display(), k + 2, i + 1))
        };
        points.push([num(ix)?, num(iy)?]);
        groups.push(match ig {
            Some(i) => num(i)? as usize,
            None => 0,
        });
    }
    Ok((points, groups))
}

fn render(command: &Command, a: &RenderArgs) -> Result<()> {
    let body = match a.kind {
        RenderKind::Shapes => {
            let mut shapes = Vec::new();
            let mut labels = Vec::new();
            for f in &a.input {
                let c = io::read_coordinates(f).with_context(|| format!("reading {}", f.display()))?;
                shapes.push(rows(&c.shape));
                labels.push(c.name);
            }
            svg::shapes_strip(&shapes, &labels, 4)
        }
        RenderKind::Wireframe => {
            if a.input.len() != 1 {
                bail!("--kind wireframe takes exactly one input");
            }
            svg::wireframe(&wireframe_sections(&io::read_wireframe_csv(&a.input[0])?))
        }
        RenderKind::Scatter => {
            ensure!(a.x >= 1 && a.y >= 1, "--x and --y are 1-based");
            let mut points = Vec::new();
            let mut groups = Vec::new();
            for f in &a.input {
                let (p, g) = read_scatter(f, a.x, a.y)?;
                points.extend(p);
                groups.extend(g);
            }
            svg::scatter(&points, &groups, &format!("t{}", a.x), &format!("t{}", a.y))
        }
    };
    let dir = match a.out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = a
        .out
        .file_name()
        .context("--out must name a file")?
        .to_string_lossy()
        .into_owned();
    let mut run = Run::new(command, &dir)?;
    run.text(&name, &body)?;
    run.finish(&format!("{name}.manifest.json"))
}
