use super::config::Config;
use super::report::{Cell, Report};
use super::CliError;
use crate::chain::random::random_two_step;
use crate::chain::{check_bt3, check_gabber, gabber_bound_with, homology_all, ln_big, ChainComplex, HomologyResult};
use crate::circle::circle_rebuilding;
use crate::exact_linalg::{Caps, IntMatrix};
use crate::farber::{check_intersection_lemma, heisenberg_sweep_at, PermutationAction, Word};
use crate::nilpotent::{rebuild_lattice, Hnf, SubgroupSpec, UnipotentTower};
use crate::rebuild::{quality_with, Rebuilding};
use crate::stack::StackComplex;
use crate::text::ParseError;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::path::Path;

pub const SWEEP_SCHEMA: &str = "chainrebuild-sweep/1";
pub const SWEEP_COLUMNS: &[&str] = &[
    "family",
    "subgroup",
    "index",
    "degree",
    "cells_src",
    "cells_tgt",
    "betti_q",
    "betti_f2",
    "log_tors",
    "gabber_bound",
    "ratio_tors",
    "ratio_bound",
    "kappa_min",
    "flags",
];

const HOMOLOGY_SCHEMA: &str = "chainrebuild-homology/1";
const HOMOLOGY_COLUMNS: &[&str] = &["degree", "cells", "betti_q", "betti_f2", "torsion", "log_tors", "gabber_bound"];
const GABBER_SCHEMA: &str = "chainrebuild-gabber/1";
const GABBER_COLUMNS: &[&str] = &["check", "instance", "degree", "dims", "lhs", "rhs", "holds"];
const FARBER_SWEEP_SCHEMA: &str = "chainrebuild-farber-sweep/1";
const FARBER_SWEEP_COLUMNS: &[&str] = &[
    "n",
    "actions",
    "lemma_instances",
    "lemma_premise",
    "lemma_failures",
    "double_count_checks",
    "double_count_failures",
    "conjugation_checks",
    "conjugation_failures",
];
const FARBER_SCHEMA: &str = "chainrebuild-farber/1";
const FARBER_COLUMNS: &[&str] = &["lambda", "s", "delta", "premise", "statistic", "statistic_f", "holds"];

/// Relative tolerance for `kappa_min` against a frozen sweep.
pub const FROZEN_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    Circle,
    Torus,
    Heisenberg,
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "circle" => Ok(Family::Circle),
            "torus" => Ok(Family::Torus),
            "heisenberg" => Ok(Family::Heisenberg),
            _ => Err(format!("unknown family `{s}` (circle, torus, heisenberg)")),
        }
    }
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Circle => "circle",
            Family::Torus => "torus",
            Family::Heisenberg => "heisenberg",
        }
    }
}

fn cfg_err(err: ParseError) -> CliError {
    CliError::Config { path: String::new(), err }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn opt_f64(x: Option<f64>) -> Cell {
    x.map(Cell::Float).unwrap_or_else(|| Cell::Text(String::new()))
}

fn torsion_text(factors: &[BigInt]) -> String {
    let s: Vec<String> = factors.iter().map(|f| f.to_string()).collect();
    if s.len() <= 16 && s.iter().map(String::len).sum::<usize>() <= 64 {
        s.join(" ")
    } else {
        format!("({} factors)", s.len())
    }
}

pub fn run_homology(file: &Path, caps: &Caps) -> Result<Report, CliError> {
    let c = if file.extension().is_some_and(|e| e == "stack") {
        StackComplex::load(file)?.total_complex()?
    } else {
        ChainComplex::parse(&read(file)?)?
    };
    let mut rep = Report::new(HOMOLOGY_SCHEMA, HOMOLOGY_COLUMNS);
    for h in homology_all(&c, &[2], caps)? {
        let j = h.degree;
        let bound = if j < c.top_degree() { Some(gabber_bound_with(&c, j, caps)?) } else { None };
        rep.push(vec![
            j.into(),
            c.dim(j).into(),
            h.betti_rational.into(),
            h.betti_mod_p[&2].into(),
            torsion_text(&h.torsion_factors).into(),
            h.log_torsion.into(),
            opt_f64(bound),
        ]);
    }
    Ok(rep)
}

struct SweepPoint {
    label: String,
    index: u64,
    t: f64,
    build: Box<dyn Fn() -> Result<Rebuilding, CliError>>,
}

fn sweep_points(cfg: &Config, dir: &Path) -> Result<(Family, Vec<SweepPoint>), CliError> {
    let (ln, fam) = cfg.require("family").map_err(cfg_err)?;
    let family: Family = fam.parse().map_err(|m: String| cfg_err(ParseError::new(ln, m)))?;
    let t_cfg: Option<f64> = cfg.get("t").map_err(cfg_err)?;
    let mut points = Vec::new();
    match family {
        Family::Circle => {
            cfg.check_keys(&["family", "n", "t", "format", "caps_bits", "caps_minors", "caps_iterations", "frozen"]).map_err(cfg_err)?;
            let t = t_cfg.unwrap_or(10.0);
            for n in cfg.range("n").map_err(cfg_err)? {
                let n = n as usize;
                points.push(SweepPoint {
                    label: format!("N={n}"),
                    index: n as u64,
                    t,
                    build: Box::new(move || Ok(circle_rebuilding(n, t)?)),
                });
            }
        }
        Family::Torus => {
            cfg.check_keys(&["family", "n", "d", "t", "format", "caps_bits", "caps_minors", "caps_iterations", "frozen"]).map_err(cfg_err)?;
            let d: usize = cfg.get_or("d", 2).map_err(cfg_err)?;
            if d == 0 || d > 6 {
                let ln = cfg.raw("d").map_or(0, |(l, _)| l);
                return Err(cfg_err(ParseError::new(ln, format!("`d` must be in 1..=6, got {d}"))));
            }
            for n in cfg.range("n").map_err(cfg_err)? {
                if n == 0 {
                    return Err(cfg_err(ParseError::new(cfg.raw("n").map_or(0, |(l, _)| l), "`n` must be positive")));
                }
                let h = Hnf::scalar(d, n as i64);
                let index = h.index();
                points.push(SweepPoint {
                    label: format!("diag({n}^{d})"),
                    index,
                    t: t_cfg.unwrap_or(index as f64),
                    build: Box::new(move || Ok(rebuild_lattice(&h)?)),
                });
            }
        }
        Family::Heisenberg => {
            cfg.check_keys(&["family", "n", "subgroup", "t", "format", "caps_bits", "caps_minors", "caps_iterations", "frozen"])
                .map_err(cfg_err)?;
            let mut specs = Vec::new();
            if let Some((_, file)) = cfg.raw("subgroup") {
                let path = dir.join(file);
                let (tower, sub) = SubgroupSpec::parse(&read(&path)?)
                    .map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })?;
                specs.push((format!("{}:{}", tower.name(), file), tower, sub));
            }
            if cfg.raw("n").is_some() {
                for n in cfg.range("n").map_err(cfg_err)? {
                    if n == 0 {
                        return Err(cfg_err(ParseError::new(cfg.raw("n").map_or(0, |(l, _)| l), "`n` must be positive")));
                    }
                    specs.push((format!("mod {n}"), UnipotentTower::heisenberg(), SubgroupSpec::heisenberg_mod(n)));
                }
            }
            if specs.is_empty() {
                return Err(cfg_err(ParseError::new(0, "heisenberg needs `n` or `subgroup`")));
            }
            for (label, tower, sub) in specs {
                let index = sub.index();
                points.push(SweepPoint {
                    label,
                    index,
                    t: t_cfg.unwrap_or(index as f64),
                    build: Box::new(move || Ok(crate::nilpotent::rebuild_unipotent(&tower, &sub)?)),
                });
            }
        }
    }
    Ok((family, points))
}

/// Exact cover homology when it fits the caps, else the rebuilt complex's.
fn sweep_point(family: Family, p: &SweepPoint, caps: &Caps, rep: &mut Report) -> Result<(), CliError> {
    let r = (p.build)()?;
    let tag = format!("{} {}", family.name(), p.label);
    let violations = r.verify()?;
    for v in &violations {
        rep.failures.push(format!("{tag}: {v}"));
    }
    let full = r.is_full()?;
    let kappa = match quality_with(&r, p.t, caps) {
        Ok(q) => Some(q.kappa_min),
        Err(e) => {
            rep.failures.push(format!("{tag}: quality: {e}"));
            None
        }
    };
    let target_h = homology_all(&r.target, &[2], caps).ok();
    let (hom, from_cover): (Option<Vec<HomologyResult>>, bool) = match homology_all(&r.source, &[2], caps) {
        Ok(h) => (Some(h), true),
        Err(_) => (target_h.clone(), false),
    };
    // Degrees where the rebuilding pins down homology.
    let exact_below = if full { r.alpha + 1 } else { r.alpha };
    if let (true, Some(src), Some(tgt)) = (from_cover, &hom, &target_h) {
        for j in 0..exact_below.min(src.len()).min(tgt.len()) {
            if src[j].betti_rational != tgt[j].betti_rational || src[j].torsion_factors != tgt[j].torsion_factors {
                rep.failures.push(format!("{tag}: cover and rebuilt homology differ in degree {j}"));
            }
        }
    }
    let degrees = hom.as_ref().map_or(r.target.top_degree() + 1, Vec::len);
    let index = p.index as f64;
    for j in 0..degrees {
        let mut flags = Vec::new();
        if !from_cover {
            flags.push("cap");
        }
        if j >= exact_below {
            flags.push("beyond-alpha");
        }
        if !violations.is_empty() {
            flags.push("verify");
        }
        let h = hom.as_ref().and_then(|h| h.get(j));
        let bound = if j < r.target.top_degree() { gabber_bound_with(&r.target, j, caps).ok() } else { None };
        let log_tors = h.map(|h| h.log_torsion);
        rep.push(vec![
            family.name().into(),
            p.label.clone().into(),
            p.index.into(),
            j.into(),
            r.source.dims().get(j).copied().unwrap_or(0).into(),
            r.target.dims().get(j).copied().unwrap_or(0).into(),
            h.map_or(Cell::Text(String::new()), |h| h.betti_rational.into()),
            h.map_or(Cell::Text(String::new()), |h| h.betti_mod_p[&2].into()),
            opt_f64(log_tors),
            opt_f64(bound),
            opt_f64(log_tors.map(|x| x / index)),
            opt_f64(bound.map(|x| x / index)),
            opt_f64(kappa),
            flags.join(";").into(),
        ]);
    }
    Ok(())
}

fn check_frozen(rep: &mut Report, path: &Path) -> Result<(), CliError> {
    let text = read(path)?;
    let io = |msg: String| CliError::Io { path: path.display().to_string(), msg };
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = rd.headers().map_err(|e| io(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name).ok_or_else(|| io(format!("missing column `{name}`")));
    let (cf, cs, cd, ck) = (col("family")?, col("subgroup")?, col("degree")?, col("kappa_min")?);
    let mut frozen = BTreeMap::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| io(e.to_string()))?;
        frozen.insert((rec[cf].to_string(), rec[cs].to_string(), rec[cd].to_string()), rec[ck].to_string());
    }
    let (f, s, d, k) = (0, 1, 3, rep.column("kappa_min").unwrap());
    let text_of = |c: &Cell| match c {
        Cell::Text(t) => t.clone(),
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => super::sig12(*x),
        Cell::Bool(b) => b.to_string(),
    };
    let mut fails = Vec::new();
    for row in &rep.rows {
        let key = (text_of(&row[f]), text_of(&row[s]), text_of(&row[d]));
        let tag = format!("{} {} degree {}", key.0, key.1, key.2);
        let Some(want) = frozen.get(&key) else {
            fails.push(format!("{tag}: no frozen kappa_min"));
            continue;
        };
        let got = match &row[k] {
            Cell::Float(x) => *x,
            _ => f64::NAN,
        };
        let want: f64 = want.parse().unwrap_or(f64::NAN);
        if !((got - want).abs() <= FROZEN_REL_TOL * want.abs().max(1.0)) {
            fails.push(format!("{tag}: kappa_min {got} differs from frozen {want}"));
        }
    }
    rep.failures.extend(fails);
    Ok(())
}

/// Torsion-growth sweep; also used by `rebuild` for a single point.
pub fn run_sweep(cfg: &Config, dir: &Path, caps: &Caps) -> Result<Report, CliError> {
    let (family, points) = sweep_points(cfg, dir)?;
    let mut rep = Report::new(SWEEP_SCHEMA, SWEEP_COLUMNS);
    for p in &points {
        sweep_point(family, p, caps, &mut rep)?;
    }
    if let Some((_, f)) = cfg.raw("frozen") {
        check_frozen(&mut rep, &dir.join(f))?;
    }
    Ok(rep)
}

fn random_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let dense: Vec<Vec<i64>> = (0..rows).map(|_| (0..cols).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
    IntMatrix::from_dense(&dense)
}

fn ln_or_neg_inf(x: &BigInt) -> f64 {
    if x.sign() == num_bigint::Sign::Plus {
        ln_big(x)
    } else {
        f64::NEG_INFINITY
    }
}

/// Gabber's inequality on random two-step complexes, then BT3 on random matrices.
pub fn run_gabber_fuzz(cfg: &Config, caps: &Caps) -> Result<Report, CliError> {
    cfg.check_keys(&[
        "seed", "count", "max_size", "bound", "bt3_count", "bt3_rows", "bt3_cols", "format", "caps_bits", "caps_minors", "caps_iterations",
    ])
    .map_err(cfg_err)?;
    let seed: u64 = cfg
        .get("seed")
        .map_err(cfg_err)?
        .ok_or_else(|| cfg_err(ParseError::new(0, "missing required key `seed`")))?;
    let count: usize = cfg.get_or("count", 1000).map_err(cfg_err)?;
    let max_size: usize = cfg.get_or("max_size", 30).map_err(cfg_err)?;
    let bound: i64 = cfg.get_or("bound", 5).map_err(cfg_err)?;
    let bt3_count: usize = cfg.get_or("bt3_count", 100).map_err(cfg_err)?;
    let bt3_rows: usize = cfg.get_or("bt3_rows", 8).map_err(cfg_err)?;
    let bt3_cols: usize = cfg.get_or("bt3_cols", 6).map_err(cfg_err)?;
    if max_size == 0 || bound < 0 {
        return Err(cfg_err(ParseError::new(0, "`max_size` must be positive and `bound` nonnegative")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = Report::new(GABBER_SCHEMA, GABBER_COLUMNS);
    for i in 0..count {
        let c = random_two_step(&mut rng, max_size, bound);
        let dims = format!("{:?}", c.dims());
        for j in 0..c.top_degree() {
            let g = check_gabber(&c, j, caps)?;
            if !g.holds {
                rep.failures.push(format!("gabber instance {i} degree {j}: {} > {}", g.log_torsion, g.bound));
            }
            rep.push(vec!["gabber".into(), i.into(), j.into(), dims.clone().into(), g.log_torsion.into(), g.bound.into(), g.holds.into()]);
        }
    }
    for i in 0..bt3_count {
        let m = random_matrix(&mut rng, bt3_rows, bt3_cols, bound);
        let b = check_bt3(&m, caps)?;
        if !b.holds {
            rep.failures.push(format!("bt3 instance {i}: |tors|² = {} > det′² = {}", &b.torsion * &b.torsion, b.det_prime_squared));
        }
        rep.push(vec![
            "bt3".into(),
            i.into(),
            Cell::Text(String::new()),
            format!("{bt3_rows}x{bt3_cols}").into(),
            (2.0 * ln_or_neg_inf(&b.torsion)).into(),
            ln_or_neg_inf(&b.det_prime_squared).into(),
            b.holds.into(),
        ]);
    }
    Ok(rep)
}

fn word_list(cfg: &Config, key: &str) -> Result<Vec<Word>, CliError> {
    let (ln, v) = cfg.require(key).map_err(cfg_err)?;
    v.split(',')
        .map(|w| Word::parse(w.trim()).map_err(|e| cfg_err(ParseError::new(ln, format!("`{key}`: {e}")))))
        .collect()
}

fn join_words(ws: &[Word]) -> String {
    ws.iter().map(Word::to_string).collect::<Vec<_>>().join(", ")
}

/// `family = heisenberg` runs the exhaustive sweep for `N ≤ n_max`;
/// `family = action` checks one action file against listed `Λ`, `S`, `δ`.
pub fn run_farber(cfg: &Config, dir: &Path) -> Result<Report, CliError> {
    let (ln, fam) = cfg.require("family").map_err(cfg_err)?;
    match fam {
        "heisenberg" => {
            cfg.check_keys(&["family", "n_max", "format"]).map_err(cfg_err)?;
            let n_max: u32 = cfg.get_or("n_max", 8).map_err(cfg_err)?;
            let mut rep = Report::new(FARBER_SWEEP_SCHEMA, FARBER_SWEEP_COLUMNS);
            for n in 1..=n_max {
                let s = heisenberg_sweep_at(n)?;
                rep.failures.extend(s.lemma_failures.iter().chain(&s.double_count_failures).chain(&s.conjugation_failures).cloned());
                rep.push(vec![
                    n.into(),
                    s.actions.into(),
                    s.lemma_instances.into(),
                    s.lemma_premise.into(),
                    s.lemma_failures.len().into(),
                    s.double_count_checks.into(),
                    s.double_count_failures.len().into(),
                    s.conjugation_checks.into(),
                    s.conjugation_failures.len().into(),
                ]);
            }
            Ok(rep)
        }
        "action" => {
            cfg.check_keys(&["family", "action", "lambda", "s", "delta", "format"]).map_err(cfg_err)?;
            let (_, file) = cfg.require("action").map_err(cfg_err)?;
            let path = dir.join(file);
            let a = PermutationAction::parse(&read(&path)?)
                .map_err(|e| CliError::Io { path: path.display().to_string(), msg: e.to_string() })?;
            let lambda = word_list(cfg, "lambda")?;
            let s = word_list(cfg, "s")?;
            let (dl, dv) = cfg.require("delta").map_err(cfg_err)?;
            let mut rep = Report::new(FARBER_SCHEMA, FARBER_COLUMNS);
            for d in dv.split(',') {
                let delta: BigRational = d.trim().parse().map_err(|_| cfg_err(ParseError::new(dl, format!("invalid rational `{}`", d.trim()))))?;
                let c = check_intersection_lemma(&a, &lambda, &s, &delta).map_err(|e| cfg_err(ParseError::new(dl, e.to_string())))?;
                if !c.holds {
                    rep.failures.push(format!("δ = {delta}: statistic {} < {}", c.statistic, BigRational::one() - &delta));
                }
                let approx = num_traits::ToPrimitive::to_f64(&c.statistic).unwrap_or(f64::NAN);
                rep.push(vec![
                    join_words(&lambda).into(),
                    join_words(&s).into(),
                    delta.to_string().into(),
                    c.premise.into(),
                    c.statistic.to_string().into(),
                    approx.into(),
                    c.holds.into(),
                ]);
            }
            Ok(rep)
        }
        other => Err(cfg_err(ParseError::new(ln, format!("unknown farber family `{other}` (heisenberg, action)")))),
    }
}
