use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use coarse_decomp::decomp::io::{certificate_from_json, certificate_to_json};
use coarse_decomp::decomp::{play_game, random_schedule, verify_certificate, Strategy};
use coarse_decomp::groups::{ball_with_cap, GroupSpec, LampGroup, DEFAULT_BALL_CAP};
use coarse_decomp::metric::io::space_to_json;
use coarse_decomp::metric::{fmt_q, FiniteMetricSpace, MetricFamily, SpaceOrigin};
use coarse_decomp::norms::{enumerate_ball_ba, AnyElem, BaseField, Length, Norm, RingSpec, DEFAULT_ENUM_BUDGET};
use coarse_decomp::property_a::{fmt_big, parse_big, pou_from_certificate, verify_witness, witness_from_json, witness_to_json};
use coarse_decomp::rips::corpus::lemma_sweep;
use coarse_decomp::rips::{
    build_relative_rips, build_rips, build_scaled_rips, derive_dimension_constants, geodesic_lower, geodesic_upper,
    verify_lemma, Lemma, LemmaParams, LemmaStatus, MetricSimplicialComplex, MAX_CONSTANT_DIM,
};
use coarse_decomp::{Error, Result};
use serde_json::{json, Value};

use crate::input::{load_space, matrix, point_set, rational, rational_list, read_json};
use crate::{Cli, Command, ComplexArgs, DecomposeCmd, GenArgs, NormsCmd, Outcome, PouCmd, ReportCmd, RipsCmd, SpaceCmd};

fn done(json: Value) -> Result<Outcome> {
    Ok(Outcome { json, ok: true })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let start = Instant::now();
    let g = &cli.global;
    let mut out = match &cli.command {
        Command::Space(SpaceCmd::Gen(args)) => space_gen(args, g.budget),
        Command::Space(SpaceCmd::Show { space }) => space_show(&*load_space(space)?),
        Command::Decompose(DecomposeCmd::Run { space, strategy, challenges, random, max }) => {
            decompose(space, strategy, challenges.as_deref(), *random, *max, g.seed)
        }
        Command::Decompose(DecomposeCmd::Verify { cert }) => verify(cert),
        Command::Norms(cmd) => norms(cmd, g.budget),
        Command::Rips(cmd) => rips(cmd, g.subdivision, g.seed),
        Command::Pou(cmd) => pou(cmd),
        Command::Report(ReportCmd::Merge { files }) => merge(files),
    }?;
    if g.timings {
        out.json["runtime_ms"] = json!(start.elapsed().as_millis() as u64);
    }
    Ok(out)
}

fn group_spec(a: &GenArgs) -> Result<GroupSpec> {
    let need = |x: Option<usize>, what: &str| x.ok_or_else(|| Error::BadParams(format!("--group {} needs --{what}", a.group)));
    Ok(match a.group.as_str() {
        "zn" => {
            let n = need(a.n, "n")?;
            let weights = a
                .weights
                .as_deref()
                .map(|w| {
                    w.split(',')
                        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad weight {x:?}"))))
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            GroupSpec::FreeAbelian { n, weights }
        }
        "weighted" => GroupSpec::WeightedDirectSum { cutoff: need(a.cutoff, "cutoff")? },
        "lamplighter" => GroupSpec::Lamplighter { lamp: LampGroup::try_from(a.lamp.clone())? },
        "unipotent" => GroupSpec::unipotent_f2(a.max_deg),
        path => serde_json::from_value(read_json(Path::new(path))?)
            .map_err(|e| Error::BadParams(format!("{path} is not a group spec: {e}")))?,
    })
}

fn space_gen(a: &GenArgs, budget: Option<u64>) -> Result<Outcome> {
    let spec = group_spec(a)?;
    let radius = rational(&a.radius)?;
    if radius < coarse_decomp::metric::q(0) {
        return Err(Error::BadParams(format!("radius {} is negative", a.radius)));
    }
    let cap = budget.map_or(DEFAULT_BALL_CAP, |b| b as usize);
    let space = ball_with_cap(&spec, &radius, cap)?;
    eprintln!("{}-point space", space.len());
    done(space_to_json(&space))
}

fn space_show(s: &FiniteMetricSpace) -> Result<Outcome> {
    let origin = match s.origin() {
        SpaceOrigin::Group { spec, radius } => json!({"generator": spec, "radius": fmt_q(radius)}),
        SpaceOrigin::Explicit => json!("explicit"),
    };
    done(json!({
        "points": s.len(),
        "diameter": s.diameter().map(|d| fmt_q(&d)).unwrap_or_else(|_| "inf".into()),
        "origin": origin,
        "ids": s.ids(),
    }))
}

fn strategy(space: &FiniteMetricSpace, name: &str) -> Result<Strategy> {
    let spec = match space.origin() {
        SpaceOrigin::Group { spec, .. } => Some(spec),
        SpaceOrigin::Explicit => None,
    };
    match name {
        "default" => Ok(spec.map_or(Strategy::GreedyComponents, Strategy::default_for)),
        "greedy" => Ok(Strategy::GreedyComponents),
        "slabs" => match spec {
            Some(GroupSpec::FreeAbelian { n, .. }) => Ok(Strategy::product_of_slabs((0..*n).rev())),
            _ => match space.elements().and_then(|e| e.first()).and_then(|e| e.as_vector()) {
                Some(v) => Ok(Strategy::product_of_slabs((0..v.len()).rev())),
                None => Err(Error::BadParams("slabs need a space of integer vectors".into())),
            },
        },
        text => {
            let v = if text.trim_start().starts_with('{') { serde_json::from_str(text)? } else { read_json(Path::new(text))? };
            serde_json::from_value(v).map_err(|e| Error::BadParams(format!("bad strategy: {e}")))
        }
    }
}

fn decompose(space: &str, strat: &str, challenges: Option<&str>, random: Option<usize>, max: i64, seed: u64) -> Result<Outcome> {
    let space = load_space(space)?;
    let s = strategy(&space, strat)?;
    let rs = match (challenges, random) {
        (Some(c), _) => rational_list(c)?,
        (None, Some(n)) => random_schedule(seed, n, max),
        (None, None) => return Err(Error::BadParams("give --challenges or --random".into())),
    };
    let cert = play_game(&MetricFamily::single(space), &s, &rs)?;
    eprintln!("depth {}, bound {}", cert.depth(), fmt_q(&cert.bound));
    done(certificate_to_json(&cert))
}

fn verify(path: &Path) -> Result<Outcome> {
    let v = read_json(path).map_err(|e| Error::MalformedCertificate(e.to_string()))?;
    let cert = certificate_from_json(&v)?;
    let rep = verify_certificate(&cert)?;
    Ok(Outcome { ok: rep.valid, json: serde_json::to_value(rep)? })
}

fn length_json(l: &Length) -> Value {
    match l {
        Length::Discrete { exponent, scale } => json!({"exponent": exponent, "value": *exponent as f64 * scale}),
        Length::Archimedean { value, lo, hi } => json!({"value": value, "lo": lo, "hi": hi}),
    }
}

fn norms(cmd: &NormsCmd, budget: Option<u64>) -> Result<Outcome> {
    match cmd {
        NormsCmd::Len { norm, matrix: m, field } => {
            let norm = Norm::parse(norm)?;
            let g = matrix(BaseField::parse(field)?, m)?;
            done(json!({"matrix": g.to_string(), "length": length_json(&g.length(&norm)?)}))
        }
        NormsCmd::Ball { ring, k, norms, arch, s } => {
            let ring = RingSpec::parse(ring)?;
            let discrete = if norms.is_empty() {
                vec![Norm::degree()]
            } else {
                norms.iter().map(|n| Norm::parse(n)).collect::<Result<_>>()?
            };
            let arch = arch.iter().map(|n| Norm::parse(n)).collect::<Result<Vec<_>>>()?;
            let els = enumerate_ball_ba(&ring, &discrete, *k, &arch, &parse_big(s)?, budget.unwrap_or(DEFAULT_ENUM_BUDGET))?;
            let list: Vec<String> = els.iter().map(|e| e.to_string()).collect();
            done(json!({"ring": ring, "k": k, "count": list.len(), "elements": list}))
        }
        NormsCmd::Eval { norm, elem, field } => {
            let norm = Norm::parse(norm)?;
            let x = AnyElem::parse(BaseField::parse(field)?, elem)?;
            done(json!({"element": x.to_string(), "norm": x.norm(&norm)?.to_string()}))
        }
    }
}

fn complex(a: &ComplexArgs) -> Result<MetricSimplicialComplex> {
    let space = load_space(&a.space)?;
    let q = |x: &Option<String>, what: &str| -> Result<coarse_decomp::metric::Q> {
        rational(x.as_deref().ok_or_else(|| Error::BadParams(format!("missing --{what}")))?)
    };
    if let Some(w) = &a.w {
        let w = point_set(&space, w)?;
        let m = a.m.ok_or_else(|| Error::BadParams("missing --m".into()))?;
        return build_scaled_rips(space, &w, &q(&a.a, "a")?, &q(&a.b, "b")?, m);
    }
    if let Some(s) = &a.sigma {
        let s = point_set(&space, s)?;
        return build_relative_rips(space, &s, &q(&a.a, "a")?, &q(&a.b, "b")?);
    }
    let d = if a.d.is_some() { q(&a.d, "d")? } else { q(&a.a, "d")? };
    build_rips(space, &d)
}

fn index(space: &FiniteMetricSpace, id: &str) -> Result<usize> {
    space.index_of(id).ok_or_else(|| Error::BadParams(format!("unknown point {id:?}")))
}

fn params(space: &FiniteMetricSpace, a: &str, b: &Option<String>, eps: &Option<String>, m: Option<u32>, sets: &[String]) -> Result<LemmaParams> {
    let mut p = LemmaParams::new(rational(a)?);
    p.b = b.as_deref().map(rational).transpose()?;
    p.eps = eps.as_deref().map(rational).transpose()?;
    p.m = m;
    p.sets = sets.iter().map(|s| point_set(space, s)).collect::<Result<_>>()?;
    Ok(p)
}

fn constants_json() -> Result<Value> {
    let c = (0..=MAX_CONSTANT_DIM).map(|n| Ok(derive_dimension_constants(n)?.to_json())).collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(c))
}

fn rips(cmd: &RipsCmd, level: u32, seed: u64) -> Result<Outcome> {
    match cmd {
        RipsCmd::Build(a) => {
            let k = complex(a)?;
            let mut j = k.to_json();
            j["dimension"] = json!(k.dimension());
            j["f_vector"] = json!(k.f_vector());
            done(j)
        }
        RipsCmd::Dist { complex: a, p, q } => {
            let k = complex(a)?;
            let (x, y) = (index(&k.space, p)?, index(&k.space, q)?);
            let up = geodesic_upper(&k, x, y, level)?;
            let lo = geodesic_lower(&k, x, y)?;
            done(json!({
                "p": p, "q": q, "level": level,
                "d_space": k.space.dist(x, y).to_json_string(),
                "lower": lo.to_json_string(), "upper": up.to_json_string(),
                "lower_approx": lo.to_f64(), "upper_approx": up.to_f64(),
            }))
        }
        RipsCmd::Verify { lemma, space, a, b, eps, m, sets, samples } => {
            let lemma: Lemma = lemma.parse()?;
            let space = load_space(space)?;
            let mut p = params(&space, a, b, eps, *m, sets)?;
            p.level = level;
            p.seed = seed;
            p.samples = *samples;
            let rep = verify_lemma(&space, lemma, &p)?;
            Ok(Outcome { ok: rep.status == LemmaStatus::Pass, json: rep.to_json() })
        }
        RipsCmd::Sweep { factors } => {
            let mut cases = Vec::new();
            let (mut fails, mut inconclusive) = (0, 0);
            for mut c in lemma_sweep(factors)? {
                c.params.level = level;
                c.params.seed = seed;
                let rep = verify_lemma(&c.space, c.lemma, &c.params)?;
                fails += usize::from(rep.status == LemmaStatus::Fail);
                inconclusive += usize::from(rep.status == LemmaStatus::Inconclusive);
                cases.push(json!({"fixture": c.fixture, "report": rep.to_json()}));
            }
            let json = json!({
                "cases": cases,
                "hard_failures": fails,
                "inconclusive": inconclusive,
                "constants": constants_json()?,
            });
            Ok(Outcome { ok: fails + inconclusive == 0, json })
        }
        RipsCmd::ConeFactor { space, a, b, eps, w, factors } => {
            let space = load_space(space)?;
            let mut p = params(&space, a, &Some(b.clone()), &Some(eps.clone()), None, std::slice::from_ref(w))?;
            p.level = level;
            p.seed = seed;
            let mut tried = Vec::new();
            let mut smallest = None;
            let mut sorted = factors.clone();
            sorted.sort_unstable();
            for m in sorted {
                p.m = Some(m);
                let rep = verify_lemma(&space, Lemma::ConeRetraction, &p)?;
                if rep.status == LemmaStatus::Pass && smallest.is_none() {
                    smallest = Some(m);
                }
                tried.push(json!({"m": m, "status": rep.status, "worst_ratio": rep.worst_ratio}));
            }
            Ok(Outcome { ok: smallest.is_some(), json: json!({"tried": tried, "smallest_passing_m": smallest}) })
        }
    }
}

fn pou(cmd: &PouCmd) -> Result<Outcome> {
    match cmd {
        PouCmd::Build { cert, r, eps } => {
            let c = certificate_from_json(&read_json(cert)?)?;
            let w = pou_from_certificate(&c, &rational(r)?, &rational(eps)?)?;
            done(witness_to_json(&c.ambient, &w))
        }
        PouCmd::Verify { cert, witness } => {
            let c = certificate_from_json(&read_json(cert)?)?;
            let w = witness_from_json(&c.ambient, &read_json(witness)?)?;
            let rep = verify_witness(&c.ambient, &w);
            let json = json!({
                "valid": rep.valid,
                "worst_variation": fmt_big(&rep.worst_variation),
                "worst_pair": rep.worst_pair,
                "problems": rep.problems,
            });
            Ok(Outcome { ok: rep.valid, json })
        }
    }
}

fn merge(files: &[std::path::PathBuf]) -> Result<Outcome> {
    let mut out = BTreeMap::new();
    for f in files {
        let key = f.file_name().map_or_else(|| f.display().to_string(), |n| n.to_string_lossy().into_owned());
        out.insert(key, read_json(f)?);
    }
    done(json!({"reports": out}))
}
