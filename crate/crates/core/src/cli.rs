//! Command-line front end. Every command writes one artifact to stdout; the exit code is
//! 0 on success, 1 when a check fails, 2 on usage errors and 3 when a cap is exceeded.

use std::ffi::OsString;
use std::io::{Read, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bratteli::{
    covering_to_diagram, diagram_to_covering, export, validate_diagram, vershik_successor, ExportFormat, FinitePath,
    OrderedBratteliDiagram,
};
use crate::covering::{gen_family, telescope, validate, CoveringSpec, FamilyTag};
use crate::dynamics::{
    array_block, complexity_csv, complexity_profile, forbidden_window_report, language, level1_separation_check,
    li_yorke_witness, mixing_window_check, random_seed, residue_obstruction, stable_point, unstable_point, Frame,
    PointSeed,
};
use crate::error::{Error, Result};
use crate::expansion::{
    cumulative_runs, d_word, e_run_margins, expand_circuit_word, expand_vertex_walk, gap_set_with,
    gap_structure_report, GapQuery,
};
use crate::measures::{classify_ergodicity, nonatomic_horizons, one_minus_r, r_value, vertex_measure, MeasureKind};
use crate::substitution::{self, commute_check, conjugation_identity, factor_language, languages_equal, Substitution};
use crate::symbol::render_word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
    Dot,
}

#[derive(Parser, Debug)]
#[command(name = "proxrank2", version, about = "Rank-2 proximal KR-coverings: expansion, gaps, measures, orbits")]
struct Cli {
    /// Report errors as JSON on stderr.
    #[arg(long, global = true)]
    json_errors: bool,
    /// Worker threads for pair scans.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Bound on materialized symbols; overrides PROXRANK2_CAP.
    #[arg(long, global = true)]
    cap: Option<u64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Spec file; stdin when absent or `-`.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Use a generated family with default parameters instead of a spec file.
    #[arg(long, conflicts_with = "spec")]
    family: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct Pair {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the structural conditions of a spec.
    Validate(Input),
    /// Circuit lengths `l_n`.
    Length {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Keep the listed circuit levels.
    Telescope {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', required = true)]
        keep: Vec<usize>,
    },
    /// Expand `c_m` over level `n`, as symbols or as a vertex walk.
    Expand {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        walk: bool,
    },
    /// The stripped core `d_{m,n}`.
    Dword {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
    },
    /// Outer `E`-run margins of `c_{m,n}` and the cumulative runs `s(k,n)`.
    Margins {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
    },
    /// Occurrence gaps `N_{m,n}(u,v)` up to `--max`.
    Gaps {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        u: u32,
        #[arg(long)]
        v: u32,
        #[arg(long = "max")]
        max_gap: u64,
        #[arg(long)]
        include_zero: bool,
    },
    /// Run separations of `c_{m,n}`.
    Gapstruct {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
    },
    /// `r(n)` and `1 - r(n)`.
    Rvalues {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Classify the number of ergodic measures.
    Ergodic {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
    /// Edge weights of an invariant measure on `G_n` seen from level `m`.
    Measure {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
        #[arg(long, value_enum, default_value_t = KindArg::Nonatomic)]
        kind: KindArg,
        /// Report both horizons `m` and `m+1`.
        #[arg(long)]
        horizons: bool,
    },
    /// Factor language of the level-`n` rows.
    Language {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        len: usize,
        #[arg(long, default_value_t = 2)]
        window: usize,
    },
    /// Factor counts `p(L)` for `L = 1..=max-len`.
    Complexity {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        max_len: usize,
        #[arg(long, default_value_t = 2)]
        window: usize,
    },
    /// Array rows of a seeded point over `[t0, t1]`.
    Array {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        top: usize,
        /// `stable`, `unstable`, `pos:Q`, `path:S1,S2,...:OFFSET` or `random`.
        #[arg(long, default_value = "stable")]
        point: String,
        #[arg(long, allow_negative_numbers = true)]
        t0: i128,
        #[arg(long, allow_negative_numbers = true)]
        t1: i128,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The stable and unstable seeds at a top level.
    Stablepoint {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        top: usize,
    },
    /// Proximal and separation events of two orbits.
    Liyorke {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        top: usize,
        #[arg(long, default_value = "stable")]
        a: String,
        #[arg(long, default_value = "unstable")]
        b: String,
        #[arg(long)]
        horizon: u64,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        backward: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Gap window `[3 l_n, 2(m-n)]` for every vertex pair.
    Mixcheck {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
    },
    /// Residue classes of gaps modulo `p`.
    Residue {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        pair: Pair,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long = "max")]
        max_gap: u64,
    },
    /// Empty gap windows at the recorded stages.
    Forbidden {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        stage: Option<usize>,
    },
    /// Level-1 separation of distinct level-`n` segments.
    Sep1 {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        len: u64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Ordered Bratteli diagrams.
    #[command(subcommand)]
    Bratteli(BratteliCmd),
    /// Substitutions on finite alphabets.
    #[command(subcommand)]
    Subst(SubstCmd),
    /// Generated families.
    #[command(subcommand)]
    Family(FamilyCmd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Fixed,
    Nonatomic,
}

#[derive(Subcommand, Debug)]
enum BratteliCmd {
    /// Diagram of the covering truncated at `--depth`.
    Export {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        depth: usize,
    },
    /// Diagram to spec, either from `--diagram` or through the covering's own diagram.
    Roundtrip {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with_all = ["spec", "family"])]
        diagram: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Successive Vershik images of a path `END:O1,O2,...`.
    Vershik {
        #[command(flatten)]
        input: Input,
        #[arg(long, conflicts_with_all = ["spec", "family"])]
        diagram: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        path: String,
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct SubInput {
    /// `tau`, `alpha`, `beta`, or a JSON file `{"0": "001", ...}`.
    #[arg(long, default_value = "beta")]
    sub: String,
}

#[derive(Subcommand, Debug)]
enum SubstCmd {
    Apply {
        #[command(flatten)]
        s: SubInput,
        #[arg(long)]
        word: String,
    },
    Iterate {
        #[command(flatten)]
        s: SubInput,
        #[arg(long)]
        word: String,
        #[arg(long)]
        k: usize,
        /// Print only the length.
        #[arg(long)]
        len_only: bool,
    },
    Lang {
        #[command(flatten)]
        s: SubInput,
        #[arg(long, default_value_t = '0')]
        letter: char,
        #[arg(long)]
        len: usize,
    },
    Equal {
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = '0')]
        a_letter: char,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = '0')]
        b_letter: char,
        #[arg(long)]
        len: usize,
    },
    Commute {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// `α^k(1^l 0) = β^k(1^{l-k} 0 1^k)`.
    Conj {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        l: usize,
    },
    /// Covering language versus substitution language of the worked example.
    Bridge {
        #[arg(long)]
        len: usize,
    },
}

#[derive(Subcommand, Debug)]
enum FamilyCmd {
    Gen {
        #[arg(long)]
        tag: String,
        /// Generator parameters as JSON; defaults fill the rest.
        #[arg(long, default_value = "{}")]
        params: String,
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
}

/// Command outcome: the artifact and whether the check it performs passed.
struct Output {
    body: String,
    pass: bool,
}

impl Output {
    fn ok(body: String) -> Self {
        Output { body, pass: true }
    }

    fn check(body: String, pass: bool) -> Self {
        Output { body, pass }
    }
}

struct Ctx<'a> {
    cap: u64,
    format: Option<Format>,
    stdin: &'a mut dyn Read,
}

fn json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("report serializes");
    s.push('\n');
    s
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

impl Ctx<'_> {
    /// The chosen format if `allowed` lists it; the first entry is the default.
    fn format(&self, allowed: &[Format]) -> Result<Format> {
        match self.format {
            None => Ok(allowed[0]),
            Some(f) if allowed.contains(&f) => Ok(f),
            Some(f) => Err(usage(format!("format {f:?} is not supported here; use one of {allowed:?}"))),
        }
    }

    fn read_text(&mut self, path: Option<&PathBuf>) -> Result<String> {
        let mut s = String::new();
        match path {
            Some(p) if p.as_os_str() != "-" => {
                s = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
            }
            _ => {
                self.stdin.read_to_string(&mut s).map_err(|e| usage(format!("stdin: {e}")))?;
            }
        }
        Ok(s)
    }

    fn spec(&mut self, input: &Input) -> Result<CoveringSpec> {
        if let Some(tag) = &input.family {
            return gen_family(tag.parse::<FamilyTag>()?, &serde_json::json!({}));
        }
        let text = self.read_text(input.spec.as_ref())?;
        CoveringSpec::from_json(&text)
    }

    fn diagram(&mut self, input: &Input, file: Option<&PathBuf>, depth: Option<usize>) -> Result<OrderedBratteliDiagram> {
        match file {
            Some(p) => OrderedBratteliDiagram::from_json(&self.read_text(Some(p))?),
            None => {
                let spec = self.spec(input)?;
                covering_to_diagram(&spec, depth.unwrap_or(spec.top()))
            }
        }
    }
}

fn substitution(name: &str) -> Result<Substitution> {
    match name {
        "tau" => Ok(substitution::tau()),
        "alpha" => Ok(substitution::alpha()),
        "beta" => Ok(substitution::beta()),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            Substitution::from_json(&text)
        }
    }
}

/// Parses `stable`, `unstable`, `pos:Q`, `path:S1,S2,...:OFFSET` or `random`.
fn point(spec: &CoveringSpec, top: usize, desc: &str, rng: &mut ChaCha8Rng) -> Result<PointSeed> {
    let bad = || usage(format!("unrecognized point {desc:?}"));
    match desc.split(':').collect::<Vec<_>>().as_slice() {
        ["stable"] => stable_point(spec, top),
        ["unstable"] => unstable_point(spec, top),
        ["random"] => random_seed(spec, top, 0, 0, rng),
        ["pos", q] => Frame::new(spec, 1, top)?.seed_at(q.parse().map_err(|_| bad())?),
        ["path", slots, offset] => {
            let slot_path = if slots.is_empty() {
                Vec::new()
            } else {
                slots.split(',').map(|s| s.parse().map_err(|_| bad())).collect::<Result<Vec<u64>>>()?
            };
            let seed = PointSeed { base_level: 1, top_level: top, slot_path, offset: offset.parse().map_err(|_| bad())? };
            Frame::new(spec, 1, top)?.position(&seed)?;
            Ok(seed)
        }
        _ => Err(bad()),
    }
}

fn finite_path(desc: &str) -> Result<FinitePath> {
    let bad = || usage(format!("path must look like END:O1,O2,..., got {desc:?}"));
    let (end, ords) = desc.split_once(':').ok_or_else(bad)?;
    let ordinals = ords.split(',').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<Vec<u64>>>()?;
    Ok(FinitePath { end: end.trim().parse().map_err(|_| bad())?, ordinals })
}

fn text_lines<I: IntoIterator<Item = String>>(lines: I) -> String {
    lines.into_iter().map(|l| l + "\n").collect()
}

fn execute(cmd: Command, ctx: &mut Ctx) -> Result<Output> {
    use Format::*;
    let cap = ctx.cap;
    match cmd {
        Command::Validate(input) => {
            ctx.format(&[Json])?;
            let report = validate(&ctx.spec(&input)?);
            Ok(Output::check(json(&report), report.valid))
        }
        Command::Length { input, n } => {
            let f = ctx.format(&[Json, Text])?;
            let spec = ctx.spec(&input)?;
            let lengths: Vec<String> = match n {
                Some(n) => vec![spec.circuit_length(n)?.to_string()],
                None => spec.lengths().iter().map(|l| l.to_string()).collect(),
            };
            Ok(Output::ok(match f {
                Text => text_lines(lengths),
                _ => json(&serde_json::json!({ "lengths": lengths })),
            }))
        }
        Command::Telescope { input, keep } => {
            ctx.format(&[Json])?;
            let spec = ctx.spec(&input)?;
            Ok(Output::ok(telescope(&spec, &keep)?.to_json() + "\n"))
        }
        Command::Expand { input, pair, walk } => {
            let f = ctx.format(&[Text, Json])?;
            let spec = ctx.spec(&input)?;
            if walk {
                let w = expand_vertex_walk(&spec, pair.m, pair.n, cap)?;
                return Ok(Output::ok(match f {
                    Text => text_lines([w.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")]),
                    _ => json(&w),
                }));
            }
            let w = expand_circuit_word(&spec, pair.m, pair.n, cap)?;
            Ok(Output::ok(match f {
                Text => text_lines([w.to_string()]),
                _ => json(&w),
            }))
        }
        Command::Dword { input, pair } => {
            let f = ctx.format(&[Text, Json])?;
            let w = d_word(&ctx.spec(&input)?, pair.m, pair.n, cap)?;
            Ok(Output::ok(match f {
                Text => text_lines([render_word(&w.symbols)]),
                _ => json(&w),
            }))
        }
        Command::Margins { input, pair } => {
            ctx.format(&[Json])?;
            let spec = ctx.spec(&input)?;
            let (lead, trail) = e_run_margins(&spec, pair.m, pair.n)?;
            let cumulative = (pair.n.saturating_sub(1)..pair.m)
                .map(|k| cumulative_runs(&spec, k, pair.n).map(|r| (k, r)))
                .collect::<Result<Vec<_>>>()?;
            let rows: Vec<serde_json::Value> = cumulative
                .into_iter()
                .map(|(k, r)| serde_json::json!({ "k": k, "s": r.s.to_string(), "s_prime": r.s_prime.to_string(), "tau": r.tau.to_string() }))
                .collect();
            Ok(Output::ok(json(&serde_json::json!({
                "m": pair.m, "n": pair.n, "lead": lead.to_string(), "trail": trail.to_string(), "cumulative": rows
            }))))
        }
        Command::Gaps { input, pair, u, v, max_gap, include_zero } => {
            let f = ctx.format(&[Json, Text])?;
            let spec = ctx.spec(&input)?;
            let g = gap_set_with(&spec, pair.m, pair.n, &GapQuery { u, v, max_gap, include_zero }, cap)?;
            Ok(Output::ok(match f {
                Text => {
                    let items: Vec<String> = g.gaps.iter().map(|x| x.to_string()).collect();
                    text_lines([format!("{{{}}}", items.join(", "))])
                }
                _ => json(&g),
            }))
        }
        Command::Gapstruct { input, pair } => {
            ctx.format(&[Json])?;
            Ok(Output::ok(json(&gap_structure_report(&ctx.spec(&input)?, pair.m, pair.n)?)))
        }
        Command::Rvalues { input, depth } => {
            let f = ctx.format(&[Csv, Json])?;
            let spec = ctx.spec(&input)?;
            let depth = depth.unwrap_or(spec.depth());
            let spec = spec.extended_to(depth)?;
            let rows = (1..=depth)
                .map(|i| Ok((i, r_value(&spec, i)?.to_string(), one_minus_r(&spec, i)?.to_string())))
                .collect::<Result<Vec<_>>>()?;
            Ok(Output::ok(match f {
                Csv => {
                    let mut s = String::from("i,r,one_minus_r\n");
                    rows.iter().for_each(|(i, r, o)| s.push_str(&format!("{i},{r},{o}\n")));
                    s
                }
                _ => json(&rows.iter().map(|(i, r, o)| serde_json::json!({"i": i, "r": r, "one_minus_r": o})).collect::<Vec<_>>()),
            }))
        }
        Command::Ergodic { input, depth } => {
            let f = ctx.format(&[Json, Csv])?;
            let report = classify_ergodicity(&ctx.spec(&input)?, depth)?;
            Ok(Output::ok(match f {
                Csv => report.to_csv(),
                _ => json(&report),
            }))
        }
        Command::Measure { input, pair, kind, horizons } => {
            ctx.format(&[Json])?;
            let spec = ctx.spec(&input)?;
            if horizons {
                let h = nonatomic_horizons(&spec, pair.n, pair.m)?;
                let pass = h.at_m.check().ok() && h.at_next.check().ok();
                return Ok(Output::check(json(&h), pass));
            }
            let which = match kind {
                KindArg::Fixed => MeasureKind::Fixed,
                KindArg::Nonatomic => MeasureKind::Nonatomic,
            };
            let mv = vertex_measure(&spec, pair.n, pair.m, which)?;
            let check = mv.check();
            let pass = check.ok();
            Ok(Output::check(json(&serde_json::json!({ "measure": mv, "check": check })), pass))
        }
        Command::Language { input, n, len, window } => {
            let f = ctx.format(&[Json, Text])?;
            let r = language(&ctx.spec(&input)?, n, len, window)?;
            Ok(Output::ok(match f {
                Text => text_lines(r.words),
                _ => json(&r),
            }))
        }
        Command::Complexity { input, max_len, window } => {
            let f = ctx.format(&[Csv, Json])?;
            let rows = complexity_profile(&ctx.spec(&input)?, max_len, window)?;
            Ok(Output::ok(match f {
                Csv => complexity_csv(&rows),
                _ => json(&rows),
            }))
        }
        Command::Array { input, top, point: desc, t0, t1, seed } => {
            let f = ctx.format(&[Text, Json])?;
            let spec = ctx.spec(&input)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = point(&spec, top, &desc, &mut rng)?;
            let block = array_block(&spec, &p, t0, t1)?;
            Ok(Output::ok(match f {
                Text => block.render_text(),
                _ => json(&block),
            }))
        }
        Command::Stablepoint { input, top } => {
            ctx.format(&[Json])?;
            let spec = ctx.spec(&input)?;
            let (a, b) = (stable_point(&spec, top)?, unstable_point(&spec, top)?);
            let frame = Frame::new(&spec, 1, top)?;
            Ok(Output::ok(json(&serde_json::json!({
                "stable": a, "stable_position": frame.position(&a)?.to_string(),
                "unstable": b, "unstable_position": frame.position(&b)?.to_string(),
            }))))
        }
        Command::Liyorke { input, top, a, b, horizon, k, backward, seed } => {
            ctx.format(&[Json])?;
            let spec = ctx.spec(&input)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sa = point(&spec, top, &a, &mut rng)?;
            let sb = point(&spec, top, &b, &mut rng)?;
            let w = li_yorke_witness(&spec, &sa, &sb, horizon, k, backward)?;
            let pass = !w.proximal_events.is_empty() && !w.separation_events.is_empty();
            Ok(Output::check(json(&w), pass))
        }
        Command::Mixcheck { input, pair } => {
            ctx.format(&[Json])?;
            let r = mixing_window_check(&ctx.spec(&input)?, pair.m, pair.n, cap)?;
            Ok(Output::check(json(&r), r.pass))
        }
        Command::Residue { input, pair, p, max_gap } => {
            ctx.format(&[Json])?;
            let r = residue_obstruction(&ctx.spec(&input)?, pair.n, p, pair.m, max_gap, cap)?;
            Ok(Output::check(json(&r), r.pass))
        }
        Command::Forbidden { input, stage } => {
            ctx.format(&[Json])?;
            let r = forbidden_window_report(&ctx.spec(&input)?, stage, cap)?;
            Ok(Output::check(json(&r), r.pass))
        }
        Command::Sep1 { input, n, len, samples, seed } => {
            ctx.format(&[Json])?;
            let r = level1_separation_check(&ctx.spec(&input)?, n, len, samples, seed, cap)?;
            Ok(Output::check(json(&r), r.pass))
        }
        Command::Bratteli(b) => bratteli(b, ctx),
        Command::Subst(s) => subst(s, ctx),
        Command::Family(FamilyCmd::Gen { tag, params, depth }) => {
            ctx.format(&[Json])?;
            let mut params: serde_json::Value = serde_json::from_str(&params)?;
            if let (Some(d), Some(obj)) = (depth, params.as_object_mut()) {
                obj.insert("depth".into(), d.into());
            }
            Ok(Output::ok(gen_family(tag.parse()?, &params)?.to_json() + "\n"))
        }
    }
}

fn bratteli(cmd: BratteliCmd, ctx: &mut Ctx) -> Result<Output> {
    use Format::*;
    match cmd {
        BratteliCmd::Export { input, depth } => {
            let f = ctx.format(&[Json, Dot])?;
            let d = covering_to_diagram(&ctx.spec(&input)?, depth)?;
            let fmt = if f == Dot { ExportFormat::Dot } else { ExportFormat::Json };
            let mut body = String::from_utf8(export(&d, fmt)).expect("export is UTF-8");
            if !body.ends_with('\n') {
                body.push('\n');
            }
            Ok(Output::ok(body))
        }
        BratteliCmd::Roundtrip { input, diagram, depth } => {
            ctx.format(&[Json])?;
            if diagram.is_some() {
                let d = ctx.diagram(&input, diagram.as_ref(), depth)?;
                let report = validate_diagram(&d);
                let spec = diagram_to_covering(&d)?;
                return Ok(Output::check(json(&serde_json::json!({ "report": report, "spec": spec })), report.pass));
            }
            let spec = ctx.spec(&input)?;
            let depth = depth.unwrap_or(spec.top());
            let d = covering_to_diagram(&spec, depth)?;
            let back = diagram_to_covering(&d)?;
            let expect = spec.extended_to(depth.saturating_sub(1))?;
            let same = back.l1 == expect.l1 && back.levels[..] == expect.levels[..depth - 1];
            Ok(Output::check(json(&serde_json::json!({ "report": validate_diagram(&d), "identical": same, "spec": back })), same))
        }
        BratteliCmd::Vershik { input, diagram, depth, path, steps } => {
            ctx.format(&[Json])?;
            let d = ctx.diagram(&input, diagram.as_ref(), depth)?;
            let mut cur = finite_path(&path)?;
            let mut out = vec![cur.clone()];
            for _ in 0..steps {
                cur = vershik_successor(&d, &cur)?;
                out.push(cur.clone());
            }
            Ok(Output::ok(json(&out)))
        }
    }
}

fn subst(cmd: SubstCmd, ctx: &mut Ctx) -> Result<Output> {
    use Format::*;
    let cap = ctx.cap;
    match cmd {
        SubstCmd::Apply { s, word } => {
            ctx.format(&[Text])?;
            Ok(Output::ok(text_lines([substitution(&s.sub)?.apply(&word)?])))
        }
        SubstCmd::Iterate { s, word, k, len_only } => {
            ctx.format(&[Text])?;
            let sub = substitution(&s.sub)?;
            let line = if len_only { sub.iterate_len(&word, k)?.to_string() } else { sub.iterate_word(&word, k, cap)? };
            Ok(Output::ok(text_lines([line])))
        }
        SubstCmd::Lang { s, letter, len } => {
            let f = ctx.format(&[Text, Json])?;
            let l = factor_language(&substitution(&s.sub)?, letter, len)?;
            Ok(Output::ok(match f {
                Json => json(&l),
                _ => l.to_text(),
            }))
        }
        SubstCmd::Equal { a, a_letter, b, b_letter, len } => {
            ctx.format(&[Json])?;
            let c = languages_equal(&substitution(&a)?, a_letter, &substitution(&b)?, b_letter, len)?;
            Ok(Output::check(json(&c), c.equal))
        }
        SubstCmd::Commute { a, b } => {
            ctx.format(&[Json])?;
            let ok = commute_check(&substitution(&a)?, &substitution(&b)?);
            Ok(Output::check(json(&serde_json::json!({ "commute": ok })), ok))
        }
        SubstCmd::Conj { k, l } => {
            ctx.format(&[Json])?;
            let ok = conjugation_identity(k, l, cap)?;
            Ok(Output::check(json(&serde_json::json!({ "k": k, "l": l, "holds": ok })), ok))
        }
        SubstCmd::Bridge { len } => {
            ctx.format(&[Json])?;
            let r = substitution::prop55_bridge(len)?;
            let pass = r.comparison.equal;
            Ok(Output::check(json(&r), pass))
        }
    }
}

/// Exit code for an error: 3 when a cap is exceeded, 2 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::ExpansionTooLarge { .. } => 3,
        _ => 2,
    }
}

/// Runs one invocation against explicit streams and returns the exit code.
pub fn run_with<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let json_errors = args.iter().any(|a| a == "--json-errors");
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 0 {
                let _ = write!(stdout, "{e}");
            } else if json_errors {
                let _ = writeln!(stderr, "{}", json(&ErrorReport { error: "Usage", message: e.to_string() }).trim_end());
            } else {
                let _ = write!(stderr, "{e}");
            }
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // A second call in one process keeps the first pool; that only matters in tests.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let mut ctx = Ctx { cap: cli.cap.unwrap_or_else(crate::cap_from_env), format: cli.format, stdin };
    match execute(cli.command, &mut ctx) {
        Ok(out) => {
            let _ = stdout.write_all(out.body.as_bytes());
            if out.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if cli.json_errors {
                let _ = writeln!(stderr, "{}", json(&ErrorReport { error: e.kind(), message: e.to_string() }).trim_end());
            } else {
                let _ = writeln!(stderr, "error: {e}");
            }
            exit_code(&e)
        }
    }
}

/// Runs against the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdin.lock(), &mut stdout.lock(), &mut stderr.lock())
}
