use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use qinduce::bundle::{
    check_module_sides, check_section_isomorphisms, check_trivialization, i_phi, i_phi_inv, space_tensor,
    verify_section, Section,
};
use qinduce::coalgebra::Label;
use qinduce::comodule::{direct_sum, equivalence, Comodule};
use qinduce::fixtures::{load_fixture_with, Fixture, LoadOptions};
use qinduce::induction::{
    check_automorphism_twist, check_canonical_coactions, check_direct_sum, check_double_induction,
    check_equivalence_transport, check_multiplicativity, check_restriction, induced_space, HopfMap, InducedSpace,
};
use qinduce::subgroup::{CoisotropicSubgroup, Side};
use qinduce::tensor::Tensor;
use qinduce::{Error, Report, Status};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

#[derive(Parser)]
#[command(name = "qinduce", version, about = "Exact induction of quantum group corepresentations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Truncation degree.
    #[arg(long, global = true, env = "QINDUCE_DEGREE")]
    degree: Option<u32>,
    /// Template window for indexed families.
    #[arg(long, global = true, env = "QINDUCE_WINDOW")]
    window: Option<u32>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Seed for randomized sampling of characters.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(clap::Args)]
struct Input {
    /// Fixture name or file path.
    #[arg(required_unless_present = "fixture_flag")]
    fixture: Option<String>,
    #[arg(long = "fixture", id = "fixture_flag", conflicts_with = "fixture")]
    fixture_flag: Option<String>,
}

impl Input {
    fn name(&self) -> &str {
        self.fixture.as_deref().or(self.fixture_flag.as_deref()).expect("clap requires one")
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the fixture gates: confluence, Hopf axioms, coisotropy, sections, comodules.
    Check {
        #[command(flatten)]
        input: Input,
    },
    /// Compute an induced space with its coaction.
    Induce {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        subgroup: Option<String>,
        /// Carrier basis element: an index into the group-like family or a label.
        #[arg(long, conflicts_with = "comodule")]
        character: Option<String>,
        /// A comodule declared in the fixture.
        #[arg(long)]
        comodule: Option<String>,
        /// Also write the induced-space description as JSON.
        #[arg(long, visible_alias = "report")]
        out: Option<PathBuf>,
    },
    /// Run the induction and section property suites on every subgroup.
    Properties {
        #[command(flatten)]
        input: Input,
    },
    /// Verify a section and the trivialization it gives.
    CheckSection {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        subgroup: String,
        /// Template parameter, e.g. `r=1`.
        #[arg(long = "set", value_parser = parse_binding)]
        set: Vec<(String, i64)>,
    },
}

fn parse_binding(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=INT")?;
    let v = v.trim().parse().map_err(|_| format!("`{v}` is not an integer"))?;
    Ok((k.trim().trim_start_matches('$').to_string(), v))
}

fn load(cli: &Cli, name: &str) -> qinduce::Result<Fixture> {
    load_fixture_with(name, &LoadOptions { degree: cli.degree, window: cli.window, skip_gates: true })
}

fn emit(cli: &Cli, rep: &Report, extra: Option<&str>) {
    match cli.format {
        Format::Json => println!("{}", rep.to_json()),
        Format::Text => {
            if let Some(e) = extra {
                print!("{e}");
            }
            print!("{}", rep.to_text());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(ok) => ExitCode::from(if ok { 0 } else { 1 }),
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::GateFailure { report, .. } = &e {
                eprint!("{}", report.to_text());
            }
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> qinduce::Result<bool> {
    let rep = match &cli.cmd {
        Cmd::Check { input } => {
            let mut rep = load(cli, input.name())?.gates;
            rep.strip_timing();
            emit(cli, &rep, None);
            rep
        }
        Cmd::Induce { input, subgroup, character, comodule, out } => {
            let fx = gated(cli, input.name())?;
            let (rep, desc, text) = induce(cli, &fx, subgroup.as_deref(), character.as_deref(), comodule.as_deref())?;
            if let Some(path) = out {
                std::fs::write(path, serde_json::to_string_pretty(&desc).expect("description serializes"))?;
            }
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&desc).expect("description serializes")),
                Format::Text => emit(cli, &rep, Some(&text)),
            }
            rep
        }
        Cmd::Properties { input } => {
            let fx = gated(cli, input.name())?;
            let rep = properties(cli, &fx)?;
            emit(cli, &rep, None);
            rep
        }
        Cmd::CheckSection { input, subgroup, set } => {
            let fx = gated(cli, input.name())?;
            let d = cli.degree.unwrap_or(2);
            let fixed: HashMap<String, i64> = set.iter().cloned().collect();
            let s = Section::from_fixture(&fx, subgroup, &fixed)?;
            let mut rep = Report::new(format!("section {} at degree {d}", s.name));
            rep.merge("section", verify_section(&s, d));
            rep.merge("trivialization", check_trivialization(&s, d));
            emit(cli, &rep, None);
            rep
        }
    };
    Ok(rep.is_ok())
}

/// Load and refuse fixtures whose gates fail.
fn gated(cli: &Cli, name: &str) -> qinduce::Result<Fixture> {
    let fx = load(cli, name)?;
    if !fx.gates.is_ok() {
        return Err(Error::GateFailure { name: fx.name.clone(), report: Box::new(fx.gates.clone()) });
    }
    Ok(fx)
}

fn pick_subgroup<'a>(fx: &'a Fixture, name: Option<&str>) -> qinduce::Result<(&'a str, &'a Arc<CoisotropicSubgroup>)> {
    if let Some(n) = name {
        fx.subgroup(n)?;
        return Ok(fx.subgroups().find(|(k, _)| k.as_str() == n).map(|(k, s)| (k.as_str(), s)).expect("looked up"));
    }
    let with_section = fx.section_names();
    fx.subgroups()
        .find(|(k, _)| with_section.contains(&k.as_str()))
        .or_else(|| fx.subgroups().next())
        .map(|(k, s)| (k.as_str(), s))
        .ok_or_else(|| Error::Fixture(format!("{} declares no subgroup", fx.name)))
}

/// A carrier basis element from an index into the group-like family or a label.
fn carrier_element(sub: &CoisotropicSubgroup, label: &str) -> qinduce::Result<u32> {
    let c = sub.carrier();
    if let (Ok(p), Some(Label::Indexed(sym, _))) = (label.trim().parse::<i64>(), c.labels().first()) {
        return c.indexed(sym, p);
    }
    let v = c.parse_vec(label, &HashMap::new())?;
    match v.iter().collect::<Vec<_>>()[..] {
        [(b, x)] if x.is_one() => Ok(*b),
        _ => Err(Error::Fixture(format!("`{label}` is not a carrier basis element"))),
    }
}

fn fmt_display(ind: &InducedSpace, t: &Tensor) -> String {
    let alg = &ind.source().alg;
    let mut parts: std::collections::BTreeMap<_, qinduce::algebra::Element> = Default::default();
    for (k, c) in t.terms() {
        parts.entry(k[1].word().clone()).or_default().add_term(k[2].word().clone(), c.clone());
    }
    if parts.is_empty() {
        return "0".into();
    }
    parts.iter().map(|(b, x)| format!("({})⊗({})", alg.fmt_element(x), alg.fmt_word(b))).collect::<Vec<_>>().join(" + ")
}

type Induced = (Report, serde_json::Value, String);

fn induce(cli: &Cli, fx: &Fixture, sub: Option<&str>, ch: Option<&str>, cm: Option<&str>) -> qinduce::Result<Induced> {
    let d = cli.degree.unwrap_or(2);
    let (rho, sname, sub) = match cm {
        Some(name) => {
            let rho = fx.comodule(name)?;
            let (sname, sub) = fx
                .subgroups()
                .find(|(_, s)| Arc::ptr_eq(s.carrier(), rho.carrier()))
                .ok_or_else(|| Error::CarrierMismatch(format!("{name} has no subgroup")))?;
            (rho, sname.as_str(), sub)
        }
        None => {
            let (sname, sub) = pick_subgroup(fx, sub)?;
            let b = carrier_element(sub, ch.unwrap_or("0"))?;
            (Comodule::character(sub.carrier().clone(), b, Side::Right), sname, sub)
        }
    };
    let ind = induced_space(sub.as_ref(), &rho, d)?;
    let mut rep = Report::new(format!("ind({}) over {sname} at degree {d}", rho.name));
    rep.merge("induced", check_restriction(&ind));
    let alg = &sub.source().alg;
    let basis: Vec<String> = ind.basis().iter().map(|t| ind.fmt(t)).collect();
    let mut text = format!("ind({}) over {sname}, degree {d}: dimension {}\n", rho.name, ind.dim());
    for (k, b) in basis.iter().enumerate() {
        text.push_str(&format!("  f[{k}] = {b}\n"));
    }
    let mut coaction = Vec::new();
    for t in ind.basis() {
        let parts = ind.coaction_components(&t)?;
        let row: Vec<_> = parts
            .iter()
            .map(|(u, g)| json!({ "word": alg.fmt_word(u), "component": ind.fmt(g), "in_space": ind.contains(g) }))
            .collect();
        coaction.push(row);
    }
    let mut displays = serde_json::Map::new();
    if fx.section_template(sname).is_some() && rho.side == Side::Right {
        let s = Section::from_fixture(fx, sname, &HashMap::new())?;
        rep.merge("isomorphisms", check_section_isomorphisms(&s, &rho, d));
        text.push_str("coaction on generators of the quotient space, written (X)⊗(b):\n");
        for b in sub.coinvariants(1)?.elements().into_iter().filter(|b| b.degree() == 1) {
            for j in 0..rho.dim() {
                let name = format!(
                    "ind({})({}{})",
                    rho.name,
                    alg.fmt_element(&b),
                    if rho.dim() > 1 { format!(" e{j}") } else { String::new() }
                );
                let f = i_phi(&s, &rho, &space_tensor(Side::Right, j as u32, &b))?;
                let shown = match ind.coordinates(&f) {
                    Ok(_) => fmt_display(&ind, &i_phi_inv(&s, &rho, &ind.coaction(&f)?)?),
                    Err(e) => format!("unavailable: {e}"),
                };
                text.push_str(&format!("  {name} = {shown}\n"));
                displays.insert(name, json!(shown));
            }
        }
    }
    rep.strip_timing();
    let desc = json!({
        "fixture": fx.name,
        "subgroup": sname,
        "comodule": rho.name,
        "degree": d,
        "dimension": ind.dim(),
        "basis": basis,
        "coaction": coaction,
        "displays": displays,
        "ok": rep.is_ok(),
        "report": rep,
    });
    Ok((rep, desc, text))
}

fn characters(sub: &CoisotropicSubgroup) -> Vec<u32> {
    let c = sub.carrier();
    (0..c.dim() as u32).filter(|&b| c.is_grouplike(b) && sub.preimage(b).is_some_and(|w| w.degree() <= 2)).collect()
}

fn properties(cli: &Cli, fx: &Fixture) -> qinduce::Result<Report> {
    let d = cli.degree.unwrap_or(2);
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut rep = Report::new(format!("properties of {} at degree {d}", fx.name));
    let subs: Vec<(&String, &Arc<CoisotropicSubgroup>)> = fx.subgroups().collect();
    for (name, sub) in &subs {
        rep.merge(&format!("{name}.coactions"), check_canonical_coactions(sub.as_ref(), d));
        rep.merge(&format!("{name}.multiplicativity"), check_multiplicativity(sub, d));
        let mut chars = characters(sub);
        chars.shuffle(&mut rng);
        let chars: Vec<Comodule> =
            chars.into_iter().take(2).map(|b| Comodule::character(sub.carrier().clone(), b, Side::Right)).collect();
        if let [a, b] = &chars[..] {
            let (ab, ba) = (direct_sum(a, b)?, direct_sum(b, a)?);
            if let Some(f) = equivalence(&ab, &ba)? {
                rep.merge(&format!("{name}.transport"), check_equivalence_transport(sub.as_ref(), &ab, &ba, &f, d));
            }
            rep.merge(&format!("{name}.direct_sum"), check_direct_sum(sub.as_ref(), a, b, d));
        }
        let Some(rho) = chars.first() else { continue };
        let id = HopfMap::identity(sub.source().clone());
        rep.merge(&format!("{name}.twist"), check_automorphism_twist(sub, &id, rho, d)?);
        if fx.section_template(name).is_some() {
            let s = Section::from_fixture(fx, name, &HashMap::new())?;
            rep.merge(&format!("{name}.section"), verify_section(&s, d));
            rep.merge(&format!("{name}.trivialization"), check_trivialization(&s, d));
            rep.merge(&format!("{name}.isomorphisms"), check_section_isomorphisms(&s, rho, d));
        }
        let sides = check_module_sides(sub, rho, d);
        let (own, other) =
            if sub.side == Side::Right { ("module.left", "module.right") } else { ("module.right", "module.left") };
        rep.check(&format!("{name}.module_side"), sides.status(own) != Some(Status::Fail), || sides.to_text());
        let witness = sides.failures().find(|c| c.id == other).map(|c| c.witnesses.join("; "));
        if let Some(w) = witness {
            rep.note(format!("{name}: wrong-side product leaves the induced space, e.g. {w}"));
        }
    }
    for (gk_name, gk) in &subs {
        for (kh_name, kh) in &subs {
            let chained = gk.quantum && gk.carrier().backing().is_some_and(|h| Arc::ptr_eq(h, kh.source()));
            if !chained {
                continue;
            }
            for b in characters(kh).into_iter().take(2) {
                let rho = Comodule::character(kh.carrier().clone(), b, Side::Right);
                rep.merge(&format!("{gk_name}>{kh_name}.double"), check_double_induction(gk, kh, &rho, d));
            }
        }
    }
    rep.strip_timing();
    Ok(rep)
}
