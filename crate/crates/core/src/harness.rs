//! Commands behind the `khf` binary, returning reports.

use std::path::PathBuf;
use std::str::FromStr;

use crate::basepoint::{basepoint_check, reduced, splitting_check};
use crate::bracket::jones_unnormalized;
use crate::cobordism::{check_relation, disjoint_commute, pairing_rank, Move, RelationInstance};
use crate::diagram::{parse_pd, Axis, Edge, PlanarDiagram, TangleRegion};
use crate::error::{Error, Result};
use crate::fixtures::{fixture, Fixture};
use crate::report::{CheckResult, Report};
use crate::spectral::{default_k_max, leray_pages, persistence_pages, twin_arrows_check};
use crate::theories::{build_complex_capped, load_plugin, CubeComplex, TheorySpec};
use crate::verify::{compare_pair, extended_check, kunneth_check, mutation_check, skein_check};

/// Environment variable holding the default crossing cap.
pub const CAP_ENV: &str = "KHF_CROSSING_CAP";

#[derive(Clone, Debug)]
pub enum Input {
    Pd(String),
    Fixture(String),
    Plugin(PathBuf),
}

/// A diagram with the theory and metadata it came with.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub diagram: PlanarDiagram,
    pub plugin: Option<TheorySpec>,
    pub fixture: Option<&'static Fixture>,
    pub label: String,
}

impl Resolved {
    /// Listed basepoints, or the smallest edge label.
    pub fn basepoints(&self) -> Vec<Edge> {
        let listed: Vec<Edge> = self.diagram.basepoints().iter().copied().collect();
        if !listed.is_empty() {
            return listed;
        }
        self.diagram.all_edges().into_iter().take(1).collect()
    }

    /// The plugin theory if there is one, else Khovanov.
    pub fn theory(&self) -> TheorySpec {
        self.plugin.clone().unwrap_or_else(TheorySpec::khovanov)
    }
}

pub fn resolve(input: &Input) -> Result<Resolved> {
    match input {
        Input::Pd(s) => Ok(Resolved {
            diagram: parse_pd(s)?,
            plugin: None,
            fixture: None,
            label: s.clone(),
        }),
        Input::Fixture(name) => {
            let f = fixture(name)?;
            Ok(Resolved {
                diagram: f.diagram()?,
                plugin: None,
                fixture: Some(f),
                label: name.clone(),
            })
        }
        Input::Plugin(path) => {
            let spec = load_plugin(path)?;
            let diagram = spec
                .diagram
                .clone()
                .ok_or_else(|| Error::Plugin("plugin names no diagram".into()))?;
            Ok(Resolved {
                diagram,
                plugin: Some(spec),
                fixture: None,
                label: path.display().to_string(),
            })
        }
    }
}

fn input_report(command: &str, r: &Resolved, cap: usize) -> Report {
    let mut rep = Report::new(command)
        .input("diagram", r.diagram.to_pd_string())
        .input("cap", cap);
    if let Some(f) = r.fixture {
        rep = rep.input("fixture", f.name);
    }
    if let Some(p) = &r.plugin {
        rep = rep.input("plugin", &r.label).input("theory", &p.name);
    }
    rep
}

fn build(r: &Resolved, t: &TheorySpec, cap: usize) -> Result<CubeComplex> {
    build_complex_capped(&r.diagram, t, cap)
}

pub fn run_kh(input: &Input, cap: usize) -> Result<Report> {
    let r = resolve(input)?;
    let mut rep = input_report("kh", &r, cap);
    let cc = build(&r, &r.theory(), cap)?;
    let h = cc.complex.homology()?;
    rep.push(CheckResult::computed(
        cc.theory.name.clone(),
        h.dims.to_string(),
        &h.dims,
    ));
    Ok(rep)
}

pub fn run_reduced(input: &Input, p: Edge, cap: usize) -> Result<Report> {
    let r = resolve(input)?;
    let mut rep = input_report("reduced", &r, cap).input("basepoint", p);
    let cc = build(&r, &r.theory(), cap)?;
    let dims = reduced(&cc, p)?.homology_dims()?;
    rep.push(CheckResult::computed(
        "reduced",
        dims.to_string(),
        &dims,
    ));
    Ok(rep)
}

pub fn run_bn(input: &Input, cap: usize) -> Result<Report> {
    let r = resolve(input)?;
    let mut rep = input_report("bn", &r, cap);
    let cc = build(&r, &TheorySpec::bar_natan(), cap)?;
    let h = cc.complex.homology()?;
    let expected = 1usize << r.diagram.component_count();
    rep.push(CheckResult::checked(
        "bar-natan",
        format!("total rank 2^components = {expected}"),
        h.total() == expected,
        h.dims.to_string(),
        &h.dims,
    ));
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SsTheory {
    Kh,
    Bn,
    Plugin,
}

impl FromStr for SsTheory {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "kh" => Ok(SsTheory::Kh),
            "bn" => Ok(SsTheory::Bn),
            "plugin" => Ok(SsTheory::Plugin),
            _ => Err(Error::Parse(format!("unknown theory {s:?}"))),
        }
    }
}

pub fn run_ss(input: &Input, theory: SsTheory, pages: Option<usize>, cap: usize) -> Result<Report> {
    let r = resolve(input)?;
    let t = match theory {
        SsTheory::Kh => TheorySpec::khovanov(),
        SsTheory::Bn => TheorySpec::bar_natan(),
        SsTheory::Plugin => r
            .plugin
            .clone()
            .ok_or_else(|| Error::Plugin("--theory plugin needs --plugin".into()))?,
    };
    let cc = build(&r, &t, cap)?;
    let k_max = pages.unwrap_or_else(|| default_k_max(&cc.complex, r.diagram.crossing_count()));
    let mut rep = input_report("ss", &r, cap)
        .input("theory", &t.name)
        .input("pages", k_max);
    let ss = leray_pages(&cc.complex, k_max)?;
    for p in &ss.pages {
        rep.push(CheckResult::computed(
            format!("E{}", p.k),
            format!("{}, rank d{} = {}", p.dims, p.k, p.differential_rank.total()),
            p,
        ));
    }
    let summary = match ss.stabilized_at {
        Some(k) => format!("collapses at page {k}, total {}", ss.homology_total),
        None => format!("not collapsed by page {k_max}; homology total {}", ss.homology_total),
    };
    rep.push(CheckResult::computed("limit", summary, (ss.stabilized_at, ss.homology_total)));
    Ok(rep)
}

pub fn run_mutate(
    input: &Input,
    tangle: [Edge; 4],
    crossings: Vec<usize>,
    axis: Axis,
    cap: usize,
) -> Result<Report> {
    let r = resolve(input)?;
    let t = TangleRegion::new(tangle, crossings);
    let m = r.diagram.mutate(&t, axis)?;
    let mut rep = input_report("mutate", &r, cap)
        .input("tangle", tangle)
        .input("crossings", &t.interior_crossings)
        .input("axis", axis);
    rep.push(CheckResult::computed("mutant", m.to_pd_string(), m.to_pd_string()));
    if m.crossing_count() <= crate::bracket::BRACKET_CAP {
        let same = jones_unnormalized(&r.diagram)? == jones_unnormalized(&m)?;
        rep.push(CheckResult::checked(
            "bracket",
            "mutation preserves the bracket",
            same,
            format!("{}", jones_unnormalized(&m)?),
            same,
        ));
    }
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerifyKind {
    Splitting,
    Basepoint,
    Kunneth,
    Mutation,
    Skein,
    TwinArrows,
    Relations,
    All,
}

impl FromStr for VerifyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "splitting" => VerifyKind::Splitting,
            "basepoint" => VerifyKind::Basepoint,
            "kunneth" => VerifyKind::Kunneth,
            "mutation" => VerifyKind::Mutation,
            "skein" => VerifyKind::Skein,
            "twin-arrows" => VerifyKind::TwinArrows,
            "relations" => VerifyKind::Relations,
            "all" => VerifyKind::All,
            _ => return Err(Error::Parse(format!("unknown check {s:?}"))),
        })
    }
}

/// Optional inputs of `verify`.
#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    pub cap: usize,
    /// Second summand for the connected-sum check.
    pub with: Option<Input>,
    pub tangle: Option<([Edge; 4], Vec<usize>)>,
    pub axis: Option<Axis>,
    pub pages: Option<usize>,
}

pub fn run_verify(input: &Input, kind: VerifyKind, opts: &VerifyOptions) -> Result<Report> {
    let r = resolve(input)?;
    let name = format!("verify {}", kind_name(kind));
    let mut rep = input_report(&name, &r, opts.cap);
    let t = r.theory();
    let cc = build(&r, &t, opts.cap)?;
    let plain = t.faces.is_empty();
    let x_squared = t.relation() == crate::algebra::Relation::XSquared;
    let want = |k: VerifyKind| kind == k || kind == VerifyKind::All;

    if want(VerifyKind::Skein) {
        if plain {
            let s = skein_check(&cc)?;
            rep.push(CheckResult::checked(
                "skein",
                "Euler characteristic = bracket, exact triangle at every crossing",
                s.pass,
                format!(
                    "bracket {} vs Euler {}; {} triangles",
                    s.bracket,
                    s.euler,
                    s.sequences.len()
                ),
                &s,
            ));
        } else {
            rep.push(CheckResult::skipped("skein", "theory has face maps"));
        }
    }
    if want(VerifyKind::Splitting) {
        for p in r.basepoints() {
            let s = splitting_check(&cc, p)?;
            rep.push(CheckResult::checked(
                format!("splitting@{p}"),
                "H = reduced{-1} + reduced{+1}",
                s.pass,
                format!("unreduced {} = 2 x reduced {}", s.unreduced.total(), s.reduced.total()),
                &s,
            ));
        }
    }
    if want(VerifyKind::Basepoint) {
        let pts = r.basepoints();
        let b = basepoint_check(&cc, &pts)?;
        rep.push(CheckResult::checked(
            "basepoint",
            "equal reduced dims, transports are isomorphisms",
            b.pass,
            format!(
                "{} basepoints, dims agree {}, {} transports",
                pts.len(),
                b.dims_agree,
                b.transports.len()
            ),
            &b,
        ));
        if plain {
            let e = extended_check(&cc, &pts)?;
            rep.push(CheckResult::checked(
                "extended",
                "reduced at a split unknot = unreduced, exact triangles, transports",
                e.pass,
                format!(
                    "unlink {}, triangles {}, transports {}",
                    e.unlink_condition, e.skein_condition, e.transport.pass
                ),
                &e,
            ));
        }
    }
    if want(VerifyKind::TwinArrows) {
        if x_squared {
            let k_max = opts
                .pages
                .unwrap_or_else(|| default_k_max(&cc.complex, r.diagram.crossing_count()));
            for p in r.basepoints() {
                let tw = twin_arrows_check(&cc, p, k_max)?;
                rep.push(CheckResult::checked(
                    format!("twin-arrows@{p}"),
                    "E_k = reduced E_k{-1} + reduced E_k{+1} on every page",
                    tw.pass,
                    format!("{} pages compared", tw.pages.len()),
                    &tw,
                ));
            }
        } else {
            rep.push(CheckResult::skipped("twin-arrows", "reduction needs X^2"));
        }
    }
    if want(VerifyKind::Kunneth) {
        verify_kunneth(&r, opts, kind == VerifyKind::Kunneth, &mut rep)?;
    }
    if want(VerifyKind::Relations) {
        if plain {
            relation_suite(&r, &t, &mut rep)?;
        } else {
            rep.push(CheckResult::skipped("relations", "theory has face maps"));
        }
    }
    if want(VerifyKind::Mutation) {
        verify_mutation(&r, opts, kind == VerifyKind::Mutation, &mut rep)?;
    }
    Ok(rep)
}

fn kind_name(k: VerifyKind) -> &'static str {
    match k {
        VerifyKind::Splitting => "splitting",
        VerifyKind::Basepoint => "basepoint",
        VerifyKind::Kunneth => "kunneth",
        VerifyKind::Mutation => "mutation",
        VerifyKind::Skein => "skein",
        VerifyKind::TwinArrows => "twin-arrows",
        VerifyKind::Relations => "relations",
        VerifyKind::All => "all",
    }
}

fn verify_kunneth(r: &Resolved, opts: &VerifyOptions, explicit: bool, rep: &mut Report) -> Result<()> {
    if r.plugin.is_some() {
        rep.push(CheckResult::skipped("kunneth", "plugins are bound to one diagram"));
        return Ok(());
    }
    let other = match &opts.with {
        Some(i) => resolve(i)?,
        None => r.clone(),
    };
    let n = r.diagram.crossing_count() + other.diagram.crossing_count();
    if n > opts.cap {
        if explicit {
            return Err(Error::CrossingCap {
                crossings: n,
                cap: opts.cap,
            });
        }
        rep.push(CheckResult::skipped("kunneth", format!("sum has {n} crossings, cap {}", opts.cap)));
        return Ok(());
    }
    let p = r.basepoints()[0];
    let q = other.basepoints()[0];
    let k = kunneth_check(&r.diagram, p, &other.diagram, q, opts.cap)?;
    rep.push(CheckResult::checked(
        "kunneth",
        "reduced(D # D') = reduced(D) x reduced(D'), both candidates agree",
        k.pass,
        format!(
            "{} = {} x {}; isomorphism {}, candidates agree {}",
            k.sum.total(),
            k.left.total(),
            k.right.total(),
            k.isomorphism,
            k.candidates_agree
        ),
        &k,
    ));
    Ok(())
}

fn verify_mutation(r: &Resolved, opts: &VerifyOptions, explicit: bool, rep: &mut Report) -> Result<()> {
    let from_fixture = r.fixture.and_then(|f| f.mutant);
    let (region, axes) = match (&opts.tangle, from_fixture) {
        (Some((b, c)), _) => (
            TangleRegion::new(*b, c.iter().copied()),
            opts.axis.map_or(Axis::ALL.to_vec(), |a| vec![a]),
        ),
        (None, Some(m)) => (m.region(), opts.axis.map_or(Axis::ALL.to_vec(), |a| vec![a])),
        (None, None) => {
            if explicit {
                return Err(Error::InvalidTangle(
                    "mutation needs --tangle and --crossings or a mutant-pair fixture".into(),
                ));
            }
            rep.push(CheckResult::skipped("mutation", "no tangle given"));
            return Ok(());
        }
    };
    if r.plugin.is_some() {
        rep.push(CheckResult::skipped("mutation", "plugins are bound to one diagram"));
        return Ok(());
    }
    if let Some(m) = from_fixture {
        let partner = fixture(m.partner)?.diagram()?;
        let pts: Vec<(Edge, Edge)> = r
            .basepoints()
            .into_iter()
            .filter(|e| partner.has_edge(*e))
            .take(1)
            .map(|e| (e, e))
            .collect();
        let c = compare_pair(&r.diagram, &partner, &pts, opts.cap)?;
        rep.push(CheckResult::checked(
            format!("pair:{}", m.partner),
            "equal bracket, Khovanov, reduced and Bar-Natan",
            c.pass,
            format!(
                "bracket equal {}, Kh totals {} / {}, BN {} / {}",
                c.brackets_equal,
                c.khovanov.0.total(),
                c.khovanov.1.total(),
                c.bar_natan.0,
                c.bar_natan.1
            ),
            &c,
        ));
        rep.push(page_comparison(&r.diagram, &partner, opts.cap)?);
    }
    for axis in axes {
        let m = mutation_check(&r.diagram, &region, axis, opts.cap)?;
        rep.push(CheckResult::checked(
            format!("mutation:{axis}"),
            "mutant has equal bracket, Khovanov, reduced and Bar-Natan",
            m.comparison.pass,
            format!(
                "Kh totals {} / {}, BN {} / {}",
                m.comparison.khovanov.0.total(),
                m.comparison.khovanov.1.total(),
                m.comparison.bar_natan.0,
                m.comparison.bar_natan.1
            ),
            &m,
        ));
    }
    Ok(())
}

/// Bar-Natan pages of a mutant pair side by side from page 2 on. Reported,
/// not asserted: nothing guarantees agreement for general theories.
fn page_comparison(a: &PlanarDiagram, b: &PlanarDiagram, cap: usize) -> Result<CheckResult> {
    let t = TheorySpec::bar_natan();
    let (ca, cb) = (build_complex_capped(a, &t, cap)?, build_complex_capped(b, &t, cap)?);
    let k = default_k_max(&ca.complex, a.crossing_count()).max(default_k_max(&cb.complex, b.crossing_count()));
    let (sa, sb) = (persistence_pages(&ca.complex, k)?, persistence_pages(&cb.complex, k)?);
    let equal: Vec<(usize, bool)> = (2..=k)
        .map(|r| (r, sa.page_or_limit(r).map(|p| &p.dims) == sb.page_or_limit(r).map(|p| &p.dims)))
        .collect();
    let differing: Vec<usize> = equal.iter().filter(|e| !e.1).map(|e| e.0).collect();
    let summary = if differing.is_empty() {
        format!("Bar-Natan pages 2..{k} agree")
    } else {
        format!("Bar-Natan pages differ at {differing:?}")
    };
    Ok(CheckResult::computed("pages", summary, equal))
}

/// The local relations, placed next to the input diagram where it is small
/// enough and on crossingless circles otherwise.
fn relation_suite(r: &Resolved, t: &TheorySpec, rep: &mut Report) -> Result<()> {
    let d = &r.diagram;
    let small = d.crossing_count() <= 6;
    let base = if small { d.clone() } else { PlanarDiagram::empty() };
    let f = base.max_label();
    let mut loops = base.clone();
    for k in 1..=4 {
        loops = loops.with_free_loop(f + k)?;
    }
    let four = check_relation(
        &RelationInstance::FourTu {
            host: loops,
            loops: [f + 1, f + 2, f + 3, f + 4],
        },
        t,
    )?;
    rep.push(CheckResult::checked("4Tu", "sum of four tubes = 0", four.pass, four.detail.clone(), &four));

    let neck_host = d.with_free_loop(d.max_label() + 1)?;
    let neck = check_relation(
        &RelationInstance::NeckCutting {
            host: neck_host,
            loop_label: d.max_label() + 1,
        },
        t,
    )?;
    rep.push(CheckResult::checked("neck-cutting", "cut terms = identity", neck.pass, neck.detail.clone(), &neck));

    let pts = r.basepoints();
    if let Some(&p) = pts.first() {
        let same: Vec<Edge> = d
            .all_edges()
            .into_iter()
            .filter(|&e| e != p && d.component_of(e) == d.component_of(p))
            .take(2)
            .collect();
        for q in same {
            let m = check_relation(&RelationInstance::DotMigration { host: d.clone(), p, q }, t)?;
            rep.push(CheckResult::checked(
                format!("dot-migration {p}->{q}"),
                "dots on one component agree on homology",
                m.pass,
                m.detail.clone(),
                &m,
            ));
        }
        let c = check_relation(
            &RelationInstance::Cancel {
                host: d.clone(),
                edge: p,
                fresh: d.max_label() + 1,
            },
            t,
        )?;
        rep.push(CheckResult::checked("cancel", "birth then merge = identity", c.pass, c.detail.clone(), &c));

        let host = d.with_free_loop(d.max_label() + 1)?.with_free_loop(d.max_label() + 2)?;
        let a = [Move::OneHandle {
            a: d.max_label() + 1,
            b: d.max_label() + 2,
            fresh: None,
        }];
        let b = [Move::Dot { edge: p }];
        let ok = disjoint_commute(&host, &a, &b, t)?;
        rep.push(CheckResult::checked(
            "disjoint-commute",
            "handles with disjoint support commute",
            ok,
            format!("merge of two new circles against a dot at {p}"),
            ok,
        ));
    }
    let rank = pairing_rank(t);
    rep.push(CheckResult::checked(
        "pairing",
        "counit of the product is nondegenerate",
        rank == 2,
        format!("rank {rank}"),
        rank,
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kh_on_a_fixture() {
        let r = run_kh(&Input::Fixture("trefoil".into()), 16).unwrap();
        assert!(r.results[0].summary.ends_with("total 6"), "{}", r.to_text());
    }

    #[test]
    fn verify_all_on_unknot_passes() {
        let r = run_verify(&Input::Fixture("unknot".into()), VerifyKind::All, &VerifyOptions { cap: 16, ..Default::default() })
            .unwrap();
        assert!(!r.failed(), "{}", r.to_text());
    }

    #[test]
    fn verify_all_on_trefoil_passes() {
        let r = run_verify(&Input::Fixture("trefoil".into()), VerifyKind::All, &VerifyOptions { cap: 16, ..Default::default() })
            .unwrap();
        assert!(!r.failed(), "{}", r.to_text());
    }

    #[test]
    fn mutation_needs_a_tangle() {
        let e = run_verify(&Input::Fixture("trefoil".into()), VerifyKind::Mutation, &VerifyOptions { cap: 16, ..Default::default() });
        assert!(matches!(e, Err(Error::InvalidTangle(_))));
    }

    #[test]
    fn spectral_pages_for_bar_natan() {
        let r = run_ss(&Input::Fixture("trefoil".into()), SsTheory::Bn, None, 16).unwrap();
        assert!(r.results.len() >= 3);
    }
}
