use std::collections::BTreeMap;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use tate_core::detline::DeterminantTheory;
use tate_core::extension::{
    beilinson_commutator, commutator_pairing, residue_trace, RESIDUE_ORIENTATION,
};
use tate_core::fermion::FiniteCliffordModel;
use tate_core::grassmann::{
    check_pluecker, gaussian_binomial, pluecker, window_grassmannian, DEFAULT_CAP,
};
use tate_core::hensel::{hensel_factor, lift_idempotent, APoly, TruncatedLocalRing};
use tate_core::lattice::{smith as smith_form, window_lattices};
use tate_core::nilpotence::{is_topologically_nilpotent, rank_over_t, Nilpotence};
use tate_core::selftest::{run, CRITERIA};
use tate_core::torsor::{gluing_torsor, nodal_dim_torsor, CoverKind, ZTorsor};
use tate_core::whitehead::{
    interpolate_elementary, multiply_factors, whitehead_factor, xt_det, xt_eval, XtPoly,
};
use tate_core::{Error, Lattice, LaurentSeries, Scalar, ScalarRing, SeriesMatrix, WindowSpace};

use crate::{CliError, CliResult, Options, Report};

/// A literal, or the contents of the file named after `@`.
fn literal(s: &str) -> CliResult<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path)
            .map(|t| t.trim().to_string())
            .map_err(|e| CliError::Input(format!("cannot read {path}: {e}"))),
        None => Ok(s.to_string()),
    }
}

fn series(ring: ScalarRing, s: &str) -> CliResult<LaurentSeries> {
    Ok(LaurentSeries::parse(ring, &literal(s)?)?)
}

fn matrix(ring: ScalarRing, s: &str, var: char) -> CliResult<SeriesMatrix> {
    Ok(SeriesMatrix::parse_json_in(ring, &literal(s)?, var)?)
}

fn json_list(s: &str) -> CliResult<Vec<String>> {
    serde_json::from_str(&literal(s)?)
        .map_err(|e| CliError::Core(Error::Parse(format!("list literal: {e}"))))
}

fn scalars(ring: ScalarRing, s: &str) -> CliResult<Vec<Scalar>> {
    json_list(s)?
        .iter()
        .map(|x| Ok(ring.parse_scalar(x)?))
        .collect()
}

fn operator(ring: ScalarRing, s: &str) -> CliResult<SeriesMatrix> {
    let text = literal(s)?;
    if text.trim_start().starts_with('[') {
        matrix(ring, &text, 't')
    } else {
        Ok(SeriesMatrix::scalar_operator(
            &LaurentSeries::parse(ring, &text)?,
            1,
        ))
    }
}

fn base_field(o: &Options) -> CliResult<ScalarRing> {
    let ring = o.ring("q")?;
    if ring.is_dual() {
        return Err(Error::UnsupportedRing(ring).into());
    }
    Ok(ring)
}

fn strings<T: ToString>(v: &[T]) -> Vec<String> {
    v.iter().map(ToString::to_string).collect()
}

fn joined<T: ToString>(v: &[T]) -> String {
    format!("[{}]", strings(v).join(", "))
}

fn rows_in(m: &SeriesMatrix, var: char) -> Vec<Vec<String>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m.get(i, j).display_in(var)).collect())
        .collect()
}

fn show_rows(rows: &[Vec<String>]) -> String {
    serde_json::to_string(rows).expect("json")
}

pub fn residue(o: &Options, f: &str, g: &str) -> CliResult<Report> {
    let ring = o.ring("q")?;
    let (f, g) = (series(ring, f)?, series(ring, g)?);
    let coeff = LaurentSeries::residue_coeff(&f, &g)?;
    let tr = residue_trace(&f, &g, o.window)?;
    let mut r = Report::new("residue");
    r.line(format!("f = {f}"));
    r.line(format!("g = {g}"));
    r.line(format!("res(f dg) = {coeff}"));
    r.line(format!(
        "trace of commutator = {} (windows N = {}, {}: stable)",
        tr.value, tr.windows[0], tr.windows[1]
    ));
    let consistent = tr.value == &ring.from_i64(RESIDUE_ORIENTATION) * &coeff;
    r.line(format!(
        "orientation σ = {RESIDUE_ORIENTATION}: signs {}",
        if consistent {
            "consistent"
        } else {
            "inconsistent"
        }
    ));
    r.set("f", f.to_string());
    r.set("g", g.to_string());
    r.set("value", coeff.to_string());
    r.set("trace", tr.value.to_string());
    r.set("windows", json!(tr.windows));
    r.set("orientation", RESIDUE_ORIENTATION);
    r.set("consistent", consistent);
    if !consistent {
        r.violate(format!("trace {} ≠ σ·res(f dg) = {coeff}", tr.value));
    }
    Ok(r)
}

pub fn symbol(o: &Options, f: &str, g: &str) -> CliResult<Report> {
    let ring = o.ring("q")?;
    let (a, b) = (operator(ring, f)?, operator(ring, g)?);
    let p = commutator_pairing(&a, &b)?;
    let mut r = Report::new("symbol");
    r.line(format!("⟨f, g⟩ = {}", p.value));
    r.line(format!(
        "stable on ambient windows t^{}/t^{} and t^{}/t^{}",
        p.windows[0].0, p.windows[0].1, p.windows[1].0, p.windows[1].1
    ));
    r.set("value", p.value.to_string());
    r.set("windows", json!(p.windows));
    Ok(r)
}

pub fn beilinson(o: &Options, u: &str, g: &str, c: &str) -> CliResult<Report> {
    let k = base_field(o)?;
    let mut u = series(k, u)?;
    if u.is_exact() {
        u = u.truncate(o.precision);
    }
    let g = series(k, g)?;
    let c = k.parse_scalar(c)?;
    let rep = beilinson_commutator(&u, &g, &c, o.window)?;
    let mut r = Report::new("beilinson");
    r.line(format!("u = {u}"));
    r.line(format!("g = {g}"));
    r.line(format!("c = {c}"));
    r.line(format!("commutator = {}", rep.commutator));
    r.line(format!("res(u·dg) = {}", rep.residue));
    r.line(format!("res(g·du/u) = {}", rep.dlog_residue));
    r.line(format!(
        "quotient windows N = {}, {} agree; ambient windows t^{}/t^{}",
        rep.quotient_windows[0], rep.quotient_windows[1], rep.windows[0].0, rep.windows[0].1
    ));
    let dlog =
        rep.commutator.real_part().is_one() && rep.commutator.eps_part() == &c * &rep.dlog_residue;
    r.line(format!(
        "commutator = 1 + cε·res(g·du/u): {}",
        if dlog { "holds" } else { "fails" }
    ));
    let sign = rep.udg_sign(&c);
    match sign {
        Some(s) => r.line(format!("commutator = 1 + σ′·cε·res(u·dg) with σ′ = {s}")),
        None => r.violate("no sign σ′ gives commutator = 1 + σ′·cε·res(u·dg)"),
    }
    r.set("commutator", rep.commutator.to_string());
    r.set("residue", rep.residue.to_string());
    r.set("dlog_residue", rep.dlog_residue.to_string());
    r.set("quotient_windows", json!(rep.quotient_windows));
    r.set("windows", json!(rep.windows));
    r.set("dlog_formula", dlog);
    r.set("udg_sign", json!(sign));
    Ok(r)
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Demo {
    Nodal,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum Cover {
    Tree,
    Cyclic,
}

#[derive(Args, Debug)]
pub struct MonodromyArgs {
    /// Built-in torsor; the default when no other input is given.
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
    /// Torsor in the chart/overlap/triple text format.
    #[arg(long, conflicts_with_all = ["demo", "matrix"])]
    pub input: Option<String>,
    /// Glue two copies of the node by this matrix instead of by t.
    #[arg(long, conflicts_with = "demo")]
    pub matrix: Option<String>,
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub power: i64,
    /// Pull back along a cover of the nerve.
    #[arg(long, value_enum)]
    pub cover: Option<Cover>,
    /// Number of sheets of the cover.
    #[arg(long)]
    pub degree: Option<usize>,
}

pub fn monodromy(o: &Options, args: &MonodromyArgs) -> CliResult<Report> {
    let (mut t, mut desc, nodal) = if let Some(text) = &args.input {
        (ZTorsor::parse(&literal(text)?)?, "input".to_string(), false)
    } else if let Some(m) = &args.matrix {
        let m = matrix(o.ring("q")?, m, 't')?;
        (gluing_torsor(&m)?, format!("node glued by {m}"), true)
    } else {
        (nodal_dim_torsor(), "nodal".to_string(), true)
    };
    if args.power != 1 {
        t = t.power(args.power);
        desc += &format!(", power {}", args.power);
    }
    if let Some(cover) = args.cover {
        let (kind, default, name) = match cover {
            Cover::Tree => (CoverKind::TreeTruncation, 3, "tree"),
            Cover::Cyclic => (CoverKind::Cyclic, 2, "cyclic"),
        };
        let d = args.degree.unwrap_or(default);
        t = t.splitting_cover(d, kind)?;
        desc += &format!(", pulled back to the {name} cover of degree {d}");
    }
    t.validate()?;
    let class = t.class()?;
    let v = nodal_dim_torsor().class()?.value().expect("circle nerve");
    let mut r = Report::new("monodromy");
    r.line(format!("torsor: {desc}"));
    r.line(format!(
        "charts {}, overlaps {}",
        t.nerve.charts.len(),
        t.nerve.overlaps.len()
    ));
    let in_units = class.value().filter(|x| nodal && x % v == 0).map(|x| x / v);
    match (class.value(), in_units) {
        (Some(x), Some(m)) => r.line(format!(
            "class: {m} (in units of the generator v = {v}; value {x})"
        )),
        (Some(x), None) => r.line(format!("class: {x}")),
        (None, _) => r.line(format!(
            "class: {:?}",
            class.residuals.iter().map(|(_, x)| *x).collect::<Vec<_>>()
        )),
    }
    r.line(format!(
        "trivial: {}",
        if class.is_trivial() { "yes" } else { "no" }
    ));
    r.line(format!(
        "gauge certificate: chart potentials {:?}",
        class.potentials
    ));
    for (label, x) in &class.residuals {
        r.line(format!("  residual transition on {label}: {x}"));
    }
    r.line("nerve:");
    for l in t.to_text().lines() {
        r.line(format!("  {l}"));
    }
    r.set("torsor", desc);
    r.set("class", json!(in_units.or(class.value())));
    r.set("value", json!(class.value()));
    r.set("generator", v);
    r.set("trivial", class.is_trivial());
    r.set("potentials", json!(class.potentials));
    r.set("residuals", json!(class.residuals));
    r.set("nerve", t.to_text());
    Ok(r)
}

pub fn grassmann(o: &Options, n: usize, dim: Option<usize>, list: bool) -> CliResult<Report> {
    let ring = o.ring("fp:2")?;
    let half = o.window.unwrap_or(1);
    let w = WindowSpace::symmetric(n, half);
    let m = w.dim();
    let pts = window_grassmannian(ring, n, half, dim, DEFAULT_CAP)?;
    let mut by_dim: BTreeMap<usize, Vec<_>> = BTreeMap::new();
    for p in pts {
        by_dim.entry(p.dim()).or_default().push(p);
    }
    let mut r = Report::new("grassmann");
    r.line(format!(
        "window t^-{half}k[[t]]^{n} / t^{half}k[[t]]^{n} over {ring}, dimension {m}"
    ));
    let q = ring.characteristic() as u128;
    let mut dims = Vec::new();
    for (d, pts) in &by_dim {
        let rep = check_pluecker(ring, m, pts);
        let expected = gaussian_binomial(m, *d, q);
        r.line(format!(
            "d = {d}: {} points (expected {expected}), {} distinct Plücker images, {} relation failures",
            rep.points, rep.distinct_images, rep.relation_failures
        ));
        if rep.points as u128 != expected || !rep.ok() {
            r.violate(format!("d = {d}: {rep:?}, expected {expected} points"));
        }
        let mut listed = Vec::new();
        if list {
            for p in pts {
                let c = pluecker(ring, m, p);
                r.line(format!(
                    "  U = {} pluecker {}",
                    show_rows(&p.rows.iter().map(|x| strings(x)).collect::<Vec<_>>()),
                    joined(&c)
                ));
                listed.push(json!({"rows": p.rows.iter().map(|x| strings(x)).collect::<Vec<_>>(), "pluecker": strings(&c)}));
            }
        }
        dims.push(json!({
            "dim": d,
            "points": rep.points,
            "expected": expected.to_string(),
            "distinct_images": rep.distinct_images,
            "relation_failures": rep.relation_failures,
            "list": listed,
        }));
    }
    r.set("field", ring.to_string());
    r.set("n", n);
    r.set("half_width", half);
    r.set("dims", Value::Array(dims));
    Ok(r)
}

pub fn fermion(o: &Options, n: usize, subspace: Option<&str>) -> CliResult<Report> {
    let ring = o.ring("fp:2")?;
    let half = o.window.unwrap_or(1);
    let model = FiniteCliffordModel::new(ring, n, half)?;
    model.check_clifford_relations()?;
    let mut r = Report::new("fermion");
    r.line(format!(
        "window dimension {}, spinor dimension {}: Clifford relations hold",
        model.dim(),
        model.spinor_dim()
    ));
    r.set("window_dim", model.dim());
    if let Some(s) = subspace {
        let rows: Vec<Vec<String>> = serde_json::from_str(&literal(s)?)
            .map_err(|e| CliError::Core(Error::Parse(format!("subspace literal: {e}"))))?;
        let rows = rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|x| Ok(ring.parse_scalar(x)?))
                    .collect::<CliResult<Vec<_>>>()
            })
            .collect::<CliResult<Vec<_>>>()?;
        let line = model.annihilator_line(&rows)?;
        r.line(format!(
            "annihilator line: degree {}, grade {}",
            line.degree, line.grade
        ));
        r.line(format!("spinor {}", joined(&line.spinor)));
        r.line(format!("top wedge {}", joined(&line.top)));
        r.set("degree", line.degree);
        r.set("grade", line.grade);
        r.set("spinor", strings(&line.spinor));
        r.set("top", strings(&line.top));
        return Ok(r);
    }
    if ring.is_field() && ring.characteristic() > 0 {
        let mut lines = 0;
        for u in window_grassmannian(ring, n, half, None, DEFAULT_CAP)? {
            model.annihilator_line(&u.rows)?;
            lines += 1;
        }
        let lats = window_lattices(ring, &model.window, DEFAULT_CAP)?;
        let theory = DeterminantTheory::standard(ring, n)?;
        let mut isos = 0;
        for a in &lats {
            for b in &lats {
                if a.is_subset(b)? {
                    model.check_delta_iso(&theory, a, b)?;
                    isos += 1;
                }
            }
        }
        r.line(format!(
            "{lines} subspaces: each annihilator is a line equal to the top wedge"
        ));
        r.line(format!(
            "{isos} nested lattice pairs: wedge isomorphisms match delta_iso"
        ));
        r.set("subspaces", lines);
        r.set("nested_pairs", isos);
    } else {
        let vac = model.annihilator_line(&[])?;
        r.line(format!("vacuum line: grade {}", vac.grade));
        r.set("grade", vac.grade);
    }
    Ok(r)
}

pub fn smith(o: &Options, a: &str, b: Option<&str>) -> CliResult<Report> {
    let ring = o.ring("q")?;
    let am = matrix(ring, a, 't')?;
    let sf = smith_form(&am)?;
    let verified = sf.verify()?;
    let la = Lattice::new(am)?;
    let lb = match b {
        Some(b) => Lattice::new(matrix(ring, b, 't')?)?,
        None => Lattice::standard(ring, la.rank())?,
    };
    let d = lb.relative_dimension(&la)?;
    let det = lb.relative_determinant(&la)?;
    let mut r = Report::new("smith");
    r.line(format!("elementary divisors {}", joined(&sf.divisors)));
    r.line(format!("left transform {}", sf.left));
    r.line(format!("right transform {}", sf.right));
    r.line(format!(
        "transforms verified: {}",
        if verified { "yes" } else { "no" }
    ));
    r.line(format!("lattice L = {la}"));
    r.line(format!(
        "relative to L₀ = {lb}: dimension {d}, determinant {det}"
    ));
    if !verified {
        r.violate("Smith transforms do not reproduce the divisors");
    }
    r.set("divisors", json!(sf.divisors));
    r.set("left", json!(sf.left.to_string_rows()));
    r.set("right", json!(sf.right.to_string_rows()));
    r.set("verified", verified);
    r.set("relative_dimension", d);
    r.set(
        "determinant",
        json!({"grade": det.grade, "scalar": det.scalar.to_string()}),
    );
    Ok(r)
}

fn truncated_ring(o: &Options) -> CliResult<TruncatedLocalRing> {
    Ok(TruncatedLocalRing::new(base_field(o)?, o.trunc)?)
}

fn a_poly(a: &TruncatedLocalRing, s: &str) -> CliResult<APoly> {
    json_list(s)?
        .iter()
        .map(|c| Ok(a.elem(&LaurentSeries::parse_in(a.field, c, 'x')?)?))
        .collect()
}

pub fn hensel(
    o: &Options,
    g: Option<&str>,
    g0: Option<&str>,
    g1: Option<&str>,
) -> CliResult<Report> {
    let a = truncated_ring(o)?;
    let k = a.field;
    let g = a_poly(&a, g.unwrap_or(r#"["-x", "-1", "1"]"#))?;
    let g0 = scalars(k, g0.unwrap_or(r#"["0", "1"]"#))?;
    let g1 = scalars(k, g1.unwrap_or(r#"["-1", "1"]"#))?;
    let w = hensel_factor(&a, &g, &g0, &g1)?;
    let product = a.poly_mul(&w.g0, &w.g1) == w.g;
    let bezout = a.poly_add(&a.poly_mul(&w.s, &w.g0), &a.poly_mul(&w.t, &w.g1)) == vec![a.one()];
    let mut r = Report::new("hensel");
    r.line(format!("A = {k}[x]/(x^{})", a.order));
    r.line(format!("g  = {}", a.poly_display(&w.g)));
    r.line(format!("g0 = {}", a.poly_display(&w.g0)));
    r.line(format!("g1 = {}", a.poly_display(&w.g1)));
    r.line(format!("s  = {}", a.poly_display(&w.s)));
    r.line(format!("t  = {}", a.poly_display(&w.t)));
    r.line(format!("quadratic steps: {}", w.iterations));
    r.line(format!("g0·g1 = g: {}", if product { "yes" } else { "no" }));
    r.line(format!(
        "s·g0 + t·g1 = 1: {}",
        if bezout { "yes" } else { "no" }
    ));
    if !product || !bezout {
        r.violate("lifted factorization does not check");
    }
    let coeffs = |p: &[LaurentSeries]| {
        p.iter()
            .map(|c| c.to_exact().display_in('x'))
            .collect::<Vec<_>>()
    };
    r.set("truncation", a.order);
    r.set("g", coeffs(&w.g));
    r.set("g0", coeffs(&w.g0));
    r.set("g1", coeffs(&w.g1));
    r.set("s", coeffs(&w.s));
    r.set("t", coeffs(&w.t));
    r.set("iterations", w.iterations);
    Ok(r)
}

pub fn idempotent(o: &Options, pi: Option<&str>) -> CliResult<Report> {
    let a = truncated_ring(o)?;
    let pi = matrix(a.field, pi.unwrap_or(r#"[["x", "1"], ["0", "1"]]"#), 'x')?;
    let l = lift_idempotent(&a, &pi)?;
    let c = l.check(&a)?;
    let exact = |m: &SeriesMatrix| m.map(LaurentSeries::to_exact);
    let mut r = Report::new("idempotent");
    r.line(format!("A = {}[x]/(x^{})", a.field, a.order));
    r.line(format!("π  = {}", show_rows(&rows_in(&exact(&l.pi), 'x'))));
    r.line(format!(
        "π̃  = {}",
        show_rows(&rows_in(&exact(&l.pi_tilde), 'x'))
    ));
    r.line(format!("f  = {}", a.poly_display(&l.f)));
    r.line(format!("e  = {}", a.poly_display(&l.e)));
    r.line(format!("π̃² = π̃: {}", yes(c.idempotent)));
    r.line(format!("π̃π = ππ̃: {}", yes(c.commutes)));
    r.line(format!("π̃ ≡ π mod x: {}", yes(c.lifts_residue)));
    r.line(format!("rank of π̃ mod x: {}", c.residue_rank));
    r.line("im(π̃ − π) in a chosen finitely generated submodule: not checked");
    if !c.ok() {
        r.violate("lifted matrix fails the idempotent checks");
    }
    r.set("pi", json!(rows_in(&exact(&l.pi), 'x')));
    r.set("pi_tilde", json!(rows_in(&exact(&l.pi_tilde), 'x')));
    r.set("e", a.poly_display(&l.e));
    r.set("checks", json!(c));
    Ok(r)
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

pub fn whitehead(o: &Options) -> CliResult<Report> {
    let k = base_field(o)?;
    let factors = whitehead_factor(k);
    let product = multiply_factors(k, &factors)?;
    let target = SeriesMatrix::monomial_diagonal(k, &[1, -1]);
    let a = interpolate_elementary(k);
    let a0 = xt_eval(&a, &k.zero());
    let a1 = xt_eval(&a, &k.one());
    let det = xt_det(&a);
    let det_one = det.add(&XtPoly::one(k).neg()).is_zero();
    let gluing = gluing_torsor(&product)?.class()?;
    let mut r = Report::new("whitehead");
    let names: Vec<String> = factors
        .iter()
        .map(|f| format!("{}({})", if f.row > f.col { "L" } else { "U" }, f.entry))
        .collect();
    r.line(format!("diag(t, t^-1) = {}", names.join(" · ")));
    r.line(format!(
        "product = {product}: {}",
        if product == target {
            "matches"
        } else {
            "differs"
        }
    ));
    r.line(format!("A(0, t) = {a0}"));
    r.line(format!("A(1, t) = {a1}"));
    r.line(format!("det A(x, t) = 1: {}", yes(det_one)));
    r.line(format!(
        "gluing class of the product: {}",
        gluing.value().unwrap_or(0)
    ));
    if product != target {
        r.violate("factors do not multiply back to diag(t, t^-1)");
    }
    if a0 != SeriesMatrix::identity(k, 2) || a1 != target || !det_one {
        r.violate("interpolation endpoints or determinant are wrong");
    }
    r.set(
        "factors",
        json!(factors
            .iter()
            .map(|f| json!({"row": f.row, "col": f.col, "entry": f.entry.to_string()}))
            .collect::<Vec<_>>()),
    );
    r.set("product", json!(product.to_string_rows()));
    r.set("a0", json!(a0.to_string_rows()));
    r.set("a1", json!(a1.to_string_rows()));
    r.set("det_is_one", det_one);
    r.set("gluing_class", json!(gluing.value()));
    Ok(r)
}

pub fn rank(o: &Options, t: &str) -> CliResult<Report> {
    let ring = o.ring("q")?;
    let t = matrix(ring, t, 't')?;
    let verdict = is_topologically_nilpotent(&t, 16)?;
    let mut r = Report::new("rank");
    r.line(format!("topologically nilpotent: {verdict}"));
    r.set("nilpotent", json!(verdict));
    if verdict == Nilpotence::Yes {
        let cert = rank_over_t(&t, 64)?;
        r.line(format!("stable lattice L = {}", cert.lattice));
        r.line(format!(
            "dim L/TL = {} ({} iterations)",
            cert.rank, cert.iterations
        ));
        r.set("rank", cert.rank);
        r.set("lattice", cert.lattice.to_string());
    }
    Ok(r)
}

pub fn selftest(o: &Options, only: &[u8]) -> CliResult<Report> {
    let ids: Vec<u8> = if only.is_empty() {
        CRITERIA.iter().map(|c| c.0).collect()
    } else {
        only.to_vec()
    };
    let mut r = Report::new("selftest");
    let mut failed = Vec::new();
    let mut outcomes = Vec::new();
    for id in ids {
        let out = run(id, o.seed);
        r.line(format!(
            "criterion {} [{}]: {} ({})",
            out.id,
            out.name,
            if out.passed { "PASS" } else { "FAIL" },
            out.detail
        ));
        if !out.passed {
            failed.push(out.id);
        }
        outcomes.push(out);
    }
    r.set("seed", o.seed);
    r.set("outcomes", json!(outcomes));
    if !failed.is_empty() {
        r.violate(format!("criteria {failed:?} failed"));
    }
    Ok(r)
}
