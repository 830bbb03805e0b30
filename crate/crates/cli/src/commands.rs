use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use serde_json::{json, Value};

use liesym::algebra::{structure_constants, LieAlgebraPresentation};
use liesym::jet::{make_hpz, EvolutionPDE};
use liesym::kernel::{Dep, Expr, IndVar, ParameterBinding, Parser};
use liesym::prolong::{residuals, SymmetryFixture, VectorField};
use liesym::reduction::{
    compare_with_reference, reduce_by_generator, reduce_time, reference_stationary, ReferenceReduction,
};
use liesym::registry::{lookup, Equation};
use liesym::solver::{profile_basis, solve_determining, Ansatz};

use crate::output::{field_json, indent, Failure, Outcome};

pub const REPORT_BINDING: &str = "R=5,S=4,V=1,W=1";

const EXCLUDED: &str = "solution symmetries phi d/du, with phi any solution of the linear equation, \
form an infinite-dimensional abelian ideal and are not counted";

type Run<T> = Result<T, Failure>;

fn parse_binding(params: Option<&str>) -> Run<Option<ParameterBinding>> {
    params.map(|p| p.parse::<ParameterBinding>().map_err(Failure::from)).transpose()
}

fn binding_json(b: Option<&ParameterBinding>) -> Value {
    match b {
        Some(b) if !b.is_empty() => serde_json::to_value(b).expect("binding serializes"),
        _ => Value::String("symbolic".into()),
    }
}

fn binding_text(b: Option<&ParameterBinding>) -> String {
    match b {
        Some(b) if !b.is_empty() => b.to_string(),
        _ => "symbolic".into(),
    }
}

fn evolution(name: Option<&str>) -> Run<(String, EvolutionPDE)> {
    let name = name.ok_or_else(|| Failure::Usage("missing --equation".into()))?;
    match lookup(name)? {
        Equation::Evolution(p) => Ok((name.to_string(), p)),
        Equation::Stationary(_) => Err(Failure::Usage(format!("`{name}` is not an evolution equation"))),
    }
}

fn check_fixture(fixture: &str) -> Run<()> {
    match fixture {
        "paper" | "reference" => Ok(()),
        other => Err(Failure::Usage(format!("unknown fixture `{other}` (expected `reference` or `paper`)"))),
    }
}

fn bind_field(f: &VectorField, b: Option<&ParameterBinding>) -> Run<VectorField> {
    match b {
        Some(b) => Ok(f.map_coefficients(|c| b.apply(c))?),
        None => Ok(f.clone()),
    }
}

fn fixture_fields(equation: &str, b: Option<&ParameterBinding>) -> Run<Vec<(String, VectorField)>> {
    if equation != "hpz" {
        return Err(Failure::Usage("the reference generators belong to hpz".into()));
    }
    SymmetryFixture::reference()
        .generators
        .iter()
        .map(|(n, f)| Ok((n.clone(), bind_field(f, b)?)))
        .collect()
}

pub fn verify(equation: Option<&str>, fixture: Option<&str>, generators: &[String], params: Option<&str>) -> Run<Outcome> {
    if fixture.is_none() && generators.is_empty() {
        return Err(Failure::Usage("give --fixture or at least one --generator".into()));
    }
    let (name, pde) = evolution(equation)?;
    let binding = parse_binding(params)?;
    let mut fields = Vec::new();
    if let Some(fx) = fixture {
        check_fixture(fx)?;
        fields.extend(fixture_fields(&name, binding.as_ref())?);
    }
    let parser = Parser::new();
    for (i, g) in generators.iter().enumerate() {
        let f = VectorField::parse(g, pde.vars(), pde.dep(), &parser)?;
        fields.push((format!("generator{}", i + 1), bind_field(&f, binding.as_ref())?));
    }
    let pde = match &binding {
        Some(b) => pde.with_binding(b)?,
        None => pde,
    };
    verify_fields(&pde, &fields, binding.as_ref(), fixture.is_some())
}

fn verify_fields(
    pde: &EvolutionPDE,
    fields: &[(String, VectorField)],
    binding: Option<&ParameterBinding>,
    with_alternatives: bool,
) -> Run<Outcome> {
    let plain: Vec<VectorField> = fields.iter().map(|(_, f)| f.clone()).collect();
    let res: Vec<Expr> = residuals(&plain, pde).into_iter().collect::<Result<_, _>>()?;
    let mut text = format!("equation: {pde}\nbinding: {}\n", binding_text(binding));
    let mut entries = Vec::new();
    let mut nonzero = 0;
    for ((name, f), r) in fields.iter().zip(&res) {
        let zero = r.is_zero();
        nonzero += usize::from(!zero);
        writeln!(text, "{name}: residual = {r}").unwrap();
        entries.push(json!({"name": name, "field": field_json(f), "residual": r.to_string(), "zero": zero}));
    }
    let mut report = json!({
        "equation": pde.to_string(),
        "binding": binding_json(binding),
        "generators": entries,
        "all_zero": nonzero == 0,
    });
    if with_alternatives {
        let alts = SymmetryFixture::reference().alternatives;
        let alt_fields: Vec<VectorField> =
            alts.iter().map(|(_, f)| bind_field(f, binding)).collect::<Run<_>>()?;
        let alt_res: Vec<Expr> = residuals(&alt_fields, pde).into_iter().collect::<Result<_, _>>()?;
        let mut rejected = Vec::new();
        for ((name, _), r) in alts.iter().zip(&alt_res) {
            writeln!(text, "rejected reading, {name}: residual {}", if r.is_zero() { "zero" } else { "nonzero" })
                .unwrap();
            rejected.push(json!({"name": name, "residual_zero": r.is_zero()}));
        }
        report["rejected_readings"] = Value::Array(rejected);
    }
    if nonzero == 0 {
        writeln!(text, "result: all {} residuals vanish", fields.len()).unwrap();
    } else {
        writeln!(text, "result: {nonzero} of {} residuals nonzero", fields.len()).unwrap();
    }
    Ok(Outcome { json: report, text, code: if nonzero == 0 { 0 } else { 1 } })
}

pub fn find(equation: Option<&str>, params: Option<&str>, degree_cap: usize) -> Run<Outcome> {
    let (_, pde) = evolution(equation)?;
    let binding = parse_binding(params)?.unwrap_or_else(|| ParameterBinding::new([]).expect("empty binding"));
    find_for(&pde, &binding, degree_cap)
}

fn find_for(pde: &EvolutionPDE, binding: &ParameterBinding, degree_cap: usize) -> Run<Outcome> {
    let ansatz = Ansatz { degree_cap, ..Ansatz::default() };
    let basis = solve_determining(pde, &ansatz, binding)?;
    let mut text = format!(
        "equation: {}\nbinding: {}\ndimension: {}\n",
        basis.equation,
        binding_text(Some(binding)),
        basis.dimension()
    );
    for (i, g) in basis.generators.iter().enumerate() {
        writeln!(text, "  X{}: {g}", i + 1).unwrap();
    }
    let all_checked = basis.residual_checks.iter().all(|&c| c);
    writeln!(text, "residual checks: {}", if all_checked { "all zero" } else { "FAILED" }).unwrap();
    let exponents: Vec<Value> = basis
        .exponents
        .iter()
        .map(|e| json!({"value": e.value.to_string(), "multiplicity": e.multiplicity, "solutions": e.solutions}))
        .collect();
    let mut report = json!({
        "equation": basis.equation.to_string(),
        "binding": binding_json(Some(binding)),
        "dimension": basis.dimension(),
        "jet_dimension": basis.jet_dimension,
        "characteristic_polynomial": basis.characteristic_polynomial,
        "exponents": exponents,
        "generators": basis.generators.iter().map(field_json).collect::<Vec<_>>(),
        "residual_checks": basis.residual_checks,
        "excluded": EXCLUDED,
    });
    if pde.spatial_vars().len() == 1 {
        let p = profile_basis(&basis.generators)?;
        let all_match = p.generators.iter().all(|g| g.matches());
        writeln!(
            text,
            "profile: a(t) order {}, b(t) order {}, f order {}; {} generators with d/dt, {} without; \
             xi^t = a(t) and xi^r - a'(t) r/2 free of r: {}",
            p.a_order,
            p.b_order,
            p.f_order,
            p.with_time,
            p.without_time,
            if all_match { "yes" } else { "no" }
        )
        .unwrap();
        report["profile"] = json!({
            "a_order": p.a_order,
            "b_order": p.b_order,
            "f_order": p.f_order,
            "with_time": p.with_time,
            "without_time": p.without_time,
            "all_match": all_match,
        });
    }
    Ok(Outcome { json: report, text, code: if all_checked { 0 } else { 1 } })
}

fn bound_reference(r: &ReferenceReduction, b: Option<&ParameterBinding>) -> Run<ReferenceReduction> {
    let mut r = r.clone();
    if let Some(b) = b {
        r.invariant = b.apply(&r.invariant)?;
        r.multiplier_exponent = b.apply(&r.multiplier_exponent)?;
        r.equation = b.apply(&r.equation)?;
    }
    Ok(r)
}

pub fn reduce(equation: Option<&str>, generator: &str, params: Option<&str>, time_multiplier: Option<&str>) -> Run<Outcome> {
    let (name, pde) = evolution(equation)?;
    let binding = parse_binding(params)?;
    if generator == "time" {
        let default = if name == "hpz" { "R" } else { "0" };
        let c = Parser::new().parse(time_multiplier.unwrap_or(default))?;
        return reduce_time_for(&name, &pde, &c, binding.as_ref());
    }
    if time_multiplier.is_some() {
        return Err(Failure::Usage("--time-multiplier only applies to `--generator time`".into()));
    }
    if name != "hpz" {
        return Err(Failure::Usage("reductions by delta3..delta6 need `--equation hpz`".into()));
    }
    reduce_by(generator, binding.as_ref())
}

fn reduce_time_for(name: &str, pde: &EvolutionPDE, c: &Expr, binding: Option<&ParameterBinding>) -> Run<Outcome> {
    let (pde, c) = match binding {
        Some(b) => (pde.with_binding(b)?, b.apply(c)?),
        None => (pde.clone(), c.clone()),
    };
    let st = reduce_time(&pde, &c)?;
    let exponent = &(&Expr::rational(1, 2) * &c) * &Expr::var(IndVar::T);
    let mut text = format!(
        "generator: 2 d/dt + ({c}) u d/du\nsubstitution: u = exp({exponent}) z\nreduced equation: {st}\n"
    );
    let mut report = json!({
        "equation": pde.to_string(),
        "generator": "time",
        "binding": binding_json(binding),
        "multiplier_exponent": exponent.to_string(),
        "reduced_equation": st.to_string(),
        "certificate": "autonomous",
    });
    if name == "hpz" && c == Expr::param(liesym::kernel::Param::R) {
        let agrees = (&st.lhs - &reference_stationary()).is_zero();
        writeln!(text, "reference form: {}", if agrees { "matches exactly" } else { "differs" }).unwrap();
        report["matches_reference"] = Value::Bool(agrees);
    }
    Ok(Outcome { json: report, text, code: 0 })
}

fn reduce_by(generator: &str, binding: Option<&ParameterBinding>) -> Run<Outcome> {
    let (reduced, reference) = reduce_by_generator(&make_hpz(), generator, binding)?;
    let reference = bound_reference(&reference, binding)?;
    let rows = compare_with_reference(&reduced, &reference);
    let agrees = rows.iter().all(|r| r.agrees);
    let q = reduced.map.multiplier_exponent();
    let factor = reference.factor();
    let reference_form = &factor * &reduced.lhs();
    let substitution = if q.is_zero() { "u = z(t, r)".to_string() } else { format!("u = z(t, r) exp({q})") };
    let mut text = format!(
        "generator: {generator}\nbinding: {}\ninvariant: r = {}\nsubstitution: {substitution}\n\
         reduced equation: {}\ncertificate: no residual x or y\nwith factor {factor}: {reference_form} = 0\n",
        binding_text(binding),
        reduced.map.invariant(),
        reduced.pde,
    );
    if agrees {
        writeln!(text, "reference form: matches term by term").unwrap();
    } else {
        for r in rows.iter().filter(|r| !r.agrees) {
            writeln!(text, "mismatch in {}: derived {} vs reference {}", r.term, r.derived, r.expected).unwrap();
        }
    }
    let comparison: Vec<Value> = rows
        .iter()
        .map(|r| json!({"term": r.term, "derived": r.derived.to_string(), "reference": r.expected.to_string(), "agrees": r.agrees}))
        .collect();
    let report = json!({
        "generator": generator,
        "registry_name": reference.registry_name,
        "binding": binding_json(binding),
        "invariant": reduced.map.invariant().to_string(),
        "multiplier_exponent": q.to_string(),
        "reduced_equation": reduced.pde.to_string(),
        "normalization_factor": reduced.raw_time_coefficient.to_string(),
        "reference_factor": factor.to_string(),
        "certificate": "no-residual-xy",
        "comparison": comparison,
        "matches_reference": agrees,
    });
    Ok(Outcome { json: report, text, code: 0 })
}

#[derive(Debug, Deserialize)]
struct BasisFile {
    variables: Vec<String>,
    dependent: String,
    generators: Vec<NamedField>,
    #[serde(default)]
    params: Option<String>,
}

#[derive(Debug, Deserialize)]
struct NamedField {
    name: String,
    field: String,
}

fn read_basis(path: &Path) -> Run<(String, Vec<(String, VectorField)>, Option<ParameterBinding>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: BasisFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Usage(format!("{} is not a basis file: {e}", path.display())))?;
    let vars: Vec<IndVar> = file
        .variables
        .iter()
        .map(|v| {
            let mut cs = v.chars();
            match (cs.next().and_then(IndVar::from_letter), cs.next()) {
                (Some(iv), None) => Ok(iv),
                _ => Err(Failure::Usage(format!("unknown variable `{v}`"))),
            }
        })
        .collect::<Run<_>>()?;
    let dep = match file.dependent.as_str() {
        "u" => Dep::U,
        "z" => Dep::Z,
        other => return Err(Failure::Usage(format!("unknown dependent variable `{other}`"))),
    };
    let parser = Parser::new();
    let fields = file
        .generators
        .iter()
        .map(|g| Ok((g.name.clone(), VectorField::parse(&g.field, &vars, dep, &parser)?)))
        .collect::<Run<_>>()?;
    let binding = parse_binding(file.params.as_deref())?;
    Ok((path.display().to_string(), fields, binding))
}

pub fn classify(
    equation: Option<&str>,
    fixture: Option<&str>,
    basis: Option<&Path>,
    params: Option<&str>,
    degree_cap: usize,
) -> Run<Outcome> {
    let binding = parse_binding(params)?;
    if let Some(path) = basis {
        let (source, fields, file_binding) = read_basis(path)?;
        let binding = binding.or(file_binding);
        let fields = fields
            .iter()
            .map(|(n, f)| Ok((n.clone(), bind_field(f, binding.as_ref())?)))
            .collect::<Run<Vec<_>>>()?;
        return classify_fields(&source, &fields);
    }
    let (name, pde) = evolution(equation)?;
    if let Some(fx) = fixture {
        check_fixture(fx)?;
        let fields = fixture_fields(&name, binding.as_ref())?;
        return classify_fields(&format!("{name} reference generators"), &fields);
    }
    let binding = binding.unwrap_or_else(|| ParameterBinding::new([]).expect("empty binding"));
    classify_found(&name, &pde, &binding, degree_cap)
}

fn classify_found(name: &str, pde: &EvolutionPDE, binding: &ParameterBinding, degree_cap: usize) -> Run<Outcome> {
    let ansatz = Ansatz { degree_cap, ..Ansatz::default() };
    let found = solve_determining(pde, &ansatz, binding)?;
    let fields: Vec<(String, VectorField)> = found
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| (format!("X{}", i + 1), g.clone()))
        .collect();
    classify_fields(&format!("{name} solver basis at {}", binding_text(Some(binding))), &fields)
}

fn classify_fields(source: &str, fields: &[(String, VectorField)]) -> Run<Outcome> {
    let plain: Vec<VectorField> = fields.iter().map(|(_, f)| f.clone()).collect();
    let p: LieAlgebraPresentation = structure_constants(&plain)?;
    let violations = p.constants.jacobi_violations();
    if let Some((i, j, k)) = violations.first() {
        return Err(Failure::Math(format!("Jacobi identity fails on ({}, {}, {})", i + 1, j + 1, k + 1)));
    }
    let verdict = p.classify();
    let ideal_fields: Vec<VectorField> = verdict.ideal.iter().map(|v| p.field_of(v)).collect::<Result<_, _>>()?;
    let complement_fields: Vec<VectorField> =
        verdict.complement.iter().map(|v| p.field_of(v)).collect::<Result<_, _>>()?;
    let mut text = format!("{}\nsource: {source}\n", verdict.kind.describe(verdict.dimension));
    if let Some(l) = &verdict.mubarakzyanov_label {
        let alt = if verdict.alternative_labels.is_empty() {
            String::new()
        } else {
            format!(" (also written {})", verdict.alternative_labels.join(", "))
        };
        writeln!(text, "label: {l}{alt}").unwrap();
    }
    writeln!(
        text,
        "center dim {}, derived dim {}, derived series {:?}",
        verdict.center_dim, verdict.derived_dim, verdict.derived_series
    )
    .unwrap();
    for (i, (n, _)) in fields.iter().enumerate() {
        writeln!(text, "  e{} = {n}", i + 1).unwrap();
    }
    for b in &verdict.structure_constants {
        let terms: Vec<String> = b
            .bracket
            .iter()
            .enumerate()
            .filter(|(_, c)| c.as_str() != "0")
            .map(|(k, c)| format!("({c}) e{}", k + 1))
            .collect();
        writeln!(text, "  [e{}, e{}] = {}", b.i, b.j, terms.join(" + ")).unwrap();
    }
    if !ideal_fields.is_empty() {
        writeln!(text, "ideal:").unwrap();
        text.push_str(&indent(&ideal_fields.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n")));
        writeln!(text, "complement:").unwrap();
        text.push_str(&indent(&complement_fields.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("\n")));
    }
    for n in &verdict.notes {
        writeln!(text, "note: {n}").unwrap();
    }
    let mut report = serde_json::to_value(&verdict).expect("verdict serializes");
    report["source"] = Value::String(source.to_string());
    report["basis"] = fields.iter().map(|(n, f)| json!({"name": n, "field": field_json(f)})).collect();
    report["ideal_fields"] = ideal_fields.iter().map(field_json).collect();
    report["complement_fields"] = complement_fields.iter().map(field_json).collect();
    report["jacobi"] = Value::String("holds".into());
    Ok(Outcome { json: report, text, code: 0 })
}

/// verify, find, four reductions plus the time reduction, symmetry counts
/// of the reduced equations, a heat control and three classifications.
pub fn report(params: &str) -> Run<Outcome> {
    let binding: ParameterBinding = params.parse()?;
    binding.require_discovery()?;
    binding.require_nonsingular()?;
    let hpz = make_hpz();
    let fixture = fixture_fields("hpz", None)?;
    let cap = liesym::solver::DEFAULT_DEGREE_CAP;
    let reduced_names = ["reduced-3.2", "reduced-3.5", "reduced-3.7", "reduced-3.9"];
    let generators = ["delta3", "delta4", "delta5", "delta6"];

    type Job<'a> = Box<dyn Fn() -> Run<Outcome> + Send + Sync + 'a>;
    let mut jobs: Vec<(String, Job)> = vec![
        ("verify".into(), Box::new(|| verify_fields(&hpz, &fixture, None, true))),
        ("find".into(), Box::new(|| find_for(&hpz, &binding, cap))),
        (
            "heat_control".into(),
            Box::new(|| find_for(&liesym::jet::make_heat(), &ParameterBinding::new([])?, cap)),
        ),
    ];
    for g in generators {
        jobs.push((format!("reduce {g}"), Box::new(move || reduce_by(g, None))));
    }
    jobs.push((
        "reduce time".into(),
        Box::new(|| reduce_time_for("hpz", &hpz, &Expr::param(liesym::kernel::Param::R), None)),
    ));
    for n in reduced_names {
        let b = &binding;
        jobs.push((
            format!("find {n}"),
            Box::new(move || {
                let (_, pde) = evolution(Some(n))?;
                find_for(&pde, b, cap)
            }),
        ));
    }
    jobs.push(("classify W5".into(), Box::new(|| classify_fields("hpz reference generators delta2..delta6", &fixture[1..]))));
    jobs.push(("classify full".into(), Box::new(|| classify_fields("hpz reference generators delta1..delta6", &fixture))));
    jobs.push((
        "classify reduced-3.2".into(),
        Box::new(|| {
            let (_, pde) = evolution(Some("reduced-3.2"))?;
            classify_found("reduced-3.2", &pde, &binding, cap)
        }),
    ));

    let results: Vec<Run<Outcome>> = std::thread::scope(|s| {
        let handles: Vec<_> = jobs.iter().map(|(_, job)| s.spawn(job)).collect();
        handles.into_iter().map(|h| h.join().expect("report job panicked")).collect()
    });
    let mut outcomes = Vec::with_capacity(results.len());
    for ((label, _), r) in jobs.iter().zip(results) {
        outcomes.push((label.clone(), r.map_err(|f| Failure::Math(format!("{label}: {}", f.message())))?));
    }
    let get = |label: &str| outcomes.iter().find(|(l, _)| l == label).map(|(_, o)| o).expect("job ran");

    let mut text = format!("binding for discovery: {binding}\n");
    for (label, o) in &outcomes {
        writeln!(text, "\n== {label} ==").unwrap();
        text.push_str(&o.text);
    }
    writeln!(text, "\nexcluded: {EXCLUDED}").unwrap();
    let code = outcomes.iter().map(|(_, o)| o.code).max().unwrap_or(0);
    let report = json!({
        "binding": binding_json(Some(&binding)),
        "verify": get("verify").json,
        "find": get("find").json,
        "heat_control": get("heat_control").json,
        "reductions": generators.iter().map(|g| get(&format!("reduce {g}")).json.clone()).collect::<Vec<_>>(),
        "time_reduction": get("reduce time").json,
        "reduced_symmetries": reduced_names
            .iter()
            .map(|n| {
                let o = get(&format!("find {n}"));
                json!({"equation": n, "dimension": o.json["dimension"], "profile": o.json["profile"]})
            })
            .collect::<Vec<_>>(),
        "classification": {
            "w5": get("classify W5").json,
            "full": get("classify full").json,
            "reduced_3_2": get("classify reduced-3.2").json,
        },
        "excluded": EXCLUDED,
    });
    Ok(Outcome { json: report, text, code })
}
