use crate::report::{interior, Report};
use crate::{Command, Common, Outcome, PurityArg};
use anyhow::{anyhow, bail, Context, Result};
use polydomain::berezin::{
    berezin_kernel_on, berezin_transform, choose_degree, choose_degree_default, contraction_levels, eval_series_on_model,
    hardy_norm_estimate, intertwine_residual, is_nondecreasing, radius_check, tail_bound, von_neumann_check,
};
use polydomain::charfn::{admits_charfn, char_function, model_space, pure_dilation, pure_iff_inner};
use polydomain::defect::{default_r_grid, defect_map, delta_ineq, is_pure, membership, radial_scan, wold_split};
use polydomain::ensemble::{generate_random_member, random_poly_pairs, Purity};
use polydomain::factorization::{
    beurling_condition, beurling_factorize, default_reserve, invariant_subspace_tests, reducing_characterize, FactorizeOptions,
};
use polydomain::fock::{compress, LinOp, Space};
use polydomain::io::{self, LinOpFile};
use polydomain::linalg::{herm_norm, identity, op_norm, projection_defects};
use polydomain::{Matrix, Model, Spec, Tuple};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

fn read(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_spec(c: &Common) -> Result<Spec> {
    let p = c.spec.as_ref().ok_or_else(|| anyhow!("--spec is required"))?;
    io::parse_spec(&read(p)?).with_context(|| format!("spec {}", p.display()))
}

fn load_tuple(c: &Common, spec: &Spec) -> Result<Tuple> {
    let p = c.tuple.as_ref().ok_or_else(|| anyhow!("--tuple is required"))?;
    let t = io::parse_tuple(&read(p)?, spec).with_context(|| format!("tuple {}", p.display()))?;
    t.check_commutation(c.comm_tol)?;
    Ok(t)
}

fn load_linop(p: &std::path::Path) -> Result<LinOp<f64>> {
    io::parse_linop(&read(p)?).with_context(|| format!("operator {}", p.display()))
}

/// Explicit degrees, or the tail-bounded choice when a tuple is available.
fn degrees(c: &Common, spec: &Spec, tuple: Option<&Tuple>) -> Result<Vec<usize>> {
    match c.degree.as_deref() {
        Some(s) if s != "auto" => {
            let v: Vec<usize> = s
                .split(',')
                .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad degree {x:?}")))
                .collect::<Result<_>>()?;
            match v.len() {
                1 => Ok(vec![v[0]; spec.k()]),
                n if n == spec.k() => Ok(v),
                n => bail!("{n} degrees given for k={}", spec.k()),
            }
        }
        _ => match tuple {
            Some(t) => choose_degree_default(t, c.tol).context("automatic degree failed; pass --degree"),
            None => bail!("--degree is required for this command"),
        },
    }
}

/// Basis size above which automatic degrees are refused for dense factorizations.
const DENSE_DIM_CAP: usize = 256;

/// Like `degrees`, but the automatic choice stays under `DENSE_DIM_CAP`,
/// loosening the tail target by decades when the requested one does not fit.
fn dense_degrees(c: &Common, spec: &Spec, t: &Tuple, r: &mut Report) -> Result<Vec<usize>> {
    if c.degree.as_deref().is_some_and(|s| s != "auto") {
        return degrees(c, spec, Some(t));
    }
    let mut target = c.tol;
    loop {
        match choose_degree(t, target, DENSE_DIM_CAP) {
            Ok(d) => {
                if target > c.tol {
                    r.config("auto_degree_tail_target", target);
                    r.entry("auto_degree_tail", tail_bound(t, &d).unwrap_or(f64::INFINITY), c.tol, None, "full", false);
                }
                return Ok(d);
            }
            Err(polydomain::Error::DimensionCap { .. }) if target < 1e-2 => target *= 10.0,
            Err(e) => return Err(e).context("automatic degree failed; pass --degree"),
        }
    }
}

fn require_reserve(d: &[usize], reserve: usize) -> Result<()> {
    if d.iter().any(|&di| di < reserve) {
        bail!("degree {d:?} is below the required interior reserve {reserve}");
    }
    Ok(())
}

fn coeff_dim(op: &LinOp<f64>, model: &Model) -> Result<usize> {
    let n = model.dim();
    let m = &op.matrix;
    if m.nrows() != m.ncols() || m.nrows() % n != 0 {
        bail!("operator is {}x{}, not square over a fock space of dimension {n}", m.nrows(), m.ncols());
    }
    Ok(m.nrows() / n)
}

fn linop(m: &Matrix, domain: Space, codomain: Space) -> LinOpFile {
    LinOpFile { rows: m.nrows(), cols: m.ncols(), domain: Some(domain), codomain: Some(codomain), data: io::MatrixData::from_matrix(m) }
}

fn opts(c: &Common, reserve: usize) -> FactorizeOptions<f64> {
    FactorizeOptions { tol: c.tol, eps_rank: c.eps_rank, reserve, seed: Some(c.seed) }
}

fn max2(v: &[Vec<f64>]) -> f64 {
    v.iter().flatten().copied().fold(0.0, f64::max)
}

pub fn run(cmd: &Command, c: &Common) -> Result<Outcome> {
    if c.tol <= 0.0 || c.eps_rank <= 0.0 || c.residual_tol <= 0.0 {
        bail!("tolerances must be positive");
    }
    let name = serde_json::to_value(cmd)?;
    let label = match &name {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Object(o) => o.keys().next().cloned().unwrap_or_default(),
        _ => String::new(),
    };
    let mut r = Report::new(&label);
    r.config("common", c);
    r.config("command", &name);
    match cmd {
        Command::Check => check(c, &mut r)?,
        Command::Model => model(c, &mut r)?,
        Command::Kernel => kernel(c, &mut r)?,
        Command::Berezin { g, series } => berezin(c, g.as_deref(), series.as_deref(), &mut r)?,
        Command::Vn { pairs, samples, max_deg } => vn(c, pairs.as_deref(), *samples, *max_deg, &mut r)?,
        Command::Hnorm { series } => hnorm(c, series, &mut r)?,
        Command::Beurling { y } => beurling(c, y, &mut r)?,
        Command::Subspace { p } => subspace(c, p, &mut r)?,
        Command::Charfn => charfn(c, &mut r)?,
        Command::ModelSpace => model_space_cmd(c, &mut r)?,
        Command::Dilate { dil_deg } => dilate(c, *dil_deg, &mut r)?,
        Command::Wold => wold(c, &mut r)?,
        Command::Generate { dim, purity } => {
            let spec = load_spec(c)?;
            let p = match purity {
                PurityArg::Pure => Purity::Pure,
                PurityArg::Boundary => Purity::Boundary,
            };
            let t = generate_random_member(&spec, *dim, p, c.seed)?;
            return Ok(Outcome::Raw(io::tuple_to_json(&t)?));
        }
    }
    Ok(Outcome::Report(r))
}

fn check(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let comm_tol = c.comm_tol.unwrap_or_else(|| t.default_comm_tol());
    r.entry("commutator", t.commutator_defect(), comm_tol, None, "full", true);
    let cert = membership(&t, c.tol, c.comm_tol)?;
    for (k, w) in &cert.witnesses {
        r.entry(&format!("psd {k}"), -w.min_eig, -w.threshold, None, "full", false);
    }
    let agree = cert.checks.get("definitions_agree").copied().unwrap_or(true);
    r.entry("definitions_agree", if agree { 0.0 } else { 1.0 }, 0.0, None, "full", true);
    r.verdict("member", cert.verdict);
    r.verdict("checks", &cert.checks);
    let (ineq, worst) = delta_ineq(&t, c.tol);
    r.verdict("delta_ineq", ineq);
    r.output("delta_ineq_min_eig", worst);
    let purity = is_pure(&t, c.tol, 10_000);
    r.verdict("pure", purity.pure);
    let grid = if c.radius_grid.is_empty() { default_r_grid() } else { c.radius_grid.clone() };
    let scan: Vec<_> = radial_scan(&t, &grid, c.tol).into_iter().map(|(x, cert)| json!({"r": x, "member": cert.verdict})).collect();
    r.output("radial_scan", scan);
    r.output("contraction_levels", contraction_levels(&t));
    Ok(())
}

fn model(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let d = degrees(c, &spec, None)?;
    let model = Model::new(&spec, &d)?;
    let reserve = default_reserve(&model);
    require_reserve(&d, reserve)?;
    let n = model.dim();
    let delta = defect_map(&model.action(1), &identity(n), &spec.m);
    let mut target = Matrix::zeros(n, n);
    target[(0, 0)] = polydomain::scalar::c64(1.0, 0.0);
    let rows = model.basis.interior_indices(reserve);
    let resid = op_norm(&compress(&(delta - target), &rows, &rows));
    r.entry("universal_identity", resid, c.tol, Some(reserve), &interior(reserve), true);
    r.output("dim", n);
    r.output("degrees", &d);
    let basis: Vec<_> = (0..n).map(|i| model.basis.multiword(i)).collect();
    r.output("basis", basis);
    let mut shifts = Vec::new();
    for i in 0..spec.k() {
        for j in 0..spec.n[i] {
            let op = model.left_shift(i, j).to_linop(&model.basis);
            shifts.push(json!({"group": i + 1, "generator": j + 1, "op": LinOpFile::from_linop(&op)}));
        }
    }
    r.output("W", shifts);
    let tables: Vec<serde_json::Value> = if c.exact {
        spec.to_rational()
            .b_tables(&d)
            .iter()
            .map(|t| t.words().into_iter().zip(&t.values).map(|(w, v)| json!({"word": w, "b": v.to_string()})).collect())
            .collect()
    } else {
        spec.b_tables(&d)
            .iter()
            .map(|t| t.words().into_iter().zip(&t.values).map(|(w, v)| json!({"word": w, "b": v})).collect())
            .collect()
    };
    r.output("b_tables", tables);
    Ok(())
}

fn kernel(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let d = degrees(c, &spec, Some(&t))?;
    let model = Model::new(&spec, &d)?;
    let k = berezin_kernel_on(&t, &model, c.tol)?;
    let inter = max2(&intertwine_residual(&t, &k, &model));
    r.entry("intertwining", inter, c.residual_tol, Some(1), &interior(1), true);
    let tail = tail_bound(&t, &d);
    let dev = op_norm(&(k.gram() - identity::<f64>(t.dim)));
    r.entry("isometry_defect", dev, tail.unwrap_or(c.tol).max(c.tol), None, "full", false);
    r.verdict("isometry_within_tail", tail.is_some_and(|b| dev <= b.max(c.tol)));
    r.output("degrees", &d);
    r.output("tail_bound", tail);
    r.output("defect_dim", k.defect_dim);
    r.output("defect_eigs", &k.defect_eigs);
    r.output("kernel", linop(&k.matrix, Space::Plain { dim: t.dim }, Space::fock_tensor(&model.basis, k.defect_dim)));
    Ok(())
}

fn berezin(c: &Common, g: Option<&std::path::Path>, series: Option<&std::path::Path>, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let d = degrees(c, &spec, Some(&t))?;
    let model = Model::new(&spec, &d)?;
    let n = model.dim();
    let (gm, is_identity) = match (g, series) {
        (Some(_), Some(_)) => bail!("pass at most one of --g and --series"),
        (Some(p), None) => {
            let op = load_linop(p)?;
            if op.matrix.nrows() != n || op.matrix.ncols() != n {
                bail!("g is {}x{}, fock dimension is {n}", op.matrix.nrows(), op.matrix.ncols());
            }
            (op.matrix, false)
        }
        (None, Some(p)) => {
            let s = io::parse_series(&read(p)?, &spec.n)?;
            (eval_series_on_model(&s, &model, 1.0), false)
        }
        (None, None) => (identity(n), true),
    };
    let k = berezin_kernel_on(&t, &model, c.tol)?;
    let b = berezin_transform(&k, &gm)?;
    let tail = tail_bound(&t, &d);
    if is_identity {
        let dev = op_norm(&(&b - identity::<f64>(t.dim)));
        r.entry("transform_of_identity", dev, tail.unwrap_or(c.tol).max(c.tol), None, "full", false);
    }
    r.output("degrees", &d);
    r.output("tail_bound", tail);
    r.output("transform", LinOpFile::from_matrix(&b));
    Ok(())
}

fn vn(c: &Common, pairs: Option<&std::path::Path>, samples: usize, max_deg: usize, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let data = match pairs {
        Some(p) => io::parse_poly_pairs(&read(p)?, &spec.n)?,
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
            (0..samples).map(|_| random_poly_pairs(&mut rng, &spec.n, max_deg, 2)).collect()
        }
    };
    let reserve = data.iter().flatten().flat_map(|(p, q)| [p.max_factor_degree(), q.max_factor_degree()]).max().unwrap_or(0);
    let d = match c.degree.as_deref() {
        Some(s) if s != "auto" => degrees(c, &spec, None)?,
        _ => vec![(2 * reserve).max(reserve + 1); spec.k()],
    };
    require_reserve(&d, reserve)?;
    let res = von_neumann_check(&t, &data, &d)?;
    r.entry("von_neumann_violation", res.max_violation.max(0.0), c.tol, Some(reserve), &interior(reserve), true);
    r.output("degrees", &d);
    r.output("lhs", &res.lhs);
    r.output("rhs", &res.rhs);
    r.output("samples", io::poly_pairs_to_file(&data));
    Ok(())
}

fn hnorm(c: &Common, series: &std::path::Path, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let s = io::parse_series(&read(series)?, &spec.n)?;
    let d = degrees(c, &spec, None)?;
    let grid = if c.radius_grid.is_empty() { default_r_grid() } else { c.radius_grid.clone() };
    if grid.iter().any(|&x| !(0.0..1.0).contains(&x)) {
        bail!("radius grid must lie in [0, 1)");
    }
    let norms = hardy_norm_estimate(&s, &spec, &d, &grid)?;
    let mut sorted: Vec<(f64, f64)> = grid.iter().copied().zip(norms.iter().copied()).collect();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let drop = sorted.windows(2).map(|w| (w[0].1 - w[1].1).max(0.0)).fold(0.0, f64::max);
    let scale = norms.iter().copied().fold(1.0, f64::max);
    r.entry("monotone_in_r", drop, c.tol * scale, None, "full", true);
    let ordered: Vec<f64> = sorted.iter().map(|p| p.1).collect();
    r.verdict("nondecreasing", is_nondecreasing(&ordered, c.tol));
    let dmax = d.iter().copied().max().unwrap_or(0);
    if dmax >= 1 {
        let rc = radius_check(&s, &spec, dmax, c.tol)?;
        r.verdict("radius_at_least_one", rc.verdict);
        r.output("radius_roots", &rc.roots);
    }
    r.output("radius_grid", &grid);
    r.output("norms", &norms);
    Ok(())
}

fn beurling(c: &Common, y: &std::path::Path, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let d = degrees(c, &spec, None)?;
    let model = Model::new(&spec, &d)?;
    let op = load_linop(y)?;
    let h = coeff_dim(&op, &model)?;
    let ym = op.matrix;
    let asym = op_norm(&(&ym - ym.adjoint()));
    if asym > c.tol * herm_norm(&ym).max(1.0) {
        bail!("Y is not Hermitian (defect {asym:.3e})");
    }
    let reserve = default_reserve(&model);
    let cond = beurling_condition(&ym, &model, h, c.tol, reserve)?;
    for (k, w) in &cond.witnesses {
        r.entry(&format!("psd {k}"), -w.min_eig, -w.threshold, Some(reserve), &interior(reserve), false);
    }
    r.verdict("condition", cond.verdict);
    r.output("coeff_dim", h);
    if !cond.verdict {
        return Ok(());
    }
    let f = beurling_factorize(&ym, &model, h, &opts(c, reserve))?;
    r.entry("roundtrip", f.roundtrip_residual, c.residual_tol, Some(reserve), &interior(reserve), true);
    r.entry("multi_analytic", f.m.intertwine_residual, c.residual_tol, Some(1), &interior(1), true);
    let scale = herm_norm(&ym).max(1.0);
    r.verdict("rank_clipped", f.clipped > c.tol * scale);
    r.verdict("inner", f.m.is_inner(c.residual_tol));
    r.output("inner_defect", f.m.inner_defect());
    r.output("e_dim", f.m.e_in);
    r.output("rank", f.rank);
    r.output("clipped_eigenvalue", f.clipped);
    r.output(
        "M",
        linop(&f.m.op, Space::fock_tensor(&model.basis, f.m.e_in), Space::fock_tensor(&model.basis, h)),
    );
    Ok(())
}

fn subspace(c: &Common, p: &std::path::Path, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let d = degrees(c, &spec, None)?;
    let model = Model::new(&spec, &d)?;
    let op = load_linop(p)?;
    let h = coeff_dim(&op, &model)?;
    let pm = op.matrix;
    let (idem, sa) = projection_defects(&pm);
    r.entry("idempotence", idem, c.residual_tol, None, "full", true);
    r.entry("self_adjointness", sa, c.residual_tol, None, "full", true);
    if idem > c.residual_tol || sa > c.residual_tol {
        return Ok(());
    }
    let reserve = default_reserve(&model);
    let rep = invariant_subspace_tests(&pm, &model, h, c.tol, reserve)?;
    r.entry("invariance", rep.invariance_residual, c.residual_tol, None, "full", false);
    r.verdict("invariant", rep.invariance_residual <= c.residual_tol);
    for (k, w) in &rep.beurling.witnesses {
        r.entry(&format!("psd {k}"), -w.min_eig, -w.threshold, Some(reserve), &interior(reserve), false);
    }
    r.verdict("beurling_positive", rep.beurling.verdict);
    if let Some(v) = rep.doubly_commuting_residual {
        r.entry("doubly_commuting", v, c.residual_tol, None, "full", false);
        r.verdict("doubly_commuting", v <= c.residual_tol);
    }
    let red = reducing_characterize(&pm, &model, h, c.residual_tol, c.eps_rank);
    r.entry("reducing_obstruction", red.obstruction, c.residual_tol, None, "full", false);
    if let Some(v) = red.match_residual {
        r.entry("reducing_match", v, c.residual_tol, None, "full", false);
    }
    r.verdict("reducing", red.reducing);
    if let Some(e) = &red.e_basis {
        r.output("e_dim", e.ncols());
        r.output("e_basis", LinOpFile::from_matrix(e));
    }
    Ok(())
}

fn charfn(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let d = dense_degrees(c, &spec, &t, r)?;
    let model = Model::new(&spec, &d)?;
    let reserve = default_reserve(&model);
    let admits = admits_charfn(&t, &d, c.tol)?;
    for (k, w) in &admits.witnesses {
        r.entry(&format!("psd {k}"), -w.min_eig, -w.threshold, Some(reserve), &interior(reserve), false);
    }
    r.verdict("admits", admits.verdict);
    r.output("degrees", &d);
    if !admits.verdict {
        return Ok(());
    }
    let o = opts(c, reserve);
    let cf = char_function(&t, &d, &o)?;
    r.entry("identity", cf.identity_residual, c.residual_tol, Some(reserve), &interior(reserve), true);
    r.entry("multi_analytic", cf.factorization.m.intertwine_residual, c.residual_tol, Some(1), &interior(1), true);
    let pi = pure_iff_inner(&t, &d, &o)?;
    r.verdict("pure", pi.pure);
    r.verdict("inner", pi.inner);
    r.verdict("cnc", pi.cnc);
    r.verdict("pure_iff_inner", pi.agreement);
    if let Some(v) = pi.equivalence_residual {
        r.entry("model_equivalence", v, c.residual_tol, Some(1), &interior(1), false);
    }
    if let Some(v) = pi.range_residual {
        r.entry("range_match", v, pi.tail.unwrap_or(c.residual_tol).max(c.residual_tol), None, "full", false);
    }
    r.output("tail_bound", pi.tail);
    r.output("limit_inner_defect", pi.inner_defect);
    r.output("defect_dim", cf.defect_dim);
    r.output("star_defect_dim", cf.star_defect_dim);
    r.output(
        "theta",
        linop(cf.theta(), Space::fock_tensor(&model.basis, cf.star_defect_dim), Space::fock_tensor(&model.basis, cf.defect_dim)),
    );
    Ok(())
}

fn model_space_cmd(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let d = dense_degrees(c, &spec, &t, r)?;
    let model = Model::new(&spec, &d)?;
    let reserve = default_reserve(&model);
    let ms = model_space(&t, &d, &opts(c, reserve))?;
    r.entry("gamma_unitary", ms.unitary_residual, c.residual_tol, None, "full", true);
    r.entry("gamma_well_defined", ms.well_defined_residual, c.residual_tol, None, "full", true);
    r.entry("orthogonality", ms.orthogonality_residual, c.residual_tol, None, "full", true);
    r.entry("intertwining", ms.intertwine_residual, c.residual_tol, Some(1), &interior(1), true);
    r.output("degrees", &d);
    r.output("model_dim", ms.projection.trace().re.round() as i64);
    r.output("ambient_dim", ms.projection.nrows());
    let ops: Vec<Vec<LinOpFile>> = ms.ops.iter().map(|g| g.iter().map(LinOpFile::from_matrix).collect()).collect();
    r.output("model_ops", ops);
    Ok(())
}

fn dilate(c: &Common, dil_deg: usize, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    if !is_pure(&t, c.tol, 10_000).pure {
        bail!("dilation requires a pure member");
    }
    let d = dense_degrees(c, &spec, &t, r)?;
    let dil = pure_dilation(&t, &d, dil_deg, c.tol, c.eps_rank)?;
    let tail = tail_bound(&t, &d).unwrap_or(0.0);
    let tol = c.residual_tol.max(tail);
    r.entry("coinvariance", dil.coinvariance_residual, tol, None, "full", true);
    r.entry("reconstruction", dil.reconstruction_residual, tol, None, "full", true);
    r.entry("minimality", dil.minimality_residual, c.residual_tol, Some(1), &interior(1), true);
    r.output("degrees", &d);
    r.output("dilation_index", dil.dilation_index);
    r.output("dil_deg", dil.dil_deg);
    Ok(())
}

fn wold(c: &Common, r: &mut Report) -> Result<()> {
    let spec = load_spec(c)?;
    let t = load_tuple(c, &spec)?;
    let w = wold_split(&t, c.tol)?;
    r.entry("invariance", w.invariance_residual, c.residual_tol, None, "full", true);
    r.entry("reducing", w.reducing_residual, c.residual_tol, None, "full", false);
    r.output("pure_rank", w.rank);
    r.output("krylov_steps", w.krylov_steps);
    r.output("p0", LinOpFile::from_matrix(&w.p0));
    Ok(())
}
