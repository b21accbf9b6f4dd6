//! Seeded invariant suites behind `moyal verify`, grouped by scope.
//!
//! Every check reports the worst relative residual over its samples against a
//! fixed tolerance. Identical (scope, D, θ, seed, samples) give identical reports.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::connections::{canonical_connection, canonical_curvature, Basis, ConnectionForm};
use crate::derivations::{
    addicom_residual, central_residual, d2_listed_relations, slnr_residual, DerivationAlgebra, Generator,
};
use crate::element::{MoyalElement, C64};
use crate::error::{Error, Result};
use crate::graded::{verify_graded_table, GradedAlgebra, GradedElement};
use crate::random::{self, Shape};
use crate::symplectic::SymplecticStructure;

const I: C64 = C64::new(0.0, 1.0);

/// Tolerances per check family.
pub const TOL_IDENTITY: f64 = 1e-10;
pub const TOL_TABLE: f64 = 1e-12;
pub const TOL_DUAL_PATH: f64 = 1e-11;
pub const TOL_COVARIANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scope {
    Core,
    Derivations,
    Connections,
    Graded,
    All,
}

impl FromStr for Scope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "core" => Ok(Scope::Core),
            "derivations" => Ok(Scope::Derivations),
            "connections" => Ok(Scope::Connections),
            "graded" => Ok(Scope::Graded),
            "all" => Ok(Scope::All),
            other => Err(Error::InvalidInput(format!(
                "unknown scope '{other}' (expected core, derivations, connections, graded or all)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub group: &'static str,
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl CheckRow {
    fn new(group: &'static str, name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Self {
            group,
            name: name.into(),
            residual,
            tolerance,
        }
    }

    /// A boolean property reported as residual 0 or 1.
    fn flag(group: &'static str, name: impl Into<String>, ok: bool) -> Self {
        Self::new(group, name, if ok { 0.0 } else { 1.0 }, 0.5)
    }

    pub fn passed(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub structure: SymplecticStructure,
    pub seed: u64,
    pub samples: usize,
    pub rows: Vec<CheckRow>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(CheckRow::passed)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.passed()).count()
    }

    pub fn render(&self) -> String {
        let mut out = self.structure.convention_sheet();
        let _ = writeln!(out, "# seed = {}, samples = {}", self.seed, self.samples);
        let width = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<4} {:<12} {:<width$}  residual {:.3e}  tol {:.0e}",
                if r.passed() { "PASS" } else { "FAIL" },
                r.group,
                r.name,
                r.residual,
                r.tolerance,
            );
        }
        let _ = writeln!(
            out,
            "{} of {} checks passed",
            self.rows.len() - self.failures(),
            self.rows.len()
        );
        out
    }
}

/// Runs the suites in `scope` with `samples` random draws per sampled check.
pub fn run_verify(scope: Scope, dim: usize, theta: f64, seed: u64, samples: usize) -> Result<Report> {
    let s = Arc::new(SymplecticStructure::new(dim, theta)?);
    if samples == 0 {
        return Err(Error::InvalidInput("samples must be positive".into()));
    }
    let mut rows = Vec::new();
    let all = scope == Scope::All;
    if all || scope == Scope::Core {
        rows.extend(core_checks(&s, seed, samples)?);
    }
    if all || scope == Scope::Derivations {
        rows.extend(derivation_checks(&s, seed, samples)?);
    }
    if all || scope == Scope::Connections {
        rows.extend(connection_checks(&s, seed, samples)?);
    }
    if all || scope == Scope::Graded {
        rows.extend(graded_checks(&s, seed, samples)?);
    }
    Ok(Report {
        structure: (*s).clone(),
        seed,
        samples,
        rows,
    })
}

fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Running maxima keyed by name, in first-seen order.
struct Worst(Vec<(&'static str, f64)>);

impl Worst {
    fn new() -> Self {
        Self(Vec::new())
    }

    fn record(&mut self, name: &'static str, r: f64) {
        match self.0.iter_mut().find(|(n, _)| *n == name) {
            Some(e) => e.1 = e.1.max(r),
            None => self.0.push((name, r)),
        }
    }

    fn rows(self, group: &'static str, tol: f64) -> Vec<CheckRow> {
        self.0.into_iter().map(|(n, r)| CheckRow::new(group, n, r, tol)).collect()
    }
}

/// Relative residuals of the product identities for one sample (a, b, c) and indices μ, ν, ρ.
pub fn identity_residuals(
    a: &MoyalElement,
    b: &MoyalElement,
    c: &MoyalElement,
    mu: usize,
    nu: usize,
    rho: usize,
) -> Result<Vec<(&'static str, f64)>> {
    let s = Arc::clone(a.structure());
    let d = s.dim();
    let x = |m: usize| MoyalElement::coordinate(&s, m);
    let th = |m: usize, n: usize| s.big_theta(m, n);
    // Σ_β coeff(β) ∂_β e
    let grad = |e: &MoyalElement, coeff: &dyn Fn(usize) -> MoyalElement| -> Result<MoyalElement> {
        let mut out = MoyalElement::zero(&s);
        for beta in 0..d {
            out = out.try_add(&coeff(beta).pointwise(&e.partial(beta)?)?)?;
        }
        Ok(out)
    };
    let konst = |v: f64| MoyalElement::constant(&s, C64::new(v, 0.0));
    let mut out = Vec::new();

    let ab = a.star(b)?;
    let lhs = ab.partial(mu)?;
    let rhs = a.partial(mu)?.star(b)?.try_add(&a.star(&b.partial(mu)?)?)?;
    out.push(("Leibniz d(a*b) = da*b + a*db", lhs.rel_distance(&rhs)?));

    let lhs = ab.involution();
    let rhs = b.involution().star(&a.involution())?;
    out.push(("involution (a*b)^+ = b^+ * a^+", lhs.rel_distance(&rhs)?));

    let xm = x(mu)?;
    let da = grad(a, &|beta| konst(th(mu, beta)))?;
    let lhs = xm.commutator(a)?;
    out.push(("[x_mu, a] = i Theta_mu_b d_b a", lhs.rel_distance(&da.scale(I))?));

    let lhs = xm.star(a)?;
    let rhs = xm.pointwise(a)?.try_add(&da.scale(0.5 * I))?;
    out.push(("x_mu * a = x_mu a + (i/2) Theta d a", lhs.rel_distance(&rhs)?));

    let lhs = xm.pointwise(&ab)?;
    let mut corr = MoyalElement::zero(&s);
    for beta in 0..d {
        corr = corr.try_add(&a.star(&b.partial(beta)?)?.scale_re(th(mu, beta)))?;
    }
    let rhs = xm.pointwise(a)?.star(b)?.try_sub(&corr.scale(0.5 * I))?;
    out.push(("x_mu (a*b) = (x_mu a)*b - (i/2) Theta a*db", lhs.rel_distance(&rhs)?));

    let xn = x(nu)?;
    let xmn = xm.pointwise(&xn)?;
    let first = grad(a, &|beta| xm.scale_re(th(nu, beta)).try_add(&xn.scale_re(th(mu, beta))).expect("same structure"))?;
    let mut second = MoyalElement::zero(&s);
    for al in 0..d {
        for sg in 0..d {
            let w = th(mu, al) * th(nu, sg);
            if w != 0.0 {
                second = second.try_add(&a.partial(al)?.partial(sg)?.scale_re(w))?;
            }
        }
    }
    let base = xmn.pointwise(a)?;
    let rhs = base.try_add(&first.scale(0.5 * I))?.try_sub(&second.scale_re(0.25))?;
    out.push(("(x_mu x_nu) * a", xmn.star(a)?.rel_distance(&rhs)?));
    let rhs = base.try_sub(&first.scale(0.5 * I))?.try_sub(&second.scale_re(0.25))?;
    out.push(("a * (x_mu x_nu)", a.star(&xmn)?.rel_distance(&rhs)?));

    let xr = x(rho)?;
    let cubic = xmn.pointwise(&xr)?;
    let xrm = xr.pointwise(&xm)?;
    let xnr = xn.pointwise(&xr)?;
    let first = grad(a, &|beta| {
        xrm.scale_re(th(nu, beta))
            .try_add(&xnr.scale_re(th(mu, beta)))
            .and_then(|e| e.try_add(&xmn.scale_re(th(rho, beta))))
            .expect("same structure")
    })?;
    let mut third = MoyalElement::zero(&s);
    for al in 0..d {
        for sg in 0..d {
            for la in 0..d {
                let w = th(mu, al) * th(nu, sg) * th(rho, la);
                if w != 0.0 {
                    third = third.try_add(&a.partial(al)?.partial(sg)?.partial(la)?.scale_re(w))?;
                }
            }
        }
    }
    let rhs = first.scale(I).try_sub(&third.scale(0.25 * I))?;
    out.push(("[x_mu x_nu x_rho, a]", cubic.commutator(a)?.rel_distance(&rhs)?));

    let lhs = xm.commutator(&xn)?;
    let rhs = MoyalElement::constant(&s, C64::new(0.0, th(mu, nu)));
    out.push(("[x_mu, x_nu] = i Theta_mu_nu", lhs.rel_distance(&rhs)?));

    let lhs = MoyalElement::xi(&s, mu)?.scale(I).commutator(a)?;
    out.push(("d_mu a = [i xi_mu, a]", lhs.rel_distance(&a.partial(mu)?)?));

    let lhs = ab.star(c)?;
    let rhs = a.star(&b.star(c)?)?;
    out.push(("associativity (a*b)*c = a*(b*c)", lhs.rel_distance(&rhs)?));
    Ok(out)
}

pub fn core_checks(s: &Arc<SymplecticStructure>, seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rng = rng(seed, 1);
    let d = s.dim();
    let mut worst = Worst::new();
    for i in 0..samples {
        let a = random::element(&mut rng, s, Shape::DEFAULT);
        let b = random::element(&mut rng, s, Shape::DEFAULT);
        let c = random::element(&mut rng, s, Shape::DEFAULT);
        let (mu, nu, rho) = (i % d, (i / d) % d, (i / (d * d)) % d);
        for (name, r) in identity_residuals(&a, &b, &c, mu, nu, rho)? {
            worst.record(name, r);
        }
    }
    Ok(worst.rows("core", TOL_IDENTITY))
}

pub fn derivation_checks(s: &Arc<SymplecticStructure>, seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rows = vec![
        CheckRow::new("derivations", "[eta_mu, eta_nu] = i ThetaInv_mu_nu I", central_residual(s)?, TOL_TABLE),
        CheckRow::new(
            "derivations",
            "[eta_mu, eta_(rs)] = ThetaInv_mr eta_s + ThetaInv_ms eta_r",
            addicom_residual(s)?,
            TOL_TABLE,
        ),
        CheckRow::new("derivations", "[eta_(mn), eta_(rs)] four-term law", slnr_residual(s)?, TOL_TABLE),
    ];
    if s.dim() == 2 {
        for rel in d2_listed_relations(s)? {
            rows.push(CheckRow::new("derivations", format!("D=2 listed {}", rel.name), rel.residual, TOL_TABLE));
        }
    }
    let alg = DerivationAlgebra::new(s);
    let mut rng = rng(seed, 2);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let x = random::g2_generator(&mut rng, s);
        let y = random::g2_generator(&mut rng, s);
        let a = random::element(&mut rng, s, Shape::DEFAULT);
        // [X, Y](a) = X(Y(a)) - Y(X(a)) with [X, Y] read back from the generator basis.
        let lhs = alg.apply(&x, &alg.apply(&y, &a)?)?.try_sub(&alg.apply(&y, &alg.apply(&x, &a)?)?)?;
        let comb = alg.bracket_generators(&x, &y)?;
        let mut rhs = MoyalElement::zero(s);
        for (g, c) in comb.derivation_terms() {
            rhs = rhs.try_add(&alg.apply(&g, &a)?.scale(c))?;
        }
        worst.record("bracket closes on G2: [X,Y](a) = X(Y(a)) - Y(X(a))", lhs.rel_distance(&rhs)?);
        let p = random::quadratic(&mut rng, s);
        let back = alg.recompose(&alg.decompose(&p)?, true)?;
        worst.record("decompose/recompose of degree <= 2 polynomials", back.rel_distance(&p)?);
        let b = random::element(&mut rng, s, Shape::DEFAULT);
        let lhs = alg.apply(&x, &a.star(&b)?)?;
        let rhs = alg.apply(&x, &a)?.star(&b)?.try_add(&a.star(&alg.apply(&x, &b)?)?)?;
        worst.record("derivation Leibniz X(a*b) = X(a)*b + a*X(b)", lhs.rel_distance(&rhs)?);
    }
    rows.extend(worst.rows("derivations", TOL_IDENTITY));
    Ok(rows)
}

pub fn connection_checks(s: &Arc<SymplecticStructure>, seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rows = Vec::new();
    let alg = DerivationAlgebra::new(s);
    let canon = canonical_curvature(&alg, &alg.g2_basis())?;
    let mut canon_res: f64 = 0.0;
    for (x, y, f) in canon.iter() {
        let want = match (x, y) {
            (Generator::Partial(m), Generator::Partial(n)) => {
                MoyalElement::constant(s, C64::new(0.0, -s.theta_inv(*m, *n)))
            }
            _ => MoyalElement::zero(s),
        };
        canon_res = canon_res.max(f.rel_distance(&want)?);
    }
    rows.push(CheckRow::new("connections", "canonical curvature values", canon_res, TOL_TABLE));
    rows.push(CheckRow::flag("connections", "canonical curvature is central", canon.is_central()));

    let mut rng = rng(seed, 3);
    let mut worst = Worst::new();
    for i in 0..samples {
        let basis = if i % 2 == 0 { Basis::G2 } else { Basis::G1 };
        let mu = 0.5 + (i % 3) as f64 * 0.5;
        let a = random::connection(&mut rng, s, basis, mu, 1.0)?;
        let closed = a.curvature()?;
        let generic = a.curvature_generic()?;
        worst.record("closed-form curvature = generic curvature", closed.max_rel_distance(&generic)?);

        let g = random::plane_wave_gauge(&mut rng, s);
        let gd = g.involution();
        let ag = a.gauge_transform(&g)?;
        let conj = |e: &MoyalElement| gd.star(e).and_then(|t| t.star(&g));
        let mut cc: f64 = 0.0;
        for (x, c) in a.covariant_coordinates()? {
            cc = cc.max(ag.covariant_coordinate(&x)?.rel_distance(&conj(&c)?)?);
        }
        worst.record("covariant coordinates transform as g^+ A g", cc);
        worst.record(
            "curvature transforms as g^+ F g",
            ag.curvature()?.max_rel_distance(&closed.conjugate(&g)?)?,
        );
        // Densities square every curvature entry; single-term components keep D = 4 cheap.
        let light = random::connection_with_shape(&mut rng, s, basis, mu, 1.0, Shape::LIGHT)?;
        let dens = light.action_density()?.total;
        worst.record(
            "action density transforms as g^+ L g",
            light.gauge_transform(&g)?.action_density()?.total.rel_distance(&conj(&dens)?)?,
        );
        if basis == Basis::G2 {
            let d = s.dim();
            let (m, r, sg) = (i % d, (i + 1) % d, (i / 2) % d);
            let lhs = ag.covariant_derivative(m, r, sg)?;
            let rhs = conj(&a.covariant_derivative(m, r, sg)?)?;
            worst.record("covariant derivative transforms as g^+ D g", lhs.rel_distance(&rhs)?);
        }
        // The canonical connection has A(X) = -iη(X); it is a fixed point of the gauge action.
        let mut canon_form = ConnectionForm::zero(s, basis, mu, 1.0)?;
        for x in canon_form.generators() {
            let eta = canon_form.algebra().eta(&x)?;
            canon_form.set_component(&x, eta.scale(-I))?;
        }
        let moved = canon_form.gauge_transform(&g)?;
        let mut inv: f64 = 0.0;
        for x in canon_form.generators() {
            inv = inv.max(moved.component(&x)?.rel_distance(canon_form.component(&x)?)?);
        }
        worst.record("canonical connection is gauge invariant", inv);
        let e = random::element(&mut rng, s, Shape::DEFAULT);
        let x = Generator::Partial(i % s.dim());
        let via_form = canon_form.covariant_apply(&x, &e)?;
        worst.record(
            "canonical connection acts as -a * eta(X)",
            via_form.rel_distance(&canonical_connection(&alg, &x, &e)?)?,
        );
    }
    let mut rows_tail = worst.rows("connections", TOL_COVARIANCE);
    for r in &mut rows_tail {
        if r.name.starts_with("closed-form") {
            r.tolerance = TOL_DUAL_PATH;
        }
    }
    rows.extend(rows_tail);
    Ok(rows)
}

pub fn graded_checks(s: &Arc<SymplecticStructure>, seed: u64, samples: usize) -> Result<Vec<CheckRow>> {
    let mut rows: Vec<CheckRow> = verify_graded_table(s)?
        .into_iter()
        .map(|r| CheckRow::new("graded", r.name, r.residual, TOL_TABLE))
        .collect();
    let unscaled = GradedAlgebra::unscaled(s);
    let basis = unscaled.basis();
    let mut central = true;
    for x in &basis {
        for y in &basis {
            central &= unscaled.canonical_curvature(x, y)?.is_central();
        }
    }
    rows.push(CheckRow::flag("graded", "canonical graded curvature is central", central));

    let alg = GradedAlgebra::rescaled(s, 1.3, 0.8);
    let mut rng = rng(seed, 4);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let a = random::graded_element(&mut rng, s, Shape::SMALL);
        let b = random::graded_element(&mut rng, s, Shape::SMALL);
        let c = random::graded_element(&mut rng, s, Shape::SMALL);
        let lhs = a.mul(&b)?.mul(&c)?;
        let rhs = a.mul(&b.mul(&c)?)?;
        worst.record("graded product is associative", lhs.rel_distance(&rhs)?);
        let cyc = |p: &GradedElement, q: &GradedElement, r: &GradedElement| -> Result<GradedElement> {
            p.bracket(&q.bracket(r)?)
        };
        // Graded Jacobi on homogeneous pieces: sign-weighted cyclic sum vanishes.
        let (ha, hb, hc) = (
            GradedElement::from_odd(a.odd.clone()),
            GradedElement::from_even(b.even.clone()),
            GradedElement::from_odd(c.odd.clone()),
        );
        let j1 = cyc(&ha, &hb, &hc)?;
        let j2 = cyc(&hb, &hc, &ha)?;
        let j3 = cyc(&hc, &ha, &hb)?;
        // (-1)^{|a||c|}[a,[b,c]] + (-1)^{|b||a|}[b,[c,a]] + (-1)^{|c||b|}[c,[a,b]] with |a|=|c|=1, |b|=0.
        let sum = j1.scale_re(-1.0).try_add(&j2)?.try_add(&j3)?;
        worst.record("graded Jacobi identity", sum.rel_distance(&GradedElement::zero(s))?);

        let conn = random::graded_connection(&mut rng, &alg, 1.0)?;
        let closed = conn.curvature()?;
        worst.record(
            "graded closed-form curvature = generic curvature",
            closed.max_distance(&conn.curvature_generic()?)?,
        );
        let g = GradedElement::from_even(random::plane_wave_gauge(&mut rng, s));
        let cg = conn.gauge_transform(&g)?;
        worst.record(
            "graded curvature transforms as g^+ F g",
            cg.curvature()?.max_distance(&closed.conjugate(&g)?)?,
        );
        let restricted = random::restricted_graded_connection(&mut rng, &alg, 1.0)?;
        let rg = restricted.gauge_transform(&g)?;
        let dens = restricted.action_density(1e-12)?.total;
        let gd = g.even.involution();
        let want = gd.star(&dens)?.star(&g.even)?;
        worst.record(
            "graded action density transforms as g^+ L g",
            rg.action_density(1e-10)?.total.rel_distance(&want)?,
        );
    }
    let mut tail = worst.rows("graded", TOL_COVARIANCE);
    for r in &mut tail {
        if r.name.contains("closed-form") {
            r.tolerance = TOL_DUAL_PATH;
        }
    }
    rows.extend(tail);
    Ok(rows)
}
