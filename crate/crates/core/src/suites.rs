//! Property suites over fixtures. Each suite returns a report of labelled
//! checks; reports also keep every operation value they computed under a
//! stable label, so that runs with different Φ constructions can be compared
//! value by value.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bredon::{BredonModel, CochainModel, CompatibleSubspace, ModelCohomology};
use crate::cover::{mu, mu_inv, RhoModel};
use crate::error::{Error, Result};
use crate::fixtures::Fixture;
use crate::linalg::PrimeField;
use crate::orbit::FiniteGroup;
use crate::simplex::NerveCoding;
use crate::steenrod::ops::{ClassValue, ModelKind, SteenrodEngine};
use crate::steenrod::phi::PhiTable;

/// Largest `i + n` for which the suites evaluate `D_i` into degree `n`.
/// The Φ entry (8, 10) takes about a minute on one core and the cost grows
/// roughly threefold per step beyond it.
pub const TRUSTED_PHI_TOTAL: i64 = 18;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub label: String,
    pub passed: bool,
    /// counterexample on failure, a short summary otherwise
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub fixture: String,
    pub checks: Vec<Check>,
    /// instances left out, with the reason
    pub skipped: Vec<String>,
    pub values: BTreeMap<String, ClassValue>,
}

impl SuiteReport {
    pub fn new(suite: &str, fixture: &str) -> Self {
        Self {
            suite: suite.into(),
            fixture: fixture.into(),
            ..Self::default()
        }
    }

    pub fn check(&mut self, label: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            label: label.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// A fixture together with its operation engine.
pub struct FixtureEngine {
    pub name: String,
    pub engine: SteenrodEngine,
}

impl FixtureEngine {
    pub fn new(fx: Fixture, max_degree: usize, table: Arc<PhiTable>) -> Result<Self> {
        let bredon = BredonModel::new(fx.space.clone(), fx.coefficients.clone())?;
        let cover = RhoModel::new(fx.space, fx.coefficients)?;
        Ok(Self {
            name: fx.name,
            engine: SteenrodEngine::new(bredon, cover, max_degree, table)?,
        })
    }

    pub fn with_table(self, table: Arc<PhiTable>) -> Result<Self> {
        Ok(Self {
            name: self.name,
            engine: self.engine.with_table(table)?,
        })
    }
}

/// Nonzero classes of a space of the given dimension: all of them when there
/// are at most 26, otherwise the basis and the sum of the basis.
pub fn classes(dim: usize, p: u32) -> Vec<Vec<u32>> {
    let count = (p as usize).checked_pow(dim as u32).filter(|&c| c <= 27);
    match count {
        Some(c) => (1..c)
            .map(|mut k| {
                let mut v = vec![0; dim];
                for x in v.iter_mut() {
                    *x = (k % p as usize) as u32;
                    k /= p as usize;
                }
                v
            })
            .collect(),
        None => {
            let mut out: Vec<Vec<u32>> = (0..dim)
                .map(|k| {
                    let mut v = vec![0; dim];
                    v[k] = 1;
                    v
                })
                .collect();
            out.push(vec![1; dim]);
            out
        }
    }
}

fn zero_class(e: &SteenrodEngine, degree: i64) -> ClassValue {
    let len = if degree >= 0 && degree as usize <= e.max_degree() {
        e.cohomology(ModelKind::Bredon).dimension(degree as usize)
    } else {
        0
    };
    ClassValue {
        degree,
        coords: vec![0; len],
    }
}

fn op_name(p: u32, s: i64, beta: bool) -> String {
    match (p, beta) {
        (2, _) => format!("Sq^{s}"),
        (_, true) => format!("βP^{s}"),
        (_, false) => format!("P^{s}"),
    }
}

/// Whether `P^s`/`βP^s` on degree `q` is zero by index, or its `D_i` lies
/// within the truncation and [`TRUSTED_PHI_TOTAL`].
pub fn operation_in_range(e: &SteenrodEngine, s: i64, beta: bool, q: usize) -> bool {
    let p = e.field().p();
    let i = crate::steenrod::ops::power_index(p, s, q, beta);
    let n = p as i64 * q as i64 - i;
    i < 0 || (n <= e.max_degree() as i64 && i + n <= TRUSTED_PHI_TOTAL)
}

/// Memoizing evaluator of operations on Bredon classes.
struct Ops<'a> {
    e: &'a SteenrodEngine,
    cache: BTreeMap<(i64, bool, usize, Vec<u32>), ClassValue>,
}

impl<'a> Ops<'a> {
    fn new(e: &'a SteenrodEngine) -> Self {
        Self {
            e,
            cache: BTreeMap::new(),
        }
    }

    fn power(&mut self, report: &mut SuiteReport, s: i64, beta: bool, q: usize, x: &[u32]) -> Result<ClassValue> {
        let key = (s, beta, q, x.to_vec());
        if let Some(v) = self.cache.get(&key) {
            return Ok(v.clone());
        }
        let p = self.e.field().p();
        let v = if x.iter().all(|&c| c == 0) {
            // operations are homomorphisms
            let out = q as i64 + 2 * s * (p as i64 - 1) + beta as i64;
            zero_class(self.e, out)
        } else {
            let v = self.e.power(ModelKind::Bredon, s, beta, q, x)?.value;
            report.values.insert(format!("{}(H^{q}{x:?})", op_name(p, s, beta)), v.clone());
            v
        };
        self.cache.insert(key, v.clone());
        Ok(v)
    }

    fn cup(&self, a: &ClassValue, b: &ClassValue) -> Result<ClassValue> {
        if a.degree < 0 || b.degree < 0 || a.is_zero() || b.is_zero() {
            return Ok(zero_class(self.e, a.degree + b.degree));
        }
        self.e.cup(ModelKind::Bredon, a.degree as usize, &a.coords, b.degree as usize, &b.coords)
    }
}

fn add_classes(f: PrimeField, a: &mut ClassValue, c: u32, b: &ClassValue) {
    if a.coords.len() == b.coords.len() {
        f.axpy(&mut a.coords, c, &b.coords);
    }
}

/// Instability and the top power: `P^s x = 0` for `s < 0` or `2s > q`,
/// `βP^s x = 0` for `s < 0` or `2s ≥ q`, and `P^{q/2} x = x^p`.
pub fn axioms(fe: &FixtureEngine, max_q: usize) -> Result<SuiteReport> {
    let e = &fe.engine;
    let p = e.field().p();
    let mut report = SuiteReport::new("axioms", &fe.name);
    let mut ops = Ops::new(e);
    let h = e.cohomology(ModelKind::Bredon);
    for q in 0..=max_q.min(e.max_degree()) {
        for x in classes(h.dimension(q), p) {
            let at = format!("x = {x:?} in H^{q}");
            let vanishing_p = [-2, -1].into_iter().chain(q as i64 / 2 + 1..=q as i64 + 1);
            for s in vanishing_p {
                let v = ops.power(&mut report, s, false, q, &x)?;
                report.check(format!("P^{s} x = 0, {at}"), v.is_zero(), format!("{v:?}"));
            }
            if p != 2 {
                let vanishing_beta = [-2, -1].into_iter().chain((q as i64 + 1) / 2..=q as i64 + 1);
                for s in vanishing_beta {
                    let v = ops.power(&mut report, s, true, q, &x)?;
                    report.check(format!("βP^{s} x = 0, {at}"), v.is_zero(), format!("{v:?}"));
                }
            }
            if p != 2 && q % 2 == 0 {
                let s = q as i64 / 2;
                let v = ops.power(&mut report, s, false, q, &x)?;
                let xc = ClassValue {
                    degree: q as i64,
                    coords: x.clone(),
                };
                let mut power = xc.clone();
                for _ in 1..p {
                    power = ops.cup(&power, &xc)?;
                }
                let detail = format!("P^{s} x = {:?}, x^{p} = {:?}", v.coords, power.coords);
                report.check(format!("P^{s} x = x^{p}, {at}"), v == power, detail);
            }
        }
    }
    Ok(report)
}

/// `P^s(xy) = Σ P^i(x) P^j(y)` over class pairs of total degree at most
/// `max_total` and `0 ≤ s ≤ max_s`. For odd `p` the Bockstein form
/// `βP^{s+1}(xy) = Σ βP^{i+1}(x) P^j(y) + (−1)^{|x|} P^i(x) βP^{j+1}(y)` is
/// checked too wherever it fits in the truncation.
pub fn cartan(fe: &FixtureEngine, max_total: usize, max_s: i64) -> Result<SuiteReport> {
    let e = &fe.engine;
    let f = e.field();
    let p = f.p();
    let mut report = SuiteReport::new("cartan", &fe.name);
    let mut ops = Ops::new(e);
    let h = e.cohomology(ModelKind::Bredon);
    let step = 2 * (p as i64 - 1);
    for a in 0..=max_total.min(e.max_degree()) {
        for b in 0..=(max_total - a).min(e.max_degree()) {
            for x in classes(h.dimension(a), p) {
                for y in classes(h.dimension(b), p) {
                    let xc = ClassValue {
                        degree: a as i64,
                        coords: x.clone(),
                    };
                    let yc = ClassValue {
                        degree: b as i64,
                        coords: y.clone(),
                    };
                    let xy = ops.cup(&xc, &yc)?;
                    let at = format!("x = {x:?} in H^{a}, y = {y:?} in H^{b}");
                    for s in 0..=max_s {
                        let lhs = ops.power(&mut report, s, false, a + b, &xy.coords)?;
                        let mut rhs = zero_class(e, lhs.degree);
                        for i in 0..=s {
                            let px = ops.power(&mut report, i, false, a, &x)?;
                            let py = ops.power(&mut report, s - i, false, b, &y)?;
                            add_classes(f, &mut rhs, 1, &ops.cup(&px, &py)?);
                        }
                        let detail = format!("lhs {:?}, rhs {:?}", lhs.coords, rhs.coords);
                        report.check(format!("{}(xy), {at}", op_name(p, s, false)), lhs == rhs, detail);
                        let beta_degree = (a + b) as i64 + (s + 1) * step + 1;
                        if p == 2 || beta_degree > e.max_degree() as i64 {
                            continue;
                        }
                        let lhs = ops.power(&mut report, s + 1, true, a + b, &xy.coords)?;
                        let mut rhs = zero_class(e, lhs.degree);
                        for i in 0..=s + 1 {
                            let bx = ops.power(&mut report, i, true, a, &x)?;
                            let py = ops.power(&mut report, s + 1 - i, false, b, &y)?;
                            add_classes(f, &mut rhs, 1, &ops.cup(&bx, &py)?);
                            let px = ops.power(&mut report, i, false, a, &x)?;
                            let by = ops.power(&mut report, s + 1 - i, true, b, &y)?;
                            add_classes(f, &mut rhs, f.sign(a), &ops.cup(&px, &by)?);
                        }
                        let detail = format!("lhs {:?}, rhs {:?}", lhs.coords, rhs.coords);
                        report.check(format!("βP^{}(xy), {at}", s + 1), lhs == rhs, detail);
                    }
                }
            }
        }
    }
    Ok(report)
}

/// `(x, y) = (x+y)!/(x! y!)` mod `p`, zero if either is negative.
pub fn binomial_mod(p: u32, x: i64, y: i64) -> u32 {
    if x < 0 || y < 0 {
        return 0;
    }
    // Lucas: digitwise C(n, k) with n = x + y, k = x
    let (mut n, mut k) = ((x + y) as u64, x as u64);
    let p64 = p as u64;
    let mut out = 1u64;
    while n > 0 || k > 0 {
        let (nd, kd) = (n % p64, k % p64);
        if kd > nd {
            return 0;
        }
        let mut c = 1u64;
        for t in 0..kd {
            c = c * (nd - t) / (t + 1);
        }
        out = out * (c % p64) % p64;
        n /= p64;
        k /= p64;
    }
    out as u32
}

/// Coefficient of `P^{a+b−i} P^i` in `P^a P^b` for `a < pb`:
/// `(−1)^{a+i} (a − pi, (p−1)b − a + i − 1)`.
pub fn adem_coefficient(f: PrimeField, a: i64, b: i64, i: i64) -> u32 {
    let p = f.p() as i64;
    let c = binomial_mod(f.p(), a - p * i, (p - 1) * b - a + i - 1);
    if (a + i).rem_euclid(2) == 1 {
        f.neg(c)
    } else {
        c
    }
}

/// `P^a P^b x = Σ_i (−1)^{a+i} (a − pi, (p−1)b − a + i − 1) P^{a+b−i} P^i x`
/// for the given `(a, b)`, `a < pb`, on classes of degree at most `max_q`.
/// Instances needing an operation outside [`operation_in_range`] are
/// skipped and listed.
pub fn adem(fe: &FixtureEngine, max_q: usize, a: i64, b: i64) -> Result<SuiteReport> {
    let e = &fe.engine;
    let f = e.field();
    let p = f.p();
    if p == 2 || a <= 0 || b <= 0 || a >= p as i64 * b {
        return Err(Error::InvalidCoefficients(format!(
            "the Adem relation for P^{a}P^{b} needs odd p and 0 < a < pb"
        )));
    }
    let mut report = SuiteReport::new("adem", &fe.name);
    let mut ops = Ops::new(e);
    let step = 2 * (p as usize - 1);
    let h = e.cohomology(ModelKind::Bredon);
    for q in 0..=max_q.min(e.max_degree()) {
        for x in classes(h.dimension(q), p) {
            let at = format!("x = {x:?} in H^{q}");
            let terms: Vec<(i64, u32)> = (0..=a / p as i64)
                .map(|i| (i, adem_coefficient(f, a, b, i)))
                .filter(|&(_, c)| c != 0)
                .collect();
            // each composite as (inner s, outer s)
            let mut composites = vec![(b, a)];
            composites.extend(terms.iter().map(|&(i, _)| (i, a + b - i)));
            let mut missing = None;
            for &(inner, outer) in &composites {
                if !operation_in_range(e, inner, false, q) {
                    missing = Some(format!("P^{inner} on H^{q}"));
                    break;
                }
                let v = ops.power(&mut report, inner, false, q, &x)?;
                let mid = q + inner.max(0) as usize * step;
                if !v.is_zero() && !operation_in_range(e, outer, false, mid) {
                    missing = Some(format!("P^{outer} on H^{mid}"));
                    break;
                }
            }
            if let Some(why) = missing {
                report.skipped.push(format!("P^{a}P^{b} x, {at}: {why} outside the trusted range"));
                continue;
            }
            let composite = |ops: &mut Ops, report: &mut SuiteReport, inner: i64, outer: i64| -> Result<ClassValue> {
                let v = ops.power(report, inner, false, q, &x)?;
                ops.power(report, outer, false, q + inner.max(0) as usize * step, &v.coords)
            };
            let lhs = composite(&mut ops, &mut report, b, a)?;
            let mut rhs = zero_class(e, lhs.degree);
            for &(i, c) in &terms {
                add_classes(f, &mut rhs, c, &composite(&mut ops, &mut report, i, a + b - i)?);
            }
            let detail = format!(
                "coefficients {terms:?}; lhs {:?}, rhs {:?}",
                lhs.coords, rhs.coords
            );
            report.check(format!("P^{a}P^{b} x, {at}"), lhs == rhs, detail);
        }
    }
    Ok(report)
}

fn first_difference(a: &[u32], b: &[u32]) -> String {
    match a.iter().zip(b).position(|(x, y)| x != y) {
        Some(k) => format!("first difference at coordinate {k}: {} vs {}", a[k], b[k]),
        None if a.len() != b.len() => format!("lengths {} vs {}", a.len(), b.len()),
        None => "equal".into(),
    }
}

/// Tracks the first counterexample of a family of cochain identities.
struct Tally {
    label: String,
    count: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(label: String) -> Self {
        Self {
            label,
            count: 0,
            failure: None,
        }
    }

    fn record(&mut self, ok: bool, detail: impl FnOnce() -> String) {
        self.count += 1;
        if !ok && self.failure.is_none() {
            self.failure = Some(detail());
        }
    }

    fn finish(self, report: &mut SuiteReport) {
        let passed = self.failure.is_none();
        let detail = self.failure.unwrap_or_else(|| format!("{} instances", self.count));
        report.check(self.label, passed, detail);
    }
}

/// The bridge `μ` between the Bredon–Illman and cover models: mutually
/// inverse, compatible with coboundaries, compatibility and cup products.
/// Checked on every basis cochain of degree at most `max_degree` and on
/// `pairs` random cup pairs per total degree.
pub fn mu_suite(fx: &Fixture, max_degree: usize, pairs: usize, seed: u64) -> Result<SuiteReport> {
    let space = &fx.space;
    if space.top_dim() < max_degree + 1 {
        return Err(Error::InsufficientTruncation {
            degree: max_degree,
            required: max_degree + 1,
            available: space.top_dim(),
        });
    }
    let coeffs = &fx.coefficients;
    let f = coeffs.field();
    let bi = BredonModel::new(space.clone(), coeffs.clone())?;
    let rho = RhoModel::new(space.clone(), coeffs.clone())?;
    let layout = bi.layout();
    let mut report = SuiteReport::new("mu", &fx.name);
    let subspaces: Vec<CompatibleSubspace> = (0..=max_degree + 1)
        .map(|n| CompatibleSubspace::new(f, space, coeffs, layout, n))
        .collect();
    let dense = |s: &CompatibleSubspace, k: usize| {
        let mut v = vec![0; s.full_dim()];
        for &(c, x) in s.basis_vector(k) {
            v[c] = x;
        }
        v
    };
    for n in 0..=max_degree {
        let sub = &subspaces[n];
        let mut inverse = Tally::new(format!("μ⁻¹μ = id and μμ⁻¹ = id on C^{n} basis"));
        let mut compatible = Tally::new(format!("μ, μ⁻¹ preserve compatibility on C^{n} basis"));
        let mut chain = Tally::new(format!("μδ = δμ on C^{n} basis"));
        for k in 0..sub.dim() {
            let b = dense(sub, k);
            let mb = mu(space, coeffs, layout, &b, n);
            let back = mu_inv(space, coeffs, layout, &mb, n);
            inverse.record(back == b, || format!("basis {k}: {}", first_difference(&back, &b)));
            let there = mu(space, coeffs, layout, &mu_inv(space, coeffs, layout, &b, n), n);
            inverse.record(there == b, || format!("basis {k} via μμ⁻¹: {}", first_difference(&there, &b)));
            compatible.record(sub.contains(f, &mb), || format!("μ of basis {k} is not compatible"));
            let mib = mu_inv(space, coeffs, layout, &b, n);
            compatible.record(sub.contains(f, &mib), || format!("μ⁻¹ of basis {k} is not compatible"));
            let lhs = mu(space, coeffs, layout, &bi.coboundary(&b, n), n + 1);
            let rhs = rho.coboundary(&mb, n);
            chain.record(lhs == rhs, || format!("basis {k}: {}", first_difference(&lhs, &rhs)));
        }
        inverse.finish(&mut report);
        compatible.finish(&mut report);
        chain.finish(&mut report);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random = |s: &CompatibleSubspace, rng: &mut ChaCha8Rng| {
        let coords: Vec<u32> = (0..s.dim()).map(|_| rng.gen_range(0..f.p())).collect();
        s.embed(f, &coords)
    };
    for d in 0..=max_degree {
        let mut tally = Tally::new(format!("μ(f∪g) = μf∪μg in total degree {d}"));
        for t in 0..pairs {
            let n = rng.gen_range(0..=d);
            let a = random(&subspaces[n], &mut rng);
            let b = random(&subspaces[d - n], &mut rng);
            let lhs = mu(space, coeffs, layout, &bi.cup(&a, n, &b, d - n), d);
            let rhs = rho.cup(
                &mu(space, coeffs, layout, &a, n),
                n,
                &mu(space, coeffs, layout, &b, d - n),
                d - n,
            );
            tally.record(lhs == rhs, || format!("pair {t} (degrees {n}, {}): {}", d - n, first_difference(&lhs, &rhs)));
        }
        tally.finish(&mut report);
    }
    Ok(report)
}

/// The defining conditions of every Φ entry with `i + j ≤ max_total`, and of
/// every entry already cached in the table.
pub fn phi_suite(table: &PhiTable, max_total: u32) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("phi", &table.lift().label());
    let mut keys: Vec<(u32, u32)> = (0..=max_total)
        .flat_map(|t| (0..=t).map(move |i| (i, t - i)))
        .collect();
    keys.extend(table.cached());
    keys.sort_unstable();
    keys.dedup();
    for (i, j) in keys {
        let failures = table.verify_entry(i, j)?;
        let terms = table.entry(i, j)?.len();
        let detail = if failures.is_empty() {
            format!("{terms} terms")
        } else {
            failures.join("; ")
        };
        report.check(format!("Φ({i},{j}) conditions"), failures.is_empty(), detail);
    }
    Ok(report)
}

/// `D_i` of every class of degree at most `max_q` and every index with the
/// result in range, for comparing Φ constructions.
pub fn d_values(fe: &FixtureEngine, max_q: usize) -> Result<SuiteReport> {
    let e = &fe.engine;
    let p = e.field().p() as usize;
    let mut report = SuiteReport::new("d-values", &fe.name);
    let h = e.cohomology(ModelKind::Bredon);
    for q in 1..=max_q.min(e.max_degree()) {
        for x in classes(h.dimension(q), p as u32) {
            for i in 0..=(p * q - q) as i64 {
                let n = (p * q) as i64 - i;
                if n > e.max_degree() as i64 || i + n > TRUSTED_PHI_TOTAL {
                    continue;
                }
                let v = e.d_op(ModelKind::Bredon, i, q, &x)?;
                report.values.insert(format!("D_{i}(H^{q}{x:?})"), v);
            }
        }
    }
    Ok(report)
}

/// Compares the recorded values of reports produced with different Φ
/// constructions: same labels, identical classes.
pub fn compare_values(label: &str, reference: &SuiteReport, other: &SuiteReport) -> Check {
    let mut detail = format!("{} values", reference.values.len());
    let mut passed = reference.values.len() == other.values.len();
    if !passed {
        detail = format!("{} vs {} values", reference.values.len(), other.values.len());
    }
    for (k, v) in &reference.values {
        match other.values.get(k) {
            Some(w) if w == v => {}
            Some(w) => {
                passed = false;
                detail = format!("{k}: {:?} vs {:?}", v.coords, w.coords);
                break;
            }
            None => {
                passed = false;
                detail = format!("{k} missing");
                break;
            }
        }
    }
    Check {
        label: label.into(),
        passed,
        detail,
    }
}

/// Ids of `n`-simplices of the nerve of an abelian group under inversion,
/// `map[n][id]`.
pub fn nerve_inversion(gamma: &FiniteGroup, top_dim: usize) -> Result<Vec<Vec<usize>>> {
    let inv: Vec<usize> = gamma.elements().map(|a| gamma.inv(a)).collect();
    if !gamma.is_automorphism(&inv) {
        return Err(Error::InvalidGroup("inversion is not an automorphism".into()));
    }
    let coding = NerveCoding::new(gamma);
    Ok((0..=top_dim)
        .map(|n| {
            (0..coding.count(n))
                .map(|id| {
                    let t: Vec<usize> = coding.tuple(n, id).iter().map(|&a| inv[a]).collect();
                    coding.id(&t)
                })
                .collect()
        })
        .collect())
}

fn pull_back(model: &BredonModel, map: &[Vec<usize>], fv: &[u32], n: usize) -> Vec<u32> {
    let layout = model.layout();
    let mut out = vec![0; layout.len(n)];
    for (id, &image) in map[n].iter().enumerate() {
        out[layout.range(n, 0, id)].copy_from_slice(&fv[layout.range(n, 0, image)]);
    }
    out
}

/// Options of the structural suite.
#[derive(Clone, Debug)]
pub struct StructuralOptions {
    /// cochain identities are checked in degrees up to this
    pub max_cochain_degree: usize,
    /// `D_i` well-definedness on classes up to this degree
    pub max_class_degree: usize,
    pub perturbations: usize,
    pub seed: u64,
    /// a simplicial automorphism `map[n][id]` of a space with trivial group
    /// and constant coefficients, for the naturality check
    pub automorphism: Option<Vec<Vec<usize>>>,
}

impl Default for StructuralOptions {
    fn default() -> Self {
        Self {
            max_cochain_degree: 5,
            max_class_degree: 3,
            perturbations: 20,
            seed: 7,
            automorphism: None,
        }
    }
}

fn cochain_identities<M: CochainModel>(
    model: &M,
    name: &str,
    h: &ModelCohomology,
    max: usize,
    rng: &mut ChaCha8Rng,
    report: &mut SuiteReport,
) {
    let f = model.coefficients().field();
    let subs: Vec<&CompatibleSubspace> = (0..=h.max_degree() + 1).map(|n| h.subspace(n)).collect();
    let mut dd = Tally::new(format!("{name}: δδ = 0"));
    let mut compat = Tally::new(format!("{name}: δ and ∪ preserve compatibility"));
    let mut leibniz = Tally::new(format!("{name}: δ(f∪g) = δf∪g + (−1)^n f∪δg"));
    let top = max.min(h.max_degree() + 1);
    for n in 0..top.saturating_sub(1) {
        for _ in 0..4 {
            let c = h.random_cochain(n, rng);
            let d1 = model.coboundary(&c, n);
            compat.record(subs[n + 1].contains(f, &d1), || format!("δ of a degree {n} cochain"));
            let d2 = model.coboundary(&d1, n + 1);
            dd.record(d2.iter().all(|&x| x == 0), || format!("degree {n}"));
        }
    }
    for n in 0..top {
        for m in 0..top - n {
            for _ in 0..2 {
                let a = h.random_cochain(n, rng);
                let b = h.random_cochain(m, rng);
                let ab = model.cup(&a, n, &b, m);
                compat.record(subs[n + m].contains(f, &ab), || format!("cup of degrees {n}, {m}"));
                let lhs = model.coboundary(&ab, n + m);
                let mut rhs = model.cup(&model.coboundary(&a, n), n + 1, &b, m);
                let right = model.cup(&a, n, &model.coboundary(&b, m), m + 1);
                f.axpy(&mut rhs, f.sign(n), &right);
                leibniz.record(lhs == rhs, || format!("degrees {n}, {m}: {}", first_difference(&lhs, &rhs)));
            }
        }
    }
    dd.finish(report);
    compat.finish(report);
    leibniz.finish(report);
}

/// Cochain-level structure of both models, well-definedness and homogeneity
/// of `D_i`, and optionally naturality of the operations.
pub fn structural(fe: &FixtureEngine, opts: &StructuralOptions) -> Result<SuiteReport> {
    let e = &fe.engine;
    let f = e.field();
    let p = f.p() as usize;
    let mut report = SuiteReport::new("structural", &fe.name);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let max = opts.max_cochain_degree;
    cochain_identities(e.bredon(), "Bredon-Illman", e.cohomology(ModelKind::Bredon), max, &mut rng, &mut report);
    cochain_identities(e.cover(), "cover", e.cohomology(ModelKind::Cover), max, &mut rng, &mut report);

    let hc = e.cohomology(ModelKind::Cover);
    let mut well_defined = Tally::new(format!(
        "D_i(u) = D_i(u + δv) for {} perturbations per class and index",
        opts.perturbations
    ));
    let mut homogeneous = Tally::new("D_i(c·x) = c·D_i(x)".into());
    for q in 1..=opts.max_class_degree.min(e.max_degree()) {
        for k in 0..hc.dimension(q) {
            let mut x = vec![0; hc.dimension(q)];
            x[k] = 1;
            let u = hc.representative(q, &x);
            for i in 0..=(p * q - q) as i64 {
                let n = (p * q) as i64 - i;
                if n > e.max_degree() as i64 || i + n > TRUSTED_PHI_TOTAL {
                    report.skipped.push(format!("D_{i} on H^{q}: outside the trusted range"));
                    continue;
                }
                let base = e.d_op(ModelKind::Cover, i, q, &x)?;
                for t in 0..opts.perturbations {
                    let v = hc.random_cochain(q - 1, &mut rng);
                    let mut w = u.clone();
                    f.axpy(&mut w, 1, &e.cover().coboundary(&v, q - 1));
                    let d = e.d_cochain(i as u32, q, &w)?;
                    let class = hc.class_of(n as usize, &d)?;
                    well_defined.record(class == base.coords, || {
                        format!("D_{i} of basis class {k} of H^{q}, perturbation {t}: {class:?} vs {:?}", base.coords)
                    });
                }
                for c in 2..f.p() {
                    let cx: Vec<u32> = x.iter().map(|&a| f.mul(a, c)).collect();
                    let lhs = e.d_op(ModelKind::Cover, i, q, &cx)?;
                    let rhs: Vec<u32> = base.coords.iter().map(|&a| f.mul(a, c)).collect();
                    homogeneous.record(lhs.coords == rhs, || format!("D_{i}, c = {c}, basis class {k} of H^{q}"));
                }
            }
        }
    }
    well_defined.finish(&mut report);
    homogeneous.finish(&mut report);

    if let Some(map) = &opts.automorphism {
        let bi = e.bredon();
        let constant = bi.space().subgroup_count() == 1
            && bi.coefficients().psi_table().iter().flatten().all(|m| m.rows() == 1 && m.get(0, 0) == 1);
        if !constant {
            return Err(Error::InvalidCoefficients(
                "the naturality check needs a trivial group and constant coefficients".into(),
            ));
        }
        let hb = e.cohomology(ModelKind::Bredon);
        let induced = |q: usize, x: &[u32]| -> Result<Vec<u32>> {
            hb.class_of(q, &pull_back(bi, map, &hb.representative(q, x), q))
        };
        let mut natural = Tally::new("φ*P^s = P^sφ* and φ*βP^s = βP^sφ* for the automorphism".into());
        for q in 1..=opts.max_class_degree.min(e.max_degree()) {
            for x in classes(hb.dimension(q), p as u32) {
                let fx = induced(q, &x)?;
                for beta in [false, true] {
                    if beta && p == 2 {
                        continue;
                    }
                    for s in 0..=q as i64 / 2 {
                        if !operation_in_range(e, s, beta, q) {
                            continue;
                        }
                        let v = e.power(ModelKind::Bredon, s, beta, q, &x)?.value;
                        let lhs = if v.is_zero() || v.degree < 0 {
                            v.coords.clone()
                        } else {
                            induced(v.degree as usize, &v.coords)?
                        };
                        let rhs = e.power(ModelKind::Bredon, s, beta, q, &fx)?.value.coords;
                        natural.record(lhs == rhs, || {
                            format!("{} on {x:?} in H^{q}: {lhs:?} vs {rhs:?}", op_name(p as u32, s, beta))
                        });
                    }
                }
            }
        }
        natural.finish(&mut report);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials_follow_the_factorial_convention() {
        assert_eq!(binomial_mod(3, 1, 0), 1);
        assert_eq!(binomial_mod(3, 1, 2), 0); // 3!/(1!2!) = 3
        assert_eq!(binomial_mod(5, 2, 2), 1); // 6
        assert_eq!(binomial_mod(3, -1, 4), 0);
        assert_eq!(binomial_mod(7, 3, 4), 0); // 35
    }

    #[test]
    fn adem_coefficients_at_three() {
        let f = PrimeField::new(3).unwrap();
        // P¹P¹ = −P²
        assert_eq!(adem_coefficient(f, 1, 1, 0), 2);
        // P¹P² = 3P³ = 0
        assert_eq!(adem_coefficient(f, 1, 2, 0), 0);
    }

    #[test]
    fn class_enumeration() {
        assert_eq!(classes(1, 3), vec![vec![1], vec![2]]);
        assert_eq!(classes(2, 3).len(), 8);
        assert_eq!(classes(0, 3).len(), 0);
        assert_eq!(classes(4, 3).len(), 5);
    }

    #[test]
    fn inversion_on_the_nerve() {
        let g = FiniteGroup::cyclic(3);
        let map = nerve_inversion(&g, 3).unwrap();
        assert_eq!(map[1], vec![1, 0]);
        assert!(map.iter().all(|m| {
            let mut s = m.clone();
            s.sort_unstable();
            s == (0..m.len()).collect::<Vec<_>>()
        }));
    }
}
