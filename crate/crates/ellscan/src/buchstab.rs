//! Buchstab-function numerics and sieve-constant integrals: the delay
//! solver for omega(u), its piecewise majorant, exponent-space regions
//! with exact rational membership, and adaptive quadrature of
//! omega((1 - sum alpha)/alpha_k) / (alpha_1 ... alpha_{k-1} alpha_k^2).

use crate::arith::{simple_sieve, zeta_constants};
use crate::error::{Error, Result};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use once_cell::sync::Lazy;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Write as _;

pub const OMEGA_STEP: f64 = 1e-4;
pub const OMEGA_U_MAX: f64 = 21.0;

/// Tabulated omega on [1, u_max] with a tracked per-entry error bound.
#[derive(Debug)]
pub struct BuchstabGrid {
    pub h: f64,
    pub u_max: f64,
    values: Vec<f64>,
    errors: Vec<f64>,
}

impl BuchstabGrid {
    /// Method of steps for (u omega(u))' = omega(u-1): closed forms to
    /// u = 3, trapezoidal integration of the delayed term beyond.
    fn build(h: f64, u_max: f64) -> BuchstabGrid {
        let n = ((u_max - 1.0) / h).round() as usize;
        let shift = (1.0 / h).round() as usize; // grid distance of the delay
        let mut values = vec![0.0f64; n + 1];
        let mut errors = vec![0.0f64; n + 1];
        let mut f_acc = 0.0f64; // F(u) = u omega(u), tracked past u = 3
        let mut e_acc = 0.0f64;
        // |g''| <= 2 on the relevant range; trapezoid step error h^3/12 * 2
        let step_err = h * h * h / 6.0;
        for i in 0..=n {
            let u = 1.0 + i as f64 * h;
            if u < 2.0 {
                values[i] = 1.0 / u;
            } else if u <= 3.0 + 1e-12 {
                values[i] = (1.0 + (u - 1.0).ln()) / u;
                if (u - 3.0).abs() < h / 2.0 {
                    f_acc = u * values[i];
                }
            } else {
                let g_prev = values[i - 1 - shift];
                let g_cur = values[i - shift];
                f_acc += h / 2.0 * (g_prev + g_cur);
                e_acc += h / 2.0 * (errors[i - 1 - shift] + errors[i - shift]) + step_err;
                values[i] = f_acc / u;
                errors[i] = e_acc / u;
            }
        }
        BuchstabGrid {
            h,
            u_max,
            values,
            errors,
        }
    }

    /// (value, error bound) with linear interpolation between grid nodes.
    pub fn eval(&self, u: f64) -> (f64, f64) {
        debug_assert!(u >= 1.0);
        if u < 2.0 {
            return (1.0 / u, 1e-14);
        }
        if u < 3.0 {
            return ((1.0 + (u - 1.0).ln()) / u, 1e-14);
        }
        if u >= self.u_max {
            // past the table omega has settled at e^{-gamma} well within
            // the tracked tolerance
            return (zeta_constants().exp_neg_gamma, 1e-6);
        }
        let t = (u - 1.0) / self.h;
        let i = (t.floor() as usize).min(self.values.len() - 2);
        let frac = t - i as f64;
        let v = self.values[i] * (1.0 - frac) + self.values[i + 1] * frac;
        let e = self.errors[i].max(self.errors[i + 1]) + self.h * self.h;
        (v, e)
    }
}

static GRID: Lazy<BuchstabGrid> = Lazy::new(|| BuchstabGrid::build(OMEGA_STEP, OMEGA_U_MAX));

pub fn omega_grid() -> &'static BuchstabGrid {
    &GRID
}

pub fn omega(u: f64) -> Result<f64> {
    Ok(omega_with_error(u)?.0)
}

pub fn omega_with_error(u: f64) -> Result<(f64, f64)> {
    if !(u >= 1.0) {
        return Err(Error::invalid(format!("omega wants u >= 1, got {u}")));
    }
    Ok(GRID.eval(u))
}

/// The exact piecewise majorant: 0, 1/u, (1+log(u-1))/u, 0.5644, 0.5617.
pub fn omega_upper(u: f64) -> f64 {
    if u < 1.0 {
        0.0
    } else if u < 2.0 {
        1.0 / u
    } else if u < 3.0 {
        (1.0 + (u - 1.0).ln()) / u
    } else if u < 4.0 {
        0.5644
    } else {
        0.5617
    }
}

/// The Type II window width 2 - 7 theta/2 - eta, exact.
pub fn gamma_width(theta: Rational64, eta: Rational64) -> Result<Rational64> {
    if theta < Rational64::new(1, 2) {
        return Err(Error::invalid(format!("theta = {theta} below 1/2")));
    }
    let g = Rational64::new(2, 1) - Rational64::new(7, 2) * theta - eta;
    if g <= Rational64::zero() {
        return Err(Error::invalid(format!(
            "empty Type II window: gamma({theta}, {eta}) = {g} <= 0"
        )));
    }
    Ok(g)
}

/// A linear form c . alpha compared against rational bounds. Ties always
/// resolve to "outside the region": inclusion constraints are strict,
/// exclusion bands closed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    /// c . alpha < bound
    Lt(Vec<Rational64>, Rational64),
    /// c . alpha > bound
    Gt(Vec<Rational64>, Rational64),
    /// c . alpha outside [lo, hi]
    Band(Vec<Rational64>, Rational64, Rational64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentRegion {
    pub k: usize,
    pub constraints: Vec<Constraint>,
    /// Initial quadrature box per coordinate; also the outer clip of the
    /// region.
    pub bbox: Vec<(Rational64, Rational64)>,
}

fn dot(c: &[Rational64], pt: &[Rational64]) -> Rational64 {
    c.iter().zip(pt).map(|(a, b)| a * b).sum()
}

impl ExponentRegion {
    /// Exact membership; boundary points are excluded.
    pub fn contains(&self, pt: &[Rational64]) -> bool {
        assert_eq!(pt.len(), self.k);
        for (x, &(lo, hi)) in pt.iter().zip(&self.bbox) {
            if *x < lo || *x > hi {
                return false;
            }
        }
        self.constraints.iter().all(|c| match c {
            Constraint::Lt(cs, b) => dot(cs, pt) < *b,
            Constraint::Gt(cs, b) => dot(cs, pt) > *b,
            Constraint::Band(cs, lo, hi) => {
                let s = dot(cs, pt);
                s < *lo || s > *hi
            }
        })
    }

    /// One line per constraint, rational coefficients; `from_text` inverts.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "dim {}", self.k).unwrap();
        for &(lo, hi) in &self.bbox {
            writeln!(out, "box {lo} {hi}").unwrap();
        }
        for c in &self.constraints {
            match c {
                Constraint::Lt(cs, b) => writeln!(out, "lt {} {b}", fmt_coeffs(cs)).unwrap(),
                Constraint::Gt(cs, b) => writeln!(out, "gt {} {b}", fmt_coeffs(cs)).unwrap(),
                Constraint::Band(cs, lo, hi) => {
                    writeln!(out, "band {} {lo} {hi}", fmt_coeffs(cs)).unwrap()
                }
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<ExponentRegion> {
        let mut k = 0usize;
        let mut bbox = Vec::new();
        let mut constraints = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let head = parts.next().unwrap();
            let rest: Vec<&str> = parts.collect();
            match head {
                "dim" => {
                    k = rest
                        .first()
                        .and_then(|s| s.parse().ok())
                        .filter(|&k| (1..=3).contains(&k))
                        .ok_or_else(|| Error::invalid("dim wants 1..=3"))?;
                }
                "box" => {
                    let v = parse_rationals(&rest)?;
                    if v.len() != 2 {
                        return Err(Error::invalid("box wants lo hi"));
                    }
                    bbox.push((v[0], v[1]));
                }
                "lt" | "gt" => {
                    let v = parse_rationals(&rest)?;
                    if v.len() != k + 1 {
                        return Err(Error::invalid(format!("{head} wants {k} coeffs + bound")));
                    }
                    let (cs, b) = (v[..k].to_vec(), v[k]);
                    constraints.push(if head == "lt" {
                        Constraint::Lt(cs, b)
                    } else {
                        Constraint::Gt(cs, b)
                    });
                }
                "band" => {
                    let v = parse_rationals(&rest)?;
                    if v.len() != k + 2 {
                        return Err(Error::invalid(format!("band wants {k} coeffs + lo hi")));
                    }
                    constraints.push(Constraint::Band(v[..k].to_vec(), v[k], v[k + 1]));
                }
                other => return Err(Error::invalid(format!("unknown region line {other:?}"))),
            }
        }
        if k == 0 || bbox.len() != k {
            return Err(Error::invalid("region text needs dim and k box lines"));
        }
        Ok(ExponentRegion {
            k,
            constraints,
            bbox,
        })
    }
}

fn fmt_coeffs(cs: &[Rational64]) -> String {
    cs.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_rationals(parts: &[&str]) -> Result<Vec<Rational64>> {
    parts
        .iter()
        .map(|s| {
            if let Some((n, d)) = s.split_once('/') {
                let n: i64 = n.parse().map_err(|_| Error::invalid(format!("bad rational {s}")))?;
                let d: i64 = d.parse().map_err(|_| Error::invalid(format!("bad rational {s}")))?;
                if d == 0 {
                    return Err(Error::invalid("zero denominator"));
                }
                Ok(Rational64::new(n, d))
            } else {
                s.parse::<i64>()
                    .map(|n| Rational64::new(n, 1))
                    .map_err(|_| Error::invalid(format!("bad rational {s}")))
            }
        })
        .collect()
}

/// The two-variable region with gamma <= beta <= alpha <= 1/2,
/// alpha + 2 beta <= 1, and alpha, beta, alpha+beta avoiding the two
/// excluded bands of width gamma around theta/2 and 1 - theta/2.
/// Multiplicative constants of the source ranges are dropped: they shift
/// exponents by O(1/log X) and vanish in the limit the integral encodes.
pub fn build_region_u(theta: Rational64, eta: Rational64) -> Result<ExponentRegion> {
    let g = gamma_width(theta, eta)?;
    let half = Rational64::new(1, 2);
    let one = Rational64::new(1, 1);
    let th2 = theta / 2;
    let a = vec![one, Rational64::zero()];
    let b = vec![Rational64::zero(), one];
    let ab = vec![one, one];
    let mut constraints = vec![
        Constraint::Gt(b.clone(), g),                    // beta > gamma
        Constraint::Lt(vec![-one, one], Rational64::zero()), // beta < alpha
        Constraint::Lt(a.clone(), half),                 // alpha < 1/2
        Constraint::Lt(vec![one, 2.into()], one),        // alpha + 2 beta < 1
    ];
    for form in [a, b, ab] {
        constraints.push(Constraint::Band(form.clone(), th2, th2 + g));
        constraints.push(Constraint::Band(form, one - th2 - g, one - th2));
    }
    Ok(ExponentRegion {
        k: 2,
        constraints,
        bbox: vec![(g, half), (g, Rational64::new(1, 3))],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntegralMethod {
    /// Substitute the majorant table: certified-from-above value.
    UpperBound,
    /// Use the delay solver's omega.
    Solver,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CellState {
    Inside,
    Boundary,
}

#[derive(Debug, Clone)]
struct Cell {
    id: u64,
    lo: Vec<Rational64>,
    hi: Vec<Rational64>,
    state: CellState,
    value: f64,
    err: f64,
}

struct HeapEntry(f64, u64, Cell);

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 && self.1 == other.1
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max-heap on error, ties to the older cell for determinism
        self.0
            .total_cmp(&other.0)
            .then(other.1.cmp(&self.1))
    }
}

fn integrand(region_k: usize, pt: &[f64], method: IntegralMethod) -> f64 {
    let s: f64 = pt.iter().sum();
    let ak = pt[region_k - 1];
    if ak <= 0.0 {
        return 0.0;
    }
    let u = (1.0 - s) / ak;
    let om = match method {
        IntegralMethod::UpperBound => omega_upper(u),
        IntegralMethod::Solver => {
            if u < 1.0 {
                0.0
            } else {
                GRID.eval(u).0
            }
        }
    };
    if om == 0.0 {
        return 0.0;
    }
    let mut denom = ak * ak;
    for &x in &pt[..region_k - 1] {
        denom *= x;
    }
    om / denom
}

/// Range of a linear form over a box: linearity makes corner values the
/// extremes.
fn form_range(cs: &[Rational64], lo: &[Rational64], hi: &[Rational64]) -> (Rational64, Rational64) {
    let mut smin = Rational64::zero();
    let mut smax = Rational64::zero();
    for i in 0..cs.len() {
        let (a, b) = (cs[i] * lo[i], cs[i] * hi[i]);
        if a <= b {
            smin += a;
            smax += b;
        } else {
            smin += b;
            smax += a;
        }
    }
    (smin, smax)
}

/// None = some constraint excludes the whole cell.
fn classify(region: &ExponentRegion, lo: &[Rational64], hi: &[Rational64]) -> Option<CellState> {
    let mut state = CellState::Inside;
    for c in &region.constraints {
        match c {
            Constraint::Lt(cs, b) => {
                let (smin, smax) = form_range(cs, lo, hi);
                if smin >= *b {
                    return None;
                }
                if smax >= *b {
                    state = CellState::Boundary;
                }
            }
            Constraint::Gt(cs, b) => {
                let (smin, smax) = form_range(cs, lo, hi);
                if smax <= *b {
                    return None;
                }
                if smin <= *b {
                    state = CellState::Boundary;
                }
            }
            Constraint::Band(cs, blo, bhi) => {
                let (smin, smax) = form_range(cs, lo, hi);
                if smin >= *blo && smax <= *bhi {
                    return None;
                }
                if !(smax < *blo || smin > *bhi) {
                    state = CellState::Boundary;
                }
            }
        }
    }
    Some(state)
}

fn estimate(region: &ExponentRegion, method: IntegralMethod, cell: &mut Cell) {
    let k = region.k;
    let state = match classify(region, &cell.lo, &cell.hi) {
        None => {
            cell.value = 0.0;
            cell.err = 0.0;
            cell.state = CellState::Inside; // fully resolved, never refined
            return;
        }
        Some(s) => s,
    };
    cell.state = state;
    let mut vol = 1.0f64;
    let lo_f: Vec<f64> = cell.lo.iter().map(|r| r.to_f64().unwrap()).collect();
    let hi_f: Vec<f64> = cell.hi.iter().map(|r| r.to_f64().unwrap()).collect();
    for i in 0..k {
        vol *= hi_f[i] - lo_f[i];
    }
    let mid: Vec<f64> = (0..k).map(|i| 0.5 * (lo_f[i] + hi_f[i])).collect();
    // quarter-point tensor grid (the midpoints of the 2^k children)
    let mut a2 = 0.0f64;
    for mask in 0..(1u32 << k) {
        let pt: Vec<f64> = (0..k)
            .map(|i| {
                if mask >> i & 1 == 0 {
                    0.75 * lo_f[i] + 0.25 * hi_f[i]
                } else {
                    0.25 * lo_f[i] + 0.75 * hi_f[i]
                }
            })
            .collect();
        a2 += integrand(k, &pt, method);
    }
    a2 *= vol / (1 << k) as f64;
    match state {
        CellState::Inside => {
            let a1 = integrand(k, &mid, method) * vol;
            cell.value = a2;
            cell.err = (a2 - a1).abs();
        }
        CellState::Boundary => {
            // sample corners + center exactly against the region; the
            // uncovered share of the cell is charged to the error
            let two = Rational64::new(2, 1);
            let mut inside = 0usize;
            let mut fmax = 0.0f64;
            let mut fsum = 0.0f64;
            let mut samples = 0usize;
            let mut eval_at = |pt_r: Vec<Rational64>| {
                let pt_f: Vec<f64> = pt_r.iter().map(|r| r.to_f64().unwrap()).collect();
                let f = integrand(k, &pt_f, method);
                fmax = fmax.max(f);
                samples += 1;
                if region.contains(&pt_r) {
                    inside += 1;
                    fsum += f;
                }
            };
            for mask in 0..(1u32 << k) {
                let corner: Vec<Rational64> = (0..k)
                    .map(|i| {
                        if mask >> i & 1 == 0 {
                            cell.lo[i]
                        } else {
                            cell.hi[i]
                        }
                    })
                    .collect();
                eval_at(corner);
            }
            eval_at((0..k).map(|i| (cell.lo[i] + cell.hi[i]) / two).collect());
            cell.value = vol * fsum / samples as f64;
            cell.err = vol * fmax;
        }
    }
}

pub fn buchstab_integral(region: &ExponentRegion, method: IntegralMethod) -> Result<(f64, f64)> {
    buchstab_integral_tol(region, method, 1e-4)
}

/// Dispatch on dimension: exact linear decomposition for k <= 2 (every
/// constraint and every omega breakpoint is a line), adaptive rational
/// cells for k = 3.
pub fn buchstab_integral_tol(
    region: &ExponentRegion,
    method: IntegralMethod,
    tol: f64,
) -> Result<(f64, f64)> {
    if region.k == 0 || region.k > 3 {
        return Err(Error::invalid("region dimension must be 1..=3"));
    }
    if region.bbox.len() != region.k {
        return Err(Error::invalid("bbox arity mismatch"));
    }
    for &(lo, hi) in &region.bbox {
        if lo >= hi {
            return Ok((0.0, 0.0)); // empty box, empty region
        }
    }
    match region.k {
        1 => integral_intervals(region, method, tol),
        2 => integral_polygons(region, method, tol),
        _ => integral_cells(region, method, tol),
    }
}

/// k = 1: the region is a union of intervals; split at omega breakpoints
/// and run adaptive Simpson on each smooth piece.
fn integral_intervals(
    region: &ExponentRegion,
    method: IntegralMethod,
    tol: f64,
) -> Result<(f64, f64)> {
    let (lo, hi) = (
        region.bbox[0].0.to_f64().unwrap(),
        region.bbox[0].1.to_f64().unwrap(),
    );
    let mut intervals = vec![(lo, hi)];
    for c in &region.constraints {
        let mut next = Vec::new();
        for (a, b) in intervals {
            match c {
                Constraint::Lt(cs, bd) | Constraint::Gt(cs, bd) => {
                    let coef = cs[0].to_f64().unwrap();
                    let bound = bd.to_f64().unwrap();
                    let keep_lt = matches!(c, Constraint::Lt(..)) == (coef > 0.0);
                    if coef == 0.0 {
                        // constant form: interval survives or dies whole
                        let sat = match c {
                            Constraint::Lt(_, bd2) => Rational64::zero() < *bd2,
                            _ => Rational64::zero() > *bd,
                        };
                        if sat {
                            next.push((a, b));
                        }
                        continue;
                    }
                    let x = bound / coef;
                    if keep_lt {
                        if a < x.min(b) {
                            next.push((a, x.min(b)));
                        }
                    } else if x.max(a) < b {
                        next.push((x.max(a), b));
                    }
                }
                Constraint::Band(cs, blo, bhi) => {
                    let coef = cs[0].to_f64().unwrap();
                    if coef == 0.0 {
                        let s = Rational64::zero();
                        if s < *blo || s > *bhi {
                            next.push((a, b));
                        }
                        continue;
                    }
                    let (mut x1, mut x2) = (
                        blo.to_f64().unwrap() / coef,
                        bhi.to_f64().unwrap() / coef,
                    );
                    if x1 > x2 {
                        std::mem::swap(&mut x1, &mut x2);
                    }
                    if a < x1.min(b) {
                        next.push((a, x1.min(b)));
                    }
                    if x2.max(a) < b {
                        next.push((x2.max(a), b));
                    }
                }
            }
        }
        intervals = next;
    }
    // split where u = (1 - x)/x crosses an integer: x = 1/(m+1)
    let mut cuts: Vec<f64> = Vec::new();
    for m in 1..64 {
        cuts.push(1.0 / (m as f64 + 1.0));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    for (a, b) in intervals {
        let mut pts = vec![a, b];
        pts.extend(cuts.iter().copied().filter(|&x| x > a && x < b));
        pts.sort_by(f64::total_cmp);
        for w in pts.windows(2) {
            let (v, e) = adaptive_simpson(
                &|x| integrand(1, &[x], method),
                w[0],
                w[1],
                tol * (w[1] - w[0]) / (b - a).max(1e-12),
                24,
            );
            value += v;
            err += e;
        }
    }
    Ok((value, err))
}

fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, depth: u32) -> (f64, f64) {
    let m = 0.5 * (a + b);
    let simpson = |a: f64, m: f64, b: f64| (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
    let whole = simpson(a, m, b);
    let left = simpson(a, 0.5 * (a + m), m);
    let right = simpson(m, 0.5 * (m + b), b);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol || depth == 0 {
        (left + right + delta / 15.0, delta.abs() / 15.0)
    } else {
        let (v1, e1) = adaptive_simpson(f, a, m, tol / 2.0, depth - 1);
        let (v2, e2) = adaptive_simpson(f, m, b, tol / 2.0, depth - 1);
        (v1 + v2, e1 + e2)
    }
}

type Pt2 = [f64; 2];

/// Sutherland-Hodgman half-plane clip: keep c . x < b (or > b).
fn clip_poly(poly: &[Pt2], c: [f64; 2], b: f64, keep_lt: bool) -> Vec<Pt2> {
    let side = |p: &Pt2| {
        let s = c[0] * p[0] + c[1] * p[1] - b;
        if keep_lt {
            -s
        } else {
            s
        }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(&p), side(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0) {
            let t = sp / (sp - sq);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

fn poly_area(poly: &[Pt2]) -> f64 {
    let mut a = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        a += p[0] * q[1] - q[0] * p[1];
    }
    a.abs() / 2.0
}

/// k = 2: clip the bbox by every constraint (bands fork the polygon
/// list), then split along the lines alpha + (m+1) beta = 1 where the
/// integrand kinks, leaving smooth convex pieces.
fn integral_polygons(
    region: &ExponentRegion,
    method: IntegralMethod,
    tol: f64,
) -> Result<(f64, f64)> {
    let f = |r: &Rational64| r.to_f64().unwrap();
    let (x0, x1) = (f(&region.bbox[0].0), f(&region.bbox[0].1));
    let (y0, y1) = (f(&region.bbox[1].0), f(&region.bbox[1].1));
    let mut polys = vec![vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]];
    for c in &region.constraints {
        let mut next = Vec::new();
        for poly in &polys {
            match c {
                Constraint::Lt(cs, b) => {
                    next.push(clip_poly(poly, [f(&cs[0]), f(&cs[1])], f(b), true));
                }
                Constraint::Gt(cs, b) => {
                    next.push(clip_poly(poly, [f(&cs[0]), f(&cs[1])], f(b), false));
                }
                Constraint::Band(cs, lo, hi) => {
                    let cf = [f(&cs[0]), f(&cs[1])];
                    next.push(clip_poly(poly, cf, f(lo), true));
                    next.push(clip_poly(poly, cf, f(hi), false));
                }
            }
        }
        polys = next
            .into_iter()
            .filter(|p| p.len() >= 3 && poly_area(p) > 1e-18)
            .collect();
    }
    // smoothness cuts at u = (1 - alpha - beta)/beta = m
    for m in 1..64 {
        let line = [1.0, m as f64 + 1.0];
        let mut next = Vec::new();
        for poly in &polys {
            next.push(clip_poly(poly, line, 1.0, true));
            next.push(clip_poly(poly, line, 1.0, false));
        }
        polys = next
            .into_iter()
            .filter(|p| p.len() >= 3 && poly_area(p) > 1e-18)
            .collect();
    }
    let total_area: f64 = polys.iter().map(|p| poly_area(p)).sum();
    if total_area == 0.0 {
        return Ok((0.0, 0.0));
    }
    let mut value = 0.0;
    let mut err = 0.0;
    for poly in &polys {
        for i in 1..poly.len() - 1 {
            let tri = [poly[0], poly[i], poly[i + 1]];
            let area = tri_area(&tri);
            if area == 0.0 {
                continue;
            }
            let (v, e) = tri_adaptive(&tri, method, tol * area / total_area, 22);
            value += v;
            err += e;
        }
    }
    Ok((value, err))
}

fn tri_area(t: &[Pt2; 3]) -> f64 {
    ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1])).abs()
        / 2.0
}

/// Degree-2 edge-midpoint rule on a triangle.
fn tri_rule(t: &[Pt2; 3], method: IntegralMethod) -> f64 {
    let mut s = 0.0;
    for (i, j) in [(0, 1), (1, 2), (2, 0)] {
        let m = [0.5 * (t[i][0] + t[j][0]), 0.5 * (t[i][1] + t[j][1])];
        s += integrand(2, &m, method);
    }
    s * tri_area(t) / 3.0
}

fn tri_adaptive(t: &[Pt2; 3], method: IntegralMethod, tol: f64, depth: u32) -> (f64, f64) {
    let coarse = tri_rule(t, method);
    let mid = |i: usize, j: usize| -> Pt2 {
        [0.5 * (t[i][0] + t[j][0]), 0.5 * (t[i][1] + t[j][1])]
    };
    let (m01, m12, m20) = (mid(0, 1), mid(1, 2), mid(2, 0));
    let children = [
        [t[0], m01, m20],
        [m01, t[1], m12],
        [m20, m12, t[2]],
        [m01, m12, m20],
    ];
    let fine: f64 = children.iter().map(|c| tri_rule(c, method)).sum();
    let delta = (fine - coarse).abs();
    if delta <= tol || depth == 0 {
        (fine, delta)
    } else {
        let mut value = 0.0;
        let mut err = 0.0;
        for c in &children {
            let (v, e) = tri_adaptive(c, method, tol / 4.0, depth - 1);
            value += v;
            err += e;
        }
        (value, err)
    }
}

/// k = 3 fallback: adaptive worst-cell-first refinement on rational
/// boxes. Slower than the planar engines; kept for the rare 3D region.
fn integral_cells(region: &ExponentRegion, method: IntegralMethod, tol: f64) -> Result<(f64, f64)> {
    let mut next_id = 0u64;
    let mut root = Cell {
        id: next_id,
        lo: region.bbox.iter().map(|b| b.0).collect(),
        hi: region.bbox.iter().map(|b| b.1).collect(),
        state: CellState::Boundary,
        value: 0.0,
        err: 0.0,
    };
    estimate(region, method, &mut root);
    let mut total_value = root.value;
    let mut total_err = root.err;
    let mut heap = BinaryHeap::new();
    heap.push(HeapEntry(root.err, root.id, root));
    let max_splits = 6_000_000u64;
    let mut splits = 0u64;
    let two = Rational64::new(2, 1);
    while total_err > tol {
        let HeapEntry(_, _, cell) = match heap.pop() {
            Some(e) => e,
            None => break,
        };
        if cell.err == 0.0 {
            break; // nothing refinable remains
        }
        splits += 1;
        if splits > max_splits {
            return Err(Error::internal(format!(
                "quadrature failed to reach tol {tol}: residual {total_err:.3e}, worst cell [{:?}, {:?}] err {:.3e}",
                cell.lo, cell.hi, cell.err
            )));
        }
        total_value -= cell.value;
        total_err -= cell.err;
        // bisect the widest dimension
        let dim = (0..region.k)
            .max_by(|&i, &j| (cell.hi[i] - cell.lo[i]).cmp(&(cell.hi[j] - cell.lo[j])))
            .unwrap();
        let mid = (cell.lo[dim] + cell.hi[dim]) / two;
        for half in 0..2 {
            next_id += 1;
            let mut child = Cell {
                id: next_id,
                lo: cell.lo.clone(),
                hi: cell.hi.clone(),
                state: CellState::Boundary,
                value: 0.0,
                err: 0.0,
            };
            if half == 0 {
                child.hi[dim] = mid;
            } else {
                child.lo[dim] = mid;
            }
            estimate(region, method, &mut child);
            total_value += child.value;
            total_err += child.err;
            if child.err > 0.0 {
                heap.push(HeapEntry(child.err, child.id, child));
            }
        }
    }
    Ok((total_value, total_err.max(0.0)))
}

/// #{n in (Y, 2Y] : no prime factor < z} by segmented marking.
pub fn rough_count(y: u64, z: u64) -> Result<u64> {
    if y > 100_000_000 {
        return Err(Error::invalid("rough_count wants Y <= 10^8"));
    }
    if z < 2 || (z as f64) >= 2.0 * y as f64 {
        return Err(Error::invalid(format!("z = {z} outside [2, 2Y)")));
    }
    let primes = simple_sieve(z);
    let lo = y + 1;
    let hi = 2 * y;
    let seg = 1usize << 20;
    let mut count = 0u64;
    let mut mark = vec![false; seg];
    let mut seg_lo = lo;
    while seg_lo <= hi {
        let seg_hi = (seg_lo + seg as u64 - 1).min(hi);
        let len = (seg_hi - seg_lo + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &primes {
            let mut m = seg_lo.div_ceil(p) * p;
            while m <= seg_hi {
                mark[(m - seg_lo) as usize] = true;
                m += p;
            }
        }
        count += mark[..len].iter().filter(|&&m| !m).count() as u64;
        seg_lo = seg_hi + 1;
    }
    Ok(count)
}

/// rough_count over the Buchstab prediction omega(u) Y / log z,
/// u = log Y / log z.
pub fn buchstab_empirical(y: u64, z: u64) -> Result<f64> {
    let u = (y as f64).ln() / (z as f64).ln();
    if u <= 1.0 {
        return Err(Error::invalid("buchstab_empirical wants z < Y^{1}"));
    }
    let count = rough_count(y, z)?;
    let predicted = omega(u)? * y as f64 / (z as f64).ln();
    Ok(count as f64 / predicted)
}

/// 1 - c0(theta, eta) with c0 the majorant Buchstab integral over the
/// exclusion region.
pub fn deficit(theta: Rational64, eta: Rational64) -> Result<f64> {
    let region = build_region_u(theta, eta)?;
    let (c0, _) = buchstab_integral(&region, IntegralMethod::UpperBound)?;
    Ok(1.0 - c0)
}
