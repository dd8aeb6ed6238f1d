//! Worst-case reweightings of N atoms with per-atom losses `s`:
//! max Σ pᵢsᵢ over the Burg ball and over the total-variation ball.

use crate::error::{Result, TroError};
use crate::solvers::golden::golden_section;

const NEWTON_CAP: usize = 200;

fn spread(s: &[f64]) -> (f64, f64) {
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

fn mean(s: &[f64]) -> f64 {
    s.iter().sum::<f64>() / s.len() as f64
}

/// Worst case over {p : −(1/N)Σ ln(N pᵢ) ≤ ε}.
///
/// Stationarity gives pᵢ ∝ 1/(η − sᵢ) with η > max s, and the active
/// constraint reduces to one equation in η,
///
/// ```text
/// D(η) = ln A − ln N + (1/N) Σ ln(η − sᵢ) = ε,     A = Σ 1/(η − sᵢ),
/// ```
///
/// with D strictly decreasing from +∞ to 0. It is solved by safeguarded
/// Newton in u = ln(η − max s). The returned weights attain the value; the
/// dual pair is λ = N/A and τ = η − λ, and the value equals τ.
pub fn burg_worst_case(s: &[f64], eps: f64) -> Result<(f64, Vec<f64>, f64, f64)> {
    let n = s.len();
    let nf = n as f64;
    let uniform = vec![1.0 / nf; n];
    let (lo, hi) = spread(s);
    if eps <= 0.0 || hi - lo <= 0.0 {
        let v = if hi - lo <= 0.0 { hi } else { mean(s) };
        return Ok((v, uniform, f64::INFINITY, v));
    }
    // d_i = η − s_i = δ + gap_i
    let gaps: Vec<f64> = s.iter().map(|&v| hi - v).collect();
    let g = |u: f64| -> (f64, f64) {
        let delta = u.exp();
        let mut a = 0.0;
        let mut a2 = 0.0;
        let mut logs = 0.0;
        for &gp in &gaps {
            let d = delta + gp;
            let inv = 1.0 / d;
            a += inv;
            a2 += inv * inv;
            logs += d.ln();
        }
        let dval = a.ln() - nf.ln() + logs / nf - eps;
        let slope = delta * (a / nf - a2 / a);
        (dval, slope)
    };
    let width = hi - lo;
    let mut u_lo = width.ln();
    let mut u_hi = u_lo;
    while g(u_lo).0 <= 0.0 {
        u_lo -= 2.0;
        if u_lo < -690.0 {
            // ε beyond what doubles resolve: essentially all mass on the max atoms
            let w = weights_at(&gaps, u_lo.exp());
            let v = dotp(&w, s);
            return Ok((v, w, 0.0, v));
        }
    }
    while g(u_hi).0 > 0.0 {
        u_hi += 2.0;
        if u_hi > 700.0 {
            return Err(TroError::BurgDualNonConvergence { iterations: 0, last: u_hi, residual: g(u_hi).0 });
        }
    }
    let mut u = 0.5 * (u_lo + u_hi);
    let mut last = (f64::NAN, f64::NAN);
    let mut converged = false;
    for _ in 0..NEWTON_CAP {
        let (val, slope) = g(u);
        last = (u, val);
        if val.abs() <= 1e-14 * (1.0 + eps) {
            converged = true;
            break;
        }
        if val > 0.0 {
            u_lo = u;
        } else {
            u_hi = u;
        }
        let mut next = if slope < 0.0 { u - val / slope } else { f64::NAN };
        if !(next > u_lo && next < u_hi) {
            next = 0.5 * (u_lo + u_hi);
        }
        if (u_hi - u_lo).abs() <= 1e-15 * (1.0 + u.abs()) {
            converged = true;
            break;
        }
        u = next;
    }
    if !converged {
        return Err(TroError::BurgDualNonConvergence {
            iterations: NEWTON_CAP,
            last: last.0,
            residual: last.1,
        });
    }
    let delta = u.exp();
    let w = weights_at(&gaps, delta);
    let a: f64 = gaps.iter().map(|gp| 1.0 / (delta + gp)).sum();
    let lambda = nf / a;
    let tau = hi + delta - lambda;
    Ok((dotp(&w, s), w, lambda, tau))
}

fn weights_at(gaps: &[f64], delta: f64) -> Vec<f64> {
    let inv: Vec<f64> = gaps.iter().map(|gp| 1.0 / (delta + gp)).collect();
    let a: f64 = inv.iter().sum();
    inv.iter().map(|v| v / a).collect()
}

fn dotp(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// τ + λε − (λ/N) Σ ln(1 − (sᵢ − τ)/λ); +∞ outside λ > max(sᵢ − τ), λ > 0.
pub fn burg_dual_objective(s: &[f64], eps: f64, tau: f64, lambda: f64) -> f64 {
    if !(lambda > 0.0) {
        return f64::INFINITY;
    }
    let nf = s.len() as f64;
    let mut acc = 0.0;
    for &v in s {
        let arg = 1.0 - (v - tau) / lambda;
        if !(arg > 0.0) {
            return f64::INFINITY;
        }
        acc += arg.ln();
    }
    tau + lambda * eps - lambda / nf * acc
}

/// The dual minimized directly: golden section on λ nested inside golden
/// section on τ. Slow; kept as an independent check on [`burg_worst_case`].
pub fn burg_dual_nested(s: &[f64], eps: f64) -> Result<f64> {
    let (lo, hi) = spread(s);
    let width = hi - lo;
    if eps <= 0.0 || width <= 0.0 {
        return Ok(if width <= 0.0 { hi } else { mean(s) });
    }
    let scale = 1.0 + hi.abs().max(lo.abs());
    let tol = 1e-12 * scale;
    let inner = |tau: f64| -> f64 {
        let lmin = (hi - tau).max(0.0);
        let lhi = lmin + width / eps + 1.0;
        let r = golden_section(|l| burg_dual_objective(s, eps, tau, l), lmin + 1e-12 * scale, lhi, tol * 1e-2 + 1e-15 * lhi);
        r.1
    };
    let (_, v) = golden_section(inner, lo - 1.0, hi + eps * width + 1.0, tol);
    if !v.is_finite() {
        return Err(TroError::BurgDualNonConvergence { iterations: 0, last: v, residual: f64::NAN });
    }
    Ok(v)
}

/// Greedy worst case over {p ∈ Δ : ‖p − 𝟙/N‖₁ ≤ ε}: move ε/2 of mass from
/// the smallest atoms onto the (first) largest one.
pub fn tv_greedy(s: &[f64], eps: f64) -> (f64, Vec<f64>) {
    let n = s.len();
    let nf = n as f64;
    let mut p = vec![1.0 / nf; n];
    if n == 1 || eps <= 0.0 {
        return (dotp(&p, s), p);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]).then(a.cmp(&b)));
    let top = *order
        .iter()
        .rev()
        .take_while(|&&i| s[i] == s[order[n - 1]])
        .last()
        .unwrap();
    let mut budget = (eps / 2.0).min(1.0 - 1.0 / nf);
    p[top] += budget;
    for &i in &order {
        if budget <= 0.0 {
            break;
        }
        if i == top {
            continue;
        }
        let take = budget.min(p[i]);
        p[i] -= take;
        budget -= take;
    }
    (dotp(&p, s), p)
}

/// The LP dual min τ + ελ + (1/N)Σ max(sᵢ − τ, −λ) over λ ≥ max(0, max s − τ),
/// evaluated exactly at its vertices τ = (max s + sⱼ)/2, λ = (max s − sⱼ)/2.
pub fn tv_dual(s: &[f64], eps: f64) -> f64 {
    let nf = s.len() as f64;
    let mut sorted = s.to_vec();
    sorted.sort_by(f64::total_cmp);
    let hi = *sorted.last().unwrap();
    // suffix sums of sorted values
    let mut suffix = vec![0.0; sorted.len() + 1];
    for i in (0..sorted.len()).rev() {
        suffix[i] = suffix[i + 1] + sorted[i];
    }
    let mut best = f64::INFINITY;
    for (j, &sj) in sorted.iter().enumerate() {
        if j > 0 && sorted[j - 1] == sj {
            continue;
        }
        let tau = 0.5 * (hi + sj);
        let lambda = 0.5 * (hi - sj);
        // atoms with sᵢ ≥ sⱼ contribute sᵢ − τ, the rest −λ
        let above = (sorted.len() - j) as f64;
        let below = j as f64;
        let v = tau + eps * lambda + (suffix[j] - above * tau - below * lambda) / nf;
        best = best.min(v);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burg_edge_cases() {
        let (v, w, _, _) = burg_worst_case(&[1.0, 2.0, 6.0], 0.0).unwrap();
        assert_eq!(v, 3.0);
        assert!(w.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(burg_worst_case(&[4.0; 5], 0.7).unwrap().0, 4.0);
    }

    #[test]
    fn burg_solution_is_on_the_boundary() {
        let s = [0.3, -1.2, 2.5, 0.9, 2.5, -0.4];
        for eps in [1e-4, 0.05, 0.5, 2.0, 10.0] {
            let (v, w, lambda, tau) = burg_worst_case(&s, eps).unwrap();
            let div = -w.iter().map(|p| (6.0 * p).ln()).sum::<f64>() / 6.0;
            assert!((div - eps).abs() < 1e-9 * (1.0 + eps), "eps {eps}: {div}");
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-14);
            assert!((v - tau).abs() < 1e-9);
            assert!((burg_dual_objective(&s, eps, tau, lambda) - v).abs() < 1e-9);
            assert!(v < 2.5 && v > s.iter().sum::<f64>() / 6.0);
        }
    }

    #[test]
    fn burg_nested_dual_agrees() {
        let s = [-40.0, -12.5, -60.0, -3.0, -25.0];
        for eps in [0.02, 0.4, 2.0] {
            let fast = burg_worst_case(&s, eps).unwrap().0;
            let slow = burg_dual_nested(&s, eps).unwrap();
            assert!((fast - slow).abs() < 1e-6 * 60.0, "{fast} {slow}");
        }
    }

    #[test]
    fn tv_greedy_matches_dual() {
        let s = [0.4, -0.1, 0.4, 2.0, 1.1, -0.1, 0.0];
        for eps in [0.0, 0.1, 0.5, 1.0, 1.7, 2.0] {
            let (g, p) = tv_greedy(&s, eps);
            assert!((g - tv_dual(&s, eps)).abs() < 1e-12, "eps {eps}");
            let tv: f64 = p.iter().map(|w| (w - 1.0 / 7.0).abs()).sum();
            assert!(tv <= eps + 1e-12);
            assert!(p.iter().all(|&w| w >= 0.0));
        }
        assert!((tv_greedy(&s, 2.0).0 - 2.0).abs() < 1e-12);
    }
}
