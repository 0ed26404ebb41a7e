use crate::error::{invalid, Result};
use crate::indices::YoudenResult;
use crate::numeric::{check_sample, sample_dirichlet_uniform, ProbGrid, SeedSpec};

use super::PosteriorEnsemble;

/// Bayesian bootstrap ROC ensemble.
///
/// Each draw reweights the nondiseased outcomes with `q1 ~ Dirichlet(1..1)`
/// to get placement values `U_j = sum_i q1_i I(y_Dbar_i >= y_Dj)`, then
/// reweights the diseased with `q2 ~ Dirichlet(1..1)`:
/// `ROC(p) = sum_j q2_j I(U_j <= p)` and `AUC = 1 - sum_j q2_j U_j`.
///
/// Draw `s` uses the RNG stream `seed.substream(s)`, so every draw is
/// reproducible on its own.
pub fn bb_roc(
    diseased: &[f64],
    nondiseased: &[f64],
    draws: usize,
    grid: &ProbGrid,
    seed: &SeedSpec,
) -> Result<PosteriorEnsemble> {
    check_sample("diseased", diseased)?;
    check_sample("nondiseased", nondiseased)?;
    if draws == 0 {
        return invalid("number of Bayesian bootstrap draws must be positive");
    }
    let mut nd_order: Vec<usize> = (0..nondiseased.len()).collect();
    nd_order.sort_by(|&a, &b| nondiseased[a].total_cmp(&nondiseased[b]));
    let nd_sorted: Vec<f64> = nd_order.iter().map(|&i| nondiseased[i]).collect();
    // index into nd_sorted of the first value >= y_Dj
    let first_ge: Vec<usize> = diseased
        .iter()
        .map(|&y| nd_sorted.partition_point(|&v| v < y))
        .collect();

    let mut pooled: Vec<(f64, bool, usize)> = diseased
        .iter()
        .enumerate()
        .map(|(j, &y)| (y, true, j))
        .chain(nondiseased.iter().enumerate().map(|(i, &y)| (y, false, i)))
        .collect();
    pooled.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut curves = Vec::with_capacity(draws);
    let mut aucs = Vec::with_capacity(draws);
    let mut youden = Vec::with_capacity(draws);
    let mut suffix = vec![0.0; nd_sorted.len() + 1];
    for s in 0..draws {
        let mut rng = seed.substream(s as u64).rng();
        let q1 = sample_dirichlet_uniform(&mut rng, nondiseased.len())?;
        let q2 = sample_dirichlet_uniform(&mut rng, diseased.len())?;

        for k in (0..nd_sorted.len()).rev() {
            suffix[k] = suffix[k + 1] + q1[nd_order[k]];
        }
        let mut placements: Vec<(f64, f64)> = first_ge
            .iter()
            .zip(&q2)
            .map(|(&k, &w)| (suffix[k].clamp(0.0, 1.0), w))
            .collect();
        let auc = 1.0 - placements.iter().map(|(u, w)| u * w).sum::<f64>();
        placements.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut cum = Vec::with_capacity(placements.len());
        let mut acc = 0.0;
        for &(_, w) in &placements {
            acc += w;
            cum.push(acc);
        }
        let curve = grid
            .points()
            .iter()
            .map(|&p| {
                let k = placements.partition_point(|&(u, _)| u <= p);
                if k == 0 {
                    0.0
                } else if k == placements.len() {
                    1.0
                } else {
                    cum[k - 1].clamp(0.0, 1.0)
                }
            })
            .collect();
        curves.push(curve);
        aucs.push(auc.clamp(0.0, 1.0));
        youden.push(weighted_youden(&pooled, &q2, &q1));
    }
    Ok(PosteriorEnsemble {
        grid: grid.clone(),
        curves,
        aucs,
        youden: Some(youden),
    })
}

/// `max_c {F_Dbar(c) - F_D(c)}` for two weighted step CDFs, evaluated at
/// every pooled observation (smallest maximizer wins).
fn weighted_youden(pooled: &[(f64, bool, usize)], w_d: &[f64], w_nd: &[f64]) -> YoudenResult {
    let (mut f_d, mut f_nd) = (0.0, 0.0);
    let mut best = YoudenResult {
        yi: 0.0,
        c_star: pooled[0].0,
        p_star: 1.0,
        below_chance: false,
    };
    let mut i = 0;
    while i < pooled.len() {
        let c = pooled[i].0;
        while i < pooled.len() && pooled[i].0 == c {
            let (_, is_d, idx) = pooled[i];
            if is_d {
                f_d += w_d[idx];
            } else {
                f_nd += w_nd[idx];
            }
            i += 1;
        }
        let diff = f_nd - f_d;
        if diff > best.yi {
            best = YoudenResult {
                yi: diff,
                c_star: c,
                p_star: (1.0 - f_nd).clamp(0.0, 1.0),
                below_chance: false,
            };
        }
    }
    best
}
