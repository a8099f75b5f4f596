//! Entropies, mutual information, secrecy capacity, and the closed-form
//! noiseless-model bounds used as baselines.
//!
//! All quantities are in bits (log base 2). The secrecy-capacity search is a
//! deterministic grid search over the auxiliary-variable channel `U → X`;
//! the auxiliary cardinality is capped at `|X|`, so the result is an
//! approximation for non-degraded pairs.

use serde::{Deserialize, Serialize};

use crate::channel::{Distribution, Dmc, WiretapPair};
use crate::error::{Error, Result};

/// Default cap on grid points visited by `secrecy_capacity` / `is_less_noisy`.
pub const DEFAULT_GRID_BUDGET: u64 = 20_000_000;

/// Shannon entropy in bits, with the 0·log 0 = 0 convention.
pub fn entropy_bits(p: &Distribution) -> f64 {
    entropy_bits_slice(p.probs())
}

fn entropy_bits_slice(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// I(X;Y) for input distribution `input` over channel `channel`, computed
/// exactly from the joint.
pub fn mutual_information_bits(input: &Distribution, channel: &Dmc) -> Result<f64> {
    if input.len() != channel.input_size() {
        return Err(Error::parameter(format!(
            "input distribution over {} symbols, channel expects {}",
            input.len(),
            channel.input_size()
        )));
    }
    Ok(mutual_information_raw(input.probs(), channel.matrix()))
}

/// Core I(X;Y) on raw slices; rows must be stochastic.
fn mutual_information_raw(input: &[f64], rows: &[Vec<f64>]) -> f64 {
    let out_size = rows[0].len();
    let mut marginal = vec![0.0; out_size];
    for (x, row) in rows.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            marginal[y] += input[x] * p;
        }
    }
    let mut mi = 0.0;
    for (x, row) in rows.iter().enumerate() {
        if input[x] == 0.0 {
            continue;
        }
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 && marginal[y] > 0.0 {
                mi += input[x] * p * (p / marginal[y]).log2();
            }
        }
    }
    // tiny negatives from rounding
    mi.max(0.0)
}

/// I(X;Y) − I(X;Z) at a fixed input distribution; may be negative.
pub fn secrecy_rate_bits(input: &Distribution, pair: &WiretapPair) -> Result<f64> {
    let iy = mutual_information_bits(input, pair.main())?;
    let iz = mutual_information_bits(input, pair.wiretap())?;
    Ok(iy - iz)
}

/// L1 distance between two distributions; range [0, 2].
pub fn l1_distance(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::parameter(format!(
            "distributions have lengths {} and {}",
            p.len(),
            q.len()
        )));
    }
    Ok(l1_distance_slices(p.probs(), q.probs()))
}

pub(crate) fn l1_distance_slices(p: &[f64], q: &[f64]) -> f64 {
    p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum()
}

/// Result of the secrecy-capacity grid search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CapacityResult {
    /// Best achieved I(U;Y) − I(U;Z), clamped at 0.
    pub capacity_bits: f64,
    /// Input marginal P_X of the best grid point.
    pub best_input: Distribution,
    /// Best auxiliary (P_U, rows P(x|u)) when the auxiliary search is on.
    pub best_aux: Option<(Distribution, Vec<Vec<f64>>)>,
}

/// Closed-form lower bound on the cheating probability in the noiseless
/// multi-round model: 2^{−H(K)/(J+1)}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassicBounds {
    pub key_entropy_bits: f64,
    pub rounds: u32,
    pub pd_lower: f64,
}

/// 2^{−H(K)/(J+1)} for J authentication rounds under a noiseless channel.
pub fn classic_pd_lower(key_entropy_bits: f64, rounds: u32) -> Result<ClassicBounds> {
    if key_entropy_bits <= 0.0 || key_entropy_bits.is_nan() || !key_entropy_bits.is_finite() {
        return Err(Error::parameter(format!(
            "key entropy must be positive, got {key_entropy_bits}"
        )));
    }
    if rounds < 1 {
        return Err(Error::parameter("rounds must be at least 1"));
    }
    let pd_lower = 2f64.powf(-key_entropy_bits / (rounds as f64 + 1.0));
    Ok(ClassicBounds {
        key_entropy_bits,
        rounds,
        pd_lower,
    })
}

/// Noiseless-model attack lower bounds from a joint distribution over
/// (key, transmitted word): (2^{−I(K;W)}, 2^{−H(K|W)}).
pub fn noiseless_attack_lowers(joint_kw: &[Vec<f64>]) -> Result<(f64, f64)> {
    if joint_kw.is_empty() || joint_kw[0].is_empty() {
        return Err(Error::parameter("joint distribution must be non-empty"));
    }
    let w_size = joint_kw[0].len();
    let mut total = 0.0;
    for row in joint_kw {
        if row.len() != w_size {
            return Err(Error::parameter(
                "joint distribution rows have unequal lengths",
            ));
        }
        for &p in row {
            if p < 0.0 || !p.is_finite() {
                return Err(Error::parameter(
                    "joint entries must be finite and non-negative",
                ));
            }
            total += p;
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::parameter(format!(
            "joint sums to {total}, expected 1"
        )));
    }
    let pk: Vec<f64> = joint_kw.iter().map(|r| r.iter().sum()).collect();
    let mut pw = vec![0.0; w_size];
    for row in joint_kw {
        for (w, &p) in row.iter().enumerate() {
            pw[w] += p;
        }
    }
    let mut mi = 0.0;
    let mut h_k_given_w = 0.0;
    for (k, row) in joint_kw.iter().enumerate() {
        for (w, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (pk[k] * pw[w])).log2();
                h_k_given_w -= p * (p / pw[w]).log2();
            }
        }
    }
    mi = mi.max(0.0);
    h_k_given_w = h_k_given_w.max(0.0);
    Ok((2f64.powf(-mi), 2f64.powf(-h_k_given_w)))
}

/// Number of grid points on the `dim`-simplex with `steps` subdivisions:
/// C(steps + dim − 1, dim − 1).
fn simplex_grid_size(dim: usize, steps: usize) -> u64 {
    let mut result: u128 = 1;
    for i in 0..(dim - 1) {
        result = result.saturating_mul((steps + i + 1) as u128) / (i as u128 + 1);
    }
    result.min(u64::MAX as u128) as u64
}

/// Visits all compositions of `total` into `parts` non-negative integers in
/// lexicographic order.
fn for_each_composition<F: FnMut(&[usize])>(total: usize, parts: usize, f: &mut F) {
    fn rec<F: FnMut(&[usize])>(buf: &mut Vec<usize>, left: usize, parts_left: usize, f: &mut F) {
        if parts_left == 1 {
            buf.push(left);
            f(buf);
            buf.pop();
            return;
        }
        for v in 0..=left {
            buf.push(v);
            rec(buf, left - v, parts_left - 1, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(parts);
    rec(&mut buf, total, parts, f);
}

struct GridPoint<'a> {
    rate_main: f64,
    rate_wire: f64,
    p_u: &'a [f64],
    rows: &'a [Vec<f64>],
}

/// Walks the (P_U, P(x|u)) grid, invoking `visit` at every point with the
/// two mutual informations. `aux_cardinality == 1` means U = X.
fn grid_scan<F: FnMut(&GridPoint)>(
    pair: &WiretapPair,
    grid_resolution: f64,
    aux_cardinality: usize,
    budget: u64,
    visit: &mut F,
) -> Result<()> {
    if !(grid_resolution > 0.0 && grid_resolution <= 0.5) {
        return Err(Error::parameter(format!(
            "grid resolution {grid_resolution} outside (0, 0.5]"
        )));
    }
    let x_size = pair.input_size();
    if aux_cardinality < 1 || aux_cardinality > x_size {
        return Err(Error::parameter(format!(
            "aux cardinality {aux_cardinality} outside 1..=|X| ({x_size})"
        )));
    }
    let steps = (1.0 / grid_resolution).round() as usize;
    let points = if aux_cardinality == 1 {
        simplex_grid_size(x_size, steps)
    } else {
        let row_grid = simplex_grid_size(x_size, steps);
        let mut p = simplex_grid_size(aux_cardinality, steps);
        for _ in 0..aux_cardinality {
            p = p.saturating_mul(row_grid);
        }
        p
    };
    if points > budget {
        return Err(Error::resource(format!(
            "grid has {points} points, exceeding the budget of {budget}"
        )));
    }

    let step = 1.0 / steps as f64;
    if aux_cardinality == 1 {
        for_each_composition(steps, x_size, &mut |counts| {
            let px: Vec<f64> = counts.iter().map(|&c| c as f64 * step).collect();
            let iy = mutual_information_raw(&px, pair.main().matrix());
            let iz = mutual_information_raw(&px, pair.wiretap().matrix());
            let rows: Vec<Vec<f64>> = (0..x_size)
                .map(|u| {
                    (0..x_size)
                        .map(|x| if x == u { 1.0 } else { 0.0 })
                        .collect()
                })
                .collect();
            visit(&GridPoint {
                rate_main: iy,
                rate_wire: iz,
                p_u: &px,
                rows: &rows,
            });
        });
        return Ok(());
    }

    // enumerate all grids of conditional rows P(x|u), then all P_U
    let mut row_grid: Vec<Vec<f64>> = Vec::new();
    for_each_composition(steps, x_size, &mut |counts| {
        row_grid.push(counts.iter().map(|&c| c as f64 * step).collect());
    });

    let mut row_choice = vec![0usize; aux_cardinality];
    loop {
        let rows: Vec<Vec<f64>> = row_choice.iter().map(|&i| row_grid[i].clone()).collect();
        // effective channels U -> Y and U -> Z
        let eff = |base: &Dmc| -> Vec<Vec<f64>> {
            rows.iter()
                .map(|cond| {
                    let mut out = vec![0.0; base.output_size()];
                    for (x, &pxu) in cond.iter().enumerate() {
                        for (y, &p) in base.matrix()[x].iter().enumerate() {
                            out[y] += pxu * p;
                        }
                    }
                    out
                })
                .collect()
        };
        let eff_main = eff(pair.main());
        let eff_wire = eff(pair.wiretap());
        for_each_composition(steps, aux_cardinality, &mut |counts| {
            let pu: Vec<f64> = counts.iter().map(|&c| c as f64 * step).collect();
            let iy = mutual_information_raw(&pu, &eff_main);
            let iz = mutual_information_raw(&pu, &eff_wire);
            visit(&GridPoint {
                rate_main: iy,
                rate_wire: iz,
                p_u: &pu,
                rows: &rows,
            });
        });
        // odometer over row choices
        let mut i = aux_cardinality;
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            row_choice[i] += 1;
            if row_choice[i] < row_grid.len() {
                break;
            }
            row_choice[i] = 0;
        }
    }
}

/// Grid-search approximation of the secrecy capacity
/// `max_{U→X→YZ} [I(U;Y) − I(U;Z)]`, clamped at 0.
///
/// `aux_cardinality == 1` restricts to U = X (max over P_X only). The first
/// grid point attaining the maximum wins, so the argmax is deterministic.
pub fn secrecy_capacity(
    pair: &WiretapPair,
    grid_resolution: f64,
    aux_cardinality: usize,
) -> Result<CapacityResult> {
    secrecy_capacity_with_budget(pair, grid_resolution, aux_cardinality, DEFAULT_GRID_BUDGET)
}

pub fn secrecy_capacity_with_budget(
    pair: &WiretapPair,
    grid_resolution: f64,
    aux_cardinality: usize,
    budget: u64,
) -> Result<CapacityResult> {
    let x_size = pair.input_size();
    let mut best = f64::NEG_INFINITY;
    let mut best_pu: Vec<f64> = Vec::new();
    let mut best_rows: Vec<Vec<f64>> = Vec::new();
    grid_scan(pair, grid_resolution, aux_cardinality, budget, &mut |pt| {
        let rate = pt.rate_main - pt.rate_wire;
        if rate > best {
            best = rate;
            best_pu = pt.p_u.to_vec();
            best_rows = pt.rows.to_vec();
        }
    })?;
    // marginal P_X of the winning point
    let mut px = vec![0.0; x_size];
    for (u, &pu) in best_pu.iter().enumerate() {
        for (x, &pxu) in best_rows[u].iter().enumerate() {
            px[x] += pu * pxu;
        }
    }
    let best_input = Distribution::from_normalized(px);
    let best_aux = if aux_cardinality > 1 {
        Some((Distribution::from_normalized(best_pu), best_rows))
    } else {
        None
    };
    // snap float noise from the two mutual-information routes to a clean 0
    let capacity_bits = if best < 1e-9 { 0.0 } else { best };
    Ok(CapacityResult {
        capacity_bits,
        best_input,
        best_aux,
    })
}

/// Grid approximation of the "less noisy" test: true iff every tested
/// auxiliary with nonzero information satisfies I(U;Z) > I(U;Y).
///
/// The definition quantifies over all U; this decides it on the same finite
/// grid as `secrecy_capacity` and is therefore approximate.
pub fn is_less_noisy(
    pair: &WiretapPair,
    grid_resolution: f64,
    aux_cardinality: usize,
) -> Result<bool> {
    is_less_noisy_with_budget(pair, grid_resolution, aux_cardinality, DEFAULT_GRID_BUDGET)
}

pub fn is_less_noisy_with_budget(
    pair: &WiretapPair,
    grid_resolution: f64,
    aux_cardinality: usize,
    budget: u64,
) -> Result<bool> {
    const INFO_TOL: f64 = 1e-9;
    let mut holds = true;
    grid_scan(pair, grid_resolution, aux_cardinality, budget, &mut |pt| {
        if (pt.rate_main > INFO_TOL || pt.rate_wire > INFO_TOL) && pt.rate_wire <= pt.rate_main {
            holds = false;
        }
    })?;
    Ok(holds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::make_bsc;

    fn h2(p: f64) -> f64 {
        if p == 0.0 || p == 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    fn bsc_pair(pm: f64, pw: f64) -> WiretapPair {
        WiretapPair::new(make_bsc(pm).unwrap(), make_bsc(pw).unwrap()).unwrap()
    }

    #[test]
    fn entropy_values() {
        assert!((entropy_bits(&Distribution::uniform(4)) - 2.0).abs() < 1e-12);
        assert_eq!(
            entropy_bits(&Distribution::new(vec![1.0, 0.0, 0.0]).unwrap()),
            0.0
        );
        let h = entropy_bits(&Distribution::new(vec![0.9, 0.1]).unwrap());
        assert!((h - h2(0.1)).abs() < 1e-12);
        assert!((h - 0.46899).abs() < 1e-5);
    }

    #[test]
    fn mutual_information_bsc() {
        let u = Distribution::uniform(2);
        assert!(
            (mutual_information_bits(&u, &make_bsc(0.0).unwrap()).unwrap() - 1.0).abs() < 1e-12
        );
        assert!(
            mutual_information_bits(&u, &make_bsc(0.5).unwrap())
                .unwrap()
                .abs()
                < 1e-12
        );
        let mi = mutual_information_bits(&u, &make_bsc(0.1).unwrap()).unwrap();
        assert!((mi - (1.0 - h2(0.1))).abs() < 1e-12);
        assert!((mi - 0.53101).abs() < 1e-5);
        assert!(
            mutual_information_bits(&Distribution::uniform(3), &make_bsc(0.1).unwrap()).is_err()
        );
    }

    #[test]
    fn mutual_information_matches_joint_oracle() {
        // independent oracle: I = H(X) + H(Y) - H(X,Y) on the explicit joint
        let cases = [
            (
                vec![0.25, 0.75],
                vec![vec![0.8, 0.1, 0.1], vec![0.3, 0.3, 0.4]],
            ),
            (
                vec![0.5, 0.2, 0.3],
                vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.5, 0.5]],
            ),
        ];
        for (px, rows) in cases {
            let dmc = Dmc::new(rows.clone()).unwrap();
            let d = Distribution::new(px.clone()).unwrap();
            let mi = mutual_information_bits(&d, &dmc).unwrap();
            let joint: Vec<f64> = px
                .iter()
                .enumerate()
                .flat_map(|(x, &p)| rows[x].iter().map(move |&q| p * q))
                .collect();
            let hx = entropy_bits(&d);
            let hy = entropy_bits(&dmc.output_distribution(&d).unwrap());
            let hxy = -joint
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|&p| p * p.log2())
                .sum::<f64>();
            assert!((mi - (hx + hy - hxy)).abs() < 1e-10);
        }
    }

    #[test]
    fn secrecy_rate_values() {
        let u = Distribution::uniform(2);
        let r = secrecy_rate_bits(&u, &bsc_pair(0.1, 0.3)).unwrap();
        assert!((r - (h2(0.3) - h2(0.1))).abs() < 1e-12);
        assert!((r - 0.41230).abs() < 1e-5);
        let r = secrecy_rate_bits(&u, &bsc_pair(0.2, 0.2)).unwrap();
        assert!(r.abs() < 1e-12);
        let r = secrecy_rate_bits(&u, &bsc_pair(0.3, 0.1)).unwrap();
        assert!((r + 0.41230).abs() < 1e-5);
    }

    #[test]
    fn secrecy_capacity_identical_channels_is_zero() {
        let res = secrecy_capacity(&bsc_pair(0.2, 0.2), 0.05, 1).unwrap();
        assert_eq!(res.capacity_bits, 0.0);
    }

    #[test]
    fn secrecy_capacity_degraded_bsc_matches_closed_form() {
        let res = secrecy_capacity(&bsc_pair(0.1, 0.3), 0.01, 1).unwrap();
        let oracle = h2(0.3) - h2(0.1);
        assert!(
            (res.capacity_bits - oracle).abs() < 0.005,
            "{} vs {oracle}",
            res.capacity_bits
        );
        // uniform input is optimal for the symmetric pair
        assert!((res.best_input.get(0) - 0.5).abs() < 0.02);
    }

    #[test]
    fn secrecy_capacity_reversed_pair_is_zero() {
        let res = secrecy_capacity(&bsc_pair(0.3, 0.1), 0.01, 2).unwrap();
        assert_eq!(res.capacity_bits, 0.0);
        assert!(res.best_aux.is_some());
    }

    #[test]
    fn secrecy_capacity_budget_error_names_budget() {
        let err = secrecy_capacity_with_budget(&bsc_pair(0.1, 0.3), 0.01, 2, 10).unwrap_err();
        match err {
            Error::Resource(msg) => assert!(msg.contains("10"), "{msg}"),
            other => panic!("expected resource error, got {other}"),
        }
    }

    #[test]
    fn aux_enlargement_never_hurts() {
        for (pm, pw) in [(0.1, 0.3), (0.3, 0.1), (0.05, 0.4)] {
            let pair = bsc_pair(pm, pw);
            let c1 = secrecy_capacity(&pair, 0.05, 1).unwrap().capacity_bits;
            let c2 = secrecy_capacity(&pair, 0.05, 2).unwrap().capacity_bits;
            assert!(c1 <= c2 + 0.05 * 3.0, "pm={pm} pw={pw}: {c1} vs {c2}");
        }
    }

    #[test]
    fn degraded_pairs_match_binary_entropy_difference() {
        for (pm, pw) in [(0.05, 0.25), (0.1, 0.3), (0.02, 0.45)] {
            let res = 0.02;
            let c = secrecy_capacity(&bsc_pair(pm, pw), res, 1)
                .unwrap()
                .capacity_bits;
            let oracle = h2(pw) - h2(pm);
            assert!(
                (c - oracle).abs() < 3.0 * res,
                "pm={pm} pw={pw}: {c} vs {oracle}"
            );
        }
    }

    #[test]
    fn less_noisy_cases() {
        assert!(!is_less_noisy(&bsc_pair(0.1, 0.3), 0.02, 2).unwrap());
        assert!(is_less_noisy(&bsc_pair(0.3, 0.1), 0.02, 2).unwrap());
        assert!(!is_less_noisy(&bsc_pair(0.2, 0.2), 0.02, 2).unwrap());
    }

    #[test]
    fn l1_distance_cases() {
        let p = Distribution::new(vec![0.5, 0.5]).unwrap();
        assert_eq!(l1_distance(&p, &p).unwrap(), 0.0);
        let a = Distribution::new(vec![1.0, 0.0]).unwrap();
        let b = Distribution::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(l1_distance(&a, &b).unwrap(), 2.0);
        let q = Distribution::new(vec![0.75, 0.25]).unwrap();
        assert!((l1_distance(&p, &q).unwrap() - 0.5).abs() < 1e-12);
        assert!(l1_distance(&p, &Distribution::uniform(3)).is_err());
    }

    #[test]
    fn classic_pd_lower_values() {
        assert!((classic_pd_lower(2.0, 1).unwrap().pd_lower - 0.5).abs() < 1e-12);
        // 2^{-2/4} = 1/sqrt(2)
        assert!(
            (classic_pd_lower(2.0, 3).unwrap().pd_lower - std::f64::consts::FRAC_1_SQRT_2).abs()
                < 1e-12
        );
        assert!((classic_pd_lower(4.0, 1).unwrap().pd_lower - 0.25).abs() < 1e-12);
        assert!(classic_pd_lower(0.0, 1).is_err());
        assert!(classic_pd_lower(-1.0, 2).is_err());
    }

    #[test]
    fn classic_pd_lower_monotonicity() {
        let mut prev = 0.0;
        for j in 1..=6 {
            let b = classic_pd_lower(3.0, j).unwrap().pd_lower;
            assert!(b > prev);
            prev = b;
        }
        assert!(
            classic_pd_lower(2.0, 2).unwrap().pd_lower > classic_pd_lower(4.0, 2).unwrap().pd_lower
        );
    }

    #[test]
    fn noiseless_attack_lowers_cases() {
        // K independent of W, K uniform over 4, W uniform over 2
        let joint: Vec<Vec<f64>> = vec![vec![0.125, 0.125]; 4];
        let (pi, ps) = noiseless_attack_lowers(&joint).unwrap();
        assert!((pi - 1.0).abs() < 1e-12);
        assert!((ps - 0.25).abs() < 1e-12);
        // W = K deterministically
        let mut joint = vec![vec![0.0; 4]; 4];
        for (k, row) in joint.iter_mut().enumerate() {
            row[k] = 0.25;
        }
        let (pi, ps) = noiseless_attack_lowers(&joint).unwrap();
        assert!((pi - 0.25).abs() < 1e-12);
        assert!((ps - 1.0).abs() < 1e-12);
        // binary key observed through a 10% flip
        let joint = vec![vec![0.45, 0.05], vec![0.05, 0.45]];
        let (pi, ps) = noiseless_attack_lowers(&joint).unwrap();
        let i_kw = 1.0 - h2(0.1);
        let h_k_w = h2(0.1);
        assert!((pi - 2f64.powf(-i_kw)).abs() < 1e-12);
        assert!((ps - 2f64.powf(-h_k_w)).abs() < 1e-12);
        // malformed joints
        assert!(noiseless_attack_lowers(&[vec![0.5, 0.4]]).is_err());
        assert!(noiseless_attack_lowers(&[vec![1.2, -0.2]]).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_probs(len: usize) -> impl Strategy<Value = Vec<f64>> {
            proptest::collection::vec(0.01f64..1.0, len).prop_map(|w| {
                let s: f64 = w.iter().sum();
                w.into_iter().map(|x| x / s).collect()
            })
        }

        proptest! {
            #[test]
            fn mi_nonnegative_and_zero_for_products(px in arb_probs(3), py in arb_probs(3)) {
                // product channel: every row equals py, so output is independent of input
                let dmc = Dmc::new(vec![py.clone(), py.clone(), py]).unwrap();
                let d = Distribution::new(px).unwrap();
                let mi = mutual_information_bits(&d, &dmc).unwrap();
                prop_assert!(mi >= 0.0);
                prop_assert!(mi < 1e-10);
            }

            #[test]
            fn l1_is_a_metric(a in arb_probs(4), b in arb_probs(4), c in arb_probs(4)) {
                let (a, b, c) = (
                    Distribution::new(a).unwrap(),
                    Distribution::new(b).unwrap(),
                    Distribution::new(c).unwrap(),
                );
                let ab = l1_distance(&a, &b).unwrap();
                let ba = l1_distance(&b, &a).unwrap();
                prop_assert_eq!(ab, ba);
                let ac = l1_distance(&a, &c).unwrap();
                let cb = l1_distance(&c, &b).unwrap();
                prop_assert!(ab <= ac + cb + 1e-12);
                prop_assert!((0.0..=2.0).contains(&ab));
            }
        }
    }
}
