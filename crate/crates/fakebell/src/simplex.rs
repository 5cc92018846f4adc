//! Small deterministic Nelder-Mead maximizer for the low-dimensional,
//! smooth angle searches in this crate.
//!
//! Objectives may return `None` for points outside their domain; such points
//! are never selected and the simplex contracts away from them.

/// Termination settings for [`maximize`].
#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    /// Stop once the function spread across the simplex falls below
    /// `rel_tol · (|f_best| + abs_floor)`.
    pub rel_tol: f64,
    /// Absolute floor entering the convergence test.
    pub abs_floor: f64,
    /// Hard cap on objective evaluations.
    pub max_evals: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_floor: 1e-12,
            max_evals: 2000,
            initial_step: 0.05,
        }
    }
}

/// Result of a simplex search.
#[derive(Debug, Clone)]
pub struct SimplexResult {
    /// Best point found.
    pub x: Vec<f64>,
    /// Objective value at `x`.
    pub value: f64,
    /// Number of objective evaluations spent.
    pub evaluations: usize,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Maximize `f` starting from `x0` with the standard reflect/expand/contract/
/// shrink moves. Fully deterministic for a fixed starting point.
pub fn maximize<F>(mut f: F, x0: &[f64], opts: &SimplexOptions) -> SimplexResult
where
    F: FnMut(&[f64]) -> Option<f64>,
{
    let dim = x0.len();
    assert!(dim >= 1, "simplex search needs at least one coordinate");
    let mut evals = 0usize;
    let mut eval = |x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        f(x).unwrap_or(f64::NEG_INFINITY)
    };

    // Initial simplex: x0 plus one step along each axis.
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    points.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += opts.initial_step;
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p, &mut evals)).collect();

    // Track the best point ever seen, in case a later shrink walks away.
    let mut best_x = points[0].clone();
    let mut best_v = values[0];
    let note_best = |x: &[f64], v: f64, best_x: &mut Vec<f64>, best_v: &mut f64| {
        if v > *best_v {
            *best_v = v;
            best_x.clear();
            best_x.extend_from_slice(x);
        }
    };
    for (p, &v) in points.iter().zip(values.iter()) {
        note_best(p, v, &mut best_x, &mut best_v);
    }

    while evals < opts.max_evals {
        // Order so that index 0 is best (largest), index dim is worst.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(std::cmp::Ordering::Equal));
        let points_sorted: Vec<Vec<f64>> = order.iter().map(|&i| points[i].clone()).collect();
        let values_sorted: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        points = points_sorted;
        values = values_sorted;

        let f_best = values[0];
        let f_worst = values[dim];
        // Converge on the function spread, but only once the simplex itself
        // is small; equal values on a still-wide simplex (vertices straddling
        // a peak) must keep contracting.
        if f_worst.is_finite()
            && (f_best - f_worst).abs() <= opts.rel_tol * (f_best.abs() + opts.abs_floor)
        {
            let scale = 1.0 + points[0].iter().fold(0.0f64, |m, x| m.max(x.abs()));
            let diameter = points[1..]
                .iter()
                .flat_map(|p| p.iter().zip(points[0].iter()).map(|(a, b)| (a - b).abs()))
                .fold(0.0f64, f64::max);
            if diameter <= 1e-5 * scale {
                break;
            }
        }

        // Centroid of all but the worst vertex.
        let mut centroid = vec![0.0; dim];
        for p in points.iter().take(dim) {
            for (c, x) in centroid.iter_mut().zip(p.iter()) {
                *c += x;
            }
        }
        for c in centroid.iter_mut() {
            *c /= dim as f64;
        }

        let blend = |alpha: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(points[dim].iter())
                .map(|(c, w)| c + alpha * (c - w))
                .collect()
        };

        let reflected = blend(REFLECT);
        let f_reflected = eval(&reflected, &mut evals);
        note_best(&reflected, f_reflected, &mut best_x, &mut best_v);

        if f_reflected > values[0] {
            let expanded = blend(EXPAND);
            let f_expanded = eval(&expanded, &mut evals);
            note_best(&expanded, f_expanded, &mut best_x, &mut best_v);
            if f_expanded > f_reflected {
                points[dim] = expanded;
                values[dim] = f_expanded;
            } else {
                points[dim] = reflected;
                values[dim] = f_reflected;
            }
            continue;
        }
        if f_reflected > values[dim - 1] {
            points[dim] = reflected;
            values[dim] = f_reflected;
            continue;
        }

        let contracted = if f_reflected > values[dim] {
            blend(CONTRACT)
        } else {
            blend(-CONTRACT)
        };
        let f_contracted = eval(&contracted, &mut evals);
        note_best(&contracted, f_contracted, &mut best_x, &mut best_v);
        if f_contracted > values[dim].max(f_reflected) {
            points[dim] = contracted;
            values[dim] = f_contracted;
            continue;
        }

        // Shrink toward the best vertex.
        for i in 1..=dim {
            let shrunk: Vec<f64> = points[0]
                .iter()
                .zip(points[i].iter())
                .map(|(b, p)| b + SHRINK * (p - b))
                .collect();
            let f_shrunk = eval(&shrunk, &mut evals);
            note_best(&shrunk, f_shrunk, &mut best_x, &mut best_v);
            points[i] = shrunk;
            values[i] = f_shrunk;
        }
    }

    SimplexResult {
        x: best_x,
        value: best_v,
        evaluations: evals,
    }
}
