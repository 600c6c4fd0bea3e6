use super::{Assignment, HyperparameterSpec, ParamKind, TuneError};

/// Values spanning `[min, max]`, dense near both ends.
///
/// With `E = max(1, points / 4)`, each end contributes the endpoint plus
/// `E - 1` points at decade offsets `span * 10^-(E-i)`, `i = 1..E-1`,
/// from it. The remaining `points - 2E` values are spaced evenly across the
/// interior. The result is sorted and duplicate-free; integer axes are
/// rounded first. A single point, or `min == max`, yields `[min]`.
pub fn one_grid(min: f64, max: f64, points: usize, kind: ParamKind) -> Result<Vec<f64>, TuneError> {
    if !(min <= max) || !min.is_finite() || !max.is_finite() {
        return Err(TuneError::Config(format!("grid bounds [{min}, {max}] are invalid")));
    }
    if points == 0 {
        return Err(TuneError::Config("a grid needs at least one point".into()));
    }
    let round = |x: f64| match kind {
        ParamKind::Real => x,
        ParamKind::Integer => x.round(),
    };
    if points == 1 || min == max {
        return Ok(vec![round(min)]);
    }
    let span = max - min;
    let ends = (points / 4).max(1);
    let mut values = vec![min, max];
    for i in 1..ends {
        let offset = span * 10f64.powi(-((ends - i) as i32));
        values.push(min + offset);
        values.push(max - offset);
    }
    let interior = points.saturating_sub(2 * ends);
    for j in 1..=interior {
        values.push(min + span * j as f64 / (interior + 1) as f64);
    }
    let mut values: Vec<f64> = values
        .into_iter()
        .map(|v| round(v.clamp(min, max)))
        .collect();
    values.sort_by(f64::total_cmp);
    values.dedup();
    Ok(values)
}

/// Largest `b` with `b^h <= n`.
fn integer_root(n: usize, h: usize) -> usize {
    let fits = |b: usize| {
        (0..h)
            .try_fold(1usize, |acc, _| acc.checked_mul(b))
            .is_some_and(|p| p <= n)
    };
    let mut b = (n as f64).powf(1.0 / h as f64).round() as usize + 1;
    while b > 0 && !fits(b) {
        b -= 1;
    }
    b
}

fn cross(axes: &[Vec<f64>], specs: &[HyperparameterSpec]) -> Vec<Assignment> {
    let mut out = vec![Assignment::new()];
    for (axis, spec) in axes.iter().zip(specs) {
        out = out
            .iter()
            .flat_map(|a| axis.iter().map(move |&x| a.clone().with(&spec.name, spec.value(x))))
            .collect();
    }
    out
}

fn anchors(spec: &HyperparameterSpec) -> Vec<f64> {
    let round = |x: f64| match spec.kind {
        ParamKind::Real => x,
        ParamKind::Integer => x.round(),
    };
    let mut v = vec![round(spec.min), round(spec.max), round(spec.default)];
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// The tuning grid for `specs`, at most `gridsize` assignments.
///
/// `gridsize` is split evenly over `H + 1` sub-grids for `H` parameters:
/// for each parameter `i`, a fine axis of `max(1, per / 3^(H-1))` points
/// crossed with `{min, max, default}` of every other parameter; then a
/// balanced product with `max(2, floor(per^(1/H)))` points per axis. The
/// union keeps first occurrences in that order, so when it overflows
/// `gridsize` the truncation falls on the balanced product.
pub fn hyperparm_grid(
    specs: &[HyperparameterSpec],
    gridsize: usize,
) -> Result<Vec<Assignment>, TuneError> {
    if gridsize == 0 {
        return Err(TuneError::Config("gridsize must be positive".into()));
    }
    for s in specs {
        s.validate()?;
    }
    let h = specs.len();
    if h == 0 {
        return Ok(vec![Assignment::new()]);
    }
    let per = (gridsize / (h + 1)).max(1);
    let fine_points = (per / 3usize.saturating_pow(h as u32 - 1)).max(1);
    let balanced_points = integer_root(per, h).max(2);

    let mut grid: Vec<Assignment> = Vec::new();
    let push_all = |items: Vec<Assignment>, grid: &mut Vec<Assignment>| {
        for a in items {
            if !grid.contains(&a) {
                grid.push(a);
            }
        }
    };
    for i in 0..h {
        let axes: Vec<Vec<f64>> = specs
            .iter()
            .enumerate()
            .map(|(j, s)| {
                if i == j {
                    one_grid(s.min, s.max, fine_points, s.kind)
                } else {
                    Ok(anchors(s))
                }
            })
            .collect::<Result<_, _>>()?;
        push_all(cross(&axes, specs), &mut grid);
    }
    let axes: Vec<Vec<f64>> = specs
        .iter()
        .map(|s| one_grid(s.min, s.max, balanced_points, s.kind))
        .collect::<Result<_, _>>()?;
    push_all(cross(&axes, specs), &mut grid);
    grid.truncate(gridsize);
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tuner::ParamValue;
    use proptest::prelude::*;

    #[test]
    fn two_points_are_the_endpoints() {
        assert_eq!(one_grid(0.0, 1.0, 2, ParamKind::Real).unwrap(), vec![0.0, 1.0]);
    }

    #[test]
    fn small_integer_range_collapses() {
        assert_eq!(one_grid(1.0, 3.0, 10, ParamKind::Integer).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn endpoint_clusters_use_decade_offsets() {
        let g = one_grid(0.0, 1.0, 12, ParamKind::Real).unwrap();
        // E = 3: 0, 0.01, 0.1 ... 0.9, 0.99, 1 and six interior points.
        assert_eq!(g.len(), 12);
        let expected = [0.0, 0.01, 0.1, 0.9, 0.99, 1.0];
        let got = [g[0], g[1], g[2], g[9], g[10], g[11]];
        for (e, v) in expected.iter().zip(got) {
            assert!((e - v).abs() < 1e-12, "{g:?}");
        }
    }

    #[test]
    fn cooling_rate_axis_keeps_one() {
        let g = one_grid(0.5, 1.0, 8, ParamKind::Real).unwrap();
        assert_eq!(g.first(), Some(&0.5));
        assert_eq!(g.last(), Some(&1.0));
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(one_grid(2.0, 5.0, 1, ParamKind::Real).unwrap(), vec![2.0]);
        assert_eq!(one_grid(3.0, 3.0, 9, ParamKind::Real).unwrap(), vec![3.0]);
        assert!(one_grid(1.0, 0.0, 4, ParamKind::Real).is_err());
        assert!(one_grid(0.0, 1.0, 0, ParamKind::Real).is_err());
    }

    #[test]
    fn no_parameters_gives_single_empty_assignment() {
        assert_eq!(hyperparm_grid(&[], 100).unwrap(), vec![Assignment::new()]);
    }

    #[test]
    fn one_parameter_grid_is_deduplicated_union() {
        let spec = HyperparameterSpec::real("T", 0.01, 2.0, 0.5);
        let grid = hyperparm_grid(&[spec], 10).unwrap();
        let values: Vec<f64> = grid.iter().map(|a| a.get("T").unwrap().as_f64()).collect();
        assert!(values.contains(&0.01) && values.contains(&2.0));
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        sorted.dedup();
        assert_eq!(sorted.len(), values.len());
        assert!(values.len() <= 10);
    }

    #[test]
    fn two_parameter_grid_contains_all_anchors() {
        let specs = [
            HyperparameterSpec::real("T0", 0.01, 2.0, 0.5),
            HyperparameterSpec::real("cooling_rate", 0.5, 1.0, 0.99),
        ];
        let grid = hyperparm_grid(&specs, 1000).unwrap();
        assert!(grid.len() <= 1000);
        for s in &specs {
            for target in [s.min, s.max, s.default] {
                assert!(
                    grid.iter().any(|a| a.get(&s.name).unwrap().as_f64() == target),
                    "{} lacks {target}",
                    s.name
                );
            }
        }
    }

    #[test]
    fn integer_parameters_hold_integers() {
        let specs = [
            HyperparameterSpec::integer("population", 10, 500, 100),
            HyperparameterSpec::real("mutation_rate", 0.01, 1.0, 0.2),
        ];
        for a in hyperparm_grid(&specs, 100).unwrap() {
            assert!(matches!(a.get("population"), Some(ParamValue::Int(_))));
            assert_eq!(a.len(), 2);
        }
    }

    #[test]
    fn integer_root_is_floor() {
        assert_eq!(integer_root(50, 1), 50);
        assert_eq!(integer_root(25, 2), 5);
        assert_eq!(integer_root(26, 3), 2);
        assert_eq!(integer_root(27, 3), 3);
        assert_eq!(integer_root(1, 4), 1);
    }

    proptest! {
        #[test]
        fn one_grid_is_sorted_unique_and_bracketed(
            min in -1e3f64..1e3,
            width in 0.0f64..1e3,
            points in 1usize..60,
            integer in any::<bool>(),
        ) {
            let max = min + width;
            let kind = if integer { ParamKind::Integer } else { ParamKind::Real };
            let g = one_grid(min, max, points, kind).unwrap();
            prop_assert!(!g.is_empty() && g.len() <= points);
            prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
            let (lo, hi) = if integer { (min.round(), max.round()) } else { (min, max) };
            prop_assert!(g.iter().all(|&v| lo <= v && v <= hi));
            if points >= 2 {
                prop_assert_eq!(g[0], lo);
                prop_assert_eq!(*g.last().unwrap(), hi);
            }
        }

        #[test]
        fn grid_never_exceeds_gridsize(gridsize in 1usize..400, h in 0usize..4) {
            let specs: Vec<_> = (0..h)
                .map(|i| HyperparameterSpec::real(&format!("p{i}"), 0.0, 1.0 + i as f64, 0.5))
                .collect();
            let grid = hyperparm_grid(&specs, gridsize).unwrap();
            prop_assert!(!grid.is_empty() && grid.len() <= gridsize.max(1));
        }
    }
}
