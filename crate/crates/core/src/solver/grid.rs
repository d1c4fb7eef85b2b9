//! Element grids snapped to profile breakpoints.

/// Nodes on `[0, end]` with about `elements` cells, every breakpoint being a node.
///
/// Cells are shared among breakpoint intervals in proportion to their length
/// (largest remainder), with at least one cell per interval.
pub(crate) fn fit_grid(breakpoints: &[f64], end: f64, elements: usize) -> Vec<f64> {
    let tol = 1e-13 * end.max(1.0);
    let mut knots = vec![0.0];
    for &b in breakpoints {
        if b > *knots.last().unwrap() + tol && b < end - tol {
            knots.push(b);
        }
    }
    knots.push(end);
    let pieces = knots.len() - 1;
    let elements = elements.max(pieces);
    let shares: Vec<f64> = knots
        .windows(2)
        .map(|w| (w[1] - w[0]) / end * elements as f64)
        .collect();
    let mut counts: Vec<usize> = shares.iter().map(|s| (s.floor() as usize).max(1)).collect();
    let mut assigned: usize = counts.iter().sum();
    if assigned < elements {
        let mut order: Vec<usize> = (0..pieces).collect();
        order.sort_by(|&i, &j| {
            let ri = shares[i] - counts[i] as f64;
            let rj = shares[j] - counts[j] as f64;
            rj.total_cmp(&ri).then(i.cmp(&j))
        });
        for &i in order.iter().cycle() {
            if assigned == elements {
                break;
            }
            counts[i] += 1;
            assigned += 1;
        }
    }
    let mut nodes = Vec::with_capacity(assigned + 1);
    nodes.push(0.0);
    for (w, &c) in knots.windows(2).zip(&counts) {
        for j in 1..=c {
            nodes.push(if j == c {
                w[1]
            } else {
                w[0] + (w[1] - w[0]) * j as f64 / c as f64
            });
        }
    }
    nodes
}

/// Mirror of a half grid on `[0, c]` onto `[0, 2c]`.
pub(crate) fn mirror_grid(half: &[f64], length: f64) -> Vec<f64> {
    let mut nodes = half.to_vec();
    let last = half.len() - 1;
    nodes.extend(half[..last].iter().rev().map(|&x| length - x));
    nodes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn breakpoints_are_nodes() {
        let g = fit_grid(&[0.0, 0.3, 1.0], 1.0, 10);
        assert_eq!(g.len(), 11);
        assert!(g.contains(&0.3));
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tiny_pieces_get_a_cell() {
        let g = fit_grid(&[0.0, 1e-6, 1.0], 1.0, 16);
        assert_eq!(g[1], 1e-6);
        assert_eq!(g.len(), 17);
    }

    #[test]
    fn mirror_is_symmetric() {
        let g = mirror_grid(&[0.0, 0.25, 1.0], 2.0);
        assert_eq!(g, vec![0.0, 0.25, 1.0, 1.75, 2.0]);
    }
}
