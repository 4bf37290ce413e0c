use crate::error::{Error, Result};
use crate::geometry::Region;
use crate::quadrature::{deterministic_sum, Cell, GridSpec, TestFunction};

/// Midpoint rule over precomputed cells, optionally masked to the cells
/// whose center lies in `region`.
pub fn integrate_cells<F>(f: F, cells: &[Cell], region: Option<&dyn Region>) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    deterministic_sum(cells.len(), |i| {
        let c = &cells[i];
        if let Some(r) = region {
            if !r.contains(&c.center) {
                return Ok(0.0);
            }
        }
        let v = f(&c.center);
        if !v.is_finite() {
            return Err(Error::NonFinite {
                node: c.center.clone(),
                value: v,
            });
        }
        Ok(v * c.weight)
    })
}

/// Tensor midpoint rule with compensated, thread-count independent summation.
pub fn integrate<F>(f: F, grid: &GridSpec, region: Option<&dyn Region>) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    integrate_cells(f, &grid.cells(), region)
}

/// `(int_region |u|^p)^{1/p}` over the cells of `grid` inside `region`.
pub fn lp_norm(u: &TestFunction, region: &dyn Region, p: f64, grid: &GridSpec) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::param(format!("L^p exponent {p} must be >= 1")));
    }
    Ok(integrate(|x| u.value(x).abs().powf(p), grid, Some(region))?.powf(1.0 / p))
}

/// Mean of `u` over the cells of `grid` inside `region`.
pub fn average(u: &TestFunction, region: &dyn Region, grid: &GridSpec) -> Result<f64> {
    let cells = grid.cells();
    let measure = integrate_cells(|_| 1.0, &cells, Some(region))?;
    if measure <= 0.0 {
        return Err(Error::param(
            "averaging region has zero measure on this grid",
        ));
    }
    Ok(integrate_cells(|x| u.value(x), &cells, Some(region))? / measure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{BoxRegion, Domain};
    use crate::quadrature::Monomial;

    fn unit(d: usize) -> BoxRegion {
        BoxRegion::new(vec![0.0; d], vec![1.0; d]).unwrap()
    }

    fn x_power(k: u32) -> TestFunction {
        TestFunction::Polynomial {
            terms: vec![Monomial {
                coeff: 1.0,
                powers: vec![k],
            }],
            cutoff: None,
        }
    }

    #[test]
    fn constants_and_linear_are_exact() {
        for n in [8, 32, 128] {
            let g = GridSpec::uniform(unit(2), n).unwrap();
            assert_eq!(integrate(|_| 1.0, &g, None).unwrap(), 1.0);
        }
        let g = GridSpec::uniform(unit(1), 64).unwrap();
        assert!((integrate(|x| x[0], &g, None).unwrap() - 0.5).abs() < 1e-12);
    }

    /// Midpoint error for x^2 is exactly 1/(12 N^2); the observed order is 2.
    #[test]
    fn quadratic_converges_at_second_order() {
        let err = |n| {
            let g = GridSpec::uniform(unit(1), n).unwrap();
            (integrate(|x| x[0] * x[0], &g, None).unwrap() - 1.0 / 3.0).abs()
        };
        let slope = (err(32) / err(64)).log2();
        assert!((slope - 2.0).abs() < 1e-6, "slope {slope}");
        assert!((err(64) - 1.0 / (12.0 * 64.0 * 64.0)).abs() < 1e-14);
    }

    #[test]
    fn non_finite_reports_node() {
        let g = GridSpec::uniform(unit(1), 8).unwrap();
        let e = integrate(|x| 1.0 / (x[0] - 0.5625), &g, None).unwrap_err();
        assert!(matches!(e, Error::NonFinite { ref node, .. } if node == &vec![0.5625]));
    }

    #[test]
    fn norms_and_averages() {
        let dom = Domain::Box(BoxRegion::new(vec![0.0, 0.0], vec![2.0, 1.0]).unwrap());
        let g = GridSpec::uniform(Region::bounding_box(&dom).unwrap(), 16).unwrap();
        let v = lp_norm(&TestFunction::constant(3.0), &dom, 2.0, &g).unwrap();
        assert!((v - 3.0 * 2f64.sqrt()).abs() < 1e-13);
        assert_eq!(
            lp_norm(&TestFunction::constant(0.0), &dom, 2.0, &g).unwrap(),
            0.0
        );
        assert!((average(&TestFunction::constant(-1.5), &dom, &g).unwrap() + 1.5).abs() < 1e-15);

        let line = Domain::Box(unit(1));
        let g1 = GridSpec::uniform(unit(1), 64).unwrap();
        assert!((average(&x_power(1), &line, &g1).unwrap() - 0.5).abs() < 1e-14);
        let (a, b) = (0.25, 0.75);
        let ab = BoxRegion::new(vec![a], vec![b]).unwrap();
        let g2 = GridSpec::uniform(ab.clone(), 128).unwrap();
        let exact = (b * b * b - a * a * a) / (3.0 * (b - a));
        assert!((average(&x_power(2), &ab, &g2).unwrap() - exact).abs() < 1e-5);
        let empty = BoxRegion::new(vec![2.0], vec![3.0]).unwrap();
        assert!(average(&x_power(1), &empty, &g1).is_err());
    }

    #[test]
    fn bump_norm_self_converges() {
        let line = Domain::Box(unit(1));
        let u = TestFunction::bump(vec![0.5], vec![0.25]);
        let coarse = lp_norm(&u, &line, 2.0, &GridSpec::uniform(unit(1), 64).unwrap()).unwrap();
        let fine = lp_norm(&u, &line, 2.0, &GridSpec::uniform(unit(1), 256).unwrap()).unwrap();
        assert!((coarse - fine).abs() / fine < 1e-3);
    }
}
