use super::RootCountReport;
use crate::error::{Error, Result};
use crate::game_model::{CoefficientSystem, ExponentSpace};

/// Relative pivot size below which the matrix is treated as singular.
const SINGULAR_PIVOT: f64 = 1e-13;

/// Internal equilibria of a two-player (`d = 2`) game: the system is affine
/// in `y`, so there is at most one equilibrium.
pub fn solve_linear(system: &CoefficientSystem) -> Result<RootCountReport> {
    if system.d() != 2 {
        return Err(Error::Contract(format!(
            "linear solve needs d = 2, got d = {}",
            system.d()
        )));
    }
    let m = system.n() - 1;
    let space = ExponentSpace::new(system.n(), 2)?;
    let zero = space.rank(&vec![0; m])?;
    let unit: Vec<usize> = (0..m)
        .map(|j| {
            let mut k = vec![0; m];
            k[j] = 1;
            space.rank(&k)
        })
        .collect::<Result<_>>()?;

    // augmented rows [A | -c]
    let mut a: Vec<Vec<f64>> = system
        .equations()
        .iter()
        .map(|eq| {
            let mut row: Vec<f64> = unit.iter().map(|&r| eq[r]).collect();
            row.push(-eq[zero]);
            row
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r[..m].iter())
        .fold(0.0f64, |s, v| s.max(v.abs()));
    let singular = || RootCountReport {
        count: 0,
        degenerate: true,
        ..RootCountReport::empty()
    };
    if scale == 0.0 {
        return Ok(singular());
    }
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[piv][col].abs() <= SINGULAR_PIVOT * scale {
            return Ok(singular());
        }
        a.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            if f != 0.0 {
                for k in col..=m {
                    a[row][k] -= f * a[col][k];
                }
            }
        }
    }
    let mut y = vec![0.0; m];
    for row in (0..m).rev() {
        let s: f64 = (row + 1..m).map(|k| a[row][k] * y[k]).sum();
        y[row] = (a[row][m] - s) / a[row][row];
    }
    let positive = y.iter().all(|&v| v > 0.0);
    Ok(RootCountReport {
        count: usize::from(positive),
        solutions: if positive { vec![y] } else { vec![] },
        ..RootCountReport::empty()
    })
}
