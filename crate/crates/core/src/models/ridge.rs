use nalgebra::{DMatrix, DVector};
use ndarray::{ArrayView1, ArrayView2, Axis};

use super::Fnv;

/// Linear model with an unpenalized intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct Ridge {
    intercept: f64,
    coef: Vec<f64>,
}

impl Ridge {
    /// Minimizes `||y - b - Xw||² + λ||w||²` on centered data. With `λ = 0`
    /// the minimum-norm least-squares solution is used.
    pub fn fit(x: ArrayView2<'_, f64>, y: ArrayView1<'_, f64>, penalty: f64) -> Self {
        let (n, d) = x.dim();
        let xbar = x.mean_axis(Axis(0)).expect("nonempty");
        let ybar = y.mean().expect("nonempty");
        let xc = DMatrix::from_fn(n, d, |i, j| x[[i, j]] - xbar[j]);
        let yc = DVector::from_fn(n, |i, _| y[i] - ybar);

        let w = if penalty > 0.0 {
            let mut gram = xc.tr_mul(&xc);
            for j in 0..d {
                gram[(j, j)] += penalty;
            }
            let rhs = xc.tr_mul(&yc);
            match gram.clone().cholesky() {
                Some(ch) => ch.solve(&rhs),
                None => gram
                    .svd(true, true)
                    .solve(&rhs, 1e-12)
                    .expect("svd with both factors"),
            }
        } else {
            let svd = xc.svd(true, true);
            let tol = 1e-10 * svd.singular_values.max().max(1.0);
            svd.solve(&yc, tol).expect("svd with both factors")
        };

        let coef: Vec<f64> = w.iter().copied().collect();
        let intercept = ybar - coef.iter().zip(xbar.iter()).map(|(c, m)| c * m).sum::<f64>();
        Self { intercept, coef }
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        self.intercept + self.coef.iter().zip(x.iter()).map(|(c, v)| c * v).sum::<f64>()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    pub(crate) fn hash_into(&self, h: &mut Fnv) {
        h.write(self.intercept.to_bits());
        for c in &self.coef {
            h.write(c.to_bits());
        }
    }
}
