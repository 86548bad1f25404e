//! Derivative-free simplex minimization (Nelder–Mead).
//!
//! Standard coefficients: reflection 1, expansion 2, contraction 1/2,
//! shrink 1/2. The stopping rule mirrors the classic `fminsearch` one: stop
//! once the simplex is small in both `x` and `f`, or the iteration budget
//! runs out.

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop when the simplex diameter falls below this...
    pub x_tol: f64,
    /// ...and the spread of vertex values falls below this.
    pub f_tol: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self { max_iter: 200, x_tol: 1e-6, f_tol: f64::INFINITY }
    }
}

#[derive(Debug, Clone)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    /// Best value after each iteration (index 0 is the initial simplex).
    pub trace: Vec<f64>,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..simplex.len() {
        for j in i + 1..simplex.len() {
            let s = simplex[i]
                .iter()
                .zip(&simplex[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            d = d.max(s);
        }
    }
    d
}

/// Minimizes `f` starting from `x0`; the initial simplex is `x0` plus one
/// vertex per coordinate offset by `steps[i]`.
pub fn nelder_mead<F>(mut f: F, x0: &[f64], steps: &[f64], opts: &NelderMeadOptions) -> NelderMeadResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = x0.len();
    assert_eq!(steps.len(), dim, "one step per coordinate");
    let mut evaluations = 0;
    let mut eval = |x: &[f64]| {
        evaluations += 1;
        sanitize(f(x))
    };

    if dim == 0 {
        let v = eval(x0);
        return NelderMeadResult {
            x: vec![],
            f: v,
            iterations: 0,
            evaluations: 1,
            converged: true,
            trace: vec![v],
        };
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += steps[i];
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|x| eval(x)).collect();

    let mut order: Vec<usize> = (0..=dim).collect();
    let sort = |order: &mut Vec<usize>, values: &[f64]| {
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    };
    sort(&mut order, &values);

    let mut trace = vec![values[order[0]]];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iter {
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        let spread = values[worst] - values[best];
        if diameter(&simplex) <= opts.x_tol && (opts.f_tol.is_infinite() || spread <= opts.f_tol) {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; dim];
        for &k in &order[..dim] {
            for (c, x) in centroid.iter_mut().zip(&simplex[k]) {
                *c += x / dim as f64;
            }
        }
        let along = |t: f64, from: &[f64]| -> Vec<f64> {
            centroid.iter().zip(from).map(|(c, x)| c + t * (c - x)).collect()
        };

        let xr = along(REFLECT, &simplex[worst]);
        let fr = eval(&xr);
        let mut shrink = false;
        if fr < values[best] {
            let xe = along(REFLECT * EXPAND, &simplex[worst]);
            let fe = eval(&xe);
            if fe < fr {
                simplex[worst] = xe;
                values[worst] = fe;
            } else {
                simplex[worst] = xr;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = xr;
            values[worst] = fr;
        } else if fr < values[worst] {
            let xc = along(REFLECT * CONTRACT, &simplex[worst]);
            let fc = eval(&xc);
            if fc <= fr {
                simplex[worst] = xc;
                values[worst] = fc;
            } else {
                shrink = true;
            }
        } else {
            let xcc = along(-CONTRACT, &simplex[worst]);
            let fcc = eval(&xcc);
            if fcc < values[worst] {
                simplex[worst] = xcc;
                values[worst] = fcc;
            } else {
                shrink = true;
            }
        }

        if shrink {
            let anchor = simplex[best].clone();
            for &k in &order[1..] {
                let v: Vec<f64> = anchor.iter().zip(&simplex[k]).map(|(a, x)| a + SHRINK * (x - a)).collect();
                values[k] = eval(&v);
                simplex[k] = v;
            }
        }

        sort(&mut order, &values);
        trace.push(values[order[0]]);
    }

    let best = order[0];
    NelderMeadResult {
        x: simplex[best].clone(),
        f: values[best],
        iterations,
        evaluations,
        converged,
        trace,
    }
}
