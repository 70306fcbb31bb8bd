use super::parties::{check_dims, reduced_density_parties, su2_invariant_basis, u1_eigenspaces, TOTAL_DIM_LIMIT};
use super::Symmetry;
use crate::par::{self, Exec};
use crate::{CMatrix, HitError, Result, C64};
use argmin::core::{CostFunction, Executor, State};
use argmin::solver::neldermead::NelderMead;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

fn hs_dist_sqr(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm_sqr()).sum()
}

/// D(ψ) = Σ_{k<l} ‖ρ_kl − 𝟙/(d_k d_l)‖², zero iff ψ is 2-uniform.
pub fn two_uniform_deviation(state: &[C64], dims: &[usize]) -> Result<f64> {
    check_dims(dims, state.len(), usize::MAX)?;
    let n = dims.len();
    let mut acc = 0.0;
    for k in 0..n {
        for l in k + 1..n {
            let rho = reduced_density_parties(state, dims, &[k, l])?;
            let d = dims[k] * dims[l];
            acc += hs_dist_sqr(&rho, &(CMatrix::identity(d, d) / C64::new(d as f64, 0.0)));
        }
    }
    Ok(acc)
}

/// max_k ‖ρ_k − 𝟙/d_k‖, zero iff ψ is 1-uniform.
pub fn one_uniform_deviation(state: &[C64], dims: &[usize]) -> Result<f64> {
    check_dims(dims, state.len(), usize::MAX)?;
    let mut worst: f64 = 0.0;
    for (k, &d) in dims.iter().enumerate() {
        let rho = reduced_density_parties(state, dims, &[k])?;
        worst = worst.max(hs_dist_sqr(&rho, &(CMatrix::identity(d, d) / C64::new(d as f64, 0.0))).sqrt());
    }
    Ok(worst)
}

/// max_{l≠k} ‖ρ_kl − 𝟙/d_k ⊗ ρ_l‖ for the designated party k.
pub fn party_decoupling_gap(state: &[C64], dims: &[usize], k: usize) -> Result<f64> {
    check_dims(dims, state.len(), usize::MAX)?;
    if k >= dims.len() {
        return Err(HitError::Dimension(format!("party {k} out of range")));
    }
    let dk = dims[k];
    let mut worst: f64 = 0.0;
    for l in (0..dims.len()).filter(|&l| l != k) {
        let rho = reduced_density_parties(state, dims, &[k, l])?;
        let rl = reduced_density_parties(state, dims, &[l])?;
        let target = (CMatrix::identity(dk, dk) / C64::new(dk as f64, 0.0)).kronecker(&rl);
        worst = worst.max(hs_dist_sqr(&rho, &target).sqrt());
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimizeOptions {
    pub starts: usize,
    pub seed: u64,
    pub max_iters: u64,
    /// Grid points per angle for two-dimensional subspaces.
    pub grid: usize,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            starts: 64,
            seed: 7,
            max_iters: 3000,
            grid: 200,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubspaceResult {
    /// Generator eigenvalue of the subspace (zero for SU(2)).
    pub eigenvalue: f64,
    pub dim: usize,
    pub method: &'static str,
    pub min_deviation: f64,
    pub min_decoupling_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwoUniformCertificate {
    pub n: usize,
    pub dims: Vec<usize>,
    pub symmetry: &'static str,
    pub seed: u64,
    pub starts: usize,
    /// Party whose pair marginals are tested for decoupling.
    pub designated_party: usize,
    pub subspaces: Vec<SubspaceResult>,
    /// Smallest D(ψ) over all symmetric subspaces.
    pub min_deviation: f64,
    /// Smallest max_l ‖ρ_kl − 𝟙/d_k ⊗ ρ_l‖ over all symmetric subspaces.
    pub min_decoupling_gap: f64,
    /// Both minima are bounded away from zero.
    pub witnessed: bool,
}

struct Objective<'a> {
    f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

impl CostFunction for Objective<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok((self.f)(p))
    }
}

fn nelder_mead(f: &(dyn Fn(&[f64]) -> f64 + Sync), x0: Vec<f64>, iters: u64) -> (f64, Vec<f64>) {
    let mut simplex = vec![x0.clone()];
    for i in 0..x0.len() {
        let mut x = x0.clone();
        x[i] += 0.2;
        simplex.push(x);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(1e-14).expect("positive tolerance");
    let res = Executor::new(Objective { f }, solver).configure(|s| s.max_iters(iters)).run();
    match res {
        Ok(r) => {
            let st = r.state();
            (st.get_best_cost(), st.get_best_param().cloned().unwrap_or(x0))
        }
        Err(_) => (f(&x0), x0),
    }
}

/// Normalized ψ = V x for real parameters (re, im interleaved).
fn embed(basis: &CMatrix, x: &[f64]) -> Vec<C64> {
    let c = nalgebra::DVector::from_fn(basis.ncols(), |i, _| C64::new(x[2 * i], x[2 * i + 1]));
    let v = basis * c;
    let n = v.norm().max(1e-300);
    v.iter().map(|z| z / n).collect()
}

fn minimize<F>(basis: &CMatrix, cost: F, opts: &OptimizeOptions) -> (f64, &'static str)
where
    F: Fn(&[C64]) -> f64 + Sync,
{
    let d = basis.ncols();
    let f = |x: &[f64]| cost(&embed(basis, x));
    if d == 1 {
        return (f(&[1.0, 0.0]), "single state");
    }
    if d == 2 {
        // exhaustive grid over the Bloch sphere of the subspace, then polish
        let g = opts.grid.max(4);
        let pts: Vec<(f64, Vec<f64>)> = par::map_range(opts.exec, g + 1, |a| {
            let t = std::f64::consts::FRAC_PI_2 * a as f64 / g as f64;
            let mut best = (f64::INFINITY, Vec::new());
            for b in 0..2 * g {
                let p = std::f64::consts::PI * b as f64 / g as f64;
                let x = vec![t.cos(), 0.0, t.sin() * p.cos(), t.sin() * p.sin()];
                let v = f(&x);
                if v < best.0 {
                    best = (v, x);
                }
            }
            best
        });
        let (gv, gx) = pts.into_iter().fold((f64::INFINITY, Vec::new()), |a, b| if b.0 < a.0 { b } else { a });
        let (pv, _) = nelder_mead(&f, gx, opts.max_iters);
        return (gv.min(pv), "grid");
    }
    let runs = par::map_range(opts.exec, opts.starts.max(1), |s| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(s as u64);
        let x0: Vec<f64> = (0..2 * d).map(|_| rng.sample(StandardNormal)).collect();
        nelder_mead(&f, x0, opts.max_iters).0
    });
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(&b.0)))
        .map(|(_, v)| *v)
        .unwrap_or(f64::INFINITY);
    (best, "multistart")
}

/// Threshold above which a minimum counts as bounded away from zero.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

/// Minimize the 2-uniformity deviation and the decoupling gap of party 0
/// over the symmetric subspaces of `symmetry` on parties `dims`.
pub fn min_two_uniform_deviation(dims: &[usize], symmetry: &Symmetry, opts: &OptimizeOptions) -> Result<TwoUniformCertificate> {
    let n = dims.len();
    if n < 4 {
        return Err(HitError::Unsupported(format!("two-uniformity certificates need n >= 4 parties, got {n}")));
    }
    check_dims(dims, dims.iter().product(), TOTAL_DIM_LIMIT)?;
    let (name, spaces): (&'static str, Vec<(f64, CMatrix)>) = match symmetry {
        Symmetry::Su2 { dims: sd } => {
            if sd != dims {
                return Err(HitError::Dimension("symmetry dimensions differ from party dimensions".into()));
            }
            ("su2", vec![(0.0, su2_invariant_basis(dims)?)])
        }
        Symmetry::U1(g) => {
            if g.dims() != dims {
                return Err(HitError::Dimension("generator dimensions differ from party dimensions".into()));
            }
            if !(0..n).any(|i| g.is_nontrivial(i)) {
                return Err(HitError::Spec("generator acts trivially on every party".into()));
            }
            ("u1", u1_eigenspaces(g)?)
        }
    };
    let k = 0;
    let mut subspaces = Vec::new();
    for (ev, basis) in spaces.iter().filter(|(_, b)| b.ncols() > 0) {
        let (dev, method) = minimize(basis, |psi| two_uniform_deviation(psi, dims).unwrap_or(f64::INFINITY), opts);
        let (gap, _) = minimize(basis, |psi| party_decoupling_gap(psi, dims, k).unwrap_or(f64::INFINITY), opts);
        subspaces.push(SubspaceResult {
            eigenvalue: *ev,
            dim: basis.ncols(),
            method,
            min_deviation: dev,
            min_decoupling_gap: gap,
        });
    }
    if subspaces.is_empty() {
        return Err(HitError::Spec("no symmetric states on these parties".into()));
    }
    let min_deviation = subspaces.iter().map(|s| s.min_deviation).fold(f64::INFINITY, f64::min);
    let min_decoupling_gap = subspaces.iter().map(|s| s.min_decoupling_gap).fold(f64::INFINITY, f64::min);
    Ok(TwoUniformCertificate {
        n,
        dims: dims.to_vec(),
        symmetry: name,
        seed: opts.seed,
        starts: opts.starts,
        designated_party: k,
        subspaces,
        min_deviation,
        min_decoupling_gap,
        witnessed: min_deviation > WITNESS_THRESHOLD && min_decoupling_gap > WITNESS_THRESHOLD,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nogo::GeneratorSpec;

    #[test]
    fn three_parties_are_unsupported() {
        let r = min_two_uniform_deviation(&[2, 2, 2], &Symmetry::su2_qubits(3), &OptimizeOptions::default());
        assert!(matches!(r, Err(HitError::Unsupported(_))));
    }

    #[test]
    fn deviation_vanishes_on_product_of_bells_only_for_split_pairs() {
        // |Φ⟩_{02}|Φ⟩_{13}: single marginals mixed, ρ_02 pure
        let mut psi = vec![C64::new(0.0, 0.0); 16];
        for a in 0..2 {
            for b in 0..2 {
                psi[(a << 3) | (b << 2) | (a << 1) | b] = C64::new(0.5, 0.0);
            }
        }
        assert!(one_uniform_deviation(&psi, &[2; 4]).unwrap() < 1e-12);
        assert!(two_uniform_deviation(&psi, &[2; 4]).unwrap() > 0.1);
    }

    #[test]
    fn su2_four_qubits_is_witnessed() {
        let opts = OptimizeOptions {
            grid: 60,
            ..Default::default()
        };
        let c = min_two_uniform_deviation(&[2; 4], &Symmetry::su2_qubits(4), &opts).unwrap();
        assert_eq!(c.subspaces[0].dim, 2);
        assert_eq!(c.subspaces[0].method, "grid");
        assert!(c.min_deviation > 0.01);
        assert!(c.witnessed);
    }

    #[test]
    fn u1_generator_splits_into_sectors() {
        let g = GeneratorSpec::total_spin(&[2; 4], 2);
        let opts = OptimizeOptions {
            starts: 4,
            max_iters: 400,
            grid: 30,
            ..Default::default()
        };
        let c = min_two_uniform_deviation(&[2; 4], &Symmetry::U1(g), &opts).unwrap();
        assert_eq!(c.subspaces.iter().map(|s| s.dim).sum::<usize>(), 16);
        assert!(c.min_deviation > WITNESS_THRESHOLD);
    }

    #[test]
    fn fixed_seed_reproduces() {
        let opts = OptimizeOptions {
            starts: 3,
            max_iters: 200,
            ..Default::default()
        };
        let a = min_two_uniform_deviation(&[2; 6], &Symmetry::su2_qubits(6), &opts).unwrap();
        let b = min_two_uniform_deviation(&[2; 6], &Symmetry::su2_qubits(6), &opts).unwrap();
        assert_eq!(a, b);
    }
}
