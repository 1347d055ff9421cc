//! Schmidt-form strategies, generalized observables and correlation tables.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::config::Tolerances;
use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, RealMatrix};

/// Largest `d²` accepted by [`brute_force_correlation`].
pub const BRUTE_FORCE_LIMIT: usize = 4096;

/// Full-rank pure state `Σ λ_j |jj⟩`, stored by its Schmidt coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    coeffs: Vec<f64>,
}

impl SchmidtState {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidState("no coefficients".into()));
        }
        if let Some(bad) = coeffs.iter().find(|c| !(**c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidState(format!(
                "coefficient {bad} is not strictly positive"
            )));
        }
        let norm_sq: f64 = coeffs.iter().map(|c| c * c).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!(
                "squared coefficients sum to {norm_sq}, not 1"
            )));
        }
        Ok(Self { coeffs })
    }

    /// Rescales arbitrary positive weights to a normalized state.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let n = weights.iter().map(|c| c * c).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("weights have zero norm".into()));
        }
        Self::new(weights.into_iter().map(|c| c / n).collect())
    }

    pub fn maximally_entangled(d: usize) -> Self {
        Self {
            coeffs: vec![1.0 / (d as f64).sqrt(); d],
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `D = diag(λ)`.
    pub fn diag_matrix(&self) -> RealMatrix {
        RealMatrix::diag(&self.coeffs)
    }

    pub fn is_maximally_entangled(&self, tol: f64) -> bool {
        let target = 1.0 / (self.dim() as f64).sqrt();
        self.coeffs.iter().all(|c| (c - target).abs() <= tol)
    }

    /// `λ_max / λ_min`.
    pub fn condition_number(&self) -> f64 {
        let max = self.coeffs.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.coeffs.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }
}

/// Real symmetric involution.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryObservable {
    matrix: RealMatrix,
}

impl BinaryObservable {
    pub fn new(matrix: RealMatrix, tol: &Tolerances) -> Result<Self> {
        if matrix.asymmetry() > tol.sym_tol {
            return Err(Error::InvalidObservable(format!(
                "not symmetric (asymmetry {:e})",
                matrix.asymmetry()
            )));
        }
        let matrix = matrix.symmetrize();
        let dev = (&matrix * &matrix).max_abs_diff(&RealMatrix::identity(matrix.dim()));
        if dev > tol.eig_tol {
            return Err(Error::InvalidObservable(format!(
                "not an involution (max |O^2 - I| = {dev:e})"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `{(I + O)/2, (I − O)/2}`.
    pub fn to_measurement(&self) -> ProjectiveMeasurement {
        let i = RealMatrix::identity(self.dim());
        ProjectiveMeasurement {
            projections: vec![(&i + &self.matrix).scale(0.5), (&i - &self.matrix).scale(0.5)],
        }
    }
}

/// Orthogonal real projections summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveMeasurement {
    projections: Vec<RealMatrix>,
}

impl ProjectiveMeasurement {
    pub fn new(projections: Vec<RealMatrix>, tol: &Tolerances) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::InvalidMeasurement("no projections".into()))?;
        let d = first.dim();
        let mut sum = RealMatrix::zeros(d);
        for (a, m) in projections.iter().enumerate() {
            if m.dim() != d {
                return Err(Error::InvalidMeasurement(format!(
                    "projection {a} has dimension {}, expected {d}",
                    m.dim()
                )));
            }
            if m.asymmetry() > tol.sym_tol {
                return Err(Error::InvalidMeasurement(format!("projection {a} is not symmetric")));
            }
            let dev = (m * m).max_abs_diff(m);
            if dev > tol.eig_tol {
                return Err(Error::InvalidMeasurement(format!(
                    "projection {a} is not idempotent (max |M^2 - M| = {dev:e})"
                )));
            }
            for (b, other) in projections.iter().enumerate().skip(a + 1) {
                let overlap = (m * other).max_abs();
                if overlap > tol.eig_tol {
                    return Err(Error::InvalidMeasurement(format!(
                        "projections {a} and {b} are not orthogonal ({overlap:e})"
                    )));
                }
            }
            sum.axpy(1.0, m);
        }
        let dev = sum.max_abs_diff(&RealMatrix::identity(d));
        if dev > tol.eig_tol {
            return Err(Error::InvalidMeasurement(format!(
                "projections do not sum to the identity ({dev:e})"
            )));
        }
        Ok(Self {
            projections: projections.iter().map(|m| m.symmetrize()).collect(),
        })
    }

    pub fn projections(&self) -> &[RealMatrix] {
        &self.projections
    }

    pub fn outputs(&self) -> usize {
        self.projections.len()
    }

    pub fn dim(&self) -> usize {
        self.projections[0].dim()
    }

    /// `M_0 − M_1` for two-outcome measurements.
    pub fn binary_observable(&self) -> Option<RealMatrix> {
        (self.outputs() == 2).then(|| &self.projections[0] - &self.projections[1])
    }
}

/// `ω = e^{2πi/L}`.
fn root_of_unity(l: usize, power: i64) -> Complex64 {
    let k = power.rem_euclid(l as i64) as f64;
    Complex64::from_polar(1.0, 2.0 * PI * k / l as f64)
}

/// `A^(j) = Σ_a ω^{aj} M_a` for `j = 0..L`.
pub fn generalized_observables(m: &ProjectiveMeasurement) -> Vec<ComplexMatrix> {
    let l = m.outputs();
    let d = m.dim();
    (0..l)
        .map(|j| {
            let mut out = ComplexMatrix::zeros(d);
            for (a, p) in m.projections().iter().enumerate() {
                out.axpy(root_of_unity(l, (a * j) as i64), &p.to_complex());
            }
            out
        })
        .collect()
}

/// Inverse transform `M_a = (1/L) Σ_j ω^{−aj} A^j`.
///
/// The resulting projections must be real: only real measurements are modelled.
pub fn povm_from_observable(
    a: &ComplexMatrix,
    l: usize,
    tol: &Tolerances,
) -> Result<ProjectiveMeasurement> {
    if l < 2 {
        return Err(Error::BadParams(format!("number of outputs must be at least 2, got {l}")));
    }
    let d = a.dim();
    let powers: Vec<ComplexMatrix> = (0..l).map(|j| a.pow(j)).collect();
    let deviation = a.pow(l).max_abs_diff(&ComplexMatrix::identity(d));
    if deviation > tol.eig_tol {
        return Err(Error::NotOrderL { order: l, deviation });
    }
    let mut projections = Vec::with_capacity(l);
    for out in 0..l {
        let mut m = ComplexMatrix::zeros(d);
        for (j, p) in powers.iter().enumerate() {
            m.axpy(root_of_unity(l, -((out * j) as i64)) / l as f64, p);
        }
        if m.max_imag() > tol.eig_tol {
            return Err(Error::InvalidObservable(format!(
                "projection {out} is not real (max imaginary part {:e})",
                m.max_imag()
            )));
        }
        projections.push(m.real_part());
    }
    ProjectiveMeasurement::new(projections, tol)
}

/// `⟨ψ|A⊗B|ψ⟩ = Tr[D A D Bᵀ] = Σ_ij λ_i λ_j A_ij B_ij`.
pub fn correlation(state: &SchmidtState, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    let d = state.dim();
    for m in [a, b] {
        if m.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: m.dim() });
        }
    }
    let lam = state.coeffs();
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            s += lam[i] * lam[j] * a[(i, j)] * b[(i, j)];
        }
    }
    Ok(s)
}

/// Real-arithmetic version of [`correlation`].
pub fn correlation_real(state: &SchmidtState, a: &RealMatrix, b: &RealMatrix) -> Result<f64> {
    let d = state.dim();
    for m in [a, b] {
        if m.dim() != d {
            return Err(Error::DimMismatch { expected: d, found: m.dim() });
        }
    }
    let lam = state.coeffs();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += lam[i] * lam[j] * a[(i, j)] * b[(i, j)];
        }
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Question {
    pub label: String,
    pub measurement: ProjectiveMeasurement,
}

impl Question {
    pub fn new(label: impl Into<String>, measurement: ProjectiveMeasurement) -> Self {
        Self {
            label: label.into(),
            measurement,
        }
    }

    pub fn binary(label: impl Into<String>, observable: &BinaryObservable) -> Self {
        Self::new(label, observable.to_measurement())
    }
}

/// Shared state plus per-party question lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    pub state: SchmidtState,
    pub alice: Vec<Question>,
    pub bob: Vec<Question>,
}

impl Strategy {
    pub fn new(state: SchmidtState, alice: Vec<Question>, bob: Vec<Question>) -> Result<Self> {
        let d = state.dim();
        for q in alice.iter().chain(&bob) {
            if q.measurement.dim() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    found: q.measurement.dim(),
                });
            }
        }
        Ok(Self { state, alice, bob })
    }

    /// Both parties measure binary observables, labelled `A0.., B0..`.
    pub fn from_binary(
        state: SchmidtState,
        alice: &[BinaryObservable],
        bob: &[BinaryObservable],
    ) -> Result<Self> {
        let qa = alice
            .iter()
            .enumerate()
            .map(|(x, o)| Question::binary(format!("A{x}"), o))
            .collect();
        let qb = bob
            .iter()
            .enumerate()
            .map(|(y, o)| Question::binary(format!("B{y}"), o))
            .collect();
        Self::new(state, qa, qb)
    }

    pub fn dim(&self) -> usize {
        self.state.dim()
    }
}

/// Key `(x, j, y, k)`: Alice question and power, Bob question and power.
pub type CorrelationKey = (usize, usize, usize, usize);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorrelationTable {
    pub entries: BTreeMap<CorrelationKey, Complex64>,
}

impl CorrelationTable {
    pub fn get(&self, x: usize, j: usize, y: usize, k: usize) -> Option<Complex64> {
        self.entries.get(&(x, j, y, k)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest entrywise distance; `INFINITY` if the key sets differ.
    pub fn max_abs_diff(&self, other: &CorrelationTable) -> f64 {
        if self.entries.len() != other.entries.len() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for (key, v) in &self.entries {
            match other.entries.get(key) {
                Some(w) => worst = worst.max((v - w).norm()),
                None => return f64::INFINITY,
            }
        }
        worst
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.entries.values().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Every `(x, j, y, k)` correlation, powers included. Binary questions pairs are
/// evaluated in real arithmetic.
pub fn correlation_table(s: &Strategy) -> Result<CorrelationTable> {
    let alice: Vec<(Option<RealMatrix>, Vec<ComplexMatrix>)> = s
        .alice
        .iter()
        .map(|q| (q.measurement.binary_observable(), generalized_observables(&q.measurement)))
        .collect();
    let bob: Vec<(Option<RealMatrix>, Vec<ComplexMatrix>)> = s
        .bob
        .iter()
        .map(|q| (q.measurement.binary_observable(), generalized_observables(&q.measurement)))
        .collect();
    let d = s.dim();
    let identity = RealMatrix::identity(d);

    let mut table = CorrelationTable::default();
    for (x, (ra, ca)) in alice.iter().enumerate() {
        for (y, (rb, cb)) in bob.iter().enumerate() {
            if let (Some(oa), Some(ob)) = (ra, rb) {
                let a = [&identity, oa];
                let b = [&identity, ob];
                for j in 0..2 {
                    for k in 0..2 {
                        let v = correlation_real(&s.state, a[j], b[k])?;
                        table.entries.insert((x, j, y, k), Complex64::new(v, 0.0));
                    }
                }
            } else {
                for (j, aj) in ca.iter().enumerate() {
                    for (k, bk) in cb.iter().enumerate() {
                        table.entries.insert((x, j, y, k), correlation(&s.state, aj, bk)?);
                    }
                }
            }
        }
    }
    Ok(table)
}

/// Independent oracle: forms `|ψ⟩ = Σ λ_j |jj⟩` in `ℂ^{d²}` and evaluates
/// `⟨ψ|A⊗B|ψ⟩` from the explicit Kronecker product.
pub fn brute_force_correlation(s: &Strategy) -> Result<CorrelationTable> {
    let d = s.dim();
    let n = d * d;
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { size: n, limit: BRUTE_FORCE_LIMIT });
    }
    let mut psi = vec![0.0; n];
    for (j, c) in s.state.coeffs().iter().enumerate() {
        psi[j * d + j] = *c;
    }
    let alice: Vec<Vec<ComplexMatrix>> =
        s.alice.iter().map(|q| generalized_observables(&q.measurement)).collect();
    let bob: Vec<Vec<ComplexMatrix>> =
        s.bob.iter().map(|q| generalized_observables(&q.measurement)).collect();

    let mut table = CorrelationTable::default();
    let mut kron = vec![Complex64::new(0.0, 0.0); n * n];
    for (x, powers_a) in alice.iter().enumerate() {
        for (y, powers_b) in bob.iter().enumerate() {
            for (j, a) in powers_a.iter().enumerate() {
                for (k, b) in powers_b.iter().enumerate() {
                    for r1 in 0..d {
                        for r2 in 0..d {
                            for c1 in 0..d {
                                for c2 in 0..d {
                                    kron[(r1 * d + r2) * n + c1 * d + c2] =
                                        a[(r1, c1)] * b[(r2, c2)];
                                }
                            }
                        }
                    }
                    let mut v = Complex64::new(0.0, 0.0);
                    for r in 0..n {
                        let row: Complex64 =
                            (0..n).map(|c| kron[r * n + c] * psi[c]).sum();
                        v += psi[r] * row;
                    }
                    table.entries.insert((x, j, y, k), v);
                }
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use super::Strategy;
    use crate::matrix::{pauli_x, pauli_z};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random real projective measurement with `l` outcomes in dimension `d`,
    /// from a random orthonormal basis split into `l` non-empty blocks.
    pub(crate) fn random_measurement(d: usize, l: usize, rng: &mut impl Rng) -> ProjectiveMeasurement {
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let basis = crate::matrix::orthonormalize(&cols, 1e-12).basis;
        let mut owner: Vec<usize> = (0..d).map(|i| i % l).collect();
        for i in (1..d).rev() {
            owner.swap(i, rng.random_range(0..=i));
        }
        let projections = (0..l)
            .map(|a| {
                let mut m = RealMatrix::zeros(d);
                for (v, &o) in basis.iter().zip(&owner) {
                    if o == a {
                        m.axpy(1.0, &RealMatrix::outer(v, v));
                    }
                }
                m
            })
            .collect();
        ProjectiveMeasurement::new(projections, &Tolerances::default()).unwrap()
    }

    fn random_state(d: usize, rng: &mut impl Rng) -> SchmidtState {
        SchmidtState::normalized((0..d).map(|_| rng.random_range(0.1..1.0)).collect()).unwrap()
    }

    fn bell() -> SchmidtState {
        SchmidtState::maximally_entangled(2)
    }

    #[test]
    fn state_validation() {
        assert!(SchmidtState::new(vec![1.0, 0.0]).is_err());
        assert!(SchmidtState::new(vec![0.5, 0.5]).is_err());
        assert!(SchmidtState::new(vec![]).is_err());
        let s = SchmidtState::normalized(vec![2.0, 1.0]).unwrap();
        assert!((s.condition_number() - 2.0).abs() < 1e-15);
        assert!(SchmidtState::maximally_entangled(3).is_maximally_entangled(1e-15));
    }

    #[test]
    fn observable_validation() {
        let tol = Tolerances::default();
        assert!(BinaryObservable::new(pauli_x(), &tol).is_ok());
        assert!(BinaryObservable::new(RealMatrix::diag(&[1.0, 0.5]), &tol).is_err());
        let skew = RealMatrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(BinaryObservable::new(skew, &tol).is_err());
    }

    #[test]
    fn measurement_validation() {
        let tol = Tolerances::default();
        let p0 = RealMatrix::diag(&[1.0, 0.0]);
        let p1 = RealMatrix::diag(&[0.0, 1.0]);
        assert!(ProjectiveMeasurement::new(vec![p0.clone(), p1], &tol).is_ok());
        assert!(ProjectiveMeasurement::new(vec![p0.clone(), p0], &tol).is_err());
        assert!(ProjectiveMeasurement::new(vec![], &tol).is_err());
    }

    #[test]
    fn binary_generalized_observables() {
        let tol = Tolerances::default();
        let m = ProjectiveMeasurement::new(
            vec![RealMatrix::diag(&[1.0, 0.0]), RealMatrix::diag(&[0.0, 1.0])],
            &tol,
        )
        .unwrap();
        let g = generalized_observables(&m);
        assert_eq!(g.len(), 2);
        assert!(g[0].max_abs_diff(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(g[1].max_abs_diff(&pauli_z().to_complex()) < 1e-15);
    }

    #[test]
    fn three_outcome_basis_measurement() {
        let tol = Tolerances::default();
        let e = |i: usize| {
            let mut v = [0.0; 3];
            v[i] = 1.0;
            RealMatrix::diag(&v)
        };
        let m = ProjectiveMeasurement::new(vec![e(0), e(1), e(2)], &tol).unwrap();
        let g = generalized_observables(&m);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let one = Complex64::new(1.0, 0.0);
        assert!(g[1].max_abs_diff(&ComplexMatrix::diag(&[one, w, w * w])) < 1e-14);
        assert!(g[2].max_abs_diff(&ComplexMatrix::diag(&[one, w * w, w.powu(4)])) < 1e-14);
    }

    #[test]
    fn povm_from_identity_and_z() {
        let tol = Tolerances::default();
        let m = povm_from_observable(&ComplexMatrix::identity(2), 2, &tol).unwrap();
        assert!(m.projections()[0].max_abs_diff(&RealMatrix::identity(2)) < 1e-15);
        assert!(m.projections()[1].max_abs() < 1e-15);
        let m = povm_from_observable(&pauli_z().to_complex(), 2, &tol).unwrap();
        assert!(m.projections()[0].max_abs_diff(&RealMatrix::diag(&[1.0, 0.0])) < 1e-15);
        assert!(m.projections()[1].max_abs_diff(&RealMatrix::diag(&[0.0, 1.0])) < 1e-15);
    }

    #[test]
    fn povm_rejects_wrong_order() {
        let tol = Tolerances::default();
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let a = ComplexMatrix::diag(&[Complex64::new(1.0, 0.0), w]);
        assert!(matches!(
            povm_from_observable(&a, 2, &tol),
            Err(Error::NotOrderL { order: 2, .. })
        ));
    }

    #[test]
    fn bell_state_correlations() {
        let x = pauli_x().to_complex();
        let z = pauli_z().to_complex();
        assert!((correlation(&bell(), &x, &x).unwrap() - 1.0).norm() < 1e-15);
        assert!(correlation(&bell(), &x, &z).unwrap().norm() < 1e-15);
        assert!(correlation(&SchmidtState::maximally_entangled(3), &x, &x).is_err());

        let tol = Tolerances::default();
        let ox = BinaryObservable::new(pauli_x(), &tol).unwrap();
        let oz = BinaryObservable::new(pauli_z(), &tol).unwrap();
        let s = Strategy::from_binary(bell(), &[ox.clone()], &[ox, oz]).unwrap();
        let t = brute_force_correlation(&s).unwrap();
        assert!((t.get(0, 1, 0, 1).unwrap() - 1.0).norm() < 1e-15);
        assert!(t.get(0, 1, 1, 1).unwrap().norm() < 1e-15);
    }

    #[test]
    fn brute_force_limit() {
        let d = 65;
        let s = Strategy::new(SchmidtState::maximally_entangled(d), vec![], vec![]).unwrap();
        assert!(matches!(brute_force_correlation(&s), Err(Error::TooLarge { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn table_matches_oracle(seed in any::<u64>(), d in 2usize..=6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let state = random_state(d, &mut rng);
            let party = |rng: &mut ChaCha8Rng| -> Vec<Question> {
                (0..rng.random_range(1..4))
                    .map(|x| {
                        let l = rng.random_range(2..=d.min(4));
                        Question::new(format!("Q{x}"), random_measurement(d, l, rng))
                    })
                    .collect()
            };
            let alice = party(&mut rng);
            let bob = party(&mut rng);
            let s = Strategy::new(state, alice, bob).unwrap();
            let fast = correlation_table(&s).unwrap();
            let slow = brute_force_correlation(&s).unwrap();
            prop_assert!(fast.max_abs_diff(&slow) < 1e-10);
            prop_assert!(fast.max_abs_entry() <= 1.0 + 1e-9);
            for x in 0..s.alice.len() {
                for y in 0..s.bob.len() {
                    prop_assert!((fast.get(x, 0, y, 0).unwrap() - 1.0).norm() < 1e-12);
                }
            }
        }

        #[test]
        fn generalized_observables_round_trip(seed in any::<u64>(), d in 2usize..6, l in 2usize..5) {
            let tol = Tolerances::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let l = l.min(d);
            let m = random_measurement(d, l, &mut rng);
            let g = generalized_observables(&m);
            prop_assert_eq!(g.len(), l);
            prop_assert!(g[0].max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
            prop_assert!(g[1].pow(l).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-9);
            let unitary = &g[1] * &g[1].adjoint();
            prop_assert!(unitary.max_abs_diff(&ComplexMatrix::identity(d)) < 1e-9);
            for (j, gj) in g.iter().enumerate() {
                prop_assert!(gj.max_abs_diff(&g[1].pow(j)) < 1e-9);
            }
            let back = povm_from_observable(&g[1], l, &tol).unwrap();
            for (p, q) in back.projections().iter().zip(m.projections()) {
                prop_assert!(p.max_abs_diff(q) < 1e-9);
            }
        }

        #[test]
        fn binary_tables_are_real(seed in any::<u64>(), d in 2usize..6) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let alice = vec![Question::new("a", random_measurement(d, 2, &mut rng))];
            let bob = vec![Question::new("b", random_measurement(d, 2, &mut rng))];
            let s = Strategy::new(random_state(d, &mut rng), alice, bob).unwrap();
            let t = brute_force_correlation(&s).unwrap();
            for v in t.entries.values() {
                prop_assert!(v.im.abs() < 1e-12);
            }
        }
    }
}
