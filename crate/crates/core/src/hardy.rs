//! Hardy-type test for a bipartite split of a pure state.
//!
//! Given two Schmidt terms with different weights `p1 ≠ p2`, the unitaries
//! `U` and `V` rotate the pair `(α1, α2)` (and `(β1, β2)`) into two bases
//! `x±` and `y±`. The four resulting observables have five joint outcomes of
//! exactly zero probability while `P(Y1=+1, Y2=+1)` is strictly positive,
//! which no local model can reproduce.

use crate::error::{Error, Result};
use crate::schmidt::{distinct_weight_pairs, schmidt_decompose, SchmidtDecomposition, DEFAULT_EPS_DEG};
use crate::table::{JointTable, Party};
use crate::tensor::{
    combine, kron, max_abs_diff, project_amps, unreshape_bipartite, Bipartition, DenseMatrix,
    LocalProjector, Side, StateVector, C64,
};

/// Default bound for a condition that should vanish exactly.
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// Measured and closed-form Hardy probabilities must agree to this.
pub const HARDY_AGREEMENT_TOL: f64 = 1e-9;

pub const NOT_APPLICABLE_REASON: &str = "all Schmidt weights equal or rank 1";

/// `p1² p2² (p1 − p2)² / (p1² + p2² − p1 p2)²`.
pub fn hardy_probability(p1: f64, p2: f64) -> f64 {
    // Evaluate in a fixed argument order so swapping is bit-exact.
    let (a, b) = if p1 >= p2 { (p1, p2) } else { (p2, p1) };
    let d = a * a + b * b - a * b;
    if d <= 0.0 {
        return 0.0;
    }
    let diff = a - b;
    (a * a * b * b * diff * diff) / (d * d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyUnitaries {
    pub u: DenseMatrix,
    pub v: DenseMatrix,
    pub p1: f64,
    pub p2: f64,
}

impl HardyUnitaries {
    /// The product `V·U` generating the `y±` basis.
    pub fn vu(&self) -> DenseMatrix {
        self.v.matmul(&self.u).expect("2x2 matrices")
    }
}

pub fn build_unitaries(p1: f64, p2: f64) -> Result<HardyUnitaries> {
    if !(p1 > 0.0 && p2 > 0.0) {
        return Err(Error::NonPositiveWeight { p1, p2 });
    }
    let i = C64::new(0.0, 1.0);
    let r = |x: f64| C64::new(x, 0.0);

    let su = 1.0 / (p1 + p2).sqrt();
    let u = DenseMatrix::from_row_major(
        2,
        2,
        vec![
            r(p2.sqrt() * su),
            -i * (p1.sqrt() * su),
            -i * (p1.sqrt() * su),
            r(p2.sqrt() * su),
        ],
    )?;

    let sv = 1.0 / (p1 * p1 + p2 * p2 - p1 * p2).sqrt();
    let diag = -i * ((p2 - p1) * sv);
    let off = r((p1 * p2).sqrt() * sv);
    let v = DenseMatrix::from_row_major(2, 2, vec![diag, off, off, diag])?;
    Ok(HardyUnitaries { u, v, p1, p2 })
}

/// The rotated bases on both sides, each vector over its side's full space.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyBases {
    pub x_plus_1: Vec<C64>,
    pub x_minus_1: Vec<C64>,
    pub y_plus_1: Vec<C64>,
    pub y_minus_1: Vec<C64>,
    pub x_plus_2: Vec<C64>,
    pub x_minus_2: Vec<C64>,
    pub y_plus_2: Vec<C64>,
    pub y_minus_2: Vec<C64>,
}

fn rotate_pair(m: &DenseMatrix, a: &[C64], b: &[C64]) -> (Vec<C64>, Vec<C64>) {
    (
        combine(&[m[(0, 0)], m[(0, 1)]], &[a, b]),
        combine(&[m[(1, 0)], m[(1, 1)]], &[a, b]),
    )
}

/// Local observable with labelled rank-one eigenprojectors; the label `0` is
/// reserved for the orthogonal complement of their span.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    pub label: String,
    /// Subsystems acted on, in the order the vectors are laid out.
    pub subsystems: Vec<usize>,
    pub eigenvectors: Vec<(i32, Vec<C64>)>,
}

impl Observable {
    pub fn two_outcome(
        label: impl Into<String>,
        subsystems: Vec<usize>,
        plus: Vec<C64>,
        minus: Vec<C64>,
    ) -> Self {
        Self {
            label: label.into(),
            subsystems,
            eigenvectors: vec![(1, plus), (-1, minus)],
        }
    }

    /// Eigenvalue labels followed by the complement outcome `0`.
    pub fn outcomes(&self) -> Vec<i32> {
        self.eigenvectors
            .iter()
            .map(|(l, _)| *l)
            .chain(std::iter::once(0))
            .collect()
    }

    /// Projector for the `index`-th entry of [`Observable::outcomes`].
    pub fn projector(&self, index: usize) -> LocalProjector {
        match self.eigenvectors.get(index) {
            Some((_, v)) => LocalProjector::rank_one(v.clone()),
            None => LocalProjector::Complement(
                self.eigenvectors.iter().map(|(_, v)| v.clone()).collect(),
            ),
        }
    }

    pub fn projector_for(&self, outcome: i32) -> Option<LocalProjector> {
        self.outcomes()
            .iter()
            .position(|&o| o == outcome)
            .map(|k| self.projector(k))
    }

    /// Same observable with subsystem indices renamed through `mapping`.
    pub fn relabel(&self, mapping: &[usize]) -> Observable {
        Observable {
            label: self.label.clone(),
            subsystems: self.subsystems.iter().map(|&k| mapping[k]).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// A measuring party: a label and its alternative observables.
#[derive(Debug, Clone, PartialEq)]
pub struct PartyObservables {
    pub label: String,
    pub observables: Vec<Observable>,
}

impl PartyObservables {
    pub fn party(&self) -> Party {
        Party::new(
            self.label.clone(),
            self.observables.iter().map(|o| o.label.clone()).collect(),
            self.observables[0].outcomes(),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyConstruction {
    pub split: Bipartition,
    pub pair: (usize, usize),
    pub unitaries: HardyUnitaries,
    pub bases: HardyBases,
    /// `X1, Y1` on side 1 and `X2, Y2` on side 2, in that order.
    pub observables: [Observable; 4],
}

impl HardyConstruction {
    pub fn p1(&self) -> f64 {
        self.unitaries.p1
    }

    pub fn p2(&self) -> f64 {
        self.unitaries.p2
    }

    pub fn x1(&self) -> &Observable {
        &self.observables[0]
    }

    pub fn y1(&self) -> &Observable {
        &self.observables[1]
    }

    pub fn x2(&self) -> &Observable {
        &self.observables[2]
    }

    pub fn y2(&self) -> &Observable {
        &self.observables[3]
    }

    pub fn parties(&self) -> Vec<PartyObservables> {
        vec![
            PartyObservables {
                label: "side1".into(),
                observables: vec![self.x1().clone(), self.y1().clone()],
            },
            PartyObservables {
                label: "side2".into(),
                observables: vec![self.x2().clone(), self.y2().clone()],
            },
        ]
    }

    /// Builds the construction from explicit Schmidt vector pairs and weights.
    /// No degeneracy check: `p1 == p2` gives `V` = swap.
    pub fn from_vectors(
        split: Bipartition,
        pair: (usize, usize),
        alphas: (&[C64], &[C64]),
        betas: (&[C64], &[C64]),
        p1: f64,
        p2: f64,
    ) -> Result<Self> {
        let unitaries = build_unitaries(p1, p2)?;
        let vu = unitaries.vu();
        let (x_plus_1, x_minus_1) = rotate_pair(&unitaries.u, alphas.0, alphas.1);
        let (y_plus_1, y_minus_1) = rotate_pair(&vu, alphas.0, alphas.1);
        let (x_plus_2, x_minus_2) = rotate_pair(&unitaries.u, betas.0, betas.1);
        let (y_plus_2, y_minus_2) = rotate_pair(&vu, betas.0, betas.1);
        let s1 = split.side1().to_vec();
        let s2 = split.side2().to_vec();
        let observables = [
            Observable::two_outcome("X1", s1.clone(), x_plus_1.clone(), x_minus_1.clone()),
            Observable::two_outcome("Y1", s1, y_plus_1.clone(), y_minus_1.clone()),
            Observable::two_outcome("X2", s2.clone(), x_plus_2.clone(), x_minus_2.clone()),
            Observable::two_outcome("Y2", s2, y_plus_2.clone(), y_minus_2.clone()),
        ];
        Ok(Self {
            split,
            pair,
            unitaries,
            bases: HardyBases {
                x_plus_1,
                x_minus_1,
                y_plus_1,
                y_minus_1,
                x_plus_2,
                x_minus_2,
                y_plus_2,
                y_minus_2,
            },
            observables,
        })
    }

    /// Construction on Schmidt terms `pair` without the degeneracy check.
    pub fn from_schmidt_unchecked(d: &SchmidtDecomposition, pair: (usize, usize)) -> Result<Self> {
        let (i, j) = pair;
        if i == j || i.max(j) >= d.rank() {
            return Err(Error::PairOutOfRange {
                i,
                j,
                rank: d.rank(),
            });
        }
        let (a, b) = (d.left_vectors(), d.right_vectors());
        let w = d.weights();
        Self::from_vectors(
            d.split().clone(),
            pair,
            (&a[i], &a[j]),
            (&b[i], &b[j]),
            w[i],
            w[j],
        )
    }
}

/// Builds the Hardy bases and observables for Schmidt terms `pair`.
pub fn build_construction(
    d: &SchmidtDecomposition,
    pair: (usize, usize),
    eps_deg: f64,
) -> Result<HardyConstruction> {
    let (i, j) = pair;
    if i == j || i.max(j) >= d.rank() {
        return Err(Error::PairOutOfRange {
            i,
            j,
            rank: d.rank(),
        });
    }
    let gap = (d.weights()[i] - d.weights()[j]).abs();
    if gap <= eps_deg {
        return Err(Error::DegeneratePair { i, j, gap });
    }
    HardyConstruction::from_schmidt_unchecked(d, pair)
}

/// Max-norm residuals of the three rewritings of the state in the `x`/`y`
/// bases, plus the `x`-basis coefficients `⟨x_a(1) x_b(2)|ψ⟩` (`a, b` = `+, −`).
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCheck {
    pub residuals: [f64; 3],
    pub x_coefficients: [[C64; 2]; 2],
}

impl DecompositionCheck {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Rebuilds `v` from each of its three expansions in the rotated bases and
/// reports how far each rebuilt state is from `v`.
pub fn verify_equivalent_decompositions(
    v: &StateVector,
    d: &SchmidtDecomposition,
    c: &HardyConstruction,
) -> Result<DecompositionCheck> {
    let (p1, p2) = (c.p1(), c.p2());
    let i = C64::new(0.0, 1.0);
    let r = |x: f64| C64::new(x, 0.0);
    let b = &c.bases;
    let split = d.split();
    let dims = d.dims();

    let (d1, d2) = (d.side_dim(Side::One), d.side_dim(Side::Two));
    let mut rest = DenseMatrix::zeros(d1, d2);
    for (k, ((p, a), bt)) in d
        .weights()
        .iter()
        .zip(d.left_vectors())
        .zip(d.right_vectors())
        .enumerate()
    {
        if k == c.pair.0 || k == c.pair.1 {
            continue;
        }
        for x in 0..d1 {
            for y in 0..d2 {
                rest[(x, y)] += a[x] * bt[y] * *p;
            }
        }
    }
    let rest = unreshape_bipartite(&rest, dims, split)?;

    let outer = |a: &[C64], bb: &[C64]| -> Result<Vec<C64>> {
        let m = DenseMatrix::from_row_major(d1, d2, kron(a, bb))?;
        Ok(unreshape_bipartite(&m, dims, split)?.amps().to_vec())
    };
    let sum = |terms: Vec<(C64, Vec<C64>)>| -> Vec<C64> {
        let mut out = rest.amps().to_vec();
        for (coef, t) in terms {
            for (o, x) in out.iter_mut().zip(t) {
                *o += coef * x;
            }
        }
        out
    };

    let root = (p1 * p2).sqrt();
    let big = (p1 * p1 + p2 * p2 - p1 * p2).sqrt();
    let first = sum(vec![
        (i * root, outer(&b.x_plus_1, &b.x_minus_2)?),
        (i * root, outer(&b.x_minus_1, &b.x_plus_2)?),
        (r(p2 - p1), outer(&b.x_minus_1, &b.x_minus_2)?),
    ]);
    let second = sum(vec![
        (i * big, outer(&b.y_minus_1, &b.x_minus_2)?),
        (i * root, outer(&b.x_minus_1, &b.x_plus_2)?),
    ]);
    let third = sum(vec![
        (i * root, outer(&b.x_plus_1, &b.x_minus_2)?),
        (i * big, outer(&b.x_minus_1, &b.y_minus_2)?),
    ]);

    let mut x_coefficients = [[C64::new(0.0, 0.0); 2]; 2];
    let xs1 = [&b.x_plus_1, &b.x_minus_1];
    let xs2 = [&b.x_plus_2, &b.x_minus_2];
    for (a, u) in xs1.iter().enumerate() {
        for (bb, w) in xs2.iter().enumerate() {
            let basis = outer(u, w)?;
            x_coefficients[a][bb] = crate::tensor::inner(&basis, v.amps());
        }
    }

    Ok(DecompositionCheck {
        residuals: [
            max_abs_diff(&first, v.amps()),
            max_abs_diff(&second, v.amps()),
            max_abs_diff(&third, v.amps()),
        ],
        x_coefficients,
    })
}

fn fill_block(
    dims: &[usize],
    amps: &[C64],
    parties: &[PartyObservables],
    settings: &[usize],
    party: usize,
    out: &mut Vec<f64>,
) -> Result<()> {
    if party == parties.len() {
        out.push(crate::tensor::norm_sqr(amps));
        return Ok(());
    }
    let obs = &parties[party].observables[settings[party]];
    for k in 0..obs.outcomes().len() {
        let projected = project_amps(dims, amps, &obs.subsystems, &obs.projector(k))?;
        fill_block(dims, &projected, parties, settings, party + 1, out)?;
    }
    Ok(())
}

/// Born-rule joint probabilities of every setting and outcome combination.
pub fn joint_table(v: &StateVector, parties: &[PartyObservables]) -> Result<JointTable> {
    let party_info: Vec<Party> = parties.iter().map(PartyObservables::party).collect();
    for (p, info) in parties.iter().zip(&party_info) {
        if p.observables.iter().any(|o| o.outcomes() != info.outcomes) {
            return Err(Error::InvalidState(format!(
                "observables of party {} disagree on their outcome labels",
                p.label
            )));
        }
    }
    let radices: Vec<usize> = parties.iter().map(|p| p.observables.len()).collect();
    let combos: usize = radices.iter().product();
    let mut probs = Vec::new();
    for combo in 0..combos {
        let mut settings = vec![0; radices.len()];
        let mut rem = combo;
        for (s, &r) in settings.iter_mut().zip(&radices).rev() {
            *s = rem % r;
            rem /= r;
        }
        fill_block(v.dims(), v.amps(), parties, &settings, 0, &mut probs)?;
    }
    JointTable::new(party_info, probs)
}

/// The six Hardy conditions: five vanishing joint probabilities and the one
/// nonzero outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HardyCondition {
    XPlusXPlus,
    YPlusXMinus,
    XMinusYPlus,
    YPlusXZero,
    XZeroYPlus,
    YPlusYPlus,
}

impl HardyCondition {
    pub const ZERO: [HardyCondition; 5] = [
        HardyCondition::XPlusXPlus,
        HardyCondition::YPlusXMinus,
        HardyCondition::XMinusYPlus,
        HardyCondition::YPlusXZero,
        HardyCondition::XZeroYPlus,
    ];

    /// `(setting 1, outcome 1, setting 2, outcome 2)`.
    pub fn event(self) -> (&'static str, i32, &'static str, i32) {
        match self {
            HardyCondition::XPlusXPlus => ("X1", 1, "X2", 1),
            HardyCondition::YPlusXMinus => ("Y1", 1, "X2", -1),
            HardyCondition::XMinusYPlus => ("X1", -1, "Y2", 1),
            HardyCondition::YPlusXZero => ("Y1", 1, "X2", 0),
            HardyCondition::XZeroYPlus => ("X1", 0, "Y2", 1),
            HardyCondition::YPlusYPlus => ("Y1", 1, "Y2", 1),
        }
    }

    pub fn name(self) -> String {
        let (s1, o1, s2, o2) = self.event();
        format!("P({s1}={},{s2}={})", outcome_label(o1), outcome_label(o2))
    }
}

pub fn outcome_label(o: i32) -> String {
    if o > 0 {
        format!("+{o}")
    } else {
        o.to_string()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyWitness {
    pub pair: (usize, usize),
    pub construction: HardyConstruction,
    pub decomposition: DecompositionCheck,
    pub table: JointTable,
    /// The five vanishing conditions, in [`HardyCondition::ZERO`] order.
    pub zero_conditions: [f64; 5],
    pub hardy_measured: f64,
    pub hardy_closed_form: f64,
}

impl HardyWitness {
    pub fn p1(&self) -> f64 {
        self.construction.p1()
    }

    pub fn p2(&self) -> f64 {
        self.construction.p2()
    }

    pub fn max_zero_condition(&self) -> f64 {
        self.zero_conditions.iter().copied().fold(0.0, f64::max)
    }

    pub fn zero_conditions_hold(&self, zero_tol: f64) -> bool {
        self.max_zero_condition() < zero_tol
    }

    pub fn probabilities_agree(&self) -> bool {
        (self.hardy_measured - self.hardy_closed_form).abs() < HARDY_AGREEMENT_TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Applicable(Box<HardyWitness>),
    NotApplicable { reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub split: Bipartition,
    pub weights: Vec<f64>,
    pub verdict: Verdict,
}

impl WitnessReport {
    pub fn is_applicable(&self) -> bool {
        matches!(self.verdict, Verdict::Applicable(_))
    }

    pub fn witness(&self) -> Option<&HardyWitness> {
        match &self.verdict {
            Verdict::Applicable(w) => Some(w),
            Verdict::NotApplicable { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairChoice {
    Auto,
    /// 0-based Schmidt term indices.
    Explicit(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    pub eps_deg: f64,
    pub zero_tol: f64,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            eps_deg: DEFAULT_EPS_DEG,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }
}

/// Evaluates the Hardy conditions of a construction on `v`.
pub fn evaluate_witness(
    v: &StateVector,
    d: &SchmidtDecomposition,
    construction: HardyConstruction,
) -> Result<HardyWitness> {
    let table = joint_table(v, &construction.parties())?;
    let lookup = |c: HardyCondition| {
        let (s1, o1, s2, o2) = c.event();
        table
            .prob(&[(s1, o1), (s2, o2)])
            .expect("Hardy labels are present")
    };
    let zero_conditions = HardyCondition::ZERO.map(lookup);
    let hardy_measured = lookup(HardyCondition::YPlusYPlus);
    let decomposition = verify_equivalent_decompositions(v, d, &construction)?;
    Ok(HardyWitness {
        pair: construction.pair,
        hardy_closed_form: hardy_probability(construction.p1(), construction.p2()),
        construction,
        decomposition,
        table,
        zero_conditions,
        hardy_measured,
    })
}

/// Decomposes `v`, picks a weight pair and evaluates the Hardy test on it.
pub fn make_witness_report(
    v: &StateVector,
    split: &Bipartition,
    pair: PairChoice,
    options: &WitnessOptions,
) -> Result<WitnessReport> {
    let d = schmidt_decompose(v, split)?;
    let chosen = match pair {
        PairChoice::Auto => distinct_weight_pairs(&d, options.eps_deg).first().copied(),
        PairChoice::Explicit(i, j) => {
            if i == j || i.max(j) >= d.rank() {
                return Err(Error::PairOutOfRange {
                    i,
                    j,
                    rank: d.rank(),
                });
            }
            let gap = (d.weights()[i] - d.weights()[j]).abs();
            (gap > options.eps_deg).then_some((i, j))
        }
    };
    let verdict = match chosen {
        None => Verdict::NotApplicable {
            reason: NOT_APPLICABLE_REASON.into(),
        },
        Some(p) => {
            let construction = build_construction(&d, p, options.eps_deg)?;
            Verdict::Applicable(Box::new(evaluate_witness(v, &d, construction)?))
        }
    };
    Ok(WitnessReport {
        split: split.clone(),
        weights: d.weights().to_vec(),
        verdict,
    })
}

/// Every bipartition with subsystem 1 on side 1, in order of the side-1
/// subset's bitmask.
pub fn all_bipartitions(num_subsystems: usize) -> Result<Vec<Bipartition>> {
    if num_subsystems < 2 {
        return Err(Error::TooFewSubsystems {
            required: 2,
            found: num_subsystems,
        });
    }
    let n = num_subsystems;
    (0u64..1 << (n - 1))
        .map(|rest| {
            let mask = (rest << 1) | 1;
            let side1: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 1).collect();
            let side2: Vec<usize> = (0..n).filter(|k| mask >> k & 1 == 0).collect();
            (side1, side2)
        })
        .filter(|(_, s2)| !s2.is_empty())
        .map(|(s1, s2)| Bipartition::new(s1, s2, n))
        .collect()
}

/// [`make_witness_report`] over every bipartition, keeping the one with the
/// largest Hardy probability. With no applicable split the report for the
/// first split is returned.
pub fn search_bipartitions(v: &StateVector, options: &WitnessOptions) -> Result<WitnessReport> {
    let mut best: Option<WitnessReport> = None;
    let mut first: Option<WitnessReport> = None;
    for split in all_bipartitions(v.num_subsystems())? {
        let r = make_witness_report(v, &split, PairChoice::Auto, options)?;
        if let Some(score) = r.witness().map(|w| w.hardy_closed_form) {
            let better = best
                .as_ref()
                .and_then(|b| b.witness())
                .is_none_or(|b| score > b.hardy_closed_form);
            if better {
                best = Some(r.clone());
            }
        }
        if first.is_none() {
            first = Some(r);
        }
    }
    Ok(best.or(first).expect("at least one bipartition"))
}

/// Observables whose table is handed to the LP certifier.
///
/// Uses the chosen pair when it is usable. Otherwise falls back to the
/// equal-weight construction on the first two Schmidt terms (where `V` is the
/// swap), or for a product state on its Schmidt vector completed by one
/// orthogonal vector per side.
pub fn certification_construction(
    d: &SchmidtDecomposition,
    pair: PairChoice,
    eps_deg: f64,
) -> Result<HardyConstruction> {
    match pair {
        PairChoice::Explicit(i, j) => HardyConstruction::from_schmidt_unchecked(d, (i, j)),
        PairChoice::Auto => {
            if let Some(&p) = distinct_weight_pairs(d, eps_deg).first() {
                return build_construction(d, p, eps_deg);
            }
            if d.rank() >= 2 {
                return HardyConstruction::from_schmidt_unchecked(d, (0, 1));
            }
            if d.side_dim(Side::One) < 2 || d.side_dim(Side::Two) < 2 {
                return Err(Error::InvalidState(
                    "both sides need dimension at least 2".into(),
                ));
            }
            let a = d.completed_vectors(Side::One, 2);
            let b = d.completed_vectors(Side::Two, 2);
            let w = d.weights()[0];
            HardyConstruction::from_vectors(
                d.split().clone(),
                (0, 1),
                (&a[0], &a[1]),
                (&b[0], &b[1]),
                w,
                w,
            )
        }
    }
}
