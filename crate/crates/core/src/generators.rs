//! Generation and enumeration of transformation matrices T over GF(p).
//!
//! Two randomized generators produce invertible row-stochastic matrices:
//! sampling-and-rejection over the affine space of row-stochastic matrices,
//! and direct construction of triangular ones. A third builds elements of
//! the full group by conjugating stabilizers of `e_N`. Exhaustive
//! enumeration and closed-form cardinalities serve as oracles for each
//! other; both are exposed.

use num::bigint::BigInt;
use num::rational::Ratio;
use num::{BigUint, One, ToPrimitive, Zero};
use rand::Rng;

use crate::admissibility::stabilizer_basis_change;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Residue};
use crate::matrix::FMatrix;

pub const DEFAULT_MAX_ATTEMPTS: u64 = 1_000_000;
pub const DEFAULT_ENUM_BUDGET: u128 = 10_000_000;

/// Which generator to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenVariant {
    Sar,
    TfUpper,
    TfLower,
    Stabilizer,
}

/// Rejection rule used by the sampling-and-rejection generator. The
/// default is the literal orthogonality test `T^T T != I`; the strict
/// permutation predicate is available behind this switch because the
/// orthogonality test also rejects orthogonal non-permutation matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SarRejection {
    #[default]
    Orthogonality,
    Permutation,
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub n: usize,
    pub field: FieldSpec,
    pub seed: u64,
    pub max_attempts: u64,
    pub variant: GenVariant,
    pub sar_rejection: SarRejection,
}

impl GenConfig {
    pub fn new(n: usize, field: FieldSpec, seed: u64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(format!("generator needs N >= 2, got {n}")));
        }
        Ok(GenConfig {
            n,
            field,
            seed,
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            variant: GenVariant::Sar,
            sar_rejection: SarRejection::default(),
        })
    }

    fn check(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Shape(format!("generator needs N >= 2, got {}", self.n)));
        }
        if self.max_attempts < 1 {
            return Err(Error::Shape("max_attempts must be >= 1".into()));
        }
        Ok(())
    }
}

/// Uniform sample from the affine space of row-stochastic matrices: the
/// first N-1 entries of each row are free, the last is fixed by the row sum.
fn sample_row_stochastic<R: Rng + ?Sized>(n: usize, field: FieldSpec, rng: &mut R) -> FMatrix {
    let f = field;
    let mut m = FMatrix::zeros(n, n, f);
    for i in 0..n {
        let mut sum = 0;
        for j in 0..n - 1 {
            let v = f.sample(rng);
            m[(i, j)] = v;
            sum = f.add(sum, v);
        }
        m[(i, n - 1)] = f.sub(1 % f.p(), sum);
    }
    m
}

/// Sampling-and-rejection generator: draws uniformly from the
/// row-stochastic space and accepts invertible, non-orthogonal matrices.
pub fn gen_sar<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<FMatrix> {
    cfg.check()?;
    let p = cfg.field.p();
    if cfg.n == 2 && p == 2 {
        return Err(Error::ImpossibleConfig(
            "success density is zero for N = 2, p = 2".into(),
        ));
    }
    for _ in 0..cfg.max_attempts {
        let t = sample_row_stochastic(cfg.n, cfg.field, rng);
        if t.det()? == 0 {
            continue;
        }
        let reject = match cfg.sar_rejection {
            SarRejection::Orthogonality => t.is_orthogonal()?,
            SarRejection::Permutation => t.is_permutation(),
        };
        if !reject {
            return Ok(t);
        }
    }
    Err(Error::GenerationExhausted(cfg.max_attempts))
}

/// Triangle orientation for the triangular-form generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Triangle {
    Upper,
    Lower,
}

/// Triangular-form generator: nonzero diagonal entries make the result
/// invertible by construction (no determinant is ever computed), the
/// absorbing column keeps rows summing to one, and the identity is the
/// only triangular permutation so `T = I` alone is rejected.
pub fn gen_tf<R: Rng + ?Sized>(cfg: &GenConfig, tri: Triangle, rng: &mut R) -> Result<FMatrix> {
    cfg.check()?;
    let f = cfg.field;
    let n = cfg.n;
    if n == 2 && f.p() == 2 {
        return Err(Error::ImpossibleConfig(
            "the only triangular invertible row-stochastic matrix for N = 2, p = 2 is I".into(),
        ));
    }
    let one = 1 % f.p();
    for _ in 0..cfg.max_attempts {
        let mut t = FMatrix::zeros(n, n, f);
        match tri {
            Triangle::Upper => {
                // free diagonal above the last entry, free strict upper
                // block left of the last column, last column absorbs
                for i in 0..n - 1 {
                    t[(i, i)] = f.sample_nonzero(rng);
                }
                t[(n - 1, n - 1)] = one;
                for i in 0..n.saturating_sub(2) {
                    for j in i + 1..n - 1 {
                        t[(i, j)] = f.sample(rng);
                    }
                }
                for i in 0..n - 1 {
                    let sum = (i..n - 1).fold(0, |acc, j| f.add(acc, t[(i, j)]));
                    t[(i, n - 1)] = f.sub(one, sum);
                }
            }
            Triangle::Lower => {
                // mirror image: first diagonal entry forced to 1, first
                // column absorbs the row sums
                t[(0, 0)] = one;
                for i in 1..n {
                    t[(i, i)] = f.sample_nonzero(rng);
                }
                for i in 2..n {
                    for j in 1..i {
                        t[(i, j)] = f.sample(rng);
                    }
                }
                for i in 1..n {
                    let sum = (1..=i).fold(0, |acc, j| f.add(acc, t[(i, j)]));
                    t[(i, 0)] = f.sub(one, sum);
                }
            }
        }
        if !t.is_identity() {
            return Ok(t);
        }
    }
    Err(Error::GenerationExhausted(cfg.max_attempts))
}

/// The pieces of a stabilizer-conjugation construction: an invertible
/// block and a free row assemble a matrix A fixing `e_N`, and `T = Q A
/// Q^{-1}` is then row-stochastic and invertible with no further checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerConstruction {
    pub a_block: FMatrix,
    pub c_row: Vec<Residue>,
    /// `[A_block 0; c^T 1]`, fixing `e_N`
    pub a_full: FMatrix,
    pub q: FMatrix,
    pub t: FMatrix,
}

/// Deterministic core of the stabilizer generator: conjugates the
/// assembled `A` by `Q = [I 1; 0 1]`.
pub fn stabilizer_conjugate(a_block: &FMatrix, c_row: &[Residue]) -> Result<StabilizerConstruction> {
    if !a_block.is_square() {
        return Err(Error::Shape(format!(
            "stabilizer block must be square, got {}x{}",
            a_block.rows(),
            a_block.cols()
        )));
    }
    let f = a_block.field();
    let n = a_block.rows() + 1;
    if c_row.len() != n - 1 {
        return Err(Error::Shape(format!(
            "c row has length {}, expected {}",
            c_row.len(),
            n - 1
        )));
    }
    if a_block.det()? == 0 {
        return Err(Error::SingularMatrix(f.p()));
    }
    let one = 1 % f.p();
    let mut a_full = FMatrix::zeros(n, n, f);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            a_full[(i, j)] = a_block[(i, j)];
        }
    }
    for (j, &c) in c_row.iter().enumerate() {
        if c >= f.p() {
            return Err(Error::Shape(format!("c entry {c} out of range for GF({})", f.p())));
        }
        a_full[(n - 1, j)] = c;
    }
    a_full[(n - 1, n - 1)] = one;

    let q = stabilizer_basis_change(n, f);
    let mut q_inv = FMatrix::identity(n, f);
    for i in 0..n - 1 {
        q_inv[(i, n - 1)] = f.neg(one);
    }
    let t = q.matmul(&a_full)?.matmul(&q_inv)?;
    Ok(StabilizerConstruction {
        a_block: a_block.clone(),
        c_row: c_row.to_vec(),
        a_full,
        q,
        t,
    })
}

/// Stabilizer generator: samples an invertible block by rejection, a free
/// row, and conjugates. Every accepted output lies in the group.
pub fn gen_stabilizer<R: Rng + ?Sized>(
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<StabilizerConstruction> {
    cfg.check()?;
    let f = cfg.field;
    let k = cfg.n - 1;
    for _ in 0..cfg.max_attempts {
        let entries: Vec<Residue> = (0..k * k).map(|_| f.sample(rng)).collect();
        let a_block = FMatrix::new(k, k, entries, f)?;
        if a_block.det()? == 0 {
            continue;
        }
        let c_row: Vec<Residue> = (0..k).map(|_| f.sample(rng)).collect();
        return stabilizer_conjugate(&a_block, &c_row);
    }
    Err(Error::GenerationExhausted(cfg.max_attempts))
}

/// Dispatches on the configured variant; the stabilizer variant yields
/// the conjugated matrix T.
pub fn generate_matrix<R: Rng + ?Sized>(cfg: &GenConfig, rng: &mut R) -> Result<FMatrix> {
    match cfg.variant {
        GenVariant::Sar => gen_sar(cfg, rng),
        GenVariant::TfUpper => gen_tf(cfg, Triangle::Upper, rng),
        GenVariant::TfLower => gen_tf(cfg, Triangle::Lower, rng),
        GenVariant::Stabilizer => gen_stabilizer(cfg, rng).map(|s| s.t),
    }
}

fn same_shape(a: &FMatrix, b: &FMatrix) -> Result<()> {
    if a.field() != b.field() {
        return Err(Error::FieldMismatch(a.field().p(), b.field().p()));
    }
    if a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "permutation check: {}x{} vs {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(())
}

/// Column-permutation equivalence (`T1 = T2 P`) by greedy column matching
/// with a used-index set; O(N^3).
pub fn perm_equiv_naive(t1: &FMatrix, t2: &FMatrix) -> Result<bool> {
    same_shape(t1, t2)?;
    let n = t1.cols();
    let mut used = vec![false; n];
    for col in 0..n {
        let target = t1.col(col);
        let mut match_found = false;
        for (j, used_j) in used.iter_mut().enumerate() {
            if !*used_j && t2.col(j) == target {
                *used_j = true;
                match_found = true;
                break;
            }
        }
        if !match_found {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Column-permutation equivalence by lexicographic column sorting;
/// O(N^2 log N). Agrees with the naive check on every input.
pub fn perm_equiv_lex(t1: &FMatrix, t2: &FMatrix) -> Result<bool> {
    same_shape(t1, t2)?;
    let sorted_cols = |m: &FMatrix| {
        let mut cols: Vec<Vec<Residue>> = (0..m.cols()).map(|j| m.col(j)).collect();
        cols.sort();
        cols
    };
    Ok(sorted_cols(t1) == sorted_cols(t2))
}

/// Row-permutation equivalence (`T1 = P T2`), via transposition.
pub fn row_perm_equiv(t1: &FMatrix, t2: &FMatrix) -> Result<bool> {
    perm_equiv_lex(&t1.transpose(), &t2.transpose())
}

/// Keeps the first-seen representative of each left coset with respect to
/// column permutations. Matrices of different shapes or fields are never
/// equivalent, so they are all retained.
pub fn coset_representatives(mats: &[FMatrix]) -> Vec<FMatrix> {
    let mut reps: Vec<FMatrix> = Vec::new();
    for m in mats {
        let dup = reps.iter().any(|r| {
            r.rows() == m.rows()
                && r.cols() == m.cols()
                && r.field() == m.field()
                && perm_equiv_lex(m, r).expect("shapes checked")
        });
        if !dup {
            reps.push(m.clone());
        }
    }
    reps
}

/// Exhaustively enumerated subsets of the row-stochastic space, in
/// odometer order of the free entries (deterministic).
#[derive(Debug, Clone)]
pub struct EnumeratedSets {
    /// all row-stochastic matrices
    pub m_rs: Vec<FMatrix>,
    /// invertible row-stochastic
    pub g_rs: Vec<FMatrix>,
    /// invertible row-stochastic, not a permutation
    pub g_rs_nonperm: Vec<FMatrix>,
    /// invertible row-stochastic with `T^T T = I`; compared against the
    /// permutation count to test the assumption behind the density formula
    pub g_rs_orthogonal: Vec<FMatrix>,
    /// upper triangular invertible row-stochastic, excluding I
    pub u_rs_upper: Vec<FMatrix>,
    /// lower triangular invertible row-stochastic, excluding I
    pub l_rs_lower: Vec<FMatrix>,
    /// permutation matrices
    pub perms: Vec<FMatrix>,
}

struct Odometer {
    base: u64,
    digits: Vec<u64>,
    done: bool,
}

impl Odometer {
    fn new(base: u64, len: usize) -> Self {
        Odometer {
            base,
            digits: vec![0; len],
            done: base == 0,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<u64>;
    fn next(&mut self) -> Option<Vec<u64>> {
        if self.done {
            return None;
        }
        let current = self.digits.clone();
        // rightmost digit fastest
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.digits[i] += 1;
            if self.digits[i] < self.base {
                break;
            }
            self.digits[i] = 0;
        }
        Some(current)
    }
}

fn checked_power(p: u64, exp: u32) -> u128 {
    (p as u128).pow(exp)
}

/// Exhaustively enumerates the row-stochastic space `p^{N(N-1)}` and
/// filters it into the named subsets. `budget` caps the candidate count
/// (default 10^7).
pub fn enumerate_sets(n: usize, field: FieldSpec, budget: Option<u128>) -> Result<EnumeratedSets> {
    if n < 1 {
        return Err(Error::Shape("enumeration needs N >= 1".into()));
    }
    let p = field.p();
    let budget = budget.unwrap_or(DEFAULT_ENUM_BUDGET);
    let candidates = checked_power(p, (n * (n - 1)) as u32);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }

    let one = 1 % p;
    let mut sets = EnumeratedSets {
        m_rs: Vec::new(),
        g_rs: Vec::new(),
        g_rs_nonperm: Vec::new(),
        g_rs_orthogonal: Vec::new(),
        u_rs_upper: Vec::new(),
        l_rs_lower: Vec::new(),
        perms: Vec::new(),
    };
    for free in Odometer::new(p, n * (n - 1)) {
        let mut m = FMatrix::zeros(n, n, field);
        for i in 0..n {
            let mut sum = 0;
            for j in 0..n - 1 {
                let v = free[i * (n - 1) + j];
                m[(i, j)] = v;
                sum = field.add(sum, v);
            }
            m[(i, n - 1)] = field.sub(one, sum);
        }
        let invertible = m.det()? != 0;
        if invertible {
            sets.g_rs.push(m.clone());
            let perm = m.is_permutation();
            if !perm {
                sets.g_rs_nonperm.push(m.clone());
            } else {
                sets.perms.push(m.clone());
            }
            if m.is_orthogonal()? {
                sets.g_rs_orthogonal.push(m.clone());
            }
            if m.is_upper_triangular() && !m.is_identity() {
                sets.u_rs_upper.push(m.clone());
            }
            if m.is_lower_triangular() && !m.is_identity() {
                sets.l_rs_lower.push(m.clone());
            }
        }
        sets.m_rs.push(m);
    }
    Ok(sets)
}

/// Brute-force order of the general linear group: enumerates all `p^{N^2}`
/// matrices and counts the nonsingular ones.
pub fn enumerate_gl_count(n: usize, field: FieldSpec, budget: Option<u128>) -> Result<u64> {
    if n < 1 {
        return Err(Error::Shape("enumeration needs N >= 1".into()));
    }
    let p = field.p();
    let budget = budget.unwrap_or(DEFAULT_ENUM_BUDGET);
    let candidates = checked_power(p, (n * n) as u32);
    if candidates > budget {
        return Err(Error::BudgetExceeded { candidates, budget });
    }
    let mut count = 0u64;
    for entries in Odometer::new(p, n * n) {
        let m = FMatrix::new(n, n, entries, field)?;
        if m.det()? != 0 {
            count += 1;
        }
    }
    Ok(count)
}

/// All closed-form cardinalities for dimension N over GF(p), evaluated in
/// exact big-integer arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CardinalityReport {
    pub n: usize,
    pub p: u64,
    /// `p^{N^2}`
    pub m_all: BigUint,
    /// `prod_{i=0}^{N-1} (p^N - p^i)`
    pub gl: BigUint,
    /// `p^{N(N-1)}`
    pub m_rs: BigUint,
    /// `p^{N-1} prod_{i=0}^{N-2} (p^{N-1} - p^i)`
    pub g_rs: BigUint,
    /// `(p-1)^{N-1} p^{(N-1)(N-2)/2} - 1`
    pub u_rs: BigUint,
    /// `N!`
    pub perms: BigUint,
    /// `(|G^RS| - N!) / p^{N(N-1)}` as an exact rational
    pub delta: Ratio<BigInt>,
}

/// Evaluates every counting formula exactly.
pub fn cardinalities(n: usize, field: FieldSpec) -> Result<CardinalityReport> {
    if n < 1 {
        return Err(Error::Shape("cardinalities need N >= 1".into()));
    }
    let p = field.p();
    let big_p = BigUint::from(p);
    let pow = |e: usize| big_p.pow(e as u32);

    let m_all = pow(n * n);
    let mut gl = BigUint::one();
    for i in 0..n {
        gl *= pow(n) - pow(i);
    }
    let m_rs = pow(n * (n - 1));
    let mut g_rs = pow(n - 1);
    for i in 0..n.saturating_sub(1) {
        g_rs *= pow(n - 1) - pow(i);
    }
    let u_rs = BigUint::from(p - 1).pow((n - 1) as u32) * pow((n - 1) * (n - 2) / 2)
        - BigUint::one();
    let mut perms = BigUint::one();
    for k in 2..=n {
        perms *= BigUint::from(k);
    }
    let delta = Ratio::new(
        BigInt::from(g_rs.clone()) - BigInt::from(perms.clone()),
        BigInt::from(m_rs.clone()),
    );

    debug_assert!(perms <= g_rs && g_rs <= gl && gl <= m_all);
    Ok(CardinalityReport {
        n,
        p,
        m_all,
        gl,
        m_rs,
        g_rs,
        u_rs,
        perms,
        delta,
    })
}

impl CardinalityReport {
    /// `name=value` lines; delta always as `num/den`.
    pub fn to_kv_block(&self) -> String {
        format!(
            "n={}\np={}\nm_all={}\ngl={}\nm_rs={}\ng_rs={}\nu_rs={}\nperms={}\ndelta={}\n",
            self.n,
            self.p,
            self.m_all,
            self.gl,
            self.m_rs,
            self.g_rs,
            self.u_rs,
            self.perms,
            self.delta_string()
        )
    }

    pub fn delta_string(&self) -> String {
        format!("{}/{}", self.delta.numer(), self.delta.denom())
    }

    pub fn delta_f64(&self) -> f64 {
        let numer = self.delta.numer().to_f64().unwrap_or(f64::NAN);
        let denom = self.delta.denom().to_f64().unwrap_or(f64::NAN);
        numer / denom
    }
}

impl Default for CardinalityReport {
    fn default() -> Self {
        CardinalityReport {
            n: 0,
            p: 0,
            m_all: BigUint::zero(),
            gl: BigUint::zero(),
            m_rs: BigUint::zero(),
            g_rs: BigUint::zero(),
            u_rs: BigUint::zero(),
            perms: BigUint::zero(),
            delta: Ratio::from_integer(BigInt::zero()),
        }
    }
}
