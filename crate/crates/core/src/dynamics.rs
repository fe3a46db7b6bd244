//! Gain synthesis and exact simulation of networked systems over GF(p).
//!
//! A stabilizable pair (A, B) admits a gain K making A - BK nilpotent;
//! coupling identical agents through an admissible graph then synchronizes
//! every trajectory in finitely many steps. Everything here is exact:
//! synchronization is equality of residues, not a tolerance.

use crate::admissibility::check_admissible;
use crate::error::{Error, Result};
use crate::field::{FieldSpec, Residue};
use crate::matrix::FMatrix;

/// Single-agent pair (A, B) with an optional synthesized gain K.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentSystem {
    pub a: FMatrix,
    pub b: FMatrix,
    pub k: Option<FMatrix>,
}

impl AgentSystem {
    pub fn new(a: FMatrix, b: FMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Shape(format!(
                "A must be square, got {}x{}",
                a.rows(),
                a.cols()
            )));
        }
        if b.rows() != a.rows() {
            return Err(Error::Shape(format!(
                "B must have {} rows, got {}",
                a.rows(),
                b.rows()
            )));
        }
        if a.field() != b.field() {
            return Err(Error::FieldMismatch(a.field().p(), b.field().p()));
        }
        Ok(AgentSystem { a, b, k: None })
    }

    pub fn with_gain(mut self, k: FMatrix) -> Result<Self> {
        if k.rows() != self.b.cols() || k.cols() != self.a.rows() {
            return Err(Error::Shape(format!(
                "K must be {}x{}, got {}x{}",
                self.b.cols(),
                self.a.rows(),
                k.rows(),
                k.cols()
            )));
        }
        if k.field() != self.a.field() {
            return Err(Error::FieldMismatch(k.field().p(), self.a.field().p()));
        }
        self.k = Some(k);
        Ok(self)
    }

    /// Computes and stores the nilpotent-placing gain.
    pub fn synthesize_gain(&mut self) -> Result<&FMatrix> {
        let k = stabilizing_gain(&self.a, &self.b)?;
        self.k = Some(k);
        Ok(self.k.as_ref().unwrap())
    }

    pub fn state_dim(&self) -> usize {
        self.a.rows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.cols()
    }

    pub fn field(&self) -> FieldSpec {
        self.a.field()
    }

    /// `A - B K`, requiring the gain to be present.
    pub fn closed_agent(&self) -> Result<FMatrix> {
        let k = self.k.as_ref().ok_or(Error::MissingGain)?;
        self.a.sub(&self.b.matmul(k)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizabilityVerdict {
    pub controllable_dim: usize,
    pub stabilizable: bool,
    pub reason: String,
}

/// Controllable-subspace decomposition: `basis` is a change of basis whose
/// leading columns span `im [B, AB, ..., A^{n-1}B]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaircaseDecomposition {
    pub verdict: StabilizabilityVerdict,
    pub basis: FMatrix,
}

/// Incremental echelon basis for picking independent columns.
struct Echelon {
    field: FieldSpec,
    rows: Vec<Vec<Residue>>,
    pivots: Vec<usize>,
}

impl Echelon {
    fn new(field: FieldSpec) -> Self {
        Echelon {
            field,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Returns true (and absorbs the reduced vector) if `v` is independent
    /// of the span so far.
    fn try_insert(&mut self, v: &[Residue]) -> bool {
        let f = self.field;
        let mut w = v.to_vec();
        for (row, &piv) in self.rows.iter().zip(&self.pivots) {
            let c = w[piv];
            if c != 0 {
                for (wi, ri) in w.iter_mut().zip(row) {
                    *wi = f.sub(*wi, f.mul(c, *ri));
                }
            }
        }
        let Some(piv) = w.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = f.inv(w[piv]).expect("nonzero");
        for wi in w.iter_mut() {
            *wi = f.mul(*wi, inv);
        }
        self.rows.push(w);
        self.pivots.push(piv);
        true
    }
}

/// Decomposes (A, B) along the controllable subspace and decides
/// stabilizability: the uncontrollable diagonal block must be nilpotent.
pub fn staircase(a: &FMatrix, b: &FMatrix) -> Result<StaircaseDecomposition> {
    let sys = AgentSystem::new(a.clone(), b.clone())?;
    let n = sys.state_dim();
    let f = sys.field();

    // columns of [B, AB, ..., A^{n-1}B], scanned left to right
    let mut echelon = Echelon::new(f);
    let mut chosen: Vec<Vec<Residue>> = Vec::new();
    let mut block = b.clone();
    for _ in 0..n {
        for j in 0..block.cols() {
            let col = block.col(j);
            if echelon.try_insert(&col) {
                chosen.push(col);
            }
        }
        if chosen.len() == n {
            break;
        }
        block = a.matmul(&block)?;
    }
    let dim = chosen.len();

    // complete to a full basis with standard basis vectors
    for i in 0..n {
        if chosen.len() == n {
            break;
        }
        let mut e = vec![0; n];
        e[i] = 1 % f.p();
        if echelon.try_insert(&e) {
            chosen.push(e);
        }
    }
    let mut basis = FMatrix::zeros(n, n, f);
    for (j, col) in chosen.iter().enumerate() {
        for i in 0..n {
            basis[(i, j)] = col[i];
        }
    }

    let basis_inv = basis.inverse()?;
    let a_bar = basis_inv.matmul(a)?.matmul(&basis)?;
    // uncontrollable diagonal block
    let k = n - dim;
    let mut a22 = FMatrix::zeros(k, k, f);
    for i in 0..k {
        for j in 0..k {
            a22[(i, j)] = a_bar[(dim + i, dim + j)];
        }
    }
    let (stabilizable, reason) = if dim == n {
        (true, "pair is controllable".to_string())
    } else if a22.is_nilpotent()? {
        (
            true,
            format!("uncontrollable block of dimension {k} is nilpotent"),
        )
    } else {
        (
            false,
            format!("uncontrollable block of dimension {k} is not nilpotent"),
        )
    };
    Ok(StaircaseDecomposition {
        verdict: StabilizabilityVerdict {
            controllable_dim: dim,
            stabilizable,
            reason,
        },
        basis,
    })
}

/// Synthesizes K with `char_poly(A - BK) = lambda^n`. Single-input pairs
/// go through deadbeat placement on the controllable block in canonical
/// coordinates; multi-input pairs fall back to exhaustive search over the
/// `p^{mn}` gain candidates while that space stays below 10^6.
pub fn stabilizing_gain(a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    let sys = AgentSystem::new(a.clone(), b.clone())?;
    let n = sys.state_dim();
    let m = sys.input_dim();
    let f = sys.field();
    let stair = staircase(a, b)?;
    if !stair.verdict.stabilizable {
        return Err(Error::NotStabilizable(stair.verdict.reason));
    }
    if m != 1 {
        return brute_force_gain(a, b);
    }

    let d = stair.verdict.controllable_dim;
    if d == 0 {
        return Ok(FMatrix::zeros(m, n, f));
    }
    let v = &stair.basis;
    let v_inv = v.inverse()?;
    let a_bar = v_inv.matmul(a)?.matmul(v)?;
    let b_bar = v_inv.matmul(b)?;
    let mut a11 = FMatrix::zeros(d, d, f);
    for i in 0..d {
        for j in 0..d {
            a11[(i, j)] = a_bar[(i, j)];
        }
    }
    let mut b1 = FMatrix::zeros(d, 1, f);
    for i in 0..d {
        b1[(i, 0)] = b_bar[(i, 0)];
    }

    // Ackermann for the target lambda^d: K1 = (last row of C^{-1}) A11^d
    let mut ctrb = FMatrix::zeros(d, d, f);
    let mut col = b1.clone();
    for j in 0..d {
        for i in 0..d {
            ctrb[(i, j)] = col[(i, 0)];
        }
        if j + 1 < d {
            col = a11.matmul(&col)?;
        }
    }
    let ctrb_inv = ctrb.inverse()?;
    let q: Vec<Residue> = ctrb_inv.row(d - 1).to_vec();
    let a11_pow = a11.pow(d as u64)?;
    let k1 = a11_pow.vec_mat(&q)?;

    let mut k_bar = FMatrix::zeros(1, n, f);
    for (j, &kj) in k1.iter().enumerate() {
        k_bar[(0, j)] = kj;
    }
    let k = k_bar.matmul(&v_inv)?;

    debug_assert!(a.sub(&b.matmul(&k)?)?.is_nilpotent()?);
    Ok(k)
}

/// Every gain K with `(A - BK)^n = 0`, found by exhausting all `p^{mn}`
/// candidates in odometer order. Independent of the synthesis path; also
/// the multi-input fallback.
pub fn nilpotent_gain_candidates(a: &FMatrix, b: &FMatrix, budget: u128) -> Result<Vec<FMatrix>> {
    let sys = AgentSystem::new(a.clone(), b.clone())?;
    let n = sys.state_dim();
    let m = sys.input_dim();
    let f = sys.field();
    let p = f.p();
    let candidates = (p as u128).pow((m * n) as u32);
    if candidates > budget {
        return Err(Error::Unsupported(format!(
            "gain search space {candidates} exceeds budget {budget}"
        )));
    }
    let mut found = Vec::new();
    let mut digits = vec![0u64; m * n];
    loop {
        let k = FMatrix::new(m, n, digits.clone(), f)?;
        if a.sub(&b.matmul(&k)?)?.is_nilpotent()? {
            found.push(k);
        }
        // odometer, rightmost fastest
        let mut i = digits.len();
        loop {
            if i == 0 {
                return Ok(found);
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn brute_force_gain(a: &FMatrix, b: &FMatrix) -> Result<FMatrix> {
    let found = nilpotent_gain_candidates(a, b, 1_000_000)?;
    found.into_iter().next().ok_or_else(|| {
        Error::NotStabilizable("exhaustive search found no nilpotent-placing gain".into())
    })
}

/// Global closed loop `I_N (x) A - (I_N - E) (x) BK` of N agents coupled
/// through the graph matrix E.
pub fn closed_loop(e: &FMatrix, sys: &AgentSystem) -> Result<FMatrix> {
    if !e.is_square() {
        return Err(Error::Shape(format!(
            "graph matrix must be square, got {}x{}",
            e.rows(),
            e.cols()
        )));
    }
    if e.field() != sys.field() {
        return Err(Error::FieldMismatch(e.field().p(), sys.field().p()));
    }
    let k = sys.k.as_ref().ok_or(Error::MissingGain)?;
    let n_agents = e.rows();
    let f = sys.field();
    let lap = FMatrix::identity(n_agents, f).sub(e)?;
    let bk = sys.b.matmul(k)?;
    let id_kron_a = FMatrix::identity(n_agents, f).kron(&sys.a)?;
    let l_kron_bk = lap.kron(&bk)?;
    id_kron_a.sub(&l_kron_bk)
}

/// Time-indexed trajectory of all agents, exact over GF(p).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTrace {
    pub n_agents: usize,
    pub agent_dim: usize,
    pub field: FieldSpec,
    /// `states[k]` is the stacked state at step k, length `n_agents * agent_dim`
    pub states: Vec<Vec<Residue>>,
    /// First step from which all agents are equal through the end of the
    /// trace; requires at least two consecutive equal steps.
    pub sync_step: Option<usize>,
    /// Reference trajectory `alpha(k)`, present when the graph is admissible.
    pub alpha_traj: Option<Vec<Vec<Residue>>>,
    /// `alpha(k+1) = A alpha(k)` held at every recorded step.
    pub alpha_recursion_ok: bool,
}

impl SimulationTrace {
    pub fn agent_state(&self, k: usize, agent: usize) -> &[Residue] {
        let n = self.agent_dim;
        &self.states[k][agent * n..(agent + 1) * n]
    }

    pub fn all_agents_equal_at(&self, k: usize) -> bool {
        let first = self.agent_state(k, 0).to_vec();
        (1..self.n_agents).all(|i| self.agent_state(k, i) == first)
    }

    fn find_sync_step(&mut self) {
        let kmax = self.states.len() - 1;
        let mut sync = None;
        for k in (0..=kmax).rev() {
            if self.all_agents_equal_at(k) {
                sync = Some(k);
            } else {
                break;
            }
        }
        // lockstep needs the step after as witness
        self.sync_step = sync.filter(|&k| k < kmax);
    }

    /// CSV with header `k,agent,dim,value`; agents are 1-indexed and the
    /// reference trajectory is appended under agent id `alpha`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,agent,dim,value\n");
        for (k, state) in self.states.iter().enumerate() {
            for agent in 0..self.n_agents {
                for dim in 0..self.agent_dim {
                    out.push_str(&format!(
                        "{},{},{},{}\n",
                        k,
                        agent + 1,
                        dim + 1,
                        state[agent * self.agent_dim + dim]
                    ));
                }
            }
        }
        if let Some(alpha) = &self.alpha_traj {
            for (k, a) in alpha.iter().enumerate() {
                for (dim, v) in a.iter().enumerate() {
                    out.push_str(&format!("{},alpha,{},{}\n", k, dim + 1, v));
                }
            }
        }
        out
    }
}

fn check_state_vector(x: &[Residue], expect_len: usize, field: FieldSpec) -> Result<()> {
    if x.len() != expect_len {
        return Err(Error::Shape(format!(
            "state vector has length {}, expected {expect_len}",
            x.len()
        )));
    }
    if let Some(&e) = x.iter().find(|&&e| e >= field.p()) {
        return Err(Error::Shape(format!(
            "state entry {e} out of range for GF({})",
            field.p()
        )));
    }
    Ok(())
}

/// Exact iteration of the scalar consensus dynamics `x(k+1) = E x(k)`.
/// When E is admissible, the trace also carries the (constant) reference
/// value computed from the left eigenvector.
pub fn simulate_scalar(e: &FMatrix, x0: &[Residue], kmax: usize) -> Result<SimulationTrace> {
    if !e.is_square() {
        return Err(Error::Shape(format!(
            "graph matrix must be square, got {}x{}",
            e.rows(),
            e.cols()
        )));
    }
    let n = e.rows();
    let f = e.field();
    check_state_vector(x0, n, f)?;
    if kmax < n {
        return Err(Error::Shape(format!("kmax = {kmax} must be >= N = {n}")));
    }

    let mut states = Vec::with_capacity(kmax + 1);
    states.push(x0.to_vec());
    for _ in 0..kmax {
        let next = e.mat_vec(states.last().unwrap())?;
        states.push(next);
    }

    let report = check_admissible(e)?;
    let (alpha_traj, alpha_recursion_ok) = if report.admissible {
        let p_vec = report.left_eigvec.expect("admissible implies eigenvector");
        let den_inv = f.inv(report.p_dot_one)?;
        let alphas: Vec<Vec<Residue>> = states
            .iter()
            .map(|x| {
                let num = p_vec
                    .iter()
                    .zip(x)
                    .fold(0, |acc, (&pi, &xi)| f.add(acc, f.mul(pi, xi)));
                vec![f.mul(num, den_inv)]
            })
            .collect();
        // scalar reference dynamics is alpha(k+1) = alpha(k)
        let ok = alphas.windows(2).all(|w| w[0] == w[1]);
        (Some(alphas), ok)
    } else {
        (None, true)
    };

    let mut trace = SimulationTrace {
        n_agents: n,
        agent_dim: 1,
        field: f,
        states,
        sync_step: None,
        alpha_traj,
        alpha_recursion_ok,
    };
    trace.find_sync_step();
    Ok(trace)
}

/// Exact iteration of the coupled closed loop. Demands an admissible graph,
/// a present gain, and a nilpotent `A - BK` (checked eagerly); computes the
/// reference `alpha(k)` every step and verifies `alpha(k+1) = A alpha(k)`.
pub fn simulate_lti(
    e: &FMatrix,
    sys: &AgentSystem,
    x0: &[Residue],
    kmax: usize,
) -> Result<SimulationTrace> {
    let report = check_admissible(e)?;
    if !report.admissible {
        return Err(Error::NotAdmissible(
            "LTI synchronization requires an admissible graph matrix".into(),
        ));
    }
    let closed_agent = sys.closed_agent()?;
    let n = sys.state_dim();
    if !closed_agent.is_nilpotent()? {
        return Err(Error::BadGain(format!(
            "(A - BK)^{n} != 0, the gain does not place a nilpotent error loop"
        )));
    }
    let n_agents = e.rows();
    let f = sys.field();
    if e.field() != f {
        return Err(Error::FieldMismatch(e.field().p(), f.p()));
    }
    check_state_vector(x0, n_agents * n, f)?;
    if kmax < n_agents * n {
        return Err(Error::Shape(format!(
            "kmax = {kmax} must be >= N*n = {}",
            n_agents * n
        )));
    }

    let loop_matrix = closed_loop(e, sys)?;
    let mut states = Vec::with_capacity(kmax + 1);
    states.push(x0.to_vec());
    for _ in 0..kmax {
        let next = loop_matrix.mat_vec(states.last().unwrap())?;
        states.push(next);
    }

    let p_vec = report.left_eigvec.expect("admissible implies eigenvector");
    let den_inv = f.inv(report.p_dot_one)?;
    let alphas: Vec<Vec<Residue>> = states
        .iter()
        .map(|x| {
            (0..n)
                .map(|c| {
                    let num = (0..n_agents)
                        .fold(0, |acc, i| f.add(acc, f.mul(p_vec[i], x[i * n + c])));
                    f.mul(num, den_inv)
                })
                .collect()
        })
        .collect();
    let alpha_recursion_ok = alphas
        .windows(2)
        .all(|w| sys.a.mat_vec(&w[0]).map(|av| av == w[1]).unwrap_or(false));

    let mut trace = SimulationTrace {
        n_agents,
        agent_dim: n,
        field: f,
        states,
        sync_step: None,
        alpha_traj: Some(alphas),
        alpha_recursion_ok,
    };
    trace.find_sync_step();
    Ok(trace)
}

/// Checks the closed-loop spectrum factorization
/// `P_closed(lambda) = P_A(lambda) lambda^{(N-1) n}`.
pub fn verify_closed_loop_spectrum(e: &FMatrix, sys: &AgentSystem) -> Result<bool> {
    let loop_matrix = closed_loop(e, sys)?;
    let lhs = loop_matrix.char_poly()?;
    let n_agents = e.rows();
    let n = sys.state_dim();
    let rhs = sys.a.char_poly()?.shift((n_agents - 1) * n);
    Ok(lhs == rhs)
}
