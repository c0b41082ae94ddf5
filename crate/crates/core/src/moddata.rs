//! The modular-data kernel: representation and validation of (S̃, T) pairs,
//! fusion via the Verlinde formula, Gauss sums and the multiplicative central
//! charge, Deligne products, invertible objects, and exhaustive fusion-subdata
//! search.
//!
//! All checks are exact. Unitarity is tested as s̃·conj(s̃) = D²·Id with
//! D² = Σ d_i², so no square root of the global dimension is ever needed for
//! verification; the square root itself is carried separately when a
//! constructor knows it in closed form.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::cyclo::{sqrt_rational, CycNum, Rat};
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<CycNum>>;

/// Provenance of a data set; enough to rebuild family-constructed data (and
/// with it the exact global-dimension square root and fusion rules) after a
/// round trip through JSON.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case")]
pub enum Meta {
    Custom,
    Su2 {
        k: u64,
    },
    Psu2 {
        m: u64,
    },
    Ising {
        nu: i64,
    },
    /// Pointed data from a metric group: cyclic factor orders and the
    /// quadratic form as exponents, q(g) = e^{2πi·q_num[g]/q_den} with
    /// elements enumerated in mixed-radix order.
    Pointed {
        group: Vec<u64>,
        q_num: Vec<i64>,
        q_den: u64,
    },
    Closure {
        m: u64,
        a: u64,
        shape: ClosureShape,
    },
    Deligne {
        left: Box<Meta>,
        right: Box<Meta>,
    },
    AbelianDouble {
        group: String,
        cocycle: String,
    },
    Zested {
        base: Box<Meta>,
        times: u32,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureShape {
    Rank4m3,
    Rank3m4,
}

impl std::fmt::Display for ClosureShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClosureShape::Rank4m3 => write!(f, "rank4m3"),
            ClosureShape::Rank3m4 => write!(f, "rank3m4"),
        }
    }
}

/// Fusion multiplicities N_{ij}^k as a dense rank³ table.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionTensor {
    rank: usize,
    n: Vec<u32>,
}

impl FusionTensor {
    pub fn new(rank: usize) -> Self {
        FusionTensor {
            rank,
            n: vec![0; rank * rank * rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> u32 {
        self.n[(i * self.rank + j) * self.rank + k]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, v: u32) {
        self.n[(i * self.rank + j) * self.rank + k] = v;
    }

    /// Nonzero summands of X_i ⊗ X_j.
    pub fn product(&self, i: usize, j: usize) -> Vec<(usize, u32)> {
        (0..self.rank)
            .filter_map(|k| {
                let m = self.get(i, j, k);
                (m > 0).then_some((k, m))
            })
            .collect()
    }

    /// For invertible i, the unique k with i ⊗ X_j = X_k.
    pub fn translate(&self, i: usize, j: usize) -> Result<usize> {
        let prods = self.product(i, j);
        match prods.as_slice() {
            [(k, 1)] => Ok(*k),
            _ => Err(Error::math(format!(
                "label {i} does not act invertibly on {j}"
            ))),
        }
    }

    /// Exact associativity: Σ_m N_{ij}^m N_{mk}^l = Σ_m N_{jk}^m N_{im}^l.
    pub fn check_associativity(&self) -> std::result::Result<(), (usize, usize, usize, usize)> {
        let r = self.rank;
        for i in 0..r {
            for j in 0..r {
                for k in 0..r {
                    for l in 0..r {
                        let lhs: u64 = (0..r)
                            .map(|m| self.get(i, j, m) as u64 * self.get(m, k, l) as u64)
                            .sum();
                        let rhs: u64 = (0..r)
                            .map(|m| self.get(j, k, m) as u64 * self.get(i, m, l) as u64)
                            .sum();
                        if lhs != rhs {
                            return Err((i, j, k, l));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Fusion tensor of a Deligne product, N_{(i,a)(j,b)}^{(k,c)} = N_{ij}^k · N_{ab}^c.
    pub fn kron(&self, other: &FusionTensor) -> FusionTensor {
        let ra = self.rank;
        let rb = other.rank;
        let mut out = FusionTensor::new(ra * rb);
        for i in 0..ra {
            for j in 0..ra {
                for k in 0..ra {
                    let m1 = self.get(i, j, k);
                    if m1 == 0 {
                        continue;
                    }
                    for a in 0..rb {
                        for b in 0..rb {
                            for c in 0..rb {
                                let m2 = other.get(a, b, c);
                                if m2 == 0 {
                                    continue;
                                }
                                out.set(i * rb + a, j * rb + b, k * rb + c, m1 * m2);
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Restriction to a fusion-closed subset given in ascending order.
    pub fn restrict(&self, subset: &[usize]) -> FusionTensor {
        let mut out = FusionTensor::new(subset.len());
        for (a, &i) in subset.iter().enumerate() {
            for (b, &j) in subset.iter().enumerate() {
                for (c, &k) in subset.iter().enumerate() {
                    out.set(a, b, c, self.get(i, j, k));
                }
            }
        }
        out
    }
}

/// One named exact check inside a [`ValidationReport`].
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Offending indices or a short explanation on failure.
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn failure_summary(&self) -> String {
        self.checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| match &c.detail {
                Some(d) => format!("{}: {}", c.name, d),
                None => c.name.to_string(),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// Gauss sums and the multiplicative central charge.
#[derive(Clone, Debug)]
pub struct ChargeReport {
    pub tau_plus: CycNum,
    pub tau_minus: CycNum,
    pub dim_sq: CycNum,
    /// τ⁺ / D with the positive real root; None when τ⁺ = 0 (super-modular
    /// inputs) or when D is not representable.
    pub xi: Option<CycNum>,
    /// Exact result of ξ·conj(ξ) = 1 when ξ is defined.
    pub xi_unimodular: Option<bool>,
}

impl ChargeReport {
    /// ξ as e^{2πi·num/den} when it is a root of unity.
    pub fn xi_exponent(&self) -> Option<(u64, u64)> {
        self.xi.as_ref().and_then(|x| x.as_root_of_unity())
    }
}

/// The group of invertible objects (labels of quantum dimension 1).
#[derive(Clone, Debug)]
pub struct InvertibleGroup {
    /// Label indices with d_i = 1, ascending; position 0 is the unit.
    pub indices: Vec<usize>,
    /// Multiplication table in positions into `indices`.
    pub table: Vec<Vec<usize>>,
    /// Invariant-factor name, e.g. "Z2xZ4"; "Z1" for the trivial group.
    pub name: String,
}

impl InvertibleGroup {
    pub fn order(&self) -> usize {
        self.indices.len()
    }
}

/// One fusion-closed unital dual-closed subset found by the exhaustive search.
#[derive(Clone, Debug)]
pub struct SubData {
    pub indices: Vec<usize>,
    pub dim_sq: CycNum,
    pub modular: bool,
}

/// Modular (or pre-modular) data: labels, unnormalized S̃, twists.
#[derive(Debug)]
pub struct ModularData {
    labels: Vec<String>,
    s: Matrix,
    t: Vec<CycNum>,
    dim_sqrt: Option<CycNum>,
    meta: Meta,
    fusion: OnceLock<FusionTensor>,
}

impl Clone for ModularData {
    fn clone(&self) -> Self {
        let fusion = OnceLock::new();
        if let Some(f) = self.fusion.get() {
            let _ = fusion.set(f.clone());
        }
        ModularData {
            labels: self.labels.clone(),
            s: self.s.clone(),
            t: self.t.clone(),
            dim_sqrt: self.dim_sqrt.clone(),
            meta: self.meta.clone(),
            fusion,
        }
    }
}

impl ModularData {
    /// Structural construction: shape checks and conductor normalization.
    /// Mathematical properties are the business of [`ModularData::validate`].
    pub fn new(labels: Vec<String>, s: Matrix, t: Vec<CycNum>) -> Result<Self> {
        let rank = labels.len();
        if rank == 0 {
            return Err(Error::malformed("rank must be at least 1"));
        }
        if s.len() != rank || s.iter().any(|row| row.len() != rank) {
            return Err(Error::malformed(format!(
                "S-matrix must be {rank}x{rank} to match the label list"
            )));
        }
        if t.len() != rank {
            return Err(Error::malformed("twist vector length must equal the rank"));
        }
        if !s[0][0].is_one() {
            return Err(Error::malformed("missing unit row: s[0][0] must be 1"));
        }
        if !t[0].is_one() {
            return Err(Error::malformed("unit twist must be 1"));
        }
        let mut conductor = 1u64;
        for row in &s {
            for e in row {
                conductor = num_integer::lcm(conductor, e.conductor());
            }
        }
        for e in &t {
            conductor = num_integer::lcm(conductor, e.conductor());
        }
        let s = s
            .into_iter()
            .map(|row| row.into_iter().map(|e| e.raised(conductor)).collect())
            .collect();
        let t = t.into_iter().map(|e| e.raised(conductor)).collect();
        Ok(ModularData {
            labels,
            s,
            t,
            dim_sqrt: None,
            meta: Meta::Custom,
            fusion: OnceLock::new(),
        })
    }

    pub fn with_dim_sqrt(mut self, d: CycNum) -> Self {
        debug_assert_eq!(d.mul(&d), self.dim_sq(), "dim_sqrt must square to D^2");
        self.dim_sqrt = Some(d);
        self
    }

    pub fn with_meta(mut self, meta: Meta) -> Self {
        self.meta = meta;
        self
    }

    pub fn with_fusion(self, fusion: FusionTensor) -> Self {
        assert_eq!(fusion.rank(), self.rank());
        let _ = self.fusion.set(fusion);
        self
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn s_matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn s(&self, i: usize, j: usize) -> &CycNum {
        &self.s[i][j]
    }

    pub fn twists(&self) -> &[CycNum] {
        &self.t
    }

    pub fn twist(&self, i: usize) -> &CycNum {
        &self.t[i]
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn conductor(&self) -> u64 {
        self.s[0][0].conductor()
    }

    /// Quantum dimensions d_i = s̃_{0,i}.
    pub fn dims(&self) -> &[CycNum] {
        &self.s[0]
    }

    pub fn dim(&self, i: usize) -> &CycNum {
        &self.s[0][i]
    }

    /// D² = Σ d_i².
    pub fn dim_sq(&self) -> CycNum {
        let mut acc = CycNum::zero();
        for d in self.dims() {
            acc = acc.add(&d.mul(d));
        }
        acc
    }

    /// The positive square root of D², exact. Available when the data came
    /// from a family constructor (closed form) or when D² is rational.
    pub fn dim_sqrt(&self) -> Result<CycNum> {
        if let Some(d) = &self.dim_sqrt {
            return Ok(d.clone());
        }
        let dsq = self.dim_sq();
        if let Some(r) = dsq.as_rational() {
            if let Some(root) = sqrt_rational(&r) {
                if root.mul(&root) == dsq {
                    return Ok(root);
                }
            }
        }
        Err(Error::Unsupported(
            "global dimension square root is not available for this data; \
             rebuild it through a family constructor"
                .into(),
        ))
    }

    pub fn stored_dim_sqrt(&self) -> Option<&CycNum> {
        self.dim_sqrt.as_ref()
    }

    /// Fusion rules, computed once from the Verlinde formula unless a
    /// constructor attached them.
    pub fn fusion(&self) -> Result<&FusionTensor> {
        if let Some(f) = self.fusion.get() {
            return Ok(f);
        }
        let f = self.verlinde()?;
        Ok(self.fusion.get_or_init(|| f))
    }

    pub fn fusion_attached(&self) -> bool {
        self.fusion.get().is_some()
    }

    /// The Verlinde formula N_{ij}^k = Σ_r s_{ir} s_{jr} conj(s_{kr}) / s_{0r}
    /// with every entry certified to be a non-negative integer by exact
    /// rational comparison.
    pub fn verlinde(&self) -> Result<FusionTensor> {
        let r = self.rank();
        let dsq = self.dim_sq();
        let inv_dsq = dsq
            .inv()
            .map_err(|_| Error::math("not modular data: global dimension is zero"))?;
        let mut inv_s0 = Vec::with_capacity(r);
        for rr in 0..r {
            inv_s0.push(self.s[0][rr].inv().map_err(|_| {
                Error::math(format!("not modular data: s[0][{rr}] = 0"))
            })?);
        }
        let conj_s: Vec<Vec<CycNum>> = self
            .s
            .iter()
            .map(|row| row.iter().map(|e| e.conj()).collect())
            .collect();
        let mut tensor = FusionTensor::new(r);
        for i in 0..r {
            for j in i..r {
                let p: Vec<CycNum> = (0..r)
                    .map(|rr| self.s[i][rr].mul(&self.s[j][rr]).mul(&inv_s0[rr]))
                    .collect();
                for k in 0..r {
                    let mut sum = CycNum::zero();
                    for rr in 0..r {
                        sum = sum.add(&p[rr].mul(&conj_s[k][rr]));
                    }
                    let val = sum.mul(&inv_dsq);
                    let n = val
                        .as_rational()
                        .filter(|q| q.is_integer() && !q.is_negative())
                        .and_then(|q| u32::try_from(q.to_integer()).ok())
                        .ok_or_else(|| {
                            Error::math(format!(
                                "not modular data: Verlinde entry N[{i}][{j}]^[{k}] = {val} \
                                 is not a non-negative integer"
                            ))
                        })?;
                    tensor.set(i, j, k, n);
                    tensor.set(j, i, k, n);
                }
            }
        }
        Ok(tensor)
    }

    /// Charge-conjugation permutation i ↦ i* from N_{ij}^0.
    pub fn dual_perm(&self) -> Result<Vec<usize>> {
        let fusion = self.fusion()?;
        let r = self.rank();
        let mut dual = vec![usize::MAX; r];
        for i in 0..r {
            let partners: Vec<usize> = (0..r).filter(|&j| fusion.get(i, j, 0) > 0).collect();
            match partners.as_slice() {
                [j] if fusion.get(i, *j, 0) == 1 => dual[i] = *j,
                _ => {
                    return Err(Error::math(format!(
                        "dual of label {i} is not unique with multiplicity one"
                    )))
                }
            }
        }
        for i in 0..r {
            if dual[dual[i]] != i {
                return Err(Error::math("duality permutation is not an involution"));
            }
        }
        Ok(dual)
    }

    /// Exhaustive exact verification of the modular-data axioms.
    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let r = self.rank();
        let mut ok = true;

        // Structure: unit normalizations (re-checked for loaded data).
        let structure = self.s[0][0].is_one() && self.t[0].is_one();
        checks.push(CheckResult {
            name: "structure",
            passed: structure,
            detail: (!structure).then(|| "s[0][0] or t[0] differs from 1".into()),
        });
        ok &= structure;

        // Symmetry.
        let mut bad = None;
        'sym: for i in 0..r {
            for j in i + 1..r {
                if self.s[i][j] != self.s[j][i] {
                    bad = Some((i, j));
                    break 'sym;
                }
            }
        }
        checks.push(CheckResult {
            name: "symmetry",
            passed: bad.is_none(),
            detail: bad.map(|(i, j)| format!("s[{i}][{j}] != s[{j}][{i}]")),
        });
        ok &= bad.is_none();

        // Unit row: real, certified positive dimensions.
        let mut bad = None;
        for i in 0..r {
            if !self.s[0][i].is_positive_real() {
                bad = Some(i);
                break;
            }
        }
        checks.push(CheckResult {
            name: "dimensions-positive",
            passed: bad.is_none(),
            detail: bad.map(|i| format!("s[0][{i}] is not a positive real")),
        });
        ok &= bad.is_none();

        // Twists are roots of unity (finite order).
        let mut bad = None;
        for i in 0..r {
            if self.t[i].as_root_of_unity().is_none() {
                bad = Some(i);
                break;
            }
        }
        checks.push(CheckResult {
            name: "twists-finite-order",
            passed: bad.is_none(),
            detail: bad.map(|i| format!("t[{i}] is not a root of unity")),
        });
        ok &= bad.is_none();

        // Unitarity: s̃ · conj(s̃) = D² · Id.
        if ok {
            let dsq = self.dim_sq();
            let mut bad = None;
            'uni: for i in 0..r {
                for j in i..r {
                    let mut acc = CycNum::zero();
                    for k in 0..r {
                        acc = acc.add(&self.s[i][k].mul(&self.s[j][k].conj()));
                    }
                    let expect = if i == j { dsq.clone() } else { CycNum::zero() };
                    if acc != expect {
                        bad = Some((i, j));
                        break 'uni;
                    }
                }
            }
            checks.push(CheckResult {
                name: "unitarity",
                passed: bad.is_none(),
                detail: bad.map(|(i, j)| {
                    format!("S singular or non-unitary: (s conj(s))[{i}][{j}] != D^2 delta")
                }),
            });
            ok &= bad.is_none();
        }

        // Verlinde integrality and non-negativity, always recomputed from S̃
        // and cross-checked against any constructor-attached fusion rules.
        let fusion = if ok {
            match self.verlinde() {
                Ok(computed) => {
                    checks.push(CheckResult {
                        name: "verlinde-integrality",
                        passed: true,
                        detail: None,
                    });
                    if let Some(attached) = self.fusion.get() {
                        let consistent = *attached == computed;
                        checks.push(CheckResult {
                            name: "fusion-consistency",
                            passed: consistent,
                            detail: (!consistent)
                                .then(|| "attached fusion differs from Verlinde".into()),
                        });
                        ok &= consistent;
                    } else {
                        let _ = self.fusion.set(computed);
                    }
                    if ok {
                        Some(self.fusion.get().expect("fusion cached above"))
                    } else {
                        None
                    }
                }
                Err(e) => {
                    checks.push(CheckResult {
                        name: "verlinde-integrality",
                        passed: false,
                        detail: Some(e.to_string()),
                    });
                    ok = false;
                    None
                }
            }
        } else {
            None
        };

        // Duals and the balancing equation θ_i θ_j s̃_{ij} = Σ_k N_{i*j}^k d_k θ_k.
        if let Some(fusion) = fusion {
            match self.dual_perm() {
                Ok(dual) => {
                    checks.push(CheckResult {
                        name: "duals-involution",
                        passed: true,
                        detail: None,
                    });
                    let mut bad = None;
                    'bal: for i in 0..r {
                        for j in 0..r {
                            let lhs = self.t[i].mul(&self.t[j]).mul(&self.s[i][j]);
                            let mut rhs = CycNum::zero();
                            for k in 0..r {
                                let m = fusion.get(dual[i], j, k);
                                if m > 0 {
                                    let term = self.s[0][k].mul(&self.t[k]).scale(&Rat::from_integer(
                                        BigInt::from(m),
                                    ));
                                    rhs = rhs.add(&term);
                                }
                            }
                            if lhs != rhs {
                                bad = Some((i, j));
                                break 'bal;
                            }
                        }
                    }
                    checks.push(CheckResult {
                        name: "balancing",
                        passed: bad.is_none(),
                        detail: bad.map(|(i, j)| format!("balancing fails at ({i},{j})")),
                    });
                    ok &= bad.is_none();
                }
                Err(e) => {
                    checks.push(CheckResult {
                        name: "duals-involution",
                        passed: false,
                        detail: Some(e.to_string()),
                    });
                    ok = false;
                }
            }
        }

        // |ξ| = 1, tested exactly as τ⁺·conj(τ⁺) = D².
        if ok {
            let charge = self.central_charge();
            let modulus_ok =
                charge.tau_plus.mul(&charge.tau_plus.conj()) == charge.dim_sq;
            checks.push(CheckResult {
                name: "central-charge-modulus",
                passed: modulus_ok,
                detail: (!modulus_ok).then(|| "tau+ conj(tau+) != D^2".into()),
            });
            ok &= modulus_ok;
        }

        ValidationReport { pass: ok, checks }
    }

    /// Gauss sums τ± = Σ θ_i^{±1} d_i² and ξ = τ⁺/D.
    pub fn central_charge(&self) -> ChargeReport {
        let mut tau_plus = CycNum::zero();
        let mut tau_minus = CycNum::zero();
        for i in 0..self.rank() {
            let dsq = self.dim(i).mul(self.dim(i));
            tau_plus = tau_plus.add(&self.t[i].mul(&dsq));
            tau_minus = tau_minus.add(&self.t[i].conj().mul(&dsq));
        }
        let dim_sq = self.dim_sq();
        let (xi, xi_unimodular) = if tau_plus.is_zero() {
            (None, None)
        } else {
            match self.dim_sqrt() {
                Ok(d) => match tau_plus.div(&d) {
                    Ok(xi) => {
                        let uni = xi.mul(&xi.conj()).is_one();
                        (Some(xi), Some(uni))
                    }
                    Err(_) => (None, None),
                },
                Err(_) => (None, None),
            }
        };
        ChargeReport {
            tau_plus,
            tau_minus,
            dim_sq,
            xi,
            xi_unimodular,
        }
    }

    /// Deligne product: labels pair up, S̃ and T multiply entrywise.
    pub fn deligne(&self, other: &ModularData) -> Result<ModularData> {
        let ra = self.rank();
        let rb = other.rank();
        let mut labels = Vec::with_capacity(ra * rb);
        for la in &self.labels {
            for lb in &other.labels {
                labels.push(format!("({la},{lb})"));
            }
        }
        let mut s = Vec::with_capacity(ra * rb);
        for i in 0..ra {
            for a in 0..rb {
                let mut row = Vec::with_capacity(ra * rb);
                for j in 0..ra {
                    for b in 0..rb {
                        row.push(self.s[i][j].mul(&other.s[a][b]));
                    }
                }
                s.push(row);
            }
        }
        let mut t = Vec::with_capacity(ra * rb);
        for i in 0..ra {
            for a in 0..rb {
                t.push(self.t[i].mul(&other.t[a]));
            }
        }
        let mut md = ModularData::new(labels, s, t)?.with_meta(Meta::Deligne {
            left: Box::new(self.meta.clone()),
            right: Box::new(other.meta.clone()),
        });
        if let (Ok(da), Ok(db)) = (self.dim_sqrt(), other.dim_sqrt()) {
            md = md.with_dim_sqrt(da.mul(&db));
        }
        // Fusion of a product is the product of fusions; computing it factor
        // by factor keeps the Verlinde formula off rank ra·rb data.
        let fa = self.fusion()?;
        let fb = other.fusion()?;
        Ok(md.with_fusion(fa.kron(fb)))
    }

    /// Indices of the labels in the Deligne product of `self` and `other`.
    pub fn product_index(&self, other: &ModularData, i: usize, a: usize) -> usize {
        i * other.rank() + a
    }

    /// Invertible objects (d_i = 1) with their group structure.
    pub fn invertibles(&self) -> Result<InvertibleGroup> {
        let one = CycNum::one();
        let indices: Vec<usize> = (0..self.rank())
            .filter(|&i| self.s[0][i] == one)
            .collect();
        let fusion = self.fusion()?;
        let pos = |k: usize| indices.iter().position(|&x| x == k);
        let g = indices.len();
        let mut table = vec![vec![usize::MAX; g]; g];
        for a in 0..g {
            for b in 0..g {
                let k = fusion.translate(indices[a], indices[b])?;
                let p = pos(k).ok_or_else(|| {
                    Error::math("product of invertibles is not invertible")
                })?;
                table[a][b] = p;
            }
        }
        // Group axioms.
        for a in 0..g {
            if table[0][a] != a || table[a][0] != a {
                return Err(Error::math("unit does not act trivially on invertibles"));
            }
            if !(0..g).any(|b| table[a][b] == 0) {
                return Err(Error::math("invertible without inverse"));
            }
        }
        for a in 0..g {
            for b in 0..g {
                for c in 0..g {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::math("invertible multiplication not associative"));
                    }
                }
            }
        }
        let abelian = (0..g).all(|a| (0..g).all(|b| table[a][b] == table[b][a]));
        let name = if abelian {
            abelian_group_name(&table)
        } else {
            format!("nonabelian({g})")
        };
        Ok(InvertibleGroup {
            indices,
            table,
            name,
        })
    }

    /// All fusion-closed, unital, dual-closed label subsets, with dimension
    /// and an exact modularity flag for the restricted data.
    pub fn subdata_search(&self) -> Result<Vec<SubData>> {
        const RANK_BOUND: usize = 32;
        if self.rank() > RANK_BOUND {
            return Err(Error::BoundExceeded(format!(
                "subdata search supports rank <= {RANK_BOUND}, got {}",
                self.rank()
            )));
        }
        let fusion = self.fusion()?;
        let dual = self.dual_perm()?;
        let closure = |seed: &BTreeSet<usize>| -> BTreeSet<usize> {
            let mut set = seed.clone();
            set.insert(0);
            loop {
                let mut grew = false;
                let members: Vec<usize> = set.iter().copied().collect();
                for &i in &members {
                    if set.insert(dual[i]) {
                        grew = true;
                    }
                }
                let members: Vec<usize> = set.iter().copied().collect();
                for &i in &members {
                    for &j in &members {
                        for (k, _) in fusion.product(i, j) {
                            if set.insert(k) {
                                grew = true;
                            }
                        }
                    }
                }
                if !grew {
                    return set;
                }
            }
        };
        let mut found: BTreeSet<Vec<usize>> = BTreeSet::new();
        let start = closure(&BTreeSet::new());
        let mut queue = vec![start.clone()];
        found.insert(start.iter().copied().collect());
        while let Some(set) = queue.pop() {
            for x in 0..self.rank() {
                if set.contains(&x) {
                    continue;
                }
                let mut seed = set.clone();
                seed.insert(x);
                let grown = closure(&seed);
                let key: Vec<usize> = grown.iter().copied().collect();
                if found.insert(key) {
                    queue.push(grown);
                }
            }
        }
        let mut out = Vec::new();
        for indices in found {
            let sub = self.restrict(&indices, false)?;
            let mut dim_sq = CycNum::zero();
            for &i in &indices {
                dim_sq = dim_sq.add(&self.dim(i).mul(self.dim(i)));
            }
            let modular = sub.validate().pass;
            out.push(SubData {
                indices,
                dim_sq,
                modular,
            });
        }
        out.sort_by_key(|s| (s.indices.len(), s.indices.clone()));
        Ok(out)
    }

    /// Restriction to a label subset containing the unit, ascending order.
    /// `attach_fusion` reuses the parent fusion table (for fusion-closed
    /// subsets of pre-modular data where the Verlinde route is unavailable).
    pub fn restrict(&self, indices: &[usize], attach_fusion: bool) -> Result<ModularData> {
        if indices.first() != Some(&0) {
            return Err(Error::malformed(
                "restriction must contain the unit label at position 0",
            ));
        }
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let s = indices
            .iter()
            .map(|&i| indices.iter().map(|&j| self.s[i][j].clone()).collect())
            .collect();
        let t = indices.iter().map(|&i| self.t[i].clone()).collect();
        let md = ModularData::new(labels, s, t)?;
        if attach_fusion {
            let fusion = self.fusion()?;
            Ok(md.with_fusion(fusion.restrict(indices)))
        } else {
            Ok(md)
        }
    }

    /// Entrywise equality of S̃ and T (labels and provenance ignored).
    pub fn same_data(&self, other: &ModularData) -> bool {
        self.rank() == other.rank()
            && self.s == other.s
            && self.t == other.t
    }

    /// Entrywise complex conjugate of the data.
    pub fn conjugate(&self) -> ModularData {
        let s = self
            .s
            .iter()
            .map(|row| row.iter().map(|e| e.conj()).collect())
            .collect();
        let t = self.t.iter().map(|e| e.conj()).collect();
        let mut md = ModularData::new(self.labels.clone(), s, t)
            .expect("conjugate of well-formed data is well-formed");
        if let Some(d) = &self.dim_sqrt {
            md = md.with_dim_sqrt(d.clone());
        }
        md
    }

    /// A relabeling π with π(0) = 0 carrying this data onto `other`
    /// (S̃ and T entrywise), if one exists.
    pub fn find_relabeling(&self, other: &ModularData) -> Option<Vec<usize>> {
        if self.rank() != other.rank() {
            return None;
        }
        let r = self.rank();
        let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(r);
        for i in 0..r {
            let c: Vec<usize> = (0..r)
                .filter(|&j| {
                    other.t[j] == self.t[i] && other.s[0][j] == self.s[0][i]
                })
                .collect();
            if c.is_empty() {
                return None;
            }
            candidates.push(c);
        }
        if !candidates[0].contains(&0) {
            return None;
        }
        candidates[0] = vec![0];
        let mut perm = vec![usize::MAX; r];
        let mut used = vec![false; r];
        fn dfs(
            pos: usize,
            a: &ModularData,
            b: &ModularData,
            candidates: &[Vec<usize>],
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            if pos == a.rank() {
                return true;
            }
            'cand: for &j in &candidates[pos] {
                if used[j] {
                    continue;
                }
                for prev in 0..pos {
                    if b.s[perm[prev]][j] != a.s[prev][pos] {
                        continue 'cand;
                    }
                }
                if b.s[j][j] != a.s[pos][pos] {
                    continue;
                }
                perm[pos] = j;
                used[j] = true;
                if dfs(pos + 1, a, b, candidates, perm, used) {
                    return true;
                }
                used[j] = false;
                perm[pos] = usize::MAX;
            }
            false
        }
        dfs(0, self, other, &candidates, &mut perm, &mut used).then_some(perm)
    }

    /// Sorted multiset key of the quantum dimensions, for exact comparisons.
    pub fn dims_multiset_key(&self) -> Vec<(u64, Vec<BigInt>, BigInt)> {
        let mut keys: Vec<_> = self.dims().iter().map(|d| d.sort_key()).collect();
        keys.sort();
        keys
    }
}

/// Simultaneous row/column permutation matching of two square matrices with
/// row 0 pinned; optionally also tries the entrywise complex conjugate.
/// Returns the permutation and whether conjugation was applied.
pub fn match_matrix_up_to_perm(
    a: &Matrix,
    b: &Matrix,
    allow_conj: bool,
) -> Option<(Vec<usize>, bool)> {
    fn try_match(a: &Matrix, b: &Matrix) -> Option<Vec<usize>> {
        let r = a.len();
        if b.len() != r {
            return None;
        }
        let mut perm = vec![usize::MAX; r];
        let mut used = vec![false; r];
        fn dfs(
            pos: usize,
            a: &Matrix,
            b: &Matrix,
            perm: &mut Vec<usize>,
            used: &mut Vec<bool>,
        ) -> bool {
            let r = a.len();
            if pos == r {
                return true;
            }
            let range: Vec<usize> = if pos == 0 { vec![0] } else { (0..r).collect() };
            'cand: for j in range {
                if used[j] {
                    continue;
                }
                if b[j][j] != a[pos][pos] {
                    continue;
                }
                for prev in 0..pos {
                    if b[perm[prev]][j] != a[prev][pos] {
                        continue 'cand;
                    }
                }
                perm[pos] = j;
                used[j] = true;
                if dfs(pos + 1, a, b, perm, used) {
                    return true;
                }
                used[j] = false;
                perm[pos] = usize::MAX;
            }
            false
        }
        dfs(0, a, b, &mut perm, &mut used).then_some(perm)
    }
    if let Some(p) = try_match(a, b) {
        return Some((p, false));
    }
    if allow_conj {
        let bc: Matrix = b
            .iter()
            .map(|row| row.iter().map(|e| e.conj()).collect())
            .collect();
        if let Some(p) = try_match(a, &bc) {
            return Some((p, true));
        }
    }
    None
}

/// Invariant-factor name of an abelian group given by its multiplication
/// table, via counting solutions of x^d = e for the divisors d.
pub(crate) fn abelian_group_name(table: &[Vec<usize>]) -> String {
    let n = table.len();
    if n == 1 {
        return "Z1".to_string();
    }
    let pow = |x: usize, e: u64| -> usize {
        let mut acc = 0usize; // identity is position 0
        for _ in 0..e {
            acc = table[acc][x];
        }
        acc
    };
    // For each prime p | n recover the partition of the p-exponent from
    // c_j = #{x : x^(p^j) = e} = p^(sum_i min(j, lambda_i)).
    let mut primes = Vec::new();
    let mut m = n as u64;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            primes.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    let mut p_parts: Vec<Vec<u64>> = Vec::new();
    for &p in &primes {
        let mut s_prev = 0u32;
        let mut counts_exceeding: Vec<u32> = Vec::new();
        let mut j = 1u32;
        loop {
            let pj = p.pow(j);
            let c = (0..n).filter(|&x| pow(x, pj) == 0).count() as u64;
            let s_j = {
                let mut e = 0u32;
                let mut c = c;
                while c % p == 0 {
                    c /= p;
                    e += 1;
                }
                e
            };
            let m_j = s_j - s_prev; // number of parts >= j
            if m_j == 0 {
                break;
            }
            counts_exceeding.push(m_j);
            s_prev = s_j;
            j += 1;
        }
        // Conjugate partition: lambda_i = #{j : m_j >= i}.
        let num_parts = counts_exceeding.first().copied().unwrap_or(0);
        let mut lambda = Vec::new();
        for i in 1..=num_parts {
            let l = counts_exceeding.iter().filter(|&&mj| mj >= i).count() as u64;
            lambda.push(l);
        }
        lambda.sort_unstable_by(|a, b| b.cmp(a));
        p_parts.push(lambda.into_iter().map(|l| p.pow(l as u32)).collect());
    }
    // Invariant factors: componentwise product of the k-th largest p-powers.
    let max_len = p_parts.iter().map(|v| v.len()).max().unwrap_or(0);
    let mut factors = Vec::new();
    for k in 0..max_len {
        let mut f = 1u64;
        for part in &p_parts {
            if k < part.len() {
                f *= part[k];
            }
        }
        factors.push(f);
    }
    factors.sort_unstable();
    factors
        .iter()
        .map(|f| format!("Z{f}"))
        .collect::<Vec<_>>()
        .join("x")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::cyclo::sqrt_nat;

    /// Toric-code data assembled by hand: labels (1, e, m, psi).
    pub(crate) fn toric_by_hand() -> ModularData {
        let one = CycNum::one();
        let neg = CycNum::from_int(-1);
        let s = vec![
            vec![one.clone(), one.clone(), one.clone(), one.clone()],
            vec![one.clone(), one.clone(), neg.clone(), neg.clone()],
            vec![one.clone(), neg.clone(), one.clone(), neg.clone()],
            vec![one.clone(), neg.clone(), neg.clone(), one.clone()],
        ];
        let t = vec![one.clone(), one.clone(), one.clone(), neg.clone()];
        ModularData::new(
            vec!["1".into(), "e".into(), "m".into(), "psi".into()],
            s,
            t,
        )
        .unwrap()
        .with_dim_sqrt(CycNum::from_int(2))
    }

    #[test]
    fn rank_one_fusion() {
        let md = ModularData::new(
            vec!["1".into()],
            vec![vec![CycNum::one()]],
            vec![CycNum::one()],
        )
        .unwrap();
        let f = md.fusion().unwrap();
        assert_eq!(f.get(0, 0, 0), 1);
        assert!(md.validate().pass);
    }

    #[test]
    fn toric_code_validates() {
        let md = toric_by_hand();
        let report = md.validate();
        assert!(report.pass, "{}", report.failure_summary());
        let f = md.fusion().unwrap();
        // e x m = psi, psi x psi = 1
        assert_eq!(f.get(1, 2, 3), 1);
        assert_eq!(f.get(3, 3, 0), 1);
        assert!(f.check_associativity().is_ok());
        let charge = md.central_charge();
        assert!(charge.xi.as_ref().unwrap().is_one());
        assert_eq!(charge.xi_exponent(), Some((0, 1)));
    }

    #[test]
    fn svec_data_fails_unitarity() {
        let one = CycNum::one();
        let md = ModularData::new(
            vec!["1".into(), "f".into()],
            vec![vec![one.clone(), one.clone()], vec![one.clone(), one.clone()]],
            vec![one.clone(), CycNum::from_int(-1)],
        )
        .unwrap();
        let report = md.validate();
        assert!(!report.pass);
        assert!(report
            .checks
            .iter()
            .any(|c| c.name == "unitarity" && !c.passed));
    }

    #[test]
    fn toric_subdata_count_is_five() {
        let md = toric_by_hand();
        let subs = md.subdata_search().unwrap();
        assert_eq!(subs.len(), 5);
        let sizes: Vec<usize> = subs.iter().map(|s| s.indices.len()).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 4]);
        // {1}, whole: modular; the three order-2 subsets are not.
        assert!(subs[0].modular);
        assert!(subs[4].modular);
        assert!(!subs[1].modular && !subs[2].modular && !subs[3].modular);
    }

    #[test]
    fn invertibles_of_toric() {
        let md = toric_by_hand();
        let inv = md.invertibles().unwrap();
        assert_eq!(inv.order(), 4);
        assert_eq!(inv.name, "Z2xZ2");
    }

    #[test]
    fn deligne_of_toric_with_itself() {
        let md = toric_by_hand();
        let prod = md.deligne(&md).unwrap();
        assert_eq!(prod.rank(), 16);
        assert!(prod.validate().pass);
        assert_eq!(prod.dim_sqrt().unwrap(), CycNum::from_int(4));
        let xi = prod.central_charge().xi.unwrap();
        assert!(xi.is_one());
    }

    #[test]
    fn dim_sqrt_rational_fallback() {
        let md = toric_by_hand();
        // strip the stored root; D^2 = 4 is rational, so the fallback works
        let bare = ModularData::new(
            md.labels().to_vec(),
            md.s_matrix().clone(),
            md.twists().to_vec(),
        )
        .unwrap();
        assert_eq!(bare.dim_sqrt().unwrap(), CycNum::from_int(2));
    }

    #[test]
    fn relabeling_detects_permuted_copy() {
        let md = toric_by_hand();
        // permute e <-> m
        let p = [0usize, 2, 1, 3];
        let s: Matrix = (0..4)
            .map(|i| (0..4).map(|j| md.s(p[i], p[j]).clone()).collect())
            .collect();
        let t = (0..4).map(|i| md.twist(p[i]).clone()).collect();
        let permuted =
            ModularData::new(md.labels().to_vec(), s, t).unwrap();
        // e <-> m is an automorphism of the toric code, so any returned
        // relabeling is acceptable as long as it carries the data exactly.
        let perm = permuted.find_relabeling(&md).unwrap();
        for i in 0..4 {
            assert_eq!(md.twist(perm[i]), permuted.twist(i));
            for j in 0..4 {
                assert_eq!(md.s(perm[i], perm[j]), permuted.s(i, j));
            }
        }
        assert!(md.find_relabeling(&md).is_some());
    }

    #[test]
    fn abelian_names() {
        // Z4: cyclic table
        let z4: Vec<Vec<usize>> = (0..4)
            .map(|a| (0..4).map(|b| (a + b) % 4).collect())
            .collect();
        assert_eq!(abelian_group_name(&z4), "Z4");
        let z2z2: Vec<Vec<usize>> = (0..4)
            .map(|a| (0..4).map(|b| a ^ b).collect())
            .collect();
        assert_eq!(abelian_group_name(&z2z2), "Z2xZ2");
    }

    #[test]
    fn charge_of_semion_like_data() {
        // Z2 pointed with q(1) = i: s = [[1,1],[1,-1]], t = (1, i)
        let one = CycNum::one();
        let md = ModularData::new(
            vec!["0".into(), "1".into()],
            vec![
                vec![one.clone(), one.clone()],
                vec![one.clone(), CycNum::from_int(-1)],
            ],
            vec![one.clone(), CycNum::i()],
        )
        .unwrap()
        .with_dim_sqrt(sqrt_nat(2));
        assert!(md.validate().pass);
        let xi = md.central_charge();
        assert_eq!(xi.xi_exponent(), Some((1, 8)));
        assert_eq!(xi.xi_unimodular, Some(true));
    }
}
