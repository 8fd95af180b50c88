//! Root data and the affine Weyl group acting on alcoves.
//!
//! Elements of the dominant-alcove set `W+` are represented by two
//! redundant pieces of data: a canonical (ShortLex-minimal) reduced word,
//! and the exact interior point of the alcove in the rho-shifted
//! realization. Points are stored in "coroot pairing" coordinates
//! `c_i = <x, alpha_i^vee>` as integer numerators over the fixed
//! denominator `h` (the Coxeter number). Every generator acts by an
//! integer affine map on these numerators, so no rational type is needed
//! and wall membership is never ambiguous.

use std::collections::HashSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AffineWeylError {
    #[error("invalid Cartan matrix: {0}")]
    BadCartan(String),
    #[error("unknown root system type '{0}'")]
    UnknownType(String),
    #[error("invalid generator index {index} (expected 0..={max})")]
    InvalidGenerator { index: u8, max: u8 },
    #[error("no regular base weight at this l: l = {l} < h = {h}")]
    NoRegularWeight { l: i64, h: i64 },
    #[error("bad alcove word '{0}': {1}")]
    BadWord(String, String),
}

/// Root datum for a finite-type Cartan matrix, plus the derived data the
/// affine alcove geometry needs. Generator 0 is the affine reflection
/// (through the wall `<., theta^vee> = 1` for the highest short root
/// theta); generators 1..=rank follow the Cartan matrix row order.
#[derive(Clone, Debug)]
pub struct RootDatum {
    label: String,
    /// `cartan[i][j] = <alpha_j, alpha_i^vee>`.
    cartan: Vec<Vec<i64>>,
    rank: usize,
    /// Integer symmetrizer: `sym[i] * cartan[i][j] == sym[j] * cartan[j][i]`.
    sym: Vec<i64>,
    /// Positive roots as coefficient vectors in the simple roots.
    pos_roots: Vec<Vec<i64>>,
    /// Positive coroots as coefficient vectors in the simple coroots.
    pos_coroots: Vec<Vec<i64>>,
    /// Highest short root theta, in simple-root coordinates.
    theta_root: Vec<i64>,
    /// `g[j] = <theta, alpha_j^vee>`.
    theta_pairing: Vec<i64>,
    /// Highest coroot theta^vee, in simple-coroot coordinates.
    theta_coroot: Vec<i64>,
    /// Coxeter number h = 1 + height(theta^vee).
    coxeter_number: i64,
}

/// Enumerate the positive roots of a finite-type Cartan matrix by the
/// usual root-string closure, as coefficient vectors in the simple roots.
fn positive_roots_of(cartan: &[Vec<i64>]) -> Result<Vec<Vec<i64>>, AffineWeylError> {
    let n = cartan.len();
    let mut roots: Vec<Vec<i64>> = Vec::new();
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for i in 0..n {
        let mut r = vec![0i64; n];
        r[i] = 1;
        seen.insert(r.clone());
        roots.push(r);
    }
    let mut idx = 0;
    while idx < roots.len() {
        if roots.len() > 10_000 {
            return Err(AffineWeylError::BadCartan(
                "root system does not close up (not finite type?)".into(),
            ));
        }
        let beta = roots[idx].clone();
        for i in 0..n {
            // p = max k with beta - k*alpha_i a root
            let mut p = 0i64;
            let mut down = beta.clone();
            loop {
                down[i] -= 1;
                if down[i] >= 0 && seen.contains(&down) {
                    p += 1;
                } else {
                    break;
                }
            }
            let pairing: i64 = (0..n).map(|j| cartan[i][j] * beta[j]).sum();
            if p - pairing > 0 {
                let mut up = beta.clone();
                up[i] += 1;
                if seen.insert(up.clone()) {
                    roots.push(up);
                }
            }
        }
        idx += 1;
    }
    // Deterministic order: by height, then lexicographic.
    roots.sort_by_key(|r| (r.iter().sum::<i64>(), r.clone()));
    Ok(roots)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Find a positive integer symmetrizer for the Cartan matrix.
fn symmetrizer(cartan: &[Vec<i64>]) -> Result<Vec<i64>, AffineWeylError> {
    let n = cartan.len();
    // Rational e_i as num/den, propagated along the Dynkin graph.
    let mut e: Vec<Option<(i64, i64)>> = vec![None; n];
    for start in 0..n {
        if e[start].is_some() {
            continue;
        }
        e[start] = Some((1, 1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let (ni, di) = e[i].unwrap();
            for j in 0..n {
                if i == j || cartan[i][j] == 0 {
                    continue;
                }
                if cartan[j][i] == 0 {
                    return Err(AffineWeylError::BadCartan(format!(
                        "entry ({i},{j}) nonzero but ({j},{i}) zero"
                    )));
                }
                // e_i * a_ij = e_j * a_ji
                let nj = ni * cartan[i][j];
                let dj = di * cartan[j][i];
                let g = gcd(nj, dj);
                let (mut nj, mut dj) = (nj / g, dj / g);
                if dj < 0 {
                    nj = -nj;
                    dj = -dj;
                }
                match e[j] {
                    None => {
                        e[j] = Some((nj, dj));
                        stack.push(j);
                    }
                    Some(prev) => {
                        if prev != (nj, dj) {
                            return Err(AffineWeylError::BadCartan(
                                "matrix is not symmetrizable".into(),
                            ));
                        }
                    }
                }
            }
        }
    }
    let lcm = e
        .iter()
        .map(|x| x.unwrap().1)
        .fold(1i64, |acc, d| acc / gcd(acc, d) * d);
    let mut out: Vec<i64> = e.iter().map(|x| x.unwrap().0 * (lcm / x.unwrap().1)).collect();
    if out.iter().any(|&x| x <= 0) {
        return Err(AffineWeylError::BadCartan(
            "symmetrizer is not positive".into(),
        ));
    }
    let g = out.iter().fold(0, |acc, &x| gcd(acc, x));
    for x in &mut out {
        *x /= g;
    }
    Ok(out)
}

/// Leading principal minors of the symmetrized matrix, for the
/// positivity check. Integer Bareiss elimination.
fn principal_minors_positive(b: &[Vec<i64>]) -> bool {
    let n = b.len();
    let mut m: Vec<Vec<i128>> = b
        .iter()
        .map(|row| row.iter().map(|&x| x as i128).collect())
        .collect();
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] <= 0 {
            return false;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    true
}

impl RootDatum {
    /// A built-in root datum by name: A1, A2, A3, B2, or G2.
    pub fn builtin(name: &str) -> Result<Self, AffineWeylError> {
        let cartan: Vec<Vec<i64>> = match name.to_ascii_uppercase().as_str() {
            "A1" => vec![vec![2]],
            "A2" => vec![vec![2, -1], vec![-1, 2]],
            "B2" => vec![vec![2, -1], vec![-2, 2]],
            "G2" => vec![vec![2, -1], vec![-3, 2]],
            "A3" => vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]],
            _ => return Err(AffineWeylError::UnknownType(name.to_string())),
        };
        Self::from_cartan(&name.to_ascii_uppercase(), cartan)
    }

    /// Build a root datum from an arbitrary finite-type Cartan matrix,
    /// with `cartan[i][j] = <alpha_j, alpha_i^vee>`.
    pub fn from_cartan(label: &str, cartan: Vec<Vec<i64>>) -> Result<Self, AffineWeylError> {
        let rank = cartan.len();
        if rank == 0 {
            return Err(AffineWeylError::BadCartan("empty matrix".into()));
        }
        if rank > 9 {
            return Err(AffineWeylError::BadCartan(
                "rank > 9 not supported (single-digit generator labels)".into(),
            ));
        }
        for (i, row) in cartan.iter().enumerate() {
            if row.len() != rank {
                return Err(AffineWeylError::BadCartan("matrix is not square".into()));
            }
            if row[i] != 2 {
                return Err(AffineWeylError::BadCartan(format!(
                    "diagonal entry ({i},{i}) is {} (must be 2)",
                    row[i]
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if i != j && x > 0 {
                    return Err(AffineWeylError::BadCartan(format!(
                        "off-diagonal entry ({i},{j}) is positive"
                    )));
                }
            }
        }
        let sym = symmetrizer(&cartan)?;
        let symmetrized: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| sym[i] * cartan[i][j]).collect())
            .collect();
        if !principal_minors_positive(&symmetrized) {
            return Err(AffineWeylError::BadCartan(
                "symmetrized form is not positive definite".into(),
            ));
        }
        let pos_roots = positive_roots_of(&cartan)?;
        let transpose: Vec<Vec<i64>> = (0..rank)
            .map(|i| (0..rank).map(|j| cartan[j][i]).collect())
            .collect();
        let pos_coroots = positive_roots_of(&transpose)?;

        // Highest coroot = unique maximal-height root of the dual system.
        let theta_coroot = pos_coroots
            .last()
            .expect("nonempty coroot list")
            .clone();
        let coxeter_number = 1 + theta_coroot.iter().sum::<i64>();

        // theta is the positive root whose coroot is the highest coroot:
        // coroot coefficients of beta are k_i * e_i * 2 / (beta, beta).
        let mut theta_root = None;
        for beta in &pos_roots {
            let bb: i64 = (0..rank)
                .map(|i| {
                    (0..rank)
                        .map(|j| beta[i] * beta[j] * symmetrized[i][j])
                        .sum::<i64>()
                })
                .sum();
            let coroot: Option<Vec<i64>> = (0..rank)
                .map(|i| {
                    let num = 2 * beta[i] * sym[i];
                    (num % bb == 0).then(|| num / bb)
                })
                .collect();
            if coroot.as_deref() == Some(&theta_coroot[..]) {
                theta_root = Some(beta.clone());
            }
        }
        let theta_root = theta_root.ok_or_else(|| {
            AffineWeylError::BadCartan("could not match highest coroot to a root".into())
        })?;
        let theta_pairing: Vec<i64> = (0..rank)
            .map(|j| (0..rank).map(|i| theta_root[i] * cartan[j][i]).sum())
            .collect();

        Ok(RootDatum {
            label: label.to_string(),
            cartan,
            rank,
            sym,
            pos_roots,
            pos_coroots,
            theta_root,
            theta_pairing,
            theta_coroot,
            coxeter_number,
        })
    }

    /// Parse a plain-text Cartan matrix config: one row of integers per line.
    pub fn from_config_text(text: &str) -> Result<Self, AffineWeylError> {
        let mut rows = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row: Result<Vec<i64>, _> = line.split_whitespace().map(str::parse).collect();
            rows.push(row.map_err(|e| {
                AffineWeylError::BadCartan(format!("unparsable row '{line}': {e}"))
            })?);
        }
        Self::from_cartan("custom", rows)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Number of affine generators (0 is affine, 1..=rank are finite).
    pub fn num_generators(&self) -> usize {
        self.rank + 1
    }

    pub fn coxeter_number(&self) -> i64 {
        self.coxeter_number
    }

    pub fn cartan(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    pub fn positive_roots(&self) -> &[Vec<i64>] {
        &self.pos_roots
    }

    pub fn positive_coroots(&self) -> &[Vec<i64>] {
        &self.pos_coroots
    }

    /// Diagonal symmetrizer entries d_i with d_i·a_ij symmetric.
    pub fn symmetrizer(&self) -> &[i64] {
        &self.sym
    }

    /// The highest root θ in simple-root coordinates.
    pub fn theta(&self) -> &[i64] {
        &self.theta_root
    }

    /// rho in pairing coordinates: `<rho, alpha_i^vee> = 1` for every i.
    pub fn rho(&self) -> Vec<i64> {
        vec![1; self.rank]
    }

    fn check_generator(&self, s: u8) -> Result<(), AffineWeylError> {
        if (s as usize) > self.rank {
            return Err(AffineWeylError::InvalidGenerator {
                index: s,
                max: self.rank as u8,
            });
        }
        Ok(())
    }

    /// Reflect a point (numerators over h) through the base wall of
    /// generator `s`. This is also left multiplication by `s` on alcoves.
    fn apply_letter(&self, nums: &[i64], s: u8) -> Vec<i64> {
        let mut out = nums.to_vec();
        if s == 0 {
            let t: i64 = self
                .theta_coroot
                .iter()
                .zip(nums)
                .map(|(d, c)| d * c)
                .sum::<i64>()
                - self.coxeter_number;
            for j in 0..self.rank {
                out[j] -= t * self.theta_pairing[j];
            }
        } else {
            let i = (s - 1) as usize;
            let c = nums[i];
            for j in 0..self.rank {
                out[j] -= c * self.cartan[j][i];
            }
        }
        out
    }

    /// Scale-l dot-action reflection on a weight mu = lambda + rho
    /// (integer pairing coordinates, no denominator).
    fn apply_letter_weight(&self, mu: &[i64], s: u8, l: i64) -> Vec<i64> {
        let mut out = mu.to_vec();
        if s == 0 {
            let t: i64 = self
                .theta_coroot
                .iter()
                .zip(mu)
                .map(|(d, c)| d * c)
                .sum::<i64>()
                - l;
            for j in 0..self.rank {
                out[j] -= t * self.theta_pairing[j];
            }
        } else {
            let i = (s - 1) as usize;
            let c = mu[i];
            for j in 0..self.rank {
                out[j] -= c * self.cartan[j][i];
            }
        }
        out
    }

    /// Numerators (over h) of the base point rho/h.
    fn base_point(&self) -> Vec<i64> {
        vec![1; self.rank]
    }

    fn is_dominant(&self, nums: &[i64]) -> bool {
        nums.iter().all(|&c| c > 0)
    }

    /// Hyperplane-counting length: the number of affine walls
    /// `<., beta^vee> = m` strictly separating the point from the base
    /// point. Valid for any alcove interior point.
    fn point_length(&self, nums: &[i64]) -> u32 {
        let h = self.coxeter_number;
        self.pos_coroots
            .iter()
            .map(|d| {
                let val: i64 = d.iter().zip(nums).map(|(a, b)| a * b).sum();
                val.div_euclid(h).unsigned_abs() as u32
            })
            .sum()
    }

    /// Greedy ShortLex canonical word for the element mapping the base
    /// alcove to the alcove containing `nums`.
    fn canonical_word(&self, nums: &[i64]) -> Vec<u8> {
        let mut word = Vec::new();
        let mut cur = nums.to_vec();
        let mut len = self.point_length(&cur);
        while len > 0 {
            let mut stepped = false;
            for s in 0..=self.rank as u8 {
                let q = self.apply_letter(&cur, s);
                if self.point_length(&q) == len - 1 {
                    word.push(s);
                    cur = q;
                    len -= 1;
                    stepped = true;
                    break;
                }
            }
            assert!(stepped, "no descent found for a positive-length point");
        }
        debug_assert_eq!(cur, self.base_point());
        word
    }

    fn element_from_point(&self, nums: Vec<i64>) -> AlcoveElement {
        let word = self.canonical_word(&nums);
        let len = self.point_length(&nums);
        debug_assert_eq!(word.len() as u32, len);
        AlcoveElement {
            word,
            nums,
            len,
        }
    }

    /// Image of the base point under the word (letters applied right to left).
    fn point_of_word(&self, word: &[u8]) -> Vec<i64> {
        let mut p = self.base_point();
        for &s in word.iter().rev() {
            p = self.apply_letter(&p, s);
        }
        p
    }
}

/// An element of `W+`: a dominant alcove with its canonical reduced word
/// and exact interior point (numerators over the Coxeter number).
#[derive(Clone, Debug)]
pub struct AlcoveElement {
    word: Vec<u8>,
    nums: Vec<i64>,
    len: u32,
}

impl PartialEq for AlcoveElement {
    fn eq(&self, other: &Self) -> bool {
        self.nums == other.nums
    }
}
impl Eq for AlcoveElement {}

impl std::hash::Hash for AlcoveElement {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.nums.hash(state);
    }
}

/// Ordered by (length, ShortLex word); this is the enumeration and output
/// order used everywhere.
impl Ord for AlcoveElement {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.len, &self.word).cmp(&(other.len, &other.word))
    }
}
impl PartialOrd for AlcoveElement {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AlcoveElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            write!(f, "e")
        } else {
            for s in &self.word {
                write!(f, "{}", s)?;
            }
            Ok(())
        }
    }
}

impl AlcoveElement {
    pub fn word(&self) -> &[u8] {
        &self.word
    }

    /// The word as a digit string; "e" for the identity.
    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.word.iter().map(|s| (b'0' + s) as char).collect()
        }
    }

    pub fn length(&self) -> u32 {
        self.len
    }

    /// Interior point numerators over the Coxeter number h.
    pub fn point_numerators(&self) -> &[i64] {
        &self.nums
    }
}

/// Result of multiplying an element of `W+` by a generator on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    /// `xs` stays dominant with length going up.
    UpIn(AlcoveElement),
    /// `xs` stays dominant with length going down.
    DownIn(AlcoveElement),
    /// `xs` leaves `W+`.
    Out,
}

/// The fundamental alcove element: empty word, length 0.
pub fn identity(datum: &RootDatum) -> AlcoveElement {
    AlcoveElement {
        word: Vec::new(),
        nums: datum.base_point(),
        len: 0,
    }
}

/// Right multiplication `x -> xs`, classified by the three-case geometry.
pub fn right_mult(
    datum: &RootDatum,
    x: &AlcoveElement,
    s: u8,
) -> Result<StepResult, AffineWeylError> {
    datum.check_generator(s)?;
    // point(xs) = x(s(base)): apply s first, then x's letters right-to-left.
    let mut p = datum.apply_letter(&datum.base_point(), s);
    for &letter in x.word.iter().rev() {
        p = datum.apply_letter(&p, letter);
    }
    if !datum.is_dominant(&p) {
        return Ok(StepResult::Out);
    }
    let y = datum.element_from_point(p);
    if y.len == x.len + 1 {
        Ok(StepResult::UpIn(y))
    } else {
        debug_assert_eq!(y.len + 1, x.len, "generator step must change length by 1");
        Ok(StepResult::DownIn(y))
    }
}

/// All elements of `W+` with length at most `max_len`, ordered by
/// (length, ShortLex word).
pub fn enumerate_wplus(datum: &RootDatum, max_len: u32) -> Vec<AlcoveElement> {
    let mut result = vec![identity(datum)];
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    seen.insert(datum.base_point());
    let mut level_start = 0;
    for _ in 0..max_len {
        let level_end = result.len();
        let mut next = Vec::new();
        for i in level_start..level_end {
            let x = result[i].clone();
            for s in 0..=datum.rank as u8 {
                if let StepResult::UpIn(y) = right_mult(datum, &x, s).expect("valid generator") {
                    if seen.insert(y.nums.clone()) {
                        next.push(y);
                    }
                }
            }
        }
        next.sort();
        level_start = level_end;
        result.extend(next);
    }
    result
}

/// The weight `x . 0` under the scale-l dot action, in pairing
/// coordinates `<lambda, alpha_i^vee>`. Requires `l >= h` so that 0 is a
/// regular weight in the bottom alcove.
pub fn weight_of(
    datum: &RootDatum,
    x: &AlcoveElement,
    l: i64,
) -> Result<Vec<i64>, AffineWeylError> {
    let h = datum.coxeter_number;
    if l < h {
        return Err(AffineWeylError::NoRegularWeight { l, h });
    }
    let mut mu = datum.rho(); // lambda + rho with lambda = 0
    for &s in x.word.iter().rev() {
        mu = datum.apply_letter_weight(&mu, s, l);
    }
    Ok(mu.iter().map(|c| c - 1).collect())
}

/// Parse a generator-index string ("010", or "e"/"" for the identity)
/// into an element of `W+`. The word need not be reduced or canonical;
/// the resulting group element must map the base alcove to a dominant one.
pub fn parse_word(datum: &RootDatum, text: &str) -> Result<AlcoveElement, AffineWeylError> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "e" {
        return Ok(identity(datum));
    }
    let mut word = Vec::new();
    for ch in trimmed.chars() {
        let s = ch
            .to_digit(10)
            .ok_or_else(|| AffineWeylError::BadWord(text.into(), format!("bad letter '{ch}'")))?
            as u8;
        datum
            .check_generator(s)
            .map_err(|_| AffineWeylError::BadWord(text.into(), format!("bad letter '{ch}'")))?;
        word.push(s);
    }
    let p = datum.point_of_word(&word);
    if !datum.is_dominant(&p) {
        return Err(AffineWeylError::BadWord(
            text.into(),
            "element is not a dominant alcove".into(),
        ));
    }
    Ok(datum.element_from_point(p))
}
