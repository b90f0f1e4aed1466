//! Truncated Katz-series similarity over the trust adjacency matrix, plus the
//! normalization and boosting stages that turn the raw series into the
//! similarity used for neighbor selection.
//!
//! The series `sigma = I + aA + (aA)^2 + ...` counts trust walks of every
//! length, geometrically damped by `a`. Computing it exactly means inverting
//! `I - aA`, which is dense and infeasible at network scale, so the production
//! path truncates the series after `k_max` products; the closed form survives
//! as a small dense oracle for tests.

use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::graph::{Convention, DegreeMode, DegreeVector, TrustGraph};
use crate::sparse::SparseMatrix;

/// Row-normalization variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowNorm {
    L1,
    L2,
    Max,
}

impl RowNorm {
    pub fn as_str(&self) -> &'static str {
        match self {
            RowNorm::L1 => "l1",
            RowNorm::L2 => "l2",
            RowNorm::Max => "max",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "l1" => Ok(RowNorm::L1),
            "l2" => Ok(RowNorm::L2),
            "max" => Ok(RowNorm::Max),
            other => Err(Error::Config(format!(
                "unknown row norm '{other}' (expected l1, l2, or max)"
            ))),
        }
    }
}

/// What happens to diagonal entries when the boost stage masks the
/// propagated matrix. Dropping them keeps self-similarity from dominating
/// every row's normalizer; keeping them is available for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BoostDiag {
    Keep,
    #[default]
    Drop,
}

impl BoostDiag {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoostDiag::Keep => "keep",
            BoostDiag::Drop => "drop",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "keep" => Ok(BoostDiag::Keep),
            "drop" => Ok(BoostDiag::Drop),
            other => Err(Error::Config(format!(
                "unknown diagonal handling '{other}' (expected keep or drop)"
            ))),
        }
    }
}

/// Full configuration of one similarity build.
#[derive(Debug, Clone, PartialEq)]
pub struct KatzConfig {
    /// Damping factor of the series; any value in `(0, 1)` is accepted for
    /// the truncated iteration.
    pub alpha: f64,
    /// Number of propagation steps: the series is truncated after `(aA)^k_max`.
    pub k_max: usize,
    /// Optional degree normalization applied to the truncated series.
    pub degree_norm: Option<DegreeMode>,
    /// Optional row normalization; mandatory when `boost` is set, where it
    /// normalizes the masked matrix instead of the series itself.
    pub row_norm: Option<RowNorm>,
    /// Re-inject explicit trust: mask the propagated matrix down to pairs
    /// without a direct edge, row-normalize it, and add the adjacency back.
    pub boost: bool,
    pub boost_diag: BoostDiag,
    /// Adjacency orientation the build expects the graph to use.
    pub convention: Convention,
}

impl Default for KatzConfig {
    fn default() -> Self {
        KatzConfig {
            alpha: 0.008,
            k_max: 2,
            degree_norm: None,
            row_norm: None,
            boost: false,
            boost_diag: BoostDiag::default(),
            convention: Convention::default(),
        }
    }
}

impl KatzConfig {
    /// Rejects configurations the pipeline cannot honor.
    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.boost {
            if self.k_max != 2 {
                return Err(Error::Config(format!(
                    "boost requires exactly two propagation steps, got k_max={}",
                    self.k_max
                )));
            }
            if self.row_norm.is_none() {
                return Err(Error::Config(
                    "boost requires a row normalization (l1, l2, or max)".into(),
                ));
            }
        }
        Ok(())
    }

    /// Compact label: `KS_` then propagation (`P` for k_max=2, `N` for
    /// k_max=1), degree norm (`N`/`I`/`C`), row norm (`N`/`L1`/`L2`/`M`),
    /// boost (`B`/`N`). Example: `KS_PCMB`.
    pub fn label(&self) -> String {
        let k = match self.k_max {
            2 => "P".to_string(),
            1 => "N".to_string(),
            other => format!("K{other}"),
        };
        let d = match self.degree_norm {
            None => "N",
            Some(DegreeMode::In) => "I",
            Some(DegreeMode::Combined) => "C",
        };
        let r = match self.row_norm {
            None => "N",
            Some(RowNorm::L1) => "L1",
            Some(RowNorm::L2) => "L2",
            Some(RowNorm::Max) => "M",
        };
        let b = if self.boost { "B" } else { "N" };
        format!("KS_{k}{d}{r}{b}")
    }

    /// Inverse of [`Self::label`] for the `P`/`N` propagation forms; other
    /// fields (alpha, convention, diagonal handling) keep their defaults.
    pub fn parse_label(label: &str) -> Result<KatzConfig> {
        let err = || Error::Config(format!("unrecognized configuration label '{label}'"));
        let body = label.strip_prefix("KS_").ok_or_else(err)?;
        let mut chars: Vec<char> = body.chars().collect();
        if chars.len() < 4 {
            return Err(err());
        }
        let k_max = match chars.remove(0) {
            'P' => 2,
            'N' => 1,
            _ => return Err(err()),
        };
        let degree_norm = match chars.remove(0) {
            'N' => None,
            'I' => Some(DegreeMode::In),
            'C' => Some(DegreeMode::Combined),
            _ => return Err(err()),
        };
        let row_norm = match chars.remove(0) {
            'N' => None,
            'M' => Some(RowNorm::Max),
            'L' => match chars.first() {
                Some('1') => {
                    chars.remove(0);
                    Some(RowNorm::L1)
                }
                Some('2') => {
                    chars.remove(0);
                    Some(RowNorm::L2)
                }
                _ => return Err(err()),
            },
            _ => return Err(err()),
        };
        if chars.len() != 1 {
            return Err(err());
        }
        let boost = match chars[0] {
            'B' => true,
            'N' => false,
            _ => return Err(err()),
        };
        let config = KatzConfig {
            k_max,
            degree_norm,
            row_norm,
            boost,
            ..KatzConfig::default()
        };
        config.validate()?;
        Ok(config)
    }
}

/// How a similarity matrix was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Katz(KatzConfig),
    /// The adjacency matrix itself, unchanged.
    TrustExplicit {
        convention: Convention,
    },
    /// Jaccard overlap of per-user neighbor sets.
    TrustJaccard {
        trusted_sets: bool,
    },
}

impl Provenance {
    /// Short name used in reports and file sidecars.
    pub fn label(&self) -> String {
        match self {
            Provenance::Katz(c) => c.label(),
            Provenance::TrustExplicit { .. } => "Trust_exp".into(),
            Provenance::TrustJaccard { .. } => "Trust_jac".into(),
        }
    }
}

/// User-user similarity matrix together with the configuration that built it.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    matrix: SparseMatrix,
    provenance: Provenance,
}

impl SimilarityMatrix {
    pub fn new(matrix: SparseMatrix, provenance: Provenance) -> Self {
        SimilarityMatrix { matrix, provenance }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn n_users(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn density(&self) -> f64 {
        self.matrix.density()
    }
}

/// Truncated similarity series `I + aA + (aA)^2 + ... + (aA)^k_max`.
///
/// Built by the recurrence `P <- aA * P`, `sigma <- sigma + P` starting from
/// the identity, so the cost is `k_max` sparse products.
pub fn katz_truncated(a: &SparseMatrix, alpha: f64, k_max: usize) -> Result<SimilarityMatrix> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::Dimension(format!(
            "similarity needs a square adjacency, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Config(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let damped = a.scaled(alpha);
    let mut sigma = SparseMatrix::identity(a.n_rows());
    let mut power = SparseMatrix::identity(a.n_rows());
    for _ in 0..k_max {
        power = damped.matmul(&power)?;
        sigma = sigma.add(&power)?;
    }
    let provenance = KatzConfig {
        alpha,
        k_max,
        ..KatzConfig::default()
    };
    Ok(SimilarityMatrix::new(sigma, Provenance::Katz(provenance)))
}

/// Dense closed form `(I - aA)^{-1}` of the full series; test oracle only.
///
/// Enforces the convergence bound `a * spectral_radius(A) < 1` before
/// inverting, so a diverging series is reported as a configuration error
/// rather than returned as garbage.
pub fn katz_closed_form_oracle(a: &DenseMatrix, alpha: f64) -> Result<DenseMatrix> {
    if a.n_rows() != a.n_cols() {
        return Err(Error::Dimension(format!(
            "closed form needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::Config(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    let n = a.n_rows();
    let mut triplets = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = a.get(i, j);
            if v != 0.0 {
                triplets.push((i as u32, j as u32, v));
            }
        }
    }
    let sparse = SparseMatrix::from_triplets(n, n, triplets)?;
    let radius = crate::eigen::spectral_radius(&sparse, 1e-10, 10_000, 7).value;
    if alpha * radius >= 1.0 {
        return Err(Error::Config(format!(
            "alpha {alpha} is at or beyond the convergence bound 1/{radius}"
        )));
    }
    let system = DenseMatrix::identity(n).add_scaled(a, -alpha)?;
    system.inverse()
}

fn require_square_users(sigma: &SimilarityMatrix) -> usize {
    debug_assert_eq!(sigma.matrix().n_rows(), sigma.matrix().n_cols());
    sigma.matrix().n_rows()
}

fn katz_provenance(sigma: &SimilarityMatrix, op: &str) -> Result<KatzConfig> {
    match sigma.provenance() {
        Provenance::Katz(c) => Ok(c.clone()),
        other => Err(Error::Config(format!(
            "{op} expects a propagated similarity matrix, got {}",
            other.label()
        ))),
    }
}

/// Scales entry `(i, j)` by `1 / (d_i * d_j)` to compensate for high-degree
/// users dominating walk counts. Zero degrees act as 1 so isolated users'
/// entries pass through unchanged.
pub fn degree_normalize(
    sigma: &SimilarityMatrix,
    degrees: &DegreeVector,
) -> Result<SimilarityMatrix> {
    let n = require_square_users(sigma);
    if degrees.len() != n {
        return Err(Error::Dimension(format!(
            "degree vector of {} against {} users",
            degrees.len(),
            n
        )));
    }
    let mut provenance = katz_provenance(sigma, "degree normalization")?;
    let d = degrees.values();
    let eff = |u: usize| -> f64 {
        if d[u] == 0 {
            1.0
        } else {
            d[u] as f64
        }
    };
    let matrix = sigma.matrix().map_rows(|i, cols, vals| {
        let di = eff(i);
        let vals = cols
            .iter()
            .zip(vals)
            .map(|(&j, &v)| v / (di * eff(j as usize)))
            .collect();
        (cols.to_vec(), vals)
    });
    provenance.degree_norm = Some(degrees.mode());
    Ok(SimilarityMatrix::new(matrix, Provenance::Katz(provenance)))
}

/// Divides each row by its chosen norm; rows without entries pass through.
pub fn row_normalize(sigma: &SimilarityMatrix, norm: RowNorm) -> Result<SimilarityMatrix> {
    require_square_users(sigma);
    let mut provenance = katz_provenance(sigma, "row normalization")?;
    let matrix = normalize_rows(sigma.matrix(), norm);
    provenance.row_norm = Some(norm);
    Ok(SimilarityMatrix::new(matrix, Provenance::Katz(provenance)))
}

fn normalize_rows(m: &SparseMatrix, norm: RowNorm) -> SparseMatrix {
    m.map_rows(|_, cols, vals| {
        let scale = match norm {
            RowNorm::L1 => vals.iter().map(|v| v.abs()).sum::<f64>(),
            RowNorm::L2 => vals.iter().map(|v| v * v).sum::<f64>().sqrt(),
            RowNorm::Max => vals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        };
        if scale == 0.0 {
            return (cols.to_vec(), vals.to_vec());
        }
        (cols.to_vec(), vals.iter().map(|v| v / scale).collect())
    })
}

/// Re-injects explicit trust into a propagated similarity matrix.
///
/// The input `sigma` must come from a two-step propagation. Entries at pairs
/// with a direct trust edge are masked out (and diagonal entries too, under
/// [`BoostDiag::Drop`]); what remains is row-normalized and the adjacency is
/// added back, so directly trusted pairs sit at exactly 1 and propagated-only
/// pairs land in `[0, 1]`.
pub fn boost_propagated(
    a: &SparseMatrix,
    sigma: &SimilarityMatrix,
    norm: RowNorm,
    diag: BoostDiag,
) -> Result<SimilarityMatrix> {
    let n = require_square_users(sigma);
    if a.n_rows() != n || a.n_cols() != n {
        return Err(Error::Dimension(format!(
            "adjacency {}x{} against similarity over {} users",
            a.n_rows(),
            a.n_cols(),
            n
        )));
    }
    let mut provenance = katz_provenance(sigma, "boost")?;
    if provenance.k_max != 2 {
        return Err(Error::Config(format!(
            "boost requires a two-step propagation, got k_max={}",
            provenance.k_max
        )));
    }
    let masked = sigma.matrix().map_rows(|i, cols, vals| {
        let (edge_cols, _) = a.row(i);
        let mut kc = Vec::with_capacity(cols.len());
        let mut kv = Vec::with_capacity(cols.len());
        let mut e = 0;
        for (&j, &v) in cols.iter().zip(vals) {
            while e < edge_cols.len() && edge_cols[e] < j {
                e += 1;
            }
            let on_edge = e < edge_cols.len() && edge_cols[e] == j;
            let on_dropped_diag = diag == BoostDiag::Drop && j as usize == i;
            if !on_edge && !on_dropped_diag {
                kc.push(j);
                kv.push(v);
            }
        }
        (kc, kv)
    });
    let boosted = a.add(&normalize_rows(&masked, norm))?;
    provenance.boost = true;
    provenance.row_norm = Some(norm);
    provenance.boost_diag = diag;
    Ok(SimilarityMatrix::new(boosted, Provenance::Katz(provenance)))
}

/// Runs the configured stages in order: truncated series, then optional
/// degree normalization, then either the boost recipe (which row-normalizes
/// the masked matrix) or the optional direct row normalization.
///
/// `degrees` must be present and carry the configured mode whenever
/// `config.degree_norm` is set.
pub fn build_similarity(
    graph: &TrustGraph,
    degrees: Option<&DegreeVector>,
    config: &KatzConfig,
) -> Result<SimilarityMatrix> {
    config.validate()?;
    let raw = katz_truncated(graph.adjacency(), config.alpha, config.k_max)?;
    build_similarity_from_raw(graph, &raw, degrees, config)
}

/// Same as [`build_similarity`] but starting from an already computed
/// truncated series, so sweeps over many normalization variants pay for the
/// propagation step once per `(alpha, k_max)` pair.
///
/// `raw` must be an unnormalized series whose `alpha` and `k_max` match the
/// target configuration.
pub fn build_similarity_from_raw(
    graph: &TrustGraph,
    raw: &SimilarityMatrix,
    degrees: Option<&DegreeVector>,
    config: &KatzConfig,
) -> Result<SimilarityMatrix> {
    config.validate()?;
    if config.convention != graph.convention() {
        return Err(Error::Config(format!(
            "configuration expects {} adjacency but the graph uses {}",
            config.convention.as_str(),
            graph.convention().as_str()
        )));
    }
    let base = katz_provenance(raw, "similarity assembly")?;
    if base.alpha != config.alpha
        || base.k_max != config.k_max
        || base.degree_norm.is_some()
        || base.row_norm.is_some()
        || base.boost
    {
        return Err(Error::Config(format!(
            "supplied series {} does not match the raw form of the target configuration {}",
            base.label(),
            config.label()
        )));
    }
    let mut sigma = raw.clone();
    if let Some(mode) = config.degree_norm {
        let degrees = degrees.ok_or_else(|| {
            Error::Config("degree normalization configured but no degree vector supplied".into())
        })?;
        if degrees.mode() != mode {
            return Err(Error::Config(
                "degree vector mode does not match the configured normalization".into(),
            ));
        }
        sigma = degree_normalize(&sigma, degrees)?;
    }
    if config.boost {
        let norm = config.row_norm.expect("validated: boost implies row_norm");
        sigma = boost_propagated(graph.adjacency(), &sigma, norm, config.boost_diag)?;
    } else if let Some(norm) = config.row_norm {
        sigma = row_normalize(&sigma, norm)?;
    }
    Ok(SimilarityMatrix::new(
        sigma.matrix().clone(),
        Provenance::Katz(config.clone()),
    ))
}
