//! Domain types and samplers: linear classifiers, the two synthetic data
//! distributions (isotropic-or-masked Gaussian mixture, paired 2-D squares),
//! perturbation budgets, and CSV serialization of datasets.

use std::fmt::Write as _;
use std::io::{BufRead, BufReader, BufWriter, Write as _};
use std::path::Path;

use crate::numerics::{self, NormKind};
use crate::rng::SampleRng;
use crate::{Error, Result};

/// Linear scoring rule f(x) = w·x; the predicted label is `sign(w·x)` with
/// the crate-wide convention `sign(0) = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearClassifier {
    pub w: Vec<f64>,
}

impl LinearClassifier {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        if w.is_empty() {
            return Err(Error::Domain("classifier weight vector is empty".into()));
        }
        if let Some(bad) = w.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("classifier weight {bad} is not finite")));
        }
        Ok(LinearClassifier { w })
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// Raw score w·x.
    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.w.len() {
            return Err(Error::Dimension(format!(
                "classifier has dimension {}, point has dimension {}",
                self.w.len(),
                x.len()
            )));
        }
        Ok(numerics::dot(&self.w, x))
    }

    /// Predicted label, ±1.
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        Ok(numerics::sign(self.score(x)?))
    }
}

/// Two-component Gaussian mixture: y is a fair ±1 coin and x | y is normal
/// with mean y·w_star. Without a support mask the covariance is σ²·I; with a
/// mask, coordinates outside the mask have zero variance (and w_star must be
/// zero there), so samples are exactly 0 off the mask.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture {
    w_star: Vec<f64>,
    sigma: f64,
    support_mask: Option<Vec<bool>>,
}

impl GaussianMixture {
    pub fn new(w_star: Vec<f64>, sigma: f64) -> Result<Self> {
        Self::with_mask(w_star, sigma, None)
    }

    pub fn with_mask(w_star: Vec<f64>, sigma: f64, support_mask: Option<Vec<bool>>) -> Result<Self> {
        if w_star.is_empty() {
            return Err(Error::Domain("mixture mean vector is empty".into()));
        }
        if let Some(bad) = w_star.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("mixture mean entry {bad} is not finite")));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("sigma must be finite and >= 0, got {sigma}")));
        }
        if let Some(mask) = &support_mask {
            if mask.len() != w_star.len() {
                return Err(Error::Dimension(format!(
                    "support mask has length {}, mean vector has length {}",
                    mask.len(),
                    w_star.len()
                )));
            }
            for (i, (&m, &w)) in mask.iter().zip(&w_star).enumerate() {
                if !m && w != 0.0 {
                    return Err(Error::Domain(format!(
                        "mean entry {i} is {w} but the support mask excludes that coordinate"
                    )));
                }
            }
        }
        Ok(GaussianMixture { w_star, sigma, support_mask })
    }

    pub fn dim(&self) -> usize {
        self.w_star.len()
    }

    pub fn w_star(&self) -> &[f64] {
        &self.w_star
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn support_mask(&self) -> Option<&[bool]> {
        self.support_mask.as_deref()
    }

    /// Restricts a vector to the support mask (identity when no mask is
    /// set). The marginal standard deviation of w·x given y is
    /// σ·‖masked(w)‖₂, since off-mask coordinates carry no noise.
    pub(crate) fn masked(&self, v: &[f64]) -> Vec<f64> {
        match &self.support_mask {
            None => v.to_vec(),
            Some(mask) => v
                .iter()
                .zip(mask)
                .map(|(&vi, &m)| if m { vi } else { 0.0 })
                .collect(),
        }
    }

    /// Draws sample `index` of the stream identified by `seed`: first the
    /// label, then one normal draw per on-mask coordinate.
    pub(crate) fn draw(&self, seed: u64, index: u64, x: &mut Vec<f64>) -> f64 {
        let mut rng = SampleRng::new(seed, index);
        let y = if rng.next_f64() < 0.5 { 1.0 } else { -1.0 };
        x.clear();
        match &self.support_mask {
            None => {
                for &w in &self.w_star {
                    x.push(y * w + self.sigma * rng.next_gaussian());
                }
            }
            Some(mask) => {
                for (&w, &m) in self.w_star.iter().zip(mask) {
                    if m {
                        x.push(y * w + self.sigma * rng.next_gaussian());
                    } else {
                        x.push(0.0);
                    }
                }
            }
        }
        y
    }
}

/// Fixed 2-D distribution: x is uniform on the union of the axis-aligned
/// squares of side 2 centered at (−2, 0) and (2, 0) (each square spans
/// center ± 1 per coordinate, so |x₁| ≥ 1 always). On the right square
/// y = +1 with probability 0.7, on the left with probability 0.3; the Bayes
/// rule is sign(x₁) and its risk is exactly 0.3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SquaresDistribution2D;

impl SquaresDistribution2D {
    pub(crate) fn draw(seed: u64, index: u64, x: &mut Vec<f64>) -> f64 {
        let mut rng = SampleRng::new(seed, index);
        let right = rng.next_f64() < 0.5;
        let center = if right { 2.0 } else { -2.0 };
        let x0 = center + (2.0 * rng.next_f64() - 1.0);
        let x1 = 2.0 * rng.next_f64() - 1.0;
        let p_plus = if right { 0.7 } else { 0.3 };
        let y = if rng.next_f64() < p_plus { 1.0 } else { -1.0 };
        x.clear();
        x.push(x0);
        x.push(x1);
        y
    }
}

/// Perturbation ball: ‖δ‖ ≤ eps in the given norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationBudget {
    pub kind: NormKind,
    pub eps: f64,
}

impl PerturbationBudget {
    pub fn new(kind: NormKind, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(Error::Domain(format!("eps must be finite and >= 0, got {eps}")));
        }
        Ok(PerturbationBudget { kind, eps })
    }
}

/// Identifies which sampler produced a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistributionId {
    GaussianMixture,
    Squares2D,
    External,
}

/// An immutable labeled sample set. All points share one dimension and all
/// labels are ±1.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    xs: Vec<Vec<f64>>,
    ys: Vec<f64>,
    dim: usize,
    pub distribution: DistributionId,
    pub seed: u64,
}

impl Dataset {
    pub fn from_parts(xs: Vec<Vec<f64>>, ys: Vec<f64>, distribution: DistributionId, seed: u64) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::Domain("dataset must contain at least one sample".into()));
        }
        if xs.len() != ys.len() {
            return Err(Error::Dimension(format!(
                "{} points but {} labels",
                xs.len(),
                ys.len()
            )));
        }
        let dim = xs[0].len();
        if dim == 0 {
            return Err(Error::Domain("dataset points must have dimension >= 1".into()));
        }
        if let Some(bad) = xs.iter().position(|x| x.len() != dim) {
            return Err(Error::Dimension(format!(
                "point {bad} has dimension {}, expected {dim}",
                xs[bad].len()
            )));
        }
        if let Some(bad) = ys.iter().position(|&y| y != 1.0 && y != -1.0) {
            return Err(Error::Domain(format!("label {} at row {bad} is not +1 or -1", ys[bad])));
        }
        Ok(Dataset { xs, ys, dim, distribution, seed })
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> (&[f64], f64) {
        (&self.xs[i], self.ys[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.xs.iter().map(|x| x.as_slice()).zip(self.ys.iter().copied())
    }

    /// Writes the dataset as CSV with header `x0,...,x{d-1},y`. Coordinates
    /// use shortest round-trip decimal formatting.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let mut out = BufWriter::new(file);
        let io_err = |source| Error::Io { path: path.into(), source };
        let mut header = String::new();
        for i in 0..self.dim {
            let _ = write!(header, "x{i},");
        }
        header.push('y');
        writeln!(out, "{header}").map_err(io_err)?;
        let mut line = String::new();
        for (x, y) in self.iter() {
            line.clear();
            for v in x {
                let _ = write!(line, "{v},");
            }
            let _ = write!(line, "{y}");
            writeln!(out, "{line}").map_err(io_err)?;
        }
        out.flush().map_err(io_err)?;
        Ok(())
    }

    /// Reads a dataset previously written by [`Dataset::save_csv`].
    pub fn load_csv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.into(), source })?;
        let reader = BufReader::new(file);
        let mut lines = reader.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Domain(format!("{}: empty CSV", path.display())))?
            .map_err(|source| Error::Io { path: path.into(), source })?;
        let cols = header.split(',').count();
        if cols < 2 || !header.ends_with(",y") {
            return Err(Error::Domain(format!("{}: unrecognized CSV header {header:?}", path.display())));
        }
        let dim = cols - 1;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|source| Error::Io { path: path.into(), source })?;
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::with_capacity(dim);
            let mut fields = line.split(',');
            for _ in 0..dim {
                let field = fields
                    .next()
                    .ok_or_else(|| Error::Domain(format!("{}: row {} is short", path.display(), lineno + 2)))?;
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Domain(format!("{}: bad number {field:?} at row {}", path.display(), lineno + 2)))?;
                row.push(v);
            }
            let label_field = fields
                .next()
                .ok_or_else(|| Error::Domain(format!("{}: row {} has no label", path.display(), lineno + 2)))?;
            if fields.next().is_some() {
                return Err(Error::Domain(format!("{}: row {} is long", path.display(), lineno + 2)));
            }
            let y: f64 = label_field
                .parse()
                .map_err(|_| Error::Domain(format!("{}: bad label {label_field:?} at row {}", path.display(), lineno + 2)))?;
            xs.push(row);
            ys.push(y);
        }
        Dataset::from_parts(xs, ys, DistributionId::External, 0)
    }
}

fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample count must be >= 1".into()));
    }
    Ok(())
}

/// Draws `n` mixture samples. Sample `i` depends only on (seed, i), so the
/// dataset is bit-identical across runs and independent of chunking.
pub fn sample_mixture(model: &GaussianMixture, n: usize, seed: u64) -> Result<Dataset> {
    check_count(n)?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(model.dim());
    for i in 0..n {
        let y = model.draw(seed, i as u64, &mut x);
        xs.push(x.clone());
        ys.push(y);
    }
    Dataset::from_parts(xs, ys, DistributionId::GaussianMixture, seed)
}

/// Streaming variant of [`sample_mixture`]: visits each sample without
/// materializing the dataset, for evaluation at sizes where n·d vectors
/// would not fit in memory.
pub fn for_each_mixture_sample<F>(model: &GaussianMixture, n: usize, seed: u64, mut visit: F) -> Result<()>
where
    F: FnMut(&[f64], f64),
{
    check_count(n)?;
    let mut x = Vec::with_capacity(model.dim());
    for i in 0..n {
        let y = model.draw(seed, i as u64, &mut x);
        visit(&x, y);
    }
    Ok(())
}

/// Draws `n` samples from the paired-squares distribution.
pub fn sample_squares(n: usize, seed: u64) -> Result<Dataset> {
    check_count(n)?;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    let mut x = Vec::with_capacity(2);
    for i in 0..n {
        let y = SquaresDistribution2D::draw(seed, i as u64, &mut x);
        xs.push(x.clone());
        ys.push(y);
    }
    Dataset::from_parts(xs, ys, DistributionId::Squares2D, seed)
}

/// The Bayes-optimal linear rule for a mixture: w = w_star.
pub fn bayes_classifier(model: &GaussianMixture) -> Result<LinearClassifier> {
    if model.w_star.iter().all(|&w| w == 0.0) {
        return Err(Error::Domain("mixture mean vector is zero; no Bayes direction".into()));
    }
    LinearClassifier::new(model.w_star.clone())
}
