use ndarray::{s, Array1, Array2, Axis, Zip};

use super::{NnlmModel, Params};
use crate::corpus::ContextSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-example activations of one forward pass over a batch (one row per
/// example).
#[derive(Debug, Clone)]
pub struct ForwardCache<F> {
    /// Flat context indices, `width` per example.
    pub contexts: Vec<usize>,
    pub width: usize,
    pub y_emb: Array2<F>,
    pub z_hid: Array2<F>,
    pub y_hid: Array2<F>,
    pub z_out: Array2<F>,
    pub y_out: Array2<F>,
    /// max(z_out) + ln Σ exp(z_out - max), per row.
    pub log_norm: Array1<F>,
}

impl<F: Scalar> ForwardCache<F> {
    pub fn batch_len(&self) -> usize {
        self.y_out.nrows()
    }

    /// ln y_out(row, word), computed from the logits so it stays finite.
    pub fn log_prob(&self, row: usize, word: usize) -> F {
        self.z_out[[row, word]] - self.log_norm[row]
    }
}

fn logistic<F: Scalar>(z: F) -> F {
    F::one() / (F::one() + (-z).exp())
}

impl<F: Scalar> NnlmModel<F> {
    /// Forward pass with input and parameter validation.
    pub fn forward(&self, batch: &ContextSet) -> Result<ForwardCache<F>> {
        let width = self.config.context_width();
        if batch.width() != width {
            return Err(Error::ContextLength {
                got: batch.width(),
                expected: width,
            });
        }
        let v = self.vocab_size();
        for i in 0..batch.len() {
            if let Some(&bad) = batch.context(i).iter().find(|&&w| w >= v) {
                return Err(Error::IndexOutOfRange { index: bad, vocab: v });
            }
        }
        if !self.params.all_finite() {
            return Err(Error::NonFinite("model parameters"));
        }
        Ok(self.forward_unchecked(batch))
    }

    pub(crate) fn forward_unchecked(&self, batch: &ContextSet) -> ForwardCache<F> {
        let p = &self.params;
        let width = batch.width();
        let emb = self.config.emb_dim;
        let rows = batch.len();

        let mut y_emb = Array2::<F>::zeros((rows, width * emb));
        let mut contexts = Vec::with_capacity(rows * width);
        for (b, mut row) in y_emb.outer_iter_mut().enumerate() {
            for (pos, &w) in batch.context(b).iter().enumerate() {
                row.slice_mut(s![pos * emb..(pos + 1) * emb])
                    .assign(&p.word_emb.row(w));
                contexts.push(w);
            }
        }

        let z_hid = y_emb.dot(&p.emb_hid) + &p.hid_bias;
        let y_hid = z_hid.mapv(logistic);
        let z_out = y_hid.dot(&p.hid_out) + &p.out_bias;

        let mut y_out = z_out.clone();
        let mut log_norm = Array1::<F>::zeros(rows);
        for (mut row, ln) in y_out.outer_iter_mut().zip(log_norm.iter_mut()) {
            let max = row.fold(F::neg_infinity(), |m, &x| m.max(x));
            row.mapv_inplace(|x| (x - max).exp());
            let sum = row.sum();
            row.mapv_inplace(|x| x / sum);
            *ln = max + sum.ln();
        }

        ForwardCache {
            contexts,
            width,
            y_emb,
            z_hid,
            y_hid,
            z_out,
            y_out,
            log_norm,
        }
    }

    /// Gradients of the batch-mean cross-entropy with respect to every
    /// parameter tensor.
    pub fn backward(&self, cache: &ForwardCache<F>, targets: &[usize]) -> Result<Params<F>> {
        let p = &self.params;
        let rows = cache.batch_len();
        let v = self.vocab_size();
        let emb = self.config.emb_dim;
        if targets.len() != rows
            || cache.y_out.ncols() != v
            || cache.y_hid.ncols() != self.config.hidden_dim
            || cache.width != self.config.context_width()
            || cache.y_emb.ncols() != cache.width * emb
        {
            return Err(Error::ShapeMismatch(format!(
                "cache ({} rows, {} outputs) does not match model/targets ({} targets, V={v})",
                rows,
                cache.y_out.ncols(),
                targets.len()
            )));
        }
        if let Some(&bad) = targets.iter().find(|&&t| t >= v) {
            return Err(Error::IndexOutOfRange { index: bad, vocab: v });
        }
        if rows == 0 {
            return Ok(Params::zeros(&self.config));
        }
        let scale = F::one() / F::from_f64_lossy(rows as f64);

        // dC/dz_out = (y_out - t) / M
        let mut d_out = cache.y_out.clone();
        for (mut row, &t) in d_out.outer_iter_mut().zip(targets) {
            row[t] -= F::one();
        }
        d_out.mapv_inplace(|x| x * scale);

        let hid_out = cache.y_hid.t().dot(&d_out);
        let out_bias = d_out.sum_axis(Axis(0));

        // back through the logistic hidden layer
        let mut d_hid = d_out.dot(&p.hid_out.t());
        Zip::from(&mut d_hid)
            .and(&cache.y_hid)
            .for_each(|d, &y| *d *= y * (F::one() - y));

        let emb_hid = cache.y_emb.t().dot(&d_hid);
        let hid_bias = d_hid.sum_axis(Axis(0));

        // the embedding layer is linear: dC/dz_emb = dC/dy_emb
        let d_emb = d_hid.dot(&p.emb_hid.t());
        let mut word_emb = Array2::<F>::zeros(p.word_emb.raw_dim());
        for (b, row) in d_emb.outer_iter().enumerate() {
            for pos in 0..cache.width {
                let w = cache.contexts[b * cache.width + pos];
                let mut dst = word_emb.row_mut(w);
                dst += &row.slice(s![pos * emb..(pos + 1) * emb]);
            }
        }

        Ok(Params {
            word_emb,
            emb_hid,
            hid_bias,
            hid_out,
            out_bias,
        })
    }
}

/// Mean over the batch of -ln y_out(target).
pub fn cross_entropy<F: Scalar>(cache: &ForwardCache<F>, targets: &[usize]) -> Result<f64> {
    if targets.len() != cache.batch_len() {
        return Err(Error::ShapeMismatch(format!(
            "{} targets for a batch of {}",
            targets.len(),
            cache.batch_len()
        )));
    }
    if targets.is_empty() {
        return Err(Error::Empty("batch"));
    }
    let v = cache.y_out.ncols();
    let mut total = 0.0;
    for (i, &t) in targets.iter().enumerate() {
        if t >= v {
            return Err(Error::IndexOutOfRange { index: t, vocab: v });
        }
        total -= cache.log_prob(i, t).as_f64();
    }
    Ok(total / targets.len() as f64)
}

/// Momentum buffers Δ, one per parameter tensor, starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState<F> {
    pub delta: Params<F>,
}

impl<F: Scalar> OptimizerState<F> {
    pub fn new(model: &NnlmModel<F>) -> Self {
        Self {
            delta: Params::zeros(&model.config),
        }
    }
}

/// Δ ← αΔ + ∂C/∂W, then W ← W − εΔ, for every weight and bias tensor.
pub fn update<F: Scalar>(
    model: &mut NnlmModel<F>,
    grads: &Params<F>,
    state: &mut OptimizerState<F>,
    learning_rate: f64,
    momentum: f64,
) -> Result<()> {
    if grads.shapes() != model.params.shapes() || state.delta.shapes() != model.params.shapes() {
        return Err(Error::ShapeMismatch("gradient/state shapes differ from model".into()));
    }
    if !grads.all_finite() {
        return Err(Error::Diverged);
    }
    let eps = F::from_f64_lossy(learning_rate);
    let alpha = F::from_f64_lossy(momentum);
    let weights = model.params.tensors_mut();
    let deltas = state.delta.tensors_mut();
    for ((w, d), g) in weights.into_iter().zip(deltas).zip(grads.tensors()) {
        for ((w, d), &g) in w.iter_mut().zip(d.iter_mut()).zip(g) {
            *d = alpha * *d + g;
            *w -= eps * *d;
        }
    }
    Ok(())
}
