//! Fully connected network with rectified hidden layers.
//!
//! Weights are stored flat and row-major per layer. Checkpoints are plain
//! text using shortest round-trip float formatting, so a saved network
//! reloads bit for bit.

use std::fmt::Write as _;
use std::path::Path;

use rand::Rng;

use super::NeuroError;

/// What the last layer applies to its preactivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputActivation {
    Identity,
    TanhSquash,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mlp {
    widths: Vec<usize>,
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
    activation: OutputActivation,
}

/// Intermediate values of one forward pass, kept for backpropagation.
#[derive(Clone, Debug)]
pub struct ForwardCache {
    input: Vec<f64>,
    pre: Vec<Vec<f64>>,
    post: Vec<Vec<f64>>,
}

impl ForwardCache {
    pub fn output(&self) -> &[f64] {
        self.post.last().expect("at least one layer")
    }

    /// Preactivations of the rectified hidden layers, flattened. Useful for
    /// checking that a state sits clear of the rectifier kinks before
    /// comparing gradients against finite differences.
    pub fn hidden_preactivations(&self) -> Vec<f64> {
        let hidden = self.pre.len().saturating_sub(1);
        self.pre[..hidden].iter().flatten().copied().collect()
    }
}

/// Parameter gradients shaped like the network they came from.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

impl Gradients {
    pub fn zeros_like(net: &Mlp) -> Self {
        Self {
            weights: net.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: net.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &Gradients) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for w in &mut self.weights {
            w.iter_mut().for_each(|x| *x *= factor);
        }
        for b in &mut self.biases {
            b.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.weights
            .iter()
            .chain(&self.biases)
            .all(|v| v.iter().all(|x| x.is_finite()))
    }

    /// Flattened values in the same order as [`Mlp::params`].
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }
}

impl Mlp {
    /// Builds a network with the given layer widths, input first. All
    /// weights and biases start uniform in plus or minus one over the
    /// square root of the layer's fan-in.
    pub fn new(
        widths: &[usize],
        activation: OutputActivation,
        rng: &mut impl Rng,
    ) -> Result<Self, NeuroError> {
        if widths.len() < 2 {
            return Err(NeuroError::TooFewLayers);
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(NeuroError::ZeroWidth);
        }
        let mut weights = Vec::with_capacity(widths.len() - 1);
        let mut biases = Vec::with_capacity(widths.len() - 1);
        for pair in widths.windows(2) {
            let (fan_in, fan_out) = (pair[0], pair[1]);
            let bound = 1.0 / (fan_in as f64).sqrt();
            weights.push(
                (0..fan_in * fan_out)
                    .map(|_| rng.random_range(-bound..=bound))
                    .collect(),
            );
            biases.push(
                (0..fan_out)
                    .map(|_| rng.random_range(-bound..=bound))
                    .collect(),
            );
        }
        Ok(Self {
            widths: widths.to_vec(),
            weights,
            biases,
            activation,
        })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().expect("nonempty widths")
    }

    pub fn activation(&self) -> OutputActivation {
        self.activation
    }

    pub fn forward(&self, input: &[f64]) -> Vec<f64> {
        assert_eq!(input.len(), self.input_dim(), "input width");
        let last = self.weights.len() - 1;
        let mut x = input.to_vec();
        for l in 0..self.weights.len() {
            let mut z = self.layer_preactivation(l, &x);
            if l == last {
                if self.activation == OutputActivation::TanhSquash {
                    z.iter_mut().for_each(|v| *v = v.tanh());
                }
            } else {
                z.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            x = z;
        }
        x
    }

    pub fn forward_cached(&self, input: &[f64]) -> ForwardCache {
        assert_eq!(input.len(), self.input_dim(), "input width");
        let last = self.weights.len() - 1;
        let mut pre = Vec::with_capacity(self.weights.len());
        let mut post = Vec::with_capacity(self.weights.len());
        let mut x = input.to_vec();
        for l in 0..self.weights.len() {
            let z = self.layer_preactivation(l, &x);
            pre.push(z.clone());
            let mut a = z;
            if l == last {
                if self.activation == OutputActivation::TanhSquash {
                    a.iter_mut().for_each(|v| *v = v.tanh());
                }
            } else {
                a.iter_mut().for_each(|v| *v = v.max(0.0));
            }
            post.push(a.clone());
            x = a;
        }
        ForwardCache {
            input: input.to_vec(),
            pre,
            post,
        }
    }

    fn layer_preactivation(&self, l: usize, x: &[f64]) -> Vec<f64> {
        let in_dim = self.widths[l];
        let out_dim = self.widths[l + 1];
        let mut z = self.biases[l].clone();
        for o in 0..out_dim {
            let row = &self.weights[l][o * in_dim..(o + 1) * in_dim];
            z[o] += row.iter().zip(x).map(|(w, xi)| w * xi).sum::<f64>();
        }
        z
    }

    /// Backpropagates `upstream`, the loss gradient with respect to the
    /// network output, and returns the parameter gradients together with
    /// the loss gradient with respect to the input.
    pub fn backward(&self, cache: &ForwardCache, upstream: &[f64]) -> (Gradients, Vec<f64>) {
        assert_eq!(upstream.len(), self.output_dim(), "upstream width");
        let mut grads = Gradients::zeros_like(self);
        let mut delta: Vec<f64> = match self.activation {
            OutputActivation::Identity => upstream.to_vec(),
            OutputActivation::TanhSquash => upstream
                .iter()
                .zip(cache.output())
                .map(|(u, y)| u * (1.0 - y * y))
                .collect(),
        };
        for l in (0..self.weights.len()).rev() {
            let in_dim = self.widths[l];
            let out_dim = self.widths[l + 1];
            let below: &[f64] = if l == 0 { &cache.input } else { &cache.post[l - 1] };
            let mut next = vec![0.0; in_dim];
            for o in 0..out_dim {
                grads.biases[l][o] += delta[o];
                let grow = &mut grads.weights[l][o * in_dim..(o + 1) * in_dim];
                let wrow = &self.weights[l][o * in_dim..(o + 1) * in_dim];
                for i in 0..in_dim {
                    grow[i] += delta[o] * below[i];
                    next[i] += delta[o] * wrow[i];
                }
            }
            if l > 0 {
                for (n, &p) in next.iter_mut().zip(&cache.pre[l - 1]) {
                    if p <= 0.0 {
                        *n = 0.0;
                    }
                }
            }
            delta = next;
        }
        (grads, delta)
    }

    pub fn param_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Flattened parameters, layer by layer, weights before biases.
    pub fn params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for (w, b) in self.weights.iter().zip(&self.biases) {
            out.extend_from_slice(w);
            out.extend_from_slice(b);
        }
        out
    }

    pub fn set_params(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.param_count(), "parameter count");
        self.visit_params_mut(|idx, p| *p = flat[idx]);
    }

    pub fn visit_params_mut(&mut self, mut f: impl FnMut(usize, &mut f64)) {
        let mut idx = 0;
        for l in 0..self.weights.len() {
            for w in &mut self.weights[l] {
                f(idx, w);
                idx += 1;
            }
            for b in &mut self.biases[l] {
                f(idx, b);
                idx += 1;
            }
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("mlp 1\n");
        s.push_str(match self.activation {
            OutputActivation::Identity => "identity\n",
            OutputActivation::TanhSquash => "tanh\n",
        });
        for (i, w) in self.widths.iter().enumerate() {
            if i > 0 {
                s.push(' ');
            }
            let _ = write!(s, "{w}");
        }
        s.push('\n');
        for (w, b) in self.weights.iter().zip(&self.biases) {
            push_row(&mut s, w);
            push_row(&mut s, b);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, NeuroError> {
        let mut lines = text.lines();
        let header = lines.next().unwrap_or_default().trim();
        if header != "mlp 1" {
            return Err(NeuroError::Parse(format!("unknown header {header:?}")));
        }
        let activation = match lines.next().map(str::trim) {
            Some("identity") => OutputActivation::Identity,
            Some("tanh") => OutputActivation::TanhSquash,
            other => {
                return Err(NeuroError::Parse(format!("unknown activation {other:?}")));
            }
        };
        let widths = parse_row::<usize>(lines.next(), None, "widths")?;
        if widths.len() < 2 {
            return Err(NeuroError::TooFewLayers);
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(NeuroError::ZeroWidth);
        }
        let mut weights = Vec::with_capacity(widths.len() - 1);
        let mut biases = Vec::with_capacity(widths.len() - 1);
        for pair in widths.windows(2) {
            weights.push(parse_row::<f64>(
                lines.next(),
                Some(pair[0] * pair[1]),
                "weights",
            )?);
            biases.push(parse_row::<f64>(lines.next(), Some(pair[1]), "biases")?);
        }
        Ok(Self {
            widths,
            weights,
            biases,
            activation,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), NeuroError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, NeuroError> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

fn push_row(s: &mut String, row: &[f64]) {
    for (i, v) in row.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{v}");
    }
    s.push('\n');
}

fn parse_row<T: std::str::FromStr>(
    line: Option<&str>,
    expect: Option<usize>,
    what: &str,
) -> Result<Vec<T>, NeuroError> {
    let line = line.ok_or_else(|| NeuroError::Parse(format!("missing {what} line")))?;
    let row: Result<Vec<T>, _> = line.split_whitespace().map(str::parse::<T>).collect();
    let row = row.map_err(|_| NeuroError::Parse(format!("bad {what} line")))?;
    if let Some(n) = expect {
        if row.len() != n {
            return Err(NeuroError::Parse(format!(
                "{what} line holds {} values, expected {n}",
                row.len()
            )));
        }
    }
    Ok(row)
}
