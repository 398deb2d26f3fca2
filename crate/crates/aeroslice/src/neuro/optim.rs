//! Adam with bias correction, plus Polyak averaging for target networks.
//! Non-finite gradient batches are dropped rather than applied, and the
//! drop count is kept for diagnostics.

use super::mlp::{Gradients, Mlp};

#[derive(Clone, Debug)]
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step_count: u64,
    m: Vec<f64>,
    v: Vec<f64>,
    skipped: u64,
}

impl Adam {
    pub fn new(lr: f64, net: &Mlp) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            step_count: 0,
            m: vec![0.0; net.param_count()],
            v: vec![0.0; net.param_count()],
            skipped: 0,
        }
    }

    /// Applies one update in place. A gradient batch containing any
    /// non-finite value is counted and ignored.
    pub fn step(&mut self, net: &mut Mlp, grads: &Gradients) {
        if !grads.is_finite() {
            self.skipped += 1;
            return;
        }
        let g = grads.values();
        assert_eq!(g.len(), self.m.len(), "gradient shape");
        self.step_count += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step_count as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step_count as i32);
        let (b1, b2, lr, eps) = (self.beta1, self.beta2, self.lr, self.eps);
        let m = &mut self.m;
        let v = &mut self.v;
        net.visit_params_mut(|idx, p| {
            let gi = g[idx];
            m[idx] = b1 * m[idx] + (1.0 - b1) * gi;
            v[idx] = b2 * v[idx] + (1.0 - b2) * gi * gi;
            *p -= lr * (m[idx] / bc1) / ((v[idx] / bc2).sqrt() + eps);
        });
    }

    pub fn skipped(&self) -> u64 {
        self.skipped
    }
}

/// Polyak step: target moves a fraction `tau` toward `source`.
pub fn soft_update(target: &mut Mlp, source: &Mlp, tau: f64) {
    assert_eq!(target.widths(), source.widths(), "mismatched networks");
    let src = source.params();
    target.visit_params_mut(|idx, p| *p = (1.0 - tau) * *p + tau * src[idx]);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neuro::OutputActivation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn drives_a_quadratic_to_its_minimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut net = Mlp::new(&[1, 1], OutputActivation::Identity, &mut rng).unwrap();
        let mut adam = Adam::new(0.05, &net);
        for _ in 0..3000 {
            let cache = net.forward_cached(&[1.0]);
            let out = cache.output()[0];
            let (grads, _) = net.backward(&cache, &[2.0 * (out - 3.0)]);
            adam.step(&mut net, &grads);
        }
        let out = net.forward(&[1.0])[0];
        assert!((out - 3.0).abs() < 1e-3, "settled at {out}");
        assert_eq!(adam.skipped(), 0);
    }

    #[test]
    fn poisoned_gradients_are_counted_and_ignored() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = Mlp::new(&[2, 4, 1], OutputActivation::Identity, &mut rng).unwrap();
        let before = net.params();
        let mut adam = Adam::new(0.01, &net);
        let mut g = Gradients::zeros_like(&net);
        g.biases[0][0] = f64::INFINITY;
        adam.step(&mut net, &g);
        assert_eq!(adam.skipped(), 1);
        for (a, b) in net.params().iter().zip(&before) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn zero_gradients_leave_parameters_still() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut net = Mlp::new(&[2, 3, 1], OutputActivation::Identity, &mut rng).unwrap();
        let before = net.params();
        let mut adam = Adam::new(0.1, &net);
        let zeros = Gradients::zeros_like(&net);
        adam.step(&mut net, &zeros);
        for (a, b) in net.params().iter().zip(&before) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn polyak_step_contracts_exactly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let source = Mlp::new(&[3, 5, 2], OutputActivation::Identity, &mut rng).unwrap();
        let mut target = Mlp::new(&[3, 5, 2], OutputActivation::Identity, &mut rng).unwrap();
        let tau = 0.1;
        let gap_before: Vec<f64> = target
            .params()
            .iter()
            .zip(source.params())
            .map(|(t, s)| t - s)
            .collect();
        soft_update(&mut target, &source, tau);
        for ((t, s), g) in target.params().iter().zip(source.params()).zip(&gap_before) {
            assert!((t - s - (1.0 - tau) * g).abs() < 1e-12);
        }
        for _ in 0..500 {
            soft_update(&mut target, &source, tau);
        }
        let worst = target
            .params()
            .iter()
            .zip(source.params())
            .map(|(t, s)| (t - s).abs())
            .fold(0.0f64, f64::max);
        assert!(worst < 1e-9, "residual gap {worst}");
    }
}
