//! Adam with bias correction, holding per-parameter moment accumulators
//! shaped exactly like the model parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::ModelParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdamState {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub step_count: u64,
    first_moment: ModelParams,
    second_moment: ModelParams,
}

impl AdamState {
    pub fn new(template: &ModelParams, learning_rate: f64) -> Self {
        AdamState {
            learning_rate,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            step_count: 0,
            first_moment: template.zeros_like(),
            second_moment: template.zeros_like(),
        }
    }

    /// One bias-corrected update of `params` in place.
    pub fn step(&mut self, params: &mut ModelParams, grads: &ModelParams) -> Result<()> {
        if params.param_count() != grads.param_count()
            || params.param_count() != self.first_moment.param_count()
        {
            return Err(Error::shape(format!(
                "adam state holds {} parameters, got {} params / {} grads",
                self.first_moment.param_count(),
                params.param_count(),
                grads.param_count()
            )));
        }
        self.step_count += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step_count as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step_count as i32);

        let mut m_bufs = self.first_moment.buffers_mut();
        let mut v_bufs = self.second_moment.buffers_mut();
        let g_bufs = grads.buffers();
        for (b, p_buf) in params.buffers_mut().into_iter().enumerate() {
            let m_buf = &mut m_bufs[b];
            let v_buf = &mut v_bufs[b];
            let g_buf = g_bufs[b];
            for i in 0..p_buf.len() {
                let g = g_buf[i];
                m_buf[i] = self.beta1 * m_buf[i] + (1.0 - self.beta1) * g;
                v_buf[i] = self.beta2 * v_buf[i] + (1.0 - self.beta2) * g * g;
                let m_hat = m_buf[i] / bc1;
                let v_hat = v_buf[i] / bc2;
                p_buf[i] -= self.learning_rate * m_hat / (v_hat.sqrt() + self.epsilon);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::SeededRng;
    use crate::model::ModelConfig;

    fn setup() -> (ModelParams, ModelConfig) {
        let cfg = ModelConfig::new(2, 2, 2, 2, 0.0, 1).unwrap();
        let mut rng = SeededRng::new(1);
        let params = ModelParams::init(&cfg, true, &mut rng).unwrap();
        (params, cfg)
    }

    #[test]
    fn zero_gradients_leave_params_unchanged() {
        let (mut params, _) = setup();
        let before = params.clone();
        let grads = params.zeros_like();
        let mut adam = AdamState::new(&params, 1e-3);
        adam.step(&mut params, &grads).unwrap();
        assert_eq!(params, before);
    }

    #[test]
    fn constant_gradient_moves_against_its_sign() {
        let (mut params, _) = setup();
        let mut grads = params.zeros_like();
        for buf in grads.buffers_mut() {
            for g in buf {
                *g = 0.25;
            }
        }
        let before = params.clone();
        let mut adam = AdamState::new(&params, 1e-3);
        for _ in 0..50 {
            adam.step(&mut params, &grads).unwrap();
        }
        for (now, then) in params.buffers().iter().zip(before.buffers()) {
            for (a, b) in now.iter().zip(then.iter()) {
                assert!(a < b, "positive gradient must decrease the parameter");
            }
        }
    }

    #[test]
    fn first_step_magnitude_is_about_the_learning_rate() {
        // From zero state, m_hat/sqrt(v_hat) = sign(g), so the first update
        // moves each parameter by learning_rate (up to epsilon).
        let (mut params, _) = setup();
        let mut grads = params.zeros_like();
        for buf in grads.buffers_mut() {
            for g in buf {
                *g = -3.7;
            }
        }
        let before = params.clone();
        let lr = 1e-3;
        let mut adam = AdamState::new(&params, lr);
        adam.step(&mut params, &grads).unwrap();
        for (now, then) in params.buffers().iter().zip(before.buffers()) {
            for (a, b) in now.iter().zip(then.iter()) {
                let delta = a - b;
                assert!((delta - lr).abs() < 1e-6, "delta {delta}");
            }
        }
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let (mut params, cfg) = setup();
        let mut rng = SeededRng::new(2);
        let other = ModelParams::init(&cfg, false, &mut rng).unwrap();
        let mut adam = AdamState::new(&params, 1e-3);
        assert!(adam.step(&mut params, &other.zeros_like()).is_err());
    }
}
