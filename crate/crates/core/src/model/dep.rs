//! Discernment: team-score comparison, confidence and the two losses.

use super::variant::LossPair;
use crate::match_data::Team;
use crate::neural::{sigmoid, Real};

/// One-hot ground truth `(q_blue, q_red)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TeamLabels {
    pub winner: Team,
}

impl TeamLabels {
    pub fn new(winner: Team) -> Self {
        Self { winner }
    }

    pub fn q_blue(&self) -> f64 {
        if self.winner == Team::Blue {
            1.0
        } else {
            0.0
        }
    }

    pub fn q_red(&self) -> f64 {
        1.0 - self.q_blue()
    }
}

/// Loss value with its derivatives with respect to the two team sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossGrad {
    pub loss: f64,
    pub d_blue: f64,
    pub d_red: f64,
}

/// Logistic confidence that blue wins: `1 / (1 + e^-(S_B - S_R))`.
pub fn confidence(s_blue: f64, s_red: f64) -> f64 {
    sigmoid(s_blue - s_red)
}

/// Binary cross-entropy on the confidence, written with softplus so neither
/// branch takes the log of a rounded-to-zero probability.
pub fn bce_loss(s_blue: f64, s_red: f64, labels: TeamLabels) -> LossGrad {
    let d = s_blue - s_red;
    let q = labels.q_blue();
    let loss = q * Real::softplus(-d) + (1.0 - q) * Real::softplus(d);
    let g = sigmoid(d) - q;
    LossGrad {
        loss,
        d_blue: g,
        d_red: -g,
    }
}

/// `max(0, S_L - S_W)`; the subgradient is zero at equality.
pub fn relu_loss(s_blue: f64, s_red: f64, labels: TeamLabels) -> LossGrad {
    let (s_w, s_l) = match labels.winner {
        Team::Blue => (s_blue, s_red),
        Team::Red => (s_red, s_blue),
    };
    if s_l > s_w {
        let (d_w, d_l) = (-1.0, 1.0);
        let (d_blue, d_red) = match labels.winner {
            Team::Blue => (d_w, d_l),
            Team::Red => (d_l, d_w),
        };
        LossGrad {
            loss: s_l - s_w,
            d_blue,
            d_red,
        }
    } else {
        LossGrad {
            loss: 0.0,
            d_blue: 0.0,
            d_red: 0.0,
        }
    }
}

pub fn loss(pair: LossPair, s_blue: f64, s_red: f64, labels: TeamLabels) -> LossGrad {
    match pair {
        LossPair::Relu => relu_loss(s_blue, s_red, labels),
        LossPair::Bce => bce_loss(s_blue, s_red, labels),
    }
}

/// Loss value only, over any [`Real`]; used by the extended-precision oracle.
pub fn loss_value<R: Real>(pair: LossPair, s_blue: R, s_red: R, labels: TeamLabels) -> R {
    let d = s_blue - s_red;
    match pair {
        LossPair::Bce => match labels.winner {
            Team::Blue => (-d).softplus(),
            Team::Red => d.softplus(),
        },
        LossPair::Relu => {
            let margin = match labels.winner {
                Team::Blue => -d,
                Team::Red => d,
            };
            if margin.to_f64() > 0.0 {
                margin
            } else {
                R::zero()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discernment {
    pub winner: Team,
    /// Confidence that blue wins, for the confidence method.
    pub confidence: Option<f64>,
    pub tie: bool,
}

/// Predicts the winner. The deterministic method (ReLU pair) compares sums and
/// gives exact ties to red; the confidence method (BCE pair) thresholds `c'` at 0.5.
pub fn discern(s_blue: f64, s_red: f64, method: LossPair) -> Discernment {
    let tie = s_blue == s_red;
    match method {
        LossPair::Relu => Discernment {
            winner: if s_blue > s_red { Team::Blue } else { Team::Red },
            confidence: None,
            tie,
        },
        LossPair::Bce => {
            let c = confidence(s_blue, s_red);
            Discernment {
                winner: if c > 0.5 { Team::Blue } else { Team::Red },
                confidence: Some(c),
                tie,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const BLUE: TeamLabels = TeamLabels { winner: Team::Blue };
    const RED: TeamLabels = TeamLabels { winner: Team::Red };

    #[test]
    fn confidence_examples() {
        assert!((confidence(20.0, 5.0) - 1.0 / (1.0 + (-15f64).exp())).abs() < 1e-15);
        assert!((confidence(20.0, 5.0) - 0.999_999_69).abs() < 1e-8);
        assert_eq!(confidence(3.3, 3.3), 0.5);
        assert!((confidence(10.0, 7.0) - 0.952_574_126_822_433_4).abs() < 1e-15);
    }

    #[test]
    fn bce_examples() {
        for labels in [BLUE, RED] {
            assert!((bce_loss(1.5, 1.5, labels).loss - std::f64::consts::LN_2).abs() < 1e-15);
        }
        let l = bce_loss(15.0, 0.0, BLUE);
        assert!((l.loss - (-15f64).exp().ln_1p()).abs() < 1e-20);
        assert!((l.loss - 3.059e-7).abs() < 1e-9);
        assert!(bce_loss(-800.0, 800.0, BLUE).loss.is_finite());
    }

    #[test]
    fn relu_examples() {
        // blue is the winner with 10, red 7
        assert_eq!(relu_loss(10.0, 7.0, BLUE).loss, 0.0);
        let l = relu_loss(20.0, 5.0, RED);
        assert_eq!(l.loss, 15.0);
        assert_eq!((l.d_red, l.d_blue), (-1.0, 1.0));
        let tie = relu_loss(3.0, 3.0, BLUE);
        assert_eq!((tie.loss, tie.d_blue, tie.d_red), (0.0, 0.0, 0.0));
    }

    #[test]
    fn discern_examples() {
        assert_eq!(discern(1.0, -1.0, LossPair::Relu).winner, Team::Blue);
        let t = discern(2.0, 2.0, LossPair::Relu);
        assert_eq!(t.winner, Team::Red);
        assert!(t.tie);
        let t = discern(2.0, 2.0, LossPair::Bce);
        assert_eq!(t.winner, Team::Red);
        assert_eq!(t.confidence, Some(0.5));
    }

    proptest! {
        #[test]
        fn bce_gradient_is_confidence_minus_label(sb in -30.0..30.0f64, sr in -30.0..30.0f64, blue in any::<bool>()) {
            let labels = if blue { BLUE } else { RED };
            let l = bce_loss(sb, sr, labels);
            prop_assert!((l.d_blue - (confidence(sb, sr) - labels.q_blue())).abs() < 1e-15);
            prop_assert_eq!(l.d_blue, -l.d_red);
            prop_assert!(l.loss >= 0.0);
        }

        #[test]
        fn losses_depend_on_difference_only(sb in -20.0..20.0f64, sr in -20.0..20.0f64, delta in -50.0..50.0f64) {
            for pair in [LossPair::Relu, LossPair::Bce] {
                let a = loss(pair, sb, sr, RED).loss;
                let b = loss(pair, sb + delta, sr + delta, RED).loss;
                prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            }
        }

        #[test]
        fn methods_agree_off_ties(sb in -30.0..30.0f64, sr in -30.0..30.0f64) {
            prop_assume!(sb != sr);
            prop_assert_eq!(discern(sb, sr, LossPair::Relu).winner, discern(sb, sr, LossPair::Bce).winner);
        }

        #[test]
        fn generic_loss_matches_f64_path(sb in -30.0..30.0f64, sr in -30.0..30.0f64, blue in any::<bool>()) {
            let labels = if blue { BLUE } else { RED };
            for pair in [LossPair::Relu, LossPair::Bce] {
                let a = loss(pair, sb, sr, labels).loss;
                let b = loss_value(pair, sb, sr, labels);
                prop_assert!((a - b).abs() <= 1e-15 * (1.0 + a.abs()));
            }
        }
    }
}
