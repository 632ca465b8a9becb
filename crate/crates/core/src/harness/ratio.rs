//! Compute-fairness arithmetic between an alpha-beta engine on CPU and an
//! MCTS engine on GPU.

use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatioInputs {
    pub sf_nps: f64,
    pub lc_nps: f64,
    pub sf_nodes: f64,
    pub lc_nodes: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeelaRatio {
    pub factor: f64,
    pub ratio: f64,
}

/// `F = sf_nps / lc_nps`.
pub fn leela_factor(sf_nps: f64, lc_nps: f64) -> Result<f64, HarnessError> {
    if !(lc_nps > 0.0) {
        return Err(HarnessError::ZeroDenominator("lc_nps"));
    }
    Ok(sf_nps / lc_nps)
}

/// `R = F * lc_nodes / sf_nodes`.
pub fn leela_ratio(factor: f64, lc_nodes: f64, sf_nodes: f64) -> Result<f64, HarnessError> {
    if !(sf_nodes > 0.0) {
        return Err(HarnessError::ZeroDenominator("sf_nodes"));
    }
    if !(lc_nodes > 0.0) {
        return Err(HarnessError::NonPositive("lc_nodes"));
    }
    Ok(factor * lc_nodes / sf_nodes)
}

impl RatioInputs {
    pub fn compute(&self) -> Result<LeelaRatio, HarnessError> {
        for (name, v) in [("sf_nps", self.sf_nps), ("lc_nps", self.lc_nps), ("sf_nodes", self.sf_nodes), ("lc_nodes", self.lc_nodes)] {
            if !(v > 0.0) {
                return Err(HarnessError::NonPositive(name));
            }
        }
        let factor = leela_factor(self.sf_nps, self.lc_nps)?;
        Ok(LeelaRatio { factor, ratio: leela_ratio(factor, self.lc_nodes, self.sf_nodes)? })
    }
}

impl LeelaRatio {
    pub fn interpretation(&self) -> String {
        if self.ratio > 1.0 {
            format!("the MCTS engine received {:.1}x more effective compute", self.ratio)
        } else if self.ratio < 1.0 {
            format!("the alpha-beta engine received {:.1}x more effective compute", 1.0 / self.ratio)
        } else {
            "both engines received equal effective compute".to_string()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert!((leela_factor(1.5e8, 1.4e5).unwrap() - 1071.43).abs() < 0.005);
        assert_eq!(leela_factor(7.0, 7.0).unwrap(), 1.0);
        assert!((leela_factor(3.0e8, 1.4e5).unwrap() - 2142.86).abs() < 0.005);
        assert!((leela_ratio(1084.0, 6.0e7, 1.897e9).unwrap() - 34.3).abs() < 0.05);
        assert!((leela_ratio(1071.43, 6.0e7, 1.897e9).unwrap() - 33.9).abs() < 0.05);
        assert!(leela_factor(1.0, 0.0).is_err());
        assert!(leela_ratio(1.0, 1.0, 0.0).is_err());
        assert!(leela_ratio(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn inputs() {
        let r = RatioInputs { sf_nps: 1.5e8, lc_nps: 1.4e5, sf_nodes: 1.897e9, lc_nodes: 6.0e7 }.compute().unwrap();
        assert!((r.ratio - 33.89).abs() < 0.01);
        assert!(r.interpretation().contains("33.9x"));
        assert!(RatioInputs { sf_nps: 0.0, lc_nps: 1.0, sf_nodes: 1.0, lc_nodes: 1.0 }.compute().is_err());
    }
}
