/// Dense trail matrix over expanded nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneMatrix {
    n: usize,
    tau: Vec<f64>,
    tau0: f64,
}

impl PheromoneMatrix {
    /// Every entry set to `tau0`.
    pub fn new(n: usize, tau0: f64) -> Self {
        assert!(
            tau0 > 0.0 && tau0.is_finite(),
            "trail level must be positive"
        );
        PheromoneMatrix {
            n,
            tau: vec![tau0; n * n],
            tau0,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.tau[i * self.n + j] = value;
    }

    /// `tau_ij <- (1 - psi) tau_ij + psi tau0`.
    #[inline]
    pub fn local_update(&mut self, i: usize, j: usize, psi: f64) {
        let t = &mut self.tau[i * self.n + j];
        *t = (1.0 - psi) * *t + psi * self.tau0;
    }

    /// `tau_ij <- (1 - rho) tau_ij + rho deposit` on each consecutive arc of
    /// `order`.
    pub fn reinforce(&mut self, order: &[usize], rho: f64, deposit: f64) {
        for w in order.windows(2) {
            let t = &mut self.tau[w[0] * self.n + w[1]];
            *t = (1.0 - rho) * *t + rho * deposit;
        }
    }

    pub fn min_entry(&self) -> f64 {
        self.tau.iter().copied().fold(f64::INFINITY, f64::min)
    }
}
