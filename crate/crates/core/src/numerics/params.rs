use super::tensor::Tensor;

/// A fixed, ordered collection of named tensors. Gradients use the same
/// type as the parameters they belong to.
pub trait Parameters: Clone {
    fn named_params(&self) -> Vec<(String, &Tensor)>;
    fn params_mut(&mut self) -> Vec<&mut Tensor>;

    fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.params_mut().into_iter().for_each(|t| t.fill(0.0));
        z
    }

    fn add_scaled(&mut self, other: &Self, s: f64) {
        let others: Vec<&Tensor> = other.named_params().into_iter().map(|(_, t)| t).collect();
        for (a, b) in self.params_mut().into_iter().zip(others) {
            a.add_scaled(b, s);
        }
    }

    fn add_assign(&mut self, other: &Self) {
        self.add_scaled(other, 1.0);
    }

    fn scale(&mut self, s: f64) {
        self.params_mut().into_iter().for_each(|t| t.scale(s));
    }

    fn num_params(&self) -> usize {
        self.named_params().iter().map(|(_, t)| t.len()).sum()
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for (_, t) in self.named_params() {
            out.extend_from_slice(t.data());
        }
        out
    }

    fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "flat parameter length");
        let mut off = 0;
        for t in self.params_mut() {
            let n = t.len();
            t.data_mut().copy_from_slice(&flat[off..off + n]);
            off += n;
        }
    }

    /// Name of the first tensor holding a non-finite value.
    fn first_non_finite(&self) -> Option<String> {
        self.named_params()
            .into_iter()
            .find(|(_, t)| !t.is_finite())
            .map(|(n, _)| n)
    }
}

/// Prefixes every name of `inner` with `prefix.`.
pub fn prefixed<'a>(prefix: &str, inner: Vec<(String, &'a Tensor)>) -> Vec<(String, &'a Tensor)> {
    inner.into_iter().map(|(n, t)| (format!("{prefix}.{n}"), t)).collect()
}

impl<P: Parameters> Parameters for Vec<P> {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        self.iter()
            .enumerate()
            .flat_map(|(i, p)| prefixed(&i.to_string(), p.named_params()))
            .collect()
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.iter_mut().flat_map(|p| p.params_mut()).collect()
    }
}

impl<P: Parameters> Parameters for Option<P> {
    fn named_params(&self) -> Vec<(String, &Tensor)> {
        self.as_ref().map(|p| p.named_params()).unwrap_or_default()
    }

    fn params_mut(&mut self) -> Vec<&mut Tensor> {
        self.as_mut().map(|p| p.params_mut()).unwrap_or_default()
    }
}
