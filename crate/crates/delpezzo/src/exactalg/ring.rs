use super::AlgError;

/// Minimal commutative-ring interface. All arithmetic is exact; `inv` is
/// partial and reports non-units instead of guessing.
pub trait Ring: Clone + PartialEq + std::fmt::Debug {
    type El: Clone + PartialEq + std::fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn from_int(&self, n: i64) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn neg(&self, a: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn is_unit(&self, a: &Self::El) -> bool;
    fn inv(&self, a: &Self::El) -> Result<Self::El, AlgError>;
    fn characteristic(&self) -> u64;

    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El {
        self.add(a, &self.neg(b))
    }
}

/// A ring together with an embedding of a base ring, used to lift
/// configurations defined over a field into dual numbers, jets, or symbolic
/// parameter rings.
pub trait RingOver<B: Ring>: Ring {
    fn embed(&self, x: &B::El) -> Self::El;
}

/// Truncated polynomial ring R[ε]/(ε^order) over a base ring. `order = 2`
/// gives the dual numbers; larger orders give jet arithmetic along one
/// auxiliary nilpotent variable. One mechanism serves both uses.
#[derive(Clone, PartialEq, Debug)]
pub struct DualRing<R: Ring> {
    pub base: R,
    pub order: usize,
}

/// Element of `DualRing`: coefficients of ε^0 … ε^{order−1}.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncEl<R: Ring>(pub Vec<R::El>);

impl<R: Ring> DualRing<R> {
    pub fn new(base: R, order: usize) -> Self {
        assert!(order >= 1);
        DualRing { base, order }
    }

    /// The nilpotent generator ε.
    pub fn eps(&self) -> TruncEl<R> {
        let mut c = vec![self.base.zero(); self.order];
        if self.order > 1 {
            c[1] = self.base.one();
        }
        TruncEl(c)
    }

    pub fn coeff(&self, x: &TruncEl<R>, i: usize) -> R::El {
        x.0.get(i).cloned().unwrap_or_else(|| self.base.zero())
    }
}

impl<R: Ring> Ring for DualRing<R> {
    type El = TruncEl<R>;

    fn zero(&self) -> TruncEl<R> {
        TruncEl(vec![self.base.zero(); self.order])
    }

    fn one(&self) -> TruncEl<R> {
        self.from_int(1)
    }

    fn from_int(&self, n: i64) -> TruncEl<R> {
        let mut c = vec![self.base.zero(); self.order];
        c[0] = self.base.from_int(n);
        TruncEl(c)
    }

    fn add(&self, a: &TruncEl<R>, b: &TruncEl<R>) -> TruncEl<R> {
        TruncEl(a.0.iter().zip(&b.0).map(|(x, y)| self.base.add(x, y)).collect())
    }

    fn neg(&self, a: &TruncEl<R>) -> TruncEl<R> {
        TruncEl(a.0.iter().map(|x| self.base.neg(x)).collect())
    }

    fn mul(&self, a: &TruncEl<R>, b: &TruncEl<R>) -> TruncEl<R> {
        let mut c = vec![self.base.zero(); self.order];
        for (i, x) in a.0.iter().enumerate() {
            if self.base.is_zero(x) {
                continue;
            }
            for (j, y) in b.0.iter().enumerate() {
                if i + j >= self.order {
                    break;
                }
                c[i + j] = self.base.add(&c[i + j], &self.base.mul(x, y));
            }
        }
        TruncEl(c)
    }

    fn is_zero(&self, a: &TruncEl<R>) -> bool {
        a.0.iter().all(|x| self.base.is_zero(x))
    }

    fn is_unit(&self, a: &TruncEl<R>) -> bool {
        self.base.is_unit(&a.0[0])
    }

    fn inv(&self, a: &TruncEl<R>) -> Result<TruncEl<R>, AlgError> {
        // (u + n)^{-1} = u^{-1} (1 - n/u + (n/u)^2 - …), n nilpotent
        let u_inv = self.base.inv(&a.0[0])?;
        let mut nil = a.clone();
        nil.0[0] = self.base.zero();
        let mut w = self.zero();
        for (i, x) in nil.0.iter().enumerate() {
            w.0[i] = self.base.neg(&self.base.mul(x, &u_inv));
        }
        // geometric series: 1 + w + w² + …
        let mut acc = self.one();
        let mut pw = self.one();
        for _ in 1..self.order {
            pw = self.mul(&pw, &w);
            if self.is_zero(&pw) {
                break;
            }
            acc = self.add(&acc, &pw);
        }
        let mut out = acc;
        for x in out.0.iter_mut() {
            *x = self.base.mul(x, &u_inv);
        }
        Ok(out)
    }

    fn characteristic(&self) -> u64 {
        self.base.characteristic()
    }
}

impl<B: Ring> RingOver<B> for DualRing<B> {
    fn embed(&self, x: &B::El) -> TruncEl<B> {
        let mut c = vec![self.base.zero(); self.order];
        c[0] = x.clone();
        TruncEl(c)
    }
}
