use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numerics::{Matrix, Rational};

/// The weights multiplied by the lcm of their denominators, so that a step
/// is integer arithmetic on a vector with one shared denominator. Steps run
/// in `i128` while nothing overflows and in `BigInt` otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) struct IntWeights {
    scale: BigInt,
    /// `scale * (W_x[i][x] + b_h[i])`, indexed `[x][i]`.
    input: Vec<Vec<BigInt>>,
    /// Nonzero entries of `scale * W_h`, by row.
    rec: Vec<Vec<(usize, BigInt)>>,
    small: Option<SmallWeights>,
    /// `out_scale * W_o` and `out_scale * b_o`.
    out_scale: BigInt,
    out: Vec<BigInt>,
    out_bias: BigInt,
    small_out: Option<(Vec<i128>, i128)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct SmallWeights {
    scale: i128,
    input: Vec<Vec<i128>>,
    rec: Vec<Vec<(usize, i128)>>,
}

/// `num / den` componentwise, with `den > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum ScaledVec {
    Small { num: Vec<i128>, den: i128 },
    Big { num: Vec<BigInt>, den: BigInt },
}

impl ScaledVec {
    pub(super) fn from_rationals(v: &[Rational]) -> Self {
        let den = v.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let num: Vec<BigInt> = v.iter().map(|r| r.numer() * (&den / r.denom())).collect();
        ScaledVec::Big { num, den }.shrink()
    }

    pub(super) fn to_rationals(&self) -> Vec<Rational> {
        match self {
            ScaledVec::Small { num, den } => num
                .iter()
                .map(|n| Rational::new(BigInt::from(*n), BigInt::from(*den)))
                .collect(),
            ScaledVec::Big { num, den } => num.iter().map(|n| Rational::new(n.clone(), den.clone())).collect(),
        }
    }

    fn to_big(&self) -> (Vec<BigInt>, BigInt) {
        match self {
            ScaledVec::Small { num, den } => (num.iter().map(|&n| BigInt::from(n)).collect(), BigInt::from(*den)),
            ScaledVec::Big { num, den } => (num.clone(), den.clone()),
        }
    }

    fn shrink(self) -> Self {
        match self {
            ScaledVec::Big { num, den } => {
                let small: Option<Vec<i128>> = num.iter().map(ToPrimitive::to_i128).collect();
                match (small, den.to_i128()) {
                    (Some(num), Some(den)) => ScaledVec::Small { num, den },
                    _ => ScaledVec::Big { num, den },
                }
            }
            s => s,
        }
    }
}

fn reduce_big(num: &mut [BigInt], den: &mut BigInt) {
    if den.is_one() {
        return;
    }
    let mut g = den.clone();
    for n in num.iter() {
        if g.is_one() {
            return;
        }
        if !n.is_zero() {
            g = g.gcd(n);
        }
    }
    if !g.is_one() {
        for n in num.iter_mut() {
            *n /= &g;
        }
        *den /= &g;
    }
}

fn reduce_small(num: &mut [i128], den: &mut i128) {
    if *den == 1 {
        return;
    }
    let mut g = *den;
    for &n in num.iter() {
        if g == 1 {
            return;
        }
        if n != 0 {
            g = g.gcd(&n);
        }
    }
    if g != 1 {
        for n in num.iter_mut() {
            *n /= g;
        }
        *den /= g;
    }
}

impl SmallWeights {
    fn step(&self, num: &[i128], den: i128, x: usize) -> Option<ScaledVec> {
        let mut out = Vec::with_capacity(num.len());
        for (c, row) in self.input[x].iter().zip(&self.rec) {
            let mut acc = c.checked_mul(den)?;
            for &(j, w) in row {
                if num[j] != 0 {
                    acc = acc.checked_add(w.checked_mul(num[j])?)?;
                }
            }
            out.push(acc.max(0));
        }
        let mut den = self.scale.checked_mul(den)?;
        reduce_small(&mut out, &mut den);
        Some(ScaledVec::Small { num: out, den })
    }
}

impl IntWeights {
    pub(super) fn new(wx: &Matrix<Rational>, wh: &Matrix<Rational>, bh: &[Rational], wo: &[Rational], bo: &Rational) -> Self {
        let all = wx.to_rows().into_iter().flatten().chain(wh.to_rows().into_iter().flatten()).chain(bh.iter().cloned());
        let scale = all.fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let int = |r: &Rational| r.numer() * (&scale / r.denom());
        let input: Vec<Vec<BigInt>> = (0..wx.cols())
            .map(|x| (0..wx.rows()).map(|i| int(&(wx.get(i, x) + &bh[i]))).collect())
            .collect();
        let rec: Vec<Vec<(usize, BigInt)>> = (0..wh.rows())
            .map(|i| {
                wh.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(j, w)| (j, int(w)))
                    .collect()
            })
            .collect();
        let small = (|| {
            Some(SmallWeights {
                scale: scale.to_i128()?,
                input: input
                    .iter()
                    .map(|col| col.iter().map(ToPrimitive::to_i128).collect())
                    .collect::<Option<_>>()?,
                rec: rec
                    .iter()
                    .map(|row| row.iter().map(|(j, w)| Some((*j, w.to_i128()?))).collect())
                    .collect::<Option<_>>()?,
            })
        })();
        let out_scale = wo.iter().chain([bo]).fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let oint = |r: &Rational| r.numer() * (&out_scale / r.denom());
        let out: Vec<BigInt> = wo.iter().map(oint).collect();
        let out_bias = oint(bo);
        let small_out = out
            .iter()
            .map(ToPrimitive::to_i128)
            .collect::<Option<Vec<_>>>()
            .zip(out_bias.to_i128());
        IntWeights {
            scale,
            input,
            rec,
            small,
            out_scale,
            out,
            out_bias,
            small_out,
        }
    }

    /// `W_o h + b_o`.
    pub(super) fn output(&self, h: &ScaledVec) -> Rational {
        if let (Some((wo, bo)), ScaledVec::Small { num, den }) = (&self.small_out, h) {
            let acc = wo.iter().zip(num).try_fold(bo.checked_mul(*den), |acc, (w, v)| {
                if *w == 0 || *v == 0 {
                    return Some(acc);
                }
                acc?.checked_add(w.checked_mul(*v)?).map(Some)
            });
            if let Some(Some(acc)) = acc {
                return Rational::new(BigInt::from(acc), &self.out_scale * BigInt::from(*den));
            }
        }
        let (num, den) = h.to_big();
        let acc = self
            .out
            .iter()
            .zip(&num)
            .fold(&self.out_bias * &den, |acc, (w, v)| acc + w * v);
        Rational::new(acc, &self.out_scale * den)
    }

    /// `ReLU(W_x e_x + W_h h + b_h)`.
    pub(super) fn step(&self, h: &ScaledVec, x: usize) -> ScaledVec {
        if let (Some(w), ScaledVec::Small { num, den }) = (&self.small, h) {
            if let Some(out) = w.step(num, *den, x) {
                return out;
            }
        }
        let (hn, hd) = h.to_big();
        let mut num: Vec<BigInt> = self.input[x]
            .iter()
            .zip(&self.rec)
            .map(|(c, row)| {
                let mut acc = if c.is_zero() { BigInt::zero() } else { c * &hd };
                for (j, w) in row {
                    if !hn[*j].is_zero() {
                        acc += w * &hn[*j];
                    }
                }
                if acc.is_negative() {
                    BigInt::zero()
                } else {
                    acc
                }
            })
            .collect();
        let mut den = &self.scale * &hd;
        reduce_big(&mut num, &mut den);
        ScaledVec::Big { num, den }.shrink()
    }
}
