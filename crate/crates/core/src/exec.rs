//! Execution strategy and the amplitude-array kernels behind gate application.
//!
//! Every kernel has a sequential body and a rayon body. The rayon body is
//! compiled only with the `parallel` feature; without it
//! [`Execution::Parallel`] silently runs the sequential body, so results are
//! identical either way (kernels are element-wise, no floating reductions).

use num_complex::Complex64;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Minimum number of amplitudes handed to one rayon task.
#[cfg(feature = "parallel")]
const MIN_TASK_LEN: usize = 1 << 11;

/// How data-parallel loops are executed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Uses the rayon thread pool when the `parallel` feature is enabled.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this strategy actually runs on the thread pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..n`, returning results in index order.
    pub fn map_indexed<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }
}

/// Hadamard butterfly on the amplitude pairs that differ in bit `target`.
pub(crate) fn hadamard(amps: &mut [Complex64], target: usize, exec: Execution) {
    let stride = 1usize << target;
    let butterfly = |lo: &mut Complex64, hi: &mut Complex64| {
        let (a, b) = (*lo, *hi);
        *lo = (a + b) * std::f64::consts::FRAC_1_SQRT_2;
        *hi = (a - b) * std::f64::consts::FRAC_1_SQRT_2;
    };

    #[cfg(feature = "parallel")]
    if exec.is_parallel() && amps.len() >= 2 * MIN_TASK_LEN {
        if 2 * stride >= MIN_TASK_LEN {
            for block in amps.chunks_mut(2 * stride) {
                let (lo, hi) = block.split_at_mut(stride);
                lo.par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .with_min_len(MIN_TASK_LEN)
                    .for_each(|(a, b)| butterfly(a, b));
            }
        } else {
            amps.par_chunks_mut(MIN_TASK_LEN).for_each(|chunk| {
                for block in chunk.chunks_mut(2 * stride) {
                    let (lo, hi) = block.split_at_mut(stride);
                    lo.iter_mut().zip(hi).for_each(|(a, b)| butterfly(a, b));
                }
            });
        }
        return;
    }
    let _ = exec;
    for block in amps.chunks_mut(2 * stride) {
        let (lo, hi) = block.split_at_mut(stride);
        lo.iter_mut().zip(hi).for_each(|(a, b)| butterfly(a, b));
    }
}

/// Multiplies every amplitude whose index has all bits of `mask` set by
/// `e^{i phi}`.
pub(crate) fn masked_phase(amps: &mut [Complex64], mask: usize, phi: f64, exec: Execution) {
    let factor = Complex64::from_polar(1.0, phi);
    let apply = |(i, a): (usize, &mut Complex64)| {
        if i & mask == mask {
            *a *= factor;
        }
    };

    #[cfg(feature = "parallel")]
    if exec.is_parallel() && amps.len() >= 2 * MIN_TASK_LEN {
        amps.par_iter_mut()
            .enumerate()
            .with_min_len(MIN_TASK_LEN)
            .for_each(apply);
        return;
    }
    let _ = exec;
    amps.iter_mut().enumerate().for_each(apply);
}

/// Exchanges qubits `a` and `b`.
pub(crate) fn swap(amps: &mut [Complex64], a: usize, b: usize, exec: Execution) {
    let (low, high) = if a < b { (a, b) } else { (b, a) };
    let low_stride = 1usize << low;
    let high_stride = 1usize << high;
    // Inside a block of size 2^(high+1), the half with bit `high` clear holds
    // the partners; within matching sub-blocks of size 2^(low+1) the upper
    // (low bit set) part of the first half trades places with the lower part
    // of the second half.
    let swap_block = |block: &mut [Complex64]| {
        let (lo, hi) = block.split_at_mut(high_stride);
        for (l, h) in lo
            .chunks_mut(2 * low_stride)
            .zip(hi.chunks_mut(2 * low_stride))
        {
            l[low_stride..].swap_with_slice(&mut h[..low_stride]);
        }
    };

    #[cfg(feature = "parallel")]
    if exec.is_parallel() && amps.len() >= 2 * MIN_TASK_LEN {
        if 2 * high_stride >= MIN_TASK_LEN {
            for block in amps.chunks_mut(2 * high_stride) {
                let (lo, hi) = block.split_at_mut(high_stride);
                let sub = (2 * low_stride).max(MIN_TASK_LEN / 2).min(high_stride);
                lo.par_chunks_mut(sub)
                    .zip(hi.par_chunks_mut(sub))
                    .for_each(|(l, h)| {
                        for (ll, hh) in l
                            .chunks_mut(2 * low_stride)
                            .zip(h.chunks_mut(2 * low_stride))
                        {
                            ll[low_stride..].swap_with_slice(&mut hh[..low_stride]);
                        }
                    });
            }
        } else {
            amps.par_chunks_mut(MIN_TASK_LEN)
                .for_each(|chunk| chunk.chunks_mut(2 * high_stride).for_each(swap_block));
        }
        return;
    }
    let _ = exec;
    amps.chunks_mut(2 * high_stride).for_each(swap_block);
}
