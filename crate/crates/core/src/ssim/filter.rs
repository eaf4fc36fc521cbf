//! Separable windowed sums with symmetric boundary extension, and their adjoint.

use super::kernel::Kernel;

/// Symmetric extension: `-1 -> 0`, `n -> n - 1`.
pub(crate) fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - i - 1;
        } else {
            return i as usize;
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct WindowFilter {
    taps: Vec<f64>,
    width: usize,
    height: usize,
    // Source index of tap k for output position p, at [p * side + k].
    cols: Vec<usize>,
    rows: Vec<usize>,
}

fn index_table(n: usize, side: usize) -> Vec<usize> {
    let r = (side / 2) as isize;
    (0..n)
        .flat_map(|p| (0..side).map(move |k| mirror(p as isize + k as isize - r, n)))
        .collect()
}

impl WindowFilter {
    pub(crate) fn new(kernel: &Kernel, width: usize, height: usize) -> Self {
        let side = kernel.side();
        Self {
            taps: kernel.taps().to_vec(),
            width,
            height,
            cols: index_table(width, side),
            rows: index_table(height, side),
        }
    }

    pub(crate) fn apply(&self, src: &[f64]) -> Vec<f64> {
        let (w, h, side) = (self.width, self.height, self.taps.len());
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            let line = &src[y * w..(y + 1) * w];
            for x in 0..w {
                let idx = &self.cols[x * side..(x + 1) * side];
                tmp[y * w + x] = idx.iter().zip(&self.taps).map(|(&j, t)| t * line[j]).sum();
            }
        }
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            let idx = &self.rows[y * side..(y + 1) * side];
            let dst = &mut out[y * w..(y + 1) * w];
            for (&j, &t) in idx.iter().zip(&self.taps) {
                let line = &tmp[j * w..(j + 1) * w];
                for (d, s) in dst.iter_mut().zip(line) {
                    *d += t * s;
                }
            }
        }
        out
    }

    /// Transpose of [`apply`](Self::apply): scatters each output weight back
    /// onto the pixels it was gathered from.
    pub(crate) fn adjoint(&self, src: &[f64]) -> Vec<f64> {
        let (w, h, side) = (self.width, self.height, self.taps.len());
        let mut tmp = vec![0.0; w * h];
        for y in 0..h {
            let idx = &self.rows[y * side..(y + 1) * side];
            let line = &src[y * w..(y + 1) * w];
            for (&j, &t) in idx.iter().zip(&self.taps) {
                let dst = &mut tmp[j * w..(j + 1) * w];
                for (d, s) in dst.iter_mut().zip(line) {
                    *d += t * s;
                }
            }
        }
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            let line = &tmp[y * w..(y + 1) * w];
            let dst = &mut out[y * w..(y + 1) * w];
            for (idx, &v) in self.cols.chunks_exact(side).zip(line) {
                for (&j, &t) in idx.iter().zip(&self.taps) {
                    dst[j] += t * v;
                }
            }
        }
        out
    }
}
