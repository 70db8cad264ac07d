use crate::data::BinaryMask;
use crate::error::{Error, Result};

/// Square all-ones structuring element of side `k`, anchored at `(k/2, k/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Kernel {
    size: usize,
}

impl Kernel {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::InvalidParameter(
                "kernel size must be at least 1".into(),
            ));
        }
        Ok(Kernel { size })
    }

    pub fn size(self) -> usize {
        self.size
    }

    pub fn anchor(self) -> usize {
        self.size / 2
    }

    /// Pixels the element extends before the anchor.
    pub fn reach_before(self) -> usize {
        self.anchor()
    }

    /// Pixels the element extends after the anchor.
    pub fn reach_after(self) -> usize {
        self.size - 1 - self.anchor()
    }
}

/// Binary dilation: each foreground pixel `p` stamps the square
/// `[p - anchor, p + size - 1 - anchor]` on both axes. Out-of-range pixels are background.
///
/// For `k = 8` a lone pixel at `(4, 4)` grows to rows and columns `0..=7`.
pub fn dilate(mask: &BinaryMask, kernel: Kernel) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    if kernel.size() == 1 || w == 0 || h == 0 {
        return mask.clone();
    }
    // Output pixel q is set iff some input lies in [q - after, q + before].
    let before = kernel.reach_before();
    let after = kernel.reach_after();

    let mut horizontal = vec![0u8; w * h];
    let mut prefix = vec![0u32; w.max(h) + 1];
    for r in 0..h {
        let row = &mask.data()[r * w..(r + 1) * w];
        for c in 0..w {
            prefix[c + 1] = prefix[c] + row[c] as u32;
        }
        for c in 0..w {
            let lo = c.saturating_sub(after);
            let hi = (c + before).min(w - 1);
            horizontal[r * w + c] = (prefix[hi + 1] > prefix[lo]) as u8;
        }
    }

    let mut out = vec![0u8; w * h];
    for c in 0..w {
        for r in 0..h {
            prefix[r + 1] = prefix[r] + horizontal[r * w + c] as u32;
        }
        for r in 0..h {
            let lo = r.saturating_sub(after);
            let hi = (r + before).min(h - 1);
            out[r * w + c] = (prefix[hi + 1] > prefix[lo]) as u8;
        }
    }
    BinaryMask::new(w, h, out).expect("dilation preserves shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn k(size: usize) -> Kernel {
        Kernel::new(size).unwrap()
    }

    /// Stamp the element at every foreground pixel.
    fn stamp_oracle(mask: &BinaryMask, kernel: Kernel) -> BinaryMask {
        let mut out = BinaryMask::zeros(mask.width(), mask.height());
        let a = kernel.anchor() as isize;
        for r in 0..mask.height() {
            for c in 0..mask.width() {
                if !mask.get(r, c) {
                    continue;
                }
                for i in 0..kernel.size() as isize {
                    for j in 0..kernel.size() as isize {
                        let (rr, cc) = (r as isize + i - a, c as isize + j - a);
                        if rr >= 0
                            && cc >= 0
                            && (rr as usize) < mask.height()
                            && (cc as usize) < mask.width()
                        {
                            out.set(rr as usize, cc as usize, true);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn centre_pixel_k3() {
        let m = BinaryMask::from_pixels(5, 5, &[(2, 2)]);
        let d = dilate(&m, k(3));
        let expected =
            BinaryMask::from_fn(5, 5, |r, c| (1..=3).contains(&r) && (1..=3).contains(&c));
        assert_eq!(d, expected);
    }

    #[test]
    fn even_kernel_grows_four_back_three_forward() {
        let m = BinaryMask::from_pixels(9, 9, &[(4, 4)]);
        let d = dilate(&m, k(8));
        let expected = BinaryMask::from_fn(9, 9, |r, c| r <= 7 && c <= 7);
        assert_eq!(d, expected);
        assert_eq!(d.count_ones(), 64);
        assert_eq!(stamp_oracle(&m, k(8)), expected);
    }

    #[test]
    fn zero_mask_stays_zero() {
        for size in [1, 2, 3, 5, 8] {
            assert_eq!(
                dilate(&BinaryMask::zeros(6, 4), k(size)),
                BinaryMask::zeros(6, 4)
            );
        }
    }

    #[test]
    fn rejects_empty_kernel() {
        assert!(Kernel::new(0).is_err());
    }

    proptest! {
        #[test]
        fn matches_oracle(w in 1usize..14, h in 1usize..14, size in 1usize..10, bits in any::<u64>()) {
            let mask = BinaryMask::from_fn(w, h, |r, c| (bits >> ((r * w + c) % 61)) & 1 == 1);
            prop_assert_eq!(dilate(&mask, k(size)), stamp_oracle(&mask, k(size)));
        }

        #[test]
        fn extensive_and_increasing(bits in any::<u32>(), extra in any::<u32>(), size in 1usize..6) {
            let m1 = BinaryMask::from_fn(6, 5, |r, c| (bits >> (r * 6 + c)) & 1 == 1);
            let m2 = BinaryMask::from_fn(6, 5, |r, c| m1.get(r, c) || (extra >> (r * 6 + c)) & 1 == 1);
            let (d1, d2) = (dilate(&m1, k(size)), dilate(&m2, k(size)));
            prop_assert!(m1.is_subset_of(&d1));
            prop_assert!(d1.is_subset_of(&d2));
        }
    }
}
