use crate::data::BinaryMask;

/// A maximal 8-connected set of foreground pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConnectedComponent {
    pub label: usize,
    /// `(row, col)` pixels in raster order.
    pub pixels: Vec<(usize, usize)>,
    /// `(min_row, min_col, max_row, max_col)`, inclusive.
    pub bbox: (usize, usize, usize, usize),
}

impl ConnectedComponent {
    pub fn area(&self) -> usize {
        self.pixels.len()
    }

    pub fn bbox_height(&self) -> usize {
        self.bbox.2 - self.bbox.0 + 1
    }

    pub fn bbox_width(&self) -> usize {
        self.bbox.3 - self.bbox.1 + 1
    }
}

/// Labels 8-connected foreground regions. Labels follow the raster-scan order of each
/// component's first pixel, starting at 0.
pub fn connected_components(mask: &BinaryMask) -> Vec<ConnectedComponent> {
    let (w, h) = (mask.width(), mask.height());
    let mut visited = vec![false; w * h];
    let mut out = Vec::new();
    let mut stack = Vec::new();
    for start in 0..w * h {
        if visited[start] || mask.data()[start] == 0 {
            continue;
        }
        visited[start] = true;
        stack.push(start);
        let mut pixels = Vec::new();
        while let Some(idx) = stack.pop() {
            let (r, c) = (idx / w, idx % w);
            pixels.push((r, c));
            for nr in r.saturating_sub(1)..=(r + 1).min(h - 1) {
                for nc in c.saturating_sub(1)..=(c + 1).min(w - 1) {
                    let n = nr * w + nc;
                    if !visited[n] && mask.data()[n] != 0 {
                        visited[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        pixels.sort_unstable();
        let bbox = pixels.iter().fold(
            (usize::MAX, usize::MAX, 0, 0),
            |(r0, c0, r1, c1), &(r, c)| (r0.min(r), c0.min(c), r1.max(r), c1.max(c)),
        );
        out.push(ConnectedComponent {
            label: out.len(),
            pixels,
            bbox,
        });
    }
    out
}
