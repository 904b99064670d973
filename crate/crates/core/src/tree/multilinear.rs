use super::{EdgeAnnotation, Node};

/// Single-pass `f̄_x(z)` for one tree (without the ensemble base value).
///
/// Each leaf contributes `value * cover / root_cover` times the product of
/// `1 - z_i + z_i * gamma` over the deepest edge of every feature on its path.
/// Descending an edge swaps out the factor of its same-label ancestor. Zero
/// factors are counted rather than multiplied in so the swap never divides
/// by zero.
pub(crate) fn eval_tree(ann: &EdgeAnnotation<'_>, z: &[f64]) -> f64 {
    let tree = ann.tree();
    let n = tree.n_nodes();
    let root_cover = tree.root_cover();
    let mut product = vec![1.0; n];
    let mut zeros = vec![0u32; n];
    let mut total = 0.0;
    for &v in tree.preorder() {
        if v != 0 {
            let u = tree.parent(v);
            let zi = z[ann.label(v)];
            let mut p = product[u];
            let mut k = zeros[u];
            if let Some(h) = ann.up(v) {
                let previous = 1.0 - zi + zi * ann.gamma(h);
                if previous == 0.0 {
                    k -= 1;
                } else {
                    p /= previous;
                }
            }
            let factor = 1.0 - zi + zi * ann.gamma(v);
            if factor == 0.0 {
                k += 1;
            } else {
                p *= factor;
            }
            product[v] = p;
            zeros[v] = k;
        }
        if let Node::Leaf { cover, value } = *tree.node(v) {
            if zeros[v] == 0 {
                total += value * cover / root_cover * product[v];
            }
        }
    }
    total
}
