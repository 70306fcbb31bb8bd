//! Qubit-axis contraction engine.
//!
//! Every tensor is a list of wire labels (one per qubit axis, first axis most
//! significant) plus its row-major data. A wire label shared by two tensors is
//! summed over; a label that appears once is open. Networks are contracted
//! pairwise in greedy order, always picking the connected pair with the
//! smallest result.

use crate::C64;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct WireTensor {
    pub wires: Vec<u32>,
    pub data: Vec<C64>,
}

impl WireTensor {
    pub fn new(wires: Vec<u32>, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), 1usize << wires.len());
        WireTensor { wires, data }
    }

    pub fn scalar(z: C64) -> Self {
        WireTensor {
            wires: vec![],
            data: vec![z],
        }
    }

    pub fn rank(&self) -> usize {
        self.wires.len()
    }

    pub fn conj(&self) -> Self {
        WireTensor {
            wires: self.wires.clone(),
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Reorder axes so that `order` (a permutation of `self.wires`) becomes the
    /// axis order.
    pub fn permuted(&self, order: &[u32]) -> WireTensor {
        assert_eq!(order.len(), self.wires.len());
        if order == self.wires.as_slice() {
            return self.clone();
        }
        let n = order.len();
        let pos: HashMap<u32, usize> = self.wires.iter().enumerate().map(|(i, &w)| (w, i)).collect();
        // stride in the old layout of each new axis
        let strides: Vec<usize> = order.iter().map(|w| 1usize << (n - 1 - pos[w])).collect();
        let lo_bits = n.min(12);
        let hi_bits = n - lo_bits;
        let table = |bits: usize, offset: usize| -> Vec<usize> {
            let mut t = vec![0usize; 1 << bits];
            for b in 0..bits {
                // new axis index for bit b (counted from least significant)
                let axis = n - 1 - (offset + b);
                let s = strides[axis];
                let half = 1 << b;
                for i in 0..half {
                    t[i + half] = t[i] + s;
                }
            }
            t
        };
        let lo = table(lo_bits, 0);
        let hi = table(hi_bits, lo_bits);
        let mut data = vec![C64::new(0.0, 0.0); self.data.len()];
        for (h, &hbase) in hi.iter().enumerate() {
            let chunk = &mut data[h << lo_bits..(h + 1) << lo_bits];
            for (l, out) in chunk.iter_mut().enumerate() {
                *out = self.data[hbase + lo[l]];
            }
        }
        WireTensor {
            wires: order.to_vec(),
            data,
        }
    }

    /// Sum over axes that carry the same wire label twice.
    pub fn self_traced(&self) -> WireTensor {
        let mut seen: HashMap<u32, usize> = HashMap::new();
        let mut dup = None;
        for (i, &w) in self.wires.iter().enumerate() {
            if let Some(&j) = seen.get(&w) {
                dup = Some((j, i));
                break;
            }
            seen.insert(w, i);
        }
        let Some((a, b)) = dup else {
            return self.clone();
        };
        let n = self.wires.len();
        let keep: Vec<usize> = (0..n).filter(|&i| i != a && i != b).collect();
        let mut out = vec![C64::new(0.0, 0.0); 1 << keep.len()];
        for (idx, z) in self.data.iter().enumerate() {
            let ba = (idx >> (n - 1 - a)) & 1;
            let bb = (idx >> (n - 1 - b)) & 1;
            if ba != bb {
                continue;
            }
            let mut o = 0usize;
            for &k in &keep {
                o = (o << 1) | ((idx >> (n - 1 - k)) & 1);
            }
            out[o] += z;
        }
        WireTensor {
            wires: keep.iter().map(|&i| self.wires[i]).collect(),
            data: out,
        }
        .self_traced()
    }
}

/// Row-major complex matrix product `(m×s)·(s×n)`.
pub fn matmul(a: &[C64], b: &[C64], m: usize, s: usize, n: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); m * n];
    let row = |i: usize, ci: &mut [C64]| {
        let ai = &a[i * s..(i + 1) * s];
        for (k, &aik) in ai.iter().enumerate() {
            if aik.re == 0.0 && aik.im == 0.0 {
                continue;
            }
            let bk = &b[k * n..(k + 1) * n];
            for (cij, &bkj) in ci.iter_mut().zip(bk) {
                *cij += aik * bkj;
            }
        }
    };
    #[cfg(feature = "parallel")]
    {
        if m * s * n > 1 << 16 && n > 0 {
            use rayon::prelude::*;
            c.par_chunks_mut(n).enumerate().for_each(|(i, ci)| row(i, ci));
            return c;
        }
    }
    if n > 0 {
        for (i, ci) in c.chunks_mut(n).enumerate() {
            row(i, ci);
        }
    }
    c
}

/// Contract two tensors over all wires they share.
pub fn contract_pair(a: &WireTensor, b: &WireTensor) -> WireTensor {
    let shared: Vec<u32> = a.wires.iter().copied().filter(|w| b.wires.contains(w)).collect();
    let free_a: Vec<u32> = a.wires.iter().copied().filter(|w| !shared.contains(w)).collect();
    let free_b: Vec<u32> = b.wires.iter().copied().filter(|w| !shared.contains(w)).collect();
    let order_a: Vec<u32> = free_a.iter().chain(shared.iter()).copied().collect();
    let order_b: Vec<u32> = shared.iter().chain(free_b.iter()).copied().collect();
    let pa = a.permuted(&order_a);
    let pb = b.permuted(&order_b);
    let m = 1usize << free_a.len();
    let s = 1usize << shared.len();
    let n = 1usize << free_b.len();
    let data = matmul(&pa.data, &pb.data, m, s, n);
    WireTensor {
        wires: free_a.into_iter().chain(free_b).collect(),
        data,
    }
}

/// Options for [`contract_network`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ContractOptions {
    /// Split tensors that are numerically a tensor product of smaller factors
    /// before contracting. Exact up to floating point; makes pair-product
    /// networks cheap.
    pub factorize: bool,
}

/// Contract a network and return the result with axes in `open_order`.
///
/// Panics if `open_order` does not list exactly the open wires.
pub fn contract_network(tensors: Vec<WireTensor>, open_order: &[u32], opts: ContractOptions) -> WireTensor {
    let mut pool: Vec<Option<WireTensor>> = Vec::new();
    for t in tensors {
        let t = t.self_traced();
        if opts.factorize {
            pool.extend(split_product(t).into_iter().map(Some));
        } else {
            pool.push(Some(t));
        }
    }
    let mut scalar = C64::new(1.0, 0.0);
    // fold rank-0 tensors into the scalar immediately
    for slot in pool.iter_mut() {
        if slot.as_ref().is_some_and(|t| t.wires.is_empty()) {
            scalar *= slot.take().unwrap().data[0];
        }
    }
    let mut holders: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, t) in pool.iter().enumerate() {
        if let Some(t) = t {
            for &w in &t.wires {
                holders.entry(w).or_default().push(i);
            }
        }
    }
    loop {
        // candidate pairs: tensors sharing a wire
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for hs in holders.values() {
            if hs.len() != 2 || hs[0] == hs[1] {
                continue;
            }
            let (i, j) = (hs[0].min(hs[1]), hs[0].max(hs[1]));
            let (a, b) = (pool[i].as_ref().unwrap(), pool[j].as_ref().unwrap());
            let shared = a.wires.iter().filter(|w| b.wires.contains(w)).count();
            let out = a.rank() + b.rank() - 2 * shared;
            let key = (out, a.rank() + b.rank(), i, j);
            if best.is_none_or(|bk| key < (bk.0, bk.1, bk.2, bk.3)) {
                best = Some(key);
            }
        }
        let Some((_, _, i, j)) = best else { break };
        let a = pool[i].take().unwrap();
        let b = pool[j].take().unwrap();
        for w in a.wires.iter().chain(b.wires.iter()) {
            if let Some(h) = holders.get_mut(w) {
                h.retain(|&x| x != i && x != j);
            }
        }
        let c = contract_pair(&a, &b);
        holders.retain(|_, h| !h.is_empty());
        if c.wires.is_empty() {
            scalar *= c.data[0];
            continue;
        }
        let idx = pool.len();
        for &w in &c.wires {
            holders.entry(w).or_default().push(idx);
        }
        pool.push(Some(c));
    }
    // remaining tensors are disconnected: outer products, smallest first
    let mut rest: Vec<WireTensor> = pool.into_iter().flatten().collect();
    rest.sort_by_key(|t| t.rank());
    let mut acc = WireTensor::scalar(scalar);
    for t in rest {
        acc = contract_pair(&acc, &t);
    }
    let mut sorted_open = open_order.to_vec();
    sorted_open.sort_unstable();
    let mut have = acc.wires.clone();
    have.sort_unstable();
    assert_eq!(sorted_open, have, "open wires do not match requested order");
    acc.permuted(open_order)
}

fn is_zero(t: &WireTensor) -> bool {
    t.data.iter().all(|z| z.norm_sqr() == 0.0)
}

/// Test whether `t` factorizes across (`subset`, rest); on success return the
/// two factors.
fn try_split(t: &WireTensor, subset: &[u32]) -> Option<(WireTensor, WireTensor)> {
    let rest: Vec<u32> = t.wires.iter().copied().filter(|w| !subset.contains(w)).collect();
    let order: Vec<u32> = subset.iter().chain(rest.iter()).copied().collect();
    let p = t.permuted(&order);
    let rows = 1usize << subset.len();
    let cols = 1usize << rest.len();
    let (mut i0, mut j0, mut best) = (0, 0, 0.0);
    for (idx, z) in p.data.iter().enumerate() {
        let n = z.norm_sqr();
        if n > best {
            best = n;
            i0 = idx / cols;
            j0 = idx % cols;
        }
    }
    let pivot = p.data[i0 * cols + j0];
    let scale = best.sqrt();
    for i in 0..rows {
        let mi = p.data[i * cols + j0];
        for j in 0..cols {
            let lhs = p.data[i * cols + j] * pivot;
            let rhs = mi * p.data[i0 * cols + j];
            if (lhs - rhs).norm() > 1e-12 * scale * scale {
                return None;
            }
        }
    }
    let u: Vec<C64> = (0..rows).map(|i| p.data[i * cols + j0]).collect();
    let v: Vec<C64> = (0..cols).map(|j| p.data[i0 * cols + j] / pivot).collect();
    Some((WireTensor::new(subset.to_vec(), u), WireTensor::new(rest, v)))
}

fn combinations(items: &[u32], size: usize, out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, start: usize) {
    if cur.len() == size {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        cur.push(items[i]);
        combinations(items, size, out, cur, i + 1);
        cur.pop();
    }
}

/// Split a tensor into a product of smaller tensors where it numerically
/// factorizes. Factors containing the first axis are searched by increasing
/// size; for large tensors only factors of size ≤ 2 are searched.
pub fn split_product(t: WireTensor) -> Vec<WireTensor> {
    let n = t.rank();
    if n <= 1 || is_zero(&t) {
        return vec![t];
    }
    let max_size = if n <= 12 { n / 2 } else { 2 };
    let first = t.wires[0];
    let others: Vec<u32> = t.wires[1..].to_vec();
    for size in 1..=max_size {
        let mut combos = Vec::new();
        combinations(&others, size - 1, &mut combos, &mut Vec::new(), 0);
        for c in combos {
            let mut subset = vec![first];
            subset.extend(c);
            if subset.len() >= n {
                continue;
            }
            if let Some((f, rest)) = try_split(&t, &subset) {
                let mut out = vec![f];
                out.extend(split_product(rest));
                return out;
            }
        }
    }
    vec![t]
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(wires: &[u32], rng: &mut ChaCha8Rng) -> WireTensor {
        let data = (0..1usize << wires.len())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        WireTensor::new(wires.to_vec(), data)
    }

    fn entry(t: &WireTensor, assign: &HashMap<u32, usize>) -> C64 {
        let mut idx = 0;
        for w in &t.wires {
            idx = (idx << 1) | assign[w];
        }
        t.data[idx]
    }

    /// Brute-force sum over every wire assignment.
    fn naive(tensors: &[WireTensor], open: &[u32]) -> Vec<C64> {
        let mut all: Vec<u32> = tensors.iter().flat_map(|t| t.wires.clone()).collect();
        all.sort_unstable();
        all.dedup();
        let closed: Vec<u32> = all.iter().copied().filter(|w| !open.contains(w)).collect();
        let mut out = vec![C64::new(0.0, 0.0); 1 << open.len()];
        for o in 0..1usize << open.len() {
            for c in 0..1usize << closed.len() {
                let mut assign = HashMap::new();
                for (i, w) in open.iter().enumerate() {
                    assign.insert(*w, (o >> (open.len() - 1 - i)) & 1);
                }
                for (i, w) in closed.iter().enumerate() {
                    assign.insert(*w, (c >> (closed.len() - 1 - i)) & 1);
                }
                out[o] += tensors.iter().map(|t| entry(t, &assign)).product::<C64>();
            }
        }
        out
    }

    #[test]
    fn permute_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = random(&[0, 1, 2, 3, 4], &mut rng);
        let p = t.permuted(&[3, 0, 4, 2, 1]);
        let back = p.permuted(&[0, 1, 2, 3, 4]);
        assert_eq!(t.data, back.data);
        let mut a = HashMap::new();
        for (w, b) in [(0, 1), (1, 0), (2, 1), (3, 1), (4, 0)] {
            a.insert(w, b);
        }
        assert_eq!(entry(&t, &a), entry(&p, &a));
    }

    #[test]
    fn random_network_matches_naive_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let ts = vec![
            random(&[0, 1, 2], &mut rng),
            random(&[2, 3, 4], &mut rng),
            random(&[4, 5, 0], &mut rng),
            random(&[6, 3], &mut rng),
        ];
        let open = [1, 5, 6];
        let got = contract_network(ts.clone(), &open, ContractOptions::default());
        let want = naive(&ts, &open);
        for (g, w) in got.data.iter().zip(&want) {
            assert!((g - w).norm() < 1e-10 * (1.0 + w.norm()));
        }
        // a different order: contract the last two first by hand
        let first = contract_pair(&ts[2], &ts[3]);
        let other = contract_network(vec![ts[0].clone(), ts[1].clone(), first], &open, ContractOptions::default());
        for (g, w) in other.data.iter().zip(&want) {
            assert!((g - w).norm() < 1e-10 * (1.0 + w.norm()));
        }
    }

    #[test]
    fn self_trace_closes_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let t = random(&[0, 1], &mut rng);
        let looped = WireTensor::new(vec![5, 5], t.data.clone());
        let tr = looped.self_traced();
        assert!(tr.wires.is_empty());
        assert!((tr.data[0] - (t.data[0] + t.data[3])).norm() < 1e-15);
    }

    #[test]
    fn factorized_contraction_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random(&[0, 3], &mut rng);
        let b = random(&[1], &mut rng);
        let c = random(&[2, 4], &mut rng);
        let prod = contract_network(vec![a, b, c], &[0, 1, 2, 3, 4], ContractOptions::default());
        let parts = split_product(prod.clone());
        assert_eq!(parts.len(), 3);
        let other = random(&[3, 4, 5], &mut rng);
        let plain = contract_network(vec![prod.clone(), other.clone()], &[0, 1, 2, 5], ContractOptions::default());
        let fact = contract_network(vec![prod, other], &[0, 1, 2, 5], ContractOptions { factorize: true });
        for (x, y) in plain.data.iter().zip(&fact.data) {
            assert!((x - y).norm() < 1e-10 * (1.0 + x.norm()));
        }
    }
}
