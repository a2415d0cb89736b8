//! Green's relations by ideal comparison.

use std::collections::HashMap;

use super::FiniteMonoid;

/// A partition of the elements, classes listed by least element and each
/// class sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classes {
    pub class_of: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
}

impl Classes {
    /// Group elements by a key; the first element seen opens a class, so
    /// classes come out ordered by least member.
    fn by_key<K: std::hash::Hash + Eq>(keys: Vec<K>) -> Self {
        let mut seen: HashMap<K, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(keys.len());
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for (i, k) in keys.into_iter().enumerate() {
            let c = *seen.entry(k).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[c].push(i);
            class_of.push(c);
        }
        Classes { class_of, classes }
    }

    pub fn same(&self, a: usize, b: usize) -> bool {
        self.class_of[a] == self.class_of[b]
    }

    pub fn class(&self, a: usize) -> &[usize] {
        &self.classes[self.class_of[a]]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Green {
    pub r: Classes,
    pub l: Classes,
    pub j: Classes,
    pub h: Classes,
    /// MsM for each element, as a sorted vector; used for the J-order.
    pub(crate) two_sided: Vec<Vec<usize>>,
}

impl Green {
    /// t lies in the two-sided ideal generated by s.
    pub fn j_below(&self, t: usize, s: usize) -> bool {
        self.two_sided[s].binary_search(&t).is_ok()
    }

    pub fn ideal(&self, s: usize) -> &[usize] {
        &self.two_sided[s]
    }
}

fn mask(n: usize, it: impl Iterator<Item = usize>) -> Vec<u64> {
    let mut m = vec![0u64; n.div_ceil(64)];
    for i in it {
        m[i / 64] |= 1 << (i % 64);
    }
    m
}

fn members(m: &[u64]) -> Vec<usize> {
    let mut out = Vec::new();
    for (w, &bits) in m.iter().enumerate() {
        let mut b = bits;
        while b != 0 {
            out.push(w * 64 + b.trailing_zeros() as usize);
            b &= b - 1;
        }
    }
    out
}

pub fn green_classes(m: &FiniteMonoid) -> Green {
    let n = m.size();
    let right: Vec<Vec<u64>> = (0..n).map(|s| mask(n, (0..n).map(|x| m.mul(s, x)))).collect();
    let left: Vec<Vec<u64>> = (0..n).map(|s| mask(n, (0..n).map(|x| m.mul(x, s)))).collect();
    let two: Vec<Vec<u64>> = (0..n)
        .map(|s| {
            let sm = members(&right[s]);
            mask(n, (0..n).flat_map(|a| sm.iter().map(move |&t| (a, t))).map(|(a, t)| m.mul(a, t)))
        })
        .collect();
    let r = Classes::by_key(right.clone());
    let l = Classes::by_key(left.clone());
    let h = Classes::by_key((0..n).map(|s| (r.class_of[s], l.class_of[s])).collect());
    let two_sided = two.iter().map(|v| members(v)).collect();
    let j = Classes::by_key(two);
    Green { r, l, j, h, two_sided }
}
