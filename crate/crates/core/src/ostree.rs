//! Order-statistic tree: an ordered set with logarithmic rank and select.
//!
//! Implemented as an arena-backed treap. Every node stores the size of its
//! subtree, so `rank` (number of keys smaller than a probe) and `select`
//! (k-th smallest key) walk a single root-to-leaf path.

use std::cmp::Ordering;

const NIL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    left: u32,
    right: u32,
    size: u32,
    prio: u64,
}

#[derive(Debug, Clone)]
pub struct OrderStatTree<K> {
    nodes: Vec<Node>,
    keys: Vec<Option<K>>,
    free: Vec<u32>,
    root: u32,
    rng: u64,
}

impl<K: Ord> Default for OrderStatTree<K> {
    fn default() -> Self {
        Self::new()
    }
}

impl<K: Ord> OrderStatTree<K> {
    pub fn new() -> Self {
        Self {
            nodes: Vec::new(),
            keys: Vec::new(),
            free: Vec::new(),
            root: NIL,
            rng: 0x9E37_79B9_7F4A_7C15,
        }
    }

    pub fn len(&self) -> usize {
        self.size(self.root) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    pub fn clear(&mut self) {
        self.nodes.clear();
        self.keys.clear();
        self.free.clear();
        self.root = NIL;
    }

    #[inline]
    fn size(&self, n: u32) -> u32 {
        if n == NIL {
            0
        } else {
            self.nodes[n as usize].size
        }
    }

    #[inline]
    fn key(&self, n: u32) -> &K {
        self.keys[n as usize].as_ref().expect("live node")
    }

    #[inline]
    fn pull(&mut self, n: u32) {
        let (l, r) = {
            let node = &self.nodes[n as usize];
            (node.left, node.right)
        };
        self.nodes[n as usize].size = 1 + self.size(l) + self.size(r);
    }

    fn next_prio(&mut self) -> u64 {
        // splitmix64
        self.rng = self.rng.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.rng;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn alloc(&mut self, key: K) -> u32 {
        let prio = self.next_prio();
        let node = Node {
            left: NIL,
            right: NIL,
            size: 1,
            prio,
        };
        if let Some(slot) = self.free.pop() {
            self.nodes[slot as usize] = node;
            self.keys[slot as usize] = Some(key);
            slot
        } else {
            let slot = u32::try_from(self.nodes.len()).expect("tree arena overflow");
            assert!(slot != NIL, "tree arena overflow");
            self.nodes.push(node);
            self.keys.push(Some(key));
            slot
        }
    }

    /// Splits `n` into (keys for which `goes_left` holds, the rest).
    /// `goes_left` must be true on a prefix of the in-order sequence.
    fn split<F: Fn(&K) -> bool + Copy>(&mut self, n: u32, goes_left: F) -> (u32, u32) {
        if n == NIL {
            return (NIL, NIL);
        }
        if goes_left(self.key(n)) {
            let right = self.nodes[n as usize].right;
            let (a, b) = self.split(right, goes_left);
            self.nodes[n as usize].right = a;
            self.pull(n);
            (n, b)
        } else {
            let left = self.nodes[n as usize].left;
            let (a, b) = self.split(left, goes_left);
            self.nodes[n as usize].left = b;
            self.pull(n);
            (a, n)
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        if a == NIL {
            return b;
        }
        if b == NIL {
            return a;
        }
        if self.nodes[a as usize].prio > self.nodes[b as usize].prio {
            let ar = self.nodes[a as usize].right;
            let m = self.merge(ar, b);
            self.nodes[a as usize].right = m;
            self.pull(a);
            a
        } else {
            let bl = self.nodes[b as usize].left;
            let m = self.merge(a, bl);
            self.nodes[b as usize].left = m;
            self.pull(b);
            b
        }
    }

    pub fn contains(&self, key: &K) -> bool {
        self.find(key).is_some()
    }

    fn find(&self, key: &K) -> Option<u32> {
        let mut n = self.root;
        while n != NIL {
            match key.cmp(self.key(n)) {
                Ordering::Less => n = self.nodes[n as usize].left,
                Ordering::Greater => n = self.nodes[n as usize].right,
                Ordering::Equal => return Some(n),
            }
        }
        None
    }

    /// Inserts `key`; returns `false` (and drops `key`) if it is already present.
    pub fn insert(&mut self, key: K) -> bool {
        if self.contains(&key) {
            return false;
        }
        let root = self.root;
        let (l, r) = self.split(root, |k| k < &key);
        let n = self.alloc(key);
        let left = self.merge(l, n);
        self.root = self.merge(left, r);
        true
    }

    /// Removes and returns the key equal to `key`.
    pub fn remove(&mut self, key: &K) -> Option<K> {
        self.find(key)?;
        let root = self.root;
        let (l, rest) = self.split(root, |k| k < key);
        let (mid, r) = self.split(rest, |k| k <= key);
        debug_assert_eq!(self.size(mid), 1);
        let removed = self.keys[mid as usize].take();
        self.free.push(mid);
        self.root = self.merge(l, r);
        removed
    }

    /// Number of keys strictly smaller than `key`.
    pub fn rank(&self, key: &K) -> usize {
        self.count_while(|k| k < key)
    }

    /// Length of the longest prefix (in key order) on which `pred` holds.
    /// `pred` must be monotone: true on a prefix, false afterwards.
    pub fn count_while<F: Fn(&K) -> bool>(&self, pred: F) -> usize {
        let mut n = self.root;
        let mut count = 0usize;
        while n != NIL {
            let node = &self.nodes[n as usize];
            if pred(self.key(n)) {
                count += self.size(node.left) as usize + 1;
                n = node.right;
            } else {
                n = node.left;
            }
        }
        count
    }

    /// The key at 0-based position `idx`.
    pub fn select(&self, mut idx: usize) -> Option<&K> {
        if idx >= self.len() {
            return None;
        }
        let mut n = self.root;
        loop {
            let node = &self.nodes[n as usize];
            let left = self.size(node.left) as usize;
            match idx.cmp(&left) {
                Ordering::Less => n = node.left,
                Ordering::Equal => return Some(self.key(n)),
                Ordering::Greater => {
                    idx -= left + 1;
                    n = node.right;
                }
            }
        }
    }

    pub fn first(&self) -> Option<&K> {
        self.select(0)
    }

    pub fn last(&self) -> Option<&K> {
        self.len().checked_sub(1).and_then(|i| self.select(i))
    }

    /// In-order iterator.
    pub fn iter(&self) -> Iter<'_, K> {
        let mut it = Iter {
            tree: self,
            stack: Vec::new(),
        };
        it.push_left(self.root);
        it
    }
}

pub struct Iter<'a, K> {
    tree: &'a OrderStatTree<K>,
    stack: Vec<u32>,
}

impl<K: Ord> Iter<'_, K> {
    fn push_left(&mut self, mut n: u32) {
        while n != NIL {
            self.stack.push(n);
            n = self.tree.nodes[n as usize].left;
        }
    }
}

impl<'a, K: Ord> Iterator for Iter<'a, K> {
    type Item = &'a K;

    fn next(&mut self) -> Option<&'a K> {
        let n = self.stack.pop()?;
        self.push_left(self.tree.nodes[n as usize].right);
        Some(self.tree.key(n))
    }
}
