use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use super::Polynomial;
use crate::error::{Error, Result};
use crate::exact::Rational;

/// Ordered tuple `(i_1, ..., i_m)` naming a component `p_I`. The empty tuple
/// is the root.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct IndexTuple(pub Vec<usize>);

impl IndexTuple {
    pub fn root() -> Self {
        IndexTuple(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, j: usize) -> IndexTuple {
        let mut v = self.0.clone();
        v.push(j);
        IndexTuple(v)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for IndexTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<usize>> for IndexTuple {
    fn from(v: Vec<usize>) -> Self {
        IndexTuple(v)
    }
}

/// One component `p_I(x) = c_I + sum_j x_j p_{I,j}(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub tuple: IndexTuple,
    /// `c_I`
    pub constant: Rational,
    /// `p_I`
    pub poly: Polynomial,
    /// `(j, node index of p_{I,j})`, ascending in `j`.
    pub children: Vec<(usize, usize)>,
}

impl Node {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// The hierarchy `{c_I, p_I}` of a multilinear polynomial.
///
/// Nodes are stored in depth-first pre-order (children ascending), so every
/// child appears after its parent. Only nonzero components are present.
#[derive(Debug, Clone)]
pub struct DecompositionTree {
    n: usize,
    degree: usize,
    nodes: Vec<Node>,
    index: BTreeMap<IndexTuple, usize>,
}

/// Canonical decomposition: for `i` ascending, `p_i` is the coefficient of
/// `x_i` in what remains of `p`, that part is removed, and `p_i` is
/// decomposed in turn. The final remainder is the constant `c`.
pub fn decompose(p: &Polynomial) -> Result<DecompositionTree> {
    if !p.is_multilinear() {
        return Err(Error::NotMultilinear);
    }
    let mut tree = DecompositionTree {
        n: p.n(),
        degree: p.degree(),
        nodes: Vec::new(),
        index: BTreeMap::new(),
    };
    build(&mut tree, IndexTuple::root(), p.clone());
    Ok(tree)
}

fn build(tree: &mut DecompositionTree, tuple: IndexTuple, poly: Polynomial) -> usize {
    let n = poly.n();
    // Once x_0..x_{i-1} have been extracted, the monomials left that contain
    // x_i are exactly those whose smallest variable is i, so grouping by the
    // leading (smallest) variable reproduces the ascending extraction.
    let mut groups: BTreeMap<usize, Vec<(Vec<usize>, Rational)>> = BTreeMap::new();
    let mut constant = Rational::zero();
    for (vars, c) in poly.terms() {
        match vars.split_first() {
            None => constant = c.clone(),
            Some((&lead, rest)) => groups
                .entry(lead)
                .or_default()
                .push((rest.to_vec(), c.clone())),
        }
    }

    let id = tree.nodes.len();
    tree.nodes.push(Node {
        tuple: tuple.clone(),
        constant,
        poly,
        children: Vec::new(),
    });
    tree.index.insert(tuple.clone(), id);

    let mut children = Vec::with_capacity(groups.len());
    for (j, terms) in groups {
        let child = Polynomial::from_terms(n, terms).expect("indices already validated");
        let child_id = build(tree, tuple.child(j), child);
        children.push((j, child_id));
    }
    tree.nodes[id].children = children;
    id
}

impl DecompositionTree {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Declared degree of the decomposed polynomial.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The top-level constant `c`.
    pub fn constant_c(&self) -> &Rational {
        &self.nodes[0].constant
    }

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, tuple: &IndexTuple) -> Option<&Node> {
        self.index.get(tuple).map(|&i| &self.nodes[i])
    }

    /// `p_I`, or `None` when the component is identically zero.
    pub fn component(&self, tuple: &[usize]) -> Option<&Polynomial> {
        self.node(&IndexTuple(tuple.to_vec())).map(|n| &n.poly)
    }

    /// Non-root tuples `I` with `|I| <= d - 1`.
    pub fn internal_tuples(&self) -> impl Iterator<Item = &Node> {
        let d = self.degree;
        self.nodes[1..].iter().filter(move |n| n.tuple.len() < d)
    }

    /// `c_I + sum_j x_j p_{I,j}` rebuilt from the children of `I`.
    pub fn reconstruct(&self, tuple: &IndexTuple) -> Option<Polynomial> {
        let node = self.node(tuple)?;
        let mut acc = Polynomial::constant(self.n, node.constant.clone());
        for &(j, child) in &node.children {
            let xj = Polynomial::variable(self.n, j).expect("child index in range");
            acc = &acc + &(&xj * &self.nodes[child].poly);
        }
        Some(acc)
    }

    /// Values `p_I(x)` of every node, indexed like [`Self::nodes`].
    pub fn node_values(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.values_with(|j, acc, child| {
            if !x[j].is_zero() {
                *acc += &x[j] * child;
            }
        }))
    }

    /// Values `p_I(x)` at a Boolean point.
    pub fn node_values_bool(&self, x: &[bool]) -> Result<Vec<Rational>> {
        if x.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        Ok(self.values_with(|j, acc, child| {
            if x[j] {
                *acc += child;
            }
        }))
    }

    fn values_with<F>(&self, mut accumulate: F) -> Vec<Rational>
    where
        F: FnMut(usize, &mut Rational, &Rational),
    {
        let mut values = vec![Rational::zero(); self.nodes.len()];
        for id in (0..self.nodes.len()).rev() {
            let node = &self.nodes[id];
            let mut acc = node.constant.clone();
            for &(j, child) in &node.children {
                accumulate(j, &mut acc, &values[child]);
            }
            values[id] = acc;
        }
        values
    }

    /// Every `p_I` has degree at most `d - |I|` (so depth-`d` nodes are
    /// constants).
    pub fn degrees_consistent(&self) -> bool {
        self.nodes
            .iter()
            .all(|node| node.poly.actual_degree() + node.tuple.len() <= self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use num_traits::One;

    fn running_example() -> Polynomial {
        Polynomial::from_terms(
            4,
            [
                (vec![0, 1, 2], int(1)),
                (vec![1, 3], int(1)),
                (vec![], int(3)),
            ],
        )
        .unwrap()
    }

    fn poly(n: usize, terms: &[(&[usize], i64)]) -> Polynomial {
        Polynomial::from_terms(n, terms.iter().map(|(v, c)| (v.to_vec(), int(*c)))).unwrap()
    }

    #[test]
    fn running_example_components() {
        let tree = decompose(&running_example()).unwrap();
        // 1-based names in the worked example map to 0-based indices here.
        assert_eq!(tree.component(&[0]).unwrap(), &poly(4, &[(&[1, 2], 1)]));
        assert_eq!(tree.component(&[0, 1]).unwrap(), &poly(4, &[(&[2], 1)]));
        assert_eq!(tree.component(&[0, 1, 2]).unwrap(), &poly(4, &[(&[], 1)]));
        assert_eq!(tree.component(&[1]).unwrap(), &poly(4, &[(&[3], 1)]));
        assert_eq!(tree.component(&[1, 3]).unwrap(), &poly(4, &[(&[], 1)]));
        assert_eq!(tree.constant_c(), &int(3));
        assert!(tree.component(&[2]).is_none());
        assert!(tree.component(&[3]).is_none());
        assert_eq!(tree.len(), 6);
    }

    #[test]
    fn constant_polynomial_has_no_children() {
        let tree = decompose(&Polynomial::constant(3, int(7))).unwrap();
        assert_eq!(tree.len(), 1);
        assert_eq!(tree.constant_c(), &int(7));
        assert!(tree.root().is_leaf());
    }

    #[test]
    fn linear_components_are_constants() {
        let tree = decompose(&poly(2, &[(&[0], 1), (&[1], 1)])).unwrap();
        assert_eq!(tree.component(&[0]).unwrap(), &poly(2, &[(&[], 1)]));
        assert_eq!(tree.component(&[1]).unwrap(), &poly(2, &[(&[], 1)]));
        assert_eq!(tree.constant_c(), &int(0));
    }

    #[test]
    fn reconstruction_holds_on_running_example() {
        let tree = decompose(&running_example()).unwrap();
        for node in tree.nodes() {
            assert_eq!(
                tree.reconstruct(&node.tuple).unwrap(),
                node.poly,
                "at {}",
                node.tuple
            );
        }
        assert!(tree.degrees_consistent());
    }

    #[test]
    fn node_values_match_direct_evaluation() {
        let p = running_example();
        let tree = decompose(&p).unwrap();
        let x = [true, true, false, true];
        let vals = tree.node_values_bool(&x).unwrap();
        for (node, v) in tree.nodes().iter().zip(&vals) {
            assert_eq!(&node.poly.evaluate_bool(&x).unwrap(), v);
        }
        assert_eq!(vals[0], int(4));
        let xr: Vec<Rational> = [1, 2, 0, 1].iter().map(|&v| int(v)).collect();
        let vals = tree.node_values(&xr).unwrap();
        assert_eq!(vals[0], p.evaluate(&xr).unwrap());
    }

    #[test]
    fn rejects_non_multilinear() {
        let sq = poly(1, &[(&[0, 0], 1)]);
        assert!(matches!(decompose(&sq), Err(Error::NotMultilinear)));
    }

    #[test]
    fn internal_tuples_respect_degree() {
        let tree = decompose(&running_example()).unwrap();
        let tuples: Vec<_> = tree.internal_tuples().map(|n| n.tuple.clone()).collect();
        assert_eq!(
            tuples,
            vec![
                IndexTuple(vec![0]),
                IndexTuple(vec![0, 1]),
                IndexTuple(vec![1]),
                IndexTuple(vec![1, 3])
            ]
        );
        let one = Rational::one();
        assert_eq!(tree.node(&IndexTuple(vec![1, 3])).unwrap().constant, one);
    }
}
