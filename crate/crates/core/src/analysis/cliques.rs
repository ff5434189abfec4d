//! Third bases as d-cliques of the orthogonality graph, and equivalence
//! classes of the resulting triplets.

use log::warn;

use crate::catalog::{all_equivalences, equivalence_test, EquivalenceWitness};
use crate::error::{Error, Result};
use crate::linalg::{dot_conj, mu_deviation, Matrix, OrthonormalBasis, StateVector, STRUCTURAL_TOL};
use crate::scalar::{Complex, Real};

use super::{check_unbiased, MUVectorSet};

/// Three pairwise unbiased bases; the first two are the generating pair.
#[derive(Clone, Debug)]
pub struct Triplet<T> {
    pair: (OrthonormalBasis<T>, OrthonormalBasis<T>),
    third: OrthonormalBasis<T>,
}

impl<T: Real> Triplet<T> {
    pub fn new(first: OrthonormalBasis<T>, second: OrthonormalBasis<T>, third: OrthonormalBasis<T>) -> Result<Self> {
        check_unbiased(&first, &second)?;
        check_unbiased(&first, &third)?;
        check_unbiased(&second, &third)?;
        Ok(Self {
            pair: (first, second),
            third,
        })
    }

    pub fn pair(&self) -> (&OrthonormalBasis<T>, &OrthonormalBasis<T>) {
        (&self.pair.0, &self.pair.1)
    }

    pub fn third(&self) -> &OrthonormalBasis<T> {
        &self.third
    }

    pub fn bases(&self) -> [OrthonormalBasis<T>; 3] {
        [self.pair.0.clone(), self.pair.1.clone(), self.third.clone()]
    }
}

struct Graph {
    adj: Vec<Vec<bool>>,
}

impl Graph {
    fn neighbours(&self, v: usize, within: &[usize]) -> Vec<usize> {
        within.iter().copied().filter(|&u| self.adj[v][u]).collect()
    }

    /// Bron–Kerbosch with pivoting; reports maximal cliques of size `>= min`.
    fn cliques(&self, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, min: usize, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            if r.len() >= min {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        if r.len() + p.len() < min {
            return;
        }
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&w| self.adj[u][w]).count())
            .expect("p or x nonempty");
        let candidates: Vec<usize> = p.iter().copied().filter(|&v| !self.adj[pivot][v]).collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            r.push(v);
            self.cliques(r, self.neighbours(v, &p), self.neighbours(v, &x), min, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
}

/// Every set of `d` pairwise orthogonal members of `set`, as a basis.
/// Cliques whose vectors fail the orthonormality check at `1e-10` are dropped.
pub fn third_bases<T: Real>(set: &MUVectorSet<T>, ortho_tol: T) -> Vec<OrthonormalBasis<T>> {
    let n = set.len();
    let d = set.dim();
    let vs = set.vectors();
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let o = vs[i].overlap(&vs[j]) <= ortho_tol;
            adj[i][j] = o;
            adj[j][i] = o;
        }
    }
    let graph = Graph { adj };
    let mut found = Vec::new();
    graph.cliques(&mut Vec::new(), (0..n).collect(), Vec::new(), d, &mut found);
    found.sort();
    let mut out = Vec::new();
    for clique in found {
        if clique.len() != d {
            warn!("orthogonality clique of size {} in dimension {d}", clique.len());
            continue;
        }
        let vectors: Vec<StateVector<T>> = clique.iter().map(|&i| vs[i].vector().clone()).collect();
        match OrthonormalBasis::from_vectors(&vectors, T::lit(STRUCTURAL_TOL)) {
            Ok(b) => out.push(b),
            Err(e) => warn!("dropping clique {clique:?}: {e}"),
        }
    }
    out
}

/// Monomial unitaries `W` with `W·H ≅ H` up to column phases and order; each
/// also fixes the standard basis, so it maps the pair `{I, H}` to itself.
pub fn pair_automorphisms<T: Real>(h: &Matrix<T>, tol: T) -> Result<Vec<EquivalenceWitness<T>>> {
    all_equivalences(h, h, tol)
}

fn apply_left<T: Real>(w: &EquivalenceWitness<T>, v: &[Complex<T>]) -> Vec<Complex<T>> {
    (0..v.len()).map(|i| w.left[i] * v[w.row_perm[i]]).collect()
}

/// True iff every column of `a` is parallel to some column of `b`.
fn same_basis<T: Real>(a: &[Vec<Complex<T>>], b: &[Vec<Complex<T>>], tol: T) -> bool {
    a.iter()
        .all(|u| b.iter().any(|v| dot_conj(u, v).norm() > T::one() - tol))
}

/// Groups third bases of the pair `{I, H}` into classes of equivalent
/// triplets. Two thirds are equivalent when a monomial symmetry of the pair
/// maps one onto the other. Returns the class index of each input.
pub fn triplet_classes<T: Real>(h: &Matrix<T>, thirds: &[OrthonormalBasis<T>], tol: T) -> Result<Vec<usize>> {
    let d = h.dim();
    if let Some(bad) = thirds.iter().find(|t| t.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: bad.dim(),
        });
    }
    let std = OrthonormalBasis::standard(d);
    let hb = OrthonormalBasis::from_hadamard(h)?;
    for t in thirds {
        let dev = mu_deviation(&std, t)?.max(mu_deviation(&hb, t)?);
        if dev > T::lit(STRUCTURAL_TOL) {
            return Err(Error::NotMutuallyUnbiased(dev.as_f64()));
        }
    }
    let autos = pair_automorphisms(h, T::lit(1e-8))?;
    let cols: Vec<Vec<Vec<Complex<T>>>> = thirds
        .iter()
        .map(|t| (0..d).map(|k| t.matrix().column(k)).collect())
        .collect();
    let mut class = vec![usize::MAX; thirds.len()];
    let mut next = 0;
    for i in 0..thirds.len() {
        if class[i] != usize::MAX {
            continue;
        }
        class[i] = next;
        for w in &autos {
            let image: Vec<_> = cols[i].iter().map(|c| apply_left(w, c)).collect();
            for j in i + 1..thirds.len() {
                if class[j] == usize::MAX && same_basis(&image, &cols[j], tol) {
                    class[j] = next;
                }
            }
        }
        next += 1;
    }
    Ok(class)
}

/// Groups third bases by Hadamard equivalence of `√d·T`. The first basis
/// of the pair is the standard one, so no pair transformation is undone.
pub fn hadamard_classes<T: Real>(thirds: &[OrthonormalBasis<T>], tol: T) -> Result<Vec<usize>> {
    let scaled: Vec<Matrix<T>> = thirds
        .iter()
        .map(|t| t.matrix().scale(T::from_count(t.dim()).sqrt()))
        .collect();
    let mut class = vec![usize::MAX; thirds.len()];
    let mut reps: Vec<usize> = Vec::new();
    for i in 0..thirds.len() {
        for (c, &r) in reps.iter().enumerate() {
            if scaled[r].dim() == scaled[i].dim() && equivalence_test(&scaled[r], &scaled[i], tol)? {
                class[i] = c;
                break;
            }
        }
        if class[i] == usize::MAX {
            class[i] = reps.len();
            reps.push(i);
        }
    }
    Ok(class)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weyl_bases_form_a_triplet_in_every_dimension() {
        for d in 2..9 {
            assert!(crate::analysis::weyl_triplet::<f64>(d).is_ok(), "d = {d}");
        }
    }

    #[test]
    fn cliques_of_a_small_graph() {
        // Two disjoint triangles plus a pendant vertex.
        let mut adj = vec![vec![false; 7]; 7];
        for &(a, b) in &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (5, 6)] {
            adj[a][b] = true;
            adj[b][a] = true;
        }
        let g = Graph { adj };
        let mut out = Vec::new();
        g.cliques(&mut Vec::new(), (0..7).collect(), Vec::new(), 3, &mut out);
        out.sort();
        assert_eq!(out, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn empty_set_has_no_bases() {
        let set = MUVectorSet::<f64>::new(6);
        assert!(third_bases(&set, 1e-8).is_empty());
    }
}
