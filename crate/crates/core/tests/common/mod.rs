//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use csl_core::FeatureVector;
use rand::Rng;

/// Reference DBSCAN: all-pairs distances, union-find over core points,
/// clusters numbered by their lowest core index, border points attached to
/// the lowest-numbered adjacent cluster, then noise singletons in input order.
pub fn naive_dbscan(points: &[Vec<f64>], eps: f64, min_samples: usize) -> Vec<usize> {
    let n = points.len();
    let near = |i: usize, j: usize| {
        let d2: f64 = points[i].iter().zip(&points[j]).map(|(a, b)| (a - b) * (a - b)).sum();
        d2.sqrt() <= eps
    };
    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| near(i, j)).count() >= min_samples)
        .collect();

    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in 0..i {
            if core[i] && core[j] && near(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // Roots are the lowest index in each set, so ordering roots orders clusters
    // by their first core point.
    let mut roots: Vec<usize> = (0..n).filter(|&i| core[i]).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    let cluster_of = |root: usize| roots.binary_search(&root).unwrap();

    let mut labels = vec![usize::MAX; n];
    for i in 0..n {
        if core[i] {
            labels[i] = cluster_of(find(&mut parent, i));
        }
    }
    for i in 0..n {
        if !core[i] {
            if let Some(c) = (0..n)
                .filter(|&j| core[j] && near(i, j))
                .map(|j| labels[j])
                .min()
            {
                labels[i] = c;
            }
        }
    }
    let mut next = roots.len();
    for l in labels.iter_mut() {
        if *l == usize::MAX {
            *l = next;
            next += 1;
        }
    }
    labels
}

/// Clumpy random points: a few Gaussian blobs plus uniform background, with
/// an eps drawn relative to the blob spread.
pub fn random_instance<R: Rng>(rng: &mut R) -> (Vec<Vec<f64>>, f64, usize) {
    let n = rng.random_range(1..=200);
    let dim = rng.random_range(2..=30);
    let spread = rng.random_range(0.05..0.5);
    let centers: Vec<Vec<f64>> = (0..rng.random_range(1..=6))
        .map(|_| (0..dim).map(|_| rng.random_range(-5.0..5.0)).collect())
        .collect();
    let points = (0..n)
        .map(|_| {
            if rng.random_bool(0.15) {
                (0..dim).map(|_| rng.random_range(-6.0..6.0)).collect()
            } else {
                let c = &centers[rng.random_range(0..centers.len())];
                c.iter()
                    .map(|x| x + spread * (rng.random::<f64>() - 0.5) * 2.0)
                    .collect()
            }
        })
        .collect();
    let eps = spread * (dim as f64).sqrt() * rng.random_range(0.3..1.5);
    (points, eps, rng.random_range(1..=8))
}

pub fn to_features(points: &[Vec<f64>]) -> Vec<FeatureVector> {
    points.iter().map(|p| FeatureVector::new(p.clone()).unwrap()).collect()
}
