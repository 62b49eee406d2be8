//! Seeded train/test splitting and k-fold assignment.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
}

/// Shuffle-then-prefix split at `ratio`.
///
/// With `stratify` labels, each class is split separately (floor of the
/// per-class quota, remainders distributed by descending fractional part)
/// and the per-class train and test lists are concatenated in label order.
pub fn train_test_split(
    n: usize,
    ratio: f64,
    seed: u64,
    stratify: Option<&[u8]>,
) -> Result<SplitIndices> {
    if n < 5 {
        return Err(Error::Argument(format!("cannot split {n} rows; need at least 5")));
    }
    if !(0.0..1.0).contains(&ratio) || ratio <= 0.0 {
        return Err(Error::Argument(format!("split ratio {ratio} out of (0, 1)")));
    }
    if let Some(labels) = stratify {
        if labels.len() != n {
            return Err(Error::Argument("stratify labels length mismatch".into()));
        }
        return stratified_split(labels, ratio, seed);
    }

    let mut indices: Vec<usize> = (0..n).collect();
    indices.shuffle(&mut stream(seed, "train-test-split", 0));
    let n_train = (ratio * n as f64).floor() as usize;
    let test = indices.split_off(n_train);
    Ok(SplitIndices {
        train: indices,
        test,
        seed,
    })
}

fn stratified_split(labels: &[u8], ratio: f64, seed: u64) -> Result<SplitIndices> {
    let n = labels.len();
    let mut classes: Vec<u8> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();

    let mut per_class: Vec<(u8, Vec<usize>)> = classes
        .iter()
        .map(|&c| {
            (
                c,
                (0..n).filter(|&i| labels[i] == c).collect::<Vec<usize>>(),
            )
        })
        .collect();
    if let Some((c, members)) = per_class.iter().find(|(_, m)| m.len() < 2) {
        return Err(Error::Argument(format!(
            "stratum for class {c} has only {} members",
            members.len()
        )));
    }

    // Floor each class quota, then hand out the remainder toward the total
    // floor(ratio * n) by descending fractional part (ties to lower label).
    let target_total = (ratio * n as f64).floor() as usize;
    let mut quotas: Vec<usize> = per_class
        .iter()
        .map(|(_, m)| (ratio * m.len() as f64).floor() as usize)
        .collect();
    let mut remainder = target_total.saturating_sub(quotas.iter().sum());
    let mut by_frac: Vec<usize> = (0..per_class.len()).collect();
    by_frac.sort_by(|&a, &b| {
        let frac = |i: usize| {
            let m = per_class[i].1.len() as f64;
            ratio * m - (ratio * m).floor()
        };
        frac(b).partial_cmp(&frac(a)).expect("finite").then(a.cmp(&b))
    });
    for &i in &by_frac {
        if remainder == 0 {
            break;
        }
        if quotas[i] < per_class[i].1.len() {
            quotas[i] += 1;
            remainder -= 1;
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for ((class, members), quota) in per_class.iter_mut().zip(&quotas) {
        members.shuffle(&mut stream(seed, "stratified-split", u64::from(*class)));
        train.extend_from_slice(&members[..*quota]);
        test.extend_from_slice(&members[*quota..]);
    }
    Ok(SplitIndices { train, test, seed })
}

/// Fold index per row for k-fold cross-validation.
///
/// Rows are shuffled and dealt round-robin; with `stratify`, each class is
/// dealt separately so folds keep the class balance.
pub fn kfold_assignments(
    n: usize,
    folds: usize,
    seed: u64,
    stratify: Option<&[u8]>,
) -> Result<Vec<usize>> {
    if folds < 2 || folds > n {
        return Err(Error::Argument(format!(
            "{folds} folds out of range for {n} rows"
        )));
    }
    let mut fold_of = vec![0usize; n];
    match stratify {
        None => {
            let mut indices: Vec<usize> = (0..n).collect();
            indices.shuffle(&mut stream(seed, "kfold", 0));
            for (pos, &i) in indices.iter().enumerate() {
                fold_of[i] = pos % folds;
            }
        }
        Some(labels) => {
            if labels.len() != n {
                return Err(Error::Argument("stratify labels length mismatch".into()));
            }
            let mut classes: Vec<u8> = labels.to_vec();
            classes.sort_unstable();
            classes.dedup();
            for &c in &classes {
                let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
                if members.len() < folds {
                    return Err(Error::Argument(format!(
                        "class {c} has {} members, fewer than {folds} folds",
                        members.len()
                    )));
                }
                members.shuffle(&mut stream(seed, "kfold-class", u64::from(c)));
                for (pos, &i) in members.iter().enumerate() {
                    fold_of[i] = pos % folds;
                }
            }
        }
    }
    Ok(fold_of)
}
