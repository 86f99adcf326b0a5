//! Hopcroft partition refinement.
//!
//! The partial automaton is completed with a rejecting sink, refined, and
//! the sink's block is dropped again. Blocks are labelled with the bit
//! pattern of their earliest-discovered member.

use crate::automata::dfa::ExplicitDfa;
use crate::bitset::MethodId;

pub fn minimize_dfa(dfa: &ExplicitDfa) -> ExplicitDfa {
    let n = dfa.num_states();
    let sink = n;
    let total = n + 1;
    let symbols = dfa.alphabet().len();

    let target = |q: usize, c: usize| -> usize {
        if q == sink {
            sink
        } else {
            dfa.step(q, MethodId(c)).unwrap_or(sink)
        }
    };

    // pred[c][q] = states p with δ(p, c) = q
    let mut pred: Vec<Vec<Vec<usize>>> = vec![vec![Vec::new(); total]; symbols];
    for (c, per_symbol) in pred.iter_mut().enumerate() {
        for p in 0..total {
            per_symbol[target(p, c)].push(p);
        }
    }

    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut block_of = vec![0usize; total];
    if n > 0 {
        blocks.push((0..n).collect());
    }
    blocks.push(vec![sink]);
    block_of[sink] = blocks.len() - 1;

    let mut in_work: Vec<Vec<bool>> = vec![vec![false; symbols]; blocks.len()];
    let mut work: Vec<(usize, usize)> = Vec::new();
    let smallest = (0..blocks.len()).min_by_key(|b| blocks[*b].len()).unwrap();
    for c in 0..symbols {
        work.push((smallest, c));
        in_work[smallest][c] = true;
    }

    let mut marked = vec![false; total];
    let mut hits = vec![0usize; blocks.len()];
    while let Some((a, c)) = work.pop() {
        in_work[a][c] = false;
        let mut touched = Vec::new();
        let mut xs = Vec::new();
        for &q in &blocks[a] {
            for &p in &pred[c][q] {
                if !marked[p] {
                    marked[p] = true;
                    xs.push(p);
                    let y = block_of[p];
                    if hits[y] == 0 {
                        touched.push(y);
                    }
                    hits[y] += 1;
                }
            }
        }
        for y in touched {
            let count = std::mem::take(&mut hits[y]);
            if count < blocks[y].len() {
                let (inside, outside): (Vec<usize>, Vec<usize>) =
                    blocks[y].iter().partition(|q| marked[**q]);
                let z = blocks.len();
                for q in &inside {
                    block_of[*q] = z;
                }
                blocks[y] = outside;
                blocks.push(inside);
                hits.push(0);
                in_work.push(vec![false; symbols]);
                for d in 0..symbols {
                    if in_work[y][d] {
                        work.push((z, d));
                        in_work[z][d] = true;
                    } else {
                        let pick = if blocks[y].len() <= blocks[z].len() { y } else { z };
                        work.push((pick, d));
                        in_work[pick][d] = true;
                    }
                }
            }
        }
        for p in xs {
            marked[p] = false;
        }
    }

    let sink_block = block_of[sink];
    // Number surviving blocks by their smallest (earliest-discovered) member.
    let mut reps: Vec<(usize, usize)> = blocks
        .iter()
        .enumerate()
        .filter(|(b, members)| *b != sink_block && !members.is_empty())
        .map(|(b, members)| (*members.iter().min().unwrap(), b))
        .collect();
    reps.sort();
    let mut new_id = vec![usize::MAX; blocks.len()];
    for (i, (_, b)) in reps.iter().enumerate() {
        new_id[*b] = i;
    }
    let states = reps
        .iter()
        .map(|(rep, _)| dfa.states()[*rep].clone())
        .collect();
    let delta = reps
        .iter()
        .map(|(rep, _)| {
            (0..symbols)
                .map(|c| {
                    let t = target(*rep, c);
                    (t != sink).then(|| new_id[block_of[t]])
                })
                .collect()
        })
        .collect();
    let initial = if n == 0 { 0 } else { new_id[block_of[dfa.initial()]] };
    ExplicitDfa::from_parts(dfa.alphabet().to_vec(), states, initial, delta)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("m{i}")).collect()
    }

    #[test]
    fn already_minimal_is_unchanged() {
        // 0 -a-> 1, 1 -b-> 0
        let dfa = ExplicitDfa::from_table(names(2), 2, 0, &[(0, 0, 1), (1, 1, 0)]);
        let min = minimize_dfa(&dfa);
        assert_eq!(min.num_states(), 2);
        assert_eq!(min.num_transitions(), 2);
    }

    #[test]
    fn equivalent_states_merge() {
        // 0 -a-> 1, 0 -b-> 2, 1 and 2 both loop on a
        let dfa = ExplicitDfa::from_table(
            names(2),
            3,
            0,
            &[(0, 0, 1), (0, 1, 2), (1, 0, 1), (2, 0, 2)],
        );
        let min = minimize_dfa(&dfa);
        assert_eq!(min.num_states(), 2);
        assert!(min.accepts(&[MethodId(1), MethodId(0), MethodId(0)]));
        assert!(!min.accepts(&[MethodId(1), MethodId(1)]));
    }

    #[test]
    fn single_state_without_transitions() {
        let dfa = ExplicitDfa::from_table(names(1), 1, 0, &[]);
        assert_eq!(minimize_dfa(&dfa).num_states(), 1);
    }
}
