//! Finite two-player payoff tables: pure-equilibrium scan and alternating
//! best-response dynamics with cycle detection.

use thiserror::Error;

/// A two-player game given by labelled payoff cells `(row payoff, column
/// payoff)`.
#[derive(Debug, Clone)]
pub struct BimatrixGame {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub payoffs: Vec<Vec<(f64, f64)>>,
}

#[derive(Debug, Error)]
pub enum BimatrixError {
    #[error("payoff table is ragged or empty")]
    BadShape,
    #[error("start cell ({0}, {1}) out of range")]
    BadStart(usize, usize),
}

impl BimatrixGame {
    pub fn new(
        row_labels: Vec<String>,
        col_labels: Vec<String>,
        payoffs: Vec<Vec<(f64, f64)>>,
    ) -> Result<Self, BimatrixError> {
        if payoffs.len() != row_labels.len()
            || payoffs.is_empty()
            || payoffs.iter().any(|r| r.len() != col_labels.len())
            || col_labels.is_empty()
        {
            return Err(BimatrixError::BadShape);
        }
        Ok(BimatrixGame {
            row_labels,
            col_labels,
            payoffs,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.payoffs.len()
    }

    pub fn n_cols(&self) -> usize {
        self.payoffs[0].len()
    }

    /// Row player's best response to column `c` (smallest index on ties).
    pub fn row_best_response(&self, c: usize) -> usize {
        let mut best = 0;
        for r in 1..self.n_rows() {
            if self.payoffs[r][c].0 > self.payoffs[best][c].0 {
                best = r;
            }
        }
        best
    }

    /// Column player's best response to row `r` (smallest index on ties).
    pub fn col_best_response(&self, r: usize) -> usize {
        let mut best = 0;
        for c in 1..self.n_cols() {
            if self.payoffs[r][c].1 > self.payoffs[r][best].1 {
                best = c;
            }
        }
        best
    }
}

/// Brute-force scan for pure Nash equilibria: cells where neither player
/// gains by a unilateral move.
pub fn check_pne_bimatrix(game: &BimatrixGame) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for r in 0..game.n_rows() {
        for c in 0..game.n_cols() {
            let (pr, pc) = game.payoffs[r][c];
            let row_ok = (0..game.n_rows()).all(|r2| game.payoffs[r2][c].0 <= pr);
            let col_ok = (0..game.n_cols()).all(|c2| game.payoffs[r][c2].1 <= pc);
            if row_ok && col_ok {
                out.push((r, c));
            }
        }
    }
    out
}

/// Trajectory of alternating best responses.
#[derive(Debug, Clone)]
pub struct DeviationTrace {
    pub states: Vec<(usize, usize)>,
    /// `(first_index, repeat_index)` once a state repeats.
    pub cycle: Option<(usize, usize)>,
    /// Set when play settles on a cell no player leaves.
    pub fixed_point: Option<(usize, usize)>,
}

/// Plays strict best-response deviations from `start`, row player first,
/// until a fixed point, a revisited state, or the step budget.
pub fn alternating_best_response(
    game: &BimatrixGame,
    start: (usize, usize),
    max_steps: usize,
) -> Result<DeviationTrace, BimatrixError> {
    if start.0 >= game.n_rows() || start.1 >= game.n_cols() {
        return Err(BimatrixError::BadStart(start.0, start.1));
    }
    let mut states = vec![start];
    let mut current = start;
    let mut row_turn = true;
    for _ in 0..max_steps {
        let mut next = current;
        if row_turn {
            let br = game.row_best_response(current.1);
            if game.payoffs[br][current.1].0 > game.payoffs[current.0][current.1].0 {
                next = (br, current.1);
            }
        } else {
            let br = game.col_best_response(current.0);
            if game.payoffs[current.0][br].1 > game.payoffs[current.0][current.1].1 {
                next = (current.0, br);
            }
        }
        if next == current {
            row_turn = !row_turn;
            // A fixed point only once neither side wants to move.
            let r_br = game.row_best_response(current.1);
            let c_br = game.col_best_response(current.0);
            let r_stuck =
                game.payoffs[r_br][current.1].0 <= game.payoffs[current.0][current.1].0;
            let c_stuck =
                game.payoffs[current.0][c_br].1 <= game.payoffs[current.0][current.1].1;
            if r_stuck && c_stuck {
                return Ok(DeviationTrace {
                    states,
                    cycle: None,
                    fixed_point: Some(current),
                });
            }
            continue;
        }
        if let Some(first) = states.iter().position(|&s| s == next) {
            states.push(next);
            let repeat = states.len() - 1;
            return Ok(DeviationTrace {
                states,
                cycle: Some((first, repeat)),
                fixed_point: None,
            });
        }
        states.push(next);
        current = next;
        row_turn = !row_turn;
    }
    Ok(DeviationTrace {
        states,
        cycle: None,
        fixed_point: None,
    })
}

/// The 4x2 interdiction payoff table with no pure equilibrium: the row
/// player picks among {a}, {c}, {a, c}, {b} and the column player between
/// {d} and {f}; alternating deviations cycle through four profiles.
pub fn no_pne_example() -> BimatrixGame {
    BimatrixGame::new(
        vec!["a".into(), "c".into(), "(a,c)".into(), "b".into()],
        vec!["d".into(), "f".into()],
        vec![
            vec![(6.0, 1.0), (0.0, 0.0)],
            vec![(7.0, 1.0), (1.5, 1.6)],
            vec![(7.5, 1.0), (1.5, 1.5)],
            vec![(7.0, 1.0), (2.0, 0.0)],
        ],
    )
    .expect("static table is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_pne_table_has_no_pure_equilibrium() {
        let game = no_pne_example();
        assert!(check_pne_bimatrix(&game).is_empty());
    }

    #[test]
    fn no_pne_table_entries_are_exact() {
        let game = no_pne_example();
        assert_eq!(game.payoffs[0][0], (6.0, 1.0));
        assert_eq!(game.payoffs[1][1], (1.5, 1.6));
        assert_eq!(game.payoffs[2][0], (7.5, 1.0));
        assert_eq!(game.payoffs[2][1], (1.5, 1.5));
        assert_eq!(game.payoffs[3][1], (2.0, 0.0));
    }

    #[test]
    fn coordination_game_has_two_equilibria() {
        let game = BimatrixGame::new(
            vec!["u".into(), "d".into()],
            vec!["l".into(), "r".into()],
            vec![
                vec![(1.0, 1.0), (0.0, 0.0)],
                vec![(0.0, 0.0), (1.0, 1.0)],
            ],
        )
        .unwrap();
        assert_eq!(check_pne_bimatrix(&game), vec![(0, 0), (1, 1)]);
    }

    #[test]
    fn deviations_cycle_on_the_no_pne_table() {
        let game = no_pne_example();
        let trace = alternating_best_response(&game, (0, 0), 100).unwrap();
        let (first, repeat) = trace.cycle.expect("cycle expected");
        assert!(repeat > first);
        // Four distinct profiles participate in the cycle.
        let cycle_states: std::collections::BTreeSet<(usize, usize)> =
            trace.states[first..repeat].iter().cloned().collect();
        assert_eq!(cycle_states.len(), 4);
        assert!(trace.fixed_point.is_none());
    }

    #[test]
    fn deviations_settle_on_a_pne() {
        let game = BimatrixGame::new(
            vec!["u".into(), "d".into()],
            vec!["l".into(), "r".into()],
            vec![
                vec![(2.0, 2.0), (0.0, 0.0)],
                vec![(1.0, 0.0), (1.0, 1.0)],
            ],
        )
        .unwrap();
        let trace = alternating_best_response(&game, (1, 0), 50).unwrap();
        assert_eq!(trace.fixed_point, Some((0, 0)));
        assert!(trace.cycle.is_none());
    }

    #[test]
    fn best_response_to_each_column() {
        let game = no_pne_example();
        assert_eq!(game.row_best_response(0), 2); // (a,c) pays 7.5 against d
        assert_eq!(game.row_best_response(1), 3); // b pays 2 against f
        assert_eq!(game.col_best_response(0), 0); // d pays 1 against a
        assert_eq!(game.col_best_response(1), 1); // f pays 1.6 against c
    }
}
