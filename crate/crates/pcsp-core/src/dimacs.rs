//! Convenience converter from DIMACS CNF with clauses of width at most two.

use crate::{expand_folded_idempotent, zoo, Clause, Instance, Literal, PcspError, Result, Template};

/// Parse `p cnf` text into an instance of folded 2-SAT with uniform weights.
/// Unit clauses become `(l or l)`.
pub fn parse_dimacs_2sat(text: &str) -> Result<(Template, Instance)> {
    let template = expand_folded_idempotent(&zoo::two_sat())?;
    let mut n_vars: Option<usize> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<Literal> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 || fields[1] != "cnf" || n_vars.is_some() {
                return Err(PcspError::Malformed(format!("bad problem line '{line}'")));
            }
            let n = fields[2]
                .parse::<usize>()
                .map_err(|_| PcspError::Malformed(format!("bad variable count '{}'", fields[2])))?;
            n_vars = Some(n);
            continue;
        }
        let n = n_vars.ok_or_else(|| PcspError::Malformed("clause before problem line".into()))?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| PcspError::Malformed(format!("bad literal '{tok}'")))?;
            if v == 0 {
                let lits = std::mem::take(&mut current);
                clauses.push(match lits.len() {
                    1 => Clause::new(0, vec![lits[0], lits[0]], 1.0),
                    2 => Clause::new(0, lits, 1.0),
                    0 => return Err(PcspError::Malformed("empty clause".into())),
                    k => return Err(PcspError::ArityMismatch { expected: 2, found: k }),
                });
                continue;
            }
            let var = v.unsigned_abs() as usize;
            if var == 0 || var > n {
                return Err(PcspError::VariableOutOfRange { var, n_vars: n });
            }
            current.push(if v > 0 { Literal::pos(var - 1) } else { Literal::neg(var - 1) });
        }
    }
    if !current.is_empty() {
        return Err(PcspError::Malformed("unterminated clause".into()));
    }
    let n = n_vars.ok_or_else(|| PcspError::Malformed("missing problem line".into()))?;
    let instance = Instance::new(&template, n, clauses)?;
    Ok((template, instance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn converts_small_formula() {
        let (t, inst) = parse_dimacs_2sat("c demo\np cnf 3 3\n1 -2 0\n2 3 0\n-3 0\n").unwrap();
        assert!(t.folded);
        assert_eq!(inst.n_vars, 3);
        assert_eq!(inst.clauses.len(), 3);
        assert_eq!(inst.clauses[0].lits, vec![Literal::pos(0), Literal::neg(1)]);
        assert_eq!(inst.clauses[2].lits, vec![Literal::neg(2), Literal::neg(2)]);
        assert!((inst.total_weight() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_wide_clauses() {
        assert!(parse_dimacs_2sat("p cnf 3 1\n1 2 3 0\n").is_err());
        assert!(parse_dimacs_2sat("1 2 0\n").is_err());
        assert!(parse_dimacs_2sat("p cnf 1 1\n2 0\n").is_err());
    }
}
