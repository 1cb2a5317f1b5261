use poslog_core::closedness::pac_saturate;
use poslog_core::corpus;
use poslog_core::morphisms::{is_embedding, is_immersion};
use poslog_core::{Flag, Outcome, SearchBudget};

fn cycle_type(table: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; table.len()];
    let mut out = Vec::new();
    for s in 0..table.len() {
        let (mut x, mut len) = (s, 0);
        while !seen[x] {
            seen[x] = true;
            x = table[x];
            len += 1;
        }
        if len > 0 {
            out.push(len);
        }
    }
    out.sort();
    out
}

/// Under T″ the 3-cycle first picks up a 2-cycle. Once the bound leaves
/// room for a 5-cycle the chain adds one and runs into the bound, where the
/// pac check has nothing left to search. The final verdict is Unknown, never
/// Fails: saturation only stops once the check stops failing.
#[test]
fn three_cycle_under_nofix_grows_until_the_bound() {
    let c = corpus::load().unwrap();
    let (t, c3) = (c.theory("Tnofix"), c.structure("C3"));

    let s = pac_saturate(c3, t, &SearchBudget::default().with_size(9)).unwrap();
    assert_eq!(cycle_type(s.result.function_table(0)), [2, 3]);
    assert_eq!(s.report.outcome(), Outcome::Holds);

    let s = pac_saturate(c3, t, &SearchBudget::default().with_size(10)).unwrap();
    let sizes: Vec<usize> = s.steps.iter().map(|st| st.to.size()).collect();
    assert_eq!(sizes, [5, 10]);
    assert_eq!(cycle_type(s.result.function_table(0)), [2, 3, 5]);
    assert_eq!(s.report.outcome(), Outcome::Unknown);
    assert!(s.report.verdict.flags.contains(&Flag::Truncated));
    assert!(is_embedding(c3, &s.result, &s.embedding()).unwrap());
    for st in &s.steps {
        assert!(!is_immersion(&st.from, &st.to, &st.map).unwrap());
        assert!(st.gained.as_ref().unwrap().verify(&st.from, &st.to, &st.map));
    }
}
