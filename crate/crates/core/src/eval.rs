//! Exact match and per-slot concept precision/recall.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use thiserror::Error;

use crate::grammar::{Concept, Grammar, RobotCommand, Slot};
use crate::text::Sentence;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("{hyps} hypotheses for {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("reference {0} does not parse under the grammar")]
    ReferenceUnparseable(usize),
}

/// Fraction of positions where the token sequences are identical.
///
/// Two empty lists score 1.
pub fn exact_match(hyps: &[Sentence], refs: &[Sentence]) -> Result<f64, EvalError> {
    check_lengths(hyps.len(), refs.len())?;
    if refs.is_empty() {
        return Ok(1.0);
    }
    let hits = hyps.iter().zip(refs).filter(|(h, r)| h == r).count();
    Ok(hits as f64 / refs.len() as f64)
}

fn check_lengths(hyps: usize, refs: usize) -> Result<(), EvalError> {
    if hyps != refs {
        return Err(EvalError::LengthMismatch { hyps, refs });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SlotScore {
    pub true_positives: usize,
    pub predicted: usize,
    pub reference: usize,
}

impl SlotScore {
    /// 1 when nothing was predicted and nothing was expected, 0 when only the
    /// latter is non-empty.
    pub fn precision(&self) -> f64 {
        match (self.predicted, self.reference) {
            (0, 0) => 1.0,
            (0, _) => 0.0,
            (p, _) => self.true_positives as f64 / p as f64,
        }
    }

    pub fn recall(&self) -> f64 {
        match self.reference {
            0 if self.predicted == 0 => 1.0,
            0 => 0.0,
            r => self.true_positives as f64 / r as f64,
        }
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub sentences: usize,
    pub exact_match_rate: f64,
    pub action: SlotScore,
    pub object: SlotScore,
    pub relation: SlotScore,
    /// Positions whose hypothesis differs from the reference or is missing.
    pub failures: Vec<usize>,
}

impl EvalReport {
    pub fn slot(&self, slot: Slot) -> &SlotScore {
        match slot {
            Slot::Action => &self.action,
            Slot::Object => &self.object,
            Slot::Relation => &self.relation,
        }
    }

    fn slot_mut(&mut self, slot: Slot) -> &mut SlotScore {
        match slot {
            Slot::Action => &mut self.action,
            Slot::Object => &mut self.object,
            Slot::Relation => &mut self.relation,
        }
    }
}

/// Multiset of `(slot, concept)` items across commands.
fn items(commands: &[RobotCommand]) -> BTreeMap<(Slot, &Concept), usize> {
    let mut out = BTreeMap::new();
    for c in commands {
        *out.entry((Slot::Action, &c.action)).or_insert(0) += 1;
        *out.entry((Slot::Object, &c.object)).or_insert(0) += 1;
        if let Some(clause) = &c.clause {
            *out.entry((Slot::Relation, &clause.relation)).or_insert(0) += 1;
            *out.entry((Slot::Object, &clause.object)).or_insert(0) += 1;
        }
    }
    out
}

/// [`evaluate`] with every hypothesis present.
pub fn concept_f1(hyps: &[Sentence], refs: &[Sentence], grammar: &Grammar) -> Result<EvalReport, EvalError> {
    let hyps: Vec<Option<&Sentence>> = hyps.iter().map(Some).collect();
    evaluate(&hyps, refs, grammar)
}

/// Exact match and per-slot scores. `None` marks a failed translation; it
/// scores like an unparseable hypothesis.
///
/// Both sides are parsed with the robot grammar. Commands parsed before any
/// residue count; a hypothesis that does not parse at all contributes no
/// predicted items while its reference items still count toward recall.
pub fn evaluate(hyps: &[Option<&Sentence>], refs: &[Sentence], grammar: &Grammar) -> Result<EvalReport, EvalError> {
    check_lengths(hyps.len(), refs.len())?;
    let mut report = EvalReport {
        sentences: refs.len(),
        ..EvalReport::default()
    };
    let mut hits = 0;
    for (k, (hyp, reference)) in hyps.iter().zip(refs).enumerate() {
        let ref_cmds = grammar
            .parse(reference)
            .map_err(|_| EvalError::ReferenceUnparseable(k))?
            .commands;
        let hyp_cmds = hyp
            .and_then(|h| grammar.parse(h).ok())
            .map(|p| p.commands)
            .unwrap_or_default();
        if hyp.is_some_and(|h| h == reference) {
            hits += 1;
        } else {
            report.failures.push(k);
        }
        let want = items(&ref_cmds);
        let got = items(&hyp_cmds);
        for (&(slot, _), &n) in &want {
            report.slot_mut(slot).reference += n;
        }
        for (key, &n) in &got {
            let s = report.slot_mut(key.0);
            s.predicted += n;
            s.true_positives += n.min(want.get(key).copied().unwrap_or(0));
        }
    }
    report.exact_match_rate = if refs.is_empty() {
        1.0
    } else {
        hits as f64 / refs.len() as f64
    };
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn s(text: &str) -> Sentence {
        Sentence::from_words(text).unwrap()
    }

    #[test]
    fn exact_match_rates() {
        let a = vec![s("navigate to the car"), s("navigate to the tree")];
        assert_eq!(exact_match(&a, &a), Ok(1.0));
        let b = vec![s("x"), s("y")];
        assert_eq!(exact_match(&a, &b), Ok(0.0));
        let c = vec![s("navigate to the car"), s("y")];
        assert_eq!(exact_match(&a, &c), Ok(0.5));
        assert_eq!(
            exact_match(&a[..1], &a),
            Err(EvalError::LengthMismatch { hyps: 1, refs: 2 })
        );
        assert_eq!(exact_match(&[], &[]), Ok(1.0));
    }

    #[test]
    fn identity_scores_one() {
        let g = Grammar::navigation();
        let r = vec![s("navigate to the car that is behind the building")];
        let rep = concept_f1(&r, &r, &g).unwrap();
        for slot in [Slot::Action, Slot::Object, Slot::Relation] {
            assert_eq!(rep.slot(slot).f1(), 1.0);
        }
        assert_eq!(rep.exact_match_rate, 1.0);
        assert!(rep.failures.is_empty());
    }

    #[test]
    fn missing_relation_clause() {
        let g = Grammar::navigation();
        let r = vec![s("navigate to the car that is behind the building")];
        let h = vec![s("navigate to the car")];
        let rep = concept_f1(&h, &r, &g).unwrap();
        assert_eq!(rep.action.f1(), 1.0);
        assert_eq!(rep.object.recall(), 0.5);
        assert_eq!(rep.object.precision(), 1.0);
        assert_eq!(rep.relation.recall(), 0.0);
        assert_eq!(rep.relation.f1(), 0.0);
        assert_eq!(rep.failures, vec![0]);
    }

    #[test]
    fn unparseable_hypothesis_counts_toward_recall() {
        let g = Grammar::navigation();
        let r = vec![s("navigate to the car")];
        let rep = concept_f1(&[s("hello there")], &r, &g).unwrap();
        assert_eq!(rep.action.reference, 1);
        assert_eq!(rep.action.predicted, 0);
        assert_eq!(rep.action.recall(), 0.0);
        let rep = evaluate(&[None], &r, &g).unwrap();
        assert_eq!(rep.object.recall(), 0.0);
        assert_eq!(rep.failures, vec![0]);
    }

    #[test]
    fn multiset_counts_repeats() {
        let g = Grammar::navigation();
        let r = vec![s("navigate to the car navigate to the car")];
        let h = vec![s("navigate to the car")];
        let rep = concept_f1(&h, &r, &g).unwrap();
        assert_eq!(rep.object.true_positives, 1);
        assert_eq!(rep.object.reference, 2);
        assert_eq!(rep.object.recall(), 0.5);
    }

    #[test]
    fn vacuous_and_errors() {
        let g = Grammar::navigation();
        let rep = concept_f1(&[], &[], &g).unwrap();
        assert_eq!(rep.exact_match_rate, 1.0);
        for slot in [Slot::Action, Slot::Object, Slot::Relation] {
            let sc = rep.slot(slot);
            assert_eq!((sc.precision(), sc.recall(), sc.f1()), (1.0, 1.0, 1.0));
        }
        assert_eq!(
            concept_f1(&[s("a")], &[s("b")], &g),
            Err(EvalError::ReferenceUnparseable(0))
        );
    }

    proptest! {
        #[test]
        fn scores_are_bounded(cmds in prop::collection::vec((0usize..39, 0usize..39, any::<bool>()), 1..8)) {
            let g = Grammar::navigation();
            let all = g.enumerate_commands();
            let refs: Vec<Sentence> = cmds.iter().map(|&(r, _, _)| g.realize(&all[r]).unwrap()).collect();
            let hyps: Vec<Sentence> = cmds
                .iter()
                .map(|&(r, h, same)| g.realize(&all[if same { r } else { h }]).unwrap())
                .collect();
            let rep = concept_f1(&hyps, &refs, &g).unwrap();
            for slot in [Slot::Action, Slot::Object, Slot::Relation] {
                let sc = rep.slot(slot);
                let (p, r, f) = (sc.precision(), sc.recall(), sc.f1());
                prop_assert!((0.0..=1.0).contains(&p) && (0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&f));
                prop_assert!(f <= p.max(r) + 1e-12);
            }
            if exact_match(&hyps, &refs).unwrap() == 1.0 {
                for slot in [Slot::Action, Slot::Object, Slot::Relation] {
                    prop_assert_eq!(rep.slot(slot).f1(), 1.0);
                }
            }
        }
    }
}
