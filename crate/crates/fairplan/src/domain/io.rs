//! Versioned JSON document format for domains, bit-exact and
//! order-canonicalized: proposition lists sorted, states/actions sorted,
//! transitions sorted by (from, act).

use serde::{Deserialize, Serialize};

use super::{Domain, DomainError};
use crate::logic::Letter;

pub const DOMAIN_FORMAT: &str = "fairplan.domain/1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainDoc {
    pub format: String,
    pub fluents: Vec<String>,
    pub action_vars: Vec<String>,
    pub init: Vec<String>,
    pub states: Vec<Vec<String>>,
    pub actions: Vec<Vec<String>>,
    pub transitions: Vec<TransitionDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub from: Vec<String>,
    pub act: Vec<String>,
    pub to: Vec<Vec<String>>,
}

fn to_letter(v: &[String]) -> Letter {
    v.iter().cloned().collect()
}

fn from_letter(l: &Letter) -> Vec<String> {
    l.iter().cloned().collect()
}

impl Domain {
    /// Parses and validates a domain document. With `auto_sink`, states
    /// without an applicable action get a fresh dummy action leading to a
    /// fresh absorbing dummy state instead of failing validation.
    pub fn from_doc(doc: &DomainDoc, auto_sink: bool) -> Result<Domain, DomainError> {
        if doc.format != DOMAIN_FORMAT {
            return Err(DomainError::Document(format!(
                "unsupported format '{}', expected '{}'",
                doc.format, DOMAIN_FORMAT
            )));
        }
        let mut fluents = doc.fluents.clone();
        let mut action_vars = doc.action_vars.clone();
        let mut states: Vec<Letter> = doc.states.iter().map(|s| to_letter(s)).collect();
        let mut actions: Vec<Letter> = doc.actions.iter().map(|a| to_letter(a)).collect();
        let mut transitions: Vec<(Letter, Letter, Vec<Letter>)> = doc
            .transitions
            .iter()
            .map(|t| {
                (
                    to_letter(&t.from),
                    to_letter(&t.act),
                    t.to.iter().map(|o| to_letter(o)).collect(),
                )
            })
            .collect();

        if auto_sink {
            // find states with no applicable action in the raw document
            let mut uncovered: Vec<Letter> = Vec::new();
            for s in &states {
                let covered = transitions
                    .iter()
                    .any(|(from, _, outs)| from == s && !outs.is_empty());
                if !covered {
                    uncovered.push(s.clone());
                }
            }
            if !uncovered.is_empty() {
                let sink_fluent = fresh_name("sink", &fluents, &action_vars);
                let noop_var = fresh_name("noop", &fluents, &action_vars);
                fluents.push(sink_fluent.clone());
                action_vars.push(noop_var.clone());
                let sink_state: Letter = [sink_fluent].into_iter().collect();
                let noop_action: Letter = [noop_var].into_iter().collect();
                states.push(sink_state.clone());
                actions.push(noop_action.clone());
                for s in uncovered {
                    transitions.push((s, noop_action.clone(), vec![sink_state.clone()]));
                }
                transitions.push((sink_state.clone(), noop_action, vec![sink_state]));
            }
        }

        Domain::new(
            fluents,
            action_vars,
            states,
            actions,
            to_letter(&doc.init),
            transitions,
        )
    }

    /// Canonical document for this domain.
    pub fn to_doc(&self) -> DomainDoc {
        let mut transitions: Vec<TransitionDoc> = Vec::new();
        for s in 0..self.state_count() {
            for a in self.applicable(s) {
                transitions.push(TransitionDoc {
                    from: from_letter(self.state(s)),
                    act: from_letter(self.action(a)),
                    to: self
                        .successors(s, a)
                        .iter()
                        .map(|&t| from_letter(self.state(t)))
                        .collect(),
                });
            }
        }
        DomainDoc {
            format: DOMAIN_FORMAT.to_string(),
            fluents: self.fluents.clone(),
            action_vars: self.action_vars.clone(),
            init: from_letter(self.state(self.init())),
            states: self.states().iter().map(from_letter).collect(),
            actions: self.actions().iter().map(from_letter).collect(),
            transitions,
        }
    }

    pub fn from_json(text: &str, auto_sink: bool) -> Result<Domain, DomainError> {
        let doc: DomainDoc =
            serde_json::from_str(text).map_err(|e| DomainError::Document(e.to_string()))?;
        Domain::from_doc(&doc, auto_sink)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("domain serialization cannot fail")
    }
}

fn fresh_name(base: &str, fluents: &[String], avars: &[String]) -> String {
    let mut name = base.to_string();
    while fluents.contains(&name) || avars.contains(&name) {
        name.push('_');
    }
    name
}
