use super::ast::{Assoc, Fixity};
use std::collections::BTreeMap;

/// Fixity of every identifier currently declared infix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfixEnv {
    entries: BTreeMap<String, Fixity>,
}

impl InfixEnv {
    pub fn empty() -> Self {
        InfixEnv { entries: BTreeMap::new() }
    }

    /// The initial basis fixities.
    pub fn basis() -> Self {
        let mut env = Self::empty();
        let table: &[(&[&str], Assoc, u8)] = &[
            (&["*", "/", "div", "mod"], Assoc::Left, 7),
            (&["+", "-", "^"], Assoc::Left, 6),
            (&["::", "@"], Assoc::Right, 5),
            (&["=", "<>", ">", ">=", "<", "<="], Assoc::Left, 4),
            (&[":=", "o"], Assoc::Left, 3),
            (&["before"], Assoc::Left, 0),
        ];
        for (ids, assoc, prec) in table {
            for id in *ids {
                env.declare(id, Fixity { assoc: *assoc, prec: *prec });
            }
        }
        env
    }

    /// Later declarations overwrite earlier ones.
    pub fn declare(&mut self, id: &str, fixity: Fixity) {
        self.entries.insert(id.to_string(), fixity);
    }

    pub fn remove(&mut self, id: &str) {
        self.entries.remove(id);
    }

    pub fn get(&self, id: &str) -> Option<Fixity> {
        self.entries.get(id).copied()
    }

    pub fn is_infix(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Fixity)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Entries that differ from the initial basis.
    pub fn user_entries(&self) -> Vec<(String, Fixity)> {
        let basis = Self::basis();
        self.iter().filter(|(k, v)| basis.get(k) != Some(*v)).map(|(k, v)| (k.to_string(), v)).collect()
    }
}

impl Default for InfixEnv {
    fn default() -> Self {
        Self::basis()
    }
}
