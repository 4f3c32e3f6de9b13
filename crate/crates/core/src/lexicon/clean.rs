use std::collections::HashMap;

use serde::Serialize;

use super::{EntryId, Language, Lexicon, LexiconEntry};
use crate::text;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormChange {
    pub entry_id: EntryId,
    pub language: Language,
    pub before: String,
    /// `None` when the form was whitespace only and became an absence.
    pub after: Option<String>,
    pub trimmed: bool,
    pub lowercased: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Removal {
    pub entry_id: EntryId,
    pub duplicate_of: EntryId,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CleaningReport {
    pub entries_before: usize,
    pub entries_after: usize,
    pub modifications: Vec<FormChange>,
    pub removals: Vec<Removal>,
}

impl CleaningReport {
    pub fn is_noop(&self) -> bool {
        self.modifications.is_empty() && self.removals.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValidationIssue {
    /// `row` duplicates `first_row` under the (french, pos, score) key.
    Duplicate { row: usize, first_row: usize },
    /// A form is not trimmed / lower-cased / NFC.
    Unnormalized { row: usize, language: Language, form: String },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub entries: usize,
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }

    pub fn duplicate_rows(&self) -> Vec<usize> {
        self.issues
            .iter()
            .filter_map(|i| match i {
                ValidationIssue::Duplicate { row, .. } => Some(*row),
                _ => None,
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RejectReason {
    Duplicate { existing: EntryId },
    DuplicateInBatch { index: usize },
    Unnormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AddRejection {
    /// Position of the rejected entry in the submitted batch.
    pub index: usize,
    pub french: String,
    pub reason: RejectReason,
}

impl Lexicon {
    /// Reports duplicates and unnormalized forms without changing anything.
    /// Rows are 1-based positions in entry order.
    pub fn validate(&self) -> ValidationReport {
        let mut first_seen: HashMap<_, usize> = HashMap::new();
        let mut issues = Vec::new();
        for (i, e) in self.entries().iter().enumerate() {
            let row = i + 1;
            for lang in Language::ALL {
                if let Some(f) = e.form(lang) {
                    if f != text::normalize_form(f) || f.trim().is_empty() {
                        issues.push(ValidationIssue::Unnormalized {
                            row,
                            language: lang,
                            form: f.to_string(),
                        });
                    }
                }
            }
            match first_seen.get(&e.dedup_key()) {
                Some(&first_row) => issues.push(ValidationIssue::Duplicate { row, first_row }),
                None => {
                    first_seen.insert(e.dedup_key(), row);
                }
            }
        }
        ValidationReport {
            entries: self.len(),
            issues,
        }
    }

    /// Trims and lower-cases every form and drops exact duplicates, keeping
    /// the first occurrence. Entry ids are preserved.
    pub fn clean(&self) -> (Lexicon, CleaningReport) {
        let mut report = CleaningReport {
            entries_before: self.len(),
            ..Default::default()
        };
        let mut kept: Vec<LexiconEntry> = Vec::with_capacity(self.len());
        let mut first_seen: HashMap<_, EntryId> = HashMap::new();

        for original in self.entries() {
            let mut entry = original.clone();
            for lang in Language::ALL {
                let Some(before) = original.form(lang) else { continue };
                let normalized = text::normalize_form(before);
                if normalized == before {
                    continue;
                }
                let trimmed = before.trim() != before;
                let lowercased = before.trim().to_lowercase() != before.trim();
                let after = (!normalized.is_empty()).then_some(normalized);
                // the french form is mandatory; keep a blank one rather than drop it
                if lang == Language::French && after.is_none() {
                    continue;
                }
                entry.set_form(lang, after.clone());
                report.modifications.push(FormChange {
                    entry_id: entry.id,
                    language: lang,
                    before: before.to_string(),
                    after,
                    trimmed,
                    lowercased,
                });
            }
            let key = entry.dedup_key();
            if let Some(&first) = first_seen.get(&key) {
                report.removals.push(Removal {
                    entry_id: entry.id,
                    duplicate_of: first,
                });
                continue;
            }
            first_seen.insert(key, entry.id);
            kept.push(entry);
        }
        report.entries_after = kept.len();
        (Lexicon::from_entries(kept), report)
    }

    /// Appends `new` entries, assigning fresh ids. Entries that collide with
    /// an existing (or earlier batch) dedup key, or whose forms are not
    /// normalized, are rejected and reported; the rest are added.
    pub fn add_entries(&self, new: Vec<LexiconEntry>) -> (Lexicon, Vec<AddRejection>) {
        let mut existing: HashMap<_, EntryId> =
            self.entries().iter().map(|e| (e.dedup_key(), e.id)).collect();
        let mut in_batch: HashMap<_, usize> = HashMap::new();
        let mut next = self.next_id();
        let mut entries = self.entries().to_vec();
        let mut rejected = Vec::new();

        for (index, mut entry) in new.into_iter().enumerate() {
            let key = entry.dedup_key();
            let reason = if !entry.is_normalized() {
                Some(RejectReason::Unnormalized)
            } else if let Some(&i) = in_batch.get(&key) {
                Some(RejectReason::DuplicateInBatch { index: i })
            } else {
                existing
                    .get(&key)
                    .map(|&id| RejectReason::Duplicate { existing: id })
            };
            if let Some(reason) = reason {
                rejected.push(AddRejection {
                    index,
                    french: entry.french().to_string(),
                    reason,
                });
                continue;
            }
            entry.id = EntryId(next);
            next += 1;
            in_batch.insert(key.clone(), index);
            existing.insert(key, entry.id);
            entries.push(entry);
        }
        (Lexicon::from_entries(entries), rejected)
    }
}
