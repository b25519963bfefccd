//! Event-driven parser for the official weakness-catalogue XML export.
//!
//! Only three things are taken from the export: the weakness entries
//! themselves (id, name, abstraction label, status, description text), the
//! `ChildOf` relations scoped to one view (other relation natures are not
//! abstraction and would corrupt the partial order), and the declared view
//! ids (to reject requests for a view the catalogue does not carry).

use std::collections::BTreeSet;
use std::io::BufRead;

use posture_model::EntityId;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

/// The research-concepts view: the catalogue's primary abstraction
/// hierarchy.
pub const DEFAULT_VIEW: &str = "1000";

/// One weakness from the catalogue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CweEntry {
    pub id: EntityId,
    pub name: String,
    /// Pass-through abstraction-level label (Pillar/Class/Base/Variant).
    pub abstraction: String,
    /// `ChildOf` targets within the selected view.
    pub parents: BTreeSet<EntityId>,
    pub description: String,
    pub deprecated: bool,
}

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// View id scoping the abstraction edges.
    pub view: String,
    /// Deprecated entries are dropped unless set.
    pub include_deprecated: bool,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            view: DEFAULT_VIEW.to_string(),
            include_deprecated: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CatalogError {
    #[error("malformed catalog at byte offset {offset}: {message}")]
    MalformedCatalog { offset: u64, message: String },
    #[error("view `{0}` is not declared by this catalog")]
    UnknownView(String),
}

impl CatalogError {
    pub fn code(&self) -> &'static str {
        match self {
            CatalogError::MalformedCatalog { .. } => "malformed-catalog",
            CatalogError::UnknownView(_) => "unknown-view",
        }
    }
}

#[derive(Default)]
struct PendingEntry {
    id: String,
    name: String,
    abstraction: String,
    parents: BTreeSet<EntityId>,
    description: String,
    deprecated: bool,
}

/// Parses a catalogue export into entries, one per weakness, with parent
/// edges taken from `ChildOf` relations in the selected view.
pub fn parse_cwe_catalog<R: BufRead>(
    source: R,
    options: &ParseOptions,
) -> Result<Vec<CweEntry>, CatalogError> {
    let mut reader = Reader::from_reader(source);
    reader.config_mut().trim_text(true);

    let mut buf = Vec::new();
    let mut entries: Vec<CweEntry> = Vec::new();
    let mut declared_views: BTreeSet<String> = BTreeSet::new();
    let mut current: Option<PendingEntry> = None;
    let mut capturing_description = false;

    loop {
        let offset = reader.buffer_position();
        let malformed = |message: String| CatalogError::MalformedCatalog { offset, message };
        match reader.read_event_into(&mut buf) {
            Err(e) => return Err(malformed(e.to_string())),
            Ok(Event::Eof) => break,
            Ok(Event::Start(start)) => match start.local_name().as_ref() {
                b"Weakness" => {
                    let mut entry = PendingEntry {
                        id: required_attr(&start, "ID").map_err(&malformed)?,
                        name: required_attr(&start, "Name").map_err(&malformed)?,
                        ..PendingEntry::default()
                    };
                    entry.abstraction = optional_attr(&start, "Abstraction")
                        .map_err(&malformed)?
                        .unwrap_or_default();
                    entry.deprecated = optional_attr(&start, "Status")
                        .map_err(&malformed)?
                        .is_some_and(|s| s == "Deprecated");
                    current = Some(entry);
                }
                b"Description" => {
                    if let Some(entry) = &current {
                        // Only the weakness's own (first) description block.
                        capturing_description = entry.description.is_empty();
                    }
                }
                b"Related_Weakness" => {
                    record_relation(&start, options, current.as_mut()).map_err(&malformed)?;
                }
                b"View" => {
                    if let Some(view_id) = optional_attr(&start, "ID").map_err(&malformed)? {
                        declared_views.insert(view_id);
                    }
                }
                _ => {}
            },
            Ok(Event::Empty(empty)) => match empty.local_name().as_ref() {
                b"Related_Weakness" => {
                    record_relation(&empty, options, current.as_mut()).map_err(&malformed)?;
                }
                b"View" => {
                    if let Some(view_id) = optional_attr(&empty, "ID").map_err(&malformed)? {
                        declared_views.insert(view_id);
                    }
                }
                _ => {}
            },
            Ok(Event::End(end)) => match end.local_name().as_ref() {
                b"Description" => capturing_description = false,
                b"Weakness" => {
                    if let Some(entry) = current.take() {
                        entries.push(CweEntry {
                            id: EntityId::new(format!("CWE-{}", entry.id))
                                .map_err(|e| malformed(e.to_string()))?,
                            name: entry.name,
                            abstraction: entry.abstraction,
                            parents: entry.parents,
                            description: entry.description,
                            deprecated: entry.deprecated,
                        });
                    }
                }
                _ => {}
            },
            Ok(Event::Text(text)) => {
                if capturing_description {
                    if let Some(entry) = current.as_mut() {
                        let piece = text.unescape().map_err(|e| malformed(e.to_string()))?;
                        if !entry.description.is_empty() {
                            entry.description.push(' ');
                        }
                        entry.description.push_str(piece.trim());
                    }
                }
            }
            Ok(_) => {}
        }
        buf.clear();
    }

    if !declared_views.is_empty() && !declared_views.contains(&options.view) {
        return Err(CatalogError::UnknownView(options.view.clone()));
    }
    if !options.include_deprecated {
        entries.retain(|e| !e.deprecated);
    }
    Ok(entries)
}

fn record_relation(
    element: &BytesStart<'_>,
    options: &ParseOptions,
    current: Option<&mut PendingEntry>,
) -> Result<(), String> {
    let Some(entry) = current else {
        return Ok(());
    };
    let nature = optional_attr(element, "Nature")?;
    let view = optional_attr(element, "View_ID")?;
    let target = optional_attr(element, "CWE_ID")?;
    if nature.as_deref() == Some("ChildOf") && view.as_deref() == Some(options.view.as_str()) {
        if let Some(target) = target {
            let parent = EntityId::new(format!("CWE-{target}")).map_err(|e| e.to_string())?;
            entry.parents.insert(parent);
        }
    }
    Ok(())
}

fn required_attr(element: &BytesStart<'_>, name: &str) -> Result<String, String> {
    optional_attr(element, name)?.ok_or_else(|| {
        format!(
            "element `{}` is missing attribute `{name}`",
            String::from_utf8_lossy(element.local_name().as_ref())
        )
    })
}

fn optional_attr(element: &BytesStart<'_>, name: &str) -> Result<Option<String>, String> {
    let attr = element
        .try_get_attribute(name)
        .map_err(|e| e.to_string())?;
    attr.map(|a| {
        a.unescape_value()
            .map(|v| v.into_owned())
            .map_err(|e| e.to_string())
    })
    .transpose()
}
