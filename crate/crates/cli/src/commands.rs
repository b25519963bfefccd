//! Command implementations. Each returns the process exit code; failures
//! bubble up as [`CmdError`] carrying a stable error code for scripting.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Duration;

use posture_cwe_catalog::{import_cwe, parse_cwe_catalog, ParseOptions};
use posture_model::{
    mutate, Change, Component, ComponentType, Control, DesignModel, Entity, EntityId, EntityKind,
    IdError, LinkChange, Rule, TypeOrigin, VulnKind, Vulnerability,
};
use posture_nvd::{import_cves, NvdClient, QuerySpec};
use posture_persistence::{load_model, load_model_lenient, save_model, PersistError};
use posture_reasoner::{check_design, explain, ReasonError};

use crate::render;
use crate::{Command, EditOp, Format, KindArg, OriginArg, RelationArg, VulnKindArg};

pub struct CmdError {
    pub code: String,
    pub message: String,
}

impl CmdError {
    fn new(code: impl Into<String>, message: impl ToString) -> Self {
        CmdError {
            code: code.into(),
            message: message.to_string(),
        }
    }
}

impl From<PersistError> for CmdError {
    fn from(e: PersistError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<ReasonError> for CmdError {
    fn from(e: ReasonError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<posture_model::MutateError> for CmdError {
    fn from(e: posture_model::MutateError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<posture_cwe_catalog::CatalogError> for CmdError {
    fn from(e: posture_cwe_catalog::CatalogError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<posture_cwe_catalog::CweImportError> for CmdError {
    fn from(e: posture_cwe_catalog::CweImportError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<posture_nvd::NvdError> for CmdError {
    fn from(e: posture_nvd::NvdError) -> Self {
        CmdError::new(e.code(), &e)
    }
}

impl From<IdError> for CmdError {
    fn from(e: IdError) -> Self {
        CmdError::new("malformed-id", &e)
    }
}

type CmdResult = Result<i32, CmdError>;

pub fn dispatch(command: Command) -> CmdResult {
    match command {
        Command::Init { path } => cmd_init(&path),
        Command::Validate { model } => cmd_validate(&model),
        Command::Eval {
            model,
            format,
            component,
        } => cmd_eval(&model, format, component.as_deref()),
        Command::Explain {
            model,
            component,
            vulnerability,
            format,
        } => cmd_explain(&model, &component, &vulnerability, format),
        Command::ImportCwe {
            model,
            catalog,
            view,
            include_deprecated,
        } => cmd_import_cwe(&model, &catalog, view, include_deprecated),
        Command::FetchCves {
            model,
            cpe,
            cwe,
            type_id,
            offline,
            record,
            cache_dir,
            cache_ttl_secs,
            rate_budget,
            rate_window_secs,
        } => cmd_fetch_cves(FetchArgs {
            model,
            cpe,
            cwe,
            type_id,
            offline,
            record,
            cache_dir,
            cache_ttl_secs,
            rate_budget,
            rate_window_secs,
        }),
        Command::Edit { model, op } => cmd_edit(&model, op),
    }
}

fn cmd_init(path: &Path) -> CmdResult {
    let target = if path.is_dir() {
        path.join("design.posture.json")
    } else {
        path.to_path_buf()
    };
    if target.exists() {
        return Err(CmdError::new(
            "exists",
            format!("`{}` already exists; refusing to overwrite", target.display()),
        ));
    }
    save_model(&DesignModel::new(), &target)?;
    println!("created {}", target.display());
    Ok(0)
}

fn cmd_validate(model_path: &Path) -> CmdResult {
    let (_, report) = load_model_lenient(model_path)?;
    for finding in &report.findings {
        println!("{finding}");
    }
    if report.is_clean() {
        if report.findings.is_empty() {
            eprintln!("{}: no findings", model_path.display());
        }
        Ok(0)
    } else {
        Ok(1)
    }
}

fn cmd_eval(model_path: &Path, format: Format, component: Option<&str>) -> CmdResult {
    let model = load_model(model_path)?;
    let mut report = check_design(&model)?;
    let property_holds = report.property_holds;

    if let Some(filter) = component {
        let wanted = EntityId::new(filter)?;
        if !model.components.contains_key(&wanted) {
            return Err(CmdError::new(
                "unknown-component",
                format!("unknown component `{filter}`"),
            ));
        }
        report.components.retain(|c| c.component == wanted);
        report.explanations.retain(|c, _| *c == wanted);
    }

    match format {
        Format::Machine => print_machine(&report)?,
        Format::Human => render::posture_report(&report),
    }
    Ok(if property_holds { 0 } else { 2 })
}

fn cmd_explain(
    model_path: &Path,
    component: &str,
    vulnerability: &str,
    format: Format,
) -> CmdResult {
    let model = load_model(model_path)?;
    let component = EntityId::new(component)?;
    let vulnerability = EntityId::new(vulnerability)?;
    let node = explain(&model, &component, &vulnerability)?;
    match format {
        Format::Machine => print_machine(&node)?,
        Format::Human => {
            println!("{component}:");
            render::explanation(&node, 1);
        }
    }
    Ok(0)
}

fn cmd_import_cwe(
    model_path: &Path,
    catalog_path: &Path,
    view: String,
    include_deprecated: bool,
) -> CmdResult {
    let model = load_model(model_path)?;
    let file = File::open(catalog_path).map_err(|e| {
        CmdError::new("io-failure", format!("`{}`: {e}", catalog_path.display()))
    })?;
    let options = ParseOptions {
        view,
        include_deprecated,
    };
    let entries = parse_cwe_catalog(BufReader::new(file), &options)?;
    let outcome = import_cwe(&model, &entries)?;
    save_model(&outcome.model, model_path)?;
    println!(
        "imported {} weaknesses: {} added, {} updated, {} abstraction edges",
        entries.len(),
        outcome.added,
        outcome.updated,
        outcome.edges
    );
    if !outcome.dangling_parents.is_empty() {
        eprintln!(
            "dropped edges to {} parent(s) outside the catalogue: {}",
            outcome.dangling_parents.len(),
            render::join_ids(&outcome.dangling_parents)
        );
    }
    Ok(0)
}

struct FetchArgs {
    model: PathBuf,
    cpe: String,
    cwe: Option<String>,
    type_id: String,
    offline: Option<PathBuf>,
    record: Option<PathBuf>,
    cache_dir: Option<PathBuf>,
    cache_ttl_secs: Option<u64>,
    rate_budget: Option<usize>,
    rate_window_secs: Option<u64>,
}

fn cmd_fetch_cves(args: FetchArgs) -> CmdResult {
    let model = load_model(&args.model)?;
    let type_id = EntityId::new(args.type_id.as_str())?;
    let spec = QuerySpec::new(&args.cpe, args.cwe.as_deref())?;

    let mut client = match &args.offline {
        Some(dir) => NvdClient::fixture(dir),
        None => NvdClient::live(),
    };
    if let Some(dir) = &args.cache_dir {
        client = client.with_cache(dir, args.cache_ttl_secs.map(Duration::from_secs));
    }
    if let Some(budget) = args.rate_budget {
        let window = Duration::from_secs(args.rate_window_secs.unwrap_or(30));
        client = client.with_rate_budget(budget, window);
    }
    if let Some(dir) = &args.record {
        client = client.with_record_dir(dir);
    }

    let records = client.fetch_cves(&spec)?;
    let outcome = import_cves(&model, &records, &type_id)?;
    save_model(&outcome.model, &args.model)?;
    println!(
        "fetched {} record(s): {} added, {} updated, {} placeholder weakness(es), {} new link(s) on {}",
        records.len(),
        outcome.added,
        outcome.updated,
        outcome.placeholders,
        outcome.linked,
        type_id
    );
    Ok(0)
}

fn cmd_edit(model_path: &Path, op: EditOp) -> CmdResult {
    let model = load_model(model_path)?;
    let change = edit_change(op)?;
    let updated = mutate(&model, change)?;
    save_model(&updated, model_path)?;
    Ok(0)
}

fn edit_change(op: EditOp) -> Result<Change, CmdError> {
    let id_of = |s: &str| EntityId::new(s).map_err(CmdError::from);
    let ids_of = |ss: &[String]| -> Result<BTreeSet<EntityId>, CmdError> {
        ss.iter().map(|s| id_of(s)).collect()
    };
    Ok(match op {
        EditOp::AddComponent {
            id,
            name,
            types,
            controls,
        } => Change::Insert(Entity::Component(Component {
            name: name.unwrap_or_else(|| id.clone()),
            id: id_of(&id)?,
            types: ids_of(&types)?,
            controls: ids_of(&controls)?,
        })),
        EditOp::AddType { id, name, origin } => Change::Insert(Entity::ComponentType(ComponentType {
            name: name.unwrap_or_else(|| id.clone()),
            id: id_of(&id)?,
            vulns: BTreeSet::new(),
            origin: match origin {
                OriginArg::Manual => TypeOrigin::Manual,
                OriginArg::NvdImport => TypeOrigin::NvdImport,
                OriginArg::CweImport => TypeOrigin::CweImport,
            },
        })),
        EditOp::AddControl {
            id,
            name,
            description,
        } => Change::Insert(Entity::Control(Control {
            name: name.unwrap_or_else(|| id.clone()),
            id: id_of(&id)?,
            description,
        })),
        EditOp::AddVuln {
            id,
            title,
            kind,
            parents,
        } => {
            let entity_id = id_of(&id)?;
            let kind = match kind {
                Some(VulnKindArg::Mechanism) => VulnKind::Mechanism,
                Some(VulnKindArg::Implementation) => VulnKind::Implementation,
                None => Vulnerability::kind_from_id(&entity_id),
            };
            Change::Insert(Entity::Vulnerability(Vulnerability {
                title: title.unwrap_or_else(|| id.clone()),
                id: entity_id,
                kind,
                avulns: ids_of(&parents)?,
                metadata: None,
            }))
        }
        EditOp::AddRule {
            id,
            name,
            vulns,
            types,
            controls,
        } => Change::Insert(Entity::Rule(Rule {
            name: name.unwrap_or_else(|| id.clone()),
            id: id_of(&id)?,
            rvulns: ids_of(&vulns)?,
            rtypes: ids_of(&types)?,
            rcontrols: ids_of(&controls)?,
        })),
        EditOp::Link {
            relation,
            item,
            owner,
        } => Change::Link(link_change(relation, &item, &owner)?),
        EditOp::Unlink {
            relation,
            item,
            owner,
        } => Change::Unlink(link_change(relation, &item, &owner)?),
        EditOp::Remove { kind, id, cascade } => Change::Delete {
            kind: match kind {
                KindArg::Component => EntityKind::Component,
                KindArg::Type => EntityKind::ComponentType,
                KindArg::Vuln => EntityKind::Vulnerability,
                KindArg::Control => EntityKind::Control,
                KindArg::Rule => EntityKind::Rule,
            },
            id: id_of(&id)?,
            cascade,
        },
    })
}

fn link_change(relation: RelationArg, item: &str, owner: &str) -> Result<LinkChange, CmdError> {
    let item = EntityId::new(item)?;
    let owner = EntityId::new(owner)?;
    Ok(match relation {
        RelationArg::Type => LinkChange::TypeToComponent {
            type_id: item,
            component: owner,
        },
        RelationArg::Control => LinkChange::ControlToComponent {
            control: item,
            component: owner,
        },
        RelationArg::Vuln => LinkChange::VulnToType {
            vuln: item,
            type_id: owner,
        },
        RelationArg::Parent => LinkChange::ParentToVuln {
            parent: item,
            vuln: owner,
        },
        RelationArg::RuleVuln => LinkChange::VulnToRule {
            vuln: item,
            rule: owner,
        },
        RelationArg::RuleType => LinkChange::TypeToRule {
            type_id: item,
            rule: owner,
        },
        RelationArg::RuleControl => LinkChange::ControlToRule {
            control: item,
            rule: owner,
        },
    })
}

fn print_machine<T: serde::Serialize>(value: &T) -> Result<(), CmdError> {
    let bytes = posture_persistence::canonical_json_bytes(value)
        .map_err(|e| CmdError::new("io-failure", e))?;
    let mut out = std::io::stdout().lock();
    use std::io::Write;
    out.write_all(&bytes)
        .map_err(|e| CmdError::new("io-failure", e))?;
    Ok(())
}
