//! `posture` — vulnerability posture of a system design, from the command
//! line.
//!
//! Every command operates read-modify-write on a canonical model document,
//! so the whole workflow fits a version-controlled repository: author the
//! model with `edit`, pull in weakness and CVE knowledge with `import-cwe`
//! and `fetch-cves`, then gate on `eval`.
//!
//! Exit codes: 0 success (for `eval`: the design-wide property holds),
//! 1 tool or input failure, 2 (`eval` only) property violated — so CI can
//! tell a posture failure from a broken invocation.

mod commands;
mod render;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "posture", version, about = "Reason about the vulnerability posture of a system design model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Machine,
}

#[derive(Subcommand)]
enum Command {
    /// Write a fresh empty model document (refuses to overwrite).
    Init {
        /// Target file, or a directory to receive `design.posture.json`.
        #[arg(default_value = "design.posture.json")]
        path: PathBuf,
    },
    /// Check a model document; prints findings, exits 1 on errors.
    Validate { model: PathBuf },
    /// Evaluate the design-wide property; exits 0 when it holds, 2 when
    /// violated.
    Eval {
        model: PathBuf,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Restrict the report to one component (the exit code still
        /// reflects the whole design).
        #[arg(long)]
        component: Option<String>,
    },
    /// Explain why one vulnerability is (un)mitigated on one component.
    Explain {
        model: PathBuf,
        component: String,
        vulnerability: String,
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
    },
    /// Import a weakness-catalogue XML export as mechanism vulnerabilities.
    ImportCwe {
        model: PathBuf,
        catalog: PathBuf,
        /// Catalogue view scoping the abstraction hierarchy.
        #[arg(long, default_value = posture_cwe_catalog::DEFAULT_VIEW)]
        view: String,
        #[arg(long)]
        include_deprecated: bool,
    },
    /// Fetch CVEs for a CPE (optionally filtered to one CWE) and import
    /// them onto a component type.
    FetchCves {
        model: PathBuf,
        #[arg(long)]
        cpe: String,
        #[arg(long)]
        cwe: Option<String>,
        /// Component type receiving the records.
        #[arg(long)]
        type_id: String,
        /// Replay recorded fixtures from this directory instead of the
        /// network.
        #[arg(long)]
        offline: Option<PathBuf>,
        /// In live mode, record response bodies into this directory as a
        /// replayable fixture.
        #[arg(long)]
        record: Option<PathBuf>,
        /// Cache live responses under this directory.
        #[arg(long)]
        cache_dir: Option<PathBuf>,
        /// Cache time-to-live in seconds (default 24h).
        #[arg(long)]
        cache_ttl_secs: Option<u64>,
        /// Override the rate budget (requests per window).
        #[arg(long)]
        rate_budget: Option<usize>,
        /// Override the rate window length in seconds.
        #[arg(long)]
        rate_window_secs: Option<u64>,
    },
    /// Modify the model: add entities, link or unlink mappings, remove.
    Edit {
        model: PathBuf,
        #[command(subcommand)]
        op: EditOp,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    /// TYPES: component manifests a type (`link type <type> <component>`).
    Type,
    /// CONTROLS: control assigned to a component.
    Control,
    /// VULNS: vulnerability affects a type.
    Vuln,
    /// AVULNS: higher abstraction of a vulnerability.
    Parent,
    /// RVULNS: vulnerability covered by a rule.
    RuleVuln,
    /// RTYPES: type a rule applies to.
    RuleType,
    /// RCONTROLS: control a rule requires.
    RuleControl,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Component,
    Type,
    Vuln,
    Control,
    Rule,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VulnKindArg {
    Mechanism,
    Implementation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum OriginArg {
    Manual,
    NvdImport,
    CweImport,
}

#[derive(Subcommand)]
enum EditOp {
    AddComponent {
        id: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long = "type")]
        types: Vec<String>,
        #[arg(long = "control")]
        controls: Vec<String>,
    },
    AddType {
        id: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value = "manual")]
        origin: OriginArg,
    },
    AddControl {
        id: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        description: Option<String>,
    },
    AddVuln {
        id: String,
        #[arg(long)]
        title: Option<String>,
        /// Defaults to the kind inferred from the id scheme.
        #[arg(long, value_enum)]
        kind: Option<VulnKindArg>,
        #[arg(long = "parent")]
        parents: Vec<String>,
    },
    AddRule {
        id: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long = "vuln")]
        vulns: Vec<String>,
        #[arg(long = "type")]
        types: Vec<String>,
        #[arg(long = "control")]
        controls: Vec<String>,
    },
    /// Add one mapping edge, e.g. `link control use_memory_safe_languages
    /// Application` or `link type <cpe> OperatingSystem`.
    Link {
        #[arg(value_enum)]
        relation: RelationArg,
        item: String,
        owner: String,
    },
    /// Remove one mapping edge; removing an absent edge is a no-op.
    Unlink {
        #[arg(value_enum)]
        relation: RelationArg,
        item: String,
        owner: String,
    },
    /// Remove an entity; `--cascade` also scrubs references to it.
    Remove {
        #[arg(value_enum)]
        kind: KindArg,
        id: String,
        #[arg(long)]
        cascade: bool,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match commands::dispatch(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error[{}]: {}", err.code, err.message);
            1
        }
    };
    std::process::exit(code);
}
