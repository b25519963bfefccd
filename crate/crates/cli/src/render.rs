//! Human-readable rendering: the component table and explanation outlines.

use std::collections::BTreeSet;

use posture_model::EntityId;
use posture_reasoner::{Basis, ExplanationNode, GapReason, PostureReport, Verdict};

pub fn join_ids(ids: &BTreeSet<EntityId>) -> String {
    if ids.is_empty() {
        return "-".to_string();
    }
    ids.iter()
        .map(EntityId::as_str)
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn posture_report(report: &PostureReport) {
    if report.property_holds {
        println!("property holds: no component has an unmitigated vulnerability");
    } else {
        println!("property violated: unmitigated vulnerabilities remain");
    }
    println!();

    let headers = ["COMPONENT", "VULNERABLE", "CVULNS", "UNMITIGATED"];
    let rows: Vec<[String; 4]> = report
        .components
        .iter()
        .map(|c| {
            [
                c.component.to_string(),
                if c.vulnerable { "yes" } else { "no" }.to_string(),
                join_ids(&c.cvulns),
                join_ids(&c.unmitigated),
            ]
        })
        .collect();
    let widths: Vec<usize> = (0..4)
        .map(|i| {
            rows.iter()
                .map(|r| r[i].len())
                .chain([headers[i].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let print_row = |cells: [&str; 4]| {
        println!(
            "{:<w0$}  {:<w1$}  {:<w2$}  {:<w3$}",
            cells[0],
            cells[1],
            cells[2],
            cells[3],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3],
        );
    };
    print_row(headers);
    for row in &rows {
        print_row([&row[0], &row[1], &row[2], &row[3]]);
    }

    if !report.explanations.is_empty() {
        println!();
        for (component, per_vuln) in &report.explanations {
            println!("{component}:");
            for node in per_vuln.values() {
                explanation(node, 1);
            }
        }
    }
}

pub fn explanation(node: &ExplanationNode, indent: usize) {
    let pad = "  ".repeat(indent);
    let verdict = match node.verdict {
        Verdict::Mitigated => "mitigated",
        Verdict::Unmitigated => "unmitigated",
    };
    let marker = if node.truncated { " [truncated]" } else { "" };
    match &node.basis {
        Basis::DirectRule { rule, matched_type } => {
            println!(
                "{pad}{} — {verdict} by rule `{rule}` (type `{matched_type}`){marker}",
                node.vulnerability
            );
        }
        Basis::Abstraction { children } => {
            println!(
                "{pad}{} — {verdict} via its higher abstractions{marker}",
                node.vulnerability
            );
            for child in children {
                explanation(child, indent + 1);
            }
        }
        Basis::None { missing, children } => {
            println!("{pad}{} — {verdict}{marker}", node.vulnerability);
            if missing.is_empty() {
                println!("{pad}  no rule covers this vulnerability");
            }
            for gap in missing {
                match &gap.failure {
                    GapReason::NoTypeMatch => {
                        println!("{pad}  rule `{}`: no matching component type", gap.rule);
                    }
                    GapReason::MissingControls { controls } => {
                        let list = controls
                            .iter()
                            .map(EntityId::as_str)
                            .collect::<Vec<_>>()
                            .join(", ");
                        println!("{pad}  rule `{}`: missing controls: {list}", gap.rule);
                    }
                }
            }
            if !children.is_empty() {
                println!("{pad}  higher abstractions (all must be mitigated):");
                for child in children {
                    explanation(child, indent + 2);
                }
            }
        }
    }
}
