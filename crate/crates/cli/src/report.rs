//! Markdown summary of a run.

use std::fmt::Write;

use hamel_core::jprobe::Check;
use hamel_core::Claim;

use crate::envelope::RunReport;

fn statement(claim: Claim) -> &'static str {
    match claim {
        Claim::InnerInnerBounded => {
            "Measured with the frame norms on both sides, J never enlarges a vector. \
             Equality occurs exactly on multiples of j_1, so J is bounded and continuous."
        }
        Claim::AbsAbsDiscontinuous => {
            "Measured with absolute value on both sides, the chain vectors shrink to zero \
             while J keeps the value 1 on each of them, so J is not continuous at 0."
        }
        Claim::InnerAbsUnbounded => {
            "From the frame norm to absolute value no constant bounds J: for a candidate \
             bound a, the sum of the first floor(a^2)+1 chain vectors beats it."
        }
        Claim::AbsInnerDiscontinuous => {
            "From absolute value to the frame norm, the shrinking chain vectors keep \
             images of norm 1, so J is not continuous at 0."
        }
        Claim::RationalRestrictionContinuous => {
            "On the rationals J is multiplication by a fixed constant, so it is bounded \
             and continuous whichever of the two norms is used on each side."
        }
    }
}

fn witness_summary(checks: &[&Check]) -> String {
    let count = |f: fn(&Check) -> bool| checks.iter().filter(|c| f(c)).count();
    let parts = [
        ("norm bound", count(|c| matches!(c, Check::NormBound { .. }))),
        ("J value", count(|c| matches!(c, Check::JValue { .. }))),
        ("interval comparison", count(|c| matches!(c, Check::AbsLess { .. }))),
        ("exact comparison", count(|c| matches!(c, Check::Exact { .. }))),
    ];
    parts
        .iter()
        .filter(|(_, n)| *n > 0)
        .map(|(name, n)| format!("{n} {name}{}", if *n == 1 { "" } else { "s" }))
        .collect::<Vec<_>>()
        .join(", ")
}

pub fn markdown(run: &RunReport) -> String {
    let mut md = String::new();
    let _ = writeln!(md, "# J operator certificates\n");
    let _ = writeln!(md, "- tool: `{}`", run.tool_version);
    let _ = writeln!(md, "- inputs digest: `{}`", run.inputs_digest);
    let _ = writeln!(md, "- seed: {}\n", run.seed);

    let _ = writeln!(md, "| claim | verdict | witnesses | time (ms) |");
    let _ = writeln!(md, "|---|---|---|---|");
    for cert in &run.certificates {
        let p = &cert.payload;
        let time = run
            .timing_ms
            .get(p.claim.kind())
            .map_or_else(|| "-".to_owned(), ToString::to_string);
        let verdict = if p.verdict.passed() { "pass" } else { "FAIL" };
        let _ = writeln!(md, "| {} | {verdict} | {} | {time} |", p.claim, p.witnesses.len());
    }

    for cert in &run.certificates {
        let p = &cert.payload;
        let _ = writeln!(md, "\n## {}\n", p.claim);
        let _ = writeln!(md, "{}\n", statement(p.claim));
        if !p.parameters.is_empty() {
            let params: Vec<String> = p.parameters.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let _ = writeln!(md, "Parameters: {}.\n", params.join(", "));
        }
        let checks: Vec<&Check> = p.witnesses.iter().map(|w| &w.check).collect();
        let _ = writeln!(md, "Witnesses: {}.\n", witness_summary(&checks));
        for w in p.witnesses.iter().filter(|w| !matches!(w.check, Check::NormBound { .. })).take(3) {
            let _ = writeln!(md, "- {}", w.clause);
        }
        let _ = writeln!(md, "\nConclusion: {}", p.conclusion);
        let _ = writeln!(md, "\nPayload SHA-256: `{}`", cert.payload_sha256);
    }
    md
}
