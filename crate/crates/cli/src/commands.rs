use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use hamel_core::jprobe::SampleRange;
use hamel_core::linmap::{extend_codomain_basis, kernel_decomposition, range_basis};
use hamel_core::qspace::greedy_extract;
use hamel_core::{BasisList, Evaluator, JOperator, LinearMap, ProbeCertificate, Space};
use serde_json::json;

use crate::args::{Cli, Command, Common, ProbeArgs, ProbeKind, ProbeParams, ReportArgs, VerifyArgs};
use crate::definition::{self, Loaded};
use crate::envelope::{write_atomic, write_json, CertificateFile, RunReport, RUN_REPORT_FORMAT, TOOL_VERSION};
use crate::{report, verify, CliError};

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Space(c) => space(c, out),
        Command::Map(c) => map(c, out),
        Command::Jop(c) => jop(c, out),
        Command::Probe(p) => probe(p, out),
        Command::Report(r) => run_report(r, out),
        Command::Verify(v) => verify_file(v, out),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Input(format!("write failed: {e}"))
}

pub fn load(common: &Common) -> Result<Loaded, CliError> {
    match &common.define {
        Some(path) => definition::load_file(path),
        None => Ok(definition::bundled(common.symbols)),
    }
}

fn vectors_json(space: &Space, basis: &BasisList) -> serde_json::Value {
    json!(basis.iter().map(|v| space.named(v)).collect::<Vec<_>>())
}

fn print_list(out: &mut dyn Write, title: &str, space: &Space, basis: &BasisList) -> Result<(), CliError> {
    writeln!(out, "{title} ({}):", basis.len()).map_err(io)?;
    for (i, v) in basis.iter().enumerate() {
        writeln!(out, "  [{i}] {}", space.display(v)).map_err(io)?;
    }
    Ok(())
}

fn maybe_write(common: &Common, value: &serde_json::Value) -> Result<(), CliError> {
    match &common.out {
        Some(path) => write_json(path, value),
        None => Ok(()),
    }
}

fn space(common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(common)?;
    let basis = greedy_extract(&loaded.enumeration);
    print_list(out, "basis", &loaded.space, &basis)?;
    maybe_write(
        common,
        &json!({
            "inputs_digest": loaded.digest,
            "basis": vectors_json(&loaded.space, &basis),
        }),
    )
}

fn map(common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(common)?;
    let images = loaded
        .map_images
        .clone()
        .ok_or_else(|| CliError::Input("the definition has no `map` section".into()))?;
    let s = &loaded.space;
    let domain = greedy_extract(&loaded.enumeration);
    let lin = LinearMap::new(domain, images)?;
    let decomposition = kernel_decomposition(&lin, &loaded.enumeration)?;
    let range = range_basis(&decomposition);
    let codomain_enum = loaded.codomain.clone().unwrap_or_else(|| s.units());
    let extended = extend_codomain_basis(&range, &codomain_enum)?;

    print_list(out, "domain basis", s, lin.domain_basis())?;
    print_list(out, "kernel", s, decomposition.kernel_basis())?;
    print_list(out, "complement", s, decomposition.complement_basis())?;
    print_list(out, "range", s, &range.vectors)?;
    print_list(out, "codomain basis", s, &extended)?;
    maybe_write(
        common,
        &json!({
            "inputs_digest": loaded.digest,
            "domain_basis": vectors_json(s, lin.domain_basis()),
            "kernel": vectors_json(s, decomposition.kernel_basis()),
            "complement": vectors_json(s, decomposition.complement_basis()),
            "range": vectors_json(s, &range.vectors),
            "range_provenance": range.provenance,
            "codomain_basis": vectors_json(s, &extended),
        }),
    )
}

/// Builds `J` over the greedy basis. `min_chain` lengthens a requested chain
/// when a probe needs more vectors than were asked for.
fn build(loaded: &Loaded, common: &Common, min_chain: usize) -> Result<JOperator, CliError> {
    let basis = greedy_extract(&loaded.enumeration);
    let start = common.chain_start;
    let len = common.chain_length.unwrap_or(basis.len().saturating_sub(start)).max(min_chain);
    let ev = Evaluator::with_cap(&loaded.space, common.max_bits);
    Ok(JOperator::build(&ev, &basis, start..start.saturating_add(len))?)
}

fn jop(common: &Common, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(common)?;
    let j = build(&loaded, common, 0)?;
    let s = j.space();
    writeln!(out, "chain ({}):", j.chain_len()).map_err(io)?;
    for (i, (v, q)) in j.j_chain().iter().zip(j.scales()).enumerate() {
        writeln!(out, "  j_{} = {}  (scale {q})", i + 1, s.display(v)).map_err(io)?;
    }
    let untouched = j.full_basis().len() - j.chain_len();
    writeln!(out, "untouched basis vectors: {untouched}").map_err(io)?;
    maybe_write(
        common,
        &json!({
            "inputs_digest": loaded.digest,
            "chain": j.j_chain().iter().map(|v| s.named(v)).collect::<Vec<_>>(),
            "scales": j.scales(),
            "subbasis": j.subbasis().iter().map(|v| s.named(v)).collect::<Vec<_>>(),
        }),
    )
}

/// Chain length a probe needs beyond what `J` would be built with anyway.
fn needed_chain(kind: ProbeKind, params: &ProbeParams) -> usize {
    match kind {
        ProbeKind::InnerAbs => {
            use num_traits::ToPrimitive;
            params.bound.square().floor().to_usize().map_or(usize::MAX, |n| n.saturating_add(1))
        }
        _ => 0,
    }
}

pub fn run_probe(kind: ProbeKind, j: &JOperator, params: &ProbeParams) -> Result<ProbeCertificate, CliError> {
    let terms = params.terms.min(j.chain_len());
    Ok(match kind {
        ProbeKind::InnerInner => {
            let samples = j.sample_vectors(params.samples, params.seed, SampleRange::default());
            j.probe_inner_inner(&samples, Some(params.seed))?
        }
        ProbeKind::AbsAbs => j.probe_abs_abs(terms, params.decay_bits)?,
        ProbeKind::InnerAbs => j.probe_inner_abs(&params.bound)?,
        ProbeKind::AbsInner => j.probe_abs_inner(terms, params.decay_bits)?,
        ProbeKind::Rational => j.probe_rational_restriction(&params.rational)?,
    })
}

/// Builds `J` for `kind`, lengthening the chain for inner-abs when the
/// basis allows it.
fn operator_for(loaded: &Loaded, common: &Common, kind: ProbeKind, params: &ProbeParams) -> Result<JOperator, CliError> {
    if params.bound.is_negative() && kind == ProbeKind::InnerAbs {
        return Err(hamel_core::Error::InvalidArgument("the bound must be non-negative".into()).into());
    }
    let basis_len = greedy_extract(&loaded.enumeration).len();
    let need = needed_chain(kind, params);
    if need.saturating_add(common.chain_start) > basis_len {
        return Err(hamel_core::Error::InsufficientBasis {
            needed: need.saturating_add(common.chain_start),
            available: basis_len,
        }
        .into());
    }
    build(loaded, common, need)
}

fn probe(args: &ProbeArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let loaded = load(&args.common)?;
    let j = operator_for(&loaded, &args.common, args.kind, &args.params)?;
    let cert = run_probe(args.kind, &j, &args.params)?;
    let verdict = cert.verdict;
    let file = CertificateFile::new(cert, &loaded.digest);
    match &args.common.out {
        Some(path) => {
            write_json(path, &file)?;
            writeln!(out, "{}: {:?} -> {}", args.kind.claim(), verdict, path.display()).map_err(io)?;
        }
        None => {
            let text = serde_json::to_string_pretty(&file).expect("certificates serialize");
            writeln!(out, "{text}").map_err(io)?;
        }
    }
    if verdict.passed() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("{} probe did not pass", args.kind.claim())))
    }
}

fn read_certificates(path: &Path) -> Result<Vec<CertificateFile>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bad = |e: serde_json::Error| CliError::CheckFailed(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.get("format").and_then(|f| f.as_str()) == Some(RUN_REPORT_FORMAT) {
        Ok(serde_json::from_value::<RunReport>(value).map_err(bad)?.certificates)
    } else {
        Ok(vec![serde_json::from_value(value).map_err(bad)?])
    }
}

fn run_report(args: &ReportArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut timing_ms = BTreeMap::new();
    let (certificates, digest) = if args.certificates.is_empty() {
        let loaded = load(&args.common)?;
        let mut certs = Vec::new();
        for kind in ProbeKind::ALL {
            let start = Instant::now();
            let j = operator_for(&loaded, &args.common, kind, &args.params)?;
            let cert = run_probe(kind, &j, &args.params)?;
            timing_ms.insert(kind.claim().kind().to_owned(), start.elapsed().as_millis() as u64);
            certs.push(CertificateFile::new(cert, &loaded.digest));
        }
        (certs, loaded.digest)
    } else {
        let mut certs = Vec::new();
        for path in &args.certificates {
            certs.extend(read_certificates(path)?);
        }
        let digest = certs.first().map(|c| c.inputs_digest.clone()).unwrap_or_default();
        (certs, digest)
    };
    let run = RunReport {
        format: RUN_REPORT_FORMAT.to_owned(),
        tool_version: TOOL_VERSION.to_owned(),
        inputs_digest: digest,
        seed: args.params.seed,
        timing_ms,
        certificates,
    };
    let markdown = report::markdown(&run);
    match &args.common.out {
        Some(path) => write_atomic(path, markdown.as_bytes())?,
        None => out.write_all(markdown.as_bytes()).map_err(io)?,
    }
    if let Some(path) = &args.run_report {
        write_json(path, &run)?;
    }
    let failed: Vec<String> = run
        .certificates
        .iter()
        .filter(|c| !c.payload.verdict.passed())
        .map(|c| c.payload.claim.kind().to_owned())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::CheckFailed(format!("failing claims: {}", failed.join(", "))))
    }
}

fn verify_file(args: &VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let bytes = std::fs::read(&args.file).map_err(|e| CliError::Input(format!("{}: {e}", args.file.display())))?;
    let outcome = match std::str::from_utf8(&bytes) {
        Ok(text) => verify::verify_text(text),
        Err(_) => return Err(CliError::CheckFailed(format!("{}: not UTF-8", args.file.display()))),
    };
    for (i, (claim, count)) in outcome.checked.iter().enumerate() {
        let ok = !outcome.failures.iter().any(|f| f.certificate == i);
        let status = if ok { "ok" } else { "FAILED" };
        writeln!(out, "certificate {i}: {claim}: {count} witnesses: {status}").map_err(io)?;
    }
    for f in &outcome.failures {
        writeln!(out, "{f}").map_err(io)?;
    }
    if outcome.ok() {
        Ok(())
    } else {
        let first = outcome.failures.first().map(ToString::to_string).unwrap_or_else(|| "nothing to verify".into());
        Err(CliError::CheckFailed(first))
    }
}
