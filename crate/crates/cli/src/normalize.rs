use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use crnf::equivalence::{equivalent, prepare, Verdict};
use crnf::format::{write_germ_phi, write_map};
use crnf::locus::{classify_case, CaseTag};
use crnf::normalizer::{degenerate_chain, kolar_normalize, special_normalize, strong_normalize, ConditionRole, NormalizationParams, NormalizationResult};
use serde_json::json;

use crate::outcome::{rational_arg, read_curve, read_germ, scalar_arg, scalar_json, terms_json, write, CmdResult, Failure, Outcome, INEQUIVALENT, OK, PRECONDITION, UNDECIDED};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Form {
    Kolar,
    Special,
    Strong,
}

pub struct NormalizeArgs<'a> {
    pub path: &'a Path,
    pub form: Form,
    pub weight: Option<u32>,
    pub lambda: &'a str,
    pub omega: Option<&'a str>,
    pub rho: Option<&'a str>,
    pub chain: Option<&'a Path>,
    pub out: Option<&'a Path>,
    pub map_out: Option<&'a Path>,
    pub cert_out: Option<&'a Path>,
}

fn role_name(r: ConditionRole) -> &'static str {
    match r {
        ConditionRole::Imposed => "imposed",
        ConditionRole::Checked => "checked",
        ConditionRole::Claim => "claim",
    }
}

/// One `#`-prefixed line per condition, so the block can trail a germ file.
fn certificate(r: &NormalizationResult, assert_claims: bool) -> String {
    let mut s = format!("# certificate form={} k={} W={} class={}\n", r.kind.name(), r.model.k, r.germ.trunc(), r.model.class.name());
    let _ = writeln!(s, "# residual: {}", if r.residual.is_zero() { "0 = 0" } else { "NONZERO" });
    for c in &r.conditions {
        let verdict = match (c.pass(), c.role) {
            (true, _) => "0 = 0".to_string(),
            (false, ConditionRole::Claim) if !assert_claims => format!("{} (claim not asserted)", c.value),
            (false, _) => format!("{} != 0 FAILED", c.value),
        };
        let _ = writeln!(s, "# {} w={} {}: {verdict}", role_name(c.role), c.weight, c.condition);
    }
    s
}

pub fn normalize(args: NormalizeArgs<'_>) -> CmdResult {
    let phi = read_germ(args.path)?.to_phi()?;
    let w = args.weight.unwrap_or(phi.trunc());
    let mut params = NormalizationParams::with_lambda(rational_arg("lambda", args.lambda)?);
    if let Some(o) = args.omega {
        params.omega = scalar_arg("omega", o)?;
    }
    if let Some(r) = args.rho {
        params.rho = rational_arg("rho", r)?;
    }
    let prep = prepare(&phi, w)?;
    let mut t2 = false;
    let result = match args.form {
        Form::Kolar => kolar_normalize(&prep.germ, &params, w)?,
        Form::Special => special_normalize(&prep.germ, &params, w)?,
        Form::Strong => {
            let chain = match args.chain {
                Some(p) => prep.carry(&read_curve(p)?, w)?,
                None => {
                    if classify_case(phi.series(), &[])?.case != CaseTag::T2 {
                        return Err(Failure::new(PRECONDITION, "--form strong needs --chain unless the germ is of case T2"));
                    }
                    degenerate_chain(&prep.germ, w)?
                }
            };
            t2 = classify_case(prep.germ.series(), &[]).map(|r| r.case == CaseTag::T2).unwrap_or(false);
            strong_normalize(&prep.germ, &chain, &params, w)?
        }
    };
    let (map, relative) = match &prep.to_tangent {
        Some(t) => (result.map.compose(t)?, false),
        None => (result.map.clone(), true),
    };
    let cert = certificate(&result, t2);
    let certified = result.certified() && (!t2 || result.claims_hold());
    if !certified {
        return Err(Failure::new(PRECONDITION, format!("normal form failed its certificate\n{cert}")));
    }

    let germ_text = write_germ_phi(&result.germ);
    let map_text = write_map(&map);
    if let Some(p) = args.out {
        write(p, &germ_text)?;
    }
    if let Some(p) = args.map_out {
        write(p, &map_text)?;
    }
    if let Some(p) = args.cert_out {
        write(p, &cert)?;
    }
    let mut text = if args.out.is_none() { germ_text } else { String::new() };
    if relative {
        text.push_str("# map is relative to the tangent-model form of the input\n");
    }
    text.push_str(&cert);

    let json = json!({
        "command": "normalize",
        "form": result.kind.name(),
        "k": result.model.k,
        "W": result.germ.trunc(),
        "class": result.model.class.name(),
        "params": { "lambda": params.lambda.to_string(), "omega": scalar_json(&params.omega), "rho": params.rho.to_string() },
        "germ": terms_json(result.germ.series()),
        "map": { "f": terms_json(&map.f), "g": terms_json(&map.g), "relative_to_tangent_form": relative },
        "residual_zero": result.residual.is_zero(),
        "conditions": result.conditions.iter().map(|c| json!({
            "role": role_name(c.role), "weight": c.weight, "condition": c.condition.to_string(), "value": c.value.to_string(),
        })).collect::<Vec<_>>(),
        "certified": certified,
    });
    Ok(Outcome { code: OK, text, json })
}

pub fn equiv(a: &Path, b: &Path, weight: Option<u32>, chains_a: &[PathBuf], chains_b: &[PathBuf], map_out: Option<&Path>) -> CmdResult {
    let ga = read_germ(a)?.to_phi()?;
    let gb = read_germ(b)?.to_phi()?;
    let w = weight.unwrap_or(ga.trunc().min(gb.trunc()));
    let ca = chains_a.iter().map(|p| read_curve(p)).collect::<Result<Vec<_>, _>>()?;
    let cb = chains_b.iter().map(|p| read_curve(p)).collect::<Result<Vec<_>, _>>()?;
    Ok(match equivalent(&ga, &gb, w, &ca, &cb)? {
        Verdict::Equivalent { witness, map, residual_zero, relative_to_tangent_form } => {
            if let Some(p) = map_out {
                write(p, &write_map(&map))?;
            }
            let mut text = format!("equivalent {witness}\n");
            if relative_to_tangent_form {
                text.push_str("# map relates the tangent-model forms of the inputs\n");
            }
            let json = json!({
                "command": "equiv", "verdict": "equivalent", "witness": witness.to_string(),
                "map": { "f": terms_json(&map.f), "g": terms_json(&map.g), "relative_to_tangent_form": relative_to_tangent_form },
                "residual_zero": residual_zero,
            });
            Outcome { code: OK, text, json }
        }
        Verdict::Inequivalent(s) => Outcome {
            code: INEQUIVALENT,
            text: format!("inequivalent: {s}\n"),
            json: json!({ "command": "equiv", "verdict": "inequivalent", "invariant": s }),
        },
        Verdict::Undecided(s) => Outcome {
            code: UNDECIDED,
            text: format!("undecided: no exact candidate ({s})\n"),
            json: json!({ "command": "equiv", "verdict": "undecided", "reason": s }),
        },
    })
}
