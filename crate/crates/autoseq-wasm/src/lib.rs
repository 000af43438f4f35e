//! Browser demo bindings: compile characters to automata and sample the
//! sequence, watch empirical kernel growth, and classify a multiplicative
//! sequence, all returned as small JSON payloads for a static page.

use autoseq::characters::{
    classify, compile_character, enumerate_characters, Classification, ClassifyError,
    ClassifyParams, UnitGroup,
};
use autoseq::dfao::KernelReport;
use autoseq::multfun::{kernel_empirical, CMFunction, Sequence};
use autoseq::proofs::parse_builtin;
use autoseq::values::UnitValue;
use wasm_bindgen::prelude::*;

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn err_json(msg: &str) -> String {
    format!("{{\"error\":\"{}\"}}", json_escape(msg))
}

/// Hue fraction in [0, 1) for a root of unity, or null for zero: the demo
/// colors e^(2 pi i k/m) by its angle.
fn value_json(v: UnitValue) -> String {
    match v {
        UnitValue::Zero => "null".to_string(),
        UnitValue::Root { num, ord } => format!("{:.6}", num as f64 / ord as f64),
    }
}

fn sequence_spec(spec: &str) -> Result<CMFunction, String> {
    parse_builtin(spec)
        .or_else(|| CMFunction::parse(spec).ok())
        .ok_or_else(|| {
            format!("unknown spec `{spec}`: use liouville, char:Q:index, legendre:p, or a cm table")
        })
}

/// Compile the character with the given enumeration index to a base-q
/// automaton; returns states, kernel size, conductor, and the first `count`
/// sequence values (as hue fractions, null = zero).
#[wasm_bindgen]
pub fn character_automaton(modulus: u32, index: u32, base: u32, count: u32) -> String {
    if base < 2 || modulus < 1 || count > 100_000 {
        return err_json("need base >= 2, modulus >= 1, count <= 100000");
    }
    let group = UnitGroup::new(modulus as u64);
    let chars = enumerate_characters(&group);
    let Some(chi) = chars.into_iter().find(|c| c.index() == index as u64) else {
        return err_json(&format!(
            "character index {index} out of range (phi({modulus}) characters)"
        ));
    };
    let automaton = compile_character(&chi, base);
    let kernel = automaton.kernel_exact().size_lower_bound();
    let values: Vec<String> = (0..count as u64)
        .map(|n| value_json(automaton.evaluate(n)))
        .collect();
    format!(
        "{{\"label\":\"{}\",\"conductor\":{},\"order\":{},\"states\":{},\"kernel\":{},\"values\":[{}]}}",
        json_escape(&chi.to_string()),
        chi.conductor(),
        chi.order(),
        automaton.state_count(),
        kernel,
        values.join(",")
    )
}

/// Empirical kernel growth of a named sequence: cumulative class counts by
/// depth, whether the class set closed, and the state count of the inferred
/// automaton when it did.
#[wasm_bindgen]
pub fn kernel_growth(spec: &str, base: u32, depth: u32, prefix: u32) -> String {
    if base < 2 || depth < 1 || depth > 12 || prefix > 1 << 16 {
        return err_json("need base >= 2, 1 <= depth <= 12, prefix <= 65536");
    }
    let needed = (base as u64).checked_pow(depth);
    if needed.is_none() || (prefix as u64) < needed.unwrap() {
        return err_json("prefix must be at least base^depth");
    }
    let f = match sequence_spec(spec) {
        Ok(f) => f,
        Err(e) => return err_json(&e),
    };
    let report = kernel_empirical(&f, base, depth, prefix as u64);
    let KernelReport::Empirical {
        size_lower_bound,
        closed,
        per_depth_counts,
        candidate,
        ..
    } = report
    else {
        unreachable!()
    };
    let counts: Vec<String> = per_depth_counts.iter().map(usize::to_string).collect();
    let states = candidate
        .map(|a| a.state_count().to_string())
        .unwrap_or_else(|| "null".into());
    format!(
        "{{\"spec\":\"{}\",\"counts\":[{}],\"closed\":{},\"lower_bound\":{},\"states\":{}}}",
        json_escape(spec),
        counts.join(","),
        closed,
        size_lower_bound,
        states
    )
}

/// Classify a named completely multiplicative sequence as matching a
/// Dirichlet character on coprime residues or eventually zero on primes,
/// relative to the given bounds.
#[wasm_bindgen]
pub fn classify_sequence(spec: &str, base: u32, n_bound: u32, q_max: u32, p_bound: u32) -> String {
    if base < 2 || n_bound < 4 || n_bound > 200_000 || q_max < 1 || p_bound < 4 || p_bound > 100_000
    {
        return err_json("bounds out of range");
    }
    let f = match sequence_spec(spec) {
        Ok(f) => f,
        Err(e) => return err_json(&e),
    };
    let params = ClassifyParams {
        q: base,
        n_bound: n_bound as u64,
        q_max: q_max as u64,
        p_bound: p_bound as u64,
    };
    let (verdict, detail) = match classify(&f, &params) {
        Err(ClassifyError::NotCompletelyMultiplicative { m, n }) => (
            "NotCompletelyMultiplicative".to_string(),
            format!("f({m}*{n}) differs from f({m})f({n})"),
        ),
        Err(ClassifyError::UnitValueNotOne(v)) => (
            "NotCompletelyMultiplicative".to_string(),
            format!("f(1) = {v}"),
        ),
        Ok(Classification::CharacterMatch {
            character,
            conductor,
            modulus,
        }) => (
            "CharacterMatch".to_string(),
            format!(
                "{character}, conductor {conductor}; f(n) = chi(n) for n <= {} coprime to {modulus}",
                params.n_bound
            ),
        ),
        Ok(Classification::EventuallyZero { bound }) => (
            "EventuallyZero".to_string(),
            format!("f(p) = 0 for all primes p in ({bound}, {}]", params.p_bound),
        ),
        Ok(Classification::NotClassified { rejections, .. }) => {
            let first = rejections
                .first()
                .map(|r| format!("Q={}: {}", r.modulus, r.reason))
                .unwrap_or_else(|| "no admissible modulus".into());
            ("NotClassified".to_string(), first)
        }
    };
    let sample: Vec<String> = (0..200u64).map(|n| value_json(f.value(n))).collect();
    format!(
        "{{\"spec\":\"{}\",\"verdict\":\"{}\",\"detail\":\"{}\",\"values\":[{}]}}",
        json_escape(spec),
        verdict,
        json_escape(&detail),
        sample.join(",")
    )
}
