//! Regenerates the JSON fixtures under `tests/fixtures/` from the library,
//! so the files stay byte-identical to what the canonical serializer
//! produces. Run with:
//!
//! ```text
//! cargo run -p relconv-cli --example make_fixtures
//! ```

use std::collections::BTreeMap;
use std::path::PathBuf;

use num::Zero;
use relconv_cli::schema::{to_definition, ResolvedFile};
use relconv_core::convolution::delta;
use relconv_core::generators::{
    cyclic_relational, cyclic_table, dirac_split_system, uniform_strongly_split,
};
use relconv_core::reduction::quotient_groupoid;
use relconv_core::CRat;

fn write(name: &str, text: &str) {
    let mut path = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    path.push("tests/fixtures");
    std::fs::create_dir_all(&path).expect("fixture directory");
    path.push(name);
    std::fs::write(&path, text).expect("fixture write");
    println!("wrote {}", path.display());
}

fn serialize(r: &ResolvedFile) -> String {
    let mut s = serde_json::to_string_pretty(&to_definition(r)).expect("serializable");
    s.push('\n');
    s
}

fn deltas(n: usize, named: &[(&str, usize)]) -> BTreeMap<String, Vec<CRat>> {
    let mut map: BTreeMap<String, Vec<CRat>> = named
        .iter()
        .map(|&(name, g)| (name.to_string(), delta(n, g)))
        .collect();
    map.insert("zero".into(), vec![CRat::zero(); n]);
    map
}

fn main() {
    // Z4 over the subgroup {0, 2}, uniform 1/8 system, in group form.
    let z4 = cyclic_relational(4, 2).expect("2 divides 4");
    let qd = quotient_groupoid(&z4).expect("valid groupoid reduces");
    let strong = ResolvedFile {
        haar: Some(uniform_strongly_split(&z4, &qd).expect("uniform system exists")),
        group_form: Some((cyclic_table(4).expect("small"), vec![0, 2])),
        functions: deltas(4, &[("d0", 0), ("d1", 1)]),
        groupoid: z4,
    };
    write("z4z2-strong.json", &serialize(&strong));

    // The same structure in explicit relation form, carrying the
    // split-but-not-invariant system.
    let z4 = cyclic_relational(4, 2).expect("2 divides 4");
    let dirac = ResolvedFile {
        haar: Some(dirac_split_system(&z4, &qd).expect("dirac system exists")),
        group_form: None,
        functions: deltas(4, &[("d0", 0), ("d1", 1)]),
        groupoid: z4,
    };
    write("z4z2-dirac.json", &serialize(&dirac));

    // The relation form again with one structure tuple dropped; every such
    // deletion breaks an axiom, so `check` must exit 1 on this file.
    let mut broken_def = to_definition(&ResolvedFile {
        groupoid: cyclic_relational(4, 2).expect("2 divides 4"),
        group_form: None,
        haar: None,
        functions: BTreeMap::new(),
    });
    let triples = broken_def.l.as_mut().expect("relation form lists L");
    let before = triples.len();
    triples.retain(|t| t != &["0".to_string(), "0".to_string(), "0".to_string()]);
    assert_eq!(triples.len(), before - 1, "expected to drop exactly (0,0,0)");
    let mut text = serde_json::to_string_pretty(&broken_def).expect("serializable");
    text.push('\n');
    write("z4z2-broken.json", &text);

    // Z2 embedded as a relational group over the trivial subgroup with the
    // half-counting system; the reduced norm of the unit delta is 1/2.
    let z2 = cyclic_relational(2, 2).expect("trivial subgroup");
    let qd2 = quotient_groupoid(&z2).expect("valid groupoid reduces");
    let half = ResolvedFile {
        haar: Some(uniform_strongly_split(&z2, &qd2).expect("half-counting system")),
        group_form: Some((cyclic_table(2).expect("small"), vec![0])),
        functions: deltas(2, &[("dbar0", 0)]),
        groupoid: z2,
    };
    let half_text = serialize(&half);
    write("z2-half.json", &half_text);

    // The same file with one weight replaced by a malformed fraction.
    let bad = half_text.replacen("1/2", "1/0", 1);
    assert_ne!(bad, half_text, "expected a 1/2 weight to corrupt");
    write("badfrac.json", &bad);
}
