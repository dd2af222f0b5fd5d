use qcell_core::invariants::{run_module, MODULES};

fn check(module: &'static str) {
    let failed: Vec<String> = run_module(module, 7)
        .unwrap()
        .into_iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{}: {}", r.property, r.outcome.unwrap_err()))
        .collect();
    assert!(failed.is_empty(), "{module}: {failed:#?}");
}

#[test]
fn scalars() {
    check("scalars");
}

#[test]
fn rootdata() {
    check("rootdata");
}

#[test]
fn uqminus() {
    check("uqminus");
}

#[test]
fn pbw() {
    check("pbw");
}

#[test]
fn canonical() {
    check("canonical");
}

#[test]
fn highest_weight() {
    check("highest_weight");
}

#[test]
fn cells() {
    check("cells");
}

#[test]
fn qcluster() {
    check("qcluster");
}

#[test]
fn module_list_is_complete() {
    assert_eq!(MODULES.len(), 8);
}
